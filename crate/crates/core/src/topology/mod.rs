//! Topological grasp classification.
//!
//! A grasp is closed-loop when the tip is grounded to the same system as the
//! base and the object lies inside the loop formed by the mechanism and the
//! ground. In the plane "inside" means nonzero winding number about the
//! object's centroid. In space two tests are offered: the planar test applied
//! in the plane of a flat loop, and the linking number against a closed loop
//! threaded through the object.

mod branching;
mod linking;
mod planar;

pub use branching::{BranchingMechanism, GroundedTip};
pub use linking::{gauss_linking_integral, linking_number, linking_number_detailed, loop_separation, LinkingDetail, MIN_SEPARATION, ROUNDING_LIMIT};
pub use planar::winding_number;

use serde::{Deserialize, Serialize};
use std::io::Read;

pub type P2 = [f64; 2];
pub type P3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("need at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("vertex {0} repeats its predecessor")]
    RepeatedVertex(usize),
    #[error("vertex {0} is not finite")]
    NonFinite(usize),
    #[error("point lies on the curve (distance {distance:e})")]
    OnBoundary { distance: f64 },
    #[error("closed curve crosses itself between edges {0} and {1}; interior is ambiguous")]
    AmbiguousInterior(usize, usize),
    #[error("loops touch (separation {separation:e} m)")]
    Degenerate { separation: f64 },
    #[error("linking number not resolved (Gauss integral {gauss_integral}, crossings {crossing_count:?}): {hint}")]
    Precision { gauss_integral: f64, crossing_count: Option<i32>, hint: String },
    #[error("mechanism is {0} but the object is {1}")]
    DimensionMismatch(&'static str, &'static str),
    #[error("object region is invalid: {0}")]
    InvalidObject(String),
    #[error("closed loop is not planar (out-of-plane extent {0:e} m)")]
    NonPlanarLoop(f64),
    #[error("branching mechanism: {0}")]
    InvalidTree(String),
    #[error("vertex file: {0}")]
    Csv(String),
}

/// Vertices of a polyline in the plane or in space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Polyline {
    Planar(Vec<P2>),
    Spatial(Vec<P3>),
}

impl Polyline {
    pub fn len(&self) -> usize {
        match self {
            Polyline::Planar(v) => v.len(),
            Polyline::Spatial(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dimension(&self) -> &'static str {
        match self {
            Polyline::Planar(_) => "planar",
            Polyline::Spatial(_) => "spatial",
        }
    }
}

/// Serial chain from base to tip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismPath {
    pub vertices: Polyline,
    pub base_grounded: bool,
    pub tip_grounded: bool,
    /// Path through the ground from tip back to base, endpoints excluded. `None`
    /// closes with the straight segment.
    #[serde(default)]
    pub ground_closure: Option<Polyline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectRegion {
    Disk { center: P2, radius: f64 },
    /// Simple polygon, closing edge implied.
    Polygon(Vec<P2>),
    /// Closed loop threaded through the object, closing edge implied.
    Loop(Vec<P3>),
    /// Vertices whose convex hull is the object.
    ConvexBody(Vec<P3>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    OpenLoop,
    ClosedLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraspTopology {
    pub classification: Classification,
    pub winding: Option<i32>,
    pub linking: Option<i32>,
}

/// Drops an explicit closing vertex and checks the loop is usable.
pub(crate) fn closed_vertices<const D: usize>(v: &[[f64; D]]) -> Result<Vec<[f64; D]>, TopologyError> {
    let mut out = v.to_vec();
    if out.len() >= 2 && out.first() == out.last() {
        out.pop();
    }
    if out.len() < 3 {
        return Err(TopologyError::TooFewVertices { needed: 3, got: out.len() });
    }
    check_vertices(&out, true)?;
    Ok(out)
}

fn check_vertices<const D: usize>(v: &[[f64; D]], closed: bool) -> Result<(), TopologyError> {
    for (i, p) in v.iter().enumerate() {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(TopologyError::NonFinite(i));
        }
        if i > 0 && *p == v[i - 1] {
            return Err(TopologyError::RepeatedVertex(i));
        }
    }
    if closed && v.len() > 1 && v[0] == v[v.len() - 1] {
        return Err(TopologyError::RepeatedVertex(0));
    }
    Ok(())
}

impl MechanismPath {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.vertices.len() < 2 {
            return Err(TopologyError::TooFewVertices { needed: 2, got: self.vertices.len() });
        }
        match &self.vertices {
            Polyline::Planar(v) => check_vertices(v, false)?,
            Polyline::Spatial(v) => check_vertices(v, false)?,
        }
        if let Some(c) = &self.ground_closure {
            if c.dimension() != self.vertices.dimension() && !c.is_empty() {
                return Err(TopologyError::DimensionMismatch(self.vertices.dimension(), c.dimension()));
            }
        }
        Ok(())
    }

    /// Mechanism followed by its ground closure, as one closed vertex loop.
    fn closed_loop<const D: usize>(vertices: &[[f64; D]], closure: &[[f64; D]]) -> Vec<[f64; D]> {
        let mut out = vertices.to_vec();
        out.extend_from_slice(closure);
        out
    }
}

fn centroid3(v: &[P3]) -> P3 {
    let n = v.len() as f64;
    let s = v.iter().fold([0.0; 3], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2]]);
    [s[0] / n, s[1] / n, s[2] / n]
}

/// Plane of a closed loop: centroid, unit normal (Newell) and in-plane basis.
fn loop_plane(v: &[P3]) -> Option<(P3, P3, P3, P3)> {
    let c = centroid3(v);
    let mut n = [0.0; 3];
    for i in 0..v.len() {
        let (p, q) = (v[i], v[(i + 1) % v.len()]);
        n[0] += (p[1] - q[1]) * (p[2] + q[2]);
        n[1] += (p[2] - q[2]) * (p[0] + q[0]);
        n[2] += (p[0] - q[0]) * (p[1] + q[1]);
    }
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 {
        return None;
    }
    let n = [n[0] / len, n[1] / len, n[2] / len];
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = {
        let d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
        let w = [helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]];
        let l = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        [w[0] / l, w[1] / l, w[2] / l]
    };
    let v2 = [n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]];
    Some((c, n, u, v2))
}

fn offset(p: P3, c: P3, axis: P3) -> f64 {
    (p[0] - c[0]) * axis[0] + (p[1] - c[1]) * axis[1] + (p[2] - c[2]) * axis[2]
}

fn planar_winding(curve: &[P2], point: P2) -> Result<i32, TopologyError> {
    let curve = closed_vertices(curve)?;
    if let Some((i, j)) = planar::self_intersection(&curve) {
        return Err(TopologyError::AmbiguousInterior(i, j));
    }
    winding_number(&curve, point)
}

fn validate_object(object: &ObjectRegion) -> Result<(), TopologyError> {
    match object {
        ObjectRegion::Disk { center, radius } => {
            if !(radius.is_finite() && *radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
                return Err(TopologyError::InvalidObject(format!("disk radius {radius} at {center:?}")));
            }
        }
        ObjectRegion::Polygon(v) => {
            let v = closed_vertices(v)?;
            if let Some((i, j)) = planar::self_intersection(&v) {
                return Err(TopologyError::InvalidObject(format!("polygon edges {i} and {j} intersect")));
            }
        }
        ObjectRegion::Loop(v) => {
            closed_vertices(v)?;
        }
        ObjectRegion::ConvexBody(v) => {
            if v.is_empty() {
                return Err(TopologyError::InvalidObject("convex body has no vertices".into()));
            }
            if let Some(i) = v.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
                return Err(TopologyError::NonFinite(i));
            }
        }
    }
    Ok(())
}

/// Open/closed loop classification of a single serial mechanism.
pub fn classify_grasp(path: &MechanismPath, object: &ObjectRegion) -> Result<GraspTopology, TopologyError> {
    path.validate()?;
    validate_object(object)?;
    let grounded = path.base_grounded && path.tip_grounded;
    let open = |winding, linking| Ok(GraspTopology { classification: Classification::OpenLoop, winding, linking });
    match (&path.vertices, object) {
        (Polyline::Planar(v), ObjectRegion::Disk { .. } | ObjectRegion::Polygon(_)) => {
            if !grounded {
                return open(None, None);
            }
            let closure = match &path.ground_closure {
                Some(Polyline::Planar(c)) => c.clone(),
                _ => Vec::new(),
            };
            let curve = MechanismPath::closed_loop(v, &closure);
            let point = match object {
                ObjectRegion::Disk { center, .. } => *center,
                ObjectRegion::Polygon(p) => {
                    let p = closed_vertices(p)?;
                    planar::polygon_centroid(&p).ok_or_else(|| TopologyError::InvalidObject("polygon has zero area".into()))?
                }
                _ => unreachable!(),
            };
            let w = planar_winding(&curve, point)?;
            let classification = if w != 0 { Classification::ClosedLoop } else { Classification::OpenLoop };
            Ok(GraspTopology { classification, winding: Some(w), linking: None })
        }
        (Polyline::Spatial(v), ObjectRegion::Loop(object_loop)) => {
            if !grounded {
                return open(None, None);
            }
            let closure = match &path.ground_closure {
                Some(Polyline::Spatial(c)) => c.clone(),
                _ => Vec::new(),
            };
            let curve = MechanismPath::closed_loop(v, &closure);
            let lk = linking_number(&curve, object_loop)?;
            let classification = if lk != 0 { Classification::ClosedLoop } else { Classification::OpenLoop };
            Ok(GraspTopology { classification, winding: None, linking: Some(lk) })
        }
        (Polyline::Spatial(v), ObjectRegion::ConvexBody(body)) => {
            if !grounded {
                return open(None, None);
            }
            let closure = match &path.ground_closure {
                Some(Polyline::Spatial(c)) => c.clone(),
                _ => Vec::new(),
            };
            let curve = closed_vertices(&MechanismPath::closed_loop(v, &closure))?;
            let (c, n, u, w) = loop_plane(&curve).ok_or(TopologyError::NonPlanarLoop(f64::NAN))?;
            let extent = curve.iter().map(|p| offset(*p, c, n).abs()).fold(0.0, f64::max);
            let size = curve.iter().map(|p| offset(*p, c, u).hypot(offset(*p, c, w))).fold(0.0, f64::max);
            if extent > 1e-9 * size.max(f64::MIN_POSITIVE) {
                return Err(TopologyError::NonPlanarLoop(extent));
            }
            // The loop surrounds the body only if its plane cuts the body.
            let heights: Vec<f64> = body.iter().map(|p| offset(*p, c, n)).collect();
            let lo = heights.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let flat: Vec<P2> = curve.iter().map(|p| [offset(*p, c, u), offset(*p, c, w)]).collect();
            let centroid = centroid3(body);
            let wn = planar_winding(&flat, [offset(centroid, c, u), offset(centroid, c, w)])?;
            let inside = wn != 0 && lo <= 0.0 && hi >= 0.0;
            let classification = if inside { Classification::ClosedLoop } else { Classification::OpenLoop };
            Ok(GraspTopology { classification, winding: Some(if lo <= 0.0 && hi >= 0.0 { wn } else { 0 }), linking: None })
        }
        (vertices, object) => {
            let object_dim = match object {
                ObjectRegion::Disk { .. } | ObjectRegion::Polygon(_) => "planar",
                _ => "spatial",
            };
            Err(TopologyError::DimensionMismatch(vertices.dimension(), object_dim))
        }
    }
}

/// Classifies every base-to-tip chain of a branching mechanism.
pub fn classify_branching(mechanism: &BranchingMechanism, object: &ObjectRegion) -> Result<Vec<GraspTopology>, TopologyError> {
    mechanism.decompose()?.iter().map(|p| classify_grasp(p, object)).collect()
}

/// Reads `x,y` or `x,y,z` rows (an optional header row is skipped).
pub fn read_vertices_csv<R: Read>(reader: R) -> Result<Polyline, TopologyError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| TopologyError::Csv(e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(TopologyError::Csv(format!("row {}: {e}", i + 1))),
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(TopologyError::Csv(format!("row {} has {} columns, expected {width}", bad + 1, rows[bad].len())));
    }
    match width {
        2 => Ok(Polyline::Planar(rows.iter().map(|r| [r[0], r[1]]).collect())),
        3 => Ok(Polyline::Spatial(rows.iter().map(|r| [r[0], r[1], r[2]]).collect())),
        0 => Err(TopologyError::Csv("no vertices".into())),
        w => Err(TopologyError::Csv(format!("expected 2 or 3 columns, got {w}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_reads_header_and_rows() {
        let text = "x,y,z\n0,0,0\n1,0,0\n1,1,0.5\n";
        assert_eq!(read_vertices_csv(text.as_bytes()).unwrap(), Polyline::Spatial(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.5]]));
        assert!(read_vertices_csv("0,0\n1,2,3\n".as_bytes()).is_err());
        assert!(read_vertices_csv("0,0\n1,a\n".as_bytes()).is_err());
    }

    #[test]
    fn flat_spatial_loop_around_a_box() {
        let path = MechanismPath {
            vertices: Polyline::Spatial(vec![[-1.0, -1.0, 0.5], [1.0, -1.0, 0.5], [1.0, 1.0, 0.5], [-1.0, 1.0, 0.5]]),
            base_grounded: true,
            tip_grounded: true,
            ground_closure: None,
        };
        let cube: Vec<P3> = (0..8).map(|k| [(k & 1) as f64 - 0.5, ((k >> 1) & 1) as f64 - 0.5, ((k >> 2) & 1) as f64]).collect();
        let g = classify_grasp(&path, &ObjectRegion::ConvexBody(cube.clone())).unwrap();
        assert_eq!(g.classification, Classification::ClosedLoop);
        let lifted: Vec<P3> = cube.iter().map(|p| [p[0], p[1], p[2] + 2.0]).collect();
        let g = classify_grasp(&path, &ObjectRegion::ConvexBody(lifted)).unwrap();
        assert_eq!(g.classification, Classification::OpenLoop);
    }
}
