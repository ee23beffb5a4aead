//! Linking number of two closed polygonal loops, evaluated two independent ways.

use super::planar::orient;
use super::{P3, TopologyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Loops closer than this are treated as touching, m.
pub const MIN_SEPARATION: f64 = 1e-9;
/// Largest accepted distance of the Gauss integral from an integer.
pub const ROUNDING_LIMIT: f64 = 0.2;
const PROJECTION_SEED: u64 = 0x6c69_6e6b;
const PROJECTION_ATTEMPTS: usize = 32;

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: P3) -> Option<P3> {
    let n = dot(a, a).sqrt();
    (n > 0.0).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

fn edges(v: &[P3]) -> impl Iterator<Item = (P3, P3)> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

/// Shortest distance between segments `p1p2` and `q1q2`.
pub(crate) fn segment_distance(p1: P3, p2: P3, q1: P3, q2: P3) -> f64 {
    let d1 = sub(p2, p1);
    let d2 = sub(q2, q1);
    let r = sub(p1, q1);
    let (a, e, f) = (dot(d1, d1), dot(d2, d2), dot(d2, r));
    let (s, t);
    if a == 0.0 && e == 0.0 {
        return dot(r, r).sqrt();
    }
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(d1, r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(d1, d2);
            let denom = a * e - b * b;
            let s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            } else {
                t = t0;
                s = s0;
            }
        }
    }
    let pa = [p1[0] + s * d1[0], p1[1] + s * d1[1], p1[2] + s * d1[2]];
    let pb = [q1[0] + t * d2[0], q1[1] + t * d2[1], q1[2] + t * d2[2]];
    let g = sub(pa, pb);
    dot(g, g).sqrt()
}

/// Minimum distance between the two closed loops.
pub fn loop_separation(a: &[P3], b: &[P3]) -> f64 {
    let mut best = f64::INFINITY;
    for (p1, p2) in edges(a) {
        for (q1, q2) in edges(b) {
            best = best.min(segment_distance(p1, p2, q1, q2));
        }
    }
    best
}

/// Signed solid angle, over 4π, swept by the segment pair: the exact Gauss
/// integral restricted to `p1p2 × p3p4`.
fn segment_pair_gauss(p1: P3, p2: P3, p3: P3, p4: P3) -> f64 {
    let r13 = sub(p3, p1);
    let r14 = sub(p4, p1);
    let r23 = sub(p3, p2);
    let r24 = sub(p4, p2);
    let normals = [cross(r13, r14), cross(r14, r24), cross(r24, r23), cross(r23, r13)];
    let mut n = [[0.0; 3]; 4];
    for (slot, v) in n.iter_mut().zip(normals) {
        match unit(v) {
            Some(u) => *slot = u,
            None => return 0.0,
        }
    }
    let omega: f64 = (0..4).map(|k| dot(n[k], n[(k + 1) % 4]).clamp(-1.0, 1.0).asin()).sum();
    let orientation = dot(cross(sub(p4, p3), sub(p2, p1)), r13);
    if orientation == 0.0 {
        return 0.0;
    }
    omega.copysign(orientation) / (4.0 * PI)
}

/// The Gauss double integral `(1/4π)∮∮ (a−b)·(da×db)/|a−b|³`, evaluated exactly
/// segment pair by segment pair.
pub fn gauss_linking_integral(a: &[P3], b: &[P3]) -> f64 {
    let mut sum = 0.0;
    for (p1, p2) in edges(a) {
        for (p3, p4) in edges(b) {
            sum += segment_pair_gauss(p1, p2, p3, p4);
        }
    }
    sum
}

/// Orthonormal `(u, v)` with `u × v = d`.
fn frame(d: P3) -> (P3, P3) {
    let helper = if d[0].abs() <= d[1].abs() && d[0].abs() <= d[2].abs() {
        [1.0, 0.0, 0.0]
    } else if d[1].abs() <= d[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = unit(cross(helper, d)).expect("helper axis is never parallel to d");
    (u, cross(d, u))
}

/// Half the signed crossing count between the loops in the projection along
/// `d`, or `None` if the projection is not generic.
fn crossings_along(a: &[P3], b: &[P3], d: P3) -> Option<i32> {
    let (u, v) = frame(d);
    let project = |p: P3| [dot(p, u), dot(p, v)];
    let mut total = 0;
    for (a0, a1) in edges(a) {
        let (pa0, pa1) = (project(a0), project(a1));
        for (b0, b1) in edges(b) {
            let (pb0, pb1) = (project(b0), project(b1));
            let (o1, o2) = (orient(pa0, pa1, pb0), orient(pa0, pa1, pb1));
            let (o3, o4) = (orient(pb0, pb1, pa0), orient(pb0, pb1, pa1));
            if o1 == 0.0 || o2 == 0.0 || o3 == 0.0 || o4 == 0.0 {
                if o1 * o2 <= 0.0 && o3 * o4 <= 0.0 {
                    return None;
                }
                continue;
            }
            if o1 * o2 > 0.0 || o3 * o4 > 0.0 {
                continue;
            }
            let s = o3 / (o3 - o4);
            let t = o1 / (o1 - o2);
            let ha = dot(a0, d) + s * (dot(a1, d) - dot(a0, d));
            let hb = dot(b0, d) + t * (dot(b1, d) - dot(b0, d));
            if ha == hb {
                return None;
            }
            let ta = [pa1[0] - pa0[0], pa1[1] - pa0[1]];
            let tb = [pb1[0] - pb0[0], pb1[1] - pb0[1]];
            let turn = (ta[0] * tb[1] - ta[1] * tb[0]).signum() as i32;
            total += if ha > hb { turn } else { -turn };
        }
    }
    (total % 2 == 0).then_some(total / 2)
}

/// Both evaluations of the linking number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingDetail {
    pub gauss_integral: f64,
    pub crossing_count: i32,
    pub projection: P3,
}

impl LinkingDetail {
    pub fn value(&self) -> i32 {
        self.crossing_count
    }
}

/// Linking number of two disjoint closed loops (vertex lists, closing edge
/// implied), cross-checked between the Gauss integral and signed crossings in
/// a randomized generic projection.
pub fn linking_number_detailed(a: &[P3], b: &[P3]) -> Result<LinkingDetail, TopologyError> {
    let a = super::closed_vertices(a)?;
    let b = super::closed_vertices(b)?;
    let separation = loop_separation(&a, &b);
    if separation <= MIN_SEPARATION {
        return Err(TopologyError::Degenerate { separation });
    }
    let gauss = gauss_linking_integral(&a, &b);
    let rounded = gauss.round();
    if (gauss - rounded).abs() > ROUNDING_LIMIT {
        return Err(TopologyError::Precision {
            gauss_integral: gauss,
            crossing_count: None,
            hint: "Gauss integral is not near an integer; refine the loops or check that they are closed".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROJECTION_SEED);
    for _ in 0..PROJECTION_ATTEMPTS {
        let d = loop {
            let c: P3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let n2 = dot(c, c);
            if n2 > 1e-4 && n2 <= 1.0 {
                break unit(c).unwrap();
            }
        };
        if let Some(count) = crossings_along(&a, &b, d) {
            if count as f64 != rounded {
                return Err(TopologyError::Precision {
                    gauss_integral: gauss,
                    crossing_count: Some(count),
                    hint: "the two evaluations disagree; subdivide long segments near the other loop".into(),
                });
            }
            return Ok(LinkingDetail { gauss_integral: gauss, crossing_count: count, projection: d });
        }
    }
    Err(TopologyError::Precision {
        gauss_integral: gauss,
        crossing_count: None,
        hint: "no generic projection found; perturb coincident vertices".into(),
    })
}

/// Gauss linking number of two disjoint closed loops.
pub fn linking_number(a: &[P3], b: &[P3]) -> Result<i32, TopologyError> {
    linking_number_detailed(a, b).map(|d| d.value())
}
