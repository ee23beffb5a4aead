//! Exact planar predicates on closed polygonal curves.

use super::{P2, TopologyError};
use robust::{orient2d, Coord};

/// Twice the signed area of `abc`; positive when counter-clockwise. Exact sign.
pub(crate) fn orient(a: P2, b: P2, c: P2) -> f64 {
    orient2d(Coord { x: a[0], y: a[1] }, Coord { x: b[0], y: b[1] }, Coord { x: c[0], y: c[1] })
}

/// Edges of the closed curve through `v`, including the closing edge.
pub(crate) fn edges(v: &[P2]) -> impl Iterator<Item = (P2, P2)> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

pub(crate) fn diameter(v: &[P2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    d
}

pub(crate) fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn on_segment(a: P2, b: P2, p: P2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, exact for touching and collinear cases.
pub(crate) fn segments_intersect(a: P2, b: P2, c: P2, d: P2) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// First pair of edges of the closed curve that meet anywhere other than at
/// their shared vertex.
pub(crate) fn self_intersection(v: &[P2]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent_after = j == i + 1;
            let adjacent_before = i == 0 && j == n - 1;
            if adjacent_after || adjacent_before {
                if n == 2 {
                    return Some((i, j));
                }
                // Shared vertex is expected; folding back along the previous edge is not.
                let (shared, p, q) = if adjacent_after { (b, a, d) } else { (a, b, c) };
                if orient(p, shared, q) == 0.0 && (q[0] - shared[0]) * (p[0] - shared[0]) + (q[1] - shared[1]) * (p[1] - shared[1]) > 0.0 {
                    return Some((i, j));
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Signed number of times the closed curve through `curve` winds around `point`;
/// counter-clockwise turns count positive.
pub fn winding_number(curve: &[P2], point: P2) -> Result<i32, TopologyError> {
    let curve = super::closed_vertices(curve)?;
    let tol = 1e-12 * diameter(&curve);
    let mut w = 0;
    for (a, b) in edges(&curve) {
        let gap = point_segment_distance(point, a, b);
        if gap <= tol {
            return Err(TopologyError::OnBoundary { distance: gap });
        }
        if a[1] <= point[1] {
            if b[1] > point[1] && orient(a, b, point) > 0.0 {
                w += 1;
            }
        } else if b[1] <= point[1] && orient(a, b, point) < 0.0 {
            w -= 1;
        }
    }
    Ok(w)
}

/// Area centroid of a simple polygon; `None` when its area vanishes.
pub(crate) fn polygon_centroid(v: &[P2]) -> Option<P2> {
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for (p, q) in edges(v) {
        let cross = p[0] * q[1] - q[0] * p[1];
        a2 += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    (a2 != 0.0).then(|| [cx / (3.0 * a2), cy / (3.0 * a2)])
}
