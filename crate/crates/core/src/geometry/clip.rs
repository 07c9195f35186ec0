use super::{ConvexPolygon, Point2, EPS};

/// Clips a convex polygon to the closed half-plane `{x : normal·x ≤ offset}`.
///
/// Returns `None` when the remainder has no area.
pub fn clip_halfplane(poly: &ConvexPolygon, normal: Point2, offset: f64) -> Option<ConvexPolygon> {
    let scale = poly.scale();
    let tol = EPS * scale * normal.norm();
    let v = poly.vertices();
    let side: Vec<f64> = v.iter().map(|p| normal.dot(*p) - offset).collect();
    if side.iter().all(|&d| d <= tol) {
        return Some(poly.clone());
    }
    if side.iter().all(|&d| d >= -tol) {
        return None;
    }
    let n = v.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (di, dj) = (side[i], side[j]);
        if di <= tol {
            out.push(v[i]);
        }
        if (di < -tol && dj > tol) || (di > tol && dj < -tol) {
            let t = di / (di - dj);
            out.push(v[i] + (v[j] - v[i]) * t);
        }
    }
    ConvexPolygon::from_points_cleaned(out)
}

/// Points of `poly` at distance at least `r` from its boundary.
///
/// For a convex polygon this is the intersection of the edge half-planes each
/// moved inward by `r`. `None` is the empty (or zero-area) result.
pub fn inner_offset(poly: &ConvexPolygon, r: f64) -> Option<ConvexPolygon> {
    if !r.is_finite() || r < 0.0 {
        return None;
    }
    if r == 0.0 {
        return Some(poly.clone());
    }
    let area = poly.area();
    let mut cur = poly.clone();
    for (a, b) in poly.edges() {
        let e = b - a;
        // Outward normal of a CCW edge.
        let normal = Point2::new(e.y, -e.x) * (1.0 / e.norm());
        cur = clip_halfplane(&cur, normal, normal.dot(a) - r)?;
    }
    (cur.area() > EPS * area).then_some(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_offset() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let off = inner_offset(&sq, 0.25).unwrap();
        assert!((off.area() - 0.25).abs() < 1e-14);
        let (lo, hi) = off.bbox();
        assert!((lo.x - 0.25).abs() < 1e-14 && (hi.y - 0.75).abs() < 1e-14);
        assert!(inner_offset(&sq, 0.5).is_none());
        assert!(inner_offset(&sq, 0.7).is_none());
    }

    /// Offset of an equilateral triangle checked against an independent
    /// construction: the inradius-scaled similar triangle about the incenter,
    /// and a brute-force feasibility test of the shifted edge constraints.
    #[test]
    fn triangle_offset_matches_similar_triangle() {
        let s3 = 3f64.sqrt();
        let tri = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, s3 / 2.0),
        ])
        .unwrap();
        let r = 0.1;
        let off = inner_offset(&tri, r).unwrap();
        let inradius = s3 / 6.0;
        let ratio = (inradius - r) / inradius;
        let incenter = Point2::new(0.5, s3 / 6.0);
        assert_eq!(off.len(), 3);
        for &v in tri.vertices() {
            let expect = incenter + (v - incenter) * ratio;
            assert!(off.vertices().iter().any(|q| q.dist(expect) < 1e-13));
        }
        // Brute force: a fine grid point is feasible iff it is in the offset.
        let steps = 200;
        for i in 0..=steps {
            for j in 0..=steps {
                let p = Point2::new(i as f64 / steps as f64, j as f64 / steps as f64);
                let feasible = tri.boundary_distance(p) >= r;
                let margin = (tri.boundary_distance(p) - r).abs();
                if margin > 1e-9 {
                    assert_eq!(feasible, off.contains_with_tol(p, 0.0), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn offsets_are_nested() {
        let hex = ConvexPolygon::regular(6, Point2::default(), 1.0, 0.3).unwrap();
        let mut prev = hex.clone();
        for k in 1..8 {
            let cur = inner_offset(&hex, 0.1 * k as f64).unwrap();
            assert!(cur.vertices().iter().all(|&v| prev.contains(v)));
            prev = cur;
        }
    }

    #[test]
    fn clip_keeps_or_drops_whole() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(clip_halfplane(&sq, Point2::new(1.0, 0.0), 2.0).unwrap(), sq);
        assert!(clip_halfplane(&sq, Point2::new(1.0, 0.0), -1.0).is_none());
        let half = clip_halfplane(&sq, Point2::new(1.0, 0.0), 0.5).unwrap();
        assert!((half.area() - 0.5).abs() < 1e-15);
        // A cut through two opposite vertices leaves no collinear leftovers.
        let tri = clip_halfplane(&sq, Point2::new(1.0, 1.0), 1.0).unwrap();
        assert_eq!(tri.len(), 3);
    }
}
