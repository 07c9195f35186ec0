use std::collections::HashMap;

use super::{ConvexPolygon, Point2, EPS};
use crate::error::{Error, Result};

const MAX_GRID_POINTS: f64 = 5e7;

/// Grid points of `poly` at spacing `pitch`, anchored at the lower-left
/// corner of the bounding box, in lexicographic `(x, y)` order.
pub fn grid_samples(poly: &ConvexPolygon, pitch: f64) -> Result<Vec<Point2>> {
    if !(pitch > 0.0 && pitch.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid pitch must be positive, got {pitch}")));
    }
    let (lo, hi) = poly.bbox();
    let slack = EPS * poly.scale();
    let nx = ((hi.x - lo.x + slack) / pitch).floor() as usize + 1;
    let ny = ((hi.y - lo.y + slack) / pitch).floor() as usize + 1;
    if nx as f64 * ny as f64 > MAX_GRID_POINTS {
        return Err(Error::InvalidArgument(format!(
            "sampling grid of {nx}×{ny} points is too fine"
        )));
    }
    let mut out = Vec::new();
    for i in 0..nx {
        let x = lo.x + i as f64 * pitch;
        for j in 0..ny {
            let p = Point2::new(x, lo.y + j as f64 * pitch);
            if poly.contains(p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Points with bucket size `sep` for nearest-neighbour queries at radius `sep`.
struct Buckets {
    sep: f64,
    cells: HashMap<(i64, i64), Vec<Point2>>,
}

impl Buckets {
    fn new(sep: f64) -> Self {
        Buckets {
            sep,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.sep).floor() as i64, (p.y / self.sep).floor() as i64)
    }

    fn insert(&mut self, p: Point2) {
        let k = self.key(p);
        self.cells.entry(k).or_default().push(p);
    }

    /// Distance to the nearest stored point, if one is closer than `sep`.
    fn nearest_within_sep(&self, p: Point2) -> Option<f64> {
        let (kx, ky) = self.key(p);
        let mut best: Option<f64> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(pts) = self.cells.get(&(kx + dx, ky + dy)) {
                    for q in pts {
                        let d = p.dist(*q);
                        if d < self.sep && best.is_none_or(|b| d < b) {
                            best = Some(d);
                        }
                    }
                }
            }
        }
        best
    }
}

/// A maximal `sep`-separated point set in `poly`.
///
/// Greedy sweep over the pitch-`sep/8` grid in lexicographic order, followed
/// by a completion pass over the pitch-`sep/16` grid and the polygon vertices
/// so that every one of those samples is within `sep` of a returned point.
/// Pairwise distances of the result are all `≥ sep` with no tolerance.
pub fn maximal_separated_net(poly: &ConvexPolygon, sep: f64) -> Result<Vec<Point2>> {
    if !(sep > 0.0 && sep.is_finite()) {
        return Err(Error::InvalidArgument(format!("separation must be positive, got {sep}")));
    }
    let mut net = Vec::new();
    let mut buckets = Buckets::new(sep);
    let coarse = grid_samples(poly, sep / 8.0)?;
    let fine = grid_samples(poly, sep / 16.0)?;
    let candidates = coarse
        .into_iter()
        .chain(fine)
        .chain(poly.vertices().iter().copied());
    for p in candidates {
        if buckets.nearest_within_sep(p).is_none() {
            buckets.insert(p);
            net.push(p);
        }
    }
    Ok(net)
}

/// Largest distance from a pitch-`pitch` grid sample of `poly` to its nearest
/// point of `net`. Infinite if `net` is empty.
pub fn covering_radius_on_grid(poly: &ConvexPolygon, net: &[Point2], pitch: f64) -> Result<f64> {
    let samples = grid_samples(poly, pitch)?;
    let mut worst: f64 = 0.0;
    for s in samples {
        let d = net.iter().map(|q| s.dist(*q)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_pairwise(pts: &[Point2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min(pts[i].dist(pts[j]));
            }
        }
        best
    }

    #[test]
    fn small_square_single_point() {
        let sq = ConvexPolygon::axis_box(0.0, 0.1, 0.0, 0.1).unwrap();
        assert_eq!(maximal_separated_net(&sq, 1.0).unwrap().len(), 1);
        let unit = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(maximal_separated_net(&unit, 2.0).unwrap().len(), 1);
    }

    /// 1-D greedy oracle: on a segment of length L a maximal sep-net has
    /// between ceil(L / (2 sep)) and floor(L / sep) + 1 points.
    #[test]
    fn thin_rectangle_count_matches_segment_bounds() {
        let eps = 1e-3;
        let r = ConvexPolygon::axis_box(-5.0, 5.0, -eps, eps).unwrap();
        let net = maximal_separated_net(&r, 2.0).unwrap();
        let (len, sep) = (10.0f64, 2.0f64);
        let lower = (len / (2.0 * sep)).ceil() as usize;
        let upper = (len / sep).floor() as usize + 1;
        assert!(lower <= net.len() && net.len() <= upper);
        assert!((5..=6).contains(&net.len()));
    }

    #[test]
    fn separation_and_covering() {
        let hex = ConvexPolygon::regular(6, Point2::default(), 1.0, 0.1).unwrap();
        for &sep in &[0.13, 0.3, 0.77] {
            let net = maximal_separated_net(&hex, sep).unwrap();
            assert!(min_pairwise(&net) >= sep);
            assert!(net.iter().all(|&p| hex.contains(p)));
            let cover = covering_radius_on_grid(&hex, &net, sep / 16.0).unwrap();
            assert!(cover < sep, "cover {cover} sep {sep}");
        }
    }

    #[test]
    fn rejects_bad_separation() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(maximal_separated_net(&sq, 0.0).is_err());
        assert!(maximal_separated_net(&sq, f64::NAN).is_err());
        assert!(maximal_separated_net(&sq, 1e-6).is_err());
    }
}
