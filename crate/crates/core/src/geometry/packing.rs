use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, Point2};
use crate::error::{Error, Result};

/// Outcome of comparing the total area of disjoint balls with the domain area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingCheck {
    pub count: usize,
    pub radius: f64,
    pub total_ball_area: f64,
    pub domain_area: f64,
    pub fits: bool,
}

/// Checks that balls of radius `r` about `centers` are pairwise disjoint and
/// compares `count · π r²` with the domain area.
pub fn ball_packing_count(poly: &ConvexPolygon, centers: &[Point2], r: f64) -> Result<PackingCheck> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d = centers[i].dist(centers[j]);
            if d < 2.0 * r {
                return Err(Error::SeparationViolated {
                    i,
                    j,
                    distance: d,
                    required: 2.0 * r,
                });
            }
        }
    }
    let total = centers.len() as f64 * PI * r * r;
    let area = poly.area();
    Ok(PackingCheck {
        count: centers.len(),
        radius: r,
        total_ball_area: total,
        domain_area: area,
        fits: total <= area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let disk = ConvexPolygon::regular(64, Point2::default(), 2.0, 0.0).unwrap();
        let c = ball_packing_count(&disk, &[Point2::default()], 1.0).unwrap();
        assert!(c.fits);
        assert!((c.total_ball_area - PI).abs() < 1e-15);

        let err = ball_packing_count(&disk, &[Point2::new(0.0, 0.0), Point2::new(1.9, 0.0)], 1.0);
        assert!(matches!(err, Err(Error::SeparationViolated { .. })));

        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let grid = [
            Point2::new(0.25, 0.25),
            Point2::new(0.75, 0.25),
            Point2::new(0.25, 0.75),
            Point2::new(0.75, 0.75),
        ];
        let c = ball_packing_count(&sq, &grid, 0.25).unwrap();
        assert!(c.fits);
        assert!((c.total_ball_area - PI / 4.0).abs() < 1e-15);
    }
}
