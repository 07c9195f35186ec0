use serde::{Deserialize, Serialize};

use super::{clip_halfplane, ConvexPolygon, Point2, EPS};
use crate::error::{Error, Result};

/// Voronoi cells of `sites` clipped to `domain`; `cells[i]` belongs to `sites[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiPartition {
    pub sites: Vec<Point2>,
    pub cells: Vec<ConvexPolygon>,
    pub domain: ConvexPolygon,
}

impl VoronoiPartition {
    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(ConvexPolygon::area).sum()
    }
}

/// Cell `i` is the domain intersected with the closed half-planes of points at
/// least as close to site `i` as to each other site. Neighbouring cells share
/// their bisector edge, an overlap of zero area.
pub fn voronoi_partition(domain: &ConvexPolygon, sites: &[Point2]) -> Result<VoronoiPartition> {
    let scale = domain.scale();
    for (i, &s) in sites.iter().enumerate() {
        if !s.is_finite() || !domain.contains(s) {
            return Err(Error::SiteOutsideDomain { x: s.x, y: s.y });
        }
        if sites[..i].iter().any(|q| q.dist(s) <= EPS * scale) {
            return Err(Error::DuplicateSite { x: s.x, y: s.y });
        }
    }
    if sites.is_empty() {
        return Err(Error::InvalidArgument("no Voronoi sites".into()));
    }
    let mut cells = Vec::with_capacity(sites.len());
    for (i, &si) in sites.iter().enumerate() {
        let mut cell = domain.clone();
        // Nearer sites cut more, so clipping by them first keeps cells small.
        let mut order: Vec<usize> = (0..sites.len()).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| si.dist(sites[a]).total_cmp(&si.dist(sites[b])));
        for j in order {
            let sj = sites[j];
            // Bisector pruning: a site farther than twice the cell's reach cannot cut it.
            let reach = cell
                .vertices()
                .iter()
                .map(|v| v.dist(si))
                .fold(0.0, f64::max);
            if si.dist(sj) > 2.0 * reach {
                continue;
            }
            let normal = sj - si;
            let offset = normal.dot(si.midpoint(sj));
            cell = clip_halfplane(&cell, normal, offset).ok_or_else(|| {
                Error::Degenerate(format!("Voronoi cell {i} vanished while clipping"))
            })?;
        }
        cells.push(cell);
    }
    Ok(VoronoiPartition {
        sites: sites.to_vec(),
        cells,
        domain: domain.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_site_is_whole_domain() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let v = voronoi_partition(&sq, &[Point2::new(0.3, 0.3)]).unwrap();
        assert_eq!(v.cells[0], sq);
    }

    #[test]
    fn two_sites_split_square() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let v = voronoi_partition(&sq, &[Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)]).unwrap();
        for (cell, x0) in v.cells.iter().zip([0.0, 0.5]) {
            assert_eq!(cell.len(), 4);
            assert!((cell.area() - 0.5).abs() < 1e-15);
            let (lo, hi) = cell.bbox();
            assert!((lo.x - x0).abs() < 1e-15 && (hi.x - x0 - 0.5).abs() < 1e-15);
        }
    }

    /// Monte-Carlo oracle: sample points, assign each to the nearest site, and
    /// compare the empirical cell fractions against the polygon areas.
    #[test]
    fn random_sites_area_oracle() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sites: Vec<Point2> = (0..3)
            .map(|_| Point2::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)))
            .collect();
        let v = voronoi_partition(&sq, &sites).unwrap();
        assert!((v.total_area() - 1.0).abs() < 1e-9);
        let samples = 1_000_000;
        let mut counts = [0usize; 3];
        for _ in 0..samples {
            let p = Point2::new(rng.random::<f64>(), rng.random::<f64>());
            let nearest = (0..3)
                .min_by(|&a, &b| p.dist(sites[a]).total_cmp(&p.dist(sites[b])))
                .unwrap();
            counts[nearest] += 1;
        }
        for i in 0..3 {
            let frac = counts[i] as f64 / samples as f64;
            assert!((frac - v.cells[i].area()).abs() < 3e-3);
            assert!(v.cells[i].contains(sites[i]));
        }
    }

    #[test]
    fn rejects_bad_sites() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let p = Point2::new(0.5, 0.5);
        assert!(matches!(voronoi_partition(&sq, &[p, p]), Err(Error::DuplicateSite { .. })));
        assert!(matches!(
            voronoi_partition(&sq, &[Point2::new(2.0, 0.5)]),
            Err(Error::SiteOutsideDomain { .. })
        ));
    }

    #[test]
    fn sites_on_boundary_and_corners() {
        let sq = ConvexPolygon::axis_box(0.0, 1.0, 0.0, 1.0).unwrap();
        let sites = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.5, 0.5),
        ];
        let v = voronoi_partition(&sq, &sites).unwrap();
        assert!((v.total_area() - 1.0).abs() < 1e-12);
        for (c, s) in v.cells.iter().zip(&sites) {
            assert!(c.contains(*s));
        }
    }
}
