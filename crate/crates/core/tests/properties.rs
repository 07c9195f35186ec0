use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_core::bounds::{kroger_diameter_upper, kroger_volume_upper, rectangle_spectrum, torus_spectrum};
use spectral_core::certify::{certify, verify_certificate, CaseTag};
use spectral_core::geometry::{
    ball_packing_count, clip_halfplane, covering_radius_on_grid, diameter, maximal_separated_net,
    rectangle_sandwich, voronoi_partition,
};
use spectral_core::mesh::{build_mesh, refine, triangulate};
use spectral_core::special::{bessel_j, bessel_zero, BesselOrder};
use spectral_core::{ConvexPolygon, Point2, Rectangle};

/// Convex polygon cut from a large box by half-planes `u·x ≤ h`.
fn convex_polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((0.0..2.0 * PI, 0.3f64..2.0), 3..16).prop_filter_map("degenerate", |cuts| {
        let mut poly = ConvexPolygon::axis_box(-10.0, 10.0, -10.0, 10.0).ok()?;
        for (t, h) in cuts {
            poly = clip_halfplane(&poly, Point2::new(t.cos(), t.sin()), h)?;
        }
        ConvexPolygon::hull(poly.vertices()).ok().filter(|p| p.area() > 1e-3)
    })
}

fn sites_in(poly: &ConvexPolygon, raw: &[(f64, f64)]) -> Vec<Point2> {
    let (lo, hi) = poly.bbox();
    let mut out: Vec<Point2> = Vec::new();
    for &(u, v) in raw {
        let p = Point2::new(lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y));
        if poly.contains(p) && out.iter().all(|q| q.dist(p) > 1e-6) {
            out.push(p);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn voronoi_cells_tile_the_domain(
        poly in convex_polygon(),
        raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..60),
    ) {
        let sites = sites_in(&poly, &raw);
        prop_assume!(!sites.is_empty());
        let vor = voronoi_partition(&poly, &sites).unwrap();
        prop_assert_eq!(vor.cells.len(), sites.len());
        prop_assert!((vor.total_area() - poly.area()).abs() <= 1e-9 * poly.area());
        for (cell, s) in vor.cells.iter().zip(&sites) {
            prop_assert!(cell.contains_with_tol(*s, 1e-9));
            for v in cell.vertices() {
                prop_assert!(poly.contains_with_tol(*v, 1e-9));
                let own = v.dist(*s);
                prop_assert!(sites.iter().all(|q| q.dist(*v) >= own - 1e-9 * poly.scale()));
            }
        }
    }

    #[test]
    fn mesh_refinement_is_conforming(poly in convex_polygon(), levels in 0usize..4) {
        let m = build_mesh(&poly, levels);
        prop_assert!(m.is_conforming());
        prop_assert_eq!(m.euler_characteristic(), 1);
        prop_assert_eq!(m.triangles.len(), poly.len() * 4usize.pow(levels as u32));
        prop_assert!((m.area() - poly.area()).abs() <= 1e-12 * poly.area());
        let next = refine(&m);
        prop_assert!((next.h_max - m.h_max / 2.0).abs() <= 1e-12 * m.h_max);
        prop_assert!((triangulate(&poly).min_angle() - m.min_angle()).abs() < 1e-9);
    }

    #[test]
    fn net_is_separated_and_covering(poly in convex_polygon(), frac in 0.05f64..0.5) {
        let sep = frac * diameter(&poly);
        let net = maximal_separated_net(&poly, sep).unwrap();
        prop_assert!(!net.is_empty());
        for (i, p) in net.iter().enumerate() {
            prop_assert!(poly.contains_with_tol(*p, 1e-12));
            prop_assert!(net[..i].iter().all(|q| q.dist(*p) >= sep));
        }
        let cover = covering_radius_on_grid(&poly, &net, sep / 16.0).unwrap();
        prop_assert!(cover <= sep * (1.0 + 1e-12));
        let packing = ball_packing_count(&poly, &net, sep / 2.0).unwrap();
        prop_assert_eq!(packing.count, net.len());
    }

    #[test]
    fn sandwich_contains_polygon(poly in convex_polygon()) {
        let sw = rectangle_sandwich(&poly).unwrap();
        prop_assert!(sw.check(&poly));
        prop_assert!(sw.dilation_factor >= 1.0 && sw.dilation_factor <= 4.0);
        for c in sw.inner.corners() {
            prop_assert!(poly.contains_with_tol(c, 1e-9));
        }
        for v in poly.vertices() {
            prop_assert!(sw.outer.contains_with_tol(*v, 1e-9));
        }
    }

    #[test]
    fn clipping_never_grows(poly in convex_polygon(), t in 0.0..2.0 * PI, h in -1.0f64..3.0) {
        let u = Point2::new(t.cos(), t.sin());
        if let Some(c) = clip_halfplane(&poly, u, h) {
            prop_assert!(c.area() <= poly.area() * (1.0 + 1e-12));
            for v in c.vertices() {
                prop_assert!(v.dot(u) <= h + 1e-9);
            }
        }
    }

    #[test]
    fn rectangle_spectrum_scales(a in 0.1f64..3.0, b in 0.1f64..3.0, s in 0.2f64..5.0) {
        let base = rectangle_spectrum(a, b, 12).unwrap();
        let scaled = rectangle_spectrum(s * a, s * b, 12).unwrap();
        prop_assert!(base.is_well_formed());
        prop_assert_eq!(base.values[0], 0.0);
        for (x, y) in base.values.iter().zip(&scaled.values) {
            prop_assert!((x - s * s * y).abs() <= 1e-9 * x.max(1.0));
        }
        // Neumann rectangle eigenvalues are a sub-multiset of the torus ones of
        // twice the size, so the torus list is pointwise below.
        let torus = torus_spectrum(2.0 * a, 2.0 * b, 12).unwrap();
        for (t, r) in torus.values.iter().zip(&base.values) {
            prop_assert!(*t <= r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn kroger_bounds_increase_with_k(k in 1usize..40, d in 0.1f64..10.0, vol in 0.1f64..10.0) {
        prop_assert!(kroger_diameter_upper(2, k, d).unwrap() < kroger_diameter_upper(2, k + 1, d).unwrap());
        prop_assert!(kroger_volume_upper(2, k, vol).unwrap().value < kroger_volume_upper(2, k + 1, vol).unwrap().value);
    }

    #[test]
    fn bessel_zeros_are_roots(nu in 0.0f64..10.0, k in 1usize..15) {
        let order = BesselOrder::new(nu).unwrap();
        let z = bessel_zero(order, k).unwrap();
        let next = bessel_zero(order, k + 1).unwrap();
        prop_assert!(z > nu && next > z);
        prop_assert!(bessel_j(order, z).unwrap().abs() < 1e-10);
    }

    #[test]
    fn strip_certificates_verify_at_large_constant(
        a in 0.2f64..1.0,
        aspect in 1.0f64..6.0,
        (k, l) in (2usize..10).prop_flat_map(|k| (Just(k), 1..=k)),
    ) {
        let b = a * aspect;
        let rect = Rectangle::centered(a, b).unwrap();
        let s = rectangle_spectrum(a, b, k + 1).unwrap();
        let (cert, report) = certify(&rect, k, l, 64.0, &s).unwrap();
        prop_assert!(cert.l_prime <= l || cert.case_tag == CaseTag::Net);
        prop_assert_eq!(report.ok(), cert.chain_ok);
        prop_assert_eq!(verify_certificate(&cert, s.values[l]).ok(), cert.chain_ok);
    }
}
