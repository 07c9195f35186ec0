use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::{mvee, ConvexPolygon, Ellipse, Point2, Rectangle, EPS, MVEE_DEFAULT_TOL};
use crate::error::Result;

/// Concentric rectangles with `inner ⊆ polygon ⊆ outer`.
///
/// `outer` is `inner` scaled by `dilation_factor` about the common center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSandwich {
    pub inner: Rectangle,
    pub outer: Rectangle,
    pub dilation_factor: f64,
    pub ellipse: Ellipse,
}

/// Rectangle sandwich from the John ellipse.
///
/// The MVEE of the vertices, shrunk by 1/2 about its center, lies in the
/// polygon. The inner box is the rectangle inscribed in that shrunk ellipse
/// (half-widths = semi-axes/√2), pulled in further if the approximate MVEE
/// leaves a vertex of it outside. The outer box doubles the inner box until it
/// contains every polygon vertex; the factor never exceeds 4 for exact data.
pub fn rectangle_sandwich(poly: &ConvexPolygon) -> Result<BoxSandwich> {
    let ellipse = mvee(poly.vertices(), MVEE_DEFAULT_TOL)?;
    let shrink = 0.5 / SQRT_2;
    // Rectangle::new puts the shorter half-width on the local x axis; the
    // ellipse's minor axis is perpendicular to `rotation`.
    let candidate = Rectangle::new(
        ellipse.center,
        ellipse.semi_axes[0] * shrink,
        ellipse.semi_axes[1] * shrink,
        ellipse.rotation,
    )?;
    let fit = max_scale_inside(poly, &candidate).min(1.0);
    let inner = candidate.scaled(fit);
    let tol = EPS * poly.scale();
    let mut factor = 1.0;
    while !poly
        .vertices()
        .iter()
        .all(|&v| inner.scaled(factor).contains_with_tol(v, tol))
    {
        factor *= 2.0;
    }
    Ok(BoxSandwich {
        inner,
        outer: inner.scaled(factor),
        dilation_factor: factor,
        ellipse,
    })
}

/// Largest `t` with every corner of `rect.scaled(t)` inside `poly`.
fn max_scale_inside(poly: &ConvexPolygon, rect: &Rectangle) -> f64 {
    let c = rect.center;
    let mut t = f64::INFINITY;
    for corner in rect.corners() {
        let dir = corner - c;
        for (a, b) in poly.edges() {
            let e = b - a;
            // Inside ⇔ e × (c + s·dir − a) ≥ 0, linear in s.
            let base = e.cross(c - a);
            let slope = e.cross(dir);
            if slope < 0.0 {
                t = t.min(base / -slope);
            }
        }
    }
    t
}

impl BoxSandwich {
    /// Corner containment checks: inner corners in the polygon, polygon
    /// vertices in the outer box.
    pub fn check(&self, poly: &ConvexPolygon) -> bool {
        let tol = EPS * poly.scale();
        self.inner
            .corners()
            .iter()
            .all(|&c| poly.contains_with_tol(c, tol))
            && poly
                .vertices()
                .iter()
                .all(|&v| self.outer.contains_with_tol(v, tol))
    }

    pub fn center(&self) -> Point2 {
        self.inner.center
    }
}
