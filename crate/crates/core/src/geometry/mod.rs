//! Planar convex geometry.
//!
//! Everything here works on immutable values in floating point. Predicates use
//! tolerances relative to the size of the polygon involved (see [`EPS`]).

mod clip;
mod mvee;
mod net;
mod packing;
mod sandwich;
mod voronoi;

pub use clip::{clip_halfplane, inner_offset};
pub use mvee::{mvee, Ellipse, MVEE_DEFAULT_TOL};
pub use net::{covering_radius_on_grid, grid_samples, maximal_separated_net};
pub use packing::{ball_packing_count, PackingCheck};
pub use sandwich::{rectangle_sandwich, BoxSandwich};
pub use voronoi::{voronoi_partition, VoronoiPartition};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance of the geometric predicates.
pub const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counter-clockwise about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// A strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonLiteral", into = "PolygonLiteral")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

/// JSON form of a polygon: `{"vertices": [[x, y], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonLiteral {
    pub vertices: Vec<Point2>,
}

impl TryFrom<PolygonLiteral> for ConvexPolygon {
    type Error = Error;
    fn try_from(lit: PolygonLiteral) -> Result<Self> {
        ConvexPolygon::new(lit.vertices)
    }
}

impl From<ConvexPolygon> for PolygonLiteral {
    fn from(p: ConvexPolygon) -> Self {
        PolygonLiteral {
            vertices: p.vertices,
        }
    }
}

impl ConvexPolygon {
    /// Validates a counter-clockwise, strictly convex vertex list.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices, need at least 3")));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!("non-finite vertex {p:?}")));
        }
        let scale = bbox_extent(&vertices);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if a == b {
                return Err(Error::InvalidPolygon(format!("repeated vertex {i}")));
            }
            let turn = (b - a).cross(c - b);
            if turn <= EPS * scale * scale {
                return Err(Error::InvalidPolygon(format!(
                    "not strictly convex and counter-clockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        let poly = ConvexPolygon { vertices };
        if poly.area() <= 0.0 {
            return Err(Error::InvalidPolygon("non-positive area".into()));
        }
        Ok(poly)
    }

    /// Convex hull of a point cloud (monotone chain, collinear points dropped).
    pub fn hull(points: &[Point2]) -> Result<Self> {
        let mut pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Degenerate("fewer than 3 distinct points".into()));
        }
        let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while hull.len() >= start + 2 {
                    let a = hull[hull.len() - 2];
                    let b = hull[hull.len() - 1];
                    if (b - a).cross(p - b) <= 0.0 {
                        hull.pop();
                    } else {
                        break;
                    }
                }
                hull.push(p);
            }
            hull.pop();
        }
        Self::from_points_cleaned(hull).ok_or_else(|| Error::Degenerate("collinear points".into()))
    }

    /// Regular `n`-gon with the given circumradius, first vertex at angle `phase`.
    pub fn regular(n: usize, center: Point2, circumradius: f64, phase: f64) -> Result<Self> {
        if n < 3 || !(circumradius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "regular polygon needs n >= 3 and radius > 0 (got {n}, {circumradius})"
            )));
        }
        let vertices = (0..n)
            .map(|i| {
                let t = phase + 2.0 * PI * i as f64 / n as f64;
                center + Point2::new(t.cos(), t.sin()) * circumradius
            })
            .collect();
        Self::new(vertices)
    }

    /// Axis-aligned box `[x0, x1] × [y0, y1]`.
    pub fn axis_box(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    /// Builds a polygon from an approximately convex CCW loop, dropping
    /// near-duplicate and collinear vertices. `None` when nothing with
    /// positive area remains.
    pub(crate) fn from_points_cleaned(mut pts: Vec<Point2>) -> Option<Self> {
        let scale = bbox_extent(&pts);
        if !(scale > 0.0) {
            return None;
        }
        loop {
            let before = pts.len();
            pts = dedup_ring(pts, EPS * scale);
            let n = pts.len();
            if n < 3 {
                return None;
            }
            let mut kept = Vec::with_capacity(n);
            for i in 0..n {
                let a = pts[(i + n - 1) % n];
                let b = pts[i];
                let c = pts[(i + 1) % n];
                if (b - a).cross(c - b) > EPS * scale * scale {
                    kept.push(b);
                }
            }
            pts = kept;
            if pts.len() == before {
                break;
            }
        }
        if pts.len() < 3 {
            return None;
        }
        let poly = ConvexPolygon { vertices: pts };
        if poly.area() > EPS * scale * scale {
            Self::new(poly.vertices).ok()
        } else {
            None
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterator over directed edges `(v_i, v_{i+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        let o = self.vertices[0];
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for (a, b) in self.edges() {
            let (a, b) = (a - o, b - o);
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
            a2 += w;
        }
        o + Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Largest coordinate extent; the length scale of tolerances.
    pub fn scale(&self) -> f64 {
        bbox_extent(&self.vertices)
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        bbox(&self.vertices)
    }

    /// Closed containment with an absolute slack `tol` (distance units).
    pub fn contains_with_tol(&self, p: Point2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    /// Closed containment with slack [`EPS`] × scale.
    pub fn contains(&self, p: Point2) -> bool {
        self.contains_with_tol(p, EPS * self.scale())
    }

    /// Signed distance from `p` to the boundary, positive inside.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        if self.contains_with_tol(p, 0.0) {
            self.edges()
                .map(|(a, b)| {
                    let e = b - a;
                    e.cross(p - a) / e.norm()
                })
                .fold(f64::INFINITY, f64::min)
        } else {
            -self
                .edges()
                .map(|(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min)
        }
    }

    /// Applies a rigid motion or similarity to every vertex.
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        let v: Vec<Point2> = self.vertices.iter().map(|&p| f(p)).collect();
        Self::new(v)
    }

    /// Sets of vertices within the bounding box of the polygon, used by SVG
    /// and JSON writers.
    pub fn to_literal(&self) -> PolygonLiteral {
        PolygonLiteral {
            vertices: self.vertices.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let lit: PolygonLiteral = serde_json::from_str(text)?;
        // Accept clockwise literals too; the stored orientation is CCW.
        let mut v = lit.vertices;
        if signed_area(&v) < 0.0 {
            v.reverse();
        }
        Self::new(v)
    }
}

/// Diameter by rotating calipers over antipodal vertex pairs.
pub fn diameter(p: &ConvexPolygon) -> f64 {
    let v = p.vertices();
    let n = v.len();
    let mut j = 1;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let ni = (i + 1) % n;
        let edge = v[ni] - v[i];
        let mut guard = 0;
        while edge.cross(v[(j + 1) % n] - v[j]) > 0.0 && guard < n {
            j = (j + 1) % n;
            guard += 1;
        }
        best = best.max(v[i].dist(v[j])).max(v[ni].dist(v[j]));
    }
    best
}

/// Rotated rectangle `center + R(rotation)·([-a, a] × [-b, b])` with `a ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub center: Point2,
    pub half_width_a: f64,
    pub half_width_b: f64,
    pub rotation: f64,
}

impl Rectangle {
    /// Normalizes so that `half_width_a ≤ half_width_b`, rotating the frame a
    /// quarter turn when the inputs are swapped.
    pub fn new(center: Point2, a: f64, b: f64, rotation: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rectangle half-widths must be positive and finite (got {a}, {b})"
            )));
        }
        let (a, b, rotation) = if a <= b {
            (a, b, rotation)
        } else {
            (b, a, rotation + 0.5 * PI)
        };
        Ok(Rectangle {
            center,
            half_width_a: a,
            half_width_b: b,
            rotation,
        })
    }

    /// `[-a, a] × [-b, b]` at the origin.
    pub fn centered(a: f64, b: f64) -> Result<Self> {
        Self::new(Point2::default(), a, b, 0.0)
    }

    pub fn side_lengths(&self) -> (f64, f64) {
        (2.0 * self.half_width_a, 2.0 * self.half_width_b)
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width_a * self.half_width_b
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.half_width_a.hypot(self.half_width_b)
    }

    pub fn to_world(&self, local: Point2) -> Point2 {
        self.center + local.rotated(self.rotation)
    }

    pub fn to_local(&self, world: Point2) -> Point2 {
        (world - self.center).rotated(-self.rotation)
    }

    /// Same frame, both half-widths multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Rectangle {
        Rectangle {
            half_width_a: self.half_width_a * factor,
            half_width_b: self.half_width_b * factor,
            ..*self
        }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2; 4] {
        let (a, b) = (self.half_width_a, self.half_width_b);
        [
            self.to_world(Point2::new(-a, -b)),
            self.to_world(Point2::new(a, -b)),
            self.to_world(Point2::new(a, b)),
            self.to_world(Point2::new(-a, b)),
        ]
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon::new(self.corners().to_vec()).expect("rectangle corners form a convex polygon")
    }

    /// Recognizes a 4-vertex polygon with right angles.
    pub fn from_polygon(p: &ConvexPolygon) -> Option<Rectangle> {
        let v = p.vertices();
        if v.len() != 4 {
            return None;
        }
        let scale = p.scale();
        for i in 0..4 {
            let u = v[(i + 1) % 4] - v[i];
            let w = v[(i + 2) % 4] - v[(i + 1) % 4];
            if u.dot(w).abs() > 1e-9 * scale * scale {
                return None;
            }
        }
        let e0 = v[1] - v[0];
        let e1 = v[2] - v[1];
        let center = v[0].midpoint(v[2]);
        let rotation = e0.y.atan2(e0.x);
        Rectangle::new(center, 0.5 * e0.norm(), 0.5 * e1.norm(), rotation).ok()
    }

    /// Whether `p` lies in the closed rectangle, with absolute slack `tol`.
    pub fn contains_with_tol(&self, p: Point2, tol: f64) -> bool {
        let q = self.to_local(p);
        q.x.abs() <= self.half_width_a + tol && q.y.abs() <= self.half_width_b + tol
    }
}

pub(crate) fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
}

pub(crate) fn bbox(pts: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

pub(crate) fn bbox_extent(pts: &[Point2]) -> f64 {
    let (lo, hi) = bbox(pts);
    (hi.x - lo.x).max(hi.y - lo.y)
}

fn dedup_ring(pts: Vec<Point2>, tol: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|q| q.dist(p) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= tol {
        out.pop();
    }
    out
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let t = ((p - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
    p.dist(a + e * t)
}
