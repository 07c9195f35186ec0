//! Conforming triangulations of convex polygons with uniform refinement.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexPolygon, Point2};

/// Triangle mesh; every triangle is counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_vertex_flags: Vec<bool>,
    pub refinement_level: usize,
    /// Longest edge length.
    pub h_max: f64,
}

/// `{vertices, triangles}` dump used for debugging output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshDump {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn tri_area(p: [Point2; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(p[2] - p[0])
}

/// Fan triangulation from the area centroid.
pub fn triangulate(poly: &ConvexPolygon) -> TriangleMesh {
    let n = poly.len();
    let mut vertices = poly.vertices().to_vec();
    vertices.push(poly.centroid());
    let c = n;
    let triangles = (0..n).map(|i| [c, i, (i + 1) % n]).collect();
    let mut boundary_vertex_flags = vec![true; n];
    boundary_vertex_flags.push(false);
    let mut mesh = TriangleMesh {
        vertices,
        triangles,
        boundary_vertex_flags,
        refinement_level: 0,
        h_max: 0.0,
    };
    mesh.h_max = mesh.longest_edge();
    mesh
}

/// Splits every triangle into four through its edge midpoints.
pub fn refine(mesh: &TriangleMesh) -> TriangleMesh {
    let mut vertices = mesh.vertices.clone();
    let mut flags = mesh.boundary_vertex_flags.clone();
    let boundary = mesh.boundary_edges();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * mesh.triangles.len() / 2 + 8);
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for t in &mesh.triangles {
        let mut m = [0usize; 3];
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let key = edge_key(a, b);
            m[e] = *midpoint.entry(key).or_insert_with(|| {
                vertices.push(mesh.vertices[a].midpoint(mesh.vertices[b]));
                flags.push(boundary.contains_key(&key));
                vertices.len() - 1
            });
        }
        // m[0] on (t0,t1), m[1] on (t1,t2), m[2] on (t2,t0)
        triangles.push([t[0], m[0], m[2]]);
        triangles.push([m[0], t[1], m[1]]);
        triangles.push([m[2], m[1], t[2]]);
        triangles.push([m[0], m[1], m[2]]);
    }
    let mut out = TriangleMesh {
        vertices,
        triangles,
        boundary_vertex_flags: flags,
        refinement_level: mesh.refinement_level + 1,
        h_max: 0.0,
    };
    out.h_max = out.longest_edge();
    out
}

/// `triangulate` followed by `levels` refinements.
pub fn build_mesh(poly: &ConvexPolygon, levels: usize) -> TriangleMesh {
    let mut m = triangulate(poly);
    for _ in 0..levels {
        m = refine(&m);
    }
    m
}

/// Fewest refinement levels bringing the longest edge of the fan mesh of
/// `poly` to at most `h`.
pub fn levels_for_h(poly: &ConvexPolygon, h: f64) -> usize {
    let h0 = triangulate(poly).h_max;
    if !(h > 0.0) || h0 <= h {
        return 0;
    }
    let mut levels = (h0 / h).log2().ceil() as usize;
    // Halving is exact, so only the rounding of the logarithm needs care.
    while levels > 0 && h0 / f64::powi(2.0, levels as i32 - 1) <= h {
        levels -= 1;
    }
    while h0 / f64::powi(2.0, levels as i32) > h {
        levels += 1;
    }
    levels
}

impl TriangleMesh {
    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| tri_area(self.triangle_points(t))).sum()
    }

    fn longest_edge(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for e in 0..3 {
                h = h.max(p[e].dist(p[(e + 1) % 3]));
            }
        }
        h
    }

    /// Number of triangles using each edge.
    pub fn edge_use_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::with_capacity(3 * self.triangles.len() / 2 + 8);
        for t in &self.triangles {
            for e in 0..3 {
                *counts.entry(edge_key(t[e], t[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    fn boundary_edges(&self) -> HashMap<(usize, usize), usize> {
        let mut c = self.edge_use_counts();
        c.retain(|_, n| *n == 1);
        c
    }

    /// Every triangle positively oriented and every edge used by one or two
    /// triangles, with boundary flags exactly on the endpoints of once-used
    /// edges.
    pub fn is_conforming(&self) -> bool {
        let counts = self.edge_use_counts();
        if counts.values().any(|&n| n == 0 || n > 2) {
            return false;
        }
        if (0..self.triangles.len()).any(|t| tri_area(self.triangle_points(t)) <= 0.0) {
            return false;
        }
        let mut on_boundary = vec![false; self.vertices.len()];
        for (&(a, b), &n) in &counts {
            if n == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        on_boundary == self.boundary_vertex_flags
    }

    /// `V − E + F`; one for a triangulated disk.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_use_counts().len() as i64 + self.triangles.len() as i64
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                best = best.min(u.cross(v).abs().atan2(u.dot(v)));
            }
        }
        best
    }

    pub fn dump(&self) -> MeshDump {
        MeshDump {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
    }
}
