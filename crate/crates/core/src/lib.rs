//! Neumann eigenvalues of planar convex domains: finite elements, closed
//! forms, classical bounds, and partition certificates for `μ_k ≲ (k/l)² μ_l`.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod special;
pub mod spectrum;

pub use certify::{ChainLink, ChainReport, PartitionCertificate};
pub use error::{Error, Result};
pub use fem::SparseSymmetricMatrix;
pub use geometry::{ConvexPolygon, Point2, Rectangle};
pub use mesh::TriangleMesh;
pub use spectrum::{Spectrum, SpectrumSource};
