use std::fmt;

use serde::{Deserialize, Serialize};

/// Where a set of eigenvalues came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    /// Separation of variables on a rectangle.
    ClosedForm,
    /// Flat torus built on a rectangle.
    Torus,
    /// P1 finite elements after `level` uniform refinements.
    Fem { level: usize },
}

impl fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumSource::ClosedForm => f.write_str("closed_form"),
            SpectrumSource::Torus => f.write_str("torus_closed_form"),
            SpectrumSource::Fem { level } => write!(f, "fem({level})"),
        }
    }
}

/// Ascending eigenvalues `μ_0 = 0 ≤ μ_1 ≤ …`, counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Longest mesh edge; zero for exact spectra.
    pub mesh_h: f64,
    pub refinement_level: usize,
    /// Largest relative residual of the returned eigenpairs; zero for exact spectra.
    pub solver_residual: f64,
    pub source: SpectrumSource,
}

impl Spectrum {
    pub fn exact(values: Vec<f64>, source: SpectrumSource) -> Self {
        Spectrum {
            values,
            mesh_h: 0.0,
            refinement_level: 0,
            solver_residual: 0.0,
            source,
        }
    }

    /// `μ_k`, indexed from the zero mode.
    pub fn mu(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The zero mode is numerically zero and the values ascend.
    pub fn is_well_formed(&self) -> bool {
        let Some(&first) = self.values.first() else {
            return false;
        };
        let scale = self.values.get(1).copied().unwrap_or(1.0).max(1.0);
        first.abs() < 1e-8 * scale
            && self
                .values
                .windows(2)
                .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
    }
}
