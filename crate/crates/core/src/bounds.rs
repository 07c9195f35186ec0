//! Closed-form eigenvalue bounds and exact rectangle / flat-torus spectra.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_zero, BesselOrder};
use crate::spectrum::{Spectrum, SpectrumSource};

/// Ambient dimension with the volume of its unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionParams {
    pub n: usize,
    pub omega_n: f64,
}

impl DimensionParams {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be ≥ 2, got {n}")));
        }
        let half = n as f64 / 2.0;
        let omega_n = if n == 2 {
            PI
        } else {
            PI.powf(half) / libm::tgamma(half + 1.0)
        };
        Ok(DimensionParams { n, omega_n })
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `π² / diam²`, the lower bound on `μ_1` of a convex domain.
pub fn payne_weinberger_lower(diam: f64) -> Result<f64> {
    let d = positive("diameter", diam)?;
    Ok(PI * PI / (d * d))
}

/// Upper bound on `μ_k` from the diameter and Bessel zeros.
///
/// * `n = 2`: `(2 j_{0,1} + (k − 1)π)² / diam²`
/// * `n > 2`, `k` odd: `4 j²_{ν,(k+1)/2} / diam²`
/// * `n > 2`, `k` even: `(j_{ν,k/2} + j_{ν,(k+2)/2})² / diam²`
///
/// with `ν = (n − 2)/2`.
pub fn kroger_diameter_upper(n: usize, k: usize, diam: f64) -> Result<f64> {
    let d = positive("diameter", diam)?;
    if n < 2 || k == 0 {
        return Err(Error::InvalidArgument(format!("need n ≥ 2 and k ≥ 1 (got n = {n}, k = {k})")));
    }
    let rhs = if n == 2 {
        let j01 = bessel_zero(BesselOrder::new(0.0)?, 1)?;
        (2.0 * j01 + (k as f64 - 1.0) * PI).powi(2)
    } else {
        let nu = BesselOrder::new((n as f64 - 2.0) / 2.0)?;
        if k % 2 == 1 {
            4.0 * bessel_zero(nu, k.div_ceil(2))?.powi(2)
        } else {
            (bessel_zero(nu, k / 2)? + bessel_zero(nu, k / 2 + 1)?).powi(2)
        }
    };
    Ok(rhs / (d * d))
}

/// Volume bound on `μ_k`; `planar` is the `n = 2` simplification `8πk / vol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrogerVolumeBound {
    pub value: f64,
    pub planar: Option<f64>,
}

/// `(2π)² ((n+2)/2)^{2/n} (k / (ω_n vol))^{2/n}`.
pub fn kroger_volume_upper(n: usize, k: usize, vol: f64) -> Result<KrogerVolumeBound> {
    let v = positive("volume", vol)?;
    let dim = DimensionParams::new(n)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    let e = 2.0 / n as f64;
    let value = (2.0 * PI).powi(2)
        * ((n as f64 + 2.0) / 2.0).powf(e)
        * (k as f64 / (dim.omega_n * v)).powf(e);
    Ok(KrogerVolumeBound {
        value,
        planar: (n == 2).then(|| 8.0 * PI * k as f64 / v),
    })
}

/// `min_i μ_1(Ω_i)`. With `m` pieces this bounds `μ_m(Ω)` from below; the
/// index bookkeeping lives with the caller.
pub fn buser_lower(mu1_values: &[f64]) -> Result<f64> {
    if mu1_values.is_empty() {
        return Err(Error::InvalidArgument("no partition pieces".into()));
    }
    Ok(mu1_values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `C (k/l)² μ_l`.
pub fn main_theorem_bound(k: usize, l: usize, mu_l: f64, c: f64) -> Result<f64> {
    if l == 0 || k < l {
        return Err(Error::InvalidArgument(format!("need k ≥ l ≥ 1 (got k = {k}, l = {l})")));
    }
    if !(mu_l >= 0.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("need μ_l ≥ 0 and C > 0 (got {mu_l}, {c})")));
    }
    let r = k as f64 / l as f64;
    Ok(c * r * r * mu_l)
}

/// Smallest `count` values of `scale·(p²/Lx² + q²/Ly²)` over the lattice
/// points allowed by `full_lattice` (all of ℤ², or `p, q ≥ 0`), ascending.
fn lattice_spectrum(lx: f64, ly: f64, count: usize, scale: f64, full_lattice: bool) -> Vec<f64> {
    let area = lx * ly;
    let min_step = scale * (1.0 / (lx * lx)).min(1.0 / (ly * ly));
    // Weyl-sized first guess, doubled until enough values fall below it.
    let mut cutoff = (4.0 * PI * count as f64 / area).max(min_step) * 2.0;
    loop {
        let pmax = (cutoff / scale).sqrt() * lx;
        let qmax = (cutoff / scale).sqrt() * ly;
        let (pm, qm) = (pmax.floor() as i64, qmax.floor() as i64);
        let prange = if full_lattice { -pm..=pm } else { 0..=pm };
        let mut values = Vec::new();
        for p in prange {
            let qrange = if full_lattice { -qm..=qm } else { 0..=qm };
            for q in qrange {
                let (pf, qf) = (p as f64, q as f64);
                let v = scale * (pf * pf / (lx * lx) + qf * qf / (ly * ly));
                if v <= cutoff {
                    values.push(v);
                }
            }
        }
        if values.len() >= count {
            values.sort_by(f64::total_cmp);
            values.truncate(count);
            return values;
        }
        cutoff *= 2.0;
    }
}

fn check_rect(a: f64, b: f64, count: usize) -> Result<()> {
    positive("half-width a", a)?;
    positive("half-width b", b)?;
    if count == 0 {
        return Err(Error::InvalidArgument("count must be ≥ 1".into()));
    }
    Ok(())
}

/// First `count` Neumann eigenvalues of `[-a, a] × [-b, b]`:
/// `π² (p²/L_x² + q²/L_y²)` with `L_x = 2a`, `L_y = 2b`, `p, q ≥ 0`.
pub fn rectangle_spectrum(a: f64, b: f64, count: usize) -> Result<Spectrum> {
    check_rect(a, b, count)?;
    let values = lattice_spectrum(2.0 * a, 2.0 * b, count, PI * PI, false);
    Ok(Spectrum::exact(values, SpectrumSource::ClosedForm))
}

/// First `count` eigenvalues of the flat torus with fundamental domain
/// `[-a, a] × [-b, b]`: `4π² (p²/L_x² + q²/L_y²)`, `(p, q) ∈ ℤ²`.
pub fn torus_spectrum(a: f64, b: f64, count: usize) -> Result<Spectrum> {
    check_rect(a, b, count)?;
    let values = lattice_spectrum(2.0 * a, 2.0 * b, count, 4.0 * PI * PI, true);
    Ok(Spectrum::exact(values, SpectrumSource::Torus))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI2: f64 = PI * PI;

    #[test]
    fn unit_ball_volumes() {
        assert!((DimensionParams::new(2).unwrap().omega_n - PI).abs() < 1e-14);
        let w3 = DimensionParams::new(3).unwrap().omega_n;
        assert!((w3 - 4.188_790_204_786_391).abs() < 1e-14);
        assert!(DimensionParams::new(1).is_err());
    }

    #[test]
    fn payne_weinberger_examples() {
        assert!((payne_weinberger_lower(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((payne_weinberger_lower(2f64.sqrt()).unwrap() - 4.934_802_200_544_679).abs() < 1e-12);
        assert!((payne_weinberger_lower(1.0).unwrap() - PI2).abs() < 1e-15);
        assert!(payne_weinberger_lower(0.0).is_err());
        assert!(payne_weinberger_lower(-1.0).is_err());
    }

    /// Frozen values from a 30-digit independent evaluation.
    #[test]
    fn kroger_diameter_examples() {
        let v = kroger_diameter_upper(3, 1, 1.0).unwrap();
        assert!((v - 4.0 * PI2).abs() < 1e-10);
        let v = kroger_diameter_upper(2, 1, 1.0).unwrap();
        assert!((v - 23.132_743_851_787_138).abs() < 1e-11);
        let v = kroger_diameter_upper(2, 3, 2.0).unwrap();
        assert!((v - 30.762_754_974_480_178).abs() < 1e-11);
        // n = 3, k = 2: (j_{1/2,1} + j_{1/2,2})² = 9π²
        let v = kroger_diameter_upper(3, 2, 1.0).unwrap();
        assert!((v - 9.0 * PI2).abs() < 1e-9);
        assert!(kroger_diameter_upper(2, 0, 1.0).is_err());
    }

    #[test]
    fn kroger_volume_examples() {
        let b = kroger_volume_upper(2, 1, 1.0).unwrap();
        assert!((b.value - 8.0 * PI).abs() < 1e-12);
        assert!((b.planar.unwrap() - 8.0 * PI).abs() < 1e-12);
        let b = kroger_volume_upper(2, 4, 2.0).unwrap();
        assert!((b.value - 16.0 * PI).abs() < 1e-12);
        let w3 = DimensionParams::new(3).unwrap().omega_n;
        // k/(ω_n vol) = 1 leaves 4π²(5/2)^{2/3}
        let b = kroger_volume_upper(3, 1, 1.0 / w3).unwrap();
        assert!((b.value - 72.719_866_985_465_97).abs() < 1e-10);
        let b = kroger_volume_upper(3, 1, w3).unwrap();
        assert!((b.value - 10.769_650_179_907_585).abs() < 1e-10);
        assert!(b.planar.is_none());
        assert!(kroger_volume_upper(2, 1, 0.0).is_err());
    }

    #[test]
    fn buser_and_main_bound() {
        assert_eq!(buser_lower(&[PI2, PI2]).unwrap(), PI2);
        assert_eq!(buser_lower(&[4.0, 9.0, 1.0]).unwrap(), 1.0);
        assert!(buser_lower(&[]).is_err());
        assert_eq!(main_theorem_bound(3, 3, 2.5, 1.5).unwrap(), 3.75);
        assert_eq!(main_theorem_bound(4, 2, 1.0, 1.0).unwrap(), 4.0);
        assert!((main_theorem_bound(6, 2, PI2, 2.0).unwrap() - 18.0 * PI2).abs() < 1e-12);
        assert!(main_theorem_bound(1, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn rectangle_spectra() {
        let s = rectangle_spectrum(0.5, 0.5, 8).unwrap();
        let want = [0.0, 1.0, 1.0, 2.0, 4.0, 4.0, 5.0, 5.0];
        for (v, w) in s.values.iter().zip(want) {
            assert!((v - w * PI2).abs() < 1e-12);
        }
        let s = rectangle_spectrum(1.0, 0.5, 2).unwrap();
        assert!((s.values[1] - PI2 / 4.0).abs() < 1e-14);
        assert!(s.is_well_formed());
    }

    #[test]
    fn torus_spectra() {
        let s = torus_spectrum(0.5, 0.5, 5).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert!(s.values[1..].iter().all(|v| (v - 4.0 * PI2).abs() < 1e-12));
        let s = torus_spectrum(1.0, 0.5, 4).unwrap();
        assert!((s.values[1] - PI2).abs() < 1e-12 && (s.values[2] - PI2).abs() < 1e-12);
        assert!(s.values[3] > PI2 * 1.5);
        assert!(s.is_well_formed());
    }

    /// Brute-force enumeration over a generous fixed box as an oracle for the
    /// adaptive cutoff.
    #[test]
    fn adaptive_cutoff_matches_fixed_box() {
        for &(a, b) in &[(0.5, 0.5), (0.1, 2.0), (0.5, 5.0), (1.3, 1.7)] {
            let n = 60;
            let got = rectangle_spectrum(a, b, n).unwrap().values;
            let mut all = Vec::new();
            for p in 0..200 {
                for q in 0..200 {
                    let (p, q) = (p as f64, q as f64);
                    all.push(PI2 * (p * p / (4.0 * a * a) + q * q / (4.0 * b * b)));
                }
            }
            all.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&all) {
                assert!((g - w).abs() <= 1e-12 * w.max(1.0));
            }
        }
    }

    #[test]
    fn bounds_sandwich_rectangle_eigenvalues() {
        for &(a, b) in &[(0.5, 0.5), (0.5, 1.0), (0.5, 5.0), (0.1, 10.0), (2.0, 3.0)] {
            let s = rectangle_spectrum(a, b, 21).unwrap();
            let diam = 2.0 * f64::hypot(a, b);
            let area = 4.0 * a * b;
            assert!(payne_weinberger_lower(diam).unwrap() <= s.values[1]);
            assert!(s.values[1] <= kroger_diameter_upper(2, 1, diam).unwrap());
            for k in 1..=20 {
                assert!(s.values[k] <= kroger_volume_upper(2, k, area).unwrap().value);
            }
        }
    }

    #[test]
    fn planar_kroger_grows_like_k_squared() {
        for k in 1..=10_000 {
            let v = kroger_diameter_upper(2, k, 1.0).unwrap();
            assert!(v / (k as f64 * k as f64) <= 40.0);
        }
    }

    #[test]
    fn strip_interlacing() {
        let square = rectangle_spectrum(0.5, 0.5, 6).unwrap();
        for m in 2..=5 {
            let h = 1.0 / m as f64;
            let strip_mu1 = rectangle_spectrum(0.5 * h, 0.5, 2).unwrap().values[1];
            let lower = buser_lower(&vec![strip_mu1; m]).unwrap();
            assert!(square.values[m] >= lower * (1.0 - 1e-12));
            if m == 2 {
                assert!((square.values[2] - lower).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_growth() {
        let s = rectangle_spectrum(0.5, 0.7, 501).unwrap();
        let area = 1.4;
        let ratio = s.values[500] * area / (4.0 * PI * 500.0);
        assert!((ratio - 1.0).abs() < 0.2, "{ratio}");
    }
}
