//! Bessel functions of the first kind and their positive zeros.
//!
//! `J_ν(x)` for real order `ν ≥ 0` and `x ≥ 0`:
//!
//! * `x ≤ 8`: the ascending power series (largest term stays below ~10², so
//!   cancellation costs at most two digits);
//! * `8 < x < 25 + ν²`: Miller's backward recurrence over `J_{ν₀+k}`,
//!   normalized with `(x/2)^ν₀ = Σ_k (ν₀+2k) Γ(ν₀+k)/k! · J_{ν₀+2k}(x)`;
//! * beyond: Hankel's asymptotic expansion, truncated at its smallest term.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of a Bessel function, finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu >= 0.0 {
            Ok(BesselOrder(nu))
        } else {
            Err(Error::InvalidArgument(format!("Bessel order must be finite and ≥ 0, got {nu}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        BesselOrder::new(nu)
    }
}

const SERIES_LIMIT: f64 = 8.0;

/// `J_ν(x)`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel argument must be finite and ≥ 0, got {x}")));
    }
    Ok(j_unchecked(nu.0, x))
}

/// `J_ν'(x) = (ν/x) J_ν(x) − J_{ν+1}(x)`.
pub fn bessel_j_prime(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("derivative needs finite x > 0, got {x}")));
    }
    Ok(jp_unchecked(nu.0, x))
}

fn jp_unchecked(nu: f64, x: f64) -> f64 {
    nu / x * j_unchecked(nu, x) - j_unchecked(nu + 1.0, x)
}

fn j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(nu, x)
    } else if x < 25.0 + nu * nu {
        miller(nu, x)
    } else {
        hankel(nu, x)
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = if nu <= 100.0 {
        h.powf(nu) / libm::tgamma(nu + 1.0)
    } else {
        (nu * h.ln() - libm::lgamma(nu + 1.0)).exp()
    };
    let q = -h * h;
    let mut sum = term;
    for m in 1..500 {
        let m = m as f64;
        term *= q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn miller(nu: f64, x: f64) -> f64 {
    let whole = nu.floor();
    let frac = nu - whole;
    let target = whole as usize;
    let top = target as f64 + x;
    let mut start = (top + 30.0 + 6.0 * top.sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    // f_k ∝ J_{frac+k}, recurred downward from f_{start+1} = 0.
    let mut f_next = 0.0;
    let mut f = 1e-30;
    let mut at_target = if start == target { f } else { 0.0 };
    let mut norm = 0.0;
    // Γ(frac+j)/j! for j = k/2, built downward from the top is awkward, so
    // gather the even-index values and weight them afterwards.
    let mut evens: Vec<(usize, f64)> = Vec::with_capacity(start / 2 + 1);
    evens.push((start, f));
    let mut k = start;
    while k > 0 {
        let f_prev = 2.0 * (frac + k as f64) / x * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if k == target {
            at_target = f;
        }
        if k % 2 == 0 {
            evens.push((k, f));
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            at_target *= 1e-250;
            for e in evens.iter_mut() {
                e.1 *= 1e-250;
            }
        }
    }
    // Neumann normalization. k = 2j carries (frac + 2j) Γ(frac + j) / j!.
    let gamma1 = libm::tgamma(frac + 1.0);
    let mut g = gamma1; // Γ(frac + j)/j! for j ≥ 1, starting at j = 1
    let mut weights = vec![0.0; start / 2 + 1];
    weights[0] = gamma1;
    for (j, w) in weights.iter_mut().enumerate().skip(1) {
        if j > 1 {
            let jm = (j - 1) as f64;
            g *= (frac + jm) / (jm + 1.0);
        }
        *w = (frac + 2.0 * j as f64) * g;
    }
    for (k, v) in evens.iter().rev() {
        norm += weights[k / 2] * v;
    }
    at_target * (0.5 * x).powf(frac) / norm
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k(ν)/x^k, alternating into P (even k) and Q (odd k).
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..200usize {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        let a = term.abs();
        if a > prev_abs {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if a < 1e-17 {
            break;
        }
        prev_abs = a;
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Scans `f` from `start` with step `step` and returns a bracket around its
/// `k`-th sign change.
fn kth_sign_change(f: impl Fn(f64) -> f64, k: usize, start: f64, step: f64) -> (f64, f64) {
    let mut count = 0;
    let mut a = start;
    let mut fa = f(a);
    loop {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            count += 1;
            if count == k {
                return (a, b);
            }
        }
        a = b;
        fa = fb;
    }
}

/// Newton iteration kept inside a sign-change bracket, bisecting whenever a
/// step leaves it.
fn safeguarded_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    guess: f64,
) -> f64 {
    let mut flo = f(lo);
    let mut x = guess.clamp(lo, hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

/// Bracket of width `2·half` about `guess` if it contains exactly one sign
/// change; `None` otherwise.
fn bracket_near(f: &impl Fn(f64) -> f64, guess: f64, half: f64) -> Option<(f64, f64)> {
    let (lo, hi) = (guess - half, guess + half);
    if lo <= 0.0 {
        return None;
    }
    let (flo, fmid, fhi) = (f(lo), f(guess), f(hi));
    let changes = usize::from(flo.signum() != fmid.signum()) + usize::from(fmid.signum() != fhi.signum());
    (changes == 1).then_some((lo, hi))
}

/// `j_{ν,k}`, the `k`-th positive zero of `J_ν`.
pub fn bessel_zero(nu: BesselOrder, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("zero index starts at 1".into()));
    }
    let v = nu.0;
    let f = |x: f64| j_unchecked(v, x);
    let df = |x: f64| jp_unchecked(v, x);
    let kf = k as f64;
    if kf > (2.0 * v).max(3.0) {
        let beta = (kf + 0.5 * v - 0.25) * PI;
        let mu = 4.0 * v * v;
        let b8 = 8.0 * beta;
        let guess = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3));
        if let Some((lo, hi)) = bracket_near(&f, guess, 0.5) {
            return Ok(safeguarded_newton(f, df, lo, hi, guess));
        }
    }
    let (lo, hi) = kth_sign_change(f, k, v.max(0.5), 0.25);
    Ok(safeguarded_newton(f, df, lo, hi, 0.5 * (lo + hi)))
}

/// `j'_{ν,k}`, the `k`-th positive zero of `J_ν'`. For `ν = 0` the zero at
/// the origin is not counted, so `j'_{0,k} = j_{1,k}`.
pub fn bessel_deriv_zero(nu: BesselOrder, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("zero index starts at 1".into()));
    }
    let v = nu.0;
    if v == 0.0 {
        return bessel_zero(BesselOrder(1.0), k);
    }
    let f = |x: f64| jp_unchecked(v, x);
    // J_ν'' from Bessel's equation: x² J'' = −x J' − (x² − ν²) J.
    let df = |x: f64| -jp_unchecked(v, x) / x - (1.0 - v * v / (x * x)) * j_unchecked(v, x);
    let kf = k as f64;
    if kf > (2.0 * v).max(3.0) {
        let beta = (kf + 0.5 * v - 0.75) * PI;
        let mu = 4.0 * v * v;
        let b8 = 8.0 * beta;
        let guess = beta
            - (mu + 3.0) / b8
            - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * b8.powi(3));
        if let Some((lo, hi)) = bracket_near(&f, guess, 0.5) {
            return Ok(safeguarded_newton(f, df, lo, hi, guess));
        }
    }
    let (lo, hi) = kth_sign_change(f, k, (0.5 * v).max(0.05), 0.25);
    Ok(safeguarded_newton(f, df, lo, hi, 0.5 * (lo + hi)))
}

/// Closed form `J_{1/2}(x) = √(2/(πx)) sin x`, exposed for cross-checks.
pub fn bessel_j_half(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }
}
