//! Period-like functions: solutions of the three-term functional equation
//! `ψ(z) = ψ(z+1) + (z+1)^{−2s} ψ(z/(z+1))`.

use std::fmt;

use num_complex::Complex64;

use crate::analytic::{cpow, AnalyticFunction};
use crate::error::Result;

/// Where a period-like function came from; decides numeric tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    EisensteinFamily,
    PolynomialWeight,
    Spectral,
}

impl Provenance {
    /// Tolerance on the scaled three-term residual.
    pub fn tolerance(self) -> f64 {
        match self {
            Provenance::EisensteinFamily => 1e-12,
            Provenance::PolynomialWeight => 1e-10,
            Provenance::Spectral => 1e-5,
        }
    }

    /// True for the closed-form families.
    pub fn is_exact(self) -> bool {
        !matches!(self, Provenance::Spectral)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::EisensteinFamily => "eisenstein-family",
            Provenance::PolynomialWeight => "polynomial-weight",
            Provenance::Spectral => "spectral",
        })
    }
}

/// A function ψ ∈ F₀ together with its weight parameter `s`.
#[derive(Clone, Debug)]
pub struct PeriodLikeFunction {
    pub psi: AnalyticFunction,
    pub s: Complex64,
    pub provenance: Provenance,
    /// Taylor coefficients of `u ↦ ψ(1+u)` at 0, when known. They feed the
    /// analytic tail of the T*₁ sum.
    pub taylor_at_one: Option<Vec<Complex64>>,
}

impl PeriodLikeFunction {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.psi.eval(z)
    }
}

/// Number of Taylor coefficients kept for the closed-form families.
const TAYLOR_TERMS: usize = 24;

/// `ψ(z) = 1 − z^{−2s}`.
pub fn eisenstein_family(s: Complex64) -> PeriodLikeFunction {
    let psi = AnalyticFunction::new(0.0, format!("1-z^(-2*({s}))"), move |z| Ok(1.0 - cpow(z, -2.0 * s)?));
    // ψ(1+u) = 1 − (1+u)^{−2s} = −Σ_{k≥1} binom(−2s, k) u^k.
    let mut taylor = vec![Complex64::new(0.0, 0.0); TAYLOR_TERMS];
    let mut binom = Complex64::new(1.0, 0.0);
    for (k, slot) in taylor.iter_mut().enumerate().skip(1) {
        binom *= (-2.0 * s - (k as f64 - 1.0)) / k as f64;
        *slot = -binom;
    }
    PeriodLikeFunction {
        psi,
        s,
        provenance: Provenance::EisensteinFamily,
        taylor_at_one: Some(taylor),
    }
}

/// `ψ(z) = z^{2k−2} − 1` with `s = 1 − k`.
pub fn polynomial_period(k: u32) -> Result<PeriodLikeFunction> {
    if k < 2 {
        return Err(crate::Error::InvalidArgument(format!(
            "polynomial_period needs k ≥ 2, got {k}"
        )));
    }
    let deg = 2 * k as i32 - 2;
    let psi = AnalyticFunction::new(0.0, format!("z^{deg}-1"), move |z| Ok(z.powi(deg) - 1.0));
    let mut taylor = vec![Complex64::new(0.0, 0.0); deg as usize + 1];
    let mut binom = 1.0f64;
    for (j, slot) in taylor.iter_mut().enumerate().skip(1) {
        binom *= (deg as f64 - (j as f64 - 1.0)) / j as f64;
        *slot = Complex64::new(binom, 0.0);
    }
    Ok(PeriodLikeFunction {
        psi,
        s: Complex64::new(1.0 - k as f64, 0.0),
        provenance: Provenance::PolynomialWeight,
        taylor_at_one: Some(taylor),
    })
}

/// The sample grid every provider is checked on.
pub fn standard_grid() -> Vec<Complex64> {
    vec![
        Complex64::new(0.3, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.5, 0.0),
        Complex64::new(2.0, 1.0),
        Complex64::new(3.0, -0.5),
    ]
}

/// The three terms `(ψ(z), ψ(z+1), (z+1)^{−2s} ψ(z/(z+1)))`.
fn three_terms(plf: &PeriodLikeFunction, z: Complex64) -> Result<[Complex64; 3]> {
    let z1 = z + 1.0;
    Ok([plf.eval(z)?, plf.eval(z1)?, cpow(z1, -2.0 * plf.s)? * plf.eval(z / z1)?])
}

/// `max_z |ψ(z) − ψ(z+1) − (z+1)^{−2s} ψ(z/(z+1))|`.
pub fn three_term_residual(plf: &PeriodLikeFunction, zs: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in zs {
        let [a, b, c] = three_terms(plf, z)?;
        worst = worst.max((a - b - c).norm());
    }
    Ok(worst)
}

/// Residual divided by the size of the terms (at least 1), so that
/// polynomial and spectral functions of large magnitude are judged fairly.
pub fn three_term_residual_scaled(plf: &PeriodLikeFunction, zs: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in zs {
        let [a, b, c] = three_terms(plf, z)?;
        let scale = 1f64.max(a.norm()).max(b.norm()).max(c.norm());
        worst = worst.max((a - b - c).norm() / scale);
    }
    Ok(worst)
}
