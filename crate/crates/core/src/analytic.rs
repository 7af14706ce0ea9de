//! Principal-branch complex powers, evaluable functions with a branch cut,
//! and the slash operator of complex weight.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::IntegerMatrix2;

/// `t^s = exp(s (log|t| + i Arg t))` with `−π < Arg t ≤ π`.
///
/// A negative real `t` (including one whose imaginary part is `−0.0`) gets
/// `Arg t = π`.
pub fn cpow(t: Complex64, s: Complex64) -> Result<Complex64> {
    if t.re == 0.0 && t.im == 0.0 {
        return Err(Error::ZeroBase);
    }
    Ok((s * log_principal(t)).exp())
}

/// Principal logarithm with the closed-branch convention of [`cpow`].
pub fn log_principal(t: Complex64) -> Complex64 {
    let arg = if t.im == 0.0 && t.re < 0.0 {
        PI
    } else {
        t.im.atan2(t.re)
    };
    Complex64::new(t.norm().ln(), arg)
}

/// `|t|^s` for a positive real `t`.
pub fn real_pow(t: f64, s: Complex64) -> Complex64 {
    (s * t.ln()).exp()
}

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A holomorphic function on C∖(−∞, r], given by an evaluator and its
/// branch point r.
#[derive(Clone)]
pub struct AnalyticFunction {
    branch_point: f64,
    eval: Arc<Evaluator>,
    descriptor: String,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("branch_point", &self.branch_point)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl AnalyticFunction {
    pub fn new<F>(branch_point: f64, descriptor: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        AnalyticFunction {
            branch_point,
            eval: Arc::new(f),
            descriptor: descriptor.into(),
        }
    }

    pub fn branch_point(&self) -> f64 {
        self.branch_point
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Holomorphic on C∖(−∞, 0].
    pub fn in_f0(&self) -> bool {
        self.branch_point <= 0.0
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re <= self.branch_point {
            return Err(Error::OnCut {
                z,
                r: self.branch_point,
            });
        }
        (self.eval)(z)
    }
}

/// `a − c·r > 0`, or `a − c·r = 0` and `d·r − b < 0`.
pub fn in_definition_domain(phi: &AnalyticFunction, g: &IntegerMatrix2) -> bool {
    domain_condition(phi.branch_point, g)
}

fn domain_condition(r: f64, g: &IntegerMatrix2) -> bool {
    let [a, b, c, d] = g.to_f64();
    let lead = a - c * r;
    lead > 0.0 || (lead == 0.0 && d * r - b < 0.0)
}

/// Branch point of `φ|ₛg`: the larger of `g⁻¹(r)` (when finite) and the pole
/// `−d/c` of `(cz+d)` (when `c > 0`); 0 when neither is available.
fn slashed_branch_point(r: f64, g: &IntegerMatrix2) -> f64 {
    let [a, b, c, d] = g.to_f64();
    let mut candidates = Vec::with_capacity(2);
    let den = a - c * r;
    if den != 0.0 {
        candidates.push((d * r - b) / den);
    }
    if c > 0.0 {
        candidates.push(-d / c);
    }
    candidates
        .into_iter()
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |y| y.max(x))))
        .unwrap_or(0.0)
}

/// Pointwise value of `(φ|ₛg)(z) = |det g|^s (cz+d)^{−2s} φ(gz)`.
pub fn slash_value(
    phi: impl Fn(Complex64) -> Result<Complex64>,
    g: [f64; 4],
    det: f64,
    s: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    let [a, b, c, d] = g;
    let den = z * c + d;
    let gz = (z * a + b) / den;
    let factor = cpow(den, -2.0 * s)?;
    let scale = if det == 1.0 {
        Complex64::new(1.0, 0.0)
    } else {
        real_pow(det.abs(), s)
    };
    Ok(scale * factor * phi(gz)?)
}

/// The slash operator `φ ↦ φ|ₛg` for `g ∈ G` in the definition domain of φ.
pub fn slash(phi: &AnalyticFunction, g: &IntegerMatrix2, s: Complex64) -> Result<AnalyticFunction> {
    if !g.in_g() || !in_definition_domain(phi, g) {
        return Err(Error::OutsideDefinitionDomain(g.to_string()));
    }
    let r_new = slashed_branch_point(phi.branch_point, g);
    let det = g.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let det_f = det.abs().to_f64().unwrap_or(f64::INFINITY);
    let entries = g.to_f64();
    let inner = phi.clone();
    let descriptor = format!("{}|{}", phi.descriptor, g);
    let result = AnalyticFunction::new(r_new, descriptor, move |z| {
        slash_value(|w| inner.eval(w), entries, det_f, s, z)
    });
    // Spot evaluation to the right of the new cut.
    for probe in [Complex64::new(r_new + 1.0, 0.0), Complex64::new(r_new + 0.5, 0.75)] {
        let v = result.eval(probe)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::OutsideDefinitionDomain(g.to_string()));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cpow_examples() {
        let s = c(0.3, -2.0);
        assert_eq!(cpow(c(1.0, 0.0), s).unwrap(), c(1.0, 0.0));
        let v = cpow(c(0.0, 1.0), c(0.5, 0.0)).unwrap();
        let w = Complex64::from_polar(1.0, PI / 4.0);
        assert_abs_diff_eq!(v.re, w.re, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, w.im, epsilon = 1e-15);
        let v = cpow(c(-2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        // −0.0 imaginary part still uses Arg = π.
        let v = cpow(c(-4.0, -0.0), c(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(v.im, 2.0, epsilon = 1e-15);
        assert!(matches!(cpow(c(0.0, 0.0), s), Err(Error::ZeroBase)));
    }

    #[test]
    fn domain_examples() {
        let one = AnalyticFunction::new(0.0, "1", |_| Ok(c(1.0, 0.0)));
        assert!(in_definition_domain(&one, &IntegerMatrix2::t()));
        assert!(in_definition_domain(&one, &IntegerMatrix2::from_i64(0, 1, 1, 1)));
        let shifted = AnalyticFunction::new(1.0, "1", |_| Ok(c(1.0, 0.0)));
        assert!(!in_definition_domain(&shifted, &IntegerMatrix2::from_i64(1, 0, 2, 1)));
    }

    #[test]
    fn slash_examples() {
        let s = c(1.0, 0.0);
        let one = AnalyticFunction::new(0.0, "1", |_| Ok(c(1.0, 0.0)));
        let v = slash(&one, &IntegerMatrix2::t(), c(0.2, 5.0)).unwrap();
        assert_abs_diff_eq!((v.eval(c(0.7, 0.3)).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-15);

        let psi = AnalyticFunction::new(0.0, "1-z^-2", move |z| Ok(1.0 - cpow(z, -2.0 * s)?));
        let v = slash(&psi, &IntegerMatrix2::t_prime(), s).unwrap();
        assert_abs_diff_eq!((v.eval(c(1.0, 0.0)).unwrap() - (-0.75)).norm(), 0.0, epsilon = 1e-14);

        let g = IntegerMatrix2::from_i64(1, -1, 0, 2);
        let v = slash(&psi, &g, s).unwrap();
        assert_eq!(v.branch_point(), 1.0);
        assert!(matches!(v.eval(c(1.0, 0.0)), Err(Error::OnCut { .. })));
    }

    #[test]
    fn slash_is_an_action_on_a_sample() {
        let s = c(0.5, 3.0);
        let psi = AnalyticFunction::new(0.0, "1-z^-2s", move |z| Ok(1.0 - cpow(z, -2.0 * s)?));
        let g1 = IntegerMatrix2::from_i64(2, 1, 3, 5);
        let g2 = IntegerMatrix2::from_i64(1, 4, 0, 3);
        let left = slash(&slash(&psi, &g1, s).unwrap(), &g2, s).unwrap();
        let right = slash(&psi, &(&g1 * &g2), s).unwrap();
        for z in [c(0.3, 0.1), c(2.0, -1.0), c(0.01, 4.0)] {
            let (x, y) = (left.eval(z).unwrap(), right.eval(z).unwrap());
            assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0));
        }
    }
}
