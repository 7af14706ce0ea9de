//! The pseudo-measure attached to a period-like function: values on left
//! primitive segments are slashes of ψ, and everything else is assembled
//! from chains anchored at −∞.

use num_complex::Complex64;
use num_traits::Signed;

use crate::analytic::{slash, slash_value, AnalyticFunction};
use crate::error::{Error, Result};
use crate::period::PeriodLikeFunction;
use crate::rational::{monotone_chain_to, primitive_chain_to, Cusp, IntegerMatrix2, PrimitiveChain};

/// Finitely additive function on rational segments, valued in holomorphic
/// functions, built from ψ.
#[derive(Clone, Debug)]
pub struct PseudoMeasure {
    source: PeriodLikeFunction,
}

impl PseudoMeasure {
    pub fn new(source: PeriodLikeFunction) -> Self {
        PseudoMeasure { source }
    }

    pub fn source(&self) -> &PeriodLikeFunction {
        &self.source
    }

    pub fn s(&self) -> Complex64 {
        self.source.s
    }

    /// `ψ|ₛg`, the value on the left primitive segment `(−d/c, −b/a)`.
    pub fn mu_primitive(&self, g: &IntegerMatrix2) -> Result<AnalyticFunction> {
        if !g.in_s() {
            return Err(Error::NotInS(g.to_string()));
        }
        slash(&self.source.psi, g, self.source.s)
    }

    /// Pointwise `(ψ|ₛg)(z)` for `g ∈ S`, skipping handle construction.
    pub fn primitive_value(&self, g: &IntegerMatrix2, z: Complex64) -> Result<Complex64> {
        slash_value(|w| self.source.eval(w), g.to_f64(), 1.0, self.source.s, z)
    }

    /// Signed sum of primitive values along a chain.
    pub fn mu_along_chain(&self, chain: &PrimitiveChain, z: Complex64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for step in &chain.steps {
            let v = self.primitive_value(&step.matrix, z)?;
            if step.sign > 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        Ok(total)
    }

    /// `μ(−∞, β)(z)` along the continued-fraction chain.
    pub fn mu_from_infinity(&self, beta: &Cusp, z: Complex64) -> Result<Complex64> {
        self.mu_along_chain(&primitive_chain_to(&clamp(beta))?, z)
    }

    /// `μ(−∞, β)(z)` along the increasing Farey chain. Every term is
    /// holomorphic off (−∞, β], so this is the form to use at points whose
    /// real part lies between β and 0.
    pub fn mu_from_infinity_monotone(&self, beta: &Cusp, z: Complex64) -> Result<Complex64> {
        self.mu_along_chain(&monotone_chain_to(&clamp(beta))?, z)
    }

    /// `μ(α, β)(z) = μ(−∞, β)(z) − μ(−∞, α)(z)`. Positive endpoints are
    /// moved to 0, since μ vanishes on segments inside (0, ∞).
    pub fn mu(&self, alpha: &Cusp, beta: &Cusp, z: Complex64) -> Result<Complex64> {
        let (a, b) = (clamp(alpha), clamp(beta));
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.mu_from_infinity(&b, z)? - self.mu_from_infinity(&a, z)?)
    }

    /// As [`PseudoMeasure::mu`] with monotone chains.
    pub fn mu_monotone(&self, alpha: &Cusp, beta: &Cusp, z: Complex64) -> Result<Complex64> {
        let (a, b) = (clamp(alpha), clamp(beta));
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.mu_from_infinity_monotone(&b, z)? - self.mu_from_infinity_monotone(&a, z)?)
    }
}

fn clamp(x: &Cusp) -> Cusp {
    if !x.is_infinite() && x.p().is_positive() {
        Cusp::zero()
    } else {
        x.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::eisenstein_family;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cusp(p: i64, q: i64) -> Cusp {
        Cusp::new(p, q).unwrap()
    }

    #[test]
    fn primitive_examples() {
        let m = PseudoMeasure::new(eisenstein_family(c(1.0, 0.0)));
        let id = m.mu_primitive(&IntegerMatrix2::identity()).unwrap();
        let z = c(0.4, 0.3);
        assert_eq!(id.eval(z).unwrap(), m.source().eval(z).unwrap());
        let v = m.mu_primitive(&IntegerMatrix2::from_i64(1, 0, 2, 1)).unwrap();
        assert!((v.eval(c(1.0, 0.0)).unwrap() - (-8.0 / 9.0)).norm() < 1e-14);
        let v = m.mu_primitive(&IntegerMatrix2::t()).unwrap();
        assert!((v.eval(c(1.0, 0.0)).unwrap() - 0.75).norm() < 1e-15);
        assert!(matches!(
            m.mu_primitive(&IntegerMatrix2::from_i64(1, -1, 0, 1)),
            Err(Error::NotInS(_))
        ));
    }

    #[test]
    fn chain_examples() {
        let m = PseudoMeasure::new(eisenstein_family(c(1.0, 0.0)));
        let one = c(1.0, 0.0);
        let inf = Cusp::infinity();
        assert!(m.mu(&inf, &Cusp::zero(), one).unwrap().norm() < 1e-15);
        let left = m.mu(&inf, &cusp(-1, 1), one).unwrap();
        let right = m.mu(&cusp(-1, 1), &Cusp::zero(), one).unwrap();
        assert!((left - 0.75).norm() < 1e-15);
        assert!((right + 0.75).norm() < 1e-15);
        assert_eq!(m.mu(&cusp(-2, 7), &cusp(-2, 7), one).unwrap(), c(0.0, 0.0));
        assert_eq!(m.mu(&cusp(1, 2), &cusp(3, 1), one).unwrap(), c(0.0, 0.0));
        assert_eq!(
            m.mu(&cusp(-1, 3), &cusp(5, 1), one).unwrap(),
            m.mu(&cusp(-1, 3), &Cusp::zero(), one).unwrap()
        );
    }

    #[test]
    fn monotone_and_continued_fraction_chains_agree() {
        let m = PseudoMeasure::new(eisenstein_family(c(0.5, 2.0)));
        let z = c(0.7, 0.4);
        for b in [cusp(-3, 7), cusp(-13, 5), cusp(-1, 9)] {
            let x = m.mu_from_infinity(&b, z).unwrap();
            let y = m.mu_from_infinity_monotone(&b, z).unwrap();
            assert!((x - y).norm() < 1e-12 * x.norm().max(1.0));
        }
    }
}
