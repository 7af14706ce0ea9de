//! Brjuno sums: the number `b(ξ) = Σ log q_{n+1} / q_n` and the function
//! `B(ξ) = −Σ_{n≥0} β_{n−1} log x_n`, where `x₀ = {ξ}`, `x_{n+1} = {1/x_n}`
//! and `β_n = x₀⋯x_n`. `B` satisfies `B(ξ) = −log ξ + ξ B(1/ξ)` on (0, 1).
//!
//! An `f64` argument is treated as the exact dyadic rational it stores, and
//! its Euclidean remainders are computed exactly, so the functional
//! equation holds to rounding in the logarithms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Numerator and denominator of a positive finite `f64`.
pub fn dyadic_parts(x: f64) -> Result<(BigInt, BigInt)> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "expected a positive finite number, got {x}"
        )));
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let tz = mant.trailing_zeros() as i64;
    let (mant, e) = (mant >> tz, e + tz);
    if e >= 0 {
        Ok((BigInt::from(mant) << e as usize, BigInt::one()))
    } else {
        Ok((BigInt::from(mant), BigInt::one() << (-e) as usize))
    }
}

trait Remainder: Integer + Clone {
    fn ln(&self) -> f64;
    /// `self / den` for `self ≤ den`.
    fn ratio(&self, den: &Self) -> f64 {
        (self.ln() - den.ln()).exp()
    }
}

impl Remainder for u64 {
    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }

    fn ratio(&self, den: &Self) -> f64 {
        *self as f64 / *den as f64
    }
}

impl Remainder for u128 {
    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }

    fn ratio(&self, den: &Self) -> f64 {
        *self as f64 / *den as f64
    }
}

impl Remainder for BigInt {
    fn ln(&self) -> f64 {
        let bits = self.bits();
        if bits < 1000 {
            self.to_f64().unwrap_or(f64::INFINITY).ln()
        } else {
            let shift = bits - 64;
            (self >> shift as usize).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// A truncated Brjuno-type sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrjunoSum {
    pub value: f64,
    /// Magnitude of the last term included.
    pub last_term: f64,
    pub terms: usize,
    /// True if the depth limit stopped the sum before the expansion ended.
    pub truncated: bool,
}

/// `B(r₀/r₋₁)` for `0 < r₀ < r₋₁` from the remainder sequence.
fn big_b_from_remainders<T: Remainder>(num: T, den: T, depth: usize) -> BrjunoSum {
    let ln_q = den.ln();
    let q = den.clone();
    let (mut prev, mut cur) = (den, num);
    let mut value = 0.0;
    let mut last_term = 0.0;
    let mut terms = 0;
    let mut lp = ln_q;
    while !cur.is_zero() {
        if terms == depth {
            return BrjunoSum {
                value,
                last_term,
                terms,
                truncated: true,
            };
        }
        let lc = cur.ln();
        let term = prev.ratio(&q) * (lp - lc);
        lp = lc;
        value += term;
        last_term = term;
        terms += 1;
        let next = prev.mod_floor(&cur);
        prev = cur;
        cur = next;
    }
    BrjunoSum {
        value,
        last_term,
        terms,
        truncated: false,
    }
}

fn reduce_mod_one(num: BigInt, den: BigInt) -> Result<(BigInt, BigInt)> {
    let r = num.mod_floor(&den);
    if r.is_zero() {
        return Err(Error::InvalidArgument("B is not defined at integers".into()));
    }
    Ok((r, den))
}

fn big_b_exact(num: BigInt, den: BigInt, depth: usize) -> Result<BrjunoSum> {
    let (num, den) = reduce_mod_one(num, den)?;
    if den.bits() <= 64 {
        let n = num.to_u64().expect("fits");
        let d = den.to_u64().expect("fits");
        Ok(big_b_from_remainders(n, d, depth))
    } else if den.bits() <= 127 {
        let n = num.to_u128().expect("fits");
        let d = den.to_u128().expect("fits");
        Ok(big_b_from_remainders(n, d, depth))
    } else {
        Ok(big_b_from_remainders(num, den, depth))
    }
}

/// `B(ξ)` for a real ξ ∉ Z, reduced mod 1.
pub fn brjuno_big_b(xi: f64, depth: usize) -> Result<BrjunoSum> {
    if !xi.is_finite() || xi == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "B needs a finite non-integer argument, got {xi}"
        )));
    }
    // Fast path: {ξ} is exact in f64 and its denominator often fits in u64.
    if xi.abs() < 4503599627370496.0 {
        let frac = xi - xi.floor();
        if frac == 0.0 {
            return Err(Error::InvalidArgument("B is not defined at integers".into()));
        }
        let bits = frac.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let tz = mant.trailing_zeros() as i64;
        let shift = 1075 - exp - tz;
        if exp > 0 && shift < 64 {
            return Ok(big_b_from_remainders(mant >> tz, 1u64 << shift, depth));
        }
    }
    let (num, den) = signed_parts(xi)?;
    big_b_exact(num, den, depth)
}

fn signed_parts(x: f64) -> Result<(BigInt, BigInt)> {
    let (n, d) = dyadic_parts(x.abs())?;
    Ok((if x < 0.0 { -n } else { n }, d))
}

/// `B` at an exact rational.
pub fn brjuno_big_b_rational(x: &BigRational, depth: usize) -> Result<BrjunoSum> {
    big_b_exact(x.numer().clone(), x.denom().clone(), depth)
}

/// `b` from the partial quotients `a₁, a₂, …` of ξ ∈ (0, 1), accumulated in
/// the log domain: `Σ_{n=0}^{depth} log q_{n+1} / q_n`.
pub fn brjuno_b_from_quotients(quotients: &[f64], depth: usize) -> Result<BrjunoSum> {
    if quotients.iter().any(|&a| !(a >= 1.0)) {
        return Err(Error::InvalidArgument("partial quotients must be ≥ 1".into()));
    }
    // log q_n and the ratio q_{n−1}/q_n ∈ [0, 1].
    let mut ln_q = 0.0f64;
    let mut ratio = 0.0f64;
    let mut value = 0.0;
    let mut last_term = 0.0;
    let mut terms = 0;
    for &a in quotients {
        if terms > depth {
            return Ok(BrjunoSum {
                value,
                last_term,
                terms,
                truncated: true,
            });
        }
        let step = a + ratio;
        let ln_next = ln_q + step.ln();
        let term = ln_next * (-ln_q).exp();
        value += term;
        last_term = term;
        terms += 1;
        ratio = 1.0 / step;
        ln_q = ln_next;
    }
    Ok(BrjunoSum {
        value,
        last_term,
        terms,
        truncated: false,
    })
}

fn quotients_exact(num: BigInt, den: BigInt, limit: usize) -> Vec<f64> {
    let (mut prev, mut cur) = (den, num);
    let mut out = Vec::new();
    while !cur.is_zero() && out.len() < limit {
        let (q, r) = prev.div_mod_floor(&cur);
        out.push(q.to_f64().unwrap_or(f64::INFINITY));
        prev = cur;
        cur = r;
    }
    out
}

/// `b(ξ)` for ξ ∈ (0, 1) given as an `f64`.
pub fn brjuno_b(xi: f64, depth: usize) -> Result<BrjunoSum> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::NotInUnitInterval(xi.to_string()));
    }
    let (num, den) = dyadic_parts(xi)?;
    brjuno_b_from_quotients(&quotients_exact(num, den, depth + 2), depth)
}

/// `b` at an exact rational in (0, 1).
pub fn brjuno_b_rational(x: &BigRational, depth: usize) -> Result<BrjunoSum> {
    if !(x.is_positive() && x.numer() < x.denom()) {
        return Err(Error::NotInUnitInterval(x.to_string()));
    }
    brjuno_b_from_quotients(&quotients_exact(x.numer().clone(), x.denom().clone(), depth + 2), depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn dyadic_parts_are_exact() {
        let (n, d) = dyadic_parts(0.375).unwrap();
        assert_eq!((n, d), (BigInt::from(3), BigInt::from(8)));
        let (n, d) = dyadic_parts(6.0).unwrap();
        assert_eq!((n, d), (BigInt::from(6), BigInt::from(1)));
        let (n, d) = dyadic_parts(f64::MIN_POSITIVE / 4.0).unwrap();
        assert_eq!(n, BigInt::one());
        assert_eq!(d, BigInt::one() << 1024usize);
    }

    #[test]
    fn golden_fixed_point() {
        let g = golden();
        let want = -g.ln() / (1.0 - g);
        // F₈₀/F₈₁ agrees with the golden ratio far beyond f64 precision.
        let (mut a, mut b) = (BigInt::one(), BigInt::one());
        for _ in 0..79 {
            let c = &a + &b;
            a = b;
            b = c;
        }
        let r = BigRational::new(a, b);
        let exact = brjuno_big_b_rational(&r, 200).unwrap().value;
        assert!((exact - want).abs() < 1e-12, "{exact} vs {want}");
        // The stored f64 is a nearby dyadic rational, off by ~1e−8 in B.
        let got = brjuno_big_b(g, 200).unwrap().value;
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        assert!((got - 1.259_829_6).abs() < 1e-6);
    }

    #[test]
    fn periodicity_is_exact() {
        // Shifts that are exact in f64.
        for x in [0.375, 0.125, 0.703125] {
            let a = brjuno_big_b(x, 200).unwrap().value;
            assert_eq!(a, brjuno_big_b(x + 3.0, 200).unwrap().value);
            assert_eq!(a, brjuno_big_b(x - 2.0, 200).unwrap().value);
        }
        let r = BigRational::new(BigInt::from(7), BigInt::from(19));
        let shifted = &r + BigRational::from_integer(BigInt::from(5));
        assert_eq!(
            brjuno_big_b_rational(&r, 200).unwrap().value,
            brjuno_big_b_rational(&shifted, 200).unwrap().value
        );
        assert!(brjuno_big_b(2.0, 10).is_err());
    }

    #[test]
    fn functional_equation_on_rationals() {
        // B(p/q) = −log(p/q) + (p/q) B(q/p).
        for (p, q) in [(3i64, 7i64), (13, 21), (2, 5), (99, 100)] {
            let x = BigRational::new(BigInt::from(p), BigInt::from(q));
            let inv = BigRational::new(BigInt::from(q), BigInt::from(p));
            let lhs = brjuno_big_b_rational(&x, 200).unwrap().value;
            let rhs =
                -(p as f64 / q as f64).ln() + (p as f64 / q as f64) * brjuno_big_b_rational(&inv, 200).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn fast_path_matches_exact_rational() {
        for x in [0.3, 0.999_999, 1e-3, 7.25, -2.1, 1e-300, 123456.789] {
            let (n, d) = signed_parts(x).unwrap();
            let exact = brjuno_big_b_rational(&BigRational::new(n, d), 400).unwrap();
            assert_eq!(brjuno_big_b(x, 400).unwrap(), exact, "{x}");
        }
    }

    #[test]
    fn small_b_examples() {
        let half = brjuno_b(0.5, 10).unwrap();
        assert!((half.value - 2f64.ln()).abs() < 1e-15 && !half.truncated);
        // Liouville-type quotients 10^(n!) stay finite in the log domain.
        let big: Vec<f64> = [1.0, 2.0, 6.0, 24.0, 120.0]
            .iter()
            .map(|&k: &f64| 10f64.powf(k))
            .collect();
        let v = brjuno_b_from_quotients(&big, 10).unwrap();
        assert!(v.value.is_finite() && v.value > 2.0);
    }
}
