//! Lévy 1-forms `l_r(ξ) = Σᵢ r(qᵢ(ξ), qᵢ₊₁(ξ))` over consecutive convergent
//! denominators, the intervals on which a given pair occurs, the integral
//! identity `∫₀^{1/2} l_r = Σ r(p,q)/((p+q)q)`, and the Lévy–Mellin sum
//! built from a pseudo-measure.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64 as C;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::analytic::real_pow;
use crate::brjuno::dyadic_parts;
use crate::error::{Error, Result};
use crate::hecke::{checked_psi, farey_level_sum, hecke_lambdas, HeckeEigenvalue};
use crate::hurwitz::riemann_zeta;
use crate::measure::PseudoMeasure;
use crate::quadrature::{farey_points, integrate_complex_with_breaks, Quadrature};

/// The set of ξ ∈ (0, 1/2] whose denominators contain `(p, q)` as a
/// consecutive pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevyInterval {
    pub p: u64,
    pub q: u64,
    pub lo: BigRational,
    pub hi: BigRational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LevyInterval {
    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }
}

impl fmt::Display for LevyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

fn ratio(p: &BigInt, q: &BigInt) -> BigRational {
    BigRational::new(p.clone(), q.clone())
}

/// The Lévy interval of a coprime pair `0 < p < q`.
///
/// With `q/p = [c₀; c₁, …, c_k]` (last quotient ≥ 2 when k > 0), the
/// pair occurs exactly for `ξ = [0; c_k, …, c₀, ξ′⁻¹]`, ξ′ ∈ [0, 1).
pub fn levy_interval(p: u64, q: u64) -> Result<LevyInterval> {
    if !(0 < p && p < q) || p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!(
            "need coprime 0 < p < q, got ({p}, {q})"
        )));
    }
    let mut quotients = Vec::new();
    let (mut a, mut b) = (q, p);
    while b != 0 {
        quotients.push(a / b);
        (a, b) = (b, a % b);
    }
    quotients.reverse();
    // Convergents of [0; quotients…].
    let (mut p_prev, mut p_cur) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    for &c in &quotients {
        let c = BigInt::from(c);
        let p_next = &c * &p_cur + &p_prev;
        let q_next = &c * &q_cur + &q_prev;
        (p_prev, p_cur) = (p_cur, p_next);
        (q_prev, q_cur) = (q_cur, q_next);
    }
    debug_assert_eq!(q_cur, BigInt::from(q));
    let closed_end = ratio(&p_cur, &q_cur);
    let open_end = ratio(&(&p_cur + &p_prev), &(&q_cur + &q_prev));
    Ok(if closed_end < open_end {
        LevyInterval {
            p,
            q,
            lo: closed_end,
            hi: open_end,
            lo_closed: true,
            hi_closed: false,
        }
    } else {
        LevyInterval {
            p,
            q,
            lo: open_end,
            hi: closed_end,
            lo_closed: false,
            hi_closed: true,
        }
    })
}

/// Consecutive denominators `q₀ = 1, q₁, q₂, …` of a positive rational
/// `num/den < 1`, stopping at the end of the expansion, after `limit`
/// entries, or when a denominator leaves u128. The flag is true when the
/// expansion ended.
pub fn convergent_denominators(num: &BigInt, den: &BigInt, limit: usize) -> (Vec<u128>, bool) {
    let mut out = vec![1u128];
    let (mut prev, mut cur) = (den.clone(), num.clone());
    let (mut q_prev, mut q_cur) = (0u128, 1u128);
    while !cur.is_zero() && out.len() < limit {
        let (a, r) = prev.div_mod_floor(&cur);
        let next = a
            .to_u128()
            .and_then(|a| a.checked_mul(q_cur))
            .and_then(|x| x.checked_add(q_prev));
        let Some(next) = next else { break };
        out.push(next);
        (q_prev, q_cur) = (q_cur, next);
        prev = cur;
        cur = r;
    }
    (out, cur.is_zero())
}

type WeightFn = dyn Fn(u128, u128) -> C + Send + Sync;
type BoundFn = dyn Fn(u128) -> f64 + Send + Sync;

/// A weight `r(p, q)` on pairs of consecutive denominators, with a
/// non-increasing majorant `|r(p, q)| ≤ decay_bound(q)`.
#[derive(Clone)]
pub struct LevyWeight {
    r: Arc<WeightFn>,
    decay_bound: Arc<BoundFn>,
    pub descriptor: String,
}

impl fmt::Debug for LevyWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyWeight")
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl LevyWeight {
    pub fn new<R, B>(descriptor: impl Into<String>, r: R, decay_bound: B) -> Self
    where
        R: Fn(u128, u128) -> C + Send + Sync + 'static,
        B: Fn(u128) -> f64 + Send + Sync + 'static,
    {
        LevyWeight {
            r: Arc::new(r),
            decay_bound: Arc::new(decay_bound),
            descriptor: descriptor.into(),
        }
    }

    /// `r(p, q) = q^{−k}`.
    pub fn power(k: i32) -> Self {
        let f = move |q: u128| (q as f64).powi(-k);
        LevyWeight::new(format!("q^-{k}"), move |_, q| C::new(f(q), 0.0), f)
    }

    pub fn zero() -> Self {
        LevyWeight::new("0", |_, _| C::new(0.0, 0.0), |_| 0.0)
    }

    /// Supported on the single pair `(p, q)`.
    pub fn single(p: u64, q: u64, value: C) -> Self {
        let (p, q) = (p as u128, q as u128);
        let norm = value.norm();
        LevyWeight::new(
            format!("{value} at ({p},{q})"),
            move |a, b| if (a, b) == (p, q) { value } else { C::new(0.0, 0.0) },
            move |b| if b <= q { norm } else { 0.0 },
        )
    }

    pub fn r(&self, p: u128, q: u128) -> C {
        (self.r)(p, q)
    }

    pub fn decay_bound(&self, q: u128) -> f64 {
        (self.decay_bound)(q)
    }

    /// Bound on `Σ_{j≥1} |r(q_{n+j−1}, q_{n+j})|` after a last denominator
    /// `q_n`, using `q_{n+j} ≥ F_{j+1} q_n`.
    fn tail_bound(&self, q_last: u128) -> f64 {
        let (mut f0, mut f1) = (1u128, 1u128);
        let mut total = 0.0;
        for _ in 0..128 {
            let Some(q) = f1.checked_mul(q_last) else { break };
            let b = self.decay_bound(q);
            total += b;
            if b == 0.0 || b < 1e-18 * total {
                break;
            }
            let Some(f2) = f0.checked_add(f1) else { break };
            (f0, f1) = (f1, f2);
        }
        total
    }
}

/// A Lévy 1-form truncated at continued-fraction index `depth`.
#[derive(Clone, Debug)]
pub struct LevyForm {
    pub weight: LevyWeight,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyValue {
    pub value: C,
    pub terms: usize,
    /// Zero when the expansion ended before the depth limit.
    pub tail_bound: f64,
}

fn eval_on_denominators(form: &LevyForm, num: &BigInt, den: &BigInt) -> LevyValue {
    let (qs, ended) = convergent_denominators(num, den, form.depth + 2);
    let mut value = C::new(0.0, 0.0);
    for w in qs.windows(2) {
        value += form.weight.r(w[0], w[1]);
    }
    let terms = qs.len() - 1;
    let tail_bound = if ended {
        0.0
    } else {
        form.weight.tail_bound(*qs.last().unwrap_or(&1))
    };
    LevyValue {
        value,
        terms,
        tail_bound,
    }
}

/// `Σ_{i=0}^{depth} r(qᵢ(ξ), qᵢ₊₁(ξ))` for ξ ∈ (0, 1), with ξ taken as the
/// exact rational stored in the `f64`.
pub fn levy_form_eval(form: &LevyForm, xi: f64) -> Result<LevyValue> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidArgument(format!("need ξ in (0, 1), got {xi}")));
    }
    let (num, den) = dyadic_parts(xi)?;
    Ok(eval_on_denominators(form, &num, &den))
}

pub fn levy_form_eval_rational(form: &LevyForm, xi: &BigRational) -> Result<LevyValue> {
    if !(xi > &BigRational::zero() && xi < &BigRational::one()) {
        return Err(Error::InvalidArgument(format!("need ξ in (0, 1), got {xi}")));
    }
    Ok(eval_on_denominators(form, xi.numer(), xi.denom()))
}

#[derive(Clone, Debug)]
pub struct LevyIdentityReport {
    pub integral: Quadrature,
    /// `Σ_{q≤q_max} Σ_{0<p<q} r(p,q)/((p+q)q)`.
    pub interval_sum: C,
    /// The `(1,1)` term `r(1,1)/2` that a sum over `p ≤ q` would add; it
    /// never occurs for ξ ≤ 1/2.
    pub boundary_term: C,
    pub gap: f64,
    pub q_max: u64,
    pub warnings: Vec<String>,
}

/// Depth used for `l_r` inside the identity check.
const IDENTITY_DEPTH: usize = 80;
/// Largest denominator of the Farey breakpoints handed to the quadrature.
const BREAK_DENOMINATOR: u64 = 24;

/// Compare `∫₀^{1/2} l_r(ξ) dξ` with the interval sum over `q ≤ q_max`.
pub fn levy_identity_check(weight: &LevyWeight, q_max: u64, quad_tol: f64) -> Result<LevyIdentityReport> {
    if q_max < 2 || !(quad_tol > 0.0) {
        return Err(Error::InvalidArgument("need q_max ≥ 2 and a positive tolerance".into()));
    }
    let form = LevyForm {
        weight: weight.clone(),
        depth: IDENTITY_DEPTH,
    };
    let points = farey_points(0.0, 0.5, BREAK_DENOMINATOR);
    let integral = integrate_complex_with_breaks(
        |x| {
            if x > 0.0 {
                levy_form_eval(&form, x).map(|v| v.value).unwrap_or_default()
            } else {
                C::new(0.0, 0.0)
            }
        },
        &points,
        quad_tol,
    );
    let interval_sum: C = (2..=q_max)
        .into_par_iter()
        .map(|q| {
            (1..q)
                .filter(|p| p.gcd(&q) == 1)
                .map(|p| weight.r(p as u128, q as u128) / ((p + q) as f64 * q as f64))
                .sum::<C>()
        })
        .sum();
    let mut warnings = Vec::new();
    // Panels around jumps stop at the width limit; that is harmless while
    // the summed error estimate stays below the tolerance.
    if integral.error > quad_tol {
        warnings.push(format!(
            "quadrature refinement stalled (error estimate {:e})",
            integral.error
        ));
    }
    Ok(LevyIdentityReport {
        gap: (integral.value - interval_sum).norm(),
        integral,
        interval_sum,
        boundary_term: weight.r(1, 1) / 2.0,
        q_max,
        warnings,
    })
}

/// The Lévy–Mellin interval sum at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyMellinValue {
    pub z: C,
    /// `Σ_{2≤q≤Q} q^{−ρ} Σ_{0<p<q} (μ(−∞,−p/q)|ₛ(1,−p;0,q))(z) / ψ(z)`.
    pub interval_sum: C,
    /// The excluded `q = 1` term `(μ(−∞,−1)|ₛ(1,−1;0,1))(z) / ψ(z)`.
    pub boundary_term: C,
    /// Size of the last level included, times `Q/(Re ρ − 2)`.
    pub tail_estimate: f64,
}

/// `Σ_q Σ_p r_u(p,q)/((p+q)q)` with `r_u(p,q) = (p+q) q^{1−ρ} (μ(−∞,−p/q)|ₛ(1,−p;0,q))(z)/ψ(z)`.
pub fn levy_mellin_transform(mu: &PseudoMeasure, rho: C, q_max: u64, z: C) -> Result<LevyMellinValue> {
    if rho.re < 3.0 {
        return Err(Error::InvalidArgument(format!("need Re ρ ≥ 3, got {rho}")));
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("need q_max ≥ 2".into()));
    }
    let psi = checked_psi(mu, z)?;
    let levels: Vec<C> = (1..=q_max)
        .into_par_iter()
        .map(|q| Ok(real_pow(q as f64, -rho) * farey_level_sum(mu, q, z)?))
        .collect::<Result<_>>()?;
    let interval_sum = levels[1..].iter().sum::<C>() / psi;
    let last = levels[levels.len() - 1] / psi;
    Ok(LevyMellinValue {
        z,
        interval_sum,
        boundary_term: levels[0] / psi,
        tail_estimate: last.norm() * q_max as f64 / (rho.re - 2.0),
    })
}

#[derive(Clone, Debug)]
pub struct LevyMellinReport {
    pub rho: C,
    pub q_max: u64,
    pub m_max: u64,
    pub lambdas: Vec<HeckeEigenvalue>,
    /// `ζ(ρ−s)^{−1} ζ(ρ+s)^{−1} Σ_{m≤M} λ_m m^{−ρ}`.
    pub eigen_sum: C,
    pub values: Vec<LevyMellinValue>,
}

impl LevyMellinReport {
    fn mean(&self, f: impl Fn(&LevyMellinValue) -> C) -> C {
        self.values.iter().map(f).sum::<C>() / self.values.len() as f64
    }

    fn spread(&self, f: impl Fn(&LevyMellinValue) -> C + Copy) -> f64 {
        let m = self.mean(f);
        self.values
            .iter()
            .map(|v| (f(v) - m).norm() / m.norm())
            .fold(0.0, f64::max)
    }

    /// Largest relative gap between the interval sum and the eigenvalue sum.
    pub fn max_gap(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (v.interval_sum - self.eigen_sum).norm() / self.eigen_sum.norm())
            .fold(0.0, f64::max)
    }

    /// As [`Self::max_gap`] with the `q = 1` term put back.
    pub fn max_gap_with_boundary(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (v.interval_sum + v.boundary_term - self.eigen_sum).norm() / self.eigen_sum.norm())
            .fold(0.0, f64::max)
    }

    /// Largest relative deviation of the interval sum across the points.
    pub fn z_spread(&self) -> f64 {
        self.spread(|v| v.interval_sum)
    }

    pub fn z_spread_with_boundary(&self) -> f64 {
        self.spread(|v| v.interval_sum + v.boundary_term)
    }
}

/// Evaluate the interval sum at each of `zs` and compare it with the
/// eigenvalue Dirichlet series (eigenvalues estimated on `lambda_points`).
pub fn levy_mellin_check(
    mu: &PseudoMeasure,
    rho: C,
    q_max: u64,
    m_max: u64,
    zs: &[C],
    lambda_points: &[C],
) -> Result<LevyMellinReport> {
    if zs.is_empty() || m_max == 0 {
        return Err(Error::InvalidArgument("need sample points and M ≥ 1".into()));
    }
    let s = mu.s();
    let lambdas = hecke_lambdas(mu, m_max, lambda_points)?;
    let dirichlet: C = lambdas.iter().map(|l| l.lambda * real_pow(l.m as f64, -rho)).sum();
    let eigen_sum = dirichlet / (riemann_zeta(rho - s)? * riemann_zeta(rho + s)?);
    let values = zs
        .iter()
        .map(|&z| levy_mellin_transform(mu, rho, q_max, z))
        .collect::<Result<_>>()?;
    Ok(LevyMellinReport {
        rho,
        q_max,
        m_max,
        lambdas,
        eigen_sum,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::eisenstein_family;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn interval_examples() {
        let i = levy_interval(1, 2).unwrap();
        assert_eq!(
            (i.lo.clone(), i.hi.clone(), i.lo_closed, i.hi_closed),
            (r(1, 3), r(1, 2), false, true)
        );
        assert_eq!(i.length(), r(1, 6));
        let i = levy_interval(1, 3).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone(), i.hi_closed), (r(1, 4), r(1, 3), true));
        let i = levy_interval(2, 3).unwrap();
        assert_eq!(
            (i.lo.clone(), i.hi.clone(), i.lo_closed, i.hi_closed),
            (r(1, 3), r(2, 5), true, false)
        );
        assert_eq!(i.to_string(), "[1/3, 2/5)");
        assert!(levy_interval(2, 4).is_err());
        assert!(levy_interval(3, 3).is_err());
    }

    #[test]
    fn lengths_are_exact() {
        for q in 2..=50u64 {
            for p in (1..q).filter(|p| p.gcd(&q) == 1) {
                let i = levy_interval(p, q).unwrap();
                assert_eq!(i.length(), r(1, ((p + q) * q) as i64), "({p},{q})");
                assert!(i.hi <= r(1, 2));
            }
        }
    }

    #[test]
    fn form_examples() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let form = LevyForm {
            weight: LevyWeight::power(4),
            depth: 30,
        };
        let got = levy_form_eval(&form, g).unwrap();
        let (mut a, mut b) = (1f64, 1f64);
        let mut want = 0.0;
        for _ in 0..=30 {
            want += b.powi(-4);
            (a, b) = (b, a + b);
        }
        assert!((got.value.re - want).abs() < 1e-12, "{} vs {want}", got.value.re);
        assert_eq!(got.terms, 31);
        assert!(got.tail_bound > 0.0 && got.tail_bound < 1e-20);

        let zero = LevyForm {
            weight: LevyWeight::zero(),
            depth: 30,
        };
        assert_eq!(levy_form_eval(&zero, 0.3).unwrap().value, C::new(0.0, 0.0));

        let v = levy_form_eval_rational(&form, &r(2, 5)).unwrap();
        assert_eq!(v.terms, 2);
        assert_eq!(v.tail_bound, 0.0);
        assert!((v.value.re - (2f64.powi(-4) + 5f64.powi(-4))).abs() < 1e-16);
    }

    #[test]
    fn identity_single_pair_and_zero() {
        let one = levy_identity_check(&LevyWeight::single(1, 2, C::new(1.0, 0.0)), 10, 1e-12).unwrap();
        assert!((one.integral.re() - 1.0 / 6.0).abs() < 1e-13);
        assert!((one.interval_sum.re - 1.0 / 6.0).abs() < 1e-15);
        let zero = levy_identity_check(&LevyWeight::zero(), 10, 1e-12).unwrap();
        assert_eq!(zero.gap, 0.0);
    }

    #[test]
    fn identity_for_q_minus_four() {
        let w = LevyWeight::power(4);
        let coarse = levy_identity_check(&w, 100, 1e-8).unwrap();
        let fine = levy_identity_check(&w, 200, 1e-8).unwrap();
        assert!(fine.gap < 1e-6, "gap {}", fine.gap);
        assert!(fine.gap < coarse.gap);
        assert!(fine.warnings.is_empty());
        assert_eq!(fine.boundary_term, C::new(0.5, 0.0));
    }

    #[test]
    fn mellin_boundary_term_is_finite() {
        let mu = PseudoMeasure::new(eisenstein_family(C::new(0.5, 3.0)));
        let v = levy_mellin_transform(&mu, C::new(3.0, 0.0), 4, C::new(1.3, 0.2)).unwrap();
        assert!(v.boundary_term.norm().is_finite() && v.interval_sum.norm().is_finite());
        assert!(levy_mellin_transform(&mu, C::new(2.0, 0.0), 4, C::new(1.3, 0.2)).is_err());
    }
}
