//! Integer-weight oracle: the discriminant form Δ, its completed Mellin
//! transform, period polynomial and modular symbols, and the Brjuno-function
//! rewriting of `L′`.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64 as C;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::analytic::real_pow;
use crate::brjuno::brjuno_big_b;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_complex, integrate_global, Quadrature};
use crate::rational::{primitive_chain_to, Cusp, IntegerMatrix2};
use crate::transfer::{nodal_transfer_operator, Barycentric};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A cusp form of weight `2k` given by its integer Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCuspForm {
    pub weight: u32,
    /// `a₁, …, a_N`.
    pub coefficients: Vec<BigInt>,
    values: Vec<f64>,
}

impl FourierCuspForm {
    pub fn new(weight: u32, coefficients: Vec<BigInt>) -> Result<Self> {
        if weight < 2 || weight % 2 == 1 || coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "need an even weight ≥ 2 and at least one coefficient".into(),
            ));
        }
        let values = coefficients.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(FourierCuspForm {
            weight,
            coefficients,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `a_n` for `1 ≤ n ≤ N`.
    pub fn coefficient(&self, n: usize) -> &BigInt {
        &self.coefficients[n - 1]
    }

    fn half_weight(&self) -> i32 {
        (self.weight / 2) as i32
    }
}

/// `τ(1..=n)` from `q Π(1−qⁿ)²⁴`, expanded with exact integers.
pub fn delta_coefficients(n: usize) -> Result<FourierCuspForm> {
    if n == 0 {
        return Err(Error::InvalidArgument("need N ≥ 1".into()));
    }
    // f holds Π(1−qᵐ)²⁴ mod q^n; τ(j+1) is the coefficient of q^j.
    let mut f = vec![BigInt::zero(); n];
    f[0] = BigInt::from(1);
    for m in 1..n {
        for _ in 0..24 {
            for i in (m..n).rev() {
                let (lo, hi) = f.split_at_mut(i);
                hi[0] -= &lo[i - m];
            }
        }
    }
    FourierCuspForm::new(12, f)
}

/// The same coefficients from `j f_j = −24 Σ_{k=1}^{j} σ(k) f_{j−k}`.
pub fn delta_coefficients_by_convolution(n: usize) -> Result<FourierCuspForm> {
    if n == 0 {
        return Err(Error::InvalidArgument("need N ≥ 1".into()));
    }
    let sigma: Vec<BigInt> = (0..n as u64)
        .map(|k| BigInt::from(if k == 0 { 0 } else { divisor_sum(k, 1) }))
        .collect();
    let mut f = vec![BigInt::zero(); n];
    f[0] = BigInt::from(1);
    for j in 1..n {
        let mut acc = BigInt::zero();
        for k in 1..=j {
            acc += &sigma[k] * &f[j - k];
        }
        let (q, r) = (acc * BigInt::from(-24)).div_rem(&BigInt::from(j));
        debug_assert!(r.is_zero());
        f[j] = q;
    }
    FourierCuspForm::new(12, f)
}

/// `σ_e(n) = Σ_{d|n} dᵉ` in u64 arithmetic.
pub fn divisor_sum(n: u64, e: u32) -> u64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d.pow(e)).sum()
}

/// `σ_e(n)` as a big integer.
pub fn divisor_sum_big(n: u64, e: u32) -> BigInt {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d).pow(e))
        .sum()
}

/// Bound on the omitted Fourier tail `Σ_{n>N} |a_n| e^{−2πny}` using
/// `|a_n| ≤ 2√n·n^{(2k−1)/2}`.
fn tail_bound(form: &FourierCuspForm, y: f64) -> f64 {
    let n = form.len() as f64 + 1.0;
    let k = form.half_weight() as f64;
    let x = (-2.0 * PI * y).exp();
    let growth = x * ((n + 1.0) / n).powf(k);
    if growth >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * n.powf(k) * x.powf(n) / (1.0 - growth)
}

/// `u(iy) = Σ a_n e^{−2πny}` by direct summation. Fails when the omitted
/// tail could exceed 1e−16; use [`u_iy`] for small `y`.
pub fn evaluate_u(form: &FourierCuspForm, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("need y > 0, got {y}")));
    }
    let tail = tail_bound(form, y);
    if tail > 1e-16 {
        return Err(Error::InvalidArgument(format!(
            "Fourier tail bound {tail:e} at y = {y} with N = {}; use the modular reflection",
            form.len()
        )));
    }
    Ok(direct_sum(form, y))
}

fn direct_sum(form: &FourierCuspForm, y: f64) -> f64 {
    let x = (-2.0 * PI * y).exp();
    // Terms beyond this index are below 1e−17 of the first, even with
    // polynomial coefficient growth.
    let k = form.half_weight() as f64;
    let cutoff = 2.0 + (40.0 + k * (form.len() as f64).ln()) / (2.0 * PI * y);
    let n = (cutoff.min(form.len() as f64)) as usize;
    // Horner in x.
    form.values[..n].iter().rev().fold(0.0, |acc, &a| (acc + a) * x)
}

/// `u(iy)` for any `y > 0`, reflecting `u(iy) = (−1)ᵏ y^{−2k} u(i/y)` when
/// `y < 1`.
pub fn u_iy(form: &FourierCuspForm, y: f64) -> f64 {
    if y >= 1.0 {
        direct_sum(form, y)
    } else if y > 0.0 {
        let k = form.half_weight();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * y.powi(-2 * k) * direct_sum(form, 1.0 / y)
    } else {
        0.0
    }
}

fn upper_cutoff(re_rho: f64) -> f64 {
    // u(iy) ~ e^{−2πy}; this leaves less than 1e−25 of the integral.
    16.0 + re_rho.max(0.0)
}

/// `Λ(ρ) = ∫₀^∞ u(iy) y^{ρ−1} dy`, integrated separately over (0, 1]
/// (reflected values) and [1, ∞).
pub fn completed_mellin(form: &FourierCuspForm, rho: C, tol: f64) -> Quadrature {
    let f = |y: f64| {
        if y > 0.0 {
            u_iy(form, y) * real_pow(y, rho - 1.0)
        } else {
            C::new(0.0, 0.0)
        }
    };
    let lower = integrate_complex(f, 0.0, 1.0, 0.5 * tol);
    let upper = integrate_complex(f, 1.0, upper_cutoff(rho.re), 0.5 * tol);
    combine(lower, upper)
}

/// `Λ′(ρ) = ∫₁^∞ u(iy) log y (y^{ρ−1} − (−1)ᵏ y^{2k−1−ρ}) dy`.
pub fn completed_mellin_derivative(form: &FourierCuspForm, rho: f64, tol: f64) -> Quadrature {
    let k = form.half_weight();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let two_k = form.weight as f64;
    integrate(
        |y| u_iy(form, y) * y.ln() * (y.powf(rho - 1.0) - sign * y.powf(two_k - 1.0 - rho)),
        1.0,
        upper_cutoff(rho),
        tol,
    )
}

fn combine(a: Quadrature, b: Quadrature) -> Quadrature {
    Quadrature {
        value: a.value + b.value,
        error: a.error + b.error,
        evaluations: a.evaluations + b.evaluations,
        converged: a.converged && b.converged,
    }
}

/// A polynomial with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<C>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C>) -> Self {
        Polynomial { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Polynomial {
            coeffs: vec![C::new(0.0, 0.0); len],
        }
    }

    /// Largest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C::new(0.0, 0.0))
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn mul_linear_power(base: &[C], a: f64, b: f64, e: usize) -> Vec<C> {
        // base · (a z + b)^e
        let mut out = base.to_vec();
        for _ in 0..e {
            let mut next = vec![C::new(0.0, 0.0); out.len() + 1];
            for (i, &c) in out.iter().enumerate() {
                next[i] += c * b;
                next[i + 1] += c * a;
            }
            out = next;
        }
        out
    }

    /// `(cz+d)^w P((az+b)/(cz+d))` for `deg P ≤ w`, as a polynomial.
    pub fn slash(&self, g: &IntegerMatrix2, w: usize) -> Result<Polynomial> {
        if self.degree().is_some_and(|d| d > w) {
            return Err(Error::InvalidArgument(format!("degree exceeds the slash weight {w}")));
        }
        let [a, b, c, d] = g.to_f64();
        let mut out = vec![C::new(0.0, 0.0); w + 1];
        for (j, &p) in self.coeffs.iter().enumerate().take(w + 1) {
            if p == C::new(0.0, 0.0) {
                continue;
            }
            let t = Polynomial::mul_linear_power(&[p], a, b, j);
            let t = Polynomial::mul_linear_power(&t, c, d, w - j);
            for (slot, v) in out.iter_mut().zip(t) {
                *slot += v;
            }
        }
        Ok(Polynomial { coeffs: out })
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Polynomial {
            coeffs: (0..n).map(|i| get(self, i) + get(rhs, i)).collect(),
        }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

/// The period polynomial `r(z) = ∫₀^{i∞} u(τ)(z−τ)^{w} dτ` and the moments
/// `M_j = Λ(j+1)` it was assembled from.
#[derive(Clone, Debug)]
pub struct PeriodPolynomial {
    pub polynomial: Polynomial,
    pub moments: Vec<f64>,
    /// Sum of the quadrature error estimates.
    pub error: f64,
}

impl PeriodPolynomial {
    pub fn w(&self) -> usize {
        self.moments.len() - 1
    }

    /// `s = 1 − k = −w/2`.
    pub fn s(&self) -> f64 {
        -(self.w() as f64) / 2.0
    }

    /// `r(z) − r(z+1) − (z+1)^{w} r(z/(z+1))`.
    pub fn three_term(&self, z: C) -> C {
        let p = &self.polynomial;
        let z1 = z + 1.0;
        p.eval(z) - p.eval(z1) - z1.powi(self.w() as i32) * p.eval(z / z1)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `r(z) = Σ_j C(w,j) (−i)^j · i · M_j · z^{w−j}` with `M_j = ∫₀^∞ u(iy) y^j dy`.
pub fn period_polynomial(form: &FourierCuspForm, tol: f64) -> Result<PeriodPolynomial> {
    let w = form.weight as usize - 2;
    let mut moments = Vec::with_capacity(w + 1);
    let mut error = 0.0;
    for j in 0..=w {
        let q = completed_mellin(form, C::new(j as f64 + 1.0, 0.0), tol);
        if !q.converged || q.error > tol {
            return Err(Error::InvalidArgument(format!(
                "moment {j}: quadrature error {:e} above {tol:e}",
                q.error
            )));
        }
        moments.push(q.re());
        error += q.error;
    }
    let i = C::new(0.0, 1.0);
    let mut coeffs = vec![C::new(0.0, 0.0); w + 1];
    for (j, &m) in moments.iter().enumerate() {
        coeffs[w - j] = binomial(w, j) * (-i).powi(j as i32) * i * m;
    }
    Ok(PeriodPolynomial {
        polynomial: Polynomial::new(coeffs),
        moments,
        error,
    })
}

/// Modular symbols `{α, β}` valued in polynomials of degree ≤ w, built by
/// slashing the period polynomial along primitive chains.
#[derive(Clone, Debug)]
pub struct ClassicalSymbols {
    pub period: Polynomial,
    pub w: usize,
}

fn clamp(x: &Cusp) -> Cusp {
    if !x.is_infinite() && x.p().is_positive() {
        Cusp::zero()
    } else {
        x.clone()
    }
}

impl ClassicalSymbols {
    pub fn new(period: &PeriodPolynomial) -> Self {
        ClassicalSymbols {
            period: period.polynomial.clone(),
            w: period.w(),
        }
    }

    fn symbol_from_infinity(&self, beta: &Cusp) -> Result<Polynomial> {
        let chain = primitive_chain_to(&clamp(beta))?;
        let mut total = Polynomial::zero(self.w + 1);
        for step in &chain.steps {
            let term = self.period.slash(&step.matrix, self.w)?;
            total = if step.sign > 0 { &total + &term } else { &total - &term };
        }
        Ok(total)
    }

    /// `{α, β}` for cusps in [−∞, 0]; positive cusps are moved to 0.
    pub fn symbol(&self, alpha: &Cusp, beta: &Cusp) -> Result<Polynomial> {
        Ok(&self.symbol_from_infinity(beta)? - &self.symbol_from_infinity(alpha)?)
    }
}

pub fn classical_symbol(period: &PeriodPolynomial, alpha: &Cusp, beta: &Cusp) -> Result<Polynomial> {
    ClassicalSymbols::new(period).symbol(alpha, beta)
}

/// `−Σ_{n≤N} a_n log n · n^{−ρ}`.
pub fn l_derivative_series(form: &FourierCuspForm, rho: f64) -> f64 {
    form.values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| {
            let n = (i + 1) as f64;
            -a * n.ln() * n.powf(-rho)
        })
        .sum()
}

/// `L′(ρ)` at a positive integer ρ from `Λ(ρ) = (2π)^{−ρ} Γ(ρ) L(ρ)`.
pub fn l_derivative_from_mellin(form: &FourierCuspForm, rho: u32, tol: f64) -> Result<(f64, f64)> {
    if rho == 0 {
        return Err(Error::InvalidArgument("need ρ ≥ 1".into()));
    }
    let lam = completed_mellin(form, C::new(rho as f64, 0.0), tol);
    let dlam = completed_mellin_derivative(form, rho as f64, tol);
    let gamma: f64 = (1..rho).map(|k| k as f64).product();
    let digamma = (1..rho).map(|k| 1.0 / k as f64).sum::<f64>() - EULER_GAMMA;
    let scale = (2.0 * PI).powi(rho as i32) / gamma;
    let value = scale * (dlam.re() + lam.re() * ((2.0 * PI).ln() - digamma));
    Ok((value, scale * (dlam.error + lam.error * 3.0)))
}

/// Measurements around the Brjuno-function formula for `L′(w/2 + 2)`.
///
/// Integrals containing `B` are computed twice: by adaptive quadrature
/// (breakpoints at small-denominator rationals) and by integrating the
/// defining series of `B` term by term, which is accurate to rounding.
#[derive(Clone, Debug)]
pub struct GoldfeldBrjunoReport {
    pub w: u32,
    /// `∫₀^∞ u(iy) y^{w/2} log y dy`.
    pub d_log: f64,
    /// `−∫₀¹ u(iy) y^{w/2} B(y) dy` (quadrature, extrapolated in the
    /// breakpoint denominator).
    pub d_b_lower: f64,
    /// `∫₁^∞ u(iy) y^{w/2−1} B(y) dy` (quadrature).
    pub d_b_upper: f64,
    /// Sum of the two values above.
    pub d_b_quadrature: f64,
    /// The same two integrals from the term-wise series.
    pub d_b_lower_series: f64,
    pub d_b_upper_series: f64,
    /// `D_B` from the series; used for the constant.
    pub d_b: f64,
    /// `∫₀¹ u(iy) y^{w/2+1} B(1/y) dy` (quadrature).
    pub reflection_lhs: f64,
    /// `i^{w+2} ∫₁^∞ u(iv) v^{w/2−1} B(v) dv` (quadrature).
    pub reflection_rhs: f64,
    pub reflection_gap: f64,
    /// The same gap from the finer quadrature alone, without extrapolation.
    pub reflection_gap_raw: f64,
    /// `∫₀¹ u y^{w/2} log y`, `∫₀¹ u y^{w/2} B(y)`, `∫₀¹ u y^{w/2+1} B({1/y})`
    /// (the last two by quadrature).
    pub ingredient_terms: [f64; 3],
    /// `|t₀ + t₁ − t₂| / max |tᵢ|`.
    pub ingredient_gap: f64,
    pub ingredient_gap_raw: f64,
    /// `||D_log| − |(1 + i^{w+2}) D_B||`, relative to the larger.
    pub dlog_vs_db_gap: f64,
    /// `L′(w/2+2)` from the completed Mellin transform.
    pub l_prime: f64,
    pub l_prime_error: f64,
    /// Partial Dirichlet series for `L′(w/2+2)` and its length.
    pub l_prime_series: f64,
    pub series_terms: usize,
    /// `(2π)^{(w+4)/2} / Γ((w+2)/2) · (1 + i^{w+2})`.
    pub printed_constant: f64,
    /// `L′(w/2+2) / D_B`.
    pub measured_constant: f64,
    /// Summed change of the three `B` integrals between the two
    /// breakpoint sets, a scale for the extrapolation error.
    pub extrapolation_shift: f64,
    /// Summed error estimates of the finer quadratures containing `B`.
    pub quadrature_error: f64,
    pub evaluations: usize,
}

/// Accuracy settings for [`goldfeld_brjuno_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldfeldOptions {
    /// Tolerance for the smooth integrals.
    pub tol: f64,
    /// Largest breakpoint denominator of the coarse pass; the fine pass
    /// doubles it.
    pub break_denominator: u64,
    /// Integrand calls allowed beyond the first pass over the breakpoints.
    pub refine_evals: usize,
    /// Chebyshev nodes for the series route.
    pub series_nodes: usize,
}

impl Default for GoldfeldOptions {
    fn default() -> Self {
        GoldfeldOptions {
            tol: 1e-13,
            break_denominator: 2000,
            refine_evals: 1_000_000,
            series_nodes: 40,
        }
    }
}

/// Breakpoints for integrands containing `B` on `[lo, hi]`: rationals
/// Breakpoints for `∫ env(y) B(y) dy` on `[lo, hi]`: every `n + p/q` with
/// `q ≤ q_max · env(n + p/q) / max env`. `B` has a log spike of height
/// about `1/q` at `p/q`, so this spends breakpoints where the spikes weigh
/// most. `env` should be unimodal.
fn brjuno_breaks(lo: f64, hi: f64, q_max: u64, env: &dyn Fn(f64) -> f64) -> Vec<f64> {
    const GRID: usize = 20_000;
    let xs: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let es: Vec<f64> = xs.iter().map(|&x| env(x).abs()).collect();
    let top = es.iter().cloned().fold(0.0, f64::max);
    let mut pts = vec![lo, hi];
    if top == 0.0 {
        return pts;
    }
    let step = (hi - lo) / GRID as f64;
    for q in 1..=q_max {
        let level = top * q as f64 / q_max as f64;
        let (Some(first), Some(last)) = (
            es.iter().position(|&e| e >= level),
            es.iter().rposition(|&e| e >= level),
        ) else {
            break;
        };
        let (x0, x1) = ((xs[first] - step).max(lo), (xs[last] + step).min(hi));
        let qf = q as f64;
        for k in (x0 * qf).ceil() as i64..=(x1 * qf).floor() as i64 {
            if k.gcd(&(q as i64)) == 1 {
                let x = k as f64 / qf;
                if x > lo && x < hi && env(x).abs() >= level {
                    pts.push(x);
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫₀¹ F(t) B(t) dt` for `F` analytic near [0, 1], by integrating the
/// defining series of `B` term by term: the n-th term contributes
/// `∫₀¹ (Lⁿ F)(t)(−log t) dt` with `(LF)(t) = Σ_m (m+t)^{−3} F(1/(m+t))`,
/// the weighted Gauss transfer operator (discretized on `n` Chebyshev
/// nodes).
pub fn brjuno_series_integral<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<f64> {
    let op = nodal_transfer_operator(C::new(1.5, 0.0), n)?;
    let bary = Barycentric::new(n);
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            integrate(
                |t| if t > 0.0 { -t.ln() * bary.basis(t)[j] } else { 0.0 },
                0.0,
                1.0,
                1e-16,
            )
            .re()
        })
        .collect();
    let mut v = nalgebra::DVector::<C>::from_iterator(n, bary.nodes().iter().map(|&t| C::new(f(t), 0.0)));
    let mut total = 0.0;
    for _ in 0..400 {
        let term: f64 = weights.iter().zip(v.iter()).map(|(w, x)| w * x.re).sum();
        total += term;
        if term.abs() <= 1e-17 * total.abs() {
            return Ok(total);
        }
        v = &op.matrix * v;
    }
    Err(Error::InvalidArgument("transfer series did not converge".into()))
}

fn b_of(y: f64) -> f64 {
    brjuno_big_b(y, 400).map(|b| b.value).unwrap_or(0.0)
}

/// Compute the pieces of the Brjuno rewriting of `∫ u(iy) y^{w/2} log y dy`
/// and compare the result with `L′(w/2+2)`.
pub fn goldfeld_brjuno_check(form: &FourierCuspForm, opts: &GoldfeldOptions) -> Result<GoldfeldBrjunoReport> {
    let tol = opts.tol;
    let w = form.weight - 2;
    let h = (w / 2) as i32;
    let k = form.half_weight();
    let i_pow = if k % 2 == 0 { 1.0 } else { -1.0 };
    let top = upper_cutoff(h as f64 + 2.0);
    let u = |y: f64| u_iy(form, y);
    // u underflows to 0 near y = 0; skip B there.
    let weighted = |y: f64, g: &dyn Fn(f64) -> f64| {
        let uy = if y > 0.0 { u(y) } else { 0.0 };
        if uy == 0.0 {
            0.0
        } else {
            uy * g(y)
        }
    };

    let d_log_lower = integrate(|y| weighted(y, &|y| y.powi(h) * y.ln()), 0.0, 1.0, tol);
    let d_log_upper = integrate(|y| weighted(y, &|y| y.powi(h) * y.ln()), 1.0, top, tol);
    let d_log = d_log_lower.re() + d_log_upper.re();

    let env_lower = |y: f64| weighted(y, &|y| y.powi(h));
    let env_upper = |v: f64| weighted(v, &|v| v.powi(h - 1));
    let lower_f = |y: f64| weighted(y, &|y| y.powi(h) * b_of(y));
    let upper_f = |y: f64| weighted(y, &|y| y.powi(h - 1) * b_of(y));
    let refl_f = |y: f64| weighted(y, &|y| y.powi(h + 1) * b_of(1.0 / y));
    let run = |q_max: u64| -> [Quadrature; 3] {
        let upper_breaks = brjuno_breaks(1.0, top, q_max, &env_upper);
        // The reflection integrand is the upper one after v = 1/y.
        let mut refl_breaks: Vec<f64> = upper_breaks.iter().map(|v| 1.0 / v).chain([0.0]).collect();
        refl_breaks.sort_by(f64::total_cmp);
        let global = |g: &(dyn Fn(f64) -> f64 + Sync), pts: &[f64]| {
            integrate_global(g, pts, 0.0, 15 * pts.len() + opts.refine_evals)
        };
        let (lower, (upper, refl)) = rayon::join(
            || global(&lower_f, &brjuno_breaks(0.0, 1.0, q_max, &env_lower)),
            || rayon::join(|| global(&upper_f, &upper_breaks), || global(&refl_f, &refl_breaks)),
        );
        [lower, upper, refl]
    };
    // Spikes of B at rationals beyond the breakpoints are invisible to the
    // error estimate and leave an error close to c/q_max; extrapolate it away.
    let coarse = run(opts.break_denominator);
    let fine = run(2 * opts.break_denominator);
    let extrapolate = |j: usize| 2.0 * fine[j].re() - coarse[j].re();
    let (b_lower, b_upper, refl) = (extrapolate(0), extrapolate(1), extrapolate(2));
    let gaps = |lower: f64, upper: f64, refl: f64| {
        let rhs = i_pow * upper;
        let reflection = (refl - rhs).abs() / refl.abs().max(rhs.abs());
        let terms = [d_log_lower.re(), lower, refl];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (reflection, (terms[0] + terms[1] - terms[2]).abs() / scale)
    };
    let (reflection_gap, ingredient_gap) = gaps(b_lower, b_upper, refl);
    let (reflection_gap_raw, ingredient_gap_raw) = gaps(fine[0].re(), fine[1].re(), fine[2].re());

    // Series route: ∫₁^∞ g(v) B(v) dv = ∫₀¹ Σ_m g(m+t) B(t) dt by periodicity,
    // and ∫₀¹ f B = ∫₀¹ f·(−log) + ∫₀¹ (Lf) B from the first term of the series.
    let terms = (top.ceil() as usize).max(2);
    let periodized = |t: f64| {
        (1..terms)
            .map(|m| weighted(m as f64 + t, &|v| v.powi(h - 1)))
            .sum::<f64>()
    };
    let lf = |t: f64| {
        (1..200)
            .map(|m| {
                let x = 1.0 / (m as f64 + t);
                x.powi(3) * weighted(x, &|y| y.powi(h))
            })
            .sum::<f64>()
    };
    let upper_series = brjuno_series_integral(periodized, opts.series_nodes)?;
    let lower_series = -d_log_lower.re() + brjuno_series_integral(lf, opts.series_nodes)?;
    let d_b = -lower_series + upper_series;

    let reflection_rhs = i_pow * b_upper;
    let two_db = ((1.0 + i_pow) * d_b).abs();
    let dlog_vs_db_gap = (d_log.abs() - two_db).abs() / d_log.abs().max(two_db);

    let rho = h as u32 + 2;
    let (l_prime, l_prime_error) = l_derivative_from_mellin(form, rho, tol)?;
    let gamma: f64 = (1..=h).map(|j| j as f64).product();
    let printed_constant = (2.0 * PI).powf((w as f64 + 4.0) / 2.0) / gamma * (1.0 + i_pow);
    Ok(GoldfeldBrjunoReport {
        w,
        d_log,
        d_b_lower: -b_lower,
        d_b_upper: b_upper,
        d_b_quadrature: -b_lower + b_upper,
        d_b_lower_series: -lower_series,
        d_b_upper_series: upper_series,
        d_b,
        reflection_lhs: refl,
        reflection_rhs,
        reflection_gap,
        reflection_gap_raw,
        ingredient_terms: [d_log_lower.re(), b_lower, refl],
        ingredient_gap,
        ingredient_gap_raw,
        dlog_vs_db_gap,
        l_prime,
        l_prime_error,
        l_prime_series: l_derivative_series(form, rho as f64),
        series_terms: form.len(),
        printed_constant,
        measured_constant: l_prime / d_b,
        extrapolation_shift: (0..3).map(|j| (fine[j].re() - coarse[j].re()).abs()).sum(),
        quadrature_error: fine.iter().map(|q| q.error).sum(),
        evaluations: coarse.iter().chain(&fine).map(|q| q.evaluations).sum(),
    })
}
