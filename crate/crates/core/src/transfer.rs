//! The transfer operator `(Lₛh)(z) = Σ_{n≥1} (z+n)^{−2s} h(1/(z+n))`, the
//! search for its ±1 eigenvalues on the critical line, and the period
//! functions rebuilt from the eigenvectors.
//!
//! Two discretizations are provided. [`transfer_matrix`] is the monomial
//! collocation model `V⁻¹A` with exact Hurwitz-zeta entries; it is fine for
//! small bases but its Vandermonde matrix is hopelessly ill-conditioned
//! beyond N ≈ 20. The eigen search therefore runs on
//! [`nodal_transfer_operator`], which represents `h` by its values at
//! Chebyshev points and applies `Lₛ` to the barycentric interpolant: the
//! first [`DIRECT_TERMS`] terms of the n-sum are summed directly and the
//! remainder is folded into Hurwitz-zeta values through the Taylor
//! coefficients of the interpolant at 0.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{cpow, real_pow, AnalyticFunction};
use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_zeta, hurwitz_zeta_complex};
use crate::period::{PeriodLikeFunction, Provenance};

/// Terms of the n-sum evaluated directly before switching to Hurwitz zeta.
pub const DIRECT_TERMS: usize = 200;

/// Largest |Im u| at which the interpolant of `h` is used directly.
const OFF_AXIS: f64 = 0.05;
/// Taylor coefficients used for the Hurwitz-zeta tail.
pub const TAIL_TERMS: usize = 12;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Chebyshev–Gauss points mapped to (0, 1), in increasing order, together
/// with their angles: `xⱼ = (1 − cos θⱼ)/2`, `θⱼ = (2j+1)π/(2N)`.
pub fn chebyshev_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let theta: Vec<f64> = (0..n).map(|j| (2 * j + 1) as f64 * PI / (2 * n) as f64).collect();
    let x = theta.iter().map(|t| 0.5 * (1.0 - t.cos())).collect();
    (x, theta)
}

/// Barycentric interpolation on Chebyshev–Gauss points.
#[derive(Clone, Debug)]
pub struct Barycentric {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Barycentric {
    pub fn new(n: usize) -> Self {
        let (nodes, theta) = chebyshev_nodes(n);
        let weights = theta
            .iter()
            .enumerate()
            .map(|(j, t)| if j % 2 == 0 { t.sin() } else { -t.sin() })
            .collect();
        Barycentric { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lagrange basis values at a real point.
    pub fn basis(&self, t: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&x| x == t) {
            let mut out = vec![0.0; self.nodes.len()];
            out[j] = 1.0;
            return out;
        }
        let mut out: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w / (t - x))
            .collect();
        let total: f64 = out.iter().sum();
        for v in &mut out {
            *v /= total;
        }
        out
    }

    /// Value of the interpolant through `values` at a complex point.
    pub fn eval(&self, t: C, values: &[C]) -> C {
        let mut num = c(0.0, 0.0);
        let mut den = c(0.0, 0.0);
        for ((&x, &w), &v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let d = t - x;
            if d.re == 0.0 && d.im == 0.0 {
                return v;
            }
            let q = w / d;
            num += q * v;
            den += q;
        }
        num / den
    }
}

/// Matrix (K × N) taking nodal values to the first K Taylor coefficients at
/// 0 of the interpolating polynomial.
pub fn taylor_map(n: usize, k_max: usize) -> DMatrix<f64> {
    let (_, theta) = chebyshev_nodes(n);
    // Chebyshev coefficients of the interpolant in y = 2x − 1.
    let mut cheb = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..n {
            cheb[(j, i)] = 2.0 / n as f64 * sign * (j as f64 * theta[i]).cos();
        }
    }
    for i in 0..n {
        cheb[(0, i)] *= 0.5;
    }
    // k-th Taylor coefficient at x = 0 of T_j(2x − 1).
    let mut to_taylor = DMatrix::<f64>::zeros(k_max, n);
    let mut fact = 1.0;
    for k in 0..k_max {
        if k > 0 {
            fact *= k as f64;
        }
        for j in 0..n {
            let mut prod = 1.0;
            for m in 0..k {
                prod *= ((j * j) as f64 - (m * m) as f64) / (2 * m + 1) as f64;
            }
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            to_taylor[(k, j)] = sign * 2f64.powi(k as i32) / fact * prod;
        }
    }
    to_taylor * cheb
}

/// The monomial collocation model: `A[i][k] = ζ_H(2s+k, xᵢ+1)`,
/// `V[i][k] = xᵢᵏ`, discretized operator `V⁻¹A`.
#[derive(Clone, Debug)]
pub struct TransferOperatorModel {
    pub s: C,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub a: DMatrix<C>,
    pub v: DMatrix<C>,
}

impl TransferOperatorModel {
    pub fn operator(&self) -> Result<DMatrix<C>> {
        self.v
            .clone()
            .lu()
            .solve(&self.a)
            .ok_or_else(|| Error::Eigen("Vandermonde matrix is singular".into()))
    }

    pub fn eigenvalues(&self) -> Result<Vec<C>> {
        eigenvalues(&self.operator()?)
    }
}

pub fn transfer_matrix(s: C, n: usize) -> Result<TransferOperatorModel> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("basis size must be ≥ 8, got {n}")));
    }
    check_poles(s, n)?;
    let (nodes, _) = chebyshev_nodes(n);
    let mut a = DMatrix::<C>::zeros(n, n);
    let mut v = DMatrix::<C>::zeros(n, n);
    for (i, &x) in nodes.iter().enumerate() {
        for k in 0..n {
            a[(i, k)] = hurwitz_zeta(2.0 * s + k as f64, x + 1.0)?;
            v[(i, k)] = c(x.powi(k as i32), 0.0);
        }
    }
    Ok(TransferOperatorModel { s, n, nodes, a, v })
}

fn check_poles(s: C, k_max: usize) -> Result<()> {
    for k in 0..k_max {
        let w = 2.0 * s + k as f64;
        if w == c(1.0, 0.0) {
            return Err(Error::Pole(format!("2s + k = 1 at k = {k}")));
        }
    }
    Ok(())
}

/// The operator acting on nodal values at Chebyshev points.
#[derive(Clone, Debug)]
pub struct NodalTransferOperator {
    pub s: C,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub matrix: DMatrix<C>,
}

pub fn nodal_transfer_operator(s: C, n: usize) -> Result<NodalTransferOperator> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("basis size must be ≥ 8, got {n}")));
    }
    check_poles(s, TAIL_TERMS)?;
    let bary = Barycentric::new(n);
    let tk = taylor_map(n, TAIL_TERMS);
    let rows: Vec<Result<Vec<C>>> = bary
        .nodes()
        .par_iter()
        .map(|&x| {
            let mut row = vec![c(0.0, 0.0); n];
            for m in 1..=DIRECT_TERMS {
                let y = x + m as f64;
                let f = real_pow(y, -2.0 * s);
                for (r, b) in row.iter_mut().zip(bary.basis(1.0 / y)) {
                    *r += f * b;
                }
            }
            for k in 0..TAIL_TERMS {
                let z = hurwitz_zeta(2.0 * s + k as f64, x + DIRECT_TERMS as f64 + 1.0)?;
                for (j, r) in row.iter_mut().enumerate() {
                    *r += z * tk[(k, j)];
                }
            }
            Ok(row)
        })
        .collect();
    let mut matrix = DMatrix::<C>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    Ok(NodalTransferOperator {
        s,
        n,
        nodes: bary.nodes().to_vec(),
        matrix,
    })
}

impl NodalTransferOperator {
    pub fn eigenvalues(&self) -> Result<Vec<C>> {
        eigenvalues(&self.matrix)
    }

    /// The eigenvalue closest to `target` and a unit eigenvector for it.
    pub fn eigenpair_nearest(&self, target: C) -> Result<(C, DVector<C>)> {
        let lambda = nearest(&self.eigenvalues()?, target);
        let v = inverse_iteration(&self.matrix, lambda)?;
        Ok((lambda, v))
    }
}

fn eigenvalues(m: &DMatrix<C>) -> Result<Vec<C>> {
    m.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Eigen("Schur form did not converge to triangular".into()))
}

fn nearest(values: &[C], target: C) -> C {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .expect("nonempty spectrum")
}

fn inverse_iteration(m: &DMatrix<C>, lambda: C) -> Result<DVector<C>> {
    let n = m.nrows();
    let shift = lambda + c(1e-12, 1e-12) * (1.0 + lambda.norm());
    let shifted = m - DMatrix::<C>::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut v = DVector::<C>::from_fn(n, |i, _| c(1.0 + 0.1 * i as f64, 0.05 * i as f64));
    for _ in 0..3 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Eigen("inverse iteration failed".into()))?;
        let norm = v.norm();
        v /= C::from(norm);
    }
    // Fix the phase: largest component real and positive.
    let (imax, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("nonempty vector");
    let phase = v[imax] / v[imax].norm();
    v /= phase;
    Ok(v)
}

/// A spectral parameter `s = 1/2 + iR` with a transfer-operator
/// eigenvector for the eigenvalue nearest the parity `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDatum {
    pub r: f64,
    pub parity: i8,
    /// `|λ − ε|` for the selected eigenvalue λ.
    pub eigen_residual: f64,
    /// Unit-norm eigenvector: values of `h` at the Chebyshev points.
    pub coefficients: Vec<C>,
    pub n: usize,
}

impl EigenDatum {
    pub fn s(&self) -> C {
        c(0.5, self.r)
    }
}

fn check_parity(parity: i8) -> Result<f64> {
    match parity {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        p => Err(Error::InvalidArgument(format!("parity must be ±1, got {p}"))),
    }
}

/// Distance from `ε` to the nearest eigenvalue at `s = 1/2 + iR`.
pub fn eigen_gap(parity: i8, r: f64, n: usize) -> Result<f64> {
    let eps = check_parity(parity)?;
    let op = nodal_transfer_operator(c(0.5, r), n)?;
    Ok((nearest(&op.eigenvalues()?, c(eps, 0.0)) - eps).norm())
}

/// Eigen data at a given R (no search).
pub fn eigen_datum_at(parity: i8, r: f64, n: usize) -> Result<EigenDatum> {
    let eps = check_parity(parity)?;
    let op = nodal_transfer_operator(c(0.5, r), n)?;
    let (lambda, v) = op.eigenpair_nearest(c(eps, 0.0))?;
    Ok(EigenDatum {
        r,
        parity,
        eigen_residual: (lambda - eps).norm(),
        coefficients: v.iter().copied().collect(),
        n,
    })
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Threshold on `|λ − ε|` for accepting a refined minimum.
pub const HIT_THRESHOLD: f64 = 1e-6;

/// Scan `R` over a grid, refine every local minimum of `|λ(R) − ε|` by
/// golden section, and keep those that fall below [`HIT_THRESHOLD`].
pub fn eigen_search(parity: i8, r_lo: f64, r_hi: f64, n: usize, grid_step: f64) -> Result<Vec<EigenDatum>> {
    check_parity(parity)?;
    if !(r_lo > 0.0 && r_hi <= 30.0 && r_lo < r_hi) {
        return Err(Error::InvalidArgument(format!(
            "R range must lie in (0, 30], got [{r_lo}, {r_hi}]"
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 0.05) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be in (0, 0.05], got {grid_step}"
        )));
    }
    let count = ((r_hi - r_lo) / grid_step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| (r_lo + i as f64 * grid_step).min(r_hi)).collect();
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|&r| eigen_gap(parity, r, n))
        .collect::<Result<_>>()?;
    let mut hits = Vec::new();
    for i in 0..count {
        let left = if i > 0 { gaps[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < count { gaps[i + 1] } else { f64::INFINITY };
        if gaps[i] <= left && gaps[i] < right {
            let a = grid[i.saturating_sub(1)];
            let b = grid[(i + 1).min(count - 1)];
            let (r, gap) = golden_section(|r| eigen_gap(parity, r, n), a, b, 1e-11)?;
            if gap < HIT_THRESHOLD {
                hits.push(eigen_datum_at(parity, r, n)?);
            }
        }
    }
    Ok(hits)
}

/// Numerical period function rebuilt from an eigenvector.
///
/// `h` is the interpolant of the nodal values; `ψ(z) = h(z−1)` is evaluated
/// through `h = ε Lₛ h`, which is accurate for `Re z ≥ 1`, and carried to
/// the rest of the right half-plane by the parity relation
/// `ψ(z) = ε z^{−2s} ψ(1/z)` and the three-term equation.
#[derive(Clone, Debug)]
pub struct SpectralModel {
    s: C,
    eps: f64,
    bary: Barycentric,
    values: Vec<C>,
    taylor: Vec<C>,
}

impl SpectralModel {
    fn new(s: C, eps: f64, n: usize, values: Vec<C>) -> Self {
        let tk = taylor_map(n, TAIL_TERMS);
        let taylor = (0..TAIL_TERMS)
            .map(|k| values.iter().enumerate().map(|(j, v)| v * tk[(k, j)]).sum())
            .collect();
        SpectralModel {
            s,
            eps,
            bary: Barycentric::new(n),
            values,
            taylor,
        }
    }

    fn rescale(&mut self, factor: C) {
        for v in self.values.iter_mut().chain(self.taylor.iter_mut()) {
            *v *= factor;
        }
    }

    pub fn s(&self) -> C {
        self.s
    }

    pub fn parity(&self) -> f64 {
        self.eps
    }

    /// Taylor coefficients of `h` at 0, i.e. of `ψ(1+u)` at `u = 0`.
    pub fn taylor_at_zero(&self) -> &[C] {
        &self.taylor
    }

    /// The interpolating polynomial of `h` itself (trusted near [0, 1]).
    pub fn h_polynomial(&self, w: C) -> C {
        self.bary.eval(w, &self.values)
    }

    /// `ψ(z) = h(z−1)` straight from the interpolant; only meaningful close
    /// to [1, 2]. Used to cross-check the continued evaluation.
    pub fn psi_polynomial(&self, z: C) -> C {
        self.h_polynomial(z - 1.0)
    }

    /// `h(w) = ε Σ_{n≥1} (w+n)^{−2s} h(1/(w+n))`, valid for `Re w > −1/2`.
    pub fn h_lift(&self, w: C) -> Result<C> {
        self.h_lift_at_depth(w, 0)
    }

    /// `h` near [0, 1]. The interpolant amplifies rounding quickly off the
    /// real axis, so points further out go through one more lift, which
    /// pulls them toward the axis.
    fn h_near_interval(&self, u: C, depth: u32) -> Result<C> {
        if u.im.abs() > OFF_AXIS && depth < 4 {
            self.h_lift_at_depth(u, depth + 1)
        } else {
            Ok(self.h_polynomial(u))
        }
    }

    fn h_lift_at_depth(&self, w: C, depth: u32) -> Result<C> {
        if w.re <= -0.5 {
            return Err(Error::OutsideDomain {
                z: w + 1.0,
                reason: "lift needs Re w > -1/2".into(),
            });
        }
        let mut sum = c(0.0, 0.0);
        for m in 1..=DIRECT_TERMS {
            let y = w + m as f64;
            sum += cpow(y, -2.0 * self.s)? * self.h_near_interval(1.0 / y, depth)?;
        }
        let a = w + (DIRECT_TERMS + 1) as f64;
        for (k, t) in self.taylor.iter().enumerate() {
            sum += t * hurwitz_zeta_complex(2.0 * self.s + k as f64, a)?;
        }
        Ok(sum * self.eps)
    }

    /// ψ on the closed right half-plane minus the origin.
    pub fn psi(&self, z: C) -> Result<C> {
        if z.re < 0.0 || (z.re == 0.0 && z.im == 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::OutsideDomain {
                z,
                reason: "spectral period functions are evaluated on Re z ≥ 0, z ≠ 0".into(),
            });
        }
        if z.re >= 1.0 {
            return self.h_lift(z - 1.0);
        }
        if (z - 0.5).norm() <= 0.5 {
            let w = 1.0 / z;
            return Ok(cpow(z, -2.0 * self.s)? * self.h_lift(w - 1.0)? * self.eps);
        }
        let z1 = z + 1.0;
        let inner = z / z1;
        // inner lies in the disc |u − 1/2| ≤ 1/2, so one parity step finishes.
        let via_parity = cpow(inner, -2.0 * self.s)? * self.h_lift(1.0 / inner - 1.0)? * self.eps;
        Ok(self.h_lift(z)? + cpow(z1, -2.0 * self.s)? * via_parity)
    }
}

/// Rebuild ψ from an eigen datum and normalize it by ψ(1) = 1.
pub fn spectral_period_function(e: &EigenDatum) -> Result<PeriodLikeFunction> {
    let (model, _) = spectral_model(e, c(1.0, 0.0))?;
    Ok(wrap_model(model))
}

/// As [`spectral_period_function`] but normalized by ψ(z₀) = 1. Odd forms
/// have ψ(1) = 0, so they need a different anchor.
pub fn spectral_period_function_normalized_at(e: &EigenDatum, z0: C) -> Result<PeriodLikeFunction> {
    let (model, _) = spectral_model(e, z0)?;
    Ok(wrap_model(model))
}

/// The model together with the raw value at the anchor before scaling.
pub fn spectral_model(e: &EigenDatum, anchor: C) -> Result<(SpectralModel, C)> {
    if e.eigen_residual > 1e-5 {
        return Err(Error::ResidualTooLarge(e.eigen_residual));
    }
    if e.coefficients.len() != e.n {
        return Err(Error::InvalidArgument(format!(
            "eigen datum has {} coefficients for N = {}",
            e.coefficients.len(),
            e.n
        )));
    }
    let eps = check_parity(e.parity)?;
    let norm: f64 = e.coefficients.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let values: Vec<C> = e.coefficients.iter().map(|v| v / norm).collect();
    let mut model = SpectralModel::new(e.s(), eps, e.n, values);
    let raw = model.psi(anchor)?;
    if raw.norm() < 1e-8 {
        return Err(Error::NormalizationDegenerate(raw.norm()));
    }
    model.rescale(1.0 / raw);
    Ok((model, raw))
}

/// Wrap a spectral model as a period-like function.
pub fn wrap_model(model: SpectralModel) -> PeriodLikeFunction {
    let s = model.s;
    let taylor = model.taylor.clone();
    let shared = Arc::new(model);
    let descriptor = format!("spectral(R={:.10}, eps={:+})", s.im, shared.eps);
    let psi = AnalyticFunction::new(0.0, descriptor, move |z| shared.psi(z));
    PeriodLikeFunction {
        psi,
        s,
        provenance: Provenance::Spectral,
        taylor_at_one: Some(taylor),
    }
}
