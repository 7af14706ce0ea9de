use anyhow::{anyhow, bail, ensure, Result};
use clap::{Args, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use modsym::brjuno::{brjuno_b, brjuno_b_rational, brjuno_big_b, brjuno_big_b_rational, BrjunoSum};
use modsym::classical::{
    delta_coefficients, delta_coefficients_by_convolution, goldfeld_brjuno_check, l_derivative_from_mellin,
    l_derivative_series, period_polynomial, ClassicalSymbols, GoldfeldOptions,
};
use modsym::hecke::{
    hecke_lambda, hecke_lambda_via_cf, hecke_muehlenbruch, hecke_sum, muehlenbruch_entries, standard_entries,
};
use modsym::levy::{levy_identity_check, levy_mellin_check, LevyWeight};
use modsym::period::{eisenstein_family, polynomial_period, standard_grid, three_term_residual_scaled};
use modsym::rational::{continued_fraction, parse_rational, primitive_chain_to};
use modsym::transfer::{eigen_search, spectral_period_function_normalized_at};
use modsym::{Complex64 as C, Cusp, EigenDatum, IntegerMatrix2, PeriodLikeFunction, PseudoMeasure};

use crate::cache::{self, Lookup};
use crate::config::{Parity, RunConfig};
use crate::output::{bigint, complex, cusp, matrix, num, Report, Table};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Spectral ψ is normalized by ψ(3/2) = 1; both parities can vanish at 1.
pub const ANCHOR: C = C { re: 1.5, im: 0.0 };
/// Points for eigenvalue ratios, away from zeros of the spectral ψ.
pub const LAMBDA_POINTS: [C; 3] = [C { re: 0.8, im: 0.0 }, C { re: 1.5, im: 0.3 }, C { re: 2.3, im: -0.4 }];
/// Search window around a requested spectral parameter.
const R_WINDOW: f64 = 2e-3;

fn zs_json(zs: &[C]) -> Value {
    Value::Array(zs.iter().copied().map(complex).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Eisenstein,
    Polynomial,
    Spectral,
}

/// Which period-like function a command works on.
#[derive(Args, Clone, Debug)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value_t = Family::Eisenstein)]
    pub family: Family,
    /// Weight parameter of the polynomial family (s = −k/2).
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Parity of the spectral family.
    #[arg(long, value_enum)]
    pub parity: Option<Parity>,
    /// Approximate spectral parameter R of the spectral family.
    #[arg(long)]
    pub r: Option<f64>,
}

impl SourceArgs {
    fn echo(&self, cfg: &RunConfig) -> Value {
        match self.family {
            Family::Eisenstein => json!({ "family": "eisenstein", "s": complex(cfg.s.unwrap_or(c(1.0, 0.0))) }),
            Family::Polynomial => json!({ "family": "polynomial", "k": self.k }),
            Family::Spectral => json!({
                "family": "spectral",
                "parity": self.parity.map(|p| p.sign()),
                "r": self.r,
                "basis": cfg.basis,
            }),
        }
    }
}

/// Eigen datum near `r`, from the cache when possible.
pub fn spectral_datum(cfg: &RunConfig, parity: i8, r: f64) -> Result<(EigenDatum, Value)> {
    let mut corrupt = Vec::new();
    if let Some(dir) = &cfg.cache_dir {
        match cache::lookup(dir, parity, r, cfg.basis, R_WINDOW) {
            Lookup::Hit(d, path) => {
                return Ok((d, json!({ "cache": "hit", "file": path.display().to_string() })));
            }
            Lookup::Miss => {}
            Lookup::Corrupt(problems) => corrupt = problems,
        }
    }
    let hits = eigen_search(parity, r - R_WINDOW, r + R_WINDOW, cfg.basis, R_WINDOW / 4.0)?;
    let datum = hits
        .into_iter()
        .min_by(|a, b| (a.r - r).abs().total_cmp(&(b.r - r).abs()))
        .ok_or_else(|| {
            anyhow!(
                "no parity {parity:+} eigenvalue within {R_WINDOW} of R = {r} at N = {}",
                cfg.basis
            )
        })?;
    let (status, file) = match &cfg.cache_dir {
        Some(dir) => ("miss", Some(cache::store(dir, &datum)?.display().to_string())),
        None => ("disabled", None),
    };
    Ok((
        datum,
        json!({ "cache": status, "file": file, "corrupt_entries": corrupt }),
    ))
}

fn build_source(cfg: &RunConfig, src: &SourceArgs) -> Result<(PeriodLikeFunction, Value)> {
    Ok(match src.family {
        Family::Eisenstein => (eisenstein_family(cfg.s.unwrap_or(c(1.0, 0.0))), Value::Null),
        Family::Polynomial => (polynomial_period(src.k)?, Value::Null),
        Family::Spectral => {
            let parity = src.parity.ok_or_else(|| anyhow!("--family spectral needs --parity"))?;
            let r = src.r.ok_or_else(|| anyhow!("--family spectral needs --r"))?;
            let (d, diag) = spectral_datum(cfg, parity.sign(), r)?;
            let plf = spectral_period_function_normalized_at(&d, ANCHOR)?;
            (
                plf,
                json!({ "r": d.r, "eigen_residual": d.eigen_residual, "datum": diag }),
            )
        }
    })
}

pub fn cf(x: &str) -> Result<Report> {
    let q = parse_rational(x)?;
    let e = continued_fraction(&q)?;
    // p₋₁/q₋₁ = 1/0 seeds the recursion and is not listed; p₀/q₀ = 0/1
    // belongs to the integer part, quotient k to convergent k.
    let convergents = &e.convergents[1..];
    let mut table = Table::new(&["index", "quotient", "convergent"]);
    table.push(["0".into(), "0".into(), convergents[0].to_string()]);
    for (i, (a, conv)) in e.quotients.iter().zip(&convergents[1..]).enumerate() {
        table.push([(i + 1).to_string(), a.to_string(), conv.to_string()]);
    }
    let result = json!({
        "value": q.to_string(),
        "quotients": e.quotients.iter().map(bigint).collect::<Vec<_>>(),
        "convergents": convergents.iter().map(cusp).collect::<Vec<_>>(),
    });
    Ok(Report::new(json!({ "x": x }), result, json!({ "exact": true })).with_table(table))
}

pub fn chain(beta: &str) -> Result<Report> {
    let target: Cusp = beta.parse()?;
    let ch = primitive_chain_to(&target)?;
    let mut table = Table::new(&["step", "sign", "a", "b", "c", "d"]);
    let steps: Vec<Value> = ch
        .steps
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let g = &st.matrix;
            let sign = if st.sign > 0 { "+" } else { "-" };
            table.push([
                (i + 1).to_string(),
                sign.into(),
                g.a.to_string(),
                g.b.to_string(),
                g.c.to_string(),
                g.d.to_string(),
            ]);
            json!({ "sign": sign, "matrix": matrix(g) })
        })
        .collect();
    let result = json!({ "alpha": cusp(&ch.alpha), "beta": cusp(&ch.beta), "steps": steps });
    let diagnostics = json!({ "tiles_exactly": ch.tiles_exactly(), "length": ch.len() });
    Ok(Report::new(json!({ "beta": beta }), result, diagnostics).with_table(table))
}

pub fn measure_eval(cfg: &RunConfig, alpha: &Cusp, beta: &Cusp, src: &SourceArgs) -> Result<Report> {
    let (plf, source_diag) = build_source(cfg, src)?;
    let tol = plf.provenance.tolerance();
    let mu = PseudoMeasure::new(plf);
    let zs = cfg.zs_or(&[c(1.0, 0.0), c(0.5, 0.5), c(2.0, -1.0)]);
    let mut table = Table::new(&["z_re", "z_im", "mu_re", "mu_im"]);
    let mut values = Vec::new();
    let mut route_gap = 0.0f64;
    for &z in &zs {
        let v = mu.mu(alpha, beta, z)?;
        // Same value along monotone chains, a cheap internal consistency check.
        let w = mu.mu_monotone(alpha, beta, z)?;
        route_gap = route_gap.max((v - w).norm() / v.norm().max(w.norm()).max(1.0));
        table.push([z.re, z.im, v.re, v.im].map(num));
        values.push(json!({ "z": complex(z), "value": complex(v) }));
    }
    let params = json!({ "alpha": cusp(alpha), "beta": cusp(beta), "source": src.echo(cfg), "z": zs_json(&zs) });
    let diagnostics = json!({ "chain_route_gap": route_gap, "tolerance": tol, "source": source_diag });
    Ok(Report::new(params, json!({ "values": values }), diagnostics)
        .with_table(table)
        .with_ok(route_gap <= tol))
}

pub fn transfer_scan(cfg: &RunConfig, parity: Parity, r_lo: f64, r_hi: f64, step: f64) -> Result<Report> {
    ensure!(r_lo < r_hi, "need r_lo < r_hi");
    ensure!(step > 0.0, "grid step must be positive");
    let hits = eigen_search(parity.sign(), r_lo, r_hi, cfg.basis, step)?;
    let mut table = Table::new(&["r", "parity", "eigen_residual", "n"]);
    let mut files = Vec::new();
    let mut out = Vec::new();
    for d in &hits {
        if let Some(dir) = &cfg.cache_dir {
            files.push(cache::store(dir, d)?.display().to_string());
        }
        table.push([
            d.r.to_string(),
            d.parity.to_string(),
            num(d.eigen_residual),
            d.n.to_string(),
        ]);
        out.push(json!({ "r": d.r, "parity": d.parity, "eigen_residual": d.eigen_residual, "n": d.n }));
    }
    let params = json!({ "parity": parity.sign(), "r_lo": r_lo, "r_hi": r_hi, "grid_step": step, "basis": cfg.basis });
    let diagnostics = json!({ "cache_files": files, "admissible_residual": 1e-5 });
    Ok(Report::new(params, json!({ "hits": out }), diagnostics).with_table(table))
}

pub fn transfer_periodfn(cfg: &RunConfig, parity: Parity, r: f64) -> Result<Report> {
    let (d, cache_diag) = spectral_datum(cfg, parity.sign(), r)?;
    let plf = spectral_period_function_normalized_at(&d, ANCHOR)?;
    let zs = cfg.zs_or(&standard_grid());
    let mut table = Table::new(&["z_re", "z_im", "psi_re", "psi_im"]);
    let mut samples = Vec::new();
    for &z in &zs {
        let v = plf.eval(z)?;
        table.push([z.re, z.im, v.re, v.im].map(num));
        samples.push(json!({ "z": complex(z), "psi": complex(v) }));
    }
    let residual = three_term_residual_scaled(&plf, &standard_grid())?.max(three_term_residual_scaled(&plf, &zs)?);
    let tol = cfg.tol_or(plf.provenance.tolerance());
    let params = json!({ "parity": parity.sign(), "r": r, "basis": cfg.basis, "z": zs_json(&zs) });
    let result = json!({ "r": d.r, "s": complex(d.s()), "normalized_at": complex(ANCHOR), "samples": samples });
    let diagnostics = json!({
        "three_term_residual": residual,
        "tolerance": tol,
        "eigen_residual": d.eigen_residual,
        "datum": cache_diag,
    });
    Ok(Report::new(params, result, diagnostics)
        .with_table(table)
        .with_ok(residual <= tol))
}

pub fn hecke_check(cfg: &RunConfig, m: u64, src: &SourceArgs) -> Result<Report> {
    ensure!(m >= 1, "m must be positive");
    let (plf, source_diag) = build_source(cfg, src)?;
    let exact = plf.provenance.is_exact();
    let tol = cfg.tol_or(if exact { 1e-10 } else { 1e-4 });
    let mu = PseudoMeasure::new(plf);
    let zs = cfg.zs_or(&LAMBDA_POINTS);
    let mut table = Table::new(&[
        "z_re",
        "z_im",
        "standard_re",
        "standard_im",
        "two_sided_re",
        "two_sided_im",
        "chains_re",
        "chains_im",
    ]);
    let mut rows = Vec::new();
    let mut gap = 0.0f64;
    let rel = |a: C, b: C| (a - b).norm() / a.norm().max(b.norm()).max(1e-300);
    for &z in &zs {
        let psi = mu.source().eval(z)?;
        let standard = hecke_sum(&mu, m, z)? / psi;
        let two_sided = hecke_muehlenbruch(mu.source(), m, z)? / psi;
        // The chain route needs (aζ − b)/d in the right half-plane for all entries.
        let zeta = z + m as f64;
        let chains = hecke_lambda_via_cf(&mu, m, zeta)? / mu.source().eval(zeta)?;
        gap = gap.max(rel(standard, two_sided)).max(rel(standard, chains));
        table.push(
            [standard, two_sided, chains]
                .iter()
                .fold(vec![num(z.re), num(z.im)], |mut row, v| {
                    row.push(num(v.re));
                    row.push(num(v.im));
                    row
                }),
        );
        rows.push(json!({
            "z": complex(z),
            "standard": complex(standard),
            "two_sided": complex(two_sided),
            "chains": complex(chains),
            "chains_at": complex(zeta),
        }));
    }
    let lambda = hecke_lambda(&mu, m, &zs)?;
    let params = json!({ "m": m, "source": src.echo(cfg), "z": zs_json(&zs) });
    let result = json!({
        "lambda": complex(lambda.lambda),
        "routes": rows,
        "standard_matrices": standard_entries(m).len(),
        "two_sided_matrices": muehlenbruch_entries(m).len(),
    });
    let diagnostics = json!({
        "route_gap": gap,
        "z_spread": lambda.z_spread,
        "tolerance": tol,
        "source": source_diag,
    });
    Ok(Report::new(params, result, diagnostics)
        .with_table(table)
        .with_ok(gap <= tol && lambda.z_spread <= tol))
}

pub fn levy_identity(cfg: &RunConfig, k: i32) -> Result<Report> {
    ensure!(k >= 3, "the weight q^-k needs k ≥ 3 for the interval sum to converge");
    let q_max = cfg.qmax.unwrap_or(200);
    let tol = cfg.tol_or(1e-6);
    let r = levy_identity_check(&LevyWeight::power(k), q_max, 1e-8)?;
    let params = json!({ "weight": format!("q^-{k}"), "qmax": q_max });
    let result = json!({
        "integral": complex(r.integral.value),
        "interval_sum": complex(r.interval_sum),
        "boundary_term": complex(r.boundary_term),
    });
    let diagnostics = json!({
        "gap": r.gap,
        "tolerance": tol,
        "quadrature_error": r.integral.error,
        "warnings": r.warnings,
    });
    Ok(Report::new(params, result, diagnostics).with_ok(r.gap <= tol))
}

pub fn levy_mellin(cfg: &RunConfig, m_max: Option<u64>, src: &SourceArgs) -> Result<Report> {
    let (plf, source_diag) = build_source(cfg, src)?;
    let mu = PseudoMeasure::new(plf);
    let rho = cfg.rho.unwrap_or(c(3.0, 0.0));
    let q_max = cfg.qmax.unwrap_or(60);
    let m_max = m_max.unwrap_or(q_max);
    let tol = cfg.tol_or(1e-3);
    let zs = cfg.zs_or(&[c(0.8, 0.0), c(1.3, 0.2), c(1.7, -0.3), c(2.3, 0.4), c(3.1, 0.0)]);
    let r = levy_mellin_check(&mu, rho, q_max, m_max, &zs, &LAMBDA_POINTS)?;
    let mut table = Table::new(&[
        "z_re",
        "z_im",
        "interval_sum_re",
        "interval_sum_im",
        "boundary_re",
        "boundary_im",
    ]);
    let values: Vec<Value> = r
        .values
        .iter()
        .map(|v| {
            table.push(
                [
                    v.z.re,
                    v.z.im,
                    v.interval_sum.re,
                    v.interval_sum.im,
                    v.boundary_term.re,
                    v.boundary_term.im,
                ]
                .map(num),
            );
            json!({
                "z": complex(v.z),
                "interval_sum": complex(v.interval_sum),
                "boundary_term": complex(v.boundary_term),
                "tail_estimate": v.tail_estimate,
            })
        })
        .collect();
    let params =
        json!({ "rho": complex(rho), "qmax": q_max, "mmax": m_max, "source": src.echo(cfg), "z": zs_json(&zs) });
    let result = json!({ "eigen_sum": complex(r.eigen_sum), "values": values });
    let (gap, spread) = (r.max_gap(), r.z_spread());
    let diagnostics = json!({
        "gap": gap,
        "z_spread": spread,
        "gap_with_boundary": r.max_gap_with_boundary(),
        "z_spread_with_boundary": r.z_spread_with_boundary(),
        "tolerance": tol,
        "source": source_diag,
    });
    Ok(Report::new(params, result, diagnostics)
        .with_table(table)
        .with_ok(gap <= tol && spread <= tol))
}

fn brjuno_json(s: &BrjunoSum) -> Value {
    json!({ "value": s.value, "terms": s.terms, "last_term": s.last_term, "truncated": s.truncated })
}

pub fn brjuno(x: &str, depth: usize) -> Result<Report> {
    let (big, small, exact) = if x.contains('/') {
        let q: BigRational = parse_rational(x)?;
        (brjuno_big_b_rational(&q, depth)?, brjuno_b_rational(&q, depth)?, true)
    } else {
        let v: f64 = x
            .trim()
            .parse()
            .map_err(|e| anyhow!("cannot parse {x:?} as a number: {e}"))?;
        (brjuno_big_b(v, depth)?, brjuno_b(v, depth)?, false)
    };
    let params = json!({ "x": x, "depth": depth, "exact_input": exact });
    let result = json!({ "big_b": brjuno_json(&big), "b": brjuno_json(&small) });
    Ok(Report::new(
        params,
        result,
        json!({ "truncated": big.truncated || small.truncated }),
    ))
}

pub fn lderiv(cfg: &RunConfig, terms: usize, with_brjuno: bool) -> Result<Report> {
    let rho = cfg.rho.unwrap_or(c(7.0, 0.0));
    ensure!(
        rho.im == 0.0 && rho.re >= 1.0 && rho.re.fract() == 0.0,
        "--rho must be a positive integer, got {rho}"
    );
    let rho_int = rho.re as u32;
    let form = delta_coefficients_by_convolution(terms)?;
    let (mellin, mellin_error) = l_derivative_from_mellin(&form, rho_int, 1e-14)?;
    let series = l_derivative_series(&form, rho.re);
    let mut result = json!({
        "l_prime": mellin,
        "l_prime_series": series,
    });
    let mut diagnostics = json!({ "mellin_error": mellin_error, "series_terms": terms });
    let mut ok = true;
    if with_brjuno {
        ensure!(rho_int == 7, "the Brjuno formula is for L'(7) of the weight 12 form");
        let tol = cfg.tol_or(1e-6);
        let opts = GoldfeldOptions {
            break_denominator: cfg.qmax.unwrap_or(2000),
            ..GoldfeldOptions::default()
        };
        let r = goldfeld_brjuno_check(&form, &opts)?;
        let checks = json!({
            "reflection": { "gap": r.reflection_gap, "unextrapolated": r.reflection_gap_raw, "tolerance": tol, "pass": r.reflection_gap <= tol },
            "integrated_functional_equation": { "gap": r.ingredient_gap, "unextrapolated": r.ingredient_gap_raw, "tolerance": tol, "pass": r.ingredient_gap <= tol },
            "dlog_vs_2db": { "gap": r.dlog_vs_db_gap, "tolerance": 1e-2, "pass": r.dlog_vs_db_gap <= 1e-2 },
        });
        ok = r.reflection_gap <= tol && r.ingredient_gap <= tol && r.dlog_vs_db_gap <= 1e-2;
        result["brjuno"] = json!({
            "d_log": r.d_log,
            "d_b": r.d_b,
            "d_b_quadrature": r.d_b_quadrature,
            "d_b_lower": r.d_b_lower_series,
            "d_b_upper": r.d_b_upper_series,
            "measured_constant": r.measured_constant,
            "printed_constant": r.printed_constant,
            "checks": checks,
        });
        diagnostics["brjuno"] = json!({
            "break_denominator": opts.break_denominator,
            "quadrature_error": r.quadrature_error,
            "extrapolation_shift": r.extrapolation_shift,
            "evaluations": r.evaluations,
        });
    }
    Ok(Report::new(
        json!({ "rho": rho_int, "terms": terms, "brjuno": with_brjuno }),
        result,
        diagnostics,
    )
    .with_ok(ok))
}

fn parse_matrix(s: &str) -> Result<IntegerMatrix2> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()?;
    let [a, b, cc, d] = v[..] else {
        bail!("expected a,b,c,d, got {s:?}")
    };
    Ok(IntegerMatrix2::from_i64(a, b, cc, d))
}

pub fn symbols_classical(cfg: &RunConfig, alpha: &Cusp, beta: &Cusp, g: Option<&str>) -> Result<Report> {
    let period = period_polynomial(&delta_coefficients(60)?, 1e-15)?;
    let sym = ClassicalSymbols::new(&period);
    let p = sym.symbol(alpha, beta)?;
    let zs = cfg.zs_or(&[c(0.5, 0.5), c(2.0, -1.0)]);
    let size =
        |q: &modsym::classical::Polynomial, z: C| q.coeffs.iter().rev().fold(0.0, |acc, x| acc * z.norm() + x.norm());
    let values: Vec<Value> = zs
        .iter()
        .map(|&z| json!({ "z": complex(z), "value": complex(p.eval(z)) }))
        .collect();
    let mut table = Table::new(&["power", "coeff_re", "coeff_im"]);
    for (j, x) in p.coeffs.iter().enumerate() {
        table.push([j.to_string(), num(x.re), num(x.im)]);
    }
    let tol = cfg.tol_or(1e-8);
    let mut diagnostics = json!({ "period_polynomial_error": period.error, "tolerance": tol });
    let mut ok = true;
    if let Some(text) = g {
        let g = parse_matrix(text)?;
        ensure!(g.in_s(), "g = {g} is not in S");
        let lhs = sym.symbol(&g.adjugate().apply(alpha), &g.adjugate().apply(beta))?;
        let rhs = p.slash(&g, period.w())?;
        let gap = zs
            .iter()
            .map(|&z| (lhs.eval(z) - rhs.eval(z)).norm() / size(&lhs, z).max(size(&rhs, z)).max(1.0))
            .fold(0.0, f64::max);
        ok = gap <= tol;
        diagnostics["modularity_gap"] = json!(gap);
    }
    let params = json!({ "form": "delta", "alpha": cusp(alpha), "beta": cusp(beta), "g": g, "z": zs_json(&zs) });
    let result = json!({
        "coefficients": p.coeffs.iter().copied().map(complex).collect::<Vec<_>>(),
        "values": values,
    });
    Ok(Report::new(params, result, diagnostics).with_table(table).with_ok(ok))
}
