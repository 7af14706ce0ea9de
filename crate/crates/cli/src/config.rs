use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use modsym::{Complex64 as C, Cusp};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// `RE,IM` or `RE`.
pub fn parse_complex(s: &str) -> Result<C, String> {
    let mut parts = s.split(',');
    let re = parts.next().unwrap_or("").trim();
    let im = parts.next().map(str::trim).unwrap_or("0");
    if parts.next().is_some() {
        return Err(format!("expected RE,IM, got {s:?}"));
    }
    let re: f64 = re.parse().map_err(|e| format!("bad real part {re:?}: {e}"))?;
    let im: f64 = im.parse().map_err(|e| format!("bad imaginary part {im:?}: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("non-finite complex number {s:?}"));
    }
    Ok(C::new(re, im))
}

pub fn parse_cusp(s: &str) -> Result<Cusp, String> {
    s.parse::<Cusp>().map_err(|e| e.to_string())
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct GlobalArgs {
    /// Spectral parameter s as RE,IM.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: Option<C>,
    /// Mellin variable ρ as RE,IM.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub rho: Option<C>,
    /// Sample point RE,IM; repeatable.
    #[arg(long = "z", global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Vec<C>,
    /// Transfer-operator basis size N.
    #[arg(long, global = true)]
    pub basis: Option<usize>,
    /// Truncation bound B for T*₁ and similar sums.
    #[arg(long, global = true)]
    pub trunc: Option<u64>,
    /// Denominator / summation bound Q.
    #[arg(long, global = true)]
    pub qmax: Option<u64>,
    /// Directory for cached eigen data.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Pass threshold overriding the command's default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub s: Option<C>,
    pub rho: Option<C>,
    pub z: Vec<C>,
    pub basis: usize,
    pub trunc: Option<u64>,
    pub qmax: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self> {
        let basis = g.basis.unwrap_or(40);
        if basis < 4 {
            bail!("--basis must be at least 4, got {basis}");
        }
        if g.trunc == Some(0) {
            bail!("--trunc must be positive");
        }
        if g.qmax == Some(0) {
            bail!("--qmax must be positive");
        }
        if let Some(t) = g.tol {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--tol must be a positive number, got {t}");
            }
        }
        if let Some(dir) = &g.cache_dir {
            std::fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
            let probe = dir.join(format!(".write-test-{}", std::process::id()));
            std::fs::write(&probe, b"")
                .with_context(|| format!("cache directory {} is not writable", dir.display()))?;
            let _ = std::fs::remove_file(probe);
        }
        Ok(RunConfig {
            s: g.s,
            rho: g.rho,
            z: g.z.clone(),
            basis,
            trunc: g.trunc,
            qmax: g.qmax,
            cache_dir: g.cache_dir.clone(),
            format: g.format,
            tol: g.tol,
        })
    }

    pub fn zs_or(&self, default: &[C]) -> Vec<C> {
        if self.z.is_empty() {
            default.to_vec()
        } else {
            self.z.clone()
        }
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn echo(&self) -> Value {
        json!({
            "s": self.s.map(crate::output::complex),
            "rho": self.rho.map(crate::output::complex),
            "z": self.z.iter().copied().map(crate::output::complex).collect::<Vec<_>>(),
            "basis": self.basis,
            "trunc": self.trunc,
            "qmax": self.qmax,
            "cache_dir": self.cache_dir.as_ref().map(|p| p.display().to_string()),
            "format": format!("{:?}", self.format).to_lowercase(),
            "tol": self.tol,
        })
    }
}
