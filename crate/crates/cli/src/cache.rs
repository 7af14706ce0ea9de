//! One JSON file per eigen datum. Writers go through a temporary file and
//! a rename, so readers never see a partial document.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use anyhow::{Context, Result};
use modsym::{Complex64 as C, EigenDatum};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct StoredDatum {
    r: f64,
    parity: i8,
    n: usize,
    eigen_residual: f64,
    coefficients: Vec<Complex>,
}

impl From<&EigenDatum> for StoredDatum {
    fn from(e: &EigenDatum) -> Self {
        StoredDatum {
            r: e.r,
            parity: e.parity,
            n: e.n,
            eigen_residual: e.eigen_residual,
            coefficients: e.coefficients.iter().map(|c| Complex { re: c.re, im: c.im }).collect(),
        }
    }
}

impl StoredDatum {
    fn into_datum(self) -> Result<EigenDatum> {
        anyhow::ensure!(
            self.coefficients.len() == self.n,
            "{} coefficients for N = {}",
            self.coefficients.len(),
            self.n
        );
        anyhow::ensure!(self.parity == 1 || self.parity == -1, "parity {}", self.parity);
        Ok(EigenDatum {
            r: self.r,
            parity: self.parity,
            eigen_residual: self.eigen_residual,
            coefficients: self.coefficients.into_iter().map(|c| C::new(c.re, c.im)).collect(),
            n: self.n,
        })
    }
}

pub fn file_name(parity: i8, r: f64, n: usize) -> String {
    format!("eigen_{parity}_{r:.6}_{n}.json")
}

/// Outcome of a lookup, reported in diagnostics.
#[derive(Debug)]
pub enum Lookup {
    Hit(EigenDatum, PathBuf),
    Miss,
    /// Unreadable entries found on the way; they will be overwritten.
    Corrupt(Vec<String>),
}

fn read(path: &Path) -> Result<EigenDatum> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stored: StoredDatum = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    stored
        .into_datum()
        .with_context(|| format!("validating {}", path.display()))
}

/// Cached datum for `(parity, N)` whose R is within `window` of `r`; the
/// exact file name is tried first.
pub fn lookup(dir: &Path, parity: i8, r: f64, n: usize, window: f64) -> Lookup {
    let mut problems = Vec::new();
    let exact = dir.join(file_name(parity, r, n));
    if exact.exists() {
        match read(&exact) {
            Ok(d) if d.parity == parity && d.n == n => return Lookup::Hit(d, exact),
            Ok(_) => problems.push(format!("{}: parity or N does not match its name", exact.display())),
            Err(e) => problems.push(format!("{e:#}")),
        }
    }
    let prefix = format!("eigen_{parity}_");
    let suffix = format!("_{n}.json");
    let Ok(entries) = fs::read_dir(dir) else {
        return if problems.is_empty() {
            Lookup::Miss
        } else {
            Lookup::Corrupt(problems)
        };
    };
    let mut best: Option<(f64, EigenDatum, PathBuf)> = None;
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(r_text) = name.strip_prefix(&prefix).and_then(|t| t.strip_suffix(&suffix)) else {
            continue;
        };
        let Ok(r_file) = r_text.parse::<f64>() else { continue };
        if (r_file - r).abs() > window || entry.path() == exact {
            continue;
        }
        match read(&entry.path()) {
            Ok(d) if d.parity == parity && d.n == n => {
                let dist = (d.r - r).abs();
                if best.as_ref().is_none_or(|b| dist < b.0) {
                    best = Some((dist, d, entry.path()));
                }
            }
            Ok(_) => {}
            Err(e) => problems.push(format!("{e:#}")),
        }
    }
    match best {
        Some((_, d, p)) => Lookup::Hit(d, p),
        None if problems.is_empty() => Lookup::Miss,
        None => Lookup::Corrupt(problems),
    }
}

static COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn store(dir: &Path, datum: &EigenDatum) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file_name(datum.parity, datum.r, datum.n));
    let tmp = dir.join(format!(
        ".{}.{}.{}.tmp",
        file_name(datum.parity, datum.r, datum.n),
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let text = serde_json::to_string_pretty(&StoredDatum::from(datum))?;
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EigenDatum {
        EigenDatum {
            r: 9.533_695_261_353_2,
            parity: -1,
            eigen_residual: 4.1e-13,
            coefficients: vec![
                C::new(0.1, -1.0 / 3.0),
                C::new(std::f64::consts::PI, 1e-300),
                C::new(-0.0, 5e-324),
            ],
            n: 3,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("modsym-cache-test-{}", std::process::id()));
        let d = sample();
        let path = store(&dir, &d).unwrap();
        assert!(path.ends_with("eigen_-1_9.533695_3.json"));
        let Lookup::Hit(back, _) = lookup(&dir, -1, 9.5337, 3, 1e-3) else {
            panic!("miss")
        };
        for (a, b) in d.coefficients.iter().zip(&back.coefficients) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(back, d);
        fs::remove_dir_all(dir).unwrap();
    }
}
