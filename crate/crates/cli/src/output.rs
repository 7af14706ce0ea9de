use std::io::Write;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use modsym::{Complex64 as C, Cusp, IntegerMatrix2};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::config::Format;

pub fn complex(z: C) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn cusp(c: &Cusp) -> Value {
    Value::String(if c.is_infinite() { "inf".into() } else { c.to_string() })
}

/// Integers that fit in i64 become JSON numbers, the rest strings.
pub fn bigint(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => Value::String(n.to_string()),
    }
}

pub fn matrix(g: &IntegerMatrix2) -> Value {
    json!([[bigint(&g.a), bigint(&g.b)], [bigint(&g.c), bigint(&g.d)]])
}

/// Tabular view of a result, used by `--format csv`.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

/// What a command hands back before it is wrapped in an envelope.
#[derive(Debug)]
pub struct Report {
    pub params: Value,
    pub result: Value,
    pub diagnostics: Value,
    pub table: Option<Table>,
    /// False when a declared tolerance was missed.
    pub ok: bool,
}

impl Report {
    pub fn new(params: Value, result: Value, diagnostics: Value) -> Self {
        Report {
            params,
            result,
            diagnostics,
            table: None,
            ok: true,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

/// The JSON document printed for every command. Keys are sorted, and
/// everything that varies between identical runs sits under `timestamp`.
pub fn envelope(command: &str, config: Value, report: &Report, elapsed: Duration) -> Value {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    json!({
        "command": command,
        "config": config,
        "params": report.params,
        "result": report.result,
        "diagnostics": report.diagnostics,
        "ok": report.ok,
        "timestamp": {
            "unix_seconds": now.as_secs(),
            "elapsed_seconds": elapsed.as_secs_f64(),
        },
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write<W: Write>(mut w: W, format: Format, env: &Value, table: Option<&Table>) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, env)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            match table {
                Some(t) => {
                    csv.write_record(&t.headers)?;
                    for row in &t.rows {
                        csv.write_record(row)?;
                    }
                }
                None => {
                    csv.write_record(["key", "value"])?;
                    let mut pairs = Vec::new();
                    let mut body = Map::new();
                    body.insert("result".into(), env["result"].clone());
                    body.insert("diagnostics".into(), env["diagnostics"].clone());
                    flatten("", &Value::Object(body), &mut pairs);
                    for (k, v) in pairs {
                        csv.write_record([k, v])?;
                    }
                }
            }
            csv.flush()?;
        }
    }
    Ok(())
}

/// Shortest round-trip representation, in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
