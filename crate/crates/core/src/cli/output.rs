//! CSV and summary writers. Numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::characteristics::CharacteristicTrace;
use crate::error::Result;

pub const TRACE_HEADER: &str = "theta,rho,P1,P2,E1,p1,p2,e,K1,K2,N,C1";

pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn trace_csv(trace: &CharacteristicTrace) -> String {
    let mut out = String::with_capacity(64 * 12 * trace.samples.len());
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let i = trace.dynamics.integrals(&s.state, &s.deriv, trace.b0);
        let row = [s.theta, s.state.rho, s.state.p1, s.state.p2, s.state.e1, s.deriv.p1, s.deriv.p2, s.deriv.e, i.k1, i.k2, s.deriv.density()];
        for v in row {
            out.push_str(&num(v));
            out.push(',');
        }
        out.push_str(&num(i.c1.unwrap_or(f64::NAN)));
        out.push('\n');
    }
    out
}

/// Writes a header row and one line per row.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.put(key, num(value));
    }

    pub fn opt(&mut self, key: &str, value: Option<f64>) {
        match value {
            Some(v) => self.num(key, v),
            None => self.put(key, "none"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k}: {v}");
            s
        })
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<String> {
    fs::write(dir.join(name), contents)?;
    Ok(name.to_string())
}
