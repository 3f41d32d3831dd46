//! Tabular outputs rendered as JSON, CSV or markdown.

use hermlocal::lifting::{main_identity, ramification_index};
use hermlocal::strata::{profile_grid, verify_stratum_theorems, StrataBudget};
use hermlocal::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::OutputFormat;

#[derive(Debug, Clone, PartialEq, Eq)]
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

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(r.iter().map(|c| Value::String(c.clone())))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.headers, "rows": rows })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("| {} |\n", self.headers.join(" | "));
        s.push_str(&format!("|{}\n", "---|".repeat(self.headers.len())));
        for r in &self.rows {
            s.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        s
    }

    /// Render; JSON output is wrapped by the caller's envelope.
    pub fn render(
        &self,
        format: OutputFormat,
        envelope: impl FnOnce(Value) -> Value,
    ) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => {
                serde_json::to_string_pretty(&envelope(self.to_json())).expect("serializable")
                    + "\n"
            }
            OutputFormat::Csv => self.to_csv()?,
            OutputFormat::Markdown => self.to_markdown(),
        })
    }
}

/// Columns `p, a, b, length_formula, ledger_total, density_ratio, agree`.
/// `density_ratio` is the common value over `n ∈ {2, 3, 4}`, or every value
/// when they differ.
pub fn main_identity_table(p: u64, pairs: &[(u32, u32)]) -> Result<Table> {
    let rows: Vec<Result<Vec<String>>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let r = main_identity(p, a, b, &[2, 3, 4])?;
            let first = &r.density_ratio[0].1;
            let ratio = if r.density_ratio.iter().all(|(_, v)| v == first) {
                first.clone()
            } else {
                r.density_ratio
                    .iter()
                    .map(|(n, v)| format!("n={n}:{v}"))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            Ok(vec![
                p.to_string(),
                r.a.to_string(),
                r.b.to_string(),
                r.length_formula.to_string(),
                r.ledger_total.to_string(),
                ratio,
                r.agree.to_string(),
            ])
        })
        .collect();
    let mut t = Table::new(&[
        "p",
        "a",
        "b",
        "length_formula",
        "ledger_total",
        "density_ratio",
        "agree",
    ]);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn ramification_table(p: u64, max_s: u32) -> Result<Table> {
    let mut t = Table::new(&["s", "e_s"]);
    for s in 0..=max_s {
        t.push(vec![
            s.to_string(),
            ramification_index(p, s as i64)?.to_string(),
        ]);
    }
    Ok(t)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

pub fn strata_table(
    p: u64,
    max_n: usize,
    max_exp: u32,
    max_sum: u32,
    budget: StrataBudget,
) -> Result<Table> {
    let profiles = profile_grid(max_n, max_exp, max_sum);
    let reports: Vec<_> = profiles
        .par_iter()
        .map(|prof| verify_stratum_theorems(p, prof, budget))
        .collect();
    let mut t = Table::new(&[
        "exponents",
        "m",
        "t0",
        "dim",
        "ord_det_odd",
        "grd_size",
        "max_type",
        "maximal_vertices",
        "irreducible_predicted",
        "irreducible_observed",
        "passed",
    ]);
    for r in reports {
        let r = r?;
        let exps: Vec<String> = r.exponents.iter().map(|e| e.to_string()).collect();
        t.push(vec![
            exps.join(" "),
            r.m.to_string(),
            opt(r.t0),
            opt(r.dim),
            r.hypotheses_hold.to_string(),
            r.grd_size.to_string(),
            r.max_type.to_string(),
            r.maximal_vertex_count.to_string(),
            r.irreducible_predicted.to_string(),
            r.irreducible_observed.to_string(),
            r.passed.to_string(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_identity_rows() {
        let t = main_identity_table(3, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        let tail: Vec<Vec<&str>> = t
            .rows
            .iter()
            .map(|r| r[3..].iter().map(|s| s.as_str()).collect())
            .collect();
        assert_eq!(
            tail,
            vec![
                vec!["1", "1", "1", "true"],
                vec!["5", "5", "5", "true"],
                vec!["2", "2", "2", "true"]
            ]
        );
    }

    #[test]
    fn e_s_rows() {
        let t = ramification_table(3, 4).unwrap();
        let col: Vec<&str> = t.rows.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(col, vec!["1", "4", "12", "36", "108"]);
    }

    #[test]
    fn renderers() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec!["1".into(), "a,b".into()]);
        assert_eq!(t.to_csv().unwrap(), "x,y\n1,\"a,b\"\n");
        assert!(t.to_markdown().starts_with("| x | y |\n|---|---|\n"));
    }
}
