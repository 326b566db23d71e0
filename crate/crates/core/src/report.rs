//! Machine-readable check reports shared by the suites and the CLI.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dqhkr-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// `{schema, command, params, seed, checks, tables?}`. Params are kept in a
/// sorted map and no timings are recorded, so equal inputs give equal bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str, params: Value, seed: u64) -> Self {
        Report { schema: SCHEMA, command: command.into(), params, seed, checks: Vec::new(), tables: Vec::new() }
    }

    /// Record a check; `witness` is `None` when it passed.
    pub fn check(&mut self, name: impl Into<String>, witness: Option<String>) {
        let status = if witness.is_none() { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, witness });
    }

    pub fn pass_if(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        self.check(name, if ok { None } else { Some(witness()) });
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn render_table(f: &mut fmt::Formatter<'_>, t: &Table) -> fmt::Result {
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join(" | ")
    };
    writeln!(f, "{}", t.name)?;
    writeln!(f, "{}", line(&t.columns))?;
    writeln!(f, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"))?;
    for row in &t.rows {
        writeln!(f, "{}", line(row))?;
    }
    Ok(())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (seed {})", self.command, self.seed)?;
        for t in &self.tables {
            render_table(f, t)?;
        }
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            match &c.witness {
                Some(w) => writeln!(f, "{tag}  {:<width$}  {w}", c.name)?,
                None => writeln!(f, "{tag}  {}", c.name)?,
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_and_status() {
        let mut r = Report::new("demo", serde_json::json!({"b": 1, "a": 2}), 7);
        r.check("ok", None);
        assert!(r.passed());
        r.check("bad", Some("x = 1".into()));
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "bad");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["checks"][0]["status"], "pass");
        assert!(v["checks"][0].get("witness").is_none());
        assert_eq!(v["checks"][1]["witness"], "x = 1");
        assert!(v.get("tables").is_none());
        // params keep sorted key order
        assert!(r.to_json().find("\"a\"").unwrap() < r.to_json().find("\"b\"").unwrap());
    }
}
