use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Passes when `value <= limit`.
    AtMost,
    /// Passes when `value >= limit`.
    AtLeast,
    /// Reported only.
    Info,
}

/// One reported number together with the limit it is held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: Option<f64>,
}

impl Quantity {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Quantity {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            limit: Some(limit),
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Quantity {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            limit: Some(limit),
        }
    }

    pub fn info(name: &str, value: f64) -> Self {
        Quantity {
            name: name.into(),
            value,
            relation: Relation::Info,
            limit: None,
        }
    }

    pub fn holds(&self) -> bool {
        match (self.relation, self.limit) {
            (Relation::AtMost, Some(l)) => self.value <= l,
            (Relation::AtLeast, Some(l)) => self.value >= l,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Acceptance criterion this check belongs to, if any.
    pub criterion: Option<u32>,
    pub suite: String,
    pub name: String,
    /// Library operations exercised, as `module.op`.
    pub formula: String,
    pub inputs_hash: String,
    pub samples: usize,
    pub quantities: Vec<Quantity>,
    pub passed: bool,
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(
        criterion: Option<u32>,
        name: &str,
        formula: &str,
        inputs: &str,
        samples: usize,
    ) -> Self {
        CheckRecord {
            criterion,
            suite: String::new(),
            name: name.into(),
            formula: formula.into(),
            inputs_hash: crate::config::digest(inputs),
            samples,
            quantities: Vec::new(),
            passed: true,
            note: None,
        }
    }

    pub fn push(&mut self, q: Quantity) {
        self.passed &= q.holds();
        self.quantities.push(q);
    }

    /// Marks the check failed with the error text.
    pub fn fail(mut self, err: impl std::fmt::Display) -> Self {
        self.passed = false;
        self.note = Some(err.to_string());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub tool_version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
    pub timestamp_unix: u64,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            threads: rayon::current_num_threads(),
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Everything that must be identical between two runs with the same config and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub suite: String,
    pub seed: u64,
    pub config_hash: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub environment: Environment,
    pub body: ReportBody,
}

impl Report {
    pub fn new(suite: &str, seed: u64, config_hash: String, checks: Vec<CheckRecord>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            environment: Environment::current(),
            body: ReportBody {
                suite: suite.into(),
                seed,
                config_hash,
                passed: checks.iter().all(|c| c.passed),
                checks,
            },
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// One row per quantity.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "suite",
            "criterion",
            "check",
            "formula",
            "inputs_hash",
            "quantity",
            "value",
            "relation",
            "limit",
            "passed",
        ])?;
        for c in &self.body.checks {
            let crit = c.criterion.map(|k| k.to_string()).unwrap_or_default();
            if c.quantities.is_empty() {
                w.write_record([
                    &c.suite,
                    &crit,
                    &c.name,
                    &c.formula,
                    &c.inputs_hash,
                    "",
                    "",
                    "",
                    "",
                    &c.passed.to_string(),
                ])?;
            }
            for q in &c.quantities {
                let rel = serde_json::to_value(q.relation)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                w.write_record([
                    c.suite.as_str(),
                    &crit,
                    &c.name,
                    &c.formula,
                    &c.inputs_hash,
                    &q.name,
                    &fmt_f64(q.value),
                    &rel,
                    &q.limit.map(fmt_f64).unwrap_or_default(),
                    &c.passed.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
