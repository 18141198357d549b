//! Machine-readable verification results.
//!
//! JSON keeps full precision (shortest round-trip form), CSV prints residuals
//! with six significant digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraTag;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv output is not utf-8")]
    Utf8,
}

/// One measured quantity of one check on one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    /// The specific quantity measured within the check, e.g. `gram` or `k_relations`.
    pub quantity: String,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub n_range: [u32; 2],
    /// `None` when the residual came out non-finite.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra_tag: Option<AlgebraTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckReport {
    /// A row whose pass flag is `residual < tolerance`.
    pub fn measured(
        check: &str,
        quantity: &str,
        family: &str,
        params: BTreeMap<String, f64>,
        n_range: [u32; 2],
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let finite = residual.is_finite().then_some(residual);
        Self {
            check: check.to_string(),
            quantity: quantity.to_string(),
            family: family.to_string(),
            params,
            alpha: None,
            n_range,
            max_residual: finite,
            tolerance,
            pass: finite.is_some_and(|r| r < tolerance),
            value: None,
            algebra_tag: None,
            c_a: None,
            c_b: None,
            e: None,
            a0: None,
            a1: None,
            detail: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Settings echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub families: Vec<String>,
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    pub alpha_set: Vec<f64>,
    pub tail_tol: f64,
    pub tol_overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub library: String,
    pub version: String,
    pub config: ConfigEcho,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(config: ConfigEcho, checks: Vec<CheckReport>) -> Self {
        Self {
            library: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        checks_to_csv(&self.checks)
    }
}

fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

fn opt6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

/// Flat rows with a header line.
pub fn checks_to_csv(checks: &[CheckReport]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "check",
        "quantity",
        "alpha",
        "n_min",
        "n_max",
        "max_residual",
        "tolerance",
        "pass",
        "value",
        "algebra_tag",
    ])?;
    for c in checks {
        w.write_record([
            c.family.clone(),
            c.check.clone(),
            c.quantity.clone(),
            c.alpha.map(|a| a.to_string()).unwrap_or_default(),
            c.n_range[0].to_string(),
            c.n_range[1].to_string(),
            c.max_residual.map(sig6).unwrap_or_else(|| "nan".into()),
            sig6(c.tolerance),
            c.pass.to_string(),
            opt6(c.value),
            c.algebra_tag
                .map(|t| t.as_str().to_string())
                .unwrap_or_default(),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ReportError::Csv(e.into_error().into()))?;
    String::from_utf8(bytes).map_err(|_| ReportError::Utf8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut params = BTreeMap::new();
        params.insert("mu".to_string(), 2.0);
        let row = CheckReport::measured(
            "eigen",
            "h1",
            "charlier",
            params,
            [0, 12],
            1.234567e-15,
            1e-9,
        )
        .with_value(0.1 + 0.2);
        let bad = CheckReport::measured(
            "eigen",
            "h1",
            "charlier",
            BTreeMap::new(),
            [0, 1],
            f64::NAN,
            1e-9,
        );
        Report::new(
            ConfigEcho {
                command: "report".into(),
                families: vec!["charlier:mu=2".into()],
                checks: vec!["eigen".into()],
                n_max: None,
                alpha_set: vec![0.0, 0.5, 1.0],
                tail_tol: 1e-16,
                tol_overrides: BTreeMap::new(),
            },
            vec![row, bad],
        )
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let r = sample();
        assert!(!r.pass);
        let text = r.to_json().unwrap();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), text);
        assert!(text.contains("0.30000000000000004"));
    }

    #[test]
    fn csv_rows() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("family,check,quantity"));
        assert!(lines[1].contains("1.23457e-15"));
        assert!(lines[2].contains("nan"));
    }
}
