//! Pass reports and numeric bound checks.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::abp::AbpStats;
use crate::circuit::CircuitStats;

/// Relative and absolute slack applied when a bound is only known through
/// its base-2 logarithm, so that float rounding never flips a verdict.
const REL_SLACK: f64 = 1e-12;
const ABS_SLACK: f64 = 1e-12;

/// A non-negative bound value, exact when possible and otherwise an upper
/// estimate of its base-2 logarithm.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Exact(BigUint),
    Log2(f64),
}

/// Exponent of a power bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(u32),
    Real(f64),
}

impl Exponent {
    /// `sqrt(n)`, exact when `n` is a perfect square.
    pub fn sqrt(n: u64) -> Exponent {
        let r = n.isqrt();
        if r * r == n {
            Exponent::Int(r as u32)
        } else {
            Exponent::Real((n as f64).sqrt())
        }
    }

    /// `log2(n)` for `n >= 1`, exact when `n` is a power of two.
    pub fn log2(n: u64) -> Exponent {
        assert!(n >= 1);
        if n.is_power_of_two() {
            Exponent::Int(n.trailing_zeros())
        } else {
            Exponent::Real((n as f64).log2())
        }
    }

    pub fn plus(self, k: u32) -> Exponent {
        match self {
            Exponent::Int(e) => Exponent::Int(e + k),
            Exponent::Real(e) => Exponent::Real(e + k as f64),
        }
    }

    pub fn times(self, k: u32) -> Exponent {
        match self {
            Exponent::Int(e) => Exponent::Int(e * k),
            Exponent::Real(e) => Exponent::Real(e * k as f64),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Int(e) => e as f64,
            Exponent::Real(e) => e,
        }
    }
}

fn up(x: f64) -> f64 {
    x + x.abs() * REL_SLACK + ABS_SLACK
}

fn log2_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    match n.to_f64() {
        Some(f) if f.is_finite() => f.log2(),
        _ => {
            let shift = n.bits() - 64;
            ((n >> shift).to_f64().unwrap()).log2() + shift as f64
        }
    }
}

impl Magnitude {
    pub fn int(n: impl Into<BigUint>) -> Self {
        Magnitude::Exact(n.into())
    }

    pub fn pow2(e: u64) -> Self {
        Magnitude::Exact(BigUint::one() << e)
    }

    /// `t^{log2(n)}`, exact when `t` or `n` is a power of two.
    pub fn pow_log2(t: u64, n: u64) -> Self {
        match Exponent::log2(n) {
            Exponent::Int(k) => Magnitude::Exact(BigUint::from(t).pow(k)),
            Exponent::Real(_) if t.is_power_of_two() => {
                // (2^a)^{log2 n} = n^a
                Magnitude::Exact(BigUint::from(n).pow(t.trailing_zeros()))
            }
            Exponent::Real(e) => Magnitude::Log2(up((t as f64).log2() * e)),
        }
    }

    pub fn plus(self, k: u64) -> Self {
        match self {
            Magnitude::Exact(n) => Magnitude::Exact(n + k),
            Magnitude::Log2(a) => {
                let extra = (k as f64 * (-a).exp2()).ln_1p() / std::f64::consts::LN_2;
                Magnitude::Log2(up(a + extra))
            }
        }
    }

    pub fn times(self, k: u64) -> Self {
        match self {
            Magnitude::Exact(n) => Magnitude::Exact(n * k),
            Magnitude::Log2(a) => Magnitude::Log2(up(a + (k as f64).log2())),
        }
    }

    pub fn pow(self, e: Exponent) -> Self {
        match (self, e) {
            (Magnitude::Exact(n), Exponent::Int(k)) => Magnitude::Exact(n.pow(k)),
            (Magnitude::Exact(n), Exponent::Real(r)) => Magnitude::Log2(up(log2_big(&n) * r)),
            (Magnitude::Log2(a), e) => Magnitude::Log2(up(a * e.as_f64())),
        }
    }

    pub fn admits(&self, observed: &BigUint) -> bool {
        match self {
            Magnitude::Exact(n) => observed <= n,
            Magnitude::Log2(a) => observed.is_zero() || log2_big(observed) <= *a,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(n) => write!(f, "{n}"),
            Magnitude::Log2(a) => write!(f, "2^{a:.6}"),
        }
    }
}

/// Whether a bound is a published claim or a constant chosen by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Published,
    Convention,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub claimed: String,
    pub observed: String,
    pub ok: bool,
    pub source: BoundSource,
}

impl BoundCheck {
    pub fn at_most(name: impl Into<String>, claimed: Magnitude, observed: impl Into<BigUint>, source: BoundSource) -> Self {
        let observed = observed.into();
        BoundCheck {
            name: name.into(),
            ok: claimed.admits(&observed),
            claimed: format!("<= {claimed}"),
            observed: observed.to_string(),
            source,
        }
    }

    pub fn equals(name: impl Into<String>, expected: impl Into<BigUint>, observed: impl Into<BigUint>, source: BoundSource) -> Self {
        let (expected, observed) = (expected.into(), observed.into());
        BoundCheck {
            name: name.into(),
            ok: expected == observed,
            claimed: format!("= {expected}"),
            observed: observed.to_string(),
            source,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool, source: BoundSource) -> Self {
        BoundCheck {
            name: name.into(),
            claimed: "true".into(),
            observed: ok.to_string(),
            ok,
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ObjectStats {
    Circuit(CircuitStats),
    Abp(AbpStats),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassReport {
    pub pass: String,
    pub input: ObjectStats,
    pub output: ObjectStats,
    pub bounds: Vec<BoundCheck>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<PassReport>,
}

impl PassReport {
    pub fn new(pass: impl Into<String>, input: ObjectStats, output: ObjectStats) -> Self {
        PassReport {
            pass: pass.into(),
            input,
            output,
            bounds: Vec::new(),
            notes: BTreeMap::new(),
            stages: Vec::new(),
        }
    }

    pub fn check(&mut self, b: BoundCheck) -> &mut Self {
        self.bounds.push(b);
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.insert(key.to_string(), value.to_string());
        self
    }

    pub fn bound(&self, name: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.name == name)
    }

    /// True when this report and every nested stage pass all their checks.
    pub fn all_ok(&self) -> bool {
        self.bounds.iter().all(|b| b.ok) && self.stages.iter().all(PassReport::all_ok)
    }

    /// Every check in this report and its stages, with the pass that made it.
    pub fn flatten(&self) -> Vec<(&str, &BoundCheck)> {
        let mut out: Vec<(&str, &BoundCheck)> = self.bounds.iter().map(|b| (self.pass.as_str(), b)).collect();
        for s in &self.stages {
            out.extend(s.flatten());
        }
        out
    }
}

/// Serializes a pipeline report with a top-level `all_bounds_ok` flag.
pub fn pipeline_json(report: &PassReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("all_bounds_ok".into(), report.all_ok().into());
    }
    v
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("no reports to aggregate")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub instance: String,
    pub pass: String,
    pub bound: String,
    pub claimed: String,
    pub observed: String,
    pub ok: bool,
    pub source: BoundSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundSummary {
    pub rows: Vec<BoundRow>,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_bounds_ok: bool,
}

/// One row per (instance, bound) across all reports.
pub fn bound_report(reports: &[(String, PassReport)]) -> Result<BoundSummary, ReportError> {
    if reports.is_empty() {
        return Err(ReportError::Empty);
    }
    let rows: Vec<BoundRow> = reports
        .iter()
        .flat_map(|(instance, r)| {
            r.flatten().into_iter().map(move |(pass, b)| BoundRow {
                instance: instance.clone(),
                pass: pass.to_string(),
                bound: b.name.clone(),
                claimed: b.claimed.clone(),
                observed: b.observed.clone(),
                ok: b.ok,
                source: b.source,
            })
        })
        .collect();
    let passed = rows.iter().filter(|r| r.ok).count();
    Ok(BoundSummary {
        total: rows.len(),
        passed,
        failed: rows.len() - passed,
        all_bounds_ok: passed == rows.len(),
        rows,
    })
}

impl BoundSummary {
    /// Fixed-width text table followed by a totals line.
    pub fn table(&self) -> String {
        let headers = ["instance", "pass", "bound", "claimed", "observed", "ok", "source"];
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.instance.clone(),
                    r.pass.clone(),
                    r.bound.clone(),
                    r.claimed.clone(),
                    r.observed.clone(),
                    if r.ok { "ok" } else { "FAIL" }.to_string(),
                    match r.source {
                        BoundSource::Published => "published",
                        BoundSource::Convention => "convention",
                    }
                    .to_string(),
                ]
            })
            .collect();
        let mut widths = headers.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, row: &[String]| {
            let parts: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
        };
        line(&mut out, &headers.map(String::from));
        for row in &cells {
            line(&mut out, row);
        }
        writeln!(out, "{} checks, {} passed, {} failed", self.total, self.passed, self.failed).unwrap();
        out
    }
}
