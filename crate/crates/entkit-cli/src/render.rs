//! Output document assembly. Documents are JSON objects with sorted keys;
//! floats print in shortest round-trip form, so every value carries its full
//! precision and reruns are byte-identical.

use entkit_core::{CMatrix, CVector, Decomposition};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn vectors(vs: &[CVector]) -> Value {
    Value::Array(vs.iter().map(vector).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json!(x)).collect())
}

pub fn decomposition(d: &Decomposition) -> Value {
    Value::Array(
        d.iter().map(|(weight, phi)| json!({ "weight": weight, "vector": vector(phi) })).collect(),
    )
}

/// One verified identity: either a deviation against a tolerance or a plain
/// predicate.
enum Check {
    Metric { name: String, deviation: f64, tolerance: f64, pass: bool },
    Predicate { name: String, pass: bool },
}

impl Check {
    fn pass(&self) -> bool {
        match self {
            Check::Metric { pass, .. } | Check::Predicate { pass, .. } => *pass,
        }
    }
}

/// Ordered list of checks; the order of insertion is the order of output.
#[derive(Default)]
pub struct Checks {
    items: Vec<Check>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a deviation that must stay at or below `tolerance`.
    pub fn metric(&mut self, name: impl Into<String>, deviation: f64, tolerance: f64) {
        let pass = deviation.is_finite() && deviation <= tolerance;
        self.items.push(Check::Metric { name: name.into(), deviation, tolerance, pass });
    }

    /// Records a yes/no identity.
    pub fn predicate(&mut self, name: impl Into<String>, pass: bool) {
        self.items.push(Check::Predicate { name: name.into(), pass });
    }

    pub fn pass(&self) -> bool {
        self.items.iter().all(Check::pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.items
            .iter()
            .filter_map(|c| match c {
                Check::Metric { deviation, .. } => Some(*deviation),
                Check::Predicate { .. } => None,
            })
            .fold(0.0, f64::max)
    }

    fn to_value(&self) -> Value {
        Value::Array(
            self.items
                .iter()
                .map(|c| match c {
                    Check::Metric { name, deviation, tolerance, pass } => json!({
                        "name": name,
                        "deviation": deviation,
                        "tolerance": tolerance,
                        "pass": pass,
                    }),
                    Check::Predicate { name, pass } => json!({ "name": name, "pass": pass }),
                })
                .collect(),
        )
    }
}

/// The single document a run prints to stdout.
pub struct Document {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub checks: Checks,
}

impl Document {
    pub fn pass(&self) -> bool {
        self.checks.pass()
    }

    pub fn render(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.into()));
        root.insert("inputs".into(), self.inputs.clone());
        root.insert("results".into(), self.results.clone());
        root.insert("checks".into(), self.checks.to_value());
        root.insert("max_deviation".into(), json!(self.checks.max_deviation()));
        root.insert("pass".into(), Value::Bool(self.pass()));
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("documents hold only finite numbers");
        text.push('\n');
        text
    }
}
