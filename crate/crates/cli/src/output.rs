//! Deterministic file output: the sample table (comma-separated, fixed
//! column order, full round-trip precision) and the plain-text audit report.
//! Formats are documented in docs/FORMATS.md.

use std::fmt::Write as _;

/// Fixed column order of the sample table.
pub const SAMPLE_COLUMNS: [&str; 38] = [
    "tau", "x0", "x1", "x2", "x3", "p0", "p1", "p2", "p3", "pi0", "pi1", "pi2", "pi3", "u0",
    "u1", "u2", "u3", "r0", "r1", "r2", "r3", "W0", "W1", "W2", "W3", "S01", "S02", "S03", "S12",
    "S13", "S23", "H", "xibar_xi", "purity", "rad0", "rad1", "rad2", "rad3",
];

pub struct SampleTable {
    buffer: String,
}

impl SampleTable {
    pub fn new(config_hash: &str, seed: u64) -> Self {
        let mut buffer = String::new();
        let _ = writeln!(buffer, "# config_hash={config_hash} seed={seed}");
        let _ = writeln!(buffer, "{}", SAMPLE_COLUMNS.join(","));
        SampleTable { buffer }
    }

    pub fn push_row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), SAMPLE_COLUMNS.len());
        let mut first = true;
        for v in values {
            if !first {
                self.buffer.push(',');
            }
            let _ = write!(self.buffer, "{v:.17e}");
            first = false;
        }
        self.buffer.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buffer
    }
}

/// Direction of a check: residuals stay below tolerance, magnitudes must
/// exceed a floor, or informational values with no gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    UpperBound,
    LowerBound,
    Info,
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub kind: CheckKind,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        match self.kind {
            CheckKind::UpperBound => self.value <= self.threshold,
            CheckKind::LowerBound => self.value >= self.threshold,
            CheckKind::Info => true,
        }
    }
}

/// A deterministic audit: environment echo plus named checks.
#[derive(Debug, Default)]
pub struct AuditReport {
    pub fields: Vec<(String, String)>,
    pub checks: Vec<CheckRow>,
}

impl AuditReport {
    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn check(&mut self, name: &str, value: f64, threshold: f64, kind: CheckKind) {
        self.checks.push(CheckRow {
            name: name.to_string(),
            value,
            threshold,
            kind,
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(CheckRow::pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{k} = {v}");
        }
        for c in &self.checks {
            let op = match c.kind {
                CheckKind::UpperBound => "<=",
                CheckKind::LowerBound => ">=",
                CheckKind::Info => "--",
            };
            let status = if c.kind == CheckKind::Info {
                "INFO"
            } else if c.pass() {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                out,
                "check {name} value={value:.6e} {op} threshold={threshold:.6e} status={status}",
                name = c.name,
                value = c.value,
                threshold = c.threshold,
            );
        }
        let _ = writeln!(out, "result = {}", if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}
