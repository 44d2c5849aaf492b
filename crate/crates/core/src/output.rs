//! Artifact emission: binary graymaps, metric tables and run manifests.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::SetMask;

/// Writes `m` as a binary PGM: marked cells black, row 0 at the top.
pub fn emit_mask_image(m: &SetMask, path: &Path) -> Result<()> {
    let vp = m.viewport();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let payload: Vec<u8> = m.bits().iter().map(|&b| if b { 0 } else { 255 }).collect();
    write!(w, "P5\n{} {}\n255\n", vp.cols(), vp.rows())
        .and_then(|_| w.write_all(&payload))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// C `%g` with six significant digits.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // rounding to six digits may bump the exponent, so read it back
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => f.write_str(&format_g(*x)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StageStatus {
    Ok,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub seconds: f64,
    pub metrics: Vec<(String, Value)>,
}

impl StageRecord {
    pub fn metric(&self, name: &str) -> Option<&Value> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub config_echo: String,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<PathBuf>,
}

impl RunManifest {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn metric(&self, stage: &str, metric: &str) -> Option<&Value> {
        self.stage(stage).and_then(|s| s.metric(metric))
    }

    pub fn failed_stages(&self) -> Vec<&str> {
        self.stages
            .iter()
            .filter(|s| matches!(s.status, StageStatus::Failed(_)))
            .map(|s| s.name.as_str())
            .collect()
    }

    /// Human-readable manifest: config echo, stage timings and statuses,
    /// artifact list.
    pub fn render(&self) -> String {
        let mut s = String::from("# config\n");
        s.push_str(&self.config_echo);
        s.push_str("\n# stages\n");
        for st in &self.stages {
            let status = match &st.status {
                StageStatus::Ok => "ok".to_string(),
                StageStatus::Failed(e) => format!("failed: {e}"),
            };
            s.push_str(&format!("{} {} {:.3}s\n", st.name, status, st.seconds));
        }
        s.push_str("# artifacts\n");
        for a in &self.artifacts {
            s.push_str(&format!("{}\n", a.display()));
        }
        s
    }
}

/// Writes the metric table `stage,metric,value`. Timings are left out so
/// that identical runs produce identical tables.
pub fn emit_report(manifest: &RunManifest, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "stage,metric,value")?;
        for st in &manifest.stages {
            if let StageStatus::Failed(e) = &st.status {
                writeln!(w, "{},error,{}", st.name, e.replace(',', ";"))?;
            }
            for (k, v) in &st.metrics {
                writeln!(w, "{},{},{}", st.name, k, v)?;
            }
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
