//! Report model and exporters.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the canonical scenario configuration.
    pub config_hash: String,
    pub seed: u64,
    /// Omitted unless explicitly requested, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

/// One value of one quantity, optionally at a frequency.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Row {
    pub omega: Option<f64>,
    pub quantity: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlaggedPole {
    pub re: f64,
    pub im: f64,
    pub sigma_min: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelCount {
    pub omega: f64,
    pub plus: usize,
    pub minus: usize,
    pub dropped: usize,
    pub no_ground_state: bool,
}

/// Dense complex kernel on the spatial nodes.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KernelRecord {
    pub name: String,
    pub omega: Option<f64>,
    pub nodes: Vec<f64>,
    /// Row-major real parts.
    pub re: Vec<f64>,
    /// Row-major imaginary parts.
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Analysis {
    pub name: String,
    pub status: Status,
    /// Machine-readable failure or skip code.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub message: String,
    pub metrics: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    #[serde(default)]
    pub poles: Vec<FlaggedPole>,
    #[serde(default)]
    pub channels: Vec<ChannelCount>,
    #[serde(default)]
    pub kernels: Vec<KernelRecord>,
}

impl Analysis {
    pub fn new(name: &str) -> Self {
        Analysis {
            name: name.to_string(),
            status: Status::Pass,
            reason: None,
            message: String::new(),
            metrics: BTreeMap::new(),
            rows: Vec::new(),
            poles: Vec::new(),
            channels: Vec::new(),
            kernels: Vec::new(),
        }
    }

    pub fn skipped(name: &str, reason: &str, message: String) -> Self {
        Analysis {
            status: Status::Skipped,
            reason: Some(reason.to_string()),
            message,
            ..Analysis::new(name)
        }
    }

    pub fn failed(name: &str, reason: &str, message: String) -> Self {
        Analysis {
            status: Status::Fail,
            reason: Some(reason.to_string()),
            message,
            ..Analysis::new(name)
        }
    }

    pub fn row(&mut self, omega: Option<f64>, quantity: &str, value: f64) {
        self.rows.push(Row {
            omega,
            quantity: quantity.to_string(),
            value,
        });
    }

    /// Records `value` as a metric and fails the analysis with `reason` if
    /// it exceeds `tolerance` (or is not finite).
    pub fn check(&mut self, metric: &str, value: f64, tolerance: f64, reason: &str) {
        self.metrics.insert(metric.to_string(), value);
        self.metrics
            .insert(format!("{metric}_tolerance"), tolerance);
        if !(value <= tolerance) && self.status == Status::Pass {
            self.status = Status::Fail;
            self.reason = Some(reason.to_string());
            self.message = format!("{metric} = {value:.3e} exceeds {tolerance:.3e}");
        }
    }

    pub fn require(&mut self, ok: bool, reason: &str, message: String) {
        if !ok && self.status == Status::Pass {
            self.status = Status::Fail;
            self.reason = Some(reason.to_string());
            self.message = message;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub provenance: Provenance,
    pub analyses: Vec<Analysis>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.analyses.iter().all(|a| a.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError::Schema(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn io(path: &Path, e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Io(format!("{}: {e}", path.display()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Writes the report into `dir` and returns the files written.
///
/// JSON: `report.json`. CSV: `analyses.csv` (one row per analysis),
/// `rows.csv` (one row per (ω, quantity)), `kernels.csv` (one row per
/// (kernel, ω, i, j), ω-major then row-major) and one dense file per kernel
/// under `kernels/`.
pub fn export(report: &Report, format: Format, dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    match format {
        Format::Json => {
            let path = dir.join("report.json");
            fs::write(&path, report.to_json()).map_err(|e| io(&path, e))?;
            Ok(vec![path])
        }
        Format::Csv => export_csv(report, dir),
    }
}

fn export_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let mut out = Vec::new();

    let path = dir.join("analyses.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    w.write_record(["analysis", "status", "reason", "message"])
        .map_err(|e| io(&path, e))?;
    for a in &report.analyses {
        let status = serde_json::to_value(a.status).expect("status serializes");
        w.write_record([
            a.name.as_str(),
            status.as_str().unwrap_or_default(),
            a.reason.as_deref().unwrap_or(""),
            a.message.as_str(),
        ])
        .map_err(|e| io(&path, e))?;
    }
    w.flush().map_err(|e| io(&path, e))?;
    out.push(path);

    let path = dir.join("rows.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    w.write_record(["analysis", "omega", "quantity", "value"])
        .map_err(|e| io(&path, e))?;
    for a in &report.analyses {
        for (k, v) in &a.metrics {
            w.write_record([a.name.as_str(), "", k.as_str(), &format!("{v:e}")])
                .map_err(|e| io(&path, e))?;
        }
        for r in &a.rows {
            w.write_record([
                a.name.as_str(),
                &opt(r.omega),
                r.quantity.as_str(),
                &format!("{:e}", r.value),
            ])
            .map_err(|e| io(&path, e))?;
        }
    }
    w.flush().map_err(|e| io(&path, e))?;
    out.push(path);

    let path = dir.join("kernels.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    w.write_record([
        "analysis", "kernel", "omega", "i", "j", "z_i", "z_j", "re", "im",
    ])
    .map_err(|e| io(&path, e))?;
    for a in &report.analyses {
        for k in &a.kernels {
            let n = k.nodes.len();
            for i in 0..n {
                for j in 0..n {
                    w.write_record([
                        a.name.clone(),
                        k.name.clone(),
                        opt(k.omega),
                        i.to_string(),
                        j.to_string(),
                        format!("{:e}", k.nodes[i]),
                        format!("{:e}", k.nodes[j]),
                        format!("{:e}", k.re[i * n + j]),
                        format!("{:e}", k.im[i * n + j]),
                    ])
                    .map_err(|e| io(&path, e))?;
                }
            }
        }
    }
    w.flush().map_err(|e| io(&path, e))?;
    out.push(path);

    let kdir = dir.join("kernels");
    let mut index = 0;
    for a in &report.analyses {
        for k in &a.kernels {
            fs::create_dir_all(&kdir).map_err(|e| io(&kdir, e))?;
            let path = kdir.join(format!("{index:04}_{}_{}.csv", a.name, k.name));
            write_dense(&path, report, k)?;
            out.push(path);
            index += 1;
        }
    }
    Ok(out)
}

fn write_dense(path: &Path, report: &Report, k: &KernelRecord) -> Result<(), ConfigError> {
    let n = k.nodes.len();
    let mut f = fs::File::create(path).map_err(|e| io(path, e))?;
    let mut s = String::new();
    s.push_str(&format!("# kernel: {}\n", k.name));
    s.push_str(&format!("# scenario: {}\n", report.scenario));
    s.push_str(&format!(
        "# config_hash: {}\n",
        report.provenance.config_hash
    ));
    s.push_str(&format!("# omega: {}\n", opt(k.omega)));
    s.push_str(&format!("# size: {n} x {n}\n"));
    s.push_str("# layout: first column is the row node z_i; then for each column node z_j\n");
    s.push_str("# two columns re(K(z_i, z_j)) and im(K(z_i, z_j)), interleaved.\n");
    s.push_str("# the header row lists the column node coordinate for both halves.\n");
    s.push('z');
    for z in &k.nodes {
        s.push_str(&format!(",re@{z:e},im@{z:e}"));
    }
    s.push('\n');
    for i in 0..n {
        s.push_str(&format!("{:e}", k.nodes[i]));
        for j in 0..n {
            s.push_str(&format!(",{:e},{:e}", k.re[i * n + j], k.im[i * n + j]));
        }
        s.push('\n');
    }
    f.write_all(s.as_bytes()).map_err(|e| io(path, e))
}
