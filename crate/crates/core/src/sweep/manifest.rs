//! Sweep manifests: the resolved spec of every run plus integrator settings
//! and outcome, as `key = value` text that parses back exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::{EvolveOptions, POSITIVITY_TOL, RENORMALIZE_TOL, STEP_HALVING_TOL};
use crate::error::{Error, Result};
use crate::model::SystemSpec;

use super::config;
use super::preset::{SweepParam, SweepPlan};

pub const FILE_NAME: &str = "manifest.txt";
pub const TOOL: &str = concat!("qbattery ", env!("CARGO_PKG_VERSION"));
pub const INTEGRATOR: &str = "rk4 fixed-step";

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok { samples: usize },
    Failed { exit_code: i32, message: String },
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RunStatus::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRun {
    /// CSV file name relative to the output directory.
    pub file: String,
    pub value: f64,
    pub spec: SystemSpec,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub tool: String,
    pub label: String,
    pub varied: SweepParam,
    pub default_values: bool,
    pub options: EvolveOptions,
    pub runs: Vec<ManifestRun>,
}

impl Manifest {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| !r.status.is_ok()).count()
    }

    /// Exit code of the first failed run, or 0.
    pub fn exit_code(&self) -> i32 {
        self.runs
            .iter()
            .find_map(|r| match &r.status {
                RunStatus::Failed { exit_code, .. } => Some(*exit_code),
                RunStatus::Ok { .. } => None,
            })
            .unwrap_or(0)
    }

    /// Plan that regenerates the same runs.
    pub fn plan(&self) -> Result<SweepPlan> {
        let first = self.runs.first().ok_or_else(|| Error::Usage("manifest lists no runs".into()))?;
        let base = first.spec.clone();
        let values: Vec<f64> = self.runs.iter().map(|r| r.value).collect();
        for (k, run) in self.runs.iter().enumerate() {
            if self.varied.apply(&base, run.value)? != run.spec {
                return Err(Error::Usage(format!("run {k} differs from run 0 in more than {}", self.varied)));
            }
        }
        let mut plan = SweepPlan::new(base, self.varied, values, self.label.clone())?;
        plan.default_values = self.default_values;
        Ok(plan)
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let failures = self.failures();
        let values: Vec<String> = self.runs.iter().map(|r| r.value.to_string()).collect();
        let _ = writeln!(w, "# qbattery sweep manifest");
        let _ = writeln!(w, "tool = {}", self.tool);
        let _ = writeln!(w, "label = {}", self.label);
        let _ = writeln!(w, "varied = {}", self.varied);
        let _ = writeln!(w, "values = {}", values.join(", "));
        let source = if self.default_values { "preset default" } else { "user" };
        let _ = writeln!(w, "value_source = {source}");
        let _ = writeln!(w, "integrator = {INTEGRATOR}");
        let _ = writeln!(w, "positivity_tol = {POSITIVITY_TOL:e}");
        let _ = writeln!(w, "renormalize_tol = {RENORMALIZE_TOL:e}");
        let _ = writeln!(w, "step_halving_tol = {STEP_HALVING_TOL:e}");
        let _ = writeln!(w, "allow_nonpositive = {}", self.options.allow_nonpositive);
        let _ = writeln!(w, "verify_step = {}", self.options.verify_step);
        let _ = writeln!(w, "runs = {}", self.runs.len());
        let _ = writeln!(w, "failed = {failures}");
        let _ = writeln!(w, "status = {}", if failures == 0 { "ok" } else { "failed" });
        for (k, run) in self.runs.iter().enumerate() {
            let _ = writeln!(w);
            let _ = writeln!(w, "[run {k}]");
            let _ = writeln!(w, "file = {}", run.file);
            let _ = writeln!(w, "value = {}", run.value);
            match &run.status {
                RunStatus::Ok { samples } => {
                    let _ = writeln!(w, "status = ok");
                    let _ = writeln!(w, "samples = {samples}");
                }
                RunStatus::Failed { exit_code, message } => {
                    let _ = writeln!(w, "status = failed");
                    let _ = writeln!(w, "exit_code = {exit_code}");
                    let _ = writeln!(w, "message = {}", message.replace(['\n', '\r'], " "));
                }
            }
            w.push_str(&config::emit_config(&run.spec));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tool = None;
        let mut label = None;
        let mut varied = None;
        let mut default_values = false;
        let mut options = EvolveOptions::default();
        let mut runs: Vec<RunDraft> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line, msg };
            if let Some(header) = content.strip_prefix('[') {
                let k = header
                    .strip_suffix(']')
                    .and_then(|h| h.strip_prefix("run "))
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| perr(format!("bad section header '{content}'")))?;
                if k != runs.len() {
                    return Err(perr(format!("expected [run {}], got [run {k}]", runs.len())));
                }
                runs.push(RunDraft::default());
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| perr(format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let flag = |v: &str| match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(perr(format!("{key} must be true or false"))),
            };

            let Some(run) = runs.last_mut() else {
                match key {
                    "tool" => tool = Some(value.to_string()),
                    "label" => label = Some(value.to_string()),
                    "varied" => varied = Some(value.parse::<SweepParam>().map_err(|e| perr(e.to_string()))?),
                    "value_source" => default_values = value == "preset default",
                    "allow_nonpositive" => options.allow_nonpositive = flag(value)?,
                    "verify_step" => options.verify_step = flag(value)?,
                    // Informational; recomputed on output.
                    "values" | "integrator" | "positivity_tol" | "renormalize_tol" | "step_halving_tol" | "runs"
                    | "failed" | "status" => {}
                    other => return Err(perr(format!("unknown manifest key '{other}'"))),
                }
                continue;
            };
            match key {
                "file" => run.file = Some(value.to_string()),
                "value" => run.value = Some(config::parse_real(value).map_err(perr)?),
                "status" => run.ok = Some(value == "ok"),
                "samples" => run.samples = value.parse().map_err(|e| perr(format!("bad samples: {e}")))?,
                "exit_code" => run.exit_code = value.parse().map_err(|e| perr(format!("bad exit_code: {e}")))?,
                "message" => run.message = value.to_string(),
                _ => config::set_key(&mut run.spec, key, value).map_err(perr)?,
            }
        }

        let missing = |what: &str| Error::Parse { line: 0, msg: format!("manifest has no {what}") };
        let runs = runs
            .into_iter()
            .enumerate()
            .map(|(k, d)| {
                let status = match d.ok {
                    Some(true) => RunStatus::Ok { samples: d.samples },
                    Some(false) => RunStatus::Failed { exit_code: d.exit_code, message: d.message },
                    None => return Err(missing(&format!("status for run {k}"))),
                };
                Ok(ManifestRun {
                    file: d.file.ok_or_else(|| missing(&format!("file for run {k}")))?,
                    value: d.value.ok_or_else(|| missing(&format!("value for run {k}")))?,
                    spec: d.spec,
                    status,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tool: tool.ok_or_else(|| missing("tool"))?,
            label: label.ok_or_else(|| missing("label"))?,
            varied: varied.ok_or_else(|| missing("varied"))?,
            default_values,
            options,
            runs,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Reads `manifest.txt` from a sweep output directory.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        Self::read(&dir.join(FILE_NAME))
    }
}

#[derive(Default)]
struct RunDraft {
    file: Option<String>,
    value: Option<f64>,
    ok: Option<bool>,
    samples: usize,
    exit_code: i32,
    message: String,
    spec: SystemSpec,
}
