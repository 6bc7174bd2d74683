//! Running a sweep into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{evolve_with, EvolveOptions};
use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::par::{self, Execution};

use super::manifest::{Manifest, ManifestRun, RunStatus, FILE_NAME, TOOL};
use super::preset::SweepPlan;
use super::table::TrajectoryTable;

/// Result of [`run_sweep`]; the manifest is also on disk.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

impl SweepReport {
    pub fn csv_path(&self, run: usize) -> PathBuf {
        self.out_dir.join(&self.manifest.runs[run].file)
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.out_dir.join(FILE_NAME)
    }

    /// 0 when every run succeeded.
    pub fn exit_code(&self) -> i32 {
        self.manifest.exit_code()
    }
}

/// CSV name for run `k` of `count`.
pub fn csv_name(k: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(2);
    format!("run_{k:0width$}.csv")
}

/// Runs every point of `plan` on up to `jobs` workers with default options.
pub fn run_sweep(plan: &SweepPlan, out_dir: &Path, jobs: usize) -> Result<SweepReport> {
    if jobs == 0 {
        return Err(Error::Usage("jobs must be at least 1".into()));
    }
    run_sweep_with(plan, out_dir, Execution::from_jobs(jobs), &EvolveOptions::default())
}

/// Runs every point of `plan`. A run that fails is recorded in the manifest
/// and the rest carry on; configuration and directory errors abort early.
pub fn run_sweep_with(plan: &SweepPlan, out_dir: &Path, exec: Execution, opts: &EvolveOptions) -> Result<SweepReport> {
    let specs = plan.specs()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let jobs: Vec<(usize, f64, SystemSpec)> =
        specs.into_iter().zip(&plan.values).enumerate().map(|(k, (spec, &value))| (k, value, spec)).collect();
    let count = jobs.len();
    let runs = par::map_with(&jobs, exec, |(k, value, spec)| {
        let file = csv_name(*k, count);
        let status = run_one(spec, &out_dir.join(&file), opts);
        match &status {
            RunStatus::Ok { samples } => log::info!("run {k} ({} = {value}): {samples} samples", plan.varied),
            RunStatus::Failed { message, .. } => log::warn!("run {k} ({} = {value}) failed: {message}", plan.varied),
        }
        ManifestRun { file, value: *value, spec: spec.clone(), status }
    });

    let manifest = Manifest {
        tool: TOOL.to_string(),
        label: plan.label.clone(),
        varied: plan.varied,
        default_values: plan.default_values,
        options: *opts,
        runs,
    };
    let path = out_dir.join(FILE_NAME);
    fs::write(&path, manifest.emit()).map_err(|e| Error::io(&path, e))?;
    Ok(SweepReport { out_dir: out_dir.to_path_buf(), manifest })
}

/// Re-runs the sweep recorded in `manifest_path` into `out_dir`.
pub fn replay(manifest_path: &Path, out_dir: &Path, exec: Execution) -> Result<SweepReport> {
    let manifest = Manifest::read(manifest_path)?;
    run_sweep_with(&manifest.plan()?, out_dir, exec, &manifest.options)
}

fn run_one(spec: &SystemSpec, path: &Path, opts: &EvolveOptions) -> RunStatus {
    let failed = |err: Error| {
        // Never leave a stale CSV from an earlier run next to a failure.
        if let Err(e) = fs::remove_file(path) {
            if e.kind() != std::io::ErrorKind::NotFound {
                log::warn!("could not remove {}: {e}", path.display());
            }
        }
        RunStatus::Failed { exit_code: err.exit_code(), message: err.to_string() }
    };
    let traj = match evolve_with(spec, opts) {
        Ok(t) => t,
        Err(err) => return failed(err),
    };
    let table = TrajectoryTable::from_trajectory(&traj);
    match fs::write(path, table.to_bytes()) {
        Ok(()) => RunStatus::Ok { samples: table.len() },
        Err(e) => failed(Error::io(path, e)),
    }
}
