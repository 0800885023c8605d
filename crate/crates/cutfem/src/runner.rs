//! Configuration-driven runs: read a JSON config, execute the adaptive
//! loop, write `convergence.csv` and optional `mesh_step_<k>.vtk`
//! snapshots into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use crate::amr::{adapt, AmrRecord, StepSnapshot};
use crate::config::{ResolvedConfig, RunConfig};
use crate::error::{AmrError, RunError};
use crate::output::{render_vtk, snapshot_cell_data, write_csv};

#[derive(Debug)]
pub struct RunSummary {
    pub records: Vec<AmrRecord>,
    pub csv_path: PathBuf,
}

pub fn run_config_file(config_path: &Path, out_dir: &Path) -> Result<RunSummary, RunError> {
    let text = fs::read_to_string(config_path).map_err(|e| {
        RunError::Config(format!(
            "cannot read config file {}: {e}",
            config_path.display()
        ))
    })?;
    let config = RunConfig::from_json(&text)?;
    let resolved = config.resolve()?;
    run_resolved(&resolved, out_dir)
}

pub fn run_resolved(
    resolved: &ResolvedConfig,
    out_dir: &Path,
) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir)?;
    let vtk_every = resolved.config.vtk_every;
    let mut vtk_error: Option<std::io::Error> = None;

    let mut observer = |snap: &StepSnapshot| {
        if vtk_every == 0 || snap.record.step % vtk_every != 0 {
            return;
        }
        let path = out_dir.join(format!("mesh_step_{}.vtk", snap.record.step));
        let data = snapshot_cell_data(snap.mesh, snap.cut, snap.indicators);
        let text = render_vtk(
            &format!("{} step {}", resolved.benchmark.name, snap.record.step),
            snap.mesh,
            &data,
        );
        if let Err(e) = fs::write(&path, text) {
            vtk_error.get_or_insert(e);
        }
    };

    let csv_path = out_dir.join("convergence.csv");
    let records = match adapt(&resolved.benchmark, &resolved.config, Some(&mut observer)) {
        Ok(records) => records,
        Err(AmrError::Config(msg)) => return Err(RunError::Config(msg)),
        Err(err @ AmrError::Solver { .. }) => {
            // Leave the partial history on disk before reporting failure.
            let msg = err.to_string();
            if let AmrError::Solver {
                partial_records, ..
            } = err
            {
                write_csv(&csv_path, &partial_records)?;
            }
            return Err(RunError::Solver(msg));
        }
        Err(other) => return Err(RunError::Config(other.to_string())),
    };

    if let Some(e) = vtk_error {
        return Err(RunError::Io(e));
    }

    write_csv(&csv_path, &records)?;
    Ok(RunSummary { records, csv_path })
}
