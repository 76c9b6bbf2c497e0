use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use hartree_core::diagnostics::{
    fit_component, hls_audit, pohozaev_residual, symmetry_deviation, Component, DecayFit,
    FitWindow, HlsAudit,
};
use hartree_core::grid::{radial_profile, write_field};
use hartree_core::{Error, Functional, SolveReport, Solver, StatePair};
use serde::Serialize;

use crate::check::CheckReport;
use crate::config::{ConfigError, RunConfig};
use crate::exit;

/// A value, or the reason it could not be computed.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Maybe<T> {
    Value(T),
    Failed { error: String },
}

impl<T> From<hartree_core::Result<T>> for Maybe<T> {
    fn from(r: hartree_core::Result<T>) -> Self {
        match r {
            Ok(v) => Maybe::Value(v),
            Err(e) => Maybe::Failed {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentPair<T> {
    pub u: T,
    pub v: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowFits {
    pub window: FitWindow,
    pub u: Maybe<DecayFit>,
    pub v: Maybe<DecayFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub pohozaev_residual: Maybe<f64>,
    pub symmetry_deviation: ComponentPair<Maybe<f64>>,
    pub decay: Vec<WindowFits>,
    pub hls: Maybe<HlsAudit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    Stagnation,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutput {
    pub status: Status,
    pub error: Option<String>,
    pub config: RunConfig,
    pub classification: CheckReport,
    pub solve: Option<SolveReport>,
    pub diagnostics: Diagnostics,
}

pub fn diagnose(functional: &Functional, w: &StatePair, windows: &[FitWindow]) -> Diagnostics {
    let params = functional.params();
    Diagnostics {
        pohozaev_residual: pohozaev_residual(functional, w).into(),
        symmetry_deviation: ComponentPair {
            u: symmetry_deviation(&w.u).into(),
            v: symmetry_deviation(&w.v).into(),
        },
        decay: windows
            .iter()
            .map(|&window| WindowFits {
                window,
                u: fit_component(params, w, Component::U, window).into(),
                v: fit_component(params, w, Component::V, window).into(),
            })
            .collect(),
        hls: hls_audit(functional, w).into(),
    }
}

fn write_profile(path: &Path, functional: &Functional, w: &StatePair) -> hartree_core::Result<()> {
    let pot = functional.potentials(w)?;
    let center = w.spec().unflatten(w.u.argmax_abs());
    let pu = radial_profile(&w.u, &center);
    let pv = radial_profile(&w.v, &center);
    let iav = radial_profile(&pot.of_v, &center);
    let iau = radial_profile(&pot.of_u, &center);
    let mut out = csv::Writer::from_path(path).map_err(csv_error)?;
    out.write_record([
        "r", "u_mean", "v_mean", "u_max", "v_max", "Iav_mean", "Iau_mean",
    ])
    .map_err(csv_error)?;
    for i in 0..pu.len() {
        let row = [
            pu.radii[i],
            pu.mean[i],
            pv.mean[i],
            pu.max_abs[i],
            pv.max_abs[i],
            iav.mean[i],
            iau.mean[i],
        ];
        out.write_record(row.iter().map(|x| x.to_string()))
            .map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn write_outputs(
    dir: &Path,
    functional: &Functional,
    w: &StatePair,
    output: &SolveOutput,
) -> hartree_core::Result<()> {
    fs::create_dir_all(dir)?;
    write_field(BufWriter::new(File::create(dir.join("u.hfld"))?), &w.u)?;
    write_field(BufWriter::new(File::create(dir.join("v.hfld"))?), &w.v)?;
    write_profile(&dir.join("profile.csv"), functional, w)?;
    let mut report = BufWriter::new(File::create(dir.join("report.json"))?);
    serde_json::to_writer_pretty(&mut report, output)?;
    std::io::Write::flush(&mut report)?;
    Ok(())
}

pub fn run(config_path: &Path, out: Option<PathBuf>) -> i32 {
    let cfg = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e @ ConfigError::Missing { .. }) => {
            eprintln!("error: {e}");
            return exit::NO_INPUT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    let Some(dir) = out.or_else(|| cfg.output.dir.clone()) else {
        eprintln!("error: no output directory (pass --out or set output.dir)");
        return exit::USAGE;
    };
    let prepared = cfg
        .solve_config()
        .and_then(|sc| Ok((cfg.windows(&sc.spec)?, sc)));
    let (windows, solve_cfg) = match prepared {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    let params = solve_cfg.params;
    let solver = match Solver::new(solve_cfg) {
        Ok(s) => s,
        Err(e @ Error::Refused(_)) => {
            eprintln!("error: {e}; set solver.force to run anyway");
            return exit::NONEXISTENCE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };

    let (w, report, status, error) = match solver.solve() {
        Ok((w, report)) => {
            let status = if report.converged {
                Status::Converged
            } else {
                Status::MaxIterations
            };
            (w, Some(report), status, None)
        }
        Err(Error::Stagnation {
            iterations,
            halvings,
            state,
        }) => {
            let msg = Error::Stagnation {
                iterations,
                halvings,
                state: state.clone(),
            }
            .to_string();
            (*state, None, Status::Stagnation, Some(msg))
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::FAILED;
        }
    };
    let diagnostics = diagnose(solver.functional(), &w, &windows);
    let output = SolveOutput {
        status,
        error,
        config: cfg,
        classification: CheckReport::new(&params),
        solve: report,
        diagnostics,
    };
    if let Err(e) = write_outputs(&dir, solver.functional(), &w, &output) {
        eprintln!("error: writing {}: {e}", dir.display());
        return exit::FAILED;
    }
    match &output.solve {
        Some(r) => eprintln!(
            "{:?} after {} iterations: residual {:.3e}, energy {:.12}",
            status, r.iterations, r.residual, r.c_n
        ),
        None => eprintln!("{:?}", status),
    }
    if status == Status::Converged {
        exit::OK
    } else {
        exit::FAILED
    }
}
