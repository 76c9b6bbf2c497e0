use std::path::{Path, PathBuf};

use hartree_core::diagnostics::FitWindow;
use hartree_core::{GridSpec, Init, ProblemParams, SolveConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSection,
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Gaussian,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub init: InitKind,
    pub seed: u64,
    pub step0: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub symmetrize_every: usize,
    pub force: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            init: InitKind::Gaussian,
            seed: 0,
            step0: 0.5,
            tol: 1e-6,
            max_iters: 5000,
            symmetrize_every: 10,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Fit windows as fractions `[lo, hi]` of `L`.
    pub windows: Vec<[f64; 2]>,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            windows: vec![[0.35, 0.7], [0.30, 0.65], [0.40, 0.75]],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Missing {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Missing {
            path: path.into(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.into(),
            source,
        })
    }

    pub fn problem(&self) -> Result<ProblemParams, ConfigError> {
        let p = self.params;
        ProblemParams::new(p.n, p.alpha, p.p, p.q).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn spec(&self) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.params.n, self.grid.l, self.grid.m)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn windows(&self, spec: &GridSpec) -> Result<Vec<FitWindow>, ConfigError> {
        self.diagnostics
            .windows
            .iter()
            .map(|&[lo, hi]| {
                if 0.0 <= lo && lo < hi && hi <= 1.0 {
                    Ok(FitWindow::fractions(spec, lo, hi))
                } else {
                    Err(ConfigError::Invalid(format!(
                        "fit window [{lo}, {hi}] is not inside [0, 1]"
                    )))
                }
            })
            .collect()
    }

    pub fn solve_config(&self) -> Result<SolveConfig, ConfigError> {
        let params = self.problem()?;
        let mut cfg = SolveConfig::new(params, self.spec()?);
        let s = &self.solver;
        cfg.init = match s.init {
            InitKind::Gaussian => Init::standard_gaussian(params.n()),
            InitKind::Random => Init::RandomPositive { seed: s.seed },
        };
        cfg.step0 = s.step0;
        cfg.tol_residual = s.tol;
        cfg.max_iters = s.max_iters;
        cfg.symmetrize_every = s.symmetrize_every;
        cfg.force = s.force;
        cfg.validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}
