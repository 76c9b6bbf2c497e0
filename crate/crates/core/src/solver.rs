//! Sobolev-gradient descent on the Nehari set.
//!
//! Each iteration takes the `E`-gradient `g = (-Δ+1)^{-1} R` of the energy,
//! moves to `w - τ g`, and rescales back onto the Nehari set with the closed
//! form `t̄`. The step is halved until the projected energy does not go up.
//! Every few iterations the pair is replaced by a symmetrized copy (Schwarz
//! rearrangement or recentering, projected) when that does not raise the
//! energy.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{
    nehari_factor, EnergyBreakdown, Functional, Potentials, StatePair, INTERACTION_FLOOR,
};
use crate::grid::{Field, GridSpec};
use crate::params::{classify_existence, ExistenceTag, ProblemParams};
use crate::rearrange::SchwarzPlan;

pub const MAX_HALVINGS: usize = 30;

/// Roundoff allowance, relative to `|I|`, when comparing energies of two
/// nearby iterates.
const ENERGY_SLACK: f64 = 1e-14;

/// Allowed relative increase of `I` when symmetrizing.
const SYMMETRIZE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    /// `u = a_u exp(-|x - c_u|² / s_u²)`, and likewise for `v`.
    Gaussian {
        widths: [f64; 2],
        centers: [Vec<f64>; 2],
        amplitudes: [f64; 2],
    },
    /// Sums of a few Gaussian bumps with seeded random centers, widths and
    /// heights.
    RandomPositive { seed: u64 },
}

impl Init {
    /// `u = v = exp(-|x|²)`.
    pub fn standard_gaussian(n: usize) -> Self {
        Init::Gaussian {
            widths: [1.0, 1.0],
            centers: [vec![0.0; n], vec![0.0; n]],
            amplitudes: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub params: ProblemParams,
    pub spec: GridSpec,
    pub init: Init,
    /// Initial step `τ` of every iteration.
    pub step0: f64,
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Symmetrize every this many iterations; 0 disables it.
    pub symmetrize_every: usize,
    /// Run even where the theory rules out (or does not cover) solutions.
    pub force: bool,
}

impl SolveConfig {
    pub fn new(params: ProblemParams, spec: GridSpec) -> Self {
        Self {
            params,
            spec,
            init: Init::standard_gaussian(params.n()),
            step0: 0.5,
            tol_residual: 1e-6,
            max_iters: 5000,
            symmetrize_every: 10,
            force: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.n() != self.spec.dim() {
            return Err(Error::InvalidGrid("grid dimension differs from N".into()));
        }
        if self.tol_residual.is_nan() || self.tol_residual <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "tol must be positive, got {}",
                self.tol_residual
            )));
        }
        if self.step0.is_nan() || self.step0 <= 0.0 || self.step0 > 2.0 {
            return Err(Error::InvalidParams(format!(
                "step0 must lie in (0, 2], got {}",
                self.step0
            )));
        }
        if let Init::Gaussian {
            widths,
            centers,
            amplitudes,
        } = &self.init
        {
            let n = self.params.n();
            if widths.iter().any(|w| w.is_nan() || *w <= 0.0)
                || amplitudes.iter().any(|a| a.is_nan() || *a <= 0.0)
                || centers
                    .iter()
                    .any(|c| c.len() != n || c.iter().any(|x| !x.is_finite()))
            {
                return Err(Error::InvalidParams(
                    "gaussian init needs positive widths and amplitudes and N-dimensional centers"
                        .into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub energy: f64,
    pub residual: f64,
    /// `t̄` of the accepted trial point.
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<HistoryEntry>,
    #[serde(rename = "final")]
    pub final_energy: EnergyBreakdown,
    /// Estimate of the ground-state level: the final energy.
    pub c_n: f64,
    pub symmetrizations_accepted: usize,
    pub symmetrizations_rejected: usize,
    pub wall_time_s: f64,
}

/// A point on the Nehari set with its potentials and energy.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub w: StatePair,
    pub potentials: Potentials,
    pub energy: EnergyBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeOutcome {
    Skipped,
    Accepted,
    Rejected,
}

pub struct Solver {
    cfg: SolveConfig,
    functional: Functional,
    schwarz: SchwarzPlan,
}

impl Solver {
    /// Checks the configuration and the existence guard and plans the
    /// transforms.
    pub fn new(cfg: SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let class = classify_existence(&cfg.params);
        if class.tag != ExistenceTag::ExistsH1 && !cfg.force {
            return Err(Error::Refused(class.tag.as_str().into()));
        }
        Ok(Self {
            functional: Functional::new(cfg.params, cfg.spec)?,
            schwarz: SchwarzPlan::new(cfg.spec),
            cfg,
        })
    }

    pub fn config(&self) -> &SolveConfig {
        &self.cfg
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn initialize(&self) -> StatePair {
        initial_state(&self.cfg)
    }

    /// Projects `w` onto the Nehari set.
    pub fn start(&self, w: &StatePair) -> Result<Iterate> {
        let pot = self.functional.potentials(w)?;
        let e = self.functional.energy_with(w, &pot);
        let t = nehari_factor(&self.cfg.params, e.e_norm_sq, e.d_interaction)?;
        Ok(Iterate {
            w: w.scaled(t),
            potentials: pot.scaled(&self.cfg.params, t),
            energy: e.scaled(&self.cfg.params, t),
        })
    }

    /// Relative residual at `it` and the Sobolev gradient.
    pub fn gradient(&self, it: &Iterate) -> (f64, StatePair) {
        let r = self.functional.residual_with(&it.w, &it.potentials);
        let (gu, gv) =
            self.functional
                .spectral()
                .filter_pair(r.r_u.values(), r.r_v.values(), |k2| 1.0 / (1.0 + k2));
        let spec = *self.functional.spec();
        (
            r.relative,
            StatePair {
                u: Field::from_parts(spec, gu),
                v: Field::from_parts(spec, gv),
            },
        )
    }

    /// One backtracking descent step from `it` along `-g`.
    ///
    /// Returns the new iterate and the `t̄` of the accepted trial point.
    pub fn step(&self, it: &Iterate, g: &StatePair) -> Result<(Iterate, f64)> {
        let params = &self.cfg.params;
        let limit = it.energy.energy_i + ENERGY_SLACK * it.energy.energy_i.abs();
        let mut tau = self.cfg.step0;
        for _ in 0..=MAX_HALVINGS {
            let z = it.w.add_scaled(-tau, g)?;
            let pot = self.functional.potentials(&z)?;
            let e = self.functional.energy_with(&z, &pot);
            if e.d_interaction > INTERACTION_FLOOR {
                let t = nehari_factor(params, e.e_norm_sq, e.d_interaction)?;
                let projected = e.scaled(params, t);
                if projected.energy_i <= limit {
                    let next = Iterate {
                        w: z.scaled(t),
                        potentials: pot.scaled(params, t),
                        energy: projected,
                    };
                    return Ok((next, t));
                }
            }
            tau *= 0.5;
        }
        Err(Error::Stagnation {
            iterations: 0,
            halvings: MAX_HALVINGS,
            state: Box::new(it.w.clone()),
        })
    }

    /// Tries two symmetric candidates, the projected Schwarz symmetrization
    /// `(|u|*, |v|*)` and the pair translated so that the centroid of
    /// `u² + v²` sits at the origin, and keeps the lower one when it does not
    /// raise the energy.
    ///
    /// Rearranging on the lattice roughens fields that are not centered on a
    /// node, so the Schwarz candidate alone is often rejected; the translated
    /// one removes the slow drift of an off-center bump.
    pub fn symmetrize(&self, it: Iterate) -> Result<(Iterate, SymmetrizeOutcome)> {
        let w = it.w.abs();
        let sym = StatePair {
            u: self.schwarz.apply(&w.u)?,
            v: self.schwarz.apply(&w.v)?,
        };
        let mut best = self.start(&sym)?;
        if let Some(shift) = self.recentering_shift(&it.w) {
            let (u, v) = self
                .functional
                .spectral()
                .translate_pair(&it.w.u, &it.w.v, &shift);
            let moved = self.start(&StatePair { u, v })?;
            if moved.energy.energy_i < best.energy.energy_i {
                best = moved;
            }
        }
        let limit = it.energy.energy_i + SYMMETRIZE_SLACK * it.energy.energy_i.abs();
        if best.energy.energy_i <= limit {
            Ok((best, SymmetrizeOutcome::Accepted))
        } else {
            Ok((it, SymmetrizeOutcome::Rejected))
        }
    }

    /// Shift taking the centroid of `u² + v²` (minimum image about its peak)
    /// to the origin; `None` when it is already within `1e-6 h`.
    fn recentering_shift(&self, w: &StatePair) -> Option<Vec<f64>> {
        let spec = self.functional.spec();
        let density: Vec<f64> =
            w.u.values()
                .iter()
                .zip(w.v.values())
                .map(|(a, b)| a * a + b * b)
                .collect();
        let peak = density
            .iter()
            .enumerate()
            .fold(0, |k, (i, &d)| if d > density[k] { i } else { k });
        let peak_idx = spec.unflatten(peak);
        let n = spec.dim();
        let (mut moment, mut total) = (vec![0.0; n], 0.0);
        for (flat, &d) in density.iter().enumerate() {
            let idx = spec.unflatten(flat);
            for a in 0..n {
                // offset -M/2 is the pair of opposite faces: no net moment
                let off = spec.wrap_offset(idx[a], peak_idx[a]);
                if 2 * off != -(spec.points() as i64) {
                    moment[a] += d * off as f64;
                }
            }
            total += d;
        }
        if total == 0.0 {
            return None;
        }
        let h = spec.spacing();
        let shift: Vec<f64> = (0..n)
            .map(|a| -(spec.coordinate(peak_idx[a]) + h * moment[a] / total))
            .collect();
        let size = shift.iter().map(|s| s * s).sum::<f64>().sqrt();
        (size > 1e-6 * h).then_some(shift)
    }

    pub fn solve(&self) -> Result<(StatePair, SolveReport)> {
        self.solve_from(&self.initialize())
    }

    /// Runs the descent from `w0` (any nonzero pair; it is projected first).
    pub fn solve_from(&self, w0: &StatePair) -> Result<(StatePair, SolveReport)> {
        let clock = Instant::now();
        let mut it = self.start(w0)?;
        let mut history = Vec::new();
        let (mut accepted, mut rejected) = (0, 0);
        let mut converged = false;
        let mut iterations = 0;
        let mut residual;
        loop {
            let (r, g) = self.gradient(&it);
            residual = r;
            if r <= self.cfg.tol_residual {
                converged = true;
                break;
            }
            if iterations == self.cfg.max_iters {
                break;
            }
            let (next, t) = self.step(&it, &g).map_err(|e| match e {
                Error::Stagnation {
                    halvings, state, ..
                } => Error::Stagnation {
                    iterations,
                    halvings,
                    state,
                },
                other => other,
            })?;
            it = next;
            iterations += 1;
            let every = self.cfg.symmetrize_every;
            if every > 0 && iterations % every == 0 {
                let (next, outcome) = self.symmetrize(it)?;
                it = next;
                match outcome {
                    SymmetrizeOutcome::Accepted => accepted += 1,
                    SymmetrizeOutcome::Rejected => rejected += 1,
                    SymmetrizeOutcome::Skipped => {}
                }
            }
            history.push(HistoryEntry {
                energy: it.energy.energy_i,
                residual: r,
                scale: t,
            });
        }
        let report = SolveReport {
            converged,
            iterations,
            residual,
            history,
            final_energy: it.energy,
            c_n: it.energy.energy_i,
            symmetrizations_accepted: accepted,
            symmetrizations_rejected: rejected,
            wall_time_s: clock.elapsed().as_secs_f64(),
        };
        Ok((it.w, report))
    }
}

/// The starting pair described by `cfg.init`, before projection.
pub fn initial_state(cfg: &SolveConfig) -> StatePair {
    let spec = cfg.spec;
    match &cfg.init {
        Init::Gaussian {
            widths,
            centers,
            amplitudes,
        } => {
            let make = |i: usize| {
                Field::from_fn(spec, |x| {
                    let r2: f64 = x
                        .iter()
                        .zip(&centers[i])
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum();
                    amplitudes[i] * (-r2 / (widths[i] * widths[i])).exp()
                })
            };
            StatePair {
                u: make(0),
                v: make(1),
            }
        }
        Init::RandomPositive { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let l = spec.half_width();
            let mut make = || {
                let bumps: Vec<(Vec<f64>, f64, f64)> = (0..4)
                    .map(|_| {
                        let c = (0..spec.dim())
                            .map(|_| rng.gen_range(-0.25 * l..0.25 * l))
                            .collect();
                        (c, rng.gen_range(0.5..2.0), rng.gen_range(0.5..1.5))
                    })
                    .collect();
                Field::from_fn(spec, |x| {
                    bumps
                        .iter()
                        .map(|(c, s, a)| {
                            let r2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
                            a * (-r2 / (s * s)).exp()
                        })
                        .sum()
                })
            };
            let u = make();
            let v = make();
            StatePair { u, v }
        }
    }
}

/// Checks the guard and solves.
pub fn solve(cfg: SolveConfig) -> Result<(StatePair, SolveReport)> {
    Solver::new(cfg)?.solve()
}
