//! Energy functional, Nehari constraint and Euler–Lagrange residual.
//!
//! With `D(u,v) = ∫(I_α ∗ |u|^p)|v|^q`:
//!
//! ```text
//! I(u,v) = ½‖(u,v)‖²_E − 2/(p+q) D(u,v)
//! P(u,v) = I'(u,v)(u,v) = ‖(u,v)‖²_E − 2 D(u,v)
//! ```
//!
//! `t ↦ I(tw)` has a unique maximiser `t̄ = [‖w‖²_E / (2D)]^{1/(p+q-2)}`
//! and `t̄ w` lies on the Nehari set `P = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{inner, Field, GridSpec, Spectral};
use crate::params::ProblemParams;
use crate::riesz::RieszPlan;

/// Below this the interaction integral is treated as zero.
pub const INTERACTION_FLOOR: f64 = 1e-300;

/// The unknown pair `(u, v)` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: Field,
    pub v: Field,
}

impl StatePair {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        u.check_same(&v)?;
        Ok(Self { u, v })
    }

    pub fn spec(&self) -> &GridSpec {
        self.u.spec()
    }

    pub fn scaled(&self, t: f64) -> StatePair {
        StatePair {
            u: self.u.scaled(t),
            v: self.v.scaled(t),
        }
    }

    pub fn abs(&self) -> StatePair {
        StatePair {
            u: self.u.abs(),
            v: self.v.abs(),
        }
    }

    /// `self + s * other`, component-wise.
    pub fn add_scaled(&self, s: f64, other: &StatePair) -> Result<StatePair> {
        Ok(StatePair {
            u: self.u.add_scaled(s, &other.u)?,
            v: self.v.add_scaled(s, &other.v)?,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.u
            .values()
            .iter()
            .chain(self.v.values())
            .all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `∫|∇u|² + |∇v|²`.
    pub gradient_sq: f64,
    /// `∫u² + v²`.
    pub mass_sq: f64,
    /// `‖(u,v)‖²_E = gradient_sq + mass_sq`.
    pub e_norm_sq: f64,
    /// `D(u,v)`.
    pub d_interaction: f64,
    pub energy_i: f64,
    pub nehari_p: f64,
}

impl EnergyBreakdown {
    pub fn from_parts(params: &ProblemParams, gradient_sq: f64, mass_sq: f64, d: f64) -> Self {
        let e = gradient_sq + mass_sq;
        Self {
            gradient_sq,
            mass_sq,
            e_norm_sq: e,
            d_interaction: d,
            energy_i: 0.5 * e - 2.0 * d / (params.p() + params.q()),
            nehari_p: e - 2.0 * d,
        }
    }

    /// The same quantities for `t w`.
    pub fn scaled(&self, params: &ProblemParams, t: f64) -> Self {
        let t2 = t * t;
        Self::from_parts(
            params,
            t2 * self.gradient_sq,
            t2 * self.mass_sq,
            t.powf(params.p() + params.q()) * self.d_interaction,
        )
    }
}

/// `t̄` from `‖w‖²_E` and `D(w)`.
pub fn nehari_factor(params: &ProblemParams, e_norm_sq: f64, d: f64) -> Result<f64> {
    if d.is_nan() || d <= INTERACTION_FLOOR {
        return Err(Error::DegeneratePair(d));
    }
    Ok((e_norm_sq / (2.0 * d)).powf(1.0 / (params.p() + params.q() - 2.0)))
}

/// `max_t I(tw) = k_{p,q} [‖w‖²_E / (2D)^{2/(p+q)}]^{(p+q)/(p+q-2)}`.
pub fn projected_energy(params: &ProblemParams, e_norm_sq: f64, d: f64) -> f64 {
    let s = params.p() + params.q();
    params.k_pq() * (e_norm_sq / (2.0 * d).powf(2.0 / s)).powf(s / (s - 2.0))
}

/// `sign(x)|x|^e`, with the continuous value 0 at `x = 0`.
#[inline]
pub fn signed_power(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// `|x|^e` with `0^e = 0`.
#[inline]
fn abs_power(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e)
    }
}

/// `I_α ∗ |u|^p` and `I_α ∗ |v|^q` at a state.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub of_u: Field,
    pub of_v: Field,
}

impl Potentials {
    /// Potentials of `t w` from those of `w`.
    pub fn scaled(&self, params: &ProblemParams, t: f64) -> Self {
        Self {
            of_u: self.of_u.scaled(t.powf(params.p())),
            of_v: self.of_v.scaled(t.powf(params.q())),
        }
    }
}

/// Strong-form Euler–Lagrange residual.
#[derive(Debug, Clone)]
pub struct Residual {
    /// `(-Δ+1)u − 2p/(p+q) (I_α∗|v|^q)|u|^{p-2}u`.
    pub r_u: Field,
    /// `(-Δ+1)v − 2q/(p+q) (I_α∗|u|^p)|v|^{q-2}v`.
    pub r_v: Field,
    /// `‖(R_u, R_v)‖₂ / ‖(u,v)‖_E`, zero for the zero pair.
    pub relative: f64,
}

/// Discrete energy on one grid: spectral kinetic term, zero-padded Riesz
/// interaction, rectangle-rule quadrature.
#[derive(Debug, Clone)]
pub struct Functional {
    params: ProblemParams,
    riesz: RieszPlan,
    spectral: Spectral,
}

impl Functional {
    pub fn new(params: ProblemParams, spec: GridSpec) -> Result<Self> {
        if params.n() != spec.dim() {
            return Err(Error::InvalidGrid(format!(
                "grid dimension {} differs from N = {}",
                spec.dim(),
                params.n()
            )));
        }
        Ok(Self {
            params,
            riesz: RieszPlan::new(spec, params.alpha())?,
            spectral: Spectral::new(spec),
        })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }
    pub fn spec(&self) -> &GridSpec {
        self.spectral.spec()
    }
    pub fn riesz(&self) -> &RieszPlan {
        &self.riesz
    }
    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    fn check(&self, w: &StatePair) -> Result<()> {
        if w.spec() == self.spec() && w.v.spec() == self.spec() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn potentials(&self, w: &StatePair) -> Result<Potentials> {
        self.check(w)?;
        let (p, q) = (self.params.p(), self.params.q());
        let up: Vec<f64> = w.u.values().iter().map(|&x| abs_power(x, p)).collect();
        let vq: Vec<f64> = w.v.values().iter().map(|&x| abs_power(x, q)).collect();
        let (a, b) = self.riesz.apply_slices(&up, &vq);
        let spec = *self.spec();
        Ok(Potentials {
            of_u: Field::from_parts(spec, a),
            of_v: Field::from_parts(spec, b),
        })
    }

    /// `D(u,v) = ∫(I_α ∗ |u|^p)|v|^q`.
    pub fn interaction(&self, w: &StatePair) -> Result<f64> {
        self.check(w)?;
        let p = self.params.p();
        let up = w.u.map(|x| abs_power(x, p));
        let pot = self.riesz.apply(&up)?;
        Ok(self.interaction_with(w, &pot))
    }

    fn interaction_with(&self, w: &StatePair, of_u: &Field) -> f64 {
        let q = self.params.q();
        let s: f64 = of_u
            .values()
            .iter()
            .zip(w.v.values())
            .map(|(a, &b)| a * abs_power(b, q))
            .sum();
        s * self.spec().cell_volume()
    }

    pub fn energy(&self, w: &StatePair) -> Result<EnergyBreakdown> {
        let d = self.interaction(w)?;
        let (g, m) = self.spectral.pair_energies(&w.u, &w.v);
        Ok(EnergyBreakdown::from_parts(&self.params, g, m, d))
    }

    /// Energy when the potentials are already known.
    pub fn energy_with(&self, w: &StatePair, pot: &Potentials) -> EnergyBreakdown {
        let d = self.interaction_with(w, &pot.of_u);
        let (g, m) = self.spectral.pair_energies(&w.u, &w.v);
        EnergyBreakdown::from_parts(&self.params, g, m, d)
    }

    /// `t̄_w`, the unique `t > 0` with `P(t w) = 0`.
    pub fn nehari_scale(&self, w: &StatePair) -> Result<f64> {
        let e = self.energy(w)?;
        nehari_factor(&self.params, e.e_norm_sq, e.d_interaction)
    }

    /// `(t̄_w w, t̄_w)`.
    pub fn project(&self, w: &StatePair) -> Result<(StatePair, f64)> {
        let t = self.nehari_scale(w)?;
        Ok((w.scaled(t), t))
    }

    pub fn euler_residual(&self, w: &StatePair) -> Result<Residual> {
        let pot = self.potentials(w)?;
        Ok(self.residual_with(w, &pot))
    }

    pub fn residual_with(&self, w: &StatePair, pot: &Potentials) -> Residual {
        let (p, q) = (self.params.p(), self.params.q());
        let cu = 2.0 * p / (p + q);
        let cv = 2.0 * q / (p + q);
        let (hu, hv) = self
            .spectral
            .filter_pair(w.u.values(), w.v.values(), |k2| 1.0 + k2);
        let r_u: Vec<f64> = hu
            .iter()
            .zip(pot.of_v.values())
            .zip(w.u.values())
            .map(|((&a, &pv), &u)| a - cu * pv * signed_power(u, p - 1.0))
            .collect();
        let r_v: Vec<f64> = hv
            .iter()
            .zip(pot.of_u.values())
            .zip(w.v.values())
            .map(|((&a, &pu), &v)| a - cv * pu * signed_power(v, q - 1.0))
            .collect();
        let spec = *self.spec();
        let r_u = Field::from_parts(spec, r_u);
        let r_v = Field::from_parts(spec, r_v);
        let e = self.spectral.pair_h1_norm_sq(&w.u, &w.v);
        let rn = inner(&r_u, &r_u).unwrap_or(0.0) + inner(&r_v, &r_v).unwrap_or(0.0);
        let relative = if e > 0.0 { (rn / e).sqrt() } else { 0.0 };
        Residual { r_u, r_v, relative }
    }
}
