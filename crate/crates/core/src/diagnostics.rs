//! Checks of computed pairs against what the theory predicts: the Pohozaev
//! identity, radial symmetry, asymptotic decay and the HLS bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{Functional, StatePair};
use crate::grid::{inner, integrate, lp_norm, shell_profile, Field, GridSpec};
use crate::params::{decay_case, theta_interval, DecayKind, ProblemParams};
use crate::quad;

/// Minimum number of shells a fit window must contain.
pub const MIN_FIT_BINS: usize = 10;

/// `|L - R| / (|L| + |R| + ε)` for the Pohozaev identity
/// `(N-2)/2 ∫|∇u|²+|∇v|² + N/2 ∫u²+v² = 2(N+α)/(p+q) D(u,v)`.
pub fn pohozaev_residual(functional: &Functional, w: &StatePair) -> Result<f64> {
    let params = functional.params();
    let e = functional.energy(w)?;
    let n = params.n() as f64;
    let lhs = 0.5 * (n - 2.0) * e.gradient_sq + 0.5 * n * e.mass_sq;
    let rhs = 2.0 * (n + params.alpha()) / (params.p() + params.q()) * e.d_interaction;
    Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + f64::MIN_POSITIVE))
}

/// `‖f - s(f)‖₂ / ‖f‖₂`, where `s(f)` replaces every value by the mean of its
/// exact distance shell about the node of largest `|f|`.
pub fn symmetry_deviation(f: &Field) -> Result<f64> {
    if f.max_abs() == 0.0 {
        return Err(Error::ZeroField);
    }
    let center = f.spec().unflatten(f.argmax_abs());
    let shells = shell_profile(f, &center);
    let (mut num, mut den) = (0.0, 0.0);
    for (&v, &s) in f.values().iter().zip(&shells.node_shell) {
        let d = v - shells.mean[s];
        num += d * d;
        den += v * v;
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub r_lo: f64,
    pub r_hi: f64,
}

impl FitWindow {
    pub fn new(r_lo: f64, r_hi: f64) -> Self {
        Self { r_lo, r_hi }
    }

    /// `[lo L, hi L]`.
    pub fn fractions(spec: &GridSpec, lo: f64, hi: f64) -> Self {
        Self::new(lo * spec.half_width(), hi * spec.half_width())
    }

    /// `[0.35 L, 0.7 L]`.
    pub fn default_for(spec: &GridSpec) -> Self {
        Self::fractions(spec, 0.35, 0.7)
    }

    /// The default window and two copies shifted by `∓0.05 L`.
    pub fn staggered(spec: &GridSpec) -> [Self; 3] {
        [
            Self::default_for(spec),
            Self::fractions(spec, 0.30, 0.65),
            Self::fractions(spec, 0.40, 0.75),
        ]
    }

    fn check(&self, spec: &GridSpec) -> Result<()> {
        if !(self.r_lo >= 0.0 && self.r_lo < self.r_hi && self.r_hi <= spec.half_width()) {
            return Err(Error::Fit(format!(
                "window [{}, {}] is not inside [0, L = {}]",
                self.r_lo,
                self.r_hi,
                spec.half_width()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub component: Component,
    pub case: DecayKind,
    pub window: FitWindow,
    pub bins: usize,
    /// Exponential: slope of `log(w r^{(N-1)/2})` against `r`.
    /// Algebraic: slope of `log w` against `log r`.
    /// Critical: slope of the log of the compensated profile against `r`.
    pub fitted: f64,
    pub predicted: f64,
    pub r_squared: f64,
    /// Window median of the quantity whose limit the theory describes.
    pub limit_estimate: f64,
    /// Algebraic case only: `κ ∫|other|^{exp}`.
    pub limit_predicted: Option<f64>,
    /// Critical case only: `(max - min) / median` of the compensated profile.
    pub variation: Option<f64>,
    /// Whether the theorem's hypotheses for this case hold; fits with
    /// `false` are informational.
    pub theory_applicable: bool,
}

impl DecayFit {
    /// `|fitted - predicted| / |predicted|`, or the absolute gap when the
    /// prediction is zero.
    pub fn relative_error(&self) -> f64 {
        let gap = (self.fitted - self.predicted).abs();
        if self.predicted == 0.0 {
            gap
        } else {
            gap / self.predicted.abs()
        }
    }

    pub fn limit_relative_error(&self) -> Option<f64> {
        self.limit_predicted
            .map(|p| (self.limit_estimate - p).abs() / p.abs())
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, my - slope * mx, r2)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// `F(r) = ∫_𝒜^r √(1 - 𝒜^k / s^k) ds` with `k = N - α` and `strength = 𝒜^k`;
/// the integrand is clamped to `[0, 1]` and `F = 0` for `r ≤ 𝒜`.
pub fn critical_phase(strength: f64, k: f64, r: f64) -> f64 {
    let a = strength.powf(1.0 / k);
    if r <= a {
        return 0.0;
    }
    // s = 𝒜 + t² removes the square-root behaviour at the lower limit
    let integrand = |t: f64| {
        let s = a + t * t;
        (1.0 - strength / s.powf(k)).clamp(0.0, 1.0).sqrt() * 2.0 * t
    };
    quad::integrate(integrand, 0.0, (r - a).sqrt(), 1e-12 * r.max(1.0))
}

/// Tail fit of one component about its own maximum.
pub fn fit_component(
    params: &ProblemParams,
    w: &StatePair,
    component: Component,
    window: FitWindow,
) -> Result<DecayFit> {
    let spec = *w.spec();
    window.check(&spec)?;
    let case = decay_case(params);
    let (f, other, decay, own_exp, other_exp) = match component {
        Component::U => (&w.u, &w.v, case.u, params.p(), params.q()),
        Component::V => (&w.v, &w.u, case.v, params.q(), params.p()),
    };
    if f.max_abs() == 0.0 {
        return Err(Error::ZeroField);
    }
    let shells = shell_profile(f, &spec.unflatten(f.argmax_abs()));
    let (mut r, mut val) = (Vec::new(), Vec::new());
    for (&radius, &mean) in shells.radius.iter().zip(&shells.mean) {
        if radius >= window.r_lo && radius <= window.r_hi {
            if mean.is_nan() || mean <= 0.0 {
                return Err(Error::Fit(format!(
                    "profile is not positive at r = {radius}"
                )));
            }
            r.push(radius);
            val.push(mean);
        }
    }
    if r.len() < MIN_FIT_BINS {
        return Err(Error::Fit(format!(
            "only {} shells in the window, need {MIN_FIT_BINS}",
            r.len()
        )));
    }

    let n = params.n() as f64;
    let k = n - params.alpha();
    let half = 0.5 * (n - 1.0);
    let other_mass = integrate(&other.map(|x| x.abs().powf(other_exp)));
    let strength = decay.limit_coefficient * other_mass;
    let (fitted, predicted, r_squared, limit_estimate, limit_predicted, variation) =
        match decay.kind {
            DecayKind::Exponential => {
                let y: Vec<f64> = r
                    .iter()
                    .zip(&val)
                    .map(|(&r, &u)| (u * r.powf(half)).ln())
                    .collect();
                let (slope, _, r2) = linear_fit(&r, &y);
                let lim: Vec<f64> = r.iter().zip(&y).map(|(&r, &y)| (y + r).exp()).collect();
                (slope, -1.0, r2, median(&lim), None, None)
            }
            DecayKind::Algebraic { exponent } => {
                let x: Vec<f64> = r.iter().map(|r| r.ln()).collect();
                let y: Vec<f64> = val.iter().map(|u| u.ln()).collect();
                let (slope, _, r2) = linear_fit(&x, &y);
                let lim: Vec<f64> = r
                    .iter()
                    .zip(&val)
                    .map(|(&r, &u)| u.powf(2.0 - own_exp) * r.powf(k))
                    .collect();
                (slope, -exponent, r2, median(&lim), Some(strength), None)
            }
            DecayKind::Critical => {
                let g: Vec<f64> = r
                    .iter()
                    .zip(&val)
                    .map(|(&r, &u)| u * r.powf(half) * critical_phase(strength, k, r).exp())
                    .collect();
                let y: Vec<f64> = g.iter().map(|g| g.ln()).collect();
                let (slope, _, r2) = linear_fit(&r, &y);
                let mid = median(&g);
                let spread = g.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    - g.iter().copied().fold(f64::INFINITY, f64::min);
                (slope, 0.0, r2, mid, None, Some(spread / mid))
            }
        };
    Ok(DecayFit {
        component,
        case: decay.kind,
        window,
        bins: r.len(),
        fitted,
        predicted,
        r_squared,
        limit_estimate,
        limit_predicted,
        variation,
        theory_applicable: case.extra_ok,
    })
}

/// Tail fits of `u` and `v` on one window.
pub fn fit_decay(
    params: &ProblemParams,
    w: &StatePair,
    window: FitWindow,
) -> Result<(DecayFit, DecayFit)> {
    Ok((
        fit_component(params, w, Component::U, window)?,
        fit_component(params, w, Component::V, window)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlsAudit {
    pub theta1: f64,
    pub theta2: f64,
    /// `D(u,v) / (‖u‖^p_{θ₁p} ‖v‖^q_{θ₂q})`.
    pub interaction_ratio: f64,
    /// `s = θ₁`.
    pub s: f64,
    /// `Ns / (N - αs)`.
    pub target_exponent: f64,
    /// `‖I_α∗|u|^p‖_{Ns/(N-αs)} / ‖|u|^p‖_s`.
    pub potential_ratio: f64,
}

/// Ratios of both sides of the HLS-type bounds at `w`, with the canonical
/// `θ₁, θ₂`.
pub fn hls_audit(functional: &Functional, w: &StatePair) -> Result<HlsAudit> {
    let params = functional.params();
    let (theta1, theta2) = theta_interval(params)
        .canonical
        .ok_or_else(|| Error::HypothesisFailed("no admissible θ₁".into()))?;
    if w.u.max_abs() == 0.0 || w.v.max_abs() == 0.0 {
        return Err(Error::ZeroField);
    }
    let (p, q) = (params.p(), params.q());
    let n = params.n() as f64;
    let up = w.u.map(|x| x.abs().powf(p));
    let vq = w.v.map(|x| x.abs().powf(q));
    let pot = functional.riesz().apply(&up)?;
    let d = inner(&pot, &vq)?;
    let interaction_ratio =
        d / (lp_norm(&w.u, theta1 * p).powf(p) * lp_norm(&w.v, theta2 * q).powf(q));
    let s = theta1;
    let target = n * s / (n - params.alpha() * s);
    let potential_ratio = lp_norm(&pot, target) / lp_norm(&up, s);
    Ok(HlsAudit {
        theta1,
        theta2,
        interaction_ratio,
        s,
        target_exponent: target,
        potential_ratio,
    })
}
