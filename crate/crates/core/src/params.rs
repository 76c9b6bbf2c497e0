//! Parameter arithmetic for the system
//!
//! ```text
//! -Δu + u = 2p/(p+q) (I_α ∗ |v|^q) |u|^{p-2} u
//! -Δv + v = 2q/(p+q) (I_α ∗ |u|^p) |v|^{q-2} v      in R^N
//! ```
//!
//! Everything here is closed-form: hypothesis checks, the admissible θ
//! interval, existence/nonexistence classification, the regularity regions
//! with their integrability thresholds, and the asymptotic decay cases.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riesz::riesz_constant;

/// Absolute tolerance for every boundary comparison. A value within this
/// distance of a critical line counts as *on* the line, i.e. on the
/// failure side.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `a < b` with the conservative boundary tolerance.
#[inline]
fn strictly_less(a: f64, b: f64) -> bool {
    b - a > BOUNDARY_TOL
}

/// A critical exponent that is `+∞` in dimensions one and two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalExponent {
    Finite(f64),
    Infinite,
}

impl CriticalExponent {
    pub fn is_finite(self) -> bool {
        matches!(self, CriticalExponent::Finite(_))
    }

    /// Slack `self - x`, infinite when the exponent is.
    pub fn slack(self, x: f64) -> f64 {
        match self {
            CriticalExponent::Finite(c) => c - x,
            CriticalExponent::Infinite => f64::INFINITY,
        }
    }

    /// `x < self` with the boundary tolerance.
    pub fn exceeds(self, x: f64) -> bool {
        match self {
            CriticalExponent::Finite(c) => strictly_less(x, c),
            CriticalExponent::Infinite => true,
        }
    }
}

impl fmt::Display for CriticalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalExponent::Finite(c) => write!(f, "{c}"),
            CriticalExponent::Infinite => write!(f, "inf"),
        }
    }
}

/// The quadruple `(N, α, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    n: usize,
    alpha: f64,
    p: f64,
    q: f64,
}

impl ProblemParams {
    pub fn new(n: usize, alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParams(format!(
                "dimension N = {n} not in {{1,2,3}}"
            )));
        }
        if !(alpha.is_finite() && p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidParams("alpha, p, q must be finite".into()));
        }
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} not in (0, {n})"
            )));
        }
        if p <= 1.0 || q <= 1.0 {
            return Err(Error::InvalidParams(format!(
                "need p > 1 and q > 1, got p = {p}, q = {q}"
            )));
        }
        Ok(Self { n, alpha, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Sobolev exponent `2* = 2N/(N-2)`.
    pub fn sobolev_exponent(&self) -> CriticalExponent {
        if self.n >= 3 {
            CriticalExponent::Finite(2.0 * self.nf() / (self.nf() - 2.0))
        } else {
            CriticalExponent::Infinite
        }
    }

    /// Upper critical exponent for `p + q`: `2*_α = 2(N+α)/(N-2)`.
    pub fn upper_critical_sum(&self) -> CriticalExponent {
        if self.n >= 3 {
            CriticalExponent::Finite(2.0 * (self.nf() + self.alpha) / (self.nf() - 2.0))
        } else {
            CriticalExponent::Infinite
        }
    }

    /// Lower critical value for `p + q`: `2(N+α)/N`.
    pub fn lower_critical_sum(&self) -> f64 {
        2.0 * (self.nf() + self.alpha) / self.nf()
    }

    /// `max{2α/N, 1}`, the lower bound for each of `p`, `q`.
    pub fn exponent_floor(&self) -> f64 {
        (2.0 * self.alpha / self.nf()).max(1.0)
    }

    /// `k_{p,q} = 1/2 - 1/(p+q)`; on the Nehari set `I = k_{p,q} ‖w‖²_E`.
    pub fn k_pq(&self) -> f64 {
        0.5 - 1.0 / (self.p + self.q)
    }

    /// Normalisation constant of the Riesz kernel.
    pub fn c_alpha(&self) -> f64 {
        riesz_constant(self.n, self.alpha)
    }

    /// `N/(N-α)`, the threshold separating regularity regions.
    pub fn region_threshold(&self) -> f64 {
        self.nf() / (self.nf() - self.alpha)
    }

    /// `2N/(2N-α)`.
    pub fn small_exponent_threshold(&self) -> f64 {
        2.0 * self.nf() / (2.0 * self.nf() - self.alpha)
    }
}

/// Slack of every (H1) inequality; positive means satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Margins {
    pub p_lower: f64,
    pub p_upper: f64,
    pub q_lower: f64,
    pub q_upper: f64,
    /// `p + q - 2(N+α)/N`: signed distance to the lower critical line.
    pub sum_lower: f64,
    /// `2(N+α)/(N-2) - (p + q)`: signed distance to the upper critical line.
    pub sum_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Check {
    pub holds: bool,
    pub margins: H1Margins,
}

pub fn check_h1(params: &ProblemParams) -> H1Check {
    let floor = params.exponent_floor();
    let star = params.sobolev_exponent();
    let star_alpha = params.upper_critical_sum();
    let (p, q) = (params.p, params.q);
    let sum = p + q;
    let margins = H1Margins {
        p_lower: p - floor,
        p_upper: star.slack(p),
        q_lower: q - floor,
        q_upper: star.slack(q),
        sum_lower: sum - params.lower_critical_sum(),
        sum_upper: star_alpha.slack(sum),
    };
    let holds = strictly_less(floor, p)
        && strictly_less(floor, q)
        && star.exceeds(p)
        && star.exceeds(q)
        && strictly_less(params.lower_critical_sum(), sum)
        && star_alpha.exceeds(sum);
    H1Check { holds, margins }
}

/// Admissible open interval for `1/θ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaInterval {
    pub lower: f64,
    pub upper: f64,
    /// `(θ₁, θ₂)` with `1/θ₁` the interval midpoint and
    /// `1/θ₁ + 1/θ₂ = (N+α)/N`. `None` when the interval is empty.
    pub canonical: Option<(f64, f64)>,
}

impl ThetaInterval {
    pub fn is_empty(&self) -> bool {
        self.canonical.is_none()
    }
}

pub fn theta_interval(params: &ProblemParams) -> ThetaInterval {
    let n = params.nf();
    let (alpha, p, q) = (params.alpha, params.p, params.q);
    let total = (n + alpha) / n;
    let lower = (alpha / n)
        .max(p * (n - 2.0) / (2.0 * n))
        .max(total - q / 2.0);
    let upper = 1.0f64.min(p / 2.0).min(total - q * (n - 2.0) / (2.0 * n));
    let canonical = strictly_less(lower, upper).then(|| {
        let inv1 = 0.5 * (lower + upper);
        let inv2 = total - inv1;
        (1.0 / inv1, 1.0 / inv2)
    });
    ThetaInterval {
        lower,
        upper,
        canonical,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExistenceTag {
    ExistsH1,
    NonexistenceLowerLine,
    NonexistenceUpperLine,
    OutsideTheory,
}

impl ExistenceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ExistenceTag::ExistsH1 => "ExistsH1",
            ExistenceTag::NonexistenceLowerLine => "NonexistenceLowerLine",
            ExistenceTag::NonexistenceUpperLine => "NonexistenceUpperLine",
            ExistenceTag::OutsideTheory => "OutsideTheory",
        }
    }

    pub fn is_nonexistence(self) -> bool {
        matches!(
            self,
            ExistenceTag::NonexistenceLowerLine | ExistenceTag::NonexistenceUpperLine
        )
    }
}

impl fmt::Display for ExistenceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceClass {
    pub tag: ExistenceTag,
    pub margins: H1Margins,
}

pub fn classify_existence(params: &ProblemParams) -> ExistenceClass {
    let h1 = check_h1(params);
    let n = params.nf();
    let sum = params.p + params.q;
    let bound = 2.0 * (n + params.alpha);
    let tag = if h1.holds {
        ExistenceTag::ExistsH1
    } else if sum * n <= bound + BOUNDARY_TOL {
        ExistenceTag::NonexistenceLowerLine
    } else if params.n >= 3 && sum * (n - 2.0) >= bound - BOUNDARY_TOL {
        ExistenceTag::NonexistenceUpperLine
    } else {
        ExistenceTag::OutsideTheory
    };
    ExistenceClass {
        tag,
        margins: h1.margins,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    A,
    B,
    C,
    D,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regularity region of `(p, q)` with lower integrability thresholds:
/// `u ∈ W^{2,r}` for `r_bar < r < ∞` (and `1 < r` when `r_bar = 1`),
/// likewise `v` with `h_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityRegion {
    pub region: Region,
    /// Which formula branch produced the thresholds, 1-based within the region.
    pub subcase: u8,
    pub r_bar: f64,
    pub h_bar: f64,
}

/// `r* = pN/(p(2N-α) - N)`.
fn large_exponent_threshold(p: f64, n: f64, alpha: f64) -> f64 {
    p * n / (p * (2.0 * n - alpha) - n)
}

/// Thresholds `((2-a)N/(N-α), (2-a)bN/((2b+a-2)N - 2bα))` used when the
/// exponent `a` is small.
fn small_branch(a: f64, b: f64, n: f64, alpha: f64) -> (f64, f64) {
    let own = (2.0 - a) * n / (n - alpha);
    let other = (2.0 - a) * b * n / ((2.0 * b + a - 2.0) * n - 2.0 * b * alpha);
    (own, other)
}

/// `abN/((ab+a-1)N - bα)`.
fn mixed_threshold(a: f64, b: f64, n: f64, alpha: f64) -> f64 {
    a * b * n / ((a * b + a - 1.0) * n - b * alpha)
}

pub fn classify_regularity(params: &ProblemParams) -> Result<RegularityRegion> {
    if !check_h1(params).holds {
        return Err(Error::HypothesisFailed(format!(
            "regularity classification needs (H1); (N, α, p, q) = ({}, {}, {}, {})",
            params.n, params.alpha, params.p, params.q
        )));
    }
    let n = params.nf();
    let (alpha, p, q) = (params.alpha, params.p, params.q);
    let c = params.region_threshold();
    let small = params.small_exponent_threshold();
    let upper_line = (n / alpha) * p - n / alpha;
    let lower_line = (alpha / n) * p + 1.0;

    // The four regions partition the (H1) set; this decision order makes the
    // assignment total and exclusive even under rounding.
    let out = if p < c && q < c {
        let (subcase, r_bar, h_bar) = if p >= small && q >= small {
            (
                1,
                large_exponent_threshold(p, n, alpha),
                large_exponent_threshold(q, n, alpha),
            )
        } else if p < small {
            let (r, h) = small_branch(p, q, n, alpha);
            (2, r, h)
        } else {
            let (h, r) = small_branch(q, p, n, alpha);
            (3, r, h)
        };
        RegularityRegion {
            region: Region::B,
            subcase,
            r_bar,
            h_bar,
        }
    } else if q >= c && q > upper_line {
        if (2.0 - p) / (n - alpha) <= p * q / (n + alpha * q) {
            RegularityRegion {
                region: Region::C,
                subcase: 1,
                r_bar: mixed_threshold(p, q, n, alpha),
                h_bar: 1.0,
            }
        } else {
            let (r, h) = small_branch(p, q, n, alpha);
            RegularityRegion {
                region: Region::C,
                subcase: 2,
                r_bar: r,
                h_bar: h,
            }
        }
    } else if q < lower_line && p >= c {
        if (2.0 - q) / (n - alpha) < p * q / (n + alpha * p) {
            RegularityRegion {
                region: Region::D,
                subcase: 1,
                r_bar: 1.0,
                h_bar: mixed_threshold(q, p, n, alpha),
            }
        } else {
            let (h, r) = small_branch(q, p, n, alpha);
            RegularityRegion {
                region: Region::D,
                subcase: 2,
                r_bar: r,
                h_bar: h,
            }
        }
    } else {
        RegularityRegion {
            region: Region::A,
            subcase: 1,
            r_bar: 1.0,
            h_bar: 1.0,
        }
    };
    Ok(out)
}

/// Asymptotic behaviour of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayKind {
    /// Exponent `> 2`: `w(x)|x|^{(N-1)/2} e^{|x|}` has a positive limit.
    Exponential,
    /// Exponent `= 2`: exponential decay modulated by the Coulomb-like tail
    /// of the potential with strength `𝒜^{N-α}`.
    Critical,
    /// Exponent `< 2`: `w ~ |x|^{-exponent}` with `exponent = (N-α)/(2-p)`.
    Algebraic { exponent: f64 },
}

impl DecayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayKind::Exponential => "Exponential",
            DecayKind::Critical => "Critical",
            DecayKind::Algebraic { .. } => "Algebraic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentDecay {
    pub kind: DecayKind,
    /// Factor `κ` such that the limit constant is `κ ∫|other|^{exp}`:
    /// `2p/(p+q) c_α` for `u`, `2q/(p+q) c_α` for `v`. For the critical case
    /// this is the factor in `𝒜^{N-α}`; for the algebraic case it is the
    /// limit of `w^{2-p}|x|^{N-α}`.
    pub limit_coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCase {
    pub u: ComponentDecay,
    pub v: ComponentDecay,
    /// Whether the additional lower bounds required when `max{p,q} ≤ 2`
    /// (and not `p = q = 2`) hold.
    pub extra_ok: bool,
    /// `p > 2` with `q ≤ (N+α)/N` (or the mirror): a component may fail to
    /// be integrable. Reported only.
    pub non_l1_condition: bool,
}

fn component_kind(exp: f64, n: f64, alpha: f64) -> DecayKind {
    if (exp - 2.0).abs() <= BOUNDARY_TOL {
        DecayKind::Critical
    } else if exp > 2.0 {
        DecayKind::Exponential
    } else {
        DecayKind::Algebraic {
            exponent: (n - alpha) / (2.0 - exp),
        }
    }
}

pub fn decay_case(params: &ProblemParams) -> DecayCase {
    let n = params.nf();
    let (alpha, p, q) = (params.alpha, params.p, params.q);
    let c_alpha = params.c_alpha();
    let u = ComponentDecay {
        kind: component_kind(p, n, alpha),
        limit_coefficient: 2.0 * p / (p + q) * c_alpha,
    };
    let v = ComponentDecay {
        kind: component_kind(q, n, alpha),
        limit_coefficient: 2.0 * q / (p + q) * c_alpha,
    };

    let lo = p.min(q);
    let hi = p.max(q);
    let small = params.small_exponent_threshold();
    let extra_ok = if (hi - 2.0).abs() <= BOUNDARY_TOL && strictly_less(lo, 2.0) {
        strictly_less(small.max(2.0 * (alpha + 1.0) / (n + 1.0)), lo)
    } else if strictly_less(hi, 2.0) {
        strictly_less(small, lo)
    } else {
        true
    };
    let l1 = (n + alpha) / n;
    let non_l1_condition = (p > 2.0 && q <= l1) || (q > 2.0 && p <= l1);
    DecayCase {
        u,
        v,
        extra_ok,
        non_l1_condition,
    }
}
