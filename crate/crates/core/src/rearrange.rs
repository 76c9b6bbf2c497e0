//! Discrete Schwarz symmetrization and polarization.
//!
//! The symmetrization is a permutation of the node values: the largest value
//! goes to the grid center, the next ones to the nearest nodes, and so on.
//! `L^r` norms are therefore preserved exactly and only the gradient and
//! convolution inequalities are approximate on the grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{inner, Field, GridSpec};
use crate::riesz::RieszPlan;

/// Node order by increasing distance from the grid center, ties by flat index.
#[derive(Debug, Clone)]
pub struct SchwarzPlan {
    spec: GridSpec,
    order: Arc<[usize]>,
}

impl SchwarzPlan {
    pub fn new(spec: GridSpec) -> Self {
        let center = spec.center();
        let mut keyed: Vec<(i64, usize)> = (0..spec.len())
            .map(|i| (spec.index_dist_sq(i, &center), i))
            .collect();
        keyed.sort_unstable();
        Self {
            spec,
            order: keyed.into_iter().map(|(_, i)| i).collect(),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if f.spec() != &self.spec {
            return Err(Error::GridMismatch);
        }
        if let Some(&neg) = f.values().iter().find(|&&x| x < 0.0) {
            return Err(Error::NegativeInput(neg));
        }
        let mut sorted = f.values().to_vec();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        let mut out = vec![0.0; sorted.len()];
        for (&node, v) in self.order.iter().zip(sorted) {
            out[node] = v;
        }
        Ok(Field::from_parts(self.spec, out))
    }
}

/// `f*` for `f ≥ 0`, centered at the grid center.
pub fn schwarz(f: &Field) -> Result<Field> {
    SchwarzPlan::new(*f.spec()).apply(f)
}

/// The closed half-space `{x_axis ≥ 0}` (`positive`) or `{x_axis ≤ 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfSpace {
    pub axis: usize,
    pub positive: bool,
}

impl HalfSpace {
    pub fn new(axis: usize, positive: bool) -> Self {
        Self { axis, positive }
    }

    /// Mirror image of node `idx` across `x_axis = 0`, i.e. `k ↦ M − k mod M`.
    pub fn reflect(&self, spec: &GridSpec, idx: &mut [usize]) {
        let m = spec.points();
        idx[self.axis] = (m - idx[self.axis]) % m;
    }

    /// `+1` inside the open half-space, `-1` in its mirror, `0` on the
    /// reflection-invariant layers.
    fn side(&self, spec: &GridSpec, k: usize) -> i8 {
        let half = spec.points() / 2;
        if k == half || k == 0 {
            0
        } else if (k > half) == self.positive {
            1
        } else {
            -1
        }
    }
}

/// `f^H = max(f, f∘σ)` on `H` and `min(f, f∘σ)` off it.
pub fn polarize(f: &Field, h: HalfSpace) -> Field {
    let spec = *f.spec();
    assert!(h.axis < spec.dim(), "half-space axis out of range");
    let vals = f.values();
    let mut out = vals.to_vec();
    let mut idx = vec![0usize; spec.dim()];
    for (flat, o) in out.iter_mut().enumerate() {
        idx.copy_from_slice(&spec.unflatten(flat));
        let side = h.side(&spec, idx[h.axis]);
        if side == 0 {
            continue;
        }
        h.reflect(&spec, &mut idx);
        let mirror = vals[spec.flatten(&idx)];
        *o = if side > 0 {
            o.max(mirror)
        } else {
            o.min(mirror)
        };
    }
    Field::from_parts(spec, out)
}

/// `(∫(I_α∗f)g, ∫(I_α∗f*)g*)`; the Riesz rearrangement inequality says the
/// first never exceeds the second.
pub fn riesz_rearrangement_check(f: &Field, g: &Field, alpha: f64) -> Result<(f64, f64)> {
    let plan = RieszPlan::new(*f.spec(), alpha)?;
    riesz_rearrangement_check_with(&plan, f, g)
}

pub fn riesz_rearrangement_check_with(
    plan: &RieszPlan,
    f: &Field,
    g: &Field,
) -> Result<(f64, f64)> {
    f.check_same(g)?;
    let sym = SchwarzPlan::new(*f.spec());
    let fs = sym.apply(f)?;
    let gs = sym.apply(g)?;
    let (pf, pfs) = plan.apply_pair(f, &fs)?;
    Ok((inner(&pf, g)?, inner(&pfs, &gs)?))
}
