//! Uniform periodic grids on the cube `[-L, L)^N` and fields sampled on them.

mod io;
mod radial;
mod spectral;

pub use io::{read_field, write_field, FIELD_MAGIC};
pub use radial::{radial_profile, shell_profile, RadialProfile, ShellProfile};
pub use spectral::{refine, Spectral};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tensor grid with `M` points per axis, spacing `h = 2L/M` and nodes
/// `x_k = -L + k h`. The node `k = M/2` sits at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "M")]
    points: usize,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "dimension {n} not in {{1,2,3}}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width L = {half_width} must be positive"
            )));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis M = {points} must be a power of two >= 16"
            )));
        }
        Ok(Self {
            n,
            half_width,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn points(&self) -> usize {
        self.points
    }
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }
    /// `M^N`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Volume element `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }
    pub fn coordinate(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }
    /// Multi-index of the node at the origin.
    pub fn center(&self) -> Vec<usize> {
        vec![self.points / 2; self.n]
    }

    /// Row-major multi-index of a flat index (axis 0 slowest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Periodic minimum-image offset from `from` to `to` along one axis, in
    /// `[-M/2, M/2)`.
    pub fn wrap_offset(&self, to: usize, from: usize) -> i64 {
        let m = self.points as i64;
        (to as i64 - from as i64 + m / 2).rem_euclid(m) - m / 2
    }

    /// Squared minimum-image distance in index units between a flat index
    /// and a center.
    pub fn index_dist_sq(&self, flat: usize, center: &[usize]) -> i64 {
        let mut flat = flat;
        let mut acc = 0;
        for a in (0..self.n).rev() {
            let d = self.wrap_offset(flat % self.points, center[a]);
            acc += d * d;
            flat /= self.points;
        }
        acc
    }

    /// Calls `f(flat, x)` for every node, `x` holding the coordinates.
    pub fn for_each_node(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut x = vec![0.0; self.n];
        for flat in 0..self.len() {
            let mut rem = flat;
            for a in (0..self.n).rev() {
                x[a] = self.coordinate(rem % self.points);
                rem /= self.points;
            }
            f(flat, &x);
        }
    }
}

/// Real scalar function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite sample {bad}")));
        }
        Ok(Self { spec, values })
    }

    /// Builds a field without the finiteness scan; callers guarantee it.
    pub(crate) fn from_parts(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::from_parts(spec, vec![0.0; spec.len()])
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self::from_parts(spec, vec![c; spec.len()])
    }

    /// Samples `f` at every node.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; spec.len()];
        spec.for_each_node(|i, x| values[i] = f(x));
        Self::from_parts(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Self::from_parts(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    pub fn abs(&self) -> Field {
        self.map(f64::abs)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.spec,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        ))
    }

    pub fn check_same(&self, other: &Field) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Flat index of the largest `|value|`; the lowest index wins ties.
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Periodic shift by whole cells: `out[i] = self[i - shift]`.
    pub fn shifted(&self, shift: &[i64]) -> Field {
        let spec = self.spec;
        let m = spec.points as i64;
        let mut out = vec![0.0; spec.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            let idx = spec.unflatten(flat);
            let target: Vec<usize> = idx
                .iter()
                .zip(shift)
                .map(|(&i, &s)| (i as i64 + s).rem_euclid(m) as usize)
                .collect();
            out[spec.flatten(&target)] = v;
        }
        Self::from_parts(spec, out)
    }
}

impl Field {
    /// `x ↦ f(x/λ)` on the same grid, by multilinear interpolation; points
    /// that fall outside the cube get 0.
    pub fn dilated(&self, lambda: f64) -> Field {
        let spec = self.spec;
        let (m, n, h) = (spec.points, spec.n, spec.spacing());
        let mut out = vec![0.0; spec.len()];
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        spec.for_each_node(|flat, x| {
            for a in 0..n {
                let t = (x[a] / lambda + spec.half_width) / h;
                if !(0.0..=(m - 1) as f64).contains(&t) {
                    return;
                }
                let k = (t.floor() as usize).min(m - 2);
                base[a] = k;
                frac[a] = t - k as f64;
            }
            let mut acc = 0.0;
            for corner in 0..(1usize << n) {
                let mut idx = 0;
                let mut weight = 1.0;
                for a in 0..n {
                    let up = (corner >> a) & 1;
                    idx = idx * m + base[a] + up;
                    weight *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                }
                acc += weight * self.values[idx];
            }
            out[flat] = acc;
        });
        Field::from_parts(spec, out)
    }
}

/// Rectangle rule `h^N Σ f`, spectrally accurate for smooth periodic or
/// rapidly decaying integrands.
pub fn integrate(f: &Field) -> f64 {
    f.spec.cell_volume() * f.values.iter().sum::<f64>()
}

/// `∫ f g`.
pub fn inner(f: &Field, g: &Field) -> Result<f64> {
    f.check_same(g)?;
    Ok(f.spec.cell_volume()
        * f.values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| a * b)
            .sum::<f64>())
}

/// `(∫|f|^r)^{1/r}` for `r >= 1`.
pub fn lp_norm(f: &Field, r: f64) -> f64 {
    assert!(r >= 1.0, "lp_norm needs r >= 1, got {r}");
    let s: f64 = if r == 2.0 {
        f.values.iter().map(|v| v * v).sum()
    } else if r == 1.0 {
        f.values.iter().map(|v| v.abs()).sum()
    } else {
        f.values.iter().map(|v| v.abs().powf(r)).sum()
    };
    (f.spec.cell_volume() * s).powf(1.0 / r)
}

/// `∫|∇f|² + ∫f²`.
pub fn h1_norm_sq(f: &Field) -> f64 {
    Spectral::new(*f.spec()).h1_norm_sq(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(3, 8.0, 64).is_ok());
        assert!(GridSpec::new(3, 8.0, 48).is_err());
        assert!(GridSpec::new(3, 8.0, 8).is_err());
        assert!(GridSpec::new(4, 8.0, 16).is_err());
        assert!(GridSpec::new(1, 0.0, 16).is_err());
    }

    #[test]
    fn dilation_of_linear_field_is_exact_inside() {
        let s = GridSpec::new(2, 4.0, 16).unwrap();
        let f = Field::from_fn(s, |x| 1.0 + 2.0 * x[0] - x[1]);
        let d = f.dilated(2.0);
        s.for_each_node(|flat, x| {
            let expected = 1.0 + x[0] - 0.5 * x[1];
            assert!((d.values()[flat] - expected).abs() < 1e-12);
        });
        let same = f.dilated(1.0);
        for (a, b) in same.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let shrunk = f.dilated(0.5);
        assert_eq!(shrunk.values()[0], 0.0);
    }

    #[test]
    fn node_layout() {
        let s = GridSpec::new(2, 8.0, 16).unwrap();
        assert_eq!(s.spacing(), 1.0);
        assert_eq!(s.coordinate(0), -8.0);
        assert_eq!(s.coordinate(8), 0.0);
        assert_eq!(s.flatten(&[1, 2]), 18);
        assert_eq!(s.unflatten(18), vec![1, 2]);
        assert_eq!(s.wrap_offset(15, 0), -1);
        assert_eq!(s.wrap_offset(0, 8), -8);
    }

    #[test]
    fn integrate_examples() {
        let s = GridSpec::new(1, 8.0, 64).unwrap();
        assert_eq!(integrate(&Field::constant(s, 1.0)), 16.0);
        assert_eq!(integrate(&Field::zeros(s)), 0.0);
        let s = GridSpec::new(1, 12.0, 256).unwrap();
        let g = Field::from_fn(s, |x| (-x[0] * x[0]).exp());
        assert!((integrate(&g) - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn constant_field_norms() {
        let s = GridSpec::new(2, 3.0, 16).unwrap();
        let f = Field::constant(s, 1.5);
        assert!((h1_norm_sq(&f) - 1.5f64.powi(2) * 36.0).abs() < 1e-12);
        assert!((lp_norm(&f, 2.0) - 1.5 * 6.0).abs() < 1e-12);
    }

    #[test]
    fn shift_is_periodic() {
        let s = GridSpec::new(1, 8.0, 16).unwrap();
        let f = Field::from_fn(s, |x| x[0]);
        let g = f.shifted(&[3]);
        assert_eq!(g.values()[3], f.values()[0]);
        assert_eq!(g.values()[1], f.values()[14]);
    }

    proptest! {
        #[test]
        fn lp_norm_is_homogeneous(
            vals in proptest::collection::vec(-3.0f64..3.0, 16),
            lambda in -5.0f64..5.0,
            r in 1.0f64..6.0,
        ) {
            let s = GridSpec::new(1, 4.0, 16).unwrap();
            let f = Field::new(s, vals).unwrap();
            let lhs = lp_norm(&f.scaled(lambda), r);
            let rhs = lambda.abs() * lp_norm(&f, r);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn integrate_is_linear(
            a in proptest::collection::vec(-3.0f64..3.0, 16),
            b in proptest::collection::vec(-3.0f64..3.0, 16),
            s in -4.0f64..4.0,
        ) {
            let spec = GridSpec::new(1, 4.0, 16).unwrap();
            let fa = Field::new(spec, a).unwrap();
            let fb = Field::new(spec, b).unwrap();
            let lhs = integrate(&fa.add_scaled(s, &fb).unwrap());
            let rhs = integrate(&fa) + s * integrate(&fb);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
