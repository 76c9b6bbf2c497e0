use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{Field, GridSpec};
use crate::fft::CubeFft;

/// Fourier differentiation on the periodic cube.
///
/// Quadratic operators (`-Δ`, the Dirichlet energy and the `(-Δ+1)` metric)
/// use `|k|²` with the Nyquist mode included. First derivatives zero the
/// Nyquist mode so they map real fields to real fields.
#[derive(Debug, Clone)]
pub struct Spectral {
    spec: GridSpec,
    fft: CubeFft,
    /// Wavenumbers per axis index, Nyquist included as `-π/h`.
    wavenumbers: Vec<f64>,
    /// `|k|²` for every node of the transformed array.
    ksq: Vec<f64>,
}

impl Spectral {
    pub fn new(spec: GridSpec) -> Self {
        let m = spec.points();
        let base = PI / spec.half_width();
        let wavenumbers: Vec<f64> = (0..m)
            .map(|j| {
                let signed = if j < m / 2 {
                    j as i64
                } else {
                    j as i64 - m as i64
                };
                base * signed as f64
            })
            .collect();
        let mut ksq = vec![0.0; spec.len()];
        for (flat, k) in ksq.iter_mut().enumerate() {
            let mut rem = flat;
            let mut acc = 0.0;
            for _ in 0..spec.dim() {
                let w = wavenumbers[rem % m];
                acc += w * w;
                rem /= m;
            }
            *k = acc;
        }
        Self {
            spec,
            fft: CubeFft::new(m, spec.dim()),
            wavenumbers,
            ksq,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// `|k|²` in transform order.
    pub fn ksq(&self) -> &[f64] {
        &self.ksq
    }

    /// Unnormalised transform of `u + i v`.
    pub fn transform_pair(&self, u: &[f64], v: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u
            .iter()
            .zip(v)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        self.fft.forward(&mut buf);
        buf
    }

    /// Inverse of [`Spectral::transform_pair`], returning real and imaginary parts.
    pub fn inverse_pair(&self, mut buf: Vec<Complex64>) -> (Vec<f64>, Vec<f64>) {
        self.fft.inverse(&mut buf);
        let norm = 1.0 / self.spec.len() as f64;
        buf.iter().map(|z| (z.re * norm, z.im * norm)).unzip()
    }

    /// Applies the real even multiplier `m(|k|²)` to both fields at once.
    pub fn filter_pair(
        &self,
        u: &[f64],
        v: &[f64],
        multiplier: impl Fn(f64) -> f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let mut buf = self.transform_pair(u, v);
        for (z, &k2) in buf.iter_mut().zip(&self.ksq) {
            *z *= multiplier(k2);
        }
        self.inverse_pair(buf)
    }

    fn filter(&self, f: &Field, multiplier: impl Fn(f64) -> f64) -> Field {
        let zeros = vec![0.0; f.values().len()];
        let (out, _) = self.filter_pair(f.values(), &zeros, multiplier);
        Field::from_parts(*f.spec(), out)
    }

    /// `Δf`.
    pub fn laplacian(&self, f: &Field) -> Field {
        self.filter(f, |k2| -k2)
    }

    /// `(-Δ + 1) f`.
    pub fn helmholtz(&self, f: &Field) -> Field {
        self.filter(f, |k2| 1.0 + k2)
    }

    /// `(-Δ + 1)^{-1} f`.
    pub fn inverse_helmholtz(&self, f: &Field) -> Field {
        self.filter(f, |k2| 1.0 / (1.0 + k2))
    }

    /// `∂f/∂x_axis`.
    pub fn derivative(&self, f: &Field, axis: usize) -> Field {
        let m = self.spec.points();
        let n = self.spec.dim();
        let stride = m.pow((n - 1 - axis) as u32);
        let mut buf: Vec<Complex64> = f.values().iter().map(|&a| Complex64::new(a, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (flat, z) in buf.iter_mut().enumerate() {
            let j = (flat / stride) % m;
            *z *= if j == m / 2 {
                Complex64::default()
            } else {
                Complex64::new(0.0, self.wavenumbers[j])
            };
        }
        let (re, _) = self.inverse_pair(buf);
        Field::from_parts(*f.spec(), re)
    }

    /// `Σ_k m(|k|²) |\hat{u+iv}_k|²` scaled to an integral, i.e.
    /// `∫ u m(-Δ) u + ∫ v m(-Δ) v`.
    fn quadratic_pair(&self, u: &[f64], v: &[f64], multiplier: impl Fn(f64) -> f64) -> f64 {
        let buf = self.transform_pair(u, v);
        let s: f64 = buf
            .iter()
            .zip(&self.ksq)
            .map(|(z, &k2)| multiplier(k2) * z.norm_sqr())
            .sum();
        s * self.spec.cell_volume() / self.spec.len() as f64
    }

    /// `∫|∇f|²`.
    pub fn dirichlet_energy(&self, f: &Field) -> f64 {
        let zeros = vec![0.0; f.values().len()];
        self.quadratic_pair(f.values(), &zeros, |k2| k2)
    }

    /// `∫|∇f|² + ∫f²`.
    pub fn h1_norm_sq(&self, f: &Field) -> f64 {
        let zeros = vec![0.0; f.values().len()];
        self.quadratic_pair(f.values(), &zeros, |k2| 1.0 + k2)
    }

    /// `(∫|∇u|² + |∇v|², ∫u² + v²)`.
    ///
    /// Each component is transformed on its own and the mass is a plain sum,
    /// so flipping the sign of either component leaves both numbers bit-for-bit
    /// unchanged.
    pub fn pair_energies(&self, u: &Field, v: &Field) -> (f64, f64) {
        let grad = self.dirichlet_energy(u) + self.dirichlet_energy(v);
        let mass: f64 = u.values().iter().chain(v.values()).map(|x| x * x).sum();
        (grad, mass * self.spec.cell_volume())
    }

    /// `(u(x - s), v(x - s))` for any real shift `s`, by a phase ramp on
    /// each Fourier mode. The Nyquist mode gets `cos(k s)` so real fields
    /// stay real.
    pub fn translate_pair(&self, u: &Field, v: &Field, shift: &[f64]) -> (Field, Field) {
        let m = self.spec.points();
        let mut buf = self.transform_pair(u.values(), v.values());
        for (flat, z) in buf.iter_mut().enumerate() {
            let mut rem = flat;
            let mut phase = Complex64::new(1.0, 0.0);
            for a in (0..self.spec.dim()).rev() {
                let j = rem % m;
                rem /= m;
                let ks = self.wavenumbers[j] * shift[a];
                phase *= if j == m / 2 {
                    Complex64::new(ks.cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, -ks)
                };
            }
            *z *= phase;
        }
        let (a, b) = self.inverse_pair(buf);
        (
            Field::from_parts(self.spec, a),
            Field::from_parts(self.spec, b),
        )
    }

    /// `‖(u, v)‖²_E`.
    pub fn pair_h1_norm_sq(&self, u: &Field, v: &Field) -> f64 {
        let (g, m) = self.pair_energies(u, v);
        g + m
    }
}

/// Trigonometric interpolation of `f` onto the grid with the same `N` and `L`
/// but `points ≥ M` nodes per axis. Nodes shared by both grids keep their
/// values; the Nyquist mode is split evenly between `±M/2`.
pub fn refine(f: &Field, points: usize) -> crate::error::Result<Field> {
    let coarse = *f.spec();
    let fine = GridSpec::new(coarse.dim(), coarse.half_width(), points)?;
    let (m, mf, n) = (coarse.points(), points, coarse.dim());
    if mf < m {
        return Err(crate::error::Error::InvalidGrid(format!(
            "cannot refine {m} points to {mf}"
        )));
    }
    let mut buf: Vec<Complex64> = f.values().iter().map(|&a| Complex64::new(a, 0.0)).collect();
    CubeFft::new(m, n).forward(&mut buf);
    let mut out = vec![Complex64::default(); fine.len()];
    let mut targets: Vec<(usize, f64)> = Vec::with_capacity(1 << n);
    for (flat, z) in buf.iter().enumerate() {
        targets.clear();
        targets.push((0, 1.0));
        for j in coarse.unflatten(flat) {
            let images: &[(usize, f64)] = if j < m / 2 {
                &[(j, 1.0)]
            } else if j > m / 2 {
                &[(j + mf - m, 1.0)]
            } else if m == mf {
                &[(j, 1.0)]
            } else {
                &[(m / 2, 0.5), (mf - m / 2, 0.5)]
            };
            let prev = std::mem::take(&mut targets);
            for (base, w) in prev {
                for &(k, wk) in images {
                    targets.push((base * mf + k, w * wk));
                }
            }
        }
        for &(t, w) in &targets {
            out[t] += z * w;
        }
    }
    CubeFft::new(mf, n).inverse(&mut out);
    let norm = 1.0 / coarse.len() as f64;
    Ok(Field::from_parts(
        fine,
        out.iter().map(|z| z.re * norm).collect(),
    ))
}
