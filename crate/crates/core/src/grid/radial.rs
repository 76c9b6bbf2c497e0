use serde::Serialize;

use super::Field;

/// Shell averages of a field about a grid node.
///
/// Bin `j` collects the nodes whose (periodic, minimum-image) distance `r`
/// from the center satisfies `(j - ½)h ≤ r < (j + ½)h`; its nominal radius is
/// `j h`. Nodes farther than `L` are ignored, and empty bins are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub center: Vec<usize>,
    pub radii: Vec<f64>,
    /// Average distance of the nodes that fell into each bin.
    pub mean_radius: Vec<f64>,
    pub mean: Vec<f64>,
    /// Maximum of `|f|` over the bin.
    pub max_abs: Vec<f64>,
    pub count: Vec<usize>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn total_count(&self) -> usize {
        self.count.iter().sum()
    }
}

pub fn radial_profile(f: &Field, center: &[usize]) -> RadialProfile {
    let spec = f.spec();
    assert_eq!(center.len(), spec.dim(), "center has wrong dimension");
    let h = spec.spacing();
    let limit = spec.half_width() / h;
    let nbins = limit.floor() as usize + 1;
    let mut sum = vec![0.0; nbins];
    let mut rsum = vec![0.0; nbins];
    let mut max_abs = vec![0.0f64; nbins];
    let mut count = vec![0usize; nbins];
    for (flat, &v) in f.values().iter().enumerate() {
        let r = (spec.index_dist_sq(flat, center) as f64).sqrt();
        if r > limit * (1.0 + 1e-14) {
            continue;
        }
        let j = (r + 0.5).floor() as usize;
        sum[j] += v;
        rsum[j] += r;
        max_abs[j] = max_abs[j].max(v.abs());
        count[j] += 1;
    }

    let mut out = RadialProfile {
        center: center.to_vec(),
        radii: Vec::new(),
        mean_radius: Vec::new(),
        mean: Vec::new(),
        max_abs: Vec::new(),
        count: Vec::new(),
    };
    for j in 0..nbins {
        if count[j] == 0 {
            continue;
        }
        let c = count[j] as f64;
        out.radii.push(j as f64 * h);
        out.mean_radius.push(rsum[j] / c * h);
        out.mean.push(sum[j] / c);
        out.max_abs.push(max_abs[j]);
        out.count.push(count[j]);
    }
    out
}

/// Means of a field over exact distance shells `{|x - c|² = d h²}` about a
/// node, for every integer `d` that occurs (all nodes, no radius cutoff).
#[derive(Debug, Clone, PartialEq)]
pub struct ShellProfile {
    pub center: Vec<usize>,
    pub dist_sq: Vec<i64>,
    pub radius: Vec<f64>,
    pub mean: Vec<f64>,
    pub count: Vec<usize>,
    /// Shell position of every node, indexing the vectors above.
    pub node_shell: Vec<usize>,
}

pub fn shell_profile(f: &Field, center: &[usize]) -> ShellProfile {
    let spec = f.spec();
    assert_eq!(center.len(), spec.dim(), "center has wrong dimension");
    let d2: Vec<i64> = (0..spec.len())
        .map(|i| spec.index_dist_sq(i, center))
        .collect();
    let max = d2.iter().copied().max().unwrap_or(0) as usize;
    let mut sum = vec![0.0; max + 1];
    let mut count = vec![0usize; max + 1];
    for (&d, &v) in d2.iter().zip(f.values()) {
        sum[d as usize] += v;
        count[d as usize] += 1;
    }
    let mut slot = vec![usize::MAX; max + 1];
    let h = spec.spacing();
    let mut out = ShellProfile {
        center: center.to_vec(),
        dist_sq: Vec::new(),
        radius: Vec::new(),
        mean: Vec::new(),
        count: Vec::new(),
        node_shell: Vec::with_capacity(spec.len()),
    };
    for d in 0..=max {
        if count[d] > 0 {
            slot[d] = out.dist_sq.len();
            out.dist_sq.push(d as i64);
            out.radius.push((d as f64).sqrt() * h);
            out.mean.push(sum[d] / count[d] as f64);
            out.count.push(count[d]);
        }
    }
    out.node_shell.extend(d2.iter().map(|&d| slot[d as usize]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn shells_partition_the_grid() {
        let s = GridSpec::new(2, 4.0, 16).unwrap();
        let f = Field::from_fn(s, |x| x[0] * x[0] + x[1] * x[1]);
        let p = shell_profile(&f, &s.center());
        assert_eq!(p.count.iter().sum::<usize>(), s.len());
        for (r, m) in p.radius.iter().zip(&p.mean) {
            assert!((r * r - m).abs() < 1e-12);
        }
        assert_eq!(p.dist_sq[p.node_shell[s.flatten(&[9, 10])]], 5);
    }

    #[test]
    fn constant_field_has_unit_means() {
        let s = GridSpec::new(2, 4.0, 16).unwrap();
        let p = radial_profile(&Field::constant(s, 1.0), &s.center());
        assert!(p.mean.iter().all(|&m| (m - 1.0).abs() < 1e-15));
        assert!(p.radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn total_count_matches_ball() {
        let s = GridSpec::new(3, 4.0, 16).unwrap();
        let f = Field::from_fn(s, |x| x[0] + x[1] * x[2]);
        let center = [3, 9, 14];
        let p = radial_profile(&f, &center);
        let l2 = (s.half_width() / s.spacing()).powi(2);
        let inside = (0..s.len())
            .filter(|&i| s.index_dist_sq(i, &center) as f64 <= l2)
            .count();
        assert_eq!(p.total_count(), inside);
    }

    #[test]
    fn symmetric_gaussian_bins_tighten_with_refinement() {
        let ratio = |m: usize| {
            let s = GridSpec::new(2, 6.0, m).unwrap();
            let f = Field::from_fn(s, |x| (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp());
            let p = radial_profile(&f, &s.center());
            p.max_abs
                .iter()
                .zip(&p.mean)
                .zip(&p.radii)
                .filter(|(_, &r)| r < 4.0)
                .map(|((mx, mn), _)| mx / mn)
                .fold(1.0f64, f64::max)
        };
        let coarse = ratio(32);
        let fine = ratio(128);
        assert!(coarse >= 1.0 && fine >= 1.0);
        assert!(fine < coarse);
        // a bin of width h at radius r spreads exp(-r²/4) by about exp(r h / 2)
        assert!(fine < (4.0 * 12.0 / 128.0 / 2.0f64).exp() * 1.01);
    }

    #[test]
    fn shifted_gaussian_profile_decreases_about_argmax() {
        let s = GridSpec::new(2, 8.0, 64).unwrap();
        let f = Field::from_fn(s, |x| {
            (-((x[0] - 1.5).powi(2) + (x[1] + 2.0).powi(2))).exp()
        });
        let center = s.unflatten(f.argmax_abs());
        let p = radial_profile(&f, &center);
        assert!(p.mean.windows(2).all(|w| w[1] < w[0]));
    }
}
