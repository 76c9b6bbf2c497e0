use hartree_core::{Field, Functional, GridSpec, ProblemParams, StatePair};
use proptest::prelude::*;

/// Positive pair built from one Gaussian bump per component.
fn pair(spec: GridSpec, b: [(f64, f64, f64); 2]) -> StatePair {
    let bump = |(c, w, a): (f64, f64, f64)| {
        Field::from_fn(spec, move |x| {
            let r2: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (v - if i == 0 { c } else { 0.0 }).powi(2))
                .sum();
            a * (-r2 / (w * w)).exp()
        })
    };
    StatePair::new(bump(b[0]), bump(b[1])).unwrap()
}

fn bump_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (-2.0..2.0f64, 0.6..2.0f64, 0.2..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_lands_on_the_nehari_set(
        b0 in bump_strategy(),
        b1 in bump_strategy(),
        p in 1.3..3.5f64,
        q in 1.3..3.5f64,
    ) {
        let params = ProblemParams::new(1, 0.5, p, q).unwrap();
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let f = Functional::new(params, spec).unwrap();
        let (pw, t) = f.project(&pair(spec, [b0, b1])).unwrap();
        prop_assert!(t > 0.0);
        let e = f.energy(&pw).unwrap();
        prop_assert!(e.nehari_p.abs() <= 1e-10 * e.e_norm_sq);
        // t ↦ I(t w) peaks at the projection
        for s in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
            prop_assert!(f.energy(&pw.scaled(s)).unwrap().energy_i <= e.energy_i);
        }
        let k = params.k_pq();
        prop_assert!((e.energy_i - k * e.e_norm_sq).abs() <= 1e-12 * e.energy_i);
    }

    #[test]
    fn scale_is_inverse_homogeneous(b0 in bump_strategy(), b1 in bump_strategy(), lam in 0.05..20.0f64) {
        let params = ProblemParams::new(2, 1.0, 2.2, 1.8).unwrap();
        let spec = GridSpec::new(2, 6.0, 16).unwrap();
        let f = Functional::new(params, spec).unwrap();
        let w = pair(spec, [b0, b1]);
        let t = f.nehari_scale(&w).unwrap();
        let tl = f.nehari_scale(&w.scaled(lam)).unwrap();
        prop_assert!((tl * lam - t).abs() <= 1e-11 * t);
    }

    #[test]
    fn energy_is_even_in_each_component(b0 in bump_strategy(), b1 in bump_strategy()) {
        let params = ProblemParams::new(1, 0.7, 2.5, 2.0).unwrap();
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let f = Functional::new(params, spec).unwrap();
        let w = pair(spec, [b0, b1]);
        let e = f.energy(&w).unwrap();
        let flipped = StatePair::new(w.u.scaled(-1.0), w.v.scaled(-1.0)).unwrap();
        prop_assert_eq!(f.energy(&flipped).unwrap(), e);
    }
}

#[test]
fn ground_state_level_is_below_any_projected_pair() {
    use hartree_core::{solve, SolveConfig};
    let params = ProblemParams::new(1, 0.5, 2.5, 2.5).unwrap();
    let spec = GridSpec::new(1, 16.0, 256).unwrap();
    let (_, report) = solve(SolveConfig::new(params, spec)).unwrap();
    let f = Functional::new(params, spec).unwrap();
    for b in [
        [(0.0, 1.0, 1.0), (0.0, 1.0, 1.0)],
        [(1.0, 0.7, 2.0), (-1.0, 1.5, 0.5)],
    ] {
        let (pw, _) = f.project(&pair(spec, b)).unwrap();
        assert!(report.c_n <= f.energy(&pw).unwrap().energy_i);
    }
}
