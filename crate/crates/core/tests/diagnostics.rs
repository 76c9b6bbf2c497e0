use hartree_core::diagnostics::{
    fit_decay, hls_audit, pohozaev_residual, symmetry_deviation, FitWindow,
};
use hartree_core::grid::{read_field, write_field};
use hartree_core::{solve, Field, Functional, GridSpec, ProblemParams, SolveConfig, StatePair};

fn ground_state(n: usize, alpha: f64, p: f64, q: f64, l: f64, m: usize) -> (Functional, StatePair) {
    let params = ProblemParams::new(n, alpha, p, q).unwrap();
    let spec = GridSpec::new(n, l, m).unwrap();
    let (w, report) = solve(SolveConfig::new(params, spec)).unwrap();
    assert!(report.converged);
    (Functional::new(params, spec).unwrap(), w)
}

#[test]
fn pohozaev_separates_solutions_from_other_pairs() {
    let (f, w) = ground_state(1, 0.5, 2.5, 2.5, 16.0, 256);
    let at_solution = pohozaev_residual(&f, &w).unwrap();
    let spec = *f.spec();
    let other = StatePair::new(
        Field::from_fn(spec, |x| 3.0 * (-x[0] * x[0] / 9.0).exp()),
        Field::from_fn(spec, |x| 0.2 * (-(x[0] - 1.0).powi(2)).exp()),
    )
    .unwrap();
    let (projected, _) = f.project(&other).unwrap();
    let elsewhere = pohozaev_residual(&f, &projected).unwrap();
    assert!(at_solution <= 2e-2, "{at_solution}");
    assert!(
        elsewhere >= 10.0 * at_solution,
        "{elsewhere} vs {at_solution}"
    );
}

#[test]
fn symmetry_deviation_tracks_odd_perturbations() {
    let (_, w) = ground_state(1, 0.5, 2.5, 2.5, 16.0, 256);
    let base = symmetry_deviation(&w.u).unwrap();
    assert!(base <= 1e-6, "{base}");
    let odd = Field::from_fn(*w.spec(), |x| x[0] * (-x[0] * x[0]).exp());
    let mut last = base;
    for amp in [1e-3, 1e-2, 1e-1] {
        let d = symmetry_deviation(&w.u.add_scaled(amp, &odd).unwrap()).unwrap();
        assert!(d > last);
        last = d;
    }
}

#[test]
fn exponential_tails_on_staggered_windows() {
    let (f, w) = ground_state(1, 0.5, 3.0, 3.0, 16.0, 512);
    for window in FitWindow::staggered(f.spec()) {
        let (fu, fv) = fit_decay(f.params(), &w, window).unwrap();
        for fit in [fu, fv] {
            assert!(fit.theory_applicable);
            assert!(fit.relative_error() <= 0.15, "{fit:?}");
            assert!(fit.r_squared > 0.99);
        }
    }
}

#[test]
fn hls_audit_is_finite_at_a_ground_state() {
    let (f, w) = ground_state(3, 2.0, 2.0, 2.0, 8.0, 32);
    let audit = hls_audit(&f, &w).unwrap();
    assert!(audit.interaction_ratio.is_finite() && audit.interaction_ratio > 0.0);
    assert!(audit.potential_ratio.is_finite() && audit.potential_ratio > 0.0);
}

#[test]
fn solved_fields_round_trip_through_the_binary_format() {
    let (_, w) = ground_state(1, 0.5, 2.5, 2.5, 16.0, 128);
    let mut bytes = Vec::new();
    write_field(&mut bytes, &w.u).unwrap();
    assert_eq!(read_field(bytes.as_slice()).unwrap(), w.u);
}
