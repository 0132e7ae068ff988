use pdsel::estimators::{estimate, ols_all, ols_none, Dataset, MethodSpec, Workspace};
use pdsel::lasso::PenaltySpec;
use pdsel::numkit::{ols_fit, Robust};
use pdsel::simlab::{simulate_dataset, DgpConfig};
use pdsel::Matrix;

fn sample(seed: u64) -> Dataset {
    let mut cfg = DgpConfig::new(200, 40, 0.5, 2.5, 4.0);
    cfg.delta = 0.3;
    simulate_dataset(&cfg, seed).unwrap()
}

fn roster() -> Vec<MethodSpec> {
    vec![
        MethodSpec::post_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_lasso(PenaltySpec::bya()),
        MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_lasso(PenaltySpec::bcch()),
        MethodSpec::post_double_adaptive_lasso(PenaltySpec::cv_1se()),
        MethodSpec::post_double_elasticnet(PenaltySpec::cv_min()),
        MethodSpec::autometrics(0.05),
        MethodSpec::post_double_autometrics(0.05),
        MethodSpec::post_double_autometrics(0.01),
    ]
}

/// HC1 OLS of `y` on `[1, d, X_S]`, computed independently.
fn final_ols(data: &Dataset, controls: &[usize]) -> (f64, f64) {
    let design = Matrix::from_fn(data.n(), controls.len() + 2, |i, j| match j {
        0 => 1.0,
        1 => data.d[i],
        _ => data.x[(i, controls[j - 2])],
    });
    let fit = ols_fit(&design, &data.y, Robust::Hc1).unwrap();
    (fit.coefficients[1], fit.se(1))
}

#[test]
fn double_selection_uses_the_union_of_both_equations() {
    for seed in 0..4 {
        let data = sample(seed);
        let mut ws = Workspace::new(&data, seed);
        for m in roster() {
            let e = ws.estimate(&m).unwrap();
            let mut union: Vec<usize> = e.per_equation.iter().flat_map(|s| s.selected.clone()).collect();
            union.sort_unstable();
            union.dedup();
            assert_eq!(e.support_union, union, "{}", m.label());
            assert_eq!(e.per_equation.len(), if m.family.is_double() { 2 } else { 1 });
            assert_eq!(e.k_star, e.support_union.len());
            assert!(e.ci.low < e.delta_hat && e.delta_hat < e.ci.high);
            assert_eq!(e.significant(), !(e.ci.low <= 0.0 && 0.0 <= e.ci.high));
            let (delta, se) = final_ols(&data, &e.support_union);
            assert!((delta - e.delta_hat).abs() < 1e-10, "{}", m.label());
            assert!((se - e.se).abs() < 1e-10, "{}", m.label());
        }
    }
}

#[test]
fn benchmarks_are_the_degenerate_selections() {
    let data = sample(11);
    let all: Vec<usize> = (0..data.p()).collect();
    let full = ols_all(&data).unwrap();
    let (delta, se) = final_ols(&data, &all);
    assert!((full.delta_hat - delta).abs() < 1e-10 && (full.se - se).abs() < 1e-10);
    assert_eq!(full.support_union, all);
    let none = ols_none(&data).unwrap();
    let (delta, se) = final_ols(&data, &[]);
    assert!((none.delta_hat - delta).abs() < 1e-10 && (none.se - se).abs() < 1e-10);
    assert_eq!(none.k_star, 0);
}

#[test]
fn permuting_controls_permutes_supports_only() {
    for seed in 0..3 {
        let data = sample(100 + seed);
        let p = data.p();
        // a fixed derangement: reverse, then rotate
        let perm: Vec<usize> = (0..p).map(|j| (p - 1 - j + 7) % p).collect();
        let x = Matrix::from_fn(data.n(), p, |i, j| data.x[(i, perm[j])]);
        let names = perm.iter().map(|&j| data.names[j].clone()).collect();
        let shuffled = Dataset::new(data.y.clone(), data.d.clone(), x, names).unwrap();
        for m in [
            MethodSpec::post_double_lasso(PenaltySpec::bcch()),
            MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
            MethodSpec::post_double_autometrics(0.05),
            MethodSpec::autometrics(0.01),
        ] {
            let a = estimate(&data, &m, 5).unwrap();
            let b = estimate(&shuffled, &m, 5).unwrap();
            let mut mapped: Vec<usize> = b.support_union.iter().map(|&j| perm[j]).collect();
            mapped.sort_unstable();
            assert_eq!(mapped, a.support_union, "{} seed {seed}", m.label());
            assert!((a.delta_hat - b.delta_hat).abs() < 1e-10, "{}", m.label());
            assert!((a.se - b.se).abs() < 1e-10);
            assert!((a.ci.low - b.ci.low).abs() < 1e-10 && (a.ci.high - b.ci.high).abs() < 1e-10);
        }
    }
}

#[test]
fn workspace_results_match_one_off_calls() {
    let data = sample(21);
    let mut ws = Workspace::new(&data, 9);
    for m in roster() {
        let shared = ws.estimate(&m).unwrap();
        let alone = estimate(&data, &m, 9).unwrap();
        assert_eq!(shared.support_union, alone.support_union, "{}", m.label());
        assert_eq!(shared.delta_hat, alone.delta_hat);
    }
}
