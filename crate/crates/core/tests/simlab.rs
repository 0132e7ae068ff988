use pdsel::estimators::MethodSpec;
use pdsel::lasso::PenaltySpec;
use pdsel::numkit::{ols_fit, toeplitz_cov, Robust};
use pdsel::simlab::{
    read_long_csv, run_monte_carlo, simulate_dataset, summarize, write_long_csv, DgpConfig, Draw,
    LongRow, Simulator,
};
use pdsel::Matrix;
use proptest::prelude::*;

fn draw(delta_hat: f64, support: Vec<usize>) -> Option<Draw> {
    Some(Draw {
        delta_hat,
        se: 1.0,
        support,
        per_equation: vec![],
    })
}

proptest! {
    #[test]
    fn rmse_bias_and_variance_agree(
        errs in prop::collection::vec(-5.0f64..5.0, 2..60),
        delta in -1.0f64..1.0,
    ) {
        let draws: Vec<Option<Draw>> = errs.iter().map(|e| draw(delta + e, vec![])).collect();
        let s = summarize("m", &draws, delta, &[0], 10);
        let r = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / r;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / r;
        let lhs = s.rmse * s.rmse - s.bias * s.bias;
        prop_assert!((lhs - var).abs() <= 1e-12 * (s.rmse * s.rmse).max(1e-300) + 1e-15);
        prop_assert!(s.rmse >= s.bias.abs());
    }

    #[test]
    fn potency_and_gauge_are_shares(
        supports in prop::collection::vec(prop::collection::btree_set(0usize..30, 0..30), 2..20),
        nrel in 0usize..30,
    ) {
        let relevant: Vec<usize> = (0..nrel).collect();
        let draws: Vec<Option<Draw>> = supports
            .iter()
            .map(|s| draw(0.0, s.iter().copied().collect()))
            .collect();
        let s = summarize("m", &draws, 0.0, &relevant, 30);
        prop_assert!((0.0..=1.0).contains(&s.potency));
        prop_assert!((0.0..=1.0).contains(&s.gauge));
        // hand count
        let hits: usize = supports.iter().map(|s| s.iter().filter(|&&j| j < nrel).count()).sum();
        if nrel > 0 {
            let pot = hits as f64 / (nrel * supports.len()) as f64;
            prop_assert!((s.potency - pot).abs() < 1e-12);
        }
    }

    #[test]
    fn long_csv_round_trips(
        vals in prop::collection::vec((-1.0f64..1.0, 0.0f64..1e3, 0usize..5), 1..10),
    ) {
        let rows: Vec<LongRow> = vals
            .iter()
            .enumerate()
            .map(|(i, &(a, b, f))| LongRow {
                rho: a,
                psi_d: b,
                method: format!("M-{i},\"x\""),
                bias: a * b,
                rmse: b.sqrt(),
                potency: a.abs(),
                gauge: 1.0 / (1.0 + b),
                mc_se_bias: a / 3.0,
                mc_se_rmse: b / 7.0,
                mc_se_potency: 1e-17 * b,
                mc_se_gauge: f64::MIN_POSITIVE * b,
                failures: f,
                reps: 1000,
            })
            .collect();
        let mut buf = Vec::new();
        write_long_csv(&mut buf, &rows).unwrap();
        prop_assert!(!buf.contains(&b'\r'));
        prop_assert_eq!(read_long_csv(&buf[..]).unwrap(), rows);
    }
}

/// OLS of `d` on `[1, X]` over fresh draws: the mean t-statistic of a
/// relevant control estimates the non-centrality it was calibrated to.
/// The realized t shrinks by about sqrt((n - p - 1) / n), so the check
/// runs with p small relative to n.
#[test]
fn treatment_equation_t_statistics_match_psi() {
    let reps = 2000;
    for (rho, psi) in [(0.0, 4.0), (0.5, 2.0)] {
        let cfg = DgpConfig::new(2000, 20, rho, 2.5, psi);
        let sim = Simulator::new(&cfg).unwrap();
        let t: Vec<f64> = (0..reps)
            .map(|r| {
                let data = sim.draw(r as u64);
                let design = Matrix::from_fn(2000, 21, |i, j| if j == 0 { 1.0 } else { data.x[(i, j - 1)] });
                ols_fit(&design, &data.d, Robust::None).unwrap().tstats[1]
            })
            .collect();
        let mean = t.iter().sum::<f64>() / reps as f64;
        let sd = (t.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let se = sd / (reps as f64).sqrt();
        assert!((mean - psi).abs() <= 3.0 * se, "rho {rho}: mean t {mean}, psi {psi}, se {se}");
    }
}

#[test]
fn sample_covariance_converges_to_toeplitz() {
    let mut cfg = DgpConfig::new(40_000, 6, 0.7, 0.0, 0.0);
    cfg.n_relevant = 0;
    let data = simulate_dataset(&cfg, 9).unwrap();
    let target = toeplitz_cov(0.7, 6).unwrap();
    let n = data.n() as f64;
    for a in 0..6 {
        for b in 0..6 {
            let c: f64 = (0..data.n()).map(|i| data.x[(i, a)] * data.x[(i, b)]).sum::<f64>() / n;
            // sd of each product is at most sqrt(2); 5 sd bands
            assert!((c - target[(a, b)]).abs() < 5.0 * 2f64.sqrt() / n.sqrt(), "({a},{b}): {c}");
        }
    }
}

#[test]
fn reports_do_not_depend_on_the_worker_count() {
    let cfg = DgpConfig::new(120, 30, 0.3, 2.5, 4.0);
    let methods = [
        MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_autometrics(0.05),
        MethodSpec::ols_all(),
    ];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&cfg, &methods, 8, 77).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}
