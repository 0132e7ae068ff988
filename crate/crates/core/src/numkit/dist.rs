//! Reference distributions used by the test battery.

use std::cell::RefCell;
use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// Upper tail probability of a chi-squared variate with `dof` degrees of freedom.
pub fn chi2_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    clamp_p(ChiSquared::new(dof).expect("chi2 dof > 0").sf(x))
}

/// Upper tail probability of an F(d1, d2) variate.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    clamp_p(FisherSnedecor::new(d1, d2).expect("F dof > 0").sf(x))
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided_p(t: f64, dof: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, dof).expect("t dof > 0");
    clamp_p(2.0 * dist.sf(t.abs()))
}

/// Quantile of the Student t distribution.
pub fn t_quantile(p: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("t dof > 0")
        .inverse_cdf(p)
}

/// Quantile of the standard normal distribution.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p)
}

thread_local! {
    static T_CRIT: RefCell<HashMap<(u64, usize), f64>> = RefCell::new(HashMap::new());
    static CHI2_CRIT: RefCell<HashMap<(u64, usize), f64>> = RefCell::new(HashMap::new());
    static F_CRIT: RefCell<HashMap<(u64, usize, usize), f64>> = RefCell::new(HashMap::new());
}

fn memo<K: std::hash::Hash + Eq + Copy>(
    cache: &'static std::thread::LocalKey<RefCell<HashMap<K, f64>>>,
    key: K,
    compute: impl FnOnce() -> f64,
) -> f64 {
    cache.with(|c| {
        if let Some(v) = c.borrow().get(&key) {
            return *v;
        }
        let v = compute();
        c.borrow_mut().insert(key, v);
        v
    })
}

/// Upper-`level` critical value of chi-squared(`dof`), memoized per thread.
pub fn chi2_critical(level: f64, dof: usize) -> f64 {
    memo(&CHI2_CRIT, (level.to_bits(), dof), || {
        if dof == 2 {
            -2.0 * level.ln()
        } else {
            ChiSquared::new(dof as f64)
                .expect("chi2 dof > 0")
                .inverse_cdf(1.0 - level)
        }
    })
}

/// Upper-`level` critical value of F(`d1`, `d2`), memoized per thread.
pub fn f_critical(level: f64, d1: usize, d2: usize) -> f64 {
    memo(&F_CRIT, (level.to_bits(), d1, d2), || {
        FisherSnedecor::new(d1 as f64, d2 as f64)
            .expect("F dof > 0")
            .inverse_cdf(1.0 - level)
    })
}

/// Two-sided critical value `c` with `P(|T_dof| > c) = alpha`, memoized per thread.
pub fn t_critical(alpha: f64, dof: usize) -> f64 {
    memo(&T_CRIT, (alpha.to_bits(), dof), || {
        t_quantile(1.0 - alpha / 2.0, dof as f64)
    })
}

fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_two_dof_is_exponential() {
        for x in [0.1, 1.0, 4.6, 12.0] {
            assert!((chi2_sf(x, 2.0) - (-x / 2.0f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_values_invert_the_tails() {
        for (level, dof) in [(0.01, 2), (0.05, 7), (0.01, 150)] {
            assert!((chi2_sf(chi2_critical(level, dof), dof as f64) - level).abs() < 1e-8);
        }
        for (level, d1, d2) in [(0.05, 1, 300), (0.05, 90, 300), (0.01, 5, 20)] {
            let c = f_critical(level, d1, d2);
            assert!((f_sf(c, d1 as f64, d2 as f64) - level).abs() < 1e-8);
        }
    }

    #[test]
    fn t_critical_matches_known_values() {
        assert!((t_critical(0.05, 10) - 2.228_138_851_986_274).abs() < 1e-9);
        assert!((t_critical(0.01, 1_000_000) - 2.575_829).abs() < 1e-4);
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-9);
    }
}
