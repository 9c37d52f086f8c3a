use qrkit_bayes::hyper::{beta_from_moments, binomial_upper_tail, default_hyperparams, solve_theta_mean};
use statrs::distribution::{Binomial, DiscreteCDF};

#[test]
fn upper_tail_matches_library_binomial() {
    for &(n, mu, k) in &[(100, 0.3, 40), (1000, 0.02, 40), (1000, 0.05, 40), (60, 0.9, 50), (500, 0.08, 40)] {
        let want = 1.0 - Binomial::new(mu, n as u64).unwrap().cdf(k as u64);
        let got = binomial_upper_tail(n, mu, k);
        assert!((got - want).abs() < 1e-12, "{n} {mu} {k}: {got} vs {want}");
    }
}

#[test]
fn solved_mean_puts_ten_percent_above_k() {
    for &(n, p) in &[(100, 100), (500, 1000), (100, 5000), (10_000, 20_000)] {
        let k = (40f64).max((n as f64).ln()).floor() as u64;
        let mu = solve_theta_mean(p, k as usize, 0.1).unwrap();
        let tail = 1.0 - Binomial::new(mu, p as u64).unwrap().cdf(k);
        assert!((tail - 0.1).abs() < 1e-6, "p = {p}: tail {tail}");
        let hp = default_hyperparams(n, p, 1.0).unwrap();
        let mean = hp.theta_mean();
        assert!((mean - mu).abs() < 1e-12);
        let var = hp.theta_xi * hp.theta_phi / ((hp.theta_xi + hp.theta_phi).powi(2) * (hp.theta_xi + hp.theta_phi + 1.0));
        assert!(mean * (1.0 - mean) > var);
    }
}

#[test]
fn moment_inversion_recovers_moments() {
    let (a, b) = beta_from_moments(0.2, 0.05).unwrap();
    let var = a * b / ((a + b).powi(2) * (a + b + 1.0));
    assert!((a / (a + b) - 0.2).abs() < 1e-12);
    assert!((var.sqrt() - 0.05).abs() < 1e-12);
}
