use cops_core::bounds::{bernstein_upper, chernoff_additive, chernoff_lower, chernoff_relative, f_eps, g_eps, psi, zigzag, zigzag_pieces_at, EpsFunctions};
use cops_core::random::stream_rng;
use rand_distr::{Binomial, Distribution};

const E: f64 = std::f64::consts::E;

/// Empirical frequency and standard error of `event` over `draws` samples
/// of `Bin(n, p)`.
fn tail(n: u64, p: f64, draws: usize, seed: u64, event: impl Fn(f64) -> bool) -> (f64, f64) {
    let bin = Binomial::new(n, p).unwrap();
    let mut rng = stream_rng(seed, 0);
    let hits = (0..draws).filter(|_| event(bin.sample(&mut rng) as f64)).count();
    let f = hits as f64 / draws as f64;
    (f, (f * (1.0 - f) / draws as f64).sqrt())
}

#[test]
fn closed_forms() {
    assert!((chernoff_relative(3.0, 1.0).unwrap().value - 0.73576).abs() < 1e-5);
    assert!((chernoff_additive(100, 0.5, 10.0).unwrap().value - 0.27067).abs() < 1e-5);
    assert!((chernoff_additive(100, 0.5, 1e-9).unwrap().value - 2.0).abs() < 1e-9);
    assert_eq!(psi(0.0).unwrap(), 0.0);
    assert!((psi(E - 1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!(psi(-1.0).is_err());
    for eps in [0.1, 0.5, 0.9] {
        assert!((f_eps(eps, 1.0 / eps).unwrap() + 1.0 / eps).abs() < 1e-12);
        assert!(f_eps(eps, E / eps).unwrap().abs() < 1e-12);
        let x = eps / (E * E);
        assert!((f_eps(eps, x).unwrap() - x * (2.0 * eps.ln() - 3.0)).abs() < 1e-12);
    }
}

#[test]
fn monte_carlo_dominance() {
    let draws = 100_000;
    let (f, se) = tail(1000, 0.3, draws, 1, |x| (x - 300.0).abs() >= 60.0);
    assert!(chernoff_relative(300.0, 0.2).unwrap().value >= f - 3.0 * se);
    let (f, se) = tail(100, 0.5, draws, 2, |x| (x - 50.0).abs() > 10.0);
    assert!(chernoff_additive(100, 0.5, 10.0).unwrap().value >= f - 3.0 * se);
    let (f, se) = tail(500, 0.1, draws, 3, |x| x <= 50.0 - 10.0);
    assert!(chernoff_lower(50.0, 10.0).unwrap().value >= f - 3.0 * se);
    let (f, se) = tail(500, 0.1, draws, 4, |x| x >= 50.0 + 10.0);
    assert!(bernstein_upper(50.0, 10.0).unwrap().value >= f - 3.0 * se);
}

/// Bisection written out independently for `x (log x - 1) = -1/2`.
fn root_at_one() -> f64 {
    let (mut lo, mut hi) = (1e-9f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * (mid.ln() - 1.0) > -0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn g_eps_contract() {
    let r = root_at_one();
    assert!((r - 0.1867).abs() < 1e-4);
    assert!((g_eps(1.0, 1e-10).unwrap() - r).abs() < 1e-10);
    assert!(g_eps(1.0 - 1e-9, 1e-10).unwrap() > (1.0 - 1e-9) / (E * E));
    for k in 1..20 {
        let eps = k as f64 * 0.05;
        let g = g_eps(eps, 1e-10).unwrap();
        assert!((f_eps(eps, g).unwrap() + 0.5).abs() <= 1e-10);
        assert!(g > eps / (E * E) && g <= 1.0 / eps);
        assert!((psi(-1.0 + eps * g).unwrap() - (1.0 - eps / 2.0)).abs() <= 1e-9);
        let ef = EpsFunctions::new(eps, 1e-10).unwrap();
        assert!((ef.degree_threshold(10.0) - eps * g * 10.0).abs() < 1e-12);
        // Bracket sanity: f decreasing through -1/2 on (0, 1/eps].
        assert!(f_eps(eps, 1e-12).unwrap() > -0.5 && f_eps(eps, 1.0 / eps).unwrap() < -0.5);
    }
}

#[test]
fn zigzag_shape() {
    assert_eq!(zigzag(0.5).unwrap(), 0.5);
    assert!((zigzag(1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((zigzag(0.2).unwrap() - 0.4).abs() < 1e-15);
    assert_eq!(zigzag(1.0).unwrap(), 0.0);
    assert!(zigzag(0.0).is_err());
    for k in 2..=12u64 {
        let (l, r) = zigzag_pieces_at(k);
        assert!((l - r).abs() <= 1e-12, "k = {k}");
        let x = 1.0 / k as f64;
        let below = zigzag(x * (1.0 - 1e-9)).unwrap();
        let above = zigzag(x * (1.0 + 1e-9)).unwrap();
        assert!((below - above).abs() < 1e-8);
    }
    for j in 1..=6u64 {
        assert_eq!(zigzag(1.0 / (2 * j) as f64).unwrap(), 0.5);
        let dip = zigzag(1.0 / (2 * j + 1) as f64).unwrap();
        assert!((dip - j as f64 / (2 * j + 1) as f64).abs() < 1e-15);
    }
}
