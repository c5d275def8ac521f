mod common;

use common::{adaptive_simpson, assert_within_3se};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trigger_default::montecarlo::{self, McConfig};
use trigger_default::two_firm::{Firm, TwoFirmParams};

/// Horizon beyond which both marginal tails are below `eps`, from the bound
/// `P(τ > L) <= P(first default > L/2) + P(second gap > L/2)`.
fn tail_horizon(p: &TwoFirmParams, eps: f64) -> f64 {
    let slowest = p.fatality * (p.a1 + p.b1).min(p.a1 + p.a2).min(p.b1 + p.b2);
    2.0 * (2.0 / eps).ln() / slowest
}

fn random_params(rng: &mut ChaCha8Rng) -> TwoFirmParams {
    TwoFirmParams::new(
        rng.random_range(0.05..2.0),
        rng.random_range(0.0..2.0),
        rng.random_range(0.05..2.0),
        rng.random_range(0.0..2.0),
        rng.random_range(0.05..1.0),
        0.03,
        5.0,
    )
    .unwrap()
}

#[test]
fn density_integrates_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..30 {
        let p = random_params(&mut rng);
        let end = tail_horizon(&p, 1e-10);
        for firm in [Firm::A, Firm::B] {
            let mass = adaptive_simpson(&|t| p.marginal_density(firm, t), 0.0, end, 1e-11);
            assert!((mass - 1.0).abs() <= 1e-6, "{p:?} {firm:?}: {mass}");
        }
    }
}

#[test]
fn survival_matches_quadrature_of_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut cases: Vec<TwoFirmParams> = (0..10).map(|_| random_params(&mut rng)).collect();
    cases.push(TwoFirmParams::new(0.1, 0.2, 0.1, 0.2, 1.0, 0.0, 1.0).unwrap());
    for p in cases {
        let end = tail_horizon(&p, 1e-12);
        for firm in [Firm::A, Firm::B] {
            for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
                let tail = adaptive_simpson(&|s| p.marginal_density(firm, s), t, end, 1e-12);
                let got = p.marginal_survival(firm, t);
                assert!((got - tail).abs() <= 1e-8, "{p:?} {firm:?} t={t}: {got} vs {tail}");
            }
        }
    }
}

#[test]
fn decomposition_by_default_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for _ in 0..10 {
        let p = random_params(&mut rng);
        let end = tail_horizon(&p, 1e-12);
        for firm in [Firm::A, Firm::B] {
            for t in [0.3, 1.0, 4.0] {
                let second = adaptive_simpson(&|s| p.default_second_density(firm, s), t, end, 1e-12);
                let total = p.survive_and_default_first(firm, t) + second;
                assert!((total - p.marginal_survival(firm, t)).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn density_nonnegative_and_survival_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        for firm in [Firm::A, Firm::B] {
            let mut prev = 1.0 + 1e-15;
            for k in 0..200 {
                let t = k as f64 * 0.1;
                assert!(p.marginal_density(firm, t) >= 0.0);
                let s = p.marginal_survival(firm, t);
                assert!(s <= prev + 1e-15, "{p:?} {firm:?} t={t}");
                prev = s;
                let riskier = TwoFirmParams { fatality: (p.fatality * 1.5).min(1.0), ..p };
                assert!(riskier.marginal_survival(firm, t) <= s + 1e-15);
            }
        }
    }
}

#[test]
fn simulation_matches_marginals() {
    let p = TwoFirmParams::new(0.3, 0.5, 0.2, 0.9, 0.6, 0.05, 5.0).unwrap();
    let grid: Vec<f64> = (1..=10).map(|i| i as f64).collect();
    let est = montecarlo::estimate_many(&McConfig::new(1_000_000, 65, 10.0), 22, |rng| {
        let d = montecarlo::simulate_two_firm(&p, rng);
        let mut v: Vec<f64> = grid.iter().map(|&t| if d.tau_a <= t { 1.0 } else { 0.0 }).collect();
        v.extend(grid.iter().map(|&t| if d.tau_b <= t { 1.0 } else { 0.0 }));
        v.push(if d.tau_a < d.tau_b { 1.0 } else { 0.0 });
        v.push(if d.tau_a.min(d.tau_b) > 1.0 { 1.0 } else { 0.0 });
        v
    })
    .unwrap();
    for (i, &t) in grid.iter().enumerate() {
        assert_within_3se(&format!("F_A({t})"), 1.0 - p.marginal_survival(Firm::A, t), est[i].mean, est[i].std_error);
        assert_within_3se(&format!("F_B({t})"), 1.0 - p.marginal_survival(Firm::B, t), est[10 + i].mean, est[10 + i].std_error);
    }
    assert_within_3se("P(A first)", 0.3 / 0.5, est[20].mean, est[20].std_error);
    assert_within_3se("first-default survival(1)", p.first_default_survival(1.0), est[21].mean, est[21].std_error);
}

#[test]
fn density_matches_finite_difference_of_simulated_cdf() {
    let p = TwoFirmParams::new(0.1, 0.2, 0.1, 0.2, 1.0, 0.0, 1.0).unwrap();
    let h = 0.05;
    let est = montecarlo::estimate(&McConfig::new(1_000_000, 66, 2.0), |rng| {
        let d = montecarlo::simulate_two_firm(&p, rng);
        if d.tau_a > 1.0 - h && d.tau_a <= 1.0 + h { 1.0 / (2.0 * h) } else { 0.0 }
    })
    .unwrap();
    assert_within_3se("f_A(1)", p.marginal_density(Firm::A, 1.0), est.mean, est.std_error);
}

#[test]
fn independent_firms_are_uncorrelated() {
    let p = TwoFirmParams::new(0.4, 0.0, 0.7, 0.0, 0.5, 0.0, 1.0).unwrap();
    let est = montecarlo::estimate_many(&McConfig::new(100_000, 67, 1.0), 3, |rng| {
        let d = montecarlo::simulate_two_firm(&p, rng);
        vec![d.tau_a * d.tau_b, d.tau_a, d.tau_b]
    })
    .unwrap();
    // E[τ_A τ_B] = E[τ_A] E[τ_B] for independent exponentials.
    let (ma, mb) = (1.0 / (0.5 * 0.4), 1.0 / (0.5 * 0.7));
    assert_within_3se("E[τ_A]", ma, est[1].mean, est[1].std_error);
    assert_within_3se("E[τ_B]", mb, est[2].mean, est[2].std_error);
    assert_within_3se("E[τ_A τ_B]", ma * mb, est[0].mean, est[0].std_error);
}

#[test]
fn bond_price_matches_simulation() {
    let p = TwoFirmParams::new(0.1, 0.2, 0.1, 0.2, 0.7, 0.05, 5.0).unwrap();
    let est = montecarlo::estimate_many(&McConfig::new(1_000_000, 68, 5.0), 2, |rng| {
        let d = montecarlo::simulate_two_firm(&p, rng);
        let disc = (-0.05f64 * 5.0).exp();
        vec![if d.tau_a > 5.0 { disc } else { 0.0 }, if d.tau_b > 5.0 { disc } else { 0.0 }]
    })
    .unwrap();
    assert_within_3se("bond A", p.bond_price(Firm::A), est[0].mean, est[0].std_error);
    assert_within_3se("bond B", p.bond_price(Firm::B), est[1].mean, est[1].std_error);
}
