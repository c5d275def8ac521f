//! Oracles shared by the integration tests. None of them reuse the
//! closed-form routes they check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trigger_default::{BasketContract, ChainSpec};

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `P(kth order statistic of n iid Exp(θ) <= t)`.
pub fn binomial_order_statistic_cdf(n: usize, k: usize, theta: f64, t: f64) -> f64 {
    let q = -(-theta * t).exp_m1();
    (k..=n)
        .map(|m| binomial(n, m) * q.powi(m as i32) * (1.0 - q).powi((n - m) as i32))
        .sum()
}

pub fn binomial(n: usize, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Dense generator of a finite Markov chain, as plain rows.
pub type Rows = Vec<Vec<f64>>;

/// Transient law at `t` of a finite chain started in `start`, by
/// uniformization (Poisson-weighted powers of `I + G / Λ`).
pub fn uniformized_law(generator: &Rows, start: usize, t: f64) -> Vec<f64> {
    let d = generator.len();
    let rate = (0..d).map(|i| -generator[i][i]).fold(0.0f64, f64::max).max(1e-300);
    let mut dist = vec![0.0; d];
    dist[start] = 1.0;
    let lt = rate * t;
    // Split the Poisson weight into exp(-lt) chunks to avoid underflow.
    let mut weight = 1.0f64;
    let mut log_scale = -lt;
    let mut out = vec![0.0; d];
    let mut k = 0usize;
    loop {
        let w = weight * log_scale.exp();
        for i in 0..d {
            out[i] += w * dist[i];
        }
        k += 1;
        if k as f64 > lt + 20.0 * lt.sqrt() + 50.0 {
            break;
        }
        let mut next = vec![0.0; d];
        for i in 0..d {
            if dist[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let p = if i == j { 1.0 + generator[i][i] / rate } else { generator[i][j] / rate };
                next[j] += dist[i] * p;
            }
        }
        dist = next;
        weight *= lt / k as f64;
        if weight > 1e100 {
            weight *= 1e-100;
            log_scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    out
}

/// `P(τ^k <= t)` for every k, from the joint chain (defaults so far, economy
/// state) whose default transitions fire at `β_m y_s`.
pub fn augmented_kth_cdf(contract: &BasketContract, t: f64) -> Vec<f64> {
    let chain = contract.chain();
    let m_states = chain.len();
    let n = contract.names();
    let b = contract.contagion();
    let c = contract.fatality_shape();
    let q = chain.generator();
    let d = (n + 1) * m_states;
    let mut g = vec![vec![0.0; d]; d];
    for level in 0..=n {
        let beta = (n - level) as f64 * (1.0 + level as f64 * b);
        for s in 0..m_states {
            let row = level * m_states + s;
            for s2 in 0..m_states {
                g[row][level * m_states + s2] += q[(s, s2)];
            }
            if level < n {
                let x = chain.values()[s];
                let rate = beta * x * (1.0 - (-c * x).exp());
                g[row][row] -= rate;
                g[row][(level + 1) * m_states + s] += rate;
            }
        }
    }
    let law = uniformized_law(&g, contract.initial_state(), t);
    (1..=n)
        .map(|k| (k * m_states..d).map(|i| law[i]).sum())
        .collect()
}

/// Random valid chain with `m` states.
pub fn random_chain(seed: u64, m: usize) -> ChainSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    if m == 1 {
        return ChainSpec::constant(values[0]).unwrap();
    }
    let rates: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..4.0)).collect();
    let jumps = (0..m)
        .map(|i| {
            let raw: Vec<f64> = (0..m)
                .map(|j| if i == j { 0.0 } else { rng.random_range(0.05..1.0) })
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        })
        .collect();
    ChainSpec::new(values, rates, jumps).unwrap()
}

/// Prints and checks a Monte Carlo agreement at three standard errors.
pub fn assert_within_3se(label: &str, analytic: f64, mean: f64, se: f64) {
    let z = if se > 0.0 { (mean - analytic).abs() / se } else if mean == analytic { 0.0 } else { f64::INFINITY };
    println!("{label}: analytic {analytic:.8} mc {mean:.8} ± {se:.2e} (z = {z:.2})");
    assert!(z <= 3.0, "{label}: analytic {analytic} vs mc {mean} ± {se} (z = {z})");
}
