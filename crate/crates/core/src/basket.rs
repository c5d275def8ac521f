//! kth-to-default basket swaps on `n` exchangeable names.
//!
//! Name `i` triggers at rate `X_t (1 + b · #other defaults)` and each trigger
//! is fatal with probability `1 - e^{-c X_t}`. With `m` names already gone,
//! the next default arrives at rate `β_m Y_t`, where
//! `β_m = (n - m)(1 + m b)` and `Y_t = X_t (1 - e^{-c X_t})`. Conditional on
//! the economy, `τ^k` is a hypoexponential variable in the clock `∫ Y`, whose
//! CDF is the `α/β` expansion evaluated here through the occupation-time MGF.

use serde::Serialize;

use nalgebra::DMatrix;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::matexp;
use crate::occupation;

/// Tolerance for `b ≈ 1/i` and for coinciding `β_j`.
pub const SINGULARITY_TOL: f64 = 1e-9;

/// Relative error assumed for each expanded term before summation.
const TERM_REL_ERR: f64 = 64.0 * f64::EPSILON;

/// Results whose tracked error exceeds this fraction of the value carry a
/// precision warning.
pub const PRECISION_WARN_RATIO: f64 = 1e-6;

/// True when `b` lies within tolerance of `1/i` for some `i = 1..n-1`.
pub fn is_singular_contagion(b: f64, names: usize) -> bool {
    (1..names).any(|i| (b - 1.0 / i as f64).abs() < SINGULARITY_TOL)
}

/// `α_{k,j}` and `β_j` of the ordered-default expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedCoefficients {
    alpha: Vec<Vec<f64>>,
    beta: Vec<f64>,
}

impl OrderedCoefficients {
    pub fn names(&self) -> usize {
        self.beta.len()
    }

    /// `α_{k,j}` for `1 <= k <= n`, `0 <= j < k`.
    pub fn alpha(&self, k: usize, j: usize) -> f64 {
        self.alpha[k - 1][j]
    }

    /// Row `α_{k,·}`.
    pub fn alpha_row(&self, k: usize) -> &[f64] {
        &self.alpha[k - 1]
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Runs the coefficient recursion
/// `α_{k+1,j} = α_{k,j} β_k / (β_k - β_j)` (`j < k`), with the last entry
/// closing the row to zero and `α_{1,0} = n`.
pub fn coefficients(names: usize, contagion: f64) -> Result<OrderedCoefficients> {
    if names == 0 {
        return Err(Error::invalid("contract.n", "at least one name is required"));
    }
    if contagion < 0.0 || !contagion.is_finite() {
        return Err(Error::invalid("contract.b", format!("must be finite and >= 0, got {contagion}")));
    }
    let n = names as f64;
    let beta: Vec<f64> = (0..names)
        .map(|j| (n - j as f64) * (1.0 + j as f64 * contagion))
        .collect();
    for j in 0..names {
        for k in j + 1..names {
            if (beta[j] - beta[k]).abs() < SINGULARITY_TOL {
                return Err(Error::Degenerate(format!(
                    "beta_{j} = beta_{k} = {} at b = {contagion}",
                    beta[j]
                )));
            }
        }
    }
    let mut alpha = Vec::with_capacity(names);
    alpha.push(vec![n]);
    for k in 1..names {
        let prev: &Vec<f64> = &alpha[k - 1];
        let mut row: Vec<f64> = (0..k)
            .map(|j| prev[j] * beta[k] / (beta[k] - beta[j]))
            .collect();
        let closing = -neumaier_sum(row.iter().copied()).0;
        row.push(closing);
        alpha.push(row);
    }
    Ok(OrderedCoefficients { alpha, beta })
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid("time", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `y_j = x_j (1 - e^{-c x_j})`.
pub fn y_vector(chain: &ChainSpec, fatality_shape: f64) -> Vec<f64> {
    chain
        .values()
        .iter()
        .map(|&x| -x * (-fatality_shape * x).exp_m1())
        .collect()
}

/// Compensated sum; also returns `Σ |x|` for error tracking.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs = 0.0f64;
    for v in values {
        abs += v.abs();
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    (sum + comp, abs)
}

/// Evaluation route for `P(τ^k <= t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CdfRoute {
    /// The `α/β` expansion over occupation-time MGFs.
    Expansion,
    /// Exponential of the joint generator on (defaults so far, economy
    /// state). Free of cancellation; dimension `(k + 1) M`.
    JointChain,
}

/// A CDF value together with its tracked error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfValue {
    pub probability: f64,
    pub error_bound: f64,
    pub route: CdfRoute,
}

impl CdfValue {
    pub fn precision_warning(&self) -> bool {
        self.error_bound > PRECISION_WARN_RATIO * self.probability.abs()
    }
}

/// Basket contract: `n` names, contagion `b`, fatality shape `c`, flat rate
/// `r`, maturity `T`, seniority `k`, economy chain started in `initial`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasketContract {
    names: usize,
    contagion: f64,
    fatality_shape: f64,
    rate: f64,
    maturity: f64,
    seniority: usize,
    chain: ChainSpec,
    initial: usize,
    coefficients: OrderedCoefficients,
}

impl BasketContract {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        names: usize,
        contagion: f64,
        fatality_shape: f64,
        rate: f64,
        maturity: f64,
        seniority: usize,
        chain: ChainSpec,
        initial: usize,
    ) -> Result<Self> {
        if names == 0 {
            return Err(Error::invalid("contract.n", "at least one name is required"));
        }
        if seniority == 0 || seniority > names {
            return Err(Error::invalid(
                "contract.k",
                format!("seniority {seniority} outside 1..={names}"),
            ));
        }
        if fatality_shape <= 0.0 || !fatality_shape.is_finite() {
            return Err(Error::invalid("contract.c", format!("must be finite and > 0, got {fatality_shape}")));
        }
        if !rate.is_finite() {
            return Err(Error::invalid("contract.r", "must be finite"));
        }
        if maturity < 0.0 || !maturity.is_finite() {
            return Err(Error::invalid("contract.T", format!("must be finite and >= 0, got {maturity}")));
        }
        if let Some(j) = chain.values().iter().position(|&x| x < 0.0) {
            return Err(Error::invalid(
                "chain.states",
                format!("state {} value drives an intensity and must be >= 0", j + 1),
            ));
        }
        chain.check_state(initial)?;
        if let Some(i) = (1..names).find(|&i| (contagion - 1.0 / i as f64).abs() < SINGULARITY_TOL) {
            return Err(Error::Degenerate(format!("b = {contagion} is within {SINGULARITY_TOL:e} of 1/{i}")));
        }
        let coefficients = coefficients(names, contagion)?;
        Ok(Self {
            names,
            contagion,
            fatality_shape,
            rate,
            maturity,
            seniority,
            chain,
            initial,
            coefficients,
        })
    }

    /// Same contract with a different `(b, c)` pair.
    pub fn with_contagion(&self, contagion: f64, fatality_shape: f64) -> Result<Self> {
        Self::new(
            self.names,
            contagion,
            fatality_shape,
            self.rate,
            self.maturity,
            self.seniority,
            self.chain.clone(),
            self.initial,
        )
    }

    pub fn with_seniority(&self, seniority: usize) -> Result<Self> {
        if seniority == 0 || seniority > self.names {
            return Err(Error::invalid(
                "contract.k",
                format!("seniority {seniority} outside 1..={}", self.names),
            ));
        }
        Ok(Self { seniority, ..self.clone() })
    }

    pub fn names(&self) -> usize {
        self.names
    }
    pub fn contagion(&self) -> f64 {
        self.contagion
    }
    pub fn fatality_shape(&self) -> f64 {
        self.fatality_shape
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn maturity(&self) -> f64 {
        self.maturity
    }
    pub fn seniority(&self) -> usize {
        self.seniority
    }
    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }
    pub fn initial_state(&self) -> usize {
        self.initial
    }
    pub fn coefficients(&self) -> &OrderedCoefficients {
        &self.coefficients
    }

    /// `Y` per state.
    pub fn y(&self) -> Vec<f64> {
        y_vector(&self.chain, self.fatality_shape)
    }

    /// Aggregate fatal default rate in `state` with `defaults` names gone.
    pub fn default_rate(&self, state: usize, defaults: usize) -> f64 {
        if defaults >= self.names {
            return 0.0;
        }
        let x = self.chain.values()[state];
        self.coefficients.beta[defaults] * x * -(-self.fatality_shape * x).exp_m1()
    }

    /// `P(τ^k <= t)` for every `k = 1..n`.
    ///
    /// Evaluated by the `α/β` expansion. Seniorities whose tracked
    /// cancellation error exceeds [`PRECISION_WARN_RATIO`] of the value are
    /// re-evaluated on the joint chain when its dimension allows; otherwise
    /// they keep the warning.
    pub fn cdf_all(&self, t: f64) -> Result<Vec<CdfValue>> {
        let mut values = self.cdf_expansion(t)?;
        let Some(deepest) = values.iter().rposition(|v| v.precision_warning()) else {
            return Ok(values);
        };
        if (deepest + 2) * self.chain.len() > matexp::MAX_DIM {
            return Ok(values);
        }
        let joint = self.cdf_joint_chain(t, deepest + 1)?;
        for (v, j) in values.iter_mut().zip(joint) {
            if v.precision_warning() {
                *v = j;
            }
        }
        Ok(values)
    }

    /// `P(τ^k <= t)` for every `k` by the requested route. The joint-chain
    /// route fails when `(n + 1) M` exceeds the kernel dimension limit.
    pub fn cdf_all_with(&self, t: f64, route: CdfRoute) -> Result<Vec<CdfValue>> {
        match route {
            CdfRoute::Expansion => self.cdf_expansion(t),
            CdfRoute::JointChain => self.cdf_joint_chain(t, self.names),
        }
    }

    /// Levels `0..=depth` of the joint chain; level `depth` absorbs.
    fn cdf_joint_chain(&self, t: f64, depth: usize) -> Result<Vec<CdfValue>> {
        check_time(t)?;
        let m = self.chain.len();
        let dim = (depth + 1) * m;
        if dim > matexp::MAX_DIM {
            return Err(Error::invalid(
                "contract",
                format!("joint chain needs dimension {dim} > {}", matexp::MAX_DIM),
            ));
        }
        let q = self.chain.generator();
        let mut g = DMatrix::zeros(dim, dim);
        for level in 0..depth {
            let offset = level * m;
            g.view_mut((offset, offset), (m, m)).copy_from(&q);
            for s in 0..m {
                let rate = self.default_rate(s, level);
                g[(offset + s, offset + s)] -= rate;
                g[(offset + s, offset + m + s)] += rate;
            }
        }
        let last = depth * m;
        g.view_mut((last, last), (m, m)).copy_from(&q);
        let e = matexp::expm(&g, t)?;
        let start = self.initial;
        // Mass at level >= k, accumulated from the deepest level upwards.
        let mut tail = 0.0;
        let mut out = vec![0.0; depth];
        for level in (1..=depth).rev() {
            tail += (0..m).map(|s| e[(start, level * m + s)]).sum::<f64>();
            out[level - 1] = tail;
        }
        Ok(out
            .into_iter()
            .map(|p| CdfValue {
                probability: p.clamp(0.0, 1.0),
                error_bound: TERM_REL_ERR * p.abs(),
                route: CdfRoute::JointChain,
            })
            .collect())
    }

    fn cdf_expansion(&self, t: f64) -> Result<Vec<CdfValue>> {
        check_time(t)?;
        let y = self.y();
        // 1 - Ψ_i(-β_j y, t) for each j, shared by all seniorities.
        let complements = self
            .coefficients
            .beta
            .iter()
            .map(|&beta| {
                let weights: Vec<f64> = y.iter().map(|v| -beta * v).collect();
                occupation::mgf_complement(&self.chain, &weights, t).map(|c| c[self.initial])
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((1..=self.names)
            .map(|k| {
                let row = self.coefficients.alpha_row(k);
                let (sum, abs) = neumaier_sum(
                    row.iter()
                        .enumerate()
                        .map(|(j, a)| a / self.coefficients.beta[j] * complements[j]),
                );
                CdfValue {
                    probability: sum.clamp(0.0, 1.0),
                    error_bound: abs * TERM_REL_ERR,
                    route: CdfRoute::Expansion,
                }
            })
            .collect())
    }

    /// `P(τ^k <= t)` for the contract's seniority.
    pub fn kth_default_cdf(&self, t: f64) -> Result<CdfValue> {
        Ok(self.cdf_all(t)?[self.seniority - 1])
    }

    /// Upfront premium `S_k = e^{-rT} P(τ^k <= T)` (protection paid at maturity).
    pub fn premium(&self) -> Result<f64> {
        Ok(self.discount() * self.kth_default_cdf(self.maturity)?.probability)
    }

    /// `S_k` for every seniority.
    pub fn premiums(&self) -> Result<Vec<CdfValue>> {
        let d = self.discount();
        Ok(self
            .cdf_all(self.maturity)?
            .into_iter()
            .map(|v| CdfValue {
                probability: d * v.probability,
                error_bound: d * v.error_bound,
                route: v.route,
            })
            .collect())
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.maturity).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub b: f64,
    pub c: f64,
    pub premium: f64,
    pub precision_warning: bool,
}

/// Grid point that could not be priced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub b: f64,
    pub c: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedPoint>,
}

impl SweepTable {
    pub fn premium(&self, k: usize, b: f64, c: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.k == k && r.b == b && r.c == c)
            .map(|r| r.premium)
    }
}

/// Premium table over `k × b_grid × c_grid`, ordered by `k`, then `b`, then
/// `c`. Points with `b ≈ 1/i` are reported in `skipped` instead of failing.
pub fn sweep(base: &BasketContract, b_grid: &[f64], c_grid: &[f64]) -> Result<SweepTable> {
    if b_grid.is_empty() || c_grid.is_empty() {
        return Err(Error::invalid("sweep", "grids must be non-empty"));
    }
    let points: Vec<(f64, f64)> = b_grid
        .iter()
        .flat_map(|&b| c_grid.iter().map(move |&c| (b, c)))
        .collect();
    let price = |&(b, c): &(f64, f64)| -> Result<std::result::Result<Vec<CdfValue>, SkippedPoint>> {
        match base.with_contagion(b, c) {
            Ok(contract) => Ok(Ok(contract.premiums()?)),
            Err(Error::Degenerate(reason)) => Ok(Err(SkippedPoint { b, c, reason })),
            Err(e) => Err(e),
        }
    };
    #[cfg(feature = "parallel")]
    let priced: Vec<_> = {
        use rayon::prelude::*;
        points.par_iter().map(price).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let priced: Vec<_> = points.iter().map(price).collect::<Result<Vec<_>>>()?;

    let mut table = SweepTable::default();
    for k in 1..=base.names() {
        for (point, result) in points.iter().zip(&priced) {
            if let Ok(premiums) = result {
                let v = premiums[k - 1];
                table.rows.push(SweepRow {
                    k,
                    b: point.0,
                    c: point.1,
                    premium: v.probability,
                    precision_warning: v.precision_warning(),
                });
            }
        }
    }
    table.skipped = priced.into_iter().filter_map(|r| r.err()).collect();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn contract(b: f64, c: f64, k: usize) -> BasketContract {
        BasketContract::new(10, b, c, 0.05, 5.0, k, fixtures::four_state_economy(), 0).unwrap()
    }

    #[test]
    fn alpha_one_is_n() {
        assert_eq!(coefficients(10, 0.1).unwrap().alpha(1, 0), 10.0);
        assert_eq!(coefficients(10, 0.37).unwrap().alpha(1, 0), 10.0);
    }

    #[test]
    fn beta_values() {
        let c = coefficients(10, 0.1).unwrap();
        let expected = [10.0, 9.9, 9.6, 9.1, 8.4, 7.5, 6.4, 5.1, 3.6, 1.9];
        for (b, e) in c.beta().iter().zip(expected) {
            assert!((b - e).abs() < 1e-12, "{b} vs {e}");
        }
    }

    #[test]
    fn second_row_by_hand() {
        let c = coefficients(10, 0.1).unwrap();
        assert!((c.alpha(2, 0) + 990.0).abs() < 1e-9);
        assert!((c.alpha(2, 1) - 990.0).abs() < 1e-9);
        let total = c.alpha(2, 0) / 10.0 + c.alpha(2, 1) / 9.9;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_invariants_on_grid() {
        for b in fixtures::contagion_grid(10) {
            let c = coefficients(10, b).unwrap();
            for k in 1..=10 {
                let row = c.alpha_row(k);
                let (s, abs) = neumaier_sum(row.iter().copied());
                if k >= 2 {
                    assert!(s.abs() <= 1e-8 * abs, "b={b} k={k} sum={s}");
                }
                let (w, _) = neumaier_sum(row.iter().zip(c.beta()).map(|(a, b)| a / b));
                assert!((w - 1.0).abs() <= 1e-8, "b={b} k={k} w={w}");
            }
        }
    }

    #[test]
    fn collisions_are_reported() {
        let err = coefficients(10, 0.25).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
        assert!(err.to_string().contains("beta_"));
        assert!(matches!(
            BasketContract::new(10, 0.5, 1.0, 0.0, 5.0, 2, fixtures::four_state_economy(), 0),
            Err(Error::Degenerate(_))
        ));
        assert!(is_singular_contagion(1.0 / 3.0 + 1e-10, 10));
        assert!(!is_singular_contagion(0.1, 10));
    }

    #[test]
    fn y_vector_values() {
        let chain = fixtures::four_state_economy();
        let y = y_vector(&chain, 1.0);
        assert!((y[0] - 0.1 * (1.0 - (-0.1f64).exp())).abs() < 1e-17);
        assert!((y[0] - 0.00951626).abs() < 5e-9);
        for (yj, xj) in y_vector(&chain, 1e3).iter().zip(chain.values()) {
            assert!((yj - xj).abs() < 1e-15);
        }
        let zero = ChainSpec::uniform_jumps(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(y_vector(&zero, 2.0)[0], 0.0);
    }

    #[test]
    fn cdf_at_zero() {
        let c = contract(0.1, 1.0, 3);
        assert!(c.cdf_all(0.0).unwrap().iter().all(|v| v.probability == 0.0));
    }

    #[test]
    fn first_to_default_ignores_contagion() {
        let s1 = contract(0.0, 1.0, 1).premium().unwrap();
        for b in fixtures::contagion_grid(10) {
            let s = contract(b, 1.0, 1).premium().unwrap();
            assert!((s - s1).abs() <= 1e-12, "b={b}");
        }
    }

    #[test]
    fn zero_rate_premium_is_probability() {
        let c = BasketContract::new(10, 0.1, 1.0, 0.0, 5.0, 4, fixtures::four_state_economy(), 0).unwrap();
        assert_eq!(c.premium().unwrap(), c.kth_default_cdf(5.0).unwrap().probability);
    }

    #[test]
    fn contract_validation() {
        let chain = fixtures::four_state_economy();
        assert!(BasketContract::new(10, 0.1, 1.0, 0.0, 5.0, 11, chain.clone(), 0).is_err());
        assert!(BasketContract::new(10, 0.1, 1.0, 0.0, 5.0, 0, chain.clone(), 0).is_err());
        assert!(BasketContract::new(10, 0.1, 0.0, 0.0, 5.0, 1, chain.clone(), 0).is_err());
        assert!(BasketContract::new(10, 0.1, 1.0, 0.0, 5.0, 1, chain, 4).is_err());
    }

    #[test]
    fn sweep_single_point_and_skips() {
        let base = contract(0.1, 1.0, 1);
        let table = sweep(&base, &[0.1], &[1.0]).unwrap();
        assert_eq!(table.rows.len(), 10);
        for row in &table.rows {
            let expected = contract(0.1, 1.0, row.k).premium().unwrap();
            assert_eq!(row.premium, expected);
        }
        let table = sweep(&base, &[0.1, 0.25, 0.5], &[1.0, 2.0]).unwrap();
        assert_eq!(table.rows.len(), 20);
        assert_eq!(table.skipped.len(), 4);
        assert!(sweep(&base, &[], &[1.0]).is_err());
    }
}
