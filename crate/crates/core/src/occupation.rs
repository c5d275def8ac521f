//! Joint moment generating function of the chain's occupation times,
//! `Ψ_i(u, t) = E[exp(u · T_i(t))]`, evaluated as `e^{A t} 1` with
//! `A = Q + diag(u)`.

use nalgebra::{DMatrix, DVector};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::matexp;

/// How `Ψ` is evaluated. The Runge–Kutta route exists only to cross-check
/// the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MgfMethod {
    #[default]
    ClosedForm,
    RungeKutta { steps: usize },
}

/// A single MGF evaluation request.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfQuery {
    pub weights: Vec<f64>,
    pub time: f64,
    pub initial: usize,
}

impl MgfQuery {
    pub fn evaluate(&self, chain: &ChainSpec) -> Result<f64> {
        chain.check_state(self.initial)?;
        Ok(mgf(chain, &self.weights, self.time)?[self.initial])
    }
}

/// `A = Q + diag(u)`.
pub fn build_a(chain: &ChainSpec, weights: &[f64]) -> Result<DMatrix<f64>> {
    if weights.len() != chain.len() {
        return Err(Error::Dimension {
            expected: chain.len(),
            got: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("mgf weights", "entries must be finite"));
    }
    let mut a = chain.generator();
    for (i, w) in weights.iter().enumerate() {
        a[(i, i)] += w;
    }
    Ok(a)
}

/// `Ψ(u, t)` for every starting state.
pub fn mgf(chain: &ChainSpec, weights: &[f64], t: f64) -> Result<DVector<f64>> {
    mgf_with(chain, weights, t, MgfMethod::ClosedForm)
}

pub fn mgf_with(chain: &ChainSpec, weights: &[f64], t: f64, method: MgfMethod) -> Result<DVector<f64>> {
    let a = build_a(chain, weights)?;
    let ones = DVector::from_element(chain.len(), 1.0);
    let psi = match method {
        MgfMethod::ClosedForm => matexp::exp_action(&a, &ones, t)?,
        MgfMethod::RungeKutta { steps } => rk4(&a, ones, t, steps.max(1))?,
    };
    if psi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericRange("occupation-time MGF overflowed".into()));
    }
    Ok(psi)
}

/// `1 - Ψ(u, t)` without forming the difference. Because `Q 1 = 0`,
/// `d/dt Ψ = e^{At} u`, so the complement is `-∫_0^t e^{As} u ds`; this
/// stays accurate when `Ψ` is close to one.
pub fn mgf_complement(chain: &ChainSpec, weights: &[f64], t: f64) -> Result<DVector<f64>> {
    let a = build_a(chain, weights)?;
    let u = DVector::from_column_slice(weights);
    let integral = matexp::integral_action(&a, &u, t)?;
    Ok(-integral)
}

fn rk4(a: &DMatrix<f64>, mut y: DVector<f64>, t: f64, steps: usize) -> Result<DVector<f64>> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid("time", format!("t = {t} must be finite and >= 0")));
    }
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = a * &y;
        let k2 = a * (&y + &k1 * (h / 2.0));
        let k3 = a * (&y + &k2 * (h / 2.0));
        let k4 = a * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn zero_weights_give_generator() {
        let c = fixtures::four_state_economy();
        assert_eq!(build_a(&c, &[0.0; 4]).unwrap(), c.generator());
    }

    #[test]
    fn single_state_a() {
        let c = ChainSpec::constant(1.0).unwrap();
        assert_eq!(build_a(&c, &[-0.7]).unwrap()[(0, 0)], -0.7);
    }

    #[test]
    fn four_state_a_first_row() {
        let c = fixtures::four_state_economy();
        let a = build_a(&c, &[-1.0, -2.0, -3.0, -4.0]).unwrap();
        let row: Vec<f64> = a.row(0).iter().copied().collect();
        assert_eq!(row, vec![-4.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let c = fixtures::four_state_economy();
        assert!(matches!(build_a(&c, &[0.0; 3]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn mgf_at_zero_and_constant_weights() {
        let c = fixtures::four_state_economy();
        let psi = mgf(&c, &[0.0; 4], 3.0).unwrap();
        assert!(psi.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let psi = mgf(&c, &[-0.3; 4], 3.0).unwrap();
        assert!(psi.iter().all(|v| (v / (-0.9f64).exp() - 1.0).abs() < 1e-12));
        let psi = mgf(&c, &[-0.3, 0.1, -1.0, 0.2], 0.0).unwrap();
        assert!(psi.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn complement_matches_difference() {
        let c = fixtures::four_state_economy();
        let u = [-0.05, -0.1, -0.15, -0.2];
        let psi = mgf(&c, &u, 5.0).unwrap();
        let comp = mgf_complement(&c, &u, 5.0).unwrap();
        for i in 0..4 {
            assert!((1.0 - psi[i] - comp[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn runge_kutta_agrees_with_closed_form() {
        let c = fixtures::four_state_economy();
        let u = [-0.5, -0.2, 0.1, -1.0];
        let exact = mgf(&c, &u, 2.0).unwrap();
        let rk = mgf_with(&c, &u, 2.0, MgfMethod::RungeKutta { steps: 2000 }).unwrap();
        assert!((exact - rk).amax() < 1e-10);
    }

    #[test]
    fn positive_weights_overflow_is_reported() {
        let c = ChainSpec::constant(1.0).unwrap();
        assert!(matches!(mgf(&c, &[800.0], 10.0), Err(Error::NumericRange(_))));
    }
}
