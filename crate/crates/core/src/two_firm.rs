//! Two-firm looping default with constant fatality probability.
//!
//! Firm A triggers at rate `a1 + a2 1{t >= τ_B}`, firm B at
//! `b1 + b2 1{t >= τ_A}`; each trigger is fatal with probability `p`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this `|b1 - a2|` (resp. `|a1 - b2|`) the density uses its limit form.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Firm {
    A,
    B,
}

impl Firm {
    pub fn label(self) -> &'static str {
        match self {
            Firm::A => "A",
            Firm::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoFirmParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub fatality: f64,
    pub rate: f64,
    pub maturity: f64,
}

impl TwoFirmParams {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, fatality: f64, rate: f64, maturity: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::invalid(
                    format!("two_firm.{name}"),
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        if a1 + b1 <= 0.0 {
            return Err(Error::invalid("two_firm.a1", "a1 + b1 must be > 0"));
        }
        if fatality == 0.0 {
            return Err(Error::invalid(
                "two_firm.p",
                "p = 0 means no trigger is ever fatal; defaults never occur",
            ));
        }
        if !(fatality > 0.0 && fatality <= 1.0) {
            return Err(Error::invalid("two_firm.p", format!("must lie in (0, 1], got {fatality}")));
        }
        if !rate.is_finite() {
            return Err(Error::invalid("two_firm.r", "must be finite"));
        }
        if maturity < 0.0 || !maturity.is_finite() {
            return Err(Error::invalid("two_firm.T", format!("must be finite and >= 0, got {maturity}")));
        }
        Ok(Self {
            a1,
            a2,
            b1,
            b2,
            fatality,
            rate,
            maturity,
        })
    }

    /// `(own base, own jump, other base)` intensities for `firm`.
    fn roles(&self, firm: Firm) -> (f64, f64, f64) {
        match firm {
            Firm::A => (self.a1, self.a2, self.b1),
            Firm::B => (self.b1, self.b2, self.a1),
        }
    }

    fn first_rate(&self) -> f64 {
        self.a1 + self.b1
    }

    /// `(e^{-p(own+jump)t} - e^{-p(a1+b1)t}) / (other - jump)`, with the
    /// limit `p t e^{-p(a1+b1)t}` at a vanishing denominator.
    fn convolution_kernel(&self, firm: Firm, t: f64) -> f64 {
        let (own, jump, other) = self.roles(firm);
        let p = self.fatality;
        let total = self.first_rate();
        let gap = other - jump;
        let first = (-p * total * t).exp();
        if gap.abs() < DEGENERACY_TOL {
            return p * t * first;
        }
        let x = p * gap * t;
        if x.abs() < 1.0 {
            first * x.exp_m1() / gap
        } else {
            ((-p * (own + jump) * t).exp() - first) / gap
        }
    }

    /// `P(τ_A ∧ τ_B > t)`.
    pub fn first_default_survival(&self, t: f64) -> f64 {
        (-self.fatality * self.first_rate() * t).exp()
    }

    /// `P(τ_firm > t, firm defaults first)`.
    pub fn survive_and_default_first(&self, firm: Firm, t: f64) -> f64 {
        let (own, _, _) = self.roles(firm);
        own / self.first_rate() * self.first_default_survival(t)
    }

    /// Density of `τ_firm` on the event that the other firm defaulted first.
    pub fn default_second_density(&self, firm: Firm, t: f64) -> f64 {
        let (own, jump, other) = self.roles(firm);
        self.fatality * other * (own + jump) * self.convolution_kernel(firm, t)
    }

    /// Marginal density of `τ_firm`.
    pub fn marginal_density(&self, firm: Firm, t: f64) -> f64 {
        let (own, _, _) = self.roles(firm);
        self.default_second_density(firm, t) + own * self.fatality * self.first_default_survival(t)
    }

    /// `P(τ_firm > t)`: the tail integral of `marginal_density`.
    pub fn marginal_survival(&self, firm: Firm, t: f64) -> f64 {
        let (_, _, other) = self.roles(firm);
        self.first_default_survival(t) + other * self.convolution_kernel(firm, t)
    }

    /// Zero-recovery zero-coupon bond on `firm`, maturity `T`.
    pub fn bond_price(&self, firm: Firm) -> f64 {
        (-self.rate * self.maturity).exp() * self.marginal_survival(firm, self.maturity)
    }
}

/// Marginal density in the standard intensity model (every trigger fatal),
/// written out term by term.
pub fn standard_model_density(a1: f64, a2: f64, b1: f64, b2: f64, firm: Firm, t: f64) -> f64 {
    let total = a1 + b1;
    match firm {
        Firm::A => {
            b1 * (a1 + a2) / (b1 - a2) * ((-(a1 + a2) * t).exp() - (-total * t).exp())
                + a1 * (-total * t).exp()
        }
        Firm::B => {
            a1 * (b1 + b2) / (a1 - b2) * ((-(b1 + b2) * t).exp() - (-total * t).exp())
                + b1 * (-total * t).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixture() -> TwoFirmParams {
        TwoFirmParams::new(0.1, 0.2, 0.1, 0.2, 1.0, 0.05, 5.0).unwrap()
    }

    #[test]
    fn first_default_values() {
        let p = TwoFirmParams::new(1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 1.0).unwrap();
        assert_eq!(p.first_default_survival(0.0), 1.0);
        assert_relative_eq!(p.first_default_survival(1.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert!((p.first_default_survival(1.0) - 0.367879).abs() < 5e-7);
    }

    #[test]
    fn density_term_by_term() {
        let f = fixture().marginal_density(Firm::A, 1.0);
        let expected = -0.3 * ((-0.3f64).exp() - (-0.2f64).exp()) + 0.1 * (-0.2f64).exp();
        assert_relative_eq!(f, expected, max_relative = 1e-13);
        assert!((f - 0.105247).abs() < 5e-7);
    }

    #[test]
    fn symmetric_parameters_give_equal_marginals() {
        let p = TwoFirmParams::new(0.3, 0.7, 0.3, 0.7, 0.6, 0.0, 1.0).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.3;
            assert_eq!(p.marginal_density(Firm::A, t), p.marginal_density(Firm::B, t));
            assert_eq!(p.marginal_survival(Firm::A, t), p.marginal_survival(Firm::B, t));
        }
    }

    #[test]
    fn unit_fatality_is_standard_model() {
        let p = TwoFirmParams::new(0.4, 0.9, 0.25, 0.6, 1.0, 0.0, 1.0).unwrap();
        for k in 0..40 {
            let t = k as f64 * 0.25;
            for firm in [Firm::A, Firm::B] {
                let ours = p.marginal_density(firm, t);
                let std = standard_model_density(0.4, 0.9, 0.25, 0.6, firm, t);
                assert!((ours - std).abs() < 1e-12, "{firm:?} t={t}");
            }
        }
    }

    #[test]
    fn survival_boundary_and_no_contagion() {
        let p = TwoFirmParams::new(0.3, 0.0, 0.8, 0.0, 0.7, 0.0, 1.0).unwrap();
        for firm in [Firm::A, Firm::B] {
            assert!((p.marginal_survival(firm, 0.0) - 1.0).abs() < 1e-12);
        }
        for k in 0..20 {
            let t = k as f64 * 0.5;
            assert_relative_eq!(
                p.marginal_survival(Firm::A, t),
                (-0.7 * 0.3 * t).exp(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn degenerate_limit_is_continuous() {
        let base = TwoFirmParams::new(0.2, 0.5, 0.5, 0.3, 0.8, 0.0, 1.0).unwrap();
        for t in [0.1, 1.0, 3.0, 10.0] {
            let limit = base.marginal_density(Firm::A, t);
            for eps in [1e-6, -1e-6] {
                let shifted = TwoFirmParams { a2: 0.5 + eps, ..base };
                assert!((shifted.marginal_density(Firm::A, t) - limit).abs() < 1e-4);
                assert!((shifted.marginal_survival(Firm::A, t) - base.marginal_survival(Firm::A, t)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn bond_price_limits() {
        let p = TwoFirmParams::new(0.3, 0.4, 0.2, 0.1, 1e-12, 0.05, 5.0).unwrap();
        assert_relative_eq!(p.bond_price(Firm::A), (-0.25f64).exp(), max_relative = 1e-10);
        let p = TwoFirmParams { rate: 0.0, fatality: 0.6, ..p };
        assert_eq!(p.bond_price(Firm::B), p.marginal_survival(Firm::B, 5.0));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(TwoFirmParams::new(0.0, 1.0, 0.0, 1.0, 0.5, 0.0, 1.0).is_err());
        assert!(TwoFirmParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(TwoFirmParams::new(1.0, 1.0, 1.0, 1.0, 1.5, 0.0, 1.0).is_err());
        assert!(TwoFirmParams::new(-1.0, 1.0, 1.0, 1.0, 0.5, 0.0, 1.0).is_err());
    }
}
