//! Trigger-event reduced-form credit model.
//!
//! Trigger events arrive with an intensity driven by a finite-state economy
//! chain; each trigger is fatal with a state-dependent probability. The
//! crate prices single-name claims, two-firm looping defaults and
//! kth-to-default baskets in closed form through occupation-time moment
//! generating functions, and ships an exact Monte Carlo simulator to check
//! every closed form.

pub mod basket;
pub mod chain;
pub mod error;
pub mod fixtures;
pub mod matexp;
pub mod montecarlo;
pub mod occupation;
pub mod single_name;
pub mod two_firm;
pub mod validation;

pub use basket::{BasketContract, CdfRoute, CdfValue, OrderedCoefficients, SweepTable};
pub use chain::{ChainPath, ChainSpec};
pub use error::{Error, Result};
pub use montecarlo::{McConfig, McEstimate};
pub use single_name::{ClaimSpec, HazardSpec};
pub use two_firm::{Firm, TwoFirmParams};
