//! Canonical parameter sets used by tests, the CLI defaults and the demo.

use crate::chain::ChainSpec;

/// Four-state economy: values `0.1 i`, exit rates `(3, 2, 1, 3)`, uniform jumps.
pub fn four_state_economy() -> ChainSpec {
    ChainSpec::uniform_jumps(vec![0.1, 0.2, 0.3, 0.4], vec![3.0, 2.0, 1.0, 3.0])
        .expect("fixture chain is valid")
}

/// Contagion grid `0, 0.05, ..., 0.5` with the singular points `1/i`
/// (`i < 10`) removed.
pub fn contagion_grid(names: usize) -> Vec<f64> {
    (0..=10)
        .map(|i| i as f64 / 20.0)
        .filter(|b| !crate::basket::is_singular_contagion(*b, names))
        .collect()
}

pub const FATALITY_GRID: [f64; 3] = [0.5, 1.0, 2.0];
