//! Shared fixtures for the criterion benches.

use std::f64::consts::PI;

use gkdv_core::{CoupledState, Field, SpectralGrid};

/// Perturbed sech pair on `[-20π, 20π)` with `n` points.
pub fn sech_pair(n: usize) -> CoupledState {
    let grid = SpectralGrid::new(20.0 * PI, n).expect("valid grid");
    let u = Field::from_fn(&grid, |x| 1.2 * 2f64.sqrt() / x.cosh()).expect("finite");
    let v = Field::from_fn(&grid, |x| 2f64.sqrt() / (x - 1.0).cosh()).expect("finite");
    CoupledState::new(0.0, u, v).expect("same grid")
}
