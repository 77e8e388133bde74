//! Shared fixtures for the benchmark targets.

use num_complex::Complex64;
use wannier_stark::basis::{BasisTolerances, WannierStarkBasis};
use wannier_stark::dynamics::AmplitudeState;
use wannier_stark::units::{Grid, LatticeParams};

/// Reference basis on a moderate grid, solved once per process.
pub fn bench_basis() -> WannierStarkBasis {
    WannierStarkBasis::solve(
        &LatticeParams::reference(),
        &Grid::new(-16.0, 16.0, 2048).expect("grid"),
        (-4, 4),
        BasisTolerances::default(),
    )
    .expect("basis")
}

/// A spread-out complex packet for propagation benchmarks.
pub fn bench_packet(width: i64) -> AmplitudeState {
    let amplitudes: Vec<Complex64> = (-width..=width)
        .map(|n| Complex64::new(1.0 / (1.0 + n.abs() as f64), 0.3 / (1.0 + n.abs() as f64)))
        .collect();
    AmplitudeState::new(-width, amplitudes, 0.0).normalized()
}
