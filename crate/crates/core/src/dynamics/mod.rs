//! Closed-form dynamics of the resonantly modulated tilted lattice in the
//! site-amplitude (single-band Wannier-Stark) picture.
//!
//! The atom's wave function is expanded over the lowest-band states,
//! `Psi = sum_n c_n(t) phi_n(x)`, and the fast single-site phase is split
//! off, `c_n = d_n e^{i phi_n(t)}`. Near the fundamental resonance
//! `omega ~ omega_B` the slow amplitudes obey
//!
//! ```text
//! d'_n = Omega_1 [ d_{n+1} e^{i delta t} - d_{n-1} e^{-i delta t} ]
//! ```
//!
//! whose exact solution is a Bessel-kernel convolution; both the kernel form
//! and an independent Fourier-space form are implemented here, together with
//! the closed-form position observables.

mod coupling;
mod observables;
mod propagate;
mod state;

pub use coupling::{CouplingModel, FullHarmonics};
pub use observables::{
    bloch_mean_position, direct_mean_position, direct_mean_square_position, group_velocity,
    mean_position, mean_square_position, phase_diff, phase_phi, rabi_frequency,
    rabi_frequency_forms, write_populations_csv, ObservableEvaluator, ObservableSeries, RabiOrder,
};
pub use propagate::{propagate_exact, propagate_kspace, q_envelope};
pub use state::AmplitudeState;

/// Norm conservation tolerance after a propagation step.
pub const TOL_NORM: f64 = 1e-9;
/// Largest amplitude magnitude tolerated at the window edges.
pub const EDGE_TOL: f64 = 1e-7;
/// Amplitudes below this threshold do not count as populated when sizing
/// windows.
pub const POPULATED_EPS: f64 = 1e-12;
/// Variance may go this far negative before it is flagged.
pub const TOL_VAR: f64 = 1e-10;

/// Window slack for a Bessel kernel of argument `q`: the sum-cutoff rule
/// plus an Airy-region allowance that keeps the edge amplitude below
/// [`EDGE_TOL`] uniformly in `q` (the transition region of `J_n(q)` widens
/// like `q^(1/3)`).
pub fn window_slack(q: f64) -> i64 {
    crate::bessel::sum_cutoff(q) as i64 + (2.0 * q.abs().cbrt()).ceil() as i64
}
