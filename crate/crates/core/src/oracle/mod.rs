//! Independent numerical integrators that validate the closed-form dynamics:
//! a fixed-step Runge-Kutta integrator for the coupled amplitude equations,
//! and a split-operator solver for the full time-dependent Schrödinger
//! equation on the grid.

mod compare;
mod ode;
mod project;
mod split_step;

pub use compare::{compare_trajectories, Gauge, SampleErrors, TrajectoryComparison};
pub use ode::{integrate_amplitudes, OdeConfig, Trajectory};
pub use project::{project_onto_ws, WsProjection, DEFAULT_LEAKAGE_THRESHOLD};
pub use split_step::{
    energy_expectation, split_step_evolve, write_wave_snapshot, read_wave_snapshot, PdeConfig,
    WaveTrajectory,
};

use crate::dynamics::{propagate_exact, AmplitudeState};
use crate::error::Result;

/// Trajectory of the exact propagator sampled at the given times, packaged
/// for comparison against an integrated run.
pub fn exact_trajectory(
    d0: &AmplitudeState,
    times: &[f64],
    omega1: f64,
    delta: f64,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        states.push(propagate_exact(d0, t, omega1, delta)?);
    }
    Ok(Trajectory::from_states(states))
}
