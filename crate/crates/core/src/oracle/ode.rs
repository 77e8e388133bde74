//! Fixed-step classical Runge-Kutta integration of the coupled site
//! amplitude equations. Fixed stepping keeps runs reproducible and makes
//! convergence studies clean.

use crate::dynamics::{window_slack, AmplitudeState, CouplingModel, EDGE_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// `h * max(frequency)` must stay below this for the fixed-step integrator.
pub const STABILITY_BOUND: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct OdeConfig {
    step: f64,
    coupling: CouplingModel,
    t_end: f64,
    sample_stride: usize,
}

impl OdeConfig {
    pub fn new(step: f64, coupling: CouplingModel, t_end: f64, sample_stride: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {step}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be >= 0, got {t_end}")));
        }
        let rate = coupling.max_frequency().max(coupling.coupling_scale());
        let product = step * rate;
        if product >= STABILITY_BOUND {
            return Err(Error::StabilityBound { h: step, product, bound: STABILITY_BOUND });
        }
        Ok(Self { step, coupling, t_end, sample_stride: sample_stride.max(1) })
    }

    pub fn coupling(&self) -> &CouplingModel {
        &self.coupling
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }
}

/// Time series of amplitude states plus run diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<AmplitudeState>,
    norm_drift: f64,
    max_edge_amplitude: f64,
}

impl Trajectory {
    pub fn from_states(states: Vec<AmplitudeState>) -> Self {
        let norm_drift = states
            .iter()
            .map(|s| (s.norm_sq() - 1.0).abs())
            .fold(0.0, f64::max);
        let max_edge_amplitude = states.iter().map(|s| s.edge_amplitude()).fold(0.0, f64::max);
        Self { states, norm_drift, max_edge_amplitude }
    }

    pub fn states(&self) -> &[AmplitudeState] {
        &self.states
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time()).collect()
    }

    pub fn last(&self) -> &AmplitudeState {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Largest deviation of any sample's norm from one.
    pub fn norm_drift(&self) -> f64 {
        self.norm_drift
    }

    pub fn max_edge_amplitude(&self) -> f64 {
        self.max_edge_amplitude
    }
}

/// Integrates the selected coupling model from `d0` to `t_end`, sampling
/// every `sample_stride` steps (the initial and final states are always
/// kept). The window is grown up front from the coupling's hop estimate.
pub fn integrate_amplitudes(d0: &AmplitudeState, cfg: &OdeConfig) -> Result<Trajectory> {
    let reach = cfg.coupling.reach();
    let hops = 2.0 * cfg.coupling.coupling_scale() * cfg.t_end;
    let slack = reach * window_slack(hops);
    let (w_lo, w_hi) = {
        let (p_lo, p_hi) = d0
            .populated_bounds(crate::dynamics::POPULATED_EPS)
            .unwrap_or((d0.n_lo(), d0.n_hi()));
        (p_lo - slack, p_hi + slack)
    };
    let state = d0.embedded(w_lo.min(d0.n_lo()), w_hi.max(d0.n_hi()));

    let steps = (cfg.t_end / cfg.step).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { cfg.t_end / steps as f64 };
    let n = state.len();
    let mut d: Vec<Complex64> = state.amplitudes().to_vec();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); n];

    let t0 = d0.time();
    let mut samples = vec![AmplitudeState::new(state.n_lo(), d.clone(), t0)];

    for i in 0..steps {
        let t = t0 + i as f64 * h;
        cfg.coupling.apply(t, &d, &mut k1);
        for j in 0..n {
            scratch[j] = d[j] + 0.5 * h * k1[j];
        }
        cfg.coupling.apply(t + 0.5 * h, &scratch, &mut k2);
        for j in 0..n {
            scratch[j] = d[j] + 0.5 * h * k2[j];
        }
        cfg.coupling.apply(t + 0.5 * h, &scratch, &mut k3);
        for j in 0..n {
            scratch[j] = d[j] + h * k3[j];
        }
        cfg.coupling.apply(t + h, &scratch, &mut k4);
        for j in 0..n {
            d[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }

        let done = i + 1 == steps;
        if (i + 1) % cfg.sample_stride == 0 || done {
            samples.push(AmplitudeState::new(state.n_lo(), d.clone(), t0 + (i + 1) as f64 * h));
        }
    }

    let trajectory = Trajectory::from_states(samples);
    if trajectory.max_edge_amplitude() > EDGE_TOL {
        return Err(Error::WindowOverflow {
            edge_amplitude: trajectory.max_edge_amplitude(),
            edge_tol: EDGE_TOL,
        });
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::propagate_exact;

    #[test]
    fn zero_coupling_is_constant() {
        let d0 = AmplitudeState::plane_wave(3, 0.4, (-5, 5));
        let cfg = OdeConfig::new(
            0.1,
            CouplingModel::NearestNeighbor { omega1: 0.0, delta: 0.1 },
            50.0,
            100,
        )
        .unwrap();
        let traj = integrate_amplitudes(&d0, &cfg).unwrap();
        let last = traj.last();
        for n in d0.sites() {
            assert!((last.amplitude(n) - d0.amplitude(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn stability_bound_enforced() {
        let err = OdeConfig::new(
            10.0,
            CouplingModel::NearestNeighbor { omega1: 0.2, delta: 0.0 },
            1.0,
            1,
        );
        assert!(matches!(err, Err(Error::StabilityBound { .. })));
    }

    #[test]
    fn nearest_neighbor_matches_exact_propagator() {
        let (omega1, delta) = (0.05, 0.1);
        let d0 = AmplitudeState::single_site(0, (-2, 2));
        let t_end = 4.0 * std::f64::consts::PI / delta;
        let cfg = OdeConfig::new(
            0.02,
            CouplingModel::NearestNeighbor { omega1, delta },
            t_end,
            1000,
        )
        .unwrap();
        let traj = integrate_amplitudes(&d0, &cfg).unwrap();
        assert!(traj.norm_drift() < 1e-9, "norm drift {}", traj.norm_drift());
        for state in traj.states() {
            let exact = propagate_exact(&d0, state.time(), omega1, delta).unwrap();
            for n in state.sites() {
                let err = (state.amplitude(n).norm_sqr() - exact.amplitude(n).norm_sqr()).abs();
                assert!(err < 1e-8, "t={} site {n}: {err:e}", state.time());
            }
        }
    }

    #[test]
    fn next_nearest_touches_only_even_offsets() {
        let d0 = AmplitudeState::single_site(0, (-2, 2));
        let cfg =
            OdeConfig::new(0.5, CouplingModel::NextNearest { omega2: 2e-3 }, 2000.0, 400).unwrap();
        let traj = integrate_amplitudes(&d0, &cfg).unwrap();
        let last = traj.last();
        let mut even = 0.0;
        for n in last.sites() {
            let p = last.amplitude(n).norm_sqr();
            if n.rem_euclid(2) == 1 {
                assert!(p < 1e-28, "odd site {n}: {p:e}");
            } else if n != 0 {
                even += p;
            }
        }
        assert!(even > 1e-6, "even sites should be populated, got {even:e}");
    }

    #[test]
    fn rk4_convergence_order() {
        let (omega1, delta) = (0.08, 0.12);
        let d0 = AmplitudeState::single_site(0, (-2, 2));
        let t_end = 40.0;
        let reference = propagate_exact(&d0, t_end, omega1, delta).unwrap();
        let error_at = |h: f64| -> f64 {
            let cfg = OdeConfig::new(
                h,
                CouplingModel::NearestNeighbor { omega1, delta },
                t_end,
                usize::MAX,
            )
            .unwrap();
            let traj = integrate_amplitudes(&d0, &cfg).unwrap();
            let last = traj.last();
            reference
                .sites()
                .map(|n| (last.amplitude(n) - reference.amplitude(n)).norm())
                .fold(0.0, f64::max)
        };
        let e1 = error_at(2.0);
        let e2 = error_at(1.0);
        let e3 = error_at(0.5);
        let order12 = (e1 / e2).log2();
        let order23 = (e2 / e3).log2();
        assert!(
            (order12 - 4.0).abs() < 0.4 && (order23 - 4.0).abs() < 0.4,
            "orders {order12:.2}, {order23:.2} (errors {e1:e}, {e2:e}, {e3:e})"
        );
    }

    #[test]
    fn norm_drift_small_over_many_steps() {
        let (omega1, delta) = (0.05, 0.0);
        let d0 = AmplitudeState::single_site(0, (-2, 2));
        // 1e5 steps
        let cfg = OdeConfig::new(
            0.005,
            CouplingModel::NearestNeighbor { omega1, delta },
            500.0,
            100000,
        )
        .unwrap();
        let traj = integrate_amplitudes(&d0, &cfg).unwrap();
        assert!(traj.norm_drift() < 1e-9, "drift {}", traj.norm_drift());
    }
}
