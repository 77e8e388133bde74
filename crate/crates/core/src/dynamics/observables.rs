//! Closed-form position observables of the driven single-band dynamics.
//!
//! For an initial packet `d(0)` the mean position and spreading follow from
//! the Bessel-kernel evolution through a handful of initial-data sums: the
//! coherences `C_1 = sum d_n^* d_{n+1}`, `C_2 = sum d_n^* d_{n+2}`, and the
//! site-weighted coherence `G = sum n d_n^* d_{n+1}`. The phase that pairs
//! with the envelope `Q(t)` is `e^{+i q delta t / 2}`, matching the kernel;
//! the equivalent forms in the source derivation of the spreading formula
//! carry the conjugated coherences, which is the same statement. Every
//! closed form here is cross-checked against direct evaluation on propagated
//! amplitudes.

use super::propagate::q_envelope;
use super::state::AmplitudeState;
use crate::basis::WannierStarkBasis;
use crate::bessel::bessel_j;
use crate::units::LatticeParams;
use num_complex::Complex64;
use std::io::Write;

/// Which coupling element a Rabi frequency refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiOrder {
    /// Nearest-neighbor coupling via `X_1` (drive near `omega_B`).
    First,
    /// Next-nearest coupling via `X_2` (drive near `2 omega_B`).
    Second,
}

/// Single-site dressed phase
/// `phi_n(t) = -n omega_B t - (F0/omega)(X_00 + n) cos(omega t)`.
pub fn phase_phi(n: i64, t: f64, params: &LatticeParams, x00: f64) -> f64 {
    let nf = n as f64;
    -nf * params.omega_b() * t
        - params.f0() / params.omega() * (x00 + nf) * (params.omega() * t).cos()
}

/// Neighbor phase difference `phi(t) = phi_1(t) - phi_0(t)
/// = -omega_B t - (F0/omega) cos(omega t)`; independent of `X_00`.
pub fn phase_diff(t: f64, params: &LatticeParams) -> f64 {
    -params.omega_b() * t - params.f0() / params.omega() * (params.omega() * t).cos()
}

/// Effective Rabi frequency `Omega_p = omega X_p J_1(F0/omega)`.
///
/// The equivalent form `(F0 X_p / 2)[J_0 + J_2](F0/omega)` (Bessel
/// recurrence) is evaluated alongside and the two are asserted to agree to
/// 1e-12.
pub fn rabi_frequency(order: RabiOrder, params: &LatticeParams, basis: &WannierStarkBasis) -> f64 {
    let (primary, alternate) = rabi_frequency_forms(order, params, basis);
    assert!(
        (primary - alternate).abs() <= 1e-12 * (1.0 + primary.abs()),
        "Rabi frequency forms disagree: {primary:e} vs {alternate:e}"
    );
    primary
}

/// Both algebraic forms of the Rabi frequency: `omega X_p J_1(F0/omega)` and
/// `(F0 X_p / 2)[J_0(F0/omega) + J_2(F0/omega)]`.
pub fn rabi_frequency_forms(
    order: RabiOrder,
    params: &LatticeParams,
    basis: &WannierStarkBasis,
) -> (f64, f64) {
    assert_eq!(basis.v0(), params.v0(), "basis was built for different v0");
    assert_eq!(basis.f(), params.f(), "basis was built for different f");
    let x_p = match order {
        RabiOrder::First => basis.x1(),
        RabiOrder::Second => basis.x2(),
    };
    let ratio = params.f0() / params.omega();
    let primary = params.omega() * x_p * bessel_j(1, ratio);
    let alternate = params.f0() * x_p / 2.0 * (bessel_j(0, ratio) + bessel_j(2, ratio));
    (primary, alternate)
}

/// Group velocity of a plane-wave-like packet at resonance,
/// `v_g = -2 Omega_1 cos(k0)`.
pub fn group_velocity(k0: f64, omega1: f64) -> f64 {
    -2.0 * omega1 * k0.cos()
}

/// Precomputed initial-data sums for the closed-form observables of one
/// initial packet. Evaluating `mean_x(t)` / `mean_x2(t)` is then O(1).
#[derive(Debug, Clone)]
pub struct ObservableEvaluator {
    omega1: f64,
    delta: f64,
    f0_over_omega: f64,
    omega: f64,
    omega_b: f64,
    x0: f64,
    x1: f64,
    x0_sq: f64,
    x1_sq: f64,
    /// nearest-neighbor coherence `sum d_n^* d_{n+1}` of the initial data
    c1: Complex64,
    /// next-nearest coherence `sum d_n^* d_{n+2}`
    c2: Complex64,
    /// site-weighted coherence `sum n d_n^* d_{n+1}`
    g: Complex64,
    mean_n: f64,
    mean_n_sq: f64,
}

impl ObservableEvaluator {
    pub fn new(d0: &AmplitudeState, basis: &WannierStarkBasis, params: &LatticeParams) -> Self {
        let omega1 = rabi_frequency(RabiOrder::First, params, basis);
        Self {
            omega1,
            delta: params.delta(),
            f0_over_omega: params.f0() / params.omega(),
            omega: params.omega(),
            omega_b: params.omega_b(),
            x0: basis.x0(),
            x1: basis.x1(),
            x0_sq: basis.x0_sq(),
            x1_sq: basis.x1_sq(),
            c1: d0.coherence(1),
            c2: d0.coherence(2),
            g: d0.weighted_coherence(),
            mean_n: d0.mean_site(),
            mean_n_sq: d0.mean_site_sq(),
        }
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    fn phase_diff(&self, t: f64) -> f64 {
        -self.omega_b * t - self.f0_over_omega * (self.omega * t).cos()
    }

    /// Closed-form `<x>(t)`.
    pub fn mean_x(&self, t: f64) -> f64 {
        let q = q_envelope(t, self.omega1, self.delta);
        let half = Complex64::from_polar(1.0, self.delta * t / 2.0);
        let e_t = Complex64::from_polar(1.0, self.phase_diff(t));
        let e_0 = Complex64::from_polar(1.0, self.phase_diff(0.0));
        self.mean_x0() + 2.0 * ((-q / 2.0 * half + self.x1 * (e_t - e_0)) * self.c1).re
    }

    /// Closed-form `<x>(0)`.
    pub fn mean_x0(&self) -> f64 {
        let e_0 = Complex64::from_polar(1.0, self.phase_diff(0.0));
        self.x0 + self.mean_n + 2.0 * self.x1 * (e_0 * self.c1).re
    }

    /// Closed-form `<x^2>(t)`, including the `(X_0 + p + 1/2)` cross term
    /// and the nearest-neighbor `x^2` elements `X_1^(2) + 2 n X_1`.
    pub fn mean_x2(&self, t: f64) -> f64 {
        let q = q_envelope(t, self.omega1, self.delta);
        let half = Complex64::from_polar(1.0, self.delta * t / 2.0);
        let full = half * half;
        let e_t = Complex64::from_polar(1.0, self.phase_diff(t));

        // diagonal part sum (X0^(2) + 2 n X0 + n^2) |d_n(t)|^2
        let w = (self.x0 + 0.5) * self.c1 + self.g;
        let diagonal = self.x0_sq + 2.0 * self.x0 * self.mean_n + self.mean_n_sq
            + q * q / 2.0
            - 2.0 * q * (half * w).re
            + q * q / 2.0 * (full * self.c2).re;

        // off-diagonal part sum (X1^(2) + 2 n X1) d_n^*(t) d_{n+1}(t) e^{i phi(t)} + c.c.
        let r_prime = self.g - q / 2.0 * (half * self.c2 + half.conj());
        let off = 2.0 * ((self.x1_sq * self.c1 + 2.0 * self.x1 * r_prime) * e_t).re;

        diagonal + off
    }

    /// Closed-form `<x^2>(0)`.
    pub fn mean_x2_0(&self) -> f64 {
        self.mean_x2(0.0)
    }
}

/// Closed-form mean position of the packet `d0` after evolving for `t`.
pub fn mean_position(
    d0: &AmplitudeState,
    t: f64,
    basis: &WannierStarkBasis,
    params: &LatticeParams,
) -> f64 {
    ObservableEvaluator::new(d0, basis, params).mean_x(t)
}

/// Closed-form mean square position of the packet `d0` after evolving for `t`.
pub fn mean_square_position(
    d0: &AmplitudeState,
    t: f64,
    basis: &WannierStarkBasis,
    params: &LatticeParams,
) -> f64 {
    ObservableEvaluator::new(d0, basis, params).mean_x2(t)
}

/// `<x>` evaluated directly on a (propagated) state via
/// `sum (X_0 + n)|d_n|^2 + X_1 sum (d_n^* d_{n+1} e^{i phi(t)} + c.c.)`,
/// with `phi` taken at the state's own timestamp.
pub fn direct_mean_position(
    state: &AmplitudeState,
    basis: &WannierStarkBasis,
    params: &LatticeParams,
) -> f64 {
    let e_t = Complex64::from_polar(1.0, phase_diff(state.time(), params));
    basis.x0() + state.mean_site() + 2.0 * basis.x1() * (e_t * state.coherence(1)).re
}

/// `<x^2>` evaluated directly on a (propagated) state with the exact
/// nearest-neighbor elements `X^{(2)}_{n,n+1} = X_1^{(2)} + 2 n X_1`.
pub fn direct_mean_square_position(
    state: &AmplitudeState,
    basis: &WannierStarkBasis,
    params: &LatticeParams,
) -> f64 {
    let e_t = Complex64::from_polar(1.0, phase_diff(state.time(), params));
    let diagonal = basis.x0_sq()
        + 2.0 * basis.x0() * state.mean_site()
        + state.mean_site_sq();
    let off = basis.x1_sq() * state.coherence(1) + 2.0 * basis.x1() * state.weighted_coherence();
    diagonal + 2.0 * (off * e_t).re
}

/// Bloch-oscillation mean position in the static lattice (`f0 = 0`):
/// `<x>(t) = xbar + X_1 (sum c_n^*(0) c_{n+1}(0) e^{-i omega_B t} + c.c.)`.
pub fn bloch_mean_position(
    c0: &AmplitudeState,
    t: f64,
    basis: &WannierStarkBasis,
    params: &LatticeParams,
) -> f64 {
    debug_assert_eq!(params.f0(), 0.0, "Bloch closed form assumes a static lattice");
    let xbar = basis.x0() + c0.mean_site();
    let rot = Complex64::from_polar(1.0, -params.omega_b() * t);
    xbar + 2.0 * basis.x1() * (c0.coherence(1) * rot).re
}

/// Sampled observable series `<x>(t)`, `<x^2>(t)` and optionally the
/// site-population matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_x2: Vec<f64>,
    /// `(n_lo, rows)`: one row of `|d_n|^2` per time sample.
    pub site_populations: Option<(i64, Vec<Vec<f64>>)>,
}

impl ObservableSeries {
    pub fn var_x(&self, i: usize) -> f64 {
        self.mean_x2[i] - self.mean_x[i] * self.mean_x[i]
    }

    /// CSV with header `t,mean_x,mean_x2,var_x`, full double precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mean_x,mean_x2,var_x")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                self.times[i],
                self.mean_x[i],
                self.mean_x2[i],
                self.var_x(i)
            )?;
        }
        Ok(())
    }
}

/// Site-population matrix CSV: header `t,p_<n_lo>,...`, one row per sample.
pub fn write_populations_csv<W: Write>(
    mut w: W,
    times: &[f64],
    n_lo: i64,
    rows: &[Vec<f64>],
) -> std::io::Result<()> {
    let n_sites = rows.first().map_or(0, Vec::len);
    let mut header = vec!["t".to_string()];
    for k in 0..n_sites {
        header.push(format!("p_{}", n_lo + k as i64));
    }
    writeln!(w, "{}", header.join(","))?;
    for (t, row) in times.iter().zip(rows) {
        let mut line = format!("{t:.17e}");
        for p in row {
            line.push_str(&format!(",{p:.17e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}
