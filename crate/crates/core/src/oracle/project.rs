//! Projection of a grid wave function onto the Wannier-Stark basis,
//! recovering both the bare coefficients `c_n` and the dressed amplitudes
//! `d_n = c_n e^{-i phi_n(t)}`.

use crate::basis::WannierStarkBasis;
use crate::dynamics::{phase_phi, AmplitudeState};
use crate::units::LatticeParams;
use num_complex::Complex64;

/// Default leakage above which the single-band model is flagged as broken.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct WsProjection {
    /// Dressed amplitudes `d_n` over the basis window, timestamped `t`.
    pub amplitudes: AmplitudeState,
    /// Bare coefficients `c_n`.
    pub bare: Vec<Complex64>,
    /// Population missing from the lowest band, `1 - sum |c_n|^2`.
    pub leakage: f64,
    /// Set when the leakage exceeds the threshold: the single-band picture
    /// no longer applies and downstream comparisons are unreliable.
    pub breakdown_flagged: bool,
}

/// Projects `psi` (sampled on the basis grid, normalized) onto the lowest
/// band: `c_n = <phi_n | psi>` by quadrature, dressed with the single-site
/// phase at time `t`.
pub fn project_onto_ws(
    psi: &[Complex64],
    basis: &WannierStarkBasis,
    params: &LatticeParams,
    t: f64,
    leakage_threshold: f64,
) -> WsProjection {
    assert_eq!(psi.len(), basis.grid().n_points(), "psi not sampled on the basis grid");
    let (n_lo, _) = basis.site_window();
    let mut bare = Vec::with_capacity(basis.sites().count());
    let mut dressed = Vec::with_capacity(bare.capacity());
    let mut captured = 0.0;
    for n in basis.sites() {
        let c = basis.overlap(n, psi);
        captured += c.norm_sqr();
        let undress = Complex64::from_polar(1.0, -phase_phi(n, t, params, basis.x0()));
        dressed.push(c * undress);
        bare.push(c);
    }
    let leakage = 1.0 - captured;
    WsProjection {
        amplitudes: AmplitudeState::new(n_lo, dressed, t),
        bare,
        leakage,
        breakdown_flagged: leakage > leakage_threshold,
    }
}
