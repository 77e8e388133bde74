//! Site-coupling models for the dressed amplitude equations of motion.
//!
//! `NearestNeighbor` is the rotating-wave reduction near `omega ~ omega_B`;
//! `NextNearest` the analogous reduction at `omega ~ 2 omega_B`;
//! `FullHarmonics` keeps the complete harmonic expansion
//!
//! ```text
//! d'_n = (F0/2) sum_{p != 0} X_p d_{n+p} sum_l (-i)^l J_l(p F0/omega)
//!        [ e^{i((l+1) omega - p omega_B) t} - e^{i((l-1) omega - p omega_B) t} ]
//! ```
//!
//! and serves as the arbiter for the reduced models' sign and phase
//! conventions.

use crate::basis::WannierStarkBasis;
use crate::bessel::BesselBand;
use crate::error::{Error, Result};
use crate::units::LatticeParams;
use num_complex::Complex64;

use super::observables::{rabi_frequency, RabiOrder};

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingModel {
    /// `d'_n = Omega_1 [d_{n+1} e^{i delta t} - d_{n-1} e^{-i delta t}]`.
    NearestNeighbor { omega1: f64, delta: f64 },
    /// `d'_n = Omega_2 [d_{n+2} - d_{n-2}]` (resonant drive at `2 omega_B`).
    NextNearest { omega2: f64 },
    /// Full harmonic expansion with couplings `X_1..X_{p_max}`.
    FullHarmonics(FullHarmonics),
}

impl CouplingModel {
    /// Rotating-wave nearest-neighbor model with `Omega_1` and `delta`
    /// derived from the parameters and basis.
    pub fn nearest_neighbor(params: &LatticeParams, basis: &WannierStarkBasis) -> Self {
        Self::NearestNeighbor {
            omega1: rabi_frequency(RabiOrder::First, params, basis),
            delta: params.delta(),
        }
    }

    /// Next-nearest model for the `omega = 2 omega_B` resonance, as printed:
    /// `Omega_2 = omega X_2 J_1(F0/omega)`.
    pub fn next_nearest(params: &LatticeParams, basis: &WannierStarkBasis) -> Self {
        Self::NextNearest { omega2: rabi_frequency(RabiOrder::Second, params, basis) }
    }

    pub fn full_harmonics(
        params: &LatticeParams,
        basis: &WannierStarkBasis,
        p_max: usize,
        l_max: i64,
    ) -> Result<Self> {
        let (n_lo, n_hi) = basis.site_window();
        if (n_hi - n_lo) < p_max as i64 {
            return Err(Error::Config(format!(
                "basis window too small for p_max = {p_max}"
            )));
        }
        let couplings: Vec<f64> =
            (1..=p_max as i64).map(|p| basis.x_element(n_lo, n_lo + p)).collect();
        Ok(Self::FullHarmonics(FullHarmonics::new(
            couplings,
            params.f0(),
            params.omega(),
            params.omega_b(),
            l_max,
        )))
    }

    /// Largest coupling magnitude, used for window sizing and step bounds.
    pub fn coupling_scale(&self) -> f64 {
        match self {
            Self::NearestNeighbor { omega1, .. } => omega1.abs(),
            Self::NextNearest { omega2 } => omega2.abs(),
            Self::FullHarmonics(fh) => fh.coupling_scale(),
        }
    }

    /// Fastest angular frequency appearing explicitly in the equations.
    pub fn max_frequency(&self) -> f64 {
        match self {
            Self::NearestNeighbor { omega1, delta } => omega1.abs().max(delta.abs()),
            Self::NextNearest { omega2 } => omega2.abs(),
            Self::FullHarmonics(fh) => fh.max_frequency(),
        }
    }

    /// Number of sites the coupling can hop per application.
    pub fn reach(&self) -> i64 {
        match self {
            Self::NearestNeighbor { .. } => 1,
            Self::NextNearest { .. } => 2,
            Self::FullHarmonics(fh) => fh.p_max() as i64,
        }
    }

    /// Evaluates `d'` into `out` for the window amplitudes `d` at time `t`.
    pub fn apply(&self, t: f64, d: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(d.len(), out.len());
        let n = d.len();
        match self {
            Self::NearestNeighbor { omega1, delta } => {
                let up = Complex64::from_polar(*omega1, delta * t);
                let down = Complex64::from_polar(*omega1, -delta * t);
                for i in 0..n {
                    let plus = if i + 1 < n { d[i + 1] } else { Complex64::default() };
                    let minus = if i >= 1 { d[i - 1] } else { Complex64::default() };
                    out[i] = up * plus - down * minus;
                }
            }
            Self::NextNearest { omega2 } => {
                for i in 0..n {
                    let plus = if i + 2 < n { d[i + 2] } else { Complex64::default() };
                    let minus = if i >= 2 { d[i - 2] } else { Complex64::default() };
                    out[i] = omega2 * (plus - minus);
                }
            }
            Self::FullHarmonics(fh) => {
                for v in out.iter_mut() {
                    *v = Complex64::default();
                }
                for p in 1..=fh.p_max() as i64 {
                    let c_plus = fh.coefficient(p, t);
                    let c_minus = fh.coefficient(-p, t);
                    let pu = p as usize;
                    for i in 0..n {
                        if i + pu < n {
                            out[i] += c_plus * d[i + pu];
                        }
                        if i >= pu {
                            out[i] += c_minus * d[i - pu];
                        }
                    }
                }
            }
        }
    }
}

/// The full harmonic expansion of the drive-induced coupling. Bessel factors
/// are precomputed per hop distance; only the oscillating exponentials are
/// evaluated per time.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHarmonics {
    couplings: Vec<f64>, // X_p, p = 1..=p_max
    f0: f64,
    omega: f64,
    omega_b: f64,
    l_max: i64,
    slow_terms_only: bool,
    bands: Vec<BesselBand>, // J_l(p F0/omega) per p = 1..=p_max
}

impl FullHarmonics {
    pub fn new(couplings: Vec<f64>, f0: f64, omega: f64, omega_b: f64, l_max: i64) -> Self {
        let bands = (1..=couplings.len())
            .map(|p| BesselBand::new(l_max as usize + 2, p as f64 * f0 / omega))
            .collect();
        Self { couplings, f0, omega, omega_b, l_max, slow_terms_only: false, bands }
    }

    /// Restricts the expansion to the slowly rotating terms (frequencies far
    /// below `omega`), which reproduces the reduced models by construction.
    pub fn slow_terms_only(mut self) -> Self {
        self.slow_terms_only = true;
        self
    }

    pub fn p_max(&self) -> usize {
        self.couplings.len()
    }

    pub fn coupling_scale(&self) -> f64 {
        self.couplings
            .iter()
            .map(|x| (self.f0 * x).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_frequency(&self) -> f64 {
        ((self.l_max + 1) as f64 * self.omega).abs().max(
            (self.p_max() as f64 * self.omega_b).abs(),
        )
    }

    /// Time-dependent hop coefficient `c_p(t)` multiplying `d_{n+p}`.
    pub fn coefficient(&self, p: i64, t: f64) -> Complex64 {
        debug_assert!(p != 0 && p.unsigned_abs() as usize <= self.p_max());
        let x_p = self.couplings[(p.unsigned_abs() - 1) as usize];
        let band = &self.bands[(p.unsigned_abs() - 1) as usize];
        // J_l at signed argument p F0/omega: band holds |p| F0/omega
        let j = |l: i64| if p > 0 { band.get(l) } else { band.get(l) * parity(l) };
        let slow_threshold = 0.5 * self.omega.min(self.omega_b);
        let mut sum = Complex64::default();
        for l in -self.l_max..=self.l_max {
            let jl = j(l);
            if jl == 0.0 {
                continue;
            }
            let f_plus = (l + 1) as f64 * self.omega - p as f64 * self.omega_b;
            let f_minus = (l - 1) as f64 * self.omega - p as f64 * self.omega_b;
            let mut term = Complex64::default();
            if !self.slow_terms_only || f_plus.abs() < slow_threshold {
                term += Complex64::from_polar(1.0, f_plus * t);
            }
            if !self.slow_terms_only || f_minus.abs() < slow_threshold {
                term -= Complex64::from_polar(1.0, f_minus * t);
            }
            sum += jl * minus_i_pow(l) * term;
        }
        self.f0 / 2.0 * x_p * sum
    }
}

fn parity(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn minus_i_pow(l: i64) -> Complex64 {
    match l.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}
