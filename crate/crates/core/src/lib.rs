//! Wannier-Stark states and wave-packet dynamics in tilted 1D optical lattices.
//!
//! Everything works in the natural units of a standing-wave lattice: lengths in
//! lattice steps, energies in recoil energies, time in units of `hbar / E_R`,
//! reduced mass `m = pi^2 / 2`. The tilted-lattice Hamiltonian is
//!
//! ```text
//! H = p^2/(2m) + V0 cos(2 pi x) + F x - F0 x sin(omega t)
//! ```
//!
//! The crate provides:
//!
//! * [`units`] — validated lattice parameters and spatial grids;
//! * [`basis`] — the Wannier-Stark eigenbasis of the static tilted lattice,
//!   built by direct diagonalization, with the position matrix elements that
//!   drive all dynamics;
//! * [`bessel`] — integer-order Bessel functions of the first kind and the
//!   addition-theorem machinery the exact propagator rests on;
//! * [`dynamics`] — closed-form propagators and observables for the resonantly
//!   modulated lattice (site-amplitude picture);
//! * [`oracle`] — two independent numerical integrators (amplitude ODEs and a
//!   split-operator Schrödinger solver) used to validate the closed forms;
//! * [`validate`] — a runnable suite of the library's internal consistency
//!   checks.

pub mod basis;
pub mod bessel;
pub mod dynamics;
mod error;
pub mod fit;
pub mod oracle;
pub mod units;
pub mod validate;

pub use basis::WannierStarkBasis;
pub use dynamics::{AmplitudeState, CouplingModel, ObservableSeries};
pub use error::{Error, Result};
pub use units::{Grid, LatticeParams};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
