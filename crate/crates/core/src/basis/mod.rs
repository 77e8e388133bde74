//! Wannier-Stark eigenbasis of the static tilted lattice.
//!
//! The static Hamiltonian is discretized by second-order central finite
//! differences on a hard-wall box, which matches the physics of a spatially
//! limited lattice and keeps the `F x` term Hermitian. Localized lowest-band
//! states are extracted one per site by centroid assignment plus a
//! participation filter, and the position matrix elements `X_p`, `X_p^(2)`
//! that drive the dynamics are computed by grid quadrature.
//!
//! Site `n` labels the potential well centered at `x = n + 1/2` (the minima
//! of `V0 cos(2 pi x)` sit at half-integers). All translation identities,
//! `X_nn = X_00 + n` and `phi_n(x) = phi_0(x - n)`, hold with this labeling.

mod cache;
mod tridiag;

pub use tridiag::SymTridiag;

use crate::error::{Error, LocalizationFailure, Result};
use crate::units::{Grid, LatticeParams};

/// Coarsest spacing allowed for the finite-difference discretization.
const MAX_SPACING: f64 = 0.05;
/// Bulk-state requirement: lattice periods between the outermost analyzed
/// well and each box wall.
const BULK_MARGIN: f64 = 3.0;
/// A localized lowest-band state must not participate in more wells.
const MAX_PARTICIPATION_WELLS: f64 = 3.0;

/// Tolerances for the symmetry checks run during basis construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisTolerances {
    /// Max deviation of the overlap matrix from identity.
    pub ortho: f64,
    /// Max ladder-spacing residual, relative to the Bloch frequency.
    pub ladder_rel: f64,
    /// Max deviation in the translation identities.
    pub translation: f64,
}

impl Default for BasisTolerances {
    fn default() -> Self {
        Self { ortho: 1e-8, ladder_rel: 1e-4, translation: 1e-4 }
    }
}

/// Symmetry and localization residuals measured on the finished basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisDiagnostics {
    pub max_ladder_residual: f64,
    pub max_ortho_deviation: f64,
    pub max_translation_deviation: f64,
    pub max_centroid_offset: f64,
    pub max_participation_wells: f64,
    /// Spread of the nearest-neighbor element across all bulk pairs.
    pub x1_pair_spread: f64,
    /// Coupling hierarchy indicator `|X_2 / X_1|`.
    pub x2_over_x1: f64,
    /// Energy offset from the lowest-band cluster to the nearest rejected
    /// localized family (the next-band gap surrogate).
    pub family_gap: f64,
}

/// Localized lowest-band eigenstates of the tilted lattice over a contiguous
/// site window, with ladder energies and position matrix elements.
#[derive(Debug, Clone, PartialEq)]
pub struct WannierStarkBasis {
    v0: f64,
    f: f64,
    grid: Grid,
    n_lo: i64,
    n_hi: i64,
    /// `states[k]` samples `phi_{n_lo + k}` on the grid, normalized so that
    /// `sum phi^2 h = 1`.
    states: Vec<Vec<f64>>,
    energies: Vec<f64>,
    x0: f64,
    x1: f64,
    x2: f64,
    x0_sq: f64,
    x1_sq: f64,
    tolerances: BasisTolerances,
    diagnostics: BasisDiagnostics,
}

/// Discretized static Hamiltonian `p^2/(2m) + V0 cos(2 pi x) + F x` with
/// hard-wall boundaries one spacing outside the grid. Symmetric tridiagonal
/// by construction.
pub fn build_hamiltonian(params: &LatticeParams, grid: &Grid) -> Result<SymTridiag> {
    let h = grid.spacing();
    if h > MAX_SPACING {
        return Err(Error::Config(format!(
            "grid spacing {h:.4} too coarse for the lattice (limit {MAX_SPACING})"
        )));
    }
    let kin = 1.0 / (2.0 * params.reduced_mass() * h * h);
    let diag: Vec<f64> = grid.points().map(|x| 2.0 * kin + params.static_potential(x)).collect();
    let off = vec![-kin; grid.n_points() - 1];
    Ok(SymTridiag::new(diag, off))
}

struct Candidate {
    energy: f64,
    site: i64,
    centroid: f64,
    participation: f64,
    offset: f64,
    state: Vec<f64>,
}

impl WannierStarkBasis {
    /// Diagonalizes the static Hamiltonian and extracts one localized
    /// lowest-band state per site in `[n_lo, n_hi]`.
    pub fn solve(
        params: &LatticeParams,
        grid: &Grid,
        site_window: (i64, i64),
        tolerances: BasisTolerances,
    ) -> Result<Self> {
        let (n_lo, n_hi) = site_window;
        if n_hi - n_lo < 2 {
            return Err(Error::Config(format!(
                "site window [{n_lo}, {n_hi}] too small: need at least 3 sites for the matrix elements"
            )));
        }
        if !grid.contains_bulk_window(n_lo, n_hi, BULK_MARGIN) {
            return Err(Error::Config(format!(
                "site window [{n_lo}, {n_hi}] closer than {BULK_MARGIN} periods to the box walls"
            )));
        }

        let ham = build_hamiltonian(params, grid)?;
        let h = grid.spacing();
        let f = params.f();

        // Spectral window around the expected lowest-band ladder. The well
        // frequency is omega_h = sqrt(V''/m) = 2 sqrt(2 v0); the quartic
        // correction to the ground level is exactly -1/4 in these units.
        let omega_h = 2.0 * (2.0 * params.v0()).sqrt();
        let e0_est = -params.v0() + omega_h / 2.0 - 0.25;
        let lo = f * (n_lo as f64 + 0.5) + e0_est - omega_h / 3.0;
        let hi = f * (n_hi as f64 + 0.5) + e0_est + omega_h / 3.0;

        let eigenvalues = ham.eigenvalues_in(lo, hi);

        let xs: Vec<f64> = grid.points().collect();
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(eigenvalues.len());
        for &lambda in &eigenvalues {
            let (energy, mut vec, _res) = ham.eigenpair(lambda);
            // inverse iteration can mix accidentally near-degenerate states
            for (other_e, other_v) in &pairs {
                if (energy - other_e).abs() < 1e-7 * (1.0 + energy.abs()) {
                    let dot: f64 = vec.iter().zip(other_v).map(|(a, b)| a * b).sum();
                    for (v, o) in vec.iter_mut().zip(other_v) {
                        *v -= dot * o;
                    }
                    let norm = vec.iter().map(|v| v * v).sum::<f64>().sqrt();
                    for v in vec.iter_mut() {
                        *v /= norm;
                    }
                }
            }
            pairs.push((energy, vec));
        }

        let mut candidates = Vec::new();
        for (energy, mut vec) in pairs {
            // integral normalization
            let scale = 1.0 / h.sqrt();
            for v in vec.iter_mut() {
                *v *= scale;
            }
            let centroid: f64 = xs.iter().zip(&vec).map(|(x, p)| x * p * p * h).sum();
            let participation = participation_wells(&xs, &vec, h);
            let site = (centroid - 0.5).round() as i64;
            let offset = energy - f * (site as f64 + 0.5);
            candidates.push(Candidate { energy, site, centroid, participation, offset, state: vec });
        }

        let localized: Vec<&Candidate> =
            candidates.iter().filter(|c| c.participation <= MAX_PARTICIPATION_WELLS).collect();
        let e0_ref = localized
            .iter()
            .map(|c| c.offset)
            .fold(f64::INFINITY, f64::min);
        if !e0_ref.is_finite() {
            return Err(Error::Localization {
                eigenvalue: f64::NAN,
                source: LocalizationFailure::MissingSite { site: n_lo },
            });
        }
        let family_radius = omega_h / 2.0;
        let family_gap = localized
            .iter()
            .map(|c| c.offset - e0_ref)
            .filter(|&d| d >= family_radius)
            .fold(f64::INFINITY, f64::min);

        let mut states = Vec::with_capacity((n_hi - n_lo + 1) as usize);
        let mut energies = Vec::with_capacity(states.capacity());
        let mut max_centroid_offset = 0.0_f64;
        let mut max_participation = 0.0_f64;
        for n in n_lo..=n_hi {
            let best = localized
                .iter()
                .filter(|c| c.site == n && c.offset - e0_ref < family_radius)
                .min_by(|a, b| a.energy.total_cmp(&b.energy));
            let c = best.ok_or_else(|| {
                // report the nearest localized state for diagnosis
                let nearest = candidates
                    .iter()
                    .filter(|c| c.site == n)
                    .min_by(|a, b| a.offset.total_cmp(&b.offset));
                match nearest {
                    Some(c) if c.participation > MAX_PARTICIPATION_WELLS => Error::Localization {
                        eigenvalue: c.energy,
                        source: LocalizationFailure::TooDelocalized {
                            wells: c.participation,
                            limit: MAX_PARTICIPATION_WELLS,
                        },
                    },
                    Some(c) => Error::Localization {
                        eigenvalue: c.energy,
                        source: LocalizationFailure::AmbiguousCentroid { centroid: c.centroid },
                    },
                    None => Error::Localization {
                        eigenvalue: f64::NAN,
                        source: LocalizationFailure::MissingSite { site: n },
                    },
                }
            })?;
            let well_center = n as f64 + 0.5;
            max_centroid_offset = max_centroid_offset.max((c.centroid - well_center).abs());
            max_participation = max_participation.max(c.participation);

            // sign convention: dominant lobe positive
            let mut state = c.state.clone();
            let peak = state
                .iter()
                .cloned()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(1.0);
            if peak < 0.0 {
                for v in state.iter_mut() {
                    *v = -*v;
                }
            }
            states.push(state);
            energies.push(c.energy);
        }

        // ladder check
        let mut max_ladder = 0.0_f64;
        for k in 0..energies.len() - 1 {
            max_ladder = max_ladder.max((energies[k + 1] - energies[k] - f).abs());
        }
        if max_ladder > tolerances.ladder_rel * f {
            return Err(Error::SymmetryViolation(format!(
                "ladder spacing residual {max_ladder:.3e} exceeds {:.3e}",
                tolerances.ladder_rel * f
            )));
        }

        let mut basis = Self {
            v0: params.v0(),
            f,
            grid: *grid,
            n_lo,
            n_hi,
            states,
            energies,
            x0: 0.0,
            x1: 0.0,
            x2: 0.0,
            x0_sq: 0.0,
            x1_sq: 0.0,
            tolerances,
            diagnostics: BasisDiagnostics {
                max_ladder_residual: max_ladder,
                max_ortho_deviation: 0.0,
                max_translation_deviation: 0.0,
                max_centroid_offset,
                max_participation_wells: max_participation,
                x1_pair_spread: 0.0,
                x2_over_x1: 0.0,
                family_gap,
            },
        };
        basis.fill_elements()?;
        basis.measure_symmetry()?;
        Ok(basis)
    }

    /// Reference elements, anchored at the most central site and mapped to
    /// site 0 through the translation identities.
    fn fill_elements(&mut self) -> Result<()> {
        let c = self.anchor_site();
        self.x1 = self.x_element(c, c + 1);
        self.x2 = self.x_element(c, c + 2);
        self.x0 = self.x_element(c, c) - c as f64;
        self.x0_sq = self.x2_element(c, c) - 2.0 * c as f64 * self.x0 - (c * c) as f64;
        self.x1_sq = self.x2_element(c, c + 1) - 2.0 * c as f64 * self.x1;
        if self.x1 <= 0.0 {
            return Err(Error::SymmetryViolation(format!(
                "nearest-neighbor element X1 = {:.3e} is not positive under the lobe-positive convention",
                self.x1
            )));
        }
        self.diagnostics.x2_over_x1 = (self.x2 / self.x1).abs();
        Ok(())
    }

    fn anchor_site(&self) -> i64 {
        let mid = (self.n_lo + self.n_hi) / 2;
        mid.min(self.n_hi - 2).max(self.n_lo)
    }

    fn measure_symmetry(&mut self) -> Result<()> {
        let h = self.grid.spacing();
        let count = self.states.len();

        let mut ortho = 0.0_f64;
        for i in 0..count {
            for j in 0..=i {
                let g: f64 =
                    self.states[i].iter().zip(&self.states[j]).map(|(a, b)| a * b).sum::<f64>() * h;
                let target = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((g - target).abs());
            }
        }
        if ortho > self.tolerances.ortho {
            return Err(Error::SymmetryViolation(format!(
                "orthonormality deviation {ortho:.3e} exceeds {:.3e}",
                self.tolerances.ortho
            )));
        }

        // translation: phi_n(x) = phi_anchor(x - (n - anchor))
        let anchor = self.anchor_site();
        let reference = self.state(anchor);
        let mut trans = 0.0_f64;
        for n in self.n_lo..=self.n_hi {
            let shift_pts = (n - anchor) as f64 / h;
            let state = self.state(n);
            for i in 0..state.len() {
                let expected = sample_shifted(reference, i as f64 - shift_pts);
                trans = trans.max((state[i] - expected).abs());
            }
        }
        self.diagnostics.max_translation_deviation = trans;
        self.diagnostics.max_ortho_deviation = ortho;

        // X1 across all neighbor pairs
        let mut spread = 0.0_f64;
        for n in self.n_lo..self.n_hi {
            spread = spread.max((self.x_element(n, n + 1) - self.x1).abs());
        }
        self.diagnostics.x1_pair_spread = spread;
        Ok(())
    }

    pub fn grid(&self) -> &Grid { &self.grid }
    pub fn v0(&self) -> f64 { self.v0 }
    pub fn f(&self) -> f64 { self.f }
    pub fn site_window(&self) -> (i64, i64) { (self.n_lo, self.n_hi) }
    pub fn sites(&self) -> impl Iterator<Item = i64> { self.n_lo..=self.n_hi }
    pub fn contains_site(&self, n: i64) -> bool { (self.n_lo..=self.n_hi).contains(&n) }
    pub fn tolerances(&self) -> &BasisTolerances { &self.tolerances }
    pub fn diagnostics(&self) -> &BasisDiagnostics { &self.diagnostics }

    /// Diagonal element `X_00` of the site-0 state (the well centroid).
    pub fn x0(&self) -> f64 { self.x0 }
    /// Nearest-neighbor dipole element `X_1`, positive by convention.
    pub fn x1(&self) -> f64 { self.x1 }
    /// Next-nearest element `X_2`.
    pub fn x2(&self) -> f64 { self.x2 }
    /// `X_0^(2) = <phi_0| x^2 |phi_0>`.
    pub fn x0_sq(&self) -> f64 { self.x0_sq }
    /// `X_1^(2) = <phi_0| x^2 |phi_1>`.
    pub fn x1_sq(&self) -> f64 { self.x1_sq }

    pub fn energy(&self, n: i64) -> f64 {
        self.energies[self.index(n)]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn state(&self, n: i64) -> &[f64] {
        &self.states[self.index(n)]
    }

    fn index(&self, n: i64) -> usize {
        assert!(self.contains_site(n), "site {n} outside window [{}, {}]", self.n_lo, self.n_hi);
        (n - self.n_lo) as usize
    }

    /// `<phi_n| x |phi_m>` by grid quadrature. Symmetric in `(n, m)`.
    pub fn x_element(&self, n: i64, m: i64) -> f64 {
        let h = self.grid.spacing();
        let (a, b) = (self.state(n), self.state(m));
        self.grid
            .points()
            .zip(a.iter().zip(b.iter()))
            .map(|(x, (pa, pb))| x * (pa * pb))
            .sum::<f64>()
            * h
    }

    /// `<phi_n| x^2 |phi_m>` by grid quadrature.
    pub fn x2_element(&self, n: i64, m: i64) -> f64 {
        let h = self.grid.spacing();
        let (a, b) = (self.state(n), self.state(m));
        self.grid
            .points()
            .zip(a.iter().zip(b.iter()))
            .map(|(x, (pa, pb))| x * x * (pa * pb))
            .sum::<f64>()
            * h
    }

    /// Overlap `<phi_n | psi>` for complex samples of `psi` on the same grid.
    pub fn overlap(&self, n: i64, psi: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let h = self.grid.spacing();
        self.state(n)
            .iter()
            .zip(psi)
            .map(|(p, c)| p * c)
            .sum::<num_complex::Complex64>()
            * h
    }
}

/// Participation number over unit cells (wells): `1 / sum_n w_n^2` where
/// `w_n` is the probability inside cell `[n, n+1)`.
fn participation_wells(xs: &[f64], state: &[f64], h: f64) -> f64 {
    let mut cells: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for (x, p) in xs.iter().zip(state) {
        *cells.entry(x.floor() as i64).or_insert(0.0) += p * p * h;
    }
    let sum_sq: f64 = cells.values().map(|w| w * w).sum();
    1.0 / sum_sq
}

/// Four-point Lagrange interpolation of uniformly sampled values at a
/// fractional index; zero outside the sampled range (hard-wall tails).
fn sample_shifted(values: &[f64], idx: f64) -> f64 {
    let n = values.len() as i64;
    let j = idx.floor() as i64;
    let t = idx - j as f64;
    if t == 0.0 {
        return if j >= 0 && j < n { values[j as usize] } else { 0.0 };
    }
    let get = |k: i64| -> f64 {
        if k >= 0 && k < n {
            values[k as usize]
        } else {
            0.0
        }
    };
    let (f_1, f0, f1, f2) = (get(j - 1), get(j), get(j + 1), get(j + 2));
    // cubic Lagrange through the four surrounding samples
    -f_1 * t * (t - 1.0) * (t - 2.0) / 6.0
        + f0 * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
        - f1 * (t + 1.0) * t * (t - 2.0) / 2.0
        + f2 * (t + 1.0) * t * (t - 1.0) / 6.0
}

#[cfg(test)]
pub(crate) mod tests;
