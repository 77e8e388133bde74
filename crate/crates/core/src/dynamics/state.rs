use super::{EDGE_TOL, POPULATED_EPS, TOL_NORM};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Complex site amplitudes over a truncated, contiguous site window, plus a
/// timestamp. Used both for the dressed amplitudes `d_n` and, in the static
/// lattice, for the bare coefficients `c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    n_lo: i64,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl AmplitudeState {
    pub fn new(n_lo: i64, amplitudes: Vec<Complex64>, time: f64) -> Self {
        assert!(!amplitudes.is_empty(), "amplitude window cannot be empty");
        Self { n_lo, amplitudes, time }
    }

    /// `d_m(0) = delta_{m,site}` inside the given window.
    pub fn single_site(site: i64, window: (i64, i64)) -> Self {
        let (n_lo, n_hi) = window;
        assert!(n_lo <= site && site <= n_hi, "site {site} outside window");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); (n_hi - n_lo + 1) as usize];
        amplitudes[(site - n_lo) as usize] = Complex64::new(1.0, 0.0);
        Self { n_lo, amplitudes, time: 0.0 }
    }

    /// Plane-wave-like packet `d_n = e^{i k0 n} / sqrt(N)` over `n_sites`
    /// contiguous sites centered on site 0, zero elsewhere in the window.
    pub fn plane_wave(n_sites: usize, k0: f64, window: (i64, i64)) -> Self {
        assert!(n_sites >= 1);
        let (n_lo, n_hi) = window;
        let start = -((n_sites as i64 - 1) / 2);
        let end = start + n_sites as i64 - 1;
        assert!(
            n_lo <= start && end <= n_hi,
            "window [{n_lo}, {n_hi}] cannot hold {n_sites} populated sites"
        );
        let norm = 1.0 / (n_sites as f64).sqrt();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); (n_hi - n_lo + 1) as usize];
        for n in start..=end {
            amplitudes[(n - n_lo) as usize] = norm * Complex64::from_polar(1.0, k0 * n as f64);
        }
        Self { n_lo, amplitudes, time: 0.0 }
    }

    pub fn n_lo(&self) -> i64 {
        self.n_lo
    }

    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.amplitudes.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Amplitude at site `n`; zero outside the window.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        if n < self.n_lo || n > self.n_hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[(n - self.n_lo) as usize]
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        self.n_lo..=self.n_hi()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Site-to-site quantum coherence `sum_n d_n^* d_{n+offset}`.
    pub fn coherence(&self, offset: usize) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.amplitudes.len().saturating_sub(offset) {
            sum += self.amplitudes[i].conj() * self.amplitudes[i + offset];
        }
        sum
    }

    /// Site-index-weighted coherence `sum_n n d_n^* d_{n+1}`.
    pub fn weighted_coherence(&self) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.amplitudes.len().saturating_sub(1) {
            let n = self.n_lo + i as i64;
            sum += n as f64 * self.amplitudes[i].conj() * self.amplitudes[i + 1];
        }
        sum
    }

    /// Mean site index `sum_n n |d_n|^2`.
    pub fn mean_site(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (self.n_lo + i as i64) as f64 * a.norm_sqr())
            .sum()
    }

    /// `sum_n n^2 |d_n|^2`.
    pub fn mean_site_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| ((self.n_lo + i as i64) as f64).powi(2) * a.norm_sqr())
            .sum()
    }

    pub fn edge_amplitude(&self) -> f64 {
        let first = self.amplitudes.first().map_or(0.0, |a| a.norm());
        let last = self.amplitudes.last().map_or(0.0, |a| a.norm());
        first.max(last)
    }

    /// Smallest sub-window holding every amplitude above `eps`; `None` when
    /// the state is numerically empty.
    pub fn populated_bounds(&self, eps: f64) -> Option<(i64, i64)> {
        let lo = self.amplitudes.iter().position(|a| a.norm() > eps)?;
        let hi = self.amplitudes.iter().rposition(|a| a.norm() > eps)?;
        Some((self.n_lo + lo as i64, self.n_lo + hi as i64))
    }

    /// Copy embedded in the window `[n_lo, n_hi]`, zero-padded. The new
    /// window must contain the old one.
    pub fn embedded(&self, n_lo: i64, n_hi: i64) -> Self {
        assert!(n_lo <= self.n_lo && n_hi >= self.n_hi(), "window must grow");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); (n_hi - n_lo + 1) as usize];
        let shift = (self.n_lo - n_lo) as usize;
        amplitudes[shift..shift + self.amplitudes.len()].copy_from_slice(&self.amplitudes);
        Self { n_lo, amplitudes, time: self.time }
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sq().sqrt();
        for a in self.amplitudes.iter_mut() {
            *a /= norm;
        }
        self
    }

    /// Truncation-validity check: unit norm within `tol_norm` and negligible
    /// edge amplitude.
    pub fn check_valid(&self) -> Result<()> {
        let norm = self.norm_sq();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::Config(format!("state norm^2 = {norm} deviates beyond {TOL_NORM}")));
        }
        let edge = self.edge_amplitude();
        if edge > EDGE_TOL {
            return Err(Error::WindowOverflow { edge_amplitude: edge, edge_tol: EDGE_TOL });
        }
        Ok(())
    }

    /// Window sized for propagation: populated region of `self` grown by
    /// `slack` sites on each side.
    pub(crate) fn propagation_window(&self, slack: i64) -> (i64, i64) {
        let (p_lo, p_hi) = self
            .populated_bounds(POPULATED_EPS)
            .unwrap_or((self.n_lo, self.n_hi()));
        (p_lo - slack, p_hi + slack)
    }
}
