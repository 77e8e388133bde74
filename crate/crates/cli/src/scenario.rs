//! Shared scenario plumbing: basis caching, initial-state construction, and
//! cleanup of partial outputs on failure.

use crate::config::{InitialState, ScenarioConfig};
use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use wannier_stark::basis::WannierStarkBasis;
use wannier_stark::dynamics::{phase_phi, AmplitudeState};

/// Loads the basis from the out-dir cache when the key matches, otherwise
/// solves and refreshes the cache. Returns the basis and whether it came
/// from the cache.
pub fn load_or_build_basis(cfg: &ScenarioConfig) -> Result<(WannierStarkBasis, bool)> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = Path::new(&cfg.out_dir).join("basis_cache.csv");
    let key = WannierStarkBasis::cache_key(
        cfg.params.v0(),
        cfg.params.f(),
        &cfg.grid,
        cfg.site_window,
        &cfg.tolerances(),
    );
    if path.exists() {
        if let Some(basis) = WannierStarkBasis::load_if_matches(&path, &key)? {
            return Ok((basis, true));
        }
    }
    let basis = WannierStarkBasis::solve(&cfg.params, &cfg.grid, cfg.site_window, cfg.tolerances())
        .context("basis construction")?;
    basis.save(&path)?;
    Ok((basis, false))
}

/// Initial bare coefficients `c_n(0)` over the configured site window.
pub fn initial_bare(cfg: &ScenarioConfig) -> Result<AmplitudeState> {
    let window = cfg.site_window;
    match &cfg.initial {
        InitialState::SingleSite { site } => {
            if *site < window.0 || *site > window.1 {
                bail!("initial site {site} outside the window [{}, {}]", window.0, window.1);
            }
            Ok(AmplitudeState::single_site(*site, window))
        }
        InitialState::PlaneWave { n_sites, k0 } => Ok(AmplitudeState::plane_wave(*n_sites, *k0, window)),
        InitialState::File { path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading amplitude file {path}"))?;
            let mut amplitudes =
                vec![Complex64::default(); (window.1 - window.0 + 1) as usize];
            let mut any = false;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') || line.starts_with("site") {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').map(str::trim).collect();
                if fields.len() != 3 {
                    bail!("{path}:{}: expected 'site,re,im'", lineno + 1);
                }
                let site: i64 = fields[0].parse()?;
                if site < window.0 || site > window.1 {
                    bail!("{path}:{}: site {site} outside window", lineno + 1);
                }
                let re: f64 = fields[1].parse()?;
                let im: f64 = fields[2].parse()?;
                amplitudes[(site - window.0) as usize] = Complex64::new(re, im);
                any = true;
            }
            if !any {
                bail!("{path}: no amplitudes found");
            }
            let state = AmplitudeState::new(window.0, amplitudes, 0.0);
            if state.norm_sq() == 0.0 {
                bail!("{path}: state not normalizable");
            }
            Ok(state.normalized())
        }
    }
}

/// Dressed amplitudes `d_n(0) = c_n(0) e^{-i phi_n(0)}` for the amplitude-
/// picture models.
pub fn dressed_from_bare(
    c0: &AmplitudeState,
    basis: &WannierStarkBasis,
    params: &wannier_stark::units::LatticeParams,
) -> AmplitudeState {
    let mut amplitudes = Vec::with_capacity(c0.len());
    for n in c0.sites() {
        let undress = Complex64::from_polar(1.0, -phase_phi(n, 0.0, params, basis.x0()));
        amplitudes.push(c0.amplitude(n) * undress);
    }
    AmplitudeState::new(c0.n_lo(), amplitudes, 0.0)
}

/// Grid wave function `psi_0 = sum_n c_n phi_n` for the full model.
pub fn wave_from_bare(c0: &AmplitudeState, basis: &WannierStarkBasis) -> Result<Vec<Complex64>> {
    let mut psi = vec![Complex64::default(); basis.grid().n_points()];
    for n in c0.sites() {
        let c = c0.amplitude(n);
        if c.norm() == 0.0 {
            continue;
        }
        if !basis.contains_site(n) {
            bail!("initial site {n} not covered by the basis window");
        }
        for (i, v) in basis.state(n).iter().enumerate() {
            psi[i] += c * v;
        }
    }
    Ok(psi)
}

/// Tracks files created during a run so a failed run leaves nothing behind.
pub struct OutputGuard {
    files: Vec<PathBuf>,
    keep: bool,
}

impl OutputGuard {
    pub fn new() -> Self {
        Self { files: Vec::new(), keep: false }
    }

    pub fn create(&mut self, path: PathBuf) -> Result<std::io::BufWriter<std::fs::File>> {
        let file = std::fs::File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        self.files.push(path);
        Ok(std::io::BufWriter::new(file))
    }

    pub fn keep_all(&mut self) {
        self.keep = true;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.keep {
            for f in &self.files {
                let _ = std::fs::remove_file(f);
            }
        }
    }
}
