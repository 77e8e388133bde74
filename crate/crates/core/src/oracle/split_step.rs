//! Symmetric split-operator integration of the full time-dependent
//! Schrödinger equation on the grid: half-potential, spectral full-kinetic,
//! half-potential, with the drive sampled at the step midpoint. This solves
//! the complete single-particle problem with no single-band truncation and
//! is the strongest oracle for the amplitude-picture results.

use crate::error::{Error, Result};
use crate::units::{Grid, LatticeParams};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{BufRead, Write};

/// Fraction of the box (per side) watched for wall contamination, and used
/// as the absorber ramp width when absorption is enabled.
const MARGIN_FRACTION: f64 = 0.1;
/// Margin population that aborts an unabsorbed run. Loose enough to
/// tolerate the static tunneling tails of the Wannier-Stark states and
/// single-band leakage noise, tight enough to catch a packet actually
/// reaching the wall.
const MARGIN_ABORT: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct PdeConfig {
    grid: Grid,
    dt: f64,
    t_end: f64,
    sample_stride: usize,
    absorber: bool,
}

impl PdeConfig {
    pub fn new(grid: Grid, dt: f64, t_end: f64, sample_stride: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be >= 0, got {t_end}")));
        }
        // per-step kinetic phase at the Nyquist momentum must stay below pi
        let h = grid.spacing();
        let k_nyquist = std::f64::consts::PI / h;
        let phase = dt * k_nyquist * k_nyquist / (2.0 * crate::units::REDUCED_MASS);
        if phase >= std::f64::consts::PI {
            return Err(Error::Config(format!(
                "dt = {dt} too large: Nyquist kinetic phase {phase:.2} per step (limit pi)"
            )));
        }
        Ok(Self { grid, dt, t_end, sample_stride: sample_stride.max(1), absorber: false })
    }

    /// Enables the smooth absorbing mask over the outer margin of the box
    /// (useful for long driven runs; off by default).
    pub fn with_absorber(mut self) -> Self {
        self.absorber = true;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Sampled wave-function trajectory on the grid.
#[derive(Debug, Clone)]
pub struct WaveTrajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub norm_drift: f64,
}

impl WaveTrajectory {
    pub fn last(&self) -> &[Complex64] {
        self.states.last().expect("at least the initial state")
    }

    /// `<x>` by quadrature at sample `i`.
    pub fn mean_x(&self, i: usize) -> f64 {
        let h = self.grid.spacing();
        self.grid
            .points()
            .zip(&self.states[i])
            .map(|(x, c)| x * c.norm_sqr())
            .sum::<f64>()
            * h
    }

    /// `<x^2>` by quadrature at sample `i`.
    pub fn mean_x2(&self, i: usize) -> f64 {
        let h = self.grid.spacing();
        self.grid
            .points()
            .zip(&self.states[i])
            .map(|(x, c)| x * x * c.norm_sqr())
            .sum::<f64>()
            * h
    }
}

/// Evolves `psi0` under the full Hamiltonian
/// `p^2/2m + V0 cos(2 pi x) + F x - F0 x sin(omega t)`.
pub fn split_step_evolve(
    psi0: &[Complex64],
    params: &LatticeParams,
    cfg: &PdeConfig,
) -> Result<WaveTrajectory> {
    let grid = &cfg.grid;
    let n = grid.n_points();
    if psi0.len() != n {
        return Err(Error::Config(format!(
            "psi0 has {} samples for a {n}-point grid",
            psi0.len()
        )));
    }
    let h = grid.spacing();
    let norm0: f64 = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
    if (norm0 - 1.0).abs() > 1e-6 {
        return Err(Error::Config(format!("psi0 norm^2 = {norm0}, expected 1")));
    }
    let margin = margin_population(psi0, n, h);
    if margin > MARGIN_ABORT {
        return Err(Error::Config(format!(
            "psi0 carries {margin:.3e} population inside the box margin"
        )));
    }

    let dt = cfg.dt;
    let steps = (cfg.t_end / dt).ceil() as usize;
    let dt = if steps == 0 { dt } else { cfg.t_end / steps as f64 };

    // spectral kinetic factor e^{-i k^2 dt / 2m}
    let m = params.reduced_mass();
    let kinetic: Vec<Complex64> = (0..n)
        .map(|j| {
            let k = if j <= n / 2 {
                2.0 * std::f64::consts::PI * j as f64 / (n as f64 * h)
            } else {
                2.0 * std::f64::consts::PI * (j as f64 - n as f64) / (n as f64 * h)
            };
            Complex64::from_polar(1.0, -k * k / (2.0 * m) * dt)
        })
        .collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;

    let xs: Vec<f64> = grid.points().collect();
    let static_half: Vec<Complex64> = xs
        .iter()
        .map(|&x| Complex64::from_polar(1.0, -params.static_potential(x) * dt / 2.0))
        .collect();
    let driven = params.f0() != 0.0;

    let mask: Option<Vec<f64>> = cfg.absorber.then(|| absorber_mask(grid));

    let mut psi: Vec<Complex64> = psi0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];

    for i in 0..steps {
        let t_mid = (i as f64 + 0.5) * dt;
        if driven {
            let drive = params.f0() * (params.omega() * t_mid).sin();
            for ((p, &x), s) in psi.iter_mut().zip(&xs).zip(&static_half) {
                // e^{-i (V_static - F0 x sin(w t_mid)) dt/2}
                *p *= s * Complex64::from_polar(1.0, drive * x * dt / 2.0);
            }
        } else {
            for (p, s) in psi.iter_mut().zip(&static_half) {
                *p *= s;
            }
        }

        fft.process(&mut psi);
        for (p, k) in psi.iter_mut().zip(&kinetic) {
            *p *= k;
        }
        ifft.process(&mut psi);
        for p in psi.iter_mut() {
            *p *= scale;
        }

        if driven {
            let drive = params.f0() * (params.omega() * t_mid).sin();
            for ((p, &x), s) in psi.iter_mut().zip(&xs).zip(&static_half) {
                *p *= s * Complex64::from_polar(1.0, drive * x * dt / 2.0);
            }
        } else {
            for (p, s) in psi.iter_mut().zip(&static_half) {
                *p *= s;
            }
        }

        if let Some(mask) = &mask {
            for (p, &m) in psi.iter_mut().zip(mask) {
                *p *= m;
            }
        }

        let t_now = (i + 1) as f64 * dt;
        if mask.is_none() {
            let contamination = margin_population(&psi, n, h);
            if contamination > MARGIN_ABORT {
                return Err(Error::MarginContaminated { time: t_now, population: contamination });
            }
        }

        if (i + 1) % cfg.sample_stride == 0 || i + 1 == steps {
            times.push(t_now);
            states.push(psi.clone());
        }
    }

    let norm_end: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
    Ok(WaveTrajectory { grid: *grid, times, states, norm_drift: (norm_end - norm0).abs() })
}

fn margin_population(psi: &[Complex64], n: usize, h: f64) -> f64 {
    let margin_pts = ((n as f64) * MARGIN_FRACTION) as usize;
    let left: f64 = psi[..margin_pts].iter().map(|c| c.norm_sqr()).sum();
    let right: f64 = psi[n - margin_pts..].iter().map(|c| c.norm_sqr()).sum();
    (left + right) * h
}

fn absorber_mask(grid: &Grid) -> Vec<f64> {
    let width = (grid.x_max() - grid.x_min()) * MARGIN_FRACTION;
    grid.points()
        .map(|x| {
            let depth = (grid.x_min() + width - x).max(x - (grid.x_max() - width)).max(0.0);
            let u = (depth / width).min(1.0);
            (std::f64::consts::FRAC_PI_2 * u).cos().powi(2)
        })
        .collect()
}

/// Total energy `<psi| p^2/2m + V(x, t) |psi>` with the spectral kinetic
/// term (assumes `psi` normalized on the grid).
pub fn energy_expectation(
    psi: &[Complex64],
    params: &LatticeParams,
    grid: &Grid,
    t: f64,
) -> f64 {
    let n = grid.n_points();
    let h = grid.spacing();
    let m = params.reduced_mass();
    let mut spectrum: Vec<Complex64> = psi.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let mut kinetic = 0.0;
    let mut weight = 0.0;
    for (j, c) in spectrum.iter().enumerate() {
        let k = if j <= n / 2 {
            2.0 * std::f64::consts::PI * j as f64 / (n as f64 * h)
        } else {
            2.0 * std::f64::consts::PI * (j as f64 - n as f64) / (n as f64 * h)
        };
        kinetic += k * k / (2.0 * m) * c.norm_sqr();
        weight += c.norm_sqr();
    }
    kinetic /= weight;
    let potential: f64 = grid
        .points()
        .zip(psi)
        .map(|(x, c)| params.potential(x, t) * c.norm_sqr())
        .sum::<f64>()
        * h;
    kinetic + potential
}

/// Writes a wave-function snapshot: plain-text header (grid spec and sample
/// count), then little-endian `f64` re/im pairs.
pub fn write_wave_snapshot<W: Write>(
    mut w: W,
    grid: &Grid,
    time: f64,
    psi: &[Complex64],
) -> std::io::Result<()> {
    writeln!(w, "wave-snapshot v1")?;
    writeln!(
        w,
        "x_min={:.17e} x_max={:.17e} n_points={} t={:.17e}",
        grid.x_min(),
        grid.x_max(),
        grid.n_points(),
        time
    )?;
    for c in psi {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a snapshot written by [`write_wave_snapshot`].
pub fn read_wave_snapshot<R: BufRead>(mut r: R) -> Result<(Grid, f64, Vec<Complex64>)> {
    let mut magic = String::new();
    r.read_line(&mut magic)?;
    if magic.trim() != "wave-snapshot v1" {
        return Err(Error::Cache(format!("unrecognized snapshot header: {magic}")));
    }
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut fields = std::collections::BTreeMap::new();
    for token in header.split_whitespace() {
        if let Some((k, v)) = token.split_once('=') {
            fields.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| -> Result<f64> {
        fields
            .get(k)
            .ok_or_else(|| Error::Cache(format!("snapshot header missing '{k}'")))?
            .parse()
            .map_err(|e| Error::Cache(format!("bad '{k}': {e}")))
    };
    let grid = Grid::new(get("x_min")?, get("x_max")?, get("n_points")? as usize)?;
    let time = get("t")?;
    let mut psi = Vec::with_capacity(grid.n_points());
    let mut buf = [0u8; 16];
    for _ in 0..grid.n_points() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        psi.push(Complex64::new(re, im));
    }
    Ok((grid, time, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisTolerances, WannierStarkBasis};
    use crate::dynamics::bloch_mean_position;
    use std::sync::OnceLock;

    /// Basis on the coarser PDE grid, shared across tests.
    fn pde_basis() -> &'static WannierStarkBasis {
        static BASIS: OnceLock<WannierStarkBasis> = OnceLock::new();
        BASIS.get_or_init(|| {
            let params = LatticeParams::reference();
            let grid = Grid::new(-24.0, 24.0, 2048).unwrap();
            WannierStarkBasis::solve(&params, &grid, (-10, 10), BasisTolerances::default()).unwrap()
        })
    }

    fn superposition(basis: &WannierStarkBasis, weights: &[(i64, f64)]) -> Vec<Complex64> {
        let mut psi = vec![Complex64::default(); basis.grid().n_points()];
        for &(site, w) in weights {
            for (i, v) in basis.state(site).iter().enumerate() {
                psi[i] += Complex64::new(w * v, 0.0);
            }
        }
        psi
    }

    #[test]
    fn free_gaussian_dispersion() {
        // essentially free particle: vanishing depth and tilt
        let params = LatticeParams::new(1e-14, 1e-14, 0.0, 1.0).unwrap();
        let grid = Grid::new(-40.0, 40.0, 2048).unwrap();
        let h = grid.spacing();
        let sigma0 = 1.5_f64; // position standard deviation
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma0).sqrt();
        let psi0: Vec<Complex64> = grid
            .points()
            .map(|x| Complex64::new(norm * (-x * x / (4.0 * sigma0 * sigma0)).exp(), 0.0))
            .collect();
        let check: f64 = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
        assert!((check - 1.0).abs() < 1e-9);

        let t_end = 40.0;
        let cfg = PdeConfig::new(grid, 1e-3, t_end, 4000).unwrap();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();
        assert!(traj.norm_drift < 1e-10);
        let m = params.reduced_mass();
        for i in 0..traj.times.len() {
            let t = traj.times[i];
            let var = traj.mean_x2(i) - traj.mean_x(i).powi(2);
            let expect = sigma0 * sigma0 + t * t / (4.0 * m * m * sigma0 * sigma0);
            assert!(
                (var - expect).abs() < 1e-6 * expect,
                "t={t}: var {var} vs {expect}"
            );
        }
    }

    #[test]
    fn ws_state_is_stationary() {
        let params = LatticeParams::reference();
        let basis = pde_basis();
        let psi0 = superposition(basis, &[(0, 1.0)]);
        let t_end = 3.0 * 2.0 * std::f64::consts::PI / params.omega_b();
        let cfg = PdeConfig::new(*basis.grid(), 1.5e-3, t_end, 5000).unwrap();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            let overlap = basis.overlap(0, state).norm_sqr();
            assert!(
                overlap >= 1.0 - 1e-4,
                "t={}: survival {overlap}",
                traj.times[i]
            );
        }
    }

    #[test]
    fn energy_conserved_without_drive() {
        let params = LatticeParams::reference();
        let basis = pde_basis();
        let w = 1.0 / 3.0_f64.sqrt();
        let psi0 = superposition(basis, &[(-1, w), (0, w), (1, w)]);
        let cfg = PdeConfig::new(*basis.grid(), 1.5e-3, 30.0, 2000).unwrap();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();
        let e0 = energy_expectation(&traj.states[0], &params, basis.grid(), 0.0);
        for i in 1..traj.states.len() {
            let e = energy_expectation(&traj.states[i], &params, basis.grid(), traj.times[i]);
            assert!((e - e0).abs() < 1e-6, "t={}: E {e} vs {e0}", traj.times[i]);
        }
    }

    #[test]
    fn bloch_oscillation_amplitude_matches_closed_form() {
        let params = LatticeParams::reference();
        let basis = pde_basis();
        let w = 1.0 / 5.0_f64.sqrt();
        let sites: Vec<(i64, f64)> = (-2..=2).map(|n| (n, w)).collect();
        let psi0 = superposition(basis, &sites);

        let period = 2.0 * std::f64::consts::PI / params.omega_b();
        let cfg = PdeConfig::new(*basis.grid(), 1.5e-3, 2.0 * period, 200).unwrap();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();

        // closed form for the same packet
        let mut amps = vec![Complex64::default(); 21];
        for &(n, wt) in &sites {
            amps[(n + 10) as usize] = Complex64::new(wt, 0.0);
        }
        let c0 = crate::dynamics::AmplitudeState::new(-10, amps, 0.0);
        let mut max_err = 0.0_f64;
        let mut swing_lo = f64::INFINITY;
        let mut swing_hi = f64::NEG_INFINITY;
        for i in 0..traj.times.len() {
            let x_pde = traj.mean_x(i);
            let x_eq = bloch_mean_position(&c0, traj.times[i], basis, &params);
            max_err = max_err.max((x_pde - x_eq).abs());
            swing_lo = swing_lo.min(x_eq);
            swing_hi = swing_hi.max(x_eq);
        }
        let swing = swing_hi - swing_lo;
        assert!(
            max_err < 0.05 * swing,
            "max <x> mismatch {max_err} vs swing {swing}"
        );
    }

    #[test]
    fn driven_run_stays_in_single_band() {
        let params = LatticeParams::new(4.5, 0.5, 0.1, 0.5).unwrap();
        let basis = pde_basis();
        let psi0 = superposition(basis, &[(0, 1.0)]);
        let t_end = 2.0 * 2.0 * std::f64::consts::PI / params.omega_b();
        let cfg = PdeConfig::new(*basis.grid(), 1.5e-3, t_end, 4000).unwrap();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            let proj = crate::oracle::project_onto_ws(
                state,
                basis,
                &params,
                traj.times[i],
                crate::oracle::DEFAULT_LEAKAGE_THRESHOLD,
            );
            assert!(
                proj.leakage < 1e-2 && !proj.breakdown_flagged,
                "t={}: leakage {}",
                traj.times[i],
                proj.leakage
            );
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let grid = Grid::new(-2.0, 2.0, 64).unwrap();
        let psi: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new(i as f64 * 0.01, -(i as f64) * 0.02))
            .collect();
        let mut buf = Vec::new();
        write_wave_snapshot(&mut buf, &grid, 3.25, &psi).unwrap();
        let (g2, t2, psi2) = read_wave_snapshot(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(g2, grid);
        assert_eq!(t2, 3.25);
        assert_eq!(psi2, psi);
    }

    #[test]
    fn contaminated_margin_aborts() {
        let params = LatticeParams::new(1e-14, 1e-14, 0.0, 1.0).unwrap();
        let grid = Grid::new(-10.0, 10.0, 512).unwrap();
        let h = grid.spacing();
        // fast packet headed for the wall
        let sigma0 = 0.8_f64;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma0).sqrt();
        let k0 = 30.0;
        let psi0: Vec<Complex64> = grid
            .points()
            .map(|x| {
                Complex64::from_polar(norm * (-x * x / (4.0 * sigma0 * sigma0)).exp(), k0 * x)
            })
            .collect();
        let total: f64 = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
        let psi0: Vec<Complex64> = psi0.iter().map(|c| c / total.sqrt()).collect();
        let cfg = PdeConfig::new(grid, 2e-4, 10.0, 1000).unwrap();
        let err = split_step_evolve(&psi0, &params, &cfg);
        assert!(matches!(err, Err(Error::MarginContaminated { .. })), "{err:?}");

        // with the absorber enabled the run completes and loses norm instead
        let cfg = PdeConfig::new(grid, 2e-4, 10.0, 1000).unwrap().with_absorber();
        let traj = split_step_evolve(&psi0, &params, &cfg).unwrap();
        assert!(traj.norm_drift > 0.5, "absorber should swallow the packet");
    }
}
