//! Error reports between two trajectories sampled on the same time grid.

use super::ode::Trajectory;
use crate::dynamics::AmplitudeState;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// How amplitudes are aligned before subtraction. Populations and
/// coherences are gauge-invariant either way; raw amplitudes from different
/// derivation chains may differ by a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Fixed,
    FittedGlobalPhase,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SampleErrors {
    pub time: f64,
    pub population: f64,
    pub coherence: f64,
    pub mean_site: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryComparison {
    pub per_sample: Vec<SampleErrors>,
    pub max_population_error: f64,
    pub rms_population_error: f64,
    pub max_coherence_error: f64,
    pub max_mean_site_error: f64,
    pub max_amplitude_error: f64,
}

impl TrajectoryComparison {
    /// CSV rows `t,pop_err,coh_err,mean_site_err,amp_err`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,pop_err,coh_err,mean_site_err,amp_err")?;
        for s in &self.per_sample {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                s.time, s.population, s.coherence, s.mean_site, s.amplitude
            )?;
        }
        Ok(())
    }
}

/// Compares two trajectories sample by sample. Fails unless both runs were
/// sampled at the same times.
pub fn compare_trajectories(
    a: &Trajectory,
    b: &Trajectory,
    gauge: Gauge,
) -> Result<TrajectoryComparison> {
    if a.states().len() != b.states().len() {
        return Err(Error::TimeGridMismatch(format!(
            "{} vs {} samples",
            a.states().len(),
            b.states().len()
        )));
    }
    let mut per_sample = Vec::with_capacity(a.states().len());
    for (sa, sb) in a.states().iter().zip(b.states()) {
        let (ta, tb) = (sa.time(), sb.time());
        if (ta - tb).abs() > 1e-12 * (1.0 + ta.abs()) {
            return Err(Error::TimeGridMismatch(format!("sample times {ta} vs {tb}")));
        }
        per_sample.push(sample_errors(sa, sb, gauge));
    }
    let max_population_error = per_sample.iter().map(|s| s.population).fold(0.0, f64::max);
    let rms_population_error = (per_sample.iter().map(|s| s.population * s.population).sum::<f64>()
        / per_sample.len() as f64)
        .sqrt();
    Ok(TrajectoryComparison {
        max_population_error,
        rms_population_error,
        max_coherence_error: per_sample.iter().map(|s| s.coherence).fold(0.0, f64::max),
        max_mean_site_error: per_sample.iter().map(|s| s.mean_site).fold(0.0, f64::max),
        max_amplitude_error: per_sample.iter().map(|s| s.amplitude).fold(0.0, f64::max),
        per_sample,
    })
}

fn sample_errors(a: &AmplitudeState, b: &AmplitudeState, gauge: Gauge) -> SampleErrors {
    let n_lo = a.n_lo().min(b.n_lo());
    let n_hi = a.n_hi().max(b.n_hi());
    let phase = match gauge {
        Gauge::Fixed => Complex64::new(1.0, 0.0),
        Gauge::FittedGlobalPhase => {
            let mut dot = Complex64::default();
            for n in n_lo..=n_hi {
                dot += a.amplitude(n) * b.amplitude(n).conj();
            }
            if dot.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                dot / dot.norm()
            }
        }
    };
    let mut errs = SampleErrors { time: a.time(), ..Default::default() };
    for n in n_lo..=n_hi {
        let (da, db) = (a.amplitude(n), b.amplitude(n));
        errs.population = errs.population.max((da.norm_sqr() - db.norm_sqr()).abs());
        let (ca, cb) = (
            da.conj() * a.amplitude(n + 1),
            db.conj() * b.amplitude(n + 1),
        );
        errs.coherence = errs.coherence.max((ca - cb).norm());
        errs.amplitude = errs.amplitude.max((da - phase * db).norm());
    }
    errs.mean_site = (a.mean_site() - b.mean_site()).abs();
    errs
}
