//! The `run` subcommand: evolve the configured scenario with the chosen
//! model and emit populations, observables, comparison data, a plot script
//! and the manifest.

use crate::config::{Coupling, Model, ScenarioConfig};
use crate::scenario::{dressed_from_bare, initial_bare, load_or_build_basis, wave_from_bare, OutputGuard};
use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;
use wannier_stark::dynamics::{
    direct_mean_position, direct_mean_square_position, rabi_frequency, write_populations_csv,
    AmplitudeState, CouplingModel, ObservableEvaluator, ObservableSeries, RabiOrder, EDGE_TOL,
};
use wannier_stark::oracle::{
    compare_trajectories, exact_trajectory, integrate_amplitudes, project_onto_ws,
    split_step_evolve, Gauge, OdeConfig, PdeConfig, Trajectory, TrajectoryComparison,
    DEFAULT_LEAKAGE_THRESHOLD,
};

pub struct RunOutcome {
    pub violations: Vec<String>,
}

pub fn cmd_run(cfg: &ScenarioConfig, command_line: &str) -> Result<RunOutcome> {
    let (basis, cached) = load_or_build_basis(cfg)?;
    println!(
        "basis: {} (X1 = {:.6e}, X2 = {:.6e})",
        if cached { "cache" } else { "computed" },
        basis.x1(),
        basis.x2()
    );
    for w in cfg.params.warnings() {
        println!("warning: {w:?}");
    }

    let c0 = initial_bare(cfg)?;
    let d0 = dressed_from_bare(&c0, &basis, &cfg.params);
    let omega1 = rabi_frequency(RabiOrder::First, &cfg.params, &basis);
    let delta = cfg.params.delta();

    let mut violations = Vec::new();

    // evolve: a trajectory of dressed amplitude states, plus observables
    let (trajectory, series, comparison): (Trajectory, ObservableSeries, Option<TrajectoryComparison>) =
        match cfg.model {
            Model::Exact => {
                let times: Vec<f64> =
                    (0..=cfg.samples).map(|i| cfg.t_end * i as f64 / cfg.samples as f64).collect();
                let traj = exact_trajectory(&d0, &times, omega1, delta)?;
                let eval = ObservableEvaluator::new(&d0, &basis, &cfg.params);
                let series = ObservableSeries {
                    mean_x: times.iter().map(|&t| eval.mean_x(t)).collect(),
                    mean_x2: times.iter().map(|&t| eval.mean_x2(t)).collect(),
                    times,
                    site_populations: None,
                };
                (traj, series, None)
            }
            Model::Ode => {
                let coupling = match cfg.coupling {
                    Coupling::Nearest => CouplingModel::nearest_neighbor(&cfg.params, &basis),
                    Coupling::NextNearest => CouplingModel::next_nearest(&cfg.params, &basis),
                    Coupling::Full => {
                        CouplingModel::full_harmonics(&cfg.params, &basis, cfg.p_max, cfg.l_max)?
                    }
                };
                let steps = (cfg.t_end / cfg.dt).ceil() as usize;
                let stride = (steps / cfg.samples.max(1)).max(1);
                let ode = OdeConfig::new(cfg.dt, coupling, cfg.t_end, stride)?;
                let traj = integrate_amplitudes(&d0, &ode)?;
                if traj.norm_drift() > 1e-9 {
                    violations.push(format!("ODE norm drift {:.3e} > 1e-9", traj.norm_drift()));
                }
                let series = series_from_states(traj.states(), &basis, &cfg.params);
                let exact = exact_trajectory(&d0, &traj.times(), omega1, delta)?;
                let cmp = compare_trajectories(&traj, &exact, Gauge::Fixed)?;
                (traj, series, Some(cmp))
            }
            Model::Pde => {
                let psi0 = wave_from_bare(&c0, &basis)?;
                let steps = (cfg.t_end / cfg.dt).ceil() as usize;
                let stride = (steps / cfg.samples.max(1)).max(1);
                let pde = PdeConfig::new(cfg.grid, cfg.dt, cfg.t_end, stride)?;
                let wave = split_step_evolve(&psi0, &cfg.params, &pde)?;
                if wave.norm_drift > 1e-8 {
                    violations.push(format!("wave norm drift {:.3e} > 1e-8", wave.norm_drift));
                }
                let mut states = Vec::with_capacity(wave.times.len());
                let mut max_leak = 0.0_f64;
                let mut series = ObservableSeries {
                    times: wave.times.clone(),
                    mean_x: Vec::new(),
                    mean_x2: Vec::new(),
                    site_populations: None,
                };
                for i in 0..wave.times.len() {
                    let proj = project_onto_ws(
                        &wave.states[i],
                        &basis,
                        &cfg.params,
                        wave.times[i],
                        DEFAULT_LEAKAGE_THRESHOLD,
                    );
                    max_leak = max_leak.max(proj.leakage);
                    states.push(proj.amplitudes);
                    series.mean_x.push(wave.mean_x(i));
                    series.mean_x2.push(wave.mean_x2(i));
                }
                if max_leak > DEFAULT_LEAKAGE_THRESHOLD {
                    violations.push(format!(
                        "single-band leakage {max_leak:.3e} > {DEFAULT_LEAKAGE_THRESHOLD:.1e}"
                    ));
                }
                println!("max single-band leakage: {max_leak:.3e}");
                let traj = Trajectory::from_states(states);
                let exact = exact_trajectory(&d0, &traj.times(), omega1, delta)?;
                let cmp = compare_trajectories(&traj, &exact, Gauge::FittedGlobalPhase)?;
                (traj, series, Some(cmp))
            }
        };

    if cfg.model != Model::Pde && trajectory.max_edge_amplitude() > EDGE_TOL {
        violations.push(format!(
            "window edge amplitude {:.3e} > {EDGE_TOL:.1e}",
            trajectory.max_edge_amplitude()
        ));
    }

    // ---- outputs ----
    let out = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(out)?;
    let mut guard = OutputGuard::new();

    let (rows, n_lo) = population_matrix(trajectory.states());
    let times = trajectory.times();
    write_populations_csv(guard.create(out.join("populations.csv"))?, &times, n_lo, &rows)
        .context("writing populations.csv")?;
    series
        .write_csv(guard.create(out.join("observables.csv"))?)
        .context("writing observables.csv")?;
    if let Some(cmp) = &comparison {
        cmp.write_csv(guard.create(out.join("comparison.csv"))?)
            .context("writing comparison.csv")?;
        println!(
            "comparison vs exact: max population err {:.3e}, max coherence err {:.3e}",
            cmp.max_population_error, cmp.max_coherence_error
        );
    }
    let mut plot = guard.create(out.join("plot.gp"))?;
    write!(plot, "{}", plot_script(cfg))?;
    let mut manifest = guard.create(out.join("manifest.cfg"))?;
    write!(manifest, "{}", cfg.manifest(wannier_stark::VERSION, command_line))?;
    guard.keep_all();

    println!(
        "run complete: {} samples over t in [0, {}], outputs in {}",
        times.len(),
        cfg.t_end,
        out.display()
    );
    Ok(RunOutcome { violations })
}

fn series_from_states(
    states: &[AmplitudeState],
    basis: &wannier_stark::WannierStarkBasis,
    params: &wannier_stark::LatticeParams,
) -> ObservableSeries {
    ObservableSeries {
        times: states.iter().map(|s| s.time()).collect(),
        mean_x: states.iter().map(|s| direct_mean_position(s, basis, params)).collect(),
        mean_x2: states
            .iter()
            .map(|s| direct_mean_square_position(s, basis, params))
            .collect(),
        site_populations: None,
    }
}

/// Embeds every sample into the union window and extracts the population
/// matrix.
fn population_matrix(states: &[AmplitudeState]) -> (Vec<Vec<f64>>, i64) {
    let n_lo = states.iter().map(|s| s.n_lo()).min().unwrap_or(0);
    let n_hi = states.iter().map(|s| s.n_hi()).max().unwrap_or(0);
    let rows = states
        .iter()
        .map(|s| (n_lo..=n_hi).map(|n| s.amplitude(n).norm_sqr()).collect())
        .collect();
    (rows, n_lo)
}

fn plot_script(cfg: &ScenarioConfig) -> String {
    format!(
        "# gnuplot script for the outputs of this run (model = {})\n\
         set datafile separator comma\n\
         set terminal pngcairo size 1000,700\n\
         \n\
         set output 'observables.png'\n\
         set xlabel 't (hbar/E_R)'\n\
         set key autotitle columnhead\n\
         plot 'observables.csv' using 1:2 with lines, \\\n\
         \x20    'observables.csv' using 1:4 with lines\n\
         \n\
         set output 'populations.png'\n\
         set xlabel 'site column'\n\
         set ylabel 'time sample'\n\
         unset key\n\
         plot 'populations.csv' matrix skip 1 with image\n",
        cfg.model.name()
    )
}
