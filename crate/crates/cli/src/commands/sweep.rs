//! The `sweep` subcommand: re-run the scenario for each value of one
//! parameter axis, in parallel, and emit one summary row per value.

use crate::config::{InitialState, ScenarioConfig};
use anyhow::{bail, Result};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use wannier_stark::basis::WannierStarkBasis;
use wannier_stark::dynamics::{rabi_frequency, AmplitudeState, ObservableEvaluator, RabiOrder};
use wannier_stark::fit::linear_fit;
use wannier_stark::units::LatticeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    F,
    V0,
    F0,
    Omega,
    K0,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Self::F),
            "v0" => Ok(Self::V0),
            "f0" => Ok(Self::F0),
            "omega" => Ok(Self::Omega),
            "k0" => Ok(Self::K0),
            other => bail!("unknown sweep axis '{other}' (expected f|v0|f0|omega|k0)"),
        }
    }
}

struct SweepRow {
    value: f64,
    x1: f64,
    omega1: f64,
    v_g: f64,
    breathing_period: f64,
    status: String,
}

pub fn cmd_sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;

    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| match sweep_point(cfg, axis, value) {
            Ok(row) => row,
            Err(e) => SweepRow {
                value,
                x1: f64::NAN,
                omega1: f64::NAN,
                v_g: f64::NAN,
                breathing_period: f64::NAN,
                status: format!("error: {e}"),
            },
        })
        .collect();

    let path = Path::new(&cfg.out_dir).join("sweep.csv");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(w, "value,x1,omega1,v_g_fitted,breathing_period,status")?;
    for r in &rows {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            r.value, r.x1, r.omega1, r.v_g, r.breathing_period, r.status
        )?;
        println!(
            "value {:>10.4}: X1 = {:.4e}, Omega1 = {:.4e}, v_g = {:.4e}, breathing = {:.4}  [{}]",
            r.value, r.x1, r.omega1, r.v_g, r.breathing_period, r.status
        );
    }
    println!("sweep summary written to {}", path.display());
    if rows.iter().any(|r| r.status != "ok") {
        bail!("one or more sweep points failed");
    }
    Ok(())
}

fn sweep_point(cfg: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<SweepRow> {
    let base = &cfg.params;
    let mut k0 = match cfg.initial {
        InitialState::PlaneWave { k0, .. } => k0,
        _ => 0.0,
    };
    let params = match axis {
        SweepAxis::F => LatticeParams::new(base.v0(), value, base.f0(), base.omega())?,
        SweepAxis::V0 => LatticeParams::new(value, base.f(), base.f0(), base.omega())?,
        SweepAxis::F0 => LatticeParams::new(base.v0(), base.f(), value, base.omega())?,
        SweepAxis::Omega => LatticeParams::new(base.v0(), base.f(), base.f0(), value)?,
        SweepAxis::K0 => {
            k0 = value;
            *base
        }
    };

    let basis =
        WannierStarkBasis::solve(&params, &cfg.grid, cfg.site_window, cfg.tolerances())?;
    let omega1 = rabi_frequency(RabiOrder::First, &params, &basis);

    // group velocity from a least-squares slope of the closed-form <x>(t)
    let v_g = if omega1.abs() > 0.0 {
        let n_sites = 101;
        let d0 = AmplitudeState::plane_wave(n_sites, k0, (-(n_sites as i64), n_sites as i64));
        let eval = ObservableEvaluator::new(&d0, &basis, &params);
        let t_end = 20.0 / omega1.abs();
        let times: Vec<f64> = (0..=200).map(|i| t_end * i as f64 / 200.0).collect();
        let xs: Vec<f64> = times.iter().map(|&t| eval.mean_x(t)).collect();
        linear_fit(&times, &xs).0
    } else {
        0.0
    };

    let breathing_period = if params.delta() != 0.0 {
        2.0 * std::f64::consts::PI / params.delta().abs()
    } else {
        f64::INFINITY
    };

    Ok(SweepRow { value, x1: basis.x1(), omega1, v_g, breathing_period, status: "ok".into() })
}
