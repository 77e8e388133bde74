//! Flat sectioned key=value scenario configuration, and the run manifest
//! (the fully resolved configuration echoed back in the same format, so a
//! manifest is itself a valid config and reruns are bit-identical).

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use wannier_stark::basis::BasisTolerances;
use wannier_stark::units::{Grid, LatticeParams};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    SingleSite { site: i64 },
    PlaneWave { n_sites: usize, k0: f64 },
    File { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Exact,
    Ode,
    Pde,
}

impl Model {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "ode" => Ok(Self::Ode),
            "pde" => Ok(Self::Pde),
            other => bail!("unknown model '{other}' (expected exact|ode|pde)"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Ode => "ode",
            Self::Pde => "pde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Nearest,
    NextNearest,
    Full,
}

impl Coupling {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "next-nearest" => Ok(Self::NextNearest),
            "full" => Ok(Self::Full),
            other => bail!("unknown coupling '{other}' (expected nearest|next-nearest|full)"),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Nearest => "nearest",
            Self::NextNearest => "next-nearest",
            Self::Full => "full",
        }
    }
}

/// Fully resolved scenario: every field has a concrete value, and the
/// manifest echo parses back to an identical struct.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: LatticeParams,
    pub grid: Grid,
    pub site_window: (i64, i64),
    pub initial: InitialState,
    pub model: Model,
    pub coupling: Coupling,
    pub t_end: f64,
    pub samples: usize,
    pub dt: f64,
    pub p_max: usize,
    pub l_max: i64,
    pub out_dir: String,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: LatticeParams::reference(),
            grid: Grid::default_box(),
            site_window: (-10, 10),
            initial: InitialState::SingleSite { site: 0 },
            model: Model::Exact,
            coupling: Coupling::Nearest,
            t_end: 500.0,
            samples: 200,
            dt: 1e-2,
            p_max: 2,
            l_max: 4,
            out_dir: "out".to_string(),
            seed: 42,
        }
    }
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
        } else if let Some((k, v)) = line.split_once('=') {
            if current.is_empty() {
                bail!("line {}: key=value outside any [section]", lineno + 1);
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(k.trim().to_string(), v.trim().to_string());
        } else {
            bail!("line {}: expected [section] or key = value, found '{raw}'", lineno + 1);
        }
    }
    Ok(sections)
}

fn get<T: std::str::FromStr>(sections: &Sections, section: &str, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match sections.get(section).and_then(|s| s.get(key)) {
        Some(raw) => raw
            .parse()
            .map_err(|e| anyhow::anyhow!("[{section}] {key} = '{raw}': {e}")),
        None => Ok(default),
    }
}

impl ScenarioConfig {
    /// Parses a config file on top of the defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s = parse_sections(text)?;
        let d = Self::default();

        let v0 = get(&s, "lattice", "v0", 4.5)?;
        let f = get(&s, "lattice", "f", 0.5)?;
        let f0 = get(&s, "lattice", "f0", 0.0)?;
        let omega = get(&s, "lattice", "omega", f)?;
        let params = LatticeParams::new(v0, f, f0, omega)?;

        let grid = Grid::new(
            get(&s, "grid", "x_min", -24.0)?,
            get(&s, "grid", "x_max", 24.0)?,
            get(&s, "grid", "n_points", 4096usize)?,
        )?;

        let site_window = (get(&s, "sites", "n_lo", -10i64)?, get(&s, "sites", "n_hi", 10i64)?);

        let kind: String = get(&s, "initial", "kind", "single-site".to_string())?;
        let initial = match kind.as_str() {
            "single-site" => InitialState::SingleSite { site: get(&s, "initial", "site", 0i64)? },
            "plane-wave" => InitialState::PlaneWave {
                n_sites: get(&s, "initial", "n_sites", 32usize)?,
                k0: get(&s, "initial", "k0", 0.0)?,
            },
            "file" => InitialState::File {
                path: get(&s, "initial", "path", String::new())
                    .and_then(|p: String| if p.is_empty() { bail!("[initial] path required for kind = file") } else { Ok(p) })?,
            },
            other => bail!("[initial] kind = '{other}' (expected single-site|plane-wave|file)"),
        };

        let model = Model::parse(&get(&s, "run", "model", "exact".to_string())?)?;
        let coupling = Coupling::parse(&get(&s, "run", "coupling", "nearest".to_string())?)?;

        Ok(Self {
            params,
            grid,
            site_window,
            initial,
            model,
            coupling,
            t_end: get(&s, "run", "t_end", d.t_end)?,
            samples: get(&s, "run", "samples", d.samples)?,
            dt: get(&s, "run", "dt", d.dt)?,
            p_max: get(&s, "run", "p_max", d.p_max)?,
            l_max: get(&s, "run", "l_max", d.l_max)?,
            out_dir: get(&s, "output", "dir", d.out_dir)?,
            seed: get(&s, "run", "seed", d.seed)?,
        })
    }

    /// The manifest body: the fully resolved configuration in config syntax.
    pub fn manifest(&self, version: &str, command: &str) -> String {
        let mut m = String::new();
        let _ = writeln!(m, "# manifest written by wstark {version}");
        let _ = writeln!(m, "# command: {command}");
        let _ = writeln!(m, "[lattice]");
        let _ = writeln!(m, "v0 = {:.17e}", self.params.v0());
        let _ = writeln!(m, "f = {:.17e}", self.params.f());
        let _ = writeln!(m, "f0 = {:.17e}", self.params.f0());
        let _ = writeln!(m, "omega = {:.17e}", self.params.omega());
        let _ = writeln!(m, "[grid]");
        let _ = writeln!(m, "x_min = {:.17e}", self.grid.x_min());
        let _ = writeln!(m, "x_max = {:.17e}", self.grid.x_max());
        let _ = writeln!(m, "n_points = {}", self.grid.n_points());
        let _ = writeln!(m, "[sites]");
        let _ = writeln!(m, "n_lo = {}", self.site_window.0);
        let _ = writeln!(m, "n_hi = {}", self.site_window.1);
        let _ = writeln!(m, "[initial]");
        match &self.initial {
            InitialState::SingleSite { site } => {
                let _ = writeln!(m, "kind = single-site");
                let _ = writeln!(m, "site = {site}");
            }
            InitialState::PlaneWave { n_sites, k0 } => {
                let _ = writeln!(m, "kind = plane-wave");
                let _ = writeln!(m, "n_sites = {n_sites}");
                let _ = writeln!(m, "k0 = {k0:.17e}");
            }
            InitialState::File { path } => {
                let _ = writeln!(m, "kind = file");
                let _ = writeln!(m, "path = {path}");
            }
        }
        let _ = writeln!(m, "[run]");
        let _ = writeln!(m, "model = {}", self.model.name());
        let _ = writeln!(m, "coupling = {}", self.coupling.name());
        let _ = writeln!(m, "t_end = {:.17e}", self.t_end);
        let _ = writeln!(m, "samples = {}", self.samples);
        let _ = writeln!(m, "dt = {:.17e}", self.dt);
        let _ = writeln!(m, "p_max = {}", self.p_max);
        let _ = writeln!(m, "l_max = {}", self.l_max);
        let _ = writeln!(m, "seed = {}", self.seed);
        let _ = writeln!(m, "[output]");
        let _ = writeln!(m, "dir = {}", self.out_dir);
        m
    }

    pub fn tolerances(&self) -> BasisTolerances {
        BasisTolerances::default()
    }
}
