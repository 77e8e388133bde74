//! Basis export/import so expensive diagonalizations can be cached.
//!
//! The format is a CSV bundle: `#`-prefixed header lines carrying the cache
//! key, energies, elements and diagnostics, followed by one row per grid
//! point with the per-site state columns. Floats are written with 17
//! significant digits, which round-trips f64 exactly, so a reloaded basis is
//! bit-identical to the saved one.

use super::{BasisDiagnostics, BasisTolerances, WannierStarkBasis};
use crate::error::{Error, Result};
use crate::units::Grid;
use std::io::{BufRead, Write};
use std::path::Path;

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

impl WannierStarkBasis {
    /// The identity of a cached basis: every input that affects the result.
    pub fn cache_key(
        v0: f64,
        f: f64,
        grid: &Grid,
        site_window: (i64, i64),
        tol: &BasisTolerances,
    ) -> String {
        format!(
            "v0={} f={} x_min={} x_max={} n_points={} n_lo={} n_hi={} tol_ortho={} tol_ladder={} tol_trans={}",
            fmt(v0),
            fmt(f),
            fmt(grid.x_min()),
            fmt(grid.x_max()),
            grid.n_points(),
            site_window.0,
            site_window.1,
            fmt(tol.ortho),
            fmt(tol.ladder_rel),
            fmt(tol.translation),
        )
    }

    pub fn key(&self) -> String {
        Self::cache_key(self.v0, self.f, &self.grid, (self.n_lo, self.n_hi), &self.tolerances)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "# ws-basis-cache v1")?;
        writeln!(w, "# key: {}", self.key())?;
        let energies: Vec<String> = self.energies.iter().map(|&e| fmt(e)).collect();
        writeln!(w, "# energies: {}", energies.join(" "))?;
        writeln!(
            w,
            "# elements: x0={} x1={} x2={} x0_sq={} x1_sq={}",
            fmt(self.x0),
            fmt(self.x1),
            fmt(self.x2),
            fmt(self.x0_sq),
            fmt(self.x1_sq)
        )?;
        let d = &self.diagnostics;
        writeln!(
            w,
            "# diagnostics: ladder={} ortho={} trans={} centroid={} participation={} x1_spread={} x2_over_x1={} family_gap={}",
            fmt(d.max_ladder_residual),
            fmt(d.max_ortho_deviation),
            fmt(d.max_translation_deviation),
            fmt(d.max_centroid_offset),
            fmt(d.max_participation_wells),
            fmt(d.x1_pair_spread),
            fmt(d.x2_over_x1),
            fmt(d.family_gap),
        )?;
        let mut header = vec!["x".to_string()];
        for n in self.n_lo..=self.n_hi {
            header.push(format!("phi_{n}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.grid.n_points() {
            let mut row = vec![fmt(self.grid.point(i))];
            for s in &self.states {
                row.push(fmt(s[i]));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Loads a cached basis and verifies it was produced for `expected_key`;
    /// returns `Ok(None)` when the file exists but the key differs.
    pub fn load_if_matches(path: &Path, expected_key: &str) -> Result<Option<Self>> {
        let basis = Self::load(path)?;
        if basis.key() == expected_key {
            Ok(Some(basis))
        } else {
            Ok(None)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();

        let magic = next_line(&mut lines)?;
        if magic.trim() != "# ws-basis-cache v1" {
            return Err(Error::Cache(format!("unrecognized header: {magic}")));
        }
        let key_line = strip_prefix(&next_line(&mut lines)?, "# key: ")?;
        let kv = parse_kv(&key_line)?;
        let v0: f64 = field(&kv, "v0")?;
        let f: f64 = field(&kv, "f")?;
        let grid = Grid::new(
            field(&kv, "x_min")?,
            field(&kv, "x_max")?,
            field(&kv, "n_points")? as usize,
        )?;
        let n_lo = field(&kv, "n_lo")? as i64;
        let n_hi = field(&kv, "n_hi")? as i64;
        let tolerances = BasisTolerances {
            ortho: field(&kv, "tol_ortho")?,
            ladder_rel: field(&kv, "tol_ladder")?,
            translation: field(&kv, "tol_trans")?,
        };

        let energies_line = strip_prefix(&next_line(&mut lines)?, "# energies: ")?;
        let energies: Vec<f64> = energies_line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Cache(format!("bad energy '{s}': {e}"))))
            .collect::<Result<_>>()?;
        let n_sites = (n_hi - n_lo + 1) as usize;
        if energies.len() != n_sites {
            return Err(Error::Cache(format!(
                "expected {n_sites} energies, found {}",
                energies.len()
            )));
        }

        let elements_line = strip_prefix(&next_line(&mut lines)?, "# elements: ")?;
        let ekv = parse_kv(&elements_line)?;
        let diag_line = strip_prefix(&next_line(&mut lines)?, "# diagnostics: ")?;
        let dkv = parse_kv(&diag_line)?;
        let diagnostics = BasisDiagnostics {
            max_ladder_residual: field(&dkv, "ladder")?,
            max_ortho_deviation: field(&dkv, "ortho")?,
            max_translation_deviation: field(&dkv, "trans")?,
            max_centroid_offset: field(&dkv, "centroid")?,
            max_participation_wells: field(&dkv, "participation")?,
            x1_pair_spread: field(&dkv, "x1_spread")?,
            x2_over_x1: field(&dkv, "x2_over_x1")?,
            family_gap: field(&dkv, "family_gap")?,
        };

        let _columns = next_line(&mut lines)?; // column names
        let mut states = vec![Vec::with_capacity(grid.n_points()); n_sites];
        let mut rows = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let _x = parts.next();
            for (k, part) in parts.enumerate() {
                if k >= n_sites {
                    return Err(Error::Cache(format!("too many columns in row {rows}")));
                }
                let v: f64 = part
                    .parse()
                    .map_err(|e| Error::Cache(format!("bad value '{part}' in row {rows}: {e}")))?;
                states[k].push(v);
            }
            rows += 1;
        }
        if rows != grid.n_points() {
            return Err(Error::Cache(format!(
                "expected {} rows, found {rows}",
                grid.n_points()
            )));
        }

        Ok(Self {
            v0,
            f,
            grid,
            n_lo,
            n_hi,
            states,
            energies,
            x0: field(&ekv, "x0")?,
            x1: field(&ekv, "x1")?,
            x2: field(&ekv, "x2")?,
            x0_sq: field(&ekv, "x0_sq")?,
            x1_sq: field(&ekv, "x1_sq")?,
            tolerances,
            diagnostics,
        })
    }
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<String> {
    lines
        .next()
        .ok_or_else(|| Error::Cache("unexpected end of file".into()))?
        .map_err(Error::Io)
}

fn strip_prefix(line: &str, prefix: &str) -> Result<String> {
    line.strip_prefix(prefix)
        .map(str::to_string)
        .ok_or_else(|| Error::Cache(format!("expected '{prefix}...', found '{line}'")))
}

fn parse_kv(line: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for token in line.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::Cache(format!("malformed key=value token '{token}'")))?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

fn field(map: &std::collections::BTreeMap<String, String>, key: &str) -> Result<f64> {
    map.get(key)
        .ok_or_else(|| Error::Cache(format!("missing field '{key}'")))?
        .parse()
        .map_err(|e| Error::Cache(format!("bad value for '{key}': {e}")))
}
