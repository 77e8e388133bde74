//! The `basis` subcommand: build or load the cached Wannier-Stark basis and
//! print its matrix elements and symmetry diagnostics.

use crate::config::ScenarioConfig;
use crate::scenario::load_or_build_basis;
use anyhow::Result;

pub fn cmd_basis(cfg: &ScenarioConfig) -> Result<()> {
    let (basis, cached) = load_or_build_basis(cfg)?;
    let d = basis.diagnostics();
    let (n_lo, n_hi) = basis.site_window();
    println!("source: {}", if cached { "cache" } else { "computed" });
    println!(
        "lattice: v0 = {}, f = {} (omega_B = {}), grid [{}, {}] x {}, sites [{}, {}]",
        basis.v0(),
        basis.f(),
        basis.f(),
        basis.grid().x_min(),
        basis.grid().x_max(),
        basis.grid().n_points(),
        n_lo,
        n_hi,
    );
    println!("X0      = {:.12e}", basis.x0());
    println!("X1      = {:.12e}", basis.x1());
    println!("X2      = {:.12e}", basis.x2());
    println!("X0^(2)  = {:.12e}", basis.x0_sq());
    println!("X1^(2)  = {:.12e}", basis.x1_sq());
    println!("ladder residual      = {:.3e}  (tol {:.1e})", d.max_ladder_residual, basis.tolerances().ladder_rel * basis.f());
    println!("orthonormality       = {:.3e}  (tol {:.1e})", d.max_ortho_deviation, basis.tolerances().ortho);
    println!("translation residual = {:.3e}  (tol {:.1e})", d.max_translation_deviation, basis.tolerances().translation);
    println!("centroid offset      = {:.3e}", d.max_centroid_offset);
    println!("participation (wells)= {:.3}", d.max_participation_wells);
    println!("X1 pair spread       = {:.3e}", d.x1_pair_spread);
    println!("|X2/X1|              = {:.3e}", d.x2_over_x1);
    println!("family gap           = {:.3}", d.family_gap);
    for w in cfg.params.warnings() {
        println!("warning: {w:?}");
    }
    Ok(())
}
