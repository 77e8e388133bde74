use super::*;
use std::sync::OnceLock;

pub(crate) fn reference_basis() -> &'static WannierStarkBasis {
    static BASIS: OnceLock<WannierStarkBasis> = OnceLock::new();
    BASIS.get_or_init(|| {
        let params = LatticeParams::reference();
        WannierStarkBasis::solve(&params, &Grid::default_box(), (-10, 10), BasisTolerances::default())
            .expect("reference basis solves")
    })
}

#[test]
fn hamiltonian_is_tridiagonal_symmetric_with_real_spectrum() {
    let params = LatticeParams::new(4.5, 0.5, 0.0, 0.5).unwrap();
    let grid = Grid::new(-20.0, 20.0, 2048).unwrap();
    let ham = build_hamiltonian(&params, &grid).unwrap();
    assert_eq!(ham.dim(), 2048);
    // symmetric storage; a sample of eigenvalues is real by construction
    let (lo, hi) = ham.spectrum_bounds();
    assert!(lo.is_finite() && hi.is_finite());
    let vals = ham.eigenvalues_in(lo, lo + 2.0);
    assert!(vals.iter().all(|v| v.is_finite()));
}

#[test]
fn coarse_grid_rejected() {
    let params = LatticeParams::reference();
    let grid = Grid::new(-20.0, 20.0, 100).unwrap();
    assert!(matches!(build_hamiltonian(&params, &grid), Err(Error::Config(_))));
}

#[test]
fn near_free_particle_matches_box_spectrum() {
    // vanishing depth and tilt: particle in a hard-wall box
    let params = LatticeParams::new(1e-12, 1e-12, 0.0, 1.0).unwrap();
    let grid = Grid::new(-5.0, 5.0, 1024).unwrap();
    let ham = build_hamiltonian(&params, &grid).unwrap();
    let vals = ham.eigenvalues_in(0.0, 0.5);
    let m = params.reduced_mass();
    let l = 10.0 + 2.0 * grid.spacing(); // walls one spacing outside
    for (j, &v) in vals.iter().enumerate().take(6) {
        let exact = ((j + 1) as f64 * std::f64::consts::PI / l).powi(2) / (2.0 * m);
        assert!(
            (v - exact).abs() < 2e-4 * exact,
            "mode {j}: {v} vs box level {exact}"
        );
    }
}

/// Independent lowest-band computation for the untilted lattice by
/// plane-wave diagonalization (dense, via nalgebra), nothing shared with the
/// finite-difference path.
fn plane_wave_band_edges(v0: f64) -> (f64, f64) {
    use nalgebra::DMatrix;
    let l = 20i64;
    let dim = (2 * l + 1) as usize;
    let m = crate::units::REDUCED_MASS;
    let mut lowest = Vec::new();
    for ik in 0..=40 {
        let k = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * ik as f64 / 40.0;
        let mut mat = DMatrix::zeros(dim, dim);
        for (row, g) in (-l..=l).enumerate() {
            let kg = k + 2.0 * std::f64::consts::PI * g as f64;
            mat[(row, row)] = kg * kg / (2.0 * m);
            if row + 1 < dim {
                mat[(row, row + 1)] = v0 / 2.0;
                mat[(row + 1, row)] = v0 / 2.0;
            }
        }
        let eig = mat.symmetric_eigen();
        lowest.push(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    (
        lowest.iter().cloned().fold(f64::INFINITY, f64::min),
        lowest.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    )
}

#[test]
fn untilted_lowest_band_clusters_within_mathieu_band() {
    let (band_min, band_max) = plane_wave_band_edges(4.5);
    let width = band_max - band_min;
    // negligible tilt stands in for the untilted lattice
    let params = LatticeParams::new(4.5, 1e-9, 0.0, 1.0).unwrap();
    let grid = Grid::default_box();
    let ham = build_hamiltonian(&params, &grid).unwrap();
    let vals = ham.eigenvalues_in(band_min - 0.5, band_max + 0.5);
    assert!(vals.len() > 30, "expected a near-complete band, got {}", vals.len());
    for &v in &vals {
        assert!(
            v > band_min - 2e-3 && v < band_max + 2e-3,
            "eigenvalue {v} outside band [{band_min}, {band_max}]"
        );
    }
    // band width far below the gap scale omega_h
    let omega_h = 2.0 * (2.0f64 * 4.5).sqrt();
    assert!(width < 0.05 * omega_h, "width {width} vs gap scale {omega_h}");
}

#[test]
fn reference_elements_match_quoted_values() {
    let basis = reference_basis();
    // one-significant-figure literature values for v0=4.5, f=0.5
    assert!((basis.x1() - 5e-2).abs() < 0.2 * 5e-2, "X1 = {}", basis.x1());
    assert!((basis.x2().abs() - 8e-4).abs() < 0.3 * 8e-4, "X2 = {}", basis.x2());
    // rapid decay of the coupling with distance
    let x3 = basis.x_element(0, 3).abs();
    assert!(x3 < basis.x2().abs() && basis.x2().abs() < basis.x1());
    // X1^(2) of the same order as X1 * X00
    let ratio = basis.x1_sq().abs() / (basis.x1() * basis.x0()).abs();
    assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
}

#[test]
fn ladder_and_translation_symmetry() {
    let basis = reference_basis();
    let d = basis.diagnostics();
    let f = basis.f();
    assert!(d.max_ladder_residual < 1e-4 * f, "ladder {}", d.max_ladder_residual);
    assert!(d.max_translation_deviation < 1e-4, "translation {}", d.max_translation_deviation);
    assert!(d.max_ortho_deviation < 1e-8, "ortho {}", d.max_ortho_deviation);
    assert!(d.max_centroid_offset < 0.5, "centroid {}", d.max_centroid_offset);

    // X_nn = X_00 + n across the window
    for n in basis.sites() {
        let dev = (basis.x_element(n, n) - basis.x0() - n as f64).abs();
        assert!(dev < 1e-4, "site {n}: X_nn deviation {dev}");
    }
    // X_1 does not depend on which neighbor pair produced it
    for n in [-9i64, -3, 0, 4, 9] {
        let dev = (basis.x_element(n, n + 1) - basis.x1()).abs();
        assert!(dev < 1e-4, "pair ({n},{}) deviation {dev}", n + 1);
        let dev_down = (basis.x_element(n, n - 1) - basis.x1()).abs();
        assert!(dev_down < 1e-4, "pair ({n},{}) deviation {dev_down}", n - 1);
    }
    // x^2 translation identity: <n|x^2|n> - <0|x^2|0> = 2 n X0 + n^2
    for n in basis.sites() {
        let dev = (basis.x2_element(n, n) - basis.x0_sq() - 2.0 * n as f64 * basis.x0() - (n * n) as f64).abs();
        assert!(dev < 1e-4, "site {n}: x^2 deviation {dev}");
    }
    // <n|x^2|n+1> = X1^(2) + 2 n X1
    for n in [-8i64, -1, 0, 6] {
        let dev = (basis.x2_element(n, n + 1) - basis.x1_sq() - 2.0 * n as f64 * basis.x1()).abs();
        assert!(dev < 1e-4, "pair ({n},{}) x^2 deviation {dev}", n + 1);
    }
}

#[test]
fn x_element_is_symmetric() {
    let basis = reference_basis();
    for (n, m) in [(0i64, 1i64), (-2, 3), (5, 4)] {
        assert_eq!(basis.x_element(n, m), basis.x_element(m, n));
        assert_eq!(basis.x2_element(n, m), basis.x2_element(m, n));
    }
}

#[test]
fn x1_grows_as_tilt_shrinks() {
    let grid = Grid::new(-24.0, 24.0, 2048).unwrap();
    let mut previous = f64::INFINITY;
    for f in [0.3, 0.5, 0.8] {
        let params = LatticeParams::new(4.5, f, 0.0, f).unwrap();
        let basis =
            WannierStarkBasis::solve(&params, &grid, (-5, 5), BasisTolerances::default()).unwrap();
        assert!(
            basis.x1() < previous,
            "X1 should decrease with f: {} at f={f}",
            basis.x1()
        );
        previous = basis.x1();
    }
}

#[test]
fn construction_is_deterministic() {
    let params = LatticeParams::reference();
    let grid = Grid::new(-16.0, 16.0, 2048).unwrap();
    let a = WannierStarkBasis::solve(&params, &grid, (-4, 4), BasisTolerances::default()).unwrap();
    let b = WannierStarkBasis::solve(&params, &grid, (-4, 4), BasisTolerances::default()).unwrap();
    assert_eq!(a, b, "identical inputs must give bit-identical bases");
}

#[test]
fn window_too_close_to_walls_rejected() {
    let params = LatticeParams::reference();
    let grid = Grid::new(-8.0, 8.0, 1024).unwrap();
    let err = WannierStarkBasis::solve(&params, &grid, (-7, 7), BasisTolerances::default());
    assert!(matches!(err, Err(Error::Config(_))));
}

#[test]
fn matrix_elements_converge_under_grid_halving() {
    // second-order discretization: the x and x^2 elements settle well below
    // the acceptance thresholds once the grid resolves the well
    let params = LatticeParams::reference();
    let tol = BasisTolerances::default();
    let coarse = WannierStarkBasis::solve(
        &params,
        &Grid::new(-12.0, 12.0, 32768).unwrap(),
        (-2, 2),
        tol,
    )
    .unwrap();
    let fine = WannierStarkBasis::solve(
        &params,
        &Grid::new(-12.0, 12.0, 65536).unwrap(),
        (-2, 2),
        tol,
    )
    .unwrap();
    assert!((coarse.x1_sq() - fine.x1_sq()).abs() < 1e-6);
    assert!((coarse.x0_sq() - fine.x0_sq()).abs() < 1e-6);
    assert!((coarse.x0() - fine.x0()).abs() < 1e-6);
}

#[test]
fn cache_round_trip_is_bit_identical() {
    let params = LatticeParams::reference();
    let grid = Grid::new(-16.0, 16.0, 2048).unwrap();
    let basis =
        WannierStarkBasis::solve(&params, &grid, (-4, 4), BasisTolerances::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.csv");
    basis.save(&path).unwrap();
    let loaded = WannierStarkBasis::load(&path).unwrap();
    assert_eq!(basis, loaded);

    let key = WannierStarkBasis::cache_key(4.5, 0.5, &grid, (-4, 4), &BasisTolerances::default());
    assert!(WannierStarkBasis::load_if_matches(&path, &key).unwrap().is_some());
    let other_key = WannierStarkBasis::cache_key(4.4, 0.5, &grid, (-4, 4), &BasisTolerances::default());
    assert!(WannierStarkBasis::load_if_matches(&path, &other_key).unwrap().is_none());
}

#[test]
fn interpolation_reproduces_smooth_functions() {
    let h = 0.01;
    let values: Vec<f64> = (0..1000).map(|i| (0.7 * (i as f64) * h).sin()).collect();
    for &frac in &[0.25, 0.5, 0.75, 0.125] {
        for i in (10..990).step_by(37) {
            let idx = i as f64 + frac;
            let exact = (0.7 * idx * h).sin();
            let got = sample_shifted(&values, idx);
            assert!((got - exact).abs() < 1e-9, "idx {idx}: {got} vs {exact}");
        }
    }
}
