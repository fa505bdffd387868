//! Localization measures and sweeps on the default experiment setup.

mod common;

use std::f64::consts::PI;

use seba::{
    amplitude_at_scatterer, amplitude_curve, build_basis, compute_spectrum, localized_count,
    mode_field, scan_alpha, solve, sweep_eccentricity, table, tan_spaced_grid, Coupling,
    ExperimentParams, ModeKind, RectGeometry, SpectralFunction, SubdomainMass,
};

use common::quadrature_mass;

fn params(count: usize) -> ExperimentParams {
    ExperimentParams {
        count,
        ..ExperimentParams::default()
    }
}

#[test]
fn unperturbed_modes_vanish_at_the_scatterer() {
    let g = RectGeometry::with_ratios(PI / 3.0, 0.5, 1.0 / (2.0 * PI)).unwrap();
    let basis = build_basis(g, 4.0 * PI * 1000.0).unwrap();
    let f = SpectralFunction::new(&basis);
    let spectrum = compute_spectrum(&f, Coupling::Finite(0.4), 40).unwrap();
    let epsilon = 1e-8 * g.amplitude_scale();
    let mut seen = 0;
    for mode in spectrum.modes.iter().filter(|m| m.kind == ModeKind::Unperturbed) {
        let a = amplitude_at_scatterer(mode, &basis, basis.cutoff()).unwrap();
        assert!(a < epsilon * g.amplitude_scale(), "mode {}: {a}", mode.n);
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn amplitude_matches_field_at_the_scatterer_node() {
    // x0 = a/4 and y0 = 3b/8 fall on nodes 100 and 150 of a 401-point grid.
    let p = ExperimentParams {
        x0_ratio: 0.25,
        y0_ratio: 0.375,
        ..params(6)
    };
    let (basis, spectrum) = solve(2.0, Coupling::Finite(0.1), &p).unwrap();
    for mode in &spectrum.modes {
        let a = amplitude_at_scatterer(mode, &basis, basis.cutoff()).unwrap();
        let field = mode_field(mode, &basis, 401, 401).unwrap();
        let at_node = field.get(100, 150).abs();
        assert!((a - at_node).abs() < 1e-10 * a.max(1.0), "mode {}: {a} vs {at_node}", mode.n);
    }
}

#[test]
fn ground_amplitude_grows_for_negative_coupling() {
    let p = params(1);
    let g = p.geometry(PI / 3.0).unwrap();
    let basis = p.basis(g).unwrap();
    let f = p.spectral_function(&basis).unwrap();
    let amplitude = |alpha: f64| {
        let spectrum = compute_spectrum(&f, Coupling::Finite(alpha), 1).unwrap();
        amplitude_at_scatterer(&spectrum.modes[0], &basis, basis.cutoff()).unwrap()
    };
    assert!(amplitude(-5.0) > amplitude(0.0));
}

#[test]
fn masses_on_both_sides_of_the_scatterer_add_up() {
    let e = 10.0 * PI;
    let (basis, spectrum) = solve(e, Coupling::Finite(-0.05), &params(60)).unwrap();
    let g = *basis.geometry();
    // The mirror image of [x0, a] is [0, a - x0]; sin(j pi (a - x)/a)
    // picks up a factor (-1)^(j+1).
    let mirrored = build_basis(g.moved_to(g.a() - g.x0(), g.y0()).unwrap(), basis.cutoff()).unwrap();
    let left = SubdomainMass::new(&basis, g.x0()).unwrap();
    let right = SubdomainMass::new(&mirrored, g.a() - g.x0()).unwrap();
    for mode in &spectrum.modes {
        let flipped: Vec<f64> = mode
            .coefficients
            .iter()
            .zip(basis.modes())
            .map(|(c, m)| if m.j % 2 == 0 { -c } else { *c })
            .collect();
        let total = left.mass(&mode.coefficients) + right.mass(&flipped);
        assert!((total - 1.0).abs() < 1e-9, "mode {}: {total}", mode.n);
    }
}

#[test]
fn r1_matches_fine_quadrature_on_the_long_plate() {
    let e = 10.0 * PI;
    let (basis, records) = table(e, Coupling::Finite(-0.031), &params(500)).unwrap();
    let (_, spectrum) = solve(e, Coupling::Finite(-0.031), &params(500)).unwrap();
    for n in [2, 37, 311] {
        let mode = &spectrum.modes[n - 1];
        assert_eq!(mode.kind, ModeKind::Perturbed);
        let mass = quadrature_mass(&basis, &mode.coefficients, (0.0, basis.geometry().x0()), 1024, 1024);
        let r1 = records[n - 1].r1;
        assert!((r1 - mass.sqrt()).abs() < 1e-4 * r1, "mode {n}: {r1} vs {}", mass.sqrt());
    }
}

#[test]
fn single_mode_table_holds_the_ground_root() {
    let (_, records) = table(PI / 3.0, Coupling::Finite(2.0), &params(1)).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].n, 1);
    assert_eq!(records[0].kind, ModeKind::Perturbed);
}

#[test]
fn dirichlet_modes_spread_across_the_barrier() {
    let (_, records) = table(10.0 * PI, Coupling::Dirichlet, &params(500)).unwrap();
    let spread = records.iter().filter(|r| r.r1 > 0.1 && r.r1 < 0.9).count();
    assert!(spread > 250, "{spread} of 500");
}

#[test]
fn huge_coupling_reproduces_the_dirichlet_count() {
    let p = params(200);
    let g = p.geometry(10.0 * PI).unwrap();
    let scan = scan_alpha(g, &[1e6], &p).unwrap();
    let (_, dirichlet) = table(10.0 * PI, Coupling::Dirichlet, &p).unwrap();
    assert_eq!(scan.localized_counts[0], localized_count(&dirichlet, false));
}

/// The default coupling scan of the long plate, shared by the tests below.
fn long_plate_scan() -> (seba::SweepResult, usize) {
    let p = params(500);
    let g = p.geometry(10.0 * PI).unwrap();
    let mut grid = tan_spaced_grid(101, 50.0);
    grid.push(1e6);
    let scan = scan_alpha(g, &grid, &p).unwrap();
    let best = scan.best_index();
    (scan, best)
}

#[test]
fn best_coupling_localizes_the_long_plate() {
    let (scan, best) = long_plate_scan();
    let dirichlet_like = *scan.localized_counts.last().unwrap();
    assert!(scan.localized_counts[best] > dirichlet_like);

    // Most low perturbed modes above the ground mode are localized.
    let low: Vec<_> = scan.records[best]
        .iter()
        .filter(|r| (2..=50).contains(&r.n) && r.kind == ModeKind::Perturbed)
        .collect();
    let localized = low.iter().filter(|r| r.localized).count();
    assert!(2 * localized > low.len(), "{localized} of {}", low.len());
}

#[test]
fn best_coupling_localizes_a_hundred_of_five_hundred_modes() {
    let (scan, best) = long_plate_scan();
    let count = scan.localized_counts[best];
    assert!(count >= 100, "best alpha {} localizes {count} of 500 modes", scan.axis[best]);
}

#[test]
fn one_point_eccentricity_sweep_is_a_coupling_scan() {
    let p = params(60);
    let grid = [-0.3, -0.05, 0.2];
    let sweep = sweep_eccentricity(&[7.0], &grid, &p).unwrap();
    let scan = scan_alpha(p.geometry(7.0).unwrap(), &grid, &p).unwrap();
    assert_eq!(sweep.best_alphas, scan.best_alphas);
    assert_eq!(sweep.localized_counts, vec![scan.localized_counts[scan.best_index()]]);
}

#[test]
fn localization_grows_with_eccentricity() {
    let grid = tan_spaced_grid(101, 50.0);
    let eccentricities: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|m| m * PI).collect();
    let sweep = sweep_eccentricity(&eccentricities, &grid, &params(500)).unwrap();
    let inversions = sweep
        .localized_counts
        .windows(2)
        .filter(|w| w[1] < w[0])
        .count();
    assert!(inversions <= 1, "{:?}", sweep.localized_counts);
    assert!(sweep.localized_counts[4] > sweep.localized_counts[0]);
}

#[test]
fn two_sample_amplitude_curve_shape() {
    let p = params(20);
    let rows = amplitude_curve(p.geometry(PI / 3.0).unwrap(), &[1, 3], (-5.0, 5.0), 2, &p).unwrap();
    assert_eq!(rows.len(), 4);
    for n in [1, 3] {
        let alphas: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.alpha).collect();
        assert_eq!(alphas, vec![-5.0, 5.0]);
    }
}
