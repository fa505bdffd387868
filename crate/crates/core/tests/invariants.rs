mod common;

use proptest::prelude::*;

use seba::{
    build_basis, compute_spectrum, localization_table, spectrum_records, Coupling, CutoffPolicy,
    ExperimentParams, ModeKind, RectGeometry, SpectralFunction, Thresholds,
};

use common::{dirichlet_levels, relative_gap};

const COUNT: usize = 40;

fn params(x0_ratio: f64, y0_ratio: f64) -> ExperimentParams {
    ExperimentParams {
        x0_ratio,
        y0_ratio,
        count: COUNT,
        ..ExperimentParams::default()
    }
}

fn eccentricity() -> impl Strategy<Value = f64> {
    0.2f64..40.0
}

fn ratio() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_interlaces_dirichlet_levels(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
    ) {
        let p = params(x, y);
        let (_, spectrum) = seba::solve(e, Coupling::Finite(alpha), &p).unwrap();
        let levels = dirichlet_levels(e, COUNT + 1);
        let z = spectrum.eigenvalues();
        prop_assert_eq!(z.len(), COUNT);
        for n in 0..COUNT {
            let slack = 1e-8 * levels[n].abs().max(1.0);
            prop_assert!(z[n] <= levels[n] + slack, "z_{} = {} above E = {}", n + 1, z[n], levels[n]);
            if n + 1 < COUNT {
                prop_assert!(levels[n] <= z[n + 1] + slack);
            }
        }
    }

    #[test]
    fn coefficients_are_normalized(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
    ) {
        let (_, spectrum) = seba::solve(e, Coupling::Finite(alpha), &params(x, y)).unwrap();
        for mode in &spectrum.modes {
            let norm_sq: f64 = mode.coefficients.iter().map(|c| c * c).sum();
            prop_assert!((norm_sq - 1.0).abs() < 1e-12, "mode {} has norm^2 {}", mode.n, norm_sq);
        }
    }

    #[test]
    fn overlaps_match_truncation_defect(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
    ) {
        // In the truncated basis <psi_z, psi_w> N_z N_w (z - w) equals the
        // difference of the raw sums, which is minus the tail difference.
        for tail in [false, true] {
            let p = ExperimentParams { tail_correction: tail, ..params(x, y) };
            let (basis, spectrum) = seba::solve(e, Coupling::Finite(alpha), &p).unwrap();
            let cutoff = basis.cutoff();
            let f = p.spectral_function(&basis).unwrap();
            // Residual of a root bracketed to relative width 1e-10.
            let residual = |z: f64| f.derivative(z).unwrap() * 1e-10 * z.abs().max(1.0);
            let modes: Vec<_> = spectrum.modes[..12]
                .iter()
                .filter(|m| m.kind == ModeKind::Perturbed && m.z.is_finite())
                .collect();
            for (i, u) in modes.iter().enumerate() {
                for v in &modes[i + 1..] {
                    let dot: f64 = u.coefficients.iter().zip(&v.coefficients).map(|(p, q)| p * q).sum();
                    let scaled = dot * u.normalization * v.normalization * (u.z - v.z);
                    let expected = if tail {
                        ((cutoff - u.z) / (cutoff - v.z)).ln() / (4.0 * std::f64::consts::PI)
                    } else {
                        0.0
                    };
                    let tolerance = 2.0 * (residual(u.z) + residual(v.z)) + 1e-12;
                    prop_assert!(
                        (scaled - expected).abs() < tolerance,
                        "tail {}: modes {} and {}: {} vs {}", tail, u.n, v.n, scaled, expected
                    );
                    if !tail {
                        prop_assert!(dot.abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvalues_increase_with_coupling(
        e in eccentricity(), x in ratio(), y in ratio(),
        alpha in -5.0f64..5.0, step in 0.01f64..3.0,
    ) {
        let geometry = RectGeometry::with_ratios(e, x, y).unwrap();
        let cutoff = seba::auto_cutoff(&geometry, COUNT).unwrap();
        let basis = build_basis(geometry, cutoff).unwrap();
        let f = SpectralFunction::new(&basis);
        let lower = compute_spectrum(&f, Coupling::Finite(alpha), COUNT).unwrap();
        let upper = compute_spectrum(&f, Coupling::Finite(alpha + step), COUNT).unwrap();
        for (l, u) in lower.modes.iter().zip(&upper.modes) {
            prop_assert!(l.z <= u.z, "z_{} decreased from {} to {}", l.n, l.z, u.z);
            if l.kind == ModeKind::Perturbed && u.kind == ModeKind::Perturbed {
                prop_assert!(l.z < u.z);
            }
        }
    }

    #[test]
    fn mirrored_scatterer_complements_r1(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
    ) {
        let (_, left) = seba::table(e, Coupling::Finite(alpha), &params(x, y)).unwrap();
        let (_, right) = seba::table(e, Coupling::Finite(alpha), &params(1.0 - x, y)).unwrap();
        for (l, r) in left.iter().zip(&right) {
            prop_assert!(relative_gap(l.z, r.z) < 1e-9, "z_{}: {} vs {}", l.n, l.z, r.z);
            if l.kind == ModeKind::Perturbed {
                let complement = (1.0 - l.r1 * l.r1).max(0.0).sqrt();
                prop_assert!((complement - r.r1).abs() < 1e-6, "mode {}: {} vs {}", l.n, complement, r.r1);
            }
        }
    }

    #[test]
    fn r1_does_not_depend_on_amplitude_cutoff(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
        fraction in 0.05f64..1.0,
    ) {
        let p = params(x, y);
        let (basis, spectrum) = seba::solve(e, Coupling::Finite(alpha), &p).unwrap();
        let thresholds = Thresholds::default();
        let full = spectrum_records(&spectrum, &basis, basis.cutoff(), thresholds).unwrap();
        let partial = spectrum_records(&spectrum, &basis, fraction * basis.cutoff(), thresholds).unwrap();
        for (f, q) in full.iter().zip(&partial) {
            prop_assert_eq!(f.r1.to_bits(), q.r1.to_bits());
            prop_assert!((0.0..=1.0).contains(&f.r1));
            prop_assert!(f.amplitude >= 0.0);
        }
    }

    #[test]
    fn repeated_runs_are_bit_identical(
        e in eccentricity(), x in ratio(), y in ratio(), alpha in -5.0f64..5.0,
    ) {
        let p = ExperimentParams { cutoff: CutoffPolicy::Fixed(4.0 * std::f64::consts::PI * 8.0 * 200.0), ..params(x, y) };
        let geometry = p.geometry(e).unwrap();
        let basis = match p.basis(geometry) {
            Ok(basis) => basis,
            Err(_) => return Ok(()),
        };
        let f = p.spectral_function(&basis).unwrap();
        let first = localization_table(&f, Coupling::Finite(alpha), 5, basis.cutoff(), Thresholds::default());
        let second = localization_table(&f, Coupling::Finite(alpha), 5, basis.cutoff(), Thresholds::default());
        match (first, second) {
            (Ok(first), Ok(second)) => {
                for (u, v) in first.iter().zip(&second) {
                    prop_assert_eq!(u.z.to_bits(), v.z.to_bits());
                    prop_assert_eq!(u.r1.to_bits(), v.r1.to_bits());
                    prop_assert_eq!(u.amplitude.to_bits(), v.amplitude.to_bits());
                }
            }
            (Err(first), Err(second)) => prop_assert_eq!(first.to_string(), second.to_string()),
            _ => prop_assert!(false, "runs disagree on success"),
        }
    }

    #[test]
    fn dirichlet_coupling_reproduces_levels(e in eccentricity(), x in ratio(), y in ratio()) {
        let (_, spectrum) = seba::solve(e, Coupling::Dirichlet, &params(x, y)).unwrap();
        let levels = dirichlet_levels(e, COUNT);
        for (mode, level) in spectrum.modes.iter().zip(&levels) {
            prop_assert_eq!(mode.kind, ModeKind::Dirichlet);
            prop_assert!(relative_gap(mode.z, *level) < 1e-14);
            prop_assert_eq!(mode.bracket, (mode.z, mode.z));
        }
    }
}
