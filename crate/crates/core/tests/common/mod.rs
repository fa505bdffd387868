//! Oracles shared by the integration tests. They evaluate the rectangle
//! eigenfunctions from their closed form and never call library routines
//! other than to read basis indices.

#![allow(dead_code)]

use std::f64::consts::PI;

use seba::SpectralBasis;

/// Dirichlet eigenvalues of the unit-area rectangle with eccentricity `e`,
/// with multiplicity, up to `count` entries, by exhaustive enumeration.
pub fn dirichlet_levels(e: f64, count: usize) -> Vec<f64> {
    let (a, b) = (e.sqrt(), 1.0 / e.sqrt());
    let level = |j: f64, k: f64| PI * PI * (j * j / (a * a) + k * k / (b * b));
    // Any level among the lowest `count` lies below both of these.
    let bound = level(count as f64, 1.0).min(level(1.0, count as f64));
    let mut levels = Vec::new();
    for j in 1..=count {
        for k in 1..=count {
            let v = level(j as f64, k as f64);
            if v <= bound {
                levels.push(v);
            }
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.truncate(count);
    levels
}

/// Midpoint-rule quadrature of `|psi|^2` over `[x_lo, x_hi] x [0, b]`, where
/// `psi` has the given coefficients in `basis`. Evaluation is separable: the
/// x-sums are collected per `k` before summing over `k`.
pub fn quadrature_mass(
    basis: &SpectralBasis,
    coefficients: &[f64],
    (x_lo, x_hi): (f64, f64),
    nx: usize,
    ny: usize,
) -> f64 {
    let geometry = basis.geometry();
    let (a, b) = (geometry.a(), geometry.b());
    let k_max = basis.modes().iter().map(|m| m.k).max().unwrap() as usize;
    let hx = (x_hi - x_lo) / nx as f64;
    let hy = b / ny as f64;
    let y_table: Vec<Vec<f64>> = (1..=k_max)
        .map(|k| {
            (0..ny)
                .map(|l| {
                    let y = (l as f64 + 0.5) * hy;
                    (2.0 / b).sqrt() * (k as f64 * PI * y / b).sin()
                })
                .collect()
        })
        .collect();

    let mut total = 0.0;
    let mut per_k = vec![0.0; k_max];
    for i in 0..nx {
        let x = x_lo + (i as f64 + 0.5) * hx;
        per_k.iter_mut().for_each(|g| *g = 0.0);
        for (c, m) in coefficients.iter().zip(basis.modes()) {
            if *c != 0.0 {
                per_k[m.k as usize - 1] += c * (2.0 / a).sqrt() * (m.j as f64 * PI * x / a).sin();
            }
        }
        for l in 0..ny {
            let psi: f64 = per_k.iter().zip(&y_table).map(|(g, row)| g * row[l]).sum();
            total += psi * psi;
        }
    }
    total * hx * hy
}

/// `psi(x, y)` from its closed-form expansion.
pub fn evaluate(basis: &SpectralBasis, coefficients: &[f64], x: f64, y: f64) -> f64 {
    let geometry = basis.geometry();
    let (a, b) = (geometry.a(), geometry.b());
    coefficients
        .iter()
        .zip(basis.modes())
        .map(|(c, m)| {
            c * 2.0
                * (m.j as f64 * PI * x / a).sin()
                * (m.k as f64 * PI * y / b).sin()
        })
        .sum()
}

pub fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}
