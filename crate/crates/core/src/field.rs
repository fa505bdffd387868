//! Synthesis of mode fields on a uniform grid.

use std::f64::consts::PI;

use crate::basis::SpectralBasis;
use crate::error::{Result, SebaError};
use crate::spectrum::PerturbedMode;

/// Real field sampled on an `nx` by `ny` grid, stored row-major with `y` as
/// the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Field2 {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.nx)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid indices of the largest value (first occurrence in row-major order).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best % self.nx, best / self.nx)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2 {
        Field2 {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// `sin(j pi t_i / length)` for `j = 1..=max_index` on a closed uniform grid,
/// with the endpoint columns set to exactly zero.
fn sine_table(max_index: u32, points: usize, length: f64) -> Vec<Vec<f64>> {
    let step = length / (points - 1) as f64;
    (1..=max_index)
        .map(|j| {
            let mut row: Vec<f64> = (0..points)
                .map(|i| (f64::from(j) * PI * (i as f64 * step) / length).sin())
                .collect();
            row[0] = 0.0;
            row[points - 1] = 0.0;
            row
        })
        .collect()
}

/// Evaluates `psi = sum c_{jk} phi_{jk}` on the closed `nx` by `ny` grid over
/// the rectangle. Boundary samples are exactly zero.
pub fn mode_field(mode: &PerturbedMode, basis: &SpectralBasis, nx: usize, ny: usize) -> Result<Field2> {
    if nx < 2 || ny < 2 {
        return Err(SebaError::InvalidArgument(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    if mode.coefficients.len() != basis.len() {
        return Err(SebaError::InvalidArgument(
            "mode coefficients do not match the basis".into(),
        ));
    }
    let geometry = basis.geometry();
    let (j_max, k_max) = basis.index_bounds();
    let sin_x = sine_table(j_max, nx, geometry.a());
    let sin_y = sine_table(k_max, ny, geometry.b());

    // Collapse the x-dependence for each k first: row_k(x) = sum_j c_jk sin(j pi x / a).
    let mut profiles = vec![vec![0.0; nx]; k_max as usize];
    for (c, m) in mode.coefficients.iter().zip(basis.modes()) {
        if *c == 0.0 {
            continue;
        }
        let profile = &mut profiles[m.k as usize - 1];
        for (p, s) in profile.iter_mut().zip(&sin_x[m.j as usize - 1]) {
            *p += c * s;
        }
    }

    let scale = geometry.amplitude_scale();
    let mut values = vec![0.0; nx * ny];
    for (iy, row) in values.chunks_mut(nx).enumerate() {
        for (k, profile) in profiles.iter().enumerate() {
            let s = sin_y[k][iy];
            if s == 0.0 {
                continue;
            }
            for (v, p) in row.iter_mut().zip(profile) {
                *v += s * p;
            }
        }
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    Ok(Field2 { nx, ny, values })
}
