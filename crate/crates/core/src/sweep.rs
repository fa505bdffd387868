//! Coupling and eccentricity sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::basis::{build_basis, mode_count_bound, RectGeometry, SpectralBasis, MAX_BASIS_MODES};
use crate::error::{Result, SebaError};
use crate::localization::{
    amplitude_at_scatterer, localization_table, localized_count, spectrum_records, LocalizationRecord,
    Thresholds,
};
use crate::spectral::{SpectralFunction, NULL_RATIO};
use crate::spectrum::{compute_spectrum, Coupling, ScattererSpectrum};

/// Default scatterer position as a fraction of the side length.
pub const DEFAULT_POSITION_RATIO: f64 = 1.0 / (2.0 * PI);

/// Largest cutoff the `3 |z|` refinement may request.
pub const REFINED_CUTOFF_CAP: f64 = 4.0 * PI * 200_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    Auto,
    Fixed(f64),
}

/// Everything an experiment needs besides the eccentricity and coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    pub x0_ratio: f64,
    pub y0_ratio: f64,
    pub count: usize,
    pub cutoff: CutoffPolicy,
    /// `None` uses the basis cutoff.
    pub amplitude_cutoff: Option<f64>,
    pub thresholds: Thresholds,
    pub include_unperturbed: bool,
    pub tail_correction: bool,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            x0_ratio: DEFAULT_POSITION_RATIO,
            y0_ratio: DEFAULT_POSITION_RATIO,
            count: 500,
            cutoff: CutoffPolicy::Auto,
            amplitude_cutoff: None,
            thresholds: Thresholds::default(),
            include_unperturbed: false,
            tail_correction: true,
        }
    }
}

impl ExperimentParams {
    pub fn geometry(&self, eccentricity: f64) -> Result<RectGeometry> {
        RectGeometry::with_ratios(eccentricity, self.x0_ratio, self.y0_ratio)
    }

    pub fn basis(&self, geometry: RectGeometry) -> Result<SpectralBasis> {
        let cutoff = match self.cutoff {
            CutoffPolicy::Auto => auto_cutoff(&geometry, self.count)?,
            CutoffPolicy::Fixed(cutoff) => cutoff,
        };
        build_basis(geometry, cutoff)
    }

    pub fn spectral_function<'a>(&self, basis: &'a SpectralBasis) -> Result<SpectralFunction<'a>> {
        SpectralFunction::with_options(
            basis,
            NULL_RATIO * basis.geometry().amplitude_scale(),
            self.tail_correction,
        )
    }

    pub fn amplitude_cutoff_for(&self, basis: &SpectralBasis) -> f64 {
        self.amplitude_cutoff.unwrap_or(basis.cutoff())
    }
}

fn modes_below(geometry: &RectGeometry, limit: f64) -> usize {
    let root = limit.max(0.0).sqrt() / PI;
    let j_max = (geometry.a() * root).floor() as u32;
    (1..=j_max)
        .map(|j| {
            let rest = limit - geometry.eigenvalue(j, 0);
            (geometry.b() * rest.max(0.0).sqrt() / PI).floor() as usize
        })
        .sum()
}

/// Cutoff sized for `count` modes: `4 pi * 8 * count` from the Weyl law,
/// doubled until at least `2 count + 2` modes lie below half of it.
///
/// Elongated rectangles have far fewer low modes than the Weyl estimate, so
/// the doubling step matters for large eccentricities.
pub fn auto_cutoff(geometry: &RectGeometry, count: usize) -> Result<f64> {
    let mut cutoff = 4.0 * PI * 8.0 * count.max(1) as f64;
    loop {
        if mode_count_bound(geometry, cutoff) > 2.0 * MAX_BASIS_MODES as f64 {
            return Err(SebaError::BasisOverflow {
                limit: MAX_BASIS_MODES,
            });
        }
        if modes_below(geometry, 0.5 * cutoff) >= 2 * count + 2 {
            return Ok(cutoff);
        }
        cutoff *= 2.0;
    }
}

/// Spectrum plus the basis it was computed in. Under [`CutoffPolicy::Auto`]
/// the cutoff is raised to `3 |z|` when a returned eigenvalue lies that deep,
/// up to [`REFINED_CUTOFF_CAP`].
pub fn solve(
    eccentricity: f64,
    alpha: Coupling,
    params: &ExperimentParams,
) -> Result<(SpectralBasis, ScattererSpectrum)> {
    let geometry = params.geometry(eccentricity)?;
    let basis = params.basis(geometry)?;
    let spectrum = compute_spectrum(&params.spectral_function(&basis)?, alpha, params.count)?;
    if params.cutoff != CutoffPolicy::Auto {
        return Ok((basis, spectrum));
    }
    // A bottom root at -inf is already exact in any basis.
    let deepest = spectrum
        .modes
        .iter()
        .map(|m| m.z.abs())
        .filter(|z| z.is_finite())
        .fold(0.0, f64::max);
    let wanted = (3.0 * deepest).min(REFINED_CUTOFF_CAP);
    if wanted <= basis.cutoff() {
        return Ok((basis, spectrum));
    }
    let refined = build_basis(geometry, wanted)?;
    if refined.len() > MAX_BASIS_MODES {
        return Err(SebaError::BasisOverflow {
            limit: MAX_BASIS_MODES,
        });
    }
    let spectrum = compute_spectrum(&params.spectral_function(&refined)?, alpha, params.count)?;
    Ok((refined, spectrum))
}

/// Localization table for one eccentricity and coupling, in the basis chosen
/// by [`solve`].
pub fn table(
    eccentricity: f64,
    alpha: Coupling,
    params: &ExperimentParams,
) -> Result<(SpectralBasis, Vec<LocalizationRecord>)> {
    let (basis, spectrum) = solve(eccentricity, alpha, params)?;
    let amplitude_cutoff = params.amplitude_cutoff_for(&basis);
    if amplitude_cutoff > basis.cutoff() {
        return Err(SebaError::AmplitudeCutoff {
            requested: amplitude_cutoff,
            basis: basis.cutoff(),
        });
    }
    let records = spectrum_records(&spectrum, &basis, amplitude_cutoff, params.thresholds)?;
    Ok((basis, records))
}

/// `samples` couplings `tan(theta)` with `theta` uniform over
/// `[-atan(clip), atan(clip)]`.
pub fn tan_spaced_grid(samples: usize, clip: f64) -> Vec<f64> {
    if samples == 1 {
        return vec![0.0];
    }
    let limit = clip.atan();
    (0..samples)
        .map(|i| (limit * (2.0 * i as f64 / (samples - 1) as f64 - 1.0)).tan())
        .collect()
}

/// `samples` evenly spaced values over `[lo, hi]`, endpoints exact.
pub fn uniform_grid(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![lo];
    }
    (0..samples)
        .map(|i| {
            if i == samples - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (samples - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Alpha,
    Eccentricity,
}

/// Output of [`scan_alpha`] or [`sweep_eccentricity`].
///
/// For an alpha scan `axis` holds the couplings, `records` one table per
/// coupling and `best_alphas` a single entry. For an eccentricity sweep
/// `axis` holds eccentricities and each entry refers to the best coupling
/// found for that eccentricity.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub axis: Vec<f64>,
    pub records: Vec<Vec<LocalizationRecord>>,
    pub localized_counts: Vec<usize>,
    pub best_alphas: Vec<f64>,
}

impl SweepResult {
    /// Position of the best entry: the best coupling of an alpha scan, or
    /// the eccentricity with the largest count (ties go to the earliest).
    pub fn best_index(&self) -> usize {
        match self.kind {
            SweepKind::Alpha => best_index(&self.axis, &self.localized_counts),
            SweepKind::Eccentricity => (0..self.axis.len())
                .min_by(|&l, &r| self.localized_counts[r].cmp(&self.localized_counts[l]))
                .expect("non-empty sweep"),
        }
    }
}

fn best_index(alphas: &[f64], counts: &[usize]) -> usize {
    (0..alphas.len())
        .min_by(|&l, &r| {
            counts[r]
                .cmp(&counts[l])
                .then(alphas[l].abs().total_cmp(&alphas[r].abs()))
                .then(alphas[l].total_cmp(&alphas[r]))
        })
        .expect("non-empty grid")
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SebaError::InvalidArgument(format!("{name} grid is empty")));
    }
    Ok(())
}

fn scan_basis(
    basis: &SpectralBasis,
    alpha_grid: &[f64],
    params: &ExperimentParams,
) -> Result<SweepResult> {
    check_grid("alpha", alpha_grid)?;
    let function = params.spectral_function(basis)?;
    let amplitude_cutoff = params.amplitude_cutoff_for(basis);
    let couplings = alpha_grid
        .iter()
        .map(|&a| {
            if a.is_finite() {
                Ok(Coupling::Finite(a))
            } else {
                Err(SebaError::InvalidArgument(format!(
                    "alpha grid values must be finite, got {a}"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let records = couplings
        .par_iter()
        .map(|&alpha| {
            localization_table(
                &function,
                alpha,
                params.count,
                amplitude_cutoff,
                params.thresholds,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let localized_counts: Vec<usize> = records
        .iter()
        .map(|r| localized_count(r, params.include_unperturbed))
        .collect();
    let best = best_index(alpha_grid, &localized_counts);
    Ok(SweepResult {
        kind: SweepKind::Alpha,
        axis: alpha_grid.to_vec(),
        records,
        localized_counts,
        best_alphas: vec![alpha_grid[best]],
    })
}

/// Localization tables over a grid of finite couplings, with the coupling
/// that localizes the most modes (ties go to the smallest `|alpha|`).
pub fn scan_alpha(
    geometry: RectGeometry,
    alpha_grid: &[f64],
    params: &ExperimentParams,
) -> Result<SweepResult> {
    check_grid("alpha", alpha_grid)?;
    let basis = params.basis(geometry)?;
    scan_basis(&basis, alpha_grid, params)
}

/// Best localized count over the coupling grid for each eccentricity.
pub fn sweep_eccentricity(
    eccentricity_grid: &[f64],
    alpha_grid: &[f64],
    params: &ExperimentParams,
) -> Result<SweepResult> {
    check_grid("eccentricity", eccentricity_grid)?;
    check_grid("alpha", alpha_grid)?;
    let mut result = SweepResult {
        kind: SweepKind::Eccentricity,
        axis: eccentricity_grid.to_vec(),
        records: Vec::with_capacity(eccentricity_grid.len()),
        localized_counts: Vec::with_capacity(eccentricity_grid.len()),
        best_alphas: Vec::with_capacity(eccentricity_grid.len()),
    };
    for &eccentricity in eccentricity_grid {
        let scan = scan_alpha(params.geometry(eccentricity)?, alpha_grid, params)?;
        let best = scan.best_index();
        result.best_alphas.push(scan.best_alphas[0]);
        result.localized_counts.push(scan.localized_counts[best]);
        result.records.push(scan.records.into_iter().nth(best).unwrap());
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample {
    pub alpha: f64,
    pub n: usize,
    pub amplitude: f64,
}

/// `A(n, alpha)` on `samples` evenly spaced couplings over `[lo, hi]`,
/// ordered by coupling and then by mode index. The basis is sized for
/// `params.count` modes, as for a localization table.
pub fn amplitude_curve(
    geometry: RectGeometry,
    mode_indices: &[usize],
    alpha_range: (f64, f64),
    samples: usize,
    params: &ExperimentParams,
) -> Result<Vec<AmplitudeSample>> {
    if samples < 2 {
        return Err(SebaError::InvalidArgument(format!(
            "amplitude curve needs at least 2 samples, got {samples}"
        )));
    }
    let (lo, hi) = alpha_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SebaError::InvalidArgument(format!(
            "invalid alpha range [{lo}, {hi}]"
        )));
    }
    if mode_indices.is_empty() || mode_indices.contains(&0) {
        return Err(SebaError::InvalidArgument(
            "mode indices must be a non-empty list of positive integers".into(),
        ));
    }
    let mut indices = mode_indices.to_vec();
    indices.sort_unstable();
    indices.dedup();
    let count = *indices.last().unwrap();
    let params = ExperimentParams {
        count: count.max(params.count),
        ..*params
    };
    let basis = params.basis(geometry)?;
    let function = params.spectral_function(&basis)?;
    let amplitude_cutoff = params.amplitude_cutoff_for(&basis);

    let rows = uniform_grid(lo, hi, samples)
        .into_par_iter()
        .map(|alpha| {
            let spectrum = compute_spectrum(&function, Coupling::Finite(alpha), count)?;
            indices
                .iter()
                .map(|&n| {
                    let amplitude =
                        amplitude_at_scatterer(&spectrum.modes[n - 1], &basis, amplitude_cutoff)?;
                    Ok(AmplitudeSample {
                        alpha,
                        n,
                        amplitude,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}
