//! Localization measures for eigenmodes.
//!
//! `R1` is the square root of the L2 mass a normalized mode carries in the
//! strip `[0, x0] x [0, b]` left of the scatterer. The y-integral of two sine
//! modes over `[0, b]` is `delta_{kk'}`, so only pairs sharing `k` contribute
//! and the x-integrals have closed forms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::basis::SpectralBasis;
use crate::error::{Result, SebaError};
use crate::spectral::SpectralFunction;
use crate::spectrum::{compute_spectrum, Coupling, ModeKind, PerturbedMode, ScattererSpectrum};

/// Tolerance on `sum c^2 = 1` accepted by the measures.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `(2/a) int_0^x0 sin(j pi x/a) sin(j' pi x/a) dx`.
pub fn overlap_integral(j: u32, j_prime: u32, x0: f64, a: f64) -> f64 {
    let theta = PI * x0 / a;
    if j == j_prime {
        let twice = 2.0 * f64::from(j);
        x0 / a - (twice * theta).sin() / (twice * PI)
    } else {
        let diff = f64::from(j) - f64::from(j_prime);
        let sum = f64::from(j) + f64::from(j_prime);
        (diff * theta).sin() / (diff * PI) - (sum * theta).sin() / (sum * PI)
    }
}

/// Columns at most this long use the direct quadratic sum; longer ones go
/// through FFT correlations.
const DIRECT_COLUMN_LIMIT: usize = 64;

/// Forward and inverse transform of one length.
type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// Evaluates sub-domain masses for many modes of one basis.
///
/// Within one `k` column the mass is the quadratic form
/// `sum_{j,j'} u_j u_j' (s(|j - j'|) - sinc[j + j'])` with `s(0)` the split
/// ratio and `s(d) = sinc[d]` otherwise, where `sinc[d] = sin(d theta)/(d pi)`.
/// Long columns evaluate it from the autocorrelation and self-convolution of
/// `u`, both read off one inverse FFT.
#[derive(Clone)]
pub struct SubdomainMass {
    split_ratio: f64,
    /// `sinc[d] = sin(d theta) / (d pi)` for `d >= 1`.
    sinc: Vec<f64>,
    /// `columns[k - 1][j - 1]` is the basis index of mode `(j, k)`.
    columns: Vec<Vec<usize>>,
    basis_len: usize,
    /// Forward and inverse transforms keyed by length.
    plans: HashMap<usize, FftPair>,
}

impl fmt::Debug for SubdomainMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubdomainMass")
            .field("split_ratio", &self.split_ratio)
            .field("columns", &self.columns.len())
            .field("basis_len", &self.basis_len)
            .finish()
    }
}

impl SubdomainMass {
    /// Mass left of `x_split`, for `0 < x_split <= a`.
    pub fn new(basis: &SpectralBasis, x_split: f64) -> Result<Self> {
        let a = basis.geometry().a();
        if !(x_split > 0.0 && x_split <= a) {
            return Err(SebaError::InvalidArgument(format!(
                "split {x_split} must lie in (0, {a}]"
            )));
        }
        let (j_max, k_max) = basis.index_bounds();
        let theta = PI * x_split / a;
        let sinc = (0..=2 * j_max as usize + 2)
            .map(|d| {
                if d == 0 {
                    0.0
                } else {
                    let d = d as f64;
                    (d * theta).sin() / (d * PI)
                }
            })
            .collect();
        let mut columns = vec![Vec::new(); k_max as usize];
        let mut slots: Vec<(u32, u32, usize)> = basis
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| (m.k, m.j, i))
            .collect();
        slots.sort_unstable();
        for (k, j, i) in slots {
            let column: &mut Vec<usize> = &mut columns[k as usize - 1];
            debug_assert_eq!(column.len() + 1, j as usize);
            column.push(i);
        }

        let mut planner = FftPlanner::new();
        let mut plans = HashMap::new();
        for column in &columns {
            if column.len() > DIRECT_COLUMN_LIMIT {
                let len = transform_len(column.len());
                plans
                    .entry(len)
                    .or_insert_with(|| (planner.plan_fft_forward(len), planner.plan_fft_inverse(len)));
            }
        }
        Ok(Self {
            split_ratio: x_split / a,
            sinc,
            columns,
            basis_len: basis.len(),
            plans,
        })
    }

    /// `int_{[0, x_split] x [0, b]} psi^2` for a coefficient vector.
    pub fn mass(&self, coefficients: &[f64]) -> f64 {
        assert_eq!(coefficients.len(), self.basis_len, "coefficient length");
        let mut values = Vec::new();
        let mut buffer = Vec::new();
        let mut total = 0.0;
        for column in &self.columns {
            values.clear();
            values.extend(column.iter().map(|&i| coefficients[i]));
            total += if values.len() > DIRECT_COLUMN_LIMIT {
                self.column_mass_fft(&values, &mut buffer)
            } else {
                self.column_mass_direct(&values)
            };
        }
        total
    }

    fn column_mass_direct(&self, u: &[f64]) -> f64 {
        let sinc = &self.sinc;
        let mut acc = 0.0;
        for (p, &up) in u.iter().enumerate() {
            if up == 0.0 {
                continue;
            }
            let j = p + 1;
            let mut cross = 0.0;
            for (q, &uq) in u.iter().enumerate().skip(p + 1) {
                let jq = q + 1;
                cross += uq * (sinc[jq - j] - sinc[jq + j]);
            }
            acc += up * (up * (self.split_ratio - sinc[2 * j]) + 2.0 * cross);
        }
        acc
    }

    fn column_mass_fft(&self, u: &[f64], buffer: &mut Vec<Complex<f64>>) -> f64 {
        let len = transform_len(u.len());
        let (forward, inverse) = &self.plans[&len];
        buffer.clear();
        buffer.extend(u.iter().map(|&v| Complex::new(v, 0.0)));
        buffer.resize(len, Complex::new(0.0, 0.0));
        forward.process(buffer);
        // Real part: self-convolution. Imaginary part: autocorrelation.
        for w in buffer.iter_mut() {
            *w = *w * *w + Complex::new(0.0, w.norm_sqr());
        }
        inverse.process(buffer);
        let scale = 1.0 / len as f64;

        // Indices are zero-based, so convolution lag t pairs j + j' = t + 2.
        let toeplitz = self.split_ratio * buffer[0].im
            + 2.0
                * (1..u.len())
                    .map(|d| self.sinc[d] * buffer[d].im)
                    .sum::<f64>();
        let hankel: f64 = (0..2 * u.len() - 1)
            .map(|t| self.sinc[t + 2] * buffer[t].re)
            .sum();
        (toeplitz - hankel) * scale
    }
}

/// Power of two holding a linear convolution of two length-`n` sequences.
fn transform_len(n: usize) -> usize {
    (2 * n).next_power_of_two()
}

fn check_normalized(mode: &PerturbedMode) -> Result<()> {
    let norm_sq: f64 = mode.coefficients.iter().map(|c| c * c).sum();
    if (norm_sq - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(SebaError::NotNormalized { norm_sq });
    }
    Ok(())
}

/// Square root of the mass of `mode` in `[0, x0] x [0, b]`.
pub fn l2_ratio(mode: &PerturbedMode, basis: &SpectralBasis) -> Result<f64> {
    check_normalized(mode)?;
    let mass = SubdomainMass::new(basis, basis.geometry().x0())?;
    Ok(mass.mass(&mode.coefficients).clamp(0.0, 1.0).sqrt())
}

/// `|psi(x0)|` of the series truncated to eigenvalues `<= amplitude_cutoff`.
///
/// The full series diverges logarithmically at the scatterer, so values are
/// only comparable at a fixed cutoff.
pub fn amplitude_at_scatterer(
    mode: &PerturbedMode,
    basis: &SpectralBasis,
    amplitude_cutoff: f64,
) -> Result<f64> {
    if amplitude_cutoff > basis.cutoff() {
        return Err(SebaError::AmplitudeCutoff {
            requested: amplitude_cutoff,
            basis: basis.cutoff(),
        });
    }
    let sum: f64 = mode
        .coefficients
        .iter()
        .zip(basis.modes())
        .take_while(|(_, m)| m.eigenvalue <= amplitude_cutoff)
        .map(|(c, m)| c * m.value_at_scatterer)
        .sum();
    Ok(sum.abs())
}

/// Bounds on `R1` outside of which a mode counts as localized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            lower: 0.1,
            upper: 0.9,
        }
    }
}

impl Thresholds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(0.0 <= lower && lower < upper && upper <= 1.0) {
            return Err(SebaError::InvalidArgument(format!(
                "thresholds must satisfy 0 <= lower < upper <= 1, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn is_localized(&self, r1: f64) -> bool {
        r1 < self.lower || r1 > self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationRecord {
    pub n: usize,
    pub z: f64,
    pub kind: ModeKind,
    pub r1: f64,
    pub amplitude: f64,
    pub localized: bool,
}

/// Spectrum of the scatterer operator with `R1`, `A` and the localization
/// flag for the first `count` modes.
pub fn localization_table(
    function: &SpectralFunction<'_>,
    alpha: Coupling,
    count: usize,
    amplitude_cutoff: f64,
    thresholds: Thresholds,
) -> Result<Vec<LocalizationRecord>> {
    let basis = function.basis();
    if amplitude_cutoff > basis.cutoff() {
        return Err(SebaError::AmplitudeCutoff {
            requested: amplitude_cutoff,
            basis: basis.cutoff(),
        });
    }
    let spectrum = compute_spectrum(function, alpha, count)?;
    spectrum_records(&spectrum, basis, amplitude_cutoff, thresholds)
}

/// Localization records for an already computed spectrum.
pub fn spectrum_records(
    spectrum: &ScattererSpectrum,
    basis: &SpectralBasis,
    amplitude_cutoff: f64,
    thresholds: Thresholds,
) -> Result<Vec<LocalizationRecord>> {
    let mass = SubdomainMass::new(basis, basis.geometry().x0())?;
    spectrum
        .modes
        .par_iter()
        .map(|mode| {
            check_normalized(mode)?;
            let r1 = mass.mass(&mode.coefficients).clamp(0.0, 1.0).sqrt();
            let amplitude = amplitude_at_scatterer(mode, basis, amplitude_cutoff)?;
            Ok(LocalizationRecord {
                n: mode.n,
                z: mode.z,
                kind: mode.kind,
                r1,
                amplitude,
                localized: thresholds.is_localized(r1),
            })
        })
        .collect()
}

/// Localized modes excluding the ground mode; unperturbed modes only when
/// asked for.
pub fn localized_count(records: &[LocalizationRecord], include_unperturbed: bool) -> usize {
    records
        .iter()
        .filter(|r| r.n >= 2 && r.localized)
        .filter(|r| include_unperturbed || r.kind != ModeKind::Unperturbed)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, RectGeometry};

    /// Composite Simpson rule with `2 * half_steps` panels.
    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, half_steps: usize) -> f64 {
        let n = 2 * half_steps;
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn overlap_closed_forms() {
        let a = 1.7;
        assert!((overlap_integral(3, 3, a, a) - 1.0).abs() < 1e-14);
        assert!(overlap_integral(2, 5, a, a).abs() < 1e-14);
        let x0 = a / (2.0 * PI);
        let oracle = simpson(
            |x| 2.0 / a * (PI * x / a).sin() * (3.0 * PI * x / a).sin(),
            0.0,
            x0,
            2000,
        );
        assert!((overlap_integral(1, 3, x0, a) - oracle).abs() < 1e-10);
    }

    fn single_mode(basis: &SpectralBasis, index: usize) -> PerturbedMode {
        let mut coefficients = vec![0.0; basis.len()];
        coefficients[index] = 1.0;
        PerturbedMode {
            n: 1,
            z: basis.modes()[index].eigenvalue,
            kind: ModeKind::Dirichlet,
            coefficients,
            normalization: 1.0,
            bracket: (0.0, 0.0),
        }
    }

    #[test]
    fn single_mode_half_split() {
        for e in [PI / 3.0, 2.0, 10.0 * PI] {
            let g = RectGeometry::with_ratios(e, 0.5, 0.3).unwrap();
            let basis = build_basis(g, 4000.0).unwrap();
            let r1 = l2_ratio(&single_mode(&basis, 0), &basis).unwrap();
            assert!((r1 * r1 - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn full_split_gives_unit_ratio() {
        let g = RectGeometry::with_ratios(PI / 3.0, 0.3, 0.3).unwrap();
        let basis = build_basis(g, 1000.0).unwrap();
        let f = SpectralFunction::new(&basis);
        let spectrum = compute_spectrum(&f, Coupling::Finite(0.2), 3).unwrap();
        let mass = SubdomainMass::new(&basis, g.a()).unwrap();
        for mode in &spectrum.modes {
            assert!((mass.mass(&mode.coefficients) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn long_columns_match_pairwise_overlaps() {
        // E = 10 pi with this cutoff gives columns of several hundred modes.
        let g = RectGeometry::with_ratios(10.0 * PI, 1.0 / (2.0 * PI), 0.3).unwrap();
        let basis = build_basis(g, 4.0 * PI * 2000.0).unwrap();
        let longest = basis.modes().iter().map(|m| m.j).max().unwrap() as usize;
        assert!(longest > 4 * DIRECT_COLUMN_LIMIT);
        let raw: Vec<f64> = (0..basis.len())
            .map(|i| (0.7 * i as f64).sin() / (1.0 + i as f64).sqrt())
            .collect();
        let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u: Vec<f64> = raw.iter().map(|c| c / norm).collect();

        let x0 = g.x0();
        let mut oracle = 0.0;
        for (p, mp) in basis.modes().iter().enumerate() {
            for (q, mq) in basis.modes().iter().enumerate() {
                if mp.k == mq.k {
                    oracle += u[p] * u[q] * overlap_integral(mp.j, mq.j, x0, g.a());
                }
            }
        }
        let mass = SubdomainMass::new(&basis, x0).unwrap().mass(&u);
        assert!((mass - oracle).abs() < 1e-13, "{mass} vs {oracle}");
    }

    #[test]
    fn unnormalized_mode_is_rejected() {
        let g = RectGeometry::with_ratios(PI / 3.0, 0.3, 0.3).unwrap();
        let basis = build_basis(g, 500.0).unwrap();
        let mut mode = single_mode(&basis, 0);
        mode.coefficients[1] = 0.5;
        assert!(matches!(
            l2_ratio(&mode, &basis),
            Err(SebaError::NotNormalized { .. })
        ));
    }

    #[test]
    fn amplitude_cutoff_checks() {
        let g = RectGeometry::with_ratios(PI / 3.0, 0.5, 0.3).unwrap();
        let basis = build_basis(g, 500.0).unwrap();
        let f = SpectralFunction::new(&basis);
        // (2,1) vanishes on the midline.
        let index = basis.modes().iter().position(|m| (m.j, m.k) == (2, 1)).unwrap();
        let amp = amplitude_at_scatterer(&single_mode(&basis, index), &basis, 500.0).unwrap();
        assert!(amp < f.null_tolerance() * g.amplitude_scale());
        assert!(amplitude_at_scatterer(&single_mode(&basis, 0), &basis, 501.0).is_err());
    }

    #[test]
    fn threshold_semantics() {
        let t = Thresholds::default();
        assert!(t.is_localized(0.05));
        assert!(t.is_localized(0.95));
        assert!(!t.is_localized(0.5));
        assert!(!t.is_localized(0.1));
        assert!(Thresholds::new(0.9, 0.1).is_err());
    }
}
