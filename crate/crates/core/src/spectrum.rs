//! Eigenpairs of the rectangle with a point scatterer.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Result, SebaError};
use crate::spectral::{Cluster, SpectralFunction};

/// Coupling constant `alpha` in `(-inf, +inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    /// `alpha = +inf`: no scatterer, plain Dirichlet spectrum.
    Dirichlet,
}

impl Coupling {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == f64::INFINITY {
            Ok(Coupling::Dirichlet)
        } else if alpha.is_finite() {
            Ok(Coupling::Finite(alpha))
        } else {
            Err(SebaError::InvalidArgument(format!(
                "coupling must lie in (-inf, +inf], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Coupling::Finite(alpha) => alpha,
            Coupling::Dirichlet => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeKind {
    /// Root of `F(z) = alpha`; eigenfunction proportional to `G_z(., x0)`.
    Perturbed,
    /// Dirichlet eigenvalue that survives the scatterer.
    Unperturbed,
    /// Dirichlet mode passed through unchanged at `alpha = +inf`.
    Dirichlet,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Perturbed => "Perturbed",
            ModeKind::Unperturbed => "Unperturbed",
            ModeKind::Dirichlet => "Unperturbed-passthrough",
        }
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One normalized eigenpair.
///
/// `coefficients[i]` multiplies the `i`-th mode of the basis; the squares sum
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedMode {
    pub n: usize,
    pub z: f64,
    pub kind: ModeKind,
    pub coefficients: Vec<f64>,
    /// `||G_z(., x0)||` for perturbed modes, 1 otherwise.
    pub normalization: f64,
    /// Dirichlet eigenvalues bracketing `z`; both equal `z` unless perturbed,
    /// and the lower one is `-inf` on the bottom interval.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct ScattererSpectrum {
    pub alpha: Coupling,
    pub modes: Vec<PerturbedMode>,
}

impl ScattererSpectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.z).collect()
    }
}

/// Normalized coefficients of `G_z(., x0)` in the basis.
///
/// `z = -inf` yields the limit `c_n proportional to phi_n(x0)`, with
/// normalization reported as zero.
pub fn perturbed_coefficients(function: &SpectralFunction<'_>, z: f64) -> (Vec<f64>, f64) {
    let modes = function.basis().modes();
    if z == f64::NEG_INFINITY {
        let mut coefficients: Vec<f64> = modes
            .iter()
            .map(|m| {
                if function.is_null(m.value_at_scatterer) {
                    0.0
                } else {
                    m.value_at_scatterer
                }
            })
            .collect();
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in &mut coefficients {
            *c /= norm;
        }
        return (coefficients, 0.0);
    }
    // Scaling by the distance to the nearest pole keeps the sums in range for
    // z far below the spectrum.
    let scale = modes
        .iter()
        .filter(|m| !function.is_null(m.value_at_scatterer))
        .map(|m| (m.eigenvalue - z).abs())
        .fold(f64::INFINITY, f64::min);
    let mut coefficients: Vec<f64> = modes
        .iter()
        .map(|m| {
            if function.is_null(m.value_at_scatterer) {
                0.0
            } else {
                m.value_at_scatterer * (scale / (m.eigenvalue - z))
            }
        })
        .collect();
    let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coefficients {
        *c /= norm;
    }
    (coefficients, norm / scale)
}

/// Orthonormal basis of `{c : sum_n c_n phi_n(x0) = 0}` inside a cluster,
/// as dense coefficient vectors over the whole basis.
pub fn unperturbed_eigenvectors(function: &SpectralFunction<'_>, cluster: &Cluster) -> Vec<Vec<f64>> {
    let modes = function.basis().modes();
    let members = cluster.members.clone();
    let size = members.len();
    let values: Vec<f64> = modes[members.clone()]
        .iter()
        .map(|m| {
            if function.is_null(m.value_at_scatterer) {
                0.0
            } else {
                m.value_at_scatterer
            }
        })
        .collect();

    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(size);
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        accepted.push(values.iter().map(|v| v / norm).collect());
    }
    let constraint_rows = accepted.len();
    for unit in 0..size {
        if accepted.len() == size {
            break;
        }
        let mut candidate = vec![0.0; size];
        candidate[unit] = 1.0;
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for q in &accepted {
                let dot: f64 = q.iter().zip(&candidate).map(|(a, b)| a * b).sum();
                for (c, qv) in candidate.iter_mut().zip(q) {
                    *c -= dot * qv;
                }
            }
        }
        let len = candidate.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-8 {
            accepted.push(candidate.into_iter().map(|c| c / len).collect());
        }
    }

    accepted
        .into_iter()
        .skip(constraint_rows)
        .map(|local| {
            let mut dense = vec![0.0; modes.len()];
            dense[members.clone()].copy_from_slice(&local);
            dense
        })
        .collect()
}

fn unit_vector(len: usize, index: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[index] = 1.0;
    v
}

/// The lowest `count` eigenpairs of the scatterer operator in ascending order.
///
/// At `alpha = +inf` this is the Dirichlet spectrum. For finite `alpha` one
/// root of `F(z) = alpha` is taken below the first pole and between each pair
/// of consecutive poles, merged with the eigenvalues that survive the
/// scatterer. All poles used must lie below half the basis cutoff.
///
/// For strongly negative `alpha` the bottom root can fall below `-1e300`;
/// it is then reported as `z = -inf` with the limiting eigenfunction.
pub fn compute_spectrum(
    function: &SpectralFunction<'_>,
    alpha: Coupling,
    count: usize,
) -> Result<ScattererSpectrum> {
    if count == 0 {
        return Err(SebaError::InvalidArgument("count must be at least 1".into()));
    }
    let basis = function.basis();
    let modes = basis.modes();
    let limit = 0.5 * basis.cutoff();

    let alpha_value = match alpha {
        Coupling::Dirichlet => {
            let available = modes.iter().take_while(|m| m.eigenvalue <= limit).count();
            if available < count {
                return Err(SebaError::InsufficientBasis {
                    needed: count,
                    found: available,
                    limit,
                });
            }
            let modes = modes[..count]
                .iter()
                .enumerate()
                .map(|(i, m)| PerturbedMode {
                    n: i + 1,
                    z: m.eigenvalue,
                    kind: ModeKind::Dirichlet,
                    coefficients: unit_vector(modes.len(), i),
                    normalization: 1.0,
                    bracket: (m.eigenvalue, m.eigenvalue),
                })
                .collect();
            return Ok(ScattererSpectrum { alpha, modes });
        }
        Coupling::Finite(value) => value,
    };

    // Walk clusters until `count` eigenvalues are accounted for and the last
    // cluster visited is a pole, so the next root lies above everything kept.
    let mut pole_count = 0;
    let mut found = 0;
    let mut survivors: Vec<&Cluster> = Vec::new();
    let mut complete = false;
    for cluster in function.clusters() {
        if cluster.value > limit {
            break;
        }
        if cluster.is_pole() {
            pole_count += 1;
            found += 1;
        }
        if cluster.retained_multiplicity() > 0 {
            found += cluster.retained_multiplicity();
            survivors.push(cluster);
        }
        if found >= count && cluster.is_pole() {
            complete = true;
            break;
        }
    }
    if !complete {
        return Err(SebaError::InsufficientBasis {
            needed: count,
            found: found.min(count.saturating_sub(1)),
            limit,
        });
    }

    let poles = function.poles();
    let roots = (0..pole_count)
        .into_par_iter()
        .map(|i| {
            let lo = if i == 0 { None } else { Some(poles[i - 1]) };
            let z = match function.solve_secular_on_interval(lo, poles[i], alpha_value) {
                // The bottom root lies below every representable number.
                Err(SebaError::NoRoot { .. }) if i == 0 => f64::NEG_INFINITY,
                other => other?,
            };
            let (coefficients, normalization) = perturbed_coefficients(function, z);
            Ok(PerturbedMode {
                n: 0,
                z,
                kind: ModeKind::Perturbed,
                coefficients,
                normalization,
                bracket: (lo.unwrap_or(f64::NEG_INFINITY), poles[i]),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut all = roots;
    for cluster in survivors {
        for coefficients in unperturbed_eigenvectors(function, cluster) {
            all.push(PerturbedMode {
                n: 0,
                z: cluster.value,
                kind: ModeKind::Unperturbed,
                coefficients,
                normalization: 1.0,
                bracket: (cluster.value, cluster.value),
            });
        }
    }
    // Stable sort keeps the Gram-Schmidt order inside a cluster.
    all.sort_by(|l, r| l.z.total_cmp(&r.z).then(l.kind.cmp(&r.kind)));
    all.truncate(count);
    for (i, mode) in all.iter_mut().enumerate() {
        mode.n = i + 1;
    }
    Ok(ScattererSpectrum { alpha, modes: all })
}
