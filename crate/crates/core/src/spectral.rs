//! The renormalized spectral function
//! `F(z) = sum_n phi_n(x0)^2 (1/(E_n - z) - E_n/(E_n^2 + 1))`
//! and the classification of Dirichlet eigenvalues into poles of `F` and
//! eigenvalues that survive the scatterer.
//!
//! The series is truncated at the basis cutoff `L`. The remainder is replaced
//! by its Weyl average `-(1/4 pi) ln((L - z) / sqrt(L^2 + 1))`, which is the
//! integral of the summand against the mean density `1/4 pi` of
//! `phi_n(x0)^2` over `[L, inf)`.

use std::f64::consts::PI;
use std::ops::Range;

use crate::basis::{degenerate, SpectralBasis};
use crate::error::{Result, SebaError};

/// Relative distance to a pole below which `F` is not evaluated.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Relative null threshold: `|phi_n(x0)| < NULL_RATIO * 2/sqrt(ab)` counts as zero.
pub const NULL_RATIO: f64 = 1e-8;

/// A run of degenerate basis eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Eigenvalue of the first member.
    pub value: f64,
    /// Indices into the basis mode list.
    pub members: Range<usize>,
    /// Members whose value at the scatterer is treated as zero.
    pub nulls: usize,
    /// Sum of `phi_n(x0)^2` over non-null members; the residue of `F` here.
    pub weight: f64,
}

impl Cluster {
    /// `mu`: the Dirichlet multiplicity.
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    /// `true` when `F` has a pole at this eigenvalue.
    pub fn is_pole(&self) -> bool {
        self.nulls < self.multiplicity()
    }

    /// Multiplicity retained in the spectrum of the scatterer operator.
    pub fn retained_multiplicity(&self) -> usize {
        if self.nulls == self.multiplicity() {
            self.multiplicity()
        } else {
            self.multiplicity() - 1
        }
    }
}

/// How a Dirichlet eigenvalue behaves once the scatterer is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Simple pole of `F`; not an eigenvalue of the scatterer operator.
    PerturbedPole,
    /// Stays in the spectrum with the given multiplicity. `pole` is set when
    /// `F` also has a pole there (some member does not vanish at `x0`).
    Unperturbed { multiplicity: usize, pole: bool },
}

/// `F` together with the pole structure of one basis.
#[derive(Debug, Clone)]
pub struct SpectralFunction<'a> {
    basis: &'a SpectralBasis,
    null_tolerance: f64,
    tail_correction: bool,
    clusters: Vec<Cluster>,
    pole_values: Vec<f64>,
    pole_weights: Vec<f64>,
    pole_clusters: Vec<usize>,
    renormalization: f64,
}

impl<'a> SpectralFunction<'a> {
    /// Default null tolerance and Weyl tail correction enabled.
    pub fn new(basis: &'a SpectralBasis) -> Self {
        let null_tolerance = NULL_RATIO * basis.geometry().amplitude_scale();
        Self::with_options(basis, null_tolerance, true)
            .expect("default null tolerance is positive")
    }

    pub fn with_options(
        basis: &'a SpectralBasis,
        null_tolerance: f64,
        tail_correction: bool,
    ) -> Result<Self> {
        if !(null_tolerance > 0.0 && null_tolerance.is_finite()) {
            return Err(SebaError::InvalidArgument(format!(
                "null tolerance must be positive, got {null_tolerance}"
            )));
        }
        let modes = basis.modes();
        let mut clusters = Vec::new();
        let mut start = 0;
        while start < modes.len() {
            let value = modes[start].eigenvalue;
            let mut end = start + 1;
            while end < modes.len() && degenerate(modes[end].eigenvalue, value) {
                end += 1;
            }
            let mut nulls = 0;
            let mut weight = 0.0;
            for mode in &modes[start..end] {
                if mode.value_at_scatterer.abs() < null_tolerance {
                    nulls += 1;
                } else {
                    weight += mode.value_at_scatterer * mode.value_at_scatterer;
                }
            }
            clusters.push(Cluster {
                value,
                members: start..end,
                nulls,
                weight,
            });
            start = end;
        }

        let mut pole_values = Vec::new();
        let mut pole_weights = Vec::new();
        let mut pole_clusters = Vec::new();
        for (index, cluster) in clusters.iter().enumerate() {
            if cluster.is_pole() {
                pole_values.push(cluster.value);
                pole_weights.push(cluster.weight);
                pole_clusters.push(index);
            }
        }
        let renormalization = -pole_values
            .iter()
            .zip(&pole_weights)
            .map(|(&e, &w)| w * e / (e * e + 1.0))
            .sum::<f64>();

        Ok(Self {
            basis,
            null_tolerance,
            tail_correction,
            clusters,
            pole_values,
            pole_weights,
            pole_clusters,
            renormalization,
        })
    }

    pub fn basis(&self) -> &'a SpectralBasis {
        self.basis
    }

    pub fn null_tolerance(&self) -> f64 {
        self.null_tolerance
    }

    pub fn tail_correction(&self) -> bool {
        self.tail_correction
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Ascending eigenvalues at which `F` has a pole.
    pub fn poles(&self) -> &[f64] {
        &self.pole_values
    }

    /// Index into [`Self::clusters`] of the `i`-th pole.
    pub fn pole_cluster(&self, i: usize) -> &Cluster {
        &self.clusters[self.pole_clusters[i]]
    }

    pub fn is_null(&self, value_at_scatterer: f64) -> bool {
        value_at_scatterer.abs() < self.null_tolerance
    }

    fn tail(&self, z: f64) -> f64 {
        if !self.tail_correction {
            return 0.0;
        }
        let cutoff = self.basis.cutoff();
        -((cutoff - z) / (cutoff * cutoff + 1.0).sqrt()).ln() / (4.0 * PI)
    }

    fn tail_derivative(&self, z: f64) -> f64 {
        if !self.tail_correction {
            return 0.0;
        }
        1.0 / (4.0 * PI * (self.basis.cutoff() - z))
    }

    fn check(&self, z: f64) -> Result<()> {
        let cutoff = self.basis.cutoff();
        if z.is_nan() || z >= cutoff {
            return Err(SebaError::BeyondCutoff { z, cutoff });
        }
        let i = self.pole_values.partition_point(|&e| e < z);
        for &pole in self.pole_values[i.saturating_sub(1)..].iter().take(2) {
            if (z - pole).abs() < POLE_TOLERANCE * pole.abs().max(1.0) {
                return Err(SebaError::PoleProximity { z, pole });
            }
        }
        Ok(())
    }

    /// `F(z)`; fails near a pole or at and above the cutoff.
    pub fn eval(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.eval_unchecked(z))
    }

    /// `F'(z)`, strictly positive away from poles.
    pub fn derivative(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.derivative_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: f64) -> f64 {
        let resolvent: f64 = self
            .pole_values
            .iter()
            .zip(&self.pole_weights)
            .map(|(&e, &w)| w / (e - z))
            .sum();
        resolvent + self.renormalization + self.tail(z)
    }

    pub(crate) fn derivative_unchecked(&self, z: f64) -> f64 {
        let sum: f64 = self
            .pole_values
            .iter()
            .zip(&self.pole_weights)
            .map(|(&e, &w)| {
                let d = e - z;
                w / (d * d)
            })
            .sum();
        sum + self.tail_derivative(z)
    }

    /// Cluster holding `value`, if any.
    pub fn find_cluster(&self, value: f64) -> Option<&Cluster> {
        let i = self.clusters.partition_point(|c| c.value < value);
        self.clusters[i.saturating_sub(1)..]
            .iter()
            .take(2)
            .find(|c| degenerate(value, c.value))
    }

    /// Decides whether a Dirichlet eigenvalue stays in the spectrum.
    ///
    /// An eigenvalue survives iff some member vanishes at `x0` or it is
    /// degenerate; it keeps its full multiplicity when every member vanishes
    /// and loses one otherwise.
    pub fn classify_eigenvalue(&self, value: f64) -> Result<Classification> {
        let cluster = self
            .find_cluster(value)
            .ok_or(SebaError::NotAnEigenvalue { value })?;
        Ok(classify_cluster(cluster))
    }
}

pub fn classify_cluster(cluster: &Cluster) -> Classification {
    let mu = cluster.multiplicity();
    if mu == 1 && cluster.nulls == 0 {
        Classification::PerturbedPole
    } else {
        Classification::Unperturbed {
            multiplicity: cluster.retained_multiplicity(),
            pole: cluster.is_pole(),
        }
    }
}
