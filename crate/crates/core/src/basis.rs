//! Dirichlet eigensystem of a unit-area rectangle.
//!
//! The rectangle is `[0, a] x [0, b]` with `a = sqrt(E)` and `b = 1/sqrt(E)`,
//! where `E` is the eccentricity. Modes are the products of sines
//! `phi_{j,k}(x, y) = 2/sqrt(ab) * sin(j pi x / a) * sin(k pi y / b)` with
//! eigenvalue `pi^2 (j^2/a^2 + k^2/b^2)`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Result, SebaError};

/// Hard upper bound on the number of modes a basis may hold.
pub const MAX_BASIS_MODES: usize = 5_000_000;

/// Relative tolerance below which two eigenvalues count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// `true` when two eigenvalues are equal up to [`DEGENERACY_TOLERANCE`].
pub fn degenerate(e1: f64, e2: f64) -> bool {
    (e1 - e2).abs() < DEGENERACY_TOLERANCE * e2.abs().max(1.0)
}

/// Unit-area rectangle with a marked interior point (the scatterer location).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectGeometry {
    eccentricity: f64,
    a: f64,
    b: f64,
    x0: f64,
    y0: f64,
}

impl RectGeometry {
    /// Builds the geometry from the eccentricity and absolute scatterer coordinates.
    pub fn new(eccentricity: f64, x0: f64, y0: f64) -> Result<Self> {
        if !(eccentricity.is_finite() && eccentricity > 0.0) {
            return Err(SebaError::InvalidGeometry(format!(
                "eccentricity must be finite and positive, got {eccentricity}"
            )));
        }
        let a = eccentricity.sqrt();
        let b = 1.0 / a;
        if !(x0 > 0.0 && x0 < a) {
            return Err(SebaError::InvalidGeometry(format!(
                "x0 = {x0} must lie strictly inside (0, {a})"
            )));
        }
        if !(y0 > 0.0 && y0 < b) {
            return Err(SebaError::InvalidGeometry(format!(
                "y0 = {y0} must lie strictly inside (0, {b})"
            )));
        }
        Ok(Self {
            eccentricity,
            a,
            b,
            x0,
            y0,
        })
    }

    /// Builds the geometry with the scatterer at `(x0_ratio * a, y0_ratio * b)`.
    pub fn with_ratios(eccentricity: f64, x0_ratio: f64, y0_ratio: f64) -> Result<Self> {
        if !(eccentricity.is_finite() && eccentricity > 0.0) {
            return Err(SebaError::InvalidGeometry(format!(
                "eccentricity must be finite and positive, got {eccentricity}"
            )));
        }
        let a = eccentricity.sqrt();
        Self::new(eccentricity, x0_ratio * a, y0_ratio / a)
    }

    pub fn eccentricity(&self) -> f64 {
        self.eccentricity
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// `2/sqrt(ab)`, the sup-norm of every normalized mode.
    pub fn amplitude_scale(&self) -> f64 {
        2.0 / (self.a * self.b).sqrt()
    }

    pub fn eigenvalue(&self, j: u32, k: u32) -> f64 {
        let (j, k) = (f64::from(j), f64::from(k));
        PI * PI * (j * j / (self.a * self.a) + k * k / (self.b * self.b))
    }

    /// Same rectangle, scatterer moved to `(x0, y0)`.
    pub fn moved_to(&self, x0: f64, y0: f64) -> Result<Self> {
        Self::new(self.eccentricity, x0, y0)
    }
}

/// One Dirichlet mode `(j, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisMode {
    pub j: u32,
    pub k: u32,
    pub eigenvalue: f64,
    pub value_at_scatterer: f64,
}

impl BasisMode {
    fn new(geometry: &RectGeometry, j: u32, k: u32) -> Self {
        let value_at_scatterer = sine_product(geometry, j, k, geometry.x0, geometry.y0);
        Self {
            j,
            k,
            eigenvalue: geometry.eigenvalue(j, k),
            value_at_scatterer,
        }
    }
}

fn sine_product(geometry: &RectGeometry, j: u32, k: u32, x: f64, y: f64) -> f64 {
    geometry.amplitude_scale()
        * (f64::from(j) * PI * x / geometry.a).sin()
        * (f64::from(k) * PI * y / geometry.b).sin()
}

/// All Dirichlet modes with eigenvalue at or below a cutoff, sorted ascending.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    geometry: RectGeometry,
    cutoff: f64,
    modes: Vec<BasisMode>,
}

impl SpectralBasis {
    pub fn geometry(&self) -> &RectGeometry {
        &self.geometry
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn modes(&self) -> &[BasisMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest `j` and `k` admitted by the cutoff.
    pub fn index_bounds(&self) -> (u32, u32) {
        index_bounds(&self.geometry, self.cutoff)
    }
}

fn index_bounds(geometry: &RectGeometry, cutoff: f64) -> (u32, u32) {
    let root = cutoff.sqrt() / PI;
    ((geometry.a * root).floor() as u32, (geometry.b * root).floor() as u32)
}

fn mode_order(lhs: &BasisMode, rhs: &BasisMode) -> Ordering {
    lhs.eigenvalue
        .total_cmp(&rhs.eigenvalue)
        .then(lhs.j.cmp(&rhs.j))
        .then(lhs.k.cmp(&rhs.k))
}

/// Weyl estimate plus a perimeter allowance: an upper bound on the number of
/// modes at or below `cutoff`, available before enumerating them.
pub fn mode_count_bound(geometry: &RectGeometry, cutoff: f64) -> f64 {
    let perimeter = 2.0 * (geometry.a + geometry.b);
    weyl_count_estimate(cutoff) + perimeter * cutoff.sqrt() / (4.0 * PI)
}

/// Enumerates every mode with eigenvalue `<= cutoff`.
pub fn build_basis(geometry: RectGeometry, cutoff: f64) -> Result<SpectralBasis> {
    let ground = geometry.eigenvalue(1, 1);
    if !(cutoff.is_finite() && cutoff >= ground) {
        return Err(SebaError::EmptyBasis { cutoff, ground });
    }
    let estimate = mode_count_bound(&geometry, cutoff);
    if estimate > 2.0 * MAX_BASIS_MODES as f64 {
        return Err(SebaError::BasisOverflow {
            limit: MAX_BASIS_MODES,
        });
    }

    let (j_max, k_max) = index_bounds(&geometry, cutoff);
    let mut modes = Vec::with_capacity(estimate.ceil() as usize);
    for j in 1..=j_max {
        for k in 1..=k_max {
            let eigenvalue = geometry.eigenvalue(j, k);
            if eigenvalue > cutoff {
                break;
            }
            if modes.len() == MAX_BASIS_MODES {
                return Err(SebaError::BasisOverflow {
                    limit: MAX_BASIS_MODES,
                });
            }
            modes.push(BasisMode::new(&geometry, j, k));
        }
    }
    modes.sort_by(mode_order);
    Ok(SpectralBasis {
        geometry,
        cutoff,
        modes,
    })
}

/// Value of a normalized mode at `(x, y)` in the closed rectangle.
pub fn eigenfunction_value(mode: &BasisMode, geometry: &RectGeometry, x: f64, y: f64) -> Result<f64> {
    let (a, b) = (geometry.a, geometry.b);
    if !(0.0..=a).contains(&x) || !(0.0..=b).contains(&y) {
        return Err(SebaError::OutsideDomain { x, y, a, b });
    }
    if x == 0.0 || x == a || y == 0.0 || y == b {
        return Ok(0.0);
    }
    Ok(sine_product(geometry, mode.j, mode.k, x, y))
}

/// Leading Weyl term `Lambda / 4 pi` of the counting function for unit area.
pub fn weyl_count_estimate(cutoff: f64) -> f64 {
    cutoff / (4.0 * PI)
}
