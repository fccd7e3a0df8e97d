//! Transverse Laplacian spectra of piston cross sections.
//!
//! A [`Spectrum`] is the ordered set of positive eigenvalues `lambda_p^2` of
//! `-nabla^2` on the cross section, for Dirichlet and/or Neumann boundary
//! conditions, with the constant Neumann mode removed. Modes carry their
//! multiplicity; truncation always keeps whole multiplets.

mod circle;
mod export;
pub mod raster;
mod rectangle;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circle::circle_spectrum;
pub use export::{spectrum_rows, write_spectrum_table, SpectrumDocument, SpectrumRow};
pub use raster::{raster_spectrum, Mask, RasterInfo, RasterOptions, RasterShape};
pub use rectangle::rectangle_spectrum;

/// Relative tolerance under which analytic eigenvalues count as coincident.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub const BOTH: [BoundaryCondition; 2] = [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            other => Err(SpectrumError::InvalidParameter(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}

/// Where a mode came from; also the final sort key among equal eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "lowercase")]
pub enum ModeLabel {
    /// Bessel order `nu` and root index `k` (1-based).
    Circle { order: u32, root: u32 },
    /// Quantum numbers of the first member of a (possibly merged) multiplet.
    Rectangle { p: u32, q: u32 },
    /// Position in the discrete spectrum (0-based, after zero-mode removal).
    Raster { index: u32 },
}

impl ModeLabel {
    fn sort_key(&self) -> (u32, u32) {
        match *self {
            ModeLabel::Circle { order, root } => (order, root),
            ModeLabel::Rectangle { p, q } => (p, q),
            ModeLabel::Raster { index } => (index, 0),
        }
    }
}

/// One eigenvalue of the transverse Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseMode {
    /// `lambda_p`, units of 1/length.
    pub lambda: f64,
    pub lambda_sq: f64,
    pub degeneracy: u32,
    pub bc: BoundaryCondition,
    pub label: ModeLabel,
    /// Richardson estimate of the discretisation error in `lambda_sq`
    /// (raster spectra only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl TransverseMode {
    pub fn new(lambda_sq: f64, degeneracy: u32, bc: BoundaryCondition, label: ModeLabel) -> Self {
        TransverseMode {
            lambda: lambda_sq.sqrt(),
            lambda_sq,
            degeneracy,
            bc,
            label,
            error_estimate: None,
        }
    }

    pub(crate) fn from_lambda(lambda: f64, degeneracy: u32, bc: BoundaryCondition, label: ModeLabel) -> Self {
        TransverseMode {
            lambda,
            lambda_sq: lambda * lambda,
            degeneracy,
            bc,
            label,
            error_estimate: None,
        }
    }
}

/// Ascending `lambda`, then Dirichlet before Neumann, then by label.
pub fn mode_order(a: &TransverseMode, b: &TransverseMode) -> Ordering {
    a.lambda
        .total_cmp(&b.lambda)
        .then(a.bc.cmp(&b.bc))
        .then(a.label.sort_key().cmp(&b.label.sort_key()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossSection {
    Circle { radius: f64 },
    Rectangle { a: f64, b: f64 },
    RasterMask { mask: Mask, h: f64 },
}

impl CrossSection {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SpectrumError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match self {
            CrossSection::Circle { radius } => positive("radius", *radius),
            CrossSection::Rectangle { a, b } => {
                positive("side a", *a)?;
                positive("side b", *b)
            }
            CrossSection::RasterMask { mask, h } => {
                positive("grid spacing h", *h)?;
                mask.validate_connected()
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            CrossSection::Circle { radius } => std::f64::consts::PI * radius * radius,
            CrossSection::Rectangle { a, b } => a * b,
            CrossSection::RasterMask { mask, h } => mask.count_inside() as f64 * h * h,
        }
    }

    /// Radius for circles, equal-area radius otherwise.
    pub fn scale_length(&self) -> f64 {
        match self {
            CrossSection::Circle { radius } => *radius,
            _ => (self.area() / std::f64::consts::PI).sqrt(),
        }
    }
}

/// Sorted transverse spectrum of a cross section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub modes: Vec<TransverseMode>,
    pub cross_section: CrossSection,
    /// Requested eigenfunction count per boundary-condition set.
    pub n_requested: usize,
    pub area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<RasterInfo>,
}

impl Spectrum {
    pub(crate) fn from_modes(
        mut modes: Vec<TransverseMode>,
        cross_section: CrossSection,
        n_requested: usize,
        raster: Option<RasterInfo>,
    ) -> Self {
        modes.sort_by(mode_order);
        let area = cross_section.area();
        Spectrum {
            modes,
            cross_section,
            n_requested,
            area,
            raster,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of eigenfunctions (modes weighted by degeneracy).
    pub fn count(&self) -> usize {
        self.modes.iter().map(|m| m.degeneracy as usize).sum()
    }

    pub fn count_bc(&self, bc: BoundaryCondition) -> usize {
        self.modes
            .iter()
            .filter(|m| m.bc == bc)
            .map(|m| m.degeneracy as usize)
            .sum()
    }

    pub fn bcs(&self) -> Vec<BoundaryCondition> {
        BoundaryCondition::BOTH
            .into_iter()
            .filter(|&bc| self.modes.iter().any(|m| m.bc == bc))
            .collect()
    }

    /// Smallest eigenvalue and its total multiplicity across both sets.
    pub fn lowest(&self) -> Option<(f64, u32)> {
        let first = self.modes.first()?;
        let g = self
            .modes
            .iter()
            .take_while(|m| (m.lambda - first.lambda).abs() <= DEGENERACY_TOL * first.lambda)
            .map(|m| m.degeneracy)
            .sum();
        Some((first.lambda, g))
    }

    /// Largest eigenvalue present for `bc`.
    pub fn max_lambda(&self, bc: BoundaryCondition) -> Option<f64> {
        self.modes.iter().rev().find(|m| m.bc == bc).map(|m| m.lambda)
    }

    /// Keep, per boundary-condition set, the smallest whole multiplets whose
    /// cumulative count reaches `n`.
    pub fn truncated_per_set(&self, n: usize) -> Spectrum {
        let mut counts = [0usize; 2];
        let modes = self
            .modes
            .iter()
            .filter(|m| {
                let c = &mut counts[m.bc as usize];
                if *c >= n {
                    false
                } else {
                    *c += m.degeneracy as usize;
                    true
                }
            })
            .cloned()
            .collect();
        Spectrum {
            modes,
            cross_section: self.cross_section.clone(),
            n_requested: n,
            area: self.area,
            raster: self.raster.clone(),
        }
    }
}

/// Keep the smallest whole multiplets whose cumulative count reaches `n`.
/// `modes` must already be sorted.
pub(crate) fn take_count(modes: Vec<TransverseMode>, n: usize) -> Vec<TransverseMode> {
    let mut count = 0usize;
    modes
        .into_iter()
        .take_while(|m| {
            let keep = count < n;
            count += m.degeneracy as usize;
            keep
        })
        .collect()
}

/// Dirichlet and Neumann sets of `cs`, `n_per_set` eigenfunctions each, merged
/// into one ascending spectrum.
pub fn combined_spectrum(cs: &CrossSection, n_per_set: usize) -> Result<Spectrum, SpectrumError> {
    spectrum_for(cs, n_per_set, &BoundaryCondition::BOTH)
}

/// Spectrum of `cs` restricted to the listed boundary-condition sets.
pub fn spectrum_for(
    cs: &CrossSection,
    n_per_set: usize,
    bcs: &[BoundaryCondition],
) -> Result<Spectrum, SpectrumError> {
    cs.validate()?;
    if n_per_set == 0 {
        return Err(SpectrumError::InvalidParameter("mode count must be at least 1".into()));
    }
    let mut modes = Vec::new();
    let mut raster_info = None;
    for &bc in bcs {
        let part = match cs {
            CrossSection::Circle { radius } => circle_spectrum(*radius, n_per_set, bc)?,
            CrossSection::Rectangle { a, b } => rectangle_spectrum(*a, *b, n_per_set, bc)?,
            CrossSection::RasterMask { mask, h } => raster_spectrum(
                &RasterShape::Mask(mask.clone()),
                *h,
                n_per_set,
                bc,
                &RasterOptions::default(),
            )?,
        };
        if let Some(info) = part.raster {
            raster_info = Some(match raster_info {
                None => info,
                Some(prev) => RasterInfo::merge(prev, info),
            });
        }
        modes.extend(part.modes);
    }
    Ok(Spectrum::from_modes(modes, cs.clone(), n_per_set, raster_info))
}

/// Largest relative deviation of the cumulative mode count from the leading
/// Weyl term `A lambda^2 / (4 pi)`, over the upper half of each set.
pub fn weyl_deviation(spec: &Spectrum) -> Result<f64, SpectrumError> {
    const MIN_MODES: usize = 100;
    let mut worst: f64 = 0.0;
    let bcs = spec.bcs();
    if bcs.is_empty() {
        return Err(SpectrumError::TooFewModes {
            needed: MIN_MODES,
            got: 0,
        });
    }
    for bc in bcs {
        let total = spec.count_bc(bc);
        if total < MIN_MODES {
            return Err(SpectrumError::TooFewModes {
                needed: MIN_MODES,
                got: total,
            });
        }
        let mut cumulative = 0usize;
        for m in spec.modes.iter().filter(|m| m.bc == bc) {
            cumulative += m.degeneracy as usize;
            if 2 * cumulative <= total {
                continue;
            }
            let weyl = spec.area * m.lambda_sq / (4.0 * std::f64::consts::PI);
            worst = worst.max((cumulative as f64 - weyl).abs() / weyl);
        }
    }
    Ok(worst)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("raster mask is empty")]
    EmptyMask,
    #[error("raster mask is not connected ({components} components)")]
    DisconnectedMask { components: usize },
    #[error("malformed mask: {0}")]
    MalformedMask(String),
    #[error("{requested} modes requested but the grid only resolves {limit} (10% of {points} points)")]
    TooManyModes {
        requested: usize,
        limit: usize,
        points: usize,
    },
    #[error("eigensolver did not converge after {iterations} block steps")]
    NonConvergent { iterations: usize },
    #[error("matrix is not positive definite at row {row}")]
    NotPositiveDefinite { row: usize },
    #[error("need at least {needed} modes per set, got {got}")]
    TooFewModes { needed: usize, got: usize },
}
