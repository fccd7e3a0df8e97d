use crate::special::{zeros_below, ZeroKind};

use super::{take_count, BoundaryCondition, CrossSection, ModeLabel, Spectrum, SpectrumError, TransverseMode};

/// Disk of radius `R`: Dirichlet modes `j_{nu,k}/R`, Neumann modes
/// `j'_{nu,k}/R` (constant mode excluded). Orders `nu >= 1` are doubly
/// degenerate.
pub fn circle_spectrum(radius: f64, n: usize, bc: BoundaryCondition) -> Result<Spectrum, SpectrumError> {
    let cs = CrossSection::Circle { radius };
    cs.validate()?;
    if n == 0 {
        return Err(SpectrumError::InvalidParameter("mode count must be at least 1".into()));
    }
    let kind = match bc {
        BoundaryCondition::Dirichlet => ZeroKind::FunctionZero,
        BoundaryCondition::Neumann => ZeroKind::DerivativeZero,
    };

    // Weyl estimate for the unit disk: N ~ x^2 / 4
    let mut cutoff = 2.0 * (n as f64).sqrt() + 6.0;
    let modes = loop {
        let mut found = Vec::new();
        let mut count = 0usize;
        // j_{nu,1} > nu and j'_{nu,1} > nu, so no order at or above the
        // cutoff contributes
        let mut nu = 0u32;
        while f64::from(nu) < cutoff {
            let g = if nu == 0 { 1 } else { 2 };
            for (k, z) in zeros_below(kind, nu, cutoff).into_iter().enumerate() {
                found.push(TransverseMode::from_lambda(
                    z / radius,
                    g,
                    bc,
                    ModeLabel::Circle {
                        order: nu,
                        root: k as u32 + 1,
                    },
                ));
                count += g as usize;
            }
            nu += 1;
        }
        if count >= n {
            found.sort_by(super::mode_order);
            break take_count(found, n);
        }
        cutoff *= 1.25;
    };
    Ok(Spectrum::from_modes(modes, cs, n, None))
}
