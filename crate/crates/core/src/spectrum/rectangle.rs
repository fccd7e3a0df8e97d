use std::f64::consts::PI;

use super::{take_count, BoundaryCondition, CrossSection, ModeLabel, Spectrum, SpectrumError, TransverseMode, DEGENERACY_TOL};

/// `a x b` rectangle: `lambda^2 = (p pi / a)^2 + (q pi / b)^2`, with
/// `p, q >= 1` (Dirichlet) or `p, q >= 0` and `(p, q) != (0, 0)` (Neumann).
/// Coincident eigenvalues are merged into one mode.
pub fn rectangle_spectrum(a: f64, b: f64, n: usize, bc: BoundaryCondition) -> Result<Spectrum, SpectrumError> {
    let cs = CrossSection::Rectangle { a, b };
    cs.validate()?;
    if n == 0 {
        return Err(SpectrumError::InvalidParameter("mode count must be at least 1".into()));
    }
    let min_index = match bc {
        BoundaryCondition::Dirichlet => 1u32,
        BoundaryCondition::Neumann => 0u32,
    };
    let kx = PI / a;
    let ky = PI / b;

    let mut cutoff_sq = 4.0 * PI * n as f64 / (a * b) * 1.5 + kx * kx + ky * ky;
    let modes = loop {
        let mut raw: Vec<(f64, u32, u32)> = Vec::new();
        let p_max = (cutoff_sq.sqrt() / kx).floor() as u32;
        for p in min_index..=p_max {
            let rem = cutoff_sq - (f64::from(p) * kx).powi(2);
            if rem < 0.0 {
                break;
            }
            let q_max = (rem.sqrt() / ky).floor() as u32;
            for q in min_index..=q_max {
                if p == 0 && q == 0 {
                    continue;
                }
                let l2 = (f64::from(p) * kx).powi(2) + (f64::from(q) * ky).powi(2);
                if l2 < cutoff_sq {
                    raw.push((l2, p, q));
                }
            }
        }
        if raw.len() >= n {
            raw.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
            let mut merged: Vec<TransverseMode> = Vec::new();
            for (l2, p, q) in raw {
                match merged.last_mut() {
                    Some(last) if (l2 - last.lambda_sq).abs() <= DEGENERACY_TOL * l2 => {
                        last.degeneracy += 1;
                    }
                    _ => merged.push(TransverseMode::new(l2, 1, bc, ModeLabel::Rectangle { p, q })),
                }
            }
            // a multiplet may straddle the cutoff only if it is the last one,
            // which lies above the n-th eigenfunction once raw.len() > n
            break take_count(merged, n);
        }
        cutoff_sq *= 1.5;
    };
    Ok(Spectrum::from_modes(modes, cs, n, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_examples() {
        let d = rectangle_spectrum(PI, PI, 1, BoundaryCondition::Dirichlet).unwrap();
        assert!((d.modes[0].lambda_sq - 2.0).abs() < 1e-12);
        assert_eq!(d.modes[0].degeneracy, 1);

        let n = rectangle_spectrum(PI, PI, 1, BoundaryCondition::Neumann).unwrap();
        assert!((n.modes[0].lambda_sq - 1.0).abs() < 1e-12);
        assert_eq!(n.modes[0].degeneracy, 2);

        let r = rectangle_spectrum(PI, 2.0 * PI, 1, BoundaryCondition::Neumann).unwrap();
        assert!((r.modes[0].lambda_sq - 0.25).abs() < 1e-12);
    }

    #[test]
    fn square_accidental_degeneracy() {
        // 1 + 49 = 25 + 25: (1,7), (7,1), (5,5) coincide on the pi x pi square
        let d = rectangle_spectrum(PI, PI, 60, BoundaryCondition::Dirichlet).unwrap();
        let m = d.modes.iter().find(|m| (m.lambda_sq - 50.0).abs() < 1e-9).unwrap();
        assert_eq!(m.degeneracy, 3);
    }

    #[test]
    fn matches_brute_force_enumeration() {
        let (a, b) = (1.0, 1.7);
        let s = rectangle_spectrum(a, b, 200, BoundaryCondition::Neumann).unwrap();
        let mut brute = Vec::new();
        for p in 0..200u32 {
            for q in 0..200u32 {
                if p + q > 0 {
                    brute.push((f64::from(p) * PI / a).powi(2) + (f64::from(q) * PI / b).powi(2));
                }
            }
        }
        brute.sort_by(f64::total_cmp);
        let expanded: Vec<f64> = s
            .modes
            .iter()
            .flat_map(|m| std::iter::repeat_n(m.lambda_sq, m.degeneracy as usize))
            .collect();
        for (x, y) in expanded.iter().zip(&brute) {
            assert!((x - y).abs() < 1e-9 * y);
        }
    }
}
