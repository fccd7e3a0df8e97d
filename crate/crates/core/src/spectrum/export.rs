use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{BoundaryCondition, CrossSection, ModeLabel, RasterInfo, Spectrum};

/// One eigenfunction of a spectrum table. A mode of multiplicity `g` yields
/// `g` rows, each carrying `degeneracy = g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub lambda: f64,
    pub lambda_sq: f64,
    pub degeneracy: u32,
    pub bc: BoundaryCondition,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

/// Structured export with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub cross_section: CrossSection,
    pub n_per_set: usize,
    pub area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<RasterInfo>,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumDocument {
    pub fn new(spec: &Spectrum) -> Self {
        SpectrumDocument {
            cross_section: spec.cross_section.clone(),
            n_per_set: spec.n_requested,
            area: spec.area,
            h: spec.raster.as_ref().map(|r| r.h),
            raster: spec.raster.clone(),
            rows: spectrum_rows(spec),
        }
    }
}

fn label_text(label: &ModeLabel) -> String {
    match *label {
        ModeLabel::Circle { order, root } => format!("nu={order};k={root}"),
        ModeLabel::Rectangle { p, q } => format!("p={p};q={q}"),
        ModeLabel::Raster { index } => format!("i={index}"),
    }
}

/// The first `n_requested` eigenfunctions of each boundary-condition set, in
/// spectrum order.
pub fn spectrum_rows(spec: &Spectrum) -> Vec<SpectrumRow> {
    let mut emitted = [0usize; 2];
    let mut rows = Vec::new();
    for m in &spec.modes {
        let slot = &mut emitted[m.bc as usize];
        for _ in 0..m.degeneracy {
            if *slot >= spec.n_requested {
                break;
            }
            *slot += 1;
            rows.push(SpectrumRow {
                lambda: m.lambda,
                lambda_sq: m.lambda_sq,
                degeneracy: m.degeneracy,
                bc: m.bc,
                label: label_text(&m.label),
                error_estimate: m.error_estimate,
            });
        }
    }
    rows
}

/// Whitespace-separated table: `lambda lambda_sq degeneracy bc`, shortest
/// round-trip floats.
pub fn write_spectrum_table<W: Write>(mut w: W, spec: &Spectrum) -> io::Result<()> {
    writeln!(w, "lambda lambda_sq degeneracy bc")?;
    for r in spectrum_rows(spec) {
        writeln!(w, "{:?} {:?} {} {}", r.lambda, r.lambda_sq, r.degeneracy, r.bc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::combined_spectrum;
    use super::*;

    #[test]
    fn ten_per_set_gives_twenty_rows() {
        let s = combined_spectrum(&CrossSection::Circle { radius: 1.0 }, 10).unwrap();
        let rows = spectrum_rows(&s);
        assert_eq!(rows.len(), 20);
        assert_eq!(rows.iter().filter(|r| r.bc == BoundaryCondition::Dirichlet).count(), 10);
        assert!(rows.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn table_roundtrips_floats() {
        let s = combined_spectrum(&CrossSection::Rectangle { a: 1.0, b: 2.0 }, 5).unwrap();
        let mut buf = Vec::new();
        write_spectrum_table(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = spectrum_rows(&s);
        for (line, row) in text.lines().skip(1).zip(&rows) {
            let lam: f64 = line.split_whitespace().next().unwrap().parse().unwrap();
            assert_eq!(lam.to_bits(), row.lambda.to_bits());
        }
        assert_eq!(text.lines().count(), rows.len() + 1);
    }

    #[test]
    fn document_json_roundtrip() {
        let s = combined_spectrum(&CrossSection::Circle { radius: 2.0 }, 3).unwrap();
        let doc = SpectrumDocument::new(&s);
        let json = serde_json::to_string(&doc).unwrap();
        let back: SpectrumDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
