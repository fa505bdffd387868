//! CSV and PGM writers.
//!
//! Reals are written in scientific notation with 17 significant digits, which
//! round-trips every `f64`.

use std::io::{self, Write};

use crate::field::Field2;
use crate::localization::LocalizationRecord;
use crate::spectrum::ScattererSpectrum;
use crate::sweep::{AmplitudeSample, SweepResult};

pub const SPECTRUM_HEADER: &str = "n,z,kind,E_below,E_above";
pub const TABLE_HEADER: &str = "n,z,kind,R1,A,localized";
pub const ALPHA_SWEEP_HEADER: &str = "alpha,localized_count";
pub const ECCENTRICITY_SWEEP_HEADER: &str = "E,best_alpha,localized_count";
pub const AMPLITUDE_HEADER: &str = "alpha,n,A";

pub fn format_real(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn write_spectrum<W: Write>(out: &mut W, spectrum: &ScattererSpectrum) -> io::Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for mode in &spectrum.modes {
        writeln!(
            out,
            "{},{},{},{},{}",
            mode.n,
            format_real(mode.z),
            mode.kind,
            format_real(mode.bracket.0),
            format_real(mode.bracket.1)
        )?;
    }
    Ok(())
}

pub fn write_table<W: Write>(out: &mut W, records: &[LocalizationRecord]) -> io::Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            format_real(r.z),
            r.kind,
            format_real(r.r1),
            format_real(r.amplitude),
            r.localized
        )?;
    }
    Ok(())
}

/// One CSV row per grid row, `nx` values each, no header.
pub fn write_field<W: Write>(out: &mut W, field: &Field2) -> io::Result<()> {
    for row in field.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_real(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Binary graymap (`P5`, maxval 255), values scaled linearly by the field
/// maximum. Rows follow the field's row order.
pub fn write_pgm<W: Write>(out: &mut W, field: &Field2) -> io::Result<()> {
    write!(out, "P5\n{} {}\n255\n", field.nx, field.ny)?;
    let max = field.max();
    let pixels: Vec<u8> = field
        .values
        .iter()
        .map(|&v| {
            if max > 0.0 {
                (255.0 * (v / max).clamp(0.0, 1.0)).round() as u8
            } else {
                0
            }
        })
        .collect();
    out.write_all(&pixels)
}

pub fn write_alpha_sweep<W: Write>(out: &mut W, sweep: &SweepResult) -> io::Result<()> {
    writeln!(out, "{ALPHA_SWEEP_HEADER}")?;
    let mut rows: Vec<(f64, usize)> = sweep
        .axis
        .iter()
        .copied()
        .zip(sweep.localized_counts.iter().copied())
        .collect();
    rows.sort_by(|l, r| l.0.total_cmp(&r.0));
    for (alpha, count) in rows {
        writeln!(out, "{},{}", format_real(alpha), count)?;
    }
    Ok(())
}

pub fn write_eccentricity_sweep<W: Write>(out: &mut W, sweep: &SweepResult) -> io::Result<()> {
    writeln!(out, "{ECCENTRICITY_SWEEP_HEADER}")?;
    let mut rows: Vec<(f64, f64, usize)> = (0..sweep.axis.len())
        .map(|i| (sweep.axis[i], sweep.best_alphas[i], sweep.localized_counts[i]))
        .collect();
    rows.sort_by(|l, r| l.0.total_cmp(&r.0));
    for (e, alpha, count) in rows {
        writeln!(out, "{},{},{}", format_real(e), format_real(alpha), count)?;
    }
    Ok(())
}

pub fn write_amplitude_curve<W: Write>(out: &mut W, samples: &[AmplitudeSample]) -> io::Result<()> {
    writeln!(out, "{AMPLITUDE_HEADER}")?;
    let mut rows = samples.to_vec();
    rows.sort_by(|l, r| l.alpha.total_cmp(&r.alpha).then(l.n.cmp(&r.n)));
    for s in rows {
        writeln!(out, "{},{},{}", format_real(s.alpha), s.n, format_real(s.amplitude))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format_round_trips() {
        for v in [0.0, -1.0, 1.0 / 3.0, 12345.678901234567, -1.29e4, 5e-300] {
            let text = format_real(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
        assert_eq!(format_real(2.0), "2.0000000000000000e0");
        assert_eq!(format_real(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn pgm_header_and_scaling() {
        let field = Field2 {
            nx: 3,
            ny: 2,
            values: vec![0.0, 1.0, 2.0, 4.0, 0.5, 0.0],
        };
        let mut bytes = Vec::new();
        write_pgm(&mut bytes, &field).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 64, 128, 255, 32, 0]);
    }
}
