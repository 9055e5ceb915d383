//! Deterministic artifact emission and the one CSV reader the tool owns,
//! shared by profile ingestion and round-trip checks.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use micromaser::jcm::RabiProfile;
use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits: every f64 survives a write-parse round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Opens the output target; stdout when no path is given.
pub fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

/// Fixed CSV dialect: comma, `.` decimal point, LF, UTF-8, header row per
/// block. Flexible so blocks of different widths share one file.
pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

/// Reader for the same dialect; headers are handled by the caller since
/// multi-block files carry several header rows.
pub fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r)
}

/// Reads a coupling profile with named columns time_s and g_rad_per_s.
pub fn load_profile(path: &Path, length_m: f64, speed_m_s: f64) -> Result<RabiProfile, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv_reader(file);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| CliError::validation(format!("profile {} is empty", path.display())))?
        .map_err(|e| CliError::validation(format!("profile {}: {e}", path.display())))?;
    let column = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::validation(format!("profile {} lacks a {name} column", path.display()))
        })
    };
    let t_col = column("time_s")?;
    let g_col = column("g_rad_per_s")?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record =
            record.map_err(|e| CliError::validation(format!("profile {}: {e}", path.display())))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .ok_or_else(|| CliError::validation("profile row is missing a column"))?
                .parse::<f64>()
                .map_err(|e| CliError::validation(format!("profile value {:?}: {e}", &record[i])))
        };
        times.push(parse(t_col)?);
        values.push(parse(g_col)?);
    }
    Ok(RabiProfile::new(times, values, length_m, speed_m_s)?)
}

/// Pretty JSON plus a trailing newline; field order follows the struct,
/// so identical runs emit identical bytes.
pub fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::io(format!("cannot encode JSON: {e}")))?;
    w.write_all(b"\n")?;
    Ok(())
}
