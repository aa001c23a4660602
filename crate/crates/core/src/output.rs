//! CSV artifacts. Floats carry 17 significant digits; lines end in LF.

use std::io;
use std::path::Path;

use crate::energy::EnergyRecord;
use crate::integrate::Trajectory;

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> io::Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(into_io)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// `t, xi_i..., dxi_i..., ddxi_i...`.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> io::Result<()> {
    let n = traj.modes();
    let mut header = vec!["t".to_string()];
    for prefix in ["xi", "dxi", "ddxi"] {
        header.extend((0..n).map(|i| format!("{prefix}_{i}")));
    }
    let mut w = writer(path)?;
    w.write_record(&header).map_err(into_io)?;
    for m in 0..traj.len() {
        let mut row = vec![fmt_float(traj.times[m])];
        for series in [&traj.xi, &traj.dxi, &traj.ddxi] {
            row.extend(series[m].iter().map(|v| fmt_float(*v)));
        }
        w.write_record(&row).map_err(into_io)?;
    }
    w.flush()
}

/// Energy record columns plus any extra named per-step series.
pub fn write_energy(path: &Path, rec: &EnergyRecord, extra: &[(&str, &[f64])]) -> io::Result<()> {
    let mut cols = rec.columns();
    cols.extend_from_slice(extra);
    let mut w = writer(path)?;
    let header: Vec<&str> = std::iter::once("t").chain(cols.iter().map(|c| c.0)).collect();
    w.write_record(&header).map_err(into_io)?;
    for (m, t) in rec.times.iter().enumerate() {
        let row: Vec<String> = std::iter::once(*t)
            .chain(cols.iter().map(|c| c.1[m]))
            .map(fmt_float)
            .collect();
        w.write_record(&row).map_err(into_io)?;
    }
    w.flush()
}

/// Generic table of pre-formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(into_io)?;
    for row in rows {
        w.write_record(row).map_err(into_io)?;
    }
    w.flush()
}

/// Two-column `key,value` report.
pub fn write_report(path: &Path, entries: &[(String, String)]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = entries.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
    write_table(path, &["key", "value"], &rows)
}
