//! Per-iteration trace rows and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::schemes::SolverTrace;

/// One row per iteration `k = 0..=K`. `cum_samples` counts oracle draws spent
/// to produce `z^k` (the warm-up draw is reported separately), so the last
/// row holds the run's total.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub mean_dist_sq: f64,
    pub bound: Option<f64>,
    pub cum_samples: u64,
    pub cum_evaluations: u64,
    /// `E[V_k]`; absent at `k = K` and for methods without a potential.
    pub mean_potential: Option<f64>,
    /// `d_k` of each replication, when requested.
    pub replications: Vec<f64>,
}

impl TraceRow {
    pub fn from_trace(
        trace: &SolverTrace,
        bound: Option<&[f64]>,
        per_replication: bool,
    ) -> Result<Vec<TraceRow>> {
        let means = trace
            .mean_distances
            .as_ref()
            .ok_or_else(|| Error::invalid("trace has no reference distances"))?;
        let samples = trace.cumulative_samples();
        let evals = trace.cumulative_evaluations();
        Ok((0..means.len())
            .map(|k| TraceRow {
                k,
                mean_dist_sq: means[k],
                bound: bound.map(|b| b[k]),
                cum_samples: samples[k],
                cum_evaluations: evals[k],
                mean_potential: trace.mean_potentials.as_ref().and_then(|v| v.get(k).copied()),
                replications: if per_replication {
                    trace
                        .replications
                        .iter()
                        .map(|r| r.distances.as_ref().map_or(f64::NAN, |d| d[k]))
                        .collect()
                } else {
                    Vec::new()
                },
            })
            .collect())
    }
}

const FIXED_COLUMNS: [&str; 6] = [
    "k",
    "mean_dist_sq",
    "bound",
    "cum_samples",
    "cum_evaluations",
    "mean_potential",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes a header and one LF-terminated line per row. Floats use Rust's
/// shortest round-trip formatting; missing values are empty fields.
pub fn write_csv<W: Write>(rows: &[TraceRow], writer: W) -> Result<()> {
    let first = rows.first().ok_or_else(|| Error::invalid("cannot export an empty trace"))?;
    let reps = first.replications.len();
    if rows.iter().any(|r| r.replications.len() != reps) {
        return Err(Error::invalid("rows disagree on the number of replications"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..reps).map(|r| format!("d_rep{r}")));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            row.k.to_string(),
            row.mean_dist_sq.to_string(),
            opt(row.bound),
            row.cum_samples.to_string(),
            row.cum_evaluations.to_string(),
            opt(row.mean_potential),
        ];
        rec.extend(row.replications.iter().map(|d| d.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {line}: bad value in column {}", i + 1)))
}

fn opt_field(rec: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(rec, i, line).map(Some),
    }
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(reader);
    let header = r.headers()?.clone();
    if header.len() < FIXED_COLUMNS.len()
        || header.iter().zip(FIXED_COLUMNS).any(|(a, b)| a != b)
    {
        return Err(Error::Parse("unexpected trace header".into()));
    }
    let reps = header.len() - FIXED_COLUMNS.len();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(TraceRow {
            k: field(&rec, 0, line)?,
            mean_dist_sq: field(&rec, 1, line)?,
            bound: opt_field(&rec, 2, line)?,
            cum_samples: field(&rec, 3, line)?,
            cum_evaluations: field(&rec, 4, line)?,
            mean_potential: opt_field(&rec, 5, line)?,
            replications: (0..reps)
                .map(|j| field(&rec, FIXED_COLUMNS.len() + j, line))
                .collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

pub fn parse_csv(path: &Path) -> Result<Vec<TraceRow>> {
    read_csv(std::fs::File::open(path)?)
}

/// `k,wall_seconds`: kept apart from the trace so the trace stays
/// byte-for-byte reproducible.
pub fn write_timings<W: Write>(wall: &[f64], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(["k", "wall_seconds"])?;
    for (k, t) in wall.iter().enumerate() {
        w.write_record([k.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize) -> TraceRow {
        TraceRow {
            k,
            mean_dist_sq: 0.1 / (k as f64 + 3.0),
            bound: (k % 2 == 0).then_some(1e-300 * k as f64),
            cum_samples: 3 * k as u64,
            cum_evaluations: 9 * k as u64,
            mean_potential: None,
            replications: vec![1.0 / 3.0, f64::MIN_POSITIVE],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows: Vec<TraceRow> = (0..5).map(row).collect();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,mean_dist_sq,bound,cum_samples,cum_evaluations,mean_potential,d_rep0,d_rep1\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn empty_trace_is_rejected() {
        assert!(write_csv(&[], Vec::new()).is_err());
    }
}
