//! Dataset and result CSV files.

use std::io::{Read, Write};

use irnorm_core::Dataset;

use crate::error::{HarnessError, Result};
use crate::experiment::{NoiseLevel, RunResult, Summary};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const DATASET_HEADER: [&str; 3] = ["k", "r", "v"];
pub const RESULT_HEADER: [&str; 8] = [
    "system",
    "norm",
    "snr_db",
    "run",
    "real",
    "estimate",
    "percent_error",
    "seed",
];
pub const AUDIT_HEADER: [&str; 2] = ["estimator", "dataset_sha256"];
pub const SUMMARY_HEADER: [&str; 3] = ["norm", "estimator", "mpe"];

pub fn write_dataset<W: Write>(out: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DATASET_HEADER)?;
    for (k, (r, v)) in data.r().iter().zip(data.v()).enumerate() {
        w.write_record([k.to_string(), format_f64(*r), format_f64(*v)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a `k,r,v` file; the `k` column is informational.
pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| HarnessError::Parse {
            line: 1,
            message: format!("missing `{name}` column"),
        })
    };
    let (ri, vi) = (column("r")?, column("v")?);
    let mut r = Vec::new();
    let mut v = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize, name: &str| -> Result<f64> {
            let raw = record.get(i).ok_or_else(|| HarnessError::Parse {
                line,
                message: format!("missing `{name}` value"),
            })?;
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| HarnessError::Parse {
                    line,
                    message: format!("`{name}` is not a finite number: `{raw}`"),
                })
        };
        r.push(cell(ri, "r")?);
        v.push(cell(vi, "v")?);
    }
    Ok(Dataset::new(r, v)?)
}

fn result_fields(row: &RunResult) -> Vec<String> {
    let opt = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
    vec![
        row.system.map(|s| s.to_string()).unwrap_or_default(),
        row.norm.name().to_string(),
        match row.snr_db {
            Some(NoiseLevel::Snr(snr)) => format_f64(snr),
            Some(NoiseLevel::NoiseFree) => "inf".to_string(),
            None => String::new(),
        },
        row.run.to_string(),
        opt(row.real),
        format_f64(row.estimate),
        opt(row.percent_error),
        row.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

/// Result rows; `audit` appends the estimator and dataset digest columns.
pub fn write_results<W: Write>(out: W, rows: &[RunResult], audit: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = RESULT_HEADER.to_vec();
    if audit {
        header.extend(AUDIT_HEADER);
    }
    w.write_record(&header)?;
    for row in rows {
        let mut fields = result_fields(row);
        if audit {
            fields.push(row.estimator.name().to_string());
            fields.push(row.dataset_digest.clone());
        }
        w.write_record(&fields)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, summary: &[Summary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in summary {
        w.write_record([s.norm.name(), s.estimator.name(), &format_f64(s.mpe)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip_is_exact() {
        let data = Dataset::new(vec![1.0, -1.0, 0.1], vec![0.1 + 0.2, -1e-300, 12345.678901234567]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,r,v\n0,"));
        assert_eq!(read_dataset(buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn non_numeric_cell_names_line() {
        let text = "k,r,v\n0,1,0.5\n1,-1,abc\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(matches!(err, HarnessError::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn missing_column_rejected() {
        assert!(read_dataset("k,r\n0,1\n".as_bytes()).is_err());
        assert!(read_dataset("k,r,v\n".as_bytes()).is_err());
    }
}
