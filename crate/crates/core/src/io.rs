//! File formats: labeled datasets as CSV with header `x1,...,xk,y`, discrete
//! distributions as JSON `{"atoms": [[...]], "weights": [...]}`. Floats are
//! written with 17 significant digits.

use std::io::{Read, Write};

use crate::domain::{DiscreteDistribution, LabeledDataset};
use crate::error::{Error, Result};
use crate::nash_svm::PerturbedDataset;
use crate::portfolio::ExperimentRow;

/// `v` with 17 significant digits; parses back to the same double.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidInput(format!("line {line}: not a number: {s:?}")))
}

/// Reads `x1,...,xk,y` with labels in {-1, +1}; weights are uniform.
pub fn read_dataset_csv<R: Read>(reader: R) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let k = header.len().saturating_sub(1);
    if k == 0 || header.get(k) != Some("y") || (0..k).any(|i| header.get(i) != Some(format!("x{}", i + 1).as_str())) {
        return Err(Error::InvalidInput(format!("dataset header must be x1,...,xk,y, got {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != k + 1 {
            return Err(Error::InvalidInput(format!("line {line}: expected {} fields, got {}", k + 1, rec.len())));
        }
        let x = (0..k).map(|c| parse_f64(&rec[c], line)).collect::<Result<Vec<_>>>()?;
        let y = parse_f64(&rec[k], line)?;
        if y != 1.0 && y != -1.0 {
            return Err(Error::InvalidInput(format!("line {line}: label must be -1 or +1, got {y}")));
        }
        features.push(x);
        labels.push(y);
    }
    LabeledDataset::uniform(features, labels)
}

pub fn write_dataset_csv<W: Write>(data: &LabeledDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = data.feature_dim();
    let mut header: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (x, y) in data.features().iter().zip(data.labels()) {
        let mut row: Vec<String> = x.iter().map(|v| fmt17(*v)).collect();
        row.push(fmt17(*y));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `source,mass,x1,...,xk,y`.
pub fn write_perturbed_csv<W: Write>(q: &PerturbedDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = q.atoms.first().map_or(0, |a| a.features.len());
    let mut header = vec!["source".to_string(), "mass".to_string()];
    header.extend((1..=k).map(|i| format!("x{i}")));
    header.push("y".into());
    w.write_record(&header)?;
    for a in &q.atoms {
        let mut row = vec![a.source.to_string(), fmt17(a.mass)];
        row.extend(a.features.iter().map(|v| fmt17(*v)));
        row.push(fmt17(a.label));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Gross returns, one sample per row, with a header row of asset names.
pub fn read_returns_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let d = rdr.headers()?.len();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(Error::InvalidInput(format!("line {}: expected {d} fields, got {}", i + 2, rec.len())));
        }
        rows.push(rec.iter().map(|f| parse_f64(f, i + 2)).collect::<Result<Vec<_>>>()?);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("no return samples".into()));
    }
    Ok(rows)
}

pub fn read_distribution_json<R: Read>(reader: R) -> Result<DiscreteDistribution> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn write_distribution_json<W: Write>(dist: &DiscreteDistribution, out: W) -> Result<()> {
    serde_json::to_writer(out, dist)?;
    Ok(())
}

/// Columns `trial,eps,out_of_sample_loss,mean_return,sharpe`.
pub fn write_experiment_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "eps", "out_of_sample_loss", "mean_return", "sharpe"])?;
    for r in rows {
        w.write_record([r.trial.to_string(), fmt17(r.eps), fmt17(r.out_of_sample_loss), fmt17(r.mean_return), fmt17(r.sharpe)])?;
    }
    w.flush()?;
    Ok(())
}
