//! Feature-matrix CSV.
//!
//! Header `thread_id,<feature columns...>,label`; one row per thread. Values
//! are written in Rust's shortest round-trip notation, so reading a matrix
//! back reproduces every value bit for bit.

use std::path::Path;

use threadcred_core::features::{feature_names, FeatureVector};
use threadcred_core::select::Dataset;
use threadcred_core::Label;

use crate::error::{IoError, IoResult};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl MatrixFile {
    pub fn from_features(vectors: &[FeatureVector]) -> Self {
        MatrixFile {
            columns: feature_names().map(String::from).collect(),
            ids: vectors.iter().map(|v| v.thread_id.clone()).collect(),
            rows: vectors.iter().map(|v| v.values.to_vec()).collect(),
            labels: vectors.iter().map(|v| v.label).collect(),
        }
    }

    /// Labeled rows as a dataset, plus the number of unlabeled rows dropped.
    pub fn to_dataset(&self, name: &str) -> IoResult<(Dataset, usize)> {
        let keep: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.labels[i] != Label::Unlabeled)
            .collect();
        let ds = Dataset::new(
            name,
            self.columns.clone(),
            keep.iter().map(|&i| self.ids[i].clone()).collect(),
            &keep.iter().map(|&i| self.rows[i].clone()).collect::<Vec<_>>(),
            keep.iter().map(|&i| self.labels[i] == Label::Accurate).collect(),
        )?;
        Ok((ds, self.rows.len() - keep.len()))
    }

    pub fn from_dataset(ds: &Dataset) -> Self {
        MatrixFile {
            columns: ds.columns().to_vec(),
            ids: ds.ids().to_vec(),
            rows: (0..ds.len()).map(|i| ds.row(i).to_vec()).collect(),
            labels: ds
                .labels()
                .iter()
                .map(|&y| if y { Label::Accurate } else { Label::Inaccurate })
                .collect(),
        }
    }
}

pub fn format_value(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_matrix(path: &Path, m: &MatrixFile) -> IoResult<()> {
    let err = |e: csv::Error| IoError::format(path, e.to_string());
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let mut header = vec!["thread_id".to_string()];
    header.extend(m.columns.iter().cloned());
    header.push("label".into());
    w.write_record(&header).map_err(err)?;
    for ((id, row), label) in m.ids.iter().zip(&m.rows).zip(&m.labels) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|&x| format_value(x)));
        rec.push(label.as_str().into());
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_matrix(path: &Path) -> IoResult<MatrixFile> {
    let mut r = csv::Reader::from_path(path).map_err(|e| IoError::format(path, e.to_string()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| IoError::format(path, e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header.len() < 3 || header[0] != "thread_id" || header[header.len() - 1] != "label" {
        return Err(IoError::format(path, "header must be thread_id,<features...>,label"));
    }
    let columns = header[1..header.len() - 1].to_vec();
    let mut m = MatrixFile {
        columns,
        ids: Vec::new(),
        rows: Vec::new(),
        labels: Vec::new(),
    };
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| IoError::line(path, line, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(IoError::line(
                path,
                line,
                format!("expected {} fields, got {}", header.len(), rec.len()),
            ));
        }
        let row = (1..rec.len() - 1)
            .map(|j| {
                rec[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| IoError::line(path, line, format!("column {}: {e}", header[j])))
            })
            .collect::<IoResult<Vec<f64>>>()?;
        let label: Label = rec[rec.len() - 1]
            .trim()
            .parse()
            .map_err(|e: threadcred_core::Error| IoError::line(path, line, e.to_string()))?;
        m.ids.push(rec[0].to_string());
        m.rows.push(row);
        m.labels.push(label);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn values_round_trip_exactly(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 1..10)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.csv");
            let m = MatrixFile {
                columns: vec!["a".into(), "b".into(), "c".into()],
                ids: (0..rows.len()).map(|i| format!("t{i}")).collect(),
                labels: (0..rows.len()).map(|i| if i % 2 == 0 { Label::Accurate } else { Label::Unlabeled }).collect(),
                rows,
            };
            write_matrix(&path, &m).unwrap();
            let back = read_matrix(&path).unwrap();
            prop_assert_eq!(back.rows.len(), m.rows.len());
            for (a, b) in back.rows.iter().flatten().zip(m.rows.iter().flatten()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(&back, &m);
            let (ds, dropped) = back.to_dataset("x").unwrap();
            prop_assert_eq!(ds.len() + dropped, m.rows.len());
        }
    }

    #[test]
    fn bad_header_and_label() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "id,a,label\nx,1,accurate\n").unwrap();
        assert!(read_matrix(&p).is_err());
        std::fs::write(&p, "thread_id,a,label\nx,1,maybe\n").unwrap();
        let e = read_matrix(&p).unwrap_err().to_string();
        assert!(e.contains(":2:") && e.contains("unknown label"), "{e}");
    }
}
