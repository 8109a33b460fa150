use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense row-major training data with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMatrix {
    width: usize,
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl TrainingMatrix {
    pub fn new(width: usize) -> Self {
        TrainingMatrix {
            width,
            values: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_rows(width: usize, rows: &[Vec<f64>], labels: &[bool]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch(rows.len(), labels.len()));
        }
        let mut m = TrainingMatrix::new(width);
        for (row, &label) in rows.iter().zip(labels) {
            m.push(row, label)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: &[f64], label: bool) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("training row"));
        }
        self.values.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.width + j]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let p = self.positives();
        p > 0 && p < self.len()
    }

    /// The rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> TrainingMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.width);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        TrainingMatrix {
            width: self.width,
            values,
            labels,
        }
    }
}
