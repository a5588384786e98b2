use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};

/// Counts of decisions per true class. Columns are decision subsets in
/// bitmask order and may include composite sets and Θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    frame: Frame,
    columns: Vec<Subset>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(frame: &Frame, columns: impl IntoIterator<Item = Subset>) -> Result<Self> {
        let mut columns: Vec<Subset> = columns
            .into_iter()
            .map(|c| frame.check(c))
            .collect::<Result<_>>()?;
        columns.sort_unstable();
        columns.dedup();
        Ok(ConfusionMatrix {
            frame: frame.clone(),
            counts: vec![vec![0; columns.len()]; frame.len()],
            columns,
        })
    }

    /// Builds a matrix from explicit counts, one row per class of `frame`.
    pub fn from_counts(frame: &Frame, columns: Vec<Subset>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let mut cm = ConfusionMatrix::new(frame, columns.iter().copied())?;
        if cm.columns.len() != columns.len() || counts.len() != frame.len() {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                actual: counts.len(),
            });
        }
        for (q, row) in counts.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::DimensionMismatch {
                    expected: columns.len(),
                    actual: row.len(),
                });
            }
            for (&col, &n) in columns.iter().zip(row) {
                let j = cm.column_index(col).expect("column registered");
                cm.counts[q][j] += n;
            }
        }
        Ok(cm)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn columns(&self) -> &[Subset] {
        &self.columns
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    fn column_index(&self, a: Subset) -> Option<usize> {
        self.columns.binary_search(&a).ok()
    }

    /// Adds one decision; a previously unseen subset gets its own column.
    pub fn record(&mut self, true_class: usize, decided: Subset) -> Result<()> {
        self.frame.check(decided)?;
        if true_class >= self.frame.len() {
            return Err(Error::InvalidParameter(format!("class index {true_class}")));
        }
        let j = match self.columns.binary_search(&decided) {
            Ok(j) => j,
            Err(j) => {
                self.columns.insert(j, decided);
                self.counts.iter_mut().for_each(|row| row.insert(j, 0));
                j
            }
        };
        self.counts[true_class][j] += 1;
        Ok(())
    }

    pub fn get(&self, true_class: usize, decided: Subset) -> u64 {
        self.column_index(decided)
            .map_or(0, |j| self.counts[true_class][j])
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.row_sums().iter().sum()
    }

    pub fn score(&self) -> Metrics {
        let full = self.frame.full();
        let ignorance_col = |a: Subset| a == full && self.frame.len() > 1;
        let (mut strict, mut good, mut ignorance) = (0u64, 0u64, 0u64);
        for (q, row) in self.counts.iter().enumerate() {
            for (&col, &n) in self.columns.iter().zip(row) {
                if col == Subset::singleton(q) {
                    strict += n;
                }
                if ignorance_col(col) {
                    ignorance += n;
                } else if col.contains(q) {
                    good += n;
                }
            }
        }
        let total = self.total();
        let rate = |n: u64| {
            if total == 0 {
                0.0
            } else {
                n as f64 / total as f64
            }
        };
        Metrics {
            total,
            strict_accuracy: rate(strict),
            good_rate: rate(good),
            ignorance_rate: rate(ignorance),
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| true \\ decided |");
        for &c in &self.columns {
            out.push_str(&format!(" {} |", self.frame.format_subset(c)));
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.columns.len()));
        out.push('\n');
        for (label, row) in self.frame.labels().iter().zip(&self.counts) {
            out.push_str(&format!("| {label} |"));
            for n in row {
                out.push_str(&format!(" {n} |"));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for ConfusionMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let columns: Vec<String> = self
            .columns
            .iter()
            .map(|&c| self.frame.format_subset(c))
            .collect();
        let mut s = serializer.serialize_struct("ConfusionMatrix", 3)?;
        s.serialize_field("classes", self.frame.labels())?;
        s.serialize_field("columns", &columns)?;
        s.serialize_field("counts", &self.counts)?;
        s.end()
    }
}

/// Rates of a confusion matrix.
///
/// `good_rate` counts a decision as good when it contains the true class
/// and is not Θ, so an imprecise but correct decision is rewarded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub total: u64,
    pub strict_accuracy: f64,
    pub good_rate: f64,
    pub ignorance_rate: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_grows_columns() {
        let frame = Frame::numbered(3).unwrap();
        let mut cm = ConfusionMatrix::new(&frame, frame.singletons()).unwrap();
        cm.record(0, Subset::singleton(0)).unwrap();
        cm.record(1, Subset::from_bits(0b110)).unwrap();
        cm.record(2, frame.full()).unwrap();
        cm.record(2, Subset::singleton(1)).unwrap();
        assert_eq!(cm.columns().len(), 5);
        assert_eq!(cm.row_sums(), [1, 1, 2]);
        assert_eq!(cm.get(1, Subset::from_bits(0b110)), 1);
        let m = cm.score();
        assert_eq!(m.total, 4);
        assert_eq!(m.strict_accuracy, 0.25);
        assert_eq!(m.good_rate, 0.5);
        assert_eq!(m.ignorance_rate, 0.25);
        assert!(cm.record(3, Subset::singleton(0)).is_err());
    }

    #[test]
    fn all_correct() {
        let frame = Frame::numbered(2).unwrap();
        let cm = ConfusionMatrix::from_counts(
            &frame,
            frame.singletons().collect(),
            vec![vec![5, 0], vec![0, 7]],
        )
        .unwrap();
        let m = cm.score();
        assert_eq!(
            (m.strict_accuracy, m.good_rate, m.ignorance_rate),
            (1.0, 1.0, 0.0)
        );
        assert!(cm.to_markdown().contains("| θ2 | 0 | 7 |"));
    }
}
