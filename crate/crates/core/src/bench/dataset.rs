use std::fs::File;
use std::io::Read;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Column layout of a headerless CSV file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    /// Zero-based label column; the last column when `None`.
    pub label_col: Option<usize>,
    /// Zero-based feature columns; every other column when `None`.
    pub feature_cols: Option<Vec<usize>>,
}

/// Numeric features with class labels.
///
/// Class names are sorted, so class indices do not depend on row order.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::new(self.class_names.iter().cloned())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in the given order, sharing the class list.
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            name: self.name.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&name, &text, schema)
}

/// Parses headerless CSV text. Row and column numbers in errors are
/// one-based.
pub fn parse_csv(name: &str, text: &str, schema: &CsvSchema) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::ParseError {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        let width = record.len();
        let label_col = schema.label_col.unwrap_or(width.saturating_sub(1));
        let feature_cols: Vec<usize> = match &schema.feature_cols {
            Some(cols) => cols.clone(),
            None => (0..width).filter(|&c| c != label_col).collect(),
        };
        let cell = |c: usize| {
            record
                .get(c)
                .filter(|v| !v.is_empty() && *v != "?")
                .ok_or_else(|| Error::ParseError {
                    row,
                    column: c + 1,
                    message: "missing value".into(),
                })
        };
        let label = cell(label_col)?.to_string();
        let values = feature_cols
            .iter()
            .map(|&c| {
                let text = cell(c)?;
                text.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::ParseError {
                        row,
                        column: c + 1,
                        message: format!("`{text}` is not a number"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        features.push(values);
        raw_labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut class_names = raw_labels.clone();
    class_names.sort();
    class_names.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| class_names.binary_search(l).expect("label collected above"))
        .collect();
    Ok(LabeledDataset {
        name: name.to_string(),
        features,
        labels,
        class_names,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestSize {
    Count(usize),
    Fraction(f64),
}

impl TestSize {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let count = match self {
            TestSize::Count(c) => c,
            TestSize::Fraction(f) if f > 0.0 && f < 1.0 => (n as f64 * f).round() as usize,
            TestSize::Fraction(f) => {
                return Err(Error::SizeInvalid(format!(
                    "test fraction {f} outside (0, 1)"
                )))
            }
        };
        if count == 0 || count >= n {
            return Err(Error::SizeInvalid(format!(
                "test size {count} with {n} rows"
            )));
        }
        Ok(count)
    }
}

/// Uniform random train/test partition (not stratified). Both parts keep the
/// original row order.
pub fn split(
    dataset: &LabeledDataset,
    test_size: TestSize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let n = dataset.len();
    let test_count = test_size.resolve(n)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut test_idx = index::sample(&mut rng, n, test_count).into_vec();
    test_idx.sort_unstable();
    let mut in_test = vec![false; n];
    test_idx.iter().for_each(|&i| in_test[i] = true);
    let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
    Ok((dataset.select(&train_idx), dataset.select(&test_idx)))
}
