//! Evidential k-nearest-neighbour classifier.
//!
//! Each of the `k` nearest training points (Euclidean distance on min–max
//! scaled features) contributes a simple mass function on its class,
//! `m({θ_q}) = alpha0 · exp(−γ_q d²)`, the rest on Θ. The neighbour masses
//! are fused with a chosen combination rule and a decision rule is applied
//! to the result.

use serde::Serialize;

use crate::decision::{Decision, DecisionSpec};
use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::fusion::{self, MixedStrategy, Rule};
use crate::massfn::MassFunction;

pub const DEFAULT_K: usize = 3;
pub const DEFAULT_ALPHA0: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EknnParams {
    pub k: usize,
    pub alpha0: f64,
}

impl Default for EknnParams {
    fn default() -> Self {
        EknnParams {
            k: DEFAULT_K,
            alpha0: DEFAULT_ALPHA0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EknnModel {
    frame: Frame,
    params: EknnParams,
    mins: Vec<f64>,
    ranges: Vec<f64>,
    train: Vec<Vec<f64>>,
    labels: Vec<usize>,
    gamma: Vec<f64>,
}

/// Fused neighbour evidence and the decision taken on it.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub decision: Decision,
    pub combined: MassFunction,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl EknnModel {
    /// Fits scaling bounds and per-class `γ_q = 1 / mean squared distance`
    /// between same-class training pairs. Classes with a single instance
    /// (or zero spread) fall back to the mean over all pairs.
    pub fn fit(
        features: &[Vec<f64>],
        labels: &[usize],
        frame: &Frame,
        params: EknnParams,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                actual: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::InvalidParameter("no training instances".into()));
        }
        if params.k == 0 || params.k > features.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {} with {} training instances",
                params.k,
                features.len()
            )));
        }
        if !(params.alpha0 > 0.0 && params.alpha0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha0 = {} outside (0, 1)",
                params.alpha0
            )));
        }
        let dim = features[0].len();
        if let Some(row) = features.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: row.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= frame.len()) {
            return Err(Error::InvalidParameter(format!(
                "label index {bad} outside a frame of {}",
                frame.len()
            )));
        }
        for (q, name) in frame.labels().iter().enumerate() {
            if !labels.contains(&q) {
                return Err(Error::EmptyClass(name.clone()));
            }
        }

        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in features {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges: Vec<f64> = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();

        let mut model = EknnModel {
            frame: frame.clone(),
            params,
            mins,
            ranges,
            train: Vec::new(),
            labels: labels.to_vec(),
            gamma: Vec::new(),
        };
        model.train = features.iter().map(|r| model.scale(r)).collect();
        model.gamma = model.fit_gamma();
        Ok(model)
    }

    fn fit_gamma(&self) -> Vec<f64> {
        let n_classes = self.frame.len();
        let mut sums = vec![0.0; n_classes];
        let mut pairs = vec![0usize; n_classes];
        let (mut all_sum, mut all_pairs) = (0.0, 0usize);
        for i in 0..self.train.len() {
            for j in i + 1..self.train.len() {
                let d2 = squared_distance(&self.train[i], &self.train[j]);
                all_sum += d2;
                all_pairs += 1;
                if self.labels[i] == self.labels[j] {
                    sums[self.labels[i]] += d2;
                    pairs[self.labels[i]] += 1;
                }
            }
        }
        let global = if all_pairs > 0 && all_sum > 0.0 {
            all_pairs as f64 / all_sum
        } else {
            1.0
        };
        sums.iter()
            .zip(&pairs)
            .map(|(&s, &p)| {
                if p > 0 && s > 0.0 {
                    p as f64 / s
                } else {
                    global
                }
            })
            .collect()
    }

    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mins.iter().zip(&self.ranges))
            .map(|(&v, (&lo, &range))| if range > 0.0 { (v - lo) / range } else { 0.0 })
            .collect()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn params(&self) -> EknnParams {
        self.params
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    /// Indices and squared distances of the `k` nearest training points,
    /// ties broken by training order.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let scaled = self.scale(x);
        let mut dists: Vec<(usize, f64)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, row)| (i, squared_distance(row, &scaled)))
            .collect();
        dists.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        dists.truncate(self.params.k);
        Ok(dists)
    }

    /// One simple mass function per neighbour, nearest first.
    pub fn neighbor_bbas(&self, x: &[f64]) -> Result<Vec<MassFunction>> {
        self.neighbors(x)?
            .into_iter()
            .map(|(i, d2)| {
                let q = self.labels[i];
                let support = self.params.alpha0 * (-self.gamma[q] * d2).exp();
                MassFunction::simple(&self.frame, Subset::singleton(q), support)
            })
            .collect()
    }

    pub fn classify(
        &self,
        x: &[f64],
        rule: Rule,
        strategy: MixedStrategy,
        decision: &DecisionSpec,
    ) -> Result<Classification> {
        let bbas = self.neighbor_bbas(x)?;
        let combined = fusion::combine_all_with(rule, &bbas, strategy)?.mass;
        Ok(Classification {
            decision: decision.decide(&combined)?,
            combined,
        })
    }
}
