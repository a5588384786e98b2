use serde::Serialize;

use super::dataset::{self, LabeledDataset, TestSize};
use super::metrics::{ConfusionMatrix, Metrics};
use crate::decision::{DecisionSpec, DistanceOptions, Reference};
use crate::eknn::{EknnModel, EknnParams};
use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::fusion::{self, MixedStrategy, Rule};
use crate::json_line as json;
use crate::massfn::MassFunction;

/// One classification experiment: a dataset split per seed, an evidential
/// k-NN fit on the training part and a decision on each test instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub test_size: TestSize,
    pub params: EknnParams,
    pub combination: Rule,
    pub mixed_strategy: MixedStrategy,
    pub decision: DecisionSpec,
}

impl ExperimentConfig {
    pub fn new(test_size: TestSize, combination: Rule, decision: DecisionSpec) -> Self {
        ExperimentConfig {
            test_size,
            params: EknnParams::default(),
            combination,
            mixed_strategy: MixedStrategy::default(),
            decision,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub rows: usize,
    pub dim: usize,
    pub classes: Vec<String>,
    pub class_counts: Vec<usize>,
}

impl DatasetInfo {
    fn of(ds: &LabeledDataset) -> Self {
        DatasetInfo {
            name: ds.name.clone(),
            rows: ds.len(),
            dim: ds.dim(),
            classes: ds.class_names.clone(),
            class_counts: ds.class_counts(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: Metrics,
    pub confusion: ConfusionMatrix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub strict_accuracy: f64,
    pub good_rate: f64,
    pub ignorance_rate: f64,
}

impl MeanMetrics {
    fn of<'a>(metrics: impl IntoIterator<Item = &'a Metrics>) -> Self {
        let mut sum = MeanMetrics::default();
        let mut n = 0usize;
        for m in metrics {
            sum.strict_accuracy += m.strict_accuracy;
            sum.good_rate += m.good_rate;
            sum.ignorance_rate += m.ignorance_rate;
            n += 1;
        }
        if n > 0 {
            let n = n as f64;
            sum.strict_accuracy /= n;
            sum.good_rate /= n;
            sum.ignorance_rate /= n;
        }
        sum
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationMeta {
    pub version: &'static str,
    pub dataset: DatasetInfo,
    pub seeds: Vec<u64>,
    pub decision_rule: &'static str,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub meta: ClassificationMeta,
    pub runs: Vec<RunResult>,
    pub mean: MeanMetrics,
    /// Sum of the per-seed confusion matrices.
    pub pooled: ConfusionMatrix,
}

impl ClassificationReport {
    /// Meta line, one line per seed, then the summary line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut lines = vec![json(&serde_json::json!({ "meta": self.meta }))?];
        for run in &self.runs {
            lines.push(json(&serde_json::json!({ "run": run }))?);
        }
        lines.push(json(
            &serde_json::json!({ "mean": self.mean, "pooled": self.pooled }),
        )?);
        Ok(lines.join("\n") + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let meta = &self.meta;
        let mut out = format!(
            "## {} · {} + {} (k = {}, alpha0 = {})\n\n",
            meta.dataset.name,
            meta.config.combination,
            meta.decision_rule,
            meta.config.params.k,
            meta.config.params.alpha0
        );
        out.push_str("| seed | strict | good | ignorance |\n|---|---|---|---|\n");
        for run in &self.runs {
            out.push_str(&format!(
                "| {} | {:.4} | {:.4} | {:.4} |\n",
                run.seed,
                run.metrics.strict_accuracy,
                run.metrics.good_rate,
                run.metrics.ignorance_rate
            ));
        }
        out.push_str(&format!(
            "| mean | {:.4} | {:.4} | {:.4} |\n\n### Pooled confusion matrix\n\n",
            self.mean.strict_accuracy, self.mean.good_rate, self.mean.ignorance_rate
        ));
        out.push_str(&self.pooled.to_markdown());
        out
    }
}

/// Decisions a rule can return; used as the initial confusion columns.
fn outcome_columns(decision: &DecisionSpec, frame: &Frame) -> Result<Vec<Subset>> {
    Ok(match decision {
        DecisionSpec::Betp | DecisionSpec::MaxBel | DecisionSpec::MaxPl => {
            frame.singletons().collect()
        }
        DecisionSpec::Loss { losses } => losses.actions.clone(),
        DecisionSpec::Appriou { .. } => frame.power_set().skip(1).collect(),
        DecisionSpec::Distance(options) => options.candidate_set(frame)?,
    })
}

/// Fitted model and the fused mass function of every test instance.
struct PreparedSplit {
    seed: u64,
    train_size: usize,
    frame: Frame,
    labels: Vec<usize>,
    combined: Vec<MassFunction>,
}

fn prepare(ds: &LabeledDataset, config: &ExperimentConfig, seed: u64) -> Result<PreparedSplit> {
    let (train, test) = dataset::split(ds, config.test_size, seed)?;
    let frame = ds.frame()?;
    let model = EknnModel::fit(&train.features, &train.labels, &frame, config.params)?;
    let combined = test
        .features
        .iter()
        .map(|x| {
            let bbas = model.neighbor_bbas(x)?;
            Ok(fusion::combine_all_with(config.combination, &bbas, config.mixed_strategy)?.mass)
        })
        .collect::<Result<_>>()?;
    Ok(PreparedSplit {
        seed,
        train_size: train.len(),
        frame,
        labels: test.labels,
        combined,
    })
}

fn evaluate(split: &PreparedSplit, decision: &DecisionSpec) -> Result<RunResult> {
    let mut confusion =
        ConfusionMatrix::new(&split.frame, outcome_columns(decision, &split.frame)?)?;
    for (m, &label) in split.combined.iter().zip(&split.labels) {
        confusion.record(label, decision.decide(m)?.chosen)?;
    }
    Ok(RunResult {
        seed: split.seed,
        train_size: split.train_size,
        test_size: split.labels.len(),
        metrics: confusion.score(),
        confusion,
    })
}

fn pool(frame: &Frame, runs: &[RunResult]) -> Result<ConfusionMatrix> {
    let mut pooled = ConfusionMatrix::new(
        frame,
        runs.iter().flat_map(|r| r.confusion.columns().to_vec()),
    )?;
    for run in runs {
        for (q, row) in run.confusion.counts().iter().enumerate() {
            for (&col, &n) in run.confusion.columns().iter().zip(row) {
                for _ in 0..n {
                    pooled.record(q, col)?;
                }
            }
        }
    }
    Ok(pooled)
}

/// Runs the experiment once per seed.
pub fn classify(
    ds: &LabeledDataset,
    config: &ExperimentConfig,
    seeds: &[u64],
) -> Result<ClassificationReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("no seeds".into()));
    }
    let runs = seeds
        .iter()
        .map(|&seed| evaluate(&prepare(ds, config, seed)?, &config.decision))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        meta: ClassificationMeta {
            version: crate::VERSION,
            dataset: DatasetInfo::of(ds),
            seeds: seeds.to_vec(),
            decision_rule: config.decision.rule().as_str(),
            config: config.clone(),
        },
        mean: MeanMetrics::of(runs.iter().map(|r| &r.metrics)),
        pooled: pool(&ds.frame()?, &runs)?,
        runs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub mean: MeanMetrics,
    pub per_seed: Vec<Metrics>,
}

/// Alphas grouped by cut points: `[0, c1)`, `[c1, c2)`, …, `[ck, 1]`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaBand {
    pub lower: f64,
    pub upper: f64,
    pub alphas: Vec<f64>,
    pub mean: MeanMetrics,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaSweepMeta {
    pub version: &'static str,
    pub dataset: DatasetInfo,
    pub seeds: Vec<u64>,
    pub cuts: Vec<f64>,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaSweepReport {
    pub meta: AlphaSweepMeta,
    pub points: Vec<AlphaPoint>,
    pub bands: Vec<AlphaBand>,
}

impl AlphaSweepReport {
    pub fn to_json_lines(&self) -> Result<String> {
        let mut lines = vec![json(&serde_json::json!({ "meta": self.meta }))?];
        for p in &self.points {
            lines.push(json(&serde_json::json!({ "point": p }))?);
        }
        lines.push(json(&serde_json::json!({ "bands": self.bands }))?);
        Ok(lines.join("\n") + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "## {} · {} + dist2 alpha sweep\n\n| alpha | strict | good | ignorance |\n|---|---|---|---|\n",
            self.meta.dataset.name, self.meta.config.combination
        );
        for p in &self.points {
            out.push_str(&format!(
                "| {} | {:.4} | {:.4} | {:.4} |\n",
                p.alpha, p.mean.strict_accuracy, p.mean.good_rate, p.mean.ignorance_rate
            ));
        }
        out.push_str("\n| band | alphas | strict | good | ignorance |\n|---|---|---|---|---|\n");
        for b in &self.bands {
            let close = if b.upper >= 1.0 { ']' } else { ')' };
            out.push_str(&format!(
                "| [{}, {}{close} | {} | {:.4} | {:.4} | {:.4} |\n",
                b.lower,
                b.upper,
                b.alphas.len(),
                b.mean.strict_accuracy,
                b.mean.good_rate,
                b.mean.ignorance_rate
            ));
        }
        out
    }
}

/// Evaluates the type-2 distance rule at each alpha. The reference of
/// `base` is replaced; its candidate filters are kept. Splits and fused
/// mass functions are shared across alphas.
pub fn alpha_sweep(
    ds: &LabeledDataset,
    config: &ExperimentConfig,
    base: &DistanceOptions,
    alphas: &[f64],
    seeds: &[u64],
    cuts: &[f64],
) -> Result<AlphaSweepReport> {
    if alphas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidParameter(
            "alpha sweep needs alphas and seeds".into(),
        ));
    }
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
        return Err(Error::AlphaOutOfRange(a));
    }
    if cuts.iter().any(|&c| !(c > 0.0 && c < 1.0)) || cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "band cuts {cuts:?} must increase inside (0, 1)"
        )));
    }
    let splits = seeds
        .iter()
        .map(|&seed| prepare(ds, config, seed))
        .collect::<Result<Vec<_>>>()?;

    let points = alphas
        .iter()
        .map(|&alpha| {
            let spec = DecisionSpec::Distance(DistanceOptions {
                reference: Reference::Simple { alpha },
                ..base.clone()
            });
            let per_seed = splits
                .iter()
                .map(|s| Ok(evaluate(s, &spec)?.metrics))
                .collect::<Result<Vec<_>>>()?;
            Ok(AlphaPoint {
                alpha,
                mean: MeanMetrics::of(&per_seed),
                per_seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bounds = vec![0.0];
    bounds.extend_from_slice(cuts);
    bounds.push(1.0);
    let bands = bounds
        .windows(2)
        .map(|w| {
            let last = w[1] >= 1.0;
            let members: Vec<&AlphaPoint> = points
                .iter()
                .filter(|p| p.alpha >= w[0] && (p.alpha < w[1] || last))
                .collect();
            AlphaBand {
                lower: w[0],
                upper: w[1],
                alphas: members.iter().map(|p| p.alpha).collect(),
                mean: MeanMetrics::of(members.iter().flat_map(|p| &p.per_seed)),
            }
        })
        .collect();

    let mut recorded = config.clone();
    recorded.decision = DecisionSpec::Distance(base.clone());
    Ok(AlphaSweepReport {
        meta: AlphaSweepMeta {
            version: crate::VERSION,
            dataset: DatasetInfo::of(ds),
            seeds: seeds.to_vec(),
            cuts: cuts.to_vec(),
            config: recorded,
        },
        points,
        bands,
    })
}
