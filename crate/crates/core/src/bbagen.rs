//! Seeded random mass functions and the Monte Carlo comparison of rules.
//!
//! Focal sets are drawn uniformly without replacement from the nonempty
//! subsets; masses are flat-Dirichlet (normalized standard exponentials).
//! Every source of every trial reads its own ChaCha20 stream, so output
//! depends only on `(seed, trial, source)` and never on execution order.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::decision::{Decision, DecisionSpec};
use crate::error::{Error, Result};
use crate::frame::{Frame, Subset, MAX_FRAME_SIZE};
use crate::fusion::{self, MixedStrategy, Rule};
use crate::json_line;
use crate::massfn::MassFunction;

/// Identifier of the stream layout recorded in reports.
pub const GENERATOR_ID: &str = "chacha20/rand_chacha-0.9/stream=(trial<<32|source)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub frame_size: usize,
    pub n_sources: usize,
    pub n_focal: usize,
    pub include_theta: bool,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frame_size == 0 || self.frame_size > MAX_FRAME_SIZE {
            return Err(Error::SpecInvalid(format!(
                "frame size {} outside 1..={MAX_FRAME_SIZE}",
                self.frame_size
            )));
        }
        if self.n_sources == 0 {
            return Err(Error::SpecInvalid("at least one source is required".into()));
        }
        let available = (1usize << self.frame_size) - 1;
        if self.n_focal == 0 || self.n_focal > available {
            return Err(Error::SpecInvalid(format!(
                "{} focal elements requested, 1..={available} available",
                self.n_focal
            )));
        }
        Ok(())
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::numbered(self.frame_size)
    }
}

fn stream_rng(seed: u64, trial: u64, source: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((trial << 32) | source);
    rng
}

fn draw_source(frame: &Frame, spec: &GenSpec, rng: &mut ChaCha20Rng) -> Result<MassFunction> {
    let full = frame.full().bits() as usize;
    let mut focal: Vec<Subset> = if spec.include_theta {
        // indices 0..full-1 map to the proper nonempty subsets 1..full-1
        let mut picked: Vec<Subset> = index::sample(rng, full - 1, spec.n_focal - 1)
            .into_iter()
            .map(|i| Subset::from_bits(i as u32 + 1))
            .collect();
        picked.push(frame.full());
        picked
    } else {
        index::sample(rng, full, spec.n_focal)
            .into_iter()
            .map(|i| Subset::from_bits(i as u32 + 1))
            .collect()
    };
    focal.sort_unstable();

    let weights: Vec<f64> = focal.iter().map(|_| Exp1.sample(rng)).collect();
    let total: f64 = weights.iter().sum();
    MassFunction::new(
        frame,
        focal
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total)),
    )
}

/// Sources of trial `trial`.
pub fn generate_trial(spec: &GenSpec, trial: u64) -> Result<Vec<MassFunction>> {
    spec.validate()?;
    let frame = spec.frame()?;
    (0..spec.n_sources)
        .map(|s| draw_source(&frame, spec, &mut stream_rng(spec.seed, trial, s as u64)))
        .collect()
}

/// `spec.n_sources` mass functions, deterministic in `spec.seed`.
pub fn generate(spec: &GenSpec) -> Result<Vec<MassFunction>> {
    generate_trial(spec, 0)
}

#[derive(Clone, Debug)]
pub struct RandomBenchConfig {
    pub spec: GenSpec,
    pub trials: usize,
    pub rules: Vec<Rule>,
    pub mixed_strategy: MixedStrategy,
    pub decisions: Vec<DecisionSpec>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinedRow {
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined: Option<MassFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub decisions: Vec<DecisionOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionOutcome {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub sources: Vec<MassFunction>,
    pub combinations: Vec<CombinedRow>,
}

/// How often a (combination, decision) pair landed on a singleton, a
/// composite set, or Θ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecisionFrequency {
    pub combination: Rule,
    pub decision: String,
    pub precise: usize,
    pub composite: usize,
    pub ignorance: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomBenchMeta {
    pub version: &'static str,
    pub generator: &'static str,
    pub spec: GenSpec,
    pub trials: usize,
    pub rules: Vec<Rule>,
    pub mixed_strategy: MixedStrategy,
    pub decisions: Vec<DecisionSpec>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomBenchReport {
    pub meta: RandomBenchMeta,
    pub rows: Vec<TrialRow>,
    pub summary: Vec<DecisionFrequency>,
}

fn decision_label(spec: &DecisionSpec) -> String {
    spec.rule().as_str().to_string()
}

/// Generates `trials` independent draws, combines them under each rule and
/// applies every decision rule to each combination.
pub fn random_bench(config: &RandomBenchConfig) -> Result<RandomBenchReport> {
    config.spec.validate()?;
    let full = config.spec.frame()?.full();
    let mut summary: Vec<DecisionFrequency> = config
        .rules
        .iter()
        .flat_map(|&rule| {
            config.decisions.iter().map(move |d| DecisionFrequency {
                combination: rule,
                decision: decision_label(d),
                precise: 0,
                composite: 0,
                ignorance: 0,
                failed: 0,
            })
        })
        .collect();

    let mut rows = Vec::with_capacity(config.trials);
    for trial in 0..config.trials as u64 {
        let sources = generate_trial(&config.spec, trial)?;
        let mut combinations = Vec::with_capacity(config.rules.len());
        for (ri, &rule) in config.rules.iter().enumerate() {
            let counters = &mut summary[ri * config.decisions.len()..];
            match fusion::combine_all_with(rule, &sources, config.mixed_strategy) {
                Ok(combination) => {
                    let decisions = config
                        .decisions
                        .iter()
                        .zip(counters.iter_mut())
                        .map(|(spec, counter)| match spec.decide(&combination.mass) {
                            Ok(d) => {
                                if d.chosen == full && full.cardinality() > 1 {
                                    counter.ignorance += 1;
                                } else if d.chosen.is_singleton() {
                                    counter.precise += 1;
                                } else {
                                    counter.composite += 1;
                                }
                                DecisionOutcome {
                                    rule: decision_label(spec),
                                    decision: Some(d),
                                    error: None,
                                }
                            }
                            Err(e) => {
                                counter.failed += 1;
                                DecisionOutcome {
                                    rule: decision_label(spec),
                                    decision: None,
                                    error: Some(e.to_string()),
                                }
                            }
                        })
                        .collect();
                    combinations.push(CombinedRow {
                        rule,
                        combined: Some(combination.mass),
                        error: None,
                        decisions,
                    });
                }
                Err(e) => {
                    counters
                        .iter_mut()
                        .take(config.decisions.len())
                        .for_each(|c| c.failed += 1);
                    combinations.push(CombinedRow {
                        rule,
                        combined: None,
                        error: Some(e.to_string()),
                        decisions: Vec::new(),
                    });
                }
            }
        }
        rows.push(TrialRow {
            trial,
            sources,
            combinations,
        });
    }

    Ok(RandomBenchReport {
        meta: RandomBenchMeta {
            version: crate::VERSION,
            generator: GENERATOR_ID,
            spec: config.spec,
            trials: config.trials,
            rules: config.rules.clone(),
            mixed_strategy: config.mixed_strategy,
            decisions: config.decisions.clone(),
        },
        rows,
        summary,
    })
}

impl RandomBenchReport {
    /// Meta line, one line per trial, then the summary line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut lines = vec![json_line(&serde_json::json!({ "meta": self.meta }))?];
        for row in &self.rows {
            lines.push(json_line(&serde_json::json!({ "trial": row }))?);
        }
        lines.push(json_line(&serde_json::json!({ "summary": self.summary }))?);
        Ok(lines.join("\n") + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let spec = &self.meta.spec;
        let mut out = format!(
            "## Random bench: |Θ| = {}, {} sources, {} focal sets, {} trials, seed {}\n\n",
            spec.frame_size, spec.n_sources, spec.n_focal, self.meta.trials, spec.seed
        );
        out.push_str("| combination | decision | singleton | composite | Θ | failed |\n|---|---|---|---|---|---|\n");
        for f in &self.summary {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                f.combination, f.decision, f.precise, f.composite, f.ignorance, f.failed
            ));
        }
        out
    }
}
