use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use credal::bbagen::{self, GenSpec, RandomBenchConfig};
use credal::bench::{self, CsvSchema, ExperimentConfig, LabeledDataset, TestSize};
use credal::decision::{DecisionRule, LossMatrix};
use credal::eknn::{EknnParams, DEFAULT_ALPHA0, DEFAULT_K};
use credal::fusion::{self, MixedStrategy, Rule};
use credal::massfn::MassFunctionDoc;
use credal::{DecisionSpec, DistanceOptions, Frame, MassFunction, Reference};
use serde::Deserialize;

/// Default largest distance-rule candidate during classification.
const CLASSIFY_MAX_CARD: u32 = 2;

#[derive(Parser)]
#[command(
    name = "credal",
    version,
    about = "Belief-function fusion and imprecise decisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combine mass functions read from a JSON file; prints the result as JSON.
    Combine {
        /// JSON array of `{"frame": [...], "masses": {"{a|b}": 0.3, ...}}`.
        input: PathBuf,
        #[arg(long, default_value = "dempster")]
        rule: Rule,
        #[arg(long, default_value = "fold")]
        mixed_strategy: MixedStrategy,
        /// Rescale inputs that do not sum to 1.
        #[arg(long)]
        renormalize: bool,
    },
    /// Apply a decision rule to one mass function; prints the decision as JSON.
    Decide {
        /// A mass function document, or the output of `combine`.
        input: PathBuf,
        #[command(flatten)]
        decision: DecisionArgs,
        #[arg(long)]
        renormalize: bool,
    },
    /// Combine random mass functions and tally decisions over many trials.
    RandomBench {
        #[arg(long, default_value_t = 3)]
        frame_size: usize,
        #[arg(long, default_value_t = 3)]
        sources: usize,
        #[arg(long, default_value_t = 4)]
        focal: usize,
        /// Force Θ to be one of the focal sets.
        #[arg(long)]
        theta_focal: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "dempster,disjunctive,mixed"
        )]
        rules: Vec<Rule>,
        #[arg(long, default_value = "fold")]
        mixed_strategy: MixedStrategy,
        #[arg(long, value_delimiter = ',', default_value = "betp,appriou,dist1")]
        decisions: Vec<DecisionRule>,
        #[command(flatten)]
        params: DecisionParams,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
    /// Evidential k-NN classification over several random splits.
    Classify {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        decision: DecisionArgs,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
    /// Recompute the three-source worked example; exits with 2 on mismatch.
    ReproTables {
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
    /// Type-2 distance decisions over a range of alpha values.
    AlphaSweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
        )]
        alphas: Vec<f64>,
        /// Band boundaries inside (0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0.8")]
        cuts: Vec<f64>,
        #[arg(long)]
        max_card: Option<u32>,
        #[arg(long)]
        include_theta: bool,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct DecisionParams {
    /// Appriou exponent.
    #[arg(long = "r", default_value_t = 0.5)]
    r: f64,
    /// Reference mass of the type-2 distance rule.
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
    /// Largest candidate cardinality for the distance rules (classification
    /// defaults to 2).
    #[arg(long)]
    max_card: Option<u32>,
    /// Let the distance rules choose Θ.
    #[arg(long)]
    include_theta: bool,
    /// JSON loss matrix `{"actions": ["{a}", ...], "entries": [[...], ...]}`;
    /// 0-1 loss on singletons when absent.
    #[arg(long)]
    losses: Option<PathBuf>,
}

#[derive(Args)]
struct DecisionArgs {
    #[arg(long, default_value = "dist1")]
    decision: DecisionRule,
    #[command(flatten)]
    params: DecisionParams,
}

#[derive(Args)]
struct DataArgs {
    /// Headerless CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Zero-based label column (default: last).
    #[arg(long)]
    label_col: Option<usize>,
    #[arg(long, conflicts_with = "test_fraction")]
    test_count: Option<usize>,
    #[arg(long, default_value_t = 0.27)]
    test_fraction: f64,
    /// First split seed; runs use seed, seed + 1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    runs: u64,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA0)]
    alpha0: f64,
    #[arg(long, visible_alias = "combination", default_value = "dempster")]
    rule: Rule,
    #[arg(long, default_value = "fold")]
    mixed_strategy: MixedStrategy,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MassInput {
    Doc(MassFunctionDoc),
    Wrapped { mass: MassFunctionDoc },
}

#[derive(Deserialize)]
struct LossDoc {
    actions: Vec<String>,
    entries: Vec<Vec<f64>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl DecisionParams {
    fn spec(&self, rule: DecisionRule, frame: &Frame) -> Result<DecisionSpec> {
        let distance = |reference| DistanceOptions {
            reference,
            candidates: None,
            max_card: self.max_card,
            include_theta: self.include_theta,
        };
        Ok(match rule {
            DecisionRule::Betp => DecisionSpec::Betp,
            DecisionRule::MaxBel => DecisionSpec::MaxBel,
            DecisionRule::MaxPl => DecisionSpec::MaxPl,
            DecisionRule::Loss => DecisionSpec::Loss {
                losses: match &self.losses {
                    Some(path) => {
                        let doc: LossDoc = read_json(path)?;
                        let actions = doc
                            .actions
                            .iter()
                            .map(|a| frame.parse_subset(a))
                            .collect::<credal::Result<Vec<_>>>()?;
                        LossMatrix::new(actions, doc.entries)
                    }
                    None => LossMatrix::zero_one(frame),
                },
            },
            DecisionRule::Appriou => DecisionSpec::Appriou {
                r: self.r,
                weights: None,
            },
            DecisionRule::Dist1 => DecisionSpec::Distance(distance(Reference::Categorical)),
            DecisionRule::Dist2 => {
                DecisionSpec::Distance(distance(Reference::Simple { alpha: self.alpha }))
            }
        })
    }
}

impl DataArgs {
    fn load(&self) -> Result<LabeledDataset> {
        let schema = CsvSchema {
            label_col: self.label_col,
            feature_cols: None,
        };
        bench::load_csv(&self.data, &schema)
            .with_context(|| format!("loading {}", self.data.display()))
    }

    fn test_size(&self) -> TestSize {
        match self.test_count {
            Some(n) => TestSize::Count(n),
            None => TestSize::Fraction(self.test_fraction),
        }
    }

    fn seeds(&self) -> Vec<u64> {
        (self.seed..self.seed + self.runs).collect()
    }
}

impl ModelArgs {
    fn config(&self, test_size: TestSize, decision: DecisionSpec) -> ExperimentConfig {
        ExperimentConfig {
            test_size,
            params: EknnParams {
                k: self.k,
                alpha0: self.alpha0,
            },
            combination: self.rule,
            mixed_strategy: self.mixed_strategy,
            decision,
        }
    }
}

fn write_report(out_dir: &Path, name: &str, json_lines: &str) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(format!("{name}.jsonl"));
    fs::write(&path, json_lines).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn load_sources(path: &Path, renormalize: bool) -> Result<Vec<MassFunction>> {
    let docs: Vec<MassFunctionDoc> = read_json(path)?;
    let first = docs.first().context("no mass functions in input")?;
    let frame = Frame::new(first.frame.iter().cloned())?;
    docs.iter()
        .enumerate()
        .map(|(i, d)| {
            d.build(&frame, renormalize)
                .with_context(|| format!("mass function #{}", i + 1))
        })
        .collect()
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Combine {
            input,
            rule,
            mixed_strategy,
            renormalize,
        } => {
            let sources = load_sources(&input, renormalize)?;
            let combination = fusion::combine_all_with(rule, &sources, mixed_strategy)?;
            println!("{}", serde_json::to_string(&combination)?);
        }
        Command::Decide {
            input,
            decision,
            renormalize,
        } => {
            let doc = match read_json::<MassInput>(&input)? {
                MassInput::Doc(d) | MassInput::Wrapped { mass: d } => d,
            };
            let m = doc.into_mass(renormalize)?;
            let spec = decision.params.spec(decision.decision, m.frame())?;
            println!("{}", serde_json::to_string(&spec.decide(&m)?)?);
        }
        Command::RandomBench {
            frame_size,
            sources,
            focal,
            theta_focal,
            trials,
            seed,
            rules,
            mixed_strategy,
            decisions,
            params,
            out_dir,
        } => {
            let spec = GenSpec {
                frame_size,
                n_sources: sources,
                n_focal: focal,
                include_theta: theta_focal,
                seed,
            };
            let frame = spec.frame()?;
            let decisions = decisions
                .into_iter()
                .map(|d| params.spec(d, &frame))
                .collect::<Result<_>>()?;
            let report = bbagen::random_bench(&RandomBenchConfig {
                spec,
                trials,
                rules,
                mixed_strategy,
                decisions,
            })?;
            write_report(&out_dir, "random-bench", &report.to_json_lines()?)?;
            print!("{}", report.to_markdown());
        }
        Command::Classify {
            data,
            model,
            decision,
            out_dir,
        } => {
            let ds = data.load()?;
            let mut params = decision.params;
            params.max_card.get_or_insert(CLASSIFY_MAX_CARD);
            let spec = params.spec(decision.decision, &ds.frame()?)?;
            let config = model.config(data.test_size(), spec);
            let report = bench::classify(&ds, &config, &data.seeds())?;
            write_report(&out_dir, "classify", &report.to_json_lines()?)?;
            print!("{}", report.to_markdown());
        }
        Command::ReproTables { out_dir } => {
            let report = bench::repro_tables()?;
            write_report(&out_dir, "repro-tables", &report.to_json_lines()?)?;
            print!("{}", report.to_markdown());
            if !report.passed() {
                for failure in &report.failures {
                    eprintln!("mismatch: {failure}");
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::AlphaSweep {
            data,
            model,
            alphas,
            cuts,
            max_card,
            include_theta,
            out_dir,
        } => {
            if alphas.is_empty() {
                bail!("--alphas must list at least one value");
            }
            let ds = data.load()?;
            let base = DistanceOptions {
                max_card: max_card.or(Some(CLASSIFY_MAX_CARD)),
                include_theta,
                ..DistanceOptions::type1()
            };
            let config = model.config(data.test_size(), DecisionSpec::Distance(base.clone()));
            let report = bench::alpha_sweep(&ds, &config, &base, &alphas, &data.seeds(), &cuts)?;
            write_report(&out_dir, "alpha-sweep", &report.to_json_lines()?)?;
            print!("{}", report.to_markdown());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
