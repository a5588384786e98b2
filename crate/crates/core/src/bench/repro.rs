//! Recomputes the three-source worked example: combination results for each
//! rule and the decision grid {pignistic, Appriou r = 0.5, distance type 1} ×
//! {Dempster, disjunctive, mixed}.

use serde::Serialize;

use crate::decision::{self, DistanceOptions};
use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::fusion::{self, MixedStrategy, Rule};
use crate::json_line;
use crate::massfn::MassFunction;

/// Per-cell tolerance against the three-decimal reference values.
pub const CELL_TOLERANCE: f64 = 0.005;
pub const APPRIOU_R: f64 = 0.5;

/// Three sources over Θ = {θ1, θ2, θ3}; each row lists the masses of
/// θ1, θ2, θ1∪θ2, θ3, θ1∪θ3, θ2∪θ3, Θ, which is bitmask order 1..=7.
pub const SOURCES: [[f64; 7]; 3] = [
    [0.410, 0.006, 0.039, 0.026, 0.094, 0.199, 0.226],
    [0.223, 0.108, 0.027, 0.093, 0.062, 0.153, 0.334],
    [0.034, 0.300, 0.057, 0.128, 0.04, 0.004, 0.437],
];

pub const EXPECTED_DEMPSTER: [f64; 7] = [0.369, 0.227, 0.025, 0.168, 0.049, 0.103, 0.059];
pub const EXPECTED_DISJUNCTIVE: [f64; 7] = [0.003, 0.0, 0.061, 0.0, 0.037, 0.035, 0.864];
pub const EXPECTED_MIXED: [f64; 7] = [0.208, 0.128, 0.075, 0.094, 0.064, 0.093, 0.338];

/// Reference decisions as bitmasks, rows Dempster / disjunctive / mixed,
/// columns pignistic / Appriou / distance.
pub const EXPECTED_DECISIONS: [[u32; 3]; 3] = [
    [0b001, 0b011, 0b001],
    [0b001, 0b001, 0b011],
    [0b001, 0b001, 0b011],
];

const GRID_ROWS: [Rule; 3] = [Rule::Dempster, Rule::Disjunctive, Rule::Mixed];
const GRID_COLS: [&str; 3] = ["betp", "appriou", "dist1"];

#[derive(Clone, Debug, Serialize)]
pub struct CellDelta {
    pub subset: String,
    pub computed: f64,
    pub expected: f64,
    pub delta: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationColumn {
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed_strategy: Option<MixedStrategy>,
    /// Whether a cell outside tolerance fails the run.
    pub gating: bool,
    pub conflicts: Vec<f64>,
    pub cells: Vec<CellDelta>,
}

impl CombinationColumn {
    pub fn max_delta(&self) -> f64 {
        self.cells.iter().map(|c| c.delta.abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionCell {
    pub combination: Rule,
    pub decision: &'static str,
    pub computed: String,
    pub expected: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproMeta {
    pub version: &'static str,
    pub cell_tolerance: f64,
    pub appriou_r: f64,
    /// Mixed-rule extension used for the gating decision grid.
    pub grid_mixed_strategy: MixedStrategy,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproReport {
    pub meta: ReproMeta,
    pub combinations: Vec<CombinationColumn>,
    /// Decision grid on the joint mixed combination (gating).
    pub decisions: Vec<DecisionCell>,
    /// Same grid with the mixed row computed from the pairwise fold
    /// (informational).
    pub decisions_fold: Vec<DecisionCell>,
    pub failures: Vec<String>,
    pub discrepancies: Vec<String>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::ReproFailure(self.failures))
        }
    }

    pub fn column(
        &self,
        rule: Rule,
        strategy: Option<MixedStrategy>,
    ) -> Option<&CombinationColumn> {
        self.combinations
            .iter()
            .find(|c| c.rule == rule && c.mixed_strategy == strategy)
    }

    /// Meta line, one line per combination column, the two decision grids,
    /// then the verdict.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut lines = vec![json_line(&serde_json::json!({ "meta": self.meta }))?];
        for col in &self.combinations {
            lines.push(json_line(&serde_json::json!({ "combination": col }))?);
        }
        lines.push(json_line(
            &serde_json::json!({ "decisions": self.decisions }),
        )?);
        lines.push(json_line(
            &serde_json::json!({ "decisions_fold": self.decisions_fold }),
        )?);
        lines.push(json_line(&serde_json::json!({
            "passed": self.passed(),
            "failures": self.failures,
            "discrepancies": self.discrepancies,
        }))?);
        Ok(lines.join("\n") + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("## Combination results\n\n| rule | ");
        let frame = Frame::numbered(3).expect("three labels");
        let subsets: Vec<String> = (1..=7u32)
            .map(|b| frame.format_subset(Subset::from_bits(b)))
            .collect();
        out.push_str(&subsets.join(" | "));
        out.push_str(" | max Δ |\n|---|");
        out.push_str(&"---|".repeat(8));
        out.push('\n');
        for col in &self.combinations {
            let name = match col.mixed_strategy {
                Some(s) => format!("{} ({s})", col.rule),
                None => col.rule.to_string(),
            };
            out.push_str(&format!("| {name} |"));
            for cell in &col.cells {
                out.push_str(&format!(" {:.4} ({:+.4}) |", cell.computed, cell.delta));
            }
            out.push_str(&format!(" {:.4} |\n", col.max_delta()));
        }
        for (title, grid) in [
            ("Decisions (mixed: joint)", &self.decisions),
            ("Decisions (mixed: fold)", &self.decisions_fold),
        ] {
            out.push_str(&format!(
                "\n## {title}\n\n| combination | betp | appriou | dist1 |\n|---|---|---|---|\n"
            ));
            for row in grid.chunks(3) {
                out.push_str(&format!("| {} |", row[0].combination));
                for cell in row {
                    let mark = if cell.matches { "" } else { " ✗" };
                    out.push_str(&format!(" {}{mark} |", cell.computed));
                }
                out.push('\n');
            }
        }
        if !self.discrepancies.is_empty() {
            out.push_str("\n## Documented discrepancies\n\n");
            for d in &self.discrepancies {
                out.push_str(&format!("- {d}\n"));
            }
        }
        out.push_str(&format!(
            "\nresult: {}\n",
            if self.passed() {
                "PASS".to_string()
            } else {
                format!("FAIL ({})", self.failures.join("; "))
            }
        ));
        out
    }
}

fn sources_from(table: &[[f64; 7]; 3], frame: &Frame) -> Result<Vec<MassFunction>> {
    table
        .iter()
        .map(|col| {
            MassFunction::renormalized(
                frame,
                (1..=7).map(Subset::from_bits).zip(col.iter().copied()),
            )
        })
        .collect()
}

fn column(
    frame: &Frame,
    rule: Rule,
    strategy: Option<MixedStrategy>,
    gating: bool,
    sources: &[MassFunction],
    expected: &[f64; 7],
) -> Result<(CombinationColumn, MassFunction)> {
    let combination = fusion::combine_all_with(rule, sources, strategy.unwrap_or_default())?;
    let cells = (1..=7u32)
        .zip(expected)
        .map(|(bits, &expected)| {
            let a = Subset::from_bits(bits);
            let computed = combination.mass.mass(a);
            let delta = computed - expected;
            CellDelta {
                subset: frame.format_subset(a),
                computed,
                expected,
                delta,
                within_tolerance: delta.abs() <= CELL_TOLERANCE,
            }
        })
        .collect();
    Ok((
        CombinationColumn {
            rule,
            mixed_strategy: strategy,
            gating,
            conflicts: combination.step_conflicts,
            cells,
        },
        combination.mass,
    ))
}

fn decision_row(
    frame: &Frame,
    rule: Rule,
    m: &MassFunction,
    expected: &[u32; 3],
) -> Result<Vec<DecisionCell>> {
    let chosen = [
        decision::decide_betp(m)?.chosen,
        decision::decide_appriou(m, APPRIOU_R, None)?.chosen,
        decision::decide_distance(m, &DistanceOptions::type1())?.chosen,
    ];
    Ok(chosen
        .iter()
        .zip(expected)
        .zip(GRID_COLS)
        .map(|((&got, &want), name)| DecisionCell {
            combination: rule,
            decision: name,
            computed: frame.format_subset(got),
            expected: frame.format_subset(Subset::from_bits(want)),
            matches: got.bits() == want,
        })
        .collect())
}

/// Runs the reproduction on the built-in source table.
pub fn repro_tables() -> Result<ReproReport> {
    repro_tables_with(&SOURCES)
}

/// Runs the reproduction on an arbitrary three-source table (columns are
/// rescaled to sum to 1). The report lists failures instead of erroring;
/// use [`ReproReport::into_result`] to turn them into `ReproFailure`.
pub fn repro_tables_with(table: &[[f64; 7]; 3]) -> Result<ReproReport> {
    let frame = Frame::numbered(3)?;
    let sources = sources_from(table, &frame)?;

    let (dempster, m_dempster) = column(
        &frame,
        Rule::Dempster,
        None,
        true,
        &sources,
        &EXPECTED_DEMPSTER,
    )?;
    let (disjunctive, m_disjunctive) = column(
        &frame,
        Rule::Disjunctive,
        None,
        true,
        &sources,
        &EXPECTED_DISJUNCTIVE,
    )?;
    let (mixed_fold, m_fold) = column(
        &frame,
        Rule::Mixed,
        Some(MixedStrategy::Fold),
        false,
        &sources,
        &EXPECTED_MIXED,
    )?;
    let (mixed_joint, m_joint) = column(
        &frame,
        Rule::Mixed,
        Some(MixedStrategy::Joint),
        false,
        &sources,
        &EXPECTED_MIXED,
    )?;

    let mut failures = Vec::new();
    let mut discrepancies = Vec::new();
    let columns = vec![dempster, disjunctive, mixed_fold, mixed_joint];
    for col in &columns {
        let label = match col.mixed_strategy {
            Some(s) => format!("{} ({s})", col.rule),
            None => col.rule.to_string(),
        };
        for cell in col.cells.iter().filter(|c| !c.within_tolerance) {
            let msg = format!(
                "{label} {}: computed {:.4}, expected {:.3}, delta {:+.4}",
                cell.subset, cell.computed, cell.expected, cell.delta
            );
            if col.gating {
                failures.push(msg);
            } else {
                discrepancies.push(msg);
            }
        }
    }

    let mut decisions = Vec::new();
    let mut decisions_fold = Vec::new();
    for (i, rule) in GRID_ROWS.into_iter().enumerate() {
        let (joint_input, fold_input) = match rule {
            Rule::Dempster => (&m_dempster, &m_dempster),
            Rule::Disjunctive => (&m_disjunctive, &m_disjunctive),
            _ => (&m_joint, &m_fold),
        };
        decisions.extend(decision_row(
            &frame,
            rule,
            joint_input,
            &EXPECTED_DECISIONS[i],
        )?);
        decisions_fold.extend(decision_row(
            &frame,
            rule,
            fold_input,
            &EXPECTED_DECISIONS[i],
        )?);
    }
    for cell in decisions.iter().filter(|c| !c.matches) {
        failures.push(format!(
            "decision {} / {}: computed {}, expected {}",
            cell.combination, cell.decision, cell.computed, cell.expected
        ));
    }
    for cell in decisions_fold.iter().filter(|c| !c.matches) {
        discrepancies.push(format!(
            "decision {} (fold) / {}: computed {}, expected {}",
            cell.combination, cell.decision, cell.computed, cell.expected
        ));
    }

    Ok(ReproReport {
        meta: ReproMeta {
            version: crate::VERSION,
            cell_tolerance: CELL_TOLERANCE,
            appriou_r: APPRIOU_R,
            grid_mixed_strategy: MixedStrategy::Joint,
        },
        combinations: columns,
        decisions,
        decisions_fold,
        failures,
        discrepancies,
    })
}
