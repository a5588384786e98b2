//! Combination rules: conjunctive, Dempster, disjunctive and the mixed
//! (Dubois–Prade) rule, plus n-ary folding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Subset;
use crate::massfn::{MassFunction, CONFLICT_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Conjunctive,
    Dempster,
    Disjunctive,
    Mixed,
}

impl Rule {
    pub const ALL: [Rule; 4] = [
        Rule::Conjunctive,
        Rule::Dempster,
        Rule::Disjunctive,
        Rule::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Conjunctive => "conjunctive",
            Rule::Dempster => "dempster",
            Rule::Disjunctive => "disjunctive",
            Rule::Mixed => "mixed",
        }
    }

    /// Whether n-ary folding with this rule is independent of source order.
    pub fn is_associative(self) -> bool {
        !matches!(self, Rule::Mixed)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// How the two-source mixed rule is extended to more sources.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedStrategy {
    /// Pairwise left fold in the given source order.
    #[default]
    Fold,
    /// Single pass over all source tuples: mass goes to the common
    /// intersection when it is nonempty, else to the union of all sets.
    Joint,
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MixedStrategy::Fold => "fold",
            MixedStrategy::Joint => "joint",
        })
    }
}

impl FromStr for MixedStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fold" => Ok(MixedStrategy::Fold),
            "joint" => Ok(MixedStrategy::Joint),
            other => Err(Error::UnknownRule(other.to_string())),
        }
    }
}

fn pairwise<F>(m1: &MassFunction, m2: &MassFunction, target: F) -> Result<MassFunction>
where
    F: Fn(Subset, Subset) -> Option<Subset>,
{
    m1.frame().ensure_same(m2.frame())?;
    let mut out: BTreeMap<Subset, f64> = BTreeMap::new();
    for (b, v1) in m1.focal() {
        for (c, v2) in m2.focal() {
            if let Some(a) = target(b, c) {
                *out.entry(a).or_insert(0.0) += v1 * v2;
            }
        }
    }
    Ok(MassFunction::from_map(m1.frame(), out))
}

/// Unnormalized conjunctive rule; conflicting mass stays on ∅.
pub fn conjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, |b, c| Some(b.intersection(c)))
}

/// Conflict `K`: the conjunctive mass that lands on ∅.
pub fn conflict(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    m1.frame().ensure_same(m2.frame())?;
    let mut k = 0.0;
    for (b, v1) in m1.focal() {
        for (c, v2) in m2.focal() {
            if !b.intersects(c) {
                k += v1 * v2;
            }
        }
    }
    Ok(k)
}

/// Dempster's rule, also returning the conflict it normalized away.
pub fn dempster_with_conflict(m1: &MassFunction, m2: &MassFunction) -> Result<(MassFunction, f64)> {
    let conj = conjunctive(m1, m2)?;
    let k = conj.conflict();
    let normalizer = 1.0 - k;
    if normalizer <= CONFLICT_EPS {
        return Err(Error::TotalConflict);
    }
    let normalized = MassFunction::from_map(
        m1.frame(),
        conj.focal()
            .filter(|(a, _)| !a.is_empty())
            .map(|(a, v)| (a, v / normalizer)),
    );
    Ok((normalized, k))
}

pub fn dempster(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    dempster_with_conflict(m1, m2).map(|(m, _)| m)
}

pub fn disjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, |b, c| Some(b.union(c)))
}

/// Dubois–Prade rule: agreeing pairs go to their intersection, conflicting
/// pairs to their union. Pairs whose union is ∅ (possible only when both
/// inputs carry mass on ∅) are discarded, keeping `m(∅) = 0`.
pub fn mixed_dp(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, |b, c| {
        let meet = b.intersection(c);
        if !meet.is_empty() {
            Some(meet)
        } else {
            Some(b.union(c)).filter(|u| !u.is_empty())
        }
    })
}

pub fn combine(rule: Rule, m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    match rule {
        Rule::Conjunctive => conjunctive(m1, m2),
        Rule::Dempster => dempster(m1, m2),
        Rule::Disjunctive => disjunctive(m1, m2),
        Rule::Mixed => mixed_dp(m1, m2),
    }
}

/// Mixed rule over all sources at once; see [`MixedStrategy::Joint`].
pub fn mixed_dp_joint(sources: &[MassFunction]) -> Result<MassFunction> {
    let (first, rest) = sources.split_first().ok_or(Error::EmptySourceList)?;
    // joint law of (common intersection, overall union)
    let mut state: BTreeMap<(Subset, Subset), f64> =
        first.focal().map(|(a, v)| ((a, a), v)).collect();
    for source in rest {
        first.frame().ensure_same(source.frame())?;
        let mut next = BTreeMap::new();
        for (&(meet, join), &w) in &state {
            for (b, v) in source.focal() {
                *next
                    .entry((meet.intersection(b), join.union(b)))
                    .or_insert(0.0) += w * v;
            }
        }
        state = next;
    }
    Ok(MassFunction::from_map(
        first.frame(),
        state.into_iter().filter_map(|((meet, join), w)| {
            let target = if meet.is_empty() { join } else { meet };
            (!target.is_empty()).then_some((target, w))
        }),
    ))
}

/// Result of an n-ary combination with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Combination {
    pub mass: MassFunction,
    pub rule: Rule,
    /// Source indices in the order they were folded.
    pub fold_order: Vec<usize>,
    /// Present only for the mixed rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed_strategy: Option<MixedStrategy>,
    /// Conflict `K` of each pairwise step of the fold (empty for a joint
    /// mixed combination).
    pub step_conflicts: Vec<f64>,
}

/// Left fold of `rule` over `sources` in the given order.
pub fn combine_all(rule: Rule, sources: &[MassFunction]) -> Result<Combination> {
    combine_all_with(rule, sources, MixedStrategy::Fold)
}

pub fn combine_all_with(
    rule: Rule,
    sources: &[MassFunction],
    strategy: MixedStrategy,
) -> Result<Combination> {
    let (first, rest) = sources.split_first().ok_or(Error::EmptySourceList)?;
    let mixed_strategy = (rule == Rule::Mixed).then_some(strategy);
    if mixed_strategy == Some(MixedStrategy::Joint) {
        return Ok(Combination {
            mass: mixed_dp_joint(sources)?,
            rule,
            fold_order: (0..sources.len()).collect(),
            mixed_strategy,
            step_conflicts: Vec::new(),
        });
    }

    let mut acc = first.clone();
    let mut step_conflicts = Vec::with_capacity(rest.len());
    for source in rest {
        let (next, k) = match rule {
            Rule::Dempster => dempster_with_conflict(&acc, source)?,
            _ => (combine(rule, &acc, source)?, conflict(&acc, source)?),
        };
        step_conflicts.push(k);
        acc = next;
    }
    Ok(Combination {
        mass: acc,
        rule,
        fold_order: (0..sources.len()).collect(),
        mixed_strategy,
        step_conflicts,
    })
}
