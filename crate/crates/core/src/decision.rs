//! Decision rules mapping a mass function to an element of the power set.
//!
//! Every rule produces a [`Decision`] carrying the complete score table over
//! its candidate set, so results can be audited and replayed. Optima are
//! compared with a tolerance of [`TIE_TOLERANCE`]; among tied candidates the
//! smaller cardinality wins, then the lower bitmask. Appriou's rule with
//! `r = 0` inverts the cardinality preference.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::massfn::MassFunction;
use crate::metric::JaccardMatrix;

pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

/// Identifiers of the available decision rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionRule {
    Betp,
    MaxBel,
    MaxPl,
    Loss,
    Appriou,
    Dist1,
    Dist2,
}

impl DecisionRule {
    pub const ALL: [DecisionRule; 7] = [
        DecisionRule::Betp,
        DecisionRule::MaxBel,
        DecisionRule::MaxPl,
        DecisionRule::Loss,
        DecisionRule::Appriou,
        DecisionRule::Dist1,
        DecisionRule::Dist2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DecisionRule::Betp => "betp",
            DecisionRule::MaxBel => "maxbel",
            DecisionRule::MaxPl => "maxpl",
            DecisionRule::Loss => "loss",
            DecisionRule::Appriou => "appriou",
            DecisionRule::Dist1 => "dist1",
            DecisionRule::Dist2 => "dist2",
        }
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecisionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecisionRule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// A chosen subset together with the score table it was selected from.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub frame: Frame,
    pub chosen: Subset,
    pub rule: DecisionRule,
    pub direction: Direction,
    /// Scores in candidate order.
    pub scores: Vec<(Subset, f64)>,
}

impl Decision {
    fn from_scores(
        frame: &Frame,
        rule: DecisionRule,
        direction: Direction,
        scores: Vec<(Subset, f64)>,
        prefer_larger: bool,
    ) -> Result<Self> {
        let chosen = select(&scores, direction, prefer_larger).ok_or(Error::EmptyCandidateSet)?;
        Ok(Decision {
            frame: frame.clone(),
            chosen,
            rule,
            direction,
            scores,
        })
    }

    pub fn score_of(&self, a: Subset) -> Option<f64> {
        self.scores.iter().find(|(s, _)| *s == a).map(|&(_, v)| v)
    }

    pub fn chosen_label(&self) -> String {
        self.frame.format_subset(self.chosen)
    }

    pub fn to_doc(&self) -> DecisionDoc {
        DecisionDoc {
            rule: self.rule,
            direction: self.direction,
            chosen: self.chosen_label(),
            scores: self
                .scores
                .iter()
                .map(|&(a, v)| (self.frame.format_subset(a), v))
                .collect(),
        }
    }
}

impl Serialize for Decision {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionDoc {
    pub rule: DecisionRule,
    pub direction: Direction,
    pub chosen: String,
    pub scores: Vec<(String, f64)>,
}

/// Picks the optimum of `scores` using the module's tie-break.
///
/// Returns `None` only for an empty table.
pub fn tie_break(scores: &[(Subset, f64)], direction: Direction) -> Option<Subset> {
    select(scores, direction, false)
}

fn select(scores: &[(Subset, f64)], direction: Direction, prefer_larger: bool) -> Option<Subset> {
    let best = match direction {
        Direction::Max => scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
        Direction::Min => scores.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
    };
    scores
        .iter()
        .filter(|(_, v)| (v - best).abs() <= TIE_TOLERANCE)
        .map(|&(a, _)| a)
        .min_by_key(|a| {
            let card = a.cardinality() as i64;
            (if prefer_larger { -card } else { card }, a.bits())
        })
}

/// Maximum pignistic probability over singletons.
pub fn decide_betp(m: &MassFunction) -> Result<Decision> {
    let probs = m.betp()?;
    let scores = m.frame().singletons().zip(probs).collect();
    Decision::from_scores(m.frame(), DecisionRule::Betp, Direction::Max, scores, false)
}

pub fn decide_maxbel(m: &MassFunction) -> Result<Decision> {
    let scores = m
        .frame()
        .singletons()
        .map(|a| Ok((a, m.bel(a)?)))
        .collect::<Result<_>>()?;
    Decision::from_scores(
        m.frame(),
        DecisionRule::MaxBel,
        Direction::Max,
        scores,
        false,
    )
}

pub fn decide_maxpl(m: &MassFunction) -> Result<Decision> {
    let scores = m
        .frame()
        .singletons()
        .map(|a| Ok((a, m.pl(a)?)))
        .collect::<Result<_>>()?;
    Decision::from_scores(
        m.frame(),
        DecisionRule::MaxPl,
        Direction::Max,
        scores,
        false,
    )
}

/// Loss `λ(action | θ_j)` for each action and each hypothesis of the frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossMatrix {
    pub actions: Vec<Subset>,
    /// One row per action, one column per hypothesis in frame order.
    pub entries: Vec<Vec<f64>>,
}

impl LossMatrix {
    pub fn new(actions: Vec<Subset>, entries: Vec<Vec<f64>>) -> Self {
        LossMatrix { actions, entries }
    }

    /// Actions are the singletons; a correct choice costs 0, any other 1.
    pub fn zero_one(frame: &Frame) -> Self {
        let n = frame.len();
        LossMatrix {
            actions: frame.singletons().collect(),
            entries: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .collect(),
        }
    }

    fn validate(&self, frame: &Frame) -> Result<()> {
        if self.actions.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        if self.entries.len() != self.actions.len() {
            return Err(Error::IncompleteLossMatrix(format!(
                "{} actions but {} rows",
                self.actions.len(),
                self.entries.len()
            )));
        }
        for (action, row) in self.actions.iter().zip(&self.entries) {
            frame.check(*action)?;
            if row.len() != frame.len() {
                return Err(Error::IncompleteLossMatrix(format!(
                    "row for {} has {} entries, frame has {} hypotheses",
                    frame.format_subset(*action),
                    row.len(),
                    frame.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidParameter(format!("loss entry {bad}")));
            }
        }
        Ok(())
    }
}

/// Minimum pignistic expected loss.
pub fn expected_loss(m: &MassFunction, losses: &LossMatrix) -> Result<Decision> {
    losses.validate(m.frame())?;
    let probs = m.betp()?;
    let scores = losses
        .actions
        .iter()
        .zip(&losses.entries)
        .map(|(&a, row)| (a, row.iter().zip(&probs).map(|(l, p)| l * p).sum()))
        .collect();
    Decision::from_scores(m.frame(), DecisionRule::Loss, Direction::Min, scores, false)
}

/// Appriou's weighted plausibility `λ_X · pl(X) / |X|^r` over every nonempty
/// subset. Missing weights default to 1; the normalization constant is 1.
pub fn appriou_scores(
    m: &MassFunction,
    r: f64,
    weights: Option<&BTreeMap<Subset, f64>>,
) -> Result<Vec<(Subset, f64)>> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r = {r} outside [0, 1]")));
    }
    if let Some(w) = weights {
        if let Some((a, v)) = w.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {v} on {}",
                m.frame().format_subset(*a)
            )));
        }
    }
    m.frame()
        .power_set()
        .skip(1)
        .map(|x| {
            let lambda = weights.and_then(|w| w.get(&x)).copied().unwrap_or(1.0);
            let utility = f64::from(x.cardinality()).powf(-r);
            Ok((x, lambda * utility * m.pl(x)?))
        })
        .collect()
}

pub fn decide_appriou(
    m: &MassFunction,
    r: f64,
    weights: Option<&BTreeMap<Subset, f64>>,
) -> Result<Decision> {
    let scores = appriou_scores(m, r, weights)?;
    Decision::from_scores(
        m.frame(),
        DecisionRule::Appriou,
        Direction::Max,
        scores,
        r == 0.0,
    )
}

/// Reference mass function built for each candidate of the distance rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reference {
    /// `m(A) = 1` (type 1).
    Categorical,
    /// `m(A) = alpha`, `m(Θ) = 1 − alpha` (type 2).
    Simple { alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptions {
    pub reference: Reference,
    /// Explicit candidates; defaults to every nonempty subset except Θ.
    pub candidates: Option<Vec<Subset>>,
    /// Keep only candidates with at most this many hypotheses.
    pub max_card: Option<u32>,
    /// Re-admit Θ into the default candidate set.
    pub include_theta: bool,
}

impl DistanceOptions {
    pub fn type1() -> Self {
        DistanceOptions {
            reference: Reference::Categorical,
            candidates: None,
            max_card: None,
            include_theta: false,
        }
    }

    pub fn type2(alpha: f64) -> Self {
        DistanceOptions {
            reference: Reference::Simple { alpha },
            ..Self::type1()
        }
    }

    pub fn with_max_card(mut self, max_card: u32) -> Self {
        self.max_card = Some(max_card);
        self
    }

    pub fn candidate_set(&self, frame: &Frame) -> Result<Vec<Subset>> {
        let base: Vec<Subset> = match &self.candidates {
            Some(explicit) => explicit
                .iter()
                .map(|&a| frame.check(a))
                .collect::<Result<_>>()?,
            None => frame
                .power_set()
                .skip(1)
                .filter(|&a| self.include_theta || a != frame.full())
                .collect(),
        };
        let filtered: Vec<Subset> = base
            .into_iter()
            .filter(|a| self.max_card.is_none_or(|k| a.cardinality() <= k))
            .collect();
        if filtered.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        Ok(filtered)
    }
}

/// Chooses the candidate whose reference mass function is nearest to `m`
/// in Jousselme distance.
pub fn decide_distance(m: &MassFunction, options: &DistanceOptions) -> Result<Decision> {
    let frame = m.frame();
    let rule = match options.reference {
        Reference::Categorical => DecisionRule::Dist1,
        Reference::Simple { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::AlphaOutOfRange(alpha));
            }
            DecisionRule::Dist2
        }
    };
    let candidates = options.candidate_set(frame)?;
    let metric = JaccardMatrix::lazy(frame);
    let scores = candidates
        .into_iter()
        .map(|a| {
            let reference = match options.reference {
                Reference::Categorical => MassFunction::categorical(frame, a)?,
                Reference::Simple { alpha } => MassFunction::simple(frame, a, alpha)?,
            };
            Ok((a, metric.distance(m, &reference)?))
        })
        .collect::<Result<_>>()?;
    Decision::from_scores(frame, rule, Direction::Min, scores, false)
}

/// A decision rule together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum DecisionSpec {
    Betp,
    MaxBel,
    MaxPl,
    Loss {
        losses: LossMatrix,
    },
    Appriou {
        r: f64,
        #[serde(skip)]
        weights: Option<BTreeMap<Subset, f64>>,
    },
    Distance(DistanceOptions),
}

impl DecisionSpec {
    pub fn rule(&self) -> DecisionRule {
        match self {
            DecisionSpec::Betp => DecisionRule::Betp,
            DecisionSpec::MaxBel => DecisionRule::MaxBel,
            DecisionSpec::MaxPl => DecisionRule::MaxPl,
            DecisionSpec::Loss { .. } => DecisionRule::Loss,
            DecisionSpec::Appriou { .. } => DecisionRule::Appriou,
            DecisionSpec::Distance(o) => match o.reference {
                Reference::Categorical => DecisionRule::Dist1,
                Reference::Simple { .. } => DecisionRule::Dist2,
            },
        }
    }

    pub fn decide(&self, m: &MassFunction) -> Result<Decision> {
        match self {
            DecisionSpec::Betp => decide_betp(m),
            DecisionSpec::MaxBel => decide_maxbel(m),
            DecisionSpec::MaxPl => decide_maxpl(m),
            DecisionSpec::Loss { losses } => expected_loss(m, losses),
            DecisionSpec::Appriou { r, weights } => decide_appriou(m, *r, weights.as_ref()),
            DecisionSpec::Distance(options) => decide_distance(m, options),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta3() -> Frame {
        Frame::numbered(3).unwrap()
    }

    fn column(frame: &Frame, values: [f64; 7]) -> MassFunction {
        MassFunction::new(frame, (1..=7).map(Subset::from_bits).zip(values)).unwrap()
    }

    const DEMPSTER_COL: [f64; 7] = [0.369, 0.227, 0.025, 0.168, 0.049, 0.103, 0.059];
    const DISJUNCTIVE_COL: [f64; 7] = [0.003, 0.0, 0.061, 0.0, 0.037, 0.035, 0.864];
    const MIXED_COL: [f64; 7] = [0.208, 0.128, 0.075, 0.094, 0.064, 0.093, 0.338];

    #[test]
    fn tie_break_rules() {
        let t1 = Subset::singleton(0);
        let t2 = Subset::singleton(1);
        let t12 = Subset::from_bits(0b011);
        assert_eq!(
            tie_break(&[(t12, 0.5), (t1, 0.5)], Direction::Max),
            Some(t1)
        );
        assert_eq!(tie_break(&[(t2, 0.5), (t1, 0.5)], Direction::Min), Some(t1));
        assert_eq!(tie_break(&[(t12, 0.1)], Direction::Min), Some(t12));
        assert_eq!(tie_break(&[], Direction::Min), None);
        assert_eq!(
            tie_break(&[(t1, 0.5), (t2, 0.5 + 1e-13)], Direction::Max),
            Some(t1)
        );
        assert_eq!(
            tie_break(&[(t1, 0.5), (t2, 0.5 + 1e-9)], Direction::Max),
            Some(t2)
        );
    }

    #[test]
    fn pignistic_decisions() {
        let frame = theta3();
        let d = decide_betp(&column(&frame, DEMPSTER_COL)).unwrap();
        assert_eq!(d.chosen, Subset::singleton(0));
        assert_eq!(d.scores.len(), 3);
        assert_eq!(
            decide_betp(&column(&frame, DISJUNCTIVE_COL))
                .unwrap()
                .chosen,
            Subset::singleton(0)
        );
        let cat = MassFunction::categorical(&frame, Subset::singleton(1)).unwrap();
        assert_eq!(decide_betp(&cat).unwrap().chosen, Subset::singleton(1));
    }

    #[test]
    fn bel_pl_decisions() {
        let frame = theta3();
        let cat = MassFunction::categorical(&frame, Subset::singleton(2)).unwrap();
        assert_eq!(decide_maxbel(&cat).unwrap().chosen, Subset::singleton(2));
        assert_eq!(decide_maxpl(&cat).unwrap().chosen, Subset::singleton(2));
        let vacuous = MassFunction::vacuous(&frame);
        assert_eq!(
            decide_maxbel(&vacuous).unwrap().chosen,
            Subset::singleton(0)
        );
        assert_eq!(decide_maxpl(&vacuous).unwrap().chosen, Subset::singleton(0));

        let s1 = column(&frame, [0.410, 0.006, 0.039, 0.026, 0.094, 0.199, 0.226]);
        let d = decide_maxpl(&s1).unwrap();
        assert_eq!(d.chosen, Subset::singleton(0));
        let pl: Vec<f64> = d.scores.iter().map(|s| s.1).collect();
        for (got, want) in pl.iter().zip([0.769, 0.470, 0.545]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn expected_loss_cases() {
        let frame = theta3();
        let m = column(&frame, DEMPSTER_COL);
        let d = expected_loss(&m, &LossMatrix::zero_one(&frame)).unwrap();
        assert_eq!(d.chosen, Subset::singleton(0));
        assert_eq!(d.direction, Direction::Min);
        // 1 − BetP(θ1) = 1 − 0.4256667
        assert!((d.score_of(d.chosen).unwrap() - 0.574_333_333_333_333_3).abs() < 1e-12);

        let constant = LossMatrix::new(frame.singletons().collect(), vec![vec![2.0; 3]; 3]);
        assert_eq!(
            expected_loss(&m, &constant).unwrap().chosen,
            Subset::singleton(0)
        );

        let short = LossMatrix::new(frame.singletons().collect(), vec![vec![0.0; 2]; 3]);
        assert!(matches!(
            expected_loss(&m, &short),
            Err(Error::IncompleteLossMatrix(_))
        ));
        let negative = LossMatrix::new(vec![Subset::singleton(0)], vec![vec![-1.0, 0.0, 0.0]]);
        assert!(matches!(
            expected_loss(&m, &negative),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn appriou_decisions() {
        let frame = theta3();
        let dempster = column(&frame, DEMPSTER_COL);
        let d = decide_appriou(&dempster, 0.5, None).unwrap();
        assert_eq!(d.chosen, Subset::from_bits(0b011));
        // pl(θ1 ∪ θ2) = 1 − 0.168 over √2; pl(θ1) = 0.502
        let composite = d.score_of(Subset::from_bits(0b011)).unwrap();
        assert!((composite - 0.832 / 2f64.sqrt()).abs() < 1e-12);
        assert!((d.score_of(Subset::singleton(0)).unwrap() - 0.502).abs() < 1e-12);
        assert_eq!(d.scores.len(), 7);

        assert_eq!(
            decide_appriou(&column(&frame, DISJUNCTIVE_COL), 0.5, None)
                .unwrap()
                .chosen,
            Subset::singleton(0)
        );
        assert_eq!(
            decide_appriou(&column(&frame, MIXED_COL), 0.5, None)
                .unwrap()
                .chosen,
            Subset::singleton(0)
        );

        assert_eq!(
            decide_appriou(&dempster, 0.0, None).unwrap().chosen,
            frame.full()
        );
        assert!(decide_appriou(&dempster, 1.0, None)
            .unwrap()
            .chosen
            .is_singleton());
        assert!(decide_appriou(&dempster, 1.5, None).is_err());

        // down-weighting θ1 ∪ θ2 hands the win to Θ: 1 / √3 > 0.773 / √2 > 0.502
        let weights = BTreeMap::from([(Subset::from_bits(0b011), 0.1)]);
        assert_eq!(
            decide_appriou(&dempster, 0.5, Some(&weights))
                .unwrap()
                .chosen,
            frame.full()
        );
    }

    #[test]
    fn distance_decisions() {
        let frame = theta3();
        let type1 = DistanceOptions::type1();
        assert_eq!(
            decide_distance(&column(&frame, DEMPSTER_COL), &type1)
                .unwrap()
                .chosen,
            Subset::singleton(0)
        );
        assert_eq!(
            decide_distance(&column(&frame, DISJUNCTIVE_COL), &type1)
                .unwrap()
                .chosen,
            Subset::from_bits(0b011)
        );
        assert_eq!(
            decide_distance(&column(&frame, MIXED_COL), &type1)
                .unwrap()
                .chosen,
            Subset::from_bits(0b011)
        );

        let t23 = Subset::from_bits(0b110);
        let d = decide_distance(&MassFunction::categorical(&frame, t23).unwrap(), &type1).unwrap();
        assert_eq!(d.chosen, t23);
        assert_eq!(d.score_of(t23), Some(0.0));
        assert_eq!(d.scores.len(), 6);
        assert!(d.score_of(frame.full()).is_none());
    }

    #[test]
    fn distance_options() {
        let frame = theta3();
        let m = MassFunction::vacuous(&frame);
        assert_eq!(
            DistanceOptions::type1()
                .with_max_card(1)
                .candidate_set(&frame)
                .unwrap(),
            frame.singletons().collect::<Vec<_>>()
        );
        let mut with_theta = DistanceOptions::type2(0.5);
        with_theta.include_theta = true;
        assert_eq!(with_theta.candidate_set(&frame).unwrap().len(), 7);
        assert_eq!(
            decide_distance(&m, &with_theta).unwrap().chosen,
            frame.full()
        );

        assert_eq!(
            decide_distance(&m, &DistanceOptions::type2(0.0)).unwrap_err(),
            Error::AlphaOutOfRange(0.0)
        );
        let empty = DistanceOptions {
            candidates: Some(vec![]),
            ..DistanceOptions::type1()
        };
        assert_eq!(
            decide_distance(&m, &empty).unwrap_err(),
            Error::EmptyCandidateSet
        );
        let only_pairs = DistanceOptions {
            candidates: Some(vec![Subset::from_bits(0b011)]),
            ..DistanceOptions::type1().with_max_card(1)
        };
        assert_eq!(
            decide_distance(&m, &only_pairs).unwrap_err(),
            Error::EmptyCandidateSet
        );
    }

    #[test]
    fn spec_dispatch_and_ids() {
        let frame = theta3();
        let m = column(&frame, DEMPSTER_COL);
        let specs = [
            DecisionSpec::Betp,
            DecisionSpec::MaxBel,
            DecisionSpec::MaxPl,
            DecisionSpec::Loss {
                losses: LossMatrix::zero_one(&frame),
            },
            DecisionSpec::Appriou {
                r: 0.5,
                weights: None,
            },
            DecisionSpec::Distance(DistanceOptions::type1()),
            DecisionSpec::Distance(DistanceOptions::type2(0.7)),
        ];
        for (spec, id) in specs.iter().zip(DecisionRule::ALL) {
            assert_eq!(spec.rule(), id);
            assert_eq!(spec.decide(&m).unwrap().rule, id);
            assert_eq!(id.as_str().parse::<DecisionRule>().unwrap(), id);
        }
        let json = serde_json::to_string(&decide_betp(&m).unwrap()).unwrap();
        assert!(
            json.starts_with(r#"{"rule":"betp","direction":"max","chosen":"{θ1}""#),
            "{json}"
        );
    }
}
