//! Basic belief assignments and the set functions derived from them.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};

/// Allowed deviation of the total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `1 - m(∅)` at or below this value is treated as total conflict.
pub(crate) const CONFLICT_EPS: f64 = 1e-12;

/// A mass function over a frame, storing focal elements only.
///
/// Mass on ∅ is representable so the unnormalized conjunctive rule can be
/// expressed; every other constructor keeps `m(∅) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<Subset, f64>,
}

impl MassFunction {
    /// Builds a mass function, rejecting negative values and sums that are
    /// off by more than [`NORMALIZATION_TOLERANCE`]. Zero entries are dropped,
    /// repeated subsets accumulate.
    pub fn new<I>(frame: &Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let masses = collect_masses(frame, assignments)?;
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(MassFunction {
            frame: frame.clone(),
            masses,
        })
    }

    /// Like [`MassFunction::new`] but rescales by the actual total, for data
    /// printed with limited precision.
    pub fn renormalized<I>(frame: &Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut masses = collect_masses(frame, assignments)?;
        let total: f64 = masses.values().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::NotNormalized(total));
        }
        masses.values_mut().for_each(|v| *v /= total);
        Ok(MassFunction {
            frame: frame.clone(),
            masses,
        })
    }

    /// Total ignorance: `m(Θ) = 1`.
    pub fn vacuous(frame: &Frame) -> Self {
        MassFunction {
            frame: frame.clone(),
            masses: BTreeMap::from([(frame.full(), 1.0)]),
        }
    }

    pub fn categorical(frame: &Frame, a: Subset) -> Result<Self> {
        frame.check(a)?;
        if a.is_empty() {
            return Err(Error::EmptyFocal);
        }
        Ok(MassFunction {
            frame: frame.clone(),
            masses: BTreeMap::from([(a, 1.0)]),
        })
    }

    /// Simple support function `m(a) = alpha`, `m(Θ) = 1 - alpha`.
    pub fn simple(frame: &Frame, a: Subset, alpha: f64) -> Result<Self> {
        frame.check(a)?;
        if a.is_empty() {
            return Err(Error::EmptyFocal);
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if a == frame.full() {
            return Ok(Self::vacuous(frame));
        }
        Ok(Self::from_map(
            frame,
            [(a, alpha), (frame.full(), 1.0 - alpha)],
        ))
    }

    /// Assembles a mass function from combination output. Entries are summed
    /// per subset and zeros dropped; no normalization check.
    pub(crate) fn from_map<I>(frame: &Frame, entries: I) -> Self
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut masses = BTreeMap::new();
        for (a, v) in entries {
            *masses.entry(a).or_insert(0.0) += v;
        }
        masses.retain(|_, v| *v > 0.0);
        MassFunction {
            frame: frame.clone(),
            masses,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// `m(a)`, zero for non-focal subsets.
    pub fn mass(&self, a: Subset) -> f64 {
        self.masses.get(&a).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses, in increasing bitmask order.
    pub fn focal(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(&a, &v)| (a, v))
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    /// Mass on ∅.
    pub fn conflict(&self) -> f64 {
        self.mass(Subset::EMPTY)
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.masses.len() == 1 && self.masses.contains_key(&self.frame.full())
    }

    /// Credibility: mass of the nonempty subsets of `a`.
    pub fn bel(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self
            .focal()
            .filter(|(b, _)| !b.is_empty() && b.is_subset_of(a))
            .map(|(_, v)| v)
            .sum())
    }

    /// Plausibility: mass of the subsets intersecting `a`.
    pub fn pl(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self
            .focal()
            .filter(|(b, _)| b.intersects(a))
            .map(|(_, v)| v)
            .sum())
    }

    /// Pignistic probability of every singleton, indexed by frame position.
    /// The value for a composite set is the sum over its elements.
    pub fn betp(&self) -> Result<Vec<f64>> {
        let normalizer = 1.0 - self.conflict();
        if normalizer <= CONFLICT_EPS {
            return Err(Error::TotalConflict);
        }
        let mut probs = vec![0.0; self.frame.len()];
        for (y, v) in self.focal().filter(|(y, _)| !y.is_empty()) {
            let share = v / (f64::from(y.cardinality()) * normalizer);
            for i in y.elements() {
                probs[i] += share;
            }
        }
        Ok(probs)
    }

    /// Largest absolute difference over the union of both focal sets.
    pub fn max_abs_diff(&self, other: &MassFunction) -> f64 {
        self.masses
            .keys()
            .chain(other.masses.keys())
            .map(|&a| (self.mass(a) - other.mass(a)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_doc(&self) -> MassFunctionDoc {
        MassFunctionDoc {
            frame: self.frame.labels().to_vec(),
            masses: self
                .focal()
                .map(|(a, v)| (self.frame.format_subset(a), v))
                .collect(),
        }
    }
}

fn collect_masses<I>(frame: &Frame, assignments: I) -> Result<BTreeMap<Subset, f64>>
where
    I: IntoIterator<Item = (Subset, f64)>,
{
    let mut masses = BTreeMap::new();
    for (a, v) in assignments {
        frame.check(a)?;
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::NegativeMass {
                subset: frame.format_subset(a),
                mass: v,
            });
        }
        *masses.entry(a).or_insert(0.0) += v;
    }
    masses.retain(|_, v| *v > 0.0);
    Ok(masses)
}

/// Wire form of a mass function: frame labels plus masses keyed by subset
/// notation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MassFunctionDoc {
    pub frame: Vec<String>,
    pub masses: BTreeMap<String, f64>,
}

impl MassFunctionDoc {
    pub fn into_mass(self, renormalize: bool) -> Result<MassFunction> {
        let frame = Frame::new(self.frame.iter().cloned())?;
        self.build(&frame, renormalize)
    }

    /// Builds against an existing frame, which must have the same labels.
    pub fn build(&self, frame: &Frame, renormalize: bool) -> Result<MassFunction> {
        if frame.labels() != self.frame.as_slice() {
            return Err(Error::FrameMismatch);
        }
        let entries = self
            .masses
            .iter()
            .map(|(k, &v)| Ok((frame.parse_subset(k)?, v)))
            .collect::<Result<Vec<_>>>()?;
        if renormalize {
            MassFunction::renormalized(frame, entries)
        } else {
            MassFunction::new(frame, entries)
        }
    }
}

impl Serialize for MassFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Masses<'a>(&'a MassFunction);

        impl Serialize for Masses<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.focal_count()))?;
                for (a, v) in self.0.focal() {
                    map.serialize_entry(&self.0.frame.format_subset(a), &v)?;
                }
                map.end()
            }
        }

        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("frame", self.frame.labels())?;
        map.serialize_entry("masses", &Masses(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for MassFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        MassFunctionDoc::deserialize(deserializer)?
            .into_mass(false)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta3() -> Frame {
        Frame::numbered(3).unwrap()
    }

    fn s1(frame: &Frame) -> MassFunction {
        let values = [0.410, 0.006, 0.039, 0.026, 0.094, 0.199, 0.226];
        MassFunction::new(frame, (1..=7).map(Subset::from_bits).zip(values)).unwrap()
    }

    #[test]
    fn construction_checks() {
        let frame = theta3();
        assert_eq!(s1(&frame).focal_count(), 7);
        assert!(MassFunction::new(&frame, [(frame.full(), 1.0)])
            .unwrap()
            .is_vacuous());
        assert!(matches!(
            MassFunction::new(&frame, [(Subset::singleton(0), 0.6)]),
            Err(Error::NotNormalized(v)) if (v - 0.6).abs() < 1e-15
        ));
        assert!(matches!(
            MassFunction::new(&frame, [(Subset::singleton(0), -0.1), (frame.full(), 1.1)]),
            Err(Error::NegativeMass { .. })
        ));
        assert_eq!(
            MassFunction::new(&frame, [(Subset::from_bits(8), 1.0)]).unwrap_err(),
            Error::FrameMismatch
        );
        let zeros =
            MassFunction::new(&frame, [(Subset::singleton(0), 0.0), (frame.full(), 1.0)]).unwrap();
        assert_eq!(zeros.focal_count(), 1);
    }

    #[test]
    fn renormalize_rescales() {
        let frame = theta3();
        let m =
            MassFunction::renormalized(&frame, [(Subset::singleton(0), 0.3), (frame.full(), 0.3)])
                .unwrap();
        assert_eq!(m.mass(Subset::singleton(0)), 0.5);
        assert!(MassFunction::renormalized(&frame, [(frame.full(), 0.0)]).is_err());
    }

    #[test]
    fn categorical_and_simple() {
        let frame = theta3();
        let t23 = Subset::from_bits(0b110);
        let cat = MassFunction::categorical(&frame, t23).unwrap();
        assert_eq!(cat.mass(t23), 1.0);
        assert!(MassFunction::categorical(&frame, frame.full())
            .unwrap()
            .is_vacuous());
        assert_eq!(
            MassFunction::categorical(&frame, Subset::EMPTY).unwrap_err(),
            Error::EmptyFocal
        );

        let t1 = Subset::singleton(0);
        let simple = MassFunction::simple(&frame, t1, 0.7).unwrap();
        assert_eq!(simple.mass(t1), 0.7);
        assert!((simple.mass(frame.full()) - 0.3).abs() < 1e-15);
        assert_eq!(
            MassFunction::simple(&frame, t1, 1.0).unwrap(),
            MassFunction::categorical(&frame, t1).unwrap()
        );
        assert!(MassFunction::simple(&frame, t1, 0.0).unwrap().is_vacuous());
        assert_eq!(
            MassFunction::simple(&frame, t1, 1.5).unwrap_err(),
            Error::AlphaOutOfRange(1.5)
        );
        assert!(MassFunction::simple(&frame, frame.full(), 0.4)
            .unwrap()
            .is_vacuous());
    }

    #[test]
    fn bel_pl_on_first_source() {
        let frame = theta3();
        let m = s1(&frame);
        let bel = m.bel(Subset::from_bits(0b011)).unwrap();
        assert!((bel - 0.455).abs() < 1e-12, "{bel}");
        let pl = m.pl(Subset::singleton(0)).unwrap();
        assert!((pl - 0.769).abs() < 1e-12, "{pl}");
        assert!((m.bel(frame.full()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            m.bel(Subset::from_bits(0b1000)).unwrap_err(),
            Error::FrameMismatch
        );

        let vacuous = MassFunction::vacuous(&frame);
        for a in frame.power_set().skip(1) {
            assert_eq!(vacuous.pl(a).unwrap(), 1.0);
            if a != frame.full() {
                assert_eq!(vacuous.bel(a).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn pignistic_values() {
        let frame = theta3();
        let dempster_column = [0.369, 0.227, 0.025, 0.168, 0.049, 0.103, 0.059];
        let m =
            MassFunction::new(&frame, (1..=7).map(Subset::from_bits).zip(dempster_column)).unwrap();
        let p = m.betp().unwrap();
        // 0.369 + 0.025/2 + 0.049/2 + 0.059/3, and likewise for θ2, θ3
        let expected = [
            0.425_666_666_666_666_7,
            0.310_666_666_666_666_7,
            0.263_666_666_666_666_7,
        ];
        for (got, want) in p.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }

        let uniform = MassFunction::vacuous(&frame).betp().unwrap();
        assert!(uniform.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));

        let bayesian = MassFunction::new(
            &frame,
            [
                (Subset::singleton(0), 0.2),
                (Subset::singleton(1), 0.5),
                (Subset::singleton(2), 0.3),
            ],
        )
        .unwrap();
        assert_eq!(bayesian.betp().unwrap(), [0.2, 0.5, 0.3]);

        let conflicted = MassFunction::from_map(&frame, [(Subset::EMPTY, 1.0)]);
        assert_eq!(conflicted.betp().unwrap_err(), Error::TotalConflict);
    }

    #[test]
    fn json_shape() {
        let frame = theta3();
        let m = MassFunction::simple(&frame, Subset::from_bits(0b011), 0.25).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"frame":["θ1","θ2","θ3"],"masses":{"{θ1|θ2}":0.25,"{θ1|θ2|θ3}":0.75}}"#
        );
        let back: MassFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);

        let bad = r#"{"frame":["a","b"],"masses":{"{a}":0.5}}"#;
        assert!(serde_json::from_str::<MassFunction>(bad).is_err());
        let doc: MassFunctionDoc = serde_json::from_str(bad).unwrap();
        assert_eq!(doc.into_mass(true).unwrap().mass(Subset::singleton(0)), 1.0);
    }
}
