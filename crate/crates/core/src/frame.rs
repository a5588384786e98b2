//! Frame of discernment and the bitmask encoding of its power set.
//!
//! A [`Subset`] is a plain `u32` bitmask: bit `i` is set when the `i`-th label
//! of the frame is a member. Subsets do not carry their frame; operations that
//! receive both check membership with [`Frame::check`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of hypotheses.
pub const MAX_FRAME_SIZE: usize = 24;

/// An element of the power set, encoded as a bitmask over frame positions.
///
/// Serializes as its raw bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn singleton(index: usize) -> Self {
        Subset(1 << index)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    pub const fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    /// Positions of the member hypotheses, ascending.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let idx = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(idx)
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({:#b})", self.0)
    }
}

/// Ordered set of mutually exclusive hypotheses.
///
/// Cloning is cheap: labels are shared.
#[derive(Clone)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::FrameTooLarge(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            labels: labels.into(),
        })
    }

    /// Frame with labels `θ1..θn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Frame::new((1..=n).map(|i| format!("θ{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full(&self) -> Subset {
        Subset(((1u64 << self.len()) - 1) as u32)
    }

    /// Number of elements of the power set, `2^n`.
    pub fn power_set_len(&self) -> usize {
        1usize << self.len()
    }

    /// All subsets in increasing bitmask order, from ∅ to Θ.
    pub fn power_set(&self) -> impl Iterator<Item = Subset> {
        (0..=self.full().0).map(Subset)
    }

    pub fn singletons(&self) -> impl Iterator<Item = Subset> {
        (0..self.len()).map(Subset::singleton)
    }

    pub fn complement(&self, a: Subset) -> Subset {
        Subset(!a.0 & self.full().0)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Fails with `FrameMismatch` if `a` has bits outside this frame.
    pub fn check(&self, a: Subset) -> Result<Subset> {
        if a.0 & !self.full().0 == 0 {
            Ok(a)
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub fn ensure_same(&self, other: &Frame) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub fn subset_of<'a, I>(&self, labels: I) -> Result<Subset>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels.into_iter().try_fold(Subset::EMPTY, |acc, label| {
            self.index_of(label)
                .map(|i| acc.union(Subset::singleton(i)))
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))
        })
    }

    /// Parses the textual notation `{}` / `{a|b}`.
    pub fn parse_subset(&self, text: &str) -> Result<Subset> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::BadSubset(text.to_string()))?
            .trim();
        if inner.is_empty() {
            return Ok(Subset::EMPTY);
        }
        self.subset_of(inner.split('|').map(str::trim))
    }

    pub fn format_subset(&self, a: Subset) -> String {
        let names: Vec<&str> = a.elements().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join("|"))
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Frame").field(&self.labels).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta3() -> Frame {
        Frame::new(["θ1", "θ2", "θ3"]).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(theta3().len(), 3);
        assert_eq!(Frame::new(["a"]).unwrap().len(), 1);
        assert_eq!(
            Frame::new(["a", "a"]).unwrap_err(),
            Error::DuplicateLabel("a".into())
        );
        assert_eq!(
            Frame::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyFrame
        );
        assert_eq!(Frame::new([""]).unwrap_err(), Error::EmptyLabel);
        assert_eq!(Frame::numbered(25).unwrap_err(), Error::FrameTooLarge(25));
        assert_eq!(Frame::numbered(24).unwrap().full().bits(), (1 << 24) - 1);
    }

    #[test]
    fn power_set_order() {
        let frame = theta3();
        let all: Vec<String> = frame.power_set().map(|s| frame.format_subset(s)).collect();
        assert_eq!(
            all,
            [
                "{}",
                "{θ1}",
                "{θ2}",
                "{θ1|θ2}",
                "{θ3}",
                "{θ1|θ3}",
                "{θ2|θ3}",
                "{θ1|θ2|θ3}"
            ]
        );
        let one = Frame::new(["a"]).unwrap();
        assert_eq!(
            one.power_set().collect::<Vec<_>>(),
            [Subset::EMPTY, Subset::from_bits(1)]
        );
        assert_eq!(Frame::numbered(2).unwrap().power_set().count(), 4);
    }

    #[test]
    fn set_operations() {
        let t1 = Subset::singleton(0);
        let t12 = Subset::from_bits(0b011);
        let t3 = Subset::singleton(2);
        assert_eq!(t1.intersection(t12), t1);
        assert_eq!(t1.union(t3), Subset::from_bits(0b101));
        assert_eq!(theta3().full().cardinality(), 3);
        assert!(t1.is_subset_of(t12));
        assert!(!t12.is_subset_of(t1));
        assert_eq!(theta3().complement(t12), t3);
        assert_eq!(t12.elements().collect::<Vec<_>>(), [0, 1]);
    }

    #[test]
    fn frame_checks() {
        let frame = theta3();
        assert!(frame.check(Subset::from_bits(0b111)).is_ok());
        assert_eq!(
            frame.check(Subset::from_bits(0b1000)).unwrap_err(),
            Error::FrameMismatch
        );
        let other = Frame::new(["a", "b", "c"]).unwrap();
        assert_eq!(frame.ensure_same(&other).unwrap_err(), Error::FrameMismatch);
        assert!(frame.ensure_same(&theta3()).is_ok());
    }

    #[test]
    fn notation_round_trip() {
        let frame = theta3();
        assert_eq!(frame.parse_subset("{}").unwrap(), Subset::EMPTY);
        assert_eq!(
            frame.parse_subset("{θ1|θ3}").unwrap(),
            Subset::from_bits(0b101)
        );
        assert_eq!(
            frame.parse_subset(" { θ2 } ").unwrap(),
            Subset::singleton(1)
        );
        assert!(matches!(frame.parse_subset("θ1"), Err(Error::BadSubset(_))));
        assert_eq!(
            frame.parse_subset("{θ4}").unwrap_err(),
            Error::UnknownLabel("θ4".into())
        );
        for s in frame.power_set() {
            assert_eq!(frame.parse_subset(&frame.format_subset(s)).unwrap(), s);
        }
    }
}
