//! Jaccard similarity between focal sets and the Jousselme distance.

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::massfn::MassFunction;

/// Largest frame for which [`JaccardMatrix::dense`] will precompute entries.
pub const DENSE_MAX_FRAME: usize = 10;

const RADICAND_FLOOR: f64 = -1e-12;

/// `|a ∩ b| / |a ∪ b|`, with `D(∅, ∅) = 1` and `D(∅, b) = 0` otherwise.
pub fn jaccard(a: Subset, b: Subset) -> f64 {
    let union = a.union(b).cardinality();
    if union == 0 {
        1.0
    } else {
        f64::from(a.intersection(b).cardinality()) / f64::from(union)
    }
}

/// Similarity matrix over the power set of a frame.
///
/// Entries are computed on demand; [`JaccardMatrix::dense`] fills the whole
/// table once at construction for small frames and is read-only afterwards.
#[derive(Clone, Debug)]
pub struct JaccardMatrix {
    frame: Frame,
    table: Option<Vec<f64>>,
}

impl JaccardMatrix {
    pub fn lazy(frame: &Frame) -> Self {
        JaccardMatrix {
            frame: frame.clone(),
            table: None,
        }
    }

    pub fn dense(frame: &Frame) -> Result<Self> {
        if frame.len() > DENSE_MAX_FRAME {
            return Err(Error::FrameTooLarge(frame.len()));
        }
        let side = frame.power_set_len();
        let table = (0..side * side)
            .map(|i| {
                jaccard(
                    Subset::from_bits((i / side) as u32),
                    Subset::from_bits((i % side) as u32),
                )
            })
            .collect();
        Ok(JaccardMatrix {
            frame: frame.clone(),
            table: Some(table),
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn get(&self, a: Subset, b: Subset) -> Result<f64> {
        self.frame.check(a)?;
        self.frame.check(b)?;
        Ok(self.entry(a, b))
    }

    fn entry(&self, a: Subset, b: Subset) -> f64 {
        match &self.table {
            Some(table) => {
                let side = self.frame.power_set_len();
                table[a.bits() as usize * side + b.bits() as usize]
            }
            None => jaccard(a, b),
        }
    }

    /// Jousselme distance `sqrt(½ (m1 − m2)ᵀ D (m1 − m2))`, evaluated over the
    /// union of the two focal sets.
    pub fn distance(&self, m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
        self.frame.ensure_same(m1.frame())?;
        self.frame.ensure_same(m2.frame())?;

        let mut diff: Vec<(Subset, f64)> = Vec::with_capacity(m1.focal_count() + m2.focal_count());
        let (mut left, mut right) = (m1.focal().peekable(), m2.focal().peekable());
        // both focal lists are sorted by bitmask
        loop {
            match (left.peek().copied(), right.peek().copied()) {
                (Some((a, va)), Some((b, vb))) if a == b => {
                    diff.push((a, va - vb));
                    left.next();
                    right.next();
                }
                (Some((a, va)), Some((b, _))) if a < b => {
                    diff.push((a, va));
                    left.next();
                }
                (_, Some((b, vb))) => {
                    diff.push((b, -vb));
                    right.next();
                }
                (Some((a, va)), None) => {
                    diff.push((a, va));
                    left.next();
                }
                (None, None) => break,
            }
        }

        let mut quad = 0.0;
        for (i, &(a, da)) in diff.iter().enumerate() {
            quad += da * da * self.entry(a, a);
            for &(b, db) in &diff[i + 1..] {
                quad += 2.0 * da * db * self.entry(a, b);
            }
        }
        let radicand = 0.5 * quad;
        if radicand < RADICAND_FLOOR {
            return Err(Error::NumericalError(radicand));
        }
        Ok(radicand.max(0.0).sqrt())
    }
}

/// Jousselme distance with lazily evaluated Jaccard weights.
pub fn jousselme(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    JaccardMatrix::lazy(m1.frame()).distance(m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta3() -> Frame {
        Frame::numbered(3).unwrap()
    }

    #[test]
    fn jaccard_entries() {
        let t1 = Subset::singleton(0);
        assert_eq!(jaccard(t1, Subset::from_bits(0b011)), 0.5);
        assert_eq!(jaccard(t1, Subset::singleton(1)), 0.0);
        assert_eq!(jaccard(Subset::EMPTY, Subset::EMPTY), 1.0);
        assert_eq!(jaccard(Subset::EMPTY, t1), 0.0);
    }

    #[test]
    fn dense_agrees_with_lazy() {
        let frame = theta3();
        let dense = JaccardMatrix::dense(&frame).unwrap();
        let lazy = JaccardMatrix::lazy(&frame);
        for a in frame.power_set() {
            assert_eq!(dense.get(a, a).unwrap(), 1.0);
            for b in frame.power_set() {
                assert_eq!(dense.get(a, b).unwrap(), lazy.get(a, b).unwrap());
                assert_eq!(dense.get(a, b).unwrap(), dense.get(b, a).unwrap());
            }
        }
        assert_eq!(
            dense.get(Subset::from_bits(8), Subset::EMPTY).unwrap_err(),
            Error::FrameMismatch
        );
        assert!(JaccardMatrix::dense(&Frame::numbered(11).unwrap()).is_err());
    }

    #[test]
    fn categorical_distances() {
        let frame = theta3();
        let cat = |bits| MassFunction::categorical(&frame, Subset::from_bits(bits)).unwrap();
        // ½(D_AA − 2 D_AB + D_BB) = 1 − J(A, B)
        let d = jousselme(&cat(0b001), &cat(0b011)).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert_eq!(jousselme(&cat(0b001), &cat(0b010)).unwrap(), 1.0);
        assert_eq!(jousselme(&cat(0b101), &cat(0b101)).unwrap(), 0.0);
    }

    #[test]
    fn identity_on_general_bba() {
        let frame = theta3();
        let m = MassFunction::new(
            &frame,
            [
                (Subset::from_bits(0b001), 0.3),
                (Subset::from_bits(0b110), 0.45),
                (frame.full(), 0.25),
            ],
        )
        .unwrap();
        assert_eq!(jousselme(&m, &m).unwrap(), 0.0);
        let other = MassFunction::vacuous(&Frame::new(["x", "y", "z"]).unwrap());
        assert_eq!(jousselme(&m, &other).unwrap_err(), Error::FrameMismatch);
    }
}
