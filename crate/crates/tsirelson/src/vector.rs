//! Finitely supported rational vectors indexed by positive integers.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// A finitely supported vector: a sparse map from positions `>= 1` to nonzero
/// rational coefficients. The zero vector is the empty map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FinVec {
    entries: BTreeMap<u32, Rational>,
}

impl FinVec {
    pub fn zero() -> Self {
        FinVec::default()
    }

    /// Build from `(position, coefficient)` pairs. Zero coefficients are
    /// dropped; duplicate positions and position `0` are rejected.
    pub fn from_entries<I: IntoIterator<Item = (u32, Rational)>>(entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (pos, coeff) in entries {
            if pos == 0 {
                return Err(Error::Invalid("vector positions start at 1".into()));
            }
            if coeff.is_zero() {
                continue;
            }
            if map.insert(pos, coeff).is_some() {
                return Err(Error::Invalid(format!("duplicate position {pos}")));
            }
        }
        Ok(FinVec { entries: map })
    }

    /// The basis vector `e_pos`.
    pub fn unit(pos: u32) -> Result<Self> {
        FinVec::from_entries([(pos, Rational::from_integer(1.into()))])
    }

    /// `e_a + e_{a+1} + ... + e_b`.
    pub fn segment_ones(a: u32, b: u32) -> Result<Self> {
        if a == 0 || a > b {
            return Err(Error::Invalid(format!("bad segment {a}..{b}")));
        }
        FinVec::from_entries((a..=b).map(|p| (p, Rational::from_integer(1.into()))))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted support positions.
    pub fn support(&self) -> Vec<u32> {
        self.entries.keys().copied().collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_support(&self) -> Option<u32> {
        self.entries.keys().next().copied()
    }

    pub fn max_support(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }

    /// Coefficient at `pos` (zero off the support).
    pub fn coefficient(&self, pos: u32) -> Rational {
        self.entries.get(&pos).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterate `(position, coefficient)` in increasing position order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.entries.iter().map(|(p, c)| (*p, c))
    }

    /// Restriction to the positions in `[a, b]`.
    pub fn restrict_interval(&self, a: u32, b: u32) -> FinVec {
        FinVec {
            entries: self
                .entries
                .range(a..=b.max(a))
                .map(|(p, c)| (*p, c.clone()))
                .collect(),
        }
    }

    /// Restriction to an arbitrary set of positions.
    pub fn restrict_set(&self, positions: &[u32]) -> FinVec {
        FinVec {
            entries: positions
                .iter()
                .filter_map(|p| self.entries.get(p).map(|c| (*p, c.clone())))
                .collect(),
        }
    }

    /// Coordinatewise absolute value.
    pub fn abs(&self) -> FinVec {
        FinVec {
            entries: self.entries.iter().map(|(p, c)| (*p, c.abs())).collect(),
        }
    }

    /// Sum of two vectors (coefficients that cancel leave the support).
    pub fn add(&self, other: &FinVec) -> FinVec {
        let mut entries = self.entries.clone();
        for (p, c) in &other.entries {
            let v = entries.entry(*p).or_insert_with(Rational::zero);
            *v += c;
            if v.is_zero() {
                entries.remove(p);
            }
        }
        FinVec { entries }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> FinVec {
        if c.is_zero() {
            return FinVec::zero();
        }
        FinVec {
            entries: self.entries.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    /// Supremum norm.
    pub fn sup_norm(&self) -> Rational {
        self.entries.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> Rational {
        self.entries.values().map(|c| c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn construction_drops_zeros_and_rejects_bad_positions() {
        let v = FinVec::from_entries([(3, ratio(1, 2)), (5, ratio(0, 1))]).unwrap();
        assert_eq!(v.support(), vec![3]);
        assert!(FinVec::from_entries([(0, ratio(1, 1))]).is_err());
        assert!(FinVec::from_entries([(2, ratio(1, 1)), (2, ratio(1, 1))]).is_err());
    }

    #[test]
    fn restrict_interval_keeps_inside_positions() {
        let v = FinVec::segment_ones(2, 8).unwrap();
        let w = v.restrict_interval(4, 6);
        assert_eq!(w.support(), vec![4, 5, 6]);
        // Restriction is idempotent and commutes with nesting.
        assert_eq!(w.restrict_interval(4, 6), w);
        assert_eq!(v.restrict_interval(4, 6).restrict_interval(5, 9).support(), vec![5, 6]);
    }

    #[test]
    fn restrict_to_disjoint_window_is_zero() {
        let v = FinVec::segment_ones(2, 4).unwrap();
        assert!(v.restrict_interval(7, 9).is_zero());
    }

    #[test]
    fn addition_cancels() {
        let v = FinVec::from_entries([(1, ratio(1, 2)), (2, ratio(1, 1))]).unwrap();
        let w = FinVec::from_entries([(1, ratio(-1, 2)), (3, ratio(2, 1))]).unwrap();
        let s = v.add(&w);
        assert_eq!(s.support(), vec![2, 3]);
        assert_eq!(s.coefficient(2), ratio(1, 1));
    }

    #[test]
    fn norms_of_simple_vectors() {
        let v = FinVec::from_entries([(1, ratio(-3, 2)), (4, ratio(1, 2))]).unwrap();
        assert_eq!(v.sup_norm(), ratio(3, 2));
        assert_eq!(v.l1_norm(), ratio(2, 1));
        assert_eq!(FinVec::zero().sup_norm(), ratio(0, 1));
    }

    #[test]
    fn scale_by_zero_gives_zero_vector() {
        let v = FinVec::segment_ones(1, 3).unwrap();
        assert!(v.scale(&ratio(0, 1)).is_zero());
        assert_eq!(v.scale(&ratio(-2, 1)).coefficient(2), ratio(-2, 1));
    }
}
