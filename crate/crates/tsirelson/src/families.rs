//! Compact hereditary families of finite subsets of the positive integers.
//!
//! A family descriptor denotes a set of finite subsets of `{1, 2, 3, ...}`
//! that is hereditary (closed under subsets) and compact in the product
//! topology. Descriptors drive three kinds of questions:
//!
//! * membership and admissibility witnesses, used by the norm engine;
//! * topological derivatives and the derived index, used by the classifier;
//! * structural profiles (how many non-singleton members, whether arbitrarily
//!   large "gap" integers are straddled by no member).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite subset of the positive integers, kept sorted strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet(Vec<u32>);

impl FinSet {
    /// Build from arbitrary elements; sorts, and rejects zeros and duplicates.
    pub fn new(mut elements: Vec<u32>) -> Result<Self> {
        elements.sort_unstable();
        if elements.first() == Some(&0) {
            return Err(Error::Invalid("set elements start at 1".into()));
        }
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate set element".into()));
        }
        Ok(FinSet(elements))
    }

    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub fn singleton(n: u32) -> Self {
        FinSet(vec![n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn contains(&self, n: u32) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    /// The set with one extra element (which must not already be present).
    pub fn with(&self, n: u32) -> Result<FinSet> {
        let mut v = self.0.clone();
        v.push(n);
        FinSet::new(v)
    }

    /// All subsets of this set (used for hereditary closure; exponential).
    pub fn subsets(&self) -> Vec<FinSet> {
        let mut out = vec![FinSet::empty()];
        for &el in &self.0 {
            let mut extended: Vec<FinSet> = out
                .iter()
                .map(|s| {
                    let mut v = s.0.clone();
                    v.push(el);
                    FinSet(v)
                })
                .collect();
            out.append(&mut extended);
        }
        out
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, el) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{el}")?;
        }
        write!(f, "}}")
    }
}

/// Descriptor of a compact hereditary family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Family {
    /// All sets of cardinality at most `k`.
    #[serde(rename = "AnK")]
    AtMostK { k: u32 },
    /// Sets whose cardinality is at most their least element.
    Schreier,
    /// The empty set and all singletons.
    Singletons,
    /// An explicit finite list of members (hereditarily closed).
    #[serde(rename = "ExplicitFinite")]
    Explicit { members: Vec<FinSet> },
    /// Subsets of `{1, 2^i}` for some `i >= 0`.
    #[serde(rename = "PairTailPow2")]
    PowerOfTwoPairs,
    /// Subsets of `{2i - 1, 2i}` for some `i >= 1`.
    #[serde(rename = "PairConsecutive")]
    ConsecutivePairs,
    /// Union of finitely many families.
    #[serde(rename = "UnionOf")]
    Union { parts: Vec<Family> },
}

/// The derived index of a family, possibly truncated at a configured cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum IndexValue {
    Finite(u32),
    InfiniteAboveCap(u32),
}

impl IndexValue {
    /// True when the index is known or forced to be at least 2.
    pub fn at_least_two(&self) -> bool {
        match self {
            IndexValue::Finite(n) => *n >= 2,
            IndexValue::InfiniteAboveCap(_) => true,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Finite(n) => write!(f, "Finite({n})"),
            IndexValue::InfiniteAboveCap(c) => write!(f, "InfiniteAboveCap({c})"),
        }
    }
}

/// Marks `m_1 < ... < m_n` realizing an admissibility constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityWitness {
    pub marks: FinSet,
}

/// How many members of size at least two a family has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonsingletonProfile {
    /// Finitely many; `max_element` is the largest integer appearing in any
    /// of them (0 when there are none).
    FiniteCount { count: usize, max_element: u32 },
    Infinite,
}

/// Whether arbitrarily large integers are straddled by no member of the
/// family (a member `M` straddles `n` when `min M <= n < max M`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapVerdict {
    /// Gap integers are unbounded; `samples` lists the first few.
    Unbounded { samples: Vec<u32> },
    /// All but finitely many integers are straddled.
    Bounded,
    /// No closed-form rule applies (unused by the built-in catalog).
    Unknown,
}

/// Internal closed-form description of the set of gap integers.
enum GapPattern {
    /// Every `n >= bound` is a gap.
    AllBeyond(u32),
    /// Every even `n >= bound` is a gap; odd integers are straddled.
    EvensBeyond(u32),
    /// Gaps are bounded (possibly none).
    BoundedOnly,
}

fn is_power_of_two(n: u32) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Largest power of two that is at most `n` (requires `n >= 1`).
fn prev_power_of_two(n: u32) -> u32 {
    1 << (31 - n.leading_zeros())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::AtMostK { k } => write!(f, "AnK({k})"),
            Family::Schreier => write!(f, "Schreier"),
            Family::Singletons => write!(f, "Singletons"),
            Family::Explicit { members } => write!(f, "ExplicitFinite({} members)", members.len()),
            Family::PowerOfTwoPairs => write!(f, "PairTailPow2"),
            Family::ConsecutivePairs => write!(f, "PairConsecutive"),
            Family::Union { parts } => {
                write!(f, "UnionOf(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Family {
    /// An explicit family from raw member lists, hereditarily closed.
    pub fn explicit(members: Vec<FinSet>) -> Family {
        let mut fam = Family::Explicit { members };
        let _ = fam.validate();
        fam
    }

    /// Internal constructor for the empty family (no members at all, not even
    /// the empty set). Produced only by derivative chains.
    fn empty_family() -> Family {
        Family::Explicit { members: Vec::new() }
    }

    /// Validate and canonicalize in place; returns human-readable warnings
    /// (currently only about hereditary closure of explicit families).
    pub fn validate(&mut self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        match self {
            Family::AtMostK { k } => {
                if *k == 0 {
                    return Err(Error::Invalid("AnK requires k >= 1".into()));
                }
            }
            Family::Schreier
            | Family::Singletons
            | Family::PowerOfTwoPairs
            | Family::ConsecutivePairs => {}
            Family::Explicit { members } => {
                let mut closed: BTreeSet<FinSet> = BTreeSet::new();
                for m in members.iter() {
                    // Re-canonicalize via the checking constructor.
                    let m = FinSet::new(m.0.clone())?;
                    for s in m.subsets() {
                        closed.insert(s);
                    }
                }
                closed.insert(FinSet::empty());
                let before = members.len();
                let closed: Vec<FinSet> = closed.into_iter().collect();
                if closed.len() != before {
                    warnings.push(format!(
                        "explicit family hereditarily closed: {} members listed, {} after closure",
                        before,
                        closed.len()
                    ));
                }
                *members = closed;
            }
            Family::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::Invalid("UnionOf requires at least one part".into()));
                }
                for p in parts.iter_mut() {
                    warnings.extend(p.validate()?);
                }
            }
        }
        Ok(warnings)
    }

    /// Membership test.
    pub fn contains(&self, f: &FinSet) -> bool {
        match self {
            Family::AtMostK { k } => f.len() <= *k as usize,
            Family::Schreier => match f.min() {
                None => true,
                Some(m) => f.len() <= m as usize,
            },
            Family::Singletons => f.len() <= 1,
            Family::Explicit { members } => members.binary_search(f).is_ok(),
            Family::PowerOfTwoPairs => match f.elements() {
                [] => true,
                [a] => is_power_of_two(*a),
                [a, b] => *a == 1 && is_power_of_two(*b),
                _ => false,
            },
            Family::ConsecutivePairs => match f.elements() {
                [] | [_] => true,
                [a, b] => *a % 2 == 1 && *b == *a + 1,
                _ => false,
            },
            Family::Union { parts } => parts.iter().any(|p| p.contains(f)),
        }
    }

    /// An upper bound on the size of any member, when one exists.
    pub fn max_member_size(&self) -> Option<usize> {
        match self {
            Family::AtMostK { k } => Some(*k as usize),
            Family::Schreier => None,
            Family::Singletons => Some(1),
            Family::Explicit { members } => Some(members.iter().map(FinSet::len).max().unwrap_or(0)),
            Family::PowerOfTwoPairs | Family::ConsecutivePairs => Some(2),
            Family::Union { parts } => {
                let mut best = 0;
                for p in parts {
                    best = best.max(p.max_member_size()?);
                }
                Some(best)
            }
        }
    }

    /// Search for a member `{m_1 < ... < m_n}` with `m_u` in the `u`-th box.
    /// Boxes are inclusive intervals that must be nonempty, start at 1 or
    /// later, and be strictly increasing (`hi_u < lo_{u+1}`). Returns the
    /// lexicographically greatest witness, which in particular maximizes
    /// `m_1`; an empty box list is witnessed by the empty set.
    pub fn witness_in_boxes(&self, boxes: &[(u32, u32)]) -> Result<Option<FinSet>> {
        for (i, &(lo, hi)) in boxes.iter().enumerate() {
            if lo == 0 || lo > hi {
                return Err(Error::Invalid(format!("box {i} = [{lo}, {hi}] is malformed")));
            }
            if i > 0 && boxes[i - 1].1 >= lo {
                return Err(Error::Invalid("boxes must be strictly increasing".into()));
            }
        }
        Ok(self.witness_in_boxes_unchecked(boxes))
    }

    fn witness_in_boxes_unchecked(&self, boxes: &[(u32, u32)]) -> Option<FinSet> {
        let n = boxes.len();
        match self {
            Family::AtMostK { k } => {
                if n <= *k as usize {
                    Some(FinSet(boxes.iter().map(|b| b.1).collect()))
                } else {
                    None
                }
            }
            Family::Schreier => {
                if n == 0 || n <= boxes[0].1 as usize {
                    Some(FinSet(boxes.iter().map(|b| b.1).collect()))
                } else {
                    None
                }
            }
            Family::Singletons => match boxes {
                [] => Some(FinSet::empty()),
                [(_, hi)] => Some(FinSet::singleton(*hi)),
                _ => None,
            },
            Family::PowerOfTwoPairs => match boxes {
                [] => Some(FinSet::empty()),
                [(lo, hi)] => {
                    let p = prev_power_of_two(*hi);
                    (p >= *lo).then(|| FinSet::singleton(p))
                }
                [(lo1, _), (lo2, hi2)] => {
                    if *lo1 != 1 {
                        return None;
                    }
                    let p = prev_power_of_two(*hi2);
                    // Boxes increase, so lo2 >= 2 and the power found is >= 2.
                    (p >= *lo2).then(|| FinSet(vec![1, p]))
                }
                _ => None,
            },
            Family::ConsecutivePairs => match boxes {
                [] => Some(FinSet::empty()),
                [(_, hi)] => Some(FinSet::singleton(*hi)),
                [(lo1, hi1), (lo2, hi2)] => {
                    // Greatest i with 2i-1 in box 1 and 2i in box 2.
                    let i_max = ((hi1 + 1) / 2).min(hi2 / 2);
                    let i_min = ((lo1 + 1).div_ceil(2)).max(lo2.div_ceil(2));
                    (i_max >= i_min && i_max >= 1).then(|| FinSet(vec![2 * i_max - 1, 2 * i_max]))
                }
                _ => None,
            },
            Family::Explicit { members } => members
                .iter()
                .filter(|m| {
                    m.len() == n
                        && m.elements()
                            .iter()
                            .zip(boxes)
                            .all(|(el, (lo, hi))| lo <= el && el <= hi)
                })
                .max()
                .cloned(),
            Family::Union { parts } => parts
                .iter()
                .filter_map(|p| p.witness_in_boxes_unchecked(boxes))
                .max(),
        }
    }

    /// Admissibility of a sequence of successive finite sets: is there a
    /// member `{m_1, ..., m_n}` with `m_1 <= E_1 < m_2 <= E_2 < ...`? Empty
    /// sets are dropped first (hereditarily harmless); non-successive input
    /// is an error. An empty sequence is vacuously admissible with the empty
    /// witness.
    pub fn admissible(&self, sets: &[FinSet]) -> Result<Option<AdmissibilityWitness>> {
        let sets: Vec<&FinSet> = sets.iter().filter(|s| !s.is_empty()).collect();
        for w in sets.windows(2) {
            if w[0].max().unwrap() >= w[1].min().unwrap() {
                return Err(Error::Invalid(format!(
                    "sets are not successive: {} does not precede {}",
                    w[0], w[1]
                )));
            }
        }
        let mut boxes = Vec::with_capacity(sets.len());
        let mut prev_max = 0u32;
        for &s in &sets {
            boxes.push((prev_max + 1, s.min().unwrap()));
            prev_max = s.max().unwrap();
        }
        Ok(self
            .witness_in_boxes(&boxes)?
            .map(|marks| AdmissibilityWitness { marks }))
    }

    /// One topological derivative: the members all of whose neighborhoods in
    /// the family are infinite, computed by closed-form rewrite rules. For
    /// hereditary families this is exactly the set of members with
    /// infinitely many one-point extensions inside the family.
    pub fn derivative(&self) -> Result<Family> {
        match self {
            Family::AtMostK { k } => {
                if *k >= 2 {
                    Ok(Family::AtMostK { k: k - 1 })
                } else {
                    Ok(Family::Explicit { members: vec![FinSet::empty()] })
                }
            }
            // The derivative of the Schreier family is not expressible in
            // this descriptor catalog (it shifts the cardinality bound);
            // index computations short-circuit it instead.
            Family::Schreier => Err(Error::NoClosedFormDerivative("Schreier".into())),
            Family::Singletons => Ok(Family::Explicit { members: vec![FinSet::empty()] }),
            // Finitely many members means finitely many extensions of
            // anything, so the derivative is the empty family.
            Family::Explicit { .. } => Ok(Family::empty_family()),
            // The empty set extends to every {2^i}, and {1} to every {1, 2^i};
            // a singleton {2^i} with i >= 1 extends only to {1, 2^i}.
            Family::PowerOfTwoPairs => Ok(Family::Explicit {
                members: vec![FinSet::empty(), FinSet::singleton(1)],
            }),
            // Each singleton has at most one partner, so only the empty set
            // (extending to every singleton) survives.
            Family::ConsecutivePairs => {
                Ok(Family::Explicit { members: vec![FinSet::empty()] })
            }
            Family::Union { parts } => {
                let parts = parts.iter().map(Family::derivative).collect::<Result<Vec<_>>>()?;
                Ok(Family::Union { parts })
            }
        }
    }

    /// True when every member is the empty set (i.e. the family is contained
    /// in `{{}}`), the stopping condition of the index iteration.
    pub fn within_empty_singleton(&self) -> bool {
        match self {
            Family::Explicit { members } => members.iter().all(FinSet::is_empty),
            Family::Union { parts } => parts.iter().all(Family::within_empty_singleton),
            _ => false,
        }
    }

    fn involves_schreier(&self) -> bool {
        match self {
            Family::Schreier => true,
            Family::Union { parts } => parts.iter().any(Family::involves_schreier),
            _ => false,
        }
    }

    /// The least `n` with the `n`-th derivative contained in `{{}}`, if it is
    /// reached within `cap` steps. The Schreier family (and any union
    /// involving it) has every finite derivative nonempty and short-circuits
    /// to `InfiniteAboveCap`.
    pub fn index(&self, cap: u32) -> Result<IndexValue> {
        if self.involves_schreier() {
            return Ok(IndexValue::InfiniteAboveCap(cap));
        }
        let mut current = self.clone();
        for step in 0..=cap {
            if current.within_empty_singleton() {
                return Ok(IndexValue::Finite(step));
            }
            if step < cap {
                current = current.derivative()?;
            }
        }
        Ok(IndexValue::InfiniteAboveCap(cap))
    }

    /// The members of size at least 2, when there are finitely many of them
    /// (`None` means infinitely many).
    fn nonsingleton_members(&self) -> Option<BTreeSet<FinSet>> {
        match self {
            Family::AtMostK { k } => (*k < 2).then(BTreeSet::new),
            Family::Schreier | Family::PowerOfTwoPairs | Family::ConsecutivePairs => None,
            Family::Singletons => Some(BTreeSet::new()),
            Family::Explicit { members } => {
                Some(members.iter().filter(|m| m.len() >= 2).cloned().collect())
            }
            Family::Union { parts } => {
                let mut all = BTreeSet::new();
                for p in parts {
                    all.extend(p.nonsingleton_members()?);
                }
                Some(all)
            }
        }
    }

    /// Profile of the non-singleton members: their number and largest element
    /// when finite, or `Infinite`.
    pub fn nonsingleton_profile(&self) -> NonsingletonProfile {
        match self.nonsingleton_members() {
            None => NonsingletonProfile::Infinite,
            Some(set) => NonsingletonProfile::FiniteCount {
                count: set.len(),
                max_element: set.iter().filter_map(FinSet::max).max().unwrap_or(0),
            },
        }
    }

    fn gap_pattern(&self) -> Option<GapPattern> {
        match self {
            // {n, n+1} is a member for every n, so no integer is a gap.
            Family::AtMostK { k } if *k >= 2 => Some(GapPattern::BoundedOnly),
            // No members of size two at all: every integer is a gap.
            Family::AtMostK { .. } | Family::Singletons => Some(GapPattern::AllBeyond(1)),
            // {n, n+1} is Schreier for n >= 2; only n = 1 is a gap.
            Family::Schreier => Some(GapPattern::BoundedOnly),
            // {1, 2^i} straddles every n < 2^i, so no integer is a gap.
            Family::PowerOfTwoPairs => Some(GapPattern::BoundedOnly),
            // {2i-1, 2i} straddles exactly the odd integers.
            Family::ConsecutivePairs => Some(GapPattern::EvensBeyond(2)),
            Family::Explicit { members } => {
                let bound = members.iter().filter_map(FinSet::max).max().unwrap_or(0);
                Some(GapPattern::AllBeyond(bound.max(1)))
            }
            Family::Union { parts } => {
                let mut acc = GapPattern::AllBeyond(1);
                for p in parts {
                    acc = match (acc, p.gap_pattern()?) {
                        (GapPattern::BoundedOnly, _) | (_, GapPattern::BoundedOnly) => {
                            GapPattern::BoundedOnly
                        }
                        (GapPattern::AllBeyond(a), GapPattern::AllBeyond(b)) => {
                            GapPattern::AllBeyond(a.max(b))
                        }
                        (GapPattern::AllBeyond(a), GapPattern::EvensBeyond(b))
                        | (GapPattern::EvensBeyond(a), GapPattern::AllBeyond(b))
                        | (GapPattern::EvensBeyond(a), GapPattern::EvensBeyond(b)) => {
                            GapPattern::EvensBeyond(a.max(b))
                        }
                    };
                }
                Some(acc)
            }
        }
    }

    /// Whether arbitrarily large integers are straddled by no member, with a
    /// few sample gap integers when so. Decided by closed-form rules; the
    /// `Unknown` verdict is reserved for descriptors without a rule (none in
    /// the current catalog).
    pub fn gap_points_unbounded(&self) -> GapVerdict {
        match self.gap_pattern() {
            None => GapVerdict::Unknown,
            Some(GapPattern::BoundedOnly) => GapVerdict::Bounded,
            Some(GapPattern::AllBeyond(a)) => GapVerdict::Unbounded {
                samples: vec![a, a + 1, a + 2],
            },
            Some(GapPattern::EvensBeyond(b)) => {
                let first = if b % 2 == 0 { b.max(2) } else { b + 1 };
                GapVerdict::Unbounded {
                    samples: vec![first, first + 2, first + 4],
                }
            }
        }
    }

    /// Enumerate every member that is a subset of `{1, ..., max_element}`.
    /// Walks the hereditary tree, so the cost is proportional to the number
    /// of members found times `max_element`. Intended for tests and
    /// small-universe audits.
    pub fn members_within(&self, max_element: u32) -> Vec<FinSet> {
        let mut out = Vec::new();
        let mut stack = vec![FinSet::empty()];
        if !self.contains(&FinSet::empty()) {
            return out;
        }
        while let Some(s) = stack.pop() {
            let next_start = FinSet::max(&s).map_or(1, |m| m + 1);
            for el in next_start..=max_element {
                // Hereditary: if s + {el} is not a member, no superset is.
                let candidate = s.with(el).expect("elements strictly increase");
                if self.contains(&candidate) {
                    stack.push(candidate);
                }
            }
            out.push(s);
        }
        out.sort();
        out
    }
}


/// Free-function form of [`Family::witness_in_boxes`].
pub fn witness_in_boxes(family: &Family, boxes: &[(u32, u32)]) -> Result<Option<FinSet>> {
    family.witness_in_boxes(boxes)
}

/// Free-function form of [`Family::admissible`].
pub fn admissible(family: &Family, sets: &[FinSet]) -> Result<Option<AdmissibilityWitness>> {
    family.admissible(sets)
}
