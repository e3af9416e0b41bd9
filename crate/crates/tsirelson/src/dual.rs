//! Explicit norming functionals: the dual-ball generating set.
//!
//! The norm satisfies `||x|| = sup f(x)` over the smallest set of
//! functionals that contains every signed coordinate functional and is
//! closed under `f = theta_k * (f_1 + ... + f_n)` for admissible successive
//! supports. This module enumerates that set exhaustively over a bounded
//! support, which yields an oracle for the norm engine that shares none of
//! its code paths: the engine maximizes over splittings of the vector, the
//! oracle maximizes over explicitly constructed functionals.
//!
//! The enumeration works support-set by support-set: a functional whose
//! support is exactly `S` is either a coordinate functional (`|S| = 1`) or a
//! weighted sum of functionals supported exactly on the consecutive chunks
//! of some ordered chunking of `S`. Every admissible successive sequence
//! arises this way, so the enumeration is complete on its support range.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, FinSet};
use crate::norm::Budget;
use crate::scalar::{serde_rational, Rational};
use crate::space::SpaceSpec;
use crate::vector::FinVec;

/// A functional from the norming set, kept in tree form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum FunctionalTree {
    /// `e_position^*` or its negative.
    Unit { position: u32, negative: bool },
    /// `theta * (child_1 + ... + child_n)` over successive supports.
    Scaled {
        #[serde(with = "serde_rational")]
        theta: Rational,
        children: Vec<FunctionalTree>,
    },
}

impl FunctionalTree {
    /// Height of the tree: 0 for a coordinate functional.
    pub fn height(&self) -> u32 {
        match self {
            FunctionalTree::Unit { .. } => 0,
            FunctionalTree::Scaled { children, .. } => {
                1 + children.iter().map(FunctionalTree::height).max().unwrap_or(0)
            }
        }
    }

    /// The functional as an explicit coefficient vector, sorted by position.
    pub fn coefficient_vector(&self) -> Vec<(u32, Rational)> {
        match self {
            FunctionalTree::Unit { position, negative } => {
                let one = Rational::from_integer(1.into());
                vec![(*position, if *negative { -one } else { one })]
            }
            FunctionalTree::Scaled { theta, children } => {
                let mut out = Vec::new();
                for c in children {
                    for (p, v) in c.coefficient_vector() {
                        out.push((p, theta.clone() * v));
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for FunctionalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalTree::Unit { position, negative } => {
                write!(f, "{}e{position}*", if *negative { "-" } else { "" })
            }
            FunctionalTree::Scaled { theta, children } => {
                write!(f, "{}*(", crate::scalar::format_rational(theta))?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Apply a functional to a vector.
pub fn evaluate(f: &FunctionalTree, x: &FinVec) -> Rational {
    match f {
        FunctionalTree::Unit { position, negative } => {
            let c = x.coefficient(*position);
            if *negative {
                -c
            } else {
                c
            }
        }
        FunctionalTree::Scaled { theta, children } => {
            let mut sum = Rational::zero();
            for c in children {
                sum += evaluate(c, x);
            }
            theta.clone() * sum
        }
    }
}

/// The analysis of a functional: for each height cap `s`, the frontier of
/// maximal subtrees of height at most `s`, read left to right. The first
/// level is the leaves; the last is the functional itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisLevels {
    pub levels: Vec<Vec<FunctionalTree>>,
}

fn frontier(f: &FunctionalTree, cap: u32, out: &mut Vec<FunctionalTree>) {
    if f.height() <= cap {
        out.push(f.clone());
    } else if let FunctionalTree::Scaled { children, .. } = f {
        for c in children {
            frontier(c, cap, out);
        }
    }
}

/// Compute all analysis levels `0..=height(f)`.
pub fn analysis(f: &FunctionalTree) -> AnalysisLevels {
    let h = f.height();
    let mut levels = Vec::with_capacity(h as usize + 1);
    for s in 0..=h {
        let mut level = Vec::new();
        frontier(f, s, &mut level);
        levels.push(level);
    }
    AnalysisLevels { levels }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

enum Rule {
    Fam { family: Family, theta: Rational },
    /// Weight per arity: `weights[idx]` applies to `idx + 2` children.
    Arity { weights: Vec<Rational> },
}

impl Rule {
    /// The weight applied to this successive chunk sequence, if admissible.
    fn admits(&self, chunks: &[FinSet]) -> Result<Option<Rational>> {
        match self {
            Rule::Fam { family, theta } => {
                Ok(family.admissible(chunks)?.map(|_| theta.clone()))
            }
            Rule::Arity { weights } => Ok(weights.get(chunks.len().wrapping_sub(2)).cloned()),
        }
    }
}

fn rules_for(spec: &SpaceSpec, max_parts: usize, precision: u32) -> Result<Vec<Rule>> {
    match spec {
        SpaceSpec::FiniteMixed { .. } => Ok(spec
            .flattened_entries()?
            .into_iter()
            .map(|e| Rule::Fam { family: e.family, theta: e.theta })
            .collect()),
        SpaceSpec::AdmissibleSeq { coeffs } => {
            let mut weights = Vec::new();
            for d in 2..=max_parts {
                match coeffs.suffix_sup(d as u64, precision)? {
                    v => match v.as_exact() {
                        Some(r) => weights.push(r.clone()),
                        None => {
                            return Err(Error::Invalid(
                                "dual enumeration requires exact (rational) weights".into(),
                            ))
                        }
                    },
                }
            }
            Ok(vec![Rule::Arity { weights }])
        }
    }
}

const MAX_ORACLE_SUPPORT: usize = 16;

/// Split the set-bit list of `mask` into consecutive groups according to
/// `cuts` (bit `i` of `cuts` set means "cut after the i-th set bit").
fn chunks_of(bits: &[u32], cuts: u32) -> Vec<u32> {
    let mut chunks = Vec::new();
    let mut current = 0u32;
    for (i, b) in bits.iter().enumerate() {
        current |= 1 << b;
        if i + 1 < bits.len() && cuts & (1 << i) != 0 {
            chunks.push(current);
            current = 0;
        }
    }
    chunks.push(current);
    chunks
}

fn set_bits(mask: u32) -> Vec<u32> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

type CoeffVec = Vec<(u32, Rational)>;

/// Enumerates coefficient vectors of norming functionals with support
/// exactly the positions selected by each mask over `base` (sorted).
struct VectorGen<'a> {
    base: &'a [u32],
    rules: &'a [Rule],
    memo: HashMap<u32, Rc<Vec<CoeffVec>>>,
    produced: u64,
    limit: u64,
}

impl<'a> VectorGen<'a> {
    fn charge(&mut self) -> Result<()> {
        self.produced += 1;
        if self.produced > self.limit {
            Err(Error::BudgetExceeded { limit: self.limit, unit: "functionals" })
        } else {
            Ok(())
        }
    }

    fn chunk_sets(&self, chunk_masks: &[u32]) -> Vec<FinSet> {
        chunk_masks
            .iter()
            .map(|m| {
                FinSet::new(set_bits(*m).iter().map(|b| self.base[*b as usize]).collect())
                    .expect("chunk positions are sorted and distinct")
            })
            .collect()
    }

    fn gen(&mut self, mask: u32) -> Result<Rc<Vec<CoeffVec>>> {
        if let Some(v) = self.memo.get(&mask) {
            return Ok(v.clone());
        }
        let bits = set_bits(mask);
        let mut out: Vec<CoeffVec> = Vec::new();
        let mut seen: BTreeSet<CoeffVec> = BTreeSet::new();
        if bits.len() == 1 {
            self.charge()?;
            let v = vec![(self.base[bits[0] as usize], Rational::from_integer(1.into()))];
            seen.insert(v.clone());
            out.push(v);
        } else {
            for cuts in 1..(1u32 << (bits.len() - 1)) {
                let chunk_masks = chunks_of(&bits, cuts);
                let sets = self.chunk_sets(&chunk_masks);
                for r in 0..self.rules.len() {
                    let theta = match self.rules[r].admits(&sets)? {
                        Some(t) => t,
                        None => continue,
                    };
                    // Cross product of the children's vector sets.
                    let mut partial: Vec<CoeffVec> = vec![Vec::new()];
                    for cm in &chunk_masks {
                        let child = self.gen(*cm)?;
                        let mut next = Vec::with_capacity(partial.len() * child.len());
                        for p in &partial {
                            for c in child.iter() {
                                let mut v = p.clone();
                                v.extend(c.iter().cloned());
                                next.push(v);
                            }
                        }
                        partial = next;
                    }
                    for combo in partial {
                        self.charge()?;
                        let scaled: CoeffVec = combo
                            .into_iter()
                            .map(|(p, c)| (p, theta.clone() * c))
                            .collect();
                        if seen.insert(scaled.clone()) {
                            out.push(scaled);
                        }
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert(mask, rc.clone());
        Ok(rc)
    }
}

/// The norm computed by exhaustive functional enumeration: the maximum of
/// `f(|x|)` over every norming functional with support inside the support
/// of `x` (shrinking a functional's support to the support of `x` keeps it
/// in the set, so this loses nothing). Supports of more than 16 points are
/// rejected. Requires exact weights.
pub fn oracle_norm(spec: &SpaceSpec, x: &FinVec, precision: u32, budget: &Budget) -> Result<Rational> {
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let a = x.abs();
    let base = a.support();
    if base.len() > MAX_ORACLE_SUPPORT {
        return Err(Error::Invalid(format!(
            "oracle enumeration supports at most {MAX_ORACLE_SUPPORT} support points, got {}",
            base.len()
        )));
    }
    let rules = rules_for(spec, base.len(), precision)?;
    let coeffs: Vec<Rational> = base.iter().map(|p| a.coefficient(*p)).collect();
    let mut gen = VectorGen {
        base: &base,
        rules: &rules,
        memo: HashMap::new(),
        produced: 0,
        limit: budget.dp_cells,
    };
    let mut best = Rational::zero();
    for mask in 1u32..(1 << base.len()) {
        for vec in gen.gen(mask)?.iter() {
            let mut action = Rational::zero();
            for (p, c) in vec {
                let idx = base.binary_search(p).expect("functional stays on the base support");
                action += c.clone() * coeffs[idx].clone();
            }
            if action > best {
                best = action;
            }
        }
    }
    Ok(best)
}

/// Enumerate norming functionals as trees: support inside `1..=max_support`,
/// height at most `max_height`, optionally with leaf signs. Trees inducing a
/// coefficient vector already produced are dropped.
pub fn enumerate_k(
    spec: &SpaceSpec,
    max_support: u32,
    max_height: u32,
    with_signs: bool,
    precision: u32,
    budget: &Budget,
) -> Result<Vec<FunctionalTree>> {
    if max_support == 0 || max_support as usize > MAX_ORACLE_SUPPORT {
        return Err(Error::Invalid(format!(
            "dual enumeration needs a support bound in 1..={MAX_ORACLE_SUPPORT}"
        )));
    }
    let base: Vec<u32> = (1..=max_support).collect();
    let rules = rules_for(spec, base.len(), precision)?;
    let mut memo: HashMap<u32, Rc<Vec<(FunctionalTree, u32)>>> = HashMap::new();
    let mut produced = 0u64;
    let mut all: Vec<FunctionalTree> = Vec::new();
    let mut seen: BTreeSet<CoeffVec> = BTreeSet::new();
    for mask in 1u32..(1 << base.len()) {
        let trees = gen_trees(
            &base,
            &rules,
            mask,
            max_height,
            with_signs,
            &mut memo,
            &mut produced,
            budget.dp_cells,
        )?;
        for (t, _) in trees.iter() {
            if seen.insert(t.coefficient_vector()) {
                all.push(t.clone());
            }
        }
    }
    Ok(all)
}

#[allow(clippy::too_many_arguments)]
fn gen_trees(
    base: &[u32],
    rules: &[Rule],
    mask: u32,
    max_height: u32,
    with_signs: bool,
    memo: &mut HashMap<u32, Rc<Vec<(FunctionalTree, u32)>>>,
    produced: &mut u64,
    limit: u64,
) -> Result<Rc<Vec<(FunctionalTree, u32)>>> {
    if let Some(v) = memo.get(&mask) {
        return Ok(v.clone());
    }
    let bits = set_bits(mask);
    let mut out: Vec<(FunctionalTree, u32)> = Vec::new();
    let charge = |produced: &mut u64| -> Result<()> {
        *produced += 1;
        if *produced > limit {
            Err(Error::BudgetExceeded { limit, unit: "functionals" })
        } else {
            Ok(())
        }
    };
    if bits.len() == 1 {
        let position = base[bits[0] as usize];
        charge(produced)?;
        out.push((FunctionalTree::Unit { position, negative: false }, 0));
        if with_signs {
            charge(produced)?;
            out.push((FunctionalTree::Unit { position, negative: true }, 0));
        }
    } else if max_height >= 1 {
        for cuts in 1..(1u32 << (bits.len() - 1)) {
            let chunk_masks = chunks_of(&bits, cuts);
            let sets: Vec<FinSet> = chunk_masks
                .iter()
                .map(|m| {
                    FinSet::new(set_bits(*m).iter().map(|b| base[*b as usize]).collect())
                        .expect("chunk positions are sorted and distinct")
                })
                .collect();
            for rule in rules {
                let theta = match rule.admits(&sets)? {
                    Some(t) => t,
                    None => continue,
                };
                let mut partial: Vec<(Vec<FunctionalTree>, u32)> = vec![(Vec::new(), 0)];
                for cm in &chunk_masks {
                    let child =
                        gen_trees(base, rules, *cm, max_height - 1, with_signs, memo, produced, limit)?;
                    let mut next = Vec::new();
                    for (p, h) in &partial {
                        for (c, ch) in child.iter() {
                            let mut v = p.clone();
                            v.push(c.clone());
                            next.push((v, (*h).max(*ch)));
                        }
                    }
                    partial = next;
                }
                for (children, h) in partial {
                    charge(produced)?;
                    out.push((
                        FunctionalTree::Scaled { theta: theta.clone(), children },
                        h + 1,
                    ));
                }
            }
        }
    }
    let rc = Rc::new(out);
    memo.insert(mask, rc.clone());
    Ok(rc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientSeq;
    use crate::norm::{norm, Budget};
    use crate::scalar::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tsirelson() -> SpaceSpec {
        SpaceSpec::finite_mixed(vec![(Family::Schreier, ratio(1, 2))])
    }

    fn two_entry() -> SpaceSpec {
        SpaceSpec::finite_mixed(vec![
            (Family::AtMostK { k: 2 }, ratio(1, 2)),
            (Family::AtMostK { k: 3 }, ratio(2, 3)),
        ])
    }

    fn oracle(spec: &SpaceSpec, x: &FinVec) -> Rational {
        oracle_norm(spec, x, 48, &Budget::default()).unwrap()
    }

    fn engine(spec: &SpaceSpec, x: &FinVec) -> Rational {
        norm(spec, x, 48, &Budget::default()).unwrap().value.as_exact().cloned().unwrap()
    }

    #[test]
    fn oracle_matches_hand_values() {
        let ones = |a, b| FinVec::segment_ones(a, b).unwrap();
        assert_eq!(oracle(&tsirelson(), &ones(1, 3)), ratio(1, 1));
        assert_eq!(oracle(&tsirelson(), &ones(3, 5)), ratio(3, 2));
        assert_eq!(oracle(&two_entry(), &ones(1, 3)), ratio(2, 1));
        let pairs = SpaceSpec::finite_mixed(vec![(Family::ConsecutivePairs, ratio(1, 1))]);
        assert_eq!(oracle(&pairs, &ones(2, 4)), ratio(2, 1));
    }

    #[test]
    fn oracle_agrees_with_engine_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let spaces = [tsirelson(), two_entry()];
        for spec in &spaces {
            for _ in 0..20 {
                let mut entries = Vec::new();
                for pos in 1..=6u32 {
                    if rng.gen_bool(0.6) {
                        let num = rng.gen_range(-4i64..=4);
                        if num != 0 {
                            entries.push((pos, ratio(num, rng.gen_range(1i64..=3))));
                        }
                    }
                }
                if entries.is_empty() {
                    continue;
                }
                let x = FinVec::from_entries(entries).unwrap();
                assert_eq!(oracle(spec, &x), engine(spec, &x), "x = {:?}", x.support());
            }
        }
    }

    #[test]
    fn enumerated_functionals_never_exceed_the_norm() {
        let spec = tsirelson();
        let fs = enumerate_k(&spec, 4, 3, true, 48, &Budget::default()).unwrap();
        assert!(!fs.is_empty());
        let x = FinVec::from_entries(vec![
            (1, ratio(1, 1)),
            (2, ratio(-1, 2)),
            (4, ratio(1, 3)),
        ])
        .unwrap();
        let n = engine(&spec, &x);
        let mut best = Rational::zero();
        for f in &fs {
            let v = evaluate(f, &x);
            assert!(v <= n, "functional {f} exceeds the norm");
            if v > best {
                best = v;
            }
        }
        // With signs available the enumeration attains the norm.
        assert_eq!(best, n);
    }

    #[test]
    fn enumeration_dedups_by_coefficient_vector() {
        let fs = enumerate_k(&two_entry(), 4, 2, false, 48, &Budget::default()).unwrap();
        let mut seen = BTreeSet::new();
        for f in &fs {
            assert!(seen.insert(f.coefficient_vector()), "duplicate vector from {f}");
        }
    }

    #[test]
    fn analysis_levels_walk_up_the_tree() {
        let inner = FunctionalTree::Scaled {
            theta: ratio(1, 2),
            children: vec![
                FunctionalTree::Unit { position: 1, negative: false },
                FunctionalTree::Unit { position: 2, negative: false },
            ],
        };
        let f = FunctionalTree::Scaled {
            theta: ratio(1, 2),
            children: vec![inner.clone(), FunctionalTree::Unit { position: 3, negative: false }],
        };
        assert_eq!(f.height(), 2);
        let a = analysis(&f);
        assert_eq!(a.levels.len(), 3);
        assert_eq!(a.levels[0].len(), 3); // leaves
        assert_eq!(a.levels[1], vec![inner, FunctionalTree::Unit { position: 3, negative: false }]);
        assert_eq!(a.levels[2], vec![f.clone()]);
        assert_eq!(f.to_string(), "1/2*(1/2*(e1* + e2*) + e3*)");
    }

    #[test]
    fn budget_limits_enumeration() {
        let err = oracle_norm(
            &tsirelson(),
            &FinVec::segment_ones(1, 8).unwrap(),
            48,
            &Budget::new(10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { unit: "functionals", .. }));
    }

    #[test]
    fn weight_sequence_spaces_enumerate_when_rational() {
        let spec = SpaceSpec::admissible_seq(CoefficientSeq::InvLinear);
        let x = FinVec::segment_ones(1, 4).unwrap();
        // Weight 1/n for n parts keeps every functional's action at the
        // sup-norm for the summing vector.
        assert_eq!(oracle(&spec, &x), ratio(1, 1));
        let irrational = SpaceSpec::admissible_seq(CoefficientSeq::InvLogPow { r: ratio(1, 1) });
        assert!(oracle_norm(&irrational, &x, 48, &Budget::default()).is_err());
    }
}
