//! The norm engine: exact evaluation of implicitly defined norms.
//!
//! The norm of a finitely supported vector satisfies
//!
//! ```text
//! ||x|| = max( ||x||_inf,
//!              max_k theta_k * sup { sum_u ||E_u x|| : (E_u) M_k-admissible } )
//! ```
//!
//! The engine exploits three exact reductions. First, parts may be taken to
//! be intervals of support points (replacing a part by its support hull keeps
//! the admissibility boxes and can only increase its norm). Second, for
//! families that constrain only the number of parts (`AnK`, weight
//! sequences) or the number of parts and the first part's minimum
//! (`Schreier`), optimal parts may be taken to tile a suffix of the segment,
//! which turns the inner supremum into a shared tiling table. Third,
//! splittings into one part never help (weights are at most 1), so only
//! arities `>= 2` are searched. Everything is memoized on support-index
//! segments, and every comparison is an exact rational comparison.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientSeq;
use crate::error::{Error, Result};
use crate::families::{Family, FinSet};
use crate::interval::RatInterval;
use crate::scalar::{serde_rational, Rational, Value};
use crate::space::{SpaceSpec, WeightedEntry};
use crate::vector::FinVec;

/// Resource limit for norm computations, counted in DP cells (memoized
/// segment norms, tiling-table cells, and part-boundary tuples).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub dp_cells: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { dp_cells: 10_000_000 }
    }
}

impl Budget {
    pub fn new(dp_cells: u64) -> Self {
        Budget { dp_cells }
    }
}

/// Sentinel level meaning "the fixed point" (parts evaluated at the same
/// level); finite levels `m` evaluate parts at level `m - 1`, with level 0
/// being the plain sup-norm.
const FIX: u32 = u32::MAX;

fn child_level(level: u32) -> u32 {
    if level == FIX {
        FIX
    } else {
        level - 1
    }
}

/// One admissibility rule, resolved to the form the engine consumes.
#[derive(Debug, Clone)]
enum Path {
    /// Arity-capped tiling (the `AnK` family): any split into `2..=d_cap`
    /// parts is admissible.
    Tiling { d_cap: usize, theta: Rational },
    /// Schreier tiling: a split into `d` parts starting at support index `a`
    /// is admissible exactly when `d <= position(a)`.
    SchreierTiling { theta: Rational },
    /// Position-sensitive families searched over explicit part boundaries.
    Positional { family: Family, theta: Rational, d_cap: usize },
    /// A weight for every arity: `weights[idx]` applies to `idx + 2` parts.
    SeqTiling { weights: Vec<Rational> },
}

fn finite_paths(entries: &[WeightedEntry]) -> Result<Vec<Path>> {
    let mut paths = Vec::new();
    for e in entries {
        match &e.family {
            Family::AtMostK { k } => {
                paths.push(Path::Tiling { d_cap: *k as usize, theta: e.theta.clone() })
            }
            Family::Schreier => paths.push(Path::SchreierTiling { theta: e.theta.clone() }),
            // Singleton families admit no splitting into two or more parts.
            Family::Singletons => {}
            fam @ (Family::Explicit { .. }
            | Family::PowerOfTwoPairs
            | Family::ConsecutivePairs) => {
                let d_cap = fam.max_member_size().unwrap_or(0);
                if d_cap >= 2 {
                    paths.push(Path::Positional {
                        family: fam.clone(),
                        theta: e.theta.clone(),
                        d_cap,
                    });
                }
            }
            Family::Union { .. } => {
                return Err(Error::Invalid("unions must be flattened before the engine".into()))
            }
        }
    }
    Ok(paths)
}

/// The weights seen by a weight-sequence space for arities `2..=max_d`
/// (`weights[idx]` is the weight of `idx + 2` parts, the supremum of the
/// coefficient sequence from that index on).
fn seq_weight_values(
    coeffs: &CoefficientSeq,
    max_d: usize,
    precision: u32,
) -> Result<Vec<Value>> {
    (2..=max_d).map(|d| coeffs.suffix_sup(d as u64, precision)).collect()
}

fn endpoints(values: &[Value], upper: bool) -> Vec<Rational> {
    values
        .iter()
        .map(|v| if upper { v.hi().clone() } else { v.lo().clone() })
        .collect()
}

// ---------------------------------------------------------------------------
// The memoized engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Engine {
    positions: Vec<u32>,
    values: Vec<Rational>,
    paths: Rc<[Path]>,
    norm_memo: HashMap<(u32, u32, u32), Rational>,
    tile_memo: HashMap<(u32, u32, u32, u32), Rational>,
    cells_used: u64,
    cell_limit: u64,
}

fn consider(best: &mut Rational, cand: Rational) {
    if cand > *best {
        *best = cand;
    }
}

impl Engine {
    fn new(positions: Vec<u32>, values: Vec<Rational>, paths: Vec<Path>, limit: u64) -> Self {
        Engine {
            positions,
            values,
            paths: Rc::from(paths),
            norm_memo: HashMap::new(),
            tile_memo: HashMap::new(),
            cells_used: 0,
            cell_limit: limit,
        }
    }

    fn charge(&mut self) -> Result<()> {
        self.cells_used += 1;
        if self.cells_used > self.cell_limit {
            Err(Error::BudgetExceeded { limit: self.cell_limit, unit: "dp-cells" })
        } else {
            Ok(())
        }
    }

    fn sup_on(&self, i: u32, j: u32) -> Rational {
        let mut best = self.values[i as usize].clone();
        for t in (i + 1)..=j {
            let v = &self.values[t as usize];
            if *v > best {
                best = v.clone();
            }
        }
        best
    }

    /// Norm of the restriction to support indices `i..=j` at the given level.
    fn eval(&mut self, level: u32, i: u32, j: u32) -> Result<Rational> {
        if let Some(v) = self.norm_memo.get(&(level, i, j)) {
            return Ok(v.clone());
        }
        self.charge()?;
        let mut best = self.sup_on(i, j);
        if level != 0 && j > i {
            let child = child_level(level);
            let sz = (j - i + 1) as usize;
            let paths = self.paths.clone();
            for path in paths.iter() {
                match path {
                    Path::Tiling { d_cap, theta } => {
                        for d in 2..=(*d_cap).min(sz) {
                            let t = self.tile(child, d as u32, i, j)?;
                            consider(&mut best, theta.clone() * t);
                        }
                    }
                    Path::SchreierTiling { theta } => {
                        for a in i..j {
                            let cap =
                                (self.positions[a as usize] as usize).min((j - a + 1) as usize);
                            for d in 2..=cap {
                                let t = self.tile(child, d as u32, a, j)?;
                                consider(&mut best, theta.clone() * t);
                            }
                        }
                    }
                    Path::Positional { family, theta, d_cap } => {
                        for d in 2..=(*d_cap).min(sz) {
                            self.positional_best(child, family, theta, d as u32, i, j, &mut best)?;
                        }
                    }
                    Path::SeqTiling { weights } => {
                        for d in 2..=(weights.len() + 1).min(sz) {
                            let t = self.tile(child, d as u32, i, j)?;
                            consider(&mut best, weights[d - 2].clone() * t);
                        }
                    }
                }
            }
        }
        self.norm_memo.insert((level, i, j), best.clone());
        Ok(best)
    }

    /// Best total norm of a tiling of `i..=j` into exactly `d` nonempty
    /// interval parts, each evaluated at `level`.
    fn tile(&mut self, level: u32, d: u32, a: u32, b: u32) -> Result<Rational> {
        if d == 1 {
            return self.eval(level, a, b);
        }
        if let Some(v) = self.tile_memo.get(&(level, d, a, b)) {
            return Ok(v.clone());
        }
        self.charge()?;
        let mut best: Option<Rational> = None;
        for t in a..=(b - (d - 1)) {
            let head = self.eval(level, a, t)?;
            let rest = self.tile(level, d - 1, t + 1, b)?;
            let cand = head + rest;
            if best.as_ref().map_or(true, |c| cand > *c) {
                best = Some(cand);
            }
        }
        let best = best.expect("tiling has at least one cut");
        self.tile_memo.insert((level, d, a, b), best.clone());
        Ok(best)
    }

    /// Maximize `theta * sum` over splittings into exactly `d` parts with
    /// explicit boundaries, pruned by hereditary prefix admissibility. The
    /// first part may start anywhere in the segment; the last part extends
    /// to the segment end (no admissibility constraint involves its
    /// maximum, and extending a part can only increase its norm).
    #[allow(clippy::too_many_arguments)]
    fn positional_best(
        &mut self,
        level: u32,
        family: &Family,
        theta: &Rational,
        d: u32,
        i: u32,
        j: u32,
        best: &mut Rational,
    ) -> Result<()> {
        let mut boxes = Vec::with_capacity(d as usize);
        self.positional_step(level, family, theta, d, 0, i, None, j, &mut boxes, &Rational::zero(), best)
    }

    #[allow(clippy::too_many_arguments)]
    fn positional_step(
        &mut self,
        level: u32,
        family: &Family,
        theta: &Rational,
        d: u32,
        placed: u32,
        from: u32,
        prev_end: Option<u32>,
        j: u32,
        boxes: &mut Vec<(u32, u32)>,
        acc: &Rational,
        best: &mut Rational,
    ) -> Result<()> {
        let after = d - placed - 1; // parts still to place after the next one
        for s in from..=(j - after) {
            let box_lo = match prev_end {
                None => 1,
                Some(pe) => self.positions[pe as usize] + 1,
            };
            boxes.push((box_lo, self.positions[s as usize]));
            // Heredity: a full witness restricted to the first boxes is a
            // member, so an unsatisfiable prefix can be pruned outright.
            if family.witness_in_boxes(boxes)?.is_some() {
                if placed + 1 == d {
                    self.charge()?;
                    let val = acc.clone() + self.eval(level, s, j)?;
                    consider(best, theta.clone() * val);
                } else {
                    for e in s..=(j - after) {
                        self.charge()?;
                        let acc2 = acc.clone() + self.eval(level, s, e)?;
                        self.positional_step(
                            level, family, theta, d, placed + 1, e + 1, Some(e), j, boxes, &acc2,
                            best,
                        )?;
                    }
                }
            }
            boxes.pop();
        }
        Ok(())
    }

    /// Mirror of [`positional_step`] that returns the first boundary tuple
    /// realizing `target = theta * sum`, for witness reconstruction.
    #[allow(clippy::too_many_arguments)]
    fn positional_find(
        &mut self,
        level: u32,
        family: &Family,
        d: u32,
        i: u32,
        j: u32,
        target_sum: &Rational,
    ) -> Result<Option<Vec<(u32, u32)>>> {
        let mut boxes = Vec::with_capacity(d as usize);
        let mut parts = Vec::with_capacity(d as usize);
        self.positional_find_step(
            level,
            family,
            d,
            0,
            i,
            None,
            j,
            &mut boxes,
            &mut parts,
            &Rational::zero(),
            target_sum,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn positional_find_step(
        &mut self,
        level: u32,
        family: &Family,
        d: u32,
        placed: u32,
        from: u32,
        prev_end: Option<u32>,
        j: u32,
        boxes: &mut Vec<(u32, u32)>,
        parts: &mut Vec<(u32, u32)>,
        acc: &Rational,
        target_sum: &Rational,
    ) -> Result<Option<Vec<(u32, u32)>>> {
        let after = d - placed - 1;
        for s in from..=(j - after) {
            let box_lo = match prev_end {
                None => 1,
                Some(pe) => self.positions[pe as usize] + 1,
            };
            boxes.push((box_lo, self.positions[s as usize]));
            if family.witness_in_boxes(boxes)?.is_some() {
                if placed + 1 == d {
                    let val = acc.clone() + self.eval(level, s, j)?;
                    if val == *target_sum {
                        let mut found = parts.clone();
                        found.push((s, j));
                        boxes.pop();
                        return Ok(Some(found));
                    }
                } else {
                    for e in s..=(j - after) {
                        let acc2 = acc.clone() + self.eval(level, s, e)?;
                        parts.push((s, e));
                        let found = self.positional_find_step(
                            level, family, d, placed + 1, e + 1, Some(e), j, boxes, parts, &acc2,
                            target_sum,
                        )?;
                        parts.pop();
                        if found.is_some() {
                            boxes.pop();
                            return Ok(found);
                        }
                    }
                }
            }
            boxes.pop();
        }
        Ok(None)
    }

    /// First cut sequence realizing `tile(level, d, a, b)`.
    fn tile_parts(&mut self, level: u32, d: u32, a: u32, b: u32) -> Result<Vec<(u32, u32)>> {
        if d == 1 {
            return Ok(vec![(a, b)]);
        }
        let total = self.tile(level, d, a, b)?;
        for t in a..=(b - (d - 1)) {
            let head = self.eval(level, a, t)?;
            let rest = self.tile(level, d - 1, t + 1, b)?;
            if head + rest == total {
                let mut parts = vec![(a, t)];
                parts.extend(self.tile_parts(level, d - 1, t + 1, b)?);
                return Ok(parts);
            }
        }
        Err(Error::Invalid("tiling reconstruction failed".into()))
    }

    /// Rebuild the optimal split tree for a memoized segment by replaying
    /// the search deterministically and taking the first maximizer.
    fn reconstruct(&mut self, level: u32, i: u32, j: u32) -> Result<NormWitness> {
        let v = self.eval(level, i, j)?;
        let sup = self.sup_on(i, j);
        if v == sup {
            let idx = (i..=j)
                .find(|&t| self.values[t as usize] == v)
                .expect("sup-norm is attained");
            return Ok(NormWitness::Point { position: self.positions[idx as usize], value: v });
        }
        let child = child_level(level);
        let sz = (j - i + 1) as usize;
        let paths = self.paths.clone();
        for path in paths.iter() {
            match path {
                Path::Tiling { d_cap, theta } => {
                    for d in 2..=(*d_cap).min(sz) {
                        let t = self.tile(child, d as u32, i, j)?;
                        if theta.clone() * t == v {
                            let parts = self.tile_parts(child, d as u32, i, j)?;
                            return self.split_witness(
                                child,
                                Family::AtMostK { k: *d_cap as u32 },
                                theta.clone(),
                                parts,
                            );
                        }
                    }
                }
                Path::SchreierTiling { theta } => {
                    for a in i..j {
                        let cap = (self.positions[a as usize] as usize).min((j - a + 1) as usize);
                        for d in 2..=cap {
                            let t = self.tile(child, d as u32, a, j)?;
                            if theta.clone() * t == v {
                                let parts = self.tile_parts(child, d as u32, a, j)?;
                                return self.split_witness(
                                    child,
                                    Family::Schreier,
                                    theta.clone(),
                                    parts,
                                );
                            }
                        }
                    }
                }
                Path::Positional { family, theta, d_cap } => {
                    for d in 2..=(*d_cap).min(sz) {
                        let target_sum = v.clone() / theta.clone();
                        if let Some(parts) =
                            self.positional_find(child, family, d as u32, i, j, &target_sum)?
                        {
                            return self.split_witness(child, family.clone(), theta.clone(), parts);
                        }
                    }
                }
                Path::SeqTiling { weights } => {
                    for d in 2..=(weights.len() + 1).min(sz) {
                        let t = self.tile(child, d as u32, i, j)?;
                        if weights[d - 2].clone() * t == v {
                            let parts = self.tile_parts(child, d as u32, i, j)?;
                            return self.split_witness(
                                child,
                                Family::AtMostK { k: d as u32 },
                                weights[d - 2].clone(),
                                parts,
                            );
                        }
                    }
                }
            }
        }
        Err(Error::Invalid("norm witness reconstruction failed".into()))
    }

    fn split_witness(
        &mut self,
        child: u32,
        family: Family,
        theta: Rational,
        parts: Vec<(u32, u32)>,
    ) -> Result<NormWitness> {
        let sets: Vec<FinSet> = parts
            .iter()
            .map(|&(a, b)| FinSet::new(self.positions[a as usize..=b as usize].to_vec()))
            .collect::<Result<_>>()?;
        let marks = family
            .admissible(&sets)?
            .ok_or_else(|| Error::Invalid("reconstructed split is not admissible".into()))?
            .marks;
        let mut wparts = Vec::with_capacity(parts.len());
        for &(a, b) in &parts {
            wparts.push(WitnessPart {
                start: self.positions[a as usize],
                end: self.positions[b as usize],
                tree: self.reconstruct(child, a, b)?,
            });
        }
        Ok(NormWitness::Split { family, theta, marks, parts: wparts })
    }

    /// Extend an all-ones engine so positions `1..=n` are present.
    fn extend_ones(&mut self, n: u32) {
        while (self.positions.len() as u32) < n {
            let next = self.positions.len() as u32 + 1;
            self.positions.push(next);
            self.values.push(Rational::one());
        }
    }
}

// ---------------------------------------------------------------------------
// Witnesses and results
// ---------------------------------------------------------------------------

/// One part of a split witness: the support hull `[start, end]` (in
/// positions) and the witness for the part's own norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPart {
    pub start: u32,
    pub end: u32,
    pub tree: NormWitness,
}

/// A certificate for a computed norm value: either a single coordinate
/// attaining the sup-norm, or an admissible split with per-part certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum NormWitness {
    Point {
        position: u32,
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    Split {
        family: Family,
        #[serde(with = "serde_rational")]
        theta: Rational,
        marks: FinSet,
        parts: Vec<WitnessPart>,
    },
}

impl NormWitness {
    /// Positions spanned by this witness.
    fn span(&self) -> (u32, u32) {
        match self {
            NormWitness::Point { position, .. } => (*position, *position),
            NormWitness::Split { parts, .. } => {
                (parts.first().map_or(0, |p| p.start), parts.last().map_or(0, |p| p.end))
            }
        }
    }

    /// Recompute the certified value from `x` alone, re-checking at every
    /// split that the parts are successive, that the marks interleave them,
    /// and that the marks form a member of the recorded family. This is an
    /// independent re-walk: it never consults the engine's memo tables.
    pub fn verify(&self, x: &FinVec) -> Result<Rational> {
        match self {
            NormWitness::Point { position, .. } => {
                let c = x.coefficient(*position);
                if c.is_zero() {
                    return Err(Error::Invalid(format!(
                        "witness points at position {position} outside the support"
                    )));
                }
                Ok(c.abs())
            }
            NormWitness::Split { family, theta, marks, parts } => {
                if parts.len() < 2 {
                    return Err(Error::Invalid("a split witness needs at least two parts".into()));
                }
                if marks.len() != parts.len() {
                    return Err(Error::Invalid("one mark per part is required".into()));
                }
                if !family.contains(marks) {
                    return Err(Error::Invalid(format!(
                        "marks {marks} are not a member of {family}"
                    )));
                }
                let ms = marks.elements();
                let mut sum = Rational::zero();
                for (u, p) in parts.iter().enumerate() {
                    if p.start > p.end {
                        return Err(Error::Invalid("part interval is reversed".into()));
                    }
                    if u > 0 && parts[u - 1].end >= p.start {
                        return Err(Error::Invalid("parts are not successive".into()));
                    }
                    // Interleaving: m_1 <= E_1 < m_2 <= E_2 < ...
                    if ms[u] > p.start {
                        return Err(Error::Invalid("mark exceeds its part's minimum".into()));
                    }
                    if u > 0 && ms[u] <= parts[u - 1].end {
                        return Err(Error::Invalid("mark does not clear the previous part".into()));
                    }
                    let (lo, hi) = p.tree.span();
                    if lo < p.start || hi > p.end {
                        return Err(Error::Invalid("part certificate leaves its interval".into()));
                    }
                    sum += p.tree.verify(x)?;
                }
                Ok(theta.clone() * sum)
            }
        }
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            NormWitness::Point { position, value } => {
                out.push_str(&format!(
                    "{pad}point e{position} value={}\n",
                    crate::scalar::format_rational(value)
                ));
            }
            NormWitness::Split { family, theta, marks, parts } => {
                out.push_str(&format!(
                    "{pad}split theta={} via {family} marks={marks}\n",
                    crate::scalar::format_rational(theta)
                ));
                for p in parts {
                    out.push_str(&format!("{pad}  part [{}-{}]\n", p.start, p.end));
                    p.tree.render_into(out, indent + 2);
                }
            }
        }
    }
}

impl fmt::Display for NormWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        write!(f, "{}", s.trim_end())
    }
}

/// The outcome of a norm computation.
#[derive(Debug, Clone, PartialEq)]
pub struct NormResult {
    /// The norm: exact for rational weight systems, a certified enclosure
    /// otherwise (lower/upper runs with the weight endpoints).
    pub value: Value,
    /// An optimal-split certificate; present exactly for exact values.
    pub witness: Option<NormWitness>,
    /// DP cells consumed.
    pub dp_cells: u64,
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

fn vector_data(x: &FinVec) -> (Vec<u32>, Vec<Rational>) {
    let a = x.abs();
    let positions = a.support();
    let values = positions.iter().map(|p| a.coefficient(*p)).collect();
    (positions, values)
}

/// Compute `||x||` in the space described by `spec`. `precision` controls
/// enclosure width for irrational weight sequences (in bits) and is ignored
/// for fully rational systems.
pub fn norm(spec: &SpaceSpec, x: &FinVec, precision: u32, budget: &Budget) -> Result<NormResult> {
    if x.is_zero() {
        return Ok(NormResult {
            value: Value::Exact(Rational::zero()),
            witness: None,
            dp_cells: 0,
        });
    }
    let (positions, values) = vector_data(x);
    let last = positions.len() as u32 - 1;
    match spec {
        SpaceSpec::FiniteMixed { .. } => {
            let paths = finite_paths(&spec.flattened_entries()?)?;
            let mut eng = Engine::new(positions, values, paths, budget.dp_cells);
            let v = eng.eval(FIX, 0, last)?;
            let witness = eng.reconstruct(FIX, 0, last)?;
            Ok(NormResult {
                value: Value::Exact(v),
                witness: Some(witness),
                dp_cells: eng.cells_used,
            })
        }
        SpaceSpec::AdmissibleSeq { coeffs } => {
            let wvals = seq_weight_values(coeffs, positions.len(), precision)?;
            if wvals.iter().all(|v| v.as_exact().is_some()) {
                let weights = endpoints(&wvals, false);
                let mut eng = Engine::new(
                    positions,
                    values,
                    vec![Path::SeqTiling { weights }],
                    budget.dp_cells,
                );
                let v = eng.eval(FIX, 0, last)?;
                let witness = eng.reconstruct(FIX, 0, last)?;
                Ok(NormResult {
                    value: Value::Exact(v),
                    witness: Some(witness),
                    dp_cells: eng.cells_used,
                })
            } else {
                let mut lo_eng = Engine::new(
                    positions.clone(),
                    values.clone(),
                    vec![Path::SeqTiling { weights: endpoints(&wvals, false) }],
                    budget.dp_cells,
                );
                let lo = lo_eng.eval(FIX, 0, last)?;
                let mut hi_eng = Engine::new(
                    positions,
                    values,
                    vec![Path::SeqTiling { weights: endpoints(&wvals, true) }],
                    budget.dp_cells,
                );
                let hi = hi_eng.eval(FIX, 0, last)?;
                Ok(NormResult {
                    value: Value::Enclosure(RatInterval::new(lo, hi)?),
                    witness: None,
                    dp_cells: lo_eng.cells_used + hi_eng.cells_used,
                })
            }
        }
    }
}

/// The level-by-level approximations `||x||_0 <= ||x||_1 <= ...` together
/// with the fixed point they stabilize to. Requires a fully rational weight
/// system.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedNorms {
    /// `levels[m]` is the norm computed with splitting nested at most `m`
    /// deep (level 0 is the sup-norm).
    pub levels: Vec<Rational>,
    /// The fixed-point norm.
    pub fixed_point: Rational,
    /// Least level whose value already equals the fixed point, when reached
    /// within the requested number of levels.
    pub stabilized_at: Option<u32>,
}

/// Compute the iterated norms of `x` up to `max_level`, stopping early at
/// stabilization.
pub fn norm_iterated(
    spec: &SpaceSpec,
    x: &FinVec,
    max_level: u32,
    precision: u32,
    budget: &Budget,
) -> Result<IteratedNorms> {
    if x.is_zero() {
        return Ok(IteratedNorms {
            levels: vec![Rational::zero()],
            fixed_point: Rational::zero(),
            stabilized_at: Some(0),
        });
    }
    let (positions, values) = vector_data(x);
    let last = positions.len() as u32 - 1;
    let paths = match spec {
        SpaceSpec::FiniteMixed { .. } => finite_paths(&spec.flattened_entries()?)?,
        SpaceSpec::AdmissibleSeq { coeffs } => {
            let wvals = seq_weight_values(coeffs, positions.len(), precision)?;
            if wvals.iter().any(|v| v.as_exact().is_none()) {
                return Err(Error::Invalid(
                    "iterated norms require exact (rational) weights".into(),
                ));
            }
            vec![Path::SeqTiling { weights: endpoints(&wvals, false) }]
        }
    };
    let mut eng = Engine::new(positions, values, paths, budget.dp_cells);
    let fixed = eng.eval(FIX, 0, last)?;
    let mut levels = Vec::new();
    let mut stabilized_at = None;
    for m in 0..=max_level {
        let v = eng.eval(m, 0, last)?;
        levels.push(v.clone());
        if v == fixed {
            stabilized_at = Some(m);
            break;
        }
    }
    Ok(IteratedNorms { levels, fixed_point: fixed, stabilized_at })
}

// ---------------------------------------------------------------------------
// Segment norms of the summing vector, with a reusable cache
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum CacheState {
    Exact(Engine),
    Enclosure { lo: Engine, hi: Engine },
}

/// Memo shared between computations of `||e_a + ... + e_b||` for one space
/// (and one precision): segment norms of the all-ones pattern depend only on
/// the position interval, so successive queries reuse each other's tables.
#[derive(Debug, Clone, Default)]
pub struct SegmentNormCache {
    key: Option<(SpaceSpec, u32)>,
    state: Option<CacheState>,
    max_pos: u32,
}

impl SegmentNormCache {
    pub fn new() -> Self {
        SegmentNormCache::default()
    }

    /// Total DP cells consumed through this cache.
    pub fn dp_cells(&self) -> u64 {
        match &self.state {
            None => 0,
            Some(CacheState::Exact(e)) => e.cells_used,
            Some(CacheState::Enclosure { lo, hi }) => lo.cells_used + hi.cells_used,
        }
    }

    fn ensure(&mut self, spec: &SpaceSpec, b: u32, precision: u32, budget: &Budget) -> Result<()> {
        match &self.key {
            None => self.key = Some((spec.clone(), precision)),
            Some((s, p)) => {
                if s != spec || *p != precision {
                    return Err(Error::Invalid(
                        "segment-norm cache reused with a different space or precision".into(),
                    ));
                }
            }
        }
        if self.state.is_none() || b > self.max_pos {
            let positions: Vec<u32> = (1..=b).collect();
            let values = vec![Rational::one(); b as usize];
            match spec {
                SpaceSpec::FiniteMixed { .. } => {
                    if self.state.is_none() {
                        let paths = finite_paths(&spec.flattened_entries()?)?;
                        self.state = Some(CacheState::Exact(Engine::new(
                            positions,
                            values,
                            paths,
                            budget.dp_cells,
                        )));
                    } else if let Some(CacheState::Exact(e)) = &mut self.state {
                        e.extend_ones(b);
                    }
                }
                SpaceSpec::AdmissibleSeq { coeffs } => {
                    // Weights for arities up to the largest segment size; the
                    // earlier prefix is unchanged, so existing memo tables
                    // stay valid.
                    let wvals = seq_weight_values(coeffs, b as usize, precision)?;
                    let all_exact = wvals.iter().all(|v| v.as_exact().is_some());
                    let lo_path = vec![Path::SeqTiling { weights: endpoints(&wvals, false) }];
                    match self.state.take() {
                        None => {
                            if all_exact {
                                self.state = Some(CacheState::Exact(Engine::new(
                                    positions,
                                    values,
                                    lo_path,
                                    budget.dp_cells,
                                )));
                            } else {
                                let hi_path =
                                    vec![Path::SeqTiling { weights: endpoints(&wvals, true) }];
                                let lo =
                                    Engine::new(positions.clone(), values.clone(), lo_path, budget.dp_cells);
                                let hi = Engine::new(positions, values, hi_path, budget.dp_cells);
                                self.state = Some(CacheState::Enclosure { lo, hi });
                            }
                        }
                        Some(CacheState::Exact(mut e)) => {
                            e.extend_ones(b);
                            e.paths = Rc::from(lo_path);
                            if all_exact {
                                self.state = Some(CacheState::Exact(e));
                            } else {
                                // Exact weights so far are both endpoints at
                                // once, so the memo seeds both runs.
                                let mut hi = e.clone();
                                hi.paths = Rc::from(vec![Path::SeqTiling {
                                    weights: endpoints(&wvals, true),
                                }]);
                                self.state = Some(CacheState::Enclosure { lo: e, hi });
                            }
                        }
                        Some(CacheState::Enclosure { mut lo, mut hi }) => {
                            lo.extend_ones(b);
                            hi.extend_ones(b);
                            lo.paths = Rc::from(lo_path);
                            hi.paths =
                                Rc::from(vec![Path::SeqTiling { weights: endpoints(&wvals, true) }]);
                            self.state = Some(CacheState::Enclosure { lo, hi });
                        }
                    }
                }
            }
            self.max_pos = self.max_pos.max(b);
        }
        // The budget bounds the cumulative cells across the cache lifetime.
        match self.state.as_mut().expect("state was just ensured") {
            CacheState::Exact(e) => e.cell_limit = budget.dp_cells,
            CacheState::Enclosure { lo, hi } => {
                lo.cell_limit = budget.dp_cells;
                hi.cell_limit = budget.dp_cells;
            }
        }
        Ok(())
    }
}

/// Norm of the segment sum `e_a + e_(a+1) + ... + e_b` (`1 <= a <= b`),
/// sharing memo tables across calls through `cache`.
pub fn segment_sum_norm(
    spec: &SpaceSpec,
    a: u32,
    b: u32,
    precision: u32,
    budget: &Budget,
    cache: &mut SegmentNormCache,
) -> Result<Value> {
    if a == 0 || a > b {
        return Err(Error::Invalid(format!("segment [{a}, {b}] is malformed")));
    }
    cache.ensure(spec, b, precision, budget)?;
    match cache.state.as_mut().expect("cache state exists") {
        CacheState::Exact(e) => Ok(Value::Exact(e.eval(FIX, a - 1, b - 1)?)),
        CacheState::Enclosure { lo, hi } => {
            let l = lo.eval(FIX, a - 1, b - 1)?;
            let h = hi.eval(FIX, a - 1, b - 1)?;
            Ok(Value::Enclosure(RatInterval::new(l, h)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Fundamental function lambda_n = ||e_1 + ... + e_n||
// ---------------------------------------------------------------------------

/// The fundamental function table, `values[n - 1]` holding `lambda_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    pub values: Vec<Value>,
    /// "weight-recursion" (arity-only DP) or "norm-engine" (generic).
    pub method: &'static str,
    pub dp_cells: u64,
}

impl LambdaTable {
    pub fn get(&self, n: u32) -> Option<&Value> {
        self.values.get(n as usize - 1)
    }
}

/// When every admissibility rule constrains only the arity (AnK families or
/// a weight sequence), `lambda` satisfies an arithmetic recursion in the
/// weights alone. Returns the per-arity weights (`d = 2..`), or `None` when
/// the space has a position-sensitive family.
fn arity_only_weights(
    spec: &SpaceSpec,
    n_max: usize,
    precision: u32,
) -> Result<Option<Vec<Value>>> {
    match spec {
        SpaceSpec::FiniteMixed { .. } => {
            let entries = spec.flattened_entries()?;
            let mut k_max = 0usize;
            for e in &entries {
                match &e.family {
                    Family::AtMostK { k } => k_max = k_max.max(*k as usize),
                    Family::Singletons => {}
                    _ => return Ok(None),
                }
            }
            let cap = k_max.min(n_max);
            let mut out = Vec::new();
            for d in 2..=cap {
                let best = entries
                    .iter()
                    .filter_map(|e| match &e.family {
                        Family::AtMostK { k } if *k as usize >= d => Some(&e.theta),
                        _ => None,
                    })
                    .max();
                match best {
                    Some(t) => out.push(Value::Exact(t.clone())),
                    // No family admits d parts, nor any larger arity.
                    None => break,
                }
            }
            Ok(Some(out))
        }
        SpaceSpec::AdmissibleSeq { coeffs } => {
            Ok(Some(seq_weight_values(coeffs, n_max, precision)?))
        }
    }
}

/// Exact arity-only DP: `M_d(n)` is the best sum of `lambda` over `d`
/// interval parts tiling `1..=n`, and `lambda_n` maximizes `w_d * M_d(n)`.
fn lambda_arity_recursion(
    weights: &[Rational],
    n_max: usize,
    limit: u64,
    cells: &mut u64,
) -> Result<Vec<Rational>> {
    let d_max = weights.len() + 1;
    let mut lam = vec![Rational::one(); n_max + 1];
    let mut m = vec![vec![Rational::zero(); n_max + 1]; d_max + 1];
    for n in 1..=n_max {
        for d in 2..=d_max.min(n) {
            *cells += 1;
            if *cells > limit {
                return Err(Error::BudgetExceeded { limit, unit: "dp-cells" });
            }
            let mut best: Option<Rational> = None;
            for t in 1..=(n - d + 1) {
                let prev = if d == 2 { &lam[n - t] } else { &m[d - 1][n - t] };
                let cand = lam[t].clone() + prev.clone();
                if best.as_ref().map_or(true, |c| cand > *c) {
                    best = Some(cand);
                }
            }
            m[d][n] = best.expect("at least one cut");
        }
        let mut v = Rational::one();
        for d in 2..=d_max.min(n) {
            consider(&mut v, weights[d - 2].clone() * m[d][n].clone());
        }
        lam[n] = v;
    }
    Ok(lam[1..].to_vec())
}

/// The fundamental function for `n = 1..=n_max`, using the arity-only
/// recursion when the space allows it and the full norm engine otherwise.
pub fn lambda_table(
    spec: &SpaceSpec,
    n_max: u32,
    precision: u32,
    budget: &Budget,
) -> Result<LambdaTable> {
    if n_max == 0 {
        return Err(Error::Invalid("lambda table needs n_max >= 1".into()));
    }
    match arity_only_weights(spec, n_max as usize, precision)? {
        Some(wvals) => {
            let mut cells = 0u64;
            if wvals.iter().all(|v| v.as_exact().is_some()) {
                let lam = lambda_arity_recursion(
                    &endpoints(&wvals, false),
                    n_max as usize,
                    budget.dp_cells,
                    &mut cells,
                )?;
                Ok(LambdaTable {
                    values: lam.into_iter().map(Value::Exact).collect(),
                    method: "weight-recursion",
                    dp_cells: cells,
                })
            } else {
                let lo = lambda_arity_recursion(
                    &endpoints(&wvals, false),
                    n_max as usize,
                    budget.dp_cells,
                    &mut cells,
                )?;
                let hi = lambda_arity_recursion(
                    &endpoints(&wvals, true),
                    n_max as usize,
                    budget.dp_cells,
                    &mut cells,
                )?;
                let values = lo
                    .into_iter()
                    .zip(hi)
                    .map(|(l, h)| Ok(Value::Enclosure(RatInterval::new(l, h)?)))
                    .collect::<Result<_>>()?;
                Ok(LambdaTable { values, method: "weight-recursion", dp_cells: cells })
            }
        }
        None => lambda_table_via_norm(spec, n_max, precision, budget),
    }
}

/// The fundamental function computed entirely by the norm engine (always
/// valid; used as the cross-check for the arity-only recursion).
pub fn lambda_table_via_norm(
    spec: &SpaceSpec,
    n_max: u32,
    precision: u32,
    budget: &Budget,
) -> Result<LambdaTable> {
    if n_max == 0 {
        return Err(Error::Invalid("lambda table needs n_max >= 1".into()));
    }
    let mut cache = SegmentNormCache::new();
    let mut values = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        values.push(segment_sum_norm(spec, 1, n, precision, budget, &mut cache)?);
    }
    Ok(LambdaTable { values, method: "norm-engine", dp_cells: cache.dp_cells() })
}

// ---------------------------------------------------------------------------
// Dyadic bounds on lambda for large n
// ---------------------------------------------------------------------------

/// Default fractional bits for the dyadic probe.
pub const PROBE_FRAC_BITS: u32 = 48;

fn scale_floor(r: &Rational, bits: u32) -> Result<i128> {
    let scaled = (r.numer() << (bits as usize)).div_floor(r.denom());
    scaled
        .to_i128()
        .ok_or_else(|| Error::Invalid("dyadic weight out of range".into()))
}

fn scale_ceil(r: &Rational, bits: u32) -> Result<i128> {
    let scaled = (r.numer() << (bits as usize)).div_ceil(r.denom());
    scaled
        .to_i128()
        .ok_or_else(|| Error::Invalid("dyadic weight out of range".into()))
}

/// One directed fixed-point run of the arity recursion: every product is
/// rounded toward the chosen direction, so the run brackets the exact value
/// from that side.
fn lambda_dyadic_run(
    weights: &[i128],
    n_max: usize,
    bits: u32,
    round_up: bool,
    limit: u64,
    cells: &mut u64,
) -> Result<Vec<i128>> {
    let one = 1i128 << bits;
    let mask = one - 1;
    let d_max = weights.len() + 1;
    // Triangular M table over 2 <= d <= d_max, d <= n <= n_max.
    let mut offset = vec![0usize; d_max + 1];
    let mut total = 0usize;
    for d in 2..=d_max {
        offset[d] = total;
        total += n_max.saturating_sub(d) + 1;
    }
    let idx = |d: usize, n: usize| offset[d] + (n - d);
    let mut m = vec![0i128; total];
    let mut lam = vec![one; n_max + 1];
    for n in 1..=n_max {
        for d in 2..=d_max.min(n) {
            *cells += 1;
            if *cells > limit {
                return Err(Error::BudgetExceeded { limit, unit: "dp-cells" });
            }
            let mut best = i128::MIN;
            for t in 1..=(n - d + 1) {
                let prev = if d == 2 { lam[n - t] } else { m[idx(d - 1, n - t)] };
                let cand = lam[t] + prev;
                if cand > best {
                    best = cand;
                }
            }
            m[idx(d, n)] = best;
        }
        let mut v = one;
        for d in 2..=d_max.min(n) {
            let prod = weights[d - 2] * m[idx(d, n)];
            let rounded = if round_up { (prod + mask) >> bits } else { prod >> bits };
            if rounded > v {
                v = rounded;
            }
        }
        lam[n] = v;
    }
    Ok(lam[1..].to_vec())
}

/// Certified dyadic bounds on `lambda_n` for `n = 1..=n_max`, at resolution
/// `2^-frac_bits`. Requires an arity-only space (AnK families or a weight
/// sequence); designed for probing `lambda` at block sizes far beyond what
/// exact rational arithmetic handles comfortably.
pub fn lambda_dyadic_bounds(
    spec: &SpaceSpec,
    n_max: u32,
    frac_bits: u32,
    budget: &Budget,
) -> Result<Vec<RatInterval>> {
    if n_max == 0 {
        return Err(Error::Invalid("lambda bounds need n_max >= 1".into()));
    }
    let precision = (frac_bits + 8).min(crate::interval::MAX_PRECISION);
    let wvals = arity_only_weights(spec, n_max as usize, precision)?.ok_or_else(|| {
        Error::Invalid("dyadic lambda bounds need arity-only admissibility rules".into())
    })?;
    let mut w_lo = Vec::with_capacity(wvals.len());
    let mut w_hi = Vec::with_capacity(wvals.len());
    for v in &wvals {
        w_lo.push(scale_floor(v.lo(), frac_bits)?);
        w_hi.push(scale_ceil(v.hi(), frac_bits)?);
    }
    let mut cells = 0u64;
    let lo = lambda_dyadic_run(&w_lo, n_max as usize, frac_bits, false, budget.dp_cells, &mut cells)?;
    let hi = lambda_dyadic_run(&w_hi, n_max as usize, frac_bits, true, budget.dp_cells, &mut cells)?;
    let denom = BigInt::one() << (frac_bits as usize);
    lo.into_iter()
        .zip(hi)
        .map(|(l, h)| {
            RatInterval::new(
                Rational::new(BigInt::from(l), denom.clone()),
                Rational::new(BigInt::from(h), denom.clone()),
            )
        })
        .collect()
}
