//! Structural classification of space descriptors and pairwise
//! total-incomparability decisions.
//!
//! The classifier is a cascade of exact symbolic rules over the descriptor
//! (weights and admissibility families); it never extrapolates from floating
//! point. Each verdict carries rationale lines tagged with the rule that
//! produced it, plus small numeric probes (fundamental-function rows, window
//! norms, certified block ratios) that serve as inspectable evidence.
//!
//! Saturation verdicts mean: every infinite-dimensional block subspace
//! contains a copy of the named classical space. A `containsL1` verdict
//! asserts a single embedded copy without the "every subspace" quantifier.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::coeffs::CoefficientSeq;
use crate::error::{Error, Result};
use crate::families::{Family, GapVerdict, IndexValue, NonsingletonProfile};
use crate::interval::{
    ln2_enclosure, log2_enclosure, log2_enclosure_uint, pow_rational, RatInterval, MAX_PRECISION,
};
use crate::norm::{
    lambda_dyadic_bounds, lambda_table, segment_sum_norm, Budget, SegmentNormCache,
    PROBE_FRAC_BITS,
};
use crate::scalar::{decimal_string, format_rational, ratio, serde_rational, Rational, Value};
use crate::space::{SpaceSpec, WeightedEntry};

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// The saturation verdict for a space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Saturation {
    /// Every block subspace contains c0.
    #[serde(rename = "c0Saturated")]
    C0Saturated,
    /// Every block subspace contains l1.
    #[serde(rename = "l1Saturated")]
    L1Saturated,
    /// Every block subspace contains lp for the stated critical exponent.
    #[serde(rename = "lpSaturated")]
    LpSaturated { p: Value },
    /// The space contains an isomorphic copy of l1 (no saturation claim);
    /// `contains_c0` records whether a c0 copy is also certified.
    #[serde(rename = "containsL1")]
    ContainsL1 { contains_c0: Option<bool> },
    /// No rule in the cascade applies.
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for Saturation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Saturation::C0Saturated => write!(f, "c0-saturated"),
            Saturation::L1Saturated => write!(f, "l1-saturated"),
            Saturation::LpSaturated { p } => write!(f, "lp-saturated (p = {p})"),
            Saturation::ContainsL1 { contains_c0 } => {
                let c0 = match contains_c0 {
                    Some(true) => "yes",
                    Some(false) => "not certified",
                    None => "unknown",
                };
                write!(f, "contains l1 (contains c0: {c0})")
            }
            Saturation::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// One fundamental-function row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRow {
    pub n: u32,
    pub lambda: Value,
}

/// The norm of the all-ones vector on a window of positions, next to its
/// l1 mass. A bounded norm against growing mass exhibits a c0-like
/// direction; mass-proportional norms exhibit an l1-like one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WindowRatioRow {
    pub window_lo: u32,
    pub window_hi: u32,
    #[serde(with = "serde_rational")]
    pub l1_mass: Rational,
    pub norm: Value,
}

/// A certified scale at which unit-vector blocks of length `base^scale`
/// carry almost the full factor `base` over the previous scale, so the
/// l1 basis of that length is reproduced on blocks up to factor
/// `base / (base - epsilon)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockWitness {
    pub base: u32,
    pub scale: u32,
    pub block: u32,
    /// Certified lower bound on `lambda_block / lambda_{block/base}`.
    #[serde(with = "serde_rational")]
    pub certified_ratio: Rational,
    /// The bar it clears: `base - epsilon`.
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
}

/// Full classification output for one space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub space: String,
    pub saturation: Saturation,
    /// `None` when the cascade makes no reflexivity claim.
    pub reflexive: Option<bool>,
    /// One tagged line per rule that fired, in cascade order.
    pub rationale: Vec<String>,
    /// Norm-preserving or norm-equivalent simplifications applied.
    pub reductions: Vec<String>,
    pub lambda_probe: Vec<LambdaRow>,
    pub window_probe: Vec<WindowRatioRow>,
    pub block_witness: Option<BlockWitness>,
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "space: {}", self.space)?;
        writeln!(f, "saturation: {}", self.saturation)?;
        match self.reflexive {
            Some(b) => writeln!(f, "reflexive: {b}")?,
            None => writeln!(f, "reflexive: no claim")?,
        }
        if !self.rationale.is_empty() {
            writeln!(f, "rationale:")?;
            for line in &self.rationale {
                writeln!(f, "  - {line}")?;
            }
        }
        if !self.reductions.is_empty() {
            writeln!(f, "reductions:")?;
            for line in &self.reductions {
                writeln!(f, "  - {line}")?;
            }
        }
        if !self.lambda_probe.is_empty() {
            writeln!(f, "fundamental function:")?;
            for row in &self.lambda_probe {
                writeln!(f, "  lambda_{} = {}", row.n, row.lambda)?;
            }
        }
        if !self.window_probe.is_empty() {
            writeln!(f, "window norms (all-ones on a position window):")?;
            for row in &self.window_probe {
                writeln!(
                    f,
                    "  positions {}..{}: l1 mass {}, norm {}",
                    row.window_lo,
                    row.window_hi,
                    format_rational(&row.l1_mass),
                    row.norm
                )?;
            }
        }
        if let Some(w) = &self.block_witness {
            writeln!(
                f,
                "block witness: lambda_{} / lambda_{} >= {} (threshold {} = base {} - epsilon)",
                w.block,
                w.block / w.base,
                format_rational(&w.certified_ratio),
                format_rational(&w.threshold),
                w.base
            )?;
        }
        Ok(())
    }
}

/// The outcome of comparing two spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComparisonVerdict {
    /// No infinite-dimensional subspace of one embeds into the other.
    #[serde(rename = "totallyIncomparable")]
    TotallyIncomparable,
    /// The spaces share an infinite-dimensional subspace up to isomorphism.
    #[serde(rename = "notTotallyIncomparable")]
    NotTotallyIncomparable,
    /// No decision rule applies; numeric evidence is attached.
    #[serde(rename = "evidenceOnly")]
    EvidenceOnly,
}

impl fmt::Display for ComparisonVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComparisonVerdict::TotallyIncomparable => write!(f, "totally incomparable"),
            ComparisonVerdict::NotTotallyIncomparable => write!(f, "not totally incomparable"),
            ComparisonVerdict::EvidenceOnly => write!(f, "evidence only"),
        }
    }
}

/// Side-by-side fundamental-function growth for two spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRatioRow {
    pub n: u32,
    pub lambda_left: Value,
    pub lambda_right: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRatioProbe {
    pub rows: Vec<LambdaRatioRow>,
}

/// Full comparison output for a pair of spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonReport {
    pub left: String,
    pub right: String,
    pub verdict: ComparisonVerdict,
    /// Machine tag of the deciding rule.
    pub rule: String,
    /// Trichotomy case tag when the critical-exponent rule decided.
    pub case: Option<String>,
    pub rationale: Vec<String>,
    pub left_saturation: Option<Saturation>,
    pub right_saturation: Option<Saturation>,
    pub probe: Option<LambdaRatioProbe>,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "left:  {}", self.left)?;
        writeln!(f, "right: {}", self.right)?;
        writeln!(f, "verdict: {} [{}]", self.verdict, self.rule)?;
        if let Some(c) = &self.case {
            writeln!(f, "case: {c}")?;
        }
        for line in &self.rationale {
            writeln!(f, "  - {line}")?;
        }
        if let (Some(l), Some(r)) = (&self.left_saturation, &self.right_saturation) {
            writeln!(f, "left saturation:  {l}")?;
            writeln!(f, "right saturation: {r}")?;
        }
        if let Some(p) = &self.probe {
            writeln!(f, "fundamental-function growth (left vs right):")?;
            for row in &p.rows {
                writeln!(f, "  n={}: {} vs {}", row.n, row.lambda_left, row.lambda_right)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Critical exponent machinery
// ---------------------------------------------------------------------------

/// The critical exponent of one (index n, weight theta) pair with
/// `n * theta > 1`: `1/p = 1 - log_n(1/theta)`. Comparisons prefer exact
/// integer-arithmetic decisions and fall back to certified enclosures.
#[derive(Debug, Clone)]
struct PVal {
    n: u64,
    inv_theta: Rational,
    /// Exact `p` when `log_n(1/theta)` is rational with small denominator.
    exact: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PCompare {
    Less,
    Equal,
    Greater,
    Undecided,
}

/// Detect `log_n(inv) = r/s` by testing `inv^s == n^r` for `s <= 24`.
/// Exponents are in `(0, 1)`, so only `1 <= r < s` can match.
fn exact_log_ratio(n: u64, inv: &Rational) -> Option<(u32, u32)> {
    let base = Rational::from_integer(BigInt::from(n));
    for s in 1..=24u32 {
        let lhs = pow_rational(inv, s);
        let mut power = base.clone();
        for r in 1..s {
            match power.cmp(&lhs) {
                std::cmp::Ordering::Equal => return Some((r, s)),
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Less => power *= &base,
            }
        }
    }
    None
}

impl PVal {
    fn new(n: u64, theta: &Rational) -> Self {
        let inv_theta = theta.recip();
        let exact = exact_log_ratio(n, &inv_theta)
            .map(|(r, s)| Rational::new(BigInt::from(s), BigInt::from(s - r)));
        PVal { n, inv_theta, exact }
    }

    /// The exponent as an exact rational or a certified enclosure:
    /// `p = log2(n) / (log2(n) - log2(1/theta))`.
    fn as_value(&self, precision: u32) -> Result<Value> {
        if let Some(p) = &self.exact {
            return Ok(Value::Exact(p.clone()));
        }
        let mut prec = precision.max(48);
        loop {
            let ln = log2_enclosure_uint(&BigUint::from(self.n), prec)?;
            let li = log2_enclosure(&self.inv_theta, prec)?;
            let den = ln.sub(&li);
            if den.lo > Rational::zero() {
                return Ok(Value::Enclosure(ln.mul(&den.recip_positive()?)));
            }
            if prec >= MAX_PRECISION {
                return Err(Error::Undecided(
                    "critical exponent denominator not separated from zero".into(),
                ));
            }
            prec = (prec * 2).min(MAX_PRECISION);
        }
    }
}

fn from_ordering(o: std::cmp::Ordering) -> PCompare {
    match o {
        std::cmp::Ordering::Less => PCompare::Less,
        std::cmp::Ordering::Equal => PCompare::Equal,
        std::cmp::Ordering::Greater => PCompare::Greater,
    }
}

/// Write `n` as `g^e` with the smallest possible base `g`.
fn primitive_power(n: u64) -> (u64, u32) {
    for e in (2..=63u32).rev() {
        let r = n.nth_root(e);
        if r >= 2 {
            if let Some(p) = r.checked_pow(e) {
                if p == n {
                    return (r, e);
                }
            }
        }
    }
    (n, 1)
}

/// Compare one exact log-ratio `r/s` against `log_{n}(inv)` using only
/// integer powers: `r/s <=> log_n(inv)` iff `n^r <=> inv^s`.
fn compare_ratio_to_log(r: u32, s: u32, n: u64, inv: &Rational) -> std::cmp::Ordering {
    let lhs = pow_rational(&Rational::from_integer(BigInt::from(n)), r);
    let rhs = pow_rational(inv, s);
    lhs.cmp(&rhs)
}

/// Decide `p_a <=> p_b`. The exponent is increasing in `L = log_n(1/theta)`,
/// so every branch reduces to comparing the two logarithms: exactly when one
/// is rational or the indices are powers of a common base, and by nested
/// base-2 log enclosures otherwise.
fn p_compare(a: &PVal, b: &PVal) -> Result<PCompare> {
    if let (Some(x), Some(y)) = (&a.exact, &b.exact) {
        return Ok(from_ordering(x.cmp(y)));
    }
    let ratio_of = |p: &Rational| -> Result<(u32, u32)> {
        // p = s/(s-r) recovered to L = r/s = (p-1)/p.
        let l = (p - Rational::one()) / p;
        let r = l.numer().to_u32();
        let s = l.denom().to_u32();
        match (r, s) {
            (Some(r), Some(s)) => Ok((r, s)),
            _ => Err(Error::Invalid("exact exponent out of range".into())),
        }
    };
    if let Some(pa) = &a.exact {
        // L_a = r/s against L_b; the exponent is increasing in L.
        let (r, s) = ratio_of(pa)?;
        return Ok(from_ordering(compare_ratio_to_log(r, s, b.n, &b.inv_theta)));
    }
    if let Some(pb) = &b.exact {
        // L_b = r/s against L_a, so the ordering flips.
        let (r, s) = ratio_of(pb)?;
        return Ok(from_ordering(compare_ratio_to_log(r, s, a.n, &a.inv_theta).reverse()));
    }
    let (ga, sa) = primitive_power(a.n);
    let (gb, sb) = primitive_power(b.n);
    if ga == gb {
        // L_a = log_g(inv_a)/sa against L_b = log_g(inv_b)/sb reduces to the
        // exact rational comparison inv_a^sb <=> inv_b^sa.
        let lhs = pow_rational(&a.inv_theta, sb);
        let rhs = pow_rational(&b.inv_theta, sa);
        return Ok(from_ordering(lhs.cmp(&rhs)));
    }
    // General case: L_a <=> L_b iff log2(inv_a)*log2(n_b) <=> log2(inv_b)*log2(n_a).
    let mut prec = 32u32;
    loop {
        let la = log2_enclosure(&a.inv_theta, prec)?;
        let lb = log2_enclosure(&b.inv_theta, prec)?;
        let na = log2_enclosure_uint(&BigUint::from(a.n), prec)?;
        let nb = log2_enclosure_uint(&BigUint::from(b.n), prec)?;
        let left = la.mul(&nb);
        let right = lb.mul(&na);
        if left.hi < right.lo {
            return Ok(PCompare::Less);
        }
        if right.hi < left.lo {
            return Ok(PCompare::Greater);
        }
        if prec >= MAX_PRECISION {
            return Ok(PCompare::Undecided);
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// The minimum exponent among the candidates, with the winning candidate
/// when the minimum is separated from the rest. An unseparated minimum
/// degrades to the enclosure `[min lo_i, min hi_i]`, which always contains
/// the true minimum.
fn minimal_p(
    cands: &[PVal],
    precision: u32,
    rationale: &mut Vec<String>,
) -> Result<(Value, Option<PVal>)> {
    let mut min_idx = 0usize;
    let mut undecided = false;
    for i in 1..cands.len() {
        match p_compare(&cands[min_idx], &cands[i])? {
            PCompare::Greater => min_idx = i,
            PCompare::Undecided => undecided = true,
            PCompare::Less | PCompare::Equal => {}
        }
    }
    if undecided {
        rationale.push(
            "[exponent-minimum-unresolved] two critical exponents agree to the maximum \
             working precision; reporting the enclosure of the minimum"
                .into(),
        );
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for c in cands {
            let v = c.as_value(MAX_PRECISION)?;
            lo = Some(lo.map_or_else(|| v.lo().clone(), |x: Rational| x.min(v.lo().clone())));
            hi = Some(hi.map_or_else(|| v.hi().clone(), |x: Rational| x.min(v.hi().clone())));
        }
        Ok((
            Value::Enclosure(RatInterval::new(lo.expect("nonempty"), hi.expect("nonempty"))?),
            None,
        ))
    } else {
        Ok((cands[min_idx].as_value(precision)?, Some(cands[min_idx].clone())))
    }
}

// ---------------------------------------------------------------------------
// Finite-descriptor classification
// ---------------------------------------------------------------------------

fn union_family(entries: &[&WeightedEntry]) -> Family {
    if entries.len() == 1 {
        entries[0].family.clone()
    } else {
        Family::Union { parts: entries.iter().map(|e| e.family.clone()).collect() }
    }
}

/// The rule cascade over a finite weighted family list. Returns the
/// saturation, the reflexivity claim, and the winning critical exponent
/// when the lp rule decided.
fn classify_entries(
    entries: &[WeightedEntry],
    index_cap: u32,
    precision: u32,
    rationale: &mut Vec<String>,
    reductions: &mut Vec<String>,
) -> Result<(Saturation, Option<bool>, Option<PVal>)> {
    let one = Rational::one();
    let unit: Vec<&WeightedEntry> = entries.iter().filter(|e| e.theta == one).collect();
    let rest: Vec<WeightedEntry> = entries.iter().filter(|e| e.theta != one).cloned().collect();

    if !unit.is_empty() {
        // Weight-1 family with splitting power at two levels or more.
        for e in &unit {
            let ix = e.family.index(index_cap)?;
            if ix.at_least_two() {
                rationale.push(format!(
                    "[unit-weight-high-index] family {} carries weight 1 and has derived \
                     index {}; full mass survives two levels of admissible splitting, which \
                     reproduces the l1 basis inside every block subspace",
                    e.family, ix
                ));
                return Ok((Saturation::L1Saturated, Some(false), None));
            }
        }
        // All weight-1 families have index <= 1: branch on how many genuine
        // (size >= 2) members they still have.
        let ju = union_family(&unit);
        match ju.nonsingleton_profile() {
            NonsingletonProfile::FiniteCount { count, max_element } => {
                if rest.is_empty() {
                    rationale.push(format!(
                        "[unit-weight-finite-members] the weight-1 families have only \
                         {count} members of size >= 2, none reaching past position \
                         {max_element}; beyond that point every admissible split \
                         degenerates to singletons and the norm is the sup norm"
                    ));
                    reductions.push(format!(
                        "isomorphic to c0: the norm agrees with the sup norm beyond \
                         position {max_element}"
                    ));
                    return Ok((Saturation::C0Saturated, Some(false), None));
                }
                rationale.push(format!(
                    "[bounded-perturbation] {} weight-1 families have finitely many \
                     members of size >= 2 (largest element {max_element}); they change \
                     the norm only up to equivalence and are dropped",
                    unit.len()
                ));
                reductions.push(format!(
                    "dropped {} weight-1 families with finitely many nonsingleton members",
                    unit.len()
                ));
                return classify_entries(&rest, index_cap, precision, rationale, reductions);
            }
            NonsingletonProfile::Infinite => {
                rationale.push(
                    "[unit-weight-infinite-members] a weight-1 family keeps infinitely \
                     many members of size >= 2; the unit vectors over those members span \
                     an isomorphic copy of l1"
                        .into(),
                );
                let all: Vec<&WeightedEntry> = entries.iter().collect();
                match union_family(&all).gap_points_unbounded() {
                    GapVerdict::Unbounded { samples } => {
                        rationale.push(format!(
                            "[straddle-gaps] arbitrarily large positions (for example \
                             {samples:?}) are straddled by no member of any family; unit \
                             vectors at such positions are never joined by a split and \
                             span a copy of c0"
                        ));
                        Ok((
                            Saturation::ContainsL1 { contains_c0: Some(true) },
                            Some(false),
                            None,
                        ))
                    }
                    GapVerdict::Bounded => {
                        if rest.is_empty() {
                            rationale.push(
                                "[unit-weight-straddling] every large position is \
                                 straddled by a weight-1 member, so successive splits \
                                 chain full mass across every block sequence: the space \
                                 is l1-saturated"
                                    .into(),
                            );
                            Ok((Saturation::L1Saturated, Some(false), None))
                        } else {
                            rationale.push(
                                "[contains-l1] the l1 copy from the weight-1 families \
                                 stands, but the remaining weighted families block a \
                                 saturation claim"
                                    .into(),
                            );
                            Ok((
                                Saturation::ContainsL1 { contains_c0: Some(false) },
                                Some(false),
                                None,
                            ))
                        }
                    }
                    GapVerdict::Unknown => Ok((
                        Saturation::ContainsL1 { contains_c0: None },
                        Some(false),
                        None,
                    )),
                }
            }
        }
    } else {
        // All weights strictly below 1.
        let mut pairs: Vec<(String, u64, Rational)> = Vec::new();
        let mut any_infinite = false;
        for e in entries {
            match e.family.index(index_cap)? {
                IndexValue::InfiniteAboveCap(c) => {
                    any_infinite = true;
                    rationale.push(format!(
                        "[index-above-cap] family {} has derived index above the cap {c}; \
                         the sub-1 weight rules cover only finite-index families",
                        e.family
                    ));
                }
                IndexValue::Finite(n) => {
                    pairs.push((e.family.to_string(), n as u64, e.theta.clone()));
                }
            }
        }
        if any_infinite {
            rationale.push(
                "[undetermined] weights below 1 combined with an unbounded-index family \
                 fall outside the finite-index classification; no saturation claim is made"
                    .into(),
            );
            return Ok((Saturation::Undetermined, None, None));
        }
        if entries
            .iter()
            .any(|e| !matches!(e.family, Family::AtMostK { .. } | Family::Singletons))
        {
            rationale.push(
                "[index-reduction] position-sensitive families of finite index enter the \
                 weight rules through their derived index"
                    .into(),
            );
        }
        let mut cands: Vec<PVal> = Vec::new();
        for (disp, n, theta) in &pairs {
            if *n >= 1 && Rational::from_integer(BigInt::from(*n)) * theta > one {
                rationale.push(format!(
                    "[critical-exponent] family {disp}: index {n} times weight {} exceeds 1, \
                     contributing the exponent p with 1/p = 1 - log_{n}(1/theta)",
                    format_rational(theta)
                ));
                cands.push(PVal::new(*n, theta));
            }
        }
        if cands.is_empty() {
            rationale.push(
                "[weights-below-reciprocal-index] every weight satisfies theta <= 1/index; \
                 admissible splitting never beats the sup norm by an unbounded factor and \
                 every block subspace contains c0"
                    .into(),
            );
            return Ok((Saturation::C0Saturated, Some(false), None));
        }
        let (p, winner) = minimal_p(&cands, precision, rationale)?;
        rationale.push(format!(
            "[lp-saturation] the smallest contributed exponent p = {p} rules: every block \
             subspace contains lp, and the space is reflexive"
        ));
        Ok((Saturation::LpSaturated { p }, Some(true), winner))
    }
}

fn lambda_probe(spec: &SpaceSpec, n_max: u32, precision: u32, budget: &Budget) -> Result<Vec<LambdaRow>> {
    let t = lambda_table(spec, n_max, precision, budget)?;
    Ok(t
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| LambdaRow { n: i as u32 + 1, lambda: v.clone() })
        .collect())
}

fn window_probe(spec: &SpaceSpec, precision: u32, budget: &Budget) -> Result<Vec<WindowRatioRow>> {
    let mut cache = SegmentNormCache::new();
    let mut rows = Vec::new();
    for k in 1..=5u32 {
        let lo = (1u32 << k) + 1;
        let hi = 1u32 << (k + 1);
        let norm = segment_sum_norm(spec, lo, hi, precision, budget, &mut cache)?;
        rows.push(WindowRatioRow {
            window_lo: lo,
            window_hi: hi,
            l1_mass: Rational::from_integer(BigInt::from(hi - lo + 1)),
            norm,
        });
    }
    Ok(rows)
}

fn classify_finite_inner(
    spec: &SpaceSpec,
    index_cap: u32,
    precision: u32,
    budget: &Budget,
) -> Result<(ClassificationReport, Option<PVal>)> {
    let mut spec = spec.clone();
    spec.validate()?;
    let entries = match &spec {
        SpaceSpec::FiniteMixed { entries } => entries.clone(),
        SpaceSpec::AdmissibleSeq { .. } => {
            return Err(Error::Invalid(
                "finite classification needs a finite weighted family list".into(),
            ))
        }
    };
    let mut rationale = Vec::new();
    let mut reductions = Vec::new();
    let (saturation, reflexive, pval) =
        classify_entries(&entries, index_cap, precision, &mut rationale, &mut reductions)?;
    let report = ClassificationReport {
        space: spec.to_string(),
        saturation,
        reflexive,
        rationale,
        reductions,
        lambda_probe: lambda_probe(&spec, 16, precision, budget)?,
        window_probe: window_probe(&spec, precision, budget)?,
        block_witness: None,
    };
    Ok((report, pval))
}

/// Classify a finite weighted-family descriptor.
pub fn classify_finite(
    spec: &SpaceSpec,
    index_cap: u32,
    precision: u32,
    budget: &Budget,
) -> Result<ClassificationReport> {
    Ok(classify_finite_inner(spec, index_cap, precision, budget)?.0)
}

// ---------------------------------------------------------------------------
// Weight-sequence classification
// ---------------------------------------------------------------------------

/// Classify a full weight-sequence descriptor.
pub fn classify_admissible_seq(
    spec: &SpaceSpec,
    precision: u32,
    budget: &Budget,
) -> Result<ClassificationReport> {
    let mut spec = spec.clone();
    spec.validate()?;
    let coeffs = match &spec {
        SpaceSpec::AdmissibleSeq { coeffs } => coeffs.clone(),
        SpaceSpec::FiniteMixed { .. } => {
            return Err(Error::Invalid(
                "weight-sequence classification needs a weight sequence".into(),
            ))
        }
    };
    let mut rationale = Vec::new();
    let mut reductions = Vec::new();
    let (saturation, reflexive) = if coeffs.theta2_sup_is_one() {
        rationale.push(
            "[pair-weight-one] splitting into two parts carries weight arbitrarily close \
             to 1; iterated pair splits transport full mass to the leaves, making the \
             basis isometrically equivalent to the l1 basis"
                .into(),
        );
        reductions.push("isometric to l1".into());
        (Saturation::L1Saturated, Some(false))
    } else if coeffs.infimum_positive() {
        rationale.push(
            "[weights-bounded-below] inf theta > 0: every block sequence obeys an l1 lower \
             bound with that constant, an isomorphic l1 copy in every block subspace"
                .into(),
        );
        reductions.push("isomorphic to l1".into());
        (Saturation::L1Saturated, Some(false))
    } else if coeffs.dominated_by_inv_linear() {
        rationale.push(
            "[weights-below-reciprocal-arity] theta_n <= 1/n for every arity: no weighted \
             split can beat the sup norm, which the norm therefore equals"
                .into(),
        );
        reductions.push("isometric to c0: the norm equals the sup norm".into());
        (Saturation::C0Saturated, Some(false))
    } else {
        rationale.push(
            "[undetermined] the weight sequence vanishes, is not dominated by 1/n, and \
             never reaches 1 at arity 2: outside the symbolic rules"
                .into(),
        );
        (Saturation::Undetermined, None)
    };
    let block_witness = if saturation == Saturation::Undetermined && coeffs.block_subexponential() {
        let w = l1_block_witness(&spec, 2, &ratio(1, 5), 1024, budget)?;
        if let Some(w) = &w {
            rationale.push(format!(
                "[l1-block-scales] certified: lambda_{} / lambda_{} >= {} (> {} = base - 1/5); \
                 at that scale the l1 basis of length {} is reproduced on blocks up to factor \
                 base/(base - epsilon); the weights decay slower than any geometric rate, so \
                 this recurs at every scale",
                w.block,
                w.block / w.base,
                format_rational(&w.certified_ratio),
                format_rational(&w.threshold),
                w.block
            ));
        }
        w
    } else {
        None
    };
    Ok(ClassificationReport {
        space: spec.to_string(),
        saturation,
        reflexive,
        rationale,
        reductions,
        lambda_probe: lambda_probe(&spec, 12, precision, budget)?,
        window_probe: Vec::new(),
        block_witness,
    })
}

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

/// Search for the first scale `l` with a certified bound
/// `lambda_{base^l} / lambda_{base^(l-1)} >= base - epsilon`, scanning
/// `base^l <= max_block`. Certified means: the dyadic lower bound of the
/// numerator clears the bar against the dyadic upper bound of the
/// denominator.
pub fn l1_block_witness(
    spec: &SpaceSpec,
    base: u32,
    epsilon: &Rational,
    max_block: u32,
    budget: &Budget,
) -> Result<Option<BlockWitness>> {
    if base < 2 {
        return Err(Error::Invalid("block witness needs base >= 2".into()));
    }
    let threshold = Rational::from_integer(BigInt::from(base)) - epsilon;
    if threshold <= Rational::one() {
        return Err(Error::Invalid("block witness needs epsilon < base - 1".into()));
    }
    let bounds = lambda_dyadic_bounds(spec, max_block, PROBE_FRAC_BITS, budget)?;
    let mut block = base as u64;
    let mut scale = 1u32;
    while block <= max_block as u64 {
        let num = &bounds[block as usize - 1].lo;
        let den = &bounds[(block / base as u64) as usize - 1].hi;
        if num >= &(&threshold * den) {
            return Ok(Some(BlockWitness {
                base,
                scale,
                block: block as u32,
                certified_ratio: num / den,
                threshold,
            }));
        }
        block *= base as u64;
        scale += 1;
    }
    Ok(None)
}

/// Fundamental-function growth of two spaces side by side, at powers of two.
pub fn lambda_ratio_probe(
    left: &SpaceSpec,
    right: &SpaceSpec,
    n_max: u32,
    precision: u32,
    budget: &Budget,
) -> Result<LambdaRatioProbe> {
    let ta = lambda_table(left, n_max, precision, budget)?;
    let tb = lambda_table(right, n_max, precision, budget)?;
    let mut rows = Vec::new();
    let mut n = 1u32;
    while n <= n_max {
        rows.push(LambdaRatioRow {
            n,
            lambda_left: ta.get(n).expect("within table").clone(),
            lambda_right: tb.get(n).expect("within table").clone(),
        });
        n *= 2;
    }
    Ok(LambdaRatioProbe { rows })
}

// ---------------------------------------------------------------------------
// Pairwise comparison
// ---------------------------------------------------------------------------

fn classify_any(
    spec: &SpaceSpec,
    index_cap: u32,
    precision: u32,
    budget: &Budget,
) -> Result<(ClassificationReport, Option<PVal>)> {
    match spec {
        SpaceSpec::FiniteMixed { .. } => classify_finite_inner(spec, index_cap, precision, budget),
        SpaceSpec::AdmissibleSeq { .. } => {
            Ok((classify_admissible_seq(spec, precision, budget)?, None))
        }
    }
}

fn contains_l1(s: &Saturation) -> bool {
    matches!(s, Saturation::L1Saturated | Saturation::ContainsL1 { .. })
}

fn contains_c0(s: &Saturation) -> bool {
    matches!(
        s,
        Saturation::C0Saturated | Saturation::ContainsL1 { contains_c0: Some(true) }
    )
}

/// Is `r` strictly below `3 ln 2 - 1`? Refines the enclosure until the
/// rational clears one side; `None` when the maximum precision cannot
/// separate them.
fn below_log_threshold(r: &Rational) -> Result<Option<bool>> {
    let three = ratio(3, 1);
    let mut prec = 32u32;
    loop {
        let l = ln2_enclosure(prec)?;
        let lo = &three * &l.lo - Rational::one();
        let hi = &three * &l.hi - Rational::one();
        if *r < lo {
            return Ok(Some(true));
        }
        if *r > hi {
            return Ok(Some(false));
        }
        if prec >= MAX_PRECISION {
            return Ok(None);
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// Decide whether two spaces are totally incomparable (no common
/// infinite-dimensional subspace up to isomorphism), share a subspace, or
/// fall outside the decision rules.
pub fn compare(
    left: &SpaceSpec,
    right: &SpaceSpec,
    index_cap: u32,
    precision: u32,
    budget: &Budget,
) -> Result<ComparisonReport> {
    let mut a = left.clone();
    a.validate()?;
    let mut b = right.clone();
    b.validate()?;
    let mut report = ComparisonReport {
        left: a.to_string(),
        right: b.to_string(),
        verdict: ComparisonVerdict::EvidenceOnly,
        rule: String::new(),
        case: None,
        rationale: Vec::new(),
        left_saturation: None,
        right_saturation: None,
        probe: None,
    };
    if a == b {
        report.verdict = ComparisonVerdict::NotTotallyIncomparable;
        report.rule = "identical-descriptor".into();
        report
            .rationale
            .push("the canonicalized descriptors are identical; the spaces coincide".into());
        return Ok(report);
    }
    let (ca, pa) = classify_any(&a, index_cap, precision, budget)?;
    let (cb, pb) = classify_any(&b, index_cap, precision, budget)?;
    report.left_saturation = Some(ca.saturation.clone());
    report.right_saturation = Some(cb.saturation.clone());

    use Saturation::*;
    match (&ca.saturation, &cb.saturation) {
        (C0Saturated, C0Saturated) => {
            report.verdict = ComparisonVerdict::NotTotallyIncomparable;
            report.rule = "critical-exponent-trichotomy".into();
            report.case = Some("both-c0".into());
            report.rationale.push(
                "both spaces are c0-saturated; any block subspace of either contains a \
                 copy of c0, which embeds into the other"
                    .into(),
            );
            return Ok(report);
        }
        (LpSaturated { p: vp }, LpSaturated { p: vq }) => {
            if let (Some(x), Some(y)) = (&pa, &pb) {
                match p_compare(x, y)? {
                    PCompare::Equal => {
                        report.verdict = ComparisonVerdict::NotTotallyIncomparable;
                        report.rule = "critical-exponent-trichotomy".into();
                        report.case = Some("equal-p".into());
                        report.rationale.push(format!(
                            "both spaces are lp-saturated with the same critical exponent \
                             (left {vp}, right {vq}, proven equal); they share lp subspaces"
                        ));
                        return Ok(report);
                    }
                    PCompare::Less | PCompare::Greater => {
                        report.verdict = ComparisonVerdict::TotallyIncomparable;
                        report.rule = "critical-exponent-trichotomy".into();
                        report.case = Some("distinct-p".into());
                        report.rationale.push(format!(
                            "lp-saturated with proven-distinct exponents (left {vp}, right \
                             {vq}); a common subspace would contain lp copies for both \
                             exponents, which is impossible"
                        ));
                        return Ok(report);
                    }
                    PCompare::Undecided => {
                        report.rule = "p-comparison-undecided".into();
                        report.rationale.push(format!(
                            "the critical exponents (left {vp}, right {vq}) agree to the \
                             maximum working precision; no exact rule separates them"
                        ));
                        report.probe =
                            Some(lambda_ratio_probe(&a, &b, 32, precision, budget)?);
                        return Ok(report);
                    }
                }
            }
        }
        (C0Saturated, LpSaturated { .. }) | (LpSaturated { .. }, C0Saturated) => {
            report.verdict = ComparisonVerdict::TotallyIncomparable;
            report.rule = "critical-exponent-trichotomy".into();
            report.case = Some("c0-versus-lp".into());
            report.rationale.push(
                "one space is c0-saturated and the other lp-saturated for a finite \
                 exponent; a common subspace would embed both c0 and lp, which is \
                 impossible"
                    .into(),
            );
            return Ok(report);
        }
        (L1Saturated, L1Saturated) => {
            report.verdict = ComparisonVerdict::NotTotallyIncomparable;
            report.rule = "shared-saturation".into();
            report.rationale.push(
                "both spaces are l1-saturated; block subspaces of either contain l1 \
                 copies that embed into the other"
                    .into(),
            );
            return Ok(report);
        }
        (L1Saturated, C0Saturated)
        | (C0Saturated, L1Saturated)
        | (L1Saturated, LpSaturated { .. })
        | (LpSaturated { .. }, L1Saturated) => {
            report.verdict = ComparisonVerdict::TotallyIncomparable;
            report.rule = "distinct-saturation".into();
            report.rationale.push(
                "the spaces are saturated by different classical sequence spaces; a \
                 common subspace would contain both, which is impossible"
                    .into(),
            );
            return Ok(report);
        }
        _ => {}
    }

    if contains_l1(&ca.saturation) && contains_l1(&cb.saturation) {
        report.verdict = ComparisonVerdict::NotTotallyIncomparable;
        report.rule = "shared-l1-subspace".into();
        report
            .rationale
            .push("both spaces contain an isomorphic copy of l1".into());
        return Ok(report);
    }
    if contains_c0(&ca.saturation) && contains_c0(&cb.saturation) {
        report.verdict = ComparisonVerdict::NotTotallyIncomparable;
        report.rule = "shared-c0-subspace".into();
        report
            .rationale
            .push("both spaces contain an isomorphic copy of c0".into());
        return Ok(report);
    }

    if let (
        SpaceSpec::AdmissibleSeq { coeffs: CoefficientSeq::InvLogPow { r } },
        SpaceSpec::AdmissibleSeq { coeffs: CoefficientSeq::InvLogPow { r: s } },
    ) = (&a, &b)
    {
        if r != s {
            let br = below_log_threshold(r)?;
            let bs = below_log_threshold(s)?;
            if br == Some(true) && bs == Some(true) {
                report.verdict = ComparisonVerdict::TotallyIncomparable;
                report.rule = "log-power-separation".into();
                report.rationale.push(format!(
                    "both weight sequences have the form 1/log2(1+k)^r with distinct \
                     exponents ({} and {}), each certified below the threshold \
                     3 ln 2 - 1 ~ {}; their block growth rates are incompatible on every \
                     common subspace",
                    format_rational(r),
                    format_rational(s),
                    decimal_string(&ln2_enclosure(64)?.lo, 6)
                ));
                return Ok(report);
            }
            report.rationale.push(
                "[log-power-threshold-undecided] a log-power exponent could not be \
                 placed against the threshold 3 ln 2 - 1"
                    .into(),
            );
        }
    }

    if let (SpaceSpec::AdmissibleSeq { coeffs: cfa }, SpaceSpec::AdmissibleSeq { coeffs: cfb }) =
        (&a, &b)
    {
        if cfa.block_subexponential() && cfb.block_subexponential() {
            report.rule = "asymptotic-probe".into();
            report.rationale.push(
                "both weight sequences are block-subexponential; the exact rules cannot \
                 separate them, fundamental-function growth is attached as evidence"
                    .into(),
            );
            report.probe = Some(lambda_ratio_probe(&a, &b, 32, precision, budget)?);
            return Ok(report);
        }
    }

    report.rule = "no-decision-rule".into();
    report.rationale.push(
        "no exact rule applies to this pair; fundamental-function growth is attached \
         as evidence"
            .into(),
    );
    report.probe = Some(lambda_ratio_probe(&a, &b, 32, precision, budget)?);
    Ok(report)
}
