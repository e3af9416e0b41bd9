//! The catalog of coefficient sequences `(theta_k)` attached to a space.
//!
//! Four closed forms plus explicit lists are supported. Evaluation returns an
//! exact rational whenever the value is rational (this includes many
//! individual entries of the irrational forms, e.g. logarithms at one less
//! than a power of two) and a certified enclosure otherwise.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{
    exact_nth_root, log2_enclosure_uint, nth_root_enclosure, pow_rational, RatInterval,
    MAX_PRECISION,
};
use crate::scalar::{
    ratio, require_unit_coefficient, serde_rational, serde_rational_opt, Rational, Value,
};

/// A coefficient sequence `theta_k`, indexed from `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum CoefficientSeq {
    /// Finitely many explicit values, then an optional constant tail.
    ExplicitList {
        values: Vec<RationalField>,
        #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
        tail: Option<Rational>,
    },
    /// `theta_k = c`.
    Constant {
        #[serde(with = "serde_rational")]
        c: Rational,
    },
    /// `theta_k = 1/k`.
    InvLinear,
    /// `theta_k = gamma * k^(-alpha)`.
    PowerLaw {
        #[serde(with = "serde_rational")]
        gamma: Rational,
        #[serde(with = "serde_rational")]
        alpha: Rational,
    },
    /// `theta_k = 1 / (log2(1 + k))^r`.
    InvLogPow {
        #[serde(with = "serde_rational")]
        r: Rational,
    },
}

/// A rational list entry serialized as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalField(#[serde(with = "serde_rational")] pub Rational);

impl From<Rational> for RationalField {
    fn from(r: Rational) -> Self {
        RationalField(r)
    }
}

impl std::fmt::Display for CoefficientSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                write!(f, "[")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", crate::scalar::format_rational(&v.0))?;
                }
                if let Some(t) = tail {
                    if !values.is_empty() {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}, ...", crate::scalar::format_rational(t))?;
                }
                write!(f, "]")
            }
            CoefficientSeq::Constant { c } => {
                write!(f, "theta_k = {}", crate::scalar::format_rational(c))
            }
            CoefficientSeq::InvLinear => write!(f, "theta_k = 1/k"),
            CoefficientSeq::PowerLaw { gamma, alpha } => write!(
                f,
                "theta_k = {} * k^-({})",
                crate::scalar::format_rational(gamma),
                crate::scalar::format_rational(alpha)
            ),
            CoefficientSeq::InvLogPow { r } => {
                write!(f, "theta_k = 1/log2(1+k)^({})", crate::scalar::format_rational(r))
            }
        }
    }
}

impl CoefficientSeq {
    pub fn explicit(values: Vec<Rational>, tail: Option<Rational>) -> Self {
        CoefficientSeq::ExplicitList {
            values: values.into_iter().map(RationalField).collect(),
            tail,
        }
    }

    /// Validate parameter ranges: every value the sequence can take must lie
    /// in `(0, 1]`, powers must be nonnegative, and the log exponent positive.
    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                if values.is_empty() && tail.is_none() {
                    return Err(Error::Invalid("empty coefficient list with no tail".into()));
                }
                for (i, v) in values.iter().enumerate() {
                    require_unit_coefficient(&v.0, &format!("theta_{}", i + 1))?;
                }
                if let Some(t) = tail {
                    require_unit_coefficient(t, "tail")?;
                }
                Ok(())
            }
            CoefficientSeq::Constant { c } => require_unit_coefficient(c, "c"),
            CoefficientSeq::InvLinear => Ok(()),
            CoefficientSeq::PowerLaw { gamma, alpha } => {
                require_unit_coefficient(gamma, "gamma")?;
                if alpha < &Rational::zero() {
                    return Err(Error::Invalid(format!("alpha must be nonnegative, got {alpha}")));
                }
                Ok(())
            }
            CoefficientSeq::InvLogPow { r } => {
                if *r <= Rational::zero() {
                    return Err(Error::Invalid(format!("r must be positive, got {r}")));
                }
                Ok(())
            }
        }
    }

    /// `theta_k` for `k >= 1`, exact when rational, otherwise an enclosure of
    /// width at most `2^-precision`.
    pub fn theta_at(&self, k: u64, precision: u32) -> Result<Value> {
        if k == 0 {
            return Err(Error::Invalid("coefficient index k starts at 1".into()));
        }
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                if let Some(v) = values.get((k - 1) as usize) {
                    Ok(Value::Exact(v.0.clone()))
                } else {
                    match tail {
                        Some(t) => Ok(Value::Exact(t.clone())),
                        None => Err(Error::MissingTail(k as usize, values.len())),
                    }
                }
            }
            CoefficientSeq::Constant { c } => Ok(Value::Exact(c.clone())),
            CoefficientSeq::InvLinear => {
                Ok(Value::Exact(Rational::new(1.into(), (k as i64).into())))
            }
            CoefficientSeq::PowerLaw { gamma, alpha } => {
                power_base_reciprocal(&BigUint::from(k), alpha, precision)
                    .map(|v| scale_value(gamma, v))
            }
            CoefficientSeq::InvLogPow { r } => {
                let m = BigUint::from(k + 1);
                // The base log2(1+k) is exact precisely when 1+k is a power
                // of two, and an enclosure of width 2^-p otherwise.
                if m.count_ones() == 1 {
                    let e = Rational::from_integer((m.bits() as u32 - 1).into());
                    rational_power_reciprocal(&e, r, precision)
                } else {
                    let mut internal = (precision + 6).min(MAX_PRECISION);
                    loop {
                        let base = log2_enclosure_uint(&m, internal)?;
                        let powed = interval_rational_power(&base, r, internal)?;
                        let v = RatInterval::new(powed.hi.recip(), powed.lo.recip())?;
                        if v.width() <= pow_rational(&ratio(1, 2), precision)
                            || internal == MAX_PRECISION
                        {
                            return Ok(Value::Enclosure(v));
                        }
                        internal = (internal * 2).min(MAX_PRECISION);
                    }
                }
            }
        }
    }

    /// `sup { theta_j : j >= d }`, the weight actually available to a split
    /// into `d` parts under the full admissible-family scheme. Exact for the
    /// rational forms, an enclosure for the irrational ones (which are
    /// non-increasing, so the supremum is attained at `j = d`).
    pub fn suffix_sup(&self, d: u64, precision: u32) -> Result<Value> {
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                let from = (d.max(1) - 1) as usize;
                let mut best: Option<Rational> = tail.clone();
                for v in values.iter().skip(from) {
                    if best.as_ref().map_or(true, |b| v.0 > *b) {
                        best = Some(v.0.clone());
                    }
                }
                match best {
                    Some(b) => Ok(Value::Exact(b)),
                    None => Err(Error::MissingTail(d as usize, values.len())),
                }
            }
            // The remaining catalog forms are non-increasing in k.
            _ => self.theta_at(d, precision),
        }
    }

    /// The symbolic non-increasing envelope `theta'_k = sup_{j >= k} theta_j`.
    /// Explicit lists get a suffix-maximum rewrite; the other catalog forms
    /// are already non-increasing and are returned unchanged.
    pub fn envelope(&self) -> CoefficientSeq {
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                let mut out: Vec<Rational> = Vec::with_capacity(values.len());
                let mut running = tail.clone();
                for v in values.iter().rev() {
                    let m = match &running {
                        Some(r) if r > &v.0 => r.clone(),
                        _ => v.0.clone(),
                    };
                    running = Some(m.clone());
                    out.push(m);
                }
                out.reverse();
                CoefficientSeq::explicit(out, tail.clone())
            }
            other => other.clone(),
        }
    }

    /// True when `inf_k theta_k > 0`.
    pub fn infimum_positive(&self) -> bool {
        match self {
            CoefficientSeq::ExplicitList { tail, .. } => tail.is_some(),
            CoefficientSeq::Constant { .. } => true,
            CoefficientSeq::InvLinear => false,
            CoefficientSeq::PowerLaw { alpha, .. } => alpha.is_zero(),
            CoefficientSeq::InvLogPow { .. } => false,
        }
    }

    /// True when `sup_{k >= 2} theta_k = 1`, decided symbolically.
    pub fn theta2_sup_is_one(&self) -> bool {
        let one = Rational::one();
        match self {
            CoefficientSeq::ExplicitList { values, tail } => {
                values.iter().skip(1).any(|v| v.0 == one) || tail.as_ref() == Some(&one)
            }
            CoefficientSeq::Constant { c } => *c == one,
            CoefficientSeq::InvLinear => false,
            CoefficientSeq::PowerLaw { gamma, alpha } => *gamma == one && alpha.is_zero(),
            // 1/(log2(1+k))^r = 1 only at k = 1.
            CoefficientSeq::InvLogPow { .. } => false,
        }
    }

    /// True when `theta_k <= 1/k` for every `k`, decided symbolically. (For a
    /// positive-tail list or a positive constant the bound must fail at large
    /// `k`; for the log form `(log2(1+k))^r` is eventually smaller than `k`
    /// for every fixed `r`, so the bound fails as well.)
    pub fn dominated_by_inv_linear(&self) -> bool {
        match self {
            CoefficientSeq::ExplicitList { .. } => false,
            CoefficientSeq::Constant { .. } => false,
            CoefficientSeq::InvLinear => true,
            CoefficientSeq::PowerLaw { alpha, .. } => *alpha >= Rational::one(),
            CoefficientSeq::InvLogPow { .. } => false,
        }
    }

    /// Whether `lim_l (theta_{m^l})^(1/l) = 1` for every base `m >= 2`,
    /// decided symbolically per form. Geometric-type decay (`theta ~ m^-al`)
    /// gives a limit strictly below one; constant-type tails and logarithmic
    /// decay give exactly one.
    pub fn block_subexponential(&self) -> bool {
        match self {
            CoefficientSeq::ExplicitList { tail, .. } => tail.is_some(),
            CoefficientSeq::Constant { .. } => true,
            CoefficientSeq::InvLinear => false,
            CoefficientSeq::PowerLaw { alpha, .. } => alpha.is_zero(),
            CoefficientSeq::InvLogPow { .. } => true,
        }
    }
}

/// Scale a value by an exact rational factor in `(0, 1]`.
fn scale_value(gamma: &Rational, v: Value) -> Value {
    match v {
        Value::Exact(r) => Value::Exact(gamma * r),
        Value::Enclosure(i) => Value::Enclosure(RatInterval {
            lo: gamma * &i.lo,
            hi: gamma * &i.hi,
        }),
    }
}

/// `base^(-alpha)` for an integer `base >= 1` and rational `alpha >= 0`:
/// exact when `base^p` is a perfect q-th power (`alpha = p/q` reduced).
fn power_base_reciprocal(base: &BigUint, alpha: &Rational, precision: u32) -> Result<Value> {
    let x = Rational::from(num_bigint::BigInt::from(base.clone()));
    rational_power_reciprocal(&x, alpha, precision)
}

/// `x^(-e)` for rational `x >= 1` and rational `e = p/q >= 0`.
fn rational_power_reciprocal(x: &Rational, e: &Rational, precision: u32) -> Result<Value> {
    if e.is_zero() {
        return Ok(Value::Exact(Rational::one()));
    }
    let p = e
        .numer()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::Invalid(format!("exponent numerator out of range: {e}")))?;
    let q: u32 = e
        .denom()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::Invalid(format!("exponent denominator out of range: {e}")))?;
    let powed = pow_rational(x, p);
    if let Some(root) = exact_nth_root(&powed, q) {
        return Ok(Value::Exact(root.recip()));
    }
    let mut internal = (precision + 4).min(MAX_PRECISION);
    loop {
        let root = nth_root_enclosure(&powed, q, internal)?;
        let v = RatInterval::new(root.hi.recip(), root.lo.recip())?;
        if v.width() <= pow_rational(&ratio(1, 2), precision) || internal == MAX_PRECISION {
            return Ok(Value::Enclosure(v));
        }
        internal = (internal * 2).min(MAX_PRECISION);
    }
}

/// `[base]^e` for an interval `base >= 1` and rational `e = p/q > 0`.
fn interval_rational_power(base: &RatInterval, e: &Rational, precision: u32) -> Result<RatInterval> {
    let p: u32 = e
        .numer()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::Invalid(format!("exponent numerator out of range: {e}")))?;
    let q: u32 = e
        .denom()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::Invalid(format!("exponent denominator out of range: {e}")))?;
    let powed = base.pow_u32_nonneg(p)?;
    if q == 1 {
        return Ok(powed);
    }
    powed.nth_root_nonneg(q, precision)
}
