//! Certified rational enclosures of irrational quantities.
//!
//! A [`RatInterval`] is a pair of rationals `lo <= hi` guaranteed to bracket
//! the real number it describes. The constructors here produce enclosures of
//! binary logarithms, natural-log-of-two, and q-th roots using only integer
//! arithmetic with directed rounding. Requested precisions are capped at
//! [`MAX_PRECISION`] bits; within the cap, enclosures of the same quantity at
//! increasing precision are nested (each is contained in the coarser one),
//! because every refinement extends the same deterministic digit stream
//! instead of recomputing from scratch.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ratio, round_down_dyadic, round_up_dyadic, Rational};

/// Highest certifiable precision, in fractional bits.
pub const MAX_PRECISION: u32 = 96;

/// Fixed internal working precision of the log digit extraction. Keeping it
/// constant (rather than scaling with the request) is what makes enclosures
/// at different requested precisions nested.
const LOG_WORK_BITS: u32 = 128;

/// A closed rational interval `[lo, hi]` certified to contain some real.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    /// Build an interval, checking orientation.
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Invalid(format!("interval endpoints out of order: {lo} > {hi}")));
        }
        Ok(RatInterval { lo, hi })
    }

    /// The degenerate interval `[r, r]`.
    pub fn point(r: Rational) -> Self {
        RatInterval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo <= *r && *r <= self.hi
    }

    /// True when `self` is contained in `outer`.
    pub fn subset_of(&self, outer: &RatInterval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    /// True when the two intervals share at least one point.
    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    /// Product of two intervals (general signs).
    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    /// Reciprocal of an interval that lies strictly right of zero.
    pub fn recip_positive(&self) -> Result<RatInterval> {
        if !self.lo.is_positive() {
            return Err(Error::Invalid(format!(
                "reciprocal requires a strictly positive interval, got lo = {}",
                self.lo
            )));
        }
        Ok(RatInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    /// Integer power of an interval of nonnegative numbers.
    pub fn pow_u32_nonneg(&self, p: u32) -> Result<RatInterval> {
        if self.lo.is_negative() {
            return Err(Error::Invalid("power of a partly negative interval".into()));
        }
        Ok(RatInterval { lo: pow_rational(&self.lo, p), hi: pow_rational(&self.hi, p) })
    }

    /// Enclosure of the q-th root of an interval of nonnegative numbers.
    pub fn nth_root_nonneg(&self, q: u32, precision: u32) -> Result<RatInterval> {
        if self.lo.is_negative() {
            return Err(Error::Invalid("root of a partly negative interval".into()));
        }
        let lo = nth_root_enclosure(&self.lo, q, precision)?;
        let hi = nth_root_enclosure(&self.hi, q, precision)?;
        Ok(RatInterval { lo: lo.lo, hi: hi.hi })
    }

    /// Coarsen both endpoints outward onto the dyadic grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> RatInterval {
        RatInterval {
            lo: round_down_dyadic(&self.lo, bits),
            hi: round_up_dyadic(&self.hi, bits),
        }
    }
}

/// Exact nonnegative integer power of a rational.
pub fn pow_rational(x: &Rational, p: u32) -> Rational {
    let mut acc = Rational::one();
    let mut base = x.clone();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

fn check_precision(precision: u32) -> Result<()> {
    if precision > MAX_PRECISION {
        return Err(Error::PrecisionUnsupported(precision, MAX_PRECISION));
    }
    Ok(())
}

/// If `n` is a power of two, return the exponent.
fn exact_power_of_two(n: &BigUint) -> Option<u64> {
    if n.is_zero() || (n - 1u32) & n != BigUint::zero() {
        return None;
    }
    Some((n.bits() - 1) as u64)
}

/// One directed run of the binary-digit extraction of `log2(m) - floor(log2 m)`.
/// Returns the accumulated `bits`-bit fraction as an integer numerator; the
/// fraction is `acc / 2^bits`. With `RoundDir::Down` the result underestimates
/// the true fractional part, with `RoundDir::Up` (after adding the final
/// `2^-bits`) it overestimates.
#[derive(Clone, Copy, PartialEq)]
enum RoundDir {
    Down,
    Up,
}

fn log2_digit_run(m: &BigUint, bits: u32, dir: RoundDir) -> BigUint {
    let exponent = m.bits() - 1; // floor(log2 m)
    let one_fp: BigUint = BigUint::one() << LOG_WORK_BITS;
    let two_fp: BigUint = &one_fp << 1u32;
    // x0 = m / 2^exponent in fixed point: m * 2^(P - e), rounded in `dir`.
    let mut x: BigUint = {
        let raw = m << LOG_WORK_BITS as u64; // m * 2^P
        match dir {
            RoundDir::Down => &raw >> exponent,
            RoundDir::Up => (&raw + ((BigUint::one() << exponent) - 1u32)) >> exponent,
        }
    };
    let mut acc = BigUint::zero();
    for _ in 0..bits {
        let sq = &x * &x;
        x = match dir {
            RoundDir::Down => &sq >> LOG_WORK_BITS,
            RoundDir::Up => (&sq + (&one_fp - 1u32)) >> LOG_WORK_BITS,
        };
        acc <<= 1;
        if x >= two_fp {
            acc += 1u32;
            x = match dir {
                RoundDir::Down => &x >> 1,
                RoundDir::Up => (&x + 1u32) >> 1,
            };
        }
    }
    acc
}

/// Certified enclosure of `log2(n)` for a positive integer `n`, of width at
/// most `2^-precision`. Powers of two yield exact (degenerate) intervals.
pub fn log2_enclosure_uint(n: &BigUint, precision: u32) -> Result<RatInterval> {
    check_precision(precision)?;
    if n.is_zero() {
        return Err(Error::Invalid("log2 of zero".into()));
    }
    if let Some(e) = exact_power_of_two(n) {
        return Ok(RatInterval::point(Rational::from(BigInt::from(e))));
    }
    let bits = precision + 2;
    let exponent = Rational::from(BigInt::from((n.bits() - 1) as u64));
    let denom = BigInt::from(BigUint::one() << bits);
    let lo_acc = log2_digit_run(n, bits, RoundDir::Down);
    let hi_acc = log2_digit_run(n, bits, RoundDir::Up) + 1u32;
    let lo = &exponent + Rational::new(BigInt::from(lo_acc), denom.clone());
    let hi = &exponent + Rational::new(BigInt::from(hi_acc), denom);
    RatInterval::new(lo, hi)
}

/// Certified enclosure of `log2(r)` for a positive rational `r`. Exact when
/// `r` is (up to sign of the exponent) a power of two.
pub fn log2_enclosure(r: &Rational, precision: u32) -> Result<RatInterval> {
    check_precision(precision)?;
    if !r.is_positive() {
        return Err(Error::Invalid(format!("log2 of non-positive value {r}")));
    }
    let p = r.numer().to_biguint().expect("positive rational has positive numerator");
    let q = r.denom().to_biguint().expect("reduced rational has positive denominator");
    if let (Some(ep), Some(eq)) = (exact_power_of_two(&p), exact_power_of_two(&q)) {
        return Ok(RatInterval::point(Rational::from(BigInt::from(ep as i64 - eq as i64))));
    }
    let a = log2_enclosure_uint(&p, precision + 1)?;
    let b = log2_enclosure_uint(&q, precision + 1)?;
    Ok(a.sub(&b))
}

/// Certified enclosure of `ln 2` of width at most `2^-precision`, from the
/// series `ln 2 = 2 * atanh(1/3) = 2 * sum_k (1/3)^(2k+1) / (2k+1)` with an
/// explicit geometric tail bound.
pub fn ln2_enclosure(precision: u32) -> Result<RatInterval> {
    check_precision(precision)?;
    // Tail after K terms is at most (9/4) * 3^-(2K+1) / (2K+1); pick K so the
    // bound drops below 2^-(precision+2).
    let target = pow_rational(&ratio(1, 2), precision + 2);
    let mut terms = 1u32;
    loop {
        let bound = ratio(9, 4) * pow_rational(&ratio(1, 3), 2 * terms + 1)
            / Rational::from(BigInt::from(2 * terms + 1));
        if bound <= target {
            break;
        }
        terms += 1;
    }
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += ratio(2, 1) * pow_rational(&ratio(1, 3), 2 * k + 1)
            / Rational::from(BigInt::from(2 * k + 1));
    }
    let tail = ratio(9, 4) * pow_rational(&ratio(1, 3), 2 * terms + 1)
        / Rational::from(BigInt::from(2 * terms + 1));
    let raw = RatInterval::new(sum.clone(), sum + tail)?;
    Ok(raw.round_outward(precision + 4))
}

/// Certified enclosure of `r^(1/q)` for nonnegative rational `r`, of width at
/// most `2^-precision`. Detects exact roots and returns a point interval.
pub fn nth_root_enclosure(r: &Rational, q: u32, precision: u32) -> Result<RatInterval> {
    check_precision(precision)?;
    if q == 0 {
        return Err(Error::Invalid("zeroth root".into()));
    }
    if r.is_negative() {
        return Err(Error::Invalid(format!("root of negative value {r}")));
    }
    if r.is_zero() {
        return Ok(RatInterval::point(Rational::zero()));
    }
    if let Some(exact) = exact_nth_root(r, q) {
        return Ok(RatInterval::point(exact));
    }
    let p = r.numer().to_biguint().unwrap();
    let d = r.denom().to_biguint().unwrap();
    let scale: BigUint = BigUint::one() << (precision + 2);
    // floor( r * scale^q ), then its integer q-th root.
    let scaled = (p * pow_uint(&scale, q)) / d;
    let z = scaled.nth_root(q);
    let t = Rational::from(BigInt::from(scale));
    let lo = Rational::from(BigInt::from(z.clone())) / &t;
    let hi = Rational::from(BigInt::from(z + 1u32)) / &t;
    RatInterval::new(lo, hi)
}

/// Exact `r^(1/q)` when both numerator and denominator are perfect q-th powers.
pub fn exact_nth_root(r: &Rational, q: u32) -> Option<Rational> {
    if r.is_negative() || q == 0 {
        return None;
    }
    let p = r.numer().to_biguint()?;
    let d = r.denom().to_biguint()?;
    let rp = p.nth_root(q);
    let rd = d.nth_root(q);
    if pow_uint(&rp, q) == p && pow_uint(&rd, q) == d {
        Some(Rational::new(BigInt::from(rp), BigInt::from(rd)))
    } else {
        None
    }
}

fn pow_uint(b: &BigUint, e: u32) -> BigUint {
    b.pow(e)
}
