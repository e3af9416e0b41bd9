//! Exact computation in mixed Tsirelson spaces.
//!
//! A mixed Tsirelson space `T[(M_k, theta_k)]` is the completion of the
//! finitely supported sequences under the implicit norm
//!
//! ```text
//! ||x|| = max( ||x||_inf,
//!              sup_k theta_k * sup { sum_i ||E_i x|| : (E_i) M_k-admissible } )
//! ```
//!
//! where a sequence of successive finite sets `E_1 < ... < E_n` is
//! `M_k`-admissible when some `{m_1, ..., m_n}` in the family `M_k` satisfies
//! `m_1 <= E_1 < m_2 <= E_2 < ... < m_n <= E_n`.
//!
//! Everything here is exact: scalars are arbitrary-precision rationals, and
//! the few genuinely irrational coefficient sequences (logarithmic and
//! fractional-power laws) are handled through certified rational enclosures
//! with directed rounding, never floating point.
//!
//! The crate is organized around six concerns:
//!
//! 1. [`scalar`], [`interval`], [`vector`], [`coeffs`] — exact rationals,
//!    certified enclosures, finitely supported vectors, and the catalog of
//!    coefficient sequences `theta_k`.
//! 2. [`families`] — compact hereditary families of finite subsets of the
//!    positive integers: membership, admissibility witnesses, derivatives,
//!    and Cantor-Bendixson-style indices.
//! 3. [`norm`] — the memoized norm engine, fundamental-function tables
//!    `lambda_n = ||e_1 + ... + e_n||`, and iterated-norm traces.
//! 4. [`dual`] — explicit norming-set functionals: enumeration, evaluation,
//!    and level analysis; an independent oracle for the norm engine.
//! 5. [`classify`] — decision procedures locating a space among c0 / lp / l1
//!    prototypes, plus pairwise comparison with total-incomparability
//!    verdicts and evidence probes.
//! 6. reporting — serializable report types with stable rendering, consumed
//!    by the companion command-line crate.

#![forbid(unsafe_code)]

pub mod classify;
pub mod coeffs;
pub mod dual;
pub mod error;
pub mod families;
pub mod interval;
pub mod norm;
pub mod scalar;
pub mod space;
pub mod vector;

pub use classify::{
    compare, classify_finite, classify_admissible_seq, l1_block_witness, lambda_ratio_probe,
    BlockWitness, ClassificationReport, ComparisonReport, ComparisonVerdict, LambdaRatioProbe,
    LambdaRatioRow, LambdaRow, Saturation, WindowRatioRow,
};
pub use coeffs::CoefficientSeq;
pub use dual::{analysis, enumerate_k, evaluate, oracle_norm, AnalysisLevels, FunctionalTree};
pub use error::Error;
pub use families::{
    admissible, witness_in_boxes, AdmissibilityWitness, Family, FinSet, GapVerdict, IndexValue,
    NonsingletonProfile,
};
pub use interval::RatInterval;
pub use norm::{
    lambda_dyadic_bounds, lambda_table, lambda_table_via_norm, norm, norm_iterated,
    segment_sum_norm, Budget, IteratedNorms, LambdaTable, NormResult, NormWitness,
    SegmentNormCache, WitnessPart,
};
pub use scalar::{format_rational, parse_rational, Rational, Value};
pub use space::SpaceSpec;
pub use vector::FinVec;
