//! Shared space constructors for the benchmark suite.

use tsirelson::scalar::ratio;
use tsirelson::{CoefficientSeq, Family, SpaceSpec};

/// The classical space with the Schreier family at weight 1/2.
pub fn tsirelson_space() -> SpaceSpec {
    SpaceSpec::finite_mixed(vec![(Family::Schreier, ratio(1, 2))])
}

/// A two-entry bounded-cardinality mix exercising the multi-family paths.
pub fn mixed_cardinality_space() -> SpaceSpec {
    SpaceSpec::finite_mixed(vec![
        (Family::AtMostK { k: 2 }, ratio(1, 2)),
        (Family::AtMostK { k: 3 }, ratio(2, 3)),
    ])
}

/// The logarithmic-weight sequence space (irrational weights, enclosures).
pub fn log_weight_space() -> SpaceSpec {
    SpaceSpec::admissible_seq(CoefficientSeq::InvLogPow { r: ratio(1, 1) })
}
