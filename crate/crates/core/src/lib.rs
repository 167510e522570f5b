//! Interpretable rule-based regression.
//!
//! The estimator mines a sparse set of hyperrectangle rules over a
//! quantile-discretized feature space, keeps the rules that pass a coverage
//! bound and a concentration-inequality significance test, selects a subset
//! by greedy empirical-risk minimization, and predicts through the partition
//! the selected rules induce. The partition is never materialized: each
//! observation is assigned the cell identified by its rule-activation
//! signature.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("ripe-core requires either the `std` or the `libm` feature");

pub mod bits;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod generate;
mod math;
pub mod predict;
pub mod rule;
pub mod select;
pub mod significance;

pub use bits::BitVec;
pub use dataset::{Dataset, RawMatrix, TargetStats};
pub use discretize::{Discretizer, FeatureBins, RawBounds};
pub use error::{Error, Result};
pub use generate::{calc_cp1, calc_cpc, cp1_candidate_count, intersect, mine, rule_order, MiningParams};
pub use predict::{
    ActivatedRule, ConditionView, EmptyCellPolicy, Explanation, ModelSummary, RuleModel,
    SummaryRow, TrainingMeta, VarianceAudit,
};
pub use rule::{
    activation_vector, complexity, conditional_mean, empirical_risk, single_rule_risk, Interval,
    MinedRule, Rule, RuleStats,
};
pub use select::{select, select_with_trace, set_risk, signatures, CellSignature, CellStat, CellTable, SelectionTrace};
pub use significance::{
    bernstein_z, coverage_bound, hoeffding_z, is_suitable, variance_z, SignificanceSpec, ZKind,
};
