//! Hyperrectangle rules over the discretized feature space and their
//! empirical statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

use crate::bits::BitVec;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Closed range of class indices `[low, high]` on one feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    low: u16,
    high: u16,
}

impl Interval {
    pub fn new(low: u16, high: u16) -> Self {
        assert!(low <= high, "interval low {low} exceeds high {high}");
        Interval { low, high }
    }

    pub fn low(self) -> u16 {
        self.low
    }

    pub fn high(self) -> u16 {
        self.high
    }

    #[inline]
    pub fn contains(self, class: u16) -> bool {
        self.low <= class && class <= self.high
    }
}

/// An If-Then rule: a sparse conjunction of per-feature class intervals.
///
/// Unconstrained features are absent from the map, so the number of entries
/// is the rule's complexity. The label is presentation-only and excluded
/// from equality and ordering.
#[derive(Debug, Clone)]
pub struct Rule {
    conditions: BTreeMap<usize, Interval>,
    label: String,
}

impl Rule {
    pub fn new(conditions: BTreeMap<usize, Interval>) -> Self {
        Rule {
            conditions,
            label: String::new(),
        }
    }

    pub fn single(feature: usize, interval: Interval) -> Self {
        let mut conditions = BTreeMap::new();
        conditions.insert(feature, interval);
        Rule::new(conditions)
    }

    pub fn conditions(&self) -> &BTreeMap<usize, Interval> {
        &self.conditions
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: String) {
        self.label = label;
    }

    /// Number of constrained features.
    pub fn complexity(&self) -> usize {
        self.conditions.len()
    }

    /// Whether a discretized row satisfies every condition.
    #[inline]
    pub fn activates(&self, disc_row: &[u16]) -> bool {
        self.conditions
            .iter()
            .all(|(k, interval)| interval.contains(disc_row[*k]))
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.conditions.keys().next_back().copied()
    }

    /// True when the two rules constrain disjoint feature sets.
    pub fn features_disjoint(&self, other: &Rule) -> bool {
        self.conditions
            .keys()
            .all(|k| !other.conditions.contains_key(k))
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.conditions == other.conditions
    }
}

impl Eq for Rule {}

impl Hash for Rule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.conditions.hash(state);
    }
}

impl Ord for Rule {
    /// Lexicographic order over the sorted `(feature, low, high)` encoding.
    fn cmp(&self, other: &Self) -> Ordering {
        self.conditions.iter().cmp(other.conditions.iter())
    }
}

impl PartialOrd for Rule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Activation statistics of a rule on the training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleStats {
    /// Bit `j` set iff training row `j` satisfies the rule.
    pub activation_bits: BitVec,
    pub n_activated: usize,
    /// `n_activated / n`.
    pub coverage: f64,
    /// Conditional mean of the target over activated rows (0 when none).
    pub mu: f64,
    /// Significance threshold the rule was screened against.
    pub z_value: f64,
    /// Empirical risk of the two-cell predictor (rule cell vs. complement).
    pub single_rule_risk: f64,
}

impl RuleStats {
    pub fn from_bits(activation_bits: BitVec, y: &[f64], z_value: f64) -> Result<Self> {
        if activation_bits.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: activation_bits.len(),
                right: y.len(),
            });
        }
        let n_activated = activation_bits.count_ones();
        let coverage = n_activated as f64 / y.len() as f64;
        let mu = conditional_mean(&activation_bits, y)?;
        let single_rule_risk = two_cell_risk(&activation_bits, y);
        Ok(RuleStats {
            activation_bits,
            n_activated,
            coverage,
            mu,
            z_value,
            single_rule_risk,
        })
    }
}

/// A rule together with its cached training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedRule {
    pub rule: Rule,
    pub stats: RuleStats,
}

/// Bit `j` set iff row `j` of the discretized matrix satisfies the rule.
pub fn activation_vector(rule: &Rule, dataset: &Dataset) -> Result<BitVec> {
    if let Some(max) = rule.max_feature() {
        if max >= dataset.d() {
            return Err(Error::FeatureOutOfRange {
                feature: max,
                d: dataset.d(),
            });
        }
    }
    Ok(BitVec::from_bools(
        (0..dataset.n()).map(|j| rule.activates(dataset.disc_row(j))),
    ))
}

/// Mean of `y` over set bits, with the 0/0 = 0 convention.
pub fn conditional_mean(bits: &BitVec, y: &[f64]) -> Result<f64> {
    if bits.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: bits.len(),
            right: y.len(),
        });
    }
    let count = bits.count_ones();
    if count == 0 {
        return Ok(0.0);
    }
    Ok(bits.ones().map(|j| y[j]).sum::<f64>() / count as f64)
}

/// Number of constrained features.
pub fn complexity(rule: &Rule) -> usize {
    rule.complexity()
}

/// Mean squared error of `predictions` against `y`.
pub fn empirical_risk(predictions: &[f64], y: &[f64]) -> Result<f64> {
    if predictions.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("target vector"));
    }
    let sum: f64 = predictions
        .iter()
        .zip(y)
        .map(|(g, v)| {
            let diff = g - v;
            diff * diff
        })
        .sum();
    Ok(sum / y.len() as f64)
}

/// Empirical risk of the two-cell predictor induced by one rule: the rule's
/// conditional mean inside, the complement's conditional mean outside.
pub fn single_rule_risk(rule: &Rule, dataset: &Dataset) -> Result<f64> {
    let bits = activation_vector(rule, dataset)?;
    Ok(two_cell_risk(&bits, dataset.y()))
}

pub(crate) fn two_cell_risk(bits: &BitVec, y: &[f64]) -> f64 {
    debug_assert_eq!(bits.len(), y.len());
    let n = y.len();
    let n_in = bits.count_ones();
    let n_out = n - n_in;
    let mut sum_in = 0.0;
    let mut sum_out = 0.0;
    for (j, &v) in y.iter().enumerate() {
        if bits.get(j) {
            sum_in += v;
        } else {
            sum_out += v;
        }
    }
    let mu_in = if n_in == 0 { 0.0 } else { sum_in / n_in as f64 };
    let mu_out = if n_out == 0 { 0.0 } else { sum_out / n_out as f64 };
    let mut sum_sq = 0.0;
    for (j, &v) in y.iter().enumerate() {
        let diff = if bits.get(j) { mu_in - v } else { mu_out - v };
        sum_sq += diff * diff;
    }
    sum_sq / n as f64
}
