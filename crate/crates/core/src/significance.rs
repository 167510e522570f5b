//! Significance thresholds and the suitable-rule screen.
//!
//! A rule is kept only if its coverage stays under `1/ln(m_n)` and its
//! conditional mean deviates from the global mean by at least a threshold
//! `z`. Two thresholds (Hoeffding, Bernstein) are usable while mining; the
//! variance-based threshold depends on the final partition and is only
//! offered as a post-selection audit.

use alloc::format;

use crate::bits::BitVec;
use crate::dataset::{Dataset, TargetStats};
use crate::error::{Error, Result};
use crate::math;
use crate::rule::{activation_vector, conditional_mean, Rule, RuleStats};

/// Family of significance threshold functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZKind {
    Hoeffding,
    Bernstein,
    /// Partition-dependent; valid only after selection.
    Variance,
}

/// A threshold family plus its false-rejection rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceSpec {
    kind: ZKind,
    alpha: f64,
}

impl SignificanceSpec {
    pub fn new(kind: ZKind, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        Ok(SignificanceSpec { kind, alpha })
    }

    pub fn bernstein(alpha: f64) -> Result<Self> {
        Self::new(ZKind::Bernstein, alpha)
    }

    pub fn hoeffding(alpha: f64) -> Result<Self> {
        Self::new(ZKind::Hoeffding, alpha)
    }

    pub fn kind(&self) -> ZKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Threshold for a rule with `n_activated` activations, using cached
    /// target aggregates. Errors for the variance family, which cannot be
    /// evaluated while mining.
    pub fn threshold(&self, n_activated: usize, target: &TargetStats) -> Result<f64> {
        z_from_aggregates(
            self.kind,
            self.alpha,
            n_activated,
            target.min,
            target.max,
            target.sq_sum,
        )
    }
}

impl Default for SignificanceSpec {
    fn default() -> Self {
        SignificanceSpec {
            kind: ZKind::Bernstein,
            alpha: 0.05,
        }
    }
}

/// Threshold from target aggregates; the sample-wide extrema and the sum of
/// squares are the only target quantities the two mining-time families use.
pub fn z_from_aggregates(
    kind: ZKind,
    alpha: f64,
    n_activated: usize,
    y_min: f64,
    y_max: f64,
    y_sq_sum: f64,
) -> Result<f64> {
    if n_activated == 0 {
        return Ok(f64::INFINITY);
    }
    let log_term = math::ln(2.0 / alpha);
    match kind {
        ZKind::Hoeffding => {
            Ok((y_max - y_min) * math::sqrt(log_term) / math::sqrt(2.0 * n_activated as f64))
        }
        ZKind::Bernstein => {
            let root = math::sqrt(y_max * y_max * log_term * log_term + 72.0 * y_sq_sum * log_term);
            Ok((y_max * log_term + root) / (6.0 * n_activated as f64))
        }
        ZKind::Variance => Err(Error::InvalidParam(
            "variance threshold requires a fitted rule set; use variance_z".into(),
        )),
    }
}

/// Hoeffding threshold: `(max(y) - min(y)) * sqrt(ln(2/alpha)) / sqrt(2 n_r)`.
///
/// Returns infinity for zero activations (such a rule can never pass).
pub fn hoeffding_z(n_activated: usize, y: &[f64], alpha: f64) -> f64 {
    let (min, max) = match min_max(y) {
        Some(mm) => mm,
        None => return f64::INFINITY,
    };
    z_from_aggregates(ZKind::Hoeffding, alpha, n_activated, min, max, 0.0)
        .unwrap_or(f64::INFINITY)
}

/// Bernstein threshold with `M = max(y)` and `v = Σ y_i²` over the whole
/// sample: `(M ln(2/a) + sqrt(M² ln(2/a)² + 72 v ln(2/a))) / (6 n_r)`.
pub fn bernstein_z(n_activated: usize, y: &[f64], alpha: f64) -> f64 {
    let max = match min_max(y) {
        Some((_, max)) => max,
        None => return f64::INFINITY,
    };
    let sq_sum = y.iter().map(|v| v * v).sum();
    z_from_aggregates(ZKind::Bernstein, alpha, n_activated, 0.0, max, sq_sum)
        .unwrap_or(f64::INFINITY)
}

fn min_max(y: &[f64]) -> Option<(f64, f64)> {
    if y.is_empty() {
        return None;
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in y {
        min = min.min(v);
        max = max.max(v);
    }
    Some((min, max))
}

/// Variance-based threshold for a selected rule, given the fitted set's
/// observed cell signatures:
/// `z = sqrt(beta * Var(Y) - Var_r(Y))`, variances with the `1/(n-1)`
/// convention, where `beta = (n / Σ_r' n(r')) * max_A #{r' : r' ∩ A ≠ ∅}`
/// over cells `A` contained in the rule. A cell is contained in the rule iff
/// its signature has the rule's bit set, and it meets exactly the rules its
/// signature activates. A negative radicand clamps to zero.
pub fn variance_z(
    rule_bits: &BitVec,
    rule_index: usize,
    cell_signatures: &[BitVec],
    activation_counts: &[usize],
    y: &[f64],
) -> Result<f64> {
    let n = y.len();
    if rule_bits.len() != n {
        return Err(Error::LengthMismatch {
            left: rule_bits.len(),
            right: n,
        });
    }
    let n_rule = rule_bits.count_ones();
    if n < 2 || n_rule < 2 {
        return Err(Error::UndefinedVariance { n_activated: n_rule });
    }
    let activation_sum: usize = activation_counts.iter().sum();
    if activation_sum == 0 {
        return Err(Error::EmptyInput("activation counts"));
    }
    if cell_signatures.iter().any(|s| rule_index >= s.len()) {
        return Err(Error::FeatureOutOfRange {
            feature: rule_index,
            d: cell_signatures.first().map_or(0, BitVec::len),
        });
    }

    let mean = y.iter().sum::<f64>() / n as f64;
    let total_var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;

    let mean_rule = rule_bits.ones().map(|j| y[j]).sum::<f64>() / n_rule as f64;
    let within_var = rule_bits
        .ones()
        .map(|j| (y[j] - mean_rule) * (y[j] - mean_rule))
        .sum::<f64>()
        / (n_rule - 1) as f64;

    let max_overlap = cell_signatures
        .iter()
        .filter(|s| s.get(rule_index))
        .map(BitVec::count_ones)
        .max()
        .unwrap_or(0);
    let beta = n as f64 / activation_sum as f64 * max_overlap as f64;

    let radicand = beta * total_var - within_var;
    Ok(if radicand > 0.0 { math::sqrt(radicand) } else { 0.0 })
}

/// Maximal coverage ratio a suitable rule may have: `1 / ln(m_n)`.
pub fn coverage_bound(m_n: u16) -> f64 {
    1.0 / math::ln(f64::from(m_n))
}

/// Screens a rule against the coverage and significance conditions.
/// A rule with zero activations is never suitable.
pub fn is_suitable(rule: &Rule, dataset: &Dataset, m_n: u16, spec: &SignificanceSpec) -> Result<bool> {
    let bits = activation_vector(rule, dataset)?;
    let n_activated = bits.count_ones();
    if n_activated == 0 {
        return Ok(false);
    }
    let coverage = n_activated as f64 / dataset.n() as f64;
    if coverage > coverage_bound(m_n) {
        return Ok(false);
    }
    let target = dataset.target_stats();
    let z = spec.threshold(n_activated, target)?;
    let mu = conditional_mean(&bits, dataset.y())?;
    Ok(math::abs(mu - target.mean) >= z)
}

/// Same screen from cached statistics (the stored `z_value` is reused).
pub fn is_suitable_stats(stats: &RuleStats, global_mean: f64, m_n: u16) -> bool {
    stats.n_activated > 0
        && stats.coverage <= coverage_bound(m_n)
        && math::abs(stats.mu - global_mean) >= stats.z_value
}
