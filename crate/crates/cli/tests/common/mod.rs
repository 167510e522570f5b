//! Shared helpers for the integration and acceptance suites: random
//! instances, the geometric partition oracle, and small numeric utilities.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ripe_core::{
    activation_vector, CellTable, Dataset, Discretizer, EmptyCellPolicy, Interval, MinedRule,
    MiningParams, RawMatrix, Rule, RuleModel, RuleStats, SignificanceSpec, TrainingMeta,
};

/// A dataset with random continuous features and a target mixing steps on
/// the first features with noise.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, m_n: u16) -> (Dataset, Discretizer) {
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        data.push(rng.random_range(-2.0..2.0));
    }
    let raw = RawMatrix::new(data, n, d).unwrap();
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row = raw.row(i);
        let mut v = if row[0] > 0.5 { 2.0 } else { -1.0 };
        if d > 1 && row[1] < -0.5 {
            v += 1.5;
        }
        v += rng.random_range(-0.5..0.5);
        y.push(v);
    }
    let discretizer = Discretizer::fit(&raw, m_n).unwrap();
    let names = (0..d).map(|k| format!("X{k}")).collect();
    let ds = Dataset::new(raw, y, names, &discretizer).unwrap();
    (ds, discretizer)
}

/// A random rule over the dataset's features that never spans a feature's
/// full class range.
pub fn random_rule(rng: &mut ChaCha8Rng, ds: &Dataset) -> Option<Rule> {
    let candidates: Vec<usize> = (0..ds.d()).filter(|&k| ds.classes(k) >= 2).collect();
    if candidates.is_empty() {
        return None;
    }
    let n_conditions = rng.random_range(1..=candidates.len().min(3));
    let mut conditions = BTreeMap::new();
    let mut pool = candidates;
    for _ in 0..n_conditions {
        let pick = rng.random_range(0..pool.len());
        let feature = pool.swap_remove(pick);
        let q = ds.classes(feature);
        loop {
            let a = rng.random_range(0..q);
            let b = rng.random_range(0..q);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if !(lo == 0 && hi + 1 == q) {
                conditions.insert(feature, Interval::new(lo, hi));
                break;
            }
        }
    }
    Some(Rule::new(conditions))
}

/// Random rules with cached statistics (no suitability screening).
pub fn random_mined_rules(rng: &mut ChaCha8Rng, ds: &Dataset, max_rules: usize) -> Vec<MinedRule> {
    let count = rng.random_range(1..=max_rules);
    let mut out = Vec::new();
    for _ in 0..count {
        if let Some(rule) = random_rule(rng, ds) {
            if out.iter().any(|m: &MinedRule| m.rule == rule) {
                continue;
            }
            let bits = activation_vector(&rule, ds).unwrap();
            let stats = RuleStats::from_bits(bits, ds.y(), 0.0).unwrap();
            out.push(MinedRule { rule, stats });
        }
    }
    out
}

/// Assembles a model around externally chosen rules.
pub fn model_from_rules(
    ds: &Dataset,
    discretizer: Discretizer,
    rules: Vec<MinedRule>,
) -> RuleModel {
    let target = ds.target_stats();
    let cell_table = CellTable::build(&rules, ds.y());
    let meta = TrainingMeta {
        n: ds.n(),
        d: ds.d(),
        feature_names: ds.feature_names().to_vec(),
        global_risk: target.pop_variance,
        y_min: target.min,
        y_max: target.max,
        y_sq_sum: target.sq_sum,
    };
    let params = MiningParams {
        m_n: discretizer.m_n(),
        significance: SignificanceSpec::default(),
        beam_width: 300,
        max_complexity: None,
    };
    RuleModel::from_parts(
        discretizer,
        rules,
        cell_table,
        target.mean,
        params,
        meta,
        EmptyCellPolicy::Zero,
    )
    .expect("constructed parts are consistent")
}

/// Geometric partition oracle. The cell containing a query is materialized
/// by explicit set algebra: the intersection hyperrectangle of the rules the
/// query activates, minus the union of the remaining rules' hyperrectangles.
/// Returns the mean target over the training rows of that cell (0 when the
/// cell holds no row).
pub struct PartitionOracle<'a> {
    rules: &'a [MinedRule],
    ds: &'a Dataset,
}

impl<'a> PartitionOracle<'a> {
    pub fn new(rules: &'a [MinedRule], ds: &'a Dataset) -> Self {
        PartitionOracle { rules, ds }
    }

    fn in_rule(rule: &Rule, row: &[u16]) -> bool {
        rule.conditions()
            .iter()
            .all(|(k, iv)| iv.contains(row[*k]))
    }

    /// Members of the query's cell, as training row indices.
    pub fn cell_members(&self, query: &[u16]) -> Vec<usize> {
        let d = self.ds.d();
        let activated: Vec<&MinedRule> = self
            .rules
            .iter()
            .filter(|m| Self::in_rule(&m.rule, query))
            .collect();
        let passive: Vec<&MinedRule> = self
            .rules
            .iter()
            .filter(|m| !Self::in_rule(&m.rule, query))
            .collect();

        // Intersection hyperrectangle of the activated rules; unconstrained
        // features span everything.
        let mut lows = vec![0u16; d];
        let mut highs = vec![u16::MAX; d];
        for m in &activated {
            for (k, iv) in m.rule.conditions() {
                lows[*k] = lows[*k].max(iv.low());
                highs[*k] = highs[*k].min(iv.high());
            }
        }

        (0..self.ds.n())
            .filter(|&j| {
                let row = self.ds.disc_row(j);
                let inside_box = (0..d).all(|k| lows[k] <= row[k] && row[k] <= highs[k]);
                inside_box && passive.iter().all(|m| !Self::in_rule(&m.rule, row))
            })
            .collect()
    }

    pub fn predict(&self, query: &[u16]) -> f64 {
        let members = self.cell_members(query);
        if members.is_empty() {
            return 0.0;
        }
        members.iter().map(|&j| self.ds.y()[j]).sum::<f64>() / members.len() as f64
    }

    /// Empirical risk of the oracle predictor over the training rows.
    pub fn set_risk(&self) -> f64 {
        let n = self.ds.n();
        let mut sum_sq = 0.0;
        for j in 0..n {
            let diff = self.predict(self.ds.disc_row(j)) - self.ds.y()[j];
            sum_sq += diff * diff;
        }
        sum_sq / n as f64
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Coefficient of determination of the least-squares line through (x, y).
pub fn linear_fit_r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let cov: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - mean_x) * (b - mean_y))
        .sum();
    let var_x: f64 = x.iter().map(|a| (a - mean_x) * (a - mean_x)).sum();
    let slope = cov / var_x;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let diff = b - (intercept + slope * a);
            diff * diff
        })
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - mean_y) * (b - mean_y)).sum();
    1.0 - ss_res / ss_tot
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
