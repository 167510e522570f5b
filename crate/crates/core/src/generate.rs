//! Rule mining: exhaustive complexity-1 search, pairwise suitable
//! intersections for higher complexities, and the orchestrating main loop.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rule::{activation_vector, conditional_mean, Interval, MinedRule, Rule, RuleStats};
use crate::significance::{coverage_bound, is_suitable_stats, SignificanceSpec, ZKind};
use crate::math;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Mining hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    /// Discretization sharpness.
    pub m_n: u16,
    pub significance: SignificanceSpec,
    /// Beam width: how many lowest-risk rules of each complexity feed the
    /// pairwise intersection stage.
    pub beam_width: usize,
    /// Cap on rule complexity; `None` means the feature count.
    pub max_complexity: Option<usize>,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            m_n: 5,
            significance: SignificanceSpec::default(),
            beam_width: 300,
            max_complexity: None,
        }
    }
}

impl MiningParams {
    pub fn validate(&self) -> Result<()> {
        if self.m_n < 2 {
            return Err(Error::InvalidParam(format!(
                "m_n must be at least 2, got {}",
                self.m_n
            )));
        }
        if self.beam_width == 0 {
            return Err(Error::InvalidParam("beam width must be at least 1".into()));
        }
        if self.significance.kind() == ZKind::Variance {
            return Err(Error::InvalidParam(
                "the variance threshold is a post-selection audit, not a mining filter".into(),
            ));
        }
        Ok(())
    }
}

/// Total order used everywhere rules are sorted by quality: empirical risk
/// ascending, then coverage descending, complexity ascending, and the
/// condition encoding as the final tie-break so the order is reproducible.
pub fn rule_order(a: &MinedRule, b: &MinedRule) -> Ordering {
    a.stats
        .single_rule_risk
        .total_cmp(&b.stats.single_rule_risk)
        .then_with(|| b.stats.coverage.total_cmp(&a.stats.coverage))
        .then_with(|| a.rule.complexity().cmp(&b.rule.complexity()))
        .then_with(|| a.rule.cmp(&b.rule))
}

/// Evaluates one candidate: computes activations, the significance
/// threshold, and full statistics; returns the rule only if suitable.
fn evaluate_candidate(
    rule: Rule,
    dataset: &Dataset,
    params: &MiningParams,
) -> Result<Option<MinedRule>> {
    let bits = activation_vector(&rule, dataset)?;
    let n_activated = bits.count_ones();
    if n_activated == 0 {
        return Ok(None);
    }
    let coverage = n_activated as f64 / dataset.n() as f64;
    if coverage > coverage_bound(params.m_n) {
        return Ok(None);
    }
    let target = dataset.target_stats();
    let z = params.significance.threshold(n_activated, target)?;
    let mu = conditional_mean(&bits, dataset.y())?;
    if math::abs(mu - target.mean) < z {
        return Ok(None);
    }
    let stats = RuleStats::from_bits(bits, dataset.y(), z)?;
    Ok(Some(MinedRule { rule, stats }))
}

fn cp1_for_feature(
    feature: usize,
    dataset: &Dataset,
    params: &MiningParams,
) -> Result<Vec<MinedRule>> {
    let classes = dataset.classes(feature);
    let mut out = Vec::new();
    for low in 0..classes {
        for high in low..classes {
            // The full class range is the unconstrained feature, not a rule.
            if low == 0 && high + 1 == classes {
                continue;
            }
            let rule = Rule::single(feature, Interval::new(low, high));
            if let Some(mined) = evaluate_candidate(rule, dataset, params)? {
                out.push(mined);
            }
        }
    }
    Ok(out)
}

/// All suitable rules of complexity 1: every class interval of every
/// feature is screened. Output order is deterministic (feature index, then
/// interval bounds).
pub fn calc_cp1(dataset: &Dataset, params: &MiningParams) -> Result<Vec<MinedRule>> {
    let features: Vec<usize> = (0..dataset.d()).collect();

    #[cfg(feature = "parallel")]
    let per_feature: Vec<Vec<MinedRule>> = features
        .par_iter()
        .map(|&k| cp1_for_feature(k, dataset, params))
        .collect::<Result<_>>()?;

    #[cfg(not(feature = "parallel"))]
    let per_feature: Vec<Vec<MinedRule>> = features
        .iter()
        .map(|&k| cp1_for_feature(k, dataset, params))
        .collect::<Result<_>>()?;

    Ok(per_feature.into_iter().flatten().collect())
}

/// Size of the complexity-1 search space: one candidate per class interval
/// on each feature, including the full range that is screened out.
pub fn cp1_candidate_count(dataset: &Dataset) -> usize {
    (0..dataset.d())
        .map(|k| {
            let q = dataset.classes(k) as usize;
            q * (q + 1) / 2
        })
        .sum()
}

/// Suitable intersection of two mined rules.
///
/// Fails (returns `None`) when the rules share a constrained feature (the
/// complexity of the intersection must be the sum of the parents'), when no
/// training row activates both, or when the intersection activates exactly
/// the rows of either parent.
pub fn intersect(
    a: &MinedRule,
    b: &MinedRule,
    dataset: &Dataset,
    spec: &SignificanceSpec,
) -> Result<Option<MinedRule>> {
    if !a.rule.features_disjoint(&b.rule) {
        return Ok(None);
    }
    let bits = a.stats.activation_bits.and(&b.stats.activation_bits);
    let n_new = bits.count_ones();
    if n_new == 0 || n_new == a.stats.n_activated || n_new == b.stats.n_activated {
        return Ok(None);
    }
    let mut conditions = a.rule.conditions().clone();
    conditions.extend(b.rule.conditions().iter().map(|(k, iv)| (*k, *iv)));
    let rule = Rule::new(conditions);
    let z = spec.threshold(n_new, dataset.target_stats())?;
    let stats = RuleStats::from_bits(bits, dataset.y(), z)?;
    Ok(Some(MinedRule { rule, stats }))
}

/// Suitable rules of complexity `c`, generated by intersecting the
/// `beam_width` lowest-risk rules of complexity 1 with those of complexity
/// `c - 1`. Results are deduplicated by structural rule equality.
pub fn calc_cpc(
    dataset: &Dataset,
    rules: &[MinedRule],
    c: usize,
    params: &MiningParams,
) -> Result<Vec<MinedRule>> {
    let mut sorted: Vec<&MinedRule> = rules.iter().collect();
    sorted.sort_by(|a, b| rule_order(a, b));
    let beam_one: Vec<&MinedRule> = sorted
        .iter()
        .filter(|r| r.rule.complexity() == 1)
        .take(params.beam_width)
        .copied()
        .collect();
    let beam_prev: Vec<&MinedRule> = sorted
        .iter()
        .filter(|r| r.rule.complexity() == c - 1)
        .take(params.beam_width)
        .copied()
        .collect();
    if beam_one.is_empty() || beam_prev.is_empty() {
        return Ok(Vec::new());
    }

    let global_mean = dataset.target_stats().mean;
    let pair_row = |r1: &MinedRule| -> Result<Vec<MinedRule>> {
        let mut row = Vec::new();
        for r2 in &beam_prev {
            if let Some(cand) = intersect(r1, r2, dataset, &params.significance)? {
                if is_suitable_stats(&cand.stats, global_mean, params.m_n) {
                    row.push(cand);
                }
            }
        }
        Ok(row)
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<MinedRule>> = beam_one
        .par_iter()
        .map(|r1| pair_row(r1))
        .collect::<Result<_>>()?;

    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<MinedRule>> = beam_one
        .iter()
        .map(|r1| pair_row(r1))
        .collect::<Result<_>>()?;

    let mut seen: BTreeSet<Rule> = BTreeSet::new();
    let mut out = Vec::new();
    for cand in rows.into_iter().flatten() {
        if seen.insert(cand.rule.clone()) {
            out.push(cand);
        }
    }
    Ok(out)
}

/// Mines all suitable rules: complexity 1 exhaustively, then increasing
/// complexity by suitable intersections until a level yields nothing or the
/// complexity cap is reached. The result is sorted by `rule_order`.
pub fn mine(dataset: &Dataset, params: &MiningParams) -> Result<Vec<MinedRule>> {
    params.validate()?;
    let max_complexity = params
        .max_complexity
        .map_or(dataset.d(), |m| m.min(dataset.d()));
    let mut all = calc_cp1(dataset, params)?;
    for c in 2..=max_complexity {
        let fresh = calc_cpc(dataset, &all, c, params)?;
        if fresh.is_empty() {
            break;
        }
        all.extend(fresh);
    }
    all.sort_by(rule_order);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RawMatrix;
    use alloc::vec;
    use alloc::vec::Vec;

    fn dataset(disc_rows: &[&[u16]], y: &[f64]) -> Dataset {
        let n = disc_rows.len();
        let d = disc_rows[0].len();
        let raw = RawMatrix::new(
            disc_rows
                .iter()
                .flat_map(|r| r.iter().map(|&v| v as f64))
                .collect(),
            n,
            d,
        )
        .unwrap();
        let disc: Vec<u16> = disc_rows.iter().flat_map(|r| r.iter().copied()).collect();
        let names = (0..d).map(|k| format!("X{k}")).collect();
        Dataset::from_parts(raw, disc, y.to_vec(), names).unwrap()
    }

    /// Parameters under which every nonempty candidate passes both screens:
    /// m_n = 2 puts the coverage bound above 1, and a constant target makes
    /// the Hoeffding threshold zero.
    fn lenient() -> MiningParams {
        MiningParams {
            m_n: 2,
            significance: SignificanceSpec::hoeffding(0.5).unwrap(),
            beam_width: 300,
            max_complexity: None,
        }
    }

    fn mined(rule: Rule, ds: &Dataset, params: &MiningParams) -> MinedRule {
        evaluate_candidate(rule, ds, params).unwrap().unwrap()
    }

    #[test]
    fn cp1_enumerates_every_interval_once() {
        // One feature with 5 classes: 15 candidate intervals, of which the
        // full range denotes the unconstrained feature. With a constant
        // target and m_n = 2 every remaining candidate is suitable.
        let rows: Vec<Vec<u16>> = (0..10).map(|i| vec![(i / 2) as u16]).collect();
        let refs: Vec<&[u16]> = rows.iter().map(Vec::as_slice).collect();
        let ds = dataset(&refs, &[7.0; 10]);
        assert_eq!(cp1_candidate_count(&ds), 15);
        let found = calc_cp1(&ds, &lenient()).unwrap();
        assert_eq!(found.len(), 14);
        // Deterministic enumeration order: low ascending, then high.
        let bounds: Vec<(u16, u16)> = found
            .iter()
            .map(|m| {
                let iv = m.rule.conditions()[&0];
                (iv.low(), iv.high())
            })
            .collect();
        assert_eq!(&bounds[..5], &[(0, 0), (0, 1), (0, 2), (0, 3), (1, 1)]);
        assert!(found.iter().all(|m| m.rule.complexity() == 1));
    }

    #[test]
    fn cp1_candidate_count_sums_over_features() {
        let ds = dataset(
            &[&[0, 0], &[1, 1], &[2, 2], &[3, 0], &[4, 1]],
            &[0.0, 1.0, 2.0, 3.0, 4.0],
        );
        // q = 5 and q = 3.
        assert_eq!(cp1_candidate_count(&ds), 15 + 6);
    }

    #[test]
    fn intersect_rejects_shared_features() {
        let ds = dataset(&[&[0], &[1], &[2], &[0]], &[1.0; 4]);
        let params = lenient();
        let a = mined(Rule::single(0, Interval::new(0, 0)), &ds, &params);
        let b = mined(Rule::single(0, Interval::new(1, 2)), &ds, &params);
        assert!(intersect(&a, &b, &ds, &params.significance)
            .unwrap()
            .is_none());
    }

    #[test]
    fn intersect_rejects_nested_activations() {
        // r2's rows are a subset of r1's: the intersection activates exactly
        // n(r2) rows and adds no information.
        let ds = dataset(
            &[&[0, 0], &[1, 0], &[2, 1], &[0, 1]],
            &[1.0; 4],
        );
        let params = lenient();
        let r1 = mined(Rule::single(0, Interval::new(0, 1)), &ds, &params);
        let r2 = mined(Rule::single(1, Interval::new(0, 0)), &ds, &params);
        assert_eq!(r1.stats.activation_bits.and_count(&r2.stats.activation_bits), 2);
        assert_eq!(r2.stats.n_activated, 2);
        assert!(intersect(&r1, &r2, &ds, &params.significance)
            .unwrap()
            .is_none());
    }

    #[test]
    fn intersect_builds_the_conjunction() {
        let ds = dataset(
            &[
                &[0, 2],
                &[1, 3],
                &[0, 0],
                &[1, 1],
                &[2, 2],
                &[3, 4],
                &[0, 4],
                &[2, 0],
            ],
            &[1.0; 8],
        );
        let params = lenient();
        let r1 = mined(Rule::single(0, Interval::new(0, 1)), &ds, &params);
        let r2 = mined(Rule::single(1, Interval::new(2, 4)), &ds, &params);
        let both = intersect(&r1, &r2, &ds, &params.significance)
            .unwrap()
            .expect("overlapping, non-nested activations");
        assert_eq!(both.rule.complexity(), 2);
        assert_eq!(
            both.stats.activation_bits,
            r1.stats.activation_bits.and(&r2.stats.activation_bits)
        );
        assert_eq!(both.stats.n_activated, 3);
    }

    #[test]
    fn cpc_empty_beam_yields_nothing() {
        let ds = dataset(&[&[0], &[1], &[2], &[0]], &[1.0; 4]);
        let params = lenient();
        let r = mined(Rule::single(0, Interval::new(0, 0)), &ds, &params);
        // No complexity-2 rules exist, so the c = 3 beam is empty.
        assert!(calc_cpc(&ds, &[r], 3, &params).unwrap().is_empty());
        assert!(calc_cpc(&ds, &[], 2, &params).unwrap().is_empty());
    }

    #[test]
    fn cpc_beam_width_caps_pairs() {
        let ds = dataset(
            &[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[0, 1], &[1, 0]],
            &[1.0; 6],
        );
        let mut params = lenient();
        params.beam_width = 1;
        let rules = calc_cp1(&ds, &params).unwrap();
        assert!(rules.len() >= 2);
        // One pair tested at most, so at most one candidate can come back.
        let out = calc_cpc(&ds, &rules, 2, &params).unwrap();
        assert!(out.len() <= 1);
    }

    #[test]
    fn cpc_deduplicates_symmetric_pairs() {
        let ds = dataset(
            &[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[0, 0], &[1, 1]],
            &[1.0; 6],
        );
        let params = lenient();
        let rules = calc_cp1(&ds, &params).unwrap();
        let out = calc_cpc(&ds, &rules, 2, &params).unwrap();
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                assert_ne!(a.rule, b.rule, "duplicate rule survived dedup");
            }
        }
        assert!(out.iter().all(|m| m.rule.complexity() == 2));
    }

    #[test]
    fn mine_single_feature_stops_at_complexity_one() {
        let rows: Vec<Vec<u16>> = (0..12).map(|i| vec![(i % 4) as u16]).collect();
        let refs: Vec<&[u16]> = rows.iter().map(Vec::as_slice).collect();
        let ds = dataset(&refs, &[3.0; 12]);
        let out = mine(&ds, &lenient()).unwrap();
        assert!(!out.is_empty());
        assert!(out.iter().all(|m| m.rule.complexity() == 1));
    }

    #[test]
    fn mine_returns_empty_when_nothing_is_significant() {
        // Target independent of the feature: every conditional mean equals
        // the global mean while the Bernstein threshold stays positive.
        let ds = dataset(&[&[0], &[0], &[1], &[1]], &[1.0, -1.0, 1.0, -1.0]);
        let params = MiningParams {
            m_n: 2,
            significance: SignificanceSpec::bernstein(0.05).unwrap(),
            beam_width: 300,
            max_complexity: None,
        };
        assert!(mine(&ds, &params).unwrap().is_empty());
    }

    #[test]
    fn mine_output_is_risk_sorted() {
        let rows: Vec<Vec<u16>> = (0..20)
            .map(|i| vec![(i % 5) as u16, (i % 2) as u16])
            .collect();
        let refs: Vec<&[u16]> = rows.iter().map(Vec::as_slice).collect();
        let y: Vec<f64> = (0..20).map(|i| ((i % 5) as f64) * 2.0 + (i % 3) as f64).collect();
        let ds = dataset(&refs, &y);
        let out = mine(&ds, &lenient()).unwrap();
        assert!(out.len() > 1);
        for w in out.windows(2) {
            assert_ne!(rule_order(&w[0], &w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn mine_respects_complexity_cap() {
        let ds = dataset(
            &[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[0, 0], &[1, 1]],
            &[1.0; 6],
        );
        let mut params = lenient();
        params.max_complexity = Some(1);
        let capped = mine(&ds, &params).unwrap();
        assert!(capped.iter().all(|m| m.rule.complexity() == 1));
        params.max_complexity = None;
        let full = mine(&ds, &params).unwrap();
        assert!(full.iter().any(|m| m.rule.complexity() == 2));
    }

    #[test]
    fn params_validated() {
        let ds = dataset(&[&[0], &[1]], &[0.0, 1.0]);
        let params = MiningParams {
            beam_width: 0,
            ..MiningParams::default()
        };
        assert!(mine(&ds, &params).is_err());
        let params = MiningParams {
            m_n: 1,
            ..MiningParams::default()
        };
        assert!(mine(&ds, &params).is_err());
        let params = MiningParams {
            significance: SignificanceSpec::new(ZKind::Variance, 0.05).unwrap(),
            ..MiningParams::default()
        };
        assert!(mine(&ds, &params).is_err());
    }
}
