//! The fitted model: prediction through the signature-identified partition
//! cell, explanation as activated rule lists, and model summaries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::dataset::Dataset;
use crate::discretize::{Discretizer, RawBounds};
use crate::error::{Error, Result};
use crate::generate::{mine, MiningParams};
use crate::rule::MinedRule;
use crate::select::{select, CellSignature, CellTable};
use crate::significance::{variance_z, z_from_aggregates};

/// Value returned for a query whose cell holds no training row.
///
/// The empirical conditional mean of an empty cell is 0 by the 0/0 = 0
/// convention; falling back to the global mean is opt-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyCellPolicy {
    #[default]
    Zero,
    GlobalMean,
}

/// Facts about the training run kept with the model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta {
    pub n: usize,
    pub d: usize,
    pub feature_names: Vec<String>,
    /// Risk of the constant global-mean predictor on the training data.
    pub global_risk: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_sq_sum: f64,
}

/// A fitted rule model: discretizer, selected rules in risk order, the cell
/// table over training signatures, and the global mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleModel {
    discretizer: Discretizer,
    rules: Vec<MinedRule>,
    cell_table: CellTable,
    global_mean: f64,
    params: MiningParams,
    meta: TrainingMeta,
    empty_cell: EmptyCellPolicy,
}

/// One rule of an explanation, with conditions mapped back to raw values.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivatedRule {
    pub label: String,
    pub mu: f64,
    pub conditions: Vec<ConditionView>,
}

/// A single rule condition in both class and raw-value terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionView {
    pub feature: usize,
    pub feature_name: String,
    pub low: u16,
    pub high: u16,
    pub raw: RawBounds,
}

/// Rules a query activates; empty means the no-rule-satisfied statement.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub activated: Vec<ActivatedRule>,
}

/// One row of the model summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub conditions: String,
    pub coverage: f64,
    pub prediction: f64,
    pub z: f64,
    /// Training risk of the predictor built from the rules up to this row.
    pub cumulative_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub rows: Vec<SummaryRow>,
    /// Residual-cell row, present when some training row activates no rule.
    pub no_rule_row: Option<SummaryRow>,
    /// Per-feature condition counts, most frequent first.
    pub occurrences: Vec<(String, usize)>,
    pub global_mean: f64,
    /// Training risk of the full model.
    pub training_risk: f64,
}

/// Variance-threshold re-screen of one selected rule.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceAudit {
    pub label: String,
    pub z: f64,
    pub deviation: f64,
    pub pass: bool,
}

impl RuleModel {
    /// Mines, selects, labels, and tabulates: the full training pipeline on
    /// an already-discretized dataset.
    pub fn fit(
        dataset: &Dataset,
        discretizer: Discretizer,
        params: MiningParams,
        empty_cell: EmptyCellPolicy,
    ) -> Result<RuleModel> {
        if discretizer.d() != dataset.d() {
            return Err(Error::DimensionMismatch {
                expected: discretizer.d(),
                got: dataset.d(),
            });
        }
        let mined = mine(dataset, &params)?;
        let chosen = select(&mined, dataset);
        let target = dataset.target_stats();
        let global_mean = target.mean;
        let mut rules: Vec<MinedRule> = chosen.into_iter().map(|i| mined[i].clone()).collect();
        for (i, mined_rule) in rules.iter_mut().enumerate() {
            let sign = if mined_rule.stats.mu >= global_mean { '+' } else { '-' };
            mined_rule.rule.set_label(format!(
                "R {}({}){}",
                i,
                mined_rule.rule.complexity(),
                sign
            ));
        }
        let cell_table = CellTable::build(&rules, dataset.y());
        let meta = TrainingMeta {
            n: dataset.n(),
            d: dataset.d(),
            feature_names: dataset.feature_names().to_vec(),
            global_risk: target.pop_variance,
            y_min: target.min,
            y_max: target.max,
            y_sq_sum: target.sq_sum,
        };
        RuleModel::from_parts(
            discretizer,
            rules,
            cell_table,
            global_mean,
            params,
            meta,
            empty_cell,
        )
    }

    /// Assembles a model from stored parts, validating structural
    /// invariants (used by deserialization).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        discretizer: Discretizer,
        rules: Vec<MinedRule>,
        cell_table: CellTable,
        global_mean: f64,
        params: MiningParams,
        meta: TrainingMeta,
        empty_cell: EmptyCellPolicy,
    ) -> Result<RuleModel> {
        params.validate()?;
        if discretizer.d() != meta.d || meta.feature_names.len() != meta.d {
            return Err(Error::DimensionMismatch {
                expected: meta.d,
                got: discretizer.d(),
            });
        }
        for mined_rule in &rules {
            if mined_rule.rule.complexity() == 0 {
                return Err(Error::InvalidParam("stored rule with no conditions".into()));
            }
            if let Some(max) = mined_rule.rule.max_feature() {
                if max >= meta.d {
                    return Err(Error::FeatureOutOfRange {
                        feature: max,
                        d: meta.d,
                    });
                }
            }
            for (k, interval) in mined_rule.rule.conditions() {
                let classes = discretizer.effective_classes(*k);
                if interval.high() >= classes {
                    return Err(Error::InvalidParam(format!(
                        "interval [{}, {}] exceeds the {classes} classes of feature {k}",
                        interval.low(),
                        interval.high(),
                    )));
                }
                // An unconstrained feature is represented by absence, never
                // by a full-range interval.
                if interval.low() == 0 && interval.high() + 1 == classes {
                    return Err(Error::InvalidParam(format!(
                        "condition on feature {k} spans all {classes} classes"
                    )));
                }
            }
            let stats = &mined_rule.stats;
            if stats.activation_bits.len() != meta.n
                || stats.activation_bits.count_ones() != stats.n_activated
            {
                return Err(Error::InvalidParam(
                    "rule activation bits inconsistent with training size".into(),
                ));
            }
        }
        if cell_table.total_count() != meta.n {
            return Err(Error::InvalidParam(format!(
                "cell counts sum to {}, expected {}",
                cell_table.total_count(),
                meta.n
            )));
        }
        if cell_table.iter().any(|(sig, _)| sig.len() != rules.len()) {
            return Err(Error::InvalidParam(
                "cell signature length differs from rule count".into(),
            ));
        }
        Ok(RuleModel {
            discretizer,
            rules,
            cell_table,
            global_mean,
            params,
            meta,
            empty_cell,
        })
    }

    pub fn discretizer(&self) -> &Discretizer {
        &self.discretizer
    }

    pub fn rules(&self) -> &[MinedRule] {
        &self.rules
    }

    pub fn cell_table(&self) -> &CellTable {
        &self.cell_table
    }

    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    pub fn params(&self) -> &MiningParams {
        &self.params
    }

    pub fn meta(&self) -> &TrainingMeta {
        &self.meta
    }

    pub fn empty_cell_policy(&self) -> EmptyCellPolicy {
        self.empty_cell
    }

    fn empty_cell_value(&self) -> f64 {
        match self.empty_cell {
            EmptyCellPolicy::Zero => 0.0,
            EmptyCellPolicy::GlobalMean => self.global_mean,
        }
    }

    /// Activation signature of a discretized row.
    pub fn signature_of(&self, disc_row: &[u16]) -> CellSignature {
        BitVec::from_bools(self.rules.iter().map(|m| m.rule.activates(disc_row)))
    }

    /// Predicts one raw row: the stored mean of the cell its signature
    /// identifies, or the empty-cell value for signatures never observed in
    /// training.
    pub fn predict(&self, raw_row: &[f64]) -> Result<f64> {
        let disc = self.discretizer.transform_row(raw_row)?;
        let sig = self.signature_of(&disc);
        Ok(match self.cell_table.get(&sig) {
            Some(cell) => cell.mean,
            None => self.empty_cell_value(),
        })
    }

    /// Predicts one raw row by the literal kernel sum over training rows:
    /// `Σ y_j k(x, x_j) / Σ k(x, x_j)` where `k` is 1 iff the two rows
    /// activate exactly the same rules. O(nR); the cell-table lookup is the
    /// production path, this is the reference evaluation.
    pub fn predict_kernel(&self, raw_row: &[f64], training: &Dataset) -> Result<f64> {
        if training.n() != self.meta.n {
            return Err(Error::LengthMismatch {
                left: training.n(),
                right: self.meta.n,
            });
        }
        let disc = self.discretizer.transform_row(raw_row)?;
        let sig = self.signature_of(&disc);
        let y = training.y();
        let mut numerator = 0.0;
        let mut denominator = 0.0;
        for (j, &target) in y.iter().enumerate() {
            let mut k = 1.0;
            for (i, mined_rule) in self.rules.iter().enumerate() {
                let matches = sig.get(i) == mined_rule.stats.activation_bits.get(j);
                k *= if matches { 1.0 } else { 0.0 };
            }
            numerator += target * k;
            denominator += k;
        }
        Ok(if denominator == 0.0 {
            self.empty_cell_value()
        } else {
            numerator / denominator
        })
    }

    /// Lists the rules a raw row activates, with conditions translated back
    /// to raw-value bounds. An empty list is the no-rule-satisfied statement.
    pub fn explain(&self, raw_row: &[f64]) -> Result<Explanation> {
        let disc = self.discretizer.transform_row(raw_row)?;
        let activated = self
            .rules
            .iter()
            .filter(|m| m.rule.activates(&disc))
            .map(|m| ActivatedRule {
                label: m.rule.label().to_string(),
                mu: m.stats.mu,
                conditions: self.condition_views(m),
            })
            .collect();
        Ok(Explanation { activated })
    }

    fn condition_views(&self, mined_rule: &MinedRule) -> Vec<ConditionView> {
        mined_rule
            .rule
            .conditions()
            .iter()
            .map(|(k, interval)| ConditionView {
                feature: *k,
                feature_name: self.meta.feature_names[*k].clone(),
                low: interval.low(),
                high: interval.high(),
                raw: self.discretizer.raw_bounds(*k, interval.low(), interval.high()),
            })
            .collect()
    }

    fn conditions_text(&self, mined_rule: &MinedRule) -> String {
        let parts: Vec<String> = mined_rule
            .rule
            .conditions()
            .iter()
            .map(|(k, interval)| {
                let name = &self.meta.feature_names[*k];
                if interval.low() == interval.high() {
                    format!("{name} = {}", interval.low())
                } else {
                    format!("{name} in [{}, {}]", interval.low(), interval.high())
                }
            })
            .collect();
        parts.join(" & ")
    }

    /// Training risk of the predictor built from the first `k` rules, for
    /// every prefix. Derived from the cell table alone: truncating a
    /// signature to its first `k` bits merges cells of the coarser
    /// partition, and the risk follows from the stored counts and means.
    pub fn prefix_risks(&self) -> Vec<f64> {
        let n = self.meta.n as f64;
        (1..=self.rules.len())
            .map(|k| {
                let mut merged: BTreeMap<BitVec, (f64, usize)> = BTreeMap::new();
                for (sig, cell) in self.cell_table.iter() {
                    let entry = merged.entry(sig.truncated(k)).or_insert((0.0, 0));
                    entry.0 += cell.mean * cell.count as f64;
                    entry.1 += cell.count;
                }
                let explained: f64 = merged
                    .values()
                    .map(|(sum, count)| sum * sum / *count as f64)
                    .sum();
                ((self.meta.y_sq_sum - explained) / n).max(0.0)
            })
            .collect()
    }

    /// Training risk of the full model.
    pub fn training_risk(&self) -> f64 {
        let n = self.meta.n as f64;
        let explained: f64 = self
            .cell_table
            .iter()
            .map(|(_, cell)| cell.mean * cell.mean * cell.count as f64)
            .sum();
        ((self.meta.y_sq_sum - explained) / n).max(0.0)
    }

    /// Summary table: one row per selected rule plus the residual cell when
    /// it is populated, and per-feature condition counts.
    pub fn summarize(&self) -> ModelSummary {
        let prefix = self.prefix_risks();
        let rows: Vec<SummaryRow> = self
            .rules
            .iter()
            .zip(&prefix)
            .map(|(m, &risk)| SummaryRow {
                label: m.rule.label().to_string(),
                conditions: self.conditions_text(m),
                coverage: m.stats.coverage,
                prediction: m.stats.mu,
                z: m.stats.z_value,
                cumulative_mse: risk,
            })
            .collect();

        let training_risk = self.training_risk();
        let no_rule_sig = BitVec::zeros(self.rules.len());
        let no_rule_row = self.cell_table.get(&no_rule_sig).map(|cell| SummaryRow {
            label: format!("R {}", self.rules.len()),
            conditions: "No rule activated".to_string(),
            coverage: cell.count as f64 / self.meta.n as f64,
            prediction: cell.mean,
            z: z_from_aggregates(
                self.params.significance.kind(),
                self.params.significance.alpha(),
                cell.count,
                self.meta.y_min,
                self.meta.y_max,
                self.meta.y_sq_sum,
            )
            .unwrap_or(f64::INFINITY),
            cumulative_mse: training_risk,
        });

        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for m in &self.rules {
            for k in m.rule.conditions().keys() {
                *counts.entry(*k).or_insert(0) += 1;
            }
        }
        let mut occurrences: Vec<(String, usize)> = counts
            .into_iter()
            .map(|(k, c)| (self.meta.feature_names[k].clone(), c))
            .collect();
        occurrences.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        ModelSummary {
            rows,
            no_rule_row,
            occurrences,
            global_mean: self.global_mean,
            training_risk,
        }
    }

    /// Re-screens every selected rule against the partition-dependent
    /// variance threshold. Requires the training dataset.
    pub fn variance_audit(&self, training: &Dataset) -> Result<Vec<VarianceAudit>> {
        if training.n() != self.meta.n {
            return Err(Error::LengthMismatch {
                left: training.n(),
                right: self.meta.n,
            });
        }
        let cell_sigs: Vec<CellSignature> =
            self.cell_table.iter().map(|(sig, _)| sig.clone()).collect();
        let counts: Vec<usize> = self.rules.iter().map(|m| m.stats.n_activated).collect();
        self.rules
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let z = variance_z(
                    &m.stats.activation_bits,
                    i,
                    &cell_sigs,
                    &counts,
                    training.y(),
                )?;
                let deviation = crate::math::abs(m.stats.mu - self.global_mean);
                Ok(VarianceAudit {
                    label: m.rule.label().to_string(),
                    z,
                    deviation,
                    pass: deviation >= z,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RawMatrix;
    use crate::select::CellStat;
    use crate::significance::SignificanceSpec;
    use alloc::vec;

    /// Two informative features over a 12-row grid with a target shaped so
    /// that class-0 intervals on either feature shift the mean.
    fn training_data() -> (Dataset, Discretizer) {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![f64::from(i % 3), f64::from(i % 4)])
            .collect();
        let raw = RawMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..12)
            .map(|i| f64::from(i % 3) * 3.0 - f64::from(i % 4))
            .collect();
        let discretizer = Discretizer::fit(&raw, 4).unwrap();
        let ds = Dataset::new(
            raw,
            y,
            vec!["a".into(), "b".into()],
            &discretizer,
        )
        .unwrap();
        (ds, discretizer)
    }

    fn lenient_params() -> MiningParams {
        MiningParams {
            m_n: 2,
            significance: SignificanceSpec::hoeffding(0.9).unwrap(),
            beam_width: 50,
            max_complexity: None,
        }
    }

    fn fitted() -> (RuleModel, Dataset) {
        let (ds, discretizer) = training_data();
        let model = RuleModel::fit(&ds, discretizer, lenient_params(), EmptyCellPolicy::Zero)
            .expect("fit succeeds");
        (model, ds)
    }

    #[test]
    fn training_rows_predict_their_cell_mean() {
        let (model, ds) = fitted();
        assert!(!model.rules().is_empty());
        let sigs = crate::select::signatures(model.rules(), &ds);
        for (j, sig) in sigs.iter().enumerate() {
            let expected = model.cell_table().get(sig).unwrap().mean;
            assert_eq!(model.predict(ds.raw_row(j)).unwrap(), expected);
        }
    }

    #[test]
    fn kernel_path_equals_table_path_on_training_rows() {
        let (model, ds) = fitted();
        for j in 0..ds.n() {
            assert_eq!(
                model.predict(ds.raw_row(j)).unwrap(),
                model.predict_kernel(ds.raw_row(j), &ds).unwrap()
            );
        }
    }

    #[test]
    fn unseen_signature_uses_empty_cell_policy() {
        let (ds, discretizer) = training_data();
        // One rule forced through an empty fit: build a model whose cell
        // table lacks a reachable signature by removing a cell is not
        // possible through the public API, so check the policy through a
        // model with zero rules instead: every signature is the empty one,
        // which is always populated, so exercise the policy values directly.
        let zero = RuleModel::fit(&ds, discretizer.clone(), MiningParams {
            significance: SignificanceSpec::bernstein(0.001).unwrap(),
            m_n: 4,
            ..MiningParams::default()
        }, EmptyCellPolicy::Zero)
        .unwrap();
        if zero.rules().is_empty() {
            // Degenerate model predicts the global mean through its single cell.
            let p = zero.predict(ds.raw_row(0)).unwrap();
            assert_eq!(p, zero.global_mean());
        }
        let (model, ds) = fitted();
        // Forge a model with the same rules but a cell table missing most
        // signatures: only the first cell is kept, count patched to n.
        let (first_sig, first_cell) = model.cell_table().iter().next().unwrap();
        let table = CellTable::from_entries(vec![(
            first_sig.clone(),
            CellStat {
                count: ds.n(),
                mean: first_cell.mean,
            },
        )])
        .unwrap();
        for (policy, expected) in [
            (EmptyCellPolicy::Zero, 0.0),
            (EmptyCellPolicy::GlobalMean, model.global_mean()),
        ] {
            let forged = RuleModel::from_parts(
                model.discretizer().clone(),
                model.rules().to_vec(),
                table.clone(),
                model.global_mean(),
                *model.params(),
                model.meta().clone(),
                policy,
            )
            .unwrap();
            // Find a training row whose signature is not the kept one.
            let row = (0..ds.n())
                .find(|&j| {
                    let disc = forged.discretizer().transform_row(ds.raw_row(j)).unwrap();
                    forged.signature_of(&disc) != *first_sig
                })
                .expect("several cells exist");
            assert_eq!(forged.predict(ds.raw_row(row)).unwrap(), expected);
        }
    }

    #[test]
    fn explain_lists_exactly_the_activated_rules() {
        let (model, ds) = fitted();
        for j in 0..ds.n() {
            let disc = model.discretizer().transform_row(ds.raw_row(j)).unwrap();
            let sig = model.signature_of(&disc);
            let explanation = model.explain(ds.raw_row(j)).unwrap();
            let expected: Vec<&str> = model
                .rules()
                .iter()
                .enumerate()
                .filter(|(i, _)| sig.get(*i))
                .map(|(_, m)| m.rule.label())
                .collect();
            let got: Vec<&str> = explanation
                .activated
                .iter()
                .map(|a| a.label.as_str())
                .collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn labels_carry_rank_complexity_and_sign() {
        let (model, _) = fitted();
        for (i, m) in model.rules().iter().enumerate() {
            let sign = if m.stats.mu >= model.global_mean() { '+' } else { '-' };
            assert_eq!(
                m.rule.label(),
                format!("R {i}({}){sign}", m.rule.complexity())
            );
        }
    }

    #[test]
    fn summary_occurrence_counts_sum_to_total_conditions() {
        let (model, _) = fitted();
        let summary = model.summarize();
        let total: usize = summary.occurrences.iter().map(|(_, c)| c).sum();
        let conditions: usize = model.rules().iter().map(|m| m.rule.complexity()).sum();
        assert_eq!(total, conditions);
        // Counts are sorted descending.
        for w in summary.occurrences.windows(2) {
            assert!(w[0].1 >= w[1].1);
        }
    }

    #[test]
    fn summary_prefix_risk_matches_set_risk() {
        let (model, ds) = fitted();
        let summary = model.summarize();
        for (k, row) in summary.rows.iter().enumerate() {
            let direct = crate::select::set_risk(&model.rules()[..=k], &ds);
            assert!(
                (row.cumulative_mse - direct).abs() < 1e-9,
                "prefix {k}: {} vs {direct}",
                row.cumulative_mse
            );
        }
        assert!((summary.training_risk - crate::select::set_risk(model.rules(), &ds)).abs() < 1e-9);
    }

    #[test]
    fn occurrence_counts_from_known_rule_set() {
        // A fixture of fourteen rules over sparse high-indexed features;
        // counting occurrences must rank features by usage.
        use crate::rule::{Interval, Rule, RuleStats};
        let y = [0.0, 1.0, 2.0, 3.0];
        let mk = |features: &[(usize, (u16, u16))]| {
            let mut conditions = BTreeMap::new();
            for (k, (lo, hi)) in features {
                conditions.insert(*k, Interval::new(*lo, *hi));
            }
            MinedRule {
                rule: Rule::new(conditions),
                stats: RuleStats::from_bits(BitVec::from_bools([true; 4]), &y, 0.0).unwrap(),
            }
        };
        let rules = vec![
            mk(&[(976, (0, 2)), (298, (0, 2))]),
            mk(&[(976, (0, 0))]),
            mk(&[(976, (4, 4))]),
            mk(&[(976, (0, 1)), (336, (0, 1))]),
            mk(&[(298, (2, 4)), (976, (2, 3))]),
            mk(&[(298, (4, 4))]),
            mk(&[(298, (0, 0))]),
            mk(&[(298, (0, 1)), (336, (0, 1))]),
            mk(&[(976, (2, 4)), (564, (4, 4))]),
            mk(&[(976, (2, 4)), (163, (4, 4))]),
            mk(&[(976, (0, 1)), (945, (2, 2))]),
            mk(&[(976, (0, 1)), (733, (1, 1))]),
            mk(&[(976, (3, 3))]),
        ];
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for m in &rules {
            for k in m.rule.conditions().keys() {
                *counts.entry(*k).or_insert(0) += 1;
            }
        }
        let mut sorted: Vec<(usize, usize)> = counts.into_iter().collect();
        sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        assert_eq!(sorted[0], (976, 10));
        assert_eq!(sorted[1], (298, 5));
        assert_eq!(sorted[2], (336, 2));
        let total: usize = sorted.iter().map(|(_, c)| c).sum();
        assert_eq!(total, rules.iter().map(|m| m.rule.complexity()).sum());
    }

    #[test]
    fn degenerate_model_summary_has_only_the_residual_row() {
        // Target independent of the features: no rule passes significance.
        let y = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let raw = RawMatrix::from_rows(
            &(0..12).map(|i| vec![f64::from(i % 2), f64::from(i % 2)]).collect::<Vec<_>>(),
        )
        .unwrap();
        let disc2 = Discretizer::fit(&raw, 4).unwrap();
        let ds2 = Dataset::new(raw, y, vec!["a".into(), "b".into()], &disc2).unwrap();
        let params = MiningParams {
            m_n: 4,
            ..MiningParams::default()
        };
        let model = RuleModel::fit(&ds2, disc2, params, EmptyCellPolicy::Zero).unwrap();
        assert!(model.rules().is_empty());
        let summary = model.summarize();
        assert!(summary.rows.is_empty());
        let row = summary.no_rule_row.expect("residual cell populated");
        assert_eq!(row.coverage, 1.0);
        assert_eq!(row.prediction, model.global_mean());
    }

    #[test]
    fn variance_audit_runs_on_fitted_model() {
        let (model, ds) = fitted();
        let audit = model.variance_audit(&ds).unwrap();
        assert_eq!(audit.len(), model.rules().len());
        for entry in &audit {
            assert!(entry.z >= 0.0);
            assert!(entry.deviation >= 0.0);
            assert_eq!(entry.pass, entry.deviation >= entry.z);
        }
    }

    #[test]
    fn from_parts_rejects_inconsistent_cell_counts() {
        let (model, _) = fitted();
        let mut meta = model.meta().clone();
        meta.n += 1;
        // Rules' activation bits no longer match the claimed n.
        assert!(RuleModel::from_parts(
            model.discretizer().clone(),
            model.rules().to_vec(),
            model.cell_table().clone(),
            model.global_mean(),
            *model.params(),
            meta,
            EmptyCellPolicy::Zero,
        )
        .is_err());
    }
}
