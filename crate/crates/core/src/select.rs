//! Partition cells from activation signatures, the set-risk evaluation, and
//! greedy rule-subset selection.
//!
//! The partition induced by a set of overlapping hyperrectangles is never
//! built geometrically. An observation's cell is identified by its
//! activation signature: the bit pattern of which rules it satisfies. Rows
//! sharing a signature share a cell, the all-zero signature being the
//! residual "no rule satisfied" cell.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rule::MinedRule;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Bit pattern of rule activations identifying one partition cell.
pub type CellSignature = BitVec;

/// Count and conditional target mean of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStat {
    pub count: usize,
    pub mean: f64,
}

/// Map from observed cell signatures to their training statistics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellTable {
    cells: BTreeMap<CellSignature, CellStat>,
}

impl CellTable {
    /// Groups training rows by signature. Cell means accumulate in row
    /// order, which keeps them bit-identical to the kernel-sum evaluation.
    pub fn build(rules: &[MinedRule], y: &[f64]) -> CellTable {
        let sigs = row_signatures(rules, y.len());
        let mut acc: BTreeMap<CellSignature, (f64, usize)> = BTreeMap::new();
        for (j, sig) in sigs.into_iter().enumerate() {
            let entry = acc.entry(sig).or_insert((0.0, 0));
            entry.0 += y[j];
            entry.1 += 1;
        }
        CellTable {
            cells: acc
                .into_iter()
                .map(|(sig, (sum, count))| {
                    (
                        sig,
                        CellStat {
                            count,
                            mean: sum / count as f64,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn from_entries(entries: Vec<(CellSignature, CellStat)>) -> Result<CellTable> {
        let mut cells = BTreeMap::new();
        for (sig, stat) in entries {
            if stat.count == 0 {
                return Err(Error::InvalidParam("cell with zero count".into()));
            }
            if cells.insert(sig, stat).is_some() {
                return Err(Error::InvalidParam("duplicate cell signature".into()));
            }
        }
        Ok(CellTable { cells })
    }

    pub fn get(&self, signature: &CellSignature) -> Option<&CellStat> {
        self.cells.get(signature)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellSignature, &CellStat)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Sum of cell counts; equals the training size by construction.
    pub fn total_count(&self) -> usize {
        self.cells.values().map(|c| c.count).sum()
    }
}

fn row_signatures(rules: &[MinedRule], n: usize) -> Vec<CellSignature> {
    (0..n)
        .map(|j| BitVec::from_bools(rules.iter().map(|m| m.stats.activation_bits.get(j))))
        .collect()
}

/// Per-observation activation signatures: bit `i` of row `j`'s signature is
/// rule `i`'s activation on row `j`.
pub fn signatures(rules: &[MinedRule], dataset: &Dataset) -> Vec<CellSignature> {
    debug_assert!(rules
        .iter()
        .all(|m| m.stats.activation_bits.len() == dataset.n()));
    row_signatures(rules, dataset.n())
}

/// Empirical risk of the partition predictor for a rule subset, computed by
/// partition refinement over the rules' activation bits in O(n·R) without
/// materializing signatures. An empty subset is the constant global-mean
/// predictor.
pub fn set_risk(rules: &[MinedRule], dataset: &Dataset) -> f64 {
    let bits: Vec<&BitVec> = rules.iter().map(|m| &m.stats.activation_bits).collect();
    set_risk_bits(&bits, dataset.y())
}

pub(crate) fn set_risk_bits(bits: &[&BitVec], y: &[f64]) -> f64 {
    let n = y.len();
    debug_assert!(bits.iter().all(|b| b.len() == n));
    let mut cell: Vec<u32> = vec![0; n];
    let mut n_cells: usize = 1;
    for bv in bits {
        // Split every current cell into (inactive, active) halves, assigning
        // fresh ids in first-encounter order; ids only matter for grouping.
        let mut relabel: Vec<[u32; 2]> = vec![[u32::MAX; 2]; n_cells];
        let mut next: u32 = 0;
        for j in 0..n {
            let slot = &mut relabel[cell[j] as usize][usize::from(bv.get(j))];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            cell[j] = *slot;
        }
        n_cells = next as usize;
    }

    let mut sums: Vec<f64> = vec![0.0; n_cells];
    let mut counts: Vec<usize> = vec![0; n_cells];
    for (j, &v) in y.iter().enumerate() {
        sums[cell[j] as usize] += v;
        counts[cell[j] as usize] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, c)| s / *c as f64)
        .collect();

    let mut sum_sq = 0.0;
    for (j, &v) in y.iter().enumerate() {
        let diff = means[cell[j] as usize] - v;
        sum_sq += diff * diff;
    }
    sum_sq / n as f64
}

/// Outcome of the greedy selection, with the per-step risk trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    /// Indices into the input rule list, ascending (the input's risk order).
    pub selected: Vec<usize>,
    /// Risk of the kept subset after initialization and after each step.
    pub step_risks: Vec<f64>,
    /// Number of set-risk evaluations performed.
    pub evaluations: usize,
}

/// Greedy selection over a risk-sorted rule list.
///
/// Starts from the single lowest-risk rule. For each next rule `r`, the
/// candidates are the current set `S`, `S ∪ {r}`, and every
/// `S ∪ {r} \ {s}`; the minimum-risk candidate is kept. Exact risk ties
/// prefer the smaller set, then the earliest-generated candidate. A rule
/// dropped from `S` never re-enters.
pub fn select(rules: &[MinedRule], dataset: &Dataset) -> Vec<usize> {
    select_with_trace(rules, dataset).selected
}

pub fn select_with_trace(rules: &[MinedRule], dataset: &Dataset) -> SelectionTrace {
    let bits: Vec<&BitVec> = rules.iter().map(|m| &m.stats.activation_bits).collect();
    let y = dataset.y();
    let subset_risk = |subset: &[usize]| -> f64 {
        let chosen: Vec<&BitVec> = subset.iter().map(|&i| bits[i]).collect();
        set_risk_bits(&chosen, y)
    };

    if rules.is_empty() {
        return SelectionTrace {
            selected: Vec::new(),
            step_risks: Vec::new(),
            evaluations: 0,
        };
    }

    let mut kept: Vec<usize> = vec![0];
    let mut kept_risk = subset_risk(&kept);
    let mut evaluations = 1;
    let mut step_risks = vec![kept_risk];

    for i in 1..rules.len() {
        // Candidate 0 is the unchanged set; its risk is already known.
        let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(kept.len() + 2);
        candidates.push(kept.clone());
        let mut with_new = kept.clone();
        with_new.push(i);
        candidates.push(with_new);
        for j in 0..kept.len() {
            let mut swapped: Vec<usize> = kept
                .iter()
                .enumerate()
                .filter(|(pos, _)| *pos != j)
                .map(|(_, &idx)| idx)
                .collect();
            swapped.push(i);
            candidates.push(swapped);
        }

        #[cfg(feature = "parallel")]
        let fresh_risks: Vec<f64> = candidates[1..]
            .par_iter()
            .map(|c| subset_risk(c))
            .collect();

        #[cfg(not(feature = "parallel"))]
        let fresh_risks: Vec<f64> = candidates[1..].iter().map(|c| subset_risk(c)).collect();

        evaluations += fresh_risks.len();

        let mut best_pos = 0;
        let mut best_risk = kept_risk;
        for (offset, &risk) in fresh_risks.iter().enumerate() {
            let pos = offset + 1;
            let better = risk < best_risk
                || (risk == best_risk && candidates[pos].len() < candidates[best_pos].len());
            if better {
                best_pos = pos;
                best_risk = risk;
            }
        }
        if best_pos != 0 {
            kept = candidates.swap_remove(best_pos);
            kept.sort_unstable();
            kept_risk = best_risk;
        }
        step_risks.push(kept_risk);
    }

    SelectionTrace {
        selected: kept,
        step_risks,
        evaluations,
    }
}
