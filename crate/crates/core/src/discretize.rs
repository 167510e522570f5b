//! Per-feature quantile discretization into at most `m_n` ordered classes.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::RawMatrix;
use crate::error::{Error, Result};

/// How one feature maps raw values to class indices.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureBins {
    /// Strictly ascending cut points; the class of `x` is the number of
    /// edges strictly below `x`, so each edge belongs to the class below it.
    Edges(Vec<f64>),
    /// A feature with at most `m_n` distinct values keeps one class per
    /// value, ranked by value order.
    Values(Vec<f64>),
}

impl FeatureBins {
    fn classes(&self) -> u16 {
        match self {
            FeatureBins::Edges(edges) => edges.len() as u16 + 1,
            FeatureBins::Values(values) => values.len() as u16,
        }
    }

    #[inline]
    fn transform(&self, x: f64) -> u16 {
        match self {
            FeatureBins::Edges(edges) => edges.partition_point(|e| *e < x) as u16,
            FeatureBins::Values(values) => {
                (values.partition_point(|v| *v <= x).saturating_sub(1)) as u16
            }
        }
    }
}

/// Raw-value bounds of a class interval, recovered from the fitted bins.
#[derive(Debug, Clone, PartialEq)]
pub enum RawBounds {
    /// `lower < x <= upper`; `None` means unbounded on that side.
    HalfOpen { lower: Option<f64>, upper: Option<f64> },
    /// `lower <= x <= upper` over a discrete value set.
    Closed { lower: f64, upper: f64 },
}

/// Fitted per-feature binning, reusable at prediction time.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretizer {
    m_n: u16,
    features: Vec<FeatureBins>,
}

impl Discretizer {
    /// Fits empirical-quantile bins on every column of `raw`.
    ///
    /// Columns with more than `m_n` distinct values get quantile cut points
    /// at levels `j/m_n` (order statistic at index `ceil(j*n/m_n) - 1`,
    /// duplicates merged); columns with at most `m_n` distinct values keep
    /// one class per value.
    pub fn fit(raw: &RawMatrix, m_n: u16) -> Result<Self> {
        if m_n < 2 {
            return Err(Error::InvalidParam(format!(
                "m_n must be at least 2, got {m_n}"
            )));
        }
        if raw.n() == 0 || raw.d() == 0 {
            return Err(Error::EmptyInput("feature matrix"));
        }
        let n = raw.n();
        let mut features = Vec::with_capacity(raw.d());
        for k in 0..raw.d() {
            let mut sorted: Vec<f64> = raw.column(k).collect();
            sorted.sort_unstable_by(f64::total_cmp);
            let mut distinct = sorted.clone();
            distinct.dedup();
            if distinct.len() <= m_n as usize {
                features.push(FeatureBins::Values(distinct));
            } else {
                let m = m_n as usize;
                let mut edges = Vec::with_capacity(m - 1);
                for j in 1..m {
                    let idx = (j * n).div_ceil(m) - 1;
                    edges.push(sorted[idx]);
                }
                edges.dedup();
                features.push(FeatureBins::Edges(edges));
            }
        }
        Ok(Discretizer { m_n, features })
    }

    /// Rebuilds a discretizer from stored bins, validating orderings.
    pub fn from_parts(m_n: u16, features: Vec<FeatureBins>) -> Result<Self> {
        if m_n < 2 {
            return Err(Error::InvalidParam(format!(
                "m_n must be at least 2, got {m_n}"
            )));
        }
        for bins in &features {
            let points = match bins {
                FeatureBins::Edges(p) | FeatureBins::Values(p) => p,
            };
            if points.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("discretizer cut points"));
            }
            if points.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParam(
                    "discretizer cut points must be strictly ascending".into(),
                ));
            }
            if bins.classes() == 0 || bins.classes() > m_n {
                return Err(Error::InvalidParam(format!(
                    "feature has {} classes, outside [1, {m_n}]",
                    bins.classes()
                )));
            }
        }
        Ok(Discretizer { m_n, features })
    }

    pub fn m_n(&self) -> u16 {
        self.m_n
    }

    pub fn d(&self) -> usize {
        self.features.len()
    }

    pub fn bins(&self) -> &[FeatureBins] {
        &self.features
    }

    /// Number of classes feature `k` actually has after merging duplicate
    /// cut points (at most `m_n`).
    pub fn effective_classes(&self, k: usize) -> u16 {
        self.features[k].classes()
    }

    /// Maps one raw row to class indices. Out-of-range values clip to the
    /// first or last class.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<u16>> {
        if row.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature row"));
        }
        Ok(row
            .iter()
            .zip(&self.features)
            .map(|(x, bins)| bins.transform(*x))
            .collect())
    }

    /// Raw-value bounds of the class range `[low, high]` on feature `k`.
    pub fn raw_bounds(&self, k: usize, low: u16, high: u16) -> RawBounds {
        match &self.features[k] {
            FeatureBins::Edges(edges) => RawBounds::HalfOpen {
                lower: (low > 0).then(|| edges[low as usize - 1]),
                upper: (usize::from(high) < edges.len()).then(|| edges[high as usize]),
            },
            FeatureBins::Values(values) => RawBounds::Closed {
                lower: values[low as usize],
                upper: values[high as usize],
            },
        }
    }
}
