//! Row-aligned training data: raw features, discretized features, target.

use alloc::string::String;
use alloc::vec::Vec;

use crate::discretize::Discretizer;
use crate::error::{Error, Result};

/// Dense row-major matrix of raw feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl RawMatrix {
    pub fn new(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: n * d,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        Ok(RawMatrix { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        RawMatrix::new(data, n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.d + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.d..(row + 1) * self.d]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.at(i, col))
    }
}

/// Aggregates of the target vector reused across candidate evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub sq_sum: f64,
    /// Empirical risk of the constant global-mean predictor, `Σ(y−ȳ)²/n`.
    pub pop_variance: f64,
}

impl TargetStats {
    pub fn compute(y: &[f64]) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyInput("target vector"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target vector"));
        }
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sq_sum = 0.0;
        let mut ss = 0.0;
        for &v in y {
            min = min.min(v);
            max = max.max(v);
            sq_sum += v * v;
            let diff = v - mean;
            ss += diff * diff;
        }
        Ok(TargetStats {
            mean,
            min,
            max,
            sq_sum,
            pop_variance: ss / n,
        })
    }
}

/// Training sample: raw matrix, its discretization, and the target vector.
#[derive(Debug, Clone)]
pub struct Dataset {
    raw: RawMatrix,
    disc: Vec<u16>,
    classes: Vec<u16>,
    y: Vec<f64>,
    feature_names: Vec<String>,
    target_stats: TargetStats,
}

impl Dataset {
    /// Discretizes `raw` with a fitted `Discretizer` and bundles the sample.
    pub fn new(
        raw: RawMatrix,
        y: Vec<f64>,
        feature_names: Vec<String>,
        discretizer: &Discretizer,
    ) -> Result<Self> {
        let n = raw.n();
        let d = raw.d();
        if discretizer.d() != d {
            return Err(Error::DimensionMismatch {
                expected: discretizer.d(),
                got: d,
            });
        }
        let mut disc = Vec::with_capacity(n * d);
        for i in 0..n {
            disc.extend(discretizer.transform_row(raw.row(i))?);
        }
        let classes = (0..d).map(|k| discretizer.effective_classes(k)).collect();
        Self::assemble(raw, disc, classes, y, feature_names)
    }

    /// Builds a dataset from an already-discretized matrix. Class counts per
    /// feature are taken as `max + 1` over the column.
    pub fn from_parts(
        raw: RawMatrix,
        disc: Vec<u16>,
        y: Vec<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = raw.n();
        let d = raw.d();
        if disc.len() != n * d {
            return Err(Error::LengthMismatch {
                left: disc.len(),
                right: n * d,
            });
        }
        let classes = (0..d)
            .map(|k| (0..n).map(|i| disc[i * d + k]).max().unwrap_or(0) + 1)
            .collect();
        Self::assemble(raw, disc, classes, y, feature_names)
    }

    fn assemble(
        raw: RawMatrix,
        disc: Vec<u16>,
        classes: Vec<u16>,
        y: Vec<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = raw.n();
        let d = raw.d();
        if n < 2 {
            return Err(Error::InvalidParam(String::from(
                "a dataset requires at least 2 rows",
            )));
        }
        if y.len() != n {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: n,
            });
        }
        if feature_names.len() != d {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: d,
            });
        }
        let target_stats = TargetStats::compute(&y)?;
        Ok(Dataset {
            raw,
            disc,
            classes,
            y,
            feature_names,
            target_stats,
        })
    }

    pub fn n(&self) -> usize {
        self.raw.n()
    }

    pub fn d(&self) -> usize {
        self.raw.d()
    }

    pub fn raw(&self) -> &RawMatrix {
        &self.raw
    }

    pub fn raw_row(&self, row: usize) -> &[f64] {
        self.raw.row(row)
    }

    #[inline]
    pub fn disc_row(&self, row: usize) -> &[u16] {
        let d = self.raw.d();
        &self.disc[row * d..(row + 1) * d]
    }

    #[inline]
    pub fn disc_at(&self, row: usize, col: usize) -> u16 {
        self.disc[row * self.raw.d() + col]
    }

    /// Number of discretization classes feature `k` can take.
    pub fn classes(&self, k: usize) -> u16 {
        self.classes[k]
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_stats(&self) -> &TargetStats {
        &self.target_stats
    }
}
