//! Seeded synthetic-data experiments: a nonlinear two-feature problem with
//! noise features, and a sparse high-dimensional linear problem. Both emit
//! metrics, the rule summary, and plot-ready grids.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ripe_core::{
    empirical_risk, Dataset, Discretizer, EmptyCellPolicy, MiningParams, ModelSummary, RawMatrix,
    RuleModel,
};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Target driven by whether (x0, x1) falls inside or outside two discs.
    Circle,
    /// Sparse linear signal among Gaussian noise features.
    Linear,
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub d: usize,
    /// Number of informative features (fixed at 2 for the circle problem).
    pub p: usize,
    pub noise_sd: f64,
    pub seed: u64,
    pub train_fraction: f64,
}

impl ExperimentConfig {
    pub fn circle() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Circle,
            n: 5000,
            d: 10,
            p: 2,
            noise_sd: 1.0,
            seed: 42,
            train_fraction: 0.6,
        }
    }

    pub fn linear() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Linear,
            n: 500,
            d: 50,
            p: 3,
            noise_sd: 10.0,
            seed: 42,
            train_fraction: 0.6,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n < 2 {
            return Err(CliError::Input("n must be at least 2".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CliError::Input(format!(
                "train fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        match self.kind {
            ExperimentKind::Circle => {
                if self.d < 2 {
                    return Err(CliError::Input("the circle problem needs d >= 2".into()));
                }
            }
            ExperimentKind::Linear => {
                if self.p > self.d {
                    return Err(CliError::Input(format!(
                        "p = {} informative features exceed d = {}",
                        self.p, self.d
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A generated sample with the indices of its informative features.
pub struct GeneratedData {
    pub raw: RawMatrix,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub informative: Vec<usize>,
}

/// Noise-free circle target: -2 outside the large disc, +2 inside the small
/// one, 0 in the ring between.
pub fn circle_target(x0: f64, x1: f64) -> f64 {
    let r2 = x0 * x0 + x1 * x1;
    let mut value = 0.0;
    if r2 > 0.8 {
        value -= 2.0;
    }
    if r2 < 0.5 {
        value += 2.0;
    }
    value
}

fn feature_names(d: usize) -> Vec<String> {
    (0..d).map(|k| format!("X{k}")).collect()
}

/// Circle data: x0, x1 uniform on [-1, 1], the remaining features and the
/// additive target noise standard normal. Deterministic given the seed.
pub fn gen_circle(n: usize, d: usize, seed: u64) -> CliResult<GeneratedData> {
    if d < 2 {
        return Err(CliError::Input("the circle problem needs d >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x0 = rng.random_range(-1.0..1.0);
        let x1 = rng.random_range(-1.0..1.0);
        data.push(x0);
        data.push(x1);
        for _ in 2..d {
            data.push(rng.sample::<f64, _>(StandardNormal));
        }
        let eps: f64 = rng.sample(StandardNormal);
        y.push(circle_target(x0, x1) + eps);
    }
    Ok(GeneratedData {
        raw: RawMatrix::new(data, n, d)?,
        y,
        feature_names: feature_names(d),
        informative: vec![0, 1],
    })
}

/// Linear data: all features standard normal; `p` randomly chosen features
/// carry positive weights drawn uniformly from [10, 100); the target adds
/// `noise_sd`-scaled Gaussian noise.
pub fn gen_linear(
    n: usize,
    d: usize,
    p: usize,
    noise_sd: f64,
    seed: u64,
) -> CliResult<GeneratedData> {
    if p > d {
        return Err(CliError::Input(format!(
            "p = {p} informative features exceed d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut informative: Vec<usize> = rand::seq::index::sample(&mut rng, d, p).into_vec();
    informative.sort_unstable();
    let weights: Vec<f64> = informative
        .iter()
        .map(|_| rng.random_range(10.0..100.0))
        .collect();
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row_start = data.len();
        for _ in 0..d {
            data.push(rng.sample::<f64, _>(StandardNormal));
        }
        let signal: f64 = informative
            .iter()
            .zip(&weights)
            .map(|(&k, w)| w * data[row_start + k])
            .sum();
        let eps: f64 = rng.sample(StandardNormal);
        y.push(signal + noise_sd * eps);
    }
    Ok(GeneratedData {
        raw: RawMatrix::new(data, n, d)?,
        y,
        feature_names: feature_names(d),
        informative,
    })
}

/// Mean squared error normalized by the population variance of the targets.
/// A constant predictor scores about 1.
pub fn nmse(predictions: &[f64], y: &[f64]) -> CliResult<f64> {
    let mse = empirical_risk(predictions, y)?;
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let variance = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if variance == 0.0 {
        return Err(ripe_core::Error::ConstantTarget.into());
    }
    Ok(mse / variance)
}

/// Disjoint, exhaustive train/test row split by seeded shuffle;
/// `|train| = round(train_fraction * n)`.
pub fn split_indices(
    n: usize,
    train_fraction: f64,
    seed: u64,
) -> CliResult<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CliError::Input(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let train_count = (train_fraction * n as f64).round() as usize;
    if train_count == 0 || train_count >= n {
        return Err(CliError::Input(format!(
            "train fraction {train_fraction} leaves an empty split for n = {n}"
        )));
    }
    let test = indices.split_off(train_count);
    Ok((indices, test))
}

pub struct ExperimentReport {
    pub model: RuleModel,
    pub summary: ModelSummary,
    pub informative: Vec<usize>,
    pub train_n: usize,
    pub test_n: usize,
    pub train_mse: f64,
    pub train_nmse: f64,
    pub test_mse: f64,
    pub test_nmse: f64,
    /// Share of rule conditions that land on informative features.
    pub condition_informative_fraction: Option<f64>,
    /// Share of rules whose conditions all land on informative features.
    pub rules_only_informative_fraction: Option<f64>,
    /// (x0, x1, prediction) over a 100x100 grid, circle experiments only.
    pub grid: Option<Vec<(f64, f64, f64)>>,
}

fn select_rows(raw: &RawMatrix, y: &[f64], rows: &[usize]) -> CliResult<(RawMatrix, Vec<f64>)> {
    let d = raw.d();
    let mut data = Vec::with_capacity(rows.len() * d);
    let mut target = Vec::with_capacity(rows.len());
    for &i in rows {
        data.extend_from_slice(raw.row(i));
        target.push(y[i]);
    }
    Ok((RawMatrix::new(data, rows.len(), d)?, target))
}

/// Runs one experiment end to end: generate, split, fit on the training
/// part, evaluate both parts.
pub fn run(config: &ExperimentConfig, params: &MiningParams) -> CliResult<ExperimentReport> {
    config.validate()?;
    let generated = match config.kind {
        ExperimentKind::Circle => gen_circle(config.n, config.d, config.seed)?,
        ExperimentKind::Linear => {
            gen_linear(config.n, config.d, config.p, config.noise_sd, config.seed)?
        }
    };
    let (train_rows, test_rows) = split_indices(config.n, config.train_fraction, config.seed)?;
    let (train_raw, train_y) = select_rows(&generated.raw, &generated.y, &train_rows)?;
    let (test_raw, test_y) = select_rows(&generated.raw, &generated.y, &test_rows)?;

    let discretizer = Discretizer::fit(&train_raw, params.m_n)?;
    let dataset = Dataset::new(
        train_raw,
        train_y,
        generated.feature_names.clone(),
        &discretizer,
    )?;
    let model = RuleModel::fit(&dataset, discretizer, *params, EmptyCellPolicy::Zero)?;

    let predict_all = |raw: &RawMatrix| -> CliResult<Vec<f64>> {
        (0..raw.n())
            .map(|i| model.predict(raw.row(i)).map_err(CliError::from))
            .collect()
    };
    let train_pred = predict_all(dataset.raw())?;
    let test_pred = predict_all(&test_raw)?;
    let train_mse = empirical_risk(&train_pred, dataset.y())?;
    let test_mse = empirical_risk(&test_pred, &test_y)?;
    let train_nmse = nmse(&train_pred, dataset.y())?;
    let test_nmse = nmse(&test_pred, &test_y)?;

    let informative = &generated.informative;
    let total_conditions: usize = model.rules().iter().map(|m| m.rule.complexity()).sum();
    let condition_informative_fraction = (total_conditions > 0).then(|| {
        let hits: usize = model
            .rules()
            .iter()
            .flat_map(|m| m.rule.conditions().keys())
            .filter(|k| informative.contains(k))
            .count();
        hits as f64 / total_conditions as f64
    });
    let rules_only_informative_fraction = (!model.rules().is_empty()).then(|| {
        let pure = model
            .rules()
            .iter()
            .filter(|m| m.rule.conditions().keys().all(|k| informative.contains(k)))
            .count();
        pure as f64 / model.rules().len() as f64
    });

    let grid = match config.kind {
        ExperimentKind::Circle => Some(prediction_grid(&model, config.d)?),
        ExperimentKind::Linear => None,
    };

    Ok(ExperimentReport {
        summary: model.summarize(),
        informative: generated.informative,
        train_n: train_rows.len(),
        test_n: test_rows.len(),
        train_mse,
        train_nmse,
        test_mse,
        test_nmse,
        condition_informative_fraction,
        rules_only_informative_fraction,
        grid,
        model,
    })
}

/// Model predictions over a 100x100 grid of (x0, x1) in [-1, 1]^2 with all
/// other features at 0.
fn prediction_grid(model: &RuleModel, d: usize) -> CliResult<Vec<(f64, f64, f64)>> {
    let steps = 100;
    let mut grid = Vec::with_capacity(steps * steps);
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (steps - 1) as f64;
    let mut row = vec![0.0; d];
    for i in 0..steps {
        for j in 0..steps {
            row[0] = coord(i);
            row[1] = coord(j);
            let pred = model.predict(&row)?;
            grid.push((row[0], row[1], pred));
        }
    }
    Ok(grid)
}
