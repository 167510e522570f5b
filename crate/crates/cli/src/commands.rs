//! Implementations behind the CLI subcommands.

use std::path::{Path, PathBuf};

use log::{info, warn};

use ripe_core::{
    empirical_risk, Dataset, Discretizer, EmptyCellPolicy, MiningParams, ModelSummary, RuleModel,
};

use crate::experiment::{self, ExperimentConfig, ExperimentKind};
use crate::table::{self, load_table, Table};
use crate::{model_file, CliError, CliResult};

pub struct FitArgs {
    pub data: PathBuf,
    pub target: String,
    pub out: PathBuf,
    pub params: MiningParams,
    pub fallback_mean: bool,
    pub variance_audit: bool,
}

pub fn fit(args: &FitArgs) -> CliResult<()> {
    let table = load_table(&args.data)?;
    if table.n_rows() == 0 {
        return Err(CliError::Input(format!(
            "{}: no data rows",
            args.data.display()
        )));
    }
    if table.column_index(&args.target).is_none() {
        return Err(CliError::Input(format!(
            "target column '{}' not found",
            args.target
        )));
    }
    let feature_names: Vec<String> = table
        .headers()
        .iter()
        .filter(|h| **h != args.target)
        .cloned()
        .collect();
    if feature_names.is_empty() {
        return Err(CliError::Input("no feature columns besides the target".into()));
    }
    let raw = table.numeric_matrix(&feature_names)?;
    let y = table.numeric_column(&args.target)?;

    warn_on_sharp_discretization(args.params.m_n, raw.d(), raw.n());
    let start = std::time::Instant::now();
    let discretizer = Discretizer::fit(&raw, args.params.m_n)?;
    let dataset = Dataset::new(raw, y, feature_names, &discretizer)?;
    let policy = if args.fallback_mean {
        EmptyCellPolicy::GlobalMean
    } else {
        EmptyCellPolicy::Zero
    };
    let model = RuleModel::fit(&dataset, discretizer, args.params, policy)?;
    info!("fit completed in {:.2?}", start.elapsed());

    if model.rules().is_empty() {
        warn!("no suitable rules found; the model predicts the global mean everywhere");
    }
    print!("{}", render_summary(&model.summarize()));
    if args.variance_audit {
        print!("{}", render_variance_audit(&model, &dataset)?);
    }
    model_file::save(&model, &args.out)?;
    info!("model written to {}", args.out.display());
    Ok(())
}

fn warn_on_sharp_discretization(m_n: u16, d: usize, n: usize) {
    let exponent = d.min(8) as i32;
    if f64::from(m_n).powi(exponent) > n as f64 {
        warn!(
            "m_n = {m_n} is sharp for {d} features and {n} rows \
             (m_n^min(d,8) = {} > n); expect unstable cells",
            f64::from(m_n).powi(exponent)
        );
    }
    if m_n == 2 {
        warn!("m_n = 2 puts the coverage bound above 1; every coverage passes");
    }
}

/// Feature matrix for prediction, matched to the model's training columns
/// by name (extra columns in the file are ignored).
fn prediction_matrix(model: &RuleModel, table: &Table, source: &Path) -> CliResult<ripe_core::RawMatrix> {
    if table.n_rows() == 0 {
        return Err(CliError::Input(format!(
            "{}: no data rows",
            source.display()
        )));
    }
    table.numeric_matrix(&model.meta().feature_names)
}

pub struct PredictArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    pub out: PathBuf,
    pub explain: bool,
}

pub fn predict(args: &PredictArgs) -> CliResult<()> {
    let model = model_file::load(&args.model)?;
    let table = load_table(&args.data)?;
    let raw = prediction_matrix(&model, &table, &args.data)?;
    let mut predictions = Vec::with_capacity(raw.n());
    let mut explanations = args.explain.then(|| Vec::with_capacity(raw.n()));
    for i in 0..raw.n() {
        predictions.push(model.predict(raw.row(i))?);
        if let Some(expl) = explanations.as_mut() {
            let explanation = model.explain(raw.row(i))?;
            let text = if explanation.activated.is_empty() {
                "no rule satisfied".to_string()
            } else {
                explanation
                    .activated
                    .iter()
                    .map(|a| a.label.clone())
                    .collect::<Vec<_>>()
                    .join("|")
            };
            expl.push(text);
        }
    }
    table::write_predictions(&args.out, &predictions, explanations.as_deref())?;
    info!("wrote {} predictions to {}", predictions.len(), args.out.display());
    Ok(())
}

pub struct EvalArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    pub target: String,
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let model = model_file::load(&args.model)?;
    let table = load_table(&args.data)?;
    let raw = prediction_matrix(&model, &table, &args.data)?;
    let y = table.numeric_column(&args.target)?;
    let predictions: CliResult<Vec<f64>> = (0..raw.n())
        .map(|i| model.predict(raw.row(i)).map_err(CliError::from))
        .collect();
    let predictions = predictions?;
    let mse = empirical_risk(&predictions, &y)?;
    let nmse = experiment::nmse(&predictions, &y)?;
    println!("mse={mse}");
    println!("nmse={nmse}");
    println!("n={}", y.len());
    Ok(())
}

pub struct ExperimentArgs {
    pub kind: ExperimentKind,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub p: Option<usize>,
    pub noise_sd: Option<f64>,
    pub seed: u64,
    pub train_fraction: f64,
    pub outdir: PathBuf,
    pub params: MiningParams,
}

pub fn experiment(args: &ExperimentArgs) -> CliResult<()> {
    let mut config = match args.kind {
        ExperimentKind::Circle => ExperimentConfig::circle(),
        ExperimentKind::Linear => ExperimentConfig::linear(),
    };
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(d) = args.d {
        config.d = d;
    }
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(noise_sd) = args.noise_sd {
        config.noise_sd = noise_sd;
    }
    config.seed = args.seed;
    config.train_fraction = args.train_fraction;
    if config.kind == ExperimentKind::Linear && config.p == 0 {
        warn!("p = 0: the target carries no signal; expect a near-constant model");
    }

    let start = std::time::Instant::now();
    let report = experiment::run(&config, &args.params)?;
    info!("experiment completed in {:.2?}", start.elapsed());

    std::fs::create_dir_all(&args.outdir)?;
    let fmt_opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let informative = report
        .informative
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("|");
    let metrics: Vec<(&str, String)> = vec![
        ("kind", match config.kind {
            ExperimentKind::Circle => "circle".to_string(),
            ExperimentKind::Linear => "linear".to_string(),
        }),
        ("n", config.n.to_string()),
        ("d", config.d.to_string()),
        ("p", config.p.to_string()),
        ("noise_sd", config.noise_sd.to_string()),
        ("seed", config.seed.to_string()),
        ("train_fraction", config.train_fraction.to_string()),
        ("train_n", report.train_n.to_string()),
        ("test_n", report.test_n.to_string()),
        ("n_rules", report.model.rules().len().to_string()),
        ("train_mse", report.train_mse.to_string()),
        ("train_nmse", report.train_nmse.to_string()),
        ("test_mse", report.test_mse.to_string()),
        ("test_nmse", report.test_nmse.to_string()),
        ("informative_features", informative),
        (
            "condition_informative_fraction",
            fmt_opt(report.condition_informative_fraction),
        ),
        (
            "rules_only_informative_fraction",
            fmt_opt(report.rules_only_informative_fraction),
        ),
    ];
    table::write_kv_csv(&args.outdir.join("metrics.csv"), &metrics)?;
    table::write_rules_csv(&args.outdir.join("rules.csv"), &report.summary)?;
    if let Some(grid) = &report.grid {
        table::write_grid_csv(&args.outdir.join("grid.csv"), grid)?;
    }

    print!("{}", render_summary(&report.summary));
    println!("train nmse = {:.4}   test nmse = {:.4}", report.train_nmse, report.test_nmse);
    if let Some(frac) = report.condition_informative_fraction {
        println!("conditions on informative features: {:.1}%", frac * 100.0);
    }
    println!("outputs in {}", args.outdir.display());
    Ok(())
}

/// Renders the model summary as an aligned text table.
pub fn render_summary(summary: &ModelSummary) -> String {
    let mut out = String::new();
    let headers = ["Rule", "Conditions", "Coverage", "Prediction", "Z", "MSE"];
    let rows: Vec<[String; 6]> = summary
        .rows
        .iter()
        .chain(summary.no_rule_row.iter())
        .map(|r| {
            [
                r.label.clone(),
                r.conditions.clone(),
                format!("{:.2}", r.coverage),
                format!("{:.2}", r.prediction),
                format!("{:.2}", r.z),
                format!("{:.2}", r.cumulative_mse),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&line(&headers.map(str::to_string)));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    if rows.is_empty() {
        out.push_str("(no rules; the model predicts the global mean)\n");
    }
    out.push_str(&format!(
        "global mean = {:.4}   training mse = {:.4}\n",
        summary.global_mean, summary.training_risk
    ));
    if !summary.occurrences.is_empty() {
        let occ = summary
            .occurrences
            .iter()
            .map(|(name, count)| format!("{name}: {count}"))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("variable occurrences: {occ}\n"));
    }
    out
}

fn render_variance_audit(model: &RuleModel, dataset: &Dataset) -> CliResult<String> {
    let audit = model.variance_audit(dataset)?;
    let mut out = String::from("variance audit (post-selection):\n");
    for entry in audit {
        out.push_str(&format!(
            "  {}  deviation = {:.4}  z = {:.4}  {}\n",
            entry.label,
            entry.deviation,
            entry.z,
            if entry.pass { "pass" } else { "VIOLATION" }
        ));
    }
    Ok(out)
}
