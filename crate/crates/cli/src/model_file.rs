//! The versioned on-disk model format: pretty JSON so the selected rules
//! can be read and diffed with standard tools. Loading validates structure
//! and rejects unknown format versions.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use ripe_core::{
    BitVec, CellStat, CellTable, Discretizer, EmptyCellPolicy, FeatureBins, Interval, MinedRule,
    MiningParams, Rule, RuleModel, RuleStats, SignificanceSpec, TrainingMeta, ZKind,
};
use std::collections::BTreeMap;

use crate::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    params: ParamsDto,
    discretizer: DiscretizerDto,
    rules: Vec<RuleDto>,
    cells: Vec<CellDto>,
    global_mean: f64,
    meta: MetaDto,
}

#[derive(Serialize, Deserialize)]
struct ParamsDto {
    m_n: u16,
    alpha: f64,
    z: String,
    beam_width: usize,
    max_complexity: Option<usize>,
    empty_cell: String,
}

#[derive(Serialize, Deserialize)]
struct DiscretizerDto {
    m_n: u16,
    features: Vec<BinsDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BinsDto {
    Edges { points: Vec<f64> },
    Values { points: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct RuleDto {
    label: String,
    conditions: Vec<ConditionDto>,
    n_activated: usize,
    coverage: f64,
    mu: f64,
    z: f64,
    single_rule_risk: f64,
    /// Training activations as a '0'/'1' string, row 0 first.
    activation_bits: String,
}

#[derive(Serialize, Deserialize)]
struct ConditionDto {
    feature: usize,
    low: u16,
    high: u16,
}

#[derive(Serialize, Deserialize)]
struct CellDto {
    /// Rule activations as a '0'/'1' string, rule 0 first.
    signature: String,
    count: usize,
    mean: f64,
}

#[derive(Serialize, Deserialize)]
struct MetaDto {
    n: usize,
    d: usize,
    feature_names: Vec<String>,
    global_risk: f64,
    y_min: f64,
    y_max: f64,
    y_sq_sum: f64,
}

fn z_kind_name(kind: ZKind) -> &'static str {
    match kind {
        ZKind::Hoeffding => "hoeffding",
        ZKind::Bernstein => "bernstein",
        ZKind::Variance => "variance",
    }
}

fn z_kind_from_name(name: &str) -> CliResult<ZKind> {
    match name {
        "hoeffding" => Ok(ZKind::Hoeffding),
        "bernstein" => Ok(ZKind::Bernstein),
        other => Err(CliError::Input(format!(
            "unknown significance kind '{other}' in model file"
        ))),
    }
}

fn to_dto(model: &RuleModel) -> ModelFile {
    let params = model.params();
    ModelFile {
        format_version: FORMAT_VERSION,
        params: ParamsDto {
            m_n: params.m_n,
            alpha: params.significance.alpha(),
            z: z_kind_name(params.significance.kind()).to_string(),
            beam_width: params.beam_width,
            max_complexity: params.max_complexity,
            empty_cell: match model.empty_cell_policy() {
                EmptyCellPolicy::Zero => "zero".to_string(),
                EmptyCellPolicy::GlobalMean => "global_mean".to_string(),
            },
        },
        discretizer: DiscretizerDto {
            m_n: model.discretizer().m_n(),
            features: model
                .discretizer()
                .bins()
                .iter()
                .map(|bins| match bins {
                    FeatureBins::Edges(points) => BinsDto::Edges {
                        points: points.clone(),
                    },
                    FeatureBins::Values(points) => BinsDto::Values {
                        points: points.clone(),
                    },
                })
                .collect(),
        },
        rules: model
            .rules()
            .iter()
            .map(|m| RuleDto {
                label: m.rule.label().to_string(),
                conditions: m
                    .rule
                    .conditions()
                    .iter()
                    .map(|(k, iv)| ConditionDto {
                        feature: *k,
                        low: iv.low(),
                        high: iv.high(),
                    })
                    .collect(),
                n_activated: m.stats.n_activated,
                coverage: m.stats.coverage,
                mu: m.stats.mu,
                z: m.stats.z_value,
                single_rule_risk: m.stats.single_rule_risk,
                activation_bits: m.stats.activation_bits.to_bitstring(),
            })
            .collect(),
        cells: model
            .cell_table()
            .iter()
            .map(|(sig, cell)| CellDto {
                signature: sig.to_bitstring(),
                count: cell.count,
                mean: cell.mean,
            })
            .collect(),
        global_mean: model.global_mean(),
        meta: MetaDto {
            n: model.meta().n,
            d: model.meta().d,
            feature_names: model.meta().feature_names.clone(),
            global_risk: model.meta().global_risk,
            y_min: model.meta().y_min,
            y_max: model.meta().y_max,
            y_sq_sum: model.meta().y_sq_sum,
        },
    }
}

fn from_dto(file: ModelFile) -> CliResult<RuleModel> {
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::Input(format!(
            "unsupported model format_version {}, expected {FORMAT_VERSION}",
            file.format_version
        )));
    }
    let significance = SignificanceSpec::new(z_kind_from_name(&file.params.z)?, file.params.alpha)?;
    let params = MiningParams {
        m_n: file.params.m_n,
        significance,
        beam_width: file.params.beam_width,
        max_complexity: file.params.max_complexity,
    };
    let empty_cell = match file.params.empty_cell.as_str() {
        "zero" => EmptyCellPolicy::Zero,
        "global_mean" => EmptyCellPolicy::GlobalMean,
        other => {
            return Err(CliError::Input(format!(
                "unknown empty_cell policy '{other}' in model file"
            )))
        }
    };
    let discretizer = Discretizer::from_parts(
        file.discretizer.m_n,
        file.discretizer
            .features
            .into_iter()
            .map(|bins| match bins {
                BinsDto::Edges { points } => FeatureBins::Edges(points),
                BinsDto::Values { points } => FeatureBins::Values(points),
            })
            .collect(),
    )?;

    let parse_bits = |s: &str, what: &str| -> CliResult<BitVec> {
        BitVec::from_bitstring(s)
            .ok_or_else(|| CliError::Input(format!("invalid {what} bitstring in model file")))
    };

    let mut rules = Vec::with_capacity(file.rules.len());
    for dto in file.rules {
        let mut conditions = BTreeMap::new();
        for c in &dto.conditions {
            if c.low > c.high {
                return Err(CliError::Input(format!(
                    "condition on feature {} has low {} > high {}",
                    c.feature, c.low, c.high
                )));
            }
            if conditions
                .insert(c.feature, Interval::new(c.low, c.high))
                .is_some()
            {
                return Err(CliError::Input(format!(
                    "duplicate condition on feature {}",
                    c.feature
                )));
            }
        }
        let mut rule = Rule::new(conditions);
        rule.set_label(dto.label);
        let stats = RuleStats {
            activation_bits: parse_bits(&dto.activation_bits, "rule activation")?,
            n_activated: dto.n_activated,
            coverage: dto.coverage,
            mu: dto.mu,
            z_value: dto.z,
            single_rule_risk: dto.single_rule_risk,
        };
        rules.push(MinedRule { rule, stats });
    }

    let mut entries = Vec::with_capacity(file.cells.len());
    for cell in file.cells {
        entries.push((
            parse_bits(&cell.signature, "cell signature")?,
            CellStat {
                count: cell.count,
                mean: cell.mean,
            },
        ));
    }
    let cell_table = CellTable::from_entries(entries)?;

    let meta = TrainingMeta {
        n: file.meta.n,
        d: file.meta.d,
        feature_names: file.meta.feature_names,
        global_risk: file.meta.global_risk,
        y_min: file.meta.y_min,
        y_max: file.meta.y_max,
        y_sq_sum: file.meta.y_sq_sum,
    };

    Ok(RuleModel::from_parts(
        discretizer,
        rules,
        cell_table,
        file.global_mean,
        params,
        meta,
        empty_cell,
    )?)
}

pub fn save(model: &RuleModel, path: &Path) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, &to_dto(model))?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> CliResult<RuleModel> {
    let file = File::open(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let dto: ModelFile = serde_json::from_reader(BufReader::new(file))?;
    from_dto(dto)
}
