//! Run plans end to end and write plot-ready tables.
//!
//! Every series becomes one table (CSV or JSON) with a stable column
//! schema, plus one metadata sidecar per plan holding the fully resolved
//! configurations. Re-running from the sidecar reproduces the tables
//! bitwise, because configs resolve to the same seeds and draws.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::ensemble::{ensemble, EnsembleStats};
use crate::error::{Error, Result};
use crate::measures::InfoRecord;
use crate::presets::{RunPlan, RunSpec};

/// Version stamp of the export schema, recorded in every artifact.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Finished series: the plan entry plus its aggregated measures.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub spec: RunSpec,
    pub stats: EnsembleStats,
}

/// Run every series of a plan.
pub fn run_plan(plan: &RunPlan) -> Result<Vec<SeriesResult>> {
    if plan.series.is_empty() {
        return Err(Error::Config(format!(
            "plan '{}' holds no series to run",
            plan.preset
        )));
    }
    plan.series
        .iter()
        .map(|spec| {
            let stats = ensemble(&spec.config, spec.samples)?;
            Ok(SeriesResult {
                spec: spec.clone(),
                stats,
            })
        })
        .collect()
}

/// Labels of the memory modes in register order.
fn memory_labels(n_memory: usize) -> Vec<String> {
    let mut labels = vec!["m1".to_string()];
    labels.extend((1..n_memory).map(|j| format!("m2_{j}")));
    labels
}

/// Column names of one series table. Per-mode columns appear when the
/// records carry them; spread columns when more than one sample went in.
pub fn series_columns(result: &SeriesResult) -> Vec<String> {
    let mut columns = vec![
        "step".to_string(),
        "i2_s_m1".to_string(),
        "i2_s_m2".to_string(),
        "i2_s_m".to_string(),
        "i3".to_string(),
    ];
    let per_mode = result
        .stats
        .mean
        .records
        .first()
        .is_some_and(|r| r.per_mode.is_some());
    if per_mode {
        for label in memory_labels(result.stats.mean.n_memory) {
            columns.push(format!("bmi_mode_{label}"));
        }
    }
    if result.stats.n_samples > 1 {
        let base: Vec<String> = columns[1..].to_vec();
        columns.extend(base.into_iter().map(|c| format!("{c}_std")));
    }
    columns
}

fn record_values(record: &InfoRecord) -> Vec<f64> {
    let mut values = vec![record.i2_s_m1, record.i2_s_m2, record.i2_s_m, record.i3];
    if let Some(per_mode) = &record.per_mode {
        values.extend(per_mode.iter().copied());
    }
    values
}

/// Numeric rows of one series table, matching `series_columns` minus the
/// leading step column.
fn table_rows(result: &SeriesResult) -> Vec<(usize, Vec<f64>)> {
    let with_std = result.stats.n_samples > 1;
    result
        .stats
        .mean
        .records
        .iter()
        .zip(&result.stats.std.records)
        .map(|(mean, std)| {
            let mut values = record_values(mean);
            if with_std {
                values.extend(record_values(std));
            }
            (mean.step, values)
        })
        .collect()
}

/// Render one series as CSV text.
pub fn render_csv(result: &SeriesResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", series_columns(result).join(","));
    for (step, values) in table_rows(result) {
        let _ = write!(out, "{step}");
        for v in values {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out);
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonTable {
    schema_version: u32,
    series: String,
    samples: usize,
    columns: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
}

/// Render one series as a JSON table.
pub fn render_json(result: &SeriesResult) -> Result<String> {
    let rows = table_rows(result)
        .into_iter()
        .map(|(step, values)| {
            let mut row = vec![serde_json::json!(step)];
            row.extend(values.into_iter().map(|v| serde_json::json!(v)));
            row
        })
        .collect();
    let table = JsonTable {
        schema_version: SCHEMA_VERSION,
        series: result.spec.name.clone(),
        samples: result.stats.n_samples,
        columns: series_columns(result),
        rows,
    };
    serde_json::to_string_pretty(&table)
        .map_err(|e| Error::Config(format!("series serialization failed: {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
struct MetadataSeries {
    name: String,
    samples: usize,
    config: ExperimentConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct Metadata {
    tool: String,
    version: String,
    schema_version: u32,
    preset: String,
    series: Vec<MetadataSeries>,
}

/// Sidecar document with everything needed to reproduce a plan.
pub fn metadata_json(plan: &RunPlan) -> Result<String> {
    let doc = Metadata {
        tool: "collision-sim".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION,
        preset: plan.preset.clone(),
        series: plan
            .series
            .iter()
            .map(|s| MetadataSeries {
                name: s.name.clone(),
                samples: s.samples,
                config: s.config.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Config(format!("metadata serialization failed: {e}")))
}

/// Rebuild a run plan from a metadata sidecar.
pub fn load_metadata(path: &Path) -> Result<RunPlan> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: Metadata = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let series = doc
        .series
        .into_iter()
        .map(|s| {
            s.config.validate()?;
            Ok(RunSpec {
                name: s.name,
                config: s.config,
                samples: s.samples,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RunPlan {
        preset: doc.preset,
        series,
    })
}

/// Load a single-run configuration from a TOML file.
pub fn load_config_toml(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write every series table plus the metadata sidecar into `out_dir`.
/// Returns the written paths, sidecar last.
pub fn export_plan(
    plan: &RunPlan,
    results: &[SeriesResult],
    out_dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::Config("nothing to export".into()));
    }
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for result in results {
        let file = out_dir.join(format!(
            "{}_{}.{}",
            plan.preset,
            result.spec.name,
            format.extension()
        ));
        let content = match format {
            OutputFormat::Csv => render_csv(result),
            OutputFormat::Json => render_json(result)?,
        };
        write_file(&file, &content)?;
        written.push(file);
    }
    let sidecar = out_dir.join(format!("{}_metadata.json", plan.preset));
    write_file(&sidecar, &metadata_json(plan)?)?;
    written.push(sidecar);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    fn tiny_plan() -> RunPlan {
        let mut plan = preset("fig3").unwrap();
        plan.series.truncate(2);
        for s in &mut plan.series {
            s.config.steps = 3;
        }
        plan
    }

    fn tiny_results(plan: &RunPlan) -> Vec<SeriesResult> {
        run_plan(plan).unwrap()
    }

    #[test]
    fn base_columns_are_fixed() {
        let plan = tiny_plan();
        let results = tiny_results(&plan);
        assert_eq!(
            series_columns(&results[0]),
            ["step", "i2_s_m1", "i2_s_m2", "i2_s_m", "i3"]
        );
    }

    #[test]
    fn per_mode_and_spread_columns_extend_the_schema() {
        let mut plan = preset("fig6").unwrap();
        plan.series[0].config.steps = 2;
        plan.series[0].config.n_memory = 3;
        plan.series[0].samples = 2;
        plan.series[0].config.env_disorder =
            crate::config::SamplerSpec::uniform(0.0, std::f64::consts::TAU);
        let results = run_plan(&plan).unwrap();
        let columns = series_columns(&results[0]);
        assert_eq!(
            columns,
            [
                "step",
                "i2_s_m1",
                "i2_s_m2",
                "i2_s_m",
                "i3",
                "bmi_mode_m1",
                "bmi_mode_m2_1",
                "bmi_mode_m2_2",
                "i2_s_m1_std",
                "i2_s_m2_std",
                "i2_s_m_std",
                "i3_std",
                "bmi_mode_m1_std",
                "bmi_mode_m2_1_std",
                "bmi_mode_m2_2_std",
            ]
        );
    }

    #[test]
    fn csv_values_round_trip_bitwise() {
        let plan = tiny_plan();
        let results = tiny_results(&plan);
        let csv = render_csv(&results[0]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 4);
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells[0], "1");
        let parsed: f64 = cells[1].parse().unwrap();
        assert_eq!(
            parsed.to_bits(),
            results[0].stats.mean.records[1].i2_s_m1.to_bits()
        );
    }

    #[test]
    fn json_table_is_consistent_with_the_schema() {
        let plan = tiny_plan();
        let results = tiny_results(&plan);
        let text = render_json(&results[1]).unwrap();
        let table: JsonTable = serde_json::from_str(&text).unwrap();
        assert_eq!(table.schema_version, SCHEMA_VERSION);
        assert_eq!(table.series, plan.series[1].name);
        assert_eq!(table.rows.len(), 4);
        for row in &table.rows {
            assert_eq!(row.len(), table.columns.len());
        }
    }

    #[test]
    fn export_writes_tables_and_sidecar_that_reload() {
        let plan = tiny_plan();
        let results = tiny_results(&plan);
        let dir = tempfile::tempdir().unwrap();
        let written = export_plan(&plan, &results, dir.path(), OutputFormat::Csv).unwrap();
        assert_eq!(written.len(), 3);
        assert!(written[0]
            .file_name()
            .unwrap()
            .to_str()
            .unwrap()
            .starts_with("fig3_"));
        let loaded = load_metadata(written.last().unwrap()).unwrap();
        assert_eq!(loaded, plan);

        let rerun = run_plan(&loaded).unwrap();
        let original = render_csv(&results[0]);
        let repeated = render_csv(&rerun[0]);
        assert_eq!(original, repeated);
    }

    #[test]
    fn empty_plans_refuse_to_run_or_export() {
        let empty = RunPlan {
            preset: "custom".into(),
            series: vec![],
        };
        assert!(matches!(run_plan(&empty), Err(Error::Config(_))));
        let dir = tempfile::tempdir().unwrap();
        assert!(export_plan(&empty, &[], dir.path(), OutputFormat::Csv).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn config_toml_round_trip_and_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        let config = ExperimentConfig {
            steps: 7,
            xi: 0.25,
            ..ExperimentConfig::default()
        };
        fs::write(&path, toml::to_string(&config).unwrap()).unwrap();
        let loaded = load_config_toml(&path).unwrap();
        assert_eq!(loaded, config);

        fs::write(&path, "steps = 0\n").unwrap();
        assert!(load_config_toml(&path).is_err());
        assert!(load_config_toml(&dir.path().join("absent.toml")).is_err());
    }

    #[test]
    fn malformed_metadata_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("meta.json");
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(load_metadata(&path), Err(Error::Config(_))));
    }

    #[test]
    fn format_names_resolve() {
        assert_eq!(OutputFormat::from_name("csv").unwrap(), OutputFormat::Csv);
        assert_eq!(OutputFormat::from_name("json").unwrap(), OutputFormat::Json);
        assert!(OutputFormat::from_name("yaml").is_err());
    }
}
