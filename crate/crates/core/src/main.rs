//! Command-line frontend: expand a preset or load a config, run every
//! series, and write plot-ready tables plus a reproducibility sidecar.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use collision_sim::error::Error;
use collision_sim::export::{export_plan, load_config_toml, load_metadata, run_plan, OutputFormat};
use collision_sim::presets::{preset, RunPlan, RunSpec, PRESET_NAMES};

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "COLLISION_SIM_OUT";

#[derive(Parser)]
#[command(
    name = "collision-sim",
    version,
    about = "Collision-model interferometer simulator: propagates Gaussian \
             covariance matrices through a growing beamsplitter network and \
             exports mutual-information series."
)]
struct Cli {
    /// Named experiment preset: fig2, fig3, fig4, fig5 or fig6.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// A TOML run configuration, or a metadata sidecar (.json) written by
    /// a previous run to reproduce it exactly.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one configuration key on every series, e.g. --set eta=0.9
    /// or --set pattern=alternating:0.5. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Disorder samples per series (default: per preset).
    #[arg(long)]
    samples: Option<usize>,

    /// Random seed shared by every series.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of collision steps.
    #[arg(long)]
    steps: Option<usize>,

    /// Table format for the series files.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,

    /// Output directory (default: $COLLISION_SIM_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Order of couplings within one step: eq1 applies the memory pair
    /// last, eq7 first.
    #[arg(long = "segment-order", value_parser = ["eq1", "eq7"])]
    segment_order: Option<String>,

    /// Squeeze-parameter convention for the initial entangled pair.
    #[arg(long = "tmsv-convention", value_parser = ["appendix", "charfn"])]
    tmsv_convention: Option<String>,
}

fn build_plan(cli: &Cli) -> Result<RunPlan, Error> {
    let mut plan = match (&cli.preset, &cli.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            if path.extension().is_some_and(|e| e == "json") {
                load_metadata(path)?
            } else {
                let config = load_config_toml(path)?;
                RunPlan {
                    preset: "custom".to_string(),
                    series: vec![RunSpec {
                        name: "run".to_string(),
                        config,
                        samples: 1,
                    }],
                }
            }
        }
        _ => {
            return Err(Error::Config(format!(
                "pick one of --preset ({}) or --config <path>",
                PRESET_NAMES.join(", ")
            )))
        }
    };

    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(steps) = cli.steps {
        overrides.push(("steps".into(), steps.to_string()));
    }
    if let Some(order) = &cli.segment_order {
        overrides.push(("segment_order".into(), order.clone()));
    }
    if let Some(convention) = &cli.tmsv_convention {
        overrides.push(("tmsv_convention".into(), convention.clone()));
    }
    for entry in &cli.set {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Error::Config(format!("override '{entry}' is not of the form key=value"))
        })?;
        overrides.push((key.trim().to_string(), value.trim().to_string()));
    }

    for series in &mut plan.series {
        for (key, value) in &overrides {
            series.config.apply_override(key, value)?;
        }
        if let Some(samples) = cli.samples {
            series.samples = samples;
        }
        if series.samples == 0 {
            return Err(Error::Config("--samples must be at least 1".into()));
        }
        series.config.validate()?;
    }
    Ok(plan)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| {
        std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
    })
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Unphysical { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, Error> {
    let format = OutputFormat::from_name(&cli.format)?;
    let plan = build_plan(cli)?;
    let results = run_plan(&plan)?;
    export_plan(&plan, &results, &out_dir(cli), format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}
