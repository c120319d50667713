//! Named experiment presets.
//!
//! Each preset expands to one or more fully resolved configurations
//! (series), ready to run and export. Series with static randomness carry
//! a default sample count of 128; deterministic series run once.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, TAU};

use crate::config::{ExperimentConfig, SamplerSpec, SqueezePattern};
use crate::error::{Error, Result};

/// Default ensemble size for disordered series.
pub const DEFAULT_SAMPLES: usize = 128;

/// One series: a resolved configuration plus how many disorder samples to
/// average over.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub config: ExperimentConfig,
    pub samples: usize,
}

/// A full experiment: every series of one preset.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub preset: String,
    pub series: Vec<RunSpec>,
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

fn spec(name: &str, config: ExperimentConfig, samples: usize) -> RunSpec {
    RunSpec {
        name: name.to_string(),
        config,
        samples,
    }
}

/// Expand a preset name into its run plan.
pub fn preset(name: &str) -> Result<RunPlan> {
    let base = ExperimentConfig::default();
    let alternating = SqueezePattern::Alternating { r: 0.5 };
    let series = match name {
        // Transmission-angle sweep over vacuum inputs: correlations drain
        // into the environment at an angle-dependent rate.
        "fig2" => {
            let angles = [
                ("eta_pi4", FRAC_PI_4),
                ("eta_pi3", FRAC_PI_3),
                ("eta_2pi5", 2.0 * PI / 5.0),
                ("eta_9pi20", 9.0 * PI / 20.0),
            ];
            angles
                .into_iter()
                .map(|(name, eta)| {
                    spec(
                        name,
                        ExperimentConfig {
                            eta,
                            ..base.clone()
                        },
                        1,
                    )
                })
                .collect()
        }
        // Input-state comparison at fixed angle: only perpendicular
        // squeeze directions scramble.
        "fig3" => vec![
            spec("vacuum", base.clone(), 1),
            spec(
                "uniform_r05",
                ExperimentConfig {
                    pattern: SqueezePattern::Uniform { r: 0.5, phi: 0.0 },
                    ..base.clone()
                },
                1,
            ),
            spec(
                "alternating_r05",
                ExperimentConfig {
                    pattern: alternating,
                    ..base.clone()
                },
                1,
            ),
        ],
        // Static memory phase, with and without random environment
        // phases: disorder traps information in the memory.
        "fig4" => {
            let plain = ExperimentConfig {
                pattern: alternating,
                ..base.clone()
            };
            let disordered = ExperimentConfig {
                env_disorder: SamplerSpec::uniform(0.0, TAU),
                ..plain.clone()
            };
            vec![
                spec("delta_0", plain.clone(), 1),
                spec(
                    "delta_pi2",
                    ExperimentConfig {
                        memory_disorder: FRAC_PI_2,
                        ..plain
                    },
                    1,
                ),
                spec("delta_0_envdis", disordered.clone(), DEFAULT_SAMPLES),
                spec(
                    "delta_pi2_envdis",
                    ExperimentConfig {
                        memory_disorder: FRAC_PI_2,
                        ..disordered
                    },
                    DEFAULT_SAMPLES,
                ),
            ]
        }
        // Random static offsets on every coupler angle. The base angle
        // leaves room for the largest offset range inside [0, pi/2].
        "fig5" => {
            let plain = ExperimentConfig {
                eta: 2.0 * PI / 5.0,
                pattern: alternating,
                ..base.clone()
            };
            vec![
                spec("perfect", plain.clone(), 1),
                spec(
                    "small_imperfection",
                    ExperimentConfig {
                        imperfection: SamplerSpec::uniform(0.0, PI / 100.0),
                        ..plain.clone()
                    },
                    DEFAULT_SAMPLES,
                ),
                spec(
                    "large_imperfection",
                    ExperimentConfig {
                        imperfection: SamplerSpec::uniform(0.0, PI / 10.0),
                        ..plain
                    },
                    DEFAULT_SAMPLES,
                ),
            ]
        }
        // Six-mode memory with a static memory phase, tracking how the
        // stored correlations spread over the individual modes.
        "fig6" => vec![spec(
            "memory6",
            ExperimentConfig {
                n_memory: 6,
                pattern: alternating,
                memory_disorder: FRAC_PI_2,
                per_mode_bmi: true,
                ..base
            },
            1,
        )],
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}', expected one of: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(RunPlan {
        preset: name.to_string(),
        series,
    })
}
