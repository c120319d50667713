//! Run configuration: physics parameters, disorder samplers, run controls.
//!
//! A config describes exactly one simulation run. Ensemble sampling and
//! output handling sit on top of it; everything here is serializable so a
//! run can be reproduced from its recorded metadata alone.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{SqueezeSpec, TmsvConvention};
use crate::interferometer::SegmentOrder;

/// Default coupler angle, 9 pi / 20: a weakly transmitting coupler.
pub fn default_eta() -> f64 {
    9.0 * std::f64::consts::PI / 20.0
}

/// Squeezing rule for the memory-2 and environment input modes.
///
/// `Alternating` squeezes every input with the same amplitude but flips the
/// direction with the parity of the one-based register position: odd
/// positions along x (phi = 0), even positions along p (phi = pi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SqueezePattern {
    #[default]
    Vacuum,
    Uniform {
        r: f64,
        #[serde(default)]
        phi: f64,
    },
    Alternating {
        r: f64,
    },
}

impl SqueezePattern {
    /// Input squeezing for the mode at a zero-based register index.
    pub fn spec_for_index(&self, index: usize) -> SqueezeSpec {
        match *self {
            SqueezePattern::Vacuum => SqueezeSpec::vacuum(),
            SqueezePattern::Uniform { r, phi } => {
                SqueezeSpec::new(r, phi).expect("validated at config load")
            }
            SqueezePattern::Alternating { r } => {
                let position = index + 1;
                let phi = if position % 2 == 1 {
                    0.0
                } else {
                    std::f64::consts::PI
                };
                SqueezeSpec::new(r, phi).expect("validated at config load")
            }
        }
    }

    /// Common squeeze amplitude shared by every input mode.
    pub fn amplitude(&self) -> f64 {
        match *self {
            SqueezePattern::Vacuum => 0.0,
            SqueezePattern::Uniform { r, .. } | SqueezePattern::Alternating { r } => r,
        }
    }

    fn validate(&self) -> Result<()> {
        let r = self.amplitude();
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Config(format!(
                "squeeze amplitude must be finite and nonnegative, got {r}"
            )));
        }
        if let SqueezePattern::Uniform { phi, .. } = self {
            if !phi.is_finite() {
                return Err(Error::Config(format!(
                    "squeeze direction must be finite, got {phi}"
                )));
            }
        }
        Ok(())
    }
}

/// Distribution for a static random quantity, drawn once per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    #[default]
    None,
    Uniform {
        low: f64,
        high: f64,
    },
}

impl SamplerSpec {
    pub fn uniform(low: f64, high: f64) -> Self {
        SamplerSpec::Uniform { low, high }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, SamplerSpec::None)
    }

    /// Draw one value; the inactive sampler returns 0 without consuming
    /// randomness, so toggling it never shifts other draws.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            SamplerSpec::None => 0.0,
            SamplerSpec::Uniform { low, high } => {
                if high > low {
                    rng.gen_range(low..high)
                } else {
                    low
                }
            }
        }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            SamplerSpec::None => None,
            SamplerSpec::Uniform { low, high } => Some((low, high)),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if let SamplerSpec::Uniform { low, high } = self {
            if !low.is_finite() || !high.is_finite() || low > high {
                return Err(Error::Config(format!(
                    "{what} sampler needs finite low <= high, got [{low}, {high}]"
                )));
            }
        }
        Ok(())
    }
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Two-mode squeezing between system and first memory mode.
    pub xi: f64,
    /// Coupler angle shared by every collision.
    pub eta: f64,
    /// Memory size: the first memory mode plus n_memory - 1 partner modes.
    pub n_memory: usize,
    /// Number of collision steps.
    pub steps: usize,
    /// Input squeezing of memory-2 and environment modes.
    pub pattern: SqueezePattern,
    /// Static phase on the memory-side coupler, applied every step.
    pub memory_disorder: f64,
    /// Static phase per environment mode, drawn at mode creation.
    pub env_disorder: SamplerSpec,
    /// Static coupler-angle offset per chain site, drawn once per run.
    pub imperfection: SamplerSpec,
    /// Application order of the pair collisions within one step.
    pub segment_order: SegmentOrder,
    /// Scaling convention for xi.
    pub tmsv_convention: TmsvConvention,
    /// Base seed; sample index selects an independent child stream.
    pub seed: u64,
    /// Also record the information each single memory mode holds about the
    /// system.
    pub per_mode_bmi: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            xi: 1.0,
            eta: default_eta(),
            n_memory: 2,
            steps: 100,
            pattern: SqueezePattern::Vacuum,
            memory_disorder: 0.0,
            env_disorder: SamplerSpec::None,
            imperfection: SamplerSpec::None,
            segment_order: SegmentOrder::MemoryLast,
            tmsv_convention: TmsvConvention::Appendix,
            seed: 42,
            per_mode_bmi: false,
        }
    }
}

impl ExperimentConfig {
    /// Two-mode squeezing parameter after applying the convention flag.
    pub fn effective_xi(&self) -> f64 {
        self.tmsv_convention.effective_xi(self.xi)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.xi.is_finite() || self.xi < 0.0 {
            return Err(Error::Config(format!(
                "xi must be finite and nonnegative, got {}",
                self.xi
            )));
        }
        if !self.eta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.eta) {
            return Err(Error::Config(format!(
                "eta must lie in [0, pi/2], got {}",
                self.eta
            )));
        }
        if self.n_memory < 2 {
            return Err(Error::Config(format!(
                "memory needs at least two modes, got {}",
                self.n_memory
            )));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if !self.memory_disorder.is_finite() {
            return Err(Error::Config(format!(
                "memory disorder phase must be finite, got {}",
                self.memory_disorder
            )));
        }
        self.pattern.validate()?;
        self.env_disorder.validate("environment disorder")?;
        self.imperfection.validate("imperfection")?;
        if let Some((low, high)) = self.imperfection.bounds() {
            if low < 0.0 || self.eta + high > std::f64::consts::FRAC_PI_2 + 1e-12 {
                return Err(Error::Config(format!(
                    "imperfection range [{low}, {high}] must keep eta + offset within [0, pi/2]"
                )));
            }
        }
        Ok(())
    }

    /// Apply one `key=value` override from the command line.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse_f64(key: &str, value: &str) -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key} expects a number, got {value:?}")))
        }
        fn parse_usize(key: &str, value: &str) -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{key} expects an integer, got {value:?}")))
        }

        match key {
            "xi" => self.xi = parse_f64(key, value)?,
            "eta" => self.eta = parse_f64(key, value)?,
            "n_memory" => self.n_memory = parse_usize(key, value)?,
            "steps" => self.steps = parse_usize(key, value)?,
            "seed" => {
                self.seed = value
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("seed expects an integer, got {value:?}")))?
            }
            "memory_disorder" => self.memory_disorder = parse_f64(key, value)?,
            "per_mode_bmi" => {
                self.per_mode_bmi = value.parse::<bool>().map_err(|_| {
                    Error::Config(format!("per_mode_bmi expects true/false, got {value:?}"))
                })?
            }
            "pattern" => self.pattern = parse_pattern(value)?,
            "env_disorder" => self.env_disorder = parse_sampler("env_disorder", value)?,
            "imperfection" => self.imperfection = parse_sampler("imperfection", value)?,
            "segment_order" => self.segment_order = SegmentOrder::from_wire_name(value)?,
            "tmsv_convention" => {
                self.tmsv_convention = match value {
                    "appendix" => TmsvConvention::Appendix,
                    "charfn" => TmsvConvention::CharFn,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown tmsv convention {other:?}, expected \"appendix\" or \"charfn\""
                        )))
                    }
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown config key {other:?} in override"
                )))
            }
        }
        Ok(())
    }
}

/// Parse `vacuum`, `uniform:R[:PHI]`, or `alternating:R`.
fn parse_pattern(value: &str) -> Result<SqueezePattern> {
    let parts: Vec<&str> = value.split(':').collect();
    let bad = || Error::Config(format!("unknown squeeze pattern {value:?}"));
    match parts.as_slice() {
        ["vacuum"] => Ok(SqueezePattern::Vacuum),
        ["uniform", r] => Ok(SqueezePattern::Uniform {
            r: r.parse().map_err(|_| bad())?,
            phi: 0.0,
        }),
        ["uniform", r, phi] => Ok(SqueezePattern::Uniform {
            r: r.parse().map_err(|_| bad())?,
            phi: phi.parse().map_err(|_| bad())?,
        }),
        ["alternating", r] => Ok(SqueezePattern::Alternating {
            r: r.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// Parse `none` or `uniform:LOW:HIGH`.
fn parse_sampler(key: &str, value: &str) -> Result<SamplerSpec> {
    let parts: Vec<&str> = value.split(':').collect();
    let bad = || {
        Error::Config(format!(
            "{key} expects none or uniform:LOW:HIGH, got {value:?}"
        ))
    };
    match parts.as_slice() {
        ["none"] => Ok(SamplerSpec::None),
        ["uniform", low, high] => Ok(SamplerSpec::Uniform {
            low: low.parse().map_err(|_| bad())?,
            high: high.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}
