//! Mutual-information measures over register partitions.
//!
//! Bipartite mutual information I2(A:B) = S(A) + S(B) - S(AB) in nats is
//! nonnegative for physical states; tripartite information
//! I3 = I2(S:M1) + I2(S:M2) - I2(S:M) can take either sign, and a negative
//! value means the memory partitions only reveal the system jointly.

use serde::{Deserialize, Serialize};

use crate::engine::{ModeRegistry, SimulationTrace};
use crate::error::{Error, Result};
use crate::gaussian::{
    reduce, symplectic_spectrum_raw, tmsv_state, von_neumann_entropy, CovarianceState,
    TmsvConvention,
};

/// Negative mutual-information results larger than this are reported
/// as-is; anything within the band is numerical noise and clamps to zero.
pub const BMI_CLAMP_TOL: f64 = 1e-9;

/// Register partition into the named mode groups of the collision setup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub system: Vec<usize>,
    pub memory1: Vec<usize>,
    pub memory2: Vec<usize>,
    pub memory: Vec<usize>,
    pub environment: Vec<usize>,
}

impl Partition {
    pub fn from_registry(registry: &ModeRegistry) -> Self {
        Self {
            system: vec![registry.system_index()],
            memory1: vec![registry.m1_index()],
            memory2: registry.m2_indices(),
            memory: registry.memory_indices(),
            environment: registry.env_indices(),
        }
    }
}

fn check_groups(state: &CovarianceState, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidPartition(
            "mutual information needs two nonempty groups".into(),
        ));
    }
    for &m in a {
        if b.contains(&m) {
            return Err(Error::InvalidPartition(format!(
                "mode {m} appears on both sides"
            )));
        }
    }
    let n = state.n_modes();
    for &m in a.iter().chain(b) {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, len: n });
        }
    }
    Ok(())
}

/// Bipartite mutual information between two disjoint mode groups, in nats.
pub fn bmi(state: &CovarianceState, a: &[usize], b: &[usize]) -> Result<f64> {
    check_groups(state, a, b)?;
    let sa = von_neumann_entropy(&reduce(state, a)?)?;
    let sb = von_neumann_entropy(&reduce(state, b)?)?;
    let joint: Vec<usize> = a.iter().chain(b).copied().collect();
    let sab = von_neumann_entropy(&reduce(state, &joint)?)?;
    let value = sa + sb - sab;
    if (-BMI_CLAMP_TOL..0.0).contains(&value) {
        Ok(0.0)
    } else {
        Ok(value)
    }
}

/// Tripartite information of `s` against the split (m1, m2). Never clamped;
/// its sign is the scrambling diagnostic.
pub fn tmi(state: &CovarianceState, s: &[usize], m1: &[usize], m2: &[usize]) -> Result<f64> {
    let i_m1 = bmi(state, s, m1)?;
    let i_m2 = bmi(state, s, m2)?;
    let m: Vec<usize> = m1.iter().chain(m2).copied().collect();
    let i_m = bmi(state, s, &m)?;
    Ok(i_m1 + i_m2 - i_m)
}

/// Logarithmic negativity of the two-mode squeezed pair, as a closed-form
/// cross-check: the partial transpose of one half has smallest symplectic
/// value exp(-2 xi)/2, so the result is 2 xi in the default convention.
pub fn log_negativity_tmsv_check(xi: f64, convention: TmsvConvention) -> Result<f64> {
    let state = tmsv_state(convention.effective_xi(xi))?;
    let pt = state.partial_transpose(1)?;
    let min_nu = symplectic_spectrum_raw(&pt)
        .last()
        .copied()
        .expect("two-mode spectrum is nonempty");
    Ok((-(2.0 * min_nu).ln()).max(0.0))
}

/// Information measures of one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoRecord {
    pub step: usize,
    pub i2_s_m1: f64,
    pub i2_s_m2: f64,
    pub i2_s_m: f64,
    pub i3: f64,
    /// Mutual information of the system with each single memory mode, in
    /// register order (m1 first), when requested.
    pub per_mode: Option<Vec<f64>>,
}

/// Evaluate every measure on one state.
pub fn evaluate_step(
    state: &CovarianceState,
    registry: &ModeRegistry,
    per_mode: bool,
) -> Result<InfoRecord> {
    let partition = Partition::from_registry(registry);
    let i2_s_m1 = bmi(state, &partition.system, &partition.memory1)?;
    let i2_s_m2 = bmi(state, &partition.system, &partition.memory2)?;
    let i2_s_m = bmi(state, &partition.system, &partition.memory)?;
    let i3 = i2_s_m1 + i2_s_m2 - i2_s_m;
    let per_mode = if per_mode {
        let mut values = Vec::with_capacity(partition.memory.len());
        for &m in &partition.memory {
            values.push(bmi(state, &partition.system, &[m])?);
        }
        Some(values)
    } else {
        None
    };
    Ok(InfoRecord {
        step: registry.step(),
        i2_s_m1,
        i2_s_m2,
        i2_s_m,
        i3,
        per_mode,
    })
}

/// Per-step measure records of one run, indexed by step from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoSeries {
    pub records: Vec<InfoRecord>,
    pub n_memory: usize,
}

impl InfoSeries {
    /// Evaluate a recorded trace.
    pub fn from_trace(trace: &SimulationTrace, per_mode: bool) -> Result<Self> {
        let mut records = Vec::with_capacity(trace.len());
        for ts in &trace.steps {
            records.push(
                evaluate_step(&ts.state, &ts.registry, per_mode).map_err(|e| e.at_step(ts.step))?,
            );
        }
        let n_memory = trace.at(0).registry.n_memory();
        Ok(Self { records, n_memory })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Final fifth of the evolution, at least one record; step 0 never
    /// counts as steady state.
    pub fn steady_tail(&self) -> &[InfoRecord] {
        let steps = self.records.len().saturating_sub(1);
        let take = (steps / 5).max(1).min(steps.max(1));
        &self.records[self.records.len() - take..]
    }

    /// Mean of one measure over the steady tail.
    pub fn steady_mean(&self, field: impl Fn(&InfoRecord) -> f64) -> f64 {
        let tail = self.steady_tail();
        tail.iter().map(&field).sum::<f64>() / tail.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, SamplerSpec, SqueezePattern};
    use crate::engine::{initial_joint_state, run_simulation};
    use crate::gaussian::{entropy_f, vacuum_state};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn tmsv_halves_share_twice_the_marginal_entropy() {
        let t = tmsv_state(0.5).unwrap();
        let got = bmi(&t, &[0], &[1]).unwrap();
        let want = 2.0 * entropy_f(0.5 * 1.0f64.cosh());
        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        assert_abs_diff_eq!(got, 1.3190, epsilon = 1e-4);
    }

    #[test]
    fn uncorrelated_modes_share_nothing() {
        let v = vacuum_state(3).unwrap();
        assert_eq!(bmi(&v, &[0], &[1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn bmi_rejects_overlapping_or_empty_groups() {
        let v = vacuum_state(3).unwrap();
        assert!(matches!(
            bmi(&v, &[0, 1], &[1]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(bmi(&v, &[], &[1]).is_err());
        assert!(bmi(&v, &[0], &[7]).is_err());
    }

    #[test]
    fn tmi_vanishes_on_the_input_state() {
        let mut config = ExperimentConfig::default();
        config.pattern = SqueezePattern::Alternating { r: 0.5 };
        config.n_memory = 3;
        let (state, registry) = initial_joint_state(&config).unwrap();
        let p = Partition::from_registry(&registry);
        let i3 = tmi(&state, &p.system, &p.memory1, &p.memory2).unwrap();
        assert_abs_diff_eq!(i3, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn record_identity_is_exact() {
        let mut config = ExperimentConfig::default();
        config.steps = 4;
        config.memory_disorder = 0.8;
        let trace = run_simulation(&config).unwrap();
        let series = InfoSeries::from_trace(&trace, false).unwrap();
        for r in &series.records {
            assert_eq!(r.i3, r.i2_s_m1 + r.i2_s_m2 - r.i2_s_m);
        }
    }

    #[test]
    fn initial_record_matches_closed_form() {
        let config = ExperimentConfig {
            steps: 1,
            ..ExperimentConfig::default()
        };
        let trace = run_simulation(&config).unwrap();
        let series = InfoSeries::from_trace(&trace, true).unwrap();
        let r0 = &series.records[0];
        let want = 2.0 * entropy_f(0.5 * 2.0f64.cosh());
        assert_abs_diff_eq!(r0.i2_s_m1, want, epsilon = 1e-10);
        assert_abs_diff_eq!(r0.i2_s_m2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r0.i2_s_m, want, epsilon = 1e-10);
        assert_abs_diff_eq!(r0.i3, 0.0, epsilon = 1e-10);
        let per_mode = r0.per_mode.as_ref().unwrap();
        assert_eq!(per_mode.len(), 2);
        assert_abs_diff_eq!(per_mode[0], want, epsilon = 1e-10);
        assert_abs_diff_eq!(per_mode[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entanglement_check_doubles_the_parameter() {
        let e = log_negativity_tmsv_check(0.5, TmsvConvention::Appendix).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-10);
        let e = log_negativity_tmsv_check(0.25, TmsvConvention::CharFn).unwrap();
        assert_abs_diff_eq!(e, 0.25, epsilon = 1e-10);
        let e = log_negativity_tmsv_check(0.0, TmsvConvention::Appendix).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn steady_tail_covers_final_fifth() {
        let rec = |step: usize| InfoRecord {
            step,
            i2_s_m1: step as f64,
            i2_s_m2: 0.0,
            i2_s_m: 0.0,
            i3: 0.0,
            per_mode: None,
        };
        let series = InfoSeries {
            records: (0..=100).map(rec).collect(),
            n_memory: 2,
        };
        let tail = series.steady_tail();
        assert_eq!(tail.len(), 20);
        assert_eq!(tail.first().unwrap().step, 81);
        assert_eq!(tail.last().unwrap().step, 100);
        assert_abs_diff_eq!(series.steady_mean(|r| r.i2_s_m1), 90.5, epsilon = 1e-12);

        let short = InfoSeries {
            records: (0..=4).map(rec).collect(),
            n_memory: 2,
        };
        assert_eq!(short.steady_tail().len(), 1);
        assert_eq!(short.steady_tail()[0].step, 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn measures_behave_on_random_short_runs(
            seed in 0u64..1000,
            delta in 0.0..std::f64::consts::TAU,
            alternating in proptest::bool::ANY,
        ) {
            let mut config = ExperimentConfig::default();
            config.steps = 5;
            config.seed = seed;
            config.memory_disorder = delta;
            config.env_disorder = SamplerSpec::uniform(0.0, std::f64::consts::TAU);
            if alternating {
                config.pattern = SqueezePattern::Alternating { r: 0.5 };
            }
            let trace = run_simulation(&config).unwrap();
            let series = InfoSeries::from_trace(&trace, false).unwrap();
            for r in &series.records {
                prop_assert!(r.i2_s_m1 >= 0.0);
                prop_assert!(r.i2_s_m2 >= 0.0);
                prop_assert!(r.i2_s_m >= 0.0);
                prop_assert_eq!(r.i3, r.i2_s_m1 + r.i2_s_m2 - r.i2_s_m);
            }
            // Symmetry of the bipartite measure on the final state.
            let last = trace.last();
            let p = Partition::from_registry(&last.registry);
            let ab = bmi(&last.state, &p.system, &p.memory).unwrap();
            let ba = bmi(&last.state, &p.memory, &p.system).unwrap();
            prop_assert!((ab - ba).abs() < 1e-10);
        }
    }
}
