//! Ensembles over frozen disorder samples.
//!
//! Each sample re-draws the static randomness (environment phases, coupler
//! offsets) from a child stream of the run seed, so samples are independent
//! yet reproducible, and can run in any order or in parallel without
//! changing the result.

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::engine::Simulation;
use crate::error::{Error, Result};
use crate::measures::{evaluate_step, InfoRecord, InfoSeries};

/// Per-step mean and sample standard deviation of every measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: InfoSeries,
    pub std: InfoSeries,
    pub n_samples: usize,
}

/// Run one disorder sample and evaluate the measures at every step,
/// without retaining the state history.
pub fn sample_run(config: &ExperimentConfig, sample_index: u64) -> Result<InfoSeries> {
    let mut sim = Simulation::new(config, sample_index)?;
    let mut records = Vec::with_capacity(config.steps + 1);
    records.push(evaluate_step(
        sim.state(),
        sim.registry(),
        config.per_mode_bmi,
    )?);
    for l in 1..=config.steps {
        sim.advance().map_err(|e| e.at_step(l))?;
        records.push(
            evaluate_step(sim.state(), sim.registry(), config.per_mode_bmi)
                .map_err(|e| e.at_step(l))?,
        );
    }
    Ok(InfoSeries {
        records,
        n_memory: config.n_memory,
    })
}

/// Run `n_samples` independent disorder samples and aggregate them.
pub fn ensemble(config: &ExperimentConfig, n_samples: usize) -> Result<EnsembleStats> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter(
            "ensemble needs at least one sample".into(),
        ));
    }
    let series: Vec<InfoSeries> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| sample_run(config, k))
        .collect::<Result<_>>()?;
    aggregate(&series)
}

/// Deterministic reduction over sample series; the result depends only on
/// the multiset of samples, not their order.
fn aggregate(series: &[InfoSeries]) -> Result<EnsembleStats> {
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidParameter("no sample series to aggregate".into()))?;
    let steps = first.len();
    if series.iter().any(|s| s.len() != steps) {
        return Err(Error::ShapeMismatch(
            "sample series disagree on step count".into(),
        ));
    }
    let n = series.len();
    let mut mean = Vec::with_capacity(steps);
    let mut std = Vec::with_capacity(steps);
    for l in 0..steps {
        let rows: Vec<&InfoRecord> = series.iter().map(|s| &s.records[l]).collect();
        let (m, s) = reduce_records(&rows, n);
        mean.push(m);
        std.push(s);
    }
    Ok(EnsembleStats {
        mean: InfoSeries {
            records: mean,
            n_memory: first.n_memory,
        },
        std: InfoSeries {
            records: std,
            n_memory: first.n_memory,
        },
        n_samples: n,
    })
}

fn mean_and_std(values: impl Fn(usize) -> f64, n: usize) -> (f64, f64) {
    // Shifted-data form: deviations from the first sample keep identical
    // samples at exactly zero spread and reduce cancellation error.
    let origin = values(0);
    let dev_mean = (0..n).map(|i| values(i) - origin).sum::<f64>() / n as f64;
    let mean = origin + dev_mean;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = (0..n)
        .map(|i| (values(i) - origin - dev_mean).powi(2))
        .sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt())
}

fn reduce_records(rows: &[&InfoRecord], n: usize) -> (InfoRecord, InfoRecord) {
    let field = |get: fn(&InfoRecord) -> f64| mean_and_std(|i| get(rows[i]), n);
    let (m1, s1) = field(|r| r.i2_s_m1);
    let (m2, s2) = field(|r| r.i2_s_m2);
    let (mm, sm) = field(|r| r.i2_s_m);
    let (m3, s3) = field(|r| r.i3);
    let (per_mean, per_std) = match &rows[0].per_mode {
        None => (None, None),
        Some(head) => {
            let mut means = Vec::with_capacity(head.len());
            let mut stds = Vec::with_capacity(head.len());
            for j in 0..head.len() {
                let (m, s) =
                    mean_and_std(|i| rows[i].per_mode.as_ref().expect("uniform shape")[j], n);
                means.push(m);
                stds.push(s);
            }
            (Some(means), Some(stds))
        }
    };
    let step = rows[0].step;
    (
        InfoRecord {
            step,
            i2_s_m1: m1,
            i2_s_m2: m2,
            i2_s_m: mm,
            i3: m3,
            per_mode: per_mean,
        },
        InfoRecord {
            step,
            i2_s_m1: s1,
            i2_s_m2: s2,
            i2_s_m: sm,
            i3: s3,
            per_mode: per_std,
        },
    )
}
