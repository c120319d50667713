//! Stepwise collision dynamics over a growing mode register.
//!
//! The register starts as [system, m1, m2 partners] and gains one
//! environment mode per step from the second step on, so after L >= 1
//! steps it holds n_memory + L modes. Within a step every neighbouring
//! pair from the first memory mode outward collides once; the system mode
//! itself never scatters, which pins row and column one of the cumulative
//! scattering matrix to the first unit vector.
//!
//! Static disorder enters through coupler phases: the memory-side coupler
//! carries the configured memory phase, and each coupler further out
//! carries the frozen phase of its upper mode (zero for memory partners,
//! one random draw per environment mode). Coupler-angle imperfections are
//! frozen per chain site at the start of a run.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::gaussian::{smsv_state, tmsv_state, CovarianceState};
use crate::interferometer::{CouplerSpec, ScatteringMatrix, SegmentOrder};

/// Role of one register slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLabel {
    /// Probed system mode.
    System,
    /// Memory mode entangled with the system at the start.
    Memory1,
    /// j-th memory partner mode, 1-based.
    Memory2(usize),
    /// j-th environment mode in order of appearance, 1-based.
    Env(usize),
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeLabel::System => write!(f, "s"),
            ModeLabel::Memory1 => write!(f, "m1"),
            ModeLabel::Memory2(j) => write!(f, "m2_{j}"),
            ModeLabel::Env(j) => write!(f, "e{j}"),
        }
    }
}

/// Maps register indices to roles; grows as environment modes appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    labels: Vec<ModeLabel>,
    n_memory: usize,
    step: usize,
}

impl ModeRegistry {
    pub fn new(n_memory: usize) -> Result<Self> {
        if n_memory < 2 {
            return Err(Error::InvalidParameter(format!(
                "memory needs at least two modes, got {n_memory}"
            )));
        }
        let mut labels = vec![ModeLabel::System, ModeLabel::Memory1];
        labels.extend((1..n_memory).map(ModeLabel::Memory2));
        Ok(Self {
            labels,
            n_memory,
            step: 0,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_memory(&self) -> usize {
        self.n_memory
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn system_index(&self) -> usize {
        0
    }

    pub fn m1_index(&self) -> usize {
        1
    }

    /// All memory modes: m1 plus its partners.
    pub fn memory_indices(&self) -> Vec<usize> {
        (1..=self.n_memory).collect()
    }

    /// Memory partner modes only.
    pub fn m2_indices(&self) -> Vec<usize> {
        (2..=self.n_memory).collect()
    }

    pub fn env_indices(&self) -> Vec<usize> {
        (self.n_memory + 1..self.n_modes()).collect()
    }

    pub fn n_env(&self) -> usize {
        self.n_modes() - self.n_memory - 1
    }

    /// Colliding pair positions for the current register: every
    /// neighbouring pair except (system, m1).
    pub fn pair_positions(&self) -> Vec<usize> {
        (1..self.n_modes().saturating_sub(1)).collect()
    }

    fn push_env(&mut self) -> usize {
        let index = self.n_modes();
        self.labels.push(ModeLabel::Env(self.n_env() + 1));
        index
    }

    fn advance_step(&mut self) {
        self.step += 1;
    }
}

/// Realify a mode-space scattering matrix to its quadrature action: each
/// complex entry c becomes the 2x2 block [[Re c, -Im c], [Im c, Re c]].
pub fn complex_to_quadrature(s: &ScatteringMatrix) -> DMatrix<f64> {
    let n = s.dim();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let c = s.matrix()[(i, j)];
            out[(2 * i, 2 * j)] = c.re;
            out[(2 * i, 2 * j + 1)] = -c.im;
            out[(2 * i + 1, 2 * j)] = c.im;
            out[(2 * i + 1, 2 * j + 1)] = c.re;
        }
    }
    out
}

/// Push a covariance state through a scattering matrix: sigma' = M sigma M^T.
pub fn propagate(state: &CovarianceState, s: &ScatteringMatrix) -> Result<CovarianceState> {
    if state.n_modes() != s.dim() {
        return Err(Error::ShapeMismatch(format!(
            "state has {} modes but scattering matrix has {}",
            state.n_modes(),
            s.dim()
        )));
    }
    let m = complex_to_quadrature(s);
    let propagated = &m * state.matrix() * m.transpose();
    Ok(CovarianceState::from_matrix_unchecked(propagated))
}

/// In-place congruence update of sigma by one pair block: touches only the
/// four quadrature rows and columns of modes (p, p+1).
fn apply_pair_symmetric(m: &mut DMatrix<f64>, p: usize, block: &Matrix2<Complex64>) {
    let mut q = [[0.0f64; 4]; 4];
    for bi in 0..2 {
        for bj in 0..2 {
            let c = block[(bi, bj)];
            q[2 * bi][2 * bj] = c.re;
            q[2 * bi][2 * bj + 1] = -c.im;
            q[2 * bi + 1][2 * bj] = c.im;
            q[2 * bi + 1][2 * bj + 1] = c.re;
        }
    }
    let r0 = 2 * p;
    let n = m.nrows();
    for j in 0..n {
        let v = [m[(r0, j)], m[(r0 + 1, j)], m[(r0 + 2, j)], m[(r0 + 3, j)]];
        for k in 0..4 {
            m[(r0 + k, j)] = q[k][0] * v[0] + q[k][1] * v[1] + q[k][2] * v[2] + q[k][3] * v[3];
        }
    }
    for i in 0..n {
        let v = [m[(i, r0)], m[(i, r0 + 1)], m[(i, r0 + 2)], m[(i, r0 + 3)]];
        for k in 0..4 {
            m[(i, r0 + k)] = v[0] * q[k][0] + v[1] * q[k][1] + v[2] * q[k][2] + v[3] * q[k][3];
        }
    }
}

/// Joint input state: a two-mode squeezed pair on (system, m1) and one
/// squeezed vacuum per memory partner, uncorrelated.
pub fn initial_joint_state(config: &ExperimentConfig) -> Result<(CovarianceState, ModeRegistry)> {
    let registry = ModeRegistry::new(config.n_memory)?;
    let mut state = tmsv_state(config.effective_xi())?;
    for index in 2..=config.n_memory {
        state.append(&smsv_state(config.pattern.spec_for_index(index)));
    }
    Ok((state, registry))
}

/// One running simulation; `advance` applies the next collision step.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ExperimentConfig,
    registry: ModeRegistry,
    state: CovarianceState,
    cumulative: ScatteringMatrix,
    env_phases: Vec<f64>,
    site_offsets: Vec<f64>,
}

impl Simulation {
    /// Set up a run. All static randomness (environment phases, coupler
    /// offsets) is drawn here, from the child stream selected by
    /// `sample_index`, in a frozen order: environment phases in creation
    /// order first, then site offsets in ascending position.
    pub fn new(config: &ExperimentConfig, sample_index: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(sample_index);

        let env_phases: Vec<f64> = (0..config.steps.saturating_sub(1))
            .map(|_| config.env_disorder.sample(&mut rng))
            .collect();
        let max_pair = config.n_memory + config.steps - 1;
        let mut site_offsets = vec![0.0; max_pair.max(1)];
        for offset in site_offsets.iter_mut().skip(1) {
            *offset = config.imperfection.sample(&mut rng);
        }

        let (state, registry) = initial_joint_state(config)?;
        let cumulative = ScatteringMatrix::identity(registry.n_modes());
        Ok(Self {
            config: config.clone(),
            registry,
            state,
            cumulative,
            env_phases,
            site_offsets,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn state(&self) -> &CovarianceState {
        &self.state
    }

    pub fn cumulative(&self) -> &ScatteringMatrix {
        &self.cumulative
    }

    pub fn step(&self) -> usize {
        self.registry.step()
    }

    /// Static phase carried by the coupler at pair position `p`, read off
    /// its upper mode.
    fn phase_for_pair(&self, p: usize) -> f64 {
        let nm = self.config.n_memory;
        if p == 1 {
            self.config.memory_disorder
        } else if p <= nm {
            0.0
        } else {
            self.env_phases[p - nm - 1]
        }
    }

    /// Apply the next step: grow the register (from the second step on),
    /// then collide every neighbouring pair in the configured order.
    pub fn advance(&mut self) -> Result<()> {
        let next = self.step() + 1;
        if next > self.config.steps {
            return Err(Error::InvalidParameter(format!(
                "run is configured for {} steps",
                self.config.steps
            )));
        }
        if next >= 2 {
            let index = self.registry.n_modes();
            let spec = self.config.pattern.spec_for_index(index);
            self.state.append(&smsv_state(spec));
            self.registry.push_env();
            self.cumulative.pad_to(index + 1);
        }

        let blocks: Vec<(usize, Matrix2<Complex64>)> = self
            .registry
            .pair_positions()
            .into_iter()
            .map(|p| {
                let c = CouplerSpec::new(
                    self.config.eta + self.site_offsets[p],
                    self.phase_for_pair(p),
                )?;
                Ok((p, c.block()))
            })
            .collect::<Result<_>>()
            .map_err(|e: Error| e.at_step(next))?;

        let apply = |sim: &mut Self, p: usize, b: &Matrix2<Complex64>| {
            apply_pair_symmetric(sim.state.matrix_mut(), p, b);
            sim.cumulative.apply_pair(p, b);
        };
        match self.config.segment_order {
            SegmentOrder::MemoryFirst => {
                for (p, b) in &blocks {
                    apply(self, *p, b);
                }
            }
            SegmentOrder::MemoryLast => {
                for (p, b) in blocks.iter().rev() {
                    apply(self, *p, b);
                }
            }
        }
        self.registry.advance_step();
        Ok(())
    }
}

/// State of the run after one step, cloned out of the simulation.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub step: usize,
    pub state: CovarianceState,
    pub cumulative: ScatteringMatrix,
    pub registry: ModeRegistry,
}

impl TraceStep {
    fn snapshot(sim: &Simulation) -> Self {
        Self {
            step: sim.step(),
            state: sim.state().clone(),
            cumulative: sim.cumulative().clone(),
            registry: sim.registry().clone(),
        }
    }
}

/// Full history of a run, indexed by step; entry 0 is the input state.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub steps: Vec<TraceStep>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn at(&self, step: usize) -> &TraceStep {
        &self.steps[step]
    }

    pub fn last(&self) -> &TraceStep {
        self.steps
            .last()
            .expect("trace holds at least the input state")
    }
}

/// Run to completion, recording every step. Sample stream 0 is used, so a
/// single run coincides with the first member of an ensemble.
pub fn run_simulation(config: &ExperimentConfig) -> Result<SimulationTrace> {
    let mut sim = Simulation::new(config, 0)?;
    let mut steps = Vec::with_capacity(config.steps + 1);
    steps.push(TraceStep::snapshot(&sim));
    for l in 1..=config.steps {
        sim.advance().map_err(|e| e.at_step(l))?;
        steps.push(TraceStep::snapshot(&sim));
    }
    Ok(SimulationTrace { steps })
}
