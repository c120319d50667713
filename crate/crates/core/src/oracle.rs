//! Closed-form covariance blocks for the system and memory register.
//!
//! Every block of the reduced system-plus-memory covariance after L steps
//! can be written directly in terms of entries of the cumulative
//! mode-mixing matrix and the input squeezing, without stepping through the
//! evolution. This module evaluates those expressions as an independent
//! path to the same state, used to cross-validate the propagation engine.
//!
//! The closed forms factor a single squeeze amplitude out of the mode sums,
//! so they hold when every non-pair input mode is squeezed equally hard
//! (any directions). All built-in patterns satisfy this; the constructor
//! rejects inputs that do not.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceState, SqueezeSpec};
use crate::interferometer::ScatteringMatrix;

/// Everything the closed forms need: the mixing matrix, the pair squeeze
/// parameter, and the per-mode squeeze of every other input mode.
#[derive(Debug, Clone)]
pub struct OracleInput {
    /// Adjoint of the cumulative matrix. The closed forms index the
    /// transformation in the inverse convention; `convention_is_fixed`
    /// below pins this choice against the engine.
    s: DMatrix<Complex64>,
    xi: f64,
    specs: Vec<SqueezeSpec>,
    n_memory: usize,
}

impl OracleInput {
    /// Build from the engine's cumulative matrix and the squeeze
    /// configuration of input modes 2.. in register order.
    pub fn from_cumulative(
        cumulative: &ScatteringMatrix,
        xi: f64,
        specs: Vec<SqueezeSpec>,
        n_memory: usize,
    ) -> Result<Self> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pair squeeze parameter must be finite and nonnegative, got {xi}"
            )));
        }
        if n_memory < 2 {
            return Err(Error::InvalidParameter(format!(
                "memory block needs at least two modes, got {n_memory}"
            )));
        }
        let dim = cumulative.dim();
        if dim < n_memory + 1 {
            return Err(Error::ShapeMismatch(format!(
                "matrix of dimension {dim} cannot hold {n_memory} memory modes"
            )));
        }
        if specs.len() != dim - 2 {
            return Err(Error::ShapeMismatch(format!(
                "{} squeeze specs for {} squeezed input modes",
                specs.len(),
                dim - 2
            )));
        }
        if let Some(first) = specs.first() {
            if specs.iter().any(|s| (s.r() - first.r()).abs() > 1e-12) {
                return Err(Error::Precondition(
                    "closed forms need one squeeze amplitude across all input modes".into(),
                ));
            }
        }
        Ok(Self {
            s: cumulative.matrix().adjoint(),
            xi,
            specs,
            n_memory,
        })
    }

    /// Build for a run of `config` at the step that produced `cumulative`,
    /// reading the squeeze pattern and pair parameter off the config.
    pub fn for_config(config: &ExperimentConfig, cumulative: &ScatteringMatrix) -> Result<Self> {
        config.validate()?;
        let specs = (2..cumulative.dim())
            .map(|index| config.pattern.spec_for_index(index))
            .collect();
        Self::from_cumulative(cumulative, config.effective_xi(), specs, config.n_memory)
    }

    fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Uniform squeeze amplitude of the non-pair inputs; zero when there
    /// are none.
    fn amplitude(&self) -> f64 {
        self.specs.first().map_or(0.0, SqueezeSpec::r)
    }

    /// Register indices of the second memory partition.
    fn m2_modes(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.n_memory
    }

    /// Sum of sinh(2 r_k) e^{i phi_k} s*(k,i) s*(k,j) over squeezed modes.
    fn squeeze_sum(&self, i: usize, j: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (offset, spec) in self.specs.iter().enumerate() {
            let k = offset + 2;
            let weight = Complex64::from_polar((2.0 * spec.r()).sinh(), spec.phi());
            acc += weight * self.s[(k, i)].conj() * self.s[(k, j)].conj();
        }
        acc
    }
}

/// Symmetric quadrature block generated by a squeeze-like complex weight.
fn w_block(c: Complex64) -> Matrix2<f64> {
    Matrix2::new(c.re, c.im, c.im, -c.re)
}

/// Rotation-like quadrature block of a complex weight.
fn q_block(c: Complex64) -> Matrix2<f64> {
    Matrix2::new(c.re, -c.im, c.im, c.re)
}

/// Covariance of the system mode alone.
pub fn oracle_sigma_s(input: &OracleInput) -> Matrix2<f64> {
    Matrix2::identity() * (0.5 * (2.0 * input.xi).cosh())
}

/// Cross block between the system and the first memory mode.
pub fn oracle_sigma_sm1(input: &OracleInput) -> Matrix2<f64> {
    let s22 = input.s[(1, 1)];
    w_block(s22.conj() * (2.0 * input.xi).sinh()) * 0.5
}

/// Covariance of the first memory mode.
pub fn oracle_sigma_m1(input: &OracleInput) -> Matrix2<f64> {
    let s22 = input.s[(1, 1)];
    let beta = (2.0 * input.xi).cosh() * s22.norm_sqr()
        + (2.0 * input.amplitude()).cosh() * (1.0 - s22.norm_sqr());
    (Matrix2::identity() * beta + w_block(input.squeeze_sum(1, 1))) * 0.5
}

/// Covariance of the second memory partition, all diagonal and
/// off-diagonal mode blocks assembled in register order.
pub fn oracle_sigma_m2_blocks(input: &OracleInput) -> DMatrix<f64> {
    let modes: Vec<usize> = input.m2_modes().collect();
    let mut out = DMatrix::zeros(2 * modes.len(), 2 * modes.len());
    let cosh_xi = (2.0 * input.xi).cosh();
    let cosh_r = (2.0 * input.amplitude()).cosh();
    for (a, &ma) in modes.iter().enumerate() {
        for (b, &mb) in modes.iter().enumerate() {
            let block = if a == b {
                let sa = input.s[(1, ma)];
                let beta = cosh_xi * sa.norm_sqr() + cosh_r * (1.0 - sa.norm_sqr());
                (Matrix2::identity() * beta + w_block(input.squeeze_sum(ma, ma))) * 0.5
            } else {
                let q = (cosh_xi - cosh_r) * input.s[(1, ma)].conj() * input.s[(1, mb)];
                (w_block(input.squeeze_sum(ma, mb)) + q_block(q)) * 0.5
            };
            out.view_mut((2 * a, 2 * b), (2, 2)).copy_from(&block);
        }
    }
    out
}

/// Cross blocks (system, m2 mode) and (m1, m2 mode), in register order.
pub fn oracle_sigma_cross(input: &OracleInput) -> (Vec<Matrix2<f64>>, Vec<Matrix2<f64>>) {
    let sinh_xi = (2.0 * input.xi).sinh();
    let cosh_gap = (2.0 * input.xi).cosh() - (2.0 * input.amplitude()).cosh();
    let s22 = input.s[(1, 1)];
    let mut sm2 = Vec::new();
    let mut m1m2 = Vec::new();
    for ma in input.m2_modes() {
        let sa = input.s[(1, ma)];
        sm2.push(w_block(sa.conj() * sinh_xi) * 0.5);
        let q = cosh_gap * s22.conj() * sa;
        m1m2.push((w_block(input.squeeze_sum(1, ma)) + q_block(q)) * 0.5);
    }
    (sm2, m1m2)
}

/// Full system-plus-memory covariance assembled from the closed forms,
/// ordered (system, m1, m2 modes).
pub fn oracle_sigma_sm(input: &OracleInput) -> Result<CovarianceState> {
    let n = input.n_memory + 1;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let set = |m: &mut DMatrix<f64>, i: usize, j: usize, block: &Matrix2<f64>| {
        m.view_mut((2 * i, 2 * j), (2, 2)).copy_from(block);
        if i != j {
            m.view_mut((2 * j, 2 * i), (2, 2))
                .copy_from(&block.transpose());
        }
    };
    set(&mut m, 0, 0, &oracle_sigma_s(input));
    set(&mut m, 0, 1, &oracle_sigma_sm1(input));
    set(&mut m, 1, 1, &oracle_sigma_m1(input));
    let (sm2, m1m2) = oracle_sigma_cross(input);
    for (a, mode) in input.m2_modes().enumerate() {
        set(&mut m, 0, mode, &sm2[a]);
        set(&mut m, 1, mode, &m1m2[a]);
    }
    let m2 = oracle_sigma_m2_blocks(input);
    let width = 2 * (n - 2);
    if width > 0 {
        m.view_mut((4, 4), (width, width)).copy_from(&m2);
    }
    debug_assert!(input.dim() >= n);
    CovarianceState::from_matrix(m)
}
