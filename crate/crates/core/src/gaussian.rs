//! Gaussian states as real covariance matrices.
//!
//! A state over N bosonic modes is a 2N x 2N real symmetric matrix in the
//! interleaved quadrature order (x1, p1, x2, p2, ...), with vacuum variance
//! 1/2 per quadrature (hbar = 1) and first moments identically zero. All
//! states handled here are zero-mean, so the covariance matrix is the whole
//! description.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symplectic eigenvalues this close below 1/2 are treated as exactly 1/2;
/// anything lower is reported as unphysical.
pub const NU_CLAMP_TOL: f64 = 1e-9;

/// Single-mode squeezing parameters: amplitude `r >= 0` and direction `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeSpec {
    r: f64,
    phi: f64,
}

impl SqueezeSpec {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squeeze amplitude must be finite and nonnegative, got {r}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze direction must be finite, got {phi}"
            )));
        }
        Ok(Self { r, phi })
    }

    pub fn vacuum() -> Self {
        Self { r: 0.0, phi: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Scaling convention for the two-mode squeezing parameter.
///
/// `Appendix` uses cosh(2 xi) / sinh(2 xi) covariance entries directly.
/// `CharFn` matches sources that write the characteristic function with
/// cosh(xi) / sinh(xi); the effective parameter is halved so that both
/// conventions produce the same family of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TmsvConvention {
    #[default]
    #[serde(rename = "appendix")]
    Appendix,
    #[serde(rename = "charfn")]
    CharFn,
}

impl TmsvConvention {
    /// Parameter actually used in covariance entries.
    pub fn effective_xi(&self, xi: f64) -> f64 {
        match self {
            TmsvConvention::Appendix => xi,
            TmsvConvention::CharFn => 0.5 * xi,
        }
    }
}

/// Zero-mean Gaussian state stored as its covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    matrix: DMatrix<f64>,
}

impl CovarianceState {
    /// Wrap an existing covariance matrix, checking shape and symmetry.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::ShapeMismatch(format!(
                "covariance must be square with even dimension, got {rows}x{cols}"
            )));
        }
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::ShapeMismatch(format!(
                "covariance must be symmetric, max asymmetry {asym:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Direct sum: `self` followed by the modes of `other`.
    pub fn append(&mut self, other: &CovarianceState) {
        let n = self.matrix.nrows();
        let m = other.matrix.nrows();
        let mut out = DMatrix::<f64>::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        out.view_mut((n, n), (m, m)).copy_from(&other.matrix);
        self.matrix = out;
    }

    /// Partial transpose with respect to one mode: its momentum row and
    /// column change sign. The result is generally not a physical state;
    /// its symplectic spectrum witnesses entanglement.
    pub fn partial_transpose(&self, mode: usize) -> Result<CovarianceState> {
        let n = self.n_modes();
        if mode >= n {
            return Err(Error::IndexOutOfRange {
                index: mode,
                len: n,
            });
        }
        let mut m = self.matrix.clone();
        let p = 2 * mode + 1;
        for j in 0..2 * n {
            m[(p, j)] = -m[(p, j)];
            m[(j, p)] = -m[(j, p)];
        }
        Ok(CovarianceState { matrix: m })
    }
}

/// Vacuum over `n` modes: covariance I/2.
pub fn vacuum_state(n: usize) -> Result<CovarianceState> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "state must have at least one mode".into(),
        ));
    }
    Ok(CovarianceState {
        matrix: DMatrix::identity(2 * n, 2 * n) * 0.5,
    })
}

/// Single-mode squeezed vacuum.
///
/// Covariance (1/2) [[cosh 2r + sinh 2r cos phi, sinh 2r sin phi],
/// [sinh 2r sin phi, cosh 2r - sinh 2r cos phi]]; for phi = 0 the x
/// quadrature carries the antisqueezed variance exp(2r)/2.
pub fn smsv_state(spec: SqueezeSpec) -> CovarianceState {
    let (c, s) = ((2.0 * spec.r).cosh(), (2.0 * spec.r).sinh());
    let (cp, sp) = (spec.phi.cos(), spec.phi.sin());
    let matrix = DMatrix::from_row_slice(
        2,
        2,
        &[
            0.5 * (c + s * cp),
            0.5 * s * sp,
            0.5 * s * sp,
            0.5 * (c - s * cp),
        ],
    );
    CovarianceState { matrix }
}

/// Two-mode squeezed vacuum with parameter `xi` in the cosh(2 xi) scaling.
///
/// Covariance (1/2) [[cosh(2 xi) I, sinh(2 xi) Z], [sinh(2 xi) Z,
/// cosh(2 xi) I]] with Z = diag(1, -1). Each marginal is thermal with
/// symplectic eigenvalue cosh(2 xi) / 2.
pub fn tmsv_state(xi: f64) -> Result<CovarianceState> {
    if !xi.is_finite() || xi < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "two-mode squeezing parameter must be finite and nonnegative, got {xi}"
        )));
    }
    let c = 0.5 * (2.0 * xi).cosh();
    let s = 0.5 * (2.0 * xi).sinh();
    let matrix = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    );
    Ok(CovarianceState { matrix })
}

/// Marginal state over the listed modes, in the listed order.
pub fn reduce(state: &CovarianceState, modes: &[usize]) -> Result<CovarianceState> {
    let n = state.n_modes();
    if modes.is_empty() {
        return Err(Error::InvalidParameter(
            "mode selection must be nonempty".into(),
        ));
    }
    for (pos, &m) in modes.iter().enumerate() {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, len: n });
        }
        if modes[..pos].contains(&m) {
            return Err(Error::DuplicateIndex(m));
        }
    }
    let k = modes.len();
    let mut out = DMatrix::<f64>::zeros(2 * k, 2 * k);
    for (a, &ma) in modes.iter().enumerate() {
        for (b, &mb) in modes.iter().enumerate() {
            for qa in 0..2 {
                for qb in 0..2 {
                    out[(2 * a + qa, 2 * b + qb)] = state.matrix[(2 * ma + qa, 2 * mb + qb)];
                }
            }
        }
    }
    Ok(CovarianceState { matrix: out })
}

/// Symplectic form Omega over `n` modes: block diagonal [[0, 1], [-1, 0]].
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Symplectic spectrum without the physicality floor, descending.
///
/// These are the moduli of the imaginary eigenvalue pairs of Omega sigma.
/// With a factor sigma = F Fᵀ the matrix A = Fᵀ Omega F is antisymmetric
/// and A Aᵀ is symmetric with the squared moduli as doubled eigenvalues, so
/// the whole spectrum comes out of symmetric eigensolvers; the general
/// nonsymmetric solver stalls on the near-degenerate spectra this model
/// produces in its long-time limit. Also accepts matrices that are
/// deliberately not states, such as partial transposes probed as
/// entanglement witnesses.
pub fn symplectic_spectrum_raw(state: &CovarianceState) -> Vec<f64> {
    let n = state.n_modes();
    let omega = symplectic_form(n);
    let factor = match state.matrix.clone().cholesky() {
        Some(ch) => ch.unpack(),
        None => {
            // Positive semidefinite edge: symmetric square root with tiny
            // negative rounding clamped away.
            let eig = SymmetricEigen::new(state.matrix.clone());
            let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
            &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
        }
    };
    let core = factor.transpose() * omega * factor;
    let squares = &core * core.transpose();
    let mut moduli: Vec<f64> = SymmetricEigen::new(squares)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalue moduli are finite"));
    // Each modulus appears twice; keep one representative per pair.
    moduli
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Symplectic eigenvalues of a covariance matrix, descending.
///
/// Values within `NU_CLAMP_TOL` below 1/2 are clamped to exactly 1/2; lower
/// values make the state unphysical and are reported as an error.
pub fn symplectic_eigenvalues(state: &CovarianceState) -> Result<Vec<f64>> {
    symplectic_spectrum_raw(state)
        .into_iter()
        .map(|nu| {
            if nu < 0.5 - NU_CLAMP_TOL {
                Err(Error::Unphysical { nu, step: None })
            } else {
                Ok(if nu < 0.5 { 0.5 } else { nu })
            }
        })
        .collect()
}

/// Entropy contribution of one symplectic eigenvalue, in nats.
///
/// f(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), with f(1/2) = 0 by
/// continuous extension.
pub fn entropy_f(x: f64) -> f64 {
    let a = x + 0.5;
    let b = x - 0.5;
    let tb = if b > 0.0 { b * b.ln() } else { 0.0 };
    a * a.ln() - tb
}

/// Von Neumann entropy in nats: the sum of f over the symplectic spectrum.
pub fn von_neumann_entropy(state: &CovarianceState) -> Result<f64> {
    Ok(symplectic_eigenvalues(state)?
        .iter()
        .map(|&nu| entropy_f(nu))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Reference scalar for f, written out independently of entropy_f.
    fn f_ref(x: f64) -> f64 {
        (x + 0.5) * (x + 0.5).ln() - (x - 0.5) * (x - 0.5).ln()
    }

    #[test]
    fn vacuum_is_half_identity() {
        let v = vacuum_state(3).unwrap();
        assert_eq!(v.n_modes(), 3);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert_eq!(v.matrix()[(i, j)], want);
            }
        }
    }

    #[test]
    fn vacuum_requires_a_mode() {
        assert!(vacuum_state(0).is_err());
    }

    #[test]
    fn smsv_along_x_gives_exponential_variances() {
        let s = smsv_state(SqueezeSpec::new(0.5, 0.0).unwrap());
        assert_abs_diff_eq!(s.matrix()[(0, 0)], 1.0f64.exp() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(1, 1)], (-1.0f64).exp() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn smsv_rotated_quarter_turn_couples_quadratures() {
        let s = smsv_state(SqueezeSpec::new(0.5, std::f64::consts::FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(s.matrix()[(0, 0)], 0.5 * 1.0f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(1, 1)], 0.5 * 1.0f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(0, 1)], 0.5 * 1.0f64.sinh(), epsilon = 1e-14);
    }

    #[test]
    fn squeeze_spec_rejects_negative_amplitude() {
        assert!(SqueezeSpec::new(-0.1, 0.0).is_err());
        assert!(SqueezeSpec::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn tmsv_marginal_is_thermal() {
        let t = tmsv_state(1.0).unwrap();
        let marg = reduce(&t, &[0]).unwrap();
        let want = 0.5 * 2.0f64.cosh();
        assert_abs_diff_eq!(marg.matrix()[(0, 0)], want, epsilon = 1e-14);
        assert_abs_diff_eq!(marg.matrix()[(1, 1)], want, epsilon = 1e-14);
        let nus = symplectic_eigenvalues(&marg).unwrap();
        assert_abs_diff_eq!(nus[0], want, epsilon = 1e-12);
        assert_abs_diff_eq!(nus[0], 1.8811, epsilon = 1e-4);
    }

    #[test]
    fn tmsv_rejects_negative_parameter() {
        assert!(tmsv_state(-0.01).is_err());
    }

    #[test]
    fn tmsv_joint_state_is_pure() {
        let t = tmsv_state(1.0).unwrap();
        for nu in symplectic_eigenvalues(&t).unwrap() {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn charfn_convention_halves_the_parameter() {
        assert_eq!(TmsvConvention::Appendix.effective_xi(0.8), 0.8);
        assert_eq!(TmsvConvention::CharFn.effective_xi(0.8), 0.4);
    }

    #[test]
    fn reduce_respects_requested_order() {
        let mut s = smsv_state(SqueezeSpec::new(0.3, 0.0).unwrap());
        s.append(&vacuum_state(2).unwrap());
        let r = reduce(&s, &[2, 0]).unwrap();
        assert_eq!(r.n_modes(), 2);
        assert_abs_diff_eq!(r.matrix()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(2, 2)], 0.6f64.exp() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn reduce_rejects_bad_selections() {
        let v = vacuum_state(2).unwrap();
        assert!(matches!(
            reduce(&v, &[2]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(reduce(&v, &[0, 0]), Err(Error::DuplicateIndex(0))));
        assert!(reduce(&v, &[]).is_err());
    }

    #[test]
    fn entropy_vanishes_on_pure_states() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&vacuum_state(4).unwrap()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let s = smsv_state(SqueezeSpec::new(0.7, 1.1).unwrap());
        assert_abs_diff_eq!(von_neumann_entropy(&s).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tmsv_marginal_entropy_matches_closed_form() {
        let t = tmsv_state(0.5).unwrap();
        let marg = reduce(&t, &[0]).unwrap();
        let s = von_neumann_entropy(&marg).unwrap();
        assert_abs_diff_eq!(s, f_ref(0.5 * 1.0f64.cosh()), epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.65947, epsilon = 1e-4);
    }

    #[test]
    fn entropy_f_anchors() {
        assert_eq!(entropy_f(0.5), 0.0);
        assert_abs_diff_eq!(
            entropy_f(1.5),
            2.0 * 2.0f64.ln() - 1.0f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn partial_transpose_of_tmsv_exposes_entanglement() {
        let t = tmsv_state(0.5).unwrap();
        let pt = t.partial_transpose(1).unwrap();
        let nus = symplectic_spectrum_raw(&pt);
        let min = nus.last().copied().unwrap();
        assert_abs_diff_eq!(min, 0.5 * (-1.0f64).exp(), epsilon = 1e-12);
        // The floor-checked accessor must reject the transposed matrix.
        assert!(symplectic_eigenvalues(&pt).is_err());
    }

    #[test]
    fn unphysical_covariance_is_rejected() {
        let m = DMatrix::from_diagonal_element(2, 2, 0.4);
        let s = CovarianceState::from_matrix(m).unwrap();
        assert!(matches!(
            symplectic_eigenvalues(&s),
            Err(Error::Unphysical { .. })
        ));
    }

    #[test]
    fn from_matrix_rejects_odd_or_asymmetric_input() {
        assert!(CovarianceState::from_matrix(DMatrix::identity(3, 3)).is_err());
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 0.5;
        assert!(CovarianceState::from_matrix(m).is_err());
    }

    proptest! {
        #[test]
        fn smsv_is_always_pure(r in 0.0..1.5f64, phi in 0.0..std::f64::consts::TAU) {
            let s = smsv_state(SqueezeSpec::new(r, phi).unwrap());
            let nus = symplectic_eigenvalues(&s).unwrap();
            prop_assert!((nus[0] - 0.5).abs() < 1e-9);
        }

        #[test]
        fn tmsv_purity_and_marginal(xi in 0.0..1.5f64) {
            let t = tmsv_state(xi).unwrap();
            for nu in symplectic_eigenvalues(&t).unwrap() {
                prop_assert!((nu - 0.5).abs() < 1e-9);
            }
            let marg = reduce(&t, &[1]).unwrap();
            let nus = symplectic_eigenvalues(&marg).unwrap();
            prop_assert!((nus[0] - 0.5 * (2.0 * xi).cosh()).abs() < 1e-9);
        }

        #[test]
        fn entropy_f_slope_matches_log_ratio(x in 0.6..5.0f64) {
            // f'(x) = ln((x + 1/2) / (x - 1/2)).
            let h = 1e-6;
            let slope = (entropy_f(x + h) - entropy_f(x - h)) / (2.0 * h);
            let want = ((x + 0.5) / (x - 0.5)).ln();
            prop_assert!((slope - want).abs() < 1e-6);
        }

        #[test]
        fn entropy_invariant_under_mode_relabeling(xi in 0.1..1.2f64) {
            let t = tmsv_state(xi).unwrap();
            let fwd = reduce(&t, &[0, 1]).unwrap();
            let rev = reduce(&t, &[1, 0]).unwrap();
            let a = von_neumann_entropy(&fwd).unwrap();
            let b = von_neumann_entropy(&rev).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
