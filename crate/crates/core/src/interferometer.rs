//! Two-mode couplers and the stepwise scattering network they build up.
//!
//! A coupler with angle eta and phase delta scatters a neighbouring mode
//! pair by [[sin(eta) e^{i delta}, cos(eta) e^{i delta}], [-cos(eta),
//! sin(eta)]]. Within one step every coupler acts on a distinct pair
//! (j, j+1) of the register; the step matrix is the ordered product of the
//! embedded pair blocks, and the cumulative matrix left-multiplies the
//! previous one after identity padding for freshly added modes.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated deviation of S S^dagger from the identity.
pub const UNITARITY_TOL: f64 = 1e-12;

/// One two-mode coupler: transmission angle and attached phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerSpec {
    eta: f64,
    delta: f64,
}

impl CouplerSpec {
    pub fn new(eta: f64, delta: f64) -> Result<Self> {
        if !eta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "coupler angle must lie in [0, pi/2], got {eta}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupler phase must be finite, got {delta}"
            )));
        }
        Ok(Self { eta, delta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn block(&self) -> Matrix2<Complex64> {
        bs_matrix(self.eta, self.delta)
    }
}

/// Order in which the pair collisions of one step are applied.
///
/// `MemoryLast` (wire name "eq1") applies couplers from the environment end
/// inward, so the memory-side pair acts last within the step. `MemoryFirst`
/// (wire name "eq7") applies them in ascending pair position, memory side
/// first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SegmentOrder {
    #[default]
    #[serde(rename = "eq1")]
    MemoryLast,
    #[serde(rename = "eq7")]
    MemoryFirst,
}

impl SegmentOrder {
    pub fn wire_name(&self) -> &'static str {
        match self {
            SegmentOrder::MemoryLast => "eq1",
            SegmentOrder::MemoryFirst => "eq7",
        }
    }

    pub fn from_wire_name(name: &str) -> Result<Self> {
        match name {
            "eq1" => Ok(SegmentOrder::MemoryLast),
            "eq7" => Ok(SegmentOrder::MemoryFirst),
            other => Err(Error::Config(format!(
                "unknown segment order {other:?}, expected \"eq1\" or \"eq7\""
            ))),
        }
    }
}

/// Beamsplitter block for one mode pair.
pub fn bs_matrix(eta: f64, delta: f64) -> Matrix2<Complex64> {
    let r = eta.sin();
    let t = eta.cos();
    let ph = Complex64::from_polar(1.0, delta);
    Matrix2::new(
        ph * r,
        ph * t,
        Complex64::new(-t, 0.0),
        Complex64::new(r, 0.0),
    )
}

/// Unitary mode-mixing matrix over the full register.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    matrix: DMatrix<Complex64>,
}

impl ScatteringMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Wrap a raw matrix, rejecting anything that is not unitary.
    pub fn try_from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "scattering matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let candidate = Self { matrix };
        let defect = candidate.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(candidate)
    }

    fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Extend the register with identity-scattered fresh modes.
    pub(crate) fn pad_to(&mut self, dim: usize) {
        let n = self.dim();
        if dim <= n {
            return;
        }
        let mut padded = DMatrix::identity(dim, dim);
        padded.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        self.matrix = padded;
    }

    /// Left-multiply by one embedded pair block in place.
    pub(crate) fn apply_pair(&mut self, p: usize, block: &Matrix2<Complex64>) {
        apply_pair_left(&mut self.matrix, p, block);
    }

    /// Max-norm distance of S S^dagger from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let product = &self.matrix * self.matrix.adjoint();
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                defect = defect.max((product[(i, j)] - want).norm());
            }
        }
        defect
    }
}

/// Left-multiply `matrix` by the pair block embedded at rows (p, p+1).
///
/// Touches only those two rows, so a chain of pair applications costs
/// O(dim) each instead of a dense product per pair.
pub(crate) fn apply_pair_left(
    matrix: &mut DMatrix<Complex64>,
    p: usize,
    block: &Matrix2<Complex64>,
) {
    let n = matrix.ncols();
    for j in 0..n {
        let a = matrix[(p, j)];
        let b = matrix[(p + 1, j)];
        matrix[(p, j)] = block[(0, 0)] * a + block[(0, 1)] * b;
        matrix[(p + 1, j)] = block[(1, 0)] * a + block[(1, 1)] * b;
    }
}

/// Embed a 2x2 block as the identity everywhere except pair (p, p+1).
pub fn embed_pair(block: &Matrix2<Complex64>, dim: usize, p: usize) -> Result<ScatteringMatrix> {
    if dim < 2 {
        return Err(Error::ShapeMismatch(format!(
            "embedding needs at least two modes, got {dim}"
        )));
    }
    if p + 1 >= dim {
        return Err(Error::IndexOutOfRange {
            index: p,
            len: dim - 1,
        });
    }
    let mut matrix = DMatrix::identity(dim, dim);
    apply_pair_left(&mut matrix, p, block);
    Ok(ScatteringMatrix::from_matrix_unchecked(matrix))
}

/// Scattering matrix of one full step.
///
/// `couplers` lists (pair position, coupler) in ascending pair position;
/// the segment order decides whether they are applied ascending or
/// descending. Every pair position must be distinct and fit in `dim`.
pub fn step_scattering(
    dim: usize,
    couplers: &[(usize, CouplerSpec)],
    order: SegmentOrder,
) -> Result<ScatteringMatrix> {
    validate_pairs(dim, couplers)?;
    let mut matrix = DMatrix::identity(dim, dim);
    match order {
        SegmentOrder::MemoryFirst => {
            for (p, c) in couplers {
                apply_pair_left(&mut matrix, *p, &c.block());
            }
        }
        SegmentOrder::MemoryLast => {
            for (p, c) in couplers.iter().rev() {
                apply_pair_left(&mut matrix, *p, &c.block());
            }
        }
    }
    Ok(ScatteringMatrix::from_matrix_unchecked(matrix))
}

fn validate_pairs(dim: usize, couplers: &[(usize, CouplerSpec)]) -> Result<()> {
    let mut prev: Option<usize> = None;
    for &(p, _) in couplers {
        if p + 1 >= dim {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: dim.saturating_sub(1),
            });
        }
        match prev {
            Some(q) if p == q => return Err(Error::DuplicateIndex(p)),
            Some(q) if p < q => {
                return Err(Error::InvalidParameter(
                    "couplers must be listed in ascending pair position".into(),
                ))
            }
            _ => {}
        }
        prev = Some(p);
    }
    Ok(())
}

/// Compose a new step onto the cumulative scattering matrix.
///
/// The previous matrix is padded with an identity block for modes added
/// this step; the step matrix multiplies from the left.
pub fn cumulative_scattering(
    previous: &ScatteringMatrix,
    step: &ScatteringMatrix,
) -> Result<ScatteringMatrix> {
    let (np, ns) = (previous.dim(), step.dim());
    if ns < np {
        return Err(Error::InvalidGrowth {
            step: ns,
            cumulative: np,
        });
    }
    let mut padded = DMatrix::identity(ns, ns);
    padded
        .view_mut((0, 0), (np, np))
        .copy_from(previous.matrix());
    Ok(ScatteringMatrix::from_matrix_unchecked(
        step.matrix() * padded,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn assert_complex_close(got: Complex64, want: Complex64, tol: f64) {
        assert!((got - want).norm() <= tol, "got {got}, want {want}");
    }

    #[test]
    fn balanced_coupler_block() {
        let b = bs_matrix(FRAC_PI_4, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_complex_close(b[(0, 0)], Complex64::new(h, 0.0), 1e-15);
        assert_complex_close(b[(0, 1)], Complex64::new(h, 0.0), 1e-15);
        assert_complex_close(b[(1, 0)], Complex64::new(-h, 0.0), 1e-15);
        assert_complex_close(b[(1, 1)], Complex64::new(h, 0.0), 1e-15);
    }

    #[test]
    fn phased_coupler_block() {
        let b = bs_matrix(FRAC_PI_3, PI);
        let s3 = 3.0f64.sqrt() / 2.0;
        assert_complex_close(b[(0, 0)], Complex64::new(-s3, 0.0), 1e-15);
        assert_complex_close(b[(0, 1)], Complex64::new(-0.5, 0.0), 1e-15);
        assert_complex_close(b[(1, 0)], Complex64::new(-0.5, 0.0), 1e-15);
        assert_complex_close(b[(1, 1)], Complex64::new(s3, 0.0), 1e-15);
    }

    #[test]
    fn coupler_spec_rejects_out_of_range_angles() {
        assert!(CouplerSpec::new(-0.1, 0.0).is_err());
        assert!(CouplerSpec::new(FRAC_PI_2 + 0.1, 0.0).is_err());
        assert!(CouplerSpec::new(0.3, f64::NAN).is_err());
    }

    #[test]
    fn embed_places_block_on_requested_pair() {
        let b = bs_matrix(FRAC_PI_3, 0.4);
        let top = embed_pair(&b, 3, 0).unwrap();
        assert_complex_close(top.matrix()[(0, 0)], b[(0, 0)], 1e-15);
        assert_complex_close(top.matrix()[(2, 2)], Complex64::new(1.0, 0.0), 1e-15);
        assert_complex_close(top.matrix()[(0, 2)], Complex64::new(0.0, 0.0), 1e-15);

        let bottom = embed_pair(&b, 3, 1).unwrap();
        assert_complex_close(bottom.matrix()[(0, 0)], Complex64::new(1.0, 0.0), 1e-15);
        assert_complex_close(bottom.matrix()[(1, 1)], b[(0, 0)], 1e-15);
        assert_complex_close(bottom.matrix()[(2, 1)], b[(1, 0)], 1e-15);
    }

    #[test]
    fn embed_rejects_pair_past_the_register() {
        let b = bs_matrix(FRAC_PI_4, 0.0);
        assert!(embed_pair(&b, 3, 2).is_err());
        assert!(embed_pair(&b, 1, 0).is_err());
    }

    #[test]
    fn step_order_decides_product_direction() {
        let c1 = CouplerSpec::new(FRAC_PI_3, 0.7).unwrap();
        let c2 = CouplerSpec::new(FRAC_PI_4, 1.9).unwrap();
        let couplers = vec![(0usize, c1), (1usize, c2)];

        let g1 = embed_pair(&c1.block(), 3, 0).unwrap();
        let g2 = embed_pair(&c2.block(), 3, 1).unwrap();

        let ascending = step_scattering(3, &couplers, SegmentOrder::MemoryFirst).unwrap();
        let want_asc = g2.matrix() * g1.matrix();
        assert!((ascending.matrix() - &want_asc).norm() < 1e-14);

        let descending = step_scattering(3, &couplers, SegmentOrder::MemoryLast).unwrap();
        let want_desc = g1.matrix() * g2.matrix();
        assert!((descending.matrix() - &want_desc).norm() < 1e-14);

        // Overlapping pairs do not commute, so the two orders must differ.
        assert!((ascending.matrix() - descending.matrix()).norm() > 1e-3);
    }

    #[test]
    fn step_rejects_duplicate_or_unsorted_pairs() {
        let c = CouplerSpec::new(FRAC_PI_4, 0.0).unwrap();
        assert!(matches!(
            step_scattering(4, &[(1, c), (1, c)], SegmentOrder::MemoryLast),
            Err(Error::DuplicateIndex(1))
        ));
        assert!(step_scattering(4, &[(2, c), (1, c)], SegmentOrder::MemoryLast).is_err());
        assert!(step_scattering(3, &[(2, c)], SegmentOrder::MemoryLast).is_err());
    }

    #[test]
    fn single_pair_step_equals_embedding() {
        let c = CouplerSpec::new(0.9, 2.2).unwrap();
        let step = step_scattering(4, &[(2, c)], SegmentOrder::MemoryLast).unwrap();
        let embedded = embed_pair(&c.block(), 4, 2).unwrap();
        assert!((step.matrix() - embedded.matrix()).norm() < 1e-15);
    }

    #[test]
    fn cumulative_pads_previous_with_identity() {
        let c = CouplerSpec::new(FRAC_PI_3, 0.3).unwrap();
        let prev = step_scattering(3, &[(1, c)], SegmentOrder::MemoryLast).unwrap();
        let cnew = CouplerSpec::new(FRAC_PI_4, 1.0).unwrap();
        let step = step_scattering(4, &[(1, cnew), (2, cnew)], SegmentOrder::MemoryLast).unwrap();

        let got = cumulative_scattering(&prev, &step).unwrap();

        let mut padded = DMatrix::<Complex64>::identity(4, 4);
        padded.view_mut((0, 0), (3, 3)).copy_from(prev.matrix());
        let want = step.matrix() * padded;
        assert!((got.matrix() - &want).norm() < 1e-14);
        assert_eq!(got.dim(), 4);
    }

    #[test]
    fn cumulative_rejects_shrinking_register() {
        let big = ScatteringMatrix::identity(4);
        let small = ScatteringMatrix::identity(3);
        assert!(matches!(
            cumulative_scattering(&big, &small),
            Err(Error::InvalidGrowth {
                step: 3,
                cumulative: 4
            })
        ));
    }

    #[test]
    fn try_from_matrix_rejects_non_unitary_input() {
        let m = DMatrix::<Complex64>::identity(3, 3) * Complex64::new(2.0, 0.0);
        assert!(matches!(
            ScatteringMatrix::try_from_matrix(m),
            Err(Error::NotUnitary { .. })
        ));
        let ok = DMatrix::<Complex64>::identity(3, 3);
        assert!(ScatteringMatrix::try_from_matrix(ok).is_ok());
    }

    #[test]
    fn wire_names_round_trip() {
        for order in [SegmentOrder::MemoryLast, SegmentOrder::MemoryFirst] {
            assert_eq!(
                SegmentOrder::from_wire_name(order.wire_name()).unwrap(),
                order
            );
        }
        assert!(SegmentOrder::from_wire_name("eq2").is_err());
    }

    proptest! {
        #[test]
        fn coupler_blocks_are_unitary(eta in 0.0..FRAC_PI_2, delta in 0.0..std::f64::consts::TAU) {
            let b = bs_matrix(eta, delta);
            let product = b * b.adjoint();
            prop_assert!((product - Matrix2::identity()).norm() < 1e-14);
        }

        #[test]
        fn step_chains_stay_unitary(
            etas in proptest::collection::vec(0.05..(FRAC_PI_2 - 0.05), 1..6),
            deltas in proptest::collection::vec(0.0..std::f64::consts::TAU, 6),
            ascending in proptest::bool::ANY,
        ) {
            let dim = etas.len() + 2;
            let couplers: Vec<(usize, CouplerSpec)> = etas
                .iter()
                .enumerate()
                .map(|(i, &eta)| (i + 1, CouplerSpec::new(eta, deltas[i]).unwrap()))
                .collect();
            let order = if ascending { SegmentOrder::MemoryFirst } else { SegmentOrder::MemoryLast };
            let step = step_scattering(dim, &couplers, order).unwrap();
            prop_assert!(step.unitarity_defect() < UNITARITY_TOL);
        }
    }
}
