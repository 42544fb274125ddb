use nalgebra::{DVector, RowDVector};

use crate::error::{domain, shape, Result};
use crate::linalg::{self, c, CMat, C64};

/// Tolerance for accepting a matrix as Hermitian, entrywise.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on the eigenvalues and trace of a density operator.
pub const STATE_TOL: f64 = 1e-10;

/// A Hermitian matrix. The stored matrix is exactly Hermitian: the input is
/// replaced by its Hermitian part after validation.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMat,
}

impl HermitianOperator {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return shape(format!("operator must be square, got {}x{}", m.nrows(), m.ncols()));
        }
        let defect = linalg::hermiticity_defect(&m);
        if defect > HERMITIAN_TOL {
            return domain(format!("operator is not Hermitian (defect {defect:.3e})"));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMat) -> Self {
        Self { m: linalg::hermitian_part(&m) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.m).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        linalg::eigvalsh(&self.m)
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm_hermitian(&self.m)
    }
}

/// A positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    base: HermitianOperator,
}

impl DensityOperator {
    pub fn new(m: CMat) -> Result<Self> {
        let base = HermitianOperator::new(m)?;
        let tr = base.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return domain(format!("density operator has trace {tr}"));
        }
        let min = base.eigenvalues().min();
        if min < -STATE_TOL {
            return domain(format!("density operator has eigenvalue {min:.3e}"));
        }
        Ok(Self { base })
    }

    /// Wraps a matrix produced by a trusted computation (e.g. a channel
    /// output) without re-validating it.
    pub(crate) fn from_matrix_unchecked(m: CMat) -> Self {
        Self { base: HermitianOperator::from_matrix_unchecked(m) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(linalg::identity(dim) * c(1.0 / dim as f64, 0.0))
    }

    /// `|k><k|` in the computational basis.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self::from_matrix_unchecked(linalg::unit(dim, dim, k, k))
    }

    /// `|psi><psi|` for a (not necessarily normalised) nonzero vector.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return domain("zero state vector");
        }
        let v = psi / c(norm, 0.0);
        let bra: RowDVector<C64> = v.adjoint();
        Ok(Self::from_matrix_unchecked(&v * bra))
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.base.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn into_matrix(self) -> CMat {
        self.base.into_matrix()
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.base.eigenvalues()
    }

    /// `||rho - sigma||_1`, the unnormalised trace distance.
    pub fn trace_distance(&self, other: &DensityOperator) -> f64 {
        linalg::trace_norm_hermitian(&(self.matrix() - other.matrix()))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self::from_matrix_unchecked(linalg::kron(self.matrix(), other.matrix()))
    }
}

impl TryFrom<CMat> for DensityOperator {
    type Error = crate::error::Error;

    fn try_from(m: CMat) -> Result<Self> {
        Self::new(m)
    }
}
