//! Quantum channels and their representations.
//!
//! Conventions:
//! - Choi matrix `J = sum_ij Phi(|i><j|) (x) |i><j|`, output factor first, so
//!   `J[(i,k),(j,l)] = Phi(|k><l|)[i,j]` and `Tr_out J = 1_in`.
//! - Transfer matrix acts on row-major vectorised operators:
//!   `vec(Phi(X)) = T vec(X)`, giving `T = sum_x F_x (x) conj(F_x)` and
//!   `T[(i,j),(k,l)] = J[(i,k),(j,l)]`.
//! - Stinespring isometry `V = sum_x F_x (x) |x>_E`, output factor first.

use nalgebra::DVector;

use crate::error::{shape, Error, Result};
use crate::linalg::{self, c, CMat, C64, ONE, ZERO};
use crate::operator::{DensityOperator, HermitianOperator};

/// Largest completeness residual accepted by [`QuantumChannel::from_kraus`].
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Tolerance for the CP and TP checks on Choi matrices.
pub const CHOI_TOL: f64 = 1e-10;
/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const RANK_CUTOFF: f64 = 1e-12;

/// A completely positive trace-preserving map stored as a Kraus family.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
    residual: f64,
}

impl QuantumChannel {
    /// Validates a Kraus family `{F_x}` of `dim_out x dim_in` matrices.
    pub fn from_kraus(kraus: Vec<CMat>, dim_in: usize, dim_out: usize) -> Result<Self> {
        if kraus.is_empty() {
            return shape("Kraus family is empty");
        }
        if dim_in == 0 || dim_out == 0 {
            return shape("channel dimensions must be positive");
        }
        for (x, f) in kraus.iter().enumerate() {
            if f.nrows() != dim_out || f.ncols() != dim_in {
                return shape(format!(
                    "Kraus operator {x} is {}x{}, expected {dim_out}x{dim_in}",
                    f.nrows(),
                    f.ncols()
                ));
            }
        }
        let residual = completeness_residual(&kraus, dim_in);
        if residual > COMPLETENESS_TOL {
            return Err(Error::CompletenessViolation { residual });
        }
        Ok(Self { dim_in, dim_out, kraus, residual })
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(linalg::identity(dim)).expect("identity is unitary")
    }

    pub fn unitary(u: CMat) -> Result<Self> {
        let (rows, cols) = u.shape();
        Self::from_kraus(vec![u], cols, rows)
    }

    /// `rho -> Tr(rho) sigma`.
    pub fn replacement(sigma: &DensityOperator, dim_in: usize) -> Self {
        let d = sigma.dim();
        let (w, v) = linalg::eigh(sigma.matrix());
        let mut kraus = Vec::new();
        for k in 0..d {
            if w[k] <= RANK_CUTOFF {
                continue;
            }
            let amp = c(w[k].sqrt(), 0.0);
            for j in 0..dim_in {
                let mut f = CMat::zeros(d, dim_in);
                for i in 0..d {
                    f[(i, j)] = amp * v[(i, k)];
                }
                kraus.push(f);
            }
        }
        Self::from_kraus(kraus, dim_in, d).expect("replacement channel is cptp")
    }

    /// `rho -> Tr(rho) 1/dim_out`.
    pub fn completely_depolarizing(dim_in: usize, dim_out: usize) -> Self {
        Self::replacement(&DensityOperator::maximally_mixed(dim_out), dim_in)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// Length of the stored Kraus family, which need not be minimal.
    pub fn kraus_len(&self) -> usize {
        self.kraus.len()
    }

    /// `||sum F^dag F - 1||_op` measured at construction.
    pub fn completeness_residual(&self) -> f64 {
        self.residual
    }

    /// Applies the channel to an arbitrary operator on the input space.
    pub fn apply_matrix(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_out, self.dim_out);
        for f in &self.kraus {
            out += f * x * f.adjoint();
        }
        out
    }

    /// Heisenberg-picture adjoint `Y -> sum F^dag Y F`.
    pub fn adjoint_apply(&self, y: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_in, self.dim_in);
        for f in &self.kraus {
            out += f.adjoint() * y * f;
        }
        out
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim_in {
            return shape(format!("state has dimension {}, channel input is {}", rho.dim(), self.dim_in));
        }
        Ok(DensityOperator::from_matrix_unchecked(self.apply_matrix(rho.matrix())))
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.dim_out * self.dim_in;
        let mut j = CMat::zeros(n, n);
        for f in &self.kraus {
            let v = linalg::vec_row_major(f);
            j += &v * v.adjoint();
        }
        ChoiMatrix { dim_in: self.dim_in, dim_out: self.dim_out, m: linalg::hermitian_part(&j) }
    }

    pub fn from_choi(j: &ChoiMatrix) -> Result<Self> {
        j.validate(CHOI_TOL)?;
        Ok(j.kraus_channel(RANK_CUTOFF))
    }

    /// Canonical minimal Kraus family from the Choi spectrum.
    pub fn canonical(&self) -> Self {
        self.choi().kraus_channel(RANK_CUTOFF)
    }

    /// Number of Choi eigenvalues above `cutoff`.
    pub fn kraus_rank_with_cutoff(&self, cutoff: f64) -> usize {
        // nonzero spectrum of the Kraus Gram matrix equals that of the Choi matrix
        let gram = self.kraus_gram();
        linalg::eigvalsh(&gram).iter().filter(|&&w| w > cutoff).count()
    }

    pub fn kraus_rank(&self) -> usize {
        self.kraus_rank_with_cutoff(RANK_CUTOFF)
    }

    /// True when the stored Kraus family is linearly independent.
    pub fn is_minimal(&self) -> bool {
        self.kraus_rank() == self.kraus.len()
    }

    fn kraus_gram(&self) -> CMat {
        let k = self.kraus.len();
        CMat::from_fn(k, k, |x, y| linalg::trace(&(self.kraus[x].adjoint() * &self.kraus[y])))
    }

    pub fn stinespring(&self) -> StinespringIsometry {
        StinespringIsometry::from_kraus(&self.kraus, self.dim_in, self.dim_out)
    }

    /// Complementary channel onto a minimal environment. A minimal Kraus family
    /// is used as given, so its environment basis is kept; otherwise the family
    /// is canonicalised first.
    pub fn complementary(&self) -> Self {
        if self.is_minimal() {
            self.stinespring().environment_channel()
        } else {
            self.canonical().stinespring().environment_channel()
        }
    }

    pub fn transfer_matrix(&self) -> TransferMatrix {
        let mut t = CMat::zeros(self.dim_out * self.dim_out, self.dim_in * self.dim_in);
        for f in &self.kraus {
            t += linalg::kron(f, &f.map(|z| z.conj()));
        }
        TransferMatrix { dim_in: self.dim_in, dim_out: self.dim_out, m: t }
    }

    /// `outer . inner`, with Kraus family `{G_y F_x}`.
    pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<Self> {
        if inner.dim_out != outer.dim_in {
            return shape(format!(
                "cannot compose: inner output {} != outer input {}",
                inner.dim_out, outer.dim_in
            ));
        }
        let kraus = outer.kraus.iter().flat_map(|g| inner.kraus.iter().map(move |f| g * f)).collect();
        Self::from_kraus(kraus, inner.dim_in, outer.dim_out)
    }

    /// `a (x) b`, with Kraus family `{F_x (x) G_y}`.
    pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> Self {
        let kraus = a.kraus.iter().flat_map(|f| b.kraus.iter().map(move |g| linalg::kron(f, g))).collect();
        Self::from_kraus(kraus, a.dim_in * b.dim_in, a.dim_out * b.dim_out).expect("tensor of channels is cptp")
    }

    /// `(1 - t) a + t b` for channels with equal dimensions and `t` in `[0, 1]`.
    pub fn mixture(a: &QuantumChannel, b: &QuantumChannel, t: f64) -> Result<Self> {
        if a.dim_in != b.dim_in || a.dim_out != b.dim_out {
            return shape("mixture of channels with different dimensions");
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::DomainError(format!("mixing weight {t} outside [0, 1]")));
        }
        let (wa, wb) = (c((1.0 - t).sqrt(), 0.0), c(t.sqrt(), 0.0));
        let mut kraus: Vec<CMat> = Vec::new();
        if t < 1.0 {
            kraus.extend(a.kraus.iter().map(|f| f * wa));
        }
        if t > 0.0 {
            kraus.extend(b.kraus.iter().map(|g| g * wb));
        }
        Self::from_kraus(kraus, a.dim_in, a.dim_out)
    }

    /// Rescales the Kraus family so that `sum F^dag F = 1` holds to machine
    /// precision. Meant for maps whose completeness is only approximate, such
    /// as solver output.
    pub fn renormalized(&self) -> Self {
        let mut s = CMat::zeros(self.dim_in, self.dim_in);
        for f in &self.kraus {
            s += f.adjoint() * f;
        }
        let inv_sqrt = linalg::hermitian_fn(&s, |w| 1.0 / w.max(f64::MIN_POSITIVE).sqrt());
        let kraus: Vec<CMat> = self.kraus.iter().map(|f| f * &inv_sqrt).collect();
        let residual = completeness_residual(&kraus, self.dim_in);
        Self { dim_in: self.dim_in, dim_out: self.dim_out, kraus, residual }
    }
}

fn completeness_residual(kraus: &[CMat], dim_in: usize) -> f64 {
    let mut s = -linalg::identity(dim_in);
    for f in kraus {
        s += f.adjoint() * f;
    }
    linalg::op_norm(&s)
}

/// The Choi matrix of a linear map, `(|B||A|) x (|B||A|)`, output factor first.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    m: CMat,
}

impl ChoiMatrix {
    /// Wraps a Hermitian matrix. Complete positivity and trace preservation are
    /// not checked here; see [`ChoiMatrix::validate`].
    pub fn new(m: CMat, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = dim_in * dim_out;
        if m.nrows() != n || m.ncols() != n {
            return shape(format!("Choi matrix is {}x{}, expected {n}x{n}", m.nrows(), m.ncols()));
        }
        let h = HermitianOperator::new(m)?;
        Ok(Self { dim_in, dim_out, m: h.into_matrix() })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.m).min()
    }

    /// `Tr_out J`, which equals `1_in` for trace-preserving maps.
    pub fn input_marginal(&self) -> CMat {
        linalg::partial_trace(&self.m, &[self.dim_out, self.dim_in], &[1]).expect("dims are consistent")
    }

    /// `||Tr_out J - 1||_op`.
    pub fn tp_residual(&self) -> f64 {
        linalg::op_norm(&(self.input_marginal() - linalg::identity(self.dim_in)))
    }

    /// Checks complete positivity and trace preservation at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue });
        }
        let residual = self.tp_residual();
        if residual > tol {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(())
    }

    /// Kraus family from the eigenvectors with eigenvalue above `cutoff`. The
    /// caller is responsible for having validated the matrix.
    pub(crate) fn kraus_channel(&self, cutoff: f64) -> QuantumChannel {
        let (w, v) = linalg::eigh(&self.m);
        let mut kraus = Vec::new();
        for k in (0..w.len()).rev() {
            if w[k] <= cutoff {
                break;
            }
            let col: DVector<C64> = v.column(k) * c(w[k].sqrt(), 0.0);
            kraus.push(linalg::unvec_row_major(&col, self.dim_out, self.dim_in));
        }
        let residual = completeness_residual(&kraus, self.dim_in);
        QuantumChannel { dim_in: self.dim_in, dim_out: self.dim_out, kraus, residual }
    }

    /// Converts to a channel after validating at `tol` and dropping eigenvalues
    /// at or below `cutoff`, then renormalises the result to exact
    /// completeness.
    pub fn to_channel_with(&self, tol: f64, cutoff: f64) -> Result<QuantumChannel> {
        self.validate(tol)?;
        Ok(self.kraus_channel(cutoff).renormalized())
    }

    /// Output of the map computed as `Tr_in[J (1 (x) X^T)]`.
    pub fn apply_matrix(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim_in || x.ncols() != self.dim_in {
            return shape("operator does not match the Choi input dimension");
        }
        let lifted = &self.m * linalg::kron(&linalg::identity(self.dim_out), &x.transpose());
        linalg::partial_trace(&lifted, &[self.dim_out, self.dim_in], &[0])
    }

    pub fn transfer_matrix(&self) -> TransferMatrix {
        let (a, b) = (self.dim_in, self.dim_out);
        let mut t = CMat::zeros(b * b, a * a);
        for i in 0..b {
            for j in 0..b {
                for k in 0..a {
                    for l in 0..a {
                        t[(i * b + j, k * a + l)] = self.m[(i * a + k, j * a + l)];
                    }
                }
            }
        }
        TransferMatrix { dim_in: a, dim_out: b, m: t }
    }

    /// Choi matrix of `a (x) b`, obtained by reordering `J(a) (x) J(b)` from
    /// `B1 A1 B2 A2` to `B1 B2 A1 A2`.
    pub fn tensor(a: &ChoiMatrix, b: &ChoiMatrix) -> ChoiMatrix {
        let dims = [a.dim_out, a.dim_in, b.dim_out, b.dim_in];
        let p = linalg::permutation_operator(&dims, &[0, 2, 1, 3]);
        let m = &p * linalg::kron(&a.m, &b.m) * p.adjoint();
        ChoiMatrix { dim_in: a.dim_in * b.dim_in, dim_out: a.dim_out * b.dim_out, m }
    }
}

/// The matrix of a map acting on row-major vectorised operators.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    dim_in: usize,
    dim_out: usize,
    m: CMat,
}

impl TransferMatrix {
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// The inverse reshuffle back to the Choi matrix.
    pub fn to_choi(&self) -> ChoiMatrix {
        let (a, b) = (self.dim_in, self.dim_out);
        let mut j = CMat::zeros(a * b, a * b);
        for i in 0..b {
            for jj in 0..b {
                for k in 0..a {
                    for l in 0..a {
                        j[(i * a + k, jj * a + l)] = self.m[(i * b + jj, k * a + l)];
                    }
                }
            }
        }
        ChoiMatrix { dim_in: a, dim_out: b, m: j }
    }

    /// Transfer matrix of `outer . inner`.
    pub fn compose(outer: &TransferMatrix, inner: &TransferMatrix) -> Result<TransferMatrix> {
        if inner.dim_out != outer.dim_in {
            return shape("transfer matrices cannot be composed");
        }
        Ok(TransferMatrix { dim_in: inner.dim_in, dim_out: outer.dim_out, m: &outer.m * &inner.m })
    }
}

/// An isometry `V: A -> B (x) E` with output factor first.
#[derive(Clone, Debug)]
pub struct StinespringIsometry {
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
    v: CMat,
}

impl StinespringIsometry {
    fn from_kraus(kraus: &[CMat], dim_in: usize, dim_out: usize) -> Self {
        let dim_env = kraus.len();
        let mut v = CMat::zeros(dim_out * dim_env, dim_in);
        for (x, f) in kraus.iter().enumerate() {
            for b in 0..dim_out {
                for a in 0..dim_in {
                    v[(b * dim_env + x, a)] = f[(b, a)];
                }
            }
        }
        Self { dim_in, dim_out, dim_env, v }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    /// `||V^dag V - 1||_op`.
    pub fn isometry_defect(&self) -> f64 {
        linalg::op_norm(&(self.v.adjoint() * &self.v - linalg::identity(self.dim_in)))
    }

    /// `V rho V^dag` on `B (x) E`.
    pub fn dilate(&self, rho: &CMat) -> CMat {
        &self.v * rho * self.v.adjoint()
    }

    /// The channel `rho -> Tr_E[V rho V^dag]`.
    pub fn output_channel(&self) -> QuantumChannel {
        let kraus = (0..self.dim_env)
            .map(|x| CMat::from_fn(self.dim_out, self.dim_in, |b, a| self.v[(b * self.dim_env + x, a)]))
            .collect();
        QuantumChannel::from_kraus(kraus, self.dim_in, self.dim_out).expect("marginal of an isometry is cptp")
    }

    /// The channel `rho -> Tr_B[V rho V^dag]`.
    pub fn environment_channel(&self) -> QuantumChannel {
        let kraus = (0..self.dim_out)
            .map(|b| CMat::from_fn(self.dim_env, self.dim_in, |x, a| self.v[(b * self.dim_env + x, a)]))
            .collect();
        QuantumChannel::from_kraus(kraus, self.dim_in, self.dim_env).expect("marginal of an isometry is cptp")
    }
}

/// Partial trace of a Hermitian operator over every factor not in `keep`.
pub fn partial_trace(op: &HermitianOperator, dims: &[usize], keep: &[usize]) -> Result<HermitianOperator> {
    let m = linalg::partial_trace(op.matrix(), dims, keep)?;
    Ok(HermitianOperator::from_matrix_unchecked(m))
}

/// Pauli matrices `[I, X, Y, Z]`.
pub fn paulis() -> [CMat; 4] {
    let i = c(0.0, 1.0);
    [
        linalg::identity(2),
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dep(p: f64) -> QuantumChannel {
        let [i, x, y, z] = paulis();
        let w = c((p / 3.0).sqrt(), 0.0);
        QuantumChannel::from_kraus(vec![i * c((1.0 - p).sqrt(), 0.0), x * w, y * w, z * w], 2, 2).unwrap()
    }

    #[test]
    fn identity_choi_is_twice_the_bell_projector() {
        let j = QuantumChannel::identity(2).choi();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if (r == 0 || r == 3) && (col == 0 || col == 3) { 1.0 } else { 0.0 };
                assert!((j.matrix()[(r, col)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn completely_depolarizing_choi() {
        let j = QuantumChannel::completely_depolarizing(2, 2).choi();
        assert!(linalg::max_abs_diff(j.matrix(), &(linalg::identity(4) * c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn duplicated_identity_is_incomplete() {
        let err = QuantumChannel::from_kraus(vec![linalg::identity(2), linalg::identity(2)], 2, 2).unwrap_err();
        assert!(matches!(err, Error::CompletenessViolation { residual } if (residual - 1.0).abs() < 1e-12));
    }

    #[test]
    fn wrong_kraus_shape() {
        let err = QuantumChannel::from_kraus(vec![linalg::identity(3)], 2, 2).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn choi_with_negative_eigenvalue_is_rejected() {
        let m = CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), ZERO, ZERO, c(-0.01, 0.0)]));
        let j = ChoiMatrix::new(m, 2, 2).unwrap();
        assert!(matches!(QuantumChannel::from_choi(&j), Err(Error::NotCompletelyPositive { .. })));
    }

    #[test]
    fn choi_of_non_tp_map_is_rejected() {
        let j = ChoiMatrix::new(linalg::identity(4), 2, 2).unwrap();
        assert!(matches!(QuantumChannel::from_choi(&j), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn depolarizing_round_trip_through_choi() {
        let p = 0.1;
        let back = QuantumChannel::from_choi(&dep(p).choi()).unwrap();
        assert_eq!(back.kraus_len(), 4);
        let out = back.apply(&DensityOperator::basis(2, 0)).unwrap();
        assert!((out.matrix()[(0, 0)].re - (1.0 - 2.0 * p / 3.0)).abs() < 1e-12);
        assert!((out.matrix()[(1, 1)].re - 2.0 * p / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_complement_is_trace() {
        let comp = QuantumChannel::identity(2).complementary();
        assert_eq!(comp.dim_out(), 1);
        let out = comp.apply(&DensityOperator::maximally_mixed(2)).unwrap();
        assert!((out.matrix()[(0, 0)] - ONE).norm() < 1e-14);
    }

    #[test]
    fn non_minimal_family_is_canonicalised_before_complementing() {
        let half = c(0.5f64.sqrt(), 0.0);
        let ch = QuantumChannel::from_kraus(vec![linalg::identity(2) * half, linalg::identity(2) * half], 2, 2).unwrap();
        assert!(!ch.is_minimal());
        assert_eq!(ch.complementary().dim_out(), 1);
    }

    #[test]
    fn transfer_matrix_of_unitary() {
        let u = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let t = QuantumChannel::unitary(u.clone()).unwrap().transfer_matrix();
        let expected = linalg::kron(&u, &u.map(|z| z.conj()));
        assert!(linalg::max_abs_diff(t.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn stinespring_is_isometric() {
        let v = dep(0.1).stinespring();
        assert_eq!(v.matrix().shape(), (8, 2));
        assert!(v.isometry_defect() < 1e-14);
    }

    #[test]
    fn composition_of_depolarizing_channels() {
        let (p, q) = (0.1, 0.1);
        let composed = QuantumChannel::compose(&dep(p), &dep(q)).unwrap();
        let expected = dep(p + q - 4.0 * p * q / 3.0);
        assert!(linalg::max_abs_diff(composed.choi().matrix(), expected.choi().matrix()) < 1e-12);
    }

    #[test]
    fn choi_apply_matches_kraus_apply() {
        let x = CMat::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.3, 0.0)]);
        let ch = dep(0.2);
        let via_choi = ch.choi().apply_matrix(&x).unwrap();
        assert!(linalg::max_abs_diff(&via_choi, &ch.apply_matrix(&x)) < 1e-14);
    }
}
