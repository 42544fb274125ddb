//! Entropies in bits.

use crate::channel::QuantumChannel;
use crate::error::{domain, shape, Result};
use crate::linalg::{self, CMat};
use crate::operator::DensityOperator;

/// Eigenvalues below this count as zero.
pub const EIGEN_CLAMP: f64 = 1e-15;

/// `-sum p log2 p` over a spectrum, with `0 log 0 = 0`.
pub fn shannon(spectrum: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = spectrum.into_iter().filter(|&p| p > EIGEN_CLAMP).map(|p| -p * p.log2()).sum();
    h.max(0.0)
}

/// Entropy of the Hermitian part of `m`, which should be a density matrix.
pub(crate) fn matrix_entropy(m: &CMat) -> f64 {
    shannon(linalg::eigvalsh(m).iter().copied())
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    matrix_entropy(rho.matrix())
}

/// Binary entropy, exactly zero at both endpoints.
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("binary entropy argument {alpha} outside [0, 1]"));
    }
    Ok(h2(alpha))
}

/// Binary entropy for arguments already known to lie in `[0, 1]`.
pub(crate) fn h2(a: f64) -> f64 {
    if a <= 0.0 || a >= 1.0 {
        0.0
    } else {
        -a * a.log2() - (1.0 - a) * (1.0 - a).log2()
    }
}

/// `H(Phi(rho)) - H(Phi^c(rho))`.
pub fn coherent_information(rho: &DensityOperator, channel: &QuantumChannel) -> Result<f64> {
    if rho.dim() != channel.dim_in() {
        return shape(format!("state has dimension {}, channel input is {}", rho.dim(), channel.dim_in()));
    }
    let comp = channel.complementary();
    Ok(matrix_entropy(&channel.apply_matrix(rho.matrix())) - matrix_entropy(&comp.apply_matrix(rho.matrix())))
}

/// `H(A|B) = H(AB) - H(B)` for a state on `A (x) B`.
pub fn conditional_entropy(rho_ab: &DensityOperator, dim_a: usize, dim_b: usize) -> Result<f64> {
    if rho_ab.dim() != dim_a * dim_b {
        return shape(format!("state has dimension {}, expected {dim_a}*{dim_b}", rho_ab.dim()));
    }
    let rho_b = linalg::partial_trace(rho_ab.matrix(), &[dim_a, dim_b], &[1])?;
    Ok(matrix_entropy(rho_ab.matrix()) - matrix_entropy(&rho_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use nalgebra::DVector;

    #[test]
    fn simple_entropies() {
        assert_eq!(von_neumann_entropy(&DensityOperator::basis(2, 0)), 0.0);
        assert!((von_neumann_entropy(&DensityOperator::maximally_mixed(2)) - 1.0).abs() < 1e-15);
        let rho = DensityOperator::new(CMat::from_diagonal(&DVector::from_vec(vec![c(0.75, 0.0), c(0.25, 0.0)]))).unwrap();
        assert!((von_neumann_entropy(&rho) - 0.811278124459).abs() < 1e-9);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.811278124459).abs() < 1e-9);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn identity_and_trace_channel() {
        let rho = DensityOperator::maximally_mixed(2);
        assert!((coherent_information(&rho, &QuantumChannel::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        let dep = QuantumChannel::completely_depolarizing(2, 2);
        assert!(coherent_information(&rho, &dep).unwrap() <= 1e-12);
    }

    #[test]
    fn conditional_entropy_of_bell_state() {
        let mut psi = DVector::zeros(4);
        psi[0] = c(1.0, 0.0);
        psi[3] = c(1.0, 0.0);
        let bell = DensityOperator::pure(&psi).unwrap();
        assert!((conditional_entropy(&bell, 2, 2).unwrap() + 1.0).abs() < 1e-12);
    }
}
