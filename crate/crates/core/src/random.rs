//! Seeded random states, unitaries and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::QuantumChannel;
use crate::linalg::{c, CMat, C64};
use crate::operator::DensityOperator;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(s * re, s * im)
    })
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phases of `R` removed).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Random density matrix of the given rank (`G G^* / Tr`, `G` Ginibre `dim x rank`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    let g = ginibre(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let t = crate::linalg::trace(&m).re;
    DensityOperator::from_matrix_unchecked(crate::linalg::hermitian_part(&(m / c(t, 0.0))))
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    random_density(rng, dim, 1)
}

/// Channel with `kraus_len` Kraus operators cut from a Haar isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize, kraus_len: usize) -> QuantumChannel {
    let k = kraus_len.max(1);
    let u = haar_unitary(rng, dim_out * k);
    let kraus = (0..k)
        .map(|x| CMat::from_fn(dim_out, dim_in, |b, a| u[(b * k + x, a)]))
        .collect();
    QuantumChannel::from_kraus(kraus, dim_in, dim_out).expect("columns of a unitary form an isometry")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let u = haar_unitary(&mut rng(7), 4);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(4)) < 1e-12);
        assert_eq!(u, haar_unitary(&mut rng(7), 4));
    }

    #[test]
    fn random_objects_are_valid() {
        let mut r = rng(1);
        let rho = random_density(&mut r, 3, 2);
        assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
        let ch = random_channel(&mut r, 2, 3, 2);
        assert!(ch.completeness_residual() < 1e-12);
    }
}
