//! Standard channel families.

use serde::{Deserialize, Serialize};

use crate::channel::{paulis, QuantumChannel};
use crate::error::{domain, Result};
use crate::linalg::{c, CMat};
use crate::random;

fn check_unit(name: &str, v: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&v) {
        return domain(format!("{name} = {v} outside [0, {hi}]"));
    }
    Ok(())
}

/// Mixed-Pauli channel `sum_k w_k P_k rho P_k` over `(1, X, Y, Z)`;
/// zero-weight terms are dropped.
pub fn pauli_channel(weights: [f64; 4]) -> Result<QuantumChannel> {
    let ps = paulis();
    let kraus: Vec<CMat> = ps
        .iter()
        .zip(weights)
        .filter(|&(_, w)| w > 0.0)
        .map(|(p, w)| p * c(w.sqrt(), 0.0))
        .collect();
    QuantumChannel::from_kraus(kraus, 2, 2)
}

/// `(1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)`.
pub fn depolarizing(p: f64) -> Result<QuantumChannel> {
    check_unit("p", p, 1.0)?;
    pauli_channel([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
}

/// Independent bit flip (`p_x`) and phase flip (`p_z`).
pub fn bb84(p_x: f64, p_z: f64) -> Result<QuantumChannel> {
    check_unit("p_x", p_x, 0.5)?;
    check_unit("p_z", p_z, 0.5)?;
    pauli_channel([(1.0 - p_x) * (1.0 - p_z), p_x * (1.0 - p_z), p_x * p_z, p_z * (1.0 - p_x)])
}

pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    check_unit("gamma", gamma, 1.0)?;
    let mut kraus = vec![CMat::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)],
    )];
    if gamma > 0.0 {
        kraus.push(CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
    }
    QuantumChannel::from_kraus(kraus, 2, 2)
}

/// Qubit erasure channel; the output is a qutrit whose last level is the erasure flag.
pub fn erasure(p: f64) -> Result<QuantumChannel> {
    check_unit("p", p, 1.0)?;
    let mut kraus = Vec::new();
    if p < 1.0 {
        let s = (1.0 - p).sqrt();
        let mut k = CMat::zeros(3, 2);
        k[(0, 0)] = c(s, 0.0);
        k[(1, 1)] = c(s, 0.0);
        kraus.push(k);
    }
    if p > 0.0 {
        for a in 0..2 {
            let mut k = CMat::zeros(3, 2);
            k[(2, a)] = c(p.sqrt(), 0.0);
            kraus.push(k);
        }
    }
    QuantumChannel::from_kraus(kraus, 2, 3)
}

/// Complementary channel of the random-unitary channel
/// `rho -> (1/|B|) sum_i U_i rho U_i^*` with `|B|` seeded Haar unitaries on `A`.
/// The result maps `A` to `B`, and its complementary channel is the
/// random-unitary channel itself.
pub fn random_unitary_complement(dim_a: usize, dim_b: usize, seed: u64) -> Result<QuantumChannel> {
    if dim_a < 1 || dim_b < 1 {
        return domain("dimensions must be positive");
    }
    let mut rng = random::rng(seed);
    let scale = c(1.0 / (dim_b as f64).sqrt(), 0.0);
    let kraus: Vec<CMat> = (0..dim_b).map(|_| random::haar_unitary(&mut rng, dim_a) * scale).collect();
    let mixing = QuantumChannel::from_kraus(kraus, dim_a, dim_a)?;
    Ok(mixing.stinespring().environment_channel())
}

/// Serializable description of a family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChannelFamilySpec {
    Depolarizing { p: f64 },
    Bb84 { p_x: f64, p_z: f64 },
    AmplitudeDamping { gamma: f64 },
    Erasure { p: f64 },
    RandomUnitaryComplement { dim_a: usize, dim_b: usize, seed: u64 },
}

impl ChannelFamilySpec {
    pub fn build(&self) -> Result<QuantumChannel> {
        match *self {
            Self::Depolarizing { p } => depolarizing(p),
            Self::Bb84 { p_x, p_z } => bb84(p_x, p_z),
            Self::AmplitudeDamping { gamma } => amplitude_damping(gamma),
            Self::Erasure { p } => erasure(p),
            Self::RandomUnitaryComplement { dim_a, dim_b, seed } => random_unitary_complement(dim_a, dim_b, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Depolarizing { .. } => "depolarizing",
            Self::Bb84 { .. } => "bb84",
            Self::AmplitudeDamping { .. } => "amplitude_damping",
            Self::Erasure { .. } => "erasure",
            Self::RandomUnitaryComplement { .. } => "random_unitary_complement",
        }
    }
}
