//! Maximization of entropy differences `H(Phi1(rho)) - H(Phi2(rho))` over
//! input states, used for the channel coherent information and `U_Xi`.
//!
//! States are parameterized as `rho = A A^* / Tr(A A^*)` and improved by
//! gradient ascent in `A` with Armijo backtracking. The objectives are not
//! concave in general, so several starts are used and the best is kept.

use serde::Serialize;

use crate::channel::QuantumChannel;
use crate::entropy::{matrix_entropy, EIGEN_CLAMP};
use crate::error::{shape, Result};
use crate::linalg::{self, c, CMat};
use crate::operator::DensityOperator;
use crate::random;

pub const DEFAULT_STARTS: usize = 20;
const SEED: u64 = 0x5eed_c0de;
const OBJECTIVE_TOL: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-7;
const MAX_ITERATIONS: usize = 5000;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct Maximum {
    pub value: f64,
    #[serde(skip)]
    pub argmax: DensityOperator,
    /// Whether the best start met the stopping rule before the iteration limit.
    pub converged: bool,
    pub iterations: usize,
    pub starts: usize,
}

struct Objective<'a> {
    plus: &'a QuantumChannel,
    minus: &'a QuantumChannel,
}

fn log2_clamped(m: &CMat) -> CMat {
    linalg::hermitian_fn(m, |x| x.max(EIGEN_CLAMP).log2())
}

impl Objective<'_> {
    fn value(&self, rho: &CMat) -> f64 {
        matrix_entropy(&self.plus.apply_matrix(rho)) - matrix_entropy(&self.minus.apply_matrix(rho))
    }

    /// Gradient with respect to `rho`, up to multiples of the identity.
    fn gradient(&self, rho: &CMat) -> CMat {
        let g = self.minus.adjoint_apply(&log2_clamped(&self.minus.apply_matrix(rho)))
            - self.plus.adjoint_apply(&log2_clamped(&self.plus.apply_matrix(rho)));
        linalg::hermitian_part(&g)
    }
}

fn state_of(a: &CMat) -> CMat {
    let m = a * a.adjoint();
    let t = linalg::trace(&m).re;
    linalg::hermitian_part(&(m / c(t, 0.0)))
}

fn normalized(a: CMat) -> CMat {
    let n = a.norm();
    a / c(n, 0.0)
}

struct Run {
    value: f64,
    rho: CMat,
    converged: bool,
    iterations: usize,
}

fn ascend(obj: &Objective, start: CMat) -> Run {
    let d = start.nrows();
    let mut a = normalized(start);
    let mut rho = state_of(&a);
    let mut f = obj.value(&rho);
    let mut step = 1.0;
    for it in 0..MAX_ITERATIONS {
        let g = obj.gradient(&rho);
        let shift = linalg::trace(&(&g * &rho)).re;
        let grad_a = (&g - linalg::identity(d) * c(shift, 0.0)) * &a * c(2.0, 0.0);
        let gn2 = grad_a.norm_squared();
        if gn2.sqrt() < GRADIENT_TOL {
            return Run { value: f, rho, converged: true, iterations: it };
        }
        let mut accepted = None;
        while step > 1e-14 {
            let a_new = normalized(&a + &grad_a * c(step, 0.0));
            let rho_new = state_of(&a_new);
            let f_new = obj.value(&rho_new);
            if f_new >= f + ARMIJO * step * gn2 {
                accepted = Some((a_new, rho_new, f_new));
                break;
            }
            step *= 0.5;
        }
        let Some((a_new, rho_new, f_new)) = accepted else {
            return Run { value: f, rho, converged: true, iterations: it };
        };
        let gain = f_new - f;
        a = a_new;
        rho = rho_new;
        f = f_new;
        step = (step * 2.0).min(1e3);
        if gain < OBJECTIVE_TOL {
            return Run { value: f, rho, converged: true, iterations: it + 1 };
        }
    }
    Run { value: f, rho, converged: false, iterations: MAX_ITERATIONS }
}

/// Maximizes `H(plus(rho)) - H(minus(rho))` from the maximally mixed state and
/// `random_starts` seeded random starts.
fn maximize(plus: &QuantumChannel, minus: &QuantumChannel, random_starts: usize) -> Maximum {
    let d = plus.dim_in();
    let obj = Objective { plus, minus };
    let mut rng = random::rng(SEED);
    let mut starts = vec![linalg::identity(d)];
    starts.extend((0..random_starts).map(|_| random::ginibre(&mut rng, d, d)));
    let n = starts.len();
    let best = starts
        .into_iter()
        .map(|s| ascend(&obj, s))
        .fold(None::<Run>, |acc, r| match acc {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .expect("at least one start");
    Maximum {
        value: best.value,
        argmax: DensityOperator::from_matrix_unchecked(best.rho),
        converged: best.converged,
        iterations: best.iterations,
        starts: n,
    }
}

/// `Q1(Phi) = max_rho H(Phi(rho)) - H(Phi^c(rho))`.
pub fn channel_coherent_information(channel: &QuantumChannel) -> Maximum {
    channel_coherent_information_with(channel, DEFAULT_STARTS)
}

pub fn channel_coherent_information_with(channel: &QuantumChannel, random_starts: usize) -> Maximum {
    maximize(channel, &channel.complementary(), random_starts)
}

fn check_degrading(channel: &QuantumChannel, degrading: &QuantumChannel) -> Result<usize> {
    let de = channel.complementary().dim_out();
    if degrading.dim_in() != channel.dim_out() || degrading.dim_out() != de {
        return shape(format!(
            "degrading map must be {}->{}, got {}->{}",
            channel.dim_out(),
            de,
            degrading.dim_in(),
            degrading.dim_out()
        ));
    }
    Ok(de)
}

/// `H(Phi(rho)) - H(Xi(Phi(rho)))`, the conditional entropy `H(F|E')` of the
/// degraded output.
pub fn u_xi_objective(channel: &QuantumChannel, degrading: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    check_degrading(channel, degrading)?;
    if rho.dim() != channel.dim_in() {
        return shape(format!("state has dimension {}, channel input is {}", rho.dim(), channel.dim_in()));
    }
    let out = channel.apply_matrix(rho.matrix());
    Ok(matrix_entropy(&out) - matrix_entropy(&degrading.apply_matrix(&out)))
}

/// `U_Xi(Phi) = max_rho H(Phi(rho)) - H(Xi(Phi(rho)))`. The objective is
/// concave, so a single start suffices.
pub fn u_xi(channel: &QuantumChannel, degrading: &QuantumChannel) -> Result<f64> {
    Ok(u_xi_with(channel, degrading)?.value)
}

pub fn u_xi_with(channel: &QuantumChannel, degrading: &QuantumChannel) -> Result<Maximum> {
    check_degrading(channel, degrading)?;
    let composed = QuantumChannel::compose(degrading, channel)?;
    Ok(maximize(channel, &composed, 0))
}
