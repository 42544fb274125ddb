//! Diamond-norm distances and the approximate (anti-)degradability programs.
//!
//! The degradability parameter is the optimum of
//!
//! ```text
//! minimize   || Tr_E Z ||_inf
//! subject to Z >= J(Phi^c) - J(Xi . Phi),  Z >= 0,
//!            J(Xi) >= 0,  Tr_E J(Xi) = 1_B
//! ```
//!
//! over `Z` on `E (x) A` and the Choi matrix of the degrading map `Xi: B -> E`.
//! For a fixed `Xi` this is the standard program for the diamond norm of
//! `Phi^c - Xi . Phi`, whose value is half of that norm, so the reported
//! `epsilon` equals `||Phi^c - Xi . Phi||_diamond / 2` at the optimal map.

use serde::Serialize;

use crate::channel::{ChoiMatrix, QuantumChannel};
use crate::error::{shape, Error, Result};
use crate::linalg::{CMat, ONE, ZERO};
use crate::sdp::{self, hermitian_block, term, HermitianProgram, InteriorPoint, SdpBackend, SdpSolution, SolveOptions, SolveStatus, Term};

/// Objectives below this are reported as exactly zero.
pub const ZERO_EPSILON_CUTOFF: f64 = 1e-7;
/// Tolerance for accepting the solver's degrading map as a channel.
pub const DEGRADING_MAP_TOL: f64 = 1e-8;
/// The raw solver iterate only meets its constraints to the solve tolerance
/// relative to the data, so it is accepted within this multiple of it before
/// being renormalized.
const RAW_MAP_SLACK: f64 = 100.0;
/// Choi eigenvalue cutoff that defines `|F|`, the Kraus rank of the degrading map.
pub const DEGRADING_RANK_CUTOFF: f64 = 1e-9;

/// Outcome of the degradability program for one channel.
#[derive(Clone, Debug, Serialize)]
pub struct DegradabilityReport {
    /// Optimal value of the program, on the scale of half the diamond norm.
    pub epsilon: f64,
    /// Half of `||Phi^c - Xi . Phi||_diamond`, recomputed from the returned map.
    pub verified_epsilon: f64,
    /// Environment dimension `|E|` (minimal Kraus rank of the channel).
    pub dim_e: usize,
    /// Kraus rank `|F|` of the degrading map.
    pub dim_f: usize,
    /// Length of the Kraus family the channel was given with.
    pub input_kraus_len: usize,
    /// True for the anti-degradability program.
    pub anti: bool,
    #[serde(serialize_with = "crate::io::serialize_choi")]
    pub degrading_choi: ChoiMatrix,
    pub solver: SdpSolution,
}

impl DegradabilityReport {
    /// `||Phi^c - Xi . Phi||_diamond` at the returned degrading map.
    pub fn diamond_distance(&self) -> f64 {
        2.0 * self.verified_epsilon
    }

    /// The degrading map as a channel `B -> E`.
    pub fn degrading_map(&self) -> Result<QuantumChannel> {
        self.degrading_choi.to_channel_with(DEGRADING_MAP_TOL, DEGRADING_RANK_CUTOFF)
    }
}

fn require_optimal(sol: &SdpSolution, what: &str) -> Result<()> {
    match sol.status {
        SolveStatus::Optimal => Ok(()),
        SolveStatus::Infeasible => Err(Error::Infeasible(format!("{what} program reported infeasible"))),
        SolveStatus::MaxIterations => Err(Error::NotOptimal(format!(
            "{what} program hit the iteration limit after {} iterations (relative gap {:.2e})",
            sol.iterations, sol.relative_gap
        ))),
    }
}

/// Builds the program `min ||Tr_out Z||_inf s.t. Z >= delta, Z >= 0` for a
/// Hermitian `delta` on `out (x) in`. Blocks: `Z`, `S = Z - delta`, `R = t 1 - Tr_out Z`.
fn diamond_program(delta: &CMat, dim_in: usize, dim_out: usize) -> sdp::SdpProblem {
    let n = dim_in * dim_out;
    let (bz, bs, br, t) = (0, 1, 2, 0);
    let mut prog = HermitianProgram::new(vec![n, n, dim_in], 1);
    prog.minimize_lp(t, 1.0);
    for r in 0..n {
        for col in r..n {
            let terms = [term(bs, r, col, ONE), term(bz, r, col, -ONE)];
            prog.entry_rows(r, col, &terms, &[], -delta[(r, col)]);
        }
    }
    push_epigraph_rows(&mut prog, bz, br, t, dim_in, dim_out);
    prog.finish()
}

/// `R + Tr_out Z - t 1 = 0` with `Z` on `out (x) in`.
fn push_epigraph_rows(prog: &mut HermitianProgram, bz: usize, br: usize, t: usize, dim_in: usize, dim_out: usize) {
    for a in 0..dim_in {
        for a2 in a..dim_in {
            let mut terms: Vec<Term> = vec![term(br, a, a2, ONE)];
            for o in 0..dim_out {
                terms.push(term(bz, o * dim_in + a, o * dim_in + a2, ONE));
            }
            let lp: &[(usize, f64)] = if a == a2 { &[(t, -1.0)] } else { &[] };
            prog.entry_rows(a, a2, &terms, lp, ZERO);
        }
    }
}

/// Diamond norm `||a - b||_diamond` of the difference of two channels, in `[0, 2]`.
pub fn diamond_norm_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    Ok(diamond_norm_distance_with(a, b, &SolveOptions::default())?.0)
}

/// [`diamond_norm_distance`] with explicit solver options; also returns the
/// solver diagnostics.
pub fn diamond_norm_distance_with(
    a: &QuantumChannel,
    b: &QuantumChannel,
    opts: &SolveOptions,
) -> Result<(f64, SdpSolution)> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return shape(format!(
            "channels have different shapes: {}->{} and {}->{}",
            a.dim_in(),
            a.dim_out(),
            b.dim_in(),
            b.dim_out()
        ));
    }
    let delta = a.choi().matrix() - b.choi().matrix();
    let problem = diamond_program(&delta, a.dim_in(), a.dim_out());
    let sol = InteriorPoint.solve(&problem, opts)?;
    require_optimal(&sol, "diamond norm")?;
    let half = sol.primal_objective.max(0.0);
    let value = if half < ZERO_EPSILON_CUTOFF { 0.0 } else { (2.0 * half).min(2.0) };
    Ok((value, sol))
}

/// Builds the degradability program for `channel` with complementary `comp`.
/// Blocks: `Z` and `S` on `E (x) A`, `J(Xi)` on `E (x) B`, `R` on `A`.
fn degradability_program(channel: &QuantumChannel, comp: &QuantumChannel) -> sdp::SdpProblem {
    let (da, db, de) = (channel.dim_in(), channel.dim_out(), comp.dim_out());
    let n = de * da;
    let (bz, bs, bj, br, t) = (0, 1, 2, 3, 0);
    let mut prog = HermitianProgram::new(vec![n, n, de * db, da], 1);
    prog.minimize_lp(t, 1.0);

    let jc = comp.choi();
    let tm = channel.transfer_matrix();
    let tm = tm.matrix();

    // S - Z - J(Xi . Phi) = -J(Phi^c), with
    // J(Xi . Phi)[(e,a),(e',a')] = sum_{b,b'} J(Xi)[(e,b),(e',b')] T(Phi)[(b,b'),(a,a')]
    for r in 0..n {
        let (e, a) = (r / da, r % da);
        for col in r..n {
            let (e2, a2) = (col / da, col % da);
            let mut terms = vec![term(bs, r, col, ONE), term(bz, r, col, -ONE)];
            for b in 0..db {
                for b2 in 0..db {
                    let coef = tm[(b * db + b2, a * da + a2)];
                    if coef.norm() > 1e-15 {
                        terms.push(term(bj, e * db + b, e2 * db + b2, -coef));
                    }
                }
            }
            prog.entry_rows(r, col, &terms, &[], -jc.matrix()[(r, col)]);
        }
    }

    // Tr_E J(Xi) = 1_B
    for b in 0..db {
        for b2 in b..db {
            let terms: Vec<Term> = (0..de).map(|e| term(bj, e * db + b, e * db + b2, ONE)).collect();
            let rhs = if b == b2 { ONE } else { ZERO };
            prog.entry_rows(b, b2, &terms, &[], rhs);
        }
    }

    push_epigraph_rows(&mut prog, bz, br, t, da, de);
    prog.finish()
}

/// Smallest `epsilon` such that the channel is epsilon-degradable, together
/// with an optimal degrading map.
pub fn epsilon_degradable(channel: &QuantumChannel, tol: f64) -> Result<DegradabilityReport> {
    epsilon_degradable_with(channel, &SolveOptions::with_tolerance(tol))
}

pub fn epsilon_degradable_with(channel: &QuantumChannel, opts: &SolveOptions) -> Result<DegradabilityReport> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {}", opts.tolerance)));
    }
    let comp = channel.complementary();
    let (db, de) = (channel.dim_out(), comp.dim_out());
    let problem = degradability_program(channel, &comp);
    let sol = InteriorPoint.solve(&problem, opts)?;
    require_optimal(&sol, "degradability")?;

    let raw = hermitian_block(&sol.x_blocks[2]);
    let choi = ChoiMatrix::new(crate::linalg::hermitian_part(&raw), db, de)?;
    let xi = choi.to_channel_with(DEGRADING_MAP_TOL.max(RAW_MAP_SLACK * opts.tolerance), DEGRADING_RANK_CUTOFF)?;
    let degrading_choi = xi.choi();

    let composed = QuantumChannel::compose(&xi, channel)?;
    let verify_opts = SolveOptions { warm_start: None, ..opts.clone() };
    let (diamond, _) = diamond_norm_distance_with(&comp, &composed, &verify_opts)?;

    let objective = sol.primal_objective.max(0.0);
    let epsilon = if objective < ZERO_EPSILON_CUTOFF { 0.0 } else { objective.min(2.0) };
    Ok(DegradabilityReport {
        epsilon,
        verified_epsilon: diamond / 2.0,
        dim_e: de,
        dim_f: xi.kraus_len(),
        input_kraus_len: channel.kraus_len(),
        anti: false,
        degrading_choi,
        solver: sol,
    })
}

/// Smallest `epsilon` such that the channel is epsilon-anti-degradable,
/// computed as the degradability parameter of the complementary channel.
pub fn epsilon_antidegradable(channel: &QuantumChannel, tol: f64) -> Result<DegradabilityReport> {
    epsilon_antidegradable_with(channel, &SolveOptions::with_tolerance(tol))
}

pub fn epsilon_antidegradable_with(channel: &QuantumChannel, opts: &SolveOptions) -> Result<DegradabilityReport> {
    let mut report = epsilon_degradable_with(&channel.complementary(), opts)?;
    report.anti = true;
    report.input_kraus_len = channel.kraus_len();
    Ok(report)
}
