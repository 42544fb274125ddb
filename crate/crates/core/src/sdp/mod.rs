//! Real semidefinite programs in standard primal form and a dense
//! interior-point solver for them.

mod hermitian;
mod ipm;
mod problem;

use nalgebra::DMatrix;
use serde::Serialize;

pub use problem::{BlockEntry, Constraint, RowBuilder, SdpProblem};
pub(crate) use hermitian::{hermitian_block, term, HermitianProgram, Term};

use crate::error::Result;

/// Environment variable naming a file that receives a triplet dump of every
/// assembled program.
pub const DUMP_ENV: &str = "QDEG_DUMP_SDP";

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Target for the relative duality gap and relative infeasibilities.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Previous solution of a program with the same structure, used as the
    /// starting point after being pushed back into the interior.
    pub warm_start: Option<SdpSolution>,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, max_iterations: DEFAULT_MAX_ITERATIONS, warm_start: None, verbose: false }
    }
}

impl SolveOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }
}

/// Primal-dual pair returned by a backend.
#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual|`
    pub gap: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub x_blocks: Vec<DMatrix<f64>>,
    #[serde(skip)]
    pub x_lp: Vec<f64>,
    #[serde(skip)]
    pub y: Vec<f64>,
    #[serde(skip)]
    pub s_blocks: Vec<DMatrix<f64>>,
    #[serde(skip)]
    pub s_lp: Vec<f64>,
    /// Linearly dependent constraints removed before solving.
    pub dropped_rows: usize,
    pub seconds: f64,
}

impl SdpSolution {
    fn restricted_to(&self, rows: &[usize]) -> SdpSolution {
        let mut out = self.clone();
        if self.y.len() >= rows.iter().copied().max().map_or(0, |r| r + 1) {
            out.y = rows.iter().map(|&r| self.y[r]).collect();
        }
        out
    }
}

/// Seam for plugging in other conic solvers.
pub trait SdpBackend {
    fn solve(&self, problem: &SdpProblem, options: &SolveOptions) -> Result<SdpSolution>;
}

/// The built-in dense interior-point method.
#[derive(Clone, Copy, Debug, Default)]
pub struct InteriorPoint;

impl SdpBackend for InteriorPoint {
    fn solve(&self, problem: &SdpProblem, options: &SolveOptions) -> Result<SdpSolution> {
        if let Some(path) = std::env::var_os(DUMP_ENV) {
            problem.write_triplets(std::path::Path::new(&path))?;
        }
        ipm::solve(problem, options)
    }
}

/// Solves with the built-in backend at the given tolerance.
pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    InteriorPoint.solve(problem, &SolveOptions::with_tolerance(tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_row(block: usize, n: usize, rhs: f64) -> Constraint {
        let mut r = RowBuilder::new();
        for i in 0..n {
            r.add_coordinate(block, i, i, 1.0);
        }
        r.finish(rhs)
    }

    #[test]
    fn minimum_eigenvalue_program() {
        // min Tr(CX), Tr X = 1, C = diag(3, 1)
        let mut p = SdpProblem::new(vec![2], 0);
        p.objective = vec![BlockEntry { block: 0, i: 0, j: 0, value: 3.0 }, BlockEntry { block: 0, i: 1, j: 1, value: 1.0 }];
        p.constraints.push(diag_row(0, 2, 1.0));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-7);
        assert!(sol.x_blocks[0][(0, 0)].abs() < 1e-6);
        assert!((sol.x_blocks[0][(1, 1)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_epigraph() {
        // min t s.t. t*1 - diag(1, 2) = R >= 0, variables R (block) and t (lp)
        let mut p = SdpProblem::new(vec![2], 1);
        p.lp_objective = vec![1.0];
        for (i, d) in [1.0, 2.0].into_iter().enumerate() {
            let mut r = RowBuilder::new();
            r.add_coordinate(0, i, i, 1.0);
            r.add_lp(0, -1.0);
            p.constraints.push(r.finish(-d));
        }
        let mut r = RowBuilder::new();
        r.add_coordinate(0, 0, 1, 2.0);
        p.constraints.push(r.finish(0.0));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_objective - 2.0).abs() < 1e-7, "{}", sol.primal_objective);
        assert!(sol.gap <= 1e-7);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut p = SdpProblem::new(vec![2], 0);
        p.objective = vec![BlockEntry { block: 0, i: 0, j: 0, value: 1.0 }];
        p.constraints.push(diag_row(0, 2, 1.0));
        p.constraints.push(diag_row(0, 2, 1.0));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.dropped_rows, 1);
        assert!(sol.primal_objective.abs() < 1e-7);
        assert_eq!(sol.y.len(), 2);
    }
}
