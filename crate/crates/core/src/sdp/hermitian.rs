//! Complex Hermitian variables on top of the real solver.
//!
//! A Hermitian block `H` of size `n` is stored as the real symmetric block
//! `[[Re H, -Im H], [Im H, Re H]]` of size `2n`. Linear functionals are
//! written against the Hermitian matrix recovered from the real block,
//! `H = (X11 + X22)/2 + i (X21 - X12)/2`, so any real PSD point maps to a
//! Hermitian PSD point with the same constraint values.

use nalgebra::DMatrix;

use super::{Constraint, RowBuilder, SdpProblem};
use crate::linalg::{self, CMat, C64};

/// `z * H_block[k, l]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub block: usize,
    pub k: usize,
    pub l: usize,
    pub z: C64,
}

pub(crate) fn term(block: usize, k: usize, l: usize, z: C64) -> Term {
    Term { block, k, l, z }
}

/// Builder for programs over Hermitian blocks plus a nonnegative orthant.
pub(crate) struct HermitianProgram {
    dims: Vec<usize>,
    problem: SdpProblem,
}

impl HermitianProgram {
    pub fn new(dims: Vec<usize>, lp_size: usize) -> Self {
        let blocks = dims.iter().map(|&n| 2 * n).collect();
        Self { dims, problem: SdpProblem::new(blocks, lp_size) }
    }

    /// Adds `Re(z * H[k, l])` to a row.
    fn add_re(&self, row: &mut RowBuilder, t: Term) {
        let n = self.dims[t.block];
        let (a, b) = (t.z.re, t.z.im);
        row.add_coordinate(t.block, t.k, t.l, 0.5 * a);
        row.add_coordinate(t.block, t.k + n, t.l + n, 0.5 * a);
        row.add_coordinate(t.block, t.k + n, t.l, -0.5 * b);
        row.add_coordinate(t.block, t.k, t.l + n, 0.5 * b);
    }

    pub fn minimize_lp(&mut self, k: usize, w: f64) {
        self.problem.lp_objective[k] += w;
    }

    /// Constrains `Re(sum of terms) + sum lp = rhs`.
    pub fn real_row(&mut self, terms: &[Term], lp: &[(usize, f64)], rhs: f64) {
        let mut row = RowBuilder::new();
        for &t in terms {
            self.add_re(&mut row, t);
        }
        for &(k, w) in lp {
            row.add_lp(k, w);
        }
        self.push(row.finish(rhs));
    }

    /// Constrains `Im(sum of terms) = rhs`.
    pub fn imag_row(&mut self, terms: &[Term], rhs: f64) {
        let mut row = RowBuilder::new();
        let minus_i = C64::new(0.0, -1.0);
        for &t in terms {
            self.add_re(&mut row, Term { z: t.z * minus_i, ..t });
        }
        self.push(row.finish(rhs));
    }

    /// Constrains one entry `(r, c)` with `r <= c` of a Hermitian matrix
    /// expression to equal `value`: one real row on the diagonal, two above it.
    pub fn entry_rows(&mut self, r: usize, c: usize, terms: &[Term], lp: &[(usize, f64)], value: C64) {
        self.real_row(terms, lp, value.re);
        if r != c {
            debug_assert!(lp.is_empty(), "LP terms only appear on diagonal entries");
            self.imag_row(terms, value.im);
        }
    }

    fn push(&mut self, c: Constraint) {
        if !c.entries.is_empty() || !c.lp.is_empty() || c.rhs != 0.0 {
            self.problem.constraints.push(c);
        }
    }

    pub fn finish(self) -> SdpProblem {
        self.problem
    }
}

/// Recovers the Hermitian matrix of a real-embedded block.
pub(crate) fn hermitian_block(x: &DMatrix<f64>) -> CMat {
    linalg::from_real_embedding(x)
}
