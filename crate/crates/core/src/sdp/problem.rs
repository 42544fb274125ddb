use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One coefficient of a constraint or of the objective on a PSD block.
///
/// Off-diagonal coefficients are symmetric: an entry `(i, j, v)` with
/// `i < j` contributes `v * (X[i,j] + X[j,i])`. Entries are stored with
/// `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockEntry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraint {
    pub entries: Vec<BlockEntry>,
    pub lp: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// `min <C, X>` subject to `<A_i, X> = b_i`, with `X` ranging over a product
/// of real PSD blocks and a nonnegative orthant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub lp_size: usize,
    pub objective: Vec<BlockEntry>,
    pub lp_objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>, lp_size: usize) -> Self {
        Self { blocks, lp_size, objective: Vec::new(), lp_objective: vec![0.0; lp_size], constraints: Vec::new() }
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Barrier parameter: total cone dimension.
    pub fn cone_degree(&self) -> usize {
        self.blocks.iter().sum::<usize>() + self.lp_size
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::DomainError(msg));
        if self.blocks.iter().any(|&n| n == 0) {
            return bad("PSD block of size zero".into());
        }
        if self.lp_objective.len() != self.lp_size {
            return bad("LP objective length differs from the orthant size".into());
        }
        let check = |e: &BlockEntry| -> Result<()> {
            match self.blocks.get(e.block) {
                Some(&n) if e.i <= e.j && e.j < n && e.value.is_finite() => Ok(()),
                _ => Err(Error::DomainError(format!("malformed block entry {e:?}"))),
            }
        };
        for e in &self.objective {
            check(e)?;
        }
        for (r, con) in self.constraints.iter().enumerate() {
            for e in &con.entries {
                check(e)?;
            }
            if con.lp.iter().any(|&(k, v)| k >= self.lp_size || !v.is_finite()) || !con.rhs.is_finite() {
                return bad(format!("malformed LP data in constraint {r}"));
            }
        }
        Ok(())
    }

    /// Indices of a maximal linearly independent subset of the constraints.
    ///
    /// Rows owning a variable that no other row touches are independent of
    /// everything else; only the remaining rows go through Gram-Schmidt.
    /// Dependent rows with an inconsistent right-hand side make the problem
    /// infeasible.
    pub fn independent_rows(&self) -> Result<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        enum Var {
            Block(usize, usize, usize),
            Lp(usize),
        }
        let row_vars = |con: &Constraint| -> BTreeMap<Var, f64> {
            let mut v = BTreeMap::new();
            for e in &con.entries {
                // scale off-diagonals so the Euclidean geometry matches the trace inner product
                let w = if e.i == e.j { e.value } else { e.value * std::f64::consts::SQRT_2 };
                *v.entry(Var::Block(e.block, e.i, e.j)).or_insert(0.0) += w;
            }
            for &(k, w) in &con.lp {
                *v.entry(Var::Lp(k)).or_insert(0.0) += w;
            }
            v.retain(|_, w| *w != 0.0);
            v
        };
        let rows: Vec<BTreeMap<Var, f64>> = self.constraints.iter().map(row_vars).collect();

        let mut uses: HashMap<Var, usize> = HashMap::new();
        for r in &rows {
            for k in r.keys() {
                *uses.entry(*k).or_insert(0) += 1;
            }
        }

        let mut keep = Vec::with_capacity(rows.len());
        let mut basis: Vec<(BTreeMap<Var, f64>, f64)> = Vec::new();
        for (idx, row) in rows.iter().enumerate() {
            let rhs = self.constraints[idx].rhs;
            if row.is_empty() {
                if rhs.abs() > 1e-9 {
                    return Err(Error::Infeasible(format!("constraint {idx} reads 0 = {rhs}")));
                }
                continue;
            }
            if row.keys().any(|k| uses[k] == 1) {
                keep.push(idx);
                continue;
            }
            let norm0 = row.values().map(|w| w * w).sum::<f64>().sqrt();
            let mut res = row.clone();
            let mut res_rhs = rhs;
            for (q, beta) in &basis {
                let dot: f64 = q.iter().filter_map(|(k, w)| res.get(k).map(|r| r * w)).sum();
                if dot != 0.0 {
                    for (k, w) in q {
                        *res.entry(*k).or_insert(0.0) -= dot * w;
                    }
                    res_rhs -= dot * beta;
                }
            }
            let norm = res.values().map(|w| w * w).sum::<f64>().sqrt();
            if norm <= 1e-9 * norm0 {
                if res_rhs.abs() > 1e-7 * (1.0 + rhs.abs()) {
                    return Err(Error::Infeasible(format!("constraint {idx} contradicts earlier constraints")));
                }
                continue;
            }
            res.retain(|_, w| w.abs() > 0.0);
            for w in res.values_mut() {
                *w /= norm;
            }
            basis.push((res, res_rhs / norm));
            keep.push(idx);
        }
        Ok(keep)
    }

    /// The problem restricted to the given constraint rows.
    pub fn with_rows(&self, rows: &[usize]) -> SdpProblem {
        SdpProblem { constraints: rows.iter().map(|&r| self.constraints[r].clone()).collect(), ..self.clone_without_rows() }
    }

    fn clone_without_rows(&self) -> SdpProblem {
        SdpProblem {
            blocks: self.blocks.clone(),
            lp_size: self.lp_size,
            objective: self.objective.clone(),
            lp_objective: self.lp_objective.clone(),
            constraints: Vec::new(),
        }
    }

    /// Plain-text sparse dump: `#` header lines with the cone and right-hand
    /// side, then one line `row block i j value` per coefficient. Row 0 is the
    /// objective; LP coordinates use block index `blocks.len()` with `i = j`.
    pub fn write_triplets(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let sizes: Vec<String> = self.blocks.iter().map(|n| n.to_string()).collect();
        writeln!(out, "# blocks {}", sizes.join(" "))?;
        writeln!(out, "# lp {}", self.lp_size)?;
        let rhs: Vec<String> = self.constraints.iter().map(|c| format!("{:e}", c.rhs)).collect();
        writeln!(out, "# rhs {}", rhs.join(" "))?;
        let lp_block = self.blocks.len();
        for e in &self.objective {
            writeln!(out, "0 {} {} {} {:e}", e.block, e.i, e.j, e.value)?;
        }
        for (k, &v) in self.lp_objective.iter().enumerate() {
            if v != 0.0 {
                writeln!(out, "0 {lp_block} {k} {k} {v:e}")?;
            }
        }
        for (r, con) in self.constraints.iter().enumerate() {
            for e in &con.entries {
                writeln!(out, "{} {} {} {} {:e}", r + 1, e.block, e.i, e.j, e.value)?;
            }
            for &(k, v) in &con.lp {
                writeln!(out, "{} {lp_block} {k} {k} {v:e}", r + 1)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Accumulates one constraint (or the objective), merging repeated
/// coefficients.
#[derive(Clone, Debug, Default)]
pub struct RowBuilder {
    entries: BTreeMap<(usize, usize, usize), f64>,
    lp: BTreeMap<usize, f64>,
}

impl RowBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `w * X_block[u, v]` for a single (not symmetrised) coordinate.
    pub fn add_coordinate(&mut self, block: usize, u: usize, v: usize, w: f64) {
        if w == 0.0 {
            return;
        }
        let (i, j) = if u <= v { (u, v) } else { (v, u) };
        let value = if i == j { w } else { 0.5 * w };
        *self.entries.entry((block, i, j)).or_insert(0.0) += value;
    }

    /// Adds `w * x_k` for an LP coordinate.
    pub fn add_lp(&mut self, k: usize, w: f64) {
        *self.lp.entry(k).or_insert(0.0) += w;
    }

    pub fn finish(self, rhs: f64) -> Constraint {
        let entries = self
            .entries
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((block, i, j), value)| BlockEntry { block, i, j, value })
            .collect();
        let lp = self.lp.into_iter().filter(|&(_, v)| v != 0.0).collect();
        Constraint { entries, lp, rhs }
    }
}
