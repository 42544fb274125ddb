//! Infeasible primal-dual interior-point method with Nesterov-Todd scaling
//! and a Mehrotra predictor-corrector.

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use super::problem::SdpProblem;
use super::{SdpSolution, SolveOptions, SolveStatus};
use crate::error::{Error, Result};

type Dense = DMatrix<f64>;

/// Coefficients of the rows that touch one PSD block.
struct BlockRows {
    n: usize,
    /// `(row, entries)` pairs, rows in increasing order
    rows: Vec<(usize, Vec<(usize, usize, f64)>)>,
    objective: Dense,
}

struct Data {
    m: usize,
    blocks: Vec<BlockRows>,
    lp_size: usize,
    /// per LP coordinate, `(row, coefficient)` pairs
    lp_cols: Vec<Vec<(usize, f64)>>,
    lp_objective: DVector<f64>,
    b: DVector<f64>,
}

impl Data {
    fn new(p: &SdpProblem) -> Self {
        let m = p.constraints.len();
        let mut blocks: Vec<BlockRows> = p
            .blocks
            .iter()
            .map(|&n| BlockRows { n, rows: Vec::new(), objective: Dense::zeros(n, n) })
            .collect();
        for e in &p.objective {
            let obj = &mut blocks[e.block].objective;
            obj[(e.i, e.j)] += e.value;
            if e.i != e.j {
                obj[(e.j, e.i)] += e.value;
            }
        }
        let mut lp_cols = vec![Vec::new(); p.lp_size];
        for (r, con) in p.constraints.iter().enumerate() {
            for e in &con.entries {
                let rows = &mut blocks[e.block].rows;
                if rows.last().map(|(last, _)| *last) != Some(r) {
                    rows.push((r, Vec::new()));
                }
                rows.last_mut().unwrap().1.push((e.i, e.j, e.value));
            }
            for &(k, v) in &con.lp {
                lp_cols[k].push((r, v));
            }
        }
        Data {
            m,
            blocks,
            lp_size: p.lp_size,
            lp_cols,
            lp_objective: DVector::from_column_slice(&p.lp_objective),
            b: DVector::from_iterator(m, p.constraints.iter().map(|c| c.rhs)),
        }
    }

    /// `A(X)`.
    fn apply(&self, xs: &[Dense], xl: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (blk, x) in self.blocks.iter().zip(xs) {
            for (r, entries) in &blk.rows {
                out[*r] += sym_dot(entries, x);
            }
        }
        for (k, col) in self.lp_cols.iter().enumerate() {
            for &(r, v) in col {
                out[r] += v * xl[k];
            }
        }
        out
    }

    /// `A^T(y)`.
    fn adjoint(&self, y: &DVector<f64>) -> (Vec<Dense>, DVector<f64>) {
        let blocks = self
            .blocks
            .iter()
            .map(|blk| {
                let mut s = Dense::zeros(blk.n, blk.n);
                for (r, entries) in &blk.rows {
                    let yr = y[*r];
                    if yr == 0.0 {
                        continue;
                    }
                    for &(i, j, v) in entries {
                        s[(i, j)] += yr * v;
                        if i != j {
                            s[(j, i)] += yr * v;
                        }
                    }
                }
                s
            })
            .collect();
        let lp = DVector::from_iterator(
            self.lp_size,
            self.lp_cols.iter().map(|col| col.iter().map(|&(r, v)| v * y[r]).sum::<f64>()),
        );
        (blocks, lp)
    }

    fn primal_objective(&self, xs: &[Dense], xl: &DVector<f64>) -> f64 {
        self.blocks.iter().zip(xs).map(|(blk, x)| blk.objective.dot(x)).sum::<f64>() + self.lp_objective.dot(xl)
    }

    /// Lower triangle of the Schur complement `M_ij = <A_i, W A_j W> + sum_k a_ik a_jk d_k`.
    fn schur(&self, ws: &[Dense], d: &DVector<f64>) -> Mat<f64> {
        let mut mat = Mat::<f64>::zeros(self.m, self.m);
        for (blk, w) in self.blocks.iter().zip(ws) {
            let n = blk.n;
            let mut q = Dense::zeros(n, n);
            for (pos_j, (j, entries_j)) in blk.rows.iter().enumerate() {
                q.fill(0.0);
                for &(r, c, v) in entries_j {
                    let wr = w.column(r);
                    let wc = w.column(c);
                    q.ger(v, &wr, &wc, 1.0);
                    if r != c {
                        q.ger(v, &wc, &wr, 1.0);
                    }
                }
                for (i, entries_i) in &blk.rows[pos_j..] {
                    mat[(*i, *j)] += sym_dot(entries_i, &q);
                }
            }
        }
        for (k, col) in self.lp_cols.iter().enumerate() {
            for (a, &(i, vi)) in col.iter().enumerate() {
                for &(j, vj) in &col[..=a] {
                    mat[(i, j)] += vi * vj * d[k];
                }
            }
        }
        mat
    }
}

/// `<A, X>` for symmetric sparse `A` given by its upper-triangle entries.
fn sym_dot(entries: &[(usize, usize, f64)], x: &Dense) -> f64 {
    entries.iter().map(|&(i, j, v)| if i == j { v * x[(i, j)] } else { 2.0 * v * x[(i, j)] }).sum()
}

fn symmetrize(a: &Dense) -> Dense {
    (a + a.transpose()) * 0.5
}

/// Nesterov-Todd scaling point of a block: `W = G G^T` with
/// `G^T S G = G^{-1} X G^{-T} = diag(lambda)`.
struct Scaling {
    g: Dense,
    g_inv: Dense,
    w: Dense,
    lambda: DVector<f64>,
}

fn nt_scaling(x: &Dense, s: &Dense) -> Option<Scaling> {
    let lx = x.clone().cholesky()?.unpack();
    let ls = s.clone().cholesky()?.unpack();
    let svd = (ls.transpose() * &lx).svd(true, true);
    let (u, vt) = (svd.u?, svd.v_t?);
    let lambda = svd.singular_values;
    if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return None;
    }
    let inv_sqrt = lambda.map(|l| 1.0 / l.sqrt());
    // G = Lx V diag(lambda^-1/2), G^{-1} = diag(lambda^-1/2) U^T Ls^T
    let mut g = lx * vt.transpose();
    for (k, mut col) in g.column_iter_mut().enumerate() {
        col *= inv_sqrt[k];
    }
    let mut g_inv = u.transpose() * ls.transpose();
    for (k, mut row) in g_inv.row_iter_mut().enumerate() {
        row *= inv_sqrt[k];
    }
    let w = symmetrize(&(&g * g.transpose()));
    Some(Scaling { g, g_inv, w, lambda })
}

/// Largest step `alpha` keeping `diag(lambda) + alpha * d` PSD.
fn max_step(lambda: &DVector<f64>, d: &Dense) -> f64 {
    let n = lambda.len();
    let inv = lambda.map(|l| 1.0 / l.sqrt());
    let scaled = Dense::from_fn(n, n, |i, j| d[(i, j)] * inv[i] * inv[j]);
    let min = symmetrize(&scaled).symmetric_eigenvalues().min();
    if min < 0.0 {
        -1.0 / min
    } else {
        f64::INFINITY
    }
}

/// `x + alpha dx` with `alpha` shrunk until every block has a Cholesky factor;
/// the eigenvalue-based step can overshoot slightly on ill-conditioned blocks.
fn pd_step(xs: &[Dense], dxs: &[Dense], alpha: f64) -> Option<(Vec<Dense>, f64)> {
    let mut a = alpha;
    for _ in 0..30 {
        let cand: Vec<Dense> = xs.iter().zip(dxs).map(|(x, d)| x + d * a).collect();
        if cand.iter().all(|c| c.clone().cholesky().is_some()) {
            return Some((cand, a));
        }
        a *= 0.8;
    }
    None
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter().zip(dx.iter()).filter(|(_, &d)| d < 0.0).map(|(&v, &d)| -v / d).fold(f64::INFINITY, f64::min)
}

struct Iterate {
    xs: Vec<Dense>,
    xl: DVector<f64>,
    y: DVector<f64>,
    ss: Vec<Dense>,
    sl: DVector<f64>,
}

struct Direction {
    dxs: Vec<Dense>,
    dxl: DVector<f64>,
    dy: DVector<f64>,
    dss: Vec<Dense>,
    dsl: DVector<f64>,
}

fn initial_point(data: &Data, warm: Option<&SdpSolution>) -> Iterate {
    let b_norm_ratio = |rows: &mut dyn Iterator<Item = (usize, f64)>| -> f64 {
        rows.map(|(r, norm)| (1.0 + data.b[r].abs()) / (1.0 + norm)).fold(0.0, f64::max)
    };
    let mut xs = Vec::new();
    let mut ss = Vec::new();
    for blk in &data.blocks {
        let n = blk.n as f64;
        let norms: Vec<(usize, f64)> = blk
            .rows
            .iter()
            .map(|(r, e)| {
                let f2: f64 = e.iter().map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum();
                (*r, f2.sqrt())
            })
            .collect();
        let xi = 10f64.max(n.sqrt()).max(n * b_norm_ratio(&mut norms.iter().copied()));
        let max_a = norms.iter().map(|&(_, f)| f).fold(0.0, f64::max);
        let eta = 10f64.max(n.sqrt()).max(max_a).max(blk.objective.norm());
        xs.push(Dense::identity(blk.n, blk.n) * xi);
        ss.push(Dense::identity(blk.n, blk.n) * eta);
    }
    let mut xl = DVector::zeros(data.lp_size);
    let mut sl = DVector::zeros(data.lp_size);
    for (k, col) in data.lp_cols.iter().enumerate() {
        let xi = 10f64.max(b_norm_ratio(&mut col.iter().map(|&(r, v)| (r, v.abs()))));
        let max_a = col.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max);
        xl[k] = xi;
        sl[k] = 10f64.max(max_a).max(data.lp_objective[k].abs());
    }
    let mut it = Iterate { xs, xl, y: DVector::zeros(data.m), ss, sl };

    if let Some(prev) = warm {
        let shapes_match = prev.x_blocks.len() == it.xs.len()
            && prev.x_blocks.iter().zip(&it.xs).all(|(a, b)| a.shape() == b.shape())
            && prev.y.len() == data.m
            && prev.x_lp.len() == data.lp_size;
        if shapes_match {
            // pull the old optimum back into the interior
            let theta = 0.1;
            for k in 0..it.xs.len() {
                let n = it.xs[k].nrows();
                let shift_x = theta * (prev.x_blocks[k].trace() / n as f64).max(1.0);
                let shift_s = theta * (prev.s_blocks[k].trace() / n as f64).max(1.0);
                it.xs[k] = &prev.x_blocks[k] + Dense::identity(n, n) * shift_x;
                it.ss[k] = &prev.s_blocks[k] + Dense::identity(n, n) * shift_s;
            }
            for k in 0..data.lp_size {
                it.xl[k] = prev.x_lp[k].max(0.0) + theta * prev.x_lp[k].abs().max(1.0);
                it.sl[k] = prev.s_lp[k].max(0.0) + theta * prev.s_lp[k].abs().max(1.0);
            }
            it.y = DVector::from_column_slice(&prev.y);
        }
    }
    it
}

struct Residuals {
    rp: DVector<f64>,
    rd: Vec<Dense>,
    rdl: DVector<f64>,
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    mu: f64,
    complementarity: f64,
}

fn residuals(data: &Data, it: &Iterate, nu: f64) -> Residuals {
    let rp = &data.b - data.apply(&it.xs, &it.xl);
    let (aty, atyl) = data.adjoint(&it.y);
    let rd: Vec<Dense> =
        data.blocks.iter().zip(aty).zip(&it.ss).map(|((blk, a), s)| &blk.objective - a - s).collect();
    let rdl = &data.lp_objective - atyl - &it.sl;
    let pobj = data.primal_objective(&it.xs, &it.xl);
    let dobj = data.b.dot(&it.y);
    let c_norm = (data.blocks.iter().map(|b| b.objective.norm_squared()).sum::<f64>()
        + data.lp_objective.norm_squared())
    .sqrt();
    let pinf = rp.norm() / (1.0 + data.b.norm());
    let dinf = (rd.iter().map(|r| r.norm_squared()).sum::<f64>() + rdl.norm_squared()).sqrt() / (1.0 + c_norm);
    let complementarity =
        it.xs.iter().zip(&it.ss).map(|(x, s)| x.dot(s)).sum::<f64>() + it.xl.dot(&it.sl);
    Residuals { rp, rd, rdl, pobj, dobj, pinf, dinf, mu: complementarity / nu, complementarity }
}

struct Factored {
    llt: faer::linalg::solvers::Llt<f64>,
}

fn factor(mut mat: Mat<f64>) -> Result<Factored> {
    let m = mat.nrows();
    if m == 0 {
        return Ok(Factored { llt: Mat::<f64>::identity(0, 0).llt(Side::Lower).unwrap() });
    }
    let max_diag = (0..m).map(|i| mat[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..8 {
        if let Ok(llt) = mat.llt(Side::Lower) {
            return Ok(Factored { llt });
        }
        let next = if shift == 0.0 { 1e-14 * max_diag } else { shift * 100.0 };
        for i in 0..m {
            mat[(i, i)] += next - shift;
        }
        shift = next;
    }
    Err(Error::NumericalFailure("Schur complement is not positive definite".into()))
}

impl Factored {
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let m = rhs.len();
        if m == 0 {
            return DVector::zeros(0);
        }
        let mut col = Mat::<f64>::from_fn(m, 1, |i, _| rhs[i]);
        self.llt.solve_in_place(col.as_mut());
        DVector::from_fn(m, |i, _| col[(i, 0)])
    }
}

/// Solves for a search direction given the complementarity targets
/// `H = dX + W dS W` per block and `h = dx + (x/s) ds` on the orthant.
fn direction(
    data: &Data,
    fac: &Factored,
    scal: &[Scaling],
    d_lp: &DVector<f64>,
    res: &Residuals,
    h_blocks: Vec<Dense>,
    h_lp: DVector<f64>,
) -> Direction {
    // M dy = rp - A(H - W Rd W)
    let tmp: Vec<Dense> = h_blocks
        .iter()
        .zip(scal)
        .zip(&res.rd)
        .map(|((h, sc), rd)| h - &sc.w * rd * &sc.w)
        .collect();
    let tmp_lp = &h_lp - d_lp.component_mul(&res.rdl);
    let rhs = &res.rp - data.apply(&tmp, &tmp_lp);
    let recover = |dy: DVector<f64>| {
        let (aty, atyl) = data.adjoint(&dy);
        let dss: Vec<Dense> = res.rd.iter().zip(aty).map(|(rd, a)| symmetrize(&(rd - a))).collect();
        let dsl = &res.rdl - atyl;
        let dxs: Vec<Dense> = h_blocks
            .iter()
            .zip(scal)
            .zip(&dss)
            .map(|((h, sc), ds)| symmetrize(&(h - &sc.w * ds * &sc.w)))
            .collect();
        let dxl = &h_lp - d_lp.component_mul(&dsl);
        Direction { dxs, dxl, dy, dss, dsl }
    };
    let mut dir = recover(fac.solve(&rhs));
    // Near the optimum the Schur complement is badly conditioned; refine dy
    // against the primal equation A(dX) = rp, which is what the step must satisfy.
    let mut err = &res.rp - data.apply(&dir.dxs, &dir.dxl);
    for _ in 0..REFINEMENT_ROUNDS {
        let next = recover(&dir.dy + fac.solve(&err));
        let next_err = &res.rp - data.apply(&next.dxs, &next.dxl);
        if next_err.norm() >= 0.5 * err.norm() {
            break;
        }
        dir = next;
        err = next_err;
    }
    dir
}

const REFINEMENT_ROUNDS: usize = 3;

fn step_lengths(it: &Iterate, scal: &[Scaling], dir: &Direction) -> (f64, f64) {
    let mut ap = max_step_lp(&it.xl, &dir.dxl);
    let mut ad = max_step_lp(&it.sl, &dir.dsl);
    for (k, sc) in scal.iter().enumerate() {
        let dxt = &sc.g_inv * &dir.dxs[k] * sc.g_inv.transpose();
        let dst = sc.g.transpose() * &dir.dss[k] * &sc.g;
        ap = ap.min(max_step(&sc.lambda, &dxt));
        ad = ad.min(max_step(&sc.lambda, &dst));
    }
    (ap, ad)
}

/// Iterations a warm-started run gets before falling back to a cold start.
const WARM_ITERATION_CAP: usize = 50;

pub(crate) fn solve(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    if opts.warm_start.is_none() {
        return solve_once(problem, opts);
    }
    let start = Instant::now();
    let capped = SolveOptions { max_iterations: opts.max_iterations.min(WARM_ITERATION_CAP), ..opts.clone() };
    match solve_once(problem, &capped) {
        Ok(sol) if sol.status == SolveStatus::Optimal => Ok(sol),
        _ => {
            // a stale start can sit far from the new central path
            let cold = SolveOptions { warm_start: None, ..opts.clone() };
            let mut sol = solve_once(problem, &cold)?;
            sol.seconds = start.elapsed().as_secs_f64();
            Ok(sol)
        }
    }
}

fn solve_once(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    let start = Instant::now();
    problem.validate()?;
    let rows = problem.independent_rows()?;
    let reduced;
    let p = if rows.len() == problem.constraints.len() {
        problem
    } else {
        reduced = problem.with_rows(&rows);
        &reduced
    };
    let data = Data::new(p);
    let nu = p.cone_degree().max(1) as f64;
    let warm = opts.warm_start.as_ref().map(|w| w.restricted_to(&rows));
    let mut it = initial_point(&data, warm.as_ref());

    let tol = opts.tolerance;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let mut res = residuals(&data, &it, nu);
    let mut stall_note = None;

    for iter in 0..=opts.max_iterations {
        let scale = 1.0 + res.pobj.abs() + res.dobj.abs();
        let rel_gap = (res.pobj - res.dobj).abs().max(res.complementarity) / scale;
        if rel_gap <= tol && res.pinf <= tol && res.dinf <= tol {
            status = SolveStatus::Optimal;
            break;
        }
        // crude certificates: a huge dual ray with bounded slack residual, or vice versa
        if res.dobj > 1e10 * (1.0 + res.pobj.abs()) && res.dinf < 1e-6 {
            status = SolveStatus::Infeasible;
            break;
        }
        if iter == opts.max_iterations {
            break;
        }
        iterations = iter + 1;

        let scal: Option<Vec<Scaling>> = it.xs.iter().zip(&it.ss).map(|(x, s)| nt_scaling(x, s)).collect();
        let Some(scal) = scal else {
            stall_note = Some("lost positive definiteness of an iterate");
            break;
        };
        let d_lp = it.xl.component_div(&it.sl);
        let ws: Vec<Dense> = scal.iter().map(|s| s.w.clone()).collect();
        let fac = match factor(data.schur(&ws, &d_lp)) {
            Ok(f) => f,
            Err(_) => {
                stall_note = Some("Schur complement factorization broke down");
                break;
            }
        };

        // predictor
        let h_aff: Vec<Dense> = it.xs.iter().map(|x| -x).collect();
        let dir_aff = direction(&data, &fac, &scal, &d_lp, &res, h_aff, -it.xl.clone());
        let (ap, ad) = step_lengths(&it, &scal, &dir_aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut comp_aff = 0.0;
        for k in 0..it.xs.len() {
            let xa = &it.xs[k] + &dir_aff.dxs[k] * ap;
            let sa = &it.ss[k] + &dir_aff.dss[k] * ad;
            comp_aff += xa.dot(&sa);
        }
        comp_aff += (&it.xl + &dir_aff.dxl * ap).dot(&(&it.sl + &dir_aff.dsl * ad));
        let sigma = (comp_aff / res.complementarity).clamp(0.0, 1.0).powi(3);
        let target = sigma * res.mu;

        // corrector
        let mut h_cor = Vec::with_capacity(scal.len());
        for (k, sc) in scal.iter().enumerate() {
            let n = sc.lambda.len();
            let dxt = &sc.g_inv * &dir_aff.dxs[k] * sc.g_inv.transpose();
            let dst = sc.g.transpose() * &dir_aff.dss[k] * &sc.g;
            let second = symmetrize(&(&dxt * &dst));
            let mut r = -second;
            for i in 0..n {
                r[(i, i)] += target - sc.lambda[i] * sc.lambda[i];
            }
            let ht = Dense::from_fn(n, n, |i, j| 2.0 * r[(i, j)] / (sc.lambda[i] + sc.lambda[j]));
            h_cor.push(symmetrize(&(&sc.g * ht * sc.g.transpose())));
        }
        let h_cor_lp = DVector::from_fn(data.lp_size, |k, _| {
            (target - it.xl[k] * it.sl[k] - dir_aff.dxl[k] * dir_aff.dsl[k]) / it.sl[k]
        });
        let dir = direction(&data, &fac, &scal, &d_lp, &res, h_cor, h_cor_lp);
        let (ap_max, ad_max) = step_lengths(&it, &scal, &dir);
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);
        let (Some((xs, ap)), Some((ss, ad))) = (pd_step(&it.xs, &dir.dxs, ap), pd_step(&it.ss, &dir.dss, ad)) else {
            stall_note = Some("could not keep the iterate positive definite");
            break;
        };
        it.xs = xs;
        it.ss = ss;
        it.xl += &dir.dxl * ap;
        it.sl += &dir.dsl * ad;
        it.y += &dir.dy * ad;
        res = residuals(&data, &it, nu);

        if opts.verbose {
            eprintln!(
                "{:3} pobj {:+.10e} dobj {:+.10e} pinf {:.2e} dinf {:.2e} mu {:.2e} step {:.3}/{:.3}",
                iterations, res.pobj, res.dobj, res.pinf, res.dinf, res.mu, ap, ad
            );
        }
    }

    let scale = 1.0 + res.pobj.abs() + res.dobj.abs();
    let rel_gap = (res.pobj - res.dobj).abs().max(res.complementarity) / scale;
    if let Some(note) = stall_note {
        // accept a breakdown at the very end of the path if the iterate is already accurate
        let near = 10.0 * tol;
        if rel_gap <= near && res.pinf <= near && res.dinf <= near {
            status = SolveStatus::Optimal;
        } else {
            return Err(Error::NumericalFailure(format!(
                "{note} at iteration {iterations} (relative gap {rel_gap:.2e})"
            )));
        }
    }

    // expand duals back to the original row set
    let mut y_full = vec![0.0; problem.constraints.len()];
    for (k, &r) in rows.iter().enumerate() {
        y_full[r] = it.y[k];
    }
    Ok(SdpSolution {
        status,
        primal_objective: res.pobj,
        dual_objective: res.dobj,
        gap: (res.pobj - res.dobj).abs(),
        relative_gap: rel_gap,
        primal_infeasibility: res.pinf,
        dual_infeasibility: res.dinf,
        iterations,
        x_blocks: it.xs,
        x_lp: it.xl.iter().copied().collect(),
        y: y_full,
        s_blocks: it.ss,
        s_lp: it.sl.iter().copied().collect(),
        dropped_rows: problem.constraints.len() - rows.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}
