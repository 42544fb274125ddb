//! Parameter sweeps over the depolarizing and BB84 families, with the
//! composite hull bounds and CSV output.

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::BoundTerms;
use crate::degradability::{epsilon_degradable_with, DegradabilityReport};
use crate::entropy::h2;
use crate::envelope::{lower_convex_envelope, merged_envelope, EnvelopePoints};
use crate::error::{domain, Result};
use crate::optimize::u_xi;
use crate::sdp::{SdpSolution, SolveOptions, DEFAULT_TOLERANCE};
use crate::zoo::ChannelFamilySpec;

/// Consecutive grid points solved by one worker, each warm-started from the
/// previous one. Fixed so that the output does not depend on the worker count.
const BLOCK: usize = 8;

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub tolerance: f64,
    pub workers: usize,
    pub warm_start: bool,
    pub with_u_xi: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, workers: 1, warm_start: true, with_u_xi: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub spec: ChannelFamilySpec,
    pub q1: f64,
    /// `NaN` when the solve failed.
    pub epsilon: f64,
    pub dim_e: usize,
    /// `Q1 + fa + af` at this `epsilon`.
    pub thm1_i: f64,
    /// Prior bounds, in the order of [`SweepTable::member_names`].
    pub members: Vec<f64>,
    pub hull: f64,
    pub u_xi: Option<f64>,
    /// `None` on success, otherwise the solver error.
    pub error: Option<String>,
    pub iterations: usize,
    pub seconds: f64,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub family: String,
    pub ratio: Option<f64>,
    pub member_names: Vec<String>,
    pub tolerance: f64,
    pub rows: Vec<SweepRow>,
    pub envelope: EnvelopePoints,
    /// True when some row failed and the hull was taken without it.
    pub flagged: bool,
    pub seconds: f64,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let get = |f: &dyn Fn(&SweepRow) -> f64| Some(self.rows.iter().map(f).collect());
        match name {
            "param" => get(&|r| r.param),
            "q1" => get(&|r| r.q1),
            "epsilon" => get(&|r| r.epsilon),
            "thm1_i" => get(&|r| r.thm1_i),
            "hull" => get(&|r| r.hull),
            _ => {
                let k = self.member_names.iter().position(|n| n == name)?;
                get(&|r| r.members[k])
            }
        }
    }

    pub fn row_at(&self, param: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| (r.param - param).abs() < 1e-12)
    }

    /// Grid points where the hull exceeds a constituent or falls below `q1`, beyond `slack`.
    pub fn dominance_violations(&self, slack: f64) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| {
                let above = r.ok() && r.hull > r.thm1_i + slack;
                let above_member = r.members.iter().any(|&m| r.hull > m + slack);
                above || above_member || r.hull < r.q1 - slack
            })
            .map(|r| r.param)
            .collect()
    }
}

fn check_grid(grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if let Some(p) = grid.iter().find(|p| !(lo..=hi).contains(*p)) {
        return domain(format!("grid value {p} outside [{lo}, {hi}]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("grid must be strictly increasing");
    }
    Ok(())
}

/// `4 (sqrt(1-p) - 1 + p)`
fn gamma(p: f64) -> f64 {
    4.0 * ((1.0 - p).sqrt() - 1.0 + p)
}

/// The three prior bounds on the depolarizing channel, valid for `p <= 1/4`.
pub fn depolarizing_prior_members(p: f64) -> [f64; 3] {
    let g = gamma(p);
    [1.0 - h2(p), h2((1.0 + g) / 2.0) - h2(g / 2.0), 1.0 - 4.0 * p]
}

/// `1 + (1-p) log(1-p) + p log(p/3)`, clamped at zero.
pub fn depolarizing_q1(p: f64) -> f64 {
    let t = |x: f64, y: f64| if x > 0.0 { x * y.log2() } else { 0.0 };
    (1.0 + t(1.0 - p, 1.0 - p) + t(p, p / 3.0)).max(0.0)
}

/// `h(1/2 - 2p(1-p)) - h(2p(1-p))`, the prior bound for equal flip probabilities.
pub fn bb84_prior_member(p: f64) -> f64 {
    let q = 2.0 * p * (1.0 - p);
    h2(0.5 - q) - h2(q)
}

/// `1 - h(p_x) - h(p_z)`, clamped at zero.
pub fn bb84_q1(p_x: f64, p_z: f64) -> f64 {
    (1.0 - h2(p_x) - h2(p_z)).max(0.0)
}

/// Hull of the prior depolarizing members alone.
pub fn depolarizing_prior_hull(p_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(p_grid, 0.0, 0.25)?;
    let cols: Vec<Vec<f64>> = (0..3).map(|k| p_grid.iter().map(|&p| depolarizing_prior_members(p)[k]).collect()).collect();
    let env = merged_envelope(p_grid, &cols.iter().map(Vec::as_slice).collect::<Vec<_>>())?;
    Ok(p_grid.iter().map(|&p| env.eval(p).unwrap_or(f64::NAN)).collect())
}

struct Point {
    param: f64,
    spec: ChannelFamilySpec,
    q1: f64,
    members: Vec<f64>,
}

struct Solved {
    report: Result<DegradabilityReport>,
    u_xi: Option<f64>,
    seconds: f64,
}

fn solve_point(point: &Point, opts: &SweepOptions, warm: Option<SdpSolution>) -> Solved {
    let start = Instant::now();
    let solve_opts = SolveOptions { tolerance: opts.tolerance, warm_start: warm, ..SolveOptions::default() };
    let report = point.spec.build().and_then(|ch| {
        let r = epsilon_degradable_with(&ch, &solve_opts)?;
        Ok((ch, r))
    });
    let (report, u) = match report {
        Ok((ch, r)) => {
            let u = if opts.with_u_xi { r.degrading_map().and_then(|xi| u_xi(&ch, &xi)).ok() } else { None };
            (Ok(r), u)
        }
        Err(e) => (Err(e), None),
    };
    Solved { report, u_xi: u, seconds: start.elapsed().as_secs_f64() }
}

/// Solves all points in fixed blocks on `opts.workers` threads; results come back in grid order.
fn solve_all(points: &[Point], opts: &SweepOptions) -> Vec<Solved> {
    let blocks: Vec<&[Point]> = points.chunks(BLOCK).collect();
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<Vec<Solved>>>> = Mutex::new((0..blocks.len()).map(|_| None).collect());
    let run_block = |block: &[Point]| {
        let mut warm: Option<SdpSolution> = None;
        block
            .iter()
            .map(|p| {
                let s = solve_point(p, opts, if opts.warm_start { warm.take() } else { None });
                if let Ok(r) = &s.report {
                    warm = Some(r.solver.clone());
                }
                s
            })
            .collect::<Vec<_>>()
    };
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.max(1).min(blocks.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= blocks.len() {
                    break;
                }
                let solved = run_block(blocks[k]);
                out.lock().expect("no worker panicked")[k] = Some(solved);
            });
        }
    });
    out.into_inner().expect("no worker panicked").into_iter().flat_map(|b| b.expect("every block solved")).collect()
}

fn assemble(family: &str, ratio: Option<f64>, member_names: Vec<String>, points: Vec<Point>, opts: &SweepOptions) -> Result<SweepTable> {
    let start = Instant::now();
    let solved = solve_all(&points, opts);
    let mut rows: Vec<SweepRow> = points
        .into_iter()
        .zip(solved)
        .map(|(p, s)| {
            let (epsilon, dim_e, thm1_i, iterations, error) = match &s.report {
                Ok(r) => {
                    let thm = BoundTerms::new(r.epsilon, r.dim_e, r.dim_f.max(1)).map(|t| p.q1 + t.xi);
                    match thm {
                        Ok(v) => (r.epsilon, r.dim_e, v, r.solver.iterations, None),
                        Err(e) => (f64::NAN, r.dim_e, f64::NAN, r.solver.iterations, Some(e.to_string())),
                    }
                }
                Err(e) => (f64::NAN, 0, f64::NAN, 0, Some(e.to_string())),
            };
            SweepRow {
                param: p.param,
                spec: p.spec,
                q1: p.q1,
                epsilon,
                dim_e,
                thm1_i,
                members: p.members,
                hull: f64::NAN,
                u_xi: s.u_xi,
                error,
                iterations,
                seconds: s.seconds,
            }
        })
        .collect();

    let grid: Vec<f64> = rows.iter().map(|r| r.param).collect();
    let mut cols: Vec<Vec<f64>> = vec![rows.iter().map(|r| r.thm1_i).collect()];
    for k in 0..member_names.len() {
        cols.push(rows.iter().map(|r| r.members[k]).collect());
    }
    let envelope = if grid.is_empty() {
        lower_convex_envelope(&[])?
    } else {
        merged_envelope(&grid, &cols.iter().map(Vec::as_slice).collect::<Vec<_>>())?
    };
    for r in &mut rows {
        r.hull = envelope.eval(r.param).unwrap_or(f64::NAN);
    }
    let flagged = rows.iter().any(|r| !r.ok());
    Ok(SweepTable {
        family: family.into(),
        ratio,
        member_names,
        tolerance: opts.tolerance,
        rows,
        envelope,
        flagged,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn sweep_depolarizing(p_grid: &[f64]) -> Result<SweepTable> {
    sweep_depolarizing_with(p_grid, &SweepOptions::default())
}

/// Depolarizing sweep; the hull is taken over the `thm1_i` bound and
/// the three prior members. The prior hull is carried as an extra member.
pub fn sweep_depolarizing_with(p_grid: &[f64], opts: &SweepOptions) -> Result<SweepTable> {
    check_grid(p_grid, 0.0, 0.25)?;
    let prior_hull = if p_grid.is_empty() { vec![] } else { depolarizing_prior_hull(p_grid)? };
    let points = p_grid
        .iter()
        .zip(prior_hull)
        .map(|(&p, ph)| {
            let mut members = depolarizing_prior_members(p).to_vec();
            members.push(ph);
            Point { param: p, spec: ChannelFamilySpec::Depolarizing { p }, q1: depolarizing_q1(p), members }
        })
        .collect();
    let names = ["one_minus_h", "gamma_member", "one_minus_4p", "prior_hull"].map(String::from).to_vec();
    assemble("depolarizing", None, names, points, opts)
}

pub fn sweep_bb84(p_grid: &[f64], ratio: f64) -> Result<SweepTable> {
    sweep_bb84_with(p_grid, ratio, &SweepOptions::default())
}

/// BB84 sweep with `p_x = p` and `p_z = ratio * p`. The prior member is only
/// defined for `ratio = 1`.
pub fn sweep_bb84_with(p_grid: &[f64], ratio: f64, opts: &SweepOptions) -> Result<SweepTable> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return domain(format!("ratio must be positive, got {ratio}"));
    }
    check_grid(p_grid, 0.0, 0.5 / ratio.max(1.0))?;
    let symmetric = ratio == 1.0;
    let points = p_grid
        .iter()
        .map(|&p| {
            let (p_x, p_z) = (p, ratio * p);
            let members = if symmetric { vec![bb84_prior_member(p)] } else { vec![] };
            Point { param: p, spec: ChannelFamilySpec::Bb84 { p_x, p_z }, q1: bb84_q1(p_x, p_z), members }
        })
        .collect();
    let names = if symmetric { vec!["prior_bb84".to_string()] } else { vec![] };
    assemble("bb84", Some(ratio), names, points, opts)
}

/// `%.9g`-style formatting.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..9).contains(&exp) {
        trim(&format!("{:.*}", (8 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

pub fn header(table: &SweepTable) -> Vec<String> {
    let mut h: Vec<String> = ["param", "q1", "epsilon", "thm1_i"].map(String::from).to_vec();
    h.extend(table.member_names.iter().cloned());
    h.push("hull".into());
    if table.rows.iter().any(|r| r.u_xi.is_some()) {
        h.push("u_xi".into());
    }
    h.push("status".into());
    h
}

pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let head = header(table);
    let with_u = head.iter().any(|h| h == "u_xi");
    w.write_record(&head)?;
    for r in &table.rows {
        let mut rec: Vec<String> = [r.param, r.q1, r.epsilon, r.thm1_i].iter().map(|&v| format_g9(v)).collect();
        rec.extend(r.members.iter().map(|&v| format_g9(v)));
        rec.push(format_g9(r.hull));
        if with_u {
            rec.push(r.u_xi.map_or_else(|| "nan".into(), format_g9));
        }
        rec.push(if r.ok() { "ok".into() } else { "failed".into() });
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV to `path`.
pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(table, std::io::BufWriter::new(file))
}

#[derive(Serialize)]
struct Meta<'a> {
    family: &'a str,
    ratio: Option<f64>,
    grid: Vec<f64>,
    tolerance: f64,
    flagged: bool,
    seconds: f64,
    rows: Vec<MetaRow<'a>>,
}

#[derive(Serialize)]
struct MetaRow<'a> {
    param: f64,
    iterations: usize,
    seconds: f64,
    error: Option<&'a str>,
}

/// Companion metadata (grid, tolerance, timings, row errors) at `path` + ".meta.json".
pub fn emit_meta(table: &SweepTable, path: &Path) -> Result<()> {
    let meta = Meta {
        family: &table.family,
        ratio: table.ratio,
        grid: table.rows.iter().map(|r| r.param).collect(),
        tolerance: table.tolerance,
        flagged: table.flagged,
        seconds: table.seconds,
        rows: table
            .rows
            .iter()
            .map(|r| MetaRow { param: r.param, iterations: r.iterations, seconds: r.seconds, error: r.error.as_deref() })
            .collect(),
    };
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.json");
    std::fs::write(p, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Evenly spaced grid from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_formatting() {
        assert_eq!(format_g9(0.0), "0");
        assert_eq!(format_g9(1.0), "1");
        assert_eq!(format_g9(0.1), "0.1");
        assert_eq!(format_g9(0.634355), "0.634355");
        assert_eq!(format_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_g9(2.70111e-4), "0.000270111");
        assert_eq!(format_g9(1.5e-7), "1.5e-07");
        assert_eq!(format_g9(123456789012.0), "1.23456789e+11");
        assert_eq!(format_g9(-0.5), "-0.5");
    }

    #[test]
    fn closed_forms() {
        assert!((depolarizing_q1(0.05) - 0.634355).abs() < 1e-6);
        assert!((depolarizing_q1(0.1) - 0.372508).abs() < 1e-6);
        assert_eq!(depolarizing_q1(0.0), 1.0);
        assert!((bb84_prior_member(0.005) - 0.919253).abs() < 1e-6);
        assert!((bb84_q1(0.0005, 0.05) - 0.707399).abs() < 1e-6);
        assert_eq!(depolarizing_prior_members(0.0), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn prior_hull_value() {
        let grid = linspace(0.0, 0.1, 101);
        let hull = depolarizing_prior_hull(&grid).unwrap();
        assert!((hull[50] - 0.709292).abs() < 1e-4, "{}", hull[50]);
    }

    #[test]
    fn grid_validation() {
        assert!(sweep_depolarizing(&[0.3]).is_err());
        assert!(sweep_depolarizing(&[0.02, 0.01]).is_err());
        assert!(sweep_bb84(&[0.01], 0.0).is_err());
    }

    #[test]
    fn empty_table_has_header_only() {
        let t = sweep_depolarizing(&[]).unwrap();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "param,q1,epsilon,thm1_i,one_minus_h,gamma_member,one_minus_4p,prior_hull,hull,status\n");
    }
}
