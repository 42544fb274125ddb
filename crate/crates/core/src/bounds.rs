//! Continuity terms and the capacity bounds of approximately degradable
//! channels. All logarithms are base 2.

use serde::Serialize;

use crate::degradability::DegradabilityReport;
use crate::entropy::h2;
use crate::error::{domain, Error, Result};

const MAX_EPSILON: f64 = 2.0;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=MAX_EPSILON).contains(&epsilon) {
        return domain(format!("epsilon {epsilon} outside [0, 2]"));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return domain("dimension must be at least 1");
    }
    Ok(())
}

fn log2(d: usize) -> f64 {
    (d as f64).log2()
}

/// `(1 + e/2) h(e / (2 + e))`, shared by every conditional-entropy term.
fn af_tail(epsilon: f64) -> f64 {
    (1.0 + epsilon / 2.0) * h2(epsilon / (2.0 + epsilon))
}

/// `(e/2) log(d - 1) + h(e/2)`: continuity modulus of the entropy of a
/// `d`-dimensional state in trace distance `e`.
pub fn fannes_audenaert_term(epsilon: f64, dim: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_dim(dim)?;
    let spread = if dim > 1 { epsilon / 2.0 * log2(dim - 1) } else { 0.0 };
    Ok(spread + h2(epsilon / 2.0))
}

/// `e log d + (1 + e/2) h(e / (2 + e))`: continuity modulus of the
/// conditional entropy `H(A|B)` with `|A| = d`.
pub fn alicki_fannes_term(epsilon: f64, dim: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_dim(dim)?;
    Ok(epsilon * log2(dim) + af_tail(epsilon))
}

/// Every intermediate quantity entering the bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTerms {
    pub epsilon: f64,
    pub dim_e: usize,
    pub dim_f: usize,
    /// `(e/2) log(|E|-1) + h(e/2)`
    pub fa: f64,
    /// `e log|E| + (1+e/2) h(e/(2+e))`
    pub af: f64,
    /// `e log|F| + (1+e/2) h(e/(2+e))`
    pub af_f: f64,
    /// `fa + af`
    pub xi: f64,
    /// `2 af`
    pub xi1: f64,
    /// `fa + af`
    pub xi2: f64,
}

impl BoundTerms {
    pub fn new(epsilon: f64, dim_e: usize, dim_f: usize) -> Result<Self> {
        let fa = fannes_audenaert_term(epsilon, dim_e)?;
        let af = alicki_fannes_term(epsilon, dim_e)?;
        let af_f = alicki_fannes_term(epsilon, dim_f)?;
        Ok(Self { epsilon, dim_e, dim_f, fa, af, af_f, xi: fa + af, xi1: 2.0 * af, xi2: fa + af })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub q1: f64,
    pub u_xi: f64,
    /// `Q <= Q1 + xi`
    pub q_upper_thm1_i: f64,
    /// `Q <= U_Xi + af`
    pub q_upper_thm1_ii: f64,
    /// `P <= Q1 + fa + 3 e log|E| + 3 (1+e/2) h(e/(2+e))`
    pub p_upper_thm1_iii: f64,
    /// `P <= U_Xi + e (2 log|E| + log|F| / 2) + (5/2)(1+e/2) h(e/(2+e))`
    pub p_upper_thm1_iv: f64,
    /// `P1 <= Q1 + xi`
    pub p1_upper_thm1_v: f64,
    /// Side-channel assisted quantum capacity, `<= U_Xi + af`.
    pub qss_upper: f64,
    /// Side-channel assisted private capacity, same form as the `P` bound via `U_Xi`.
    pub pss_upper: f64,
    /// Vanishing-capacity bound from the anti-degradability parameter, if known.
    pub anti_upper: Option<f64>,
    pub terms: BoundTerms,
}

impl CapacityBounds {
    /// `(name, value)` for every upper bound on `Q`, `P` or `P1`.
    pub fn upper_bounds(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("q_upper_thm1_i", self.q_upper_thm1_i),
            ("q_upper_thm1_ii", self.q_upper_thm1_ii),
            ("p_upper_thm1_iii", self.p_upper_thm1_iii),
            ("p_upper_thm1_iv", self.p_upper_thm1_iv),
            ("p1_upper_thm1_v", self.p1_upper_thm1_v),
            ("qss_upper", self.qss_upper),
            ("pss_upper", self.pss_upper),
        ];
        if let Some(a) = self.anti_upper {
            v.push(("anti_upper", a));
        }
        v
    }

    /// Names of the bounds that fall below `q1 - slack`; empty when consistent.
    pub fn violations(&self, slack: f64) -> Vec<&'static str> {
        self.upper_bounds().into_iter().filter(|&(_, v)| self.q1 > v + slack).map(|(n, _)| n).collect()
    }
}

/// Assembles every bound from a degradability report and precomputed
/// `q1 = Q1(Phi)` and `u_xi = U_Xi(Phi)` for the report's degrading map.
pub fn capacity_bounds(report: &DegradabilityReport, q1: f64, u_xi: f64) -> Result<CapacityBounds> {
    if report.dim_e == 0 || report.dim_f == 0 {
        return Err(Error::DimensionMetadataMissing);
    }
    if report.anti {
        return domain("capacity bounds need a degradability report, got an anti-degradability one");
    }
    let terms = BoundTerms::new(report.epsilon, report.dim_e, report.dim_f)?;
    let e = terms.epsilon;
    let tail = af_tail(e);
    let p_iii = q1 + terms.fa + 3.0 * e * log2(terms.dim_e) + 3.0 * tail;
    let p_iv = u_xi + e * (2.0 * log2(terms.dim_e) + 0.5 * log2(terms.dim_f)) + 2.5 * tail;
    Ok(CapacityBounds {
        q1,
        u_xi,
        q_upper_thm1_i: q1 + terms.xi,
        q_upper_thm1_ii: u_xi + terms.af,
        p_upper_thm1_iii: p_iii,
        p_upper_thm1_iv: p_iv,
        p1_upper_thm1_v: q1 + terms.xi,
        qss_upper: u_xi + terms.af,
        pss_upper: p_iv,
        anti_upper: None,
        terms,
    })
}

/// `Q, P <= (e/2) log(|B|-1) + e log|B| + h(e/2) + (1+e/2) h(e/(2+e))` for an
/// `e`-anti-degradable channel with output dimension `|B|`.
pub fn anti_degradable_bound(report: &DegradabilityReport, dim_b: usize) -> Result<f64> {
    if !report.anti {
        return domain("anti-degradable bound needs an anti-degradability report");
    }
    anti_degradable_bound_value(report.epsilon, dim_b)
}

pub fn anti_degradable_bound_value(epsilon: f64, dim_b: usize) -> Result<f64> {
    Ok(fannes_audenaert_term(epsilon, dim_b)? + alicki_fannes_term(epsilon, dim_b)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CloseDegradableBounds {
    pub quantum: Interval,
    pub private: Interval,
    /// Range of `Q` and `P` when the nearby channel is anti-degradable instead.
    pub anti: Interval,
}

/// Capacity ranges for a channel within diamond distance `epsilon` of a
/// degradable channel with coherent information `q1_of_nearby`. Lower ends
/// are clamped at zero.
pub fn close_degradable_bounds(epsilon: f64, dim_b: usize, q1_of_nearby: f64) -> Result<CloseDegradableBounds> {
    check_epsilon(epsilon)?;
    check_dim(dim_b)?;
    let term = epsilon * log2(dim_b) + (2.0 + epsilon) * h2(epsilon / (2.0 + epsilon));
    let around = |w: f64| Interval { lower: (q1_of_nearby - w).max(0.0), upper: q1_of_nearby + w };
    Ok(CloseDegradableBounds {
        quantum: around(term),
        private: around(2.0 * term),
        anti: Interval { lower: 0.0, upper: 2.0 * term },
    })
}

/// `e + 2 sqrt(e)`: a channel `e`-close to a degradable one is at most this
/// far from being degradable. Values above 2 carry no information.
pub fn close_to_eps_degradable(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(epsilon + 2.0 * epsilon.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fannes_audenaert_values() {
        assert_eq!(fannes_audenaert_term(0.0, 5).unwrap(), 0.0);
        assert!((fannes_audenaert_term(1.0, 2).unwrap() - 1.0).abs() < 1e-15);
        let v = fannes_audenaert_term(0.1, 4).unwrap();
        assert!((v - (0.05 * 3f64.log2() + h2(0.05))).abs() < 1e-15);
        assert!((v - 0.3657).abs() < 1e-4);
        assert!((fannes_audenaert_term(0.2, 1).unwrap() - h2(0.1)).abs() < 1e-15);
        assert!(fannes_audenaert_term(2.5, 2).is_err());
        assert!(fannes_audenaert_term(0.1, 0).is_err());
    }

    #[test]
    fn alicki_fannes_values() {
        assert_eq!(alicki_fannes_term(0.0, 3).unwrap(), 0.0);
        assert!((alicki_fannes_term(2.0, 2).unwrap() - 4.0).abs() < 1e-14);
        let v = alicki_fannes_term(0.1, 4).unwrap();
        assert!((v - (0.2 + 1.05 * h2(0.1 / 2.1))).abs() < 1e-15);
        assert!((v - 0.4900).abs() < 1e-4);
    }

    #[test]
    fn anti_degradable_value() {
        assert_eq!(anti_degradable_bound_value(0.0, 2).unwrap(), 0.0);
        assert!((anti_degradable_bound_value(0.1, 2).unwrap() - 0.6764).abs() < 1e-4);
    }

    #[test]
    fn close_degradable_intervals() {
        let b = close_degradable_bounds(0.0, 2, 0.8).unwrap();
        assert_eq!(b.quantum, Interval { lower: 0.8, upper: 0.8 });
        assert_eq!(b.private, Interval { lower: 0.8, upper: 0.8 });
        assert_eq!(b.anti, Interval { lower: 0.0, upper: 0.0 });
        let b = close_degradable_bounds(0.05, 2, 0.8).unwrap();
        let w = 0.05 + 2.05 * h2(0.05 / 2.05);
        assert!((b.quantum.upper - 0.8 - w).abs() < 1e-15);
        assert!((b.private.upper - 0.8 - 2.0 * w).abs() < 1e-15);
        assert!((w - 0.3891).abs() < 1e-4);
    }

    #[test]
    fn close_to_degradable_values() {
        assert_eq!(close_to_eps_degradable(0.0).unwrap(), 0.0);
        assert!((close_to_eps_degradable(0.01).unwrap() - 0.21).abs() < 1e-15);
        assert!((close_to_eps_degradable(1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(close_to_eps_degradable(-0.1).is_err());
    }

    #[test]
    fn terms_vanish_at_zero() {
        let t = BoundTerms::new(0.0, 4, 8).unwrap();
        assert_eq!((t.fa, t.af, t.af_f, t.xi, t.xi1, t.xi2), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }
}
