//! Lower convex envelopes of sampled curves.

use serde::Serialize;

use crate::error::{domain, shape, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopePoints {
    /// Hull vertices in increasing `x`.
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl EnvelopePoints {
    /// Piecewise-linear value at `x`, or `None` outside the sampled range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let v = &self.vertices;
        let (first, last) = (v.first()?, v.last()?);
        if x < first.0 || x > last.0 {
            return None;
        }
        let k = v.partition_point(|p| p.0 < x);
        if k == 0 {
            return Some(first.1);
        }
        let (a, b) = (v[k - 1], v[k]);
        Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
    }
}

/// Lower convex hull of points with strictly increasing `x`.
pub fn lower_convex_envelope(points: &[(f64, f64)]) -> Result<EnvelopePoints> {
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return domain("envelope points must be finite");
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return domain("envelope abscissae must be strictly increasing");
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(EnvelopePoints { vertices: hull })
}

/// Envelope of the pointwise minimum of several curves sampled on `grid`.
/// Non-finite samples are ignored; grid points where every curve is
/// non-finite are left out of the hull.
pub fn merged_envelope(grid: &[f64], curves: &[&[f64]]) -> Result<EnvelopePoints> {
    if curves.iter().any(|c| c.len() != grid.len()) {
        return shape("every curve must have one value per grid point");
    }
    let points: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let y = curves.iter().map(|c| c[i]).filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
            y.is_finite().then_some((x, y))
        })
        .collect();
    lower_convex_envelope(&points)
}
