//! Conformal factors and the scalar-curvature transformation law.
//!
//! Conformal changes are written `g_bar = u^{p-2} g` with `p = 2n/(n-2)` and
//! positive `u`. The scalar curvature transforms as
//!
//!   s_bar = u^{1-p} (a Delta_g u + s_g u),     a = 4 (n-1) / (n-2),
//!
//! with the positive-spectrum Laplacian. The coefficient `a` (rather than
//! `4a`) is the one consistent with the quotient's Euler-Lagrange operator
//! `a Delta + s`; the cross-check against direct curvature computation of the
//! transformed metric lives in the test suite.

use crate::curvature;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::metric::MetricField;
use crate::quotient::{a_coefficient, p_exponent};

#[derive(Debug, Clone)]
pub struct ConformalFactor {
    u: ScalarField,
    p: f64,
    n: usize,
}

impl ConformalFactor {
    /// Wrap a positive sampled function; `p` is fixed by the chart dimension.
    pub fn new(u: ScalarField) -> Result<Self> {
        let n = u.chart().dim();
        let p = p_exponent(n)?;
        for (flat, v) in u.values().iter().enumerate() {
            if !(*v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "conformal factor must be positive; u = {v} at point {:?}",
                    u.chart().point_vec(flat)
                )));
            }
        }
        Ok(ConformalFactor { u, p, n })
    }

    pub fn from_fn(chart: crate::chart::GridChart, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(ScalarField::from_fn(chart, f))
    }

    pub fn field(&self) -> &ScalarField {
        &self.u
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// The conformally changed metric `u^{p-2} g`, sampled on the chart.
pub fn conformal_metric(g: &MetricField, u: &ConformalFactor) -> Result<MetricField> {
    if g.dim() != u.dim() {
        return Err(Error::InvalidParameter("conformal factor lives on a different chart".into()));
    }
    let p = u.p();
    let factor: Vec<f64> = u.field().values().iter().map(|v| v.powf(p - 2.0)).collect();
    g.scaled_pointwise(&factor, format!("conf({})", g.name()))
}

/// Scalar curvature of `u^{p-2} g` via the transformation law
/// `u^{1-p} (a Delta_g u + s_g u)`; NaN where curvature is not evaluated.
pub fn conformal_scalar_formula(g: &MetricField, u: &ConformalFactor) -> Result<ScalarField> {
    if g.dim() != u.dim() {
        return Err(Error::InvalidParameter("conformal factor lives on a different chart".into()));
    }
    let n = g.dim();
    let a = a_coefficient(n)?;
    let p = u.p();
    let s = curvature::scalar_curvature(g)?;
    let lap = curvature::laplacian(g, u.field())?;
    let mut out = ScalarField::constant(g.chart().clone(), f64::NAN);
    for flat in 0..g.chart().len() {
        let sv = s.value(flat);
        let lv = lap.value(flat);
        if sv.is_nan() || lv.is_nan() {
            continue;
        }
        let uv = u.field().value(flat);
        out.values_mut()[flat] = uv.powf(1.0 - p) * (a * lv + sv * uv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn rejects_nonpositive_factor() {
        let g = models::flat_torus(&[1.0, 1.0, 1.0], &[6, 6, 6]).unwrap();
        let u = ScalarField::from_fn(g.chart().clone(), |p| p[0] - 0.4);
        assert!(ConformalFactor::new(u).is_err());
    }

    #[test]
    fn identity_factor_preserves_scalar_curvature() {
        let g = models::flat_torus(&[1.0, 1.0, 1.0], &[8, 8, 8]).unwrap();
        let u = ConformalFactor::new(ScalarField::constant(g.chart().clone(), 1.0)).unwrap();
        let s = conformal_scalar_formula(&g, &u).unwrap();
        assert!(s.sup_deviation(0.0) < 1e-10);
    }
}
