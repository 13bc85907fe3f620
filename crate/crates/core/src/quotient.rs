//! Volume, total-scalar-curvature, and Yamabe-quotient quadrature.
//!
//! Integrals are tensor-product trapezoid sums with sqrt(det g) weight and
//! fixed summation order (compensated); exclusion bands contribute zero.

use crate::curvature::{self, Kernel};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::linalg::{self, CompensatedSum};
use crate::metric::MetricField;

/// Conformal-Laplacian coefficient a = 4 (n-1) / (n-2).
pub fn a_coefficient(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("a = 4(n-1)/(n-2) needs n >= 3, got {n}")));
    }
    Ok(4.0 * (n as f64 - 1.0) / (n as f64 - 2.0))
}

/// Critical Sobolev exponent p = 2n / (n-2).
pub fn p_exponent(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("p = 2n/(n-2) needs n >= 3, got {n}")));
    }
    Ok(2.0 * n as f64 / (n as f64 - 2.0))
}

/// Riemannian volume of the chart region (bands excluded).
pub fn volume(g: &MetricField) -> Result<f64> {
    let n = g.dim();
    let chart = g.chart();
    let mut buf = vec![0.0; n * n];
    let mut scratch = vec![0.0; n * n];
    let mut sum = CompensatedSum::new();
    let mut multi = vec![0usize; n];
    for flat in 0..chart.len() {
        chart.multi_index(flat, &mut multi);
        let w = chart.quad_weight(&multi);
        if w == 0.0 {
            continue;
        }
        g.at_index(flat, &mut buf);
        let det = linalg::determinant(&buf, &mut scratch, n);
        if det <= 0.0 {
            return Err(Error::SingularMetric { index: flat, point: chart.point_vec(flat) });
        }
        sum.add(w * det.sqrt());
    }
    Ok(sum.value())
}

/// Integral of a sampled function against dV_g, restricted to points where
/// the function is finite and outside bands. Returns (integral, volume of the
/// same point set).
fn integrate_with_volume(g: &MetricField, f: &ScalarField) -> Result<(f64, f64)> {
    let n = g.dim();
    let chart = g.chart();
    let mut buf = vec![0.0; n * n];
    let mut scratch = vec![0.0; n * n];
    let mut int = CompensatedSum::new();
    let mut vol = CompensatedSum::new();
    let mut multi = vec![0usize; n];
    for flat in 0..chart.len() {
        chart.multi_index(flat, &mut multi);
        let w = chart.quad_weight(&multi);
        if w == 0.0 {
            continue;
        }
        let v = f.value(flat);
        if v.is_nan() {
            continue;
        }
        g.at_index(flat, &mut buf);
        let det = linalg::determinant(&buf, &mut scratch, n);
        if det <= 0.0 {
            return Err(Error::SingularMetric { index: flat, point: chart.point_vec(flat) });
        }
        let dv = w * det.sqrt();
        int.add(v * dv);
        vol.add(dv);
    }
    Ok((int.value(), vol.value()))
}

/// Normalized total scalar curvature `int s dV / vol^{(n-2)/n}`.
pub fn einstein_hilbert(g: &MetricField) -> Result<f64> {
    let n = g.dim();
    let s = curvature::scalar_curvature(g)?;
    let (total, vol) = integrate_with_volume(g, &s)?;
    if vol <= 0.0 {
        return Err(Error::Domain("empty integration region".into()));
    }
    Ok(total / vol.powf((n as f64 - 2.0) / n as f64))
}

/// Yamabe quotient of a test function:
/// `int (a |d phi|^2 + s phi^2) dV / (int |phi|^p dV)^{2/p}`.
///
/// Scale invariant: Q(c phi) = Q(phi).
pub fn yamabe_quotient(g: &MetricField, phi: &ScalarField) -> Result<f64> {
    let n = g.dim();
    let a = a_coefficient(n)?;
    let p = p_exponent(n)?;
    let chart = g.chart();
    let s = curvature::scalar_curvature(g)?;

    let mut kernel = Kernel::new(n);
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    let mut buf = vec![0.0; n * n];
    let mut scratch = vec![0.0; n * n];
    let mut dphi = vec![0.0; n];
    let mut multi = vec![0usize; n];
    let pv = phi.values();
    for flat in 0..chart.len() {
        chart.multi_index(flat, &mut multi);
        let w = chart.quad_weight(&multi);
        if w == 0.0 || !chart.is_valid(&multi) {
            continue;
        }
        g.at_index(flat, &mut buf);
        let det = linalg::determinant(&buf, &mut scratch, n);
        if det <= 0.0 {
            return Err(Error::SingularMetric { index: flat, point: chart.point_vec(flat) });
        }
        let dv = w * det.sqrt();
        let sval = s.value(flat);
        // |d phi|_g^2 via the inverse metric.
        kernel_load_inverse(&mut kernel, g, flat)?;
        for a_ax in 0..n {
            let h = chart.spacing(a_ax);
            let ip = chart.neighbor(&multi, a_ax, 1).expect("interior");
            let im = chart.neighbor(&multi, a_ax, -1).expect("interior");
            dphi[a_ax] = (pv[ip] - pv[im]) / (2.0 * h);
        }
        let mut grad2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                grad2 += kernel.ginv()[i * n + j] * dphi[i] * dphi[j];
            }
        }
        let f = pv[flat];
        num.add((a * grad2 + sval * f * f) * dv);
        den.add(f.abs().powf(p) * dv);
    }
    let den = den.value();
    if den <= 0.0 {
        return Err(Error::DegenerateTestFunction);
    }
    Ok(num.value() / den.powf(2.0 / p))
}

fn kernel_load_inverse(kernel: &mut Kernel, g: &MetricField, flat: usize) -> Result<()> {
    kernel.load_inverse_only(g, flat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn torus_volume_is_product_of_periods() {
        let g = models::flat_torus(&[1.0, 1.0, 1.0], &[8, 8, 8]).unwrap();
        assert!((volume(&g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quotient_rejects_zero_test_function() {
        let g = models::flat_torus(&[1.0, 1.0, 1.0], &[8, 8, 8]).unwrap();
        let phi = ScalarField::constant(g.chart().clone(), 0.0);
        assert!(matches!(yamabe_quotient(&g, &phi), Err(Error::DegenerateTestFunction)));
    }
}
