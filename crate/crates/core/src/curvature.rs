//! Curvature from metric samples: Christoffel symbols, Riemann and Ricci
//! tensors, scalar curvature, and the metric Laplacian.
//!
//! Everything is computed pointwise from the metric, its first derivatives,
//! and its second derivatives, using centered second-order differences on the
//! chart grid (closed-form metrics are evaluated at the offset coordinates,
//! same stencil and order). The conventions are
//!
//!   Gamma^C_AB = 1/2 g^CD (d_A g_BD + d_B g_AD - d_D g_AB)
//!   R^D_ABC    = d_A Gamma^D_BC - d_B Gamma^D_AC
//!                + Gamma^E_BC Gamma^D_AE - Gamma^E_AC Gamma^D_BE
//!   Ric_BC     = R^A_ABC,   s = g^BC Ric_BC
//!
//! calibrated so that the round unit n-sphere has s = n(n-1) > 0 and the
//! Laplacian below has positive spectrum.

use serde::Serialize;

use crate::chart::GridChart;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::linalg;
use crate::metric::{MetricData, MetricField};

/// Dense tensor samples over a chart; `NaN` marks points where the tensor is
/// not evaluated (chart boundary or exclusion bands).
#[derive(Debug, Clone)]
pub struct TensorField {
    pub chart: GridChart,
    pub rank: usize,
    pub values: Vec<f64>,
}

impl TensorField {
    fn nan(chart: GridChart, rank: usize) -> Self {
        let n = chart.dim();
        let len = chart.len() * n.pow(rank as u32);
        TensorField { chart, rank, values: vec![f64::NAN; len] }
    }

    pub fn components_per_point(&self) -> usize {
        self.chart.dim().pow(self.rank as u32)
    }

    pub fn block(&self, flat: usize) -> &[f64] {
        let m = self.components_per_point();
        &self.values[flat * m..(flat + 1) * m]
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub christoffel: TensorField,
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub scalar: ScalarField,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub metric: String,
    pub points_evaluated: usize,
    pub scalar_min: f64,
    pub scalar_max: f64,
    pub scalar_mean: f64,
    /// Points where |s - expected| exceeded the tolerance, when an expected
    /// value was supplied: (point, s).
    pub violations: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Copy)]
enum Slot {
    G0,
    Plus,
    Minus,
    Buf,
}

/// Scratch buffers for the pointwise kernel; one instance per sweep, no
/// allocation per point.
pub struct Kernel {
    n: usize,
    g0: Vec<f64>,
    ginv: Vec<f64>,
    inv_scratch: Vec<f64>,
    dg: Vec<f64>,    // [a][i,j]
    dginv: Vec<f64>, // [a][i,j]
    d2g: Vec<f64>,   // [a][b][i,j]
    gamma: Vec<f64>, // [c][a][b] = Gamma^c_ab
    dgamma: Vec<f64>, // [a][d][b][c] = d_a Gamma^d_bc
    plus: Vec<f64>,
    minus: Vec<f64>,
    buf: Vec<f64>,
    acc: Vec<f64>,
    point: Vec<f64>,
    shifted: Vec<f64>,
    multi: Vec<usize>,
}

impl Kernel {
    pub fn new(n: usize) -> Self {
        Kernel {
            n,
            g0: vec![0.0; n * n],
            ginv: vec![0.0; n * n],
            inv_scratch: vec![0.0; n * n],
            dg: vec![0.0; n * n * n],
            dginv: vec![0.0; n * n * n],
            d2g: vec![0.0; n * n * n * n],
            gamma: vec![0.0; n * n * n],
            dgamma: vec![0.0; n * n * n * n],
            plus: vec![0.0; n * n],
            minus: vec![0.0; n * n],
            buf: vec![0.0; n * n],
            acc: vec![0.0; n * n],
            point: vec![0.0; n],
            shifted: vec![0.0; n],
            multi: vec![0; n],
        }
    }

    #[inline]
    fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Inverse metric at the last loaded point.
    pub fn ginv(&self) -> &[f64] {
        &self.ginv
    }

    /// Load only the metric and its inverse (no derivatives).
    pub fn load_inverse_only(&mut self, g: &MetricField, flat: usize) -> Result<()> {
        self.fetch(g, flat, &[], Slot::G0);
        self.ginv.copy_from_slice(&self.g0);
        if !linalg::invert(&mut self.ginv, &mut self.inv_scratch, self.n, 1e-13) {
            return Err(Error::SingularMetric { index: flat, point: g.chart().point_vec(flat) });
        }
        Ok(())
    }

    /// Fetch the metric at the grid point `flat` shifted by `steps` (sparse
    /// list of (axis, step)). Sampled metrics read the neighboring grid
    /// point; closed forms are evaluated at the offset coordinates.
    fn fetch(&mut self, g: &MetricField, flat: usize, steps: &[(usize, isize)], slot: Slot) {
        let n = self.n;
        let chart = g.chart();
        match g.data() {
            MetricData::Sampled(samples) => {
                let mut idx = flat;
                for &(axis, step) in steps {
                    chart.multi_index(idx, &mut self.multi);
                    idx = chart
                        .neighbor(&self.multi, axis, step)
                        .expect("stencil leaves chart; caller must mask boundary points");
                }
                let src = &samples[idx * n * n..(idx + 1) * n * n];
                match slot {
                    Slot::G0 => self.g0.copy_from_slice(src),
                    Slot::Plus => self.plus.copy_from_slice(src),
                    Slot::Minus => self.minus.copy_from_slice(src),
                    Slot::Buf => self.buf.copy_from_slice(src),
                }
            }
            MetricData::ClosedForm(f) => {
                chart.point(flat, &mut self.point);
                self.shifted.copy_from_slice(&self.point);
                for &(axis, step) in steps {
                    self.shifted[axis] += step as f64 * chart.spacing(axis);
                }
                match slot {
                    Slot::G0 => f(&self.shifted, &mut self.g0),
                    Slot::Plus => f(&self.shifted, &mut self.plus),
                    Slot::Minus => f(&self.shifted, &mut self.minus),
                    Slot::Buf => f(&self.shifted, &mut self.buf),
                }
            }
        }
    }

    /// Load g, dg, d2g at the point and invert g. Fails on singular metric.
    fn load(&mut self, g: &MetricField, flat: usize) -> Result<()> {
        let n = self.n;
        self.fetch(g, flat, &[], Slot::G0);
        self.ginv.copy_from_slice(&self.g0);
        if !linalg::invert(&mut self.ginv, &mut self.inv_scratch, n, 1e-13) {
            return Err(Error::SingularMetric { index: flat, point: g.chart().point_vec(flat) });
        }

        // First derivatives and same-axis second derivatives.
        for a in 0..n {
            let h = g.chart().spacing(a);
            self.fetch(g, flat, &[(a, 1)], Slot::Plus);
            self.fetch(g, flat, &[(a, -1)], Slot::Minus);
            for e in 0..n * n {
                self.dg[a * n * n + e] = (self.plus[e] - self.minus[e]) / (2.0 * h);
                self.d2g[(a * n + a) * n * n + e] =
                    (self.plus[e] - 2.0 * self.g0[e] + self.minus[e]) / (h * h);
            }
        }
        // Mixed second derivatives.
        for a in 0..n {
            for b in a + 1..n {
                let ha = g.chart().spacing(a);
                let hb = g.chart().spacing(b);
                self.acc.fill(0.0);
                for (sa, sb, sign) in [(1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
                    self.fetch(g, flat, &[(a, sa), (b, sb)], Slot::Buf);
                    for e in 0..n * n {
                        self.acc[e] += sign * self.buf[e];
                    }
                }
                for e in 0..n * n {
                    let v = self.acc[e] / (4.0 * ha * hb);
                    self.d2g[(a * n + b) * n * n + e] = v;
                    self.d2g[(b * n + a) * n * n + e] = v;
                }
            }
        }
        // dginv[a] = -ginv dg[a] ginv.
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        let mut inner = 0.0;
                        for l in 0..n {
                            inner += self.dg[a * n * n + k * n + l] * self.ginv[l * n + j];
                        }
                        v += self.ginv[i * n + k] * inner;
                    }
                    self.dginv[a * n * n + i * n + j] = -v;
                }
            }
        }
        Ok(())
    }

    fn compute_gamma(&mut self) {
        let n = self.n;
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = 0.0;
                    for d in 0..n {
                        v += self.ginv[self.idx2(c, d)]
                            * (self.dg[a * n * n + b * n + d] + self.dg[b * n * n + a * n + d]
                                - self.dg[d * n * n + a * n + b]);
                    }
                    self.gamma[(c * n + a) * n + b] = 0.5 * v;
                }
            }
        }
    }

    fn compute_dgamma(&mut self) {
        let n = self.n;
        for a in 0..n {
            for d in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut v = 0.0;
                        for e in 0..n {
                            let sym_e = self.dg[b * n * n + c * n + e]
                                + self.dg[c * n * n + b * n + e]
                                - self.dg[e * n * n + b * n + c];
                            let dsym_e = self.d2g[(a * n + b) * n * n + c * n + e]
                                + self.d2g[(a * n + c) * n * n + b * n + e]
                                - self.d2g[(a * n + e) * n * n + b * n + c];
                            v += self.dginv[a * n * n + d * n + e] * sym_e
                                + self.ginv[d * n + e] * dsym_e;
                        }
                        self.dgamma[((a * n + d) * n + b) * n + c] = 0.5 * v;
                    }
                }
            }
        }
    }

    #[inline]
    fn riemann_component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        let mut v = self.dgamma[((a * n + d) * n + b) * n + c]
            - self.dgamma[((b * n + d) * n + a) * n + c];
        for e in 0..n {
            v += self.gamma[(e * n + b) * n + c] * self.gamma[(d * n + a) * n + e]
                - self.gamma[(e * n + a) * n + c] * self.gamma[(d * n + b) * n + e];
        }
        v
    }

    /// Scalar curvature at a loaded point.
    fn scalar(&mut self) -> f64 {
        let n = self.n;
        self.compute_gamma();
        self.compute_dgamma();
        let mut s = 0.0;
        for b in 0..n {
            for c in 0..n {
                let mut ric = 0.0;
                for a in 0..n {
                    ric += self.riemann_component(a, b, c, a);
                }
                s += self.ginv[b * n + c] * ric;
            }
        }
        s
    }
}

fn for_valid_points(
    chart: &GridChart,
    mut body: impl FnMut(usize, &[usize]) -> Result<()>,
) -> Result<()> {
    let mut multi = vec![0usize; chart.dim()];
    for flat in 0..chart.len() {
        chart.multi_index(flat, &mut multi);
        if chart.is_valid(&multi) {
            body(flat, &multi)?;
        }
    }
    Ok(())
}

/// Christoffel symbols Gamma^C_AB as a rank-3 tensor field, layout [C][A][B].
pub fn christoffel(g: &MetricField) -> Result<TensorField> {
    let n = g.dim();
    let mut kernel = Kernel::new(n);
    let mut out = TensorField::nan(g.chart().clone(), 3);
    for_valid_points(g.chart(), |flat, _| {
        kernel.load(g, flat)?;
        kernel.compute_gamma();
        out.values[flat * n * n * n..(flat + 1) * n * n * n].copy_from_slice(&kernel.gamma);
        Ok(())
    })?;
    Ok(out)
}

/// Full curvature stack. Memory is O(points * n^4); prefer
/// [`scalar_curvature`] for large sweeps that only need s.
pub fn riemann_ricci_scalar(g: &MetricField) -> Result<CurvatureData> {
    let n = g.dim();
    let mut kernel = Kernel::new(n);
    let chart = g.chart().clone();
    let mut christ = TensorField::nan(chart.clone(), 3);
    let mut riem = TensorField::nan(chart.clone(), 4);
    let mut ricci = TensorField::nan(chart.clone(), 2);
    let mut scalar = ScalarField::constant(chart.clone(), f64::NAN);
    for_valid_points(&chart, |flat, _| {
        kernel.load(g, flat)?;
        kernel.compute_gamma();
        kernel.compute_dgamma();
        christ.values[flat * n * n * n..(flat + 1) * n * n * n].copy_from_slice(&kernel.gamma);
        let rb = &mut riem.values[flat * n * n * n * n..(flat + 1) * n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        rb[((a * n + b) * n + c) * n + d] = kernel.riemann_component(a, b, c, d);
                    }
                }
            }
        }
        let mut s = 0.0;
        for b in 0..n {
            for c in 0..n {
                let mut ric = 0.0;
                for a in 0..n {
                    ric += rb[((a * n + b) * n + c) * n + a];
                }
                ricci.values[flat * n * n + b * n + c] = ric;
                s += kernel.ginv[b * n + c] * ric;
            }
        }
        scalar.values_mut()[flat] = s;
        Ok(())
    })?;
    Ok(CurvatureData { christoffel: christ, riemann: riem, ricci, scalar })
}

/// Scalar curvature only; streaming, O(points) memory.
pub fn scalar_curvature(g: &MetricField) -> Result<ScalarField> {
    let mut kernel = Kernel::new(g.dim());
    let mut out = ScalarField::constant(g.chart().clone(), f64::NAN);
    for_valid_points(g.chart(), |flat, _| {
        kernel.load(g, flat)?;
        out.values_mut()[flat] = kernel.scalar();
        Ok(())
    })?;
    Ok(out)
}

/// Positive-spectrum Laplacian of a sampled function:
/// `Delta f = -g^AB (d_A d_B f - Gamma^C_AB d_C f)`.
pub fn laplacian(g: &MetricField, f: &ScalarField) -> Result<ScalarField> {
    let n = g.dim();
    let chart = g.chart().clone();
    let mut kernel = Kernel::new(n);
    let mut out = ScalarField::constant(chart.clone(), f64::NAN);
    let fv = f.values();
    let mut df = vec![0.0; n];
    let mut d2f = vec![0.0; n * n];
    let mut tmp = vec![0usize; n];
    for_valid_points(&chart, |flat, multi| {
        kernel.load(g, flat)?;
        kernel.compute_gamma();
        let f0 = fv[flat];
        for a in 0..n {
            let h = chart.spacing(a);
            let ip = chart.neighbor(multi, a, 1).expect("interior");
            let im = chart.neighbor(multi, a, -1).expect("interior");
            df[a] = (fv[ip] - fv[im]) / (2.0 * h);
            d2f[a * n + a] = (fv[ip] - 2.0 * f0 + fv[im]) / (h * h);
        }
        for a in 0..n {
            for b in a + 1..n {
                let ha = chart.spacing(a);
                let hb = chart.spacing(b);
                let pp = step2(&chart, multi, a, 1, b, 1, &mut tmp);
                let pm = step2(&chart, multi, a, 1, b, -1, &mut tmp);
                let mp = step2(&chart, multi, a, -1, b, 1, &mut tmp);
                let mm = step2(&chart, multi, a, -1, b, -1, &mut tmp);
                let v = (fv[pp] - fv[pm] - fv[mp] + fv[mm]) / (4.0 * ha * hb);
                d2f[a * n + b] = v;
                d2f[b * n + a] = v;
            }
        }
        let mut lap = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut hess = d2f[a * n + b];
                for c in 0..n {
                    hess -= kernel.gamma[(c * n + a) * n + b] * df[c];
                }
                lap -= kernel.ginv[a * n + b] * hess;
            }
        }
        out.values_mut()[flat] = lap;
        Ok(())
    })?;
    Ok(out)
}

fn step2(
    chart: &GridChart,
    multi: &[usize],
    a: usize,
    sa: isize,
    b: usize,
    sb: isize,
    tmp: &mut [usize],
) -> usize {
    let first = chart.neighbor(multi, a, sa).expect("interior");
    chart.multi_index(first, tmp);
    chart.neighbor(tmp, b, sb).expect("interior")
}

/// Scalar-curvature report with optional deviation check against an expected
/// constant value.
pub fn scalar_report(g: &MetricField, expected: Option<f64>, tol: f64) -> Result<CurvatureReport> {
    let s = scalar_curvature(g)?;
    let stats = s.stats();
    let mut violations = Vec::new();
    if let Some(e) = expected {
        let chart = s.chart();
        let mut multi = vec![0usize; chart.dim()];
        for flat in 0..chart.len() {
            chart.multi_index(flat, &mut multi);
            let v = s.value(flat);
            if chart.is_valid(&multi) && !v.is_nan() && (v - e).abs() > tol {
                violations.push((chart.point_vec(flat), v));
                if violations.len() >= 32 {
                    break;
                }
            }
        }
    }
    Ok(CurvatureReport {
        metric: g.name().to_string(),
        points_evaluated: stats.count,
        scalar_min: stats.min,
        scalar_max: stats.max,
        scalar_mean: stats.mean,
        violations,
    })
}
