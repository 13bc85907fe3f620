//! Builders for model metrics: round spheres in iterated polar coordinates,
//! flat tori, Riemannian products, cylinders, warped products over an
//! interval, and the Euclidean annulus in polar form.

use std::sync::Arc;

use crate::chart::{Axis, GridChart};
use crate::error::{Error, Result};
use crate::metric::{MetricData, MetricField};

/// Round n-sphere of the given radius in iterated polar coordinates
/// `dt_1^2 + sin^2 t_1 (dt_2^2 + sin^2 t_2 (...))`, all scaled by radius^2.
/// Polar axes run over `[0, pi]` with the given exclusion band; the last
/// axis is the periodic angle on `[0, 2 pi)`.
///
/// `res` gives the per-axis sample counts (length n).
pub fn round_sphere(n: usize, radius: f64, res: &[usize], band: f64) -> Result<MetricField> {
    if n < 1 {
        return Err(Error::InvalidModel("sphere dimension must be >= 1".into()));
    }
    if res.len() != n {
        return Err(Error::InvalidModel(format!("need {} resolutions, got {}", n, res.len())));
    }
    if radius <= 0.0 {
        return Err(Error::InvalidModel("sphere radius must be positive".into()));
    }
    let mut axes = Vec::with_capacity(n);
    for (i, &r) in res.iter().enumerate() {
        if i + 1 == n {
            axes.push(Axis::periodic(0.0, std::f64::consts::TAU, r));
        } else {
            axes.push(Axis::closed_banded(0.0, std::f64::consts::PI, r, band));
        }
    }
    let chart = GridChart::new(axes)?;
    let r2 = radius * radius;
    Ok(MetricField::from_fn(chart, format!("s{n}(r={radius})"), move |p, out| {
        out.fill(0.0);
        let mut warp = r2;
        for i in 0..n {
            out[i * n + i] = warp;
            if i + 1 < n {
                let s = p[i].sin();
                warp *= s * s;
            }
        }
    }))
}

/// Flat torus with the given periods, one periodic axis per factor.
pub fn flat_torus(periods: &[f64], res: &[usize]) -> Result<MetricField> {
    if periods.is_empty() || periods.len() != res.len() {
        return Err(Error::InvalidModel("periods/resolutions mismatch".into()));
    }
    if periods.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidModel("torus periods must be positive".into()));
    }
    let axes: Vec<Axis> =
        periods.iter().zip(res).map(|(&p, &r)| Axis::periodic(0.0, p, r)).collect();
    let chart = GridChart::new(axes)?;
    let n = periods.len();
    Ok(MetricField::from_fn(chart, format!("t{n}"), move |_p, out| {
        out.fill(0.0);
        for i in 0..n {
            out[i * n + i] = 1.0;
        }
    }))
}

/// Riemannian product: block-diagonal metric on the concatenated chart.
pub fn product(a: &MetricField, b: &MetricField) -> Result<MetricField> {
    let mut axes = a.chart().axes().to_vec();
    axes.extend_from_slice(b.chart().axes());
    let chart = GridChart::new(axes)?;
    let na = a.dim();
    let nb = b.dim();
    let n = na + nb;
    let name = format!("{} x {}", a.name(), b.name());

    // Keep closed forms closed, otherwise materialize samples.
    if a.is_closed_form() && b.is_closed_form() {
        let (fa, fb) = (clone_closure(a), clone_closure(b));
        return Ok(MetricField::from_fn(chart, name, move |p, out| {
            out.fill(0.0);
            let mut ga = vec![0.0; na * na];
            let mut gb = vec![0.0; nb * nb];
            fa(&p[..na], &mut ga);
            fb(&p[na..], &mut gb);
            for i in 0..na {
                for j in 0..na {
                    out[i * n + j] = ga[i * na + j];
                }
            }
            for i in 0..nb {
                for j in 0..nb {
                    out[(na + i) * n + (na + j)] = gb[i * nb + j];
                }
            }
        }));
    }

    let mut samples = vec![0.0; chart.len() * n * n];
    let mut ga = vec![0.0; na * na];
    let mut gb = vec![0.0; nb * nb];
    let a_s = a.sampled();
    let b_s = b.sampled();
    let lb = b.chart().len();
    for flat in 0..chart.len() {
        let (ia, ib) = (flat / lb, flat % lb);
        a_s.at_index(ia, &mut ga);
        b_s.at_index(ib, &mut gb);
        let block = &mut samples[flat * n * n..(flat + 1) * n * n];
        for i in 0..na {
            for j in 0..na {
                block[i * n + j] = ga[i * na + j];
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                block[(na + i) * n + (na + j)] = gb[i * nb + j];
            }
        }
    }
    MetricField::from_samples(chart, name, samples)
}

fn clone_closure(m: &MetricField) -> crate::metric::MetricFn {
    match m.data() {
        MetricData::ClosedForm(f) => Arc::clone(f),
        MetricData::Sampled(_) => unreachable!("caller checked closed form"),
    }
}

/// Cylinder `dt^2 + g_cross` on `[0, length]`.
pub fn cylinder(cross_section: &MetricField, length: f64, res_t: usize) -> Result<MetricField> {
    if length <= 0.0 {
        return Err(Error::InvalidModel("cylinder length must be positive".into()));
    }
    let interval = MetricField::from_fn(
        GridChart::new(vec![Axis::closed(0.0, length, res_t)])?,
        "interval",
        |_p, out| out[0] = 1.0,
    );
    let mut m = product(&interval, cross_section)?;
    m.set_name(format!("cyl({}, L={})", cross_section.name(), length));
    Ok(m)
}

/// A warp factor with optional exact derivatives; missing derivatives fall
/// back to small-step central differences.
#[derive(Clone)]
pub struct Warp {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub d2f: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl Warp {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Warp { f: Arc::new(f), df: None, d2f: None }
    }

    pub fn with_derivatives(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Warp { f: Arc::new(f), df: Some(Arc::new(df)), d2f: Some(Arc::new(d2f)) }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.df {
            Some(d) => d(t),
            None => {
                let h = 1e-5;
                ((self.f)(t + h) - (self.f)(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        match &self.d2f {
            Some(d) => d(t),
            None => {
                let h = 1e-4;
                ((self.f)(t + h) - 2.0 * (self.f)(t) + (self.f)(t - h)) / (h * h)
            }
        }
    }
}

/// One homogeneous fiber of a warped product.
#[derive(Clone)]
pub struct WarpedFiber {
    /// Fiber metric on its own chart (constant scalar curvature).
    pub metric: MetricField,
    pub warp: Warp,
}

/// Warped product `dt^2 + sum_j f_j(t)^2 g_j` over `[t_min, t_max]`.
pub fn warped_product(
    t_min: f64,
    t_max: f64,
    res_t: usize,
    band: f64,
    fibers: &[WarpedFiber],
) -> Result<MetricField> {
    if fibers.is_empty() {
        return Err(Error::InvalidModel("warped product needs at least one fiber".into()));
    }
    let mut axes = vec![Axis::closed_banded(t_min, t_max, res_t, band)];
    for fb in fibers {
        axes.extend_from_slice(fb.metric.chart().axes());
    }
    let chart = GridChart::new(axes)?;
    let n = chart.dim();

    // Reject non-positive warps on the sampled interval interior.
    let ht = chart.spacing(0);
    for k in 0..res_t {
        let t = t_min + ht * k as f64;
        let inside = t > t_min + band && t < t_max - band;
        for fb in fibers {
            let v = fb.warp.value(t);
            if inside && !(v > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "warp function non-positive at t = {t}: {v}"
                )));
            }
        }
    }

    let mut samples = vec![0.0; chart.len() * n * n];
    let fiber_data: Vec<(MetricField, usize)> =
        fibers.iter().map(|fb| (fb.metric.sampled(), fb.metric.dim())).collect();
    let mut multi = vec![0usize; n];
    let mut fbuf = vec![0.0; n * n];
    for flat in 0..chart.len() {
        chart.multi_index(flat, &mut multi);
        let t = t_min + ht * multi[0] as f64;
        let block = &mut samples[flat * n * n..(flat + 1) * n * n];
        block.fill(0.0);
        block[0] = 1.0;
        let mut offset = 1usize;
        for (fi, (fm, fdim)) in fiber_data.iter().enumerate() {
            let w = fibers[fi].warp.value(t);
            let w2 = w * w;
            let fiber_flat = fm.chart().flat_index(&multi[offset..offset + fdim]);
            fm.at_index(fiber_flat, &mut fbuf[..fdim * fdim]);
            for i in 0..*fdim {
                for j in 0..*fdim {
                    block[(offset + i) * n + (offset + j)] = w2 * fbuf[i * fdim + j];
                }
            }
            offset += fdim;
        }
    }
    MetricField::from_samples(chart, "warped", samples)
}

/// Euclidean metric on the annulus `r in [r_min, r_max]` of `R^n` in polar
/// coordinates: `dr^2 + r^2 g_{S^{n-1}}`. Angular axes follow the sphere
/// builder (`n-1` polar coordinates with the last periodic).
pub fn euclidean_annulus(
    n: usize,
    r_min: f64,
    r_max: f64,
    res_r: usize,
    res_angular: &[usize],
    band: f64,
) -> Result<MetricField> {
    if n < 2 {
        return Err(Error::InvalidModel("annulus needs ambient dimension >= 2".into()));
    }
    if !(0.0 < r_min && r_min < r_max) {
        return Err(Error::InvalidModel("need 0 < r_min < r_max".into()));
    }
    if res_angular.len() != n - 1 {
        return Err(Error::InvalidModel(format!(
            "need {} angular resolutions, got {}",
            n - 1,
            res_angular.len()
        )));
    }
    let mut axes = vec![Axis::closed(r_min, r_max, res_r)];
    for (i, &r) in res_angular.iter().enumerate() {
        if i + 2 == n {
            axes.push(Axis::periodic(0.0, std::f64::consts::TAU, r));
        } else {
            axes.push(Axis::closed_banded(0.0, std::f64::consts::PI, r, band));
        }
    }
    let chart = GridChart::new(axes)?;
    Ok(MetricField::from_fn(chart, format!("annulus(R^{n})"), move |p, out| {
        out.fill(0.0);
        out[0] = 1.0;
        let mut warp = p[0] * p[0];
        for i in 1..n {
            out[i * n + i] = warp;
            if i + 1 < n {
                let s = p[i].sin();
                warp *= s * s;
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_chart_shape() {
        let g = round_sphere(3, 1.0, &[16, 12, 8], 0.3).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.validate().is_ok());
        let mut buf = [0.0; 9];
        // At t1 = pi/2, t2 = pi/2 the metric is the identity.
        let chart = g.chart();
        let mid = [
            (0.5 * (chart.axis(0).res - 1) as f64).round() as usize,
            (0.5 * (chart.axis(1).res - 1) as f64).round() as usize,
            0,
        ];
        // Resolutions are chosen odd-middle-friendly only approximately; just
        // check positive diagonal dominance instead of exact identity.
        g.at_index(chart.flat_index(&mid), &mut buf);
        assert!(buf[0] > 0.0 && buf[4] > 0.0 && buf[8] > 0.0);
    }

    #[test]
    fn warped_product_rejects_nonpositive_warp() {
        let fiber = round_sphere(2, 1.0, &[8, 8], 0.5).unwrap();
        let err = warped_product(
            0.0,
            1.0,
            8,
            0.1,
            &[WarpedFiber { metric: fiber, warp: Warp::new(|t| 0.4 - t) }],
        );
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }
}
