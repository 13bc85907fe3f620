//! Boundary-homotopy metrics on W x S^{q-1} and their collar extension.
//!
//! The product reference metric at sphere radius r is
//! `h_bar_r = g_W + r^2 g_{S^{q-1}}`, with scalar curvature
//! `s(g_W) + (q-1)(q-2)/r^2`. The induced boundary metric differs from it by
//! a perturbation whose blocks scale as: W-block O(r), mixed block O(r^2),
//! sphere block 0. For the convex combinations `h^nu = h_bar + nu P(r)` the
//! scalar curvature stays bounded below by a positive multiple of 1/r^2 for
//! small r; `certify_homotopy` sweeps nu and r and measures that constant.
//!
//! The collar metric on W x S^{q-1} x [0, d] interpolates `h^1` to `h_bar`
//! along t with a smooth decreasing profile and adds `mu^2 dt^2`.

use serde::Serialize;
use std::sync::Arc;

use crate::chart::{Axis, GridChart};
use crate::curvature::scalar_curvature;
use crate::error::{Error, Result};
use crate::metric::{MetricData, MetricField};
use crate::neck::profiles::FlatStep;

/// The perturbation family `P(r) = h_r - h_bar_r`, supplied by the caller as
/// radius-dependent blocks (arguments: cross-section point, radius). The
/// expected block orders -- W-block O(r), mixed block O(r^2), sphere block
/// zero -- are not assumed; `certify_homotopy` fits the scaling exponents
/// over the radius sweep and flags violations.
#[derive(Clone)]
pub struct PerturbationSpec {
    /// Full W-block perturbation at radius r; symmetric, dim(W)^2 entries.
    pub w_block: Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>,
    /// Full mixed-block perturbation at radius r; dim(W) x (q-1) entries in
    /// the coordinate frame.
    pub mixed_block: Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>,
}

impl PerturbationSpec {
    /// Family with the canonical orders: `r * A(z)` on the W-block and
    /// `r^2 * B(z)` on the mixed block.
    pub fn scaled(
        a_shape: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        b_shape: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        PerturbationSpec {
            w_block: Arc::new(move |p, r, out| {
                a_shape(p, out);
                for v in out.iter_mut() {
                    *v *= r;
                }
            }),
            mixed_block: Arc::new(move |p, r, out| {
                b_shape(p, out);
                for v in out.iter_mut() {
                    *v *= r * r;
                }
            }),
        }
    }
}

#[derive(Clone)]
pub struct HomotopySpec {
    /// Metric on W (closed form).
    pub g_w: MetricField,
    /// Codimension q >= 3; the sphere factor is S^{q-1}.
    pub q: usize,
    /// Sphere radius of the cross-section (plays r3 in collar sweeps).
    pub r: f64,
    pub nu_grid: Vec<f64>,
    /// Collar length.
    pub d: f64,
    /// Collar shrink factor in (0, 1].
    pub mu: f64,
    pub perturbation: Option<PerturbationSpec>,
    /// Angular resolutions of the sphere factor (q-1 entries).
    pub sphere_res: Vec<usize>,
    pub sphere_band: f64,
    /// Resolution of the collar axis.
    pub collar_res: usize,
}

impl HomotopySpec {
    fn validate(&self) -> Result<()> {
        if self.q < 3 {
            return Err(Error::InvalidParameter("homotopy needs q >= 3".into()));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter("sphere radius must be positive".into()));
        }
        if self.nu_grid.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter("nu values must lie in [0, 1]".into()));
        }
        if !(self.d > 0.0) || !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::InvalidParameter("need d > 0 and mu in (0, 1]".into()));
        }
        if self.sphere_res.len() != self.q - 1 {
            return Err(Error::InvalidParameter(format!(
                "need {} sphere resolutions, got {}",
                self.q - 1,
                self.sphere_res.len()
            )));
        }
        if !self.g_w.is_closed_form() {
            return Err(Error::InvalidParameter("g_W must be closed form".into()));
        }
        Ok(())
    }

    fn cross_section_chart(&self) -> Result<GridChart> {
        let mut axes = self.g_w.chart().axes().to_vec();
        for (i, &res) in self.sphere_res.iter().enumerate() {
            if i + 2 == self.q {
                axes.push(Axis::periodic(0.0, std::f64::consts::TAU, res));
            } else {
                axes.push(Axis::closed_banded(0.0, std::f64::consts::PI, res, self.sphere_band));
            }
        }
        GridChart::new(axes)
    }
}

fn w_fn(g_w: &MetricField) -> Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync> {
    match g_w.data() {
        MetricData::ClosedForm(f) => Arc::clone(f),
        MetricData::Sampled(_) => unreachable!("validated closed form"),
    }
}

/// Cross-section metric `h^nu = h_bar_r + nu P(r)` at radius `radius`.
pub fn homotopy_cross_section(spec: &HomotopySpec, nu: f64, radius: f64) -> Result<MetricField> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu = {nu} outside [0, 1]")));
    }
    let chart = spec.cross_section_chart()?;
    let m = spec.g_w.dim();
    let q = spec.q;
    let gw = w_fn(&spec.g_w);
    let pert = spec.perturbation.clone();
    let field = MetricField::from_fn(chart, format!("h^{nu}(r={radius})"), move |p, out| {
        cross_section_at(&gw, &pert, m, q, radius, nu, p, out);
    });
    field.validate().map_err(|e| match e {
        Error::NotPositiveDefinite { point, .. } => Error::InvalidPerturbation { point },
        other => other,
    })?;
    Ok(field)
}

#[allow(clippy::too_many_arguments)]
fn cross_section_at(
    gw: &Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>,
    pert: &Option<PerturbationSpec>,
    m: usize,
    q: usize,
    radius: f64,
    nu: f64,
    p: &[f64],
    out: &mut [f64],
) {
    let n = m + (q - 1);
    out.fill(0.0);
    let (x, angles) = p.split_at(m);
    let mut gw_buf = vec![0.0; m * m];
    gw(x, &mut gw_buf);
    for i in 0..m {
        for j in 0..m {
            out[i * n + j] = gw_buf[i * m + j];
        }
    }
    // Round S^{q-1}(radius) block in iterated polar coordinates.
    let r2 = radius * radius;
    let mut warp = r2;
    for a in 0..q - 1 {
        out[(m + a) * n + (m + a)] = warp;
        if a + 2 < q {
            let s = angles[a].sin();
            warp *= s * s;
        }
    }
    if let Some(pert) = pert {
        if nu != 0.0 {
            let mut a_buf = vec![0.0; m * m];
            (pert.w_block)(p, radius, &mut a_buf);
            for i in 0..m {
                for j in 0..m {
                    out[i * n + j] += nu * a_buf[i * m + j];
                }
            }
            let mut b_buf = vec![0.0; m * (q - 1)];
            (pert.mixed_block)(p, radius, &mut b_buf);
            for i in 0..m {
                for a in 0..q - 1 {
                    let v = nu * b_buf[i * (q - 1) + a];
                    out[i * n + (m + a)] += v;
                    out[(m + a) * n + i] += v;
                }
            }
        }
    }
}

/// Homotopy metric entry point: without the collar, the convex combination
/// `h^nu = nu h_r + (1 - nu) h_bar_r` on W x S^{q-1} at the spec radius;
/// with the collar, the interpolated family plus `mu^2 dt^2`.
pub fn homotopy_metric(spec: &HomotopySpec, nu: f64, include_collar: bool) -> Result<MetricField> {
    if include_collar {
        homotopy_collar_metric(spec)
    } else {
        homotopy_cross_section(spec, nu, spec.r)
    }
}

/// Collar metric `H(z, t/d) + mu^2 dt^2` on W x S^{q-1} x [0, d], where
/// `H(z, tau)` interpolates from `h^1(mu r)` at tau = 0 down to
/// `h_bar(mu r)` at tau = 1 with a smooth decreasing profile.
pub fn homotopy_collar_metric(spec: &HomotopySpec) -> Result<MetricField> {
    spec.validate()?;
    let cross = spec.cross_section_chart()?;
    let mut axes = cross.axes().to_vec();
    axes.push(Axis::closed(0.0, spec.d, spec.collar_res));
    let chart = GridChart::new(axes)?;
    let m = spec.g_w.dim();
    let q = spec.q;
    let n_cross = m + (q - 1);
    let n = n_cross + 1;
    let gw = w_fn(&spec.g_w);
    let pert = spec.perturbation.clone();
    let (mu, d, radius) = (spec.mu, spec.d, spec.r);
    let phi = FlatStep::with_peak_slope(1.6)?;
    let field = MetricField::from_fn(chart, format!("collar(mu={mu})"), move |p, out| {
        out.fill(0.0);
        let tau = (p[n_cross] / d).clamp(0.0, 1.0);
        // Decreasing profile: 1 near tau = 0, 0 near tau = 1.
        let nu_t = 1.0 - phi.value(tau);
        let mut cross_buf = vec![0.0; n_cross * n_cross];
        cross_section_at(&gw, &pert, m, q, mu * radius, nu_t, &p[..n_cross], &mut cross_buf);
        for i in 0..n_cross {
            for j in 0..n_cross {
                out[i * n + j] = cross_buf[i * n_cross + j];
            }
        }
        out[n_cross * n + n_cross] = mu * mu;
    });
    field.validate().map_err(|e| match e {
        Error::NotPositiveDefinite { point, .. } => Error::InvalidPerturbation { point },
        other => other,
    })?;
    Ok(field)
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopySweepEntry {
    pub r: f64,
    pub nu: f64,
    pub min_scalar: f64,
    /// min_scalar * r^2, the quantity expected to be stable and positive.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollarSweepEntry {
    pub mu: f64,
    pub min_scalar: f64,
    /// min_scalar * (mu r)^2.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockOrderFit {
    pub w_block_exponent: f64,
    pub mixed_block_exponent: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyReport {
    pub entries: Vec<HomotopySweepEntry>,
    /// min over nu of normalized min scalar, per radius.
    pub per_radius_min: Vec<(f64, f64)>,
    pub fitted_constant: f64,
    /// max/min spread of per-radius minima.
    pub stability_factor: f64,
    pub collar: Vec<CollarSweepEntry>,
    pub block_orders: Option<BlockOrderFit>,
    pub worst: Option<(f64, f64)>,
    pub pass: bool,
}

/// Sweep nu over the spec grid and r over `r_list` (decreasing), measuring
/// `min s * r^2`; then sweep the collar over mu in {1, 1/2, 1/4} measuring
/// `min s * (mu r)^2`. Reports the fitted lower constant, its stability, and
/// scaling exponents of the perturbation blocks.
pub fn certify_homotopy(spec: &HomotopySpec, r_list: &[f64]) -> Result<HomotopyReport> {
    spec.validate()?;
    if r_list.is_empty() || r_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("r_list must be strictly decreasing".into()));
    }
    let mut entries = Vec::new();
    let mut per_radius_min = Vec::new();
    for &r in r_list {
        let mut radius_min = f64::INFINITY;
        for &nu in &spec.nu_grid {
            let h = homotopy_cross_section(spec, nu, r)?;
            let s = scalar_curvature(&h)?;
            let stats = s.stats();
            let normalized = stats.min * r * r;
            radius_min = radius_min.min(normalized);
            entries.push(HomotopySweepEntry { r, nu, min_scalar: stats.min, normalized });
        }
        per_radius_min.push((r, radius_min));
    }
    let fitted = per_radius_min.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let hi = per_radius_min.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let stability = if fitted > 0.0 { hi / fitted } else { f64::INFINITY };

    let mut collar = Vec::new();
    for mu in [1.0, 0.5, 0.25] {
        let collar_spec = HomotopySpec { mu, ..spec.clone() };
        let h = homotopy_collar_metric(&collar_spec)?;
        let s = scalar_curvature(&h)?;
        let stats = s.stats();
        collar.push(CollarSweepEntry {
            mu,
            min_scalar: stats.min,
            normalized: stats.min * (mu * spec.r) * (mu * spec.r),
        });
    }

    let block_orders = spec.perturbation.as_ref().map(|_| fit_block_orders(spec, r_list));

    let worst = entries
        .iter()
        .min_by(|a, b| a.normalized.total_cmp(&b.normalized))
        .map(|e| (e.nu, e.r));
    let pass = fitted > 0.0
        && stability <= 2.0
        && collar.iter().all(|c| c.normalized > 0.0)
        && block_orders.as_ref().map(|b| b.pass).unwrap_or(true);
    Ok(HomotopyReport {
        entries,
        per_radius_min,
        fitted_constant: fitted,
        stability_factor: stability,
        collar,
        block_orders,
        worst,
        pass,
    })
}

/// Fit sup-norm scaling exponents of the perturbation blocks over the radius
/// sweep: `sup |h^1 - h_bar|` should scale like r on the W-block and r^2 on
/// the mixed block.
fn fit_block_orders(spec: &HomotopySpec, r_list: &[f64]) -> BlockOrderFit {
    let m = spec.g_w.dim();
    let q = spec.q;
    let chart = spec.cross_section_chart().expect("validated");
    let mut p = vec![0.0; chart.dim()];
    let pert = spec.perturbation.as_ref().expect("caller checked");
    let mut sup_w = Vec::new();
    let mut sup_mixed = Vec::new();
    for &r in r_list {
        let mut w_max = 0.0f64;
        let mut mix_max = 0.0f64;
        let mut a_buf = vec![0.0; m * m];
        let mut b_buf = vec![0.0; m * (q - 1)];
        for flat in 0..chart.len() {
            chart.point(flat, &mut p);
            (pert.w_block)(&p, r, &mut a_buf);
            (pert.mixed_block)(&p, r, &mut b_buf);
            for v in &a_buf {
                w_max = w_max.max(v.abs());
            }
            for v in &b_buf {
                mix_max = mix_max.max(v.abs());
            }
        }
        sup_w.push(w_max.max(1e-300));
        sup_mixed.push(mix_max.max(1e-300));
    }
    let slope = |ys: &[f64]| -> f64 {
        // Least-squares slope of ln sup vs ln r.
        let xs: Vec<f64> = r_list.iter().map(|r| r.ln()).collect();
        let lys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = lys.iter().sum::<f64>() / lys.len() as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..xs.len() {
            num += (xs[i] - mx) * (lys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        num / den
    };
    let we = slope(&sup_w);
    let me = slope(&sup_mixed);
    BlockOrderFit {
        w_block_exponent: we,
        mixed_block_exponent: me,
        pass: (we - 1.0).abs() <= 0.15 && (me - 2.0).abs() <= 0.15,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> MetricField {
        let chart =
            GridChart::new(vec![Axis::periodic(0.0, std::f64::consts::TAU, 12)]).unwrap();
        MetricField::from_fn(chart, "s1", |_p, out| out[0] = 1.0)
    }

    fn base_spec(pert: Option<PerturbationSpec>) -> HomotopySpec {
        HomotopySpec {
            g_w: circle(),
            q: 3,
            r: 0.1,
            nu_grid: vec![0.0, 0.5, 1.0],
            d: 1.0,
            mu: 1.0,
            perturbation: pert,
            sphere_res: vec![40, 8],
            sphere_band: 0.5,
            collar_res: 16,
        }
    }

    #[test]
    fn product_cross_section_has_product_curvature() {
        // nu = 0: s = s(gW) + (q-1)(q-2)/r^2 = 0 + 2/r^2.
        let spec = base_spec(None);
        let h = homotopy_cross_section(&spec, 0.0, 0.1).unwrap();
        let s = scalar_curvature(&h).unwrap();
        let want = 2.0 / 0.01;
        assert!(s.sup_deviation(want) / want < 5e-2, "sup dev {}", s.sup_deviation(want));
    }

    #[test]
    fn nu_one_with_zero_perturbation_matches_nu_zero() {
        let spec = base_spec(None);
        let a = homotopy_cross_section(&spec, 0.0, 0.1).unwrap().sampled();
        let b = homotopy_cross_section(&spec, 1.0, 0.1).unwrap().sampled();
        let mut x = vec![0.0; 9];
        let mut y = vec![0.0; 9];
        for flat in 0..a.chart().len() {
            a.at_index(flat, &mut x);
            b.at_index(flat, &mut y);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn destructive_perturbation_is_rejected() {
        let pert = PerturbationSpec {
            w_block: Arc::new(|_p: &[f64], _r: f64, out: &mut [f64]| out[0] = -3.0),
            mixed_block: Arc::new(|_p: &[f64], _r: f64, out: &mut [f64]| out.fill(0.0)),
        };
        let spec = base_spec(Some(pert));
        assert!(matches!(
            homotopy_cross_section(&spec, 1.0, 0.1),
            Err(Error::InvalidPerturbation { .. })
        ));
    }
}
