//! Assembly of the surgered metric: outer region, bent tube, and boundary
//! homotopy collar, with per-region volumes, scalar-curvature reports, and
//! interface consistency checks.
//!
//! Conventions for the desk model: the ambient metric near W is the product
//! tube `g_W + dr^2 + r^2 g_{S^{q-1}}` (polar normal coordinates, chart axes
//! ordered radius, W, sphere). The shrink factor applied to the bend tail is
//! `mu = delta * epsilon`, and the three nested regions are read off the
//! original tube radius:
//!
//!   S = { r <= delta epsilon r1' } (plus the collar),
//!   T = { r <= epsilon r1 }        (plus the collar),
//!   N = { r <= r0 }                (bend plus collar).

use serde::Serialize;

use crate::chart::{Axis, GridChart};
use crate::error::{Error, Result};
use crate::invariants::sphere_volume;
use crate::linalg::CompensatedSum;
use crate::metric::MetricField;
use crate::neck::bend::{certify_bend, shrink_curve, BendCurve};
use crate::neck::homotopy::{homotopy_collar_metric, HomotopySpec};
use crate::quotient;

/// Product tube annulus `dr^2 + g_W + r^2 g_{S^{q-1}}` on `[r_in, r_out]`,
/// chart axes (r, W axes, sphere axes). This is the desk-model stand-in for
/// the ambient manifold minus the open tube.
pub fn outer_tube_region(
    g_w: &MetricField,
    q: usize,
    r_in: f64,
    r_out: f64,
    res_r: usize,
    sphere_res: &[usize],
    sphere_band: f64,
) -> Result<MetricField> {
    if q < 3 {
        return Err(Error::InvalidParameter("outer region needs q >= 3".into()));
    }
    if !(0.0 < r_in && r_in < r_out) {
        return Err(Error::InvalidParameter("need 0 < r_in < r_out".into()));
    }
    if sphere_res.len() != q - 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} sphere resolutions, got {}",
            q - 1,
            sphere_res.len()
        )));
    }
    if !g_w.is_closed_form() {
        return Err(Error::InvalidParameter("g_W must be closed form".into()));
    }
    let mut axes = vec![Axis::closed(r_in, r_out, res_r)];
    axes.extend_from_slice(g_w.chart().axes());
    for (i, &res) in sphere_res.iter().enumerate() {
        if i + 2 == q {
            axes.push(Axis::periodic(0.0, std::f64::consts::TAU, res));
        } else {
            axes.push(Axis::closed_banded(0.0, std::f64::consts::PI, res, sphere_band));
        }
    }
    let chart = GridChart::new(axes)?;
    let m = g_w.dim();
    let gw_fn = match g_w.data() {
        crate::metric::MetricData::ClosedForm(f) => std::sync::Arc::clone(f),
        _ => unreachable!(),
    };
    let n = 1 + m + (q - 1);
    Ok(MetricField::from_fn(chart, "outer tube", move |p, out| {
        out.fill(0.0);
        out[0] = 1.0;
        let r = p[0];
        let mut gw = vec![0.0; m * m];
        gw_fn(&p[1..1 + m], &mut gw);
        for i in 0..m {
            for j in 0..m {
                out[(1 + i) * n + (1 + j)] = gw[i * m + j];
            }
        }
        let mut warp = r * r;
        for a in 0..q - 1 {
            out[(1 + m + a) * n + (1 + m + a)] = warp;
            if a + 2 < q {
                let s = p[1 + m + a].sin();
                warp *= s * s;
            }
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    Outer,
    Bend,
    Homotopy,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub kind: RegionKind,
    pub volume: f64,
    pub scalar_min: f64,
    pub scalar_max: f64,
    /// Certified lower bound (from the bend certificate or positivity of the
    /// collar); the outer region carries the caller's ambient bound.
    pub certified_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterfaceCheck {
    pub interface: String,
    pub relative_mismatch: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeckAssembly {
    pub delta: f64,
    pub epsilon: f64,
    /// Shrink factor mu = delta * epsilon applied to the bend tail.
    pub mu: f64,
    pub q: usize,
    pub parameters: AssemblyParameters,
    pub regions: Vec<RegionReport>,
    /// Volumes of the nested regions S, T, N (each includes the collar).
    pub s_volume: f64,
    pub t_volume: f64,
    pub n_volume: f64,
    pub interfaces: Vec<InterfaceCheck>,
    pub certified_min_scalar: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssemblyParameters {
    pub r0: f64,
    pub r1: f64,
    pub r1p: f64,
    pub r2: f64,
    pub r3: f64,
    pub theta0: f64,
    pub eps2: f64,
    pub s_g_lower: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    /// Evaluate scalar extrema with the curvature engine where affordable.
    pub compute_scalar: bool,
    pub interface_tolerance: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { compute_scalar: true, interface_tolerance: 1e-6 }
    }
}

/// Assemble the surgered metric from a certified bend curve, the ambient
/// outer region, and the boundary homotopy, at neck parameters
/// (delta, epsilon).
pub fn assemble_surgered_metric(
    outer: &MetricField,
    curve: &BendCurve,
    spec: &HomotopySpec,
    delta: f64,
    epsilon: f64,
    s_g_lower: f64,
    options: AssemblyOptions,
) -> Result<NeckAssembly> {
    if !(delta > 0.0 && delta <= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter("delta and epsilon must lie in (0, 1]".into()));
    }
    let q = curve.q;
    let m = spec.g_w.dim();
    // Certification is a precondition for assembly.
    certify_bend(curve, s_g_lower)?;

    let mu = delta * epsilon;
    let shrunk = shrink_curve(curve, mu)?;

    let mut interfaces = Vec::new();

    // Interface: homotopy spec radius vs bend terminal radius.
    let r3_mismatch = (spec.r - curve.r3).abs() / curve.r3.abs().max(1e-300);
    interfaces.push(InterfaceCheck {
        interface: "bend terminal radius vs homotopy cross-section radius".into(),
        relative_mismatch: r3_mismatch,
        tolerance: options.interface_tolerance,
    });
    if r3_mismatch > options.interface_tolerance {
        return Err(Error::AssemblyMismatch {
            interface: "bend/homotopy radius".into(),
            error: r3_mismatch,
            tolerance: options.interface_tolerance,
        });
    }

    // Interface: outer inner boundary vs bend start cross-section. The outer
    // chart is (r, W, sphere); its inner radius must sit at the bend's r0 and
    // carry the product tube metric there.
    let outer_chart = outer.chart();
    if outer_chart.dim() != 1 + m + (q - 1) {
        return Err(Error::InvalidParameter(
            "outer chart dimension does not match (r, W, sphere) convention".into(),
        ));
    }
    let r_in = outer_chart.axis(0).min;
    let radius_mismatch = (r_in - curve.r0).abs() / curve.r0;
    let mut boundary_mismatch = radius_mismatch;
    {
        let n = outer.dim();
        let mut got = vec![0.0; n * n];
        let mut want = vec![0.0; n * n];
        let mut multi = vec![0usize; n];
        let mut p = vec![0.0; n];
        let mut count = 0usize;
        for flat in 0..outer_chart.len() {
            outer_chart.multi_index(flat, &mut multi);
            if multi[0] != 0 || outer_chart.in_band(&multi) {
                continue;
            }
            count += 1;
            if count % 7 != 1 {
                continue; // subsample the boundary shell
            }
            outer_chart.point(flat, &mut p);
            outer.at_index(flat, &mut got);
            product_tube_metric(&spec.g_w, q, &p, &mut want);
            let scale = want.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
            for e in 0..n * n {
                boundary_mismatch = boundary_mismatch.max((got[e] - want[e]).abs() / scale);
            }
        }
    }
    interfaces.push(InterfaceCheck {
        interface: "outer inner boundary vs bend start cross-section".into(),
        relative_mismatch: boundary_mismatch,
        tolerance: options.interface_tolerance,
    });
    if boundary_mismatch > options.interface_tolerance {
        return Err(Error::AssemblyMismatch {
            interface: "outer/bend".into(),
            error: boundary_mismatch,
            tolerance: options.interface_tolerance,
        });
    }

    // Volumes. Cross-section factor: vol(W) x vol(S^{q-1}(1)), fiber radius
    // follows the curve.
    let vol_w = quotient::volume(&spec.g_w)?;
    let omega = sphere_volume(q - 1);
    let fiber = vol_w * omega;

    // Bend volume integrals r^{q-1} dL per step: steps 1 and 3 by trapezoid
    // over the stored samples, step 2 (straight, log-sampled) analytically.
    let step1 = &shrunk.samples[shrunk.step_ranges[0].clone()];
    let step3 = &shrunk.samples[shrunk.step_ranges[2].clone()];
    let qm1 = (q - 1) as i32;
    let trapezoid = |samples: &[crate::neck::bend::CurveSample], r_cap: f64| -> f64 {
        let mut acc = CompensatedSum::new();
        for w in samples.windows(2) {
            if w[0].r > r_cap && w[1].r > r_cap {
                continue;
            }
            let dl = w[1].l - w[0].l;
            acc.add(0.5 * (w[0].r.powi(qm1) + w[1].r.powi(qm1)) * dl);
        }
        acc.value()
    };
    // Straight-step integral between radii [lo, hi]: dL = dr / cos(theta0).
    let straight = |lo: f64, hi: f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        (hi.powi(qm1 + 1) - lo.powi(qm1 + 1)) / ((qm1 + 1) as f64 * shrunk.theta0.cos())
    };
    let mu_r2 = shrunk.r2;
    let bend_integral = |r_cap: f64| -> f64 {
        trapezoid(step1, r_cap)
            + straight(mu_r2, r_cap.min(curve.r1))
            + trapezoid(step3, r_cap)
    };

    // Collar volume: cross-section volume at each t-slice times mu dt.
    let collar_metric = homotopy_collar_metric(&HomotopySpec { mu, ..spec.clone() })?;
    let collar_volume = quotient::volume(&collar_metric)?;

    let s_volume = fiber * bend_integral(mu * curve.r1p) + collar_volume;
    let t_volume = fiber * bend_integral(epsilon * curve.r1) + collar_volume;
    let n_volume = fiber * bend_integral(curve.r0) + collar_volume;
    let outer_volume = quotient::volume(outer)?;

    // Scalar reports.
    let defects = shrunk.defects();
    let s_w_stats = crate::curvature::scalar_curvature(&spec.g_w)
        .map(|f| f.stats())
        .ok();
    let (s_w_min, s_w_max) = match (m, &s_w_stats) {
        (0, _) => (0.0, 0.0),
        (_, Some(st)) if st.count > 0 => (st.min, st.max),
        // 1-dimensional W has no curvature.
        _ => (0.0, 0.0),
    };
    let mut bend_min = f64::INFINITY;
    let mut bend_max = f64::NEG_INFINITY;
    for (s, d) in shrunk.samples.iter().zip(&defects) {
        // Exact product-model scalar curvature of the bent hypersurface.
        let qf = (q - 1) as f64;
        let exact = (qf - 1.0) * qf * s.theta.sin().powi(2) / (s.r * s.r)
            - 2.0 * qf * s.k * s.theta.sin() / s.r;
        let lo = s_w_min + exact.min(*d);
        let hi = s_w_max + exact;
        bend_min = bend_min.min(lo);
        bend_max = bend_max.max(hi);
    }

    let (collar_s_min, collar_s_max) = if options.compute_scalar && collar_metric.dim() <= 4 {
        let st = crate::curvature::scalar_curvature(&collar_metric)?.stats();
        (st.min, st.max)
    } else {
        (f64::NAN, f64::NAN)
    };
    let (outer_s_min, outer_s_max) = if options.compute_scalar {
        let st = crate::curvature::scalar_curvature(outer)?.stats();
        (st.min, st.max)
    } else {
        (f64::NAN, f64::NAN)
    };

    let certified = s_g_lower - curve.eps2;
    let regions = vec![
        RegionReport {
            kind: RegionKind::Outer,
            volume: outer_volume,
            scalar_min: outer_s_min,
            scalar_max: outer_s_max,
            certified_min: s_g_lower,
        },
        RegionReport {
            kind: RegionKind::Bend,
            volume: fiber * bend_integral(curve.r0),
            scalar_min: bend_min,
            scalar_max: bend_max,
            certified_min: certified,
        },
        RegionReport {
            kind: RegionKind::Homotopy,
            volume: collar_volume,
            scalar_min: collar_s_min,
            scalar_max: collar_s_max,
            certified_min: 0.0,
        },
    ];

    Ok(NeckAssembly {
        delta,
        epsilon,
        mu,
        q,
        parameters: AssemblyParameters {
            r0: curve.r0,
            r1: curve.r1,
            r1p: curve.r1p,
            r2: curve.r2,
            r3: curve.r3,
            theta0: curve.theta0,
            eps2: curve.eps2,
            s_g_lower,
        },
        regions,
        s_volume,
        t_volume,
        n_volume,
        interfaces,
        certified_min_scalar: certified,
    })
}

fn product_tube_metric(g_w: &MetricField, q: usize, p: &[f64], out: &mut [f64]) {
    let m = g_w.dim();
    let n = 1 + m + (q - 1);
    out.fill(0.0);
    out[0] = 1.0;
    let mut gw = vec![0.0; m * m];
    g_w.at_point(&p[1..1 + m], &mut gw).expect("closed form");
    for i in 0..m {
        for j in 0..m {
            out[(1 + i) * n + (1 + j)] = gw[i * m + j];
        }
    }
    let r = p[0];
    let mut warp = r * r;
    for a in 0..q - 1 {
        out[(1 + m + a) * n + (1 + m + a)] = warp;
        if a + 2 < q {
            let s = p[1 + m + a].sin();
            warp *= s * s;
        }
    }
}
