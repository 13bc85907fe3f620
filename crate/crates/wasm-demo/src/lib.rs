//! Browser bindings for three interactive experiments: the certified bending
//! curve, reduced Yamabe minimization on warped spheres, and the radial
//! cutoff profiles. Each export returns a JSON string ready for plotting;
//! errors come back as `{"error": "..."}` instead of exceptions.

use serde_json::json;
use wasm_bindgen::prelude::*;

use yamabe_core::invariants::lambda_n;
use yamabe_core::models::Warp;
use yamabe_core::neck::bend::{build_bend_curve, certify_bend, shrink_curve, BendParams};
use yamabe_core::neck::profiles::{cutoff_eta, interpolation_profile};
use yamabe_core::reduce::{
    minimize_reduced_with, reduce_cohomogeneity_one, MinimizeOptions, ModelFiber, WarpedModel,
};

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Build and certify a bending curve; returns decimated samples (arc length,
/// t, r, theta, k, defect) plus the certificate summary.
#[wasm_bindgen]
pub fn bend_curve_json(q: u32, theta0: f64, r0: f64, eps2: f64, mu: f64) -> String {
    let params = BendParams {
        q: q as usize,
        theta0,
        r0,
        eps2,
        ..Default::default()
    };
    let curve = match build_bend_curve(params) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let curve = if mu < 1.0 {
        match shrink_curve(&curve, mu) {
            Ok(c) => c,
            Err(e) => return err_json(e),
        }
    } else {
        curve
    };
    let cert = match certify_bend(&curve, 0.0) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let defects = curve.defects();
    // Decimate for plotting; keep segment joints.
    let stride = (curve.samples.len() / 1600).max(1);
    let mut rows: Vec<serde_json::Value> = Vec::new();
    for (i, s) in curve.samples.iter().enumerate() {
        if i % stride == 0 || i + 1 == curve.samples.len() {
            rows.push(json!([s.l, s.t, s.r, s.theta, s.k, defects[i]]));
        }
    }
    json!({
        "columns": ["L", "t", "r", "theta", "k", "defect"],
        "samples": rows,
        "radii": {
            "r0": curve.r0, "r1": curve.r1, "r1p": curve.r1p,
            "r2": curve.r2, "r3": curve.r3,
        },
        "bump_count": curve.bump_count,
        "certificate": {
            "pass": cert.pass,
            "terminal_angle": cert.terminal_angle,
            "step1_min_defect": cert.step1.min_defect,
            "steps23_min_defect": cert.steps23.min_defect,
            "step3_length": cert.step3_length,
            "step3_length_bound": cert.step3_length_bound,
            "eps2": cert.eps2,
        },
    })
    .to_string()
}

/// Reduce a warped 3-sphere (warp `sin t (1 + amplitude sin^2 t)`) and
/// minimize the 1D quotient; returns the profile, the minimizer, the
/// estimate, and the round-sphere constant for comparison.
#[wasm_bindgen]
pub fn minimize_profile_json(amplitude: f64, resolution: u32) -> String {
    let resolution = (resolution as usize).clamp(32, 1200);
    let model = WarpedModel {
        t_min: 0.0,
        t_max: std::f64::consts::PI,
        fibers: vec![ModelFiber {
            dim: 2,
            scalar: 2.0,
            volume: 4.0 * std::f64::consts::PI,
            warp: Warp::new(move |t| t.sin() * (1.0 + amplitude * t.sin().powi(2))),
        }],
    };
    let profile = match reduce_cohomogeneity_one(&model, resolution) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let init = vec![1.0; resolution];
    let opts = MinimizeOptions { subcritical_epsilon: 0.01, ..Default::default() };
    let est = match minimize_reduced_with(&profile, &init, 1e-7, opts) {
        Ok(e) => e,
        Err(e) => return err_json(e),
    };
    json!({
        "t": profile.t,
        "weight": profile.w,
        "scalar": profile.s,
        "minimizer": est.minimizer,
        "value": est.value,
        "iterations": est.iterations,
        "residual": est.residual,
        "lambda_3": lambda_n(3).unwrap(),
        "history": est.history.iter().step_by((est.history.len() / 400).max(1)).collect::<Vec<_>>(),
    })
    .to_string()
}

/// Sample the interpolation profile w_delta and the radial cutoff eta on
/// logarithmic grids, with their measured gradient bounds.
#[wasm_bindgen]
pub fn profiles_json(delta: f64, q: u32, theta0: f64) -> String {
    let w = match interpolation_profile(delta) {
        Ok(w) => w,
        Err(e) => return err_json(e),
    };
    let w_report = w.check(10);
    let mut w_rows: Vec<serde_json::Value> = Vec::new();
    let lo = w.plateau * 0.3;
    let hi = w.delta * 3.0;
    for k in 0..=600 {
        let r = lo * (hi / lo).powf(k as f64 / 600.0);
        w_rows.push(json!([r, w.value(r), r * w.deriv(r)]));
    }

    let q = q as usize;
    let c = (((q.max(3) - 1) * (q.max(3) - 2)) as f64 / 2.0).sqrt();
    let r1p = 0.1;
    let r2 = r1p * (-1.2 / (c * theta0.sin())).exp();
    let eta = match cutoff_eta(q.max(3), theta0, r1p, r2) {
        Ok(e) => e,
        Err(e) => return err_json(e),
    };
    let eta_check = eta.check(10);
    let mut eta_rows: Vec<serde_json::Value> = Vec::new();
    let lo = r2 * 0.3;
    let hi = r1p * 3.0;
    for k in 0..=600 {
        let r = lo * (hi / lo).powf(k as f64 / 600.0);
        eta_rows.push(json!([r, eta.value(r), r * eta.deriv(r)]));
    }

    json!({
        "w": {
            "columns": ["r", "w", "r_w_prime"],
            "samples": w_rows,
            "delta": delta,
            "plateau": w.plateau,
            "max_r_w_prime": w_report.first_derivative.measured,
            "bound": w_report.first_derivative.bound,
            "bound_holds": w_report.first_derivative.pass,
            // Best any smooth profile with these plateaus can do.
            "information_floor": delta / (1.0 + delta * (4.0 * delta).ln()),
        },
        "eta": {
            "columns": ["r", "eta", "r_eta_prime"],
            "samples": eta_rows,
            "r1p": r1p,
            "r2": r2,
            "max_r_eta_prime": eta_check.measured,
            "bound": eta_check.bound,
            "bound_holds": eta_check.pass,
        },
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bend_export_parses_and_certifies() {
        let text = bend_curve_json(3, 0.1, 50.0, 1e-3, 1.0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("error").is_none(), "{text}");
        assert_eq!(v["certificate"]["pass"], true);
        assert!(v["samples"].as_array().unwrap().len() > 500);
    }

    #[test]
    fn bend_export_reports_errors_as_json() {
        let text = bend_curve_json(2, 0.1, 50.0, 1e-3, 1.0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["error"].as_str().unwrap().contains("codimension"));
    }

    #[test]
    fn minimize_export_reaches_lambda() {
        let text = minimize_profile_json(0.0, 200);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let value = v["value"].as_f64().unwrap();
        let lam = v["lambda_3"].as_f64().unwrap();
        assert!((value - lam).abs() / lam < 1e-3);
    }

    #[test]
    fn profiles_export_includes_bounds() {
        let text = profiles_json(0.1, 3, 0.1);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["eta"]["bound_holds"], true);
        assert_eq!(v["w"]["bound_holds"], false);
        assert!(v["w"]["max_r_w_prime"].as_f64().unwrap() > 0.1);
    }
}
