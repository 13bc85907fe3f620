//! Smooth radial profiles: the interpolation profile w_delta, the
//! tube cutoff eta, and the cylinder cutoff xi.
//!
//! All three are built from one primitive, a C-infinity monotone step on
//! [0, 1] whose slope is a mollified trapezoid: zero to all orders at both
//! ends, constant on the plateau, with `exp(-1/x)`-type ramps. The peak
//! slope can be prescribed down to its infimum 1 (the mean slope), which is
//! what the logarithmic cutoffs need.

use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};

const RAMP_TABLE: usize = 1024;

/// C-infinity step S on [0, 1]: S(0) = 0, S(1) = 1, S' >= 0, with
/// max S' = 1/(1 - ramp) attained on the plateau `[ramp, 1 - ramp]`.
#[derive(Clone)]
pub struct FlatStep {
    ramp: f64,
    peak: f64,
    /// Cumulative integral of the edge function sigma on [0, 1].
    table: Arc<Vec<f64>>,
}

fn mollifier(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth partition edge: 0 for u <= 0, 1 for u >= 1.
fn sigma(u: f64) -> f64 {
    let a = mollifier(u);
    let b = mollifier(1.0 - u);
    if a == 0.0 && b == 0.0 {
        return if u >= 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

impl FlatStep {
    /// Step with the given peak slope (must exceed 1). The usable infimum is
    /// 1; values very close to 1 produce very sharp ramps.
    pub fn with_peak_slope(peak: f64) -> Result<Self> {
        if !(peak > 1.0) {
            return Err(Error::ProfileConstruction(format!(
                "peak slope must exceed the mean slope 1, got {peak}"
            )));
        }
        let ramp = 1.0 - 1.0 / peak;
        if ramp >= 0.5 {
            return Err(Error::ProfileConstruction(format!(
                "peak slope {peak} needs ramp fraction {ramp} >= 1/2"
            )));
        }
        // Composite Simpson table of int_0^x sigma on [0, 1].
        let mut table = Vec::with_capacity(RAMP_TABLE + 1);
        table.push(0.0);
        let h = 1.0 / RAMP_TABLE as f64;
        let mut acc = 0.0;
        for k in 0..RAMP_TABLE {
            let x0 = k as f64 * h;
            acc += h / 6.0 * (sigma(x0) + 4.0 * sigma(x0 + 0.5 * h) + sigma(x0 + h));
            table.push(acc);
        }
        // By symmetry the exact integral is 1/2; normalize the table so the
        // plateau join is exact.
        let scale = 0.5 / acc;
        for v in &mut table {
            *v *= scale;
        }
        Ok(FlatStep { ramp, peak, table: Arc::new(table) })
    }

    pub fn peak_slope(&self) -> f64 {
        self.peak
    }

    fn sigma_integral(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 0.5 + (u - 1.0);
        }
        let x = u * RAMP_TABLE as f64;
        let k = (x.floor() as usize).min(RAMP_TABLE - 1);
        let frac = x - k as f64;
        self.table[k] * (1.0 - frac) + self.table[k + 1] * frac
    }

    /// S(x).
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let r = self.ramp;
        // S'(y) = peak * sigma(y/r) * sigma((1-y)/r); integrate in pieces.
        let left = r * self.sigma_integral((x.min(r)) / r);
        let mid = (x.clamp(r, 1.0 - r) - r).max(0.0);
        let right = if x > 1.0 - r {
            r * (0.5 - self.sigma_integral((1.0 - x) / r))
        } else {
            0.0
        };
        (self.peak * (left + mid + right)).clamp(0.0, 1.0)
    }

    /// S'(x), exact (no table).
    pub fn slope(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let r = self.ramp;
        self.peak * sigma(x / r) * sigma((1.0 - x) / r)
    }

    /// S''(x) by a tight central difference of the exact slope.
    pub fn curvature(&self, x: f64) -> f64 {
        let h = 1e-6;
        (self.slope(x + h) - self.slope(x - h)) / (2.0 * h)
    }
}

/// Measured bound of the form `max |r f'(r)|` over a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub description: String,
    pub measured: f64,
    pub bound: f64,
    pub worst_r: f64,
    pub pass: bool,
}

/// The radial interpolation profile: w = 1 on [0, plateau], w = 0 on
/// [delta, inf), transitioning as a flat-top step in ln r across
/// [plateau, delta] with plateau = exp(-1/delta)/4.
///
/// The nominal gradient targets `|r w'| < delta` and `|r w''| < delta` are
/// stored in the check report; the logarithmic window `1/delta + ln(4 delta)`
/// is shorter than `1/delta` for delta < 1/4, so the measured first bound
/// comes out slightly above delta for any smooth profile with these plateaus,
/// and the second is far larger near the inner plateau. `check()` reports
/// the measured constants; callers decide what to do with them.
#[derive(Clone)]
pub struct InterpolationProfile {
    pub delta: f64,
    pub plateau: f64,
    step: FlatStep,
    log_window: f64,
}

pub fn interpolation_profile(delta: f64) -> Result<InterpolationProfile> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must be in (0,1), got {delta}")));
    }
    let plateau = 0.25 * (-1.0 / delta).exp();
    if plateau >= delta {
        return Err(Error::InvalidParameter(format!(
            "plateau radius {plateau} must be below delta = {delta}"
        )));
    }
    let log_window = (delta / plateau).ln();
    // Near-minimal peak slope; sharper ramps buy nothing once the window is
    // the binding constraint.
    let step = FlatStep::with_peak_slope(1.18)?;
    Ok(InterpolationProfile { delta, plateau, step, log_window })
}

impl InterpolationProfile {
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.plateau {
            return 1.0;
        }
        if r >= self.delta {
            return 0.0;
        }
        self.step.value((self.delta.ln() - r.ln()) / self.log_window)
    }

    /// dw/dr, analytic.
    pub fn deriv(&self, r: f64) -> f64 {
        if r <= self.plateau || r >= self.delta {
            return 0.0;
        }
        let x = (self.delta.ln() - r.ln()) / self.log_window;
        -self.step.slope(x) / (self.log_window * r)
    }

    /// d2w/dr2, analytic in the step's slope and curvature.
    pub fn deriv2(&self, r: f64) -> f64 {
        if r <= self.plateau || r >= self.delta {
            return 0.0;
        }
        let x = (self.delta.ln() - r.ln()) / self.log_window;
        let lw = self.log_window;
        (self.step.curvature(x) / (lw * lw) + self.step.slope(x) / lw) / (r * r)
    }

    /// Verify the plateau/support conditions exactly and measure the two
    /// gradient bounds on an `oversample`-times-finer logarithmic grid.
    pub fn check(&self, oversample: usize) -> ProfileReport {
        let samples = 512 * oversample.max(1);
        let (mut worst1, mut worst1_r) = (0.0f64, self.plateau);
        let (mut worst2, mut worst2_r) = (0.0f64, self.plateau);
        for k in 0..=samples {
            let x = k as f64 / samples as f64;
            let r = self.plateau * (self.delta / self.plateau).powf(x);
            let b1 = (r * self.deriv(r)).abs();
            if b1 > worst1 {
                worst1 = b1;
                worst1_r = r;
            }
            let b2 = (r * self.deriv2(r)).abs();
            if b2 > worst2 {
                worst2 = b2;
                worst2_r = r;
            }
        }
        let plateau_ok = self.value(self.plateau * 0.5) == 1.0 && self.value(0.0) == 1.0;
        let support_ok = self.value(self.delta) == 0.0 && self.value(2.0 * self.delta) == 0.0;
        ProfileReport {
            delta: self.delta,
            plateau_radius: self.plateau,
            plateau_ok,
            support_ok,
            first_derivative: BoundCheck {
                description: "max |r w'(r)| vs delta".into(),
                measured: worst1,
                bound: self.delta,
                worst_r: worst1_r,
                pass: worst1 < self.delta,
            },
            second_derivative: BoundCheck {
                description: "max |r w''(r)| vs delta".into(),
                measured: worst2,
                bound: self.delta,
                worst_r: worst2_r,
                pass: worst2 < self.delta,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub delta: f64,
    pub plateau_radius: f64,
    pub plateau_ok: bool,
    pub support_ok: bool,
    pub first_derivative: BoundCheck,
    pub second_derivative: BoundCheck,
}

/// Radial cutoff eta: 0 for r <= r2, 1 for r >= r1p, logarithmic in between,
/// with `r |eta'(r)| <= sqrt((q-1)(q-2)/2) sin(theta0)`.
#[derive(Clone)]
pub struct EtaProfile {
    pub q: usize,
    pub theta0: f64,
    pub r1p: f64,
    pub r2: f64,
    step: FlatStep,
    log_window: f64,
    pub gradient_bound: f64,
}

pub fn cutoff_eta(q: usize, theta0: f64, r1p: f64, r2: f64) -> Result<EtaProfile> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!("codimension q must be >= 3, got {q}")));
    }
    if !(theta0 > 0.0 && theta0 < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter("theta0 must lie in (0, pi/2)".into()));
    }
    if !(0.0 < r2 && r2 < r1p) {
        return Err(Error::InvalidParameter("need 0 < r2 < r1p".into()));
    }
    let c = (((q - 1) * (q - 2)) as f64 / 2.0).sqrt();
    let bound = c * theta0.sin();
    let log_window = (r1p / r2).ln();
    // Feasible only with strict slack: a step from 0 to 1 over a log window
    // L has max slope >= 1/L, so we need bound * L > 1 strictly.
    let kappa = bound * log_window;
    if kappa <= 1.0 {
        let max_r2 = r1p * (-1.0 / bound).exp();
        return Err(Error::EtaInfeasible { r2, max_admissible: max_r2 });
    }
    // Keep the peak comfortably inside the available margin.
    let peak = 1.0 + 0.8 * (kappa - 1.0).min(1.0);
    let step = FlatStep::with_peak_slope(peak)?;
    Ok(EtaProfile { q, theta0, r1p, r2, step, log_window, gradient_bound: bound })
}

impl EtaProfile {
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r2 {
            return 0.0;
        }
        if r >= self.r1p {
            return 1.0;
        }
        self.step.value((r / self.r2).ln() / self.log_window)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        if r <= self.r2 || r >= self.r1p {
            return 0.0;
        }
        let x = (r / self.r2).ln() / self.log_window;
        self.step.slope(x) / (self.log_window * r)
    }

    /// Measure `max r |eta'|` against the bound on a fine logarithmic grid.
    pub fn check(&self, oversample: usize) -> BoundCheck {
        let samples = 512 * oversample.max(1);
        let mut worst = 0.0f64;
        let mut worst_r = self.r2;
        for k in 0..=samples {
            let x = k as f64 / samples as f64;
            let r = self.r2 * (self.r1p / self.r2).powf(x);
            let v = (r * self.deriv(r)).abs();
            if v > worst {
                worst = v;
                worst_r = r;
            }
        }
        BoundCheck {
            description: "max |r eta'(r)| vs sqrt((q-1)(q-2)/2) sin(theta0)".into(),
            measured: worst,
            bound: self.gradient_bound,
            worst_r,
            pass: worst <= self.gradient_bound,
        }
    }
}

/// Cylinder cutoff xi: 1 on (-inf, 0] and [2, inf), 0 on [2/3, 4/3],
/// values in [0, 1], C-infinity.
#[derive(Clone)]
pub struct XiProfile {
    step: FlatStep,
}

pub fn cutoff_xi() -> XiProfile {
    XiProfile { step: FlatStep::with_peak_slope(1.8).expect("fixed feasible slope") }
}

impl XiProfile {
    pub fn value(&self, t: f64) -> f64 {
        const LO: f64 = 2.0 / 3.0;
        const HI: f64 = 4.0 / 3.0;
        if t <= 0.0 || t >= 2.0 {
            1.0
        } else if t < LO {
            1.0 - self.step.value(t / LO)
        } else if t <= HI {
            0.0
        } else {
            self.step.value((t - HI) / (2.0 - HI))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_step_endpoints_and_slope_cap() {
        let s = FlatStep::with_peak_slope(1.2).unwrap();
        assert_eq!(s.value(0.0), 0.0);
        assert!((s.value(1.0) - 1.0).abs() < 1e-12);
        assert!((s.value(0.5) - 0.5).abs() < 1e-9, "midpoint symmetry");
        let mut max_slope = 0.0f64;
        for k in 0..=2000 {
            max_slope = max_slope.max(s.slope(k as f64 / 2000.0));
        }
        assert!(max_slope <= 1.2 + 1e-12);
        assert!(max_slope > 1.19, "plateau should reach the prescribed peak");
        // Consistency of value with integral of slope.
        let mut acc = 0.0;
        let n = 4000;
        for k in 0..n {
            let x = (k as f64 + 0.5) / n as f64;
            acc += s.slope(x) / n as f64;
        }
        assert!((acc - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_step_rejects_infeasible_peak() {
        assert!(FlatStep::with_peak_slope(1.0).is_err());
        assert!(FlatStep::with_peak_slope(0.8).is_err());
    }

    #[test]
    fn interpolation_profile_plateaus() {
        let w = interpolation_profile(0.1).unwrap();
        assert_eq!(w.value(w.plateau * 0.5), 1.0);
        assert_eq!(w.value(0.2), 0.0);
        let report = w.check(10);
        assert!(report.plateau_ok && report.support_ok);
        // The logarithmic window is 1/delta + ln(4 delta) < 1/delta, so the
        // best possible max |r w'| is delta / (1 + delta ln(4 delta)); check
        // the measured value sits just above that information bound.
        let floor = 0.1 / (1.0 + 0.1 * (0.4f64).ln());
        assert!(report.first_derivative.measured >= floor - 1e-9);
        assert!(report.first_derivative.measured < 1.30 * floor);
    }

    #[test]
    fn eta_respects_gradient_bound() {
        // r2 chosen by the feasibility rule with safety 1.2.
        let (q, theta0, r1p) = (3usize, 0.1f64, 0.1f64);
        let c = 1.0; // sqrt((2*1)/2)
        let r2 = r1p * (-1.2 / (c * theta0.sin())).exp();
        let eta = cutoff_eta(q, theta0, r1p, r2).unwrap();
        assert_eq!(eta.value(r2 * 0.5), 0.0);
        assert_eq!(eta.value(r1p * 2.0), 1.0);
        let check = eta.check(10);
        assert!(check.pass, "measured {} vs bound {}", check.measured, check.bound);
    }

    #[test]
    fn eta_feasibility_boundary_errors() {
        let (q, theta0, r1p) = (3usize, 0.1f64, 0.1f64);
        let r2 = r1p * (-1.0 / theta0.sin()).exp(); // exactly the boundary
        assert!(matches!(
            cutoff_eta(q, theta0, r1p, r2),
            Err(Error::EtaInfeasible { .. })
        ));
    }

    #[test]
    fn xi_plateaus() {
        let xi = cutoff_xi();
        assert_eq!(xi.value(-1.0), 1.0);
        assert_eq!(xi.value(1.0), 0.0);
        assert_eq!(xi.value(3.0), 1.0);
        for k in 0..=400 {
            let t = -1.0 + 5.0 * k as f64 / 400.0;
            let v = xi.value(t);
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
