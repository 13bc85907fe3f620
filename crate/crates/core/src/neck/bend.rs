//! The three-step bending curve and its scalar-curvature certification.
//!
//! The curve lives in the (t, r) half-plane, parameterized by arc length L,
//! with bending angle theta measured from the inward radial direction:
//!
//!   dr/dL = -cos(theta),   dt/dL = sin(theta),   d(theta)/dL = k >= 0.
//!
//! It starts radially (theta = 0) at the tube radius r0 and ends parallel to
//! the t-axis (theta = pi/2) at the final radius r3. The pointwise
//! certification quantity is
//!
//!   D = (q-1)(q-2)/2 sin^2(theta)/r^2 - 3(q-1) k sin(theta)/r,
//!
//! which bounds the scalar-curvature change of the bent hypersurface from
//! below; the construction keeps D > -eps2 during the initial bend (step 1)
//! and D >= 0 afterwards (steps 2 and 3).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::neck::profiles::FlatStep;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveSample {
    pub l: f64,
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Step {
    InitialBend,
    Straight,
    Bumps,
}

#[derive(Debug, Clone)]
pub struct BendCurve {
    pub q: usize,
    pub theta0: f64,
    pub eps2: f64,
    pub r0: f64,
    pub r1: f64,
    pub r1p: f64,
    pub r2: f64,
    pub r3: f64,
    pub samples: Vec<CurveSample>,
    /// Sample index ranges of the three steps.
    pub step_ranges: [std::ops::Range<usize>; 3],
    pub bump_count: usize,
    /// Shrink factor applied to the tail (1 for a freshly built curve).
    pub mu: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BendParams {
    pub q: usize,
    pub theta0: f64,
    pub r0: f64,
    pub eps2: f64,
    /// r1p = r1p_ratio * r1.
    pub r1p_ratio: f64,
    /// r2 = r1p * exp(-safety / (c sin theta0)); must exceed 1 for the radial
    /// cutoff to exist.
    pub safety: f64,
}

impl Default for BendParams {
    fn default() -> Self {
        BendParams { q: 3, theta0: 0.1, r0: 50.0, eps2: 1e-3, r1p_ratio: 0.05, safety: 1.2 }
    }
}

const THETA0_CAP: f64 = 0.3;
const STEP1_SAMPLES: usize = 512;
const STEP2_SAMPLES: usize = 512;
const BUMP_SAMPLES: usize = 64;
/// Ramp fraction of each curvature bump (fraction of the bump length spent
/// ramping up and down). Kept small so per-bump length stays near the
/// rectangular optimum Delta(theta)/k0.
const BUMP_RAMP: f64 = 0.12;

/// Certification integrand D at one sample.
pub fn defect(q: usize, theta: f64, k: f64, r: f64) -> f64 {
    let qm1 = (q - 1) as f64;
    let qm2 = (q - 2) as f64;
    let s = theta.sin();
    qm1 * qm2 / 2.0 * s * s / (r * r) - 3.0 * qm1 * k * s / r
}

/// Maximal bump curvature at radius r: k0 = (q-2) sin(theta0) / (6 r).
pub fn bump_peak_curvature(q: usize, theta0: f64, r: f64) -> f64 {
    (q - 2) as f64 * theta0.sin() / (6.0 * r)
}

/// Per-bump turning angle (q-2) sin(theta0) / 12.
pub fn bump_turn(q: usize, theta0: f64) -> f64 {
    (q - 2) as f64 * theta0.sin() / 12.0
}

pub fn build_bend_curve(p: BendParams) -> Result<BendCurve> {
    if p.q < 3 {
        return Err(Error::InvalidParameter(format!("codimension q must be >= 3, got {}", p.q)));
    }
    if !(p.theta0 > 0.0 && p.theta0 <= THETA0_CAP) {
        return Err(Error::InvalidParameter(format!(
            "theta0 = {} outside (0, {THETA0_CAP}]",
            p.theta0
        )));
    }
    if !(p.eps2 > 0.0) {
        return Err(Error::InvalidParameter("eps2 must be positive".into()));
    }
    if !(p.r0 > 0.0) {
        return Err(Error::InvalidParameter("r0 must be positive".into()));
    }
    if !(p.r1p_ratio > 0.0 && p.r1p_ratio < 1.0) {
        return Err(Error::InvalidParameter("r1p_ratio must lie in (0, 1)".into()));
    }
    if !(p.safety >= 1.0) {
        return Err(Error::InvalidParameter("safety must be >= 1".into()));
    }

    // Step 1: constant curvature k1, theta from 0 to theta0, starting at r0.
    // Closed forms: theta = k1 L, r = r0 - sin(theta)/k1, t = (1-cos(theta))/k1.
    // The defect along the arc depends only on theta and k1; choose the
    // largest k1 keeping min D >= -eps2/2, by bisection.
    let q = p.q;
    let min_defect_step1 = |k1: f64| -> f64 {
        let mut worst = f64::INFINITY;
        for i in 0..=400 {
            let theta = p.theta0 * i as f64 / 400.0;
            let r = p.r0 - theta.sin() / k1;
            if r <= 0.0 {
                return f64::NEG_INFINITY;
            }
            worst = worst.min(defect(q, theta, k1, r));
        }
        worst
    };
    // Keep at least half the tube radius: k >= 2 sin(theta0) / r0.
    let k_lo = 2.0 * p.theta0.sin() / p.r0;
    if min_defect_step1(k_lo) < -p.eps2 / 2.0 {
        // Infeasible even at the gentlest admissible bend; a larger tube is
        // needed: 3 (q-1) k sin(theta0) <~ eps2/2 * r with k ~ 2 sin/r.
        let suggested =
            p.theta0.sin() * (12.0 * (q - 1) as f64 / p.eps2).sqrt() * 1.1;
        return Err(Error::BendConstruction(format!(
            "initial bend cannot keep the defect above -eps2/2 at tube radius {}; \
             increase r0 to at least about {suggested:.3}",
            p.r0
        )));
    }
    let mut lo = k_lo;
    let mut hi = k_lo;
    for _ in 0..60 {
        hi *= 2.0;
        if min_defect_step1(hi) < -p.eps2 / 2.0 {
            break;
        }
        lo = hi;
    }
    if min_defect_step1(hi) >= -p.eps2 / 2.0 {
        return Err(Error::BendConstruction("step-1 bisection bracket not found".into()));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if min_defect_step1(mid) >= -p.eps2 / 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k1 = lo;
    let l1 = p.theta0 / k1;
    let r1 = p.r0 - p.theta0.sin() / k1;

    let r1p = p.r1p_ratio * r1;
    let c = (((q - 1) * (q - 2)) as f64 / 2.0).sqrt();
    let r2 = r1p * (-p.safety / (c * p.theta0.sin())).exp();
    if !(r2 > 0.0 && r2.is_finite()) {
        return Err(Error::BendConstruction("r2 underflowed".into()));
    }

    let mut samples: Vec<CurveSample> = Vec::new();
    for i in 0..=STEP1_SAMPLES {
        let l = l1 * i as f64 / STEP1_SAMPLES as f64;
        let theta = k1 * l;
        samples.push(CurveSample {
            l,
            t: (1.0 - theta.cos()) / k1,
            r: p.r0 - theta.sin() / k1,
            theta,
            k: k1,
        });
    }
    let step1_end = samples.len();

    // Step 2: straight (k = 0) from r1 down to r2 at fixed angle theta0.
    // Samples are log-spaced in r; the radius spans many decades.
    let t1 = samples[step1_end - 1].t;
    let (ct0, st0) = (p.theta0.cos(), p.theta0.sin());
    // The joint sample repeats (L, r1) with k = 0, making the curvature jump
    // at the end of the initial bend explicit with a zero-width window.
    for i in 0..=STEP2_SAMPLES {
        let r = r1 * (r2 / r1).powf(i as f64 / STEP2_SAMPLES as f64);
        let dl = (r1 - r) / ct0;
        samples.push(CurveSample {
            l: l1 + dl,
            t: t1 + dl * st0,
            r,
            theta: p.theta0,
            k: 0.0,
        });
    }
    let step2_end = samples.len();

    // Step 3: flat-top curvature bumps. Each bump starts at the current
    // radius r_s with peak k0(r_s) and turns by exactly
    // min(bump_turn, remaining angle); the final bump takes the remainder so
    // the terminal angle is pi/2 to quadrature accuracy.
    let step = FlatStep::with_peak_slope(1.0 / (1.0 - BUMP_RAMP))?;
    let d_theta = bump_turn(q, p.theta0);
    let mut bump_count = 0usize;
    let mut theta = p.theta0;
    let (mut l, mut t, mut r) = {
        let s = samples[step2_end - 1];
        (s.l, s.t, s.r)
    };
    let target = std::f64::consts::FRAC_PI_2;
    while target - theta > 1e-12 {
        if bump_count > 20_000 {
            return Err(Error::BendConstruction(format!(
                "bump iteration did not converge: theta = {theta} after {bump_count} bumps \
                 (r = {r:.3e})"
            )));
        }
        let turn = d_theta.min(target - theta);
        let k0 = bump_peak_curvature(q, p.theta0, r);
        // Flat-top profile integrates to peak * len * (1 - ramp).
        let len = turn / (k0 * (1.0 - BUMP_RAMP));
        let theta_in = theta;
        let (l_in, t_in, r_in) = (l, t, r);
        // RK4 on (t, r); theta(x) is analytic via the step primitive.
        let n_sub = BUMP_SAMPLES;
        let h = len / n_sub as f64;
        let theta_at = |x: f64| theta_in + turn * step.value(x / len);
        let mut tt = t_in;
        let mut rr = r_in;
        for i in 0..n_sub {
            let x0 = i as f64 * h;
            let th0 = theta_at(x0);
            let th_half = theta_at(x0 + 0.5 * h);
            let th1 = theta_at(x0 + h);
            // dr/dL and dt/dL depend only on L; RK4 reduces to Simpson.
            rr -= h / 6.0 * (th0.cos() + 4.0 * th_half.cos() + th1.cos());
            tt += h / 6.0 * (th0.sin() + 4.0 * th_half.sin() + th1.sin());
            if rr <= 0.0 {
                return Err(Error::BendConstruction("bump drove the radius through zero".into()));
            }
            let x = x0 + h;
            samples.push(CurveSample {
                l: l_in + x,
                t: tt,
                r: rr,
                theta: theta_at(x),
                k: k0 * (1.0 - BUMP_RAMP) * step.slope(x / len),
            });
        }
        theta = theta_in + turn;
        l = l_in + len;
        t = tt;
        r = rr;
        bump_count += 1;
        if r < 1e-280 {
            return Err(Error::BendConstruction(format!(
                "terminal radius underflowed after {bump_count} bumps; \
                 increase theta0 or reduce the bend budget"
            )));
        }
    }
    let r3 = r;

    Ok(BendCurve {
        q,
        theta0: p.theta0,
        eps2: p.eps2,
        r0: p.r0,
        r1,
        r1p,
        r2,
        r3,
        samples,
        step_ranges: [0..step1_end, step1_end..step2_end, step2_end..0],
        bump_count,
        mu: 1.0,
    }
    .finalize())
}

impl BendCurve {
    fn finalize(mut self) -> Self {
        self.step_ranges[2] = self.step_ranges[1].end..self.samples.len();
        self
    }

    /// Arc length of the bump stage.
    pub fn step3_length(&self) -> f64 {
        let r = &self.step_ranges[2];
        if r.is_empty() {
            return 0.0;
        }
        self.samples[r.end - 1].l - self.samples[r.start].l
    }

    /// Turn-budget length bound the bump stage must respect:
    /// 3 pi r2 / ((q-2) sin theta0) + r2 / 2 with the (possibly shrunk) r2.
    pub fn step3_length_bound(&self) -> f64 {
        let r2 = self.r2;
        3.0 * std::f64::consts::PI * r2 / ((self.q - 2) as f64 * self.theta0.sin()) + r2 / 2.0
    }

    pub fn terminal_angle(&self) -> f64 {
        self.samples.last().map(|s| s.theta).unwrap_or(0.0)
    }

    /// Defect D at every sample.
    pub fn defects(&self) -> Vec<f64> {
        self.samples.iter().map(|s| defect(self.q, s.theta, s.k, s.r)).collect()
    }

    pub fn step_of(&self, index: usize) -> Step {
        if self.step_ranges[0].contains(&index) {
            Step::InitialBend
        } else if self.step_ranges[1].contains(&index) {
            Step::Straight
        } else {
            Step::Bumps
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepDefectSummary {
    pub min_defect: f64,
    pub worst_l: f64,
    pub worst_r: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BendCertificate {
    pub q: usize,
    pub theta0: f64,
    pub eps2: f64,
    pub s_g_lower: f64,
    pub step1: StepDefectSummary,
    pub steps23: StepDefectSummary,
    pub terminal_angle: f64,
    pub bump_count: usize,
    pub step3_length: f64,
    pub step3_length_bound: f64,
    /// Certified scalar-curvature floor: s_g_lower - eps2 on step 1,
    /// s_g_lower on steps 2-3.
    pub certified_min_scalar: f64,
    pub pass: bool,
}

/// Check D > -eps2 on step 1 and D >= 0 on steps 2-3, pointwise at every
/// sample, plus the terminal angle and the bump-stage length bound.
pub fn certify_bend(curve: &BendCurve, s_g_lower: f64) -> Result<BendCertificate> {
    let defects = curve.defects();
    let summary = |range: &std::ops::Range<usize>| -> StepDefectSummary {
        let mut min_d = f64::INFINITY;
        let mut worst = range.start;
        for i in range.clone() {
            if defects[i] < min_d {
                min_d = defects[i];
                worst = i;
            }
        }
        StepDefectSummary {
            min_defect: min_d,
            worst_l: curve.samples[worst].l,
            worst_r: curve.samples[worst].r,
            samples: range.len(),
        }
    };
    let step1 = summary(&curve.step_ranges[0]);
    let combined = curve.step_ranges[1].len() + curve.step_ranges[2].len();
    let mut steps23 = summary(&curve.step_ranges[1]);
    let s3 = summary(&curve.step_ranges[2]);
    if s3.min_defect < steps23.min_defect {
        steps23 = s3;
    }
    steps23.samples = combined;

    let terminal = curve.terminal_angle();
    let length_ok = curve.step3_length() <= curve.step3_length_bound();
    let pass = step1.min_defect > -curve.eps2
        && steps23.min_defect >= 0.0
        && (terminal - std::f64::consts::FRAC_PI_2).abs() <= 1e-6
        && length_ok;
    let cert = BendCertificate {
        q: curve.q,
        theta0: curve.theta0,
        eps2: curve.eps2,
        s_g_lower,
        step1,
        steps23,
        terminal_angle: terminal,
        bump_count: curve.bump_count,
        step3_length: curve.step3_length(),
        step3_length_bound: curve.step3_length_bound(),
        certified_min_scalar: s_g_lower - curve.eps2,
        pass,
    };
    if pass {
        Ok(cert)
    } else {
        Err(Error::CertificationFailed(format!(
            "bend certificate failed: min step-1 defect {:.3e} (needs > {:.3e}), \
             min step-2/3 defect {:.3e} (needs >= 0), terminal angle {:.9} (needs pi/2 +- 1e-6), \
             step-3 length {:.6} vs bound {:.6}",
            cert.step1.min_defect,
            -curve.eps2,
            cert.steps23.min_defect,
            cert.terminal_angle,
            cert.step3_length,
            cert.step3_length_bound,
        )))
    }
}

/// Homothetic shrink of the tail: r1p and r2 are replaced by mu r1p and
/// mu r2 (step 2 extends down to mu r2), and the bump stage is scaled by mu:
/// r -> mu r, k -> k / mu, theta unchanged in normalized arc length. The
/// defect transforms as D -> D / mu^2, so certification is preserved.
pub fn shrink_curve(curve: &BendCurve, mu: f64) -> Result<BendCurve> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu must lie in (0, 1], got {mu}")));
    }
    if mu == 1.0 {
        return Ok(curve.clone());
    }
    let mut samples: Vec<CurveSample> = Vec::with_capacity(curve.samples.len());
    // Step 1 unchanged.
    samples.extend_from_slice(&curve.samples[curve.step_ranges[0].clone()]);
    let step1_end = samples.len();

    // Step 2 re-sampled down to mu r2.
    let s_start = *samples.last().expect("step 1 nonempty");
    let (ct0, st0) = (curve.theta0.cos(), curve.theta0.sin());
    let new_r2 = mu * curve.r2;
    for i in 0..=STEP2_SAMPLES {
        let r = curve.r1 * (new_r2 / curve.r1).powf(i as f64 / STEP2_SAMPLES as f64);
        let dl = (curve.r1 - r) / ct0;
        samples.push(CurveSample {
            l: s_start.l + dl,
            t: s_start.t + dl * st0,
            r,
            theta: curve.theta0,
            k: 0.0,
        });
    }
    let step2_end = samples.len();

    // Bump stage: pure homothety of the original tail, concatenated.
    let tail = &curve.samples[curve.step_ranges[2].clone()];
    let join = samples[step2_end - 1];
    if let Some(first) = tail.first() {
        let (l0, t0) = (first.l, first.t);
        for s in tail {
            samples.push(CurveSample {
                l: join.l + mu * (s.l - l0),
                t: join.t + mu * (s.t - t0),
                r: mu * s.r,
                theta: s.theta,
                k: s.k / mu,
            });
        }
    }

    Ok(BendCurve {
        q: curve.q,
        theta0: curve.theta0,
        eps2: curve.eps2,
        r0: curve.r0,
        r1: curve.r1,
        r1p: mu * curve.r1p,
        r2: new_r2,
        r3: mu * curve.r3,
        samples,
        step_ranges: [0..step1_end, step1_end..step2_end, step2_end..0],
        bump_count: curve.bump_count,
        mu: curve.mu * mu,
    }
    .finalize())
}
