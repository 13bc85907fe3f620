//! Closed-form constants and combination formulas for Yamabe-type bounds.

use serde::Serialize;

use crate::error::{Error, Result};

/// Lanczos approximation of the Gamma function (g = 7, 9 coefficients);
/// relative accuracy well below 1e-12 on the positive half-line. Exactness at
/// half-integer arguments is cross-checked against the volume recursion in
/// the test suite.
pub fn gamma_fn(x: f64) -> f64 {
    const PI: f64 = std::f64::consts::PI;
    const P: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut t = P[0];
    for (i, &p) in P.iter().enumerate().skip(1) {
        t += p / (x + i as f64);
    }
    let w = x + 7.5;
    (2.0 * PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * t
}

/// Volume of the round unit n-sphere, `2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * std::f64::consts::PI.powf((nf + 1.0) / 2.0) / gamma_fn((nf + 1.0) / 2.0)
}

/// Same volume by the recursion `vol(S^n) = 2 pi vol(S^{n-2}) / (n-1)` with
/// vol(S^0) = 2, vol(S^1) = 2 pi. Independent of the Gamma evaluation; used
/// as the oracle for it.
pub fn sphere_volume_recursive(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => std::f64::consts::TAU,
        _ => std::f64::consts::TAU * sphere_volume_recursive(n - 2) / (n as f64 - 1.0),
    }
}

/// Yamabe constant of the round unit n-sphere:
/// `Lambda_n = n (n-1) vol(S^n)^{2/n}`.
pub fn lambda_n(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("lambda_n needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * sphere_volume(n).powf(2.0 / nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Formula,
    Estimate,
    Assumption,
}

/// An extended-real Yamabe-type value; `value` may be `f64::INFINITY` when an
/// orbit-counting bound is vacuous.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct YamabeValue {
    pub value: f64,
    pub n: usize,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitBound {
    Finite(u64),
    Infinite,
}

/// Upper bound `Lambda_n k^{2/n}` from a minimal orbit of cardinality k;
/// infinite minimal orbits give the +infinity sentinel (bound vacuous, not
/// undefined).
pub fn hebey_vaugon_bound(n: usize, min_orbit: OrbitBound) -> Result<YamabeValue> {
    if n < 3 {
        return Err(Error::Domain(format!("orbit bound needs n >= 3, got {n}")));
    }
    let value = match min_orbit {
        OrbitBound::Finite(0) => return Err(Error::Domain("orbit cardinality must be >= 1".into())),
        OrbitBound::Finite(k) => lambda_n(n)? * (k as f64).powf(2.0 / n as f64),
        OrbitBound::Infinite => f64::INFINITY,
    };
    Ok(YamabeValue { value, n, provenance: Provenance::Formula })
}

/// Two-sided bound `[s_min vol^{2/n}, s_max vol^{2/n}]` valid when the
/// invariant Yamabe constant is nonpositive (caller asserts).
pub fn kobayashi_interval(s_min: f64, s_max: f64, vol: f64, n: usize) -> Result<(f64, f64)> {
    if !(vol > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {vol}")));
    }
    if s_min > s_max {
        return Err(Error::Domain("s_min exceeds s_max".into()));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let f = vol.powf(2.0 / n as f64);
    Ok((s_min * f, s_max * f))
}

/// Yamabe constant of a disjoint union:
/// `-(|y1|^{n/2} + |y2|^{n/2})^{2/n}` when both are nonpositive, else
/// `min(y1, y2)`.
pub fn disjoint_union_yamabe(y1: f64, y2: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    if y1 <= 0.0 && y2 <= 0.0 {
        Ok(-(y1.abs().powf(nf / 2.0) + y2.abs().powf(nf / 2.0)).powf(2.0 / nf))
    } else {
        Ok(y1.min(y2))
    }
}

/// Value with a hypothesis flag rather than an error, so derivation chains
/// can report partial validity.
#[derive(Debug, Clone, Serialize)]
pub struct CheckedBound {
    pub value: f64,
    pub valid: bool,
    pub reason: String,
}

/// Lower bound carried through a codimension-q surgery. The hypotheses
/// (3 <= q <= n) are checked, not assumed; invalid inputs yield a flagged,
/// non-asserting result.
pub fn surgery_lower_bound(y0: f64, q: usize, n: usize) -> CheckedBound {
    if q < 3 {
        CheckedBound {
            value: y0,
            valid: false,
            reason: format!("codimension q = {q} violates q >= 3"),
        }
    } else if q > n {
        CheckedBound {
            value: y0,
            valid: false,
            reason: format!("codimension q = {q} exceeds ambient dimension n = {n}"),
        }
    } else {
        CheckedBound { value: y0, valid: true, reason: format!("3 <= q = {q} <= n = {n}"), }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub operation: String,
    pub inputs: Vec<(String, String)>,
    pub output: f64,
    pub valid: bool,
    pub justification: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationChain {
    pub description: String,
    pub steps: Vec<ChainStep>,
    pub value: f64,
    pub all_valid: bool,
}

impl DerivationChain {
    fn push(&mut self, step: ChainStep) {
        self.all_valid &= step.valid;
        self.value = step.output;
        self.steps.push(step);
    }
}

/// Derivation chain for the invariant of `l (S^{n-q+1} x S^{q-1}) # m
/// (reversed copies)` obtained by surgery on spheres and connected sums
/// along fixed points: every value in the chain equals `Lambda_n` while the
/// hypotheses hold.
pub fn section4_examples(n: usize, q: usize, l: usize, m: usize) -> Result<DerivationChain> {
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    let lam = lambda_n(n)?;
    let mut chain = DerivationChain {
        description: format!(
            "invariant of l(S^{}xS^{})#m(reversed), l = {l}, m = {m}, via surgery on two copies of S^{n}",
            n - q + 1,
            q - 1
        ),
        steps: Vec::new(),
        value: lam,
        all_valid: true,
    };

    chain.push(ChainStep {
        operation: "round_sphere_invariant".into(),
        inputs: vec![("n".into(), n.to_string())],
        output: lam,
        valid: true,
        justification:
            "the round metric minimizes its invariant conformal class and the action has fixed \
             points, so the equivariant value equals lambda_n"
                .into(),
    });

    let union = disjoint_union_yamabe(lam, lam, n)?;
    chain.push(ChainStep {
        operation: "disjoint_union_yamabe".into(),
        inputs: vec![("y1".into(), lam.to_string()), ("y2".into(), lam.to_string())],
        output: union,
        valid: true,
        justification: "both values are positive, so the union takes the minimum".into(),
    });

    let surgery = surgery_lower_bound(union, q, n);
    chain.push(ChainStep {
        operation: "surgery_lower_bound".into(),
        inputs: vec![("y0".into(), union.to_string()), ("q".into(), q.to_string())],
        output: surgery.value,
        valid: surgery.valid,
        justification: surgery.reason.clone(),
    });

    let upper = hebey_vaugon_bound(n, OrbitBound::Finite(1))?;
    chain.push(ChainStep {
        operation: "hebey_vaugon_bound".into(),
        inputs: vec![("n".into(), n.to_string()), ("min_orbit".into(), "1".into())],
        output: upper.value,
        valid: true,
        justification: "the action on the surgered product has fixed points, so lambda_n is an \
                        upper bound; combined with the lower bound this forces equality"
            .into(),
    });

    // Connected sums along fixed points: each one is a further surgery of
    // codimension n on the disjoint union with another copy.
    for copy in 0..(l + m) {
        let u = disjoint_union_yamabe(chain.value, lam, n)?;
        let sb = surgery_lower_bound(u, n, n);
        let label = if copy < l { "connected_sum" } else { "connected_sum_reversed" };
        chain.push(ChainStep {
            operation: label.into(),
            inputs: vec![("current".into(), u.to_string())],
            output: if sb.valid { upper.value.min(sb.value.max(u)) } else { sb.value },
            valid: sb.valid,
            justification: format!(
                "connected sum along fixed points is a codimension-{n} surgery; the fixed-point \
                 upper bound pins the value at lambda_n ({})",
                sb.reason
            ),
        });
    }

    Ok(chain)
}
