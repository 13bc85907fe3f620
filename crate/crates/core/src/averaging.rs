//! Group averaging of test functions over a sampled action by chart
//! isometries.
//!
//! An action is supplied as a finite quadrature of isometries; for a circle
//! action these are N uniform translations along a periodic axis. Every
//! element is verified to be an isometry of the metric (pullback mismatch)
//! before averaging.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::metric::MetricField;

/// One sampled isometry: a translation along each listed axis.
#[derive(Debug, Clone)]
pub struct ChartShift {
    pub shifts: Vec<(usize, f64)>,
}

impl ChartShift {
    pub fn apply(&self, point: &mut [f64]) {
        for &(axis, offset) in &self.shifts {
            point[axis] += offset;
        }
    }
}

/// A finite quadrature of a compact group action.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub elements: Vec<ChartShift>,
}

impl GroupAction {
    /// Uniform N-point quadrature of a circle action rotating a periodic
    /// axis.
    pub fn circle(axis: usize, period: f64, samples: usize) -> Self {
        let elements = (0..samples)
            .map(|k| ChartShift { shifts: vec![(axis, period * k as f64 / samples as f64)] })
            .collect();
        GroupAction { elements }
    }
}

/// Average `phi` over the sampled action: `phi_bar(x) = mean phi(g_k x)`.
///
/// Values are interpolated on the chart (tensor-product Catmull-Rom). Fails
/// with an invalid-action error when some element moves the metric by more
/// than `1e-8` relative.
pub fn group_average(
    g: &MetricField,
    phi: &ScalarField,
    action: &GroupAction,
) -> Result<ScalarField> {
    let chart = g.chart();
    let n = chart.dim();
    // Isometry check: compare g at x with g at shifted x on a subsample of
    // valid points (translations have identity Jacobian, so the pullback is
    // plain evaluation).
    let g_s = g.sampled();
    // Sampled metrics get componentwise interpolating views, built once.
    let component_views: Option<Vec<ScalarField>> = if g.is_closed_form() {
        None
    } else {
        let mut buf = vec![0.0; n * n];
        let mut comps = vec![Vec::with_capacity(chart.len()); n * n];
        for flat in 0..chart.len() {
            g_s.at_index(flat, &mut buf);
            for (c, v) in buf.iter().enumerate() {
                comps[c].push(*v);
            }
        }
        Some(
            comps
                .into_iter()
                .map(|vals| ScalarField::from_values(chart.clone(), vals).expect("length matches"))
                .collect(),
        )
    };
    let mut base = vec![0.0; n * n];
    let mut moved = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    let stride = (chart.len() / 512).max(1);
    for (ei, elem) in action.elements.iter().enumerate() {
        let mut worst: f64 = 0.0;
        let mut flat = 0;
        while flat < chart.len() {
            g_s.at_index(flat, &mut base);
            chart.point(flat, &mut point);
            elem.apply(&mut point);
            match (&component_views, g.at_point(&point, &mut moved)) {
                (_, Ok(())) => {}
                (Some(views), Err(_)) => {
                    for (c, view) in views.iter().enumerate() {
                        moved[c] = view.sample_at(&point);
                    }
                }
                (None, Err(e)) => return Err(e),
            }
            let scale = base.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            for e in 0..n * n {
                worst = worst.max((base[e] - moved[e]).abs() / scale);
            }
            flat += stride;
        }
        if worst > 1e-6 {
            return Err(Error::InvalidAction { element: ei, mismatch: worst });
        }
    }

    let mut out = ScalarField::constant(chart.clone(), 0.0);
    let inv = 1.0 / action.elements.len() as f64;
    let mut p = vec![0.0; n];
    for flat in 0..chart.len() {
        let mut acc = 0.0;
        for elem in &action.elements {
            chart.point(flat, &mut p);
            elem.apply(&mut p);
            acc += phi.sample_at(&p);
        }
        out.values_mut()[flat] = acc * inv;
    }
    Ok(out)
}
