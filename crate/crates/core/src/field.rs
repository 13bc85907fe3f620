//! Scalar fields sampled on a chart.

use crate::chart::GridChart;
use crate::error::{Error, Result};
use crate::linalg::CompensatedSum;

#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: GridChart,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(chart: GridChart, values: Vec<f64>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::InvalidParameter(format!(
                "field length {} does not match chart size {}",
                values.len(),
                chart.len()
            )));
        }
        Ok(ScalarField { chart, values })
    }

    pub fn from_fn(chart: GridChart, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = Vec::with_capacity(chart.len());
        let mut p = vec![0.0; chart.dim()];
        for flat in 0..chart.len() {
            chart.point(flat, &mut p);
            values.push(f(&p));
        }
        ScalarField { chart, values }
    }

    pub fn constant(chart: GridChart, c: f64) -> Self {
        let len = chart.len();
        ScalarField { chart, values: vec![c; len] }
    }

    pub fn chart(&self) -> &GridChart {
        &self.chart
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    /// Map values in place.
    pub fn map(mut self, f: impl Fn(f64) -> f64) -> Self {
        for v in &mut self.values {
            *v = f(*v);
        }
        self
    }

    /// Statistics over valid (interior, non-banded) points. NaN values are
    /// skipped; they mark points where a derived field is undefined.
    pub fn stats(&self) -> FieldStats {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = CompensatedSum::new();
        let mut count = 0usize;
        self.chart.for_each(|flat, multi| {
            if !self.chart.is_valid(multi) {
                return;
            }
            let v = self.values[flat];
            if v.is_nan() {
                return;
            }
            min = min.min(v);
            max = max.max(v);
            sum.add(v);
            count += 1;
        });
        FieldStats { min, max, mean: if count > 0 { sum.value() / count as f64 } else { f64::NAN }, count }
    }

    /// Sup-norm deviation from a constant over valid points.
    pub fn sup_deviation(&self, c: f64) -> f64 {
        let mut sup: f64 = 0.0;
        self.chart.for_each(|flat, multi| {
            if self.chart.is_valid(multi) && !self.values[flat].is_nan() {
                sup = sup.max((self.values[flat] - c).abs());
            }
        });
        sup
    }

    /// Tensor-product Catmull-Rom interpolation. Periodic axes wrap; on
    /// closed axes the stencil is clamped to the boundary.
    pub fn sample_at(&self, point: &[f64]) -> f64 {
        let n = self.chart.dim();
        debug_assert_eq!(point.len(), n);
        // Per-axis stencil indices and local coordinate.
        let mut stencils: Vec<[usize; 4]> = Vec::with_capacity(n);
        let mut locals: Vec<f64> = Vec::with_capacity(n);
        for (i, axis) in self.chart.axes().iter().enumerate() {
            let h = axis.spacing();
            let mut u = (point[i] - axis.min) / h;
            let res = axis.res as isize;
            if axis.periodic {
                u = u.rem_euclid(res as f64);
            }
            let k0 = u.floor() as isize;
            let frac = u - k0 as f64;
            let clamp = |k: isize| -> usize {
                if axis.periodic {
                    k.rem_euclid(res) as usize
                } else {
                    k.clamp(0, res - 1) as usize
                }
            };
            stencils.push([clamp(k0 - 1), clamp(k0), clamp(k0 + 1), clamp(k0 + 2)]);
            locals.push(frac);
        }
        self.interp_rec(0, &stencils, &locals, &mut vec![0usize; n])
    }

    fn interp_rec(&self, axis: usize, stencils: &[[usize; 4]], locals: &[f64], multi: &mut Vec<usize>) -> f64 {
        let mut vals = [0.0f64; 4];
        for (j, &k) in stencils[axis].iter().enumerate() {
            multi[axis] = k;
            vals[j] = if axis + 1 == stencils.len() {
                self.values[self.chart.flat_index(multi)]
            } else {
                self.interp_rec(axis + 1, stencils, locals, multi)
            };
        }
        catmull_rom(vals, locals[axis])
    }
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let [p0, p1, p2, p3] = p;
    0.5 * ((2.0 * p1)
        + (-p0 + p2) * t
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t)
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}
