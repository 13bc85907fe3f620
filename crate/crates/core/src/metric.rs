//! Riemannian metrics on charts.
//!
//! A `MetricField` stores the metric either as samples at grid points or as a
//! closed-form evaluator. Finite-difference machinery treats both uniformly:
//! sampled data is read at neighboring grid points, closed forms are evaluated
//! at the offset coordinates directly.

use std::fmt;
use std::sync::Arc;

use crate::chart::GridChart;
use crate::error::{Error, Result};
use crate::linalg;

pub type MetricFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub enum MetricData {
    /// Row-major `n*n` block per grid point.
    Sampled(Arc<Vec<f64>>),
    /// Evaluator filling a row-major `n*n` buffer at an arbitrary point.
    ClosedForm(MetricFn),
}

#[derive(Clone)]
pub struct MetricField {
    chart: GridChart,
    data: MetricData,
    name: String,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("name", &self.name)
            .field("dim", &self.chart.dim())
            .field("points", &self.chart.len())
            .field(
                "data",
                &match self.data {
                    MetricData::Sampled(_) => "sampled",
                    MetricData::ClosedForm(_) => "closed-form",
                },
            )
            .finish()
    }
}

impl MetricField {
    pub fn from_fn(
        chart: GridChart,
        name: impl Into<String>,
        f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        MetricField { chart, data: MetricData::ClosedForm(Arc::new(f)), name: name.into() }
    }

    pub fn from_samples(chart: GridChart, name: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        let n = chart.dim();
        if samples.len() != chart.len() * n * n {
            return Err(Error::InvalidParameter(format!(
                "sample buffer length {} does not match {} points x {}x{}",
                samples.len(),
                chart.len(),
                n,
                n
            )));
        }
        Ok(MetricField { chart, data: MetricData::Sampled(Arc::new(samples)), name: name.into() })
    }

    pub fn chart(&self) -> &GridChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn data(&self) -> &MetricData {
        &self.data
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.data, MetricData::ClosedForm(_))
    }

    /// Metric matrix at a grid point (flat index), written into `out`.
    pub fn at_index(&self, flat: usize, out: &mut [f64]) {
        let n = self.dim();
        match &self.data {
            MetricData::Sampled(v) => out.copy_from_slice(&v[flat * n * n..(flat + 1) * n * n]),
            MetricData::ClosedForm(f) => {
                let mut p = vec![0.0; n];
                self.chart.point(flat, &mut p);
                f(&p, out);
            }
        }
    }

    /// Metric matrix at an arbitrary point. Closed forms only.
    pub fn at_point(&self, point: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.data {
            MetricData::ClosedForm(f) => {
                f(point, out);
                Ok(())
            }
            MetricData::Sampled(_) => Err(Error::InvalidParameter(
                "off-grid evaluation requires a closed-form metric".into(),
            )),
        }
    }

    /// Materialize onto the grid (no-op copy semantics for sampled data).
    pub fn sampled(&self) -> MetricField {
        let n = self.dim();
        match &self.data {
            MetricData::Sampled(_) => self.clone(),
            MetricData::ClosedForm(f) => {
                let mut samples = vec![0.0; self.chart.len() * n * n];
                let mut p = vec![0.0; n];
                for flat in 0..self.chart.len() {
                    self.chart.point(flat, &mut p);
                    f(&p, &mut samples[flat * n * n..(flat + 1) * n * n]);
                }
                MetricField {
                    chart: self.chart.clone(),
                    data: MetricData::Sampled(Arc::new(samples)),
                    name: self.name.clone(),
                }
            }
        }
    }

    /// Pointwise rescale by a sampled positive factor, producing a sampled field.
    pub fn scaled_pointwise(&self, factor: &[f64], name: impl Into<String>) -> Result<MetricField> {
        if factor.len() != self.chart.len() {
            return Err(Error::InvalidParameter("factor length mismatch".into()));
        }
        let n = self.dim();
        let base = self.sampled();
        let MetricData::Sampled(samples) = &base.data else { unreachable!() };
        let mut out = samples.as_ref().clone();
        for (flat, f) in factor.iter().enumerate() {
            for e in &mut out[flat * n * n..(flat + 1) * n * n] {
                *e *= f;
            }
        }
        MetricField::from_samples(self.chart.clone(), name, out)
    }

    /// Check symmetry (relative tolerance 1e-12) and positive definiteness at
    /// every non-banded sample point.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        let mut multi = vec![0usize; n];
        for flat in 0..self.chart.len() {
            self.chart.multi_index(flat, &mut multi);
            if self.chart.in_band(&multi) {
                continue;
            }
            self.at_index(flat, &mut g);
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            for i in 0..n {
                for j in i + 1..n {
                    let asym = (g[i * n + j] - g[j * n + i]).abs() / scale;
                    if asym > 1e-12 {
                        return Err(Error::NonSymmetricMetric { index: flat, asymmetry: asym });
                    }
                }
            }
            // Boundary rows of closed axes may be genuinely singular (sphere
            // poles); they are excluded from curvature anyway.
            if !self.chart.is_interior(&multi, 0) {
                continue;
            }
            let eig = linalg::smallest_eigenvalue(&g, n);
            if !(eig > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    point: self.chart.point_vec(flat),
                    eigenvalue: eig,
                });
            }
        }
        Ok(())
    }
}
