//! Tensor-product coordinate charts.
//!
//! A chart is a box `[min, max]^n` sampled on a uniform grid, axis by axis.
//! Axes may be periodic (the right endpoint is identified with the left) and
//! may carry an exclusion band near each end, used to keep checks and
//! quadrature away from coordinate singularities such as sphere poles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    /// Number of sample points. For periodic axes the right endpoint is not
    /// stored; spacing is `(max - min) / res`.
    pub res: usize,
    pub periodic: bool,
    /// Width of the excluded margin at each end (coordinate units). Ignored
    /// for periodic axes.
    pub band: f64,
}

impl Axis {
    pub fn closed(min: f64, max: f64, res: usize) -> Self {
        Axis { min, max, res, periodic: false, band: 0.0 }
    }

    pub fn closed_banded(min: f64, max: f64, res: usize, band: f64) -> Self {
        Axis { min, max, res, periodic: false, band }
    }

    pub fn periodic(min: f64, max: f64, res: usize) -> Self {
        Axis { min, max, res, periodic: true, band: 0.0 }
    }

    pub fn spacing(&self) -> f64 {
        let len = self.max - self.min;
        if self.periodic {
            len / self.res as f64
        } else {
            len / (self.res - 1) as f64
        }
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.min + self.spacing() * k as f64
    }

    fn validate(&self) -> Result<()> {
        if self.res < 4 {
            return Err(Error::InvalidChart(format!("axis resolution {} < 4", self.res)));
        }
        if !(self.max > self.min) {
            return Err(Error::InvalidChart(format!(
                "axis bounds [{}, {}] have non-positive length",
                self.min, self.max
            )));
        }
        if self.band < 0.0 {
            return Err(Error::InvalidChart("negative exclusion band".into()));
        }
        if !self.periodic && 2.0 * self.band >= self.max - self.min {
            return Err(Error::InvalidChart(
                "exclusion bands must lie strictly inside the axis bounds".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridChart {
    axes: Vec<Axis>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl<'de> Deserialize<'de> for GridChart {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            axes: Vec<Axis>,
        }
        let raw = Raw::deserialize(deserializer)?;
        GridChart::new(raw.axes).map_err(serde::de::Error::custom)
    }
}

impl GridChart {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidChart("chart needs at least one axis".into()));
        }
        for axis in &axes {
            axis.validate()?;
        }
        let strides = Self::compute_strides(&axes);
        Ok(GridChart { axes, strides })
    }

    fn compute_strides(axes: &[Axis]) -> Vec<usize> {
        // Row-major: last axis varies fastest.
        let n = axes.len();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].res;
        }
        strides
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.res).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, i: usize) -> f64 {
        self.axes[i].spacing()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn multi_index(&self, flat: usize, out: &mut [usize]) {
        let mut rem = flat;
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = rem / s;
            rem %= s;
        }
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = self.axes[i].coord(rem / s);
            rem %= s;
        }
    }

    pub fn point_vec(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point(flat, &mut p);
        p
    }

    /// Flat index of the neighbor shifted by `step` along `axis`, wrapping on
    /// periodic axes. `None` when the step leaves a non-periodic axis.
    pub fn neighbor(&self, multi: &[usize], axis: usize, step: isize) -> Option<usize> {
        let res = self.axes[axis].res as isize;
        let mut k = multi[axis] as isize + step;
        if self.axes[axis].periodic {
            k = k.rem_euclid(res);
        } else if k < 0 || k >= res {
            return None;
        }
        let mut flat = 0;
        for (i, (m, s)) in multi.iter().zip(&self.strides).enumerate() {
            flat += if i == axis { k as usize * s } else { m * s };
        }
        Some(flat)
    }

    /// Whether FD stencils of half-width `width` fit at this multi-index.
    pub fn is_interior(&self, multi: &[usize], width: usize) -> bool {
        multi.iter().zip(&self.axes).all(|(&k, a)| {
            a.periodic || (k >= width && k + width < a.res)
        })
    }

    /// Whether the point lies inside an exclusion band.
    pub fn in_band(&self, multi: &[usize]) -> bool {
        multi.iter().zip(&self.axes).any(|(&k, a)| {
            if a.periodic || a.band == 0.0 {
                return false;
            }
            let x = a.coord(k);
            x < a.min + a.band || x > a.max - a.band
        })
    }

    /// Points where curvature is evaluated: FD stencil fits and not banded.
    pub fn is_valid(&self, multi: &[usize]) -> bool {
        self.is_interior(multi, 1) && !self.in_band(multi)
    }

    /// Trapezoid quadrature weight of the point; zero inside exclusion bands.
    pub fn quad_weight(&self, multi: &[usize]) -> f64 {
        if self.in_band(multi) {
            return 0.0;
        }
        let mut w = 1.0;
        for (&k, a) in multi.iter().zip(&self.axes) {
            let h = a.spacing();
            w *= if !a.periodic && (k == 0 || k == a.res - 1) { 0.5 * h } else { h };
        }
        w
    }

    /// Iterate over all multi-indices in flat order.
    pub fn iter(&self) -> MultiIndexIter<'_> {
        MultiIndexIter { chart: self, flat: 0, multi: vec![0; self.dim()], total: self.len() }
    }

    /// Allocation-free visit of every grid point in flat order.
    pub fn for_each(&self, mut body: impl FnMut(usize, &[usize])) {
        let mut multi = vec![0usize; self.dim()];
        for flat in 0..self.len() {
            self.multi_index(flat, &mut multi);
            body(flat, &multi);
        }
    }
}

pub struct MultiIndexIter<'a> {
    chart: &'a GridChart,
    flat: usize,
    multi: Vec<usize>,
    total: usize,
}

impl<'a> Iterator for MultiIndexIter<'a> {
    // (flat index, multi index)
    type Item = (usize, Vec<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.total {
            return None;
        }
        self.chart.multi_index(self.flat, &mut self.multi);
        let item = (self.flat, self.multi.clone());
        self.flat += 1;
        Some(item)
    }
}
