//! Canonical tube metrics and the curvature-correcting conformal factor.
//!
//! In a local trivialization (x, y) of the normal bundle of a submanifold W
//! of codimension q (x on W, y normal, r = |y|), the first-order
//! approximation of the ambient metric is
//!
//!   ghat = (gW_ij(x) - 2 sum_a y^a Pi^a_ij(x)) dx^i dx^j
//!          - sum Gamma^a_ib(x) y^b dx^i dy^a  +  sum dy^a dy^a,
//!
//! with Pi the second fundamental form and Gamma the normal-connection
//! coefficients. The conformal factor
//!
//!   u(x, y) = 1 - r^2 / (2 a q) (s_g|_W - s_ghat|_W),     a = 4(n-1)/(n-2),
//!
//! restores the ambient scalar curvature on W: u = 1 and du = 0 along W, and
//! a Delta u there equals the curvature defect. (The coefficient pairs with
//! the transformation law `s = u^{1-p}(a Delta u + s u)` used throughout.)

use std::sync::Arc;

use crate::chart::{Axis, GridChart};
use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::linalg;
use crate::metric::{MetricData, MetricField};
use crate::quotient::a_coefficient;

pub type TensorOnBase = Arc<dyn Fn(&[f64], usize, usize, usize) -> f64 + Send + Sync>;

pub struct TubeData {
    /// Codimension; the surgery regime needs q >= 3.
    pub q: usize,
    /// Metric on W (closed form required for off-grid evaluation).
    pub g_w: MetricField,
    /// Second fundamental form Pi^a_ij(x); arguments (x, a, i, j). None = 0.
    pub second_fundamental: Option<TensorOnBase>,
    /// Normal connection Gamma^a_ib(x); arguments (x, i, a, b). None = 0.
    pub normal_connection: Option<TensorOnBase>,
    /// Tube radius.
    pub r0: f64,
}

impl TubeData {
    pub fn product(q: usize, g_w: MetricField, r0: f64) -> Self {
        TubeData { q, g_w, second_fundamental: None, normal_connection: None, r0 }
    }

    fn validate(&self) -> Result<()> {
        if self.q < 3 {
            return Err(Error::InvalidParameter(format!(
                "tube codimension must be >= 3, got {}",
                self.q
            )));
        }
        if !(self.r0 > 0.0) {
            return Err(Error::InvalidParameter("tube radius must be positive".into()));
        }
        if !self.g_w.is_closed_form() {
            return Err(Error::InvalidParameter(
                "tube construction needs a closed-form metric on W".into(),
            ));
        }
        // Spot-check Pi symmetry in (i, j).
        if let Some(pi) = &self.second_fundamental {
            let m = self.g_w.dim();
            let mut p = vec![0.0; m];
            for probe in 0..8 {
                for (i, axis) in self.g_w.chart().axes().iter().enumerate() {
                    p[i] = axis.min
                        + (axis.max - axis.min) * (0.1 + 0.8 * probe as f64 / 7.0) * 0.99;
                }
                for a in 0..self.q {
                    for i in 0..m {
                        for j in 0..m {
                            let d = (pi(&p, a, i, j) - pi(&p, a, j, i)).abs();
                            if d > 1e-10 {
                                return Err(Error::InvalidParameter(
                                    "second fundamental form must be symmetric in (i, j)".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build the first-order tube metric on the chart W x [-r0, r0]^q.
///
/// `res_y` is the per-axis resolution of the normal box. Fails when the
/// metric loses positive definiteness inside the tube, reporting the largest
/// radius that still passes.
pub fn canonical_tube_metric(tube: &TubeData, res_y: usize) -> Result<MetricField> {
    tube.validate()?;
    let m = tube.g_w.dim();
    let q = tube.q;
    let n = m + q;
    let mut axes = tube.g_w.chart().axes().to_vec();
    for _ in 0..q {
        axes.push(Axis::closed(-tube.r0, tube.r0, res_y));
    }
    let chart = GridChart::new(axes)?;

    let g_w_fn = match tube.g_w.data() {
        MetricData::ClosedForm(f) => Arc::clone(f),
        MetricData::Sampled(_) => unreachable!("validated closed form"),
    };
    let pi = tube.second_fundamental.clone();
    let conn = tube.normal_connection.clone();
    let field = MetricField::from_fn(chart, "tube", move |p, out| {
        let (x, y) = p.split_at(m);
        out.fill(0.0);
        let mut gw = vec![0.0; m * m];
        g_w_fn(x, &mut gw);
        for i in 0..m {
            for j in 0..m {
                let mut v = gw[i * m + j];
                if let Some(pi) = &pi {
                    for (a, ya) in y.iter().enumerate() {
                        v -= 2.0 * ya * pi(x, a, i, j);
                    }
                }
                out[i * n + j] = v;
            }
        }
        if let Some(conn) = &conn {
            for i in 0..m {
                for a in 0..q {
                    let mut v = 0.0;
                    for (b, yb) in y.iter().enumerate() {
                        v -= conn(x, i, a, b) * yb;
                    }
                    out[i * n + (m + a)] = v;
                    out[(m + a) * n + i] = v;
                }
            }
        }
        for a in 0..q {
            out[(m + a) * n + (m + a)] = 1.0;
        }
    });

    // Positive definiteness inside the ball r <= r0; report the maximal
    // admissible radius on failure.
    let chart = field.chart().clone();
    let mut buf = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    let mut max_ok: f64 = 0.0;
    let mut min_bad = f64::INFINITY;
    for flat in 0..chart.len() {
        chart.point(flat, &mut point);
        let r2: f64 = point[m..].iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        if r > tube.r0 {
            continue;
        }
        field.at_index(flat, &mut buf);
        let eig = linalg::smallest_eigenvalue(&buf, n);
        if eig > 0.0 {
            max_ok = max_ok.max(r);
        } else {
            min_bad = min_bad.min(r);
        }
    }
    if min_bad.is_finite() {
        return Err(Error::TubeRadius {
            requested: tube.r0,
            max_admissible: max_ok.min(min_bad),
        });
    }
    Ok(field)
}

/// The correction factor `u = 1 - r^2 (s_g|_W - s_ghat|_W) / (2 a q)` as a
/// conformal factor on the tube chart. The defect fields are given on W's
/// chart; `n` is the ambient dimension (dim W + q).
pub fn correction_factor(
    tube: &TubeData,
    s_g_on_w: &ScalarField,
    s_ghat_on_w: &ScalarField,
    tube_chart: &GridChart,
) -> Result<ConformalFactor> {
    tube.validate()?;
    let m = tube.g_w.dim();
    let q = tube.q;
    let n = m + q;
    let a = a_coefficient(n)?;
    let coeff = 1.0 / (2.0 * a * q as f64);

    // Worst defect bounds the admissible radius: u > 0 needs
    // r^2 |D| coeff < 1.
    let mut worst = 0.0f64;
    for i in 0..s_g_on_w.values().len() {
        worst = worst.max((s_g_on_w.value(i) - s_ghat_on_w.value(i)).abs());
    }
    if worst * tube.r0 * tube.r0 * coeff >= 1.0 {
        return Err(Error::ShrinkTube { max_admissible: (1.0 / (worst * coeff)).sqrt() });
    }

    let base_chart = tube.g_w.chart().clone();
    let s_g = s_g_on_w.clone();
    let s_hat = s_ghat_on_w.clone();
    let u = ScalarField::from_fn(tube_chart.clone(), move |p| {
        let (x, y) = p.split_at(m);
        let r2: f64 = y.iter().map(|v| v * v).sum();
        // Defect at the base point; sample the W fields (interpolating when
        // x falls between W grid points).
        let defect = if base_chart.dim() == 0 {
            s_g.value(0) - s_hat.value(0)
        } else {
            s_g.sample_at(x) - s_hat.sample_at(x)
        };
        1.0 - r2 * coeff * defect
    });
    ConformalFactor::new(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn circle_metric() -> MetricField {
        let chart =
            GridChart::new(vec![Axis::periodic(0.0, std::f64::consts::TAU, 12)]).unwrap();
        MetricField::from_fn(chart, "s1", |_p, out| out[0] = 1.0)
    }

    #[test]
    fn rejects_low_codimension() {
        let tube = TubeData::product(2, circle_metric(), 0.3);
        assert!(canonical_tube_metric(&tube, 8).is_err());
    }

    #[test]
    fn product_tube_is_flat_product() {
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        let s = crate::curvature::scalar_curvature(&g).unwrap();
        assert!(s.sup_deviation(0.0) < 1e-9, "totally geodesic flat tube is flat");
    }

    #[test]
    fn tube_restricts_to_base_metric() {
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        // y = 0 row: metric block on W is gW exactly.
        let chart = g.chart().clone();
        let mid = 4; // y index at 0 for res 9 on [-r0, r0]
        let flat = chart.flat_index(&[3, mid, mid, mid]);
        let mut buf = [0.0; 16];
        g.at_index(flat, &mut buf);
        assert_eq!(buf[0], 1.0);
    }

    #[test]
    fn oversized_curvature_reports_tube_radius() {
        // A strong second fundamental form makes the W-block vanish at
        // moderate radius: gxx = 1 - 2 y Pi.
        let tube = TubeData {
            q: 3,
            g_w: circle_metric(),
            second_fundamental: Some(Arc::new(|_x: &[f64], a, _i, _j| if a == 0 { 2.0 } else { 0.0 })),
            normal_connection: None,
            r0: 1.0,
        };
        match canonical_tube_metric(&tube, 11) {
            Err(Error::TubeRadius { max_admissible, .. }) => {
                assert!(max_admissible < 1.0 && max_admissible > 0.0);
            }
            other => panic!("expected tube-radius error, got {:?}", other.map(|m| m.name().to_string())),
        }
    }

    #[test]
    fn correction_factor_is_one_on_w_with_zero_normal_gradient() {
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        let w_chart = tube.g_w.chart().clone();
        let s_g = ScalarField::constant(w_chart.clone(), 12.0);
        let s_hat = ScalarField::constant(w_chart, 0.0);
        let u = correction_factor(&tube, &s_g, &s_hat, g.chart()).unwrap();
        // On W (y = 0): u = 1; first normal derivative vanishes.
        let chart = g.chart().clone();
        let mid = 4;
        let flat = chart.flat_index(&[2, mid, mid, mid]);
        assert!((u.field().value(flat) - 1.0).abs() < 1e-14);
        let h = chart.spacing(1);
        let up = u.field().value(chart.flat_index(&[2, mid + 1, mid, mid]));
        let um = u.field().value(chart.flat_index(&[2, mid - 1, mid, mid]));
        assert!(((up - um) / (2.0 * h)).abs() < 1e-12);
        // And u dips quadratically off W.
        assert!(up < 1.0);
    }

    #[test]
    fn correction_factor_shrink_tube_error() {
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        let w_chart = tube.g_w.chart().clone();
        let s_g = ScalarField::constant(w_chart.clone(), 1e4);
        let s_hat = ScalarField::constant(w_chart, 0.0);
        match correction_factor(&tube, &s_g, &s_hat, g.chart()) {
            Err(Error::ShrinkTube { max_admissible }) => assert!(max_admissible < 0.4),
            other => panic!("expected shrink-tube error, got ok={}", other.is_ok()),
        }
    }

    #[test]
    fn trivial_defect_gives_unit_factor() {
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        let w_chart = tube.g_w.chart().clone();
        let s = ScalarField::constant(w_chart, 5.0);
        let u = correction_factor(&tube, &s, &s, g.chart()).unwrap();
        for flat in 0..g.chart().len() {
            assert_eq!(u.field().value(flat), 1.0);
        }
    }

    #[test]
    fn product_model_keeps_warp_positive() {
        // Sanity: the product tube at radius 0.4 validates.
        let tube = TubeData::product(3, circle_metric(), 0.4);
        let g = canonical_tube_metric(&tube, 9).unwrap();
        assert!(g.validate().is_ok());
        let _ = models::flat_torus(&[1.0], &[4]).unwrap();
    }
}
