//! Radial interpolation between two metrics agreeing to first order on a
//! submanifold: `g_delta = g + w_delta(r) (g_bar - g)`.

use crate::error::{Error, Result};
use crate::metric::MetricField;
use crate::neck::profiles::InterpolationProfile;

/// Glue `g_bar` (inner) into `g` (outer) across the radial window of the
/// profile. Both metrics must live on the same chart, with the radius
/// `r = |y|` read from the last `q` coordinates. The first-order agreement
/// on W (r = 0) is checked on the innermost sample shells.
pub fn glue_interpolated_metric(
    g: &MetricField,
    g_bar: &MetricField,
    q: usize,
    profile: &InterpolationProfile,
) -> Result<MetricField> {
    let n = g.dim();
    if g_bar.dim() != n {
        return Err(Error::InvalidParameter("metrics live on different charts".into()));
    }
    if q == 0 || q > n {
        return Err(Error::InvalidParameter("invalid normal rank".into()));
    }
    let chart = g.chart().clone();

    // First-order compatibility on W: |g - g_bar| = O(r^2) near r = 0, so
    // comparing values at radius r against C r^2 catches both the value and
    // the first-derivative mismatch (a first-order defect scales like r).
    let m = n - q;
    let mut ga = vec![0.0; n * n];
    let mut gb = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    let mut worst_ratio: f64 = 0.0;
    let mut count = 0usize;
    for flat in 0..chart.len() {
        chart.point(flat, &mut point);
        let r2: f64 = point[m..].iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        if r > 0.35 * profile.delta.max(chart.spacing(m) * 4.0) || r == 0.0 {
            continue;
        }
        g.at_index(flat, &mut ga);
        g_bar.at_index(flat, &mut gb);
        let mut diff: f64 = 0.0;
        for e in 0..n * n {
            diff = diff.max((ga[e] - gb[e]).abs());
        }
        worst_ratio = worst_ratio.max(diff / r);
        count += 1;
    }
    if count > 0 && worst_ratio > 0.5 {
        return Err(Error::IncompatibleJet(format!(
            "sup |g - g_bar| / r = {worst_ratio:.3e} near W; the metrics must agree to first \
             order (O(r^2) difference)"
        )));
    }

    let g_s = g.sampled();
    let gbar_s = g_bar.sampled();
    let mut samples = vec![0.0; chart.len() * n * n];
    for flat in 0..chart.len() {
        chart.point(flat, &mut point);
        let r = point[m..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = profile.value(r);
        g_s.at_index(flat, &mut ga);
        gbar_s.at_index(flat, &mut gb);
        let block = &mut samples[flat * n * n..(flat + 1) * n * n];
        for e in 0..n * n {
            block[e] = ga[e] + w * (gb[e] - ga[e]);
        }
    }
    MetricField::from_samples(chart, format!("glued({}, {})", g.name(), g_bar.name()), samples)
}
