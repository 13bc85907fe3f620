//! Small dense helpers for the pointwise curvature kernel.
//!
//! Chart dimensions are tiny (n <= 6), so a pivoted Gauss-Jordan inverse and a
//! Jacobi eigenvalue sweep beat general-purpose machinery in the hot loop.

/// In-place inverse of the n x n matrix stored row-major in `a`, using
/// `scratch` (same length) as the augmented identity. Returns false when a
/// pivot falls below `tol` times the largest initial entry.
pub fn invert(a: &mut [f64], scratch: &mut [f64], n: usize, tol: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    scratch.fill(0.0);
    for i in 0..n {
        scratch[i * n + i] = 1.0;
    }
    for col in 0..n {
        // Partial pivot.
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < tol * scale {
            return false;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
                scratch.swap(col * n + j, pivot_row * n + j);
            }
        }
        let inv_p = 1.0 / a[col * n + col];
        for j in 0..n {
            a[col * n + j] *= inv_p;
            scratch[col * n + j] *= inv_p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[row * n + j] -= f * a[col * n + j];
                scratch[row * n + j] -= f * scratch[col * n + j];
            }
        }
    }
    a.copy_from_slice(scratch);
    true
}

/// Determinant of the n x n matrix in `a` (copied into `scratch`), by LU with
/// partial pivoting.
pub fn determinant(a: &[f64], scratch: &mut [f64], n: usize) -> f64 {
    scratch.copy_from_slice(a);
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = scratch[col * n + col].abs();
        for row in col + 1..n {
            let v = scratch[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in col..n {
                scratch.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let p = scratch[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = scratch[row * n + col] / p;
            for j in col..n {
                scratch[row * n + j] -= f * scratch[col * n + j];
            }
        }
    }
    det
}

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi sweeps.
pub fn smallest_eigenvalue(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    for _sweep in 0..40 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q].abs();
            }
        }
        if off < 1e-14 * (1.0 + m.iter().fold(0.0f64, |s, v| s.max(v.abs()))) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).fold(f64::INFINITY, f64::min)
}

/// Neumaier compensated sum; fixed evaluation order makes integral reductions
/// independent of scheduling.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_3x3() {
        let mut a = vec![2.0, 0.0, 1.0, 0.0, 3.0, 0.0, 1.0, 0.0, 1.0];
        let orig = a.clone();
        let mut scratch = vec![0.0; 9];
        assert!(invert(&mut a, &mut scratch, 3, 1e-13));
        // a * orig = I
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for k in 0..3 {
                    v += a[i * 3 + k] * orig[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invert_detects_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut scratch = vec![0.0; 4];
        assert!(!invert(&mut a, &mut scratch, 2, 1e-13));
    }

    #[test]
    fn det_and_eigen() {
        let a = vec![4.0, 1.0, 1.0, 3.0];
        let mut scratch = vec![0.0; 4];
        assert!((determinant(&a, &mut scratch, 2) - 11.0).abs() < 1e-12);
        // Eigenvalues of [[4,1],[1,3]]: (7 +- sqrt(5))/2.
        let lo = smallest_eigenvalue(&a, 2);
        assert!((lo - (7.0 - 5.0f64.sqrt()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let mut s = CompensatedSum::new();
        for _ in 0..1_000_000 {
            s.add(0.1);
        }
        assert!((s.value() - 100_000.0).abs() < 1e-6);
    }
}
