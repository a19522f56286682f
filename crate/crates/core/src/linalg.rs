//! Small dense linear algebra: coefficient vectors and square matrices.
//!
//! Everything here is sized for desk-scale groups (matrices up to 9×9), so
//! the algorithms favour robustness over asymptotic speed.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Coefficients of an element of ℝᵈ in a fixed basis.
pub type Vector = Vec<f64>;

pub fn zeros(n: usize) -> Vector {
    vec![0.0; n]
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vector {
    a.iter().map(|x| c * x).collect()
}

/// `y += c·x`
pub fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| if x.abs() > m { x.abs() } else { m })
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Cross product in ℝ³.
pub fn cross(a: &[f64], b: &[f64]) -> Vector {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from `n²` row-major entries.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data must have n² entries");
        Self { n, data }
    }

    pub fn from_slice(n: usize, data: &[f64]) -> Self {
        Self::from_vec(n, data.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vector {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        Mat::from_vec(self.n, add(&self.data, &other.data))
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat::from_vec(self.n, sub(&self.data, &other.data))
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat::from_vec(self.n, scale(&self.data, c))
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// `AB − BA`
    pub fn commutator(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm, the largest singular value.
    ///
    /// Computed from the eigenvalues of `AᵀA` by cyclic Jacobi rotations.
    pub fn op_norm(&self) -> f64 {
        let ata = self.transpose().mul(self);
        let top = symmetric_eigenvalues(&ata)
            .into_iter()
            .fold(0.0, f64::max);
        math::sqrt(top.max(0.0))
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    ///
    /// Returns `None` when a pivot falls below `1e-14` relative to the
    /// largest entry.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        let scale_ref = max_abs(&a.data).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a.get(row, col).abs() > a.get(pivot, col).abs() {
                    pivot = row;
                }
            }
            let p = a.get(pivot, col);
            if p.abs() <= 1e-14 * scale_ref || !p.is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let pinv = 1.0 / p;
            for j in 0..n {
                a.data[col * n + j] *= pinv;
                inv.data[col * n + j] *= pinv;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a.get(row, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.data[row * n + j] -= f * a.data[col * n + j];
                    inv.data[row * n + j] -= f * inv.data[col * n + j];
                }
            }
        }
        Some(inv)
    }

    /// Determinant by LU elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a.get(row, col).abs() > a.get(pivot, col).abs() {
                    pivot = row;
                }
            }
            let p = a.get(pivot, col);
            if p == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= p;
            for row in col + 1..n {
                let f = a.get(row, col) / p;
                for j in col..n {
                    a.data[row * n + j] -= f * a.data[col * n + j];
                }
            }
        }
        det
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Mat {
        let n = self.n;
        let nrm = self.norm_1();
        let mut squarings = 0u32;
        if nrm > 0.5 {
            squarings = math::ceil(math::log2(nrm / 0.5)) as u32;
        }
        let b = self.scale(math::powi(2.0, -(squarings as i32)));
        let mut result = Mat::identity(n);
        let mut term = Mat::identity(n);
        for k in 1..=30 {
            term = term.mul(&b).scale(1.0 / k as f64);
            result = result.add(&term);
            if max_abs(&term.data) <= 1e-18 * max_abs(&result.data) {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }

    /// Principal square root by the Denman–Beavers iteration.
    pub fn sqrtm(&self) -> Option<Mat> {
        let mut y = self.clone();
        let mut z = Mat::identity(self.n);
        for _ in 0..60 {
            let y_inv = y.inverse()?;
            let z_inv = z.inverse()?;
            let y_next = y.add(&z_inv).scale(0.5);
            let z_next = z.add(&y_inv).scale(0.5);
            let delta = max_abs(&y_next.sub(&y).data);
            y = y_next;
            z = z_next;
            if delta <= 1e-16 * max_abs(&y.data).max(1.0) {
                return Some(y);
            }
        }
        Some(y)
    }

    /// Principal logarithm by inverse scaling and squaring.
    ///
    /// Square roots are taken until `‖A − I‖₁ ≤ 1/4`, then the Mercator
    /// series is summed and the result scaled back. Returns `None` when a
    /// square root fails (eigenvalues on the closed negative real axis).
    pub fn logm(&self) -> Option<Mat> {
        let n = self.n;
        let id = Mat::identity(n);
        let mut a = self.clone();
        let mut roots = 0i32;
        while a.sub(&id).norm_1() > 0.25 {
            if roots >= 40 {
                return None;
            }
            a = a.sqrtm()?;
            roots += 1;
        }
        let e = a.sub(&id);
        let mut power = e.clone();
        let mut result = e.clone();
        for k in 2..=200 {
            power = power.mul(&e);
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            let term = power.scale(sign / k as f64);
            result = result.add(&term);
            if max_abs(&term.data) <= 1e-18 * max_abs(&result.data).max(1e-300) {
                break;
            }
        }
        Some(result.scale(math::powi(2.0, roots)))
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(m: &Mat) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(i, j))
            .sum();
        let diag: f64 = (0..n).map(|i| a.get(i, i) * a.get(i, i)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n).map(|i| a.get(i, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        max_abs(&a.sub(b).data) <= tol
    }

    #[test]
    fn nilpotent_exponential_is_exact() {
        let x = Mat::from_vec(2, vec![0.0, 1.0, 0.0, 0.0]);
        let e = x.expm();
        assert!(close(&e, &Mat::from_vec(2, vec![1.0, 1.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn rotation_generator_exponential() {
        let theta = 2.5;
        let x = Mat::from_vec(2, vec![0.0, -theta, theta, 0.0]);
        let e = x.expm();
        let expect = Mat::from_vec(
            2,
            vec![
                math::cos(theta),
                -math::sin(theta),
                math::sin(theta),
                math::cos(theta),
            ],
        );
        assert!(close(&e, &expect, 1e-14));
    }

    #[test]
    fn log_inverts_exp_near_identity() {
        let x = Mat::from_vec(3, vec![0.1, -0.2, 0.05, 0.3, -0.1, 0.2, 0.0, 0.15, 0.05]);
        let back = x.expm().logm().unwrap();
        assert!(close(&back, &x, 1e-13));
    }

    #[test]
    fn log_of_large_rotation_uses_square_roots() {
        let theta = 2.0;
        let x = Mat::from_vec(2, vec![0.0, -theta, theta, 0.0]);
        let back = x.expm().logm().unwrap();
        assert!(close(&back, &x, 1e-12));
    }

    #[test]
    fn inverse_and_determinant() {
        let a = Mat::from_vec(3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let inv = a.inverse().unwrap();
        assert!(close(&a.mul(&inv), &Mat::identity(3), 1e-14));
        assert!((a.det() - 18.0).abs() < 1e-12);
        let singular = Mat::from_vec(2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn spectral_norm_of_diagonal_and_rotation() {
        let d = Mat::from_vec(2, vec![3.0, 0.0, 0.0, -5.0]);
        assert!((d.op_norm() - 5.0).abs() < 1e-13);
        let r = Mat::from_vec(2, vec![0.6, -0.8, 0.8, 0.6]);
        assert!((r.op_norm() - 1.0).abs() < 1e-13);
        // rank one: ‖u vᵀ‖ = |u||v|
        let u = [1.0, 2.0, 2.0];
        let v = [0.0, 3.0, 4.0];
        let mut m = Mat::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, u[i] * v[j]);
            }
        }
        assert!((m.op_norm() - 15.0).abs() < 1e-12);
    }
}
