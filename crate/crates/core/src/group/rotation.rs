//! Closed forms for rotations (`so3`, 3×3 row-major) and unit quaternions
//! (`su2`, `(w, x, y, z)`).

use alloc::vec;

use crate::linalg::{self, Mat, Vector};
use crate::math;

pub fn hat(x: &[f64]) -> Mat {
    Mat::from_vec(3, vec![0.0, -x[2], x[1], x[2], 0.0, -x[0], -x[1], x[0], 0.0])
}

/// Coordinates of the antisymmetric part of `m`.
pub fn vee(m: &Mat) -> Vector {
    vec![
        0.5 * (m.get(2, 1) - m.get(1, 2)),
        0.5 * (m.get(0, 2) - m.get(2, 0)),
        0.5 * (m.get(1, 0) - m.get(0, 1)),
    ]
}

/// Rodrigues formula.
pub fn rotation_exp(x: &[f64]) -> Mat {
    let th2 = linalg::dot(x, x);
    let th = math::sqrt(th2);
    let (a, b) = if th < 1e-4 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        (math::sin(th) / th, (1.0 - math::cos(th)) / th2)
    };
    let k = hat(x);
    Mat::identity(3).add(&k.scale(a)).add(&k.mul(&k).scale(b))
}

/// Rotation angle in `[0, π]`.
pub fn rotation_angle(r: &Mat) -> f64 {
    let v = vee(r);
    let s = linalg::norm(&v);
    let c = 0.5 * (r.trace() - 1.0);
    math::atan2(s, c)
}

/// Axis-angle coordinates of a rotation with angle `< π`.
pub fn rotation_log(r: &Mat) -> Vector {
    let v = vee(r);
    let s = linalg::norm(&v);
    let c = 0.5 * (r.trace() - 1.0);
    let th = math::atan2(s, c);
    if th < 1e-4 {
        let th2 = th * th;
        return linalg::scale(&v, 1.0 + th2 / 6.0 + 7.0 * th2 * th2 / 360.0);
    }
    if th < 3.0 {
        return linalg::scale(&v, th / s);
    }
    // Near π: axis from the symmetric part, sign from the antisymmetric one.
    let sym = r.add(&r.transpose()).scale(0.5).sub(&Mat::identity(3).scale(c));
    let k = (0..3)
        .max_by(|&i, &j| sym.get(i, i).total_cmp(&sym.get(j, j)))
        .unwrap_or(0);
    let mut axis: Vector = (0..3).map(|i| sym.get(i, k)).collect();
    let n = linalg::norm(&axis);
    axis = linalg::scale(&axis, 1.0 / n);
    if linalg::dot(&axis, &v) < 0.0 {
        axis = linalg::scale(&axis, -1.0);
    }
    linalg::scale(&axis, th)
}

pub fn quat_mul(p: &[f64], q: &[f64]) -> Vector {
    vec![
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

pub fn quat_inv(q: &[f64]) -> Vector {
    let n2 = linalg::dot(q, q);
    vec![q[0] / n2, -q[1] / n2, -q[2] / n2, -q[3] / n2]
}

/// `(cos θ/2, sin θ/2 · u)` for `X = θu`.
pub fn quat_exp(x: &[f64]) -> Vector {
    let th = linalg::norm(x);
    let half = 0.5 * th;
    let s = if th < 1e-8 {
        0.5 - th * th / 48.0
    } else {
        math::sin(half) / th
    };
    vec![math::cos(half), s * x[0], s * x[1], s * x[2]]
}

/// Angle `θ ∈ [0, 2π]` of a unit quaternion.
pub fn quat_angle(q: &[f64]) -> f64 {
    2.0 * math::atan2(linalg::norm(&q[1..]), q[0])
}

pub fn quat_log(q: &[f64]) -> Vector {
    let s = linalg::norm(&q[1..]);
    let th = 2.0 * math::atan2(s, q[0]);
    let f = if s < 1e-8 {
        // θ/s → 2/w for small s
        2.0 / q[0]
    } else {
        th / s
    };
    vec![f * q[1], f * q[2], f * q[3]]
}

/// Rotation matrix of the conjugation `v ↦ q v q⁻¹`.
pub fn quat_rotation(q: &[f64]) -> Mat {
    let n2 = linalg::dot(q, q);
    let (w, x, y, z) = (q[0] / math::sqrt(n2), q[1] / math::sqrt(n2), q[2] / math::sqrt(n2), q[3] / math::sqrt(n2));
    Mat::from_vec(
        3,
        vec![
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    )
}

/// Pure quaternion `(0, X/2)` of an algebra element.
pub fn quat_of_algebra(x: &[f64]) -> Vector {
    vec![0.0, 0.5 * x[0], 0.5 * x[1], 0.5 * x[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turn_about_z() {
        let x = [0.0, 0.0, core::f64::consts::FRAC_PI_2];
        let r = rotation_exp(&x);
        let expect = Mat::from_vec(3, vec![0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(r.sub(&expect).frobenius() < 1e-15);
        let back = rotation_log(&r);
        assert!(linalg::max_abs(&linalg::sub(&back, &x)) < 1e-15);
    }

    #[test]
    fn log_near_half_turn() {
        let x = [0.0, 3.1, 0.5];
        let x = linalg::scale(&x, (core::f64::consts::PI - 1e-3) / linalg::norm(&x));
        let back = rotation_log(&rotation_exp(&x));
        assert!(linalg::max_abs(&linalg::sub(&back, &x)) < 1e-10);
    }

    #[test]
    fn quaternion_rotation_matches_rodrigues() {
        let x = [0.3, -1.1, 0.7];
        let r1 = quat_rotation(&quat_exp(&x));
        let r2 = rotation_exp(&x);
        assert!(r1.sub(&r2).frobenius() < 1e-14);
        let back = quat_log(&quat_exp(&x));
        assert!(linalg::max_abs(&linalg::sub(&back, &x)) < 1e-14);
    }
}
