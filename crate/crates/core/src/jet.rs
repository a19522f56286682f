//! Truncated Taylor arithmetic for exact higher derivatives.
//!
//! A [`Jet`] of order `k` at a point `t₀` stores the normalized Taylor
//! coefficients `f⁽ʲ⁾(t₀)/j!` for `j ≤ k`. Products, reciprocals,
//! exponentials and compositions propagate all of them at once, which is
//! how bump functions, reparameterized curves and mollifiers get their
//! derivatives without finite differences.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, Vector};
use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The identity function `t ↦ t` expanded at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Self::constant(t0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    /// Builds a jet from plain derivatives `f, f', f'', …`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| d / math::factorial(k))
            .collect();
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * math::factorial(k)
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.derivative(k)).collect()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            coeffs: linalg::add(&self.coeffs, &other.coeffs),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet {
            coeffs: linalg::sub(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            coeffs: linalg::scale(&self.coeffs, c),
        }
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let k = self.order();
        let mut coeffs = vec![0.0; k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Jet { coeffs }
    }

    pub fn recip(&self) -> Jet {
        let k = self.order();
        let a0 = self.coeffs[0];
        let mut b = vec![0.0; k + 1];
        b[0] = 1.0 / a0;
        for n in 1..=k {
            let s: f64 = (1..=n).map(|j| self.coeffs[j] * b[n - j]).sum();
            b[n] = -s / a0;
        }
        Jet { coeffs: b }
    }

    pub fn exp(&self) -> Jet {
        let k = self.order();
        let mut e = vec![0.0; k + 1];
        e[0] = math::exp(self.coeffs[0]);
        if e[0] == 0.0 {
            return Jet { coeffs: e };
        }
        for n in 1..=k {
            let s: f64 = (1..=n)
                .map(|j| j as f64 * self.coeffs[j] * e[n - j])
                .sum();
            e[n] = s / n as f64;
        }
        Jet { coeffs: e }
    }

    /// Powers `δ⁰, δ¹, …, δᵏ` of the jet with its constant term removed.
    fn centered_powers(&self) -> Vec<Jet> {
        let k = self.order();
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut powers = Vec::with_capacity(k + 1);
        powers.push(Jet::constant(1.0, k));
        for j in 1..=k {
            let next = powers[j - 1].mul(&delta);
            powers.push(next);
        }
        powers
    }

    /// `g ∘ self` given the derivatives `g⁽ʲ⁾(self.value())` for `j ≤ order`.
    pub fn compose(&self, outer: &[f64]) -> Jet {
        let k = self.order();
        let powers = self.centered_powers();
        let mut coeffs = vec![0.0; k + 1];
        for (j, p) in powers.iter().enumerate().take(outer.len().min(k + 1)) {
            let c = outer[j] / math::factorial(j);
            for (n, v) in p.coeffs.iter().enumerate() {
                coeffs[n] += c * v;
            }
        }
        Jet { coeffs }
    }
}

/// Derivatives of `φ ∘ ϱ` where `outer[j] = φ⁽ʲ⁾(ϱ(t))` and `inner` is the
/// jet of `ϱ` at `t`. Returns plain derivatives of orders `0..=inner.order()`.
pub fn compose_vector(outer: &[Vector], inner: &Jet) -> Vec<Vector> {
    let k = inner.order();
    let dim = outer[0].len();
    let powers = inner.centered_powers();
    let mut taylor = vec![linalg::zeros(dim); k + 1];
    for (j, p) in powers.iter().enumerate().take(outer.len().min(k + 1)) {
        let fj = 1.0 / math::factorial(j);
        for (n, v) in p.coeffs.iter().enumerate() {
            if *v != 0.0 {
                linalg::axpy(&mut taylor[n], fj * v, &outer[j]);
            }
        }
    }
    taylor
        .into_iter()
        .enumerate()
        .map(|(n, c)| linalg::scale(&c, math::factorial(n)))
        .collect()
}

/// Leibniz rule: derivatives of `a(t)·v(t)` for a scalar jet `a` and the
/// plain derivatives `v[j] = v⁽ʲ⁾(t)`.
pub fn scalar_times_vector(a: &Jet, v: &[Vector]) -> Vec<Vector> {
    let k = a.order().min(v.len() - 1);
    let dim = v[0].len();
    let ad = a.derivatives();
    (0..=k)
        .map(|n| {
            let mut out = linalg::zeros(dim);
            let mut binom = 1.0;
            for j in 0..=n {
                linalg::axpy(&mut out, binom * ad[j], &v[n - j]);
                binom = binom * (n - j) as f64 / (j + 1) as f64;
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_sine_matches_closed_form_derivatives() {
        // f(t) = exp(sin t) at t = 0.3; compare with hand-derived f', f''.
        let t = 0.3;
        let sin_jet = Jet::variable(t, 3).compose(&[
            math::sin(t),
            math::cos(t),
            -math::sin(t),
            -math::cos(t),
        ]);
        let f = sin_jet.exp();
        let e = math::exp(math::sin(t));
        let c = math::cos(t);
        let s = math::sin(t);
        assert!((f.derivative(0) - e).abs() < 1e-15);
        assert!((f.derivative(1) - e * c).abs() < 1e-14);
        assert!((f.derivative(2) - e * (c * c - s)).abs() < 1e-14);
        assert!((f.derivative(3) - e * (c * c * c - 3.0 * s * c - c)).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_of_polynomial() {
        // 1/(1+t) at t = 0: derivatives (-1)^k k!
        let j = Jet::variable(0.0, 5).add_scalar(1.0).recip();
        for k in 0..=5 {
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 } * math::factorial(k);
            assert!((j.derivative(k) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn leibniz_rule_on_polynomials() {
        // a(t) = t², v(t) = (t, t³) at t = 2 → (a v)(t) = (t³, t⁵)
        let t = 2.0;
        let a = Jet::variable(t, 3).mul(&Jet::variable(t, 3));
        let v = vec![
            vec![t, t * t * t],
            vec![1.0, 3.0 * t * t],
            vec![0.0, 6.0 * t],
            vec![0.0, 6.0],
        ];
        let d = scalar_times_vector(&a, &v);
        assert!((d[0][0] - 8.0).abs() < 1e-12 && (d[0][1] - 32.0).abs() < 1e-12);
        assert!((d[1][0] - 12.0).abs() < 1e-12 && (d[1][1] - 80.0).abs() < 1e-12);
        assert!((d[2][0] - 12.0).abs() < 1e-12 && (d[2][1] - 160.0).abs() < 1e-12);
        assert!((d[3][0] - 6.0).abs() < 1e-12 && (d[3][1] - 240.0).abs() < 1e-12);
    }
}
