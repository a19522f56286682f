use crate::error::{Error, Result};
use crate::lcvs::{Curve, PiecewiseCurve, Seminorm};
use crate::linalg::{self, Vector};
use crate::quadrature::{self, SIMPSON_TOLERANCE};

/// `∫ₐᵇ c(s) ds` by composite Simpson with halving; `a > b` flips the sign.
pub fn riemann_integral(c: &Curve, a: f64, b: f64) -> Result<Vector> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let slack = 1e-12 * (1.0 + c.length());
    if a != b && (lo < c.start() - slack || hi > c.end() + slack) {
        return Err(Error::InvalidInterval { start: a, end: b });
    }
    quadrature::simpson(|t| c.eval(t), a, b, c.dim(), SIMPSON_TOLERANCE)
}

/// Sum of the segment integrals.
pub fn piecewise_integral(pw: &PiecewiseCurve) -> Result<Vector> {
    let mut total = linalg::zeros(pw.dim());
    for seg in pw.segments() {
        linalg::axpy(&mut total, 1.0, &riemann_integral(seg, seg.start(), seg.end())?);
    }
    Ok(total)
}

/// `∫ p(c(s)) ds` over the interval of `c`.
pub fn l1_seminorm(c: &Curve, p: &Seminorm) -> Result<f64> {
    quadrature::simpson_scalar(|t| p.eval(&c.eval(t)), c.start(), c.end(), SIMPSON_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcvs::FourierTerm;
    use alloc::vec;

    #[test]
    fn polynomial_and_trig_integrals() {
        let c = Curve::polynomial(0.0, 1.0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let v = riemann_integral(&c, 0.0, 1.0).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-14 && (v[1] - 1.0 / 3.0).abs() < 1e-14);
        let s = Curve::fourier(
            0.0,
            core::f64::consts::PI,
            vec![],
            vec![FourierTerm {
                frequency: 1.0,
                cos: vec![0.0, 1.0],
                sin: vec![1.0, 0.0],
            }],
        )
        .unwrap();
        let v = riemann_integral(&s, 0.0, core::f64::consts::PI).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12 && v[1].abs() < 1e-12);
    }

    #[test]
    fn outside_interval_is_rejected() {
        let c = Curve::constant(0.0, 1.0, vec![1.0]).unwrap();
        assert!(riemann_integral(&c, 0.0, 2.0).is_err());
        assert_eq!(riemann_integral(&c, 3.0, 3.0).unwrap(), vec![0.0]);
    }

    #[test]
    fn step_curve_integral() {
        let pw = PiecewiseCurve::piecewise_constant(vec![0.0, 1.0, 2.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(piecewise_integral(&pw).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn l1_of_linear_curve() {
        let c = Curve::linear(0.0, 1.0, vec![0.0, 0.0], vec![2.0, 0.0]).unwrap();
        assert!((l1_seminorm(&c, &Seminorm::Euclidean).unwrap() - 1.0).abs() < 1e-13);
    }
}
