//! Curves described in configuration files.

use prodint_core::lcvs::FourierTerm;
use prodint_core::{Curve, PiecewiseCurve, Vector};

use crate::config::CurveDescriptor;
use crate::error::CliError;

/// A constructed descriptor.
#[derive(Clone)]
pub enum BuiltCurve {
    Smooth(Curve),
    Piecewise(PiecewiseCurve),
}

impl BuiltCurve {
    pub fn dim(&self) -> usize {
        match self {
            BuiltCurve::Smooth(c) => c.dim(),
            BuiltCurve::Piecewise(p) => p.dim(),
        }
    }

    pub fn as_piecewise(&self) -> PiecewiseCurve {
        match self {
            BuiltCurve::Smooth(c) => PiecewiseCurve::single(c.clone()),
            BuiltCurve::Piecewise(p) => p.clone(),
        }
    }

    /// The curve as one `Curve`; piecewise curves are glued.
    pub fn as_curve(&self) -> Curve {
        match self {
            BuiltCurve::Smooth(c) => c.clone(),
            BuiltCurve::Piecewise(p) => p.to_curve(),
        }
    }
}

fn schema(index: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("curves[{index}]: {msg}"))
}

fn check_dim(index: usize, v: &[f64], dim: usize, what: &str) -> Result<(), CliError> {
    if v.len() != dim {
        return Err(schema(index, format!("{what} has length {}, the algebra has dimension {dim}", v.len())));
    }
    Ok(())
}

fn interval(index: usize, iv: Option<[f64; 2]>, fallback: [f64; 2]) -> Result<(f64, f64), CliError> {
    let [a, b] = iv.unwrap_or(fallback);
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(schema(index, format!("invalid interval [{a}, {b}]")));
    }
    Ok((a, b))
}

fn smooth(index: usize, d: &CurveDescriptor, dim: usize, fallback: [f64; 2]) -> Result<Curve, CliError> {
    let built = match d {
        CurveDescriptor::Constant { interval: iv, value } => {
            check_dim(index, value, dim, "value")?;
            let (a, b) = interval(index, *iv, fallback)?;
            Curve::constant(a, b, value.clone())
        }
        CurveDescriptor::Polynomial { interval: iv, coefficients } => {
            if coefficients.is_empty() {
                return Err(schema(index, "polynomial needs at least one coefficient"));
            }
            for c in coefficients {
                check_dim(index, c, dim, "coefficient")?;
            }
            let (a, b) = interval(index, *iv, fallback)?;
            Curve::polynomial(a, b, coefficients.clone())
        }
        CurveDescriptor::Fourier {
            interval: iv,
            polynomial,
            terms,
        } => {
            for c in polynomial {
                check_dim(index, c, dim, "coefficient")?;
            }
            let terms: Vec<FourierTerm> = terms
                .iter()
                .map(|t| {
                    check_dim(index, &t.cos, dim, "cos")?;
                    check_dim(index, &t.sin, dim, "sin")?;
                    Ok(FourierTerm {
                        frequency: t.frequency,
                        cos: t.cos.clone(),
                        sin: t.sin.clone(),
                    })
                })
                .collect::<Result<_, CliError>>()?;
            let poly: Vec<Vector> = if polynomial.is_empty() { vec![vec![0.0; dim]] } else { polynomial.clone() };
            let (a, b) = interval(index, *iv, fallback)?;
            Curve::fourier(a, b, poly, terms)
        }
        CurveDescriptor::Piecewise { .. } => return Err(schema(index, "piecewise curves cannot be nested")),
    };
    built.map_err(|e| schema(index, e))
}

/// Builds descriptor `index` as a curve in an algebra of dimension `dim`.
/// Intervals default to `[0, 1]`.
pub fn build(index: usize, d: &CurveDescriptor, dim: usize) -> Result<BuiltCurve, CliError> {
    match d {
        CurveDescriptor::Piecewise { breakpoints, segments } => {
            if breakpoints.len() != segments.len() + 1 {
                return Err(schema(
                    index,
                    format!("{} breakpoints for {} segments", breakpoints.len(), segments.len()),
                ));
            }
            let curves = segments
                .iter()
                .enumerate()
                .map(|(k, s)| smooth(index, s, dim, [breakpoints[k], breakpoints[k + 1]]))
                .collect::<Result<Vec<_>, _>>()?;
            PiecewiseCurve::new(breakpoints.clone(), curves)
                .map(BuiltCurve::Piecewise)
                .map_err(|e| schema(index, e))
        }
        other => smooth(index, other, dim, [0.0, 1.0]).map(BuiltCurve::Smooth),
    }
}

pub fn build_all(ds: &[CurveDescriptor], dim: usize) -> Result<Vec<BuiltCurve>, CliError> {
    ds.iter().enumerate().map(|(i, d)| build(i, d, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FourierTermSpec;

    #[test]
    fn polynomial_descriptor() {
        let d = CurveDescriptor::Polynomial {
            interval: Some([0.0, 2.0]),
            coefficients: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
        };
        let c = build(0, &d, 2).unwrap().as_curve();
        assert_eq!(c.eval(1.5), vec![1.0, 3.0]);
        assert_eq!(c.end(), 2.0);
    }

    #[test]
    fn fourier_descriptor() {
        let d = CurveDescriptor::Fourier {
            interval: None,
            polynomial: vec![],
            terms: vec![FourierTermSpec {
                frequency: 2.0,
                cos: vec![1.0],
                sin: vec![0.5],
            }],
        };
        let c = build(0, &d, 1).unwrap().as_curve();
        let t: f64 = 0.3;
        assert!((c.eval(t)[0] - ((2.0 * t).cos() + 0.5 * (2.0 * t).sin())).abs() < 1e-15);
    }

    #[test]
    fn piecewise_descriptor_takes_segment_intervals() {
        let d = CurveDescriptor::Piecewise {
            breakpoints: vec![0.0, 0.4, 1.0],
            segments: vec![
                CurveDescriptor::Constant {
                    interval: None,
                    value: vec![1.0],
                },
                CurveDescriptor::Constant {
                    interval: None,
                    value: vec![2.0],
                },
            ],
        };
        let pw = build(0, &d, 1).unwrap().as_piecewise();
        assert_eq!(pw.len(), 2);
        assert_eq!(pw.eval(0.7), vec![2.0]);
    }

    #[test]
    fn dimension_mismatch_is_a_schema_error() {
        let d = CurveDescriptor::Constant {
            interval: None,
            value: vec![1.0, 2.0],
        };
        let err = build(3, &d, 3).err().unwrap();
        assert!(matches!(err, CliError::Schema(m) if m.contains("curves[3]")));
    }
}
