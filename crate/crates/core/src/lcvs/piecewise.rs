use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lcvs::{Curve, Order};
use crate::linalg::Vector;

/// Breakpoints `t₀ < … < tₙ` with one curve per segment `[t_p, t_{p+1}]`.
///
/// Values at an interior breakpoint are taken from the segment starting
/// there (right-continuous), except at `tₙ` which belongs to the last one.
#[derive(Clone, Debug)]
pub struct PiecewiseCurve {
    breakpoints: Vec<f64>,
    segments: Vec<Curve>,
}

impl PiecewiseCurve {
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Curve>) -> Result<Self> {
        if breakpoints.len() < 2 || segments.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} breakpoints for {} segments",
                breakpoints.len(),
                segments.len()
            )));
        }
        for w in breakpoints.windows(2) {
            crate::lcvs::check_interval(w[0], w[1])?;
        }
        let dim = segments[0].dim();
        for (p, s) in segments.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if s.start() != breakpoints[p] || s.end() != breakpoints[p + 1] {
                return Err(Error::InvalidArgument(alloc::format!(
                    "segment {p} covers [{}, {}] instead of [{}, {}]",
                    s.start(),
                    s.end(),
                    breakpoints[p],
                    breakpoints[p + 1]
                )));
            }
        }
        Ok(Self { breakpoints, segments })
    }

    /// Builds each segment from its interval.
    pub fn from_fn<F>(breakpoints: Vec<f64>, mut make: F) -> Result<Self>
    where
        F: FnMut(usize, f64, f64) -> Result<Curve>,
    {
        let segments = breakpoints
            .windows(2)
            .enumerate()
            .map(|(p, w)| make(p, w[0], w[1]).and_then(|c| c.restrict(w[0], w[1])))
            .collect::<Result<Vec<_>>>()?;
        Self::new(breakpoints, segments)
    }

    pub fn single(curve: Curve) -> Self {
        Self {
            breakpoints: alloc::vec![curve.start(), curve.end()],
            segments: alloc::vec![curve],
        }
    }

    /// Constant value `values[p]` on segment `p`.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<Vector>) -> Result<Self> {
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidArgument("one value per segment required".into()));
        }
        Self::from_fn(breakpoints, |p, a, b| Curve::constant(a, b, values[p].clone()))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Curve] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    pub fn order(&self) -> Order {
        self.segments.iter().fold(Order::Smooth, |o, s| o.min(s.order()))
    }

    /// Index of the segment owning `t`.
    pub fn segment_of(&self, t: f64) -> usize {
        let n = self.segments.len();
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        idx.saturating_sub(1).min(n - 1)
    }

    pub fn eval(&self, t: f64) -> Vector {
        self.segments[self.segment_of(t)].eval(t)
    }

    /// Splits the segment containing `t` at `t`.
    pub fn refine(&self, t: f64) -> Result<Self> {
        if t <= self.start() || t >= self.end() || self.breakpoints.contains(&t) {
            return Err(Error::InvalidArgument(alloc::format!("cannot refine at {t}")));
        }
        let p = self.segment_of(t);
        let seg = &self.segments[p];
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.insert(p + 1, t);
        let mut segments = self.segments.clone();
        segments[p] = seg.restrict(seg.start(), t)?;
        segments.insert(p + 1, seg.restrict(t, seg.end())?);
        Self::new(breakpoints, segments)
    }

    /// The whole piecewise curve as one order-0 curve.
    pub fn to_curve(&self) -> Curve {
        let me = self.clone();
        Curve::from_parts(self.start(), self.end(), self.dim(), Order::Finite(0), move |t, _| {
            alloc::vec![me.eval(t)]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn right_continuous_lookup() {
        let pw = PiecewiseCurve::piecewise_constant(vec![0.0, 1.0, 2.0], vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(pw.eval(0.5), vec![1.0]);
        assert_eq!(pw.eval(1.0), vec![2.0]);
        assert_eq!(pw.eval(2.0), vec![2.0]);
        assert_eq!(pw.segment_of(-1.0), 0);
    }

    #[test]
    fn tiling_is_enforced() {
        let a = Curve::constant(0.0, 1.0, vec![1.0]).unwrap();
        let b = Curve::constant(1.5, 2.0, vec![1.0]).unwrap();
        assert!(PiecewiseCurve::new(vec![0.0, 1.0, 2.0], vec![a, b]).is_err());
    }

    #[test]
    fn refinement_keeps_values() {
        let c = Curve::linear(0.0, 1.0, vec![0.0], vec![1.0]).unwrap();
        let pw = PiecewiseCurve::single(c).refine(0.25).unwrap();
        assert_eq!(pw.breakpoints(), &[0.0, 0.25, 1.0]);
        assert_eq!(pw.eval(0.5), vec![0.5]);
    }
}
