use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::{self, Mat};
use crate::random;

/// A continuous seminorm on ℝᵈ.
#[derive(Clone, Debug, PartialEq)]
pub enum Seminorm {
    /// `√Σ xᵢ²`
    Euclidean,
    /// `max |xᵢ|`
    Max,
    /// `Σ |xᵢ|`
    Taxicab,
    /// Spectral norm of the `n×n` matrix whose row-major entries are the coordinates.
    MatrixOperator { n: usize },
    /// `|x_k|` – a genuine seminorm (not a norm when `d > 1`).
    Component(usize),
    /// `factor · inner(x)`
    Scaled { factor: f64, inner: Box<Seminorm> },
}

impl Seminorm {
    pub fn scaled(self, factor: f64) -> Seminorm {
        match self {
            Seminorm::Scaled { factor: f0, inner } => Seminorm::Scaled {
                factor: factor * f0,
                inner,
            },
            other => Seminorm::Scaled {
                factor,
                inner: Box::new(other),
            },
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Seminorm::Euclidean => linalg::norm(x),
            Seminorm::Max => linalg::max_abs(x),
            Seminorm::Taxicab => x.iter().map(|v| v.abs()).sum(),
            Seminorm::MatrixOperator { n } => Mat::from_slice(*n, x).op_norm(),
            Seminorm::Component(k) => x[*k].abs(),
            Seminorm::Scaled { factor, inner } => factor * inner.eval(x),
        }
    }

    /// The multiplier and base seminorm of a (possibly nested) scaling.
    pub fn split_scale(&self) -> (f64, &Seminorm) {
        match self {
            Seminorm::Scaled { factor, inner } => {
                let (f, base) = inner.split_scale();
                (factor * f, base)
            }
            other => (1.0, other),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Seminorm::Euclidean => "euclidean".to_string(),
            Seminorm::Max => "max".to_string(),
            Seminorm::Taxicab => "taxicab".to_string(),
            Seminorm::MatrixOperator { n } => alloc::format!("operator({n})"),
            Seminorm::Component(k) => alloc::format!("component({k})"),
            Seminorm::Scaled { factor, inner } => alloc::format!("{factor}*{}", inner.describe()),
        }
    }

    /// Induced operator norm `sup_{v(x) ≤ 1} v(Tx)` of a linear map.
    ///
    /// Exact for the euclidean (spectral norm), max (row sums) and taxicab
    /// (column sums) norms and their scalings; other seminorms get a sampled
    /// lower bound over `1024` random directions.
    pub fn induced_norm(&self, t: &Mat) -> f64 {
        let (_, base) = self.split_scale();
        match base {
            Seminorm::Euclidean => t.op_norm(),
            Seminorm::Max => t.norm_inf(),
            Seminorm::Taxicab => t.norm_1(),
            _ => {
                let mut rng = random::rng(0x5eed_1a7e);
                let d = t.dim();
                let mut best: f64 = 0.0;
                for _ in 0..1024 {
                    let x = random::gaussian_vector(&mut rng, d);
                    let nx = base.eval(&x);
                    if nx > 1e-300 {
                        best = best.max(base.eval(&t.mul_vec(&x)) / nx);
                    }
                }
                best
            }
        }
    }
}

/// Outcome of sampling the seminorm axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub samples: usize,
    pub max_homogeneity_error: f64,
    pub max_subadditivity_excess: f64,
    pub separates_points: bool,
}

/// A finite-dimensional coefficient space with a finite family of named seminorms.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSpec {
    dim: usize,
    seminorms: Vec<(String, Seminorm)>,
    order: Vec<(String, String)>,
}

impl VectorSpec {
    /// The first seminorm in `seminorms` is the primary one used for distances.
    pub fn new(dim: usize, seminorms: Vec<(String, Seminorm)>) -> Self {
        assert!(dim > 0, "dimension must be positive");
        assert!(!seminorms.is_empty(), "at least one seminorm required");
        Self {
            dim,
            seminorms,
            order: Vec::new(),
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(
            dim,
            alloc::vec![
                ("euclidean".to_string(), Seminorm::Euclidean),
                ("max".to_string(), Seminorm::Max)
            ],
        )
    }

    /// Declares `p ≤ q` between two named seminorms.
    pub fn with_order(mut self, smaller: &str, larger: &str) -> Self {
        self.order.push((smaller.to_string(), larger.to_string()));
        self
    }

    pub fn with_seminorm(mut self, name: &str, s: Seminorm) -> Self {
        self.seminorms.push((name.to_string(), s));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seminorms(&self) -> &[(String, Seminorm)] {
        &self.seminorms
    }

    pub fn primary(&self) -> &Seminorm {
        &self.seminorms[0].1
    }

    pub fn get(&self, name: &str) -> Option<&Seminorm> {
        self.seminorms.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn declared_order(&self) -> &[(String, String)] {
        &self.order
    }

    /// Samples homogeneity, subadditivity and (for the family as a whole)
    /// point separation, plus every declared order relation.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> AxiomReport {
        let mut rng = random::rng(seed);
        let mut hom: f64 = 0.0;
        let mut sub: f64 = 0.0;
        let mut separates = true;
        for _ in 0..samples {
            let x = random::gaussian_vector(&mut rng, self.dim);
            let y = random::gaussian_vector(&mut rng, self.dim);
            let c: f64 = rng.gen_range(-3.0..3.0);
            let mut any_positive = false;
            for (_, s) in &self.seminorms {
                let sx = s.eval(&x);
                let sy = s.eval(&y);
                hom = hom.max((s.eval(&linalg::scale(&x, c)) - c.abs() * sx).abs());
                sub = sub.max(s.eval(&linalg::add(&x, &y)) - sx - sy);
                if sx > 0.0 {
                    any_positive = true;
                }
            }
            if !any_positive {
                separates = false;
            }
            for (p, q) in &self.order {
                if let (Some(p), Some(q)) = (self.get(p), self.get(q)) {
                    sub = sub.max(p.eval(&x) - q.eval(&x));
                }
            }
        }
        AxiomReport {
            samples,
            max_homogeneity_error: hom,
            max_subadditivity_excess: sub,
            separates_points: separates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn operator_seminorm_is_spectral_norm() {
        let s = Seminorm::MatrixOperator { n: 2 };
        assert!((s.eval(&[3.0, 0.0, 0.0, -4.0]) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn scaled_seminorms_flatten() {
        let s = Seminorm::Euclidean.scaled(2.0).scaled(3.0);
        assert_eq!(s.split_scale().0, 6.0);
        assert!((s.eval(&[3.0, 4.0]) - 30.0).abs() < 1e-14);
    }

    #[test]
    fn axioms_hold_for_standard_family() {
        let spec = VectorSpec::euclidean(4)
            .with_seminorm("first", Seminorm::Component(0))
            .with_order("max", "euclidean");
        let r = spec.check_axioms(500, 3);
        assert!(r.max_homogeneity_error < 1e-12);
        assert!(r.max_subadditivity_excess < 1e-12);
        assert!(r.separates_points);
    }

    #[test]
    fn induced_norms() {
        let t = Mat::from_vec(2, vec![1.0, 2.0, -3.0, 4.0]);
        assert!((Seminorm::Max.induced_norm(&t) - 7.0).abs() < 1e-14);
        assert!((Seminorm::Taxicab.induced_norm(&t) - 6.0).abs() < 1e-14);
    }
}
