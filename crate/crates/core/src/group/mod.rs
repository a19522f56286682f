//! Concrete finite-dimensional Lie groups.
//!
//! Elements are flat coordinate vectors; algebra elements are vectors in a
//! fixed basis. Conventions per instance:
//!
//! | group | element coordinates | algebra basis | chart `Ξ` |
//! |---|---|---|---|
//! | `gl(n)` | `n×n` row-major | matrix units | principal `log`, `‖g−I‖ < 0.5` |
//! | `so3` | `3×3` rotation | hat matrices `e₁, e₂, e₃` | axis-angle, angle `< π` |
//! | `su2` | quaternion `(w,x,y,z)` | `eₖ ↔ (0, eₖ/2)`, `[e₁,e₂] = e₃` | axis-angle, angle `< 2π` |
//! | `heisenberg3` | `(a,b,c)` | `(x,y,z)`, `[X,X'] = (0,0,xy'−yx')` | global `log` |
//! | `abelian(d)` | ℝᵈ | standard | identity |
//! | `torus(d)` | ℝᵈ mod 2π, wrapped to `(−π, π]` | standard | identity on `(−π, π)ᵈ` |
//! | `unit_group(n)` | `n×n` row-major | matrix units | `a ↦ a − I`, `‖a−I‖ < 1` |
//!
//! Tangent vectors are derivatives of element coordinates. Multiplication
//! for `heisenberg3` is `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.

mod hom;
pub(crate) mod rotation;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lcvs::{Seminorm, VectorSpec};
use crate::linalg::{self, Mat, Vector};
use crate::math;
use crate::random;

pub use hom::Homomorphism;
use rotation::{hat, quat_angle, quat_exp, quat_inv, quat_log, quat_mul, quat_of_algebra, quat_rotation, vee};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Gl(usize),
    So3,
    Su2,
    Heisenberg3,
    Abelian(usize),
    Torus(usize),
    UnitGroup(usize),
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Gl(n) => write!(f, "gl({n})"),
            GroupKind::So3 => write!(f, "so3"),
            GroupKind::Su2 => write!(f, "su2"),
            GroupKind::Heisenberg3 => write!(f, "heisenberg3"),
            GroupKind::Abelian(d) => write!(f, "abelian({d})"),
            GroupKind::Torus(d) => write!(f, "torus({d})"),
            GroupKind::UnitGroup(n) => write!(f, "unit_group({n})"),
        }
    }
}

/// A group element: its coordinates and the group they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub kind: GroupKind,
    pub coords: Vector,
}

impl GroupElement {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Distance `‖Ξ(g⁻¹h)‖`, or the raw coordinate distance when `g⁻¹h` is
/// outside the chart (then `in_chart` is false).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartDistance {
    pub value: f64,
    pub in_chart: bool,
}

/// A concrete Lie group with chart, Ad, bracket and exponential.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    kind: GroupKind,
    algebra: VectorSpec,
}

/// Builds a group from names like `so3`, `gl(2)`, `torus(3)`.
pub fn make_group(name: &str) -> Result<GroupSpec> {
    let name = name.trim();
    let (base, param) = match name.find('(') {
        Some(i) if name.ends_with(')') => {
            let p = name[i + 1..name.len() - 1]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::UnknownGroup(name.to_string()))?;
            (&name[..i], Some(p))
        }
        Some(_) => return Err(Error::UnknownGroup(name.to_string())),
        None => (name, None),
    };
    let kind = match (base.trim(), param) {
        ("so3", None) => GroupKind::So3,
        ("su2", None) => GroupKind::Su2,
        ("heisenberg3", None) => GroupKind::Heisenberg3,
        ("gl", Some(n)) => GroupKind::Gl(n),
        ("abelian", Some(n)) => GroupKind::Abelian(n),
        ("torus", Some(n)) => GroupKind::Torus(n),
        ("unit_group", Some(n)) => GroupKind::UnitGroup(n),
        _ => return Err(Error::UnknownGroup(name.to_string())),
    };
    GroupSpec::new(kind)
}

fn wrap_angle(x: f64) -> f64 {
    let y = x - 2.0 * PI * math::floor((x + PI) / (2.0 * PI));
    // y ∈ [−π, π); move −π to π
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

impl GroupSpec {
    pub fn new(kind: GroupKind) -> Result<Self> {
        let size = match kind {
            GroupKind::Gl(n) | GroupKind::Abelian(n) | GroupKind::Torus(n) | GroupKind::UnitGroup(n) => n,
            _ => 1,
        };
        if size < 1 {
            return Err(Error::InvalidArgument(alloc::format!("{kind}: size must be at least 1")));
        }
        let d = algebra_dim(kind);
        let euclid = VectorSpec::euclidean(d);
        let algebra = match kind {
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => euclid
                .with_seminorm("operator", Seminorm::MatrixOperator { n })
                .with_seminorm("submultiplicative", Seminorm::MatrixOperator { n }.scaled(2.0))
                .with_order("operator", "euclidean"),
            GroupKind::Su2 => euclid
                .with_seminorm("operator", Seminorm::Euclidean.scaled(0.5))
                .with_seminorm("submultiplicative", Seminorm::Euclidean)
                .with_order("operator", "euclidean"),
            _ => euclid
                .with_seminorm("operator", Seminorm::Euclidean)
                .with_seminorm("submultiplicative", Seminorm::Euclidean),
        };
        Ok(Self { kind, algebra })
    }

    pub fn so3() -> Self {
        Self::new(GroupKind::So3).expect("static group")
    }

    pub fn su2() -> Self {
        Self::new(GroupKind::Su2).expect("static group")
    }

    pub fn heisenberg3() -> Self {
        Self::new(GroupKind::Heisenberg3).expect("static group")
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn algebra(&self) -> &VectorSpec {
        &self.algebra
    }

    pub fn algebra_dim(&self) -> usize {
        algebra_dim(self.kind)
    }

    pub fn element_dim(&self) -> usize {
        match self.kind {
            GroupKind::So3 => 9,
            GroupKind::Su2 => 4,
            k => algebra_dim(k),
        }
    }

    /// Matrix size for the matrix instances.
    fn matrix_size(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Some(n),
            GroupKind::So3 => Some(3),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, GroupKind::Abelian(_) | GroupKind::Torus(_))
            || matches!(self.kind, GroupKind::Gl(1) | GroupKind::UnitGroup(1))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_abelian() || self.kind == GroupKind::Heisenberg3
    }

    /// Every instance carries a seminorm `w` with `w([X,Y]) ≤ w(X)·w(Y)`.
    pub fn has_submultiplicative_seminorm(&self) -> bool {
        true
    }

    pub fn submultiplicative_seminorm(&self) -> Seminorm {
        self.algebra.get("submultiplicative").cloned().unwrap_or(Seminorm::Euclidean)
    }

    /// Operator norm of the algebra element in its defining representation.
    pub fn operator_seminorm(&self) -> Seminorm {
        self.algebra.get("operator").cloned().unwrap_or(Seminorm::Euclidean)
    }

    fn elem(&self, coords: Vector) -> GroupElement {
        GroupElement { kind: self.kind, coords }
    }

    /// Wraps raw coordinates, checking dimension and finiteness.
    pub fn element(&self, coords: Vector) -> Result<GroupElement> {
        if coords.len() != self.element_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.element_dim(),
                found: coords.len(),
            });
        }
        if !linalg::is_finite(&coords) {
            return Err(Error::InvalidArgument("non-finite group coordinates".into()));
        }
        let coords = match self.kind {
            GroupKind::Torus(_) => coords.into_iter().map(wrap_angle).collect(),
            _ => coords,
        };
        if let Some(n) = self.matrix_size() {
            let det = Mat::from_slice(n, &coords).det();
            if det.abs() <= 1e-12 {
                return Err(Error::Singular { t: f64::NAN });
            }
        }
        Ok(self.elem(coords))
    }

    pub fn identity(&self) -> GroupElement {
        let c = match self.kind {
            GroupKind::Su2 => vec![1.0, 0.0, 0.0, 0.0],
            k => match self.matrix_size() {
                Some(n) => Mat::identity(n).into_vec(),
                None => linalg::zeros(algebra_dim(k)),
            },
        };
        self.elem(c)
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let (a, b) = (&g.coords, &h.coords);
        let c = match self.kind {
            GroupKind::Su2 => quat_mul(a, b),
            GroupKind::Heisenberg3 => vec![a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]],
            GroupKind::Abelian(_) => linalg::add(a, b),
            GroupKind::Torus(_) => a.iter().zip(b).map(|(x, y)| wrap_angle(x + y)).collect(),
            _ => {
                let n = self.matrix_size().unwrap_or(1);
                Mat::from_slice(n, a).mul(&Mat::from_slice(n, b)).into_vec()
            }
        };
        self.elem(c)
    }

    /// Inverse; singular matrices are reported.
    pub fn try_inv(&self, g: &GroupElement) -> Result<GroupElement> {
        let a = &g.coords;
        let c = match self.kind {
            GroupKind::So3 => Mat::from_slice(3, a).transpose().into_vec(),
            GroupKind::Su2 => quat_inv(a),
            GroupKind::Heisenberg3 => vec![-a[0], -a[1], -a[2] + a[0] * a[1]],
            GroupKind::Abelian(_) => linalg::scale(a, -1.0),
            GroupKind::Torus(_) => a.iter().map(|x| wrap_angle(-x)).collect(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, a)
                .inverse()
                .ok_or(Error::Singular { t: f64::NAN })?
                .into_vec(),
        };
        Ok(self.elem(c))
    }

    /// Inverse; a singular matrix yields NaN coordinates.
    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        self.try_inv(g)
            .unwrap_or_else(|_| self.elem(vec![f64::NAN; self.element_dim()]))
    }

    /// `g⁻¹·h`
    pub fn quotient(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.mul(&self.inv(g), h)
    }

    pub fn exp(&self, x: &[f64]) -> GroupElement {
        let c = match self.kind {
            GroupKind::So3 => rotation::rotation_exp(x).into_vec(),
            GroupKind::Su2 => quat_exp(x),
            GroupKind::Heisenberg3 => vec![x[0], x[1], x[2] + 0.5 * x[0] * x[1]],
            GroupKind::Abelian(_) => x.to_vec(),
            GroupKind::Torus(_) => x.iter().map(|v| wrap_angle(*v)).collect(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, x).expm().into_vec(),
        };
        self.elem(c)
    }

    /// Size of `g` measured against [`GroupSpec::chart_radius`].
    pub fn chart_measure(&self, g: &GroupElement) -> f64 {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => rotation::rotation_angle(&Mat::from_slice(3, a)),
            GroupKind::Su2 => quat_angle(a),
            GroupKind::Heisenberg3 | GroupKind::Abelian(_) => 0.0,
            GroupKind::Torus(_) => linalg::max_abs(a),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, a).sub(&Mat::identity(n)).op_norm(),
        }
    }

    /// The chart domain is `chart_measure < chart_radius`.
    pub fn chart_radius(&self) -> f64 {
        match self.kind {
            GroupKind::So3 | GroupKind::Torus(_) => PI,
            GroupKind::Su2 => 2.0 * PI - 1e-6,
            GroupKind::Heisenberg3 | GroupKind::Abelian(_) => f64::INFINITY,
            GroupKind::Gl(_) => 0.5,
            GroupKind::UnitGroup(_) => 1.0,
        }
    }

    pub fn in_chart(&self, g: &GroupElement) -> bool {
        let m = self.chart_measure(g);
        m.is_finite() && m < self.chart_radius()
    }

    fn chart_guard(&self, g: &GroupElement) -> Result<()> {
        if self.in_chart(g) {
            Ok(())
        } else {
            Err(Error::OutOfChart {
                distance: self.chart_measure(g),
                radius: self.chart_radius(),
            })
        }
    }

    /// Inverse of `exp` on the chart domain.
    pub fn log(&self, g: &GroupElement) -> Result<Vector> {
        match self.kind {
            GroupKind::UnitGroup(n) => {
                self.chart_guard(g)?;
                Mat::from_slice(n, &g.coords)
                    .logm()
                    .map(Mat::into_vec)
                    .ok_or(Error::OutOfChart {
                        distance: self.chart_measure(g),
                        radius: self.chart_radius(),
                    })
            }
            _ => self.chart(g),
        }
    }

    /// The chart `Ξ` with `Ξ(e) = 0`.
    pub fn chart(&self, g: &GroupElement) -> Result<Vector> {
        self.chart_guard(g)?;
        let a = &g.coords;
        Ok(match self.kind {
            GroupKind::So3 => rotation::rotation_log(&Mat::from_slice(3, a)),
            GroupKind::Su2 => quat_log(a),
            GroupKind::Heisenberg3 => vec![a[0], a[1], a[2] - 0.5 * a[0] * a[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => a.clone(),
            GroupKind::Gl(n) => Mat::from_slice(n, a)
                .logm()
                .ok_or(Error::OutOfChart {
                    distance: self.chart_measure(g),
                    radius: self.chart_radius(),
                })?
                .into_vec(),
            GroupKind::UnitGroup(n) => Mat::from_slice(n, a).sub(&Mat::identity(n)).into_vec(),
        })
    }

    /// `Ξ⁻¹`
    pub fn unchart(&self, x: &[f64]) -> Result<GroupElement> {
        match self.kind {
            GroupKind::UnitGroup(n) => {
                let g = self.elem(Mat::identity(n).add(&Mat::from_slice(n, x)).into_vec());
                self.chart_guard(&g)?;
                Ok(g)
            }
            GroupKind::Torus(_) if linalg::max_abs(x) >= PI => Err(Error::OutOfChart {
                distance: linalg::max_abs(x),
                radius: PI,
            }),
            _ => Ok(self.exp(x)),
        }
    }

    /// `‖Ξ(g⁻¹h)‖` in the primary algebra seminorm, with a raw-coordinate
    /// fallback outside the chart.
    pub fn chart_distance(&self, g: &GroupElement, h: &GroupElement) -> ChartDistance {
        let q = self.quotient(g, h);
        match self.chart(&q) {
            Ok(x) => ChartDistance {
                value: self.algebra.primary().eval(&x),
                in_chart: true,
            },
            Err(_) => ChartDistance {
                value: linalg::max_abs(&linalg::sub(&g.coords, &h.coords)),
                in_chart: false,
            },
        }
    }

    /// `Ξ(g)` measured in the primary seminorm, falling back to the chart
    /// measure outside the chart.
    pub fn chart_norm(&self, g: &GroupElement) -> f64 {
        self.chart_distance(&self.identity(), g).value
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vector {
        match self.kind {
            GroupKind::So3 | GroupKind::Su2 => linalg::cross(x, y),
            GroupKind::Heisenberg3 => vec![0.0, 0.0, x[0] * y[1] - x[1] * y[0]],
            GroupKind::Abelian(d) | GroupKind::Torus(d) => linalg::zeros(d),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => {
                Mat::from_slice(n, x).commutator(&Mat::from_slice(n, y)).into_vec()
            }
        }
    }

    /// Matrix of `Y ↦ [X, Y]`.
    pub fn ad_matrix(&self, x: &[f64]) -> Mat {
        let d = self.algebra_dim();
        let mut m = Mat::zeros(d);
        for j in 0..d {
            let mut e = linalg::zeros(d);
            e[j] = 1.0;
            for (i, v) in self.bracket(x, &e).into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn ad(&self, g: &GroupElement, x: &[f64]) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => Mat::from_slice(3, a).mul_vec(x),
            GroupKind::Su2 => quat_rotation(a).mul_vec(x),
            GroupKind::Heisenberg3 => vec![x[0], x[1], x[2] + a[0] * x[1] - a[1] * x[0]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => x.to_vec(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => {
                let gm = Mat::from_slice(n, a);
                let gi = Mat::from_slice(n, &self.inv(g).coords);
                gm.mul(&Mat::from_slice(n, x)).mul(&gi).into_vec()
            }
        }
    }

    /// Matrix of `Ad_g` in the algebra basis.
    pub fn ad_group_matrix(&self, g: &GroupElement) -> Mat {
        let d = self.algebra_dim();
        let mut m = Mat::zeros(d);
        for j in 0..d {
            let mut e = linalg::zeros(d);
            e[j] = 1.0;
            for (i, v) in self.ad(g, &e).into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `ġ·g⁻¹` for a tangent `ġ` at `g`.
    pub fn right_trivialize(&self, g: &GroupElement, gdot: &[f64]) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => vee(&Mat::from_slice(3, gdot).mul(&Mat::from_slice(3, a).transpose())),
            GroupKind::Su2 => {
                let v = quat_mul(gdot, &quat_inv(a));
                vec![2.0 * v[1], 2.0 * v[2], 2.0 * v[3]]
            }
            GroupKind::Heisenberg3 => vec![gdot[0], gdot[1], gdot[2] - gdot[0] * a[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => gdot.to_vec(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, gdot)
                .mul(&Mat::from_slice(n, &self.inv(g).coords))
                .into_vec(),
        }
    }

    /// `g⁻¹·ġ` for a tangent `ġ` at `g`.
    pub fn left_trivialize(&self, g: &GroupElement, gdot: &[f64]) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => vee(&Mat::from_slice(3, a).transpose().mul(&Mat::from_slice(3, gdot))),
            GroupKind::Su2 => {
                let v = quat_mul(&quat_inv(a), gdot);
                vec![2.0 * v[1], 2.0 * v[2], 2.0 * v[3]]
            }
            GroupKind::Heisenberg3 => vec![gdot[0], gdot[1], gdot[2] - a[0] * gdot[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => gdot.to_vec(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, &self.inv(g).coords)
                .mul(&Mat::from_slice(n, gdot))
                .into_vec(),
        }
    }

    /// Tangent `X·g` at `g` (inverse of [`GroupSpec::right_trivialize`]).
    pub fn right_translate(&self, x: &[f64], g: &GroupElement) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => hat(x).mul(&Mat::from_slice(3, a)).into_vec(),
            GroupKind::Su2 => quat_mul(&quat_of_algebra(x), a),
            GroupKind::Heisenberg3 => vec![x[0], x[1], x[2] + x[0] * a[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => x.to_vec(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, x).mul(&Mat::from_slice(n, a)).into_vec(),
        }
    }

    /// Tangent `g·X` at `g` (inverse of [`GroupSpec::left_trivialize`]).
    pub fn left_translate(&self, g: &GroupElement, x: &[f64]) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::So3 => Mat::from_slice(3, a).mul(&hat(x)).into_vec(),
            GroupKind::Su2 => quat_mul(a, &quat_of_algebra(x)),
            GroupKind::Heisenberg3 => vec![x[0], x[1], x[2] + a[0] * x[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => x.to_vec(),
            GroupKind::Gl(n) | GroupKind::UnitGroup(n) => Mat::from_slice(n, a).mul(&Mat::from_slice(n, x)).into_vec(),
        }
    }

    /// Derivative of `t ↦ g(t)·h(t)`.
    pub fn tangent_mul(&self, g: &GroupElement, gdot: &[f64], h: &GroupElement, hdot: &[f64]) -> Vector {
        let (a, b) = (&g.coords, &h.coords);
        match self.kind {
            GroupKind::Su2 => linalg::add(&quat_mul(gdot, b), &quat_mul(a, hdot)),
            GroupKind::Heisenberg3 => vec![
                gdot[0] + hdot[0],
                gdot[1] + hdot[1],
                gdot[2] + hdot[2] + gdot[0] * b[1] + a[0] * hdot[1],
            ],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => linalg::add(gdot, hdot),
            _ => {
                let n = self.matrix_size().unwrap_or(1);
                Mat::from_slice(n, gdot)
                    .mul(&Mat::from_slice(n, b))
                    .add(&Mat::from_slice(n, a).mul(&Mat::from_slice(n, hdot)))
                    .into_vec()
            }
        }
    }

    /// Derivative of `t ↦ g(t)⁻¹`.
    pub fn tangent_inv(&self, g: &GroupElement, gdot: &[f64]) -> Vector {
        let a = &g.coords;
        match self.kind {
            GroupKind::Su2 => {
                let qi = quat_inv(a);
                linalg::scale(&quat_mul(&quat_mul(&qi, gdot), &qi), -1.0)
            }
            GroupKind::Heisenberg3 => vec![-gdot[0], -gdot[1], -gdot[2] + gdot[0] * a[1] + a[0] * gdot[1]],
            GroupKind::Abelian(_) | GroupKind::Torus(_) => linalg::scale(gdot, -1.0),
            _ => {
                let n = self.matrix_size().unwrap_or(1);
                let gi = Mat::from_slice(n, &self.inv(g).coords);
                gi.mul(&Mat::from_slice(n, gdot)).mul(&gi).scale(-1.0).into_vec()
            }
        }
    }

    /// Derivatives `0..=order` in `τ` of the right logarithmic derivative of
    /// the chart line `τ ↦ Ξ⁻¹(τY)`.
    ///
    /// For exponential charts this is the constant `Y`; for the unit-group
    /// chart it is `Y(I+τY)⁻¹` with `j`-th derivative
    /// `j!(−1)ʲ Yʲ⁺¹(I+τY)⁻⁽ʲ⁺¹⁾`.
    pub fn chart_line_derivatives(&self, y: &[f64], tau: f64, order: usize) -> Vec<Vector> {
        match self.kind {
            GroupKind::UnitGroup(n) => {
                let ym = Mat::from_slice(n, y);
                let inv = Mat::identity(n)
                    .add(&ym.scale(tau))
                    .inverse()
                    .unwrap_or_else(|| Mat::from_vec(n, vec![f64::NAN; n * n]));
                let step = ym.mul(&inv);
                let mut term = step.clone();
                let mut out = Vec::with_capacity(order + 1);
                for j in 0..=order {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(term.scale(sign * math::factorial(j)).into_vec());
                    term = term.mul(&step);
                }
                out
            }
            _ => {
                let mut out = vec![y.to_vec()];
                out.extend((0..order).map(|_| linalg::zeros(y.len())));
                out
            }
        }
    }

    /// Gaussian algebra element with euclidean norm about `scale`.
    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Vector {
        let d = self.algebra_dim();
        linalg::scale(&random::gaussian_vector(rng, d), scale / math::sqrt(d as f64))
    }

    /// `Ξ⁻¹(X)` for a random `X` of operator seminorm at most `radius`.
    pub fn random_near_identity<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> GroupElement {
        let op = self.operator_seminorm();
        loop {
            let x = random::unit_vector(rng, self.algebra_dim());
            let r: f64 = rng.gen_range(0.0..radius);
            let n = op.eval(&x);
            if n > 0.0 {
                if let Ok(g) = self.unchart(&linalg::scale(&x, r / n)) {
                    return g;
                }
            }
        }
    }
}

fn algebra_dim(kind: GroupKind) -> usize {
    match kind {
        GroupKind::Gl(n) | GroupKind::UnitGroup(n) => n * n,
        GroupKind::So3 | GroupKind::Su2 | GroupKind::Heisenberg3 => 3,
        GroupKind::Abelian(d) | GroupKind::Torus(d) => d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<GroupSpec> {
        ["gl(2)", "so3", "su2", "heisenberg3", "abelian(3)", "torus(2)", "unit_group(3)"]
            .iter()
            .map(|n| make_group(n).unwrap())
            .collect()
    }

    #[test]
    fn names_round_trip() {
        for g in all() {
            assert_eq!(make_group(&g.name()).unwrap().kind(), g.kind());
        }
        assert!(make_group("sl(2)").is_err());
        assert!(make_group("gl(0)").is_err());
        assert!(make_group("so3(2)").is_err());
    }

    #[test]
    fn group_axioms_near_identity() {
        let mut rng = random::rng(1);
        for g in all() {
            for _ in 0..20 {
                let a = g.random_near_identity(&mut rng, 0.4);
                let e = g.mul(&a, &g.inv(&a));
                assert!(linalg::max_abs(&linalg::sub(&e.coords, &g.identity().coords)) < 1e-12, "{}", g.name());
                let x = g.chart(&a).unwrap();
                let back = g.unchart(&x).unwrap();
                assert!(linalg::max_abs(&linalg::sub(&back.coords, &a.coords)) < 1e-12, "{}", g.name());
                let y = g.random_algebra(&mut rng, 1.0);
                assert_eq!(g.ad(&g.identity(), &y), y);
            }
        }
    }

    #[test]
    fn ad_matches_conjugation_derivative() {
        let mut rng = random::rng(2);
        for g in all() {
            let a = g.random_near_identity(&mut rng, 0.4);
            let x = g.random_algebra(&mut rng, 1.0);
            let h = 1e-5;
            let conj = |s: f64| {
                let m = g.mul(&g.mul(&a, &g.unchart(&linalg::scale(&x, s)).unwrap()), &g.inv(&a));
                g.chart(&m).unwrap()
            };
            let fd = linalg::scale(&linalg::sub(&conj(h), &conj(-h)), 0.5 / h);
            let ad = g.ad(&a, &x);
            assert!(linalg::max_abs(&linalg::sub(&fd, &ad)) < 1e-8, "{}", g.name());
        }
    }

    #[test]
    fn heisenberg_structure() {
        let g = GroupSpec::heisenberg3();
        let m = g.ad_matrix(&[1.0, 0.0, 0.0]);
        assert_eq!(m.mul_vec(&[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
        assert_eq!(m.mul_vec(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(m.mul_vec(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 0.0]);
        let x = [0.3, -1.2, 2.0];
        assert_eq!(g.chart(&g.exp(&x)).unwrap(), x.to_vec());
    }

    #[test]
    fn nilpotent_gl_exp() {
        let g = make_group("gl(2)").unwrap();
        assert_eq!(g.exp(&[0.0, 1.0, 0.0, 0.0]).coords, vec![1.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn torus_wraps() {
        let g = make_group("torus(1)").unwrap();
        let a = g.exp(&[3.0]);
        let b = g.mul(&a, &a);
        assert!((b.coords[0] - (6.0 - 2.0 * PI)).abs() < 1e-15);
        assert!(g.unchart(&[PI]).is_err());
    }

    #[test]
    fn tangent_formulas_match_differences() {
        let mut rng = random::rng(5);
        for g in all() {
            let x = g.random_algebra(&mut rng, 0.5);
            let y = g.random_algebra(&mut rng, 0.5);
            let c = |t: f64| g.exp(&linalg::scale(&x, t));
            let d = |t: f64| g.exp(&linalg::add(&y, &linalg::scale(&x, t * t)));
            let t = 0.7;
            let h = 1e-5;
            let fd = |f: &dyn Fn(f64) -> Vector| linalg::scale(&linalg::sub(&f(t + h), &f(t - h)), 0.5 / h);
            let cd = fd(&|s| c(s).coords);
            let dd = fd(&|s| d(s).coords);
            let prod = fd(&|s| g.mul(&c(s), &d(s)).coords);
            let tm = g.tangent_mul(&c(t), &cd, &d(t), &dd);
            assert!(linalg::max_abs(&linalg::sub(&prod, &tm)) < 1e-8, "{}", g.name());
            let inv = fd(&|s| g.inv(&d(s)).coords);
            assert!(linalg::max_abs(&linalg::sub(&inv, &g.tangent_inv(&d(t), &dd))) < 1e-8, "{}", g.name());
            assert!(linalg::max_abs(&linalg::sub(&g.right_trivialize(&c(t), &cd), &x)) < 1e-8, "{}", g.name());
            assert!(linalg::max_abs(&linalg::sub(&g.left_trivialize(&c(t), &cd), &x)) < 1e-8, "{}", g.name());
            let back = g.right_trivialize(&d(t), &g.right_translate(&y, &d(t)));
            assert!(linalg::max_abs(&linalg::sub(&back, &y)) < 1e-12, "{}", g.name());
        }
    }
}
