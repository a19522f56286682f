//! Coefficient spaces and the curves living in them.
//!
//! A [`VectorSpec`] is ℝᵈ together with a finite, named family of
//! seminorms. [`Curve`]s carry analytic derivatives up to a declared
//! [`Order`]; [`PiecewiseCurve`]s glue finitely many of them without any
//! continuity requirement at the breakpoints.

mod approx;
mod curve;
mod integrate;
mod piecewise;
mod seminorm;

pub use approx::{ck_seminorm, convolve, convolve_piecewise, iterated_integrate, mollifier, polygon_approx, GridSup, Mollifier, DEFAULT_GRID};
pub use curve::{central_difference, fd_derivative, Curve, CurveFn, FourierTerm, Order};
pub use integrate::{l1_seminorm, piecewise_integral, riemann_integral};
pub use piecewise::PiecewiseCurve;
pub use seminorm::{AxiomReport, Seminorm, VectorSpec};

pub(crate) use curve::check_interval;
