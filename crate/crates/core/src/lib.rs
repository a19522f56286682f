//! Right logarithmic derivatives and product integrals on concrete
//! finite-dimensional Lie groups.
//!
//! The crate is `no_std` (it needs `alloc`). Every operation is a pure
//! function of immutable inputs; curves are shared closures behind `Arc`
//! so they can be evaluated from several threads at once.
//!
//! Module map:
//!
//! * [`lcvs`] – seminorms, curves, Riemann integration, polygon and
//!   convolution approximation, iterated integration.
//! * [`group`] – the group instances (`gl(n)`, `so3`, `su2`, `heisenberg3`,
//!   `abelian(d)`, `torus(d)`, `unit_group(n)`).
//! * [`logderiv`] – the right logarithmic derivative and its algebraic rules.
//! * [`evolution`] – product integrals by exponential composition schemes.
//! * [`adjoint`] – ad-series, Omori transport, dexp factor and the
//!   Grönwall/constricted bound probes.
//! * [`smoothing`] – bump reparameterizations and the Mackey glue curve.
//! * [`calculus`] – derivatives of product integrals (Duhamel and friends).
//! * [`muconvex`] – sampling probes of local μ-convexity and continuity.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adjoint;
pub mod calculus;
mod error;
pub mod evolution;
pub mod group;
pub mod jet;
pub mod lcvs;
pub mod linalg;
pub mod logderiv;
pub(crate) mod math;
pub mod muconvex;
pub mod quadrature;
pub mod random;
pub mod smoothing;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupKind, GroupSpec};
pub use lcvs::{Curve, Order, PiecewiseCurve, Seminorm, VectorSpec};
pub use linalg::Vector;
