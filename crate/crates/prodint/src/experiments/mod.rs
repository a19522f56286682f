//! One runner per experiment kind.
//!
//! Samples are independent: sample `i` draws from `random::split(seed, i)`,
//! so results do not depend on the number of worker threads.

mod approx;
mod calculus;
mod groenwall;
mod identities;
mod mackey;
mod muconvex;
mod evolve;

use prodint_core::evolution::{EvolveConfig, Scheme};
use prodint_core::group::make_group;
use prodint_core::random::{self, Rng64};
use prodint_core::{Curve, GroupKind, GroupSpec};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::descriptor::{self, BuiltCurve};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

/// Resolved configuration shared by the runners.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub group: GroupSpec,
    pub group_name: String,
    pub evolve: EvolveConfig,
    pub curves: Vec<BuiltCurve>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Result<Self, CliError> {
        let name = cfg.group.canonical();
        let group = make_group(&name).map_err(|e| CliError::Schema(format!("field `group`: {e}")))?;
        let scheme = Scheme::parse(&cfg.scheme.name).map_err(|e| CliError::Schema(format!("field `scheme.name`: {e}")))?;
        let mut evolve = EvolveConfig::new(scheme, cfg.scheme.h);
        evolve.max_steps = cfg.scheme.max_steps;
        if let Some(tol) = cfg.scheme.tolerance {
            evolve = evolve.with_tolerance(tol);
        }
        let curves = descriptor::build_all(&cfg.curves, group.algebra_dim())?;
        Ok(Self {
            cfg,
            group_name: group.name(),
            group,
            evolve,
            curves,
        })
    }

    pub fn dim(&self) -> usize {
        self.group.algebra_dim()
    }

    pub fn rng(&self, i: usize) -> Rng64 {
        random::split(self.cfg.seed, i as u64)
    }

    /// Number of samples: one per configured curve, else `samples`.
    pub fn count(&self) -> usize {
        if self.curves.is_empty() {
            self.cfg.samples
        } else {
            self.curves.len()
        }
    }

    pub fn scale(&self) -> f64 {
        self.cfg.params.curve_scale.unwrap_or(match self.group.kind() {
            GroupKind::UnitGroup(_) | GroupKind::Gl(_) => 0.15,
            _ => 0.8,
        })
    }

    /// Configured curve `i` (cyclically) or a random analytic curve on `[a, b]`.
    pub fn curve(&self, i: usize, rng: &mut Rng64, a: f64, b: f64) -> Result<Curve, CliError> {
        if self.curves.is_empty() {
            random::analytic_curve(rng, self.dim(), a, b, self.scale()).map_err(|e| CliError::numeric("curve", e))
        } else {
            Ok(self.curves[i % self.curves.len()].as_curve())
        }
    }

    pub fn row(&self, check: impl Into<String>, residual: f64, tolerance: f64) -> CheckRow {
        let check = check.into();
        let identity = identity(&check);
        CheckRow::at_most(check, &self.group_name, residual, tolerance, identity)
    }

    pub fn row_at_least(&self, check: impl Into<String>, residual: f64, tolerance: f64) -> CheckRow {
        let check = check.into();
        let identity = identity(&check);
        CheckRow::at_least(check, &self.group_name, residual, tolerance, identity)
    }

    /// `max(factor·estimate, floor)`
    pub fn estimate_tolerance(&self, estimate: f64) -> f64 {
        (self.cfg.tolerances.estimate_factor * estimate).max(self.cfg.tolerances.estimate_floor)
    }
}

const IDENTITIES: &[(&str, &str)] = &[
    ("abelian.closed_form", "int phi = exp(integral of phi)"),
    ("adjoint.groenwall", "w(Ad_[int^t phi] Y) <= exp(integral_r^t w(phi)) w(Y)"),
    ("adjoint.omori", "alpha' = [phi, alpha], alpha(r) = Y => alpha = Ad_[int^t phi] Y"),
    ("adjoint.series", "Ad_exp(tX) Y = sum_n t^n ad_X^n Y / n!"),
    ("approx.convolution", "sup |rho_n * phi - phi| <= Lip(phi) / n"),
    ("approx.iterated_bound", "q(I[p](0, ..., 0, phi)) <= max(1, |r' - r|)^p q(phi)"),
    ("approx.reconstruct", "phi = I[p](phi^(p-1)(r), ..., phi(r), phi^(p))"),
    ("der.inverse", "Der(mu^-1) = -Ad_mu^-1 Der(mu)"),
    ("der.product", "Der(mu nu) = Der(mu) + Ad_mu Der(nu)"),
    ("der.quotient", "Der(mu^-1 nu) = Ad_mu^-1 (Der(nu) - Der(mu))"),
    ("der.substitution", "Der(mu o rho) = rho' Der(mu) o rho"),
    ("duhamel", "d exp(X) = dL_exp(X) integral_0^1 Ad_exp(-sX) X' ds = dL_exp(X) sum (-ad_X)^n X' / (n+1)!"),
    ("exactness.piecewise_constant", "int phi = exp(h_n X_n) ... exp(h_1 X_1) for piecewise-constant phi"),
    ("mackey.decay", "|X_n|_op <= c 2^(-n^2)"),
    ("mackey.distance", "int glue = exp(X_N) ... exp(X_1) = g_N^-1 g_0"),
    ("muconvex.continuity", "p(int_r^t phi) <= integral_r^t q(phi) when integral q(phi) <= 1"),
    ("muconvex.find_o", "smallest c such that o = c u passes the probe"),
    ("muconvex.probe", "u(X_1 * ... * X_n) <= o(X_1) + ... + o(X_n) when the right side is <= 1"),
    ("muconvex.scalar_product", "(1 + e_1) ... (1 + e_n) - 1 <= 2 sum e_k when sum e_k <= 1/2"),
    ("order", "|int_h phi - int phi| ~ h^order"),
    ("param.directional", "d/dh int(h psi) at h = 0 equals integral psi"),
    ("param.evol_differential", "(d_0 Evol)(psi) = integral psi"),
    ("param.fd_slope", "finite-difference gap ~ step^2"),
    ("param.gap", "d/dx int Phi(x) = dL(integral Ad_[int^s Phi(x)]^-1 dPhi/dx(x, s) ds)"),
    ("param.hypotheses", "|Phi(x + h) - Phi(x)| <= L |h|"),
    ("reconstruct", "Der(int phi) = phi"),
    ("rule.a.product", "int^t phi int^t psi = int^t (phi + Ad_[int phi] psi)"),
    ("rule.b.quotient", "[int^t phi]^-1 int^t psi = int^t Ad_[int phi]^-1 (psi - phi)"),
    ("rule.c.inverse", "[int^t phi]^-1 = int^t -Ad_[int phi]^-1 phi"),
    ("rule.d.concat", "int_r^t phi = int_s^t phi int_r^s phi"),
    ("rule.e.substitution", "int_rho(r)^rho(t) phi = int_r^t rho' phi o rho"),
    ("rule.f.homomorphism", "Psi(int^t phi) = int^t dPsi o phi"),
    ("rule.reverse", "int reverse(phi) = [int phi]^-1"),
    ("smoothing.endpoint", "int psi = int phi for psi = varrho' phi o varrho"),
    ("smoothing.jumps", "psi^(k) continuous at breakpoints, k <= 4"),
];

/// The identity or estimate a check verifies, by longest matching prefix.
pub fn identity(check: &str) -> &'static str {
    IDENTITIES
        .iter()
        .filter(|(prefix, _)| check.starts_with(prefix))
        .max_by_key(|(prefix, _)| prefix.len())
        .map(|(_, id)| *id)
        .unwrap_or("")
}

/// Check names carry a zero-padded sample index so they sort numerically.
pub fn indexed(name: &str, i: usize) -> String {
    format!("{name}#{i:04}")
}

/// Runs `f` over `0..n` in parallel, keeping the index order.
pub fn per_sample<F>(n: usize, f: F) -> Result<Vec<CheckRow>, CliError>
where
    F: Fn(usize) -> Result<Vec<CheckRow>, CliError> + Sync + Send,
{
    let parts: Vec<Vec<CheckRow>> = (0..n).into_par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let mut report = match ctx.cfg.experiment {
        ExperimentKind::Identities => identities::run(ctx),
        ExperimentKind::Evolve => evolve::run(ctx),
        ExperimentKind::Duhamel => calculus::run_duhamel(ctx),
        ExperimentKind::ParamDerivative => calculus::run_param(ctx),
        ExperimentKind::Approx => approx::run(ctx),
        ExperimentKind::Muconvex => muconvex::run(ctx),
        ExperimentKind::Mackey => mackey::run(ctx),
        ExperimentKind::Groenwall => groenwall::run(ctx),
    }?;
    crate::report::sort_rows(&mut report.rows);
    Ok(report)
}

pub(crate) fn plain(rows: Vec<CheckRow>) -> RunReport {
    RunReport {
        rows,
        convergence: Vec::new(),
    }
}
