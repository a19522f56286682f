use prodint_core::evolution::{self, ResidualReport};
use prodint_core::group::Homomorphism;
use prodint_core::logderiv::{self, GroupCurve, FD_TOLERANCE};
use prodint_core::random;
use prodint_core::{GroupKind, GroupSpec};

use super::{indexed, per_sample, plain, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

fn default_hom(group: &GroupSpec) -> &'static str {
    match group.kind() {
        GroupKind::Su2 => "su2_to_so3",
        GroupKind::Heisenberg3 | GroupKind::Abelian(_) => "projection",
        _ => "identity",
    }
}

fn rule(ctx: &Context<'_>, name: &str, i: usize, r: Result<ResidualReport, prodint_core::Error>) -> Result<CheckRow, CliError> {
    let check = indexed(name, i);
    let r = r.map_err(|e| CliError::numeric(&check, e))?;
    Ok(ctx.row(check, r.residual, ctx.estimate_tolerance(r.estimate)))
}

fn sample(ctx: &Context<'_>, hom: &Homomorphism, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let (g, cfg, tol) = (&ctx.group, &ctx.evolve, &ctx.cfg.tolerances);
    let mut rng = ctx.rng(i);
    let mut rows = Vec::new();

    let (mu, nu) = if ctx.curves.is_empty() {
        (
            GroupCurve::random(g, &mut rng, 0.0, 1.0, ctx.scale()),
            GroupCurve::random(g, &mut rng, 0.0, 1.0, ctx.scale()),
        )
    } else {
        let n = ctx.curves.len();
        (
            GroupCurve::exp_of(g, &ctx.curves[i % n].as_curve()),
            GroupCurve::exp_of(g, &ctx.curves[(i + 1) % n].as_curve()),
        )
    };
    let check = indexed("der.curves", i);
    let mu = mu.map_err(|e| CliError::numeric(&check, e))?;
    let nu = nu.map_err(|e| CliError::numeric(&check, e))?;
    let der_tol = if mu.is_analytic() && nu.is_analytic() { tol.der_rules } else { FD_TOLERANCE };
    let (a, b) = (mu.start(), mu.end());
    let rho = random::monotone_reparam(&mut rng, a, b).map_err(|e| CliError::numeric(&check, e))?;
    let der: [(&str, Result<f64, prodint_core::Error>); 4] = [
        ("der.product", logderiv::product_rule_residual(&mu, &nu)),
        ("der.inverse", logderiv::inverse_rule_residual(&mu)),
        ("der.quotient", logderiv::quotient_rule_residual(&mu, &nu)),
        ("der.substitution", logderiv::substitution_rule_residual(&mu, &rho)),
    ];
    for (name, r) in der {
        let check = indexed(name, i);
        let r = r.map_err(|e| CliError::numeric(&check, e))?;
        rows.push(ctx.row(check, r, der_tol));
    }

    let phi = ctx.curve(i, &mut rng, 0.0, 1.0)?;
    let psi = ctx.curve(i + 1, &mut rng, phi.start(), phi.end())?;
    let psi = if psi.start() == phi.start() && psi.end() == phi.end() { psi } else { phi.scale(-0.5) };
    let (r, r2) = (phi.start(), phi.end());
    let len = r2 - r;
    let cuts: Vec<f64> = ctx.cfg.params.breakpoints.iter().map(|&s| r + s * len).collect();
    let rho = random::monotone_reparam(&mut rng, r, r2).map_err(|e| CliError::numeric(indexed("rule.e.substitution", i), e))?;
    rows.push(rule(ctx, "rule.a.product", i, evolution::product_identity_residual(g, &phi, &psi, cfg))?);
    rows.push(rule(ctx, "rule.b.quotient", i, evolution::quotient_identity_residual(g, &phi, &psi, cfg))?);
    rows.push(rule(ctx, "rule.c.inverse", i, evolution::inverse_identity_residual(g, &phi, cfg))?);
    rows.push(rule(ctx, "rule.d.concat", i, evolution::concat_residual_with(g, &phi, &cuts, cfg))?);
    rows.push(rule(ctx, "rule.e.substitution", i, evolution::substitution_check(g, &phi, &rho, cfg))?);
    rows.push(rule(ctx, "rule.f.homomorphism", i, evolution::hom_transport_residual(hom, &phi, cfg))?);
    rows.push(rule(ctx, "rule.reverse", i, evolution::reverse_residual(g, &phi, cfg))?);

    // piecewise-constant input against the product of exponentials
    let check = indexed("exactness.piecewise_constant", i);
    let pw = random::piecewise_curve(&mut rng, ctx.dim(), 0.0, 1.0, 3, true, ctx.scale()).map_err(|e| CliError::numeric(&check, e))?;
    let evo = evolution::evolve_piecewise(g, &pw, cfg).map_err(|e| CliError::numeric(&check, e))?;
    let mut oracle = g.identity();
    for seg in pw.segments() {
        let x: Vec<f64> = seg.eval(seg.start()).iter().map(|v| v * seg.length()).collect();
        oracle = g.mul(&g.exp(&x), &oracle);
    }
    rows.push(ctx.row(check, g.chart_distance(&evo.endpoint, &oracle).value, tol.exactness));
    Ok(rows)
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let name = ctx.cfg.params.homomorphism.clone().unwrap_or_else(|| default_hom(&ctx.group).to_string());
    let hom = Homomorphism::by_name(&name, &ctx.group).map_err(|e| CliError::Schema(format!("field `params.homomorphism`: {e}")))?;
    if hom.source().kind() != ctx.group.kind() {
        return Err(CliError::Schema(format!(
            "field `params.homomorphism`: `{name}` starts at {}, not {}",
            hom.source().name(),
            ctx.group_name
        )));
    }
    per_sample(ctx.count(), |i| sample(ctx, &hom, i)).map(plain)
}
