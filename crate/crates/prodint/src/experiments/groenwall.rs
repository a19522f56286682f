use prodint_core::adjoint::{self, GROENWALL_SLACK};
use prodint_core::{linalg, random};
use rand::Rng;

use super::{indexed, per_sample, plain, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

const GRID: usize = 65;

fn sample(ctx: &Context<'_>, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let (g, tol) = (&ctx.group, &ctx.cfg.tolerances);
    let d = ctx.dim();
    let mut rng = ctx.rng(i);
    let mut rows = Vec::new();

    // Ad_{exp(tX)}Y by its series against conjugation, ‖tX‖ ≤ 2
    let check = indexed("adjoint.series", i);
    let x = random::unit_vector(&mut rng, d);
    let t: f64 = 2.0 * (1.0 - rng.gen::<f64>());
    let y = random::unit_vector(&mut rng, d);
    let series = adjoint::ad_series(g, &x, &y, t).map_err(|e| CliError::numeric(&check, e))?;
    let direct = g.ad(&g.exp(&linalg::scale(&x, t)), &y);
    let gap = linalg::norm(&linalg::sub(&series.value, &direct));
    if g.is_nilpotent() {
        let mut row = ctx.row(indexed("adjoint.series_nilpotent", i), gap, tol.nilpotent);
        row.pass &= series.nilpotent_exact;
        rows.push(row);
    } else {
        rows.push(ctx.row(check, gap, tol.series));
    }

    let phi = ctx.curve(i, &mut rng, 0.0, 1.0)?;
    let y = random::unit_vector(&mut rng, d);
    let check = indexed("adjoint.omori", i);
    let om = adjoint::omori_transport(g, &phi, &y, &ctx.evolve).map_err(|e| CliError::numeric(&check, e))?;
    rows.push(ctx.row(check, om.residual, ctx.estimate_tolerance(om.error_estimate + om.evolution_estimate)));

    let check = indexed("adjoint.groenwall", i);
    let w = g.submultiplicative_seminorm();
    let r = adjoint::groenwall_check(g, &phi, &y, &w, &ctx.evolve, GRID).map_err(|e| CliError::numeric(&check, e))?;
    let excess = r.lhs.iter().zip(&r.rhs).map(|(l, r)| l - r).fold(f64::NEG_INFINITY, f64::max);
    let mut row = ctx.row(check, excess, GROENWALL_SLACK);
    row.pass = r.holds;
    rows.push(row);
    Ok(rows)
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    per_sample(ctx.count(), |i| sample(ctx, i)).map(plain)
}
