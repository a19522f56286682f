use prodint_core::evolution::{self, EvolveConfig, Scheme};
use prodint_core::lcvs::riemann_integral;

use super::{indexed, per_sample, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

fn sample(ctx: &Context<'_>, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let g = &ctx.group;
    let tol = &ctx.cfg.tolerances;
    let mut rng = ctx.rng(i);
    let phi = ctx.curve(i, &mut rng, 0.0, 1.0)?;
    let mut rows = Vec::new();
    if g.is_abelian() {
        let check = indexed("abelian.closed_form", i);
        let evo = evolution::evolve(g, &phi, &ctx.evolve).map_err(|e| CliError::numeric(&check, e))?;
        let integral = riemann_integral(&phi, phi.start(), phi.end()).map_err(|e| CliError::numeric(&check, e))?;
        rows.push(ctx.row(check, g.chart_distance(&g.exp(&integral), &evo.endpoint).value, tol.abelian));
        let check = indexed("reconstruct.residual", i);
        let r = evolution::reconstruct_residual(g, &phi, &ctx.evolve).map_err(|e| CliError::numeric(&check, e))?;
        rows.push(ctx.row(check, r, tol.reconstruct));
    } else {
        // self-convergence of Der(∮φ) − φ between h/2 and h/4
        let check = indexed(&format!("reconstruct.order.{}", ctx.evolve.scheme.name()), i);
        let at = |h: f64| {
            let mut cfg = ctx.evolve.clone();
            cfg.h = h;
            evolution::reconstruct_residual(g, &phi, &cfg.without_estimate()).map_err(|e| CliError::numeric(&check, e))
        };
        let (e1, e2) = (at(ctx.evolve.h / 2.0)?, at(ctx.evolve.h / 4.0)?);
        let order = (e1 / e2).log2();
        rows.push(ctx.row(check.clone(), (order - ctx.evolve.scheme.order() as f64).abs(), tol.order_band));
    }
    Ok(rows)
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let params = &ctx.cfg.params;
    let mut rows = per_sample(ctx.count(), |i| sample(ctx, i))?;
    let mut convergence = Vec::new();
    if !ctx.group.is_abelian() {
        let mut rng = ctx.rng(usize::MAX);
        let phi = ctx.curve(0, &mut rng, 0.0, 1.0)?;
        for name in &params.schemes {
            let scheme = Scheme::parse(name).map_err(|e| CliError::Schema(format!("field `params.schemes`: {e}")))?;
            let check = format!("order.{}", scheme.name());
            if params.hs.len() < 2 {
                return Err(CliError::Schema("field `params.hs`: need at least two step sizes".into()));
            }
            EvolveConfig::new(scheme, params.oracle_h).step_count(phi.length()).map_err(|e| CliError::numeric(&check, e))?;
            let table = evolution::convergence_study(&ctx.group, &phi, scheme, &params.hs, params.oracle_h)
                .map_err(|e| CliError::numeric(&check, e))?;
            rows.push(ctx.row(check, (table.order - scheme.order() as f64).abs(), ctx.cfg.tolerances.order_band));
            if ctx.cfg.output.convergence_tables != Some(false) {
                convergence.push((ctx.group_name.clone(), table));
            }
        }
    }
    Ok(RunReport { rows, convergence })
}
