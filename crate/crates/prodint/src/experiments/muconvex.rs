use prodint_core::muconvex::{self, ProbeReport, PROBE_SLACK};
use prodint_core::random;
use prodint_core::GroupKind;
use rand::Rng;
use rayon::prelude::*;

use super::{plain, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

const CHUNK: usize = 512;
/// Offset of the scalar-inequality streams, disjoint from the probe samples.
const SCALAR_STREAM: u64 = 1 << 40;
const FIND_O_SAMPLES: usize = 2000;

fn probe_row(ctx: &Context<'_>, check: &str, r: &ProbeReport) -> CheckRow {
    let mut row = ctx.row(check, r.worst_margin, PROBE_SLACK);
    row.pass = r.passed();
    row
}

/// Worst `((1+ε₁)⋯(1+εₙ) − 1) − 2Σεₖ` over random tuples with `Σεₖ ≤ ½`.
fn scalar_worst(seed: u64, tuples: usize) -> f64 {
    (0..tuples)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::split(seed, SCALAR_STREAM + i as u64);
            let n = rng.gen_range(1..=16);
            let total = 0.5 * (1.0 - rng.gen::<f64>());
            let eps: Vec<f64> = random::dirichlet(&mut rng, n).iter().map(|w| w * total).collect();
            -muconvex::product_bound_slack(&eps)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let (g, params) = (&ctx.group, &ctx.cfg.params);
    let seed = ctx.cfg.seed;
    let u = g.operator_seminorm();
    let factor = params.o_factor.unwrap_or(if g.is_abelian() { 1.0 } else { 2.0 });
    let o = u.clone().scaled(factor);
    let mut rows = Vec::new();

    // validates that o dominates u
    muconvex::mu_convex_probe(g, &u, &o, params.n_max, 0, seed).map_err(|e| CliError::Schema(format!("field `params.o_factor`: {e}")))?;
    let n = ctx.cfg.samples;
    let chunks: Vec<ProbeReport> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| muconvex::mu_convex_probe_range(g, &u, &o, params.n_max, k * CHUNK..((k + 1) * CHUNK).min(n), seed))
        .collect();
    let report = chunks.into_iter().reduce(ProbeReport::merge);
    if let Some(report) = report {
        rows.push(probe_row(ctx, "muconvex.probe", &report));
    }

    let [lo, hi] = params.search;
    let (c, _) = muconvex::find_o(g, &u, lo, hi, params.n_max, n.min(FIND_O_SAMPLES), seed)
        .map_err(|e| CliError::numeric("muconvex.find_o", e))?;
    rows.push(ctx.row("muconvex.find_o", c, factor));

    if params.scalar_tuples > 0 {
        rows.push(ctx.row("muconvex.scalar_product", scalar_worst(seed, params.scalar_tuples), 0.0));
    }

    if matches!(g.kind(), GroupKind::So3 | GroupKind::Su2 | GroupKind::Abelian(_) | GroupKind::Torus(_)) {
        let mut rng = ctx.rng(usize::MAX);
        let phis = (0..ctx.count().min(8))
            .map(|i| ctx.curve(i, &mut rng, 0.0, 1.0))
            .collect::<Result<Vec<_>, _>>()?;
        let r = muconvex::continuity_bound_check(g, &u, &u, &phis, &ctx.evolve).map_err(|e| CliError::numeric("muconvex.continuity", e))?;
        let mut row = ctx.row("muconvex.continuity", r.violations as f64, 0.0);
        row.pass = r.passed();
        rows.push(row);
    }
    Ok(plain(rows))
}
