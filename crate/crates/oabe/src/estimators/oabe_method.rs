//! The optimized estimator: a per-target bees search over `(k, weights)`.

use crate::dataset::{Dataset, Project};
use crate::error::Result;
use crate::estimators::{
    adjust, aggregate, delta, EstimationRecord, FoldContext, Method,
};
use crate::optimizer::{run, BeesConfig};

/// Estimate one target project by searching, for this target alone, the
/// analogy count `k` and the `k x m` weight matrix that minimize the mean
/// absolute weighted feature gap, then applying the delta-adjust-aggregate
/// chain on normalized efforts.
///
/// `train` and `target` are raw; the train fold's scaling and effort
/// normalization are fit here. Deterministic for a fixed `config.seed`.
pub fn estimate_oabe(
    train: &Dataset,
    target: &Project,
    config: &BeesConfig,
) -> Result<EstimationRecord> {
    let ctx = FoldContext::new(train, target)?;
    let schema = train.schema();
    let m = schema.num_features();

    let config = config.with_k_max_capped(train.len());
    config.validate()?;

    // Candidates with an out-of-range k cannot be produced by the engine
    // once k_max is capped, so the fitness can unwrap safely.
    let fitness = |s: &crate::optimizer::CandidateSolution| {
        ctx.mean_gap(s).expect("candidate shape is engine-controlled")
    };
    let (best, trace) = run(&config, fitness, m)?;

    let picked = ctx.top_k(best.k)?.to_vec();
    let mut deltas = Vec::with_capacity(best.k);
    let mut adjusted = Vec::with_capacity(best.k);
    for (neighbor, row) in picked.iter().zip(&best.weights) {
        let d = delta(&ctx.target_scaled, ctx.scaled_analog(neighbor), row, schema)?;
        let analog_norm = ctx.normalizer.normalize(ctx.raw_analog(neighbor).effort);
        deltas.push(d);
        adjusted.push(adjust(analog_norm, d));
    }

    let estimate_norm = aggregate(&adjusted)?;
    let estimate = ctx
        .normalizer
        .denormalize(estimate_norm)
        .max(ctx.normalizer.floor());

    Ok(EstimationRecord {
        target_id: target.id,
        method: Method::Oabe,
        k: best.k,
        neighbors: picked,
        weights: Some(best.weights),
        deltas,
        adjusted,
        estimate,
        optimizer_trace: Some(trace),
        fallback: false,
    })
}
