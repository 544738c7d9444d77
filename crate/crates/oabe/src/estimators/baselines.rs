//! Baseline estimators: unadjusted analogy, size extrapolation, multi-size
//! extrapolation, regression toward the mean, and the fitted-coefficient
//! adjustment.

use crate::dataset::{Dataset, Project};
use crate::error::{Error, Result};
use crate::estimators::{
    ensure_positive, signed_gaps, EstimationRecord, FoldContext, Method,
};
use crate::optimizer::{search, BeesConfig, BoxSpace};
use crate::similarity::Neighbor;

/// Coefficients for the fitted-adjustment baseline: either supplied
/// directly or fit on the train fold.
#[derive(Debug, Clone)]
pub enum GaCoefficients {
    Fixed(Vec<f64>),
    Fit,
}

fn record(
    target: &Project,
    method: Method,
    neighbors: Vec<Neighbor>,
    deltas: Vec<f64>,
    adjusted: Vec<f64>,
    estimate: f64,
    fallback: bool,
) -> EstimationRecord {
    EstimationRecord {
        target_id: target.id,
        method,
        k: neighbors.len(),
        neighbors,
        weights: None,
        deltas,
        adjusted,
        estimate,
        optimizer_trace: None,
        fallback,
    }
}

/// Classic unadjusted analogy estimation: the plain mean of the raw efforts
/// of the `k` nearest analogies.
pub fn estimate_abe_fixed(train: &Dataset, target: &Project, k: usize) -> Result<EstimationRecord> {
    let ctx = FoldContext::new(train, target)?;
    let picked = ctx.top_k(k)?.to_vec();
    let efforts: Vec<f64> = picked.iter().map(|n| ctx.raw_analog(n).effort).collect();
    let estimate = efforts.iter().sum::<f64>() / k as f64;
    Ok(record(
        target,
        Method::Abe,
        picked,
        vec![0.0; k],
        efforts,
        estimate,
        false,
    ))
}

fn first_size_index(train: &Dataset) -> Result<usize> {
    train
        .schema()
        .size_indices()
        .first()
        .copied()
        .ok_or_else(|| Error::Parameter("no size column designated in the schema".into()))
}

fn raw_size(project: &Project, idx: usize) -> f64 {
    project.continuous_feature(idx).unwrap_or(0.0)
}

/// Shared shape of the size-based baselines: compute a per-analogy adjusted
/// effort (or `None` to skip it), average whatever survives, and fall back
/// to the unadjusted mean when nothing does.
fn size_adjusted_estimate(
    ctx: &FoldContext<'_>,
    target: &Project,
    method: Method,
    k: usize,
    per_analog: impl Fn(&Project) -> Option<f64>,
) -> Result<EstimationRecord> {
    let picked = ctx.top_k(k)?.to_vec();
    let mut deltas = Vec::with_capacity(k);
    let mut adjusted = Vec::with_capacity(k);
    let mut used = Vec::new();
    for neighbor in &picked {
        let analog = ctx.raw_analog(neighbor);
        match per_analog(analog) {
            Some(value) => {
                deltas.push(value - analog.effort);
                adjusted.push(value);
                used.push(value);
            }
            None => {
                deltas.push(f64::NAN);
                adjusted.push(f64::NAN);
            }
        }
    }
    let (estimate, fallback) = if used.is_empty() {
        (ctx.plain_mean(k)?, true)
    } else {
        (used.iter().sum::<f64>() / used.len() as f64, false)
    };
    let estimate = ensure_positive(estimate, &ctx.normalizer);
    Ok(record(
        target, method, picked, deltas, adjusted, estimate, fallback,
    ))
}

/// Linear size extrapolation: each analogy's effort is rescaled by the
/// target/analog ratio of the first designated size column, in raw units.
/// Analogies with non-positive size are skipped; if all are, the estimate
/// falls back to the unadjusted mean and the record is flagged.
pub fn estimate_lse(train: &Dataset, target: &Project, k: usize) -> Result<EstimationRecord> {
    let size_idx = first_size_index(train)?;
    let target_size = raw_size(target, size_idx);
    let ctx = FoldContext::new(train, target)?;
    size_adjusted_estimate(&ctx, target, Method::Lse, k, |analog| {
        let analog_size = raw_size(analog, size_idx);
        (analog_size > 0.0).then(|| analog.effort * (target_size / analog_size))
    })
}

/// Multi-size extrapolation: like [`estimate_lse`] but averaging the ratio
/// extrapolation over every designated size column with a positive analog
/// value.
pub fn estimate_mlfe(train: &Dataset, target: &Project, k: usize) -> Result<EstimationRecord> {
    let size_indices = train.schema().size_indices();
    if size_indices.is_empty() {
        return Err(Error::Parameter(
            "no size column designated in the schema".into(),
        ));
    }
    let target_sizes: Vec<f64> = size_indices.iter().map(|&i| raw_size(target, i)).collect();
    let ctx = FoldContext::new(train, target)?;
    size_adjusted_estimate(&ctx, target, Method::Mlfe, k, |analog| {
        let mut total = 0.0;
        let mut count = 0usize;
        for (&idx, &target_size) in size_indices.iter().zip(&target_sizes) {
            let analog_size = raw_size(analog, idx);
            if analog_size > 0.0 {
                total += analog.effort * (target_size / analog_size);
                count += 1;
            }
        }
        (count > 0).then(|| total / count as f64)
    })
}

/// Regression toward the mean: each analogy's productivity (effort / size)
/// is pulled toward the train fold's mean productivity by `1 - c`, then
/// multiplied by the target's size. `c = 1` reduces to pure size
/// extrapolation; `c = 0` ignores the analogies entirely.
pub fn estimate_rtm(
    train: &Dataset,
    target: &Project,
    k: usize,
    c: f64,
) -> Result<EstimationRecord> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Parameter(format!(
            "rtm retention factor must lie in [0,1], got {c}"
        )));
    }
    let size_idx = first_size_index(train)?;
    let target_size = raw_size(target, size_idx);

    let productivities: Vec<f64> = train
        .projects()
        .iter()
        .filter_map(|p| {
            let size = raw_size(p, size_idx);
            (size > 0.0).then(|| p.effort / size)
        })
        .collect();
    if productivities.is_empty() {
        return Err(Error::Validation(
            "no train project has a positive size; cannot compute productivities".into(),
        ));
    }
    let mean_productivity = productivities.iter().sum::<f64>() / productivities.len() as f64;

    let ctx = FoldContext::new(train, target)?;
    size_adjusted_estimate(&ctx, target, Method::Rtm, k, |analog| {
        let analog_size = raw_size(analog, size_idx);
        (analog_size > 0.0).then(|| {
            let p_analog = analog.effort / analog_size;
            let p_hat = p_analog + (1.0 - c) * (mean_productivity - p_analog);
            p_hat * target_size
        })
    })
}

/// Fitted-coefficient adjustment: every analogy's normalized effort is
/// shifted by a coefficient-weighted sum of its scaled feature gaps to the
/// target, with one global coefficient per feature, each in [-1, 1].
/// `GaCoefficients::Fit` fits the vector on the train fold by minimizing its
/// internal leave-one-out MMRE with the bees engine over a box space.
pub fn estimate_ga_adjusted(
    train: &Dataset,
    target: &Project,
    k: usize,
    coeffs: GaCoefficients,
    config: &BeesConfig,
) -> Result<EstimationRecord> {
    let schema = train.schema();
    let m = schema.num_features();
    let alpha = match coeffs {
        GaCoefficients::Fixed(alpha) => {
            if alpha.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: alpha.len(),
                });
            }
            if alpha.iter().any(|a| !(-1.0..=1.0).contains(a)) {
                return Err(Error::Parameter(
                    "ga coefficients must lie in [-1, 1]".into(),
                ));
            }
            alpha
        }
        GaCoefficients::Fit => fit_coefficients(train, k, config)?,
    };

    let ctx = FoldContext::new(train, target)?;
    let picked = ctx.top_k(k)?.to_vec();
    let mut deltas = Vec::with_capacity(k);
    let mut adjusted = Vec::with_capacity(k);
    for neighbor in &picked {
        let gaps = signed_gaps(&ctx.target_scaled, ctx.scaled_analog(neighbor), schema)?;
        let shift: f64 = alpha.iter().zip(&gaps).map(|(a, g)| a * g).sum();
        let effort_norm = ctx.normalizer.normalize(ctx.raw_analog(neighbor).effort);
        deltas.push(shift);
        adjusted.push(effort_norm + shift);
    }
    let mean_norm = adjusted.iter().sum::<f64>() / k as f64;
    let estimate = ctx
        .normalizer
        .denormalize(mean_norm)
        .max(ctx.normalizer.floor());

    let mut rec = record(target, Method::Ga, picked, deltas, adjusted, estimate, false);
    rec.weights = Some(vec![alpha]);
    Ok(rec)
}

/// Fit the adjustment coefficients on the train fold: minimize the fold's
/// internal leave-one-out MMRE over the [-1, 1]^m box. Retrieval, scaling,
/// and effort normalization are fixed to the fold (fit once, reused for
/// every inner split), so the objective is a pure function of the vector.
pub(crate) fn fit_coefficients(
    train: &Dataset,
    k: usize,
    config: &BeesConfig,
) -> Result<Vec<f64>> {
    let n = train.len();
    if n < 2 {
        return Err(Error::InsufficientData { rows: n, min: 2 });
    }
    let schema = train.schema();
    let m = schema.num_features();
    let k_inner = k.min(n - 1).max(1);

    let scaled = train.scale();
    let normalizer = crate::estimators::EffortNormalizer::from_efforts(&train.efforts());
    let floor = normalizer.floor();

    // Per inner target: its k nearest among the other fold rows, with the
    // gaps and normalized efforts the objective needs.
    struct InnerCase {
        actual: f64,
        analogs: Vec<(Vec<f64>, f64)>,
    }
    let mut cases = Vec::with_capacity(n);
    for (i, inner_target) in scaled.projects().iter().enumerate() {
        let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
        for (j, other) in scaled.projects().iter().enumerate() {
            if i == j {
                continue;
            }
            let d = crate::similarity::distance(inner_target, other, schema)?;
            candidates.push((d, j));
        }
        candidates.sort_by(|(da, ja), (db, jb)| {
            da.partial_cmp(db).expect("finite distances").then(ja.cmp(jb))
        });
        let analogs = candidates[..k_inner]
            .iter()
            .map(|&(_, j)| {
                let gaps = signed_gaps(inner_target, &scaled.projects()[j], schema)?;
                let effort_norm = normalizer.normalize(train.projects()[j].effort);
                Ok((gaps, effort_norm))
            })
            .collect::<Result<Vec<_>>>()?;
        cases.push(InnerCase {
            actual: train.projects()[i].effort,
            analogs,
        });
    }

    let objective = |alpha: &Vec<f64>| {
        let mut total_mre = 0.0;
        for case in &cases {
            let mut mean_norm = 0.0;
            for (gaps, effort_norm) in &case.analogs {
                let shift: f64 = alpha.iter().zip(gaps).map(|(a, g)| a * g).sum();
                mean_norm += effort_norm + shift;
            }
            mean_norm /= case.analogs.len() as f64;
            let predicted = normalizer.denormalize(mean_norm).max(floor);
            total_mre += (case.actual - predicted).abs() / case.actual;
        }
        total_mre / cases.len() as f64
    };

    let space = BoxSpace {
        dim: m,
        lo: -1.0,
        hi: 1.0,
    };
    let outcome = search(config, &space, objective)?;
    Ok(outcome.best)
}
