//! Effort estimators behind one contract: the optimized method (`oabe`),
//! classic unadjusted retrieval (`abe`), and the adjustment baselines
//! (`lse`, `mlfe`, `rtm`, `ga`).
//!
//! The optimized method and the `ga` baseline work in normalized effort
//! units: a feature-space delta is commensurate with an effort only after
//! the train fold's efforts are min-max mapped onto [0,1]. Estimates are
//! always reported back in raw effort units.

mod baselines;
mod oabe_method;

pub use baselines::{
    estimate_abe_fixed, estimate_ga_adjusted, estimate_lse, estimate_mlfe, estimate_rtm,
    GaCoefficients,
};
pub use oabe_method::estimate_oabe;

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::dataset::{Dataset, FeatureKind, FeatureSchema, FeatureValue, Project};
use crate::error::{Error, Result};
use crate::optimizer::{BeesConfig, CandidateSolution};
use crate::similarity::{sorted_neighbors, Neighbor};

/// Fraction of the train fold's minimum effort used as the positivity floor
/// for de-normalized estimates.
const FLOOR_FRACTION: f64 = 0.1;

/// Upper clamp for an adjusted effort in normalized units; guards against
/// pathological extrapolation.
const ADJUSTED_CEIL: f64 = 1.5;

/// The estimation methods exposed by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Oabe,
    Abe,
    Lse,
    Mlfe,
    Rtm,
    Ga,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Oabe,
        Method::Abe,
        Method::Lse,
        Method::Mlfe,
        Method::Rtm,
        Method::Ga,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Oabe => "oabe",
            Method::Abe => "abe",
            Method::Lse => "lse",
            Method::Mlfe => "mlfe",
            Method::Rtm => "rtm",
            Method::Ga => "ga",
        }
    }

    /// Whether the method picks its own analogy count instead of using a
    /// swept fixed `k`.
    pub fn selects_k(&self) -> bool {
        matches!(self, Method::Oabe)
    }

    /// Whether the method consumes seeded randomness.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Method::Oabe | Method::Ga)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oabe" => Ok(Method::Oabe),
            "abe" => Ok(Method::Abe),
            "lse" => Ok(Method::Lse),
            "mlfe" => Ok(Method::Mlfe),
            "rtm" => Ok(Method::Rtm),
            "ga" => Ok(Method::Ga),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Min-max normalizer for the train fold's effort column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffortNormalizer {
    pub min_e: f64,
    pub max_e: f64,
}

impl EffortNormalizer {
    /// Fit on the train fold's raw efforts. A degenerate fold whose efforts
    /// are all equal falls back to a unit range so the mapping stays finite.
    pub fn from_efforts(efforts: &[f64]) -> Self {
        let min_e = efforts.iter().copied().fold(f64::INFINITY, f64::min);
        let max_e = efforts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { min_e, max_e }
    }

    fn range(&self) -> f64 {
        let r = self.max_e - self.min_e;
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }

    pub fn normalize(&self, effort: f64) -> f64 {
        (effort - self.min_e) / self.range()
    }

    pub fn denormalize(&self, value: f64) -> f64 {
        value * self.range() + self.min_e
    }

    /// Positivity floor applied to de-normalized estimates.
    pub fn floor(&self) -> f64 {
        self.min_e * FLOOR_FRACTION
    }
}

/// Per-test-project estimation output.
#[derive(Debug, Clone)]
pub struct EstimationRecord {
    pub target_id: usize,
    pub method: Method,
    /// Number of analogies used.
    pub k: usize,
    pub neighbors: Vec<Neighbor>,
    /// The weight matrix (`oabe`) or the fitted coefficient row (`ga`).
    pub weights: Option<Vec<Vec<f64>>>,
    /// Per-analogy adjustment, in the method's working units. `NaN` marks an
    /// analogy skipped by a size guard.
    pub deltas: Vec<f64>,
    /// Per-analogy adjusted effort, in the method's working units.
    pub adjusted: Vec<f64>,
    /// Final estimate in raw effort units; always positive.
    pub estimate: f64,
    pub optimizer_trace: Option<Vec<f64>>,
    /// Set when every analogy was skipped and the estimate fell back to the
    /// unadjusted mean.
    pub fallback: bool,
}

/// Signed per-feature gap between two scaled projects. Continuous features
/// yield value differences; categorical features yield 0 (a sign for a
/// symbol mismatch would be meaningless, so mismatches only count in
/// retrieval distance, never in adjustment).
pub(crate) fn signed_gaps(
    target: &Project,
    analog: &Project,
    schema: &FeatureSchema,
) -> Result<Vec<f64>> {
    let m = schema.num_features();
    if target.features.len() != m || analog.features.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: target.features.len().max(analog.features.len()),
        });
    }
    (0..m)
        .map(|j| match (&target.features[j], &analog.features[j]) {
            (FeatureValue::Continuous(t), FeatureValue::Continuous(a))
                if schema.kind(j) == FeatureKind::Continuous =>
            {
                Ok(t - a)
            }
            (FeatureValue::Categorical(_), FeatureValue::Categorical(_))
                if schema.kind(j) == FeatureKind::Categorical =>
            {
                Ok(0.0)
            }
            _ => Err(Error::Validation(
                "feature value kind does not match schema".into(),
            )),
        })
        .collect()
}

/// Weighted mean feature gap between a scaled target and one scaled analogy:
/// the signed compensation term added to that analogy's normalized effort.
pub fn delta(
    target: &Project,
    analog: &Project,
    row_weights: &[f64],
    schema: &FeatureSchema,
) -> Result<f64> {
    let m = schema.num_features();
    if row_weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: row_weights.len(),
        });
    }
    let gaps = signed_gaps(target, analog, schema)?;
    let weighted: f64 = row_weights.iter().zip(&gaps).map(|(w, g)| w * g).sum();
    Ok(weighted / m as f64)
}

/// Adjust one analogy's normalized effort by its delta, clamped to
/// `[0, 1.5]` in normalized units.
pub fn adjust(analog_effort_norm: f64, d: f64) -> f64 {
    (analog_effort_norm + d).clamp(0.0, ADJUSTED_CEIL)
}

/// Rank-weighted aggregation of adjusted efforts ordered by similarity rank:
/// weight `k+1-r` for rank `r`, normalized by `k(k+1)/2`.
pub fn aggregate(adjusted: &[f64]) -> Result<f64> {
    if adjusted.is_empty() {
        return Err(Error::Parameter("nothing to aggregate".into()));
    }
    let k = adjusted.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, value) in adjusted.iter().enumerate() {
        let rank_weight = (k - i) as f64;
        num += rank_weight * value;
        den += rank_weight;
    }
    Ok(num / den)
}

/// The search fitness: mean absolute weighted feature gap between the target
/// and its `s.k` nearest analogies, one weight row per analogy.
///
/// `target` and `train` are raw; scaling happens internally with the train
/// fit. The optimized estimator itself evaluates candidates against a
/// precomputed context, which this function matches exactly.
pub fn mr_fitness(target: &Project, train: &Dataset, s: &CandidateSolution) -> Result<f64> {
    let ctx = FoldContext::new(train, target)?;
    ctx.mean_gap(s)
}

/// Precomputed per-fold state shared by every estimator: the scaled train
/// view, the scaled target, and the full distance-sorted neighbor list
/// (retrieval for any `k` is a prefix of it).
pub(crate) struct FoldContext<'a> {
    pub train: &'a Dataset,
    pub train_scaled: Dataset,
    pub target_scaled: Project,
    pub neighbors: Vec<Neighbor>,
    pub normalizer: EffortNormalizer,
}

impl<'a> FoldContext<'a> {
    pub fn new(train: &'a Dataset, target: &Project) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InsufficientData { rows: 0, min: 1 });
        }
        let train_scaled = train.scale();
        let target_scaled = train.scale_project(target)?;
        let neighbors = sorted_neighbors(&target_scaled, &train_scaled)?;
        let normalizer = EffortNormalizer::from_efforts(&train.efforts());
        Ok(Self {
            train,
            train_scaled,
            target_scaled,
            neighbors,
            normalizer,
        })
    }

    /// The `k` nearest analogies.
    pub fn top_k(&self, k: usize) -> Result<&[Neighbor]> {
        if k == 0 || k > self.neighbors.len() {
            return Err(Error::Parameter(format!(
                "k = {k} out of range 1..={}",
                self.neighbors.len()
            )));
        }
        Ok(&self.neighbors[..k])
    }

    /// Raw train project behind a neighbor.
    pub fn raw_analog(&self, n: &Neighbor) -> &Project {
        self.train
            .project_by_id(n.project_id)
            .expect("neighbor ids come from the train view")
    }

    /// Scaled train project behind a neighbor.
    pub fn scaled_analog(&self, n: &Neighbor) -> &Project {
        self.train_scaled
            .project_by_id(n.project_id)
            .expect("neighbor ids come from the train view")
    }

    /// Mean absolute weighted gap for a candidate; the bees fitness.
    pub fn mean_gap(&self, s: &CandidateSolution) -> Result<f64> {
        let schema = self.train.schema();
        let picked = self.top_k(s.k)?;
        if s.weights.len() != s.k {
            return Err(Error::DimensionMismatch {
                expected: s.k,
                actual: s.weights.len(),
            });
        }
        let mut total = 0.0;
        for (neighbor, row) in picked.iter().zip(&s.weights) {
            let d = delta(&self.target_scaled, self.scaled_analog(neighbor), row, schema)?;
            total += d.abs();
        }
        Ok(total / s.k as f64)
    }

    /// Unadjusted mean of the raw efforts of the `k` nearest analogies.
    pub fn plain_mean(&self, k: usize) -> Result<f64> {
        let picked = self.top_k(k)?;
        let total: f64 = picked.iter().map(|n| self.raw_analog(n).effort).sum();
        Ok(total / k as f64)
    }
}

/// Keep a raw-unit estimate positive: non-positive values are replaced by
/// the train fold's positivity floor.
pub(crate) fn ensure_positive(estimate: f64, normalizer: &EffortNormalizer) -> f64 {
    if estimate > 0.0 {
        estimate
    } else {
        normalizer.floor()
    }
}

/// Options for the one-shot [`estimate`] dispatcher.
#[derive(Debug, Clone)]
pub struct EstimateOptions {
    /// Fixed analogy count for the baseline methods; ignored by `oabe`.
    pub k: usize,
    /// Regression-toward-the-mean retention factor.
    pub rtm_c: f64,
    pub bees: BeesConfig,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            k: 3,
            rtm_c: 0.5,
            bees: BeesConfig::default(),
        }
    }
}

/// Estimate one target project with the named method. `train` and `target`
/// are raw; each method scales and normalizes internally.
pub fn estimate(
    method: Method,
    train: &Dataset,
    target: &Project,
    opts: &EstimateOptions,
) -> Result<EstimationRecord> {
    match method {
        Method::Oabe => estimate_oabe(train, target, &opts.bees),
        Method::Abe => estimate_abe_fixed(train, target, opts.k),
        Method::Lse => estimate_lse(train, target, opts.k),
        Method::Mlfe => estimate_mlfe(train, target, opts.k),
        Method::Rtm => estimate_rtm(train, target, opts.k, opts.rtm_c),
        Method::Ga => {
            estimate_ga_adjusted(train, target, opts.k, GaCoefficients::Fit, &opts.bees)
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Build a raw dataset of continuous projects from `(features, effort)`
    /// rows.
    pub fn dataset_from_rows(names: &[&str], rows: &[(&[f64], f64)]) -> Dataset {
        let schema = FeatureSchema::continuous(names, "effort", "hours").unwrap();
        let projects = rows
            .iter()
            .enumerate()
            .map(|(i, (vals, effort))| Project {
                id: i,
                features: vals.iter().map(|&v| FeatureValue::Continuous(v)).collect(),
                effort: *effort,
            })
            .collect();
        Dataset::from_parts(schema, projects).unwrap()
    }

    pub fn target(values: &[f64]) -> Project {
        Project {
            id: usize::MAX,
            features: values.iter().map(|&v| FeatureValue::Continuous(v)).collect(),
            effort: 1.0,
        }
    }
}
