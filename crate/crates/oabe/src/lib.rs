//! Analogy-based software effort estimation.
//!
//! The toolkit estimates a new project's effort from the efforts of its most
//! similar historical projects. Its centerpiece is an optimized variant
//! (`oabe`) in which a bees-algorithm search picks, per target project, both
//! the number of analogies `k` and a `k x m` row-stochastic matrix of
//! per-analogy feature weights used to compensate feature gaps before
//! aggregation. Classic unadjusted retrieval (`abe`) and four adjustment
//! baselines (`lse`, `mlfe`, `rtm`, `ga`) sit behind the same estimation
//! contract, and an evaluation layer scores every method with the usual
//! effort-estimation error measures, Wilcoxon-gated win-tie-loss tallies,
//! and mean ranks of absolute error.
//!
//! Typical flow: load a CSV dataset against a schema, leave-one-out over its
//! projects, estimate each held-out project with every configured method,
//! then benchmark the methods against each other. All stochastic behavior
//! flows from a single master seed, so benchmark runs are reproducible
//! byte-for-byte, including under fold-level parallelism.

pub mod config;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod optimizer;
pub mod seeding;
pub mod similarity;
pub mod synth;

pub use config::RunConfig;
pub use dataset::{
    describe, load_dataset, loocv_splits, Dataset, DescriptiveStats, FeatureKind, FeatureSchema,
    FeatureValue, Fold, LoadSummary, Project,
};
pub use error::{Error, Result};
pub use estimators::{
    adjust, aggregate, delta, estimate, estimate_abe_fixed, estimate_ga_adjusted, estimate_lse,
    estimate_mlfe, estimate_oabe, estimate_rtm, mr_fitness, EffortNormalizer, EstimationRecord,
    GaCoefficients, Method,
};
pub use evaluation::{
    metrics, rank_summary, run_benchmark, wilcoxon_same, win_tie_loss, BenchmarkConfig,
    BenchmarkReport, Measure, MetricReport, WinTieLossTally,
};
pub use optimizer::{random_solution, neighborhood_move, run as run_bees, BeesConfig, CandidateSolution};
pub use similarity::{distance, retrieve, Neighbor};
