//! Bees-algorithm search over candidate solutions.
//!
//! A candidate pairs an analogy count `k` with a `k x m` weight matrix whose
//! rows live on the probability simplex. Scout solutions are sampled at
//! random; the best sites recruit neighborhood bees whose patch radius
//! shrinks while a site stalls; the non-selected population slots are
//! refilled with fresh scouts each iteration, which is the only place the
//! discrete `k` changes. The same engine, parameterized over a different
//! solution space, also fits the box-constrained coefficient vector of the
//! `ga` baseline.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// Patch radius multiplier applied when a site fails to improve.
const PATCH_SHRINK: f64 = 0.9;

/// Bees algorithm parameters. The population counts and initial patch size
/// default to the standard setting for this estimation task; the stopping
/// controls and `k_max` are artifact knobs.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeesConfig {
    /// Initial scout population size.
    pub n: usize,
    /// Number of selected sites.
    pub u: usize,
    /// Number of elite (best) sites among the selected.
    pub b: usize,
    /// Bees recruited per elite site.
    pub nep: usize,
    /// Bees recruited per remaining selected site.
    pub nsp: usize,
    /// Initial patch radius, as a fraction of the weight range.
    pub ngh: f64,
    pub max_iterations: usize,
    /// Stop after this many iterations without best-ever improvement.
    pub stagnation_limit: usize,
    /// Stop as soon as the best fitness drops to this value or below.
    pub fitness_epsilon: f64,
    /// Upper bound for the analogy count `k`.
    pub k_max: usize,
    pub seed: u64,
}

impl Default for BeesConfig {
    fn default() -> Self {
        Self {
            n: 100,
            u: 20,
            b: 10,
            nep: 30,
            nsp: 20,
            ngh: 0.05,
            max_iterations: 100,
            stagnation_limit: 20,
            fitness_epsilon: 1e-6,
            k_max: 10,
            seed: 0,
        }
    }
}

impl BeesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.u == 0 || self.b == 0 || self.nep == 0 || self.nsp == 0 {
            return Err(Error::Parameter("bees counts must be positive".into()));
        }
        if !(self.b <= self.u && self.u <= self.n) {
            return Err(Error::Parameter(format!(
                "need b <= u <= n, got b={} u={} n={}",
                self.b, self.u, self.n
            )));
        }
        if !(self.ngh > 0.0 && self.ngh < 1.0) {
            return Err(Error::Parameter(format!(
                "ngh must lie in (0,1), got {}",
                self.ngh
            )));
        }
        if self.k_max == 0 {
            return Err(Error::Parameter("k_max must be at least 1".into()));
        }
        if self.max_iterations == 0 || self.stagnation_limit == 0 {
            return Err(Error::Parameter("iteration budgets must be positive".into()));
        }
        if self.fitness_epsilon < 0.0 {
            return Err(Error::Parameter("fitness_epsilon must be >= 0".into()));
        }
        Ok(())
    }

    /// Copy of this config with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Copy of this config with `k_max` capped at `limit`.
    pub fn with_k_max_capped(&self, limit: usize) -> Self {
        Self {
            k_max: self.k_max.min(limit).max(1),
            ..self.clone()
        }
    }
}

/// One search point: an analogy count plus a row-stochastic `k x m` weight
/// matrix, one row per analogy.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub k: usize,
    pub weights: Vec<Vec<f64>>,
    pub fitness: Option<f64>,
}

impl CandidateSolution {
    /// Check the structural invariants: shape `k x m` and each row summing
    /// to one.
    pub fn is_valid(&self, m: usize) -> bool {
        self.k >= 1
            && self.weights.len() == self.k
            && self.weights.iter().all(|row| {
                row.len() == m
                    && row.iter().all(|w| *w >= 0.0 && w.is_finite())
                    && (row.iter().sum::<f64>() - 1.0).abs() <= 1e-9
            })
    }
}

/// Uniform draw from the (m-1)-simplex via normalized exponentials.
fn random_simplex_row(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..m)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = row.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / m as f64; m];
    }
    for w in &mut row {
        *w /= sum;
    }
    row
}

/// A fresh scout: `k` uniform on `1..=k_max`, each weight row uniform on
/// the simplex.
pub fn random_solution(rng: &mut ChaCha8Rng, m: usize, k_max: usize) -> CandidateSolution {
    let k = rng.random_range(1..=k_max);
    let weights = (0..k).map(|_| random_simplex_row(rng, m)).collect();
    CandidateSolution {
        k,
        weights,
        fitness: None,
    }
}

/// A neighborhood bee: same `k`, each weight nudged by uniform noise in
/// `[-radius, +radius]`, floored at zero, rows renormalized. A row that
/// collapses to all zeros is resampled from the simplex.
pub fn neighborhood_move(
    rng: &mut ChaCha8Rng,
    s: &CandidateSolution,
    radius: f64,
) -> CandidateSolution {
    let weights = s
        .weights
        .iter()
        .map(|row| {
            let mut moved: Vec<f64> = row
                .iter()
                .map(|w| (w + rng.random_range(-radius..=radius)).max(0.0))
                .collect();
            let sum: f64 = moved.iter().sum();
            if sum <= 1e-12 {
                return random_simplex_row(rng, row.len());
            }
            for w in &mut moved {
                *w /= sum;
            }
            moved
        })
        .collect();
    CandidateSolution {
        k: s.k,
        weights,
        fitness: None,
    }
}

/// Solution space the engine searches: how to scout and how to move inside
/// a patch.
pub trait SolutionSpace {
    type Sol: Clone;
    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Sol;
    fn neighbor(&self, rng: &mut ChaCha8Rng, s: &Self::Sol, radius: f64) -> Self::Sol;
}

/// The `k x m` row-stochastic matrix space used by the optimized estimator.
pub struct SimplexMatrixSpace {
    pub m: usize,
    pub k_max: usize,
}

impl SolutionSpace for SimplexMatrixSpace {
    type Sol = CandidateSolution;

    fn random(&self, rng: &mut ChaCha8Rng) -> CandidateSolution {
        random_solution(rng, self.m, self.k_max)
    }

    fn neighbor(&self, rng: &mut ChaCha8Rng, s: &CandidateSolution, radius: f64) -> CandidateSolution {
        neighborhood_move(rng, s, radius)
    }
}

/// A fixed-dimension box, used to fit the `ga` baseline's coefficient
/// vector. The patch radius is interpreted as a fraction of the box width.
pub struct BoxSpace {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl SolutionSpace for BoxSpace {
    type Sol = Vec<f64>;

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim)
            .map(|_| rng.random_range(self.lo..=self.hi))
            .collect()
    }

    fn neighbor(&self, rng: &mut ChaCha8Rng, s: &Vec<f64>, radius: f64) -> Vec<f64> {
        let step = radius * (self.hi - self.lo);
        s.iter()
            .map(|x| (x + rng.random_range(-step..=step)).clamp(self.lo, self.hi))
            .collect()
    }
}

struct Site<S> {
    sol: S,
    fitness: f64,
    radius: f64,
}

/// Outcome of one engine run.
pub struct SearchOutcome<S> {
    pub best: S,
    pub best_fitness: f64,
    /// Best-ever fitness after each iteration; monotone non-increasing.
    pub trace: Vec<f64>,
}

/// Run the bees loop over an arbitrary solution space. The fitness must be
/// deterministic for a fixed solution; lower is better.
pub fn search<Sp, F>(config: &BeesConfig, space: &Sp, fitness: F) -> Result<SearchOutcome<Sp::Sol>>
where
    Sp: SolutionSpace,
    F: Fn(&Sp::Sol) -> f64,
{
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);

    let mut population: Vec<Site<Sp::Sol>> = (0..config.n)
        .map(|_| {
            let sol = space.random(&mut rng);
            let fit = fitness(&sol);
            Site {
                sol,
                fitness: fit,
                radius: config.ngh,
            }
        })
        .collect();

    let best_idx = index_of_min(&population);
    let mut best = population[best_idx].sol.clone();
    let mut best_fitness = population[best_idx].fitness;
    let mut trace = vec![best_fitness];
    let mut stagnation = 0usize;

    while trace.len() < config.max_iterations && best_fitness > config.fitness_epsilon {
        if stagnation >= config.stagnation_limit {
            break;
        }

        // Stable sort keeps equal-fitness ordering deterministic.
        population.sort_by(|a, b| {
            a.fitness
                .partial_cmp(&b.fitness)
                .expect("fitness must not be NaN")
        });

        for site_idx in 0..config.u {
            let recruits = if site_idx < config.b {
                config.nep
            } else {
                config.nsp
            };
            let site = &population[site_idx];
            let mut champion: Option<(Sp::Sol, f64)> = None;
            for _ in 0..recruits {
                let cand = space.neighbor(&mut rng, &site.sol, site.radius);
                let fit = fitness(&cand);
                if champion.as_ref().is_none_or(|(_, f)| fit < *f) {
                    champion = Some((cand, fit));
                }
            }
            let (champ_sol, champ_fit) = champion.expect("recruits >= 1");
            let site = &mut population[site_idx];
            if champ_fit < site.fitness {
                site.sol = champ_sol;
                site.fitness = champ_fit;
            } else {
                site.radius *= PATCH_SHRINK;
            }
        }

        // Non-selected slots become fresh scouts; this is where k varies.
        for slot in config.u..config.n {
            let sol = space.random(&mut rng);
            let fit = fitness(&sol);
            population[slot] = Site {
                sol,
                fitness: fit,
                radius: config.ngh,
            };
        }

        let idx = index_of_min(&population);
        if population[idx].fitness < best_fitness {
            best_fitness = population[idx].fitness;
            best = population[idx].sol.clone();
            stagnation = 0;
        } else {
            stagnation += 1;
        }
        trace.push(best_fitness);
    }

    Ok(SearchOutcome {
        best,
        best_fitness,
        trace,
    })
}

fn index_of_min<S>(population: &[Site<S>]) -> usize {
    let mut idx = 0;
    for (i, site) in population.iter().enumerate() {
        if site.fitness < population[idx].fitness {
            idx = i;
        }
    }
    idx
}

/// Bees search over candidate solutions of `m` features. Returns the
/// best-ever solution (with its fitness filled in) and the per-iteration
/// best-fitness trace.
pub fn run<F>(config: &BeesConfig, fitness: F, m: usize) -> Result<(CandidateSolution, Vec<f64>)>
where
    F: Fn(&CandidateSolution) -> f64,
{
    if m == 0 {
        return Err(Error::Parameter("need at least one feature".into()));
    }
    let space = SimplexMatrixSpace {
        m,
        k_max: config.k_max,
    };
    let outcome = search(config, &space, fitness)?;
    let mut best = outcome.best;
    best.fitness = Some(outcome.best_fitness);
    Ok((best, outcome.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::cell::Cell;

    fn test_rng(seed: u64) -> ChaCha8Rng {
        rng_from_seed(seed)
    }

    #[test]
    fn random_solution_rows_sum_to_one() {
        let mut rng = test_rng(1);
        for _ in 0..100 {
            let s = random_solution(&mut rng, 4, 6);
            assert!(s.is_valid(4));
            assert!((1..=6).contains(&s.k));
        }
    }

    #[test]
    fn random_solution_single_feature_is_degenerate() {
        let mut rng = test_rng(2);
        let s = random_solution(&mut rng, 1, 5);
        for row in &s.weights {
            assert_relative_eq!(row[0], 1.0);
        }
    }

    #[test]
    fn random_solution_is_deterministic_under_seed() {
        let a = random_solution(&mut test_rng(7), 3, 5);
        let b = random_solution(&mut test_rng(7), 3, 5);
        assert_eq!(a, b);
    }

    #[test]
    fn random_solution_first_weight_mean_is_half() {
        // On the 1-simplex the first coordinate is uniform on [0,1].
        let mut rng = test_rng(3);
        let mut total = 0.0;
        let draws = 10_000;
        for _ in 0..draws {
            total += random_solution(&mut rng, 2, 3).weights[0][0];
        }
        let mean = total / draws as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn neighborhood_move_keeps_k_and_simplex() {
        let mut rng = test_rng(4);
        let s = random_solution(&mut rng, 3, 5);
        let moved = neighborhood_move(&mut rng, &s, 0.05);
        assert_eq!(moved.k, s.k);
        assert!(moved.is_valid(3));
    }

    #[test]
    fn neighborhood_move_zero_radius_is_identity() {
        let mut rng = test_rng(5);
        let s = random_solution(&mut rng, 3, 4);
        let moved = neighborhood_move(&mut rng, &s, 1e-15);
        for (ra, rb) in s.weights.iter().zip(&moved.weights) {
            for (a, b) in ra.iter().zip(rb) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn neighborhood_move_single_feature_stays_at_one() {
        let mut rng = test_rng(6);
        let s = CandidateSolution {
            k: 2,
            weights: vec![vec![1.0], vec![1.0]],
            fitness: None,
        };
        let moved = neighborhood_move(&mut rng, &s, 0.9);
        for row in &moved.weights {
            assert_relative_eq!(row[0], 1.0);
        }
    }

    #[test]
    fn neighborhood_move_stays_in_conservative_interval() {
        // Row (0.5, 0.5) at radius 0.05: perturb-then-normalize keeps each
        // weight inside [0.45/1.05, 0.55/0.95].
        let mut rng = test_rng(7);
        let s = CandidateSolution {
            k: 1,
            weights: vec![vec![0.5, 0.5]],
            fitness: None,
        };
        for _ in 0..2000 {
            let moved = neighborhood_move(&mut rng, &s, 0.05);
            for w in &moved.weights[0] {
                assert!((0.428..=0.579).contains(w), "weight {w} escaped");
            }
        }
    }

    #[test]
    fn run_stops_immediately_on_constant_zero_fitness() {
        let config = BeesConfig {
            seed: 11,
            ..BeesConfig::default()
        };
        let (best, trace) = run(&config, |_| 0.0, 3).unwrap();
        assert_eq!(trace.len(), 1);
        assert_relative_eq!(best.fitness.unwrap(), 0.0);
    }

    #[test]
    fn run_is_deterministic_under_seed() {
        let config = BeesConfig {
            seed: 123,
            k_max: 4,
            max_iterations: 15,
            ..BeesConfig::default()
        };
        let fitness = |s: &CandidateSolution| {
            (s.k as f64 - 2.0).abs() / 4.0 + s.weights.iter().map(|r| r[0]).sum::<f64>() * 0.01
        };
        let (best_a, trace_a) = run(&config, fitness, 2).unwrap();
        let (best_b, trace_b) = run(&config, fitness, 2).unwrap();
        assert_eq!(best_a, best_b);
        assert_eq!(trace_a, trace_b);
    }

    #[test]
    fn run_trace_is_monotone_non_increasing() {
        let config = BeesConfig {
            seed: 9,
            k_max: 5,
            max_iterations: 25,
            stagnation_limit: 25,
            fitness_epsilon: 0.0,
            ..BeesConfig::default()
        };
        let fitness = |s: &CandidateSolution| {
            let c = [0.3, 0.7];
            (s.k as f64 - 3.0).abs() / 5.0
                + s.weights
                    .iter()
                    .map(|row| {
                        let dot: f64 = row.iter().zip(c).map(|(w, cj)| w * cj).sum();
                        (dot - (c[0] * c[0] + c[1] * c[1])).abs()
                    })
                    .sum::<f64>()
        };
        let (_, trace) = run(&config, fitness, 2).unwrap();
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn run_finds_known_optimum_of_separable_fitness() {
        // Unique optimum at k = 3 with every row equal to c; verified by the
        // grid-search oracle in the acceptance suite.
        let c = [0.35, 0.65];
        let norm = c[0] * c[0] + c[1] * c[1];
        let config = BeesConfig {
            seed: 42,
            k_max: 5,
            ..BeesConfig::default()
        };
        let fitness = move |s: &CandidateSolution| {
            (s.k as f64 - 3.0).abs() / 5.0
                + s.weights
                    .iter()
                    .map(|row| {
                        let dot: f64 = row.iter().zip(c).map(|(w, cj)| w * cj).sum();
                        (dot - norm).abs()
                    })
                    .sum::<f64>()
        };
        let (best, _) = run(&config, fitness, 2).unwrap();
        assert_eq!(best.k, 3);
        assert!(best.fitness.unwrap() <= 0.05, "fitness {:?}", best.fitness);
    }

    #[test]
    fn every_evaluated_solution_is_row_stochastic() {
        let config = BeesConfig {
            seed: 31,
            k_max: 4,
            max_iterations: 10,
            ..BeesConfig::default()
        };
        let violations = Cell::new(0usize);
        let fitness = |s: &CandidateSolution| {
            if !s.is_valid(3) {
                violations.set(violations.get() + 1);
            }
            s.weights[0][0]
        };
        run(&config, fitness, 3).unwrap();
        assert_eq!(violations.get(), 0);
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        let mut config = BeesConfig::default();
        config.u = config.n + 1;
        assert!(config.validate().is_err());
        let mut config = BeesConfig::default();
        config.ngh = 1.5;
        assert!(config.validate().is_err());
        let mut config = BeesConfig::default();
        config.k_max = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn box_space_respects_bounds() {
        let space = BoxSpace {
            dim: 3,
            lo: -1.0,
            hi: 1.0,
        };
        let config = BeesConfig {
            seed: 77,
            max_iterations: 10,
            ..BeesConfig::default()
        };
        // Sphere objective; optimum at the origin.
        let outcome = search(&config, &space, |x: &Vec<f64>| {
            x.iter().map(|v| v * v).sum()
        })
        .unwrap();
        assert!(outcome.best.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(outcome.best_fitness < 0.05);
    }
}
