//! Project-to-project distance and deterministic nearest-analogy retrieval.

use crate::dataset::{Dataset, FeatureKind, FeatureSchema, FeatureValue, Project};
use crate::error::{Error, Result};

/// One retrieved analogy: which train project, how far, and its similarity
/// rank (1 = nearest).
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    /// Stable id of the train project.
    pub project_id: usize,
    pub distance: f64,
    pub rank: usize,
}

fn feature_gap(a: &FeatureValue, b: &FeatureValue, kind: FeatureKind) -> Result<f64> {
    match (kind, a, b) {
        (FeatureKind::Continuous, FeatureValue::Continuous(x), FeatureValue::Continuous(y)) => {
            Ok(x - y)
        }
        (FeatureKind::Categorical, FeatureValue::Categorical(x), FeatureValue::Categorical(y)) => {
            Ok(if x == y { 0.0 } else { 1.0 })
        }
        _ => Err(Error::Validation(
            "feature value kind does not match schema".into(),
        )),
    }
}

/// Euclidean distance over scaled features with the mean (rather than the
/// sum) inside the root, so values are comparable across feature counts.
/// Categorical features contribute 0/1 overlap gaps.
pub fn distance(a: &Project, b: &Project, schema: &FeatureSchema) -> Result<f64> {
    let m = schema.num_features();
    if a.features.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: a.features.len(),
        });
    }
    if b.features.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: b.features.len(),
        });
    }
    let mut total = 0.0;
    for j in 0..m {
        let gap = feature_gap(&a.features[j], &b.features[j], schema.kind(j))?;
        total += gap * gap;
    }
    Ok((total / m as f64).sqrt())
}

/// All train projects sorted by distance to `target`, ties broken by
/// ascending project id. Retrieval for any `k` is a prefix of this list.
pub fn sorted_neighbors(target: &Project, train: &Dataset) -> Result<Vec<Neighbor>> {
    let mut entries: Vec<(f64, usize)> = train
        .projects()
        .iter()
        .map(|p| Ok((distance(target, p, train.schema())?, p.id)))
        .collect::<Result<_>>()?;
    entries.sort_by(|(da, ia), (db, ib)| {
        da.partial_cmp(db)
            .expect("distances are finite")
            .then(ia.cmp(ib))
    });
    Ok(entries
        .into_iter()
        .enumerate()
        .map(|(i, (distance, project_id))| Neighbor {
            project_id,
            distance,
            rank: i + 1,
        })
        .collect())
}

/// The `k` nearest analogies of `target` in `train`, deterministically
/// ordered: ascending distance, ties broken by ascending project id, ranks
/// `1..=k`.
pub fn retrieve(target: &Project, train: &Dataset, k: usize) -> Result<Vec<Neighbor>> {
    if k == 0 || k > train.len() {
        return Err(Error::Parameter(format!(
            "k = {k} out of range 1..={}",
            train.len()
        )));
    }
    let mut all = sorted_neighbors(target, train)?;
    all.truncate(k);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureSchema;
    use approx::assert_relative_eq;

    fn project(id: usize, values: &[f64], effort: f64) -> Project {
        Project {
            id,
            features: values.iter().map(|&v| FeatureValue::Continuous(v)).collect(),
            effort,
        }
    }

    fn two_feature_schema() -> FeatureSchema {
        FeatureSchema::continuous(&["f1", "f2"], "effort", "hours").unwrap()
    }

    #[test]
    fn distance_of_identical_projects_is_zero() {
        let schema = two_feature_schema();
        let a = project(0, &[0.0, 0.0], 1.0);
        assert_relative_eq!(distance(&a, &a, &schema).unwrap(), 0.0);
    }

    #[test]
    fn distance_full_gap_on_both_features_is_one() {
        let schema = two_feature_schema();
        let a = project(0, &[0.0, 0.0], 1.0);
        let b = project(1, &[1.0, 1.0], 2.0);
        // sqrt((1 + 1) / 2) = 1
        assert_relative_eq!(distance(&a, &b, &schema).unwrap(), 1.0);
    }

    #[test]
    fn categorical_mismatch_costs_a_full_gap() {
        let schema = FeatureSchema::new(
            vec!["type".into()],
            vec![FeatureKind::Categorical],
            "effort",
            vec![],
            "hours",
        )
        .unwrap();
        let a = Project {
            id: 0,
            features: vec![FeatureValue::Categorical("web".into())],
            effort: 1.0,
        };
        let b = Project {
            id: 1,
            features: vec![FeatureValue::Categorical("mis".into())],
            effort: 2.0,
        };
        assert_relative_eq!(distance(&a, &b, &schema).unwrap(), 1.0);
        assert_relative_eq!(distance(&a, &a, &schema).unwrap(), 0.0);
    }

    #[test]
    fn distance_dimension_mismatch_errors() {
        let schema = two_feature_schema();
        let a = project(0, &[0.0], 1.0);
        let b = project(1, &[1.0, 1.0], 2.0);
        assert!(matches!(
            distance(&a, &b, &schema).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }

    fn train_of(points: &[(&[f64], f64)]) -> Dataset {
        let schema = two_feature_schema();
        let projects = points
            .iter()
            .enumerate()
            .map(|(i, (vals, effort))| project(i, vals, *effort))
            .collect();
        Dataset::from_parts(schema, projects).unwrap()
    }

    #[test]
    fn retrieve_finds_exact_duplicate_first() {
        let train = train_of(&[
            (&[0.1, 0.9], 10.0),
            (&[0.4, 0.4], 20.0),
            (&[0.2, 0.3], 30.0),
            (&[0.9, 0.1], 40.0),
            (&[0.5, 0.5], 50.0),
            (&[0.7, 0.7], 60.0),
        ]);
        let target = project(99, &[0.5, 0.5], 0.0);
        let got = retrieve(&target, &train, 1).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].project_id, 4);
        assert_relative_eq!(got[0].distance, 0.0);
        assert_eq!(got[0].rank, 1);
    }

    #[test]
    fn retrieve_breaks_ties_by_smaller_id() {
        // Projects 0 and 1 are mirror images of each other around the target.
        let train = train_of(&[(&[0.4, 0.5], 10.0), (&[0.6, 0.5], 20.0), (&[0.9, 0.9], 30.0)]);
        let target = project(99, &[0.5, 0.5], 0.0);
        let got = retrieve(&target, &train, 1).unwrap();
        assert_eq!(got[0].project_id, 0);
    }

    #[test]
    fn retrieve_orders_by_distance_and_assigns_ranks() {
        let train = train_of(&[(&[0.2, 0.0], 1.0), (&[0.1, 0.0], 2.0), (&[0.3, 0.0], 3.0)]);
        let target = project(99, &[0.0, 0.0], 0.0);
        let got = retrieve(&target, &train, 2).unwrap();
        assert_eq!(got[0].project_id, 1);
        assert_eq!(got[1].project_id, 0);
        assert_eq!(got[0].rank, 1);
        assert_eq!(got[1].rank, 2);
        assert!(got[0].distance <= got[1].distance);
    }

    #[test]
    fn retrieve_rejects_out_of_range_k() {
        let train = train_of(&[(&[0.1, 0.1], 1.0), (&[0.2, 0.2], 2.0), (&[0.3, 0.3], 3.0)]);
        let target = project(99, &[0.0, 0.0], 0.0);
        assert!(matches!(
            retrieve(&target, &train, 0).unwrap_err(),
            Error::Parameter(_)
        ));
        assert!(matches!(
            retrieve(&target, &train, 4).unwrap_err(),
            Error::Parameter(_)
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_points(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 3..n)
        }

        proptest! {
            #[test]
            fn distance_is_symmetric_and_nonnegative(
                (ax, ay) in (0.0..1.0f64, 0.0..1.0f64),
                (bx, by) in (0.0..1.0f64, 0.0..1.0f64),
            ) {
                let schema = two_feature_schema();
                let a = project(0, &[ax, ay], 1.0);
                let b = project(1, &[bx, by], 1.0);
                let d_ab = distance(&a, &b, &schema).unwrap();
                let d_ba = distance(&b, &a, &schema).unwrap();
                prop_assert!(d_ab >= 0.0);
                prop_assert!((d_ab - d_ba).abs() < 1e-15);
                prop_assert!((distance(&a, &a, &schema).unwrap()).abs() < 1e-15);
            }

            #[test]
            fn retrieve_k_is_prefix_of_k_plus_one(points in arb_points(20)) {
                let train = {
                    let schema = two_feature_schema();
                    let projects = points
                        .iter()
                        .enumerate()
                        .map(|(i, &(x, y))| project(i, &[x, y], 1.0 + i as f64))
                        .collect();
                    Dataset::from_parts(schema, projects).unwrap()
                };
                let target = project(999, &[0.5, 0.5], 1.0);
                for k in 1..train.len() {
                    let small = retrieve(&target, &train, k).unwrap();
                    let big = retrieve(&target, &train, k + 1).unwrap();
                    prop_assert_eq!(&small[..], &big[..k]);
                }
            }

            #[test]
            fn retrieve_matches_brute_force_sort(points in arb_points(16)) {
                let train = {
                    let schema = two_feature_schema();
                    let projects = points
                        .iter()
                        .enumerate()
                        .map(|(i, &(x, y))| project(i, &[x, y], 1.0 + i as f64))
                        .collect();
                    Dataset::from_parts(schema, projects).unwrap()
                };
                let target = project(999, &[0.25, 0.75], 1.0);
                // Brute-force oracle: recompute all distances with sum-based
                // arithmetic, full sort, take prefix.
                let m = 2.0;
                let mut oracle: Vec<(f64, usize)> = train
                    .projects()
                    .iter()
                    .map(|p| {
                        let dx = p.continuous_feature(0).unwrap() - 0.25;
                        let dy = p.continuous_feature(1).unwrap() - 0.75;
                        (((dx * dx + dy * dy) / m).sqrt(), p.id)
                    })
                    .collect();
                oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let k = train.len();
                let got = retrieve(&target, &train, k).unwrap();
                for (n, (d, id)) in got.iter().zip(oracle) {
                    prop_assert_eq!(n.project_id, id);
                    prop_assert!((n.distance - d).abs() < 1e-12);
                }
            }
        }
    }
}
