//! Dataset loading, validation, scaling, description, and evaluation splits.
//!
//! Datasets are immutable after construction: scaling and fold extraction
//! return new values, so views can be shared freely across parallel workers.

mod schema;

pub use schema::{FeatureKind, FeatureSchema};

use std::io::Read;

use crate::error::{Error, Result};

/// Minimum number of usable projects in a loadable dataset.
const MIN_PROJECTS: usize = 3;

/// Missing-value markers accepted in CSV cells.
fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "?"
}

/// One feature value: a real for continuous features, a symbol for
/// categorical ones.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Continuous(f64),
    Categorical(String),
}

impl FeatureValue {
    pub fn as_continuous(&self) -> Option<f64> {
        match self {
            FeatureValue::Continuous(v) => Some(*v),
            FeatureValue::Categorical(_) => None,
        }
    }
}

/// One historical or target software project.
#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    /// Stable index assigned at load time; survives fold extraction.
    pub id: usize,
    pub features: Vec<FeatureValue>,
    /// Actual effort, always positive, in the schema's effort unit.
    pub effort: f64,
}

impl Project {
    /// Raw value of the feature at `idx`, if continuous.
    pub fn continuous_feature(&self, idx: usize) -> Option<f64> {
        self.features.get(idx).and_then(FeatureValue::as_continuous)
    }
}

/// Per-feature min-max scaling parameters fitted on the data they describe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleParams {
    pub min: f64,
    pub max: f64,
}

impl ScaleParams {
    /// Map a raw value into fitted [0,1] coordinates. Out-of-range inputs
    /// extrapolate rather than clamp. A degenerate fit (min == max, possible
    /// only in fold views) shifts by min with unit range.
    pub fn apply(&self, x: f64) -> f64 {
        let range = self.max - self.min;
        if range > 0.0 {
            (x - self.min) / range
        } else {
            x - self.min
        }
    }

    /// Inverse of [`ScaleParams::apply`].
    pub fn invert(&self, y: f64) -> f64 {
        let range = self.max - self.min;
        if range > 0.0 {
            y * range + self.min
        } else {
            y + self.min
        }
    }
}

/// Outcome counters from a CSV load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadSummary {
    pub rows_read: usize,
    pub rows_dropped: usize,
}

/// An ordered, validated collection of projects plus the scaling parameters
/// fitted on them.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: FeatureSchema,
    projects: Vec<Project>,
    /// One entry per feature; `None` for categorical features.
    scaling: Vec<Option<ScaleParams>>,
    /// Whether the stored feature values are already in scaled coordinates.
    scaled: bool,
}

/// One leave-one-out fold: the held-out project and the remaining projects
/// with scaling refit on them alone.
#[derive(Debug, Clone)]
pub struct Fold {
    pub train: Dataset,
    pub test: Project,
}

impl Dataset {
    /// Build a dataset from already-parsed projects, enforcing the full
    /// invariants: at least [`MIN_PROJECTS`] rows, positive efforts, matching
    /// feature counts, and no constant continuous feature.
    pub fn from_parts(schema: FeatureSchema, projects: Vec<Project>) -> Result<Self> {
        if projects.len() < MIN_PROJECTS {
            return Err(Error::InsufficientData {
                rows: projects.len(),
                min: MIN_PROJECTS,
            });
        }
        let ds = Self::assemble(schema, projects)?;
        for (idx, params) in ds.scaling.iter().enumerate() {
            if let Some(p) = params {
                if p.min >= p.max {
                    return Err(Error::Validation(format!(
                        "continuous feature '{}' is constant",
                        ds.schema.feature_names[idx]
                    )));
                }
            }
        }
        Ok(ds)
    }

    /// Shared construction: validates row shape and kinds, fits scaling.
    /// Constant features are tolerated here; full datasets reject them in
    /// [`Dataset::from_parts`], fold views keep them with a degenerate fit.
    fn assemble(schema: FeatureSchema, projects: Vec<Project>) -> Result<Self> {
        let m = schema.num_features();
        for p in &projects {
            if p.features.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: p.features.len(),
                });
            }
            if !(p.effort > 0.0) || !p.effort.is_finite() {
                return Err(Error::Validation(format!(
                    "project {} has non-positive effort {}",
                    p.id, p.effort
                )));
            }
            for (j, v) in p.features.iter().enumerate() {
                match (schema.kind(j), v) {
                    (FeatureKind::Continuous, FeatureValue::Continuous(x)) => {
                        if !x.is_finite() {
                            return Err(Error::Validation(format!(
                                "project {} feature '{}' is not finite",
                                p.id, schema.feature_names[j]
                            )));
                        }
                    }
                    (FeatureKind::Categorical, FeatureValue::Categorical(_)) => {}
                    _ => {
                        return Err(Error::Validation(format!(
                            "project {} feature '{}' has the wrong kind",
                            p.id, schema.feature_names[j]
                        )));
                    }
                }
            }
        }
        let scaling = fit_scaling(&schema, &projects);
        Ok(Self {
            schema,
            projects,
            scaling,
            scaled: false,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    /// Scaling parameters fitted on this dataset's raw values.
    pub fn scaling(&self) -> &[Option<ScaleParams>] {
        &self.scaling
    }

    /// Look up a project by its stable id.
    pub fn project_by_id(&self, id: usize) -> Option<&Project> {
        // Ids are assigned in row order and folds preserve order, so a
        // binary search works on any view.
        self.projects
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|pos| &self.projects[pos])
    }

    /// Efforts of all projects in row order.
    pub fn efforts(&self) -> Vec<f64> {
        self.projects.iter().map(|p| p.effort).collect()
    }

    /// Map every continuous feature into [0,1] using the parameters fitted
    /// on this dataset. Categorical features and the effort column are left
    /// untouched. Idempotent: scaling an already-scaled dataset is a no-op.
    pub fn scale(&self) -> Dataset {
        if self.scaled {
            return self.clone();
        }
        let projects = self
            .projects
            .iter()
            .map(|p| self.scale_project_unchecked(p))
            .collect();
        Dataset {
            schema: self.schema.clone(),
            projects,
            scaling: self.scaling.clone(),
            scaled: true,
        }
    }

    /// Scale a single project's continuous features with this dataset's
    /// fitted parameters. Values outside the fitted range extrapolate beyond
    /// [0,1]; they are deliberately not clamped.
    pub fn scale_project(&self, project: &Project) -> Result<Project> {
        if project.features.len() != self.schema.num_features() {
            return Err(Error::DimensionMismatch {
                expected: self.schema.num_features(),
                actual: project.features.len(),
            });
        }
        Ok(self.scale_project_unchecked(project))
    }

    fn scale_project_unchecked(&self, project: &Project) -> Project {
        let features = project
            .features
            .iter()
            .zip(&self.scaling)
            .map(|(v, params)| match (v, params) {
                (FeatureValue::Continuous(x), Some(p)) => FeatureValue::Continuous(p.apply(*x)),
                _ => v.clone(),
            })
            .collect();
        Project {
            id: project.id,
            features,
            effort: project.effort,
        }
    }

    /// The raw (unscaled) values of a numeric column, either a continuous
    /// feature or the effort column.
    fn raw_column(&self, column: &str) -> Result<Vec<f64>> {
        if column == self.schema.effort_column {
            return Ok(self.efforts());
        }
        let idx = self
            .schema
            .feature_index(column)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
        if self.schema.kind(idx) == FeatureKind::Categorical {
            return Err(Error::UnsupportedColumn(column.to_string()));
        }
        let values = self
            .projects
            .iter()
            .map(|p| {
                let x = p.continuous_feature(idx).expect("validated continuous");
                if self.scaled {
                    self.scaling[idx].map_or(x, |params| params.invert(x))
                } else {
                    x
                }
            })
            .collect();
        Ok(values)
    }

    /// Descriptive statistics of a numeric column, computed on unscaled
    /// values.
    pub fn describe(&self, column: &str) -> Result<DescriptiveStats> {
        let values = self.raw_column(column)?;
        Ok(DescriptiveStats::from_values(&values))
    }

    /// Leave-one-out folds: one per project, with the train view's scaling
    /// refit on the remaining projects so nothing leaks from the held-out
    /// row.
    pub fn loocv_splits(&self) -> Result<Vec<Fold>> {
        if self.len() < MIN_PROJECTS {
            return Err(Error::InsufficientData {
                rows: self.len(),
                min: MIN_PROJECTS,
            });
        }
        Ok((0..self.len())
            .map(|i| {
                let mut rest = Vec::with_capacity(self.len() - 1);
                rest.extend(
                    self.projects
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, p)| p.clone()),
                );
                let train = Dataset::assemble(self.schema.clone(), rest)
                    .expect("fold rows come from a validated dataset");
                Fold {
                    train,
                    test: self.projects[i].clone(),
                }
            })
            .collect())
    }
}

fn fit_scaling(schema: &FeatureSchema, projects: &[Project]) -> Vec<Option<ScaleParams>> {
    (0..schema.num_features())
        .map(|j| {
            if schema.kind(j) == FeatureKind::Categorical {
                return None;
            }
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for p in projects {
                let x = p.continuous_feature(j).expect("validated continuous");
                min = min.min(x);
                max = max.max(x);
            }
            Some(ScaleParams { min, max })
        })
        .collect()
}

/// Per-column summary statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Adjusted Fisher-Pearson standardized moment coefficient.
    pub skewness: f64,
}

impl DescriptiveStats {
    pub fn from_values(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "stats of an empty column");
        let n = values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / n;

        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };

        let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let skewness = if m2 > 0.0 && values.len() > 2 {
            let g1 = m3 / m2.powf(1.5);
            g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
        } else {
            0.0
        };

        Self {
            min,
            max,
            mean,
            median,
            skewness,
        }
    }
}

/// Load a dataset from CSV. Rows containing a missing value (empty cell or
/// `?`) in any schema column are dropped and counted; surviving rows keep
/// their relative order and get ids `0..n`.
pub fn load_dataset(
    source: impl Read,
    schema: &FeatureSchema,
) -> Result<(Dataset, LoadSummary)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let header_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let feature_cols: Vec<usize> = schema
        .feature_names
        .iter()
        .map(|n| header_index(n))
        .collect::<Result<_>>()?;
    let effort_col = header_index(&schema.effort_column)?;

    let mut projects = Vec::new();
    let mut rows_read = 0usize;
    let mut rows_dropped = 0usize;

    for (row_idx, record) in reader.records().enumerate() {
        // Data rows start on line 2, after the header.
        let line = row_idx + 2;
        let record = record.map_err(|e| Error::Csv {
            row: line,
            message: e.to_string(),
        })?;
        rows_read += 1;

        let cell = |col: usize| -> Result<&str> {
            record.get(col).ok_or_else(|| Error::Csv {
                row: line,
                message: format!("missing column {col}"),
            })
        };

        let mut missing = is_missing(cell(effort_col)?);
        for &col in &feature_cols {
            missing |= is_missing(cell(col)?);
        }
        if missing {
            rows_dropped += 1;
            continue;
        }

        let parse_number = |col: usize, name: &str| -> Result<f64> {
            let text = cell(col)?.trim();
            text.parse::<f64>().map_err(|_| Error::Csv {
                row: line,
                message: format!("column '{name}' has non-numeric value '{text}'"),
            })
        };

        let effort = parse_number(effort_col, &schema.effort_column)?;
        if !(effort > 0.0) || !effort.is_finite() {
            return Err(Error::Validation(format!(
                "row {line}: effort must be positive, got {effort}"
            )));
        }

        let mut features = Vec::with_capacity(schema.num_features());
        for (j, &col) in feature_cols.iter().enumerate() {
            let value = match schema.kind(j) {
                FeatureKind::Continuous => {
                    let x = parse_number(col, &schema.feature_names[j])?;
                    if !x.is_finite() {
                        return Err(Error::Validation(format!(
                            "row {line}: feature '{}' is not finite",
                            schema.feature_names[j]
                        )));
                    }
                    FeatureValue::Continuous(x)
                }
                FeatureKind::Categorical => {
                    FeatureValue::Categorical(cell(col)?.trim().to_string())
                }
            };
            features.push(value);
        }

        projects.push(Project {
            id: projects.len(),
            features,
            effort,
        });
    }

    let dataset = Dataset::from_parts(schema.clone(), projects)?;
    Ok((
        dataset,
        LoadSummary {
            rows_read,
            rows_dropped,
        },
    ))
}

/// Free-function alias for [`Dataset::describe`].
pub fn describe(dataset: &Dataset, column: &str) -> Result<DescriptiveStats> {
    dataset.describe(column)
}

/// Free-function alias for [`Dataset::loocv_splits`].
pub fn loocv_splits(dataset: &Dataset) -> Result<Vec<Fold>> {
    dataset.loocv_splits()
}
