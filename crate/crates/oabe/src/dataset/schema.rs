//! Feature schema: which columns exist, their kinds, and which one is effort.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of a feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

/// Describes the columns of an effort dataset: the predictive features, the
/// effort column, and which features are size-related (used by the
/// size-extrapolation estimators).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<FeatureKind>,
    pub effort_column: String,
    pub size_columns: Vec<String>,
    pub effort_unit: String,
}

/// On-disk schema file. Features default to continuous; only categorical
/// ones need listing.
#[derive(Debug, Deserialize)]
struct SchemaFile {
    features: Vec<String>,
    effort_column: String,
    #[serde(default)]
    categorical: Vec<String>,
    #[serde(default)]
    size_columns: Vec<String>,
    #[serde(default = "default_unit")]
    effort_unit: String,
}

fn default_unit() -> String {
    "hours".to_string()
}

impl FeatureSchema {
    /// Build and validate a schema.
    pub fn new(
        feature_names: Vec<String>,
        feature_kinds: Vec<FeatureKind>,
        effort_column: impl Into<String>,
        size_columns: Vec<String>,
        effort_unit: impl Into<String>,
    ) -> Result<Self> {
        let schema = Self {
            feature_names,
            feature_kinds,
            effort_column: effort_column.into(),
            size_columns,
            effort_unit: effort_unit.into(),
        };
        schema.validate()?;
        Ok(schema)
    }

    /// Convenience constructor for all-continuous features with no size
    /// designation.
    pub fn continuous(names: &[&str], effort_column: &str, effort_unit: &str) -> Result<Self> {
        Self::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![FeatureKind::Continuous; names.len()],
            effort_column,
            Vec::new(),
            effort_unit,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.feature_names.is_empty() {
            return Err(Error::Validation("schema has no features".into()));
        }
        if self.feature_names.len() != self.feature_kinds.len() {
            return Err(Error::Validation(format!(
                "{} feature names but {} kinds",
                self.feature_names.len(),
                self.feature_kinds.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &self.feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Validation(format!("duplicate feature '{name}'")));
            }
        }
        if self.feature_names.contains(&self.effort_column) {
            return Err(Error::Validation(format!(
                "effort column '{}' must not be listed as a feature",
                self.effort_column
            )));
        }
        for size in &self.size_columns {
            match self.feature_index(size) {
                Some(idx) if self.feature_kinds[idx] == FeatureKind::Continuous => {}
                Some(_) => {
                    return Err(Error::Validation(format!(
                        "size column '{size}' must be continuous"
                    )))
                }
                None => {
                    return Err(Error::Validation(format!(
                        "size column '{size}' is not a feature"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Number of features `m`.
    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Index of a feature by name.
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Indices of the designated size columns, in designation order.
    pub fn size_indices(&self) -> Vec<usize> {
        self.size_columns
            .iter()
            .filter_map(|n| self.feature_index(n))
            .collect()
    }

    pub fn kind(&self, idx: usize) -> FeatureKind {
        self.feature_kinds[idx]
    }

    /// Load a schema from a TOML key-value file.
    ///
    /// Expected keys: `features` (list), `effort_column`, and optionally
    /// `categorical`, `size_columns`, `effort_unit`.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read schema file '{}': {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Parse a schema from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SchemaFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad schema file: {e}")))?;
        let categorical: HashSet<&str> = file.categorical.iter().map(String::as_str).collect();
        for cat in &categorical {
            if !file.features.iter().any(|f| f == cat) {
                return Err(Error::Config(format!(
                    "categorical column '{cat}' is not a feature"
                )));
            }
        }
        let kinds = file
            .features
            .iter()
            .map(|f| {
                if categorical.contains(f.as_str()) {
                    FeatureKind::Categorical
                } else {
                    FeatureKind::Continuous
                }
            })
            .collect();
        Self::new(
            file.features,
            kinds,
            file.effort_column,
            file.size_columns,
            file.effort_unit,
        )
    }

    /// Render the schema as a TOML schema file (the inverse of
    /// [`FeatureSchema::from_toml_str`]).
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\\\""));
        let list = |items: &[String]| {
            items
                .iter()
                .map(|s| quote(s))
                .collect::<Vec<_>>()
                .join(", ")
        };
        out.push_str(&format!("features = [{}]\n", list(&self.feature_names)));
        out.push_str(&format!("effort_column = {}\n", quote(&self.effort_column)));
        let categorical: Vec<String> = self
            .feature_names
            .iter()
            .zip(&self.feature_kinds)
            .filter(|(_, k)| **k == FeatureKind::Categorical)
            .map(|(n, _)| n.clone())
            .collect();
        out.push_str(&format!("categorical = [{}]\n", list(&categorical)));
        out.push_str(&format!("size_columns = [{}]\n", list(&self.size_columns)));
        out.push_str(&format!("effort_unit = {}\n", quote(&self.effort_unit)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_effort_listed_as_feature() {
        let err = FeatureSchema::continuous(&["a", "b"], "a", "hours").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_duplicate_features() {
        let err = FeatureSchema::continuous(&["a", "a"], "effort", "hours").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_categorical_size_column() {
        let err = FeatureSchema::new(
            vec!["size".into(), "type".into()],
            vec![FeatureKind::Continuous, FeatureKind::Categorical],
            "effort",
            vec!["type".into()],
            "hours",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn toml_round_trip() {
        let schema = FeatureSchema::new(
            vec!["kloc".into(), "team".into(), "lang".into()],
            vec![
                FeatureKind::Continuous,
                FeatureKind::Continuous,
                FeatureKind::Categorical,
            ],
            "effort",
            vec!["kloc".into()],
            "months",
        )
        .unwrap();
        let text = schema.to_toml_string();
        let parsed = FeatureSchema::from_toml_str(&text).unwrap();
        assert_eq!(parsed, schema);
    }

    #[test]
    fn toml_unknown_categorical_rejected() {
        let text = r#"
features = ["a", "b"]
effort_column = "effort"
categorical = ["c"]
"#;
        assert!(FeatureSchema::from_toml_str(text).is_err());
    }
}
