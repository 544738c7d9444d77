//! Error-measure suite for one method on one dataset.

use crate::error::{Error, Result};

/// Per-method error measures, all ratio measures in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub method: String,
    pub dataset: String,
    /// Per-project magnitude of relative error, percent.
    pub mre: Vec<f64>,
    /// Per-project absolute error, raw effort units.
    pub absolute_errors: Vec<f64>,
    pub mmre: f64,
    pub mdmre: f64,
    pub mmer: f64,
    pub mbre: f64,
    /// Share of projects with MRE <= 25%, in [0, 100].
    pub pred25: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite measure"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Compute the full measure suite from paired actual and predicted efforts.
/// Both must be positive; predictions are floored positive upstream.
pub fn metrics(actual: &[f64], predicted: &[f64]) -> Result<MetricReport> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Parameter("empty measure input".into()));
    }
    for (&a, &p) in actual.iter().zip(predicted) {
        if !(a > 0.0) || !(p > 0.0) || !a.is_finite() || !p.is_finite() {
            return Err(Error::Validation(format!(
                "measures need positive finite efforts, got actual={a}, predicted={p}"
            )));
        }
    }

    let n = actual.len() as f64;
    let mut mre = Vec::with_capacity(actual.len());
    let mut mer = Vec::with_capacity(actual.len());
    let mut bre = Vec::with_capacity(actual.len());
    let mut absolute_errors = Vec::with_capacity(actual.len());
    for (&a, &p) in actual.iter().zip(predicted) {
        let abs = (a - p).abs();
        absolute_errors.push(abs);
        mre.push(100.0 * abs / a);
        mer.push(100.0 * abs / p);
        bre.push(100.0 * abs / a.min(p));
    }

    let mmre = mre.iter().sum::<f64>() / n;
    let mdmre = median(&mre);
    let mmer = mer.iter().sum::<f64>() / n;
    let mbre = bre.iter().sum::<f64>() / n;
    let pred25 = 100.0 * mre.iter().filter(|&&v| v <= 25.0).count() as f64 / n;

    Ok(MetricReport {
        method: String::new(),
        dataset: String::new(),
        mre,
        absolute_errors,
        mmre,
        mdmre,
        mmer,
        mbre,
        pred25,
    })
}
