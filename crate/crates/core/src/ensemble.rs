//! Softmax averaging across models and the final argmax decision.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::SentimentLabel;
use crate::predictions::{PredictionSet, ProbabilityVector};

/// Per-model weights. `None` is the plain average.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub weights: Option<Vec<f64>>,
}

impl EnsembleConfig {
    pub fn uniform() -> Self {
        EnsembleConfig { weights: None }
    }

    pub fn weighted(weights: Vec<f64>) -> Self {
        EnsembleConfig {
            weights: Some(weights),
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.is_none()
    }

    /// Normalized weights for `k` models.
    pub fn resolve(&self, k: usize) -> Result<Vec<f64>, EnsembleError> {
        match &self.weights {
            None => Ok(vec![1.0 / k as f64; k]),
            Some(w) => {
                if w.len() != k {
                    return Err(EnsembleError::WeightCountMismatch {
                        weights: w.len(),
                        sets: k,
                    });
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(EnsembleError::InvalidWeights(w.clone()));
                }
                let total: f64 = w.iter().sum();
                if total <= 0.0 {
                    return Err(EnsembleError::InvalidWeights(w.clone()));
                }
                Ok(w.iter().map(|x| x / total).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("no prediction sets to combine")]
    EmptyInput,
    #[error("{weights} weights given for {sets} prediction sets")]
    WeightCountMismatch { weights: usize, sets: usize },
    #[error("weights must be finite, non-negative and not all zero: {0:?}")]
    InvalidWeights(Vec<f64>),
    #[error("prediction set {index} ({model_id}) disagrees on uids: {} missing, {} extra (first: {first:?})", missing, extra)]
    UidMismatch {
        index: usize,
        model_id: String,
        missing: usize,
        extra: usize,
        first: String,
    },
}

fn check_uids(sets: &[PredictionSet]) -> Result<(), EnsembleError> {
    let reference: HashSet<&str> = sets[0].uids().collect();
    for (index, set) in sets.iter().enumerate().skip(1) {
        let missing: Vec<&str> = sets[0].uids().filter(|u| !set.contains(u)).collect();
        let extra: Vec<&str> = set.uids().filter(|u| !reference.contains(u)).collect();
        if !missing.is_empty() || !extra.is_empty() {
            let first = missing
                .first()
                .or(extra.first())
                .copied()
                .unwrap_or_default();
            return Err(EnsembleError::UidMismatch {
                index,
                model_id: set.model_id().to_string(),
                missing: missing.len(),
                extra: extra.len(),
                first: first.to_string(),
            });
        }
    }
    Ok(())
}

/// `ensemble(a,b,...)` over the sorted input model ids.
pub fn ensemble_model_id(sets: &[PredictionSet]) -> String {
    let mut ids: Vec<&str> = sets.iter().map(PredictionSet::model_id).collect();
    ids.sort_unstable();
    format!("ensemble({})", ids.join(","))
}

/// Weighted mean of the per-uid probability vectors, in the uid order of
/// the first set.
pub fn combine(
    sets: &[PredictionSet],
    config: &EnsembleConfig,
) -> Result<PredictionSet, EnsembleError> {
    if sets.is_empty() {
        return Err(EnsembleError::EmptyInput);
    }
    let weights = config.resolve(sets.len())?;
    check_uids(sets)?;

    let mut out =
        PredictionSet::new(ensemble_model_id(sets)).expect("ids are tab-free and non-empty");
    for uid in sets[0].uids() {
        let mut acc = [0.0f64; 3];
        for (set, w) in sets.iter().zip(&weights) {
            let p = set.get(uid).expect("uid sets checked").as_array();
            for k in 0..3 {
                acc[k] += w * p[k];
            }
        }
        out.insert(uid, ProbabilityVector::from_convex(acc))
            .expect("uids come from a valid set");
    }
    Ok(out)
}

/// Label of the largest component; exact ties go to the lowest class index.
pub fn classify(v: &ProbabilityVector) -> SentimentLabel {
    let p = v.as_array();
    let mut best = 0;
    for k in 1..3 {
        if p[k] > p[best] {
            best = k;
        }
    }
    SentimentLabel::from_index(best).expect("index < 3")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPrediction {
    pub uid: String,
    pub distribution: ProbabilityVector,
    pub label: SentimentLabel,
}

pub fn classify_set(set: &PredictionSet) -> Vec<LabeledPrediction> {
    set.iter()
        .map(|(uid, p)| LabeledPrediction {
            uid: uid.to_string(),
            distribution: *p,
            label: classify(p),
        })
        .collect()
}

pub const LABELS_HEADER: &str = "uid\tlabel";

/// `uid<TAB>label` rows under a `uid\tlabel` header.
pub fn format_labels(labels: &[LabeledPrediction]) -> String {
    let mut out = String::from(LABELS_HEADER);
    out.push('\n');
    for l in labels {
        let _ = writeln!(out, "{}\t{}", l.uid, l.label);
    }
    out
}
