//! Evaluation against gold labels: confusion matrix, per-class and macro
//! precision/recall/F1, accuracy.
//!
//! Any 0/0 ratio is taken as 0. Macro F1 is the unweighted mean of the three
//! per-class F1 values, not the F1 of macro precision and recall.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, SentimentLabel};
use crate::ensemble::{classify_set, EnsembleConfig, LabeledPrediction};
use crate::predictions::{validate_against, PredictionSet, ValidationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("prediction uids do not match gold uids: {missing} missing, {extra} extra, {duplicate} duplicated")]
    UidMismatch {
        missing: usize,
        extra: usize,
        duplicate: usize,
    },
    #[error("tweet {uid:?} has no gold label")]
    MissingGoldLabel { uid: String },
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Rows are gold classes, columns predicted classes, canonical order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn add(&mut self, gold: SentimentLabel, predicted: SentimentLabel) {
        self.0[gold.index()][predicted.index()] += 1;
    }

    pub fn get(&self, gold: SentimentLabel, predicted: SentimentLabel) -> u64 {
        self.0[gold.index()][predicted.index()]
    }

    pub fn n(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|k| self.0[k][k]).sum()
    }

    pub fn row_sum(&self, gold: SentimentLabel) -> u64 {
        self.0[gold.index()].iter().sum()
    }

    pub fn column_sum(&self, predicted: SentimentLabel) -> u64 {
        self.0.iter().map(|row| row[predicted.index()]).sum()
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for g in 0..3 {
            for p in 0..3 {
                self.0[g][p] += other.0[g][p];
            }
        }
    }
}

pub fn confusion(
    gold: &Corpus,
    predicted: &[LabeledPrediction],
) -> Result<ConfusionMatrix, MetricsError> {
    let mut seen = HashSet::with_capacity(predicted.len());
    let mut extra = 0;
    let mut duplicate = 0;
    for p in predicted {
        if !gold.contains(&p.uid) {
            extra += 1;
        } else if !seen.insert(p.uid.as_str()) {
            duplicate += 1;
        }
    }
    let missing = gold.len() - seen.len();
    if missing + extra + duplicate > 0 {
        return Err(MetricsError::UidMismatch {
            missing,
            extra,
            duplicate,
        });
    }
    let mut m = ConfusionMatrix::default();
    for p in predicted {
        let tweet = gold.get(&p.uid).expect("checked above");
        let g = tweet
            .gold()
            .ok_or_else(|| MetricsError::MissingGoldLabel { uid: p.uid.clone() })?;
        m.add(g, p.label);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn per_class_prf(m: &ConfusionMatrix) -> [ClassScores; 3] {
    SentimentLabel::ALL.map(|c| {
        let tp = m.get(c, c);
        let precision = ratio(tp, m.column_sum(c));
        let recall = ratio(tp, m.row_sum(c));
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassScores {
            precision,
            recall,
            f1,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub negative: ClassScores,
    pub neutral: ClassScores,
    pub positive: ClassScores,
}

impl PerClass {
    pub fn get(&self, label: SentimentLabel) -> &ClassScores {
        match label {
            SentimentLabel::Negative => &self.negative,
            SentimentLabel::Neutral => &self.neutral,
            SentimentLabel::Positive => &self.positive,
        }
    }

    pub fn as_array(&self) -> [ClassScores; 3] {
        [self.negative, self.neutral, self.positive]
    }
}

/// How the evaluated predictions were combined, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEcho {
    pub members: Vec<String>,
    /// False when explicit weights were supplied; only the uniform average
    /// is the reference method.
    pub uniform: bool,
    pub weights: Vec<f64>,
}

impl EnsembleEcho {
    pub fn new(members: Vec<String>, config: &EnsembleConfig) -> Self {
        let weights = config
            .resolve(members.len())
            .unwrap_or_else(|_| config.weights.clone().unwrap_or_default());
        EnsembleEcho {
            members,
            uniform: config.is_uniform(),
            weights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_id: String,
    pub n: u64,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: PerClass,
    pub confusion: [[u64; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleEcho>,
}

fn mean3(xs: [f64; 3]) -> f64 {
    (xs[0] + xs[1] + xs[2]) / 3.0
}

pub fn summarize(m: &ConfusionMatrix) -> Result<EvaluationReport, MetricsError> {
    let n = m.n();
    if n == 0 {
        return Err(MetricsError::EmptyEvaluation);
    }
    let scores = per_class_prf(m);
    Ok(EvaluationReport {
        model_id: String::new(),
        n,
        accuracy: m.trace() as f64 / n as f64,
        macro_precision: mean3(scores.map(|s| s.precision)),
        macro_recall: mean3(scores.map(|s| s.recall)),
        macro_f1: mean3(scores.map(|s| s.f1)),
        per_class: PerClass {
            negative: scores[0],
            neutral: scores[1],
            positive: scores[2],
        },
        confusion: m.0,
        ensemble: None,
    })
}

/// Validates coverage, takes the argmax of every vector and scores it.
pub fn evaluate(gold: &Corpus, set: &PredictionSet) -> Result<EvaluationReport, MetricsError> {
    validate_against(set, gold)?;
    let labels = classify_set(set);
    let m = confusion(gold, &labels)?;
    let mut report = summarize(&m)?;
    report.model_id = set.model_id().to_string();
    Ok(report)
}

impl EvaluationReport {
    pub fn confusion_matrix(&self) -> ConfusionMatrix {
        ConfusionMatrix(self.confusion)
    }

    pub fn with_model_id(mut self, model_id: impl Into<String>) -> Self {
        self.model_id = model_id.into();
        self
    }

    pub fn with_ensemble(mut self, echo: EnsembleEcho) -> Self {
        self.ensemble = Some(echo);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}  (n = {})", self.model_id, self.n);
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>7} {:>7} {:>7}",
            "", "F1", "P", "R", "Acc"
        );
        let _ = writeln!(
            out,
            "{:<10} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
            "macro", self.macro_f1, self.macro_precision, self.macro_recall, self.accuracy
        );
        out.push('\n');
        let _ = writeln!(out, "{:<10} {:>7} {:>7} {:>7}", "class", "F1", "P", "R");
        for label in SentimentLabel::ALL {
            let s = self.per_class.get(label);
            let _ = writeln!(
                out,
                "{:<10} {:>7.3} {:>7.3} {:>7.3}",
                label.as_str(),
                s.f1,
                s.precision,
                s.recall
            );
        }
        out.push('\n');
        let _ = writeln!(out, "confusion (rows = gold, columns = predicted)");
        let _ = writeln!(
            out,
            "{:<10} {:>8} {:>8} {:>8}",
            "", "negative", "neutral", "positive"
        );
        for label in SentimentLabel::ALL {
            let row = self.confusion[label.index()];
            let _ = writeln!(
                out,
                "{:<10} {:>8} {:>8} {:>8}",
                label.as_str(),
                row[0],
                row[1],
                row[2]
            );
        }
        if let Some(e) = &self.ensemble {
            let _ = writeln!(
                out,
                "\nensemble of {} ({}): weights {:?}",
                e.members.join(", "),
                if e.uniform {
                    "uniform average"
                } else {
                    "custom weights"
                },
                e.weights
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LanguageTag, Token, Tweet};
    use crate::predictions::ProbabilityVector;
    use SentimentLabel::*;

    fn corpus(labels: &[SentimentLabel]) -> Corpus {
        Corpus::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    Tweet::new(
                        i.to_string(),
                        vec![Token::new("w", LanguageTag::Eng).unwrap()],
                        Some(l),
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    fn preds(labels: &[SentimentLabel]) -> Vec<LabeledPrediction> {
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| LabeledPrediction {
                uid: i.to_string(),
                distribution: ProbabilityVector::one_hot(l),
                label: l,
            })
            .collect()
    }

    #[test]
    fn four_tweet_confusion() {
        let m = confusion(
            &corpus(&[Negative, Negative, Positive, Neutral]),
            &preds(&[Negative, Positive, Positive, Neutral]),
        )
        .unwrap();
        assert_eq!(m.0, [[1, 0, 1], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(m.n(), 4);
        assert_eq!(m.trace(), 3);
    }

    #[test]
    fn four_tweet_scores() {
        let m = ConfusionMatrix([[1, 0, 1], [0, 1, 0], [0, 0, 1]]);
        let s = per_class_prf(&m);
        // tallied by hand from the matrix
        assert_eq!(s[0].precision, 1.0);
        assert_eq!(s[0].recall, 0.5);
        assert!((s[0].f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            s[1],
            ClassScores {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
        assert_eq!(s[2].precision, 0.5);
        assert_eq!(s[2].recall, 1.0);
        assert!((s[2].f1 - 2.0 / 3.0).abs() < 1e-15);
        let r = summarize(&m).unwrap();
        assert_eq!(r.accuracy, 0.75);
        assert!((r.macro_f1 - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_and_absent_class() {
        let m = ConfusionMatrix([[2, 0, 0], [0, 0, 0], [0, 0, 5]]);
        let s = per_class_prf(&m);
        assert_eq!(
            s[0],
            ClassScores {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
        assert_eq!(s[1], ClassScores::default());
        assert_eq!(
            s[2],
            ClassScores {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
    }

    #[test]
    fn perfect_is_diagonal() {
        let labels = [Negative, Positive, Neutral, Positive];
        let m = confusion(&corpus(&labels), &preds(&labels)).unwrap();
        assert_eq!(m.0, [[1, 0, 0], [0, 1, 0], [0, 0, 2]]);
    }

    #[test]
    fn empty_inputs() {
        let m = confusion(&Corpus::default(), &[]).unwrap();
        assert_eq!(m, ConfusionMatrix::default());
        assert_eq!(m.n(), 0);
        assert_eq!(summarize(&m), Err(MetricsError::EmptyEvaluation));
    }

    #[test]
    fn confusion_errors() {
        let gold = corpus(&[Negative, Positive]);
        assert!(matches!(
            confusion(&gold, &preds(&[Negative])),
            Err(MetricsError::UidMismatch { missing: 1, .. })
        ));
        let mut p = preds(&[Negative, Positive]);
        p[1].uid = "0".into();
        assert!(matches!(
            confusion(&gold, &p),
            Err(MetricsError::UidMismatch {
                duplicate: 1,
                missing: 1,
                ..
            })
        ));
        let unlabeled = Corpus::new(vec![Tweet::new(
            "0",
            vec![Token::new("w", LanguageTag::Eng).unwrap()],
            None,
        )
        .unwrap()])
        .unwrap();
        assert!(matches!(
            confusion(&unlabeled, &preds(&[Negative])),
            Err(MetricsError::MissingGoldLabel { .. })
        ));
    }

    #[test]
    fn evaluate_one_hot_and_uniform() {
        let labels = [Negative, Neutral, Neutral, Positive, Positive];
        let gold = corpus(&labels);
        let mut exact = PredictionSet::new("gold").unwrap();
        let mut flat = PredictionSet::new("flat").unwrap();
        for (i, &l) in labels.iter().enumerate() {
            exact
                .insert(i.to_string(), ProbabilityVector::one_hot(l))
                .unwrap();
            flat.insert(i.to_string(), ProbabilityVector::uniform())
                .unwrap();
        }
        let r = evaluate(&gold, &exact).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.model_id, "gold");

        let r = evaluate(&gold, &flat).unwrap();
        assert_eq!(r.accuracy, 0.2);
        assert_eq!(r.confusion_matrix().column_sum(Negative), 5);

        let mut short = PredictionSet::new("short").unwrap();
        short.insert("0", ProbabilityVector::uniform()).unwrap();
        assert!(matches!(
            evaluate(&gold, &short),
            Err(MetricsError::Validation(ValidationError::MissingUid { .. }))
        ));
    }

    #[test]
    fn json_keys() {
        let r = summarize(&ConfusionMatrix([[1, 0, 1], [0, 1, 0], [0, 0, 1]]))
            .unwrap()
            .with_model_id("m");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "macro_precision",
            "macro_recall",
            "macro_f1",
            "accuracy",
            "n",
            "confusion",
            "model_id",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for class in ["negative", "neutral", "positive"] {
            for field in ["precision", "recall", "f1"] {
                assert!(v["per_class"][class][field].is_f64());
            }
        }
        assert!(v.get("ensemble").is_none());
        let back: EvaluationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_table().contains("macro"));
    }
}
