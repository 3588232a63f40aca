//! Multinomial naive Bayes over word or character n-grams.
//!
//! A desk-scale prediction backend. Training keeps raw counts; the log prior
//! and Laplace-smoothed log likelihoods are derived from them, so a model
//! file only stores integers plus the config.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SentimentLabel;
use crate::predictions::{PredictionSet, PredictionSetError, ProbabilityVector};
use crate::preprocess::CleanText;

pub const MAX_NGRAM: usize = 5;

pub const MODEL_FORMAT: &str = "sentimix-nb";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NgramUnit {
    #[default]
    Word,
    Char,
}

impl NgramUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            NgramUnit::Word => "word",
            NgramUnit::Char => "char",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub alpha: f64,
    pub unit: NgramUnit,
}

impl Default for NbConfig {
    fn default() -> Self {
        NbConfig {
            ngram_min: 1,
            ngram_max: 2,
            alpha: 1.0,
            unit: NgramUnit::Word,
        }
    }
}

impl NbConfig {
    pub fn new(
        unit: NgramUnit,
        ngram_min: usize,
        ngram_max: usize,
        alpha: f64,
    ) -> Result<Self, NbError> {
        let config = NbConfig {
            ngram_min,
            ngram_max,
            alpha,
            unit,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), NbError> {
        if !(1 <= self.ngram_min && self.ngram_min <= self.ngram_max && self.ngram_max <= MAX_NGRAM)
        {
            return Err(NbError::InvalidConfig(format!(
                "need 1 <= ngram_min <= ngram_max <= {MAX_NGRAM}, got {}..{}",
                self.ngram_min, self.ngram_max
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(NbError::InvalidConfig(format!(
                "alpha must be a positive finite number, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Identifier such as `nb-word-1-2`, used as the prediction model id.
    pub fn model_id(&self) -> String {
        format!(
            "nb-{}-{}-{}",
            self.unit.as_str(),
            self.ngram_min,
            self.ngram_max
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NbError {
    #[error("invalid naive Bayes config: {0}")]
    InvalidConfig(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("every training text is empty; the vocabulary would be empty")]
    AllTextsEmpty,
    #[error("model file: {0}")]
    ModelFormat(String),
}

/// Contiguous n-grams for every n in the configured range, shortest first.
/// Word n-grams join words with a space; char n-grams run over the whole
/// cleaned string, spaces included.
pub fn extract_ngrams(text: &CleanText, config: &NbConfig) -> Vec<String> {
    let mut grams = Vec::new();
    match config.unit {
        NgramUnit::Word => {
            let words: Vec<&str> = text.words().collect();
            for n in config.ngram_min..=config.ngram_max {
                grams.extend(words.windows(n).map(|w| w.join(" ")));
            }
        }
        NgramUnit::Char => {
            let chars: Vec<char> = text.as_str().chars().collect();
            for n in config.ngram_min..=config.ngram_max {
                grams.extend(chars.windows(n).map(|w| w.iter().collect::<String>()));
            }
        }
    }
    grams
}

fn count_ngrams(text: &CleanText, config: &NbConfig) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for g in extract_ngrams(text, config) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    config: NbConfig,
    /// Sorted n-grams; position is the feature index.
    vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    class_docs: [u64; 3],
    /// `feature_counts[class][feature]`
    feature_counts: [Vec<u64>; 3],
    log_prior: [f64; 3],
    log_likelihood: [Vec<f64>; 3],
}

impl NbModel {
    fn from_counts(
        config: NbConfig,
        vocabulary: Vec<String>,
        class_docs: [u64; 3],
        feature_counts: [Vec<u64>; 3],
    ) -> Self {
        let total_docs: u64 = class_docs.iter().sum();
        let v = vocabulary.len() as f64;
        let log_prior = class_docs.map(|d| {
            if d == 0 {
                f64::NEG_INFINITY
            } else {
                (d as f64 / total_docs as f64).ln()
            }
        });
        let log_likelihood = std::array::from_fn(|c| {
            let total: u64 = feature_counts[c].iter().sum();
            let denom = total as f64 + config.alpha * v;
            feature_counts[c]
                .iter()
                .map(|&n| ((n as f64 + config.alpha) / denom).ln())
                .collect()
        });
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        NbModel {
            config,
            vocabulary,
            index,
            class_docs,
            feature_counts,
            log_prior,
            log_likelihood,
        }
    }

    pub fn config(&self) -> &NbConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn feature_index(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).copied()
    }

    pub fn log_prior(&self) -> [f64; 3] {
        self.log_prior
    }

    pub fn log_likelihood(&self, label: SentimentLabel) -> &[f64] {
        &self.log_likelihood[label.index()]
    }

    pub fn class_docs(&self) -> [u64; 3] {
        self.class_docs
    }

    /// Unnormalized log posterior per class; unknown n-grams are skipped.
    pub fn log_scores(&self, text: &CleanText) -> [f64; 3] {
        let mut scores = self.log_prior;
        for (gram, n) in count_ngrams(text, &self.config) {
            if let Some(&f) = self.index.get(&gram) {
                for (c, s) in scores.iter_mut().enumerate() {
                    *s += n as f64 * self.log_likelihood[c][f];
                }
            }
        }
        scores
    }

    pub fn predict(&self, text: &CleanText) -> ProbabilityVector {
        let scores = self.log_scores(text);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp = scores.map(|s| {
            if s == f64::NEG_INFINITY {
                0.0
            } else {
                (s - max).exp()
            }
        });
        let z: f64 = exp.iter().sum();
        ProbabilityVector::from_convex(exp.map(|e| e / z))
    }

    pub fn predict_corpus(
        &self,
        texts: &[(String, CleanText)],
        model_id: &str,
    ) -> Result<PredictionSet, PredictionSetError> {
        let mut set = PredictionSet::new(model_id)?;
        for (uid, text) in texts {
            set.insert(uid.clone(), self.predict(text))?;
        }
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            config: self.config.clone(),
            class_docs: self.class_docs,
            vocabulary: self.vocabulary.clone(),
            feature_counts: self.feature_counts.clone(),
        };
        let mut s = serde_json::to_string(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, NbError> {
        let file: ModelFile =
            serde_json::from_str(s).map_err(|e| NbError::ModelFormat(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(NbError::ModelFormat(format!(
                "unexpected format tag {:?}",
                file.format
            )));
        }
        if file.version != MODEL_VERSION {
            return Err(NbError::ModelFormat(format!(
                "unsupported version {}",
                file.version
            )));
        }
        file.config.validate()?;
        if file.vocabulary.is_empty() {
            return Err(NbError::ModelFormat("empty vocabulary".into()));
        }
        if !file.vocabulary.windows(2).all(|w| w[0] < w[1]) {
            return Err(NbError::ModelFormat(
                "vocabulary must be sorted and unique".into(),
            ));
        }
        if file
            .feature_counts
            .iter()
            .any(|c| c.len() != file.vocabulary.len())
        {
            return Err(NbError::ModelFormat(
                "feature count rows do not match vocabulary".into(),
            ));
        }
        if file.class_docs.iter().sum::<u64>() == 0 {
            return Err(NbError::ModelFormat("no training documents".into()));
        }
        Ok(NbModel::from_counts(
            file.config,
            file.vocabulary,
            file.class_docs,
            file.feature_counts,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    config: NbConfig,
    class_docs: [u64; 3],
    vocabulary: Vec<String>,
    feature_counts: [Vec<u64>; 3],
}

pub fn train<'a, I>(data: I, config: &NbConfig) -> Result<NbModel, NbError>
where
    I: IntoIterator<Item = (&'a CleanText, SentimentLabel)>,
{
    config.validate()?;
    let mut class_docs = [0u64; 3];
    let mut per_class: [BTreeMap<String, u64>; 3] = Default::default();
    for (text, label) in data {
        let c = label.index();
        class_docs[c] += 1;
        for (g, n) in count_ngrams(text, config) {
            *per_class[c].entry(g).or_insert(0) += n;
        }
    }
    if class_docs.iter().sum::<u64>() == 0 {
        return Err(NbError::EmptyTrainingSet);
    }

    let mut vocab: BTreeMap<&str, ()> = BTreeMap::new();
    for m in &per_class {
        for g in m.keys() {
            vocab.insert(g, ());
        }
    }
    if vocab.is_empty() {
        return Err(NbError::AllTextsEmpty);
    }
    let vocabulary: Vec<String> = vocab.keys().map(|g| g.to_string()).collect();
    let feature_counts = std::array::from_fn(|c| {
        vocabulary
            .iter()
            .map(|g| per_class[c].get(g).copied().unwrap_or(0))
            .collect()
    });
    Ok(NbModel::from_counts(
        config.clone(),
        vocabulary,
        class_docs,
        feature_counts,
    ))
}
