//! End-to-end run: clean, predict with every backend, average, classify,
//! evaluate.
//!
//! Every member prediction set and the averaged set pass through the
//! prediction-file encoding before they are used, so a pipeline run yields
//! exactly what the individual commands produce when chained through files.

use thiserror::Error;

use crate::corpus::{Corpus, SentimentLabel};
use crate::ensemble::{classify_set, combine, EnsembleConfig, EnsembleError, LabeledPrediction};
use crate::metrics::{evaluate, EnsembleEcho, EvaluationReport, MetricsError};
use crate::naive_bayes::{train, NbConfig, NbError, NbModel};
use crate::predictions::{
    format_predictions, read_predictions_str, validate_against, PredictionSet, PredictionSetError,
    ReadPredictionsError, ValidationError,
};
use crate::preprocess::{normalize_corpus, CleanText};

#[derive(Debug, Clone, PartialEq)]
pub struct Backend {
    pub model_id: String,
    pub config: NbConfig,
}

impl Backend {
    pub fn naive_bayes(config: NbConfig) -> Self {
        Backend {
            model_id: config.model_id(),
            config,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no backends and no prediction files given")]
    NoMembers,
    #[error("naive Bayes backends need a labeled training corpus")]
    MissingTrainingCorpus,
    #[error("training tweet {uid:?} has no gold label")]
    UnlabeledTraining { uid: String },
    #[error("backend {model_id}: {source}")]
    Train { model_id: String, source: NbError },
    #[error("prediction set {model_id}: {source}")]
    Coverage {
        model_id: String,
        source: ValidationError,
    },
    #[error(transparent)]
    PredictionSet(#[from] PredictionSetError),
    #[error(transparent)]
    Encoding(#[from] ReadPredictionsError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub struct PipelineInput<'a> {
    pub train: Option<&'a Corpus>,
    pub eval: &'a Corpus,
    pub backends: Vec<Backend>,
    /// Prediction sets produced elsewhere, e.g. by a transformer exporter.
    pub external: Vec<PredictionSet>,
    pub ensemble: EnsembleConfig,
}

pub struct PipelineOutput {
    pub eval_clean: Vec<(String, CleanText)>,
    pub models: Vec<(Backend, NbModel)>,
    /// Backend sets first, then external ones, as fed to the ensemble.
    pub members: Vec<PredictionSet>,
    pub ensemble: PredictionSet,
    pub labels: Vec<LabeledPrediction>,
    pub report: EvaluationReport,
}

/// Same values after a write/read cycle through the prediction TSV.
pub fn quantize(set: &PredictionSet) -> Result<PredictionSet, ReadPredictionsError> {
    read_predictions_str(&format_predictions(set))
}

pub fn labeled_training_texts(
    train: &Corpus,
) -> Result<Vec<(CleanText, SentimentLabel)>, PipelineError> {
    normalize_corpus(train)
        .into_iter()
        .zip(train.iter())
        .map(|((uid, text), tweet)| {
            tweet
                .gold()
                .map(|g| (text, g))
                .ok_or(PipelineError::UnlabeledTraining { uid })
        })
        .collect()
}

pub fn train_backend(train_corpus: &Corpus, config: &NbConfig) -> Result<NbModel, PipelineError> {
    let data = labeled_training_texts(train_corpus)?;
    train(data.iter().map(|(t, l)| (t, *l)), config).map_err(|source| PipelineError::Train {
        model_id: config.model_id(),
        source,
    })
}

pub fn run_pipeline(input: PipelineInput<'_>) -> Result<PipelineOutput, PipelineError> {
    if input.backends.is_empty() && input.external.is_empty() {
        return Err(PipelineError::NoMembers);
    }
    let eval_clean = normalize_corpus(input.eval);

    let mut models = Vec::with_capacity(input.backends.len());
    let mut members = Vec::with_capacity(input.backends.len() + input.external.len());
    if !input.backends.is_empty() {
        let train_corpus = input.train.ok_or(PipelineError::MissingTrainingCorpus)?;
        let data = labeled_training_texts(train_corpus)?;
        for backend in input.backends {
            let model =
                train(data.iter().map(|(t, l)| (t, *l)), &backend.config).map_err(|source| {
                    PipelineError::Train {
                        model_id: backend.model_id.clone(),
                        source,
                    }
                })?;
            let set = model.predict_corpus(&eval_clean, &backend.model_id)?;
            members.push(quantize(&set)?);
            models.push((backend, model));
        }
    }
    for set in input.external {
        validate_against(&set, input.eval).map_err(|source| PipelineError::Coverage {
            model_id: set.model_id().to_string(),
            source,
        })?;
        members.push(set);
    }

    let ensemble = quantize(&combine(&members, &input.ensemble)?)?;
    let labels = classify_set(&ensemble);
    let echo = EnsembleEcho::new(
        members.iter().map(|s| s.model_id().to_string()).collect(),
        &input.ensemble,
    );
    let report = evaluate(input.eval, &ensemble)?.with_ensemble(echo);

    Ok(PipelineOutput {
        eval_clean,
        models,
        members,
        ensemble,
        labels,
        report,
    })
}
