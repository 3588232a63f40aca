//! Code-mixed (Hindi-English) tweet sentiment toolkit.
//!
//! The pipeline: parse a CONLL-style corpus ([`corpus`]), clean each tweet
//! ([`preprocess`]), obtain softmax vectors from one or more backends
//! ([`naive_bayes`] or external files through [`predictions`]), average them
//! ([`ensemble`]) and score the argmax labels against gold ([`metrics`]).
//! [`pipeline`] wires the whole chain together.

pub mod corpus;
pub mod ensemble;
pub mod metrics;
pub mod naive_bayes;
pub mod pipeline;
pub mod predictions;
pub mod preprocess;

pub use corpus::{
    class_distribution, parse_conll, parse_conll_str, parse_conll_with_stats, write_conll,
    ClassCounts, Corpus, CorpusError, LanguageTag, ParseStats, SentimentLabel, Token, Tweet,
};
pub use ensemble::{
    classify, classify_set, combine, format_labels, EnsembleConfig, EnsembleError,
    LabeledPrediction,
};
pub use metrics::{
    confusion, evaluate, per_class_prf, summarize, ClassScores, ConfusionMatrix, EnsembleEcho,
    EvaluationReport, MetricsError,
};
pub use naive_bayes::{extract_ngrams, train, NbConfig, NbError, NbModel, NgramUnit};
pub use pipeline::{run_pipeline, Backend, PipelineError, PipelineInput, PipelineOutput};
pub use predictions::{
    format_predictions, read_predictions, read_predictions_str, validate_against,
    write_predictions, PredictionSet, ProbabilityVector, ReadPredictionsError, ValidationError,
};
pub use preprocess::{
    is_clean, normalize, normalize_corpus, normalize_text, normalize_tokens, write_clean_tsv,
    CleanText,
};
