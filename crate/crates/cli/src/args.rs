use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sentimix_core::naive_bayes::{NbConfig, NgramUnit};

#[derive(Parser, Debug)]
#[command(
    name = "sentimix",
    version,
    about = "Code-mixed tweet sentiment: corpus tools, NB baseline, softmax ensembling, evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a corpus and write it back in canonical form.
    Ingest(IngestArgs),
    /// Tweet, token, language-tag and label counts.
    Stats(StatsArgs),
    /// Clean every tweet; writes `uid<TAB>clean_text`.
    Preprocess(PreprocessArgs),
    /// Train a naive Bayes model on a labeled corpus.
    TrainBaseline(TrainArgs),
    /// Run a trained model over a corpus; writes a prediction TSV.
    Predict(PredictArgs),
    /// Average prediction files.
    Ensemble(EnsembleArgs),
    /// Argmax label per uid; writes `uid<TAB>label`.
    Classify(ClassifyArgs),
    /// Score a prediction file against gold labels.
    Evaluate(EvaluateArgs),
    /// Preprocess, predict, ensemble, classify and evaluate in one go.
    Pipeline(PipelineArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    #[default]
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Word,
    Char,
}

impl From<Unit> for NgramUnit {
    fn from(u: Unit) -> Self {
        match u {
            Unit::Word => NgramUnit::Word,
            Unit::Char => NgramUnit::Char,
        }
    }
}

/// Default n-gram range per unit.
pub fn default_range(unit: NgramUnit) -> (usize, usize) {
    match unit {
        NgramUnit::Word => (1, 2),
        NgramUnit::Char => (2, 4),
    }
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "word")]
    pub unit: Unit,
    /// Defaults to 1 for words, 2 for characters.
    #[arg(long)]
    pub ngram_min: Option<usize>,
    /// Defaults to 2 for words, 4 for characters.
    #[arg(long)]
    pub ngram_max: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

impl TrainArgs {
    pub fn config(&self) -> NbConfig {
        let unit = NgramUnit::from(self.unit);
        let (lo, hi) = default_range(unit);
        NbConfig {
            ngram_min: self.ngram_min.unwrap_or(lo),
            ngram_max: self.ngram_max.unwrap_or(hi),
            alpha: self.alpha,
            unit,
        }
    }
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Model column value; defaults to e.g. `nb-word-1-2`.
    #[arg(long)]
    pub model_id: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EnsembleArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub predictions: Vec<PathBuf>,
    /// One weight per prediction file; default is the plain average.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Labeled corpus for the naive Bayes backends.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Labeled evaluation corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// `word`, `char`, or with a range such as `char:2-5`. Repeatable.
    #[arg(long = "backend", value_parser = parse_backend)]
    pub backends: Vec<NbConfig>,
    /// Extra prediction files to ensemble, e.g. exported transformer outputs.
    #[arg(long, num_args = 1..)]
    pub predictions: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for intermediate files (clean text, models, predictions, labels).
    #[arg(long)]
    pub work_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

pub fn parse_backend(s: &str) -> Result<NbConfig, String> {
    let (unit, range) = match s.split_once(':') {
        Some((u, r)) => (u, Some(r)),
        None => (s, None),
    };
    let unit = match unit {
        "word" => NgramUnit::Word,
        "char" => NgramUnit::Char,
        other => {
            return Err(format!(
                "unknown backend unit {other:?} (expected word or char)"
            ))
        }
    };
    let (lo, hi) = match range {
        None => default_range(unit),
        Some(r) => {
            let (a, b) = r.split_once('-').unwrap_or((r, r));
            let lo = a.parse().map_err(|_| format!("bad n-gram range {r:?}"))?;
            let hi = b.parse().map_err(|_| format!("bad n-gram range {r:?}"))?;
            (lo, hi)
        }
    };
    NbConfig::new(unit, lo, hi, 1.0).map_err(|e| e.to_string())
}
