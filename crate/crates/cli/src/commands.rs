use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sentimix_core::corpus::{
    class_distribution, parse_conll_with_stats, write_conll, Corpus, LanguageTag,
};
use sentimix_core::ensemble::{classify_set, combine, format_labels, EnsembleConfig};
use sentimix_core::metrics::{evaluate, EvaluationReport};
use sentimix_core::naive_bayes::NbModel;
use sentimix_core::pipeline::{run_pipeline, train_backend, Backend, PipelineInput};
use sentimix_core::predictions::{format_predictions, read_predictions_str, PredictionSet};
use sentimix_core::preprocess::{normalize_corpus, write_clean_tsv};

use crate::args::*;

pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn require_exists(flag: &str, path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "{flag}: no such file {}",
            path.display()
        )))
    }
}

fn check_inputs(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Ingest(a) => require_exists("--corpus", &a.corpus),
        Command::Stats(a) => require_exists("--corpus", &a.corpus),
        Command::Preprocess(a) => require_exists("--corpus", &a.corpus),
        Command::TrainBaseline(a) => require_exists("--corpus", &a.corpus),
        Command::Predict(a) => {
            require_exists("--model", &a.model)?;
            require_exists("--corpus", &a.corpus)
        }
        Command::Ensemble(a) => {
            for p in &a.predictions {
                require_exists("--predictions", p)?;
            }
            check_weight_count(&a.weights, a.predictions.len())
        }
        Command::Classify(a) => require_exists("--predictions", &a.predictions),
        Command::Evaluate(a) => {
            require_exists("--corpus", &a.corpus)?;
            require_exists("--predictions", &a.predictions)
        }
        Command::Pipeline(a) => {
            require_exists("--corpus", &a.corpus)?;
            if let Some(t) = &a.train {
                require_exists("--train", t)?;
            }
            for p in &a.predictions {
                require_exists("--predictions", p)?;
            }
            let backends = pipeline_backends(a);
            if !backends.is_empty() && a.train.is_none() {
                return Err(Failure::Usage(
                    "--train is required when naive Bayes backends are used".into(),
                ));
            }
            check_weight_count(&a.weights, backends.len() + a.predictions.len())
        }
    }
}

fn check_weight_count(weights: &Option<Vec<f64>>, members: usize) -> Result<(), Failure> {
    match weights {
        Some(w) if w.len() != members => Err(Failure::Usage(format!(
            "--weights: {} weights given for {} ensemble members",
            w.len(),
            members
        ))),
        _ => Ok(()),
    }
}

pub fn run(command: Command) -> Result<(), Failure> {
    check_inputs(&command)?;
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Stats(a) => stats(a),
        Command::Preprocess(a) => preprocess(a),
        Command::TrainBaseline(a) => train_baseline(a),
        Command::Predict(a) => predict(a),
        Command::Ensemble(a) => ensemble(a),
        Command::Classify(a) => classify(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Pipeline(a) => pipeline(a),
    }
    .map_err(Failure::Data)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = read_text(path)?;
    let (corpus, stats) = parse_conll_with_stats(text.as_bytes())
        .with_context(|| format!("parsing corpus {}", path.display()))?;
    if stats.folded_tags > 0 {
        eprintln!(
            "warning: {}: {} token tag(s) outside {{Eng, Hin, O}} read as O",
            path.display(),
            stats.folded_tags
        );
    }
    Ok(corpus)
}

fn load_predictions(path: &Path) -> Result<PredictionSet> {
    let text = read_text(path)?;
    read_predictions_str(&text).with_context(|| format!("reading predictions {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let tokens: usize = corpus.iter().map(|t| t.tokens().len()).sum();
    eprintln!("{} tweets, {} tokens", corpus.len(), tokens);
    emit(a.out.as_deref(), &write_conll(&corpus))
}

fn stats(a: StatsArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let mut langs = [0usize; 3];
    let mut tokens = 0;
    for tweet in &corpus {
        for tok in tweet.tokens() {
            tokens += 1;
            langs[match tok.lang() {
                LanguageTag::Eng => 0,
                LanguageTag::Hin => 1,
                LanguageTag::Other => 2,
            }] += 1;
        }
    }
    let unlabeled = corpus.iter().filter(|t| t.gold().is_none()).count();
    let classes = if unlabeled == 0 {
        Some(class_distribution(&corpus)?)
    } else {
        None
    };
    let text = match a.format {
        Format::Json => {
            let v = serde_json::json!({
                "tweets": corpus.len(),
                "tokens": tokens,
                "languages": { "Eng": langs[0], "Hin": langs[1], "O": langs[2] },
                "unlabeled": unlabeled,
                "classes": classes.map(|c| serde_json::json!({
                    "negative": c.0[0], "neutral": c.0[1], "positive": c.0[2],
                })),
            });
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        Format::Table => {
            let mut s = format!(
                "tweets     {}\ntokens     {}\nEng        {}\nHin        {}\nO          {}\n",
                corpus.len(),
                tokens,
                langs[0],
                langs[1],
                langs[2]
            );
            match classes {
                Some(c) => s.push_str(&format!(
                    "negative   {}\nneutral    {}\npositive   {}\n",
                    c.0[0], c.0[1], c.0[2]
                )),
                None => s.push_str(&format!("unlabeled  {unlabeled}\n")),
            }
            s
        }
    };
    emit(None, &text)
}

fn preprocess(a: PreprocessArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    emit(
        a.out.as_deref(),
        &write_clean_tsv(&normalize_corpus(&corpus)),
    )
}

fn train_baseline(a: TrainArgs) -> Result<()> {
    let config = a.config();
    let corpus = load_corpus(&a.corpus)?;
    let model = train_backend(&corpus, &config)?;
    eprintln!(
        "trained {} on {} tweets, vocabulary {}",
        config.model_id(),
        corpus.len(),
        model.vocabulary().len()
    );
    emit(Some(&a.out), &model.to_json())
}

fn load_model(path: &Path) -> Result<NbModel> {
    let text = read_text(path)?;
    NbModel::from_json(&text).with_context(|| format!("loading model {}", path.display()))
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let corpus = load_corpus(&a.corpus)?;
    let model_id = a.model_id.unwrap_or_else(|| model.config().model_id());
    let set = model.predict_corpus(&normalize_corpus(&corpus), &model_id)?;
    emit(a.out.as_deref(), &format_predictions(&set))
}

fn ensemble_config(weights: Option<Vec<f64>>) -> EnsembleConfig {
    match weights {
        Some(w) => EnsembleConfig::weighted(w),
        None => EnsembleConfig::uniform(),
    }
}

fn ensemble(a: EnsembleArgs) -> Result<()> {
    let sets = a
        .predictions
        .iter()
        .map(|p| load_predictions(p))
        .collect::<Result<Vec<_>>>()?;
    let combined = combine(&sets, &ensemble_config(a.weights))?;
    emit(a.out.as_deref(), &format_predictions(&combined))
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let set = load_predictions(&a.predictions)?;
    emit(a.out.as_deref(), &format_labels(&classify_set(&set)))
}

fn show_report(report: &EvaluationReport, format: Format) -> Result<()> {
    match format {
        Format::Json => emit(None, &report.to_json()),
        Format::Table => emit(None, &report.to_table()),
    }
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let set = load_predictions(&a.predictions)?;
    let report = evaluate(&corpus, &set).context("evaluating predictions")?;
    if let Some(out) = &a.out {
        emit(Some(out), &report.to_json())?;
    }
    show_report(&report, a.format)
}

fn pipeline_backends(a: &PipelineArgs) -> Vec<Backend> {
    let configs = if a.backends.is_empty() && a.predictions.is_empty() {
        vec![
            parse_backend("word").expect("default backend"),
            parse_backend("char").expect("default backend"),
        ]
    } else {
        a.backends.clone()
    };
    configs
        .into_iter()
        .map(|mut c| {
            c.alpha = a.alpha;
            Backend::naive_bayes(c)
        })
        .collect()
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let backends = pipeline_backends(&a);
    let eval = load_corpus(&a.corpus)?;
    let train = a.train.as_deref().map(load_corpus).transpose()?;
    let external = a
        .predictions
        .iter()
        .map(|p| load_predictions(p))
        .collect::<Result<Vec<_>>>()?;

    let out = run_pipeline(PipelineInput {
        train: train.as_ref(),
        eval: &eval,
        backends,
        external,
        ensemble: ensemble_config(a.weights.clone()),
    })?;

    if let Some(dir) = &a.work_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = |name: &str| -> PathBuf { dir.join(name) };
        emit(Some(&path("clean.tsv")), &write_clean_tsv(&out.eval_clean))?;
        for (backend, model) in &out.models {
            emit(
                Some(&path(&format!("{}.model.json", backend.model_id))),
                &model.to_json(),
            )?;
        }
        for (i, set) in out.members.iter().enumerate() {
            emit(
                Some(&path(&format!("member{i}.{}.tsv", set.model_id()))),
                &format_predictions(set),
            )?;
        }
        emit(
            Some(&path("ensemble.tsv")),
            &format_predictions(&out.ensemble),
        )?;
        emit(Some(&path("labels.tsv")), &format_labels(&out.labels))?;
    }
    emit(Some(&a.out), &out.report.to_json())?;
    show_report(&out.report, a.format)
}
