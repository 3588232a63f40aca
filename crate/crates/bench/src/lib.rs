//! Synthetic inputs for the criterion benches.
//!
//! Inputs come from a fixed-seed LCG and are identical on every run.

use sentimix_core::{parse_conll_str, Corpus, PredictionSet, ProbabilityVector, SentimentLabel};

const WORDS: &[(&str, &str)] = &[
    ("kya", "Hin"),
    ("hai", "Hin"),
    ("accha", "Hin"),
    ("bekar", "Hin"),
    ("mast", "Hin"),
    ("news", "Eng"),
    ("match", "Eng"),
    ("great", "Eng"),
    ("worst", "Eng"),
    ("@user", "O"),
    ("370ko", "O"),
    ("https://t.co/abc", "O"),
    ("!!", "O"),
];

pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 33) as u32
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.next_u32() as usize % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u32() as f64 + 1.0) / (u32::MAX as f64 + 2.0)
    }
}

/// CONLL text with `n` labeled tweets of 5..15 tokens.
pub fn synthetic_conll(n: usize, seed: u64) -> String {
    let mut rng = Lcg::new(seed);
    let mut out = String::new();
    for i in 0..n {
        let label = SentimentLabel::ALL[rng.below(3)];
        out.push_str(&format!("meta\t{i}\t{label}\n"));
        for _ in 0..5 + rng.below(11) {
            let (w, tag) = WORDS[rng.below(WORDS.len())];
            out.push_str(&format!("{w}\t{tag}\n"));
        }
        out.push('\n');
    }
    out
}

pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    parse_conll_str(&synthetic_conll(n, seed)).expect("generator emits valid CONLL")
}

/// Random softmax vectors for every uid of `corpus`.
pub fn synthetic_predictions(corpus: &Corpus, model_id: &str, seed: u64) -> PredictionSet {
    let mut rng = Lcg::new(seed);
    let mut set = PredictionSet::new(model_id).expect("valid id");
    for uid in corpus.uids() {
        let raw = [rng.unit(), rng.unit(), rng.unit()];
        let p = ProbabilityVector::normalize(raw).expect("positive scores");
        set.insert(uid, p).expect("unique uids");
    }
    set
}
