//! Softmax prediction files: the boundary every backend writes through.
//!
//! ```text
//! uid<TAB>model<TAB>p_negative<TAB>p_neutral<TAB>p_positive
//! 1<TAB>nb<TAB>0.200000<TAB>0.300000<TAB>0.500000
//! ```
//!
//! Probabilities are written with exactly six decimals. Columns always follow
//! the canonical class order (negative, neutral, positive).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, BufRead};

use indexmap::IndexMap;
use thiserror::Error;

use crate::corpus::{Corpus, SentimentLabel};

/// Half-width of the accepted band around 1 for a vector's sum.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

/// Allowance for binary rounding when summing decimal inputs. Three values
/// rounded to six decimals can sum to exactly 1 ± 1e-6, which must pass.
const SUM_SLACK: f64 = 1e-12;

pub const HEADER: &str = "uid\tmodel\tp_negative\tp_neutral\tp_positive";

/// Model id given to a header-only file, which carries no model column.
pub const UNKNOWN_MODEL_ID: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbabilityError {
    #[error("probability {0} is not finite")]
    NonFinite(f64),
    #[error("probability {0} is negative")]
    Negative(f64),
    #[error("probability {0} exceeds 1")]
    AboveOne(f64),
    #[error("probabilities sum to {0}, not 1")]
    SimplexViolation(f64),
}

/// A point on the three-class simplex, in canonical class order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityVector([f64; 3]);

impl ProbabilityVector {
    /// Validates the components. Values are kept as given; a sum within
    /// `SIMPLEX_TOLERANCE` of 1 is accepted without rescaling.
    pub fn new(p_negative: f64, p_neutral: f64, p_positive: f64) -> Result<Self, ProbabilityError> {
        Self::from_array([p_negative, p_neutral, p_positive])
    }

    pub fn from_array(p: [f64; 3]) -> Result<Self, ProbabilityError> {
        for &x in &p {
            if !x.is_finite() {
                return Err(ProbabilityError::NonFinite(x));
            }
            if x < 0.0 {
                return Err(ProbabilityError::Negative(x));
            }
            if x > 1.0 + SIMPLEX_TOLERANCE {
                return Err(ProbabilityError::AboveOne(x));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE + SUM_SLACK {
            return Err(ProbabilityError::SimplexViolation(sum));
        }
        Ok(ProbabilityVector(p))
    }

    /// Scales non-negative scores with a positive total onto the simplex.
    pub fn normalize(scores: [f64; 3]) -> Result<Self, ProbabilityError> {
        for &x in &scores {
            if !x.is_finite() {
                return Err(ProbabilityError::NonFinite(x));
            }
            if x < 0.0 {
                return Err(ProbabilityError::Negative(x));
            }
        }
        let sum: f64 = scores.iter().sum();
        if sum <= 0.0 {
            return Err(ProbabilityError::SimplexViolation(sum));
        }
        Ok(ProbabilityVector(scores.map(|x| (x / sum).min(1.0))))
    }

    /// For values already known to be on the simplex (convex combinations,
    /// normalized exponentials). Checked in debug builds only.
    pub(crate) fn from_convex(p: [f64; 3]) -> Self {
        debug_assert!(p.iter().all(|x| x.is_finite() && *x >= 0.0));
        debug_assert!((p.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOLERANCE + SUM_SLACK);
        ProbabilityVector(p)
    }

    pub fn uniform() -> Self {
        ProbabilityVector([1.0 / 3.0; 3])
    }

    pub fn one_hot(label: SentimentLabel) -> Self {
        let mut p = [0.0; 3];
        p[label.index()] = 1.0;
        ProbabilityVector(p)
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, label: SentimentLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn negative(&self) -> f64 {
        self.0[0]
    }

    pub fn neutral(&self) -> f64 {
        self.0[1]
    }

    pub fn positive(&self) -> f64 {
        self.0[2]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictionSetError {
    #[error("model id must be non-empty and free of tabs and newlines, got {0:?}")]
    InvalidModelId(String),
    #[error("uid must be non-empty and free of tabs and newlines, got {0:?}")]
    InvalidUid(String),
    #[error("duplicate uid {0:?}")]
    DuplicateUid(String),
}

fn is_field_safe(s: &str) -> bool {
    !s.is_empty() && !s.contains(['\t', '\n', '\r'])
}

/// One model's probability vector per tweet, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    model_id: String,
    rows: IndexMap<String, ProbabilityVector>,
}

impl PredictionSet {
    pub fn new(model_id: impl Into<String>) -> Result<Self, PredictionSetError> {
        let model_id = model_id.into();
        if !is_field_safe(&model_id) {
            return Err(PredictionSetError::InvalidModelId(model_id));
        }
        Ok(PredictionSet {
            model_id,
            rows: IndexMap::new(),
        })
    }

    pub fn insert(
        &mut self,
        uid: impl Into<String>,
        p: ProbabilityVector,
    ) -> Result<(), PredictionSetError> {
        let uid = uid.into();
        if !is_field_safe(&uid) {
            return Err(PredictionSetError::InvalidUid(uid));
        }
        if self.rows.contains_key(&uid) {
            return Err(PredictionSetError::DuplicateUid(uid));
        }
        self.rows.insert(uid, p);
        Ok(())
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, uid: &str) -> Option<&ProbabilityVector> {
        self.rows.get(uid)
    }

    pub fn contains(&self, uid: &str) -> bool {
        self.rows.contains_key(uid)
    }

    pub fn uids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ProbabilityVector)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v))
    }
}

const UNITS: i64 = 1_000_000;

/// Six-decimal text for one row. Rows whose rounded sum lands outside
/// 1 ± 1e-6 are moved back by largest remainder, one unit at a time.
fn encode_row(p: [f64; 3]) -> [String; 3] {
    // A tie at the seventh decimal needs a non-dyadic value, so correctly
    // rounded `{:.6}` never meets one.
    let text = p.map(|x| format!("{x:.6}"));
    let mut units = [0i64; 3];
    for (u, t) in units.iter_mut().zip(&text) {
        *u = t.replace('.', "").parse().expect("six-decimal number");
    }
    let tol = (SIMPLEX_TOLERANCE * UNITS as f64).round() as i64;
    let mut total: i64 = units.iter().sum();
    if (total - UNITS).abs() <= tol {
        return text;
    }
    let residual = |i: usize, u: &[i64; 3]| p[i] * UNITS as f64 - u[i] as f64;
    while total > UNITS + tol {
        let i = (0..3)
            .filter(|&i| units[i] > 0)
            .min_by(|&a, &b| residual(a, &units).total_cmp(&residual(b, &units)))
            .expect("positive total");
        units[i] -= 1;
        total -= 1;
    }
    while total < UNITS - tol {
        let i = (0..3)
            .max_by(|&a, &b| {
                residual(a, &units)
                    .total_cmp(&residual(b, &units))
                    .then(b.cmp(&a))
            })
            .expect("three components");
        units[i] += 1;
        total += 1;
    }
    units.map(|u| format!("{}.{:06}", u / UNITS, u % UNITS))
}

pub fn format_predictions(set: &PredictionSet) -> String {
    let mut out = String::with_capacity(HEADER.len() + 1 + set.len() * 48);
    out.push_str(HEADER);
    out.push('\n');
    for (uid, p) in set.iter() {
        let [neg, neu, pos] = encode_row(p.as_array());
        let _ = writeln!(out, "{uid}\t{}\t{neg}\t{neu}\t{pos}", set.model_id);
    }
    out
}

pub fn write_predictions<W: io::Write>(set: &PredictionSet, mut output: W) -> io::Result<()> {
    output.write_all(format_predictions(set).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadPredictionsError {
    #[error("missing or wrong header, expected {HEADER:?}")]
    MissingHeader,
    #[error("line {line}: expected 5 tab-separated fields, found {found}")]
    BadFieldCount { line: usize, found: usize },
    #[error("line {line}: {value:?} is not a finite number")]
    NonNumericProbability { line: usize, value: String },
    #[error("line {line}: negative probability {value}")]
    NegativeProbability { line: usize, value: f64 },
    #[error("line {line}: probabilities sum to {sum}, outside 1 ± {SIMPLEX_TOLERANCE}")]
    SimplexViolation { line: usize, sum: f64 },
    #[error("line {line}: duplicate uid {uid:?}")]
    DuplicateUid { line: usize, uid: String },
    #[error("line {line}: model id {found:?} differs from {expected:?}")]
    InconsistentModelId {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: {source}")]
    InvalidField {
        line: usize,
        source: PredictionSetError,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<io::Error> for ReadPredictionsError {
    fn from(e: io::Error) -> Self {
        ReadPredictionsError::Io(e.to_string())
    }
}

fn parse_probability(line: usize, raw: &str) -> Result<f64, ReadPredictionsError> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => {
            if v < 0.0 {
                Err(ReadPredictionsError::NegativeProbability { line, value: v })
            } else {
                Ok(v)
            }
        }
        _ => Err(ReadPredictionsError::NonNumericProbability {
            line,
            value: raw.to_string(),
        }),
    }
}

pub fn read_predictions<R: BufRead>(input: R) -> Result<PredictionSet, ReadPredictionsError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) => {
            let header = header?;
            if header.strip_suffix('\r').unwrap_or(&header) != HEADER {
                return Err(ReadPredictionsError::MissingHeader);
            }
        }
        None => return Err(ReadPredictionsError::MissingHeader),
    }

    let mut set: Option<PredictionSet> = None;
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(ReadPredictionsError::BadFieldCount {
                line: line_no,
                found: fields.len(),
            });
        }
        let set = match set.as_mut() {
            Some(s) => {
                if s.model_id != fields[1] {
                    return Err(ReadPredictionsError::InconsistentModelId {
                        line: line_no,
                        expected: s.model_id.clone(),
                        found: fields[1].to_string(),
                    });
                }
                s
            }
            None => set.insert(PredictionSet::new(fields[1]).map_err(|source| {
                ReadPredictionsError::InvalidField {
                    line: line_no,
                    source,
                }
            })?),
        };
        let mut p = [0.0; 3];
        for (slot, raw) in p.iter_mut().zip(&fields[2..]) {
            *slot = parse_probability(line_no, raw)?;
        }
        let vector = ProbabilityVector::from_array(p).map_err(|e| match e {
            ProbabilityError::SimplexViolation(_) | ProbabilityError::AboveOne(_) => {
                ReadPredictionsError::SimplexViolation {
                    line: line_no,
                    sum: p.iter().sum(),
                }
            }
            ProbabilityError::Negative(value) => ReadPredictionsError::NegativeProbability {
                line: line_no,
                value,
            },
            ProbabilityError::NonFinite(v) => ReadPredictionsError::NonNumericProbability {
                line: line_no,
                value: v.to_string(),
            },
        })?;
        set.insert(fields[0], vector)
            .map_err(|source| match source {
                PredictionSetError::DuplicateUid(uid) => {
                    ReadPredictionsError::DuplicateUid { line: line_no, uid }
                }
                other => ReadPredictionsError::InvalidField {
                    line: line_no,
                    source: other,
                },
            })?;
    }
    Ok(match set {
        Some(s) => s,
        None => PredictionSet::new(UNKNOWN_MODEL_ID).expect("constant id is valid"),
    })
}

pub fn read_predictions_str(input: &str) -> Result<PredictionSet, ReadPredictionsError> {
    read_predictions(input.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{} corpus uid(s) missing from predictions: {}{}", missing.len(), missing.join(", "), extra_note(extra))]
    MissingUid {
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("{} prediction uid(s) not in corpus: {}", extra.len(), extra.join(", "))]
    ExtraUid { extra: Vec<String> },
}

fn extra_note(extra: &[String]) -> String {
    if extra.is_empty() {
        String::new()
    } else {
        format!("; {} extra uid(s): {}", extra.len(), extra.join(", "))
    }
}

/// Succeeds iff the set covers exactly the corpus uids.
pub fn validate_against(set: &PredictionSet, corpus: &Corpus) -> Result<(), ValidationError> {
    let missing: Vec<String> = corpus
        .uids()
        .filter(|u| !set.contains(u))
        .map(str::to_string)
        .collect();
    let corpus_uids: HashSet<&str> = corpus.uids().collect();
    let extra: Vec<String> = set
        .uids()
        .filter(|u| !corpus_uids.contains(u))
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        Err(ValidationError::MissingUid { missing, extra })
    } else if !extra.is_empty() {
        Err(ValidationError::ExtraUid { extra })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conll_str;

    fn pv(a: f64, b: f64, c: f64) -> ProbabilityVector {
        ProbabilityVector::new(a, b, c).unwrap()
    }

    #[test]
    fn header_only_for_empty_set() {
        let set = PredictionSet::new("nb").unwrap();
        assert_eq!(format_predictions(&set), format!("{HEADER}\n"));
    }

    #[test]
    fn single_row_format() {
        let mut set = PredictionSet::new("nb").unwrap();
        set.insert("1", pv(0.2, 0.3, 0.5)).unwrap();
        let text = format_predictions(&set);
        assert_eq!(
            text.lines().nth(1),
            Some("1\tnb\t0.200000\t0.300000\t0.500000")
        );
        let mut buf = Vec::new();
        write_predictions(&set, &mut buf).unwrap();
        assert_eq!(buf, text.as_bytes());
    }

    #[test]
    fn roundtrip_parses() {
        let mut set = PredictionSet::new("m").unwrap();
        set.insert("a", pv(0.123_456_789, 0.5, 0.376_543_211))
            .unwrap();
        set.insert("b", ProbabilityVector::uniform()).unwrap();
        let back = read_predictions_str(&format_predictions(&set)).unwrap();
        assert_eq!(back.model_id(), "m");
        assert_eq!(back.uids().collect::<Vec<_>>(), vec!["a", "b"]);
        for (uid, p) in set.iter() {
            let q = back.get(uid).unwrap();
            for k in 0..3 {
                assert!((p.as_array()[k] - q.as_array()[k]).abs() <= 5e-7);
            }
        }
    }

    #[test]
    fn simplex_violation() {
        let text = format!("{HEADER}\n1\tm\t0.5\t0.5\t0.1\n");
        assert!(matches!(
            read_predictions_str(&text),
            Err(ReadPredictionsError::SimplexViolation { line: 2, .. })
        ));
    }

    #[test]
    fn rounding_drift_of_one_micro_unit_accepted() {
        for row in [
            "0.999999\t0\t0",
            "0.500000\t0.250001\t0.250000",
            "0.333333\t0.333333\t0.333333",
        ] {
            let text = format!("{HEADER}\n1\tm\t{row}\n");
            assert!(read_predictions_str(&text).is_ok(), "{row}");
        }
        let text = format!("{HEADER}\n1\tm\t0.999998\t0\t0\n");
        assert!(read_predictions_str(&text).is_err());
    }

    #[test]
    fn rounded_thirds_accepted() {
        let text = format!("{HEADER}\n1\tm\t0.333333\t0.333333\t0.333334\n");
        let set = read_predictions_str(&text).unwrap();
        let sum: f64 = set.get("1").unwrap().as_array().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_center_rows_stay_readable() {
        // Sum 0.9999991 rounds to 0.999998 without the remainder fix.
        for p in [
            [0.1000004, 0.2000004, 0.6999983],
            [0.0999996, 0.1999996, 0.7000017],
            [0.0, 0.0000004, 0.9999987],
        ] {
            let v = ProbabilityVector::from_array(p).unwrap();
            let mut set = PredictionSet::new("m").unwrap();
            set.insert("1", v).unwrap();
            let back = read_predictions_str(&format_predictions(&set)).unwrap();
            let q = back.get("1").unwrap().as_array();
            for i in 0..3 {
                assert!((p[i] - q[i]).abs() <= 1e-6, "{p:?} -> {q:?}");
            }
        }
        assert_eq!(
            encode_row([0.1000004, 0.2000004, 0.6999983]),
            ["0.100001", "0.200000", "0.699998"]
        );
    }

    #[test]
    fn within_tolerance_kept_as_is() {
        let p = pv(0.3333333, 0.3333333, 0.3333333);
        assert_eq!(p.as_array(), [0.3333333; 3]);
        assert!(ProbabilityVector::new(0.34, 0.33, 0.33 + 2e-6).is_err());
    }

    #[test]
    fn explicit_normalization() {
        let p = ProbabilityVector::normalize([2.0, 1.0, 1.0]).unwrap();
        assert_eq!(p.as_array(), [0.5, 0.25, 0.25]);
        assert!(ProbabilityVector::normalize([0.0, 0.0, 0.0]).is_err());
        assert!(ProbabilityVector::normalize([1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn read_errors() {
        assert_eq!(
            read_predictions_str(""),
            Err(ReadPredictionsError::MissingHeader)
        );
        assert_eq!(
            read_predictions_str("uid\tmodel\n"),
            Err(ReadPredictionsError::MissingHeader)
        );
        let bad = |row: &str| read_predictions_str(&format!("{HEADER}\n{row}\n"));
        assert!(matches!(
            bad("1\tm\t0.5\t0.5"),
            Err(ReadPredictionsError::BadFieldCount { found: 4, .. })
        ));
        assert!(matches!(
            bad("1\tm\tabc\t0.5\t0.5"),
            Err(ReadPredictionsError::NonNumericProbability { .. })
        ));
        assert!(matches!(
            bad("1\tm\tNaN\t0.5\t0.5"),
            Err(ReadPredictionsError::NonNumericProbability { .. })
        ));
        assert!(matches!(
            bad("1\tm\t-0.1\t0.6\t0.5"),
            Err(ReadPredictionsError::NegativeProbability { .. })
        ));
        assert!(matches!(
            bad("1\tm\t1\t0\t0\n1\tm\t0\t1\t0"),
            Err(ReadPredictionsError::DuplicateUid { line: 3, .. })
        ));
        assert!(matches!(
            bad("1\tm\t1\t0\t0\n2\tn\t0\t1\t0"),
            Err(ReadPredictionsError::InconsistentModelId { line: 3, .. })
        ));
        assert!(matches!(
            bad("\tm\t1\t0\t0"),
            Err(ReadPredictionsError::InvalidField { .. })
        ));
    }

    #[test]
    fn header_only_file() {
        let set = read_predictions_str(&format!("{HEADER}\n")).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.model_id(), UNKNOWN_MODEL_ID);
    }

    #[test]
    fn set_invariants() {
        assert!(PredictionSet::new("").is_err());
        assert!(PredictionSet::new("a\tb").is_err());
        let mut s = PredictionSet::new("m").unwrap();
        s.insert("1", ProbabilityVector::uniform()).unwrap();
        assert_eq!(
            s.insert("1", ProbabilityVector::uniform()),
            Err(PredictionSetError::DuplicateUid("1".into()))
        );
    }

    #[test]
    fn vector_rejects_bad_components() {
        assert!(matches!(
            ProbabilityVector::new(f64::NAN, 0.5, 0.5),
            Err(ProbabilityError::NonFinite(_))
        ));
        assert!(matches!(
            ProbabilityVector::new(-0.1, 0.6, 0.5),
            Err(ProbabilityError::Negative(_))
        ));
        assert!(matches!(
            ProbabilityVector::new(1.5, 0.0, 0.0),
            Err(ProbabilityError::AboveOne(_))
        ));
    }

    #[test]
    fn validation() {
        let corpus = parse_conll_str("meta\t1\nx\tO\n\nmeta\t2\ny\tO\n").unwrap();
        let mut set = PredictionSet::new("m").unwrap();
        set.insert("1", ProbabilityVector::uniform()).unwrap();
        assert_eq!(
            validate_against(&set, &corpus),
            Err(ValidationError::MissingUid {
                missing: vec!["2".into()],
                extra: vec![]
            })
        );
        set.insert("2", ProbabilityVector::uniform()).unwrap();
        assert_eq!(validate_against(&set, &corpus), Ok(()));
        set.insert("3", ProbabilityVector::uniform()).unwrap();
        let err = validate_against(&set, &corpus).unwrap_err();
        assert_eq!(
            err,
            ValidationError::ExtraUid {
                extra: vec!["3".into()]
            }
        );
        assert!(err.to_string().contains('3'));
    }
}
