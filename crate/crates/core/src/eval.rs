//! Scoring predictions against a dataset and the model-side preprocessing:
//! input formatting and sliding-window splitting of long contexts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qa::{QuestionType, SquadDataset};

/// Question id to predicted answer text. The empty string is an abstention.
pub type Predictions = HashMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Marker {
    Cls,
    Sep,
}

impl Marker {
    pub fn as_str(self) -> &'static str {
        match self {
            Marker::Cls => "[CLS]",
            Marker::Sep => "[SEP]",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub max_question_tokens: usize,
    pub max_sequence_tokens: usize,
    pub max_answer_tokens: usize,
    pub doc_stride: usize,
    pub lowercase: bool,
    /// Drop "a", "an" and "the" before comparing answers.
    pub remove_articles: bool,
    /// Sequence positions set aside for marker tokens when sizing windows.
    pub reserved_marker_tokens: usize,
    /// Marker closing a model input.
    pub trailing_marker: Marker,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            max_question_tokens: 64,
            max_sequence_tokens: 512,
            max_answer_tokens: 30,
            doc_stride: 128,
            lowercase: true,
            remove_articles: false,
            reserved_marker_tokens: 0,
            trailing_marker: Marker::Cls,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("doc stride {stride} must be shorter than the window length {window}")]
    StrideTooLong { stride: usize, window: usize },
    #[error("a {question}-token question leaves no room in a {max}-token sequence")]
    NoRoomForContext { question: usize, max: usize },
}

pub fn normalize_and_tokenize(text: &str, config: &HarnessConfig) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(|t| if config.lowercase { t.to_lowercase() } else { t.to_string() })
        .filter(|t| !(config.remove_articles && matches!(t.to_lowercase().as_str(), "a" | "an" | "the")))
        .collect()
}

fn f1_tokens(pred: &[String], gold: &[String]) -> f64 {
    if pred.is_empty() || gold.is_empty() {
        return if pred.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for g in gold {
        *counts.entry(g).or_default() += 1;
    }
    let mut common = 0usize;
    for p in pred {
        if let Some(c) = counts.get_mut(p.as_str()).filter(|c| **c > 0) {
            *c -= 1;
            common += 1;
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Token-overlap F1 between two answers, in [0, 1].
pub fn token_f1(pred: &str, gold: &str, config: &HarnessConfig) -> f64 {
    f1_tokens(&normalize_and_tokenize(pred, config), &normalize_and_tokenize(gold, config))
}

pub fn exact_match(pred: &str, gold: &str, config: &HarnessConfig) -> bool {
    normalize_and_tokenize(pred, config) == normalize_and_tokenize(gold, config)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub n: usize,
    /// Percent.
    pub exact_match: f64,
    /// Percent.
    pub f1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub overall: Score,
    /// Every question type, in report order; types with no questions have n = 0.
    pub per_type: Vec<(QuestionType, Score)>,
    /// Predicted ids that are not in the dataset.
    pub unknown_ids: Vec<String>,
    /// Dataset ids with no prediction; scored as abstentions.
    pub missing_ids: Vec<String>,
}

impl ScoreReport {
    pub fn get(&self, t: QuestionType) -> Score {
        self.per_type.iter().find(|(k, _)| *k == t).map(|(_, s)| *s).unwrap_or_default()
    }

    /// Tab-separated table: one row per type, then Overall.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("type\tn\tEM\tF1\n");
        let rows = self.per_type.iter().map(|(t, s)| (t.label(), s)).chain([("Overall", &self.overall)]);
        for (label, s) in rows {
            let _ = writeln!(out, "{label}\t{}\t{:.2}\t{:.2}", s.n, s.exact_match, s.f1);
        }
        out
    }
}

/// Scores one question: the best match over gold answers; for unanswerable
/// questions only an abstention counts.
pub fn score_item(pred: &str, gold: &[&str], config: &HarnessConfig) -> (f64, f64) {
    let p = normalize_and_tokenize(pred, config);
    if gold.is_empty() {
        let hit = if p.is_empty() { 1.0 } else { 0.0 };
        return (hit, hit);
    }
    gold.iter().fold((0.0, 0.0), |(em, f1), g| {
        let g = normalize_and_tokenize(g, config);
        let e = if p == g { 1.0 } else { 0.0 };
        (f64::max(em, e), f64::max(f1, f1_tokens(&p, &g)))
    })
}

pub fn score(ds: &SquadDataset, preds: &Predictions, config: &HarnessConfig) -> ScoreReport {
    let items: Vec<_> = ds.questions().map(|(_, q)| q).collect();
    let scored: Vec<(QuestionType, f64, f64, bool)> = items
        .par_iter()
        .map(|q| {
            let t = QuestionType::from_id(&q.id).unwrap_or(QuestionType::InfoNamedEntity);
            let pred = preds.get(&q.id);
            let gold: Vec<&str> =
                if q.is_impossible { Vec::new() } else { q.answers.iter().map(|a| a.text.as_str()).collect() };
            let (em, f1) = score_item(pred.map_or("", String::as_str), &gold, config);
            (t, em, f1, pred.is_none())
        })
        .collect();

    let mut sums: BTreeMap<QuestionType, (usize, f64, f64)> = BTreeMap::new();
    let mut total = (0usize, 0.0, 0.0);
    let mut missing = Vec::new();
    for (q, (t, em, f1, miss)) in items.iter().zip(&scored) {
        let s = sums.entry(*t).or_default();
        *s = (s.0 + 1, s.1 + em, s.2 + f1);
        total = (total.0 + 1, total.1 + em, total.2 + f1);
        if *miss {
            missing.push(q.id.clone());
        }
    }
    let mean = |(n, em, f1): (usize, f64, f64)| Score {
        n,
        exact_match: if n == 0 { 0.0 } else { 100.0 * em / n as f64 },
        f1: if n == 0 { 0.0 } else { 100.0 * f1 / n as f64 },
    };
    let known: std::collections::HashSet<&str> = items.iter().map(|q| q.id.as_str()).collect();
    let mut unknown: Vec<String> = preds.keys().filter(|k| !known.contains(k.as_str())).cloned().collect();
    unknown.sort();
    ScoreReport {
        overall: mean(total),
        per_type: QuestionType::ALL.iter().map(|t| (*t, mean(sums.get(t).copied().unwrap_or_default()))).collect(),
        unknown_ids: unknown,
        missing_ids: missing,
    }
}

/// Predictions file: a JSON object from question id to answer text.
pub fn load_predictions(bytes: &[u8]) -> serde_json::Result<Predictions> {
    serde_json::from_slice(bytes)
}

/// The gold answer of every question; a perfect prediction set.
pub fn gold_predictions(ds: &SquadDataset) -> Predictions {
    ds.questions()
        .map(|(_, q)| (q.id.clone(), q.answers.first().map(|a| a.text.clone()).unwrap_or_default()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub token_start: usize,
    /// Exclusive.
    pub token_end: usize,
    pub is_answerable: bool,
    /// Answer token span relative to `token_start`, end exclusive.
    pub answer: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSplit {
    pub window_length: usize,
    pub windows: Vec<Window>,
}

/// Splits a tokenized context into overlapping windows sized to fit next to the
/// question. Consecutive windows share `doc_stride` tokens. A window is answerable
/// only when it holds the whole gold span (`answer`, end exclusive) and that span
/// is no longer than `max_answer_tokens`.
pub fn window_split(
    question_tokens: usize,
    context_tokens: usize,
    answer: Option<(usize, usize)>,
    config: &HarnessConfig,
) -> Result<WindowSplit, ConfigError> {
    let q = question_tokens.min(config.max_question_tokens);
    let used = q + config.reserved_marker_tokens;
    if config.max_sequence_tokens <= used {
        return Err(ConfigError::NoRoomForContext { question: q, max: config.max_sequence_tokens });
    }
    let len = config.max_sequence_tokens - used;
    if config.doc_stride >= len {
        return Err(ConfigError::StrideTooLong { stride: config.doc_stride, window: len });
    }
    let mut windows = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + len).min(context_tokens);
        let local = answer
            .filter(|&(a, b)| a >= start && b <= end && a < b && b - a <= config.max_answer_tokens)
            .map(|(a, b)| (a - start, b - start));
        windows.push(Window { token_start: start, token_end: end, is_answerable: local.is_some(), answer: local });
        if end >= context_tokens {
            break;
        }
        start += len - config.doc_stride;
    }
    Ok(WindowSplit { window_length: len, windows })
}

/// `[CLS] question [SEP] context [CLS]`, or `[SEP]` at the end when so configured.
pub fn format_model_input(question: &str, context: &str, trailing: Marker) -> String {
    format!("[CLS] {question} [SEP] {context} {}", trailing.as_str())
}

/// Inverse of [`format_model_input`].
pub fn parse_model_input(input: &str) -> Option<(&str, &str)> {
    let body = input.strip_prefix("[CLS] ")?;
    let body = body.strip_suffix(" [CLS]").or_else(|| body.strip_suffix(" [SEP]"))?;
    body.split_once(" [SEP] ")
}
