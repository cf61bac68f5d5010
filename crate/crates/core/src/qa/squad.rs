//! SQuAD 2.0 wire format, answer verification, splitting and sampling.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{QAItem, QuestionType};
use crate::rng::SplitMix64;
use crate::text::span_matches;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    /// Character offset into the paragraph context.
    pub answer_start: usize,
}

/// One question as written to disk. Field order follows the SQuAD 2.0 files, where
/// `plausible_answers` leads on unanswerable questions and is absent otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qa {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plausible_answers: Vec<Answer>,
    pub question: String,
    pub id: String,
    pub answers: Vec<Answer>,
    pub is_impossible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquadParagraph {
    pub qas: Vec<Qa>,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<SquadParagraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquadDataset {
    pub version: String,
    pub data: Vec<Article>,
}

impl Default for SquadDataset {
    fn default() -> Self {
        SquadDataset { version: "v2.0".into(), data: Vec::new() }
    }
}

impl SquadDataset {
    pub fn questions(&self) -> impl Iterator<Item = (&SquadParagraph, &Qa)> {
        self.data
            .iter()
            .flat_map(|a| a.paragraphs.iter())
            .flat_map(|p| p.qas.iter().map(move |q| (p, q)))
    }

    pub fn question_count(&self) -> usize {
        self.data.iter().flat_map(|a| &a.paragraphs).map(|p| p.qas.len()).sum()
    }

    pub fn paragraph_count(&self) -> usize {
        self.data.iter().map(|a| a.paragraphs.len()).sum()
    }

    /// Questions per type, in report order. Types are read back from question ids;
    /// ids that do not carry one count as information questions.
    pub fn type_counts(&self) -> Vec<(QuestionType, usize)> {
        let mut counts: HashMap<QuestionType, usize> = HashMap::new();
        for (_, q) in self.questions() {
            *counts.entry(QuestionType::from_id(&q.id).unwrap_or(QuestionType::InfoNamedEntity)).or_default() += 1;
        }
        QuestionType::ALL.into_iter().map(|t| (t, counts.get(&t).copied().unwrap_or(0))).collect()
    }
}

/// A generated paragraph: one context passage and its questions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    /// `<tree>:<sp>`.
    pub title: String,
    pub sp: String,
    pub depth: u32,
    pub context: String,
    pub qas: Vec<QAItem>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum QaError {
    #[error("duplicate question id {0}")]
    DuplicateId(String),
    #[error("asked for {requested} questions but the dataset has {available}")]
    InsufficientQuestions { requested: usize, available: usize },
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios((f64, f64, f64)),
}

/// Groups paragraphs into articles by title, in first-seen order.
pub fn assemble(paragraphs: Vec<Paragraph>) -> Result<SquadDataset, QaError> {
    let mut ids = HashSet::new();
    for q in paragraphs.iter().flat_map(|p| &p.qas) {
        if !ids.insert(q.id.as_str()) {
            return Err(QaError::DuplicateId(q.id.clone()));
        }
    }
    drop(ids);
    let mut data: Vec<Article> = Vec::new();
    let mut by_title: HashMap<String, usize> = HashMap::new();
    for p in paragraphs {
        let para = SquadParagraph { qas: p.qas.into_iter().map(QAItem::into_wire).collect(), context: p.context };
        match by_title.get(p.title.as_str()) {
            Some(&i) => data[i].paragraphs.push(para),
            None => {
                by_title.insert(p.title.clone(), data.len());
                data.push(Article { title: p.title, paragraphs: vec![para] });
            }
        }
    }
    Ok(SquadDataset { version: "v2.0".into(), data })
}

/// A dataset made of borrowed articles; serializes exactly like [`SquadDataset`].
#[derive(Debug, Serialize)]
pub struct DatasetView<'a> {
    pub version: &'a str,
    pub data: Vec<&'a Article>,
}

impl SquadDataset {
    pub fn view(&self, articles: &[usize]) -> DatasetView<'_> {
        DatasetView { version: &self.version, data: articles.iter().map(|&i| &self.data[i]).collect() }
    }
}

/// UTF-8 JSON, two-space indent, trailing newline.
pub fn serialize(ds: &SquadDataset) -> Vec<u8> {
    let mut out = Vec::new();
    write_json(ds, &mut out).expect("writing to memory");
    out
}

/// Streams the same bytes [`serialize`] returns.
pub fn write_json<T: Serialize, W: std::io::Write>(ds: &T, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, ds)?;
    w.write_all(b"\n")
}

pub fn deserialize(bytes: &[u8]) -> serde_json::Result<SquadDataset> {
    serde_json::from_slice(bytes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFailure {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checked: usize,
    pub failures: Vec<VerificationFailure>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every answer (and plausible answer) against its context.
pub fn verify_answers(ds: &SquadDataset) -> VerificationReport {
    let mut report = VerificationReport::default();
    for (p, q) in ds.questions() {
        report.checked += 1;
        let fail = |reason: String| VerificationFailure { id: q.id.clone(), reason };
        if q.is_impossible && !q.answers.is_empty() {
            report.failures.push(fail("unanswerable question has answers".into()));
            continue;
        }
        if !q.is_impossible && q.answers.is_empty() {
            report.failures.push(fail("answerable question has no answer".into()));
            continue;
        }
        if let Some(a) = q
            .answers
            .iter()
            .chain(&q.plausible_answers)
            .find(|a| !span_matches(&p.context, a.answer_start, &a.text))
        {
            report.failures.push(fail(format!("{:?} not found at {}", a.text, a.answer_start)));
        }
    }
    report
}

/// Partitions articles into train/test/eval. All paragraphs with one title (one source
/// person) go to the same split. Articles are shuffled, then each is given to the split
/// furthest below its paragraph target.
pub fn split(
    ds: &SquadDataset,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(SquadDataset, SquadDataset, SquadDataset), QaError> {
    let parts = split_indices(ds, ratios, seed)?;
    let [train, test, eval] = parts.map(|idx| SquadDataset {
        version: ds.version.clone(),
        data: idx.iter().map(|&i| ds.data[i].clone()).collect(),
    });
    Ok((train, test, eval))
}

/// Article indices of each part, as [`split`] assigns them.
pub fn split_indices(ds: &SquadDataset, ratios: (f64, f64, f64), seed: u64) -> Result<[Vec<usize>; 3], QaError> {
    let (a, b, c) = ratios;
    if a < 0.0 || b < 0.0 || c < 0.0 || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(QaError::BadRatios(ratios));
    }
    // Articles that share a title are merged first so the guard holds for any input.
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, art) in ds.data.iter().enumerate() {
        match index.get(art.title.as_str()) {
            Some(&g) => groups[g].1.push(i),
            None => {
                index.insert(&art.title, groups.len());
                groups.push((art.title.clone(), vec![i]));
            }
        }
    }
    let n = ds.paragraph_count() as f64;
    let train_t = (n * a).round();
    let test_t = (n * b).round().min(n - train_t);
    let targets = [train_t, test_t, n - train_t - test_t];

    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.shuffle(&mut SplitMix64::new(seed));
    let mut filled = [0f64; 3];
    let mut assign = vec![0usize; ds.data.len()];
    for g in order {
        let size: usize = groups[g].1.iter().map(|&i| ds.data[i].paragraphs.len()).sum();
        let k = (0..3)
            .max_by(|&x, &y| {
                let dx = targets[x] - filled[x];
                let dy = targets[y] - filled[y];
                dx.partial_cmp(&dy).unwrap().then(y.cmp(&x))
            })
            .unwrap();
        filled[k] += size as f64;
        for &i in &groups[g].1 {
            assign[i] = k;
        }
    }
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (i, k) in assign.into_iter().enumerate() {
        parts[k].push(i);
    }
    Ok(parts)
}

/// Uniformly keeps `n` questions; paragraphs and articles left empty are dropped.
pub fn sample_questions(ds: &SquadDataset, n: usize, seed: u64) -> Result<SquadDataset, QaError> {
    let total = ds.question_count();
    if n > total {
        return Err(QaError::InsufficientQuestions { requested: n, available: total });
    }
    let mut rng = SplitMix64::new(seed);
    let mut keep = vec![false; total];
    for i in rand::seq::index::sample(&mut rng, total, n) {
        keep[i] = true;
    }
    let mut k = 0usize;
    let mut out = SquadDataset { version: ds.version.clone(), data: Vec::new() };
    for art in &ds.data {
        let mut paragraphs = Vec::new();
        for p in &art.paragraphs {
            let qas: Vec<Qa> = p
                .qas
                .iter()
                .filter(|_| {
                    k += 1;
                    keep[k - 1]
                })
                .cloned()
                .collect();
            if !qas.is_empty() {
                paragraphs.push(SquadParagraph { qas, context: p.context.clone() });
            }
        }
        if !paragraphs.is_empty() {
            out.data.push(Article { title: art.title.clone(), paragraphs });
        }
    }
    Ok(out)
}
