//! Answer-first question generation: every question is built for a span that the
//! verbalizer already placed in the passage.

use std::collections::HashMap;
use std::sync::OnceLock;

use indexmap::IndexMap;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{degree_bucket, Answer, Objective, QAItem, QuestionSource, QuestionType};
use crate::kinship::Term;
use crate::rng::SplitMix64;
use crate::traversal::ScopedSubgraph;
use crate::tree::Tree;
use crate::verbalizer::{FactSpan, Predicate, Slot, VerbalizedPassage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaConfig {
    /// Share of unanswerable questions in the output.
    pub unanswerable_ratio: f64,
    /// Cap on answerable questions per paragraph; a seeded sample is kept.
    pub max_answerable: Option<usize>,
}

impl Default for QaConfig {
    fn default() -> Self {
        QaConfig { unanswerable_ratio: 1.0 / 3.0, max_answerable: None }
    }
}

struct Subject {
    id: String,
    degree: u32,
    bucket: u32,
    /// Unambiguous name to ask with ("Emily" or "Emily Williams").
    name_ref: Option<String>,
    full: Option<String>,
    /// Unambiguous relation phrase ("Emily's husband"); never set for the source person.
    rel_ref: Option<String>,
}

impl Subject {
    fn forms(&self) -> impl Iterator<Item = (&str, bool)> {
        self.name_ref
            .as_deref()
            .map(|n| (n, true))
            .into_iter()
            .chain(self.rel_ref.as_deref().map(|r| (r, false)))
    }
}

struct Draft {
    answers: Vec<Answer>,
    question_type: QuestionType,
    source: QuestionSource,
    subject: Option<String>,
}

#[derive(Default)]
struct Drafts {
    items: IndexMap<String, Draft>,
}

impl Drafts {
    /// Identical question texts are merged; SQuAD allows several gold answers.
    fn add(&mut self, question: String, answer: Answer, question_type: QuestionType, source: QuestionSource, subject: &str) {
        let d = self.items.entry(question).or_insert_with(|| Draft {
            answers: Vec::new(),
            question_type,
            source,
            subject: Some(subject.to_string()),
        });
        if !d.answers.contains(&answer) {
            d.answers.push(answer);
        }
    }
}

fn answer(span: &FactSpan) -> Answer {
    Answer { text: span.value.clone(), answer_start: span.char_start }
}

fn possessive(r: &str) -> String {
    format!("{r}'s")
}

fn plural(noun: &str) -> &str {
    match noun {
        "child" => "children",
        "grandchild" => "grandchildren",
        "husband" => "husbands",
        "wife" => "wives",
        "spouse" => "spouses",
        "brother" => "brothers",
        "sister" => "sisters",
        "sibling" => "siblings",
        other => other,
    }
}

/// How far the counted relatives are from the counting person.
fn noun_distance(noun: &str) -> u32 {
    match plural(noun) {
        "husbands" | "wives" | "spouses" => 0,
        "children" => 1,
        _ => 2,
    }
}

struct NoteRule {
    pattern: Regex,
    question: fn(&str) -> String,
    objective: Objective,
}

fn note_rules() -> &'static [NoteRule] {
    static RULES: OnceLock<Vec<NoteRule>> = OnceLock::new();
    RULES.get_or_init(|| {
        let rule = |p: &str, question: fn(&str) -> String, objective| NoteRule {
            pattern: Regex::new(p).unwrap(),
            question,
            objective,
        };
        vec![
            rule(
                r"(?i)\b(?:died of|suffered from|succumbed to)\s+([a-z][a-z' -]*[a-z])",
                |r| format!("What was {} illness?", possessive(r)),
                Objective::Info,
            ),
            rule(
                r"(?i)\b(?:worked as|was employed as)\s+(?:an?\s+)?([a-z][a-z' -]*[a-z])",
                |r| format!("What did {r} work as?"),
                Objective::Info,
            ),
            rule(
                r"(?i)\brank of\s+([a-z][a-z' -]*[a-z])",
                |r| format!("What was {} rank in the military?", possessive(r)),
                Objective::Info,
            ),
            rule(r"(?i)\bstudied\s+([a-z][a-z' -]*[a-z])", |r| format!("What did {r} study?"), Objective::Info),
            rule(
                r"\b(?:moved|emigrated|immigrated|relocated) to\s+([A-Z][\w-]*(?:,? [A-Z][\w-]*)*)",
                |r| format!("Where did {r} move to?"),
                Objective::Place,
            ),
        ]
    })
}

/// Cuts a captured phrase at the first clause boundary word.
fn trim_capture(s: &str) -> &str {
    const STOP: [&str; 12] =
        [" in ", " at ", " after ", " before ", " during ", " when ", " and ", " from ", " with ", " for ", " on ", " until "];
    let padded = format!("{s} ");
    let cut = STOP.iter().filter_map(|w| padded.find(w)).min().unwrap_or(s.len());
    s[..cut.min(s.len())].trim_end()
}

fn subjects(tree: &Tree, sub: &ScopedSubgraph, rng: &mut SplitMix64) -> HashMap<String, Subject> {
    use rand::Rng;
    let g = &tree.graph;
    let sp_short = tree.short_name(sub.sp);
    let persons: Vec<_> = sub.persons().collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    let rel_phrase = |p: usize, term: Term, reachable: bool| -> Option<String> {
        let usable = p != sub.sp && reachable && !matches!(term, Term::Relative | Term::SelfPerson);
        usable.then(|| sp_short.map(|s| format!("{s}'s {term}"))).flatten()
    };
    for &(p, k) in &persons {
        let names = [tree.full_name(p), tree.first_name(p).map(str::to_string), rel_phrase(p, k.term, k.is_reachable())];
        for n in names.into_iter().flatten() {
            *counts.entry(n).or_default() += 1;
        }
    }
    let unique = |s: Option<String>| s.filter(|s| counts.get(s) == Some(&1));
    persons
        .iter()
        .map(|&(p, k)| {
            let full = unique(tree.full_name(p));
            let first = unique(tree.first_name(p).map(str::to_string)).filter(|f| Some(f) != full.as_ref());
            let name_ref = match (&full, &first) {
                (Some(f), Some(s)) => Some(if rng.random_bool(0.5) { f.clone() } else { s.clone() }),
                (Some(f), None) => Some(f.clone()),
                (None, s) => s.clone(),
            };
            let id = g.person(p).id.clone();
            let s = Subject {
                id: id.clone(),
                degree: k.degree,
                bucket: degree_bucket(p == sub.sp, k.degree),
                name_ref,
                full,
                rel_ref: unique(rel_phrase(p, k.term, k.is_reachable())),
            };
            (id, s)
        })
        .collect()
}

/// Builds questions for a passage. Answerable questions come first, then the
/// unanswerable share; ids are `<tree>:<sp>:<type>:<n>`.
pub fn generate_qa(
    tree: &Tree,
    sub: &ScopedSubgraph,
    passage: &VerbalizedPassage,
    config: &QaConfig,
    seed: u64,
) -> Vec<QAItem> {
    let mut rng = SplitMix64::new(seed);
    let subjects = subjects(tree, sub, &mut rng);
    let sp_id = tree.graph.person(sub.sp).id.as_str();
    let named_sentence: Vec<bool> = passage.sentences.iter().map(|s| s.style.is_named()).collect();
    let mut by_fact: Vec<Vec<&FactSpan>> = vec![Vec::new(); passage.facts.len()];
    for s in &passage.fact_spans {
        by_fact[s.fact].push(s);
    }
    // Spans of one slot for one fact, preferring sentences whose reference style matches
    // the question's.
    let pick = |fi: usize, slot: Slot, named: bool| -> Option<&FactSpan> {
        let mut it = by_fact[fi].iter().filter(|s| s.slot == slot);
        let first = it.clone().next().copied();
        it.find(|s| named_sentence[s.sentence] == named).copied().or(first)
    };
    let full_name_at = |fi: usize| -> Option<Answer> {
        let spans = &by_fact[fi];
        let full = spans.iter().find_map(|f| {
            (f.slot == Slot::FirstName).then_some(())?;
            let l = spans
                .iter()
                .find(|l| l.slot == Slot::LastName && l.sentence == f.sentence && l.char_start == f.char_end + 1)?;
            Some(Answer { text: format!("{} {}", f.value, l.value), answer_start: f.char_start })
        });
        full.or_else(|| spans.iter().find(|s| s.slot == Slot::FirstName).map(|s| answer(s)))
    };

    let mut drafts = Drafts::default();
    let mut relation_groups: IndexMap<(String, String), Vec<(Answer, u32)>> = IndexMap::new();
    let mut who_done: Vec<&str> = Vec::new();

    for (fi, fact) in passage.facts.iter().enumerate() {
        let Some(subj) = subjects.get(&fact.subject) else { continue };
        let wh = |obj| QuestionType::at(obj, subj.bucket);
        let sid = subj.id.as_str();
        match &fact.predicate {
            p @ (Predicate::Birth | Predicate::Death | Predicate::Burial | Predicate::Marriage | Predicate::Other(_))
                if fact.date().is_some() || fact.place().is_some() =>
            {
                let label = fact.label().unwrap_or("event");
                for (r, named) in subj.forms() {
                    let (when, where_) = match p {
                        Predicate::Birth => (format!("When was {r} born?"), format!("Where was {r} born?")),
                        Predicate::Death => (format!("When did {r} die?"), format!("Where did {r} die?")),
                        Predicate::Burial => (format!("When was {r} buried?"), format!("Where was {r} buried?")),
                        Predicate::Marriage => {
                            (format!("When did {r} get married?"), format!("Where did {r} get married?"))
                        }
                        _ => (
                            format!("When was {} {label}?", possessive(r)),
                            format!("Where did {} {label} take place?", possessive(r)),
                        ),
                    };
                    if let Some(s) = pick(fi, Slot::Date, named) {
                        drafts.add(when, answer(s), wh(Objective::Date), QuestionSource::WhTemplate, sid);
                    }
                    if let Some(s) = pick(fi, Slot::Place, named) {
                        drafts.add(where_, answer(s), wh(Objective::Place), QuestionSource::WhTemplate, sid);
                        if named && *p == Predicate::Birth {
                            drafts.add(
                                format!("Was {} {} birthplace?", s.value, possessive(r)),
                                answer(s),
                                wh(Objective::Place),
                                QuestionSource::YesNo,
                                sid,
                            );
                        }
                    }
                    if let Some(s) = pick(fi, Slot::Spouse, named) {
                        drafts.add(
                            format!("Whom did {r} marry?"),
                            answer(s),
                            QuestionType::relation(subj.degree),
                            QuestionSource::RuleTemplate,
                            sid,
                        );
                    }
                }
            }
            Predicate::Residence => {
                for (r, named) in subj.forms() {
                    if let Some(s) = pick(fi, Slot::Residence, named) {
                        drafts.add(format!("Where did {r} live?"), answer(s), wh(Objective::Place), QuestionSource::WhTemplate, sid);
                    }
                }
            }
            Predicate::Sex | Predicate::Occupation | Predicate::Other(_) => {
                let (slot, what) = match &fact.predicate {
                    Predicate::Sex => (Slot::Sex, "sex"),
                    Predicate::Occupation => (Slot::Occupation, "occupation"),
                    _ => (Slot::Value, fact.label().unwrap_or("attribute")),
                };
                for (r, named) in subj.forms() {
                    if let Some(s) = pick(fi, slot, named) {
                        drafts.add(
                            format!("What was {} {what}?", possessive(r)),
                            answer(s),
                            wh(Objective::Info),
                            QuestionSource::RuleTemplate,
                            sid,
                        );
                    }
                }
            }
            Predicate::ChildCount | Predicate::SpouseCount | Predicate::SiblingCount => {
                let Some(noun) = fact.count_noun() else { continue };
                let qtype = QuestionType::relation(subj.degree.saturating_add(noun_distance(noun)));
                let combined = match (&subj.full, &subj.rel_ref) {
                    (Some(f), Some(r)) => Some(format!("{f} ({r})")),
                    (None, Some(r)) => Some(r.clone()),
                    _ => None,
                };
                let forms = subj.name_ref.iter().map(|n| (n, true)).chain(combined.iter().map(|c| (c, false)));
                for (r, named) in forms {
                    if let Some(s) = pick(fi, Slot::Count, named) {
                        drafts.add(
                            format!("How many {} did {r} have?", plural(noun)),
                            answer(s),
                            qtype,
                            QuestionSource::Quantitative,
                            sid,
                        );
                    }
                }
            }
            Predicate::RelationAssertion => {
                if let (Some(other), Some(a)) = (fact.other.as_ref(), full_name_at(fi)) {
                    relation_groups.entry((other.clone(), fact.object_value.clone())).or_default().push((a, subj.degree));
                }
            }
            Predicate::NoteText => {
                let Some(note) = pick(fi, Slot::Note, true) else { continue };
                for rule in note_rules() {
                    let Some(c) = rule.pattern.captures(&note.value) else { continue };
                    let m = c.get(1).unwrap();
                    let text = trim_capture(m.as_str());
                    if text.is_empty() {
                        continue;
                    }
                    let start = note.char_start + note.value[..m.start()].chars().count();
                    let a = Answer { text: text.to_string(), answer_start: start };
                    for (r, _) in subj.forms() {
                        drafts.add((rule.question)(r), a.clone(), wh(rule.objective), QuestionSource::WhTemplate, sid);
                    }
                }
            }
            _ => {}
        }

        // "Who was Jonathan Brown?" answered by the relation phrase.
        if !who_done.contains(&sid) {
            if let (Some(full), Some(s)) = (&subj.full, by_fact[fi].iter().find(|s| s.slot == Slot::RelationToSp)) {
                who_done.push(sid);
                let qtype = if subj.bucket == 0 { QuestionType::FirstDegreeRelation } else { QuestionType::relation(subj.degree) };
                drafts.add(format!("Who was {full}?"), answer(s), qtype, QuestionSource::RuleTemplate, sid);
            }
        }
    }

    for ((other, term), answers) in relation_groups {
        let Some(o) = subjects.get(&other) else { continue };
        let Some(r) = &o.name_ref else { continue };
        // Typed by the farther of the two people the question connects.
        for (a, degree) in answers {
            let qtype = QuestionType::relation(o.degree.max(degree));
            drafts.add(format!("Who was {} {term}?", possessive(r)), a, qtype, QuestionSource::RuleTemplate, &o.id);
        }
    }

    if let Some(sp) = subjects.get(sp_id) {
        let first = tree.first_name(sub.sp).filter(|f| sp.name_ref.as_deref() == Some(*f) || sp.full.is_some());
        if let Some(first) = first {
            let sp_facts: Vec<usize> = (0..passage.facts.len()).filter(|&i| passage.facts[i].subject == sp_id).collect();
            if let Some(a) = sp_facts.iter().filter_map(|&i| full_name_at(i)).find(|a| a.text.contains(' ')) {
                drafts.add(format!("What is {first}'s full name?"), a, QuestionType::Name, QuestionSource::RuleTemplate, sp_id);
            }
            if let Some(s) = sp_facts.iter().find_map(|&i| pick(i, Slot::LastName, true)) {
                drafts.add(format!("What is {first}'s last name?"), answer(s), QuestionType::Name, QuestionSource::RuleTemplate, sp_id);
            }
        }
    }

    let mut answerable: Vec<(String, Draft)> = drafts.items.into_iter().collect();
    if let Some(m) = config.max_answerable {
        if answerable.len() > m {
            let mut keep: Vec<usize> = rand::seq::index::sample(&mut rng, answerable.len(), m).into_vec();
            keep.sort_unstable();
            let mut all: Vec<Option<(String, Draft)>> = answerable.into_iter().map(Some).collect();
            answerable = keep.into_iter().map(|i| all[i].take().unwrap()).collect();
        }
    }

    let unanswerable = unanswerable_items(passage, &subjects, config, answerable.len(), &mut rng);

    let sp_key = format!("{}:{}", tree.id, sp_id);
    let mut out = Vec::with_capacity(answerable.len() + unanswerable.len());
    for (question, d) in answerable {
        out.push(QAItem {
            id: format!("{sp_key}:{}:{}", d.question_type.code(), out.len()),
            question,
            answers: d.answers,
            plausible_answers: Vec::new(),
            is_impossible: false,
            question_type: d.question_type,
            source: d.source,
            subject: d.subject,
        });
    }
    for mut item in unanswerable {
        item.id = format!("{sp_key}:{}:{}", item.question_type.code(), out.len());
        out.push(item);
    }
    out
}

/// Questions about predicates a subject has no fact for at all.
fn unanswerable_items(
    passage: &VerbalizedPassage,
    subjects: &HashMap<String, Subject>,
    config: &QaConfig,
    answerable: usize,
    rng: &mut SplitMix64,
) -> Vec<QAItem> {
    let r = config.unanswerable_ratio.clamp(0.0, 0.95);
    let want = (answerable as f64 * r / (1.0 - r)).round() as usize;
    if want == 0 {
        return Vec::new();
    }
    enum Kind {
        At(Objective),
        /// Counting relatives this many steps from the subject.
        Count(u32),
    }
    type Ask = fn(&str) -> String;
    const ASKS: [(usize, Slot, Kind, Ask); 14] = [
        (0, Slot::Date, Kind::At(Objective::Date), |r| format!("When was {r} born?")),
        (0, Slot::Place, Kind::At(Objective::Place), |r| format!("Where was {r} born?")),
        (1, Slot::Date, Kind::At(Objective::Date), |r| format!("When did {r} die?")),
        (1, Slot::Place, Kind::At(Objective::Place), |r| format!("Where did {r} die?")),
        (2, Slot::Date, Kind::At(Objective::Date), |r| format!("When was {r} buried?")),
        (2, Slot::Place, Kind::At(Objective::Place), |r| format!("Where was {r} buried?")),
        (3, Slot::Date, Kind::At(Objective::Date), |r| format!("When did {r} get married?")),
        (3, Slot::Place, Kind::At(Objective::Place), |r| format!("Where did {r} get married?")),
        (5, Slot::Occupation, Kind::At(Objective::Info), |r| format!("What was {r}'s occupation?")),
        (6, Slot::Residence, Kind::At(Objective::Place), |r| format!("Where did {r} live?")),
        (7, Slot::Count, Kind::Count(1), |r| format!("How many children did {r} have?")),
        (8, Slot::Count, Kind::Count(0), |r| format!("How many spouses did {r} have?")),
        (9, Slot::Count, Kind::Count(2), |r| format!("How many siblings did {r} have?")),
        (11, Slot::Note, Kind::At(Objective::Info), |r| format!("What was {r}'s illness?")),
    ];

    // First span per (predicate, slot) for each of up to two subjects: plausible decoys.
    let mut decoys: HashMap<(usize, Slot), Vec<(&str, Answer)>> = HashMap::new();
    for s in &passage.fact_spans {
        let fact = &passage.facts[s.fact];
        let list = decoys.entry((fact.predicate.rank(), s.slot)).or_default();
        if list.len() < 2 && list.iter().all(|(subj, _)| *subj != fact.subject) {
            list.push((fact.subject.as_str(), answer(s)));
        }
    }

    let mut present: HashMap<&str, [bool; 13]> = HashMap::new();
    for f in &passage.facts {
        present.entry(f.subject.as_str()).or_insert([false; 13])[f.predicate.rank()] = true;
    }
    let mut ids: Vec<&String> = subjects.keys().collect();
    ids.sort();
    let mut candidates = Vec::new();
    for id in ids {
        let subj = &subjects[id];
        let have = present.get(id.as_str()).copied().unwrap_or([false; 13]);
        for ((rank, slot, kind, ask), (r, _)) in ASKS.iter().flat_map(|a| subj.forms().map(move |f| (a, f))) {
            if have[*rank] {
                continue;
            }
            let question_type = match kind {
                Kind::At(o) => QuestionType::at(*o, subj.bucket),
                Kind::Count(d) => QuestionType::relation(subj.degree.saturating_add(*d)),
            };
            // A whole note is no sensible decoy for a short answer.
            let plausible: Vec<Answer> = decoys
                .get(&(*rank, *slot))
                .filter(|_| *slot != Slot::Note)
                .and_then(|l| l.iter().find(|(s, _)| *s != id.as_str()))
                .map(|(_, a)| a.clone())
                .into_iter()
                .collect();
            candidates.push(QAItem {
                question: ask(r),
                id: String::new(),
                answers: Vec::new(),
                plausible_answers: plausible,
                is_impossible: true,
                question_type,
                source: QuestionSource::Unanswerable,
                subject: Some(id.clone()),
            });
        }
    }
    let take = want.min(candidates.len());
    let mut keep: Vec<usize> = rand::seq::index::sample(rng, candidates.len(), take).into_vec();
    keep.sort_unstable();
    let mut all: Vec<Option<QAItem>> = candidates.into_iter().map(Some).collect();
    keep.into_iter().map(|i| all[i].take().unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_are_trimmed_at_clause_words() {
        assert_eq!(trim_capture("tuberculosis after a long illness"), "tuberculosis");
        assert_eq!(trim_capture("captain"), "captain");
        assert_eq!(trim_capture("law at Harvard"), "law");
    }

    #[test]
    fn plurals() {
        assert_eq!(plural("child"), "children");
        assert_eq!(plural("wives"), "wives");
        assert_eq!(noun_distance("sister"), 2);
        assert_eq!(noun_distance("husband"), 0);
    }
}
