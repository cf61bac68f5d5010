//! Turns a scoped sub-graph into a context passage: one fact per sentence, several
//! template variants per fact, sentences shuffled with a seeded generator.

mod template;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use template::{render_sentence, References, ReferenceStyle, RenderedSentence, SentenceTemplate, Slot, SlotSpan, TemplateLibrary};

use crate::gedcom::{EventKind, Sex};
use crate::kinship::{term_for_path, Step, Term};
use crate::rng::SplitMix64;
use crate::traversal::ScopedSubgraph;
use crate::tree::Tree;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VerbalizeError {
    #[error("missing value for slot {0}")]
    MissingSlot(String),
    #[error("template {template} does not render {fact} facts")]
    PredicateMismatch { template: String, fact: String },
    #[error("sub-graph produced no facts")]
    EmptyPassage,
    #[error("template library line {line}: {message}")]
    TemplateParse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Predicate {
    Birth,
    Death,
    Burial,
    Marriage,
    Sex,
    Occupation,
    Residence,
    ChildCount,
    SpouseCount,
    SiblingCount,
    RelationAssertion,
    NoteText,
    /// Any other labelled event or attribute, keyed by GEDCOM tag.
    Other(String),
}

impl Predicate {
    pub const ALL_KEYS: [&'static str; 13] = [
        "Birth",
        "Death",
        "Burial",
        "Marriage",
        "Sex",
        "Occupation",
        "Residence",
        "ChildCount",
        "SpouseCount",
        "SiblingCount",
        "RelationAssertion",
        "NoteText",
        "Other",
    ];

    /// Name used in template files; every `Other(tag)` shares "Other".
    pub fn template_key(&self) -> &'static str {
        Self::ALL_KEYS[self.rank()]
    }

    /// Position in the canonical fact order.
    pub fn rank(&self) -> usize {
        match self {
            Predicate::Birth => 0,
            Predicate::Death => 1,
            Predicate::Burial => 2,
            Predicate::Marriage => 3,
            Predicate::Sex => 4,
            Predicate::Occupation => 5,
            Predicate::Residence => 6,
            Predicate::ChildCount => 7,
            Predicate::SpouseCount => 8,
            Predicate::SiblingCount => 9,
            Predicate::RelationAssertion => 10,
            Predicate::NoteText => 11,
            Predicate::Other(_) => 12,
        }
    }

    pub fn is_event(&self) -> bool {
        matches!(self, Predicate::Birth | Predicate::Death | Predicate::Burial | Predicate::Marriage | Predicate::Other(_))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Other(tag) => write!(f, "Other({tag})"),
            p => f.write_str(p.template_key()),
        }
    }
}

impl FromStr for Predicate {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "Birth" => Predicate::Birth,
            "Death" => Predicate::Death,
            "Burial" => Predicate::Burial,
            "Marriage" => Predicate::Marriage,
            "Sex" => Predicate::Sex,
            "Occupation" => Predicate::Occupation,
            "Residence" => Predicate::Residence,
            "ChildCount" => Predicate::ChildCount,
            "SpouseCount" => Predicate::SpouseCount,
            "SiblingCount" => Predicate::SiblingCount,
            "RelationAssertion" => Predicate::RelationAssertion,
            "NoteText" => Predicate::NoteText,
            "Other" => Predicate::Other(String::new()),
            _ => {
                if let Some(tag) = s.strip_prefix("Other(").and_then(|r| r.strip_suffix(')')) {
                    Predicate::Other(tag.to_string())
                } else {
                    return Err(format!("unknown predicate {s:?}"));
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Date,
    Place,
    Count,
    Name,
    Relation,
    FreeText,
}

/// One statement about one person.
///
/// Events carry the date in `object_value` and the place in `secondary_object`; an
/// event without a date carries the place in `object_value` instead. Counts keep the
/// counted noun ("children") in `secondary_object`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub subject: String,
    pub predicate: Predicate,
    pub object_value: String,
    pub object_kind: ObjectKind,
    pub secondary_object: Option<String>,
    /// Spouse for marriages, counterpart for relation assertions.
    pub other: Option<String>,
}

impl Fact {
    pub fn date(&self) -> Option<&str> {
        (self.predicate.is_event() && self.object_kind == ObjectKind::Date).then_some(self.object_value.as_str())
    }

    pub fn place(&self) -> Option<&str> {
        if !self.predicate.is_event() {
            return None;
        }
        match self.object_kind {
            ObjectKind::Date => self.secondary_object.as_deref(),
            ObjectKind::Place => Some(&self.object_value),
            _ => None,
        }
    }

    pub fn count_noun(&self) -> Option<&str> {
        (self.object_kind == ObjectKind::Count).then_some(self.secondary_object.as_deref()).flatten()
    }

    pub fn label(&self) -> Option<&'static str> {
        match &self.predicate {
            Predicate::Other(tag) => other_label(tag),
            _ => None,
        }
    }

    /// The value a slot takes for this fact, ignoring names.
    pub fn value(&self, slot: Slot) -> Option<&str> {
        let own = |p: Predicate| (self.predicate == p).then_some(self.object_value.as_str());
        match slot {
            Slot::Date => self.date(),
            Slot::Place => self.place(),
            Slot::CountNoun => self.count_noun(),
            Slot::Label => self.label(),
            Slot::Sex => own(Predicate::Sex),
            Slot::Occupation => own(Predicate::Occupation),
            Slot::Residence => own(Predicate::Residence),
            Slot::Relation => own(Predicate::RelationAssertion),
            Slot::Note => own(Predicate::NoteText),
            Slot::Count => (self.object_kind == ObjectKind::Count).then_some(self.object_value.as_str()),
            Slot::Value => (matches!(self.predicate, Predicate::Other(_)) && self.object_kind == ObjectKind::FreeText)
                .then_some(self.object_value.as_str()),
            Slot::FirstName | Slot::LastName | Slot::RelationToSp | Slot::OtherFirstName | Slot::Spouse => None,
        }
    }

    /// Value slots this fact can fill (the spouse name is added by the caller when known).
    pub fn value_slots(&self) -> BTreeSet<Slot> {
        [
            Slot::Date,
            Slot::Place,
            Slot::Sex,
            Slot::Occupation,
            Slot::Residence,
            Slot::Count,
            Slot::Relation,
            Slot::Note,
            Slot::Value,
        ]
        .into_iter()
        .filter(|s| self.value(*s).is_some_and(|v| !v.is_empty()))
        .collect()
    }

    /// Whether the object kind fits the predicate.
    pub fn is_consistent(&self) -> bool {
        use ObjectKind as K;
        match self.predicate {
            Predicate::Birth | Predicate::Death | Predicate::Burial | Predicate::Marriage => {
                matches!(self.object_kind, K::Date | K::Place)
            }
            Predicate::Residence => self.object_kind == K::Place,
            Predicate::ChildCount | Predicate::SpouseCount | Predicate::SiblingCount => self.object_kind == K::Count,
            Predicate::RelationAssertion => self.object_kind == K::Relation,
            Predicate::Sex | Predicate::Occupation | Predicate::NoteText => self.object_kind == K::FreeText,
            Predicate::Other(_) => matches!(self.object_kind, K::Date | K::Place | K::FreeText),
        }
    }
}

/// Readable names for the event and attribute tags that get their own sentences.
pub fn other_label(tag: &str) -> Option<&'static str> {
    Some(match tag {
        "BAPL" | "BAPM" => "baptism",
        "CHR" => "christening",
        "ENDL" => "endowment",
        "SLGC" => "sealing to parents",
        "CREM" => "cremation",
        "ADOP" => "adoption",
        "BARM" => "bar mitzvah",
        "BASM" => "bat mitzvah",
        "CONF" => "confirmation",
        "EMIG" => "emigration",
        "IMMI" => "immigration",
        "NATU" => "naturalization",
        "GRAD" => "graduation",
        "RETI" => "retirement",
        "ORDN" => "ordination",
        "DIV" => "divorce",
        "ENGA" => "engagement",
        "EDUC" => "education",
        "RELI" => "religion",
        "TITL" => "title",
        "NATI" => "nationality",
        "_MILT" => "military service",
        _ => return None,
    })
}

const COUNT_WORDS: [&str; 13] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
];

/// Counts up to twelve as words, larger ones as digits.
pub fn count_phrase(n: usize) -> String {
    COUNT_WORDS.get(n).map_or_else(|| n.to_string(), |w| w.to_string())
}

fn noun(n: usize, singular: &str, plural: &str) -> String {
    if n == 1 { singular } else { plural }.to_string()
}

/// Splits note text into sentences, keeping terminal punctuation.
pub fn note_sentences(note: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in note.lines() {
        let mut start = 0;
        let bytes: Vec<(usize, char)> = line.char_indices().collect();
        for (i, &(b, c)) in bytes.iter().enumerate() {
            let next_is_space = bytes.get(i + 1).is_some_and(|&(_, n)| n.is_whitespace());
            if matches!(c, '.' | '!' | '?') && next_is_space {
                out.push(line[start..b + c.len_utf8()].trim().to_string());
                start = b + c.len_utf8();
            }
        }
        out.push(line[start..].trim().to_string());
    }
    out.retain(|s| !s.is_empty());
    out
}

fn event_fact(subject: &str, predicate: Predicate, date: Option<String>, place: Option<String>) -> Option<Fact> {
    let date = date.filter(|d| !d.is_empty());
    let place = place.filter(|p| !p.trim().is_empty()).map(|p| p.trim().to_string());
    let (object_value, object_kind, secondary_object) = match (date, place) {
        (Some(d), p) => (d, ObjectKind::Date, p),
        (None, Some(p)) => (p, ObjectKind::Place, None),
        (None, None) => return None,
    };
    Some(Fact { subject: subject.to_string(), predicate, object_value, object_kind, secondary_object, other: None })
}

/// All facts about the persons of a sub-graph, ordered by person id then predicate.
pub fn facts_from_subgraph(tree: &Tree, sub: &ScopedSubgraph) -> Vec<Fact> {
    let g = &tree.graph;
    let mut persons: Vec<usize> = sub.persons().map(|(p, _)| p).collect();
    persons.sort_unstable();
    persons.dedup();
    let in_sub: HashSet<usize> = persons.iter().copied().collect();
    let mut facts = Vec::new();

    for &p in &persons {
        let id = g.person(p).id.as_str();
        let rec = tree.record(p);
        let mut mine: Vec<Fact> = Vec::new();
        let simple = |predicate: Predicate, value: String, kind: ObjectKind, secondary: Option<String>| Fact {
            subject: id.to_string(),
            predicate,
            object_value: value,
            object_kind: kind,
            secondary_object: secondary,
            other: None,
        };

        for ev in tree.kg.events_of(id) {
            let date = ev.date.as_ref().map(|d| d.year_phrase());
            let predicate = match &ev.kind {
                EventKind::Birth => Predicate::Birth,
                EventKind::Death => Predicate::Death,
                EventKind::Burial => Predicate::Burial,
                EventKind::Other(t) if t == "RESI" => {
                    if let Some(place) = ev.place.as_ref().filter(|p| !p.trim().is_empty()) {
                        mine.push(simple(Predicate::Residence, place.trim().to_string(), ObjectKind::Place, None));
                    }
                    continue;
                }
                k if other_label(k.tag()).is_some() => Predicate::Other(k.tag().to_string()),
                _ => continue,
            };
            mine.extend(event_fact(id, predicate, date, ev.place.clone()));
        }

        for &f in &g.person(p).fam_parent {
            let fam = g.family(f);
            let spouse = fam.parent_fam.iter().copied().find(|&q| q != p);
            for ev in tree.kg.events_of(&fam.id) {
                let predicate = match &ev.kind {
                    EventKind::Marriage => Predicate::Marriage,
                    k if other_label(k.tag()).is_some() => Predicate::Other(k.tag().to_string()),
                    _ => continue,
                };
                let date = ev.date.as_ref().map(|d| d.year_phrase());
                if let Some(mut fact) = event_fact(id, predicate, date, ev.place.clone()) {
                    if fact.predicate == Predicate::Marriage {
                        fact.other = spouse.map(|q| g.person(q).id.clone());
                    }
                    mine.push(fact);
                }
            }
        }

        if rec.sex != Sex::Unknown {
            mine.push(simple(Predicate::Sex, rec.sex.to_string(), ObjectKind::FreeText, None));
        }

        for (tag, value) in &rec.attributes {
            let value = value.trim();
            if value.is_empty() {
                continue;
            }
            if tag == "OCCU" {
                mine.push(simple(Predicate::Occupation, value.to_string(), ObjectKind::FreeText, None));
            } else if other_label(tag).is_some() {
                mine.push(simple(Predicate::Other(tag.clone()), value.to_string(), ObjectKind::FreeText, None));
            }
        }

        let children: BTreeSet<usize> = g.children(p).collect();
        if !children.is_empty() {
            let n = children.len();
            mine.push(simple(Predicate::ChildCount, count_phrase(n), ObjectKind::Count, Some(noun(n, "child", "children"))));
            let grandchildren: BTreeSet<usize> = children.iter().flat_map(|&c| g.children(c)).collect();
            if !grandchildren.is_empty() {
                let n = grandchildren.len();
                mine.push(simple(
                    Predicate::ChildCount,
                    count_phrase(n),
                    ObjectKind::Count,
                    Some(noun(n, "grandchild", "grandchildren")),
                ));
            }
        }
        let spouses: BTreeSet<usize> = g.spouses(p).collect();
        if !spouses.is_empty() {
            let n = spouses.len();
            let sexes: BTreeSet<Sex> = spouses.iter().map(|&s| g.person(s).sex).collect();
            let word = match (sexes.len(), sexes.iter().next()) {
                (1, Some(Sex::Male)) => noun(n, "husband", "husbands"),
                (1, Some(Sex::Female)) => noun(n, "wife", "wives"),
                _ => noun(n, "spouse", "spouses"),
            };
            mine.push(simple(Predicate::SpouseCount, count_phrase(n), ObjectKind::Count, Some(word)));
        }
        let siblings = g.siblings(p);
        if !siblings.is_empty() {
            let by = |s: Sex| siblings.iter().filter(|&&q| g.person(q).sex == s).count();
            let (brothers, sisters) = (by(Sex::Male), by(Sex::Female));
            if brothers > 0 {
                mine.push(simple(Predicate::SiblingCount, count_phrase(brothers), ObjectKind::Count, Some(noun(brothers, "brother", "brothers"))));
            }
            if sisters > 0 {
                mine.push(simple(Predicate::SiblingCount, count_phrase(sisters), ObjectKind::Count, Some(noun(sisters, "sister", "sisters"))));
            }
            if brothers + sisters < siblings.len() {
                let n = siblings.len();
                mine.push(simple(Predicate::SiblingCount, count_phrase(n), ObjectKind::Count, Some(noun(n, "sibling", "siblings"))));
            }
        }

        // Direct links to other persons of the sub-graph: "X is Y's <term>".
        let sex = g.person(p).sex;
        let mut links: Vec<(usize, Step)> = Vec::new();
        links.extend(g.parents(p).map(|q| (q, Step::Down)));
        links.extend(g.children(p).map(|q| (q, Step::Up)));
        links.extend(g.spouses(p).map(|q| (q, Step::Spouse)));
        let mut seen = HashSet::new();
        for (q, step) in links {
            if !in_sub.contains(&q) || !seen.insert(q) {
                continue;
            }
            let mut fact = simple(
                Predicate::RelationAssertion,
                term_for_path(&[step], sex).to_string(),
                ObjectKind::Relation,
                None,
            );
            fact.other = Some(g.person(q).id.clone());
            mine.push(fact);
        }

        let event_notes = rec.events.iter().flat_map(|e| e.notes.iter());
        for note in rec.notes.iter().chain(event_notes) {
            for s in note_sentences(note) {
                mine.push(simple(Predicate::NoteText, s, ObjectKind::FreeText, None));
            }
        }

        mine.sort_by_key(|f| f.predicate.rank());
        facts.extend(mine);
    }
    facts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbalizerConfig {
    pub min_variants: usize,
    pub max_variants: usize,
}

impl Default for VerbalizerConfig {
    fn default() -> Self {
        VerbalizerConfig { min_variants: 2, max_variants: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageSentence {
    pub fact: usize,
    pub template: String,
    pub style: ReferenceStyle,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactSpan {
    pub fact: usize,
    pub sentence: usize,
    pub slot: Slot,
    pub char_start: usize,
    pub char_end: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbalizedPassage {
    pub sp: String,
    pub text: String,
    pub facts: Vec<Fact>,
    /// In passage order.
    pub sentences: Vec<PassageSentence>,
    pub fact_spans: Vec<FactSpan>,
    pub sentence_order_seed: u64,
}

impl VerbalizedPassage {
    pub fn spans_of(&self, fact: usize) -> impl Iterator<Item = &FactSpan> {
        self.fact_spans.iter().filter(move |s| s.fact == fact)
    }
}

/// Reference names for every person of a sub-graph.
///
/// Non-source persons are named through the source person ("Emily's husband"). The source
/// person is named through its closest relative, parents first ("Alexander's son").
pub fn person_references(tree: &Tree, sub: &ScopedSubgraph) -> Vec<(usize, References)> {
    let g = &tree.graph;
    let sp = sub.sp;
    let sp_short = tree.short_name(sp);
    let anchor = sub
        .persons()
        .filter(|&(p, k)| p != sp && k.degree <= 1 && tree.short_name(p).is_some())
        .filter_map(|(p, k)| {
            let (prio, inverse) = match k.term {
                Term::Father | Term::Mother | Term::Parent => (0, Step::Down),
                Term::Husband | Term::Wife | Term::Spouse => (1, Step::Spouse),
                Term::Son | Term::Daughter | Term::Child => (2, Step::Up),
                _ => return None,
            };
            Some((prio, p, inverse))
        })
        .min();
    sub.persons()
        .map(|(p, k)| {
            let rec = tree.record(p);
            let relation_to_sp = if p == sp {
                anchor.map(|(_, a, inv)| {
                    format!("{}'s {}", tree.short_name(a).unwrap_or_default(), term_for_path(&[inv], g.person(sp).sex))
                })
            } else if k.is_reachable() {
                sp_short.map(|n| format!("{n}'s {}", k.term))
            } else {
                None
            };
            let refs = References {
                first: rec.name_given.clone(),
                last: rec.name_surname.clone(),
                relation_to_sp,
                other_first: None,
                other_full: None,
            };
            (p, refs)
        })
        .collect()
}

pub struct Verbalizer<'a> {
    pub library: &'a TemplateLibrary,
    pub config: VerbalizerConfig,
}

impl Default for Verbalizer<'static> {
    fn default() -> Self {
        Verbalizer { library: TemplateLibrary::builtin(), config: VerbalizerConfig::default() }
    }
}

impl<'a> Verbalizer<'a> {
    pub fn new(library: &'a TemplateLibrary, config: VerbalizerConfig) -> Self {
        Verbalizer { library, config }
    }

    pub fn render(&self, tree: &Tree, sub: &ScopedSubgraph, seed: u64) -> Result<VerbalizedPassage, VerbalizeError> {
        let facts = facts_from_subgraph(tree, sub);
        if facts.is_empty() {
            return Err(VerbalizeError::EmptyPassage);
        }
        let g = &tree.graph;
        let refs_by_id: std::collections::HashMap<&str, References> = person_references(tree, sub)
            .into_iter()
            .map(|(p, r)| (g.person(p).id.as_str(), r))
            .collect();
        let mut rng = SplitMix64::new(seed);
        let (lo, hi) = (self.config.min_variants.max(1), self.config.max_variants.max(self.config.min_variants).max(1));

        let mut rendered: Vec<(usize, &SentenceTemplate, RenderedSentence)> = Vec::new();
        for (fi, fact) in facts.iter().enumerate() {
            let mut refs = refs_by_id[fact.subject.as_str()].clone();
            if let Some(other) = fact.other.as_deref().and_then(|o| g.person_index(o)) {
                refs.other_first = tree.short_name(other).map(str::to_string);
                refs.other_full = tree.full_name(other);
            }
            let mut want = fact.value_slots();
            if fact.predicate == Predicate::Marriage && refs.other_full.is_some() {
                want.insert(Slot::Spouse);
            }
            let mut named = Vec::new();
            let mut multi = Vec::new();
            // "Emily's son (Matt) is Emily's son" says nothing.
            let about_sp = fact.predicate == Predicate::RelationAssertion
                && refs.relation_to_sp.is_some()
                && refs.relation_to_sp == refs.other_first.as_ref().map(|o| format!("{o}'s {}", fact.object_value));
            for t in self.library.for_predicate(&fact.predicate) {
                if t.value_slots() != want || (about_sp && !t.style.is_named()) {
                    continue;
                }
                if let Ok(r) = render_sentence(fact, t, &refs) {
                    if t.style.is_named() {
                        named.push((t, r));
                    } else {
                        multi.push((t, r));
                    }
                }
            }
            let k = rng.random_range(lo..=hi);
            let mut chosen = Vec::new();
            if !named.is_empty() {
                chosen.push(named.swap_remove(rng.random_range(0..named.len())));
            }
            if !multi.is_empty() {
                chosen.push(multi.swap_remove(rng.random_range(0..multi.len())));
            }
            let mut rest: Vec<_> = named.into_iter().chain(multi).collect();
            while chosen.len() < k && !rest.is_empty() {
                chosen.push(rest.swap_remove(rng.random_range(0..rest.len())));
            }
            rendered.extend(chosen.into_iter().map(|(t, r)| (fi, t, r)));
        }
        if rendered.is_empty() {
            return Err(VerbalizeError::EmptyPassage);
        }
        rendered.shuffle(&mut rng);

        let mut text = String::new();
        let mut offset = 0usize;
        let mut sentences = Vec::with_capacity(rendered.len());
        let mut fact_spans = Vec::new();
        for (si, (fi, t, r)) in rendered.into_iter().enumerate() {
            if si > 0 {
                text.push(' ');
                offset += 1;
            }
            let mut body = r.text;
            if !body.ends_with(['.', '!', '?']) {
                body.push('.');
            }
            let n = body.chars().count();
            text.push_str(&body);
            for s in r.spans {
                fact_spans.push(FactSpan {
                    fact: fi,
                    sentence: si,
                    slot: s.slot,
                    char_start: offset + s.char_start,
                    char_end: offset + s.char_end,
                    value: s.value,
                });
            }
            sentences.push(PassageSentence {
                fact: fi,
                template: t.id.clone(),
                style: t.style,
                char_start: offset,
                char_end: offset + n,
            });
            offset += n;
        }
        Ok(VerbalizedPassage {
            sp: g.person(sub.sp).id.clone(),
            text,
            facts,
            sentences,
            fact_spans,
            sentence_order_seed: seed,
        })
    }
}

/// Renders with the built-in templates.
pub fn render_passage(
    tree: &Tree,
    sub: &ScopedSubgraph,
    config: VerbalizerConfig,
    seed: u64,
) -> Result<VerbalizedPassage, VerbalizeError> {
    Verbalizer::new(TemplateLibrary::builtin(), config).render(tree, sub, seed)
}
