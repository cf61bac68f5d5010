//! Slot templates and the sentence renderer.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{Fact, Predicate, VerbalizeError};

const BUILTIN: &str = include_str!("templates.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReferenceStyle {
    Direct,
    Partial,
    #[serde(rename = "MultiHop")]
    MultiHopEncapsulation,
}

impl ReferenceStyle {
    pub fn is_named(self) -> bool {
        !matches!(self, ReferenceStyle::MultiHopEncapsulation)
    }
}

impl FromStr for ReferenceStyle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Direct" => Ok(ReferenceStyle::Direct),
            "Partial" => Ok(ReferenceStyle::Partial),
            "MultiHop" | "MultiHopEncapsulation" => Ok(ReferenceStyle::MultiHopEncapsulation),
            _ => Err(format!("unknown reference style {s:?}")),
        }
    }
}

/// A template slot. Several template labels share one slot, e.g. `[Birth Year]` and
/// `[Death Year]` are both [`Slot::Date`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    FirstName,
    LastName,
    RelationToSp,
    OtherFirstName,
    CountNoun,
    Label,
    Date,
    Place,
    Spouse,
    Sex,
    Occupation,
    Residence,
    Count,
    Relation,
    Note,
    Value,
}

impl Slot {
    pub fn from_label(label: &str) -> Option<Slot> {
        Some(match label {
            "First Name" | "Relative First Name" => Slot::FirstName,
            "Last Name" | "Relative Last Name" => Slot::LastName,
            "Name relative of SP" | "Relation to SP" => Slot::RelationToSp,
            "Other First Name" => Slot::OtherFirstName,
            "Count Noun" => Slot::CountNoun,
            "Label" => Slot::Label,
            "Birth Year" | "Death Year" | "Burial Year" | "Marriage Year" | "Year" => Slot::Date,
            "Birthplace" | "Death Place" | "Burial Place" | "Marriage Place" | "Place" => Slot::Place,
            "Spouse Name" => Slot::Spouse,
            "Sex" => Slot::Sex,
            "Occupation" => Slot::Occupation,
            "Residence" => Slot::Residence,
            "Count" => Slot::Count,
            "Relation" => Slot::Relation,
            "Note" => Slot::Note,
            "Value" => Slot::Value,
            _ => return None,
        })
    }

    /// Reference and metadata slots say who or what a sentence is about; the rest carry
    /// the fact's values.
    pub fn is_value(self) -> bool {
        !matches!(
            self,
            Slot::FirstName | Slot::LastName | Slot::RelationToSp | Slot::OtherFirstName | Slot::CountNoun | Slot::Label
        )
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Text(String),
    Slot(Slot),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceTemplate {
    pub id: String,
    pub pattern: String,
    pub style: ReferenceStyle,
    pub predicate: Predicate,
    /// Value slots of the pattern; their spans are what questions are asked about.
    pub answer_slots: Vec<Slot>,
    segments: Vec<Segment>,
}

impl SentenceTemplate {
    pub fn new(id: &str, predicate: Predicate, style: ReferenceStyle, pattern: &str) -> Result<Self, String> {
        // "[First Name] 's" renders as "John's".
        let pattern = pattern.trim().replace("] 's", "]'s");
        let mut segments = Vec::new();
        let mut rest = pattern.as_str();
        while let Some(open) = rest.find('[') {
            if open > 0 {
                segments.push(Segment::Text(rest[..open].to_string()));
            }
            let close = rest[open..]
                .find(']')
                .ok_or_else(|| format!("unclosed slot in {pattern:?}"))?
                + open;
            let label = &rest[open + 1..close];
            let slot = Slot::from_label(label).ok_or_else(|| format!("unknown slot [{label}]"))?;
            segments.push(Segment::Slot(slot));
            rest = &rest[close + 1..];
        }
        if !rest.is_empty() {
            segments.push(Segment::Text(rest.to_string()));
        }
        let slots: Vec<Slot> = segments
            .iter()
            .filter_map(|s| match s {
                Segment::Slot(s) => Some(*s),
                _ => None,
            })
            .collect();
        if !slots.iter().any(|s| matches!(s, Slot::FirstName | Slot::LastName)) {
            return Err(format!("template {pattern:?} never names its subject"));
        }
        if style == ReferenceStyle::MultiHopEncapsulation && !slots.contains(&Slot::RelationToSp) {
            return Err(format!("multi-hop template {pattern:?} lacks a relation slot"));
        }
        let mut answer_slots: Vec<Slot> = slots.iter().copied().filter(|s| s.is_value()).collect();
        answer_slots.sort();
        answer_slots.dedup();
        Ok(SentenceTemplate { id: id.to_string(), pattern, style, predicate, answer_slots, segments })
    }

    /// The set of value slots, used to match templates to facts.
    pub fn value_slots(&self) -> BTreeSet<Slot> {
        self.answer_slots.iter().copied().collect()
    }
}

/// Names and relation phrases needed to fill reference slots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct References {
    pub first: Option<String>,
    pub last: Option<String>,
    /// "Emily's husband": the subject seen from an anchor person.
    pub relation_to_sp: Option<String>,
    pub other_first: Option<String>,
    pub other_full: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpan {
    pub slot: Slot,
    /// Character (not byte) offsets.
    pub char_start: usize,
    pub char_end: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedSentence {
    pub text: String,
    pub spans: Vec<SlotSpan>,
}

fn slot_value<'a>(slot: Slot, fact: &'a Fact, refs: &'a References) -> Option<&'a str> {
    match slot {
        Slot::FirstName => refs.first.as_deref(),
        Slot::LastName => refs.last.as_deref(),
        Slot::RelationToSp => refs.relation_to_sp.as_deref(),
        Slot::OtherFirstName => refs.other_first.as_deref(),
        Slot::Spouse => refs.other_full.as_deref(),
        other => fact.value(other),
    }
    .filter(|v| !v.is_empty())
}

/// Fills every slot of `template` for `fact`. Spans are recorded for every slot, in
/// sentence-local character offsets.
pub fn render_sentence(
    fact: &Fact,
    template: &SentenceTemplate,
    refs: &References,
) -> Result<RenderedSentence, VerbalizeError> {
    if template.predicate.template_key() != fact.predicate.template_key() {
        return Err(VerbalizeError::PredicateMismatch {
            template: template.id.clone(),
            fact: fact.predicate.to_string(),
        });
    }
    let mut text = String::with_capacity(template.pattern.len() + 32);
    let mut chars = 0usize;
    let mut spans = Vec::new();
    for seg in &template.segments {
        match seg {
            Segment::Text(t) => {
                text.push_str(t);
                chars += t.chars().count();
            }
            Segment::Slot(slot) => {
                let v = slot_value(*slot, fact, refs)
                    .ok_or_else(|| VerbalizeError::MissingSlot(slot.to_string()))?;
                let n = v.chars().count();
                text.push_str(v);
                spans.push(SlotSpan { slot: *slot, char_start: chars, char_end: chars + n, value: v.to_string() });
                chars += n;
            }
        }
    }
    Ok(RenderedSentence { text, spans })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateLibrary {
    templates: Vec<SentenceTemplate>,
}

impl TemplateLibrary {
    /// Parses `predicate<TAB>style<TAB>pattern` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<TemplateLibrary, VerbalizeError> {
        let mut templates = Vec::new();
        let mut per_predicate: std::collections::HashMap<Predicate, usize> = Default::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| VerbalizeError::TemplateParse { line: i + 1, message };
            let mut cols = line.split('\t');
            let (Some(pred), Some(style), Some(pattern), None) = (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(err("expected three tab-separated columns".into()));
            };
            let predicate: Predicate = pred.trim().parse().map_err(err)?;
            let style: ReferenceStyle = style.trim().parse().map_err(err)?;
            let n = per_predicate.entry(predicate.clone()).or_default();
            *n += 1;
            let id = format!("{}-{}", predicate.template_key(), n);
            templates.push(SentenceTemplate::new(&id, predicate, style, pattern).map_err(err)?);
        }
        Ok(TemplateLibrary { templates })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TemplateLibrary, VerbalizeError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| VerbalizeError::TemplateParse {
            line: 0,
            message: format!("{}: {e}", path.as_ref().display()),
        })?;
        Self::parse(&text)
    }

    pub fn builtin() -> &'static TemplateLibrary {
        static LIB: OnceLock<TemplateLibrary> = OnceLock::new();
        LIB.get_or_init(|| TemplateLibrary::parse(BUILTIN).expect("built-in templates parse"))
    }

    pub fn templates(&self) -> &[SentenceTemplate] {
        &self.templates
    }

    /// Templates for a predicate, in file order. `Other(tag)` facts use the `Other` templates.
    pub fn for_predicate<'a>(&'a self, predicate: &'a Predicate) -> impl Iterator<Item = &'a SentenceTemplate> + 'a {
        let key = predicate.template_key();
        self.templates.iter().filter(move |t| t.predicate.template_key() == key)
    }
}
