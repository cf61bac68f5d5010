//! GEDCOM 5.5.1 lineage-linked parsing.
//!
//! Only the parts of the standard that carry family-tree content are interpreted:
//! individuals, families, their events, notes and free-form attributes. Sources,
//! repositories and multimedia are skipped. The parser works on already-decoded text.

mod date;
mod line;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub use date::{parse_date, DateQualifier, GedcomDate};
pub use line::{tokenize, RawLine};

#[derive(Debug, thiserror::Error)]
pub enum GedcomError {
    #[error("line {line}: {message}")]
    Structural { line: usize, message: String },
    #[error("no individual or family records")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A non-fatal parse anomaly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Diagnostic { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Diagnostic { line: None, message: message.into() }
    }

    /// `WARN <file>:<line> <message>`
    pub fn render(&self, file: &str) -> String {
        format!("WARN {file}:{} {}", self.line.unwrap_or(0), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Birth,
    Death,
    Burial,
    Baptism,
    Endowment,
    SealingChild,
    Marriage,
    Other(String),
}

impl EventKind {
    pub fn from_tag(tag: &str) -> EventKind {
        match tag {
            "BIRT" => EventKind::Birth,
            "DEAT" => EventKind::Death,
            "BURI" => EventKind::Burial,
            "BAPL" => EventKind::Baptism,
            "ENDL" => EventKind::Endowment,
            "SLGC" => EventKind::SealingChild,
            "MARR" => EventKind::Marriage,
            other => EventKind::Other(other.to_string()),
        }
    }

    pub fn tag(&self) -> &str {
        match self {
            EventKind::Birth => "BIRT",
            EventKind::Death => "DEAT",
            EventKind::Burial => "BURI",
            EventKind::Baptism => "BAPL",
            EventKind::Endowment => "ENDL",
            EventKind::SealingChild => "SLGC",
            EventKind::Marriage => "MARR",
            EventKind::Other(tag) => tag,
        }
    }
}

const INDIVIDUAL_EVENT_TAGS: &[&str] = &[
    "BIRT", "DEAT", "BURI", "BAPL", "ENDL", "SLGC", "CHR", "CHRA", "BAPM", "CREM", "ADOP", "BARM",
    "BASM", "BLES", "CONF", "CONL", "FCOM", "ORDN", "NATU", "EMIG", "IMMI", "CENS", "PROB", "WILL",
    "GRAD", "RETI", "RESI", "EVEN",
];

const FAMILY_EVENT_TAGS: &[&str] = &[
    "MARR", "MARB", "MARC", "MARL", "MARS", "ENGA", "DIV", "DIVF", "ANUL", "SLGS", "CENS", "RESI",
    "EVEN",
];

/// Standard tags that are kept as attributes without a diagnostic.
const KNOWN_ATTRIBUTE_TAGS: &[&str] = &[
    "OCCU", "EDUC", "RELI", "TITL", "NATI", "CAST", "DSCR", "PROP", "NCHI", "NMR", "SSN", "IDNO",
    "FACT", "CHAN", "RIN", "REFN", "AFN", "RFN", "UID", "_UID", "SOUR", "OBJE", "SUBM", "ALIA",
    "ASSO", "ANCI", "DESI", "RESN", "TEMP", "TYPE", "AGE", "CAUS", "AGNC", "ADDR", "STAT", "FORM",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDetail {
    pub kind: EventKind,
    pub date: Option<GedcomDate>,
    pub place: Option<String>,
    pub notes: Vec<String>,
    /// Remaining sub-tags (e.g. `TEMP`, `TYPE`, `CAUS`).
    pub attributes: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Sex {
    Male,
    Female,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IndividualRecord {
    pub id: String,
    pub name_given: Option<String>,
    pub name_surname: Option<String>,
    pub sex: Sex,
    pub events: Vec<EventDetail>,
    pub famc: Vec<String>,
    pub fams: Vec<String>,
    pub notes: Vec<String>,
    pub attributes: Vec<(String, String)>,
}

impl IndividualRecord {
    pub fn first_event(&self, kind: &EventKind) -> Option<&EventDetail> {
        self.events.iter().find(|e| &e.kind == kind)
    }

    pub fn birth_year(&self) -> Option<i32> {
        self.first_event(&EventKind::Birth)
            .and_then(|e| e.date.as_ref())
            .and_then(|d| d.year)
    }

    pub fn attribute(&self, tag: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(t, _)| t == tag)
            .map(|(_, v)| v.as_str())
    }

    /// "Given Surname", or whichever part exists.
    pub fn full_name(&self) -> Option<String> {
        match (&self.name_given, &self.name_surname) {
            (Some(g), Some(s)) => Some(format!("{g} {s}")),
            (Some(g), None) => Some(g.clone()),
            (None, Some(s)) => Some(s.clone()),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub id: String,
    pub husband: Option<String>,
    pub wife: Option<String>,
    /// Parents that arrived through reconciliation when both HUSB and WIFE were taken.
    pub other_parents: Vec<String>,
    pub children: Vec<String>,
    pub events: Vec<EventDetail>,
    pub notes: Vec<String>,
    pub attributes: Vec<(String, String)>,
}

impl FamilyRecord {
    pub fn parents(&self) -> impl Iterator<Item = &String> {
        self.husband
            .iter()
            .chain(self.wife.iter())
            .chain(self.other_parents.iter())
    }

    pub fn has_parent(&self, id: &str) -> bool {
        self.parents().any(|p| p == id)
    }

    fn is_empty(&self) -> bool {
        self.parents().next().is_none() && self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GedcomDocument {
    pub source_path: String,
    pub individuals: IndexMap<String, IndividualRecord>,
    pub families: IndexMap<String, FamilyRecord>,
    pub warnings: Vec<Diagnostic>,
}

/// A line together with its nested sub-lines.
#[derive(Debug)]
struct Node {
    line: RawLine,
    children: Vec<Node>,
}

impl Node {
    fn value(&self) -> &str {
        self.line.value.as_deref().unwrap_or("")
    }

    /// Value with `CONT`/`CONC` continuations folded in.
    fn text(&self) -> String {
        let mut s = self.value().to_string();
        for c in &self.children {
            match c.line.tag.as_str() {
                "CONT" => {
                    s.push('\n');
                    s.push_str(c.value());
                }
                "CONC" => s.push_str(c.value()),
                _ => {}
            }
        }
        s
    }
}

fn build_tree(lines: Vec<RawLine>) -> Vec<Node> {
    let mut roots: Vec<Node> = Vec::new();
    let mut stack: Vec<Node> = Vec::new();
    for line in lines {
        while stack.last().is_some_and(|n| n.line.level >= line.level) {
            let done = stack.pop().unwrap();
            match stack.last_mut() {
                Some(parent) => parent.children.push(done),
                None => roots.push(done),
            }
        }
        stack.push(Node { line, children: Vec::new() });
    }
    while let Some(done) = stack.pop() {
        match stack.last_mut() {
            Some(parent) => parent.children.push(done),
            None => roots.push(done),
        }
    }
    roots
}

/// Parses decoded GEDCOM text.
pub fn parse(text: &str) -> Result<GedcomDocument, GedcomError> {
    parse_named(text, "")
}

/// Reads and parses a `.ged` file. The file must be UTF-8.
pub fn parse_file(path: impl AsRef<Path>) -> Result<GedcomDocument, GedcomError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| GedcomError::Encoding)?;
    parse_named(&text, &path.display().to_string())
}

pub fn parse_named(text: &str, source_path: &str) -> Result<GedcomDocument, GedcomError> {
    let records = build_tree(tokenize(text)?);
    let mut doc = GedcomDocument {
        source_path: source_path.to_string(),
        ..Default::default()
    };

    let note_records: HashMap<&str, String> = records
        .iter()
        .filter(|r| r.line.tag == "NOTE")
        .filter_map(|r| r.line.xref_id.as_deref().map(|id| (id, r.text())))
        .collect();
    let mut ctx = Ctx { notes: &note_records, warnings: Vec::new() };

    for rec in &records {
        let line_no = rec.line.line_no;
        match rec.line.tag.as_str() {
            "INDI" => {
                let indi = ctx.individual(rec);
                if doc.individuals.contains_key(&indi.id) || doc.families.contains_key(&indi.id) {
                    return Err(GedcomError::Structural {
                        line: line_no,
                        message: format!("duplicate record id {}", indi.id),
                    });
                }
                doc.individuals.insert(indi.id.clone(), indi);
            }
            "FAM" => {
                let fam = ctx.family(rec);
                if doc.individuals.contains_key(&fam.id) || doc.families.contains_key(&fam.id) {
                    return Err(GedcomError::Structural {
                        line: line_no,
                        message: format!("duplicate record id {}", fam.id),
                    });
                }
                doc.families.insert(fam.id.clone(), fam);
            }
            "HEAD" | "TRLR" | "NOTE" | "SOUR" | "REPO" | "OBJE" | "SUBM" | "SUBN" | "SNOTE" => {}
            other => ctx
                .warnings
                .push(Diagnostic::at(line_no, format!("skipping unknown record type {other}"))),
        }
    }
    if doc.individuals.is_empty() && doc.families.is_empty() {
        return Err(GedcomError::EmptyInput);
    }
    doc.warnings = ctx.warnings;
    reconcile(&mut doc);
    Ok(doc)
}

struct Ctx<'a> {
    notes: &'a HashMap<&'a str, String>,
    warnings: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn note(&mut self, node: &Node) -> String {
        let v = node.value().trim();
        if v.starts_with('@') && v.ends_with('@') && v.len() > 2 {
            match self.notes.get(v) {
                Some(text) => return text.clone(),
                None => self
                    .warnings
                    .push(Diagnostic::at(node.line.line_no, format!("dangling note pointer {v}"))),
            }
        }
        node.text()
    }

    fn unknown(&mut self, node: &Node) {
        self.warnings.push(Diagnostic::at(
            node.line.line_no,
            format!("unknown tag {} kept as attribute", node.line.tag),
        ));
    }

    fn attribute(&mut self, node: &Node) -> (String, String) {
        let tag = &node.line.tag;
        if !KNOWN_ATTRIBUTE_TAGS.contains(&tag.as_str()) {
            self.unknown(node);
        }
        (tag.clone(), node.text())
    }

    fn event(&mut self, node: &Node) -> EventDetail {
        let mut ev = EventDetail {
            kind: EventKind::from_tag(&node.line.tag),
            date: None,
            place: None,
            notes: Vec::new(),
            attributes: Vec::new(),
        };
        for c in &node.children {
            match c.line.tag.as_str() {
                "DATE" => ev.date = Some(parse_date(c.value())),
                "PLAC" => {
                    let p = c.value().trim();
                    if !p.is_empty() {
                        ev.place = Some(p.to_string());
                    }
                }
                "NOTE" => ev.notes.push(self.note(c)),
                "CONT" | "CONC" => {}
                _ => {
                    let attr = self.attribute(c);
                    ev.attributes.push(attr);
                }
            }
        }
        ev
    }

    fn individual(&mut self, rec: &Node) -> IndividualRecord {
        let mut indi = IndividualRecord {
            id: rec.line.xref_id.clone().unwrap_or_default(),
            ..Default::default()
        };
        let mut named = false;
        for c in &rec.children {
            let tag = c.line.tag.as_str();
            match tag {
                "NAME" if !named => {
                    named = true;
                    let (given, surname) = split_name(c.value());
                    indi.name_given = given;
                    indi.name_surname = surname;
                    for sub in &c.children {
                        let v = sub.value().trim();
                        match sub.line.tag.as_str() {
                            "GIVN" if !v.is_empty() => indi.name_given = Some(v.to_string()),
                            "SURN" if !v.is_empty() => indi.name_surname = Some(v.to_string()),
                            _ => {}
                        }
                    }
                }
                "NAME" => indi.attributes.push(("NAME".to_string(), c.value().to_string())),
                "SEX" => {
                    indi.sex = match c.value().trim().to_ascii_uppercase().as_str() {
                        "M" => Sex::Male,
                        "F" => Sex::Female,
                        _ => Sex::Unknown,
                    }
                }
                "FAMS" => push_unique(&mut indi.fams, c.value().trim()),
                "FAMC" => push_unique(&mut indi.famc, c.value().trim()),
                "NOTE" => indi.notes.push(self.note(c)),
                t if INDIVIDUAL_EVENT_TAGS.contains(&t) => indi.events.push(self.event(c)),
                _ => {
                    let attr = self.attribute(c);
                    indi.attributes.push(attr);
                }
            }
        }
        indi
    }

    fn family(&mut self, rec: &Node) -> FamilyRecord {
        let mut fam = FamilyRecord {
            id: rec.line.xref_id.clone().unwrap_or_default(),
            ..Default::default()
        };
        for c in &rec.children {
            let v = c.value().trim();
            match c.line.tag.as_str() {
                "HUSB" if !v.is_empty() => fam.husband = Some(v.to_string()),
                "WIFE" if !v.is_empty() => fam.wife = Some(v.to_string()),
                "CHIL" if !v.is_empty() => push_unique(&mut fam.children, v),
                "NOTE" => fam.notes.push(self.note(c)),
                t if FAMILY_EVENT_TAGS.contains(&t) => fam.events.push(self.event(c)),
                _ => {
                    let attr = self.attribute(c);
                    fam.attributes.push(attr);
                }
            }
        }
        fam
    }
}

fn push_unique(list: &mut Vec<String>, value: &str) {
    if !value.is_empty() && !list.iter().any(|v| v == value) {
        list.push(value.to_string());
    }
}

/// Splits a `NAME` value. Slash-delimited surnames (`Emily /Williams/`) take priority;
/// otherwise the last word is the surname.
fn split_name(value: &str) -> (Option<String>, Option<String>) {
    let clean = |s: &str| {
        let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
        (!s.is_empty()).then_some(s)
    };
    if let Some(start) = value.find('/') {
        let rest = &value[start + 1..];
        let end = rest.find('/').unwrap_or(rest.len());
        let given = format!("{} {}", &value[..start], rest.get(end + 1..).unwrap_or(""));
        return (clean(&given), clean(&rest[..end]));
    }
    let words: Vec<&str> = value.split_whitespace().collect();
    match words.as_slice() {
        [] => (None, None),
        [only] => (Some(only.to_string()), None),
        [given @ .., last] => (Some(given.join(" ")), Some(last.to_string())),
    }
}

/// Makes person-side (FAMS/FAMC) and family-side (HUSB/WIFE/CHIL) links agree by taking
/// their union. Links to records that do not exist are kept but flagged.
fn reconcile(doc: &mut GedcomDocument) {
    let mut warnings = Vec::new();

    // Person side -> family side.
    let person_ids: Vec<String> = doc.individuals.keys().cloned().collect();
    for pid in &person_ids {
        let p = &doc.individuals[pid];
        let sex = p.sex;
        let (fams, famc) = (p.fams.clone(), p.famc.clone());
        for fid in fams {
            let Some(fam) = doc.families.get_mut(&fid) else {
                warnings.push(Diagnostic::global(format!("{pid}: dangling FAMS link {fid}")));
                continue;
            };
            if !fam.has_parent(pid) {
                warnings.push(Diagnostic::global(format!(
                    "{pid}: FAMS {fid} not mirrored by HUSB/WIFE; added as parent"
                )));
                assign_parent(fam, pid, sex);
            }
        }
        for fid in famc {
            let Some(fam) = doc.families.get_mut(&fid) else {
                warnings.push(Diagnostic::global(format!("{pid}: dangling FAMC link {fid}")));
                continue;
            };
            if !fam.children.contains(pid) {
                warnings.push(Diagnostic::global(format!(
                    "{pid}: FAMC {fid} not mirrored by CHIL; added as child"
                )));
                fam.children.push(pid.clone());
            }
        }
    }

    // Family side -> person side.
    let fam_ids: Vec<String> = doc.families.keys().cloned().collect();
    for fid in &fam_ids {
        let fam = &doc.families[fid];
        let parents: Vec<String> = fam.parents().cloned().collect();
        let children = fam.children.clone();
        for (pid, as_parent) in parents
            .into_iter()
            .map(|p| (p, true))
            .chain(children.into_iter().map(|c| (c, false)))
        {
            let Some(p) = doc.individuals.get_mut(&pid) else {
                let role = if as_parent { "parent" } else { "child" };
                warnings.push(Diagnostic::global(format!("{fid}: dangling {role} link {pid}")));
                continue;
            };
            let links = if as_parent { &mut p.fams } else { &mut p.famc };
            if !links.contains(fid) {
                let tag = if as_parent { "FAMS" } else { "FAMC" };
                warnings.push(Diagnostic::global(format!("{fid}: {pid} lacks {tag} link; added")));
                links.push(fid.clone());
            }
        }
    }
    doc.warnings.extend(warnings);
}

fn assign_parent(fam: &mut FamilyRecord, pid: &str, sex: Sex) {
    let pid = pid.to_string();
    match sex {
        Sex::Male if fam.husband.is_none() => fam.husband = Some(pid),
        Sex::Female if fam.wife.is_none() => fam.wife = Some(pid),
        _ if fam.husband.is_none() && sex != Sex::Female => fam.husband = Some(pid),
        _ if fam.wife.is_none() && sex != Sex::Male => fam.wife = Some(pid),
        _ => fam.other_parents.push(pid),
    }
}

/// Drops individuals who may still be alive: no death or burial event, and a birth year
/// that is unknown or later than `cutoff_year`. Families left without members are dropped
/// too. The input is not modified.
pub fn filter_living(doc: &GedcomDocument, cutoff_year: i32) -> GedcomDocument {
    let presumed_dead = |p: &IndividualRecord| {
        p.events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Death | EventKind::Burial))
            || p.birth_year().is_some_and(|y| y <= cutoff_year)
    };
    let mut out = GedcomDocument {
        source_path: doc.source_path.clone(),
        warnings: doc.warnings.clone(),
        ..Default::default()
    };
    out.individuals = doc
        .individuals
        .iter()
        .filter(|(_, p)| presumed_dead(p))
        .map(|(k, p)| (k.clone(), p.clone()))
        .collect();

    let keep = |id: &String| out.individuals.contains_key(id);
    let mut families = IndexMap::new();
    for (fid, fam) in &doc.families {
        let mut fam = fam.clone();
        fam.husband = fam.husband.filter(&keep);
        fam.wife = fam.wife.filter(&keep);
        fam.other_parents.retain(&keep);
        fam.children.retain(&keep);
        if !fam.is_empty() {
            families.insert(fid.clone(), fam);
        }
    }
    out.families = families;
    let removed = |f: &String| doc.families.contains_key(f) && !out.families.contains_key(f);
    for p in out.individuals.values_mut() {
        p.fams.retain(|f| !removed(f));
        p.famc.retain(|f| !removed(f));
    }
    out
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::Male => "male",
            Sex::Female => "female",
            Sex::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> GedcomDocument {
        parse(&format!("0 HEAD\n{body}\n0 TRLR\n")).unwrap()
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse("0 HEAD\n1 CHAR UTF-8\n0 TRLR"), Err(GedcomError::EmptyInput)));
        assert!(matches!(parse(""), Err(GedcomError::EmptyInput)));
    }

    #[test]
    fn level_jump_is_structural() {
        let err = parse("0 HEAD\n0 @I1@ INDI\n2 DATE 1900\n0 TRLR").unwrap_err();
        assert!(matches!(err, GedcomError::Structural { line: 3, .. }));
    }

    #[test]
    fn names() {
        assert_eq!(split_name("Emily /Williams/"), (Some("Emily".into()), Some("Williams".into())));
        assert_eq!(split_name("Emily Williams"), (Some("Emily".into()), Some("Williams".into())));
        assert_eq!(split_name("Mary Ann /Smith/ Jr"), (Some("Mary Ann Jr".into()), Some("Smith".into())));
        assert_eq!(split_name("/Smith/"), (None, Some("Smith".into())));
        assert_eq!(split_name("Carol"), (Some("Carol".into()), None));
    }

    #[test]
    fn notes_fold_continuations_and_pointers() {
        let d = doc("0 @N1@ NOTE shared\n1 CONC  note\n0 @I1@ INDI\n1 NOTE first\n2 CONT second\n1 NOTE @N1@");
        assert_eq!(d.individuals["@I1@"].notes, vec!["first\nsecond", "shared note"]);
    }

    #[test]
    fn unknown_tags_kept_with_warning() {
        let d = doc("0 @I1@ INDI\n1 _MILT Sergeant\n1 OCCU Baker");
        let p = &d.individuals["@I1@"];
        assert_eq!(p.attribute("_MILT"), Some("Sergeant"));
        assert_eq!(p.attribute("OCCU"), Some("Baker"));
        assert_eq!(d.warnings.len(), 1);
        assert!(d.warnings[0].message.contains("_MILT"));
    }

    #[test]
    fn reconciles_one_sided_links() {
        // I1 claims FAMS F1 without HUSB; F1 lists I3 as CHIL without FAMC.
        let d = doc(
            "0 @I1@ INDI\n1 SEX M\n1 FAMS @F1@\n0 @I2@ INDI\n1 SEX F\n0 @I3@ INDI\n\
             0 @F1@ FAM\n1 WIFE @I2@\n1 CHIL @I3@",
        );
        let f = &d.families["@F1@"];
        assert_eq!(f.husband.as_deref(), Some("@I1@"));
        assert_eq!(d.individuals["@I2@"].fams, vec!["@F1@"]);
        assert_eq!(d.individuals["@I3@"].famc, vec!["@F1@"]);
        assert_eq!(d.warnings.len(), 3);
    }

    #[test]
    fn unknown_sex_parent_takes_free_slot() {
        let d = doc("0 @I1@ INDI\n1 FAMS @F1@\n0 @I2@ INDI\n1 FAMS @F1@\n0 @I3@ INDI\n1 FAMS @F1@\n0 @F1@ FAM");
        let f = &d.families["@F1@"];
        assert_eq!(f.parents().count(), 3);
        assert_eq!(f.other_parents, vec!["@I3@"]);
    }

    #[test]
    fn dangling_links_flagged() {
        let d = doc("0 @I1@ INDI\n1 FAMC @F9@\n0 @F1@ FAM\n1 CHIL @I8@\n1 HUSB @I1@");
        assert_eq!(d.individuals["@I1@"].famc, vec!["@F9@"]);
        assert_eq!(d.families["@F1@"].children, vec!["@I8@"]);
        assert_eq!(d.individuals["@I1@"].fams, vec!["@F1@"]);
        assert!(d.warnings.iter().any(|w| w.message.contains("@F9@")));
        assert!(d.warnings.iter().any(|w| w.message.contains("@I8@")));
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(parse("0 @I1@ INDI\n0 @I1@ FAM\n").is_err());
    }

    #[test]
    fn diagnostic_render() {
        let d = Diagnostic::at(12, "unknown tag _X kept as attribute");
        assert_eq!(d.render("a.ged"), "WARN a.ged:12 unknown tag _X kept as attribute");
    }

    fn person(birth: Option<i32>, death: bool) -> String {
        let mut s = String::from("0 @I1@ INDI\n1 NAME A /B/\n");
        if let Some(y) = birth {
            s.push_str(&format!("1 BIRT\n2 DATE {y}\n"));
        }
        if death {
            s.push_str("1 DEAT\n2 DATE 1999\n");
        }
        s.push_str("0 @I2@ INDI\n1 DEAT Y\n");
        s
    }

    #[test]
    fn filter_living_presence_combinations() {
        // (birth present, death present) -> retained?
        let cases = [
            (Some(1990), false, false),
            (Some(1900), false, true),
            (None, false, false),
            (Some(1990), true, true),
            (None, true, true),
        ];
        for (birth, death, kept) in cases {
            let d = doc(&person(birth, death));
            let f = filter_living(&d, 1921);
            assert_eq!(f.individuals.contains_key("@I1@"), kept, "{birth:?} {death}");
            assert!(f.individuals.contains_key("@I2@"));
        }
    }

    #[test]
    fn filter_living_prunes_families() {
        let d = doc(
            "0 @I1@ INDI\n1 BIRT\n2 DATE 1990\n1 FAMS @F1@\n0 @I2@ INDI\n1 DEAT Y\n1 FAMS @F2@\n\
             0 @F1@ FAM\n1 HUSB @I1@\n0 @F2@ FAM\n1 WIFE @I2@",
        );
        let f = filter_living(&d, 1921);
        assert!(!f.families.contains_key("@F1@"));
        assert!(f.families.contains_key("@F2@"));
        assert_eq!(d.families.len(), 2, "input untouched");
        assert_eq!(filter_living(&f, 1921), f);
    }
}
