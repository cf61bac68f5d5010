//! Question/answer generation and SQuAD 2.0 datasets.

mod generate;
pub mod squad;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generate::{generate_qa, QaConfig};
pub use squad::{
    assemble, deserialize, sample_questions, serialize, split, split_indices, verify_answers, write_json, Answer,
    Article, DatasetView, Paragraph, Qa, QaError, SquadDataset, SquadParagraph, VerificationFailure, VerificationReport,
};

/// The twelve question types, in report row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionType {
    Name,
    Date,
    Place,
    InfoNamedEntity,
    FirstDegreeRelation,
    SecondDegreeRelation,
    FirstDegreeDate,
    FirstDegreePlace,
    FirstDegreeInfo,
    SecondDegreeDate,
    SecondDegreePlace,
    SecondDegreeInfo,
}

impl QuestionType {
    pub const ALL: [QuestionType; 12] = [
        QuestionType::Name,
        QuestionType::Date,
        QuestionType::Place,
        QuestionType::InfoNamedEntity,
        QuestionType::FirstDegreeRelation,
        QuestionType::SecondDegreeRelation,
        QuestionType::FirstDegreeDate,
        QuestionType::FirstDegreePlace,
        QuestionType::FirstDegreeInfo,
        QuestionType::SecondDegreeDate,
        QuestionType::SecondDegreePlace,
        QuestionType::SecondDegreeInfo,
    ];

    /// Short code used inside question ids.
    pub fn code(self) -> &'static str {
        match self {
            QuestionType::Name => "name",
            QuestionType::Date => "date",
            QuestionType::Place => "place",
            QuestionType::InfoNamedEntity => "info",
            QuestionType::FirstDegreeRelation => "rel1",
            QuestionType::SecondDegreeRelation => "rel2",
            QuestionType::FirstDegreeDate => "date1",
            QuestionType::FirstDegreePlace => "place1",
            QuestionType::FirstDegreeInfo => "info1",
            QuestionType::SecondDegreeDate => "date2",
            QuestionType::SecondDegreePlace => "place2",
            QuestionType::SecondDegreeInfo => "info2",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QuestionType::Name => "Name",
            QuestionType::Date => "Date",
            QuestionType::Place => "Place",
            QuestionType::InfoNamedEntity => "Information / named entity",
            QuestionType::FirstDegreeRelation => "First-degree relation",
            QuestionType::SecondDegreeRelation => "Second-degree relation",
            QuestionType::FirstDegreeDate => "First-degree date",
            QuestionType::FirstDegreePlace => "First-degree place",
            QuestionType::FirstDegreeInfo => "First-degree information / named entity",
            QuestionType::SecondDegreeDate => "Second-degree date",
            QuestionType::SecondDegreePlace => "Second-degree place",
            QuestionType::SecondDegreeInfo => "Second-degree information / named entity",
        }
    }

    pub fn from_code(code: &str) -> Option<QuestionType> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }

    /// Recovers the type from a `<tree>:<sp>:<type>:<counter>` id. Tree and person ids may
    /// themselves contain colons, so the type is read from the right.
    pub fn from_id(id: &str) -> Option<QuestionType> {
        let mut parts = id.rsplitn(3, ':');
        let _counter = parts.next()?;
        let code = parts.next()?;
        parts.next()?;
        Self::from_code(code)
    }

    pub fn at(objective: Objective, bucket: u32) -> QuestionType {
        use Objective as O;
        use QuestionType as T;
        match (objective, bucket) {
            (O::Date, 0) => T::Date,
            (O::Place, 0) => T::Place,
            (O::Info, 0) => T::InfoNamedEntity,
            (O::Date, 1) => T::FirstDegreeDate,
            (O::Place, 1) => T::FirstDegreePlace,
            (O::Info, 1) => T::FirstDegreeInfo,
            (O::Date, _) => T::SecondDegreeDate,
            (O::Place, _) => T::SecondDegreePlace,
            (O::Info, _) => T::SecondDegreeInfo,
        }
    }

    /// Relation questions: distance 0 or 1 from the source person is first degree.
    pub fn relation(distance: u32) -> QuestionType {
        if distance <= 1 {
            QuestionType::FirstDegreeRelation
        } else {
            QuestionType::SecondDegreeRelation
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for QuestionType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| t.code() == s || t.label().eq_ignore_ascii_case(s) || format!("{t:?}") == s)
            .ok_or_else(|| format!("unknown question type {s:?}"))
    }
}

/// What kind of value a question asks for, before the degree is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Date,
    Place,
    Info,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuestionSource {
    RuleTemplate,
    WhTemplate,
    Quantitative,
    YesNo,
    Unanswerable,
}

/// A generated question with the metadata the wire format does not carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAItem {
    pub question: String,
    pub id: String,
    pub answers: Vec<Answer>,
    pub plausible_answers: Vec<Answer>,
    pub is_impossible: bool,
    pub question_type: QuestionType,
    pub source: QuestionSource,
    /// Person the question is about, when there is one.
    pub subject: Option<String>,
}

impl QAItem {
    pub fn to_wire(&self) -> Qa {
        Qa {
            plausible_answers: self.plausible_answers.clone(),
            question: self.question.clone(),
            id: self.id.clone(),
            answers: self.answers.clone(),
            is_impossible: self.is_impossible,
        }
    }

    pub fn into_wire(self) -> Qa {
        Qa {
            plausible_answers: self.plausible_answers,
            question: self.question,
            id: self.id,
            answers: self.answers,
            is_impossible: self.is_impossible,
        }
    }
}

/// Degree bucket of a subject for typing: the source person is 0, spouses and
/// first-degree relatives 1, everyone further 2.
pub fn degree_bucket(is_source: bool, degree: u32) -> u32 {
    if is_source {
        0
    } else if degree <= 1 {
        1
    } else {
        2
    }
}

/// Type of a question. Template questions keep their declared type; WH questions map
/// When to date and Where to place at the subject's degree, anything else to information.
pub fn classify_question(item: &QAItem, subject_degree: u32) -> QuestionType {
    match item.source {
        QuestionSource::RuleTemplate | QuestionSource::Quantitative | QuestionSource::YesNo => item.question_type,
        QuestionSource::WhTemplate | QuestionSource::Unanswerable => {
            QuestionType::at(wh_objective(&item.question), subject_degree)
        }
    }
}

pub fn wh_objective(question: &str) -> Objective {
    let first = question.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match first.as_str() {
        "when" => Objective::Date,
        "where" => Objective::Place,
        _ => Objective::Info,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wh(q: &str) -> QAItem {
        QAItem {
            question: q.into(),
            id: "t:p:info:0".into(),
            answers: vec![],
            plausible_answers: vec![],
            is_impossible: false,
            question_type: QuestionType::InfoNamedEntity,
            source: QuestionSource::WhTemplate,
            subject: None,
        }
    }

    #[test]
    fn table_three_examples() {
        assert_eq!(classify_question(&wh("When was Emily born?"), 0), QuestionType::Date);
        assert_eq!(classify_question(&wh("Where was Emily's grandson born?"), 2), QuestionType::SecondDegreePlace);
        assert_eq!(
            classify_question(&wh("What was Emily's grandfather's rank in the military?"), 2),
            QuestionType::SecondDegreeInfo
        );
    }

    #[test]
    fn codes_round_trip() {
        for t in QuestionType::ALL {
            assert_eq!(QuestionType::from_code(t.code()), Some(t));
            assert_eq!(QuestionType::from_id(&format!("tree:@I1@:{}:7", t.code())), Some(t));
            assert_eq!(t.label().parse::<QuestionType>().unwrap(), t);
        }
        assert_eq!(QuestionType::from_id("a:b:c:d:date2:3"), Some(QuestionType::SecondDegreeDate));
        assert_eq!(QuestionType::from_id("garbage"), None);
    }
}
