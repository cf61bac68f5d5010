//! Kinship terms and consanguinity degree.
//!
//! The degree between two people is the smallest number of parent/child hops on any
//! person-to-person path, where moving between co-parents of one family is free.
//! That yields spouse = 0, parent/child = 1, sibling/grandparent/grandchild = 2.
//! Among paths of minimum degree the one with the fewest hops decides the term.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use crate::gedcom::Sex;
use crate::graph::{FamilyTreeGraph, GraphError};

/// Degree reported for people with no connecting path.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Term {
    SelfPerson,
    Husband,
    Wife,
    Spouse,
    Father,
    Mother,
    Parent,
    Son,
    Daughter,
    Child,
    Brother,
    Sister,
    Sibling,
    Grandfather,
    Grandmother,
    Grandparent,
    Grandson,
    Granddaughter,
    Grandchild,
    SonInLaw,
    DaughterInLaw,
    FatherInLaw,
    MotherInLaw,
    Relative,
}

impl Term {
    pub fn as_str(self) -> &'static str {
        match self {
            Term::SelfPerson => "self",
            Term::Husband => "husband",
            Term::Wife => "wife",
            Term::Spouse => "spouse",
            Term::Father => "father",
            Term::Mother => "mother",
            Term::Parent => "parent",
            Term::Son => "son",
            Term::Daughter => "daughter",
            Term::Child => "child",
            Term::Brother => "brother",
            Term::Sister => "sister",
            Term::Sibling => "sibling",
            Term::Grandfather => "grandfather",
            Term::Grandmother => "grandmother",
            Term::Grandparent => "grandparent",
            Term::Grandson => "grandson",
            Term::Granddaughter => "granddaughter",
            Term::Grandchild => "grandchild",
            Term::SonInLaw => "son-in-law",
            Term::DaughterInLaw => "daughter-in-law",
            Term::FatherInLaw => "father-in-law",
            Term::MotherInLaw => "mother-in-law",
            Term::Relative => "relative",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct KinshipTerm {
    pub term: Term,
    pub degree: u32,
}

impl KinshipTerm {
    pub fn is_reachable(&self) -> bool {
        self.degree != UNREACHABLE
    }
}

/// One hop of a person-to-person path, seen from the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    Up,
    Down,
    Spouse,
}

fn pick(sex: Sex, male: Term, female: Term, neutral: Term) -> Term {
    match sex {
        Sex::Male => male,
        Sex::Female => female,
        Sex::Unknown => neutral,
    }
}

/// Names a path shape; `sex` is the sex of the person at the end of the path.
pub fn term_for_path(path: &[Step], sex: Sex) -> Term {
    use Step::*;
    match path {
        [] => Term::SelfPerson,
        [Spouse] => pick(sex, Term::Husband, Term::Wife, Term::Spouse),
        [Up] => pick(sex, Term::Father, Term::Mother, Term::Parent),
        [Down] => pick(sex, Term::Son, Term::Daughter, Term::Child),
        [Up, Down] => pick(sex, Term::Brother, Term::Sister, Term::Sibling),
        [Up, Up] => pick(sex, Term::Grandfather, Term::Grandmother, Term::Grandparent),
        [Down, Down] => pick(sex, Term::Grandson, Term::Granddaughter, Term::Grandchild),
        [Down, Spouse] => pick(sex, Term::SonInLaw, Term::DaughterInLaw, Term::Relative),
        [Spouse, Up] => pick(sex, Term::FatherInLaw, Term::MotherInLaw, Term::Relative),
        _ => Term::Relative,
    }
}

/// Single-source shortest-path state over the person graph.
pub struct KinshipMap {
    source: usize,
    cost: Vec<(u32, u32)>,
    pred: Vec<Option<(usize, Step)>>,
}

impl KinshipMap {
    /// Runs the search from `source`. With `targets`, stops as soon as all of them are settled.
    pub fn compute(graph: &FamilyTreeGraph, source: usize, targets: Option<&[usize]>) -> KinshipMap {
        let n = graph.persons().len();
        let mut cost = vec![(u32::MAX, u32::MAX); n];
        let mut pred = vec![None; n];
        let mut settled = vec![false; n];
        let mut remaining = targets.map(|t| {
            let mut want = vec![false; n];
            let mut count = 0usize;
            for &p in t {
                if !want[p] {
                    want[p] = true;
                    count += 1;
                }
            }
            (want, count)
        });

        let mut heap = BinaryHeap::new();
        cost[source] = (0, 0);
        heap.push(Reverse((0u32, 0u32, source)));
        while let Some(Reverse((deg, hops, p))) = heap.pop() {
            if settled[p] || (deg, hops) > cost[p] {
                continue;
            }
            settled[p] = true;
            if let Some((want, count)) = remaining.as_mut() {
                if want[p] {
                    *count -= 1;
                    if *count == 0 {
                        break;
                    }
                }
            }
            let person = graph.person(p);
            let mut relax = |q: usize, step: Step, heap: &mut BinaryHeap<_>| {
                let c = if step == Step::Spouse { deg } else { deg + 1 };
                let next = (c, hops + 1);
                if next < cost[q] {
                    cost[q] = next;
                    pred[q] = Some((p, step));
                    heap.push(Reverse((next.0, next.1, q)));
                }
            };
            for &f in &person.fam_child {
                for &q in &graph.family(f).parent_fam {
                    if q != p {
                        relax(q, Step::Up, &mut heap);
                    }
                }
            }
            for &f in &person.fam_parent {
                let fam = graph.family(f);
                for &q in &fam.child_fam {
                    if q != p {
                        relax(q, Step::Down, &mut heap);
                    }
                }
                for &q in &fam.parent_fam {
                    if q != p {
                        relax(q, Step::Spouse, &mut heap);
                    }
                }
            }
        }
        KinshipMap { source, cost, pred }
    }

    pub fn degree(&self, target: usize) -> u32 {
        self.cost[target].0
    }

    pub fn path(&self, target: usize) -> Option<Vec<Step>> {
        if self.cost[target].0 == u32::MAX {
            return None;
        }
        let mut steps = Vec::new();
        let mut at = target;
        while at != self.source {
            let (prev, step) = self.pred[at]?;
            steps.push(step);
            at = prev;
        }
        steps.reverse();
        Some(steps)
    }

    pub fn kinship(&self, graph: &FamilyTreeGraph, target: usize) -> KinshipTerm {
        match self.path(target) {
            Some(path) => KinshipTerm {
                term: term_for_path(&path, graph.person(target).sex),
                degree: self.degree(target),
            },
            None => KinshipTerm { term: Term::Relative, degree: UNREACHABLE },
        }
    }
}

/// Relationship of `other` as seen from `sp`.
pub fn kinship(graph: &FamilyTreeGraph, sp: &str, other: &str) -> Result<KinshipTerm, GraphError> {
    let s = graph.require_person(sp)?;
    let o = graph.require_person(other)?;
    Ok(KinshipMap::compute(graph, s, Some(&[o])).kinship(graph, o))
}
