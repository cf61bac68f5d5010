//! Bipartite person/family graph.
//!
//! Person and family nodes are stored in vectors sorted by record id, so index order is
//! id order and every adjacency list is sorted by id as well.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::gedcom::{GedcomDocument, Sex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    Person(usize),
    Family(usize),
}

impl NodeId {
    pub fn is_person(self) -> bool {
        matches!(self, NodeId::Person(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum NodeKind {
    Person,
    Family,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Person => "person",
            NodeKind::Family => "family",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonNode {
    pub id: String,
    pub sex: Sex,
    /// Families this person is a child of (FAMC).
    pub fam_child: Vec<usize>,
    /// Families this person is a parent/spouse in (FAMS).
    pub fam_parent: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyNode {
    pub id: String,
    pub child_fam: Vec<usize>,
    pub parent_fam: Vec<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown person {0}")]
    UnknownPerson(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyTreeGraph {
    persons: Vec<PersonNode>,
    families: Vec<FamilyNode>,
    person_ix: HashMap<String, usize>,
    family_ix: HashMap<String, usize>,
}

/// Child-side links, parent-side links, and the node kind they lead to.
type Links<'a> = (&'a [usize], &'a [usize], fn(usize) -> NodeId);

impl FamilyTreeGraph {
    /// Builds the graph from a reconciled document. Links to missing records are ignored.
    pub fn from_document(doc: &GedcomDocument) -> FamilyTreeGraph {
        let mut person_ids: Vec<&String> = doc.individuals.keys().collect();
        let mut family_ids: Vec<&String> = doc.families.keys().collect();
        person_ids.sort();
        family_ids.sort();
        let person_ix: HashMap<String, usize> = person_ids
            .iter()
            .enumerate()
            .map(|(i, id)| ((*id).clone(), i))
            .collect();
        let family_ix: HashMap<String, usize> = family_ids
            .iter()
            .enumerate()
            .map(|(i, id)| ((*id).clone(), i))
            .collect();

        let mut fam_child = vec![BTreeSet::new(); person_ids.len()];
        let mut fam_parent = vec![BTreeSet::new(); person_ids.len()];
        let mut child_fam = vec![BTreeSet::new(); family_ids.len()];
        let mut parent_fam = vec![BTreeSet::new(); family_ids.len()];

        for (pid, p) in &doc.individuals {
            let pi = person_ix[pid];
            for fid in &p.famc {
                if let Some(&fi) = family_ix.get(fid) {
                    fam_child[pi].insert(fi);
                    child_fam[fi].insert(pi);
                }
            }
            for fid in &p.fams {
                if let Some(&fi) = family_ix.get(fid) {
                    fam_parent[pi].insert(fi);
                    parent_fam[fi].insert(pi);
                }
            }
        }
        // Family-side links; after reconciliation these are already mirrored, but a
        // hand-built document may only carry one side.
        for (fid, f) in &doc.families {
            let fi = family_ix[fid];
            for pid in f.parents() {
                if let Some(&pi) = person_ix.get(pid) {
                    fam_parent[pi].insert(fi);
                    parent_fam[fi].insert(pi);
                }
            }
            for pid in &f.children {
                if let Some(&pi) = person_ix.get(pid) {
                    fam_child[pi].insert(fi);
                    child_fam[fi].insert(pi);
                }
            }
        }

        let persons = person_ids
            .iter()
            .enumerate()
            .map(|(i, id)| PersonNode {
                id: (*id).clone(),
                sex: doc.individuals[*id].sex,
                fam_child: fam_child[i].iter().copied().collect(),
                fam_parent: fam_parent[i].iter().copied().collect(),
            })
            .collect();
        let families = family_ids
            .iter()
            .enumerate()
            .map(|(i, id)| FamilyNode {
                id: (*id).clone(),
                child_fam: child_fam[i].iter().copied().collect(),
                parent_fam: parent_fam[i].iter().copied().collect(),
            })
            .collect();
        FamilyTreeGraph { persons, families, person_ix, family_ix }
    }

    pub fn persons(&self) -> &[PersonNode] {
        &self.persons
    }

    pub fn families(&self) -> &[FamilyNode] {
        &self.families
    }

    pub fn person(&self, ix: usize) -> &PersonNode {
        &self.persons[ix]
    }

    pub fn family(&self, ix: usize) -> &FamilyNode {
        &self.families[ix]
    }

    pub fn person_index(&self, id: &str) -> Option<usize> {
        self.person_ix.get(id).copied()
    }

    pub fn require_person(&self, id: &str) -> Result<usize, GraphError> {
        self.person_index(id)
            .ok_or_else(|| GraphError::UnknownPerson(id.to_string()))
    }

    pub fn family_index(&self, id: &str) -> Option<usize> {
        self.family_ix.get(id).copied()
    }

    pub fn label(&self, node: NodeId) -> &str {
        match node {
            NodeId::Person(i) => &self.persons[i].id,
            NodeId::Family(i) => &self.families[i].id,
        }
    }

    pub fn kind(node: NodeId) -> NodeKind {
        match node {
            NodeId::Person(_) => NodeKind::Person,
            NodeId::Family(_) => NodeKind::Family,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty() && self.families.is_empty()
    }

    /// Co-parents of every family the person is a parent in, excluding the person.
    pub fn spouses(&self, person: usize) -> impl Iterator<Item = usize> + '_ {
        self.persons[person]
            .fam_parent
            .iter()
            .flat_map(move |&f| self.families[f].parent_fam.iter().copied())
            .filter(move |&p| p != person)
    }

    pub fn children(&self, person: usize) -> impl Iterator<Item = usize> + '_ {
        self.persons[person]
            .fam_parent
            .iter()
            .flat_map(move |&f| self.families[f].child_fam.iter().copied())
    }

    pub fn parents(&self, person: usize) -> impl Iterator<Item = usize> + '_ {
        self.persons[person]
            .fam_child
            .iter()
            .flat_map(move |&f| self.families[f].parent_fam.iter().copied())
    }

    /// Other children of any family the person is a child of, deduplicated.
    pub fn siblings(&self, person: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.persons[person]
            .fam_child
            .iter()
            .flat_map(|&f| self.families[f].child_fam.iter().copied())
            .filter(|&p| p != person)
            .collect();
        set.into_iter().collect()
    }

    /// Gen-BFS neighbourhood: child-side links first, then parent-side links.
    pub fn neighbours(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let (first, second, wrap): Links<'_> = match node {
            NodeId::Person(i) => (
                &self.persons[i].fam_child,
                &self.persons[i].fam_parent,
                NodeId::Family,
            ),
            NodeId::Family(i) => (
                &self.families[i].child_fam,
                &self.families[i].parent_fam,
                NodeId::Person,
            ),
        };
        first.iter().chain(second.iter()).map(move |&i| wrap(i))
    }
}

/// Convenience wrapper matching [`FamilyTreeGraph::from_document`].
pub fn build_family_tree_graph(doc: &GedcomDocument) -> FamilyTreeGraph {
    FamilyTreeGraph::from_document(doc)
}
