//! A parsed family tree with both of its graph views.

use crate::cidoc::{build_cidoc_graph, KnowledgeGraph};
use crate::gedcom::{GedcomDocument, IndividualRecord};
use crate::graph::FamilyTreeGraph;

#[derive(Debug, Clone)]
pub struct Tree {
    /// Short identifier used in dataset titles and question ids (usually the file stem).
    pub id: String,
    pub doc: GedcomDocument,
    pub graph: FamilyTreeGraph,
    pub kg: KnowledgeGraph,
}

impl Tree {
    pub fn new(id: impl Into<String>, doc: GedcomDocument) -> Tree {
        let graph = FamilyTreeGraph::from_document(&doc);
        let kg = build_cidoc_graph(&doc);
        Tree { id: id.into(), doc, graph, kg }
    }

    /// The record behind a graph person index.
    pub fn record(&self, person: usize) -> &IndividualRecord {
        &self.doc.individuals[self.graph.person(person).id.as_str()]
    }

    pub fn first_name(&self, person: usize) -> Option<&str> {
        self.record(person).name_given.as_deref()
    }

    /// Given name, or surname when the given name is unknown.
    pub fn short_name(&self, person: usize) -> Option<&str> {
        let r = self.record(person);
        r.name_given.as_deref().or(r.name_surname.as_deref())
    }

    pub fn full_name(&self, person: usize) -> Option<String> {
        self.record(person).full_name()
    }
}
