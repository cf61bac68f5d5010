//! Event-centred knowledge graph using CIDOC-CRM classes and properties.
//!
//! Persons (E21) and families (E74 groups) come straight from the GEDCOM records.
//! Births, deaths and other events become their own nodes linked to a place (E53)
//! and a time-span (E52). Family membership uses two non-CIDOC properties, kept
//! apart from the CIDOC codes by [`PropertyCode::is_cidoc`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, Write};

use crate::gedcom::{parse_date, EventDetail, EventKind, GedcomDate, GedcomDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    PersonE21,
    GroupE74,
    EventE5,
    BirthE67,
    DeathE69,
    PlaceE53,
    TimeSpanE52,
}

pub const NODE_CLASSES: [NodeClass; 7] = [
    NodeClass::PersonE21,
    NodeClass::GroupE74,
    NodeClass::EventE5,
    NodeClass::BirthE67,
    NodeClass::DeathE69,
    NodeClass::PlaceE53,
    NodeClass::TimeSpanE52,
];

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::PersonE21 => "E21_Person",
            NodeClass::GroupE74 => "E74_Group",
            NodeClass::EventE5 => "E5_Event",
            NodeClass::BirthE67 => "E67_Birth",
            NodeClass::DeathE69 => "E69_Death",
            NodeClass::PlaceE53 => "E53_Place",
            NodeClass::TimeSpanE52 => "E52_Time-Span",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyCode {
    P98BroughtIntoLife,
    P100WasDeathOf,
    P11HadParticipant,
    P7TookPlaceAt,
    P4HasTimeSpan,
    P152IsParentOf,
    MemberAsParent,
    MemberAsChild,
}

pub const PROPERTY_CODES: [PropertyCode; 8] = [
    PropertyCode::P98BroughtIntoLife,
    PropertyCode::P100WasDeathOf,
    PropertyCode::P11HadParticipant,
    PropertyCode::P7TookPlaceAt,
    PropertyCode::P4HasTimeSpan,
    PropertyCode::P152IsParentOf,
    PropertyCode::MemberAsParent,
    PropertyCode::MemberAsChild,
];

impl PropertyCode {
    pub fn is_cidoc(self) -> bool {
        !matches!(self, PropertyCode::MemberAsParent | PropertyCode::MemberAsChild)
    }
}

impl fmt::Display for PropertyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropertyCode::P98BroughtIntoLife => "P98_broughtIntoLife",
            PropertyCode::P100WasDeathOf => "P100_wasDeathOf",
            PropertyCode::P11HadParticipant => "P11_hadParticipant",
            PropertyCode::P7TookPlaceAt => "P7_tookPlaceAt",
            PropertyCode::P4HasTimeSpan => "P4_hasTimeSpan",
            PropertyCode::P152IsParentOf => "P152_isParentOf",
            PropertyCode::MemberAsParent => "gen_memberAsParent",
            PropertyCode::MemberAsChild => "gen_memberAsChild",
        })
    }
}

/// Allowed (source class, property, target class) triples.
pub const SCHEMA: &[(NodeClass, PropertyCode, NodeClass)] = {
    use NodeClass::*;
    use PropertyCode::*;
    &[
        (PersonE21, P98BroughtIntoLife, BirthE67),
        (PersonE21, P100WasDeathOf, DeathE69),
        (PersonE21, P11HadParticipant, EventE5),
        (GroupE74, P11HadParticipant, EventE5),
        (BirthE67, P7TookPlaceAt, PlaceE53),
        (BirthE67, P4HasTimeSpan, TimeSpanE52),
        (DeathE69, P7TookPlaceAt, PlaceE53),
        (DeathE69, P4HasTimeSpan, TimeSpanE52),
        (EventE5, P7TookPlaceAt, PlaceE53),
        (EventE5, P4HasTimeSpan, TimeSpanE52),
        (PersonE21, P152IsParentOf, PersonE21),
        (PersonE21, MemberAsParent, GroupE74),
        (PersonE21, MemberAsChild, GroupE74),
    ]
};

pub fn schema_allows(source: NodeClass, property: PropertyCode, target: NodeClass) -> bool {
    SCHEMA.contains(&(source, property, target))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgNode {
    pub id: String,
    pub class: NodeClass,
    /// Place name, raw date, or the GEDCOM tag of a generic event.
    pub literal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct KgEdge {
    pub source: usize,
    pub property: PropertyCode,
    pub target: usize,
}

/// An event resolved back out of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgEvent {
    pub kind: EventKind,
    pub date: Option<GedcomDate>,
    pub place: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    nodes: Vec<KgNode>,
    edges: Vec<KgEdge>,
    index: HashMap<String, usize>,
    outgoing: Vec<Vec<usize>>,
}

impl KnowledgeGraph {
    pub fn nodes(&self) -> &[KgNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[KgEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&KgNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    fn add_node(&mut self, id: String, class: NodeClass, literal: Option<String>) -> usize {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(id.clone(), i);
        self.nodes.push(KgNode { id, class, literal });
        self.outgoing.push(Vec::new());
        i
    }

    fn add_edge(&mut self, source: usize, property: PropertyCode, target: usize) {
        debug_assert!(schema_allows(self.nodes[source].class, property, self.nodes[target].class));
        self.outgoing[source].push(self.edges.len());
        self.edges.push(KgEdge { source, property, target });
    }

    /// Outgoing edges of a node, in insertion order.
    pub fn outgoing(&self, id: &str) -> impl Iterator<Item = (&KgEdge, &KgNode)> {
        let list = self.index.get(id).map(|&i| self.outgoing[i].as_slice()).unwrap_or(&[]);
        list.iter().map(|&e| {
            let edge = &self.edges[e];
            (edge, &self.nodes[edge.target])
        })
    }

    /// Events attached to a person or family node, in record order.
    pub fn events_of(&self, owner: &str) -> Vec<KgEvent> {
        let mut out = Vec::new();
        for (edge, event) in self.outgoing(owner) {
            let kind = match (edge.property, event.class) {
                (PropertyCode::P98BroughtIntoLife, _) => EventKind::Birth,
                (PropertyCode::P100WasDeathOf, _) => EventKind::Death,
                (PropertyCode::P11HadParticipant, _) => {
                    EventKind::from_tag(event.literal.as_deref().unwrap_or("EVEN"))
                }
                _ => continue,
            };
            let mut ev = KgEvent { kind, date: None, place: None };
            for (e, target) in self.outgoing(&event.id) {
                match e.property {
                    PropertyCode::P7TookPlaceAt => ev.place = target.literal.clone(),
                    PropertyCode::P4HasTimeSpan => {
                        ev.date = target.literal.as_deref().map(parse_date)
                    }
                    _ => {}
                }
            }
            out.push(ev);
        }
        out
    }

    /// Every edge as a (source class, property, target class) triple.
    pub fn class_triples(&self) -> impl Iterator<Item = (NodeClass, PropertyCode, NodeClass)> + '_ {
        self.edges
            .iter()
            .map(|e| (self.nodes[e.source].class, e.property, self.nodes[e.target].class))
    }

    /// Debug export: one `<source>\t<property>\t<target>` line per edge.
    pub fn write_triples<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.edges {
            let target = &self.nodes[e.target];
            let shown = match &target.literal {
                Some(lit) if matches!(target.class, NodeClass::PlaceE53 | NodeClass::TimeSpanE52) => {
                    format!("{lit:?}")
                }
                _ => target.id.clone(),
            };
            writeln!(w, "{}\t{}\t{}", self.nodes[e.source].id, e.property, shown)?;
        }
        Ok(())
    }
}

pub fn build_cidoc_graph(doc: &GedcomDocument) -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::default();
    for (pid, p) in &doc.individuals {
        let person = kg.add_node(pid.clone(), NodeClass::PersonE21, p.full_name());
        for (n, ev) in p.events.iter().enumerate() {
            add_event(&mut kg, person, pid, n, ev);
        }
    }
    for (fid, f) in &doc.families {
        let group = kg.add_node(fid.clone(), NodeClass::GroupE74, None);
        for (n, ev) in f.events.iter().enumerate() {
            add_event(&mut kg, group, fid, n, ev);
        }
    }
    let mut parenthood = BTreeSet::new();
    for (fid, f) in &doc.families {
        let group = kg.index[fid];
        let parents: Vec<usize> = f.parents().filter_map(|p| kg.index.get(p).copied()).collect();
        let children: Vec<usize> = f.children.iter().filter_map(|c| kg.index.get(c).copied()).collect();
        for &p in &parents {
            kg.add_edge(p, PropertyCode::MemberAsParent, group);
        }
        for &c in &children {
            kg.add_edge(c, PropertyCode::MemberAsChild, group);
        }
        for &p in &parents {
            for &c in &children {
                if parenthood.insert((p, c)) {
                    kg.add_edge(p, PropertyCode::P152IsParentOf, c);
                }
            }
        }
    }
    kg
}

fn add_event(kg: &mut KnowledgeGraph, owner: usize, owner_id: &str, n: usize, ev: &EventDetail) {
    let is_person = kg.nodes[owner].class == NodeClass::PersonE21;
    let (class, property, literal) = match &ev.kind {
        EventKind::Birth if is_person => (NodeClass::BirthE67, PropertyCode::P98BroughtIntoLife, None),
        EventKind::Death if is_person => (NodeClass::DeathE69, PropertyCode::P100WasDeathOf, None),
        other => (
            NodeClass::EventE5,
            PropertyCode::P11HadParticipant,
            Some(other.tag().to_string()),
        ),
    };
    let event_id = format!("{owner_id}#{}#{n}", ev.kind.tag());
    let event = kg.add_node(event_id.clone(), class, literal);
    kg.add_edge(owner, property, event);
    if let Some(place) = &ev.place {
        let node = kg.add_node(format!("place:{place}"), NodeClass::PlaceE53, Some(place.clone()));
        kg.add_edge(event, PropertyCode::P7TookPlaceAt, node);
    }
    if let Some(date) = &ev.date {
        let node = kg.add_node(
            format!("{event_id}#time"),
            NodeClass::TimeSpanE52,
            Some(date.raw.clone()),
        );
        kg.add_edge(event, PropertyCode::P4HasTimeSpan, node);
    }
}
