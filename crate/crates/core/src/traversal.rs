//! Gen-BFS: breadth-first traversal of the person/family graph where depth counts
//! genealogical generations instead of graph hops.
//!
//! Phase one is a level-tracked BFS that only advances the depth counter when a level
//! of person nodes is exhausted, so family nodes cost nothing. Phase two drains the
//! visited queue into the output and appends the co-parents of every emitted person's
//! families (the spouses of the outermost generation) that were not reached.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::graph::{FamilyTreeGraph, GraphError, NodeId, NodeKind};
use crate::kinship::{KinshipMap, KinshipTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum TraversalMode {
    /// The traversal exactly as specified, siblings of the source included at depth 1.
    Faithful,
    /// Faithful traversal followed by dropping persons whose degree exceeds the depth.
    #[default]
    DegreeStrict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphNode {
    pub node: NodeId,
    /// Relationship to the source person; `None` for family nodes.
    pub kinship: Option<KinshipTerm>,
}

impl SubgraphNode {
    pub fn kind(&self) -> NodeKind {
        FamilyTreeGraph::kind(self.node)
    }

    pub fn degree(&self) -> Option<u32> {
        self.kinship.map(|k| k.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopedSubgraph {
    pub sp: usize,
    pub depth: u32,
    /// Output queue order; the source person is always first.
    pub nodes: Vec<SubgraphNode>,
    /// Contents of the depth queue when phase one stopped.
    pub trace: Vec<NodeId>,
}

impl ScopedSubgraph {
    pub fn persons(&self) -> impl Iterator<Item = (usize, KinshipTerm)> + '_ {
        self.nodes.iter().filter_map(|n| match (n.node, n.kinship) {
            (NodeId::Person(p), Some(k)) => Some((p, k)),
            _ => None,
        })
    }

    pub fn person_ids<'g>(&self, graph: &'g FamilyTreeGraph) -> Vec<&'g str> {
        self.persons().map(|(p, _)| graph.person(p).id.as_str()).collect()
    }

    pub fn node_ids<'g>(&self, graph: &'g FamilyTreeGraph) -> Vec<&'g str> {
        self.nodes.iter().map(|n| graph.label(n.node)).collect()
    }

    pub fn trace_ids<'g>(&self, graph: &'g FamilyTreeGraph) -> Vec<&'g str> {
        self.trace.iter().map(|&n| graph.label(n)).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.persons().map(|(_, k)| k.degree).max().unwrap_or(0)
    }

    /// One line per node: `<index>\t<id>\t<kind>\t<degree>`; families show `-`.
    pub fn format_trace(&self, graph: &FamilyTreeGraph) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let degree = n.degree().map_or("-".to_string(), |d| d.to_string());
            let _ = writeln!(out, "{i}\t{}\t{}\t{degree}", graph.label(n.node), n.kind());
        }
        out
    }
}

/// Runs Gen-BFS from the person with record id `sp`.
pub fn gen_bfs(
    graph: &FamilyTreeGraph,
    sp: &str,
    depth: u32,
    mode: TraversalMode,
) -> Result<ScopedSubgraph, GraphError> {
    let sp = graph.require_person(sp)?;
    Ok(gen_bfs_from(graph, sp, depth, mode))
}

pub fn gen_bfs_from(graph: &FamilyTreeGraph, sp: usize, depth: u32, mode: TraversalMode) -> ScopedSubgraph {
    let (tq, dq) = traverse(graph, sp, depth);
    let persons: Vec<usize> = tq
        .iter()
        .filter_map(|n| match n {
            NodeId::Person(p) => Some(*p),
            _ => None,
        })
        .collect();
    let kin = KinshipMap::compute(graph, sp, Some(&persons));
    let nodes = tq
        .into_iter()
        .map(|node| SubgraphNode {
            node,
            kinship: match node {
                NodeId::Person(p) => Some(kin.kinship(graph, p)),
                NodeId::Family(_) => None,
            },
        })
        .collect();
    let sub = ScopedSubgraph { sp, depth, nodes, trace: dq };
    match mode {
        TraversalMode::Faithful => sub,
        TraversalMode::DegreeStrict => consanguinity_filter(graph, &sub, depth),
    }
}

/// Phase one and two; returns (TQ, DQ).
fn traverse(graph: &FamilyTreeGraph, sp: usize, depth: u32) -> (Vec<NodeId>, Vec<NodeId>) {
    use std::collections::VecDeque;

    let start = NodeId::Person(sp);
    let mut nq: VecDeque<NodeId> = VecDeque::from([start]);
    // "not in NQ" means never enqueued; a contents check would revisit nodes on cycles.
    let mut enqueued: HashSet<NodeId> = HashSet::from([start]);
    let mut dq: Vec<NodeId> = Vec::new();
    let mut current_depth: u32 = 0;
    let mut nodes_to_depth_increase: usize = 1;
    let mut next_nodes_to_depth_increase: usize = 0;
    let mut levels_without_person = 0u32;

    while let Some(n) = nq.pop_front() {
        dq.push(n);
        let kn: Vec<NodeId> = graph.neighbours(n).collect();
        let fresh: Vec<NodeId> = kn.into_iter().filter(|k| !enqueued.contains(k)).collect();
        next_nodes_to_depth_increase += fresh.len();
        nodes_to_depth_increase = nodes_to_depth_increase.saturating_sub(1);
        if nodes_to_depth_increase == 0 {
            // Levels alternate person/family in a bipartite graph; the second clause only
            // matters if that ever breaks.
            let bump = if n.is_person() {
                levels_without_person = 0;
                true
            } else {
                levels_without_person += 1;
                levels_without_person >= 2
            };
            if bump {
                levels_without_person = 0;
                current_depth += 1;
                if current_depth > depth {
                    break;
                }
            }
            nodes_to_depth_increase = next_nodes_to_depth_increase;
            next_nodes_to_depth_increase = 0;
        }
        for k in fresh {
            enqueued.insert(k);
            nq.push_back(k);
        }
    }

    let mut emitted: HashSet<NodeId> = dq.iter().copied().collect();
    let mut tq = Vec::with_capacity(dq.len());
    for &dn in &dq {
        tq.push(dn);
        if let NodeId::Person(p) = dn {
            for &f in &graph.person(p).fam_parent {
                for &q in &graph.family(f).parent_fam {
                    if emitted.insert(NodeId::Person(q)) {
                        tq.push(NodeId::Person(q));
                    }
                }
            }
        }
    }
    (tq, dq)
}

/// Drops persons above `max_degree`, then families with no remaining adjacent person.
/// Order is preserved.
pub fn consanguinity_filter(graph: &FamilyTreeGraph, sub: &ScopedSubgraph, max_degree: u32) -> ScopedSubgraph {
    let kept_persons: HashSet<usize> = sub
        .persons()
        .filter(|(_, k)| k.degree <= max_degree)
        .map(|(p, _)| p)
        .collect();
    let nodes = sub
        .nodes
        .iter()
        .filter(|n| match n.node {
            NodeId::Person(p) => kept_persons.contains(&p),
            NodeId::Family(f) => {
                let fam = graph.family(f);
                fam.child_fam
                    .iter()
                    .chain(fam.parent_fam.iter())
                    .any(|p| kept_persons.contains(p))
            }
        })
        .cloned()
        .collect();
    ScopedSubgraph { sp: sub.sp, depth: sub.depth, nodes, trace: sub.trace.clone() }
}

/// One sub-graph per person, in record-id order.
pub fn enumerate_subgraphs(
    graph: &FamilyTreeGraph,
    depth: u32,
    mode: TraversalMode,
) -> impl Iterator<Item = ScopedSubgraph> + '_ {
    (0..graph.persons().len()).map(move |sp| gen_bfs_from(graph, sp, depth, mode))
}
