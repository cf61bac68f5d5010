//! Relation term and consanguinity degree of every person, seen from one source person.
//!
//! cargo run --example kinship -- tests/fixtures/family.ged @SP@

use gensquad::gedcom::parse_file;
use gensquad::graph::build_family_tree_graph;
use gensquad::kinship::KinshipMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [path, sp, ..] = args.as_slice() else {
        eprintln!("usage: kinship <file.ged> <person id>");
        std::process::exit(1);
    };
    let graph = build_family_tree_graph(&parse_file(path)?);
    let source = graph.require_person(sp)?;
    let map = KinshipMap::compute(&graph, source, None);
    for p in 0..graph.persons().len() {
        let k = map.kinship(&graph, p);
        let degree = if k.is_reachable() { k.degree.to_string() } else { "-".into() };
        println!("{:<8} {:<16} {}", graph.person(p).id, k.term, degree);
    }
    Ok(())
}
