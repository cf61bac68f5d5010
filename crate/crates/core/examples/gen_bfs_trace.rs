//! Show which persons and families a traversal keeps around a source person, per depth
//! and mode, along with the dequeue order.
//!
//! cargo run --example gen_bfs_trace -- tests/fixtures/family.ged @SP@ 2

use gensquad::gedcom::parse_file;
use gensquad::graph::build_family_tree_graph;
use gensquad::traversal::{gen_bfs, TraversalMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [path, sp, rest @ ..] = args.as_slice() else {
        eprintln!("usage: gen_bfs_trace <file.ged> <person id> [max depth]");
        std::process::exit(1);
    };
    let max: u32 = rest.first().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let graph = build_family_tree_graph(&parse_file(path)?);
    for depth in 0..=max {
        for mode in [TraversalMode::Faithful, TraversalMode::DegreeStrict] {
            let sub = gen_bfs(&graph, sp, depth, mode)?;
            println!("depth {depth} {mode:?}");
            println!("  nodes: {}", sub.node_ids(&graph).join(" "));
            println!("  trace: {}", sub.format_trace(&graph));
        }
    }
    Ok(())
}
