//! Render the context passage for one person of a GEDCOM file.
//!
//! cargo run --example verbalize -- tests/fixtures/family.ged @SP@ 1 [seed]

use gensquad::gedcom::parse_file;
use gensquad::traversal::{gen_bfs, TraversalMode};
use gensquad::tree::Tree;
use gensquad::verbalizer::{render_passage, VerbalizerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [path, sp, depth, rest @ ..] = args.as_slice() else {
        eprintln!("usage: verbalize <file.ged> <person id> <depth> [seed]");
        std::process::exit(1);
    };
    let seed = rest.first().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let tree = Tree::new("tree", parse_file(path)?);
    let sub = gen_bfs(&tree.graph, sp, depth.parse()?, TraversalMode::DegreeStrict)?;
    let passage = render_passage(&tree, &sub, VerbalizerConfig::default(), seed)?;
    for s in &passage.sentences {
        let fact = &passage.facts[s.fact];
        println!("{:<10} {:<18} {}", format!("{:?}", s.style), fact.predicate.to_string(), &passage.text[byte(&passage.text, s.char_start)..byte(&passage.text, s.char_end)]);
    }
    println!("\n{} facts, {} sentences, {} characters", passage.facts.len(), passage.sentences.len(), passage.text.chars().count());
    Ok(())
}

fn byte(s: &str, ch: usize) -> usize {
    s.char_indices().nth(ch).map_or(s.len(), |(b, _)| b)
}
