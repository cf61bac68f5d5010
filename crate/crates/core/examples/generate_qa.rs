//! Generate questions for one person's passage and print them with their answers.
//!
//! cargo run --example generate_qa -- tests/fixtures/family.ged @SP@ 1 [seed]

use gensquad::gedcom::parse_file;
use gensquad::qa::{generate_qa, QaConfig};
use gensquad::traversal::{gen_bfs, TraversalMode};
use gensquad::tree::Tree;
use gensquad::verbalizer::{render_passage, VerbalizerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [path, sp, depth, rest @ ..] = args.as_slice() else {
        eprintln!("usage: generate_qa <file.ged> <person id> <depth> [seed]");
        std::process::exit(1);
    };
    let seed = rest.first().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let tree = Tree::new("tree", parse_file(path)?);
    let sub = gen_bfs(&tree.graph, sp, depth.parse()?, TraversalMode::DegreeStrict)?;
    let passage = render_passage(&tree, &sub, VerbalizerConfig::default(), seed)?;
    let qas = generate_qa(&tree, &sub, &passage, &QaConfig::default(), seed);
    for q in &qas {
        let shown = if q.is_impossible {
            format!("<no answer> (plausible: {:?})", q.plausible_answers.iter().map(|a| &a.text).collect::<Vec<_>>())
        } else {
            q.answers.iter().map(|a| format!("{:?}@{}", a.text, a.answer_start)).collect::<Vec<_>>().join(", ")
        };
        println!("{:<28} {:<50} {}", q.id, q.question, shown);
    }
    let open = qas.iter().filter(|q| q.is_impossible).count();
    println!("\n{} questions, {} unanswerable", qas.len(), open);
    Ok(())
}
