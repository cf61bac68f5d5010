//! Dump the event-centred knowledge graph of a GEDCOM file as tab-separated triples,
//! then list the events resolved back for one person.
//!
//! cargo run --example cidoc_triples -- tests/fixtures/williams.ged @I137@

use gensquad::cidoc::build_cidoc_graph;
use gensquad::gedcom::parse_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [path, rest @ ..] = args.as_slice() else {
        eprintln!("usage: cidoc_triples <file.ged> [person id]");
        std::process::exit(1);
    };
    let kg = build_cidoc_graph(&parse_file(path)?);
    kg.write_triples(std::io::stdout().lock())?;
    if let Some(id) = rest.first() {
        println!();
        for e in kg.events_of(id) {
            let date = e.date.map(|d| d.long_phrase()).unwrap_or_default();
            println!("{id} {:?} {date} {}", e.kind, e.place.unwrap_or_default());
        }
    }
    println!("\n{} nodes, {} edges", kg.nodes().len(), kg.edges().len());
    Ok(())
}
