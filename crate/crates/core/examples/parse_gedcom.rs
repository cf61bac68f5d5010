//! Parse a GEDCOM file and print each individual with their events and links.
//!
//! cargo run --example parse_gedcom -- tests/fixtures/williams.ged

use gensquad::gedcom::parse_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: parse_gedcom <file.ged>");
        std::process::exit(1);
    };
    let doc = parse_file(&path)?;
    for p in doc.individuals.values() {
        println!("{} {} ({:?})", p.id, p.full_name().unwrap_or_else(|| "<unnamed>".into()), p.sex);
        for e in &p.events {
            let date = e.date.as_ref().map(|d| d.long_phrase()).unwrap_or_default();
            println!("  {:<10} {:<16} {}", e.kind.tag(), date, e.place.as_deref().unwrap_or(""));
            for n in &e.notes {
                println!("    note: {n}");
            }
        }
        for n in &p.notes {
            println!("  note: {n}");
        }
        println!("  FAMC {:?}  FAMS {:?}", p.famc, p.fams);
    }
    for w in &doc.warnings {
        eprintln!("{}", w.render(&path));
    }
    println!("{} individuals, {} families", doc.individuals.len(), doc.families.len());
    Ok(())
}
