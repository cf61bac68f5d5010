//! Score a predictions file against a dataset and print the per-type table.
//! Without a predictions file, scores a mix of gold answers, partial answers and
//! abstentions so the report is non-trivial.
//!
//! cargo run --example score_predictions -- out/gen-squad-1-test.json [predictions.json]

use gensquad::eval::{gold_predictions, score, HarnessConfig};
use gensquad::pipeline::{read_dataset, read_predictions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [dataset, rest @ ..] = args.as_slice() else {
        eprintln!("usage: score_predictions <dataset.json> [predictions.json]");
        std::process::exit(1);
    };
    let ds = read_dataset(dataset.as_ref())?;
    let preds = match rest.first() {
        Some(p) => read_predictions(p.as_ref())?,
        None => {
            let mut preds = gold_predictions(&ds);
            let mut ids: Vec<String> = preds.keys().cloned().collect();
            ids.sort();
            for (i, id) in ids.iter().enumerate() {
                match i % 4 {
                    1 => *preds.get_mut(id).unwrap() = format!("in {}", preds[id]),
                    2 => *preds.get_mut(id).unwrap() = String::new(),
                    _ => {}
                }
            }
            preds
        }
    };
    let report = score(&ds, &preds, &HarnessConfig::default());
    print!("{}", report.to_tsv());
    if !report.unknown_ids.is_empty() || !report.missing_ids.is_empty() {
        eprintln!("{} unknown ids, {} missing ids", report.unknown_ids.len(), report.missing_ids.len());
    }
    Ok(())
}
