//! Whole pipeline on one file: generate the dataset families, verify them, print a few
//! questions and score the gold answers.
//!
//! cargo run --example end_to_end -- tests/fixtures/family.ged /tmp/family-out

use std::path::Path;

use gensquad::eval::{gold_predictions, score, HarnessConfig};
use gensquad::pipeline::{family_name, read_dataset, run_generate, PipelineConfig};
use gensquad::qa::verify_answers;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [input, out, ..] = args.as_slice() else {
        eprintln!("usage: end_to_end <file.ged or dir> <out dir>");
        std::process::exit(1);
    };
    let config = PipelineConfig { input: vec![input.clone()], output: out.into(), global_seed: 1, ..Default::default() };
    let manifest = run_generate(&config)?;
    for d in &manifest.depths {
        let ds = read_dataset(&Path::new(out).join(format!("{}.json", family_name(d.depth))))?;
        let report = verify_answers(&ds);
        let scored = score(&ds, &gold_predictions(&ds), &HarnessConfig::default());
        println!(
            "{}: {} questions, {} offsets checked, {} bad, gold F1 {:.1}",
            family_name(d.depth),
            d.questions,
            report.checked,
            report.failures.len(),
            scored.overall.f1
        );
        for (_, q) in ds.questions().step_by((d.questions / 5).max(1)).take(5) {
            let answer = q.answers.first().map_or("<no answer>", |a| a.text.as_str());
            println!("  {:<50} {answer}", q.question);
        }
    }
    Ok(())
}
