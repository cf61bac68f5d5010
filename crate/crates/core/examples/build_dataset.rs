//! Write a synthetic GEDCOM corpus and build all three dataset families from it.
//!
//! cargo run --release --example build_dataset -- /tmp/gen [persons] [tree size] [workers]

use std::time::Instant;

use gensquad::pipeline::{family_name, run_generate, PipelineConfig};
use gensquad::synthetic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(out) = args.first() else {
        eprintln!("usage: build_dataset <out dir> [persons] [tree size] [workers]");
        std::process::exit(1);
    };
    let num = |i: usize, default: usize| args.get(i).map_or(Ok(default), |s| s.parse());
    let (persons, tree_size, workers) = (num(1, 2000)?, num(2, 40)?, num(3, 0)?);

    let corpus_dir = std::path::Path::new(out).join("corpus");
    std::fs::create_dir_all(&corpus_dir)?;
    for (name, text) in synthetic::corpus(7, persons, tree_size) {
        std::fs::write(corpus_dir.join(name), text)?;
    }

    let config = PipelineConfig {
        input: vec![corpus_dir.display().to_string()],
        output: std::path::Path::new(out).join("datasets"),
        workers,
        ..Default::default()
    };
    let started = Instant::now();
    let manifest = run_generate(&config)?;
    println!("{} persons in {} files, {:.1}s", manifest.persons, manifest.files.len(), started.elapsed().as_secs_f64());
    for d in &manifest.depths {
        println!(
            "{:<12} paragraphs {:>6}  questions {:>8}  unanswerable {:>7}  train/test/eval {}/{}/{}",
            family_name(d.depth),
            d.paragraphs,
            d.questions,
            d.unanswerable,
            d.train,
            d.test,
            d.eval
        );
    }
    for (file, digest) in &manifest.digests {
        println!("{digest}  {file}");
    }
    Ok(())
}
