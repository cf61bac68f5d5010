use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gensquad::eval::HarnessConfig;
use gensquad::pipeline::{self, PipelineConfig, PipelineError};
use gensquad::traversal::TraversalMode;

#[derive(Parser)]
#[command(name = "forge", version, about = "Build SQuAD 2.0 datasets from GEDCOM family trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate dataset families from a config file and/or flags.
    Generate(Box<GenerateArgs>),
    /// Print the context passage for one person.
    Context {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        person: String,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Keep siblings of the source person at depth 1.
        #[arg(long)]
        faithful: bool,
    },
    /// Score a predictions file (question id to answer) against a dataset.
    Score {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// Where to write the TSV report; defaults next to the predictions.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check every answer offset of a dataset.
    Verify {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Parse a GEDCOM file and list its warnings.
    Parse {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Every config key is also a flag of the same name.
#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    depths: Option<String>,
    #[arg(long = "global_seed")]
    global_seed: Option<String>,
    #[arg(long = "degree_strict")]
    degree_strict: Option<String>,
    #[arg(long = "unanswerable_ratio")]
    unanswerable_ratio: Option<String>,
    #[arg(long = "sample_n")]
    sample_n: Option<String>,
    #[arg(long = "split_ratios")]
    split_ratios: Option<String>,
    #[arg(long = "cutoff_year")]
    cutoff_year: Option<String>,
    #[arg(long)]
    templates: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long = "min_variants")]
    min_variants: Option<String>,
    #[arg(long = "max_variants")]
    max_variants: Option<String>,
    #[arg(long = "max_answerable")]
    max_answerable: Option<String>,
}

impl GenerateArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 14] {
        [
            ("input", &self.input),
            ("output", &self.output),
            ("depths", &self.depths),
            ("global_seed", &self.global_seed),
            ("degree_strict", &self.degree_strict),
            ("unanswerable_ratio", &self.unanswerable_ratio),
            ("sample_n", &self.sample_n),
            ("split_ratios", &self.split_ratios),
            ("cutoff_year", &self.cutoff_year),
            ("templates", &self.templates),
            ("workers", &self.workers),
            ("min_variants", &self.min_variants),
            ("max_variants", &self.max_variants),
            ("max_answerable", &self.max_answerable),
        ]
    }

    /// File, then FORGE_SEED, then flags.
    fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        c.apply_env()?;
        for (k, v) in self.overrides() {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<ExitCode, PipelineError> {
    match cli.command {
        Command::Generate(args) => {
            let manifest = pipeline::run_generate(&args.config()?)?;
            for d in &manifest.depths {
                println!(
                    "{}\tparagraphs {}\tquestions {}\ttrain {}\ttest {}\teval {}",
                    pipeline::family_name(d.depth),
                    d.paragraphs,
                    d.questions,
                    d.train,
                    d.test,
                    d.eval
                );
            }
        }
        Command::Context { tree, person, depth, seed, faithful } => {
            let mode = if faithful { TraversalMode::Faithful } else { TraversalMode::DegreeStrict };
            println!("{}", pipeline::run_context(&tree, &person, depth, seed, mode)?);
        }
        Command::Score { dataset, predictions, report } => {
            let r = pipeline::run_score(&dataset, &predictions, &HarnessConfig::default())?;
            let tsv = r.to_tsv();
            print!("{tsv}");
            let path = report.unwrap_or_else(|| predictions.with_extension("report.tsv"));
            std::fs::write(&path, tsv).map_err(|source| PipelineError::Io { path, source })?;
            if !r.unknown_ids.is_empty() {
                eprintln!("warning: {} predicted ids are not in the dataset", r.unknown_ids.len());
            }
        }
        Command::Verify { dataset } => {
            let r = pipeline::run_verify(&dataset)?;
            for f in &r.failures {
                println!("{}\t{}", f.id, f.reason);
            }
            println!("{} questions checked, {} failures", r.checked, r.failures.len());
            if !r.is_clean() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Parse { input } => {
            let (doc, warnings) = pipeline::run_parse(&input)?;
            let name = input.display().to_string();
            for w in &warnings {
                println!("{}", w.render(&name));
            }
            println!("{} individuals, {} families, {} warnings", doc.individuals.len(), doc.families.len(), warnings.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
