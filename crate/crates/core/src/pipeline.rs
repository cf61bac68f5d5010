//! End-to-end runs: GEDCOM files in, SQuAD 2.0 dataset families and a manifest out.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eval::{self, HarnessConfig, Predictions, ScoreReport};
use crate::gedcom::{self, filter_living, Diagnostic, GedcomDocument, GedcomError};
use crate::qa::{self, generate_qa, Paragraph, QaConfig, SquadDataset, VerificationReport};
use crate::rng::{derive_seed, sha256_hex};
use crate::traversal::{gen_bfs_from, TraversalMode};
use crate::tree::Tree;
use crate::verbalizer::{TemplateLibrary, VerbalizeError, Verbalizer, VerbalizerConfig};

/// Environment variable that overrides `global_seed`.
pub const SEED_ENV: &str = "FORGE_SEED";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GedcomError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("no person {0} in the tree")]
    UnknownPerson(String),
    #[error("{} answers do not match their context: {}", .0.len(), .0.join(", "))]
    VerificationFailed(Vec<String>),
    #[error(transparent)]
    Verbalize(#[from] VerbalizeError),
}

impl PipelineError {
    /// 1 usage, 2 parse or verification failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Io { .. } => 3,
            PipelineError::Parse { source: GedcomError::Io(_), .. } => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Files, directories (every `.ged` inside) or glob patterns.
    pub input: Vec<String>,
    pub output: PathBuf,
    pub depths: Vec<u32>,
    pub global_seed: u64,
    pub degree_strict: bool,
    pub unanswerable_ratio: f64,
    pub sample_n: Option<usize>,
    pub split_ratios: (f64, f64, f64),
    /// Drop possibly living people born after this year.
    pub cutoff_year: Option<i32>,
    pub templates: Option<PathBuf>,
    pub workers: usize,
    pub min_variants: usize,
    pub max_variants: usize,
    pub max_answerable: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: Vec::new(),
            output: PathBuf::from("out"),
            depths: vec![0, 1, 2],
            global_seed: 0,
            degree_strict: true,
            unanswerable_ratio: QaConfig::default().unanswerable_ratio,
            sample_n: None,
            split_ratios: (0.6, 0.2, 0.2),
            cutoff_year: None,
            templates: None,
            workers: 0,
            min_variants: 2,
            max_variants: 3,
            max_answerable: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, PipelineError> {
    v.trim().parse().map_err(|_| PipelineError::Config(format!("bad value for {key}: {v:?}")))
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, PipelineError> {
    match v.trim() {
        "" | "none" => Ok(None),
        s => parse_value(key, s).map(Some),
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, PipelineError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_value(key, s)).collect()
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 14] = [
        "input",
        "output",
        "depths",
        "global_seed",
        "degree_strict",
        "unanswerable_ratio",
        "sample_n",
        "split_ratios",
        "cutoff_year",
        "templates",
        "workers",
        "min_variants",
        "max_variants",
        "max_answerable",
    ];

    /// Sets one key from its text form, as written in a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let v = value.trim();
        match key {
            "input" => self.input = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "output" => self.output = PathBuf::from(v),
            "depths" => self.depths = parse_list(key, v)?,
            "global_seed" => self.global_seed = parse_value(key, v)?,
            "degree_strict" => self.degree_strict = parse_value(key, v)?,
            "unanswerable_ratio" => self.unanswerable_ratio = parse_value(key, v)?,
            "sample_n" => self.sample_n = parse_opt(key, v)?,
            "split_ratios" => match parse_list::<f64>(key, v)?.as_slice() {
                &[a, b, c] => self.split_ratios = (a, b, c),
                _ => return Err(PipelineError::Config(format!("split_ratios needs three values, got {v:?}"))),
            },
            "cutoff_year" => self.cutoff_year = parse_opt(key, v)?,
            "templates" => self.templates = (!v.is_empty()).then(|| PathBuf::from(v)),
            "workers" => self.workers = parse_value(key, v)?,
            "min_variants" => self.min_variants = parse_value(key, v)?,
            "max_variants" => self.max_variants = parse_value(key, v)?,
            "max_answerable" => self.max_answerable = parse_opt(key, v)?,
            _ => return Err(PipelineError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<PipelineConfig, PipelineError> {
        let mut c = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", i + 1)))?;
            c.set(k.trim(), v)?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        Self::parse(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    /// Applies `FORGE_SEED` when set.
    pub fn apply_env(&mut self) -> Result<(), PipelineError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.global_seed = parse_value(SEED_ENV, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let (a, b, c) = self.split_ratios;
        if a < 0.0 || b < 0.0 || c < 0.0 || ((a + b + c) - 1.0).abs() > 1e-9 {
            return Err(PipelineError::Config(format!("split ratios must sum to 1, got {a}/{b}/{c}")));
        }
        if !(0.0..1.0).contains(&self.unanswerable_ratio) {
            return Err(PipelineError::Config("unanswerable_ratio must be in [0, 1)".into()));
        }
        if self.min_variants == 0 || self.min_variants > self.max_variants {
            return Err(PipelineError::Config("need 1 <= min_variants <= max_variants".into()));
        }
        if self.input.is_empty() {
            return Err(PipelineError::Config("no input given".into()));
        }
        Ok(())
    }

    pub fn mode(&self) -> TraversalMode {
        if self.degree_strict {
            TraversalMode::DegreeStrict
        } else {
            TraversalMode::Faithful
        }
    }
}

/// Expands files, directories and glob patterns into a sorted, de-duplicated file list.
pub fn resolve_inputs(inputs: &[String]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for raw in inputs {
        let p = Path::new(raw);
        if p.is_dir() {
            for e in fs::read_dir(p).map_err(io_err(p))? {
                let path = e.map_err(io_err(p))?.path();
                if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("ged")) {
                    out.push(path);
                }
            }
        } else if raw.contains(['*', '?', '[']) {
            let paths = glob::glob(raw).map_err(|e| PipelineError::Config(format!("bad pattern {raw:?}: {e}")))?;
            out.extend(paths.filter_map(Result::ok));
        } else if p.exists() {
            out.push(p.to_path_buf());
        } else {
            return Err(PipelineError::Io {
                path: p.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Tree ids are file stems, suffixed when two files share a stem.
fn tree_ids(paths: &[PathBuf]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    paths
        .iter()
        .map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "tree".into());
            let n = seen.entry(stem.clone()).or_default();
            *n += 1;
            if *n == 1 {
                stem
            } else {
                format!("{stem}-{n}")
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileOutcome {
    pub path: String,
    pub tree_id: String,
    pub persons: usize,
    pub families: usize,
    pub warnings: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DepthCounts {
    pub depth: u32,
    pub subgraphs: usize,
    pub paragraphs: usize,
    pub questions: usize,
    pub unanswerable: usize,
    /// Keyed by type code.
    pub per_type: BTreeMap<String, usize>,
    pub train: usize,
    pub test: usize,
    pub eval: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: PipelineConfig,
    pub files: Vec<FileOutcome>,
    pub persons: usize,
    pub families: usize,
    pub depths: Vec<DepthCounts>,
    /// File name to sha256 of its bytes.
    pub digests: BTreeMap<String, String>,
}

/// Name of the dataset family for one depth, e.g. `gen-squad-1`.
pub fn family_name(depth: u32) -> String {
    format!("gen-squad-{depth}")
}

fn load_trees(config: &PipelineConfig) -> Result<(Vec<Tree>, Vec<FileOutcome>), PipelineError> {
    let paths = resolve_inputs(&config.input)?;
    let ids = tree_ids(&paths);
    let parsed: Vec<Result<GedcomDocument, GedcomError>> = paths.par_iter().map(gedcom::parse_file).collect();
    let mut trees = Vec::new();
    let mut files = Vec::new();
    for ((path, id), res) in paths.iter().zip(ids).zip(parsed) {
        let mut outcome = FileOutcome {
            path: path.display().to_string(),
            tree_id: id.clone(),
            persons: 0,
            families: 0,
            warnings: 0,
            error: None,
        };
        match res {
            Ok(doc) => {
                let doc = match config.cutoff_year {
                    Some(y) => filter_living(&doc, y),
                    None => doc,
                };
                outcome.persons = doc.individuals.len();
                outcome.families = doc.families.len();
                outcome.warnings = doc.warnings.len();
                trees.push(Tree::new(id, doc));
            }
            Err(e) => {
                warn!("skipping {}: {e}", path.display());
                outcome.error = Some(e.to_string());
            }
        }
        files.push(outcome);
    }
    if trees.is_empty() {
        if let Some(f) = files.iter().find(|f| f.error.is_some()) {
            return Err(PipelineError::Config(format!("no input could be parsed; first error in {}", f.path)));
        }
    }
    Ok((trees, files))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], digests: &mut BTreeMap<String, String>) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    digests.insert(name.to_string(), sha256_hex(bytes));
    Ok(())
}

/// Hashes everything written through it.
struct DigestWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for DigestWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

fn write_dataset<T: Serialize>(
    dir: &Path,
    name: &str,
    ds: &T,
    digests: &mut BTreeMap<String, String>,
) -> Result<(), PipelineError> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut w = DigestWriter { inner: BufWriter::with_capacity(1 << 20, file), hasher: Sha256::new() };
    qa::write_json(ds, &mut w).and_then(|_| w.flush()).map_err(io_err(&path))?;
    digests.insert(name.to_string(), hex::encode(w.hasher.finalize()));
    Ok(())
}

/// Paragraphs for every person of every tree at one depth, in (tree, person) order.
pub fn build_paragraphs(
    trees: &[Tree],
    depth: u32,
    config: &PipelineConfig,
    verbalizer: &Verbalizer<'_>,
) -> Result<Vec<Paragraph>, PipelineError> {
    let units: Vec<(usize, usize)> =
        trees.iter().enumerate().flat_map(|(t, tree)| (0..tree.graph.persons().len()).map(move |p| (t, p))).collect();
    let qa_config = QaConfig { unanswerable_ratio: config.unanswerable_ratio, max_answerable: config.max_answerable };
    let depth_key = depth.to_string();
    let built: Result<Vec<Option<Paragraph>>, VerbalizeError> = units
        .par_iter()
        .map(|&(t, sp)| {
            let tree = &trees[t];
            let sp_id = tree.graph.person(sp).id.as_str();
            let sub = gen_bfs_from(&tree.graph, sp, depth, config.mode());
            let keys = [tree.id.as_str(), sp_id, depth_key.as_str()];
            let passage = match verbalizer.render(tree, &sub, derive_seed(config.global_seed, &keys)) {
                Ok(p) => p,
                Err(VerbalizeError::EmptyPassage) => return Ok(None),
                Err(e) => return Err(e),
            };
            let qa_seed = derive_seed(config.global_seed, &[tree.id.as_str(), sp_id, depth_key.as_str(), "qa"]);
            let qas = generate_qa(tree, &sub, &passage, &qa_config, qa_seed);
            Ok(Some(Paragraph {
                title: format!("{}:{}", tree.id, sp_id),
                sp: sp_id.to_string(),
                depth,
                context: passage.text,
                qas,
            }))
        })
        .collect();
    Ok(built?.into_iter().flatten().collect())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))
}

/// Runs the whole generation and writes, per depth, the full dataset, its
/// train/test/eval split, plus `stats.tsv` and `manifest.json`.
pub fn run_generate(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    config.validate()?;
    pool(config.workers)?.install(|| generate_in_pool(config))
}

fn generate_in_pool(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let library = match &config.templates {
        Some(p) => TemplateLibrary::load(p)?,
        None => TemplateLibrary::builtin().clone(),
    };
    let verbalizer = Verbalizer::new(
        &library,
        VerbalizerConfig { min_variants: config.min_variants, max_variants: config.max_variants },
    );
    let (trees, files) = load_trees(config)?;
    let out = &config.output;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut digests = BTreeMap::new();
    let mut depths = Vec::new();
    let mut stats = String::from("depth\ttype\tcount\n");

    for &d in &config.depths {
        let paragraphs = build_paragraphs(&trees, d, config, &verbalizer)?;
        let subgraphs: usize = trees.iter().map(|t| t.graph.persons().len()).sum();
        let mut ds = qa::assemble(paragraphs).map_err(|e| PipelineError::Config(e.to_string()))?;
        let report = qa::verify_answers(&ds);
        if !report.is_clean() {
            return Err(PipelineError::VerificationFailed(report.failures.into_iter().map(|f| f.id).collect()));
        }
        let name = family_name(d);
        let dkey = d.to_string();
        if let Some(n) = config.sample_n {
            ds = qa::sample_questions(&ds, n, derive_seed(config.global_seed, &["sample", &dkey]))
                .map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        let parts = qa::split_indices(&ds, config.split_ratios, derive_seed(config.global_seed, &["split", &dkey]))
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        write_dataset(out, &format!("{name}.json"), &ds, &mut digests)?;
        let [train, test, eval] = parts.map(|idx| ds.view(&idx));
        for (part, set) in [("train", &train), ("test", &test), ("eval", &eval)] {
            write_dataset(out, &format!("{name}-{part}.json"), set, &mut digests)?;
        }
        let questions = |v: &qa::DatasetView| v.data.iter().flat_map(|a| &a.paragraphs).map(|p| p.qas.len()).sum();

        let mut counts = DepthCounts {
            depth: d,
            subgraphs,
            paragraphs: ds.paragraph_count(),
            questions: ds.question_count(),
            unanswerable: ds.questions().filter(|(_, q)| q.is_impossible).count(),
            train: questions(&train),
            test: questions(&test),
            eval: questions(&eval),
            ..Default::default()
        };
        for (t, n) in ds.type_counts() {
            counts.per_type.insert(t.code().to_string(), n);
            stats.push_str(&format!("{d}\t{}\t{n}\n", t.code()));
        }
        info!("{name}: {} paragraphs, {} questions", counts.paragraphs, counts.questions);
        depths.push(counts);
    }
    write_file(out, "stats.tsv", stats.as_bytes(), &mut digests)?;

    let manifest = RunManifest {
        config: config.clone(),
        persons: files.iter().map(|f| f.persons).sum(),
        families: files.iter().map(|f| f.families).sum(),
        files,
        depths,
        digests,
    };
    let path = out.join("manifest.json");
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(manifest)
}

/// The passage for one person, rendered exactly as in a generated dataset with the same seed.
pub fn run_context(tree_path: &Path, sp: &str, depth: u32, global_seed: u64, mode: TraversalMode) -> Result<String, PipelineError> {
    let doc = gedcom::parse_file(tree_path).map_err(|source| PipelineError::Parse { path: tree_path.into(), source })?;
    let id = tree_ids(&[tree_path.to_path_buf()]).remove(0);
    let tree = Tree::new(id, doc);
    let ix = tree.graph.person_index(sp).ok_or_else(|| PipelineError::UnknownPerson(sp.to_string()))?;
    let sub = gen_bfs_from(&tree.graph, ix, depth, mode);
    let seed = derive_seed(global_seed, &[tree.id.as_str(), sp, depth.to_string().as_str()]);
    Ok(Verbalizer::default().render(&tree, &sub, seed)?.text)
}

pub fn read_dataset(path: &Path) -> Result<SquadDataset, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    qa::deserialize(&bytes).map_err(|source| PipelineError::Json { path: path.into(), source })
}

pub fn read_predictions(path: &Path) -> Result<Predictions, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    eval::load_predictions(&bytes).map_err(|source| PipelineError::Json { path: path.into(), source })
}

pub fn run_score(dataset: &Path, predictions: &Path, config: &HarnessConfig) -> Result<ScoreReport, PipelineError> {
    let ds = read_dataset(dataset)?;
    let preds = read_predictions(predictions)?;
    let report = eval::score(&ds, &preds, config);
    if !report.unknown_ids.is_empty() {
        warn!("{} predictions have ids not in the dataset", report.unknown_ids.len());
    }
    Ok(report)
}

pub fn run_verify(dataset: &Path) -> Result<VerificationReport, PipelineError> {
    Ok(qa::verify_answers(&read_dataset(dataset)?))
}

/// Parses one file and returns its warnings.
pub fn run_parse(input: &Path) -> Result<(GedcomDocument, Vec<Diagnostic>), PipelineError> {
    let doc = gedcom::parse_file(input).map_err(|source| PipelineError::Parse { path: input.into(), source })?;
    let warnings = doc.warnings.clone();
    Ok((doc, warnings))
}
