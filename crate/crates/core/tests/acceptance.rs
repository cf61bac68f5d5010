//! One line per acceptance criterion. Runs as a plain binary so every criterion
//! reports even when an earlier one fails; exits nonzero if any failed.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gensquad::eval::{score, token_f1, window_split, HarnessConfig, Predictions};
use gensquad::gedcom::{EventKind, GedcomDocument, IndividualRecord, Sex};
use gensquad::pipeline::{family_name, run_generate, PipelineConfig, RunManifest};
use gensquad::qa::{
    deserialize, serialize, split_indices, verify_answers, Answer, Article, Qa, QuestionType, SquadDataset,
    SquadParagraph,
};
use gensquad::rng::{sha256_hex, SplitMix64};
use gensquad::traversal::{gen_bfs, TraversalMode};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Check = (u32, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let checks: [Check; 12] = [
        (1, "GEDCOM fidelity", gedcom_fidelity),
        (2, "depth-0 law", depth_zero),
        (3, "depth-1 membership", depth_one),
        (4, "degree oracle", degree_oracle),
        (5, "offset soundness", offsets),
        (6, "SQuAD schema", schema),
        (7, "split", split_check),
        (8, "scorer", scorer),
        (9, "windowing", windowing),
        (10, "determinism under parallelism", determinism),
        (11, "throughput", throughput),
        (12, "question-type totality", totality),
    ];
    let mut failed = 0;
    for (n, name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {n:>2} ({name}): PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} ({name}): FAIL  {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// Shared corpora. The small one feeds 5, 6, 7 and 12; the large one 10 and 11.

fn write_corpus(dir: &Path, seed: u64, persons: usize, tree_size: usize) {
    for (name, text) in gensquad::synthetic::corpus(seed, persons, tree_size) {
        fs::write(dir.join(name), text).unwrap();
    }
}

fn config(input: &Path, output: &Path, depths: Vec<u32>, workers: usize) -> PipelineConfig {
    PipelineConfig {
        input: vec![input.display().to_string()],
        output: output.to_path_buf(),
        depths,
        global_seed: 7,
        workers,
        ..Default::default()
    }
}

struct SmallRun {
    _dir: tempfile::TempDir,
    out: std::path::PathBuf,
    manifest: RunManifest,
}

fn small_run() -> &'static SmallRun {
    static RUN: std::sync::OnceLock<SmallRun> = std::sync::OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let out = dir.path().join("out");
        fs::create_dir_all(&input).unwrap();
        write_corpus(&input, 11, 600, 30);
        let manifest = run_generate(&config(&input, &out, vec![0, 1, 2], 0)).unwrap();
        SmallRun { _dir: dir, out, manifest }
    })
}

fn read_ds(dir: &Path, name: &str) -> SquadDataset {
    deserialize(&fs::read(dir.join(name)).unwrap()).unwrap()
}

// 1

fn event(p: &IndividualRecord, kind: EventKind) -> Result<(Option<&str>, Option<&str>), String> {
    let e = p.first_event(&kind).ok_or_else(|| format!("{} has no {kind:?}", p.id))?;
    Ok((e.date.as_ref().map(|d| d.raw.as_str()), e.place.as_deref()))
}

fn check_person(
    doc: &GedcomDocument,
    id: &str,
    name: (&str, &str),
    sex: Sex,
    events: &[(EventKind, Option<&str>, Option<&str>)],
    fams: &str,
    famc: &str,
) -> Result<(), String> {
    let p = doc.individuals.get(id).ok_or_else(|| format!("{id} missing"))?;
    ensure!(
        p.name_given.as_deref() == Some(name.0) && p.name_surname.as_deref() == Some(name.1),
        "{id} name {:?} {:?}",
        p.name_given,
        p.name_surname
    );
    ensure!(p.sex == sex, "{id} sex {:?}", p.sex);
    for (kind, date, place) in events {
        let got = event(p, kind.clone())?;
        ensure!(got == (*date, *place), "{id} {kind:?}: {got:?}");
    }
    ensure!(p.fams == [fams] && p.famc == [famc], "{id} links {:?} {:?}", p.fams, p.famc);
    Ok(())
}

fn gedcom_fidelity() -> Outcome {
    let path = common::fixture("williams.ged");
    let doc = gensquad::gedcom::parse_file(&path).map_err(|e| e.to_string())?;
    use EventKind::*;
    check_person(
        &doc,
        "@I137@",
        ("Emily", "Williams"),
        Sex::Female,
        &[
            (Birth, Some("28 MAY 1816"), Some("New York, USA")),
            (Death, Some("7 FEB 1899"), Some("Uinta, Wyoming, USA")),
            (Burial, Some("10 FEB 1899"), Some("Uinta, Wyoming, USA")),
            (Baptism, Some("1 JUN 1832"), None),
            (Endowment, Some("30 DEC 1845"), None),
            (SealingChild, Some("18 NOV 1894"), None),
        ],
        "@F73@",
        "@F79@",
    )?;
    check_person(
        &doc,
        "@I162@",
        ("John", "Williams"),
        Sex::Male,
        &[
            (Birth, Some("16 MAY 1826"), Some("Indiana, USA")),
            (Death, Some("25 SEP 1912"), Some("Uinta, Wyoming, USA")),
            (Burial, Some("28 SEP 1912"), Some("Uinta, Wyoming")),
            (Baptism, Some("9 AUG 1877"), None),
            (Endowment, Some("30 DEC 1845"), None),
        ],
        "@F73@",
        "@F1598@",
    )?;
    let note = "Baptism date appears to be 3 days later by the records of the city...";
    ensure!(doc.individuals["@I162@"].notes == [note], "note {:?}", doc.individuals["@I162@"].notes);
    let temple = doc.individuals["@I137@"].first_event(&Endowment).unwrap().attributes.clone();
    ensure!(temple == [("TEMP".to_string(), "NAUVO".to_string())], "endowment attributes {temple:?}");

    // Slowest of 20 warm parses, file read included.
    let _ = gensquad::gedcom::parse_file(&path);
    let worst = (0..20)
        .map(|_| {
            let t = Instant::now();
            let _ = gensquad::gedcom::parse_file(&path).unwrap();
            t.elapsed()
        })
        .max()
        .unwrap();
    ensure!(worst < Duration::from_millis(10), "parse took {worst:?}");
    Ok(format!("all fields exact, slowest parse {worst:?}"))
}

// 2, 3

fn depth_zero() -> Outcome {
    let (_, g) = common::family();
    for mode in [TraversalMode::Faithful, TraversalMode::DegreeStrict] {
        let sub = gen_bfs(&g, "@SP@", 0, mode).map_err(|e| e.to_string())?;
        let got = common::sorted(sub.person_ids(&g));
        ensure!(got == ["@P10@", "@SP@"], "{mode:?}: {got:?}");
    }
    Ok("persons = {SP, P10} in both modes".into())
}

fn depth_one() -> Outcome {
    let (_, g) = common::family();
    let faithful = gen_bfs(&g, "@SP@", 1, TraversalMode::Faithful).map_err(|e| e.to_string())?;
    let strict = gen_bfs(&g, "@SP@", 1, TraversalMode::DegreeStrict).map_err(|e| e.to_string())?;
    for (mode, sub) in [("faithful", &faithful), ("strict", &strict)] {
        let ids: BTreeSet<&str> = sub.node_ids(&g).into_iter().collect();
        for id in ["@P11@", "@P14@"] {
            ensure!(ids.contains(id), "{mode}: {id} missing");
        }
        for id in ["@F5@", "@F6@", "@P15@", "@P16@", "@P17@"] {
            ensure!(!ids.contains(id), "{mode}: {id} included");
        }
        let trace: BTreeSet<&str> = sub.trace_ids(&g).into_iter().collect();
        for id in ["@SP@", "@F1@", "@F4@", "@P1@", "@P2@", "@P10@", "@P12@", "@P13@"] {
            ensure!(trace.contains(id), "{mode}: {id} not in the trace");
        }
    }
    let strict_ids = strict.node_ids(&g);
    ensure!(!strict_ids.contains(&"@P7@") && !strict_ids.contains(&"@P8@"), "strict keeps siblings");
    Ok(format!("{} nodes faithful, {} strict", faithful.nodes.len(), strict.nodes.len()))
}

// 4

fn degree_oracle() -> Outcome {
    let sizes: Vec<usize> = (0..200u64).map(|s| 1 + (s as usize * 7) % 50).collect();
    let bad: Vec<String> = sizes.iter().enumerate().flat_map(|(s, &n)| common::kinship_mismatches(s as u64, n)).collect();
    let pairs: usize = sizes.iter().map(|n| n * n).sum();
    ensure!(bad.is_empty(), "{} mismatches, first {:?}", bad.len(), bad[0]);
    Ok(format!("200 trees, {pairs} pairs, 0 mismatches"))
}

// 5

fn offsets() -> Outcome {
    let run = small_run();
    let mut items = 0;
    let mut answers = 0;
    for d in &run.manifest.depths {
        let ds = read_ds(&run.out, &format!("{}.json", family_name(d.depth)));
        let report = verify_answers(&ds);
        ensure!(report.is_clean(), "depth {}: {} failures, first {:?}", d.depth, report.failures.len(), report.failures[0]);
        // Independent check by character count.
        for (p, q) in ds.questions() {
            items += 1;
            for a in q.answers.iter().chain(&q.plausible_answers) {
                answers += 1;
                let got: String = p.context.chars().skip(a.answer_start).take(a.text.chars().count()).collect();
                ensure!(got == a.text, "{}: {:?} at {} reads {:?}", q.id, a.text, a.answer_start, got);
            }
        }
    }
    ensure!(items >= 10_000, "only {items} items");
    Ok(format!("{items} items, {answers} spans, all exact"))
}

// 6

fn keys(v: &Value) -> BTreeSet<&str> {
    v.as_object().map(|o| o.keys().map(String::as_str).collect()).unwrap_or_default()
}

fn check_span(a: &Value) -> Result<(), String> {
    ensure!(keys(a) == BTreeSet::from(["text", "answer_start"]), "answer keys {:?}", keys(a));
    ensure!(a["text"].is_string() && a["answer_start"].is_u64(), "answer value types {a}");
    Ok(())
}

fn check_schema(root: &Value, seen: &mut BTreeSet<String>) -> Result<(), String> {
    ensure!(keys(root) == BTreeSet::from(["version", "data"]), "top keys {:?}", keys(root));
    ensure!(root["version"] == "v2.0", "version {}", root["version"]);
    for article in root["data"].as_array().ok_or("data is not an array")? {
        ensure!(keys(article) == BTreeSet::from(["title", "paragraphs"]), "article keys {:?}", keys(article));
        ensure!(article["title"].is_string(), "title type");
        for p in article["paragraphs"].as_array().ok_or("paragraphs is not an array")? {
            ensure!(keys(p) == BTreeSet::from(["qas", "context"]), "paragraph keys {:?}", keys(p));
            ensure!(p["context"].is_string(), "context type");
            for q in p["qas"].as_array().ok_or("qas is not an array")? {
                let k = keys(q);
                let base = BTreeSet::from(["question", "id", "answers", "is_impossible"]);
                ensure!(k == base || k == &base | &BTreeSet::from(["plausible_answers"]), "qa keys {k:?}");
                ensure!(q["question"].is_string() && q["id"].is_string() && q["is_impossible"].is_boolean(), "qa types");
                for a in q["answers"].as_array().ok_or("answers is not an array")? {
                    check_span(a)?;
                }
                if let Some(pa) = q.get("plausible_answers") {
                    for a in pa.as_array().ok_or("plausible_answers is not an array")? {
                        check_span(a)?;
                    }
                }
                seen.extend(k.into_iter().map(String::from));
            }
        }
    }
    Ok(())
}

fn random_text(rng: &mut SplitMix64, max: usize) -> String {
    const ALPHABET: &[char] = &['a', 'Z', ' ', '"', '\\', '\n', '\t', 'ł', 'ü', '東', '😀', '/', '\u{7f}', '\u{0}'];
    let n = rng.random_range(0..=max);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn random_dataset(seed: u64) -> SquadDataset {
    let mut rng = SplitMix64::new(seed);
    let answer = |rng: &mut SplitMix64| Answer { text: random_text(rng, 8), answer_start: rng.random_range(0..10_000) };
    let data = (0..rng.random_range(0..4))
        .map(|_| Article {
            title: random_text(&mut rng, 10),
            paragraphs: (0..rng.random_range(0..3))
                .map(|_| SquadParagraph {
                    qas: (0..rng.random_range(0..4))
                        .map(|_| Qa {
                            plausible_answers: (0..rng.random_range(0..2)).map(|_| answer(&mut rng)).collect(),
                            question: random_text(&mut rng, 20),
                            id: random_text(&mut rng, 12),
                            answers: (0..rng.random_range(0..3)).map(|_| answer(&mut rng)).collect(),
                            is_impossible: rng.random_bool(0.5),
                        })
                        .collect(),
                    context: random_text(&mut rng, 40),
                })
                .collect(),
        })
        .collect();
    SquadDataset { version: "v2.0".into(), data }
}

fn schema() -> Outcome {
    let run = small_run();
    let mut seen = BTreeSet::new();
    for d in &run.manifest.depths {
        for suffix in ["", "-train", "-test", "-eval"] {
            let name = format!("{}{suffix}.json", family_name(d.depth));
            let root: Value = serde_json::from_slice(&fs::read(run.out.join(&name)).unwrap()).map_err(|e| e.to_string())?;
            check_schema(&root, &mut seen).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    ensure!(seen.contains("plausible_answers"), "no unanswerable item carries plausible answers");
    for seed in 0..1000 {
        let ds = random_dataset(seed);
        let back = deserialize(&serialize(&ds)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(back == ds, "seed {seed}: round trip differs");
    }
    Ok("emitted files match the key set and nesting; 1000 random round trips identical".into())
}

// 7

fn split_check() -> Outcome {
    let run = small_run();
    let mut lines = Vec::new();
    for d in &run.manifest.depths {
        let name = family_name(d.depth);
        let full = read_ds(&run.out, &format!("{name}.json"));
        let parts: Vec<SquadDataset> =
            ["train", "test", "eval"].iter().map(|p| read_ds(&run.out, &format!("{name}-{p}.json"))).collect();
        let n = full.paragraph_count();
        for (part, r) in parts.iter().zip([0.6, 0.2, 0.2]) {
            let got = part.paragraph_count() as f64;
            ensure!((got - n as f64 * r).abs() <= 1.0, "depth {}: {got} paragraphs of {n} for ratio {r}", d.depth);
        }
        // Each source person lives in exactly one part; titles are `<tree>:<person>`.
        let mut owner: HashMap<&str, usize> = HashMap::new();
        for (k, part) in parts.iter().enumerate() {
            for a in &part.data {
                ensure!(owner.insert(a.title.as_str(), k).is_none(), "{} appears twice", a.title);
            }
        }
        let all: BTreeSet<&str> = full.data.iter().map(|a| a.title.as_str()).collect();
        ensure!(owner.keys().copied().collect::<BTreeSet<_>>() == all, "depth {}: union differs from the whole", d.depth);
        let ids = |ds: &SquadDataset| ds.questions().map(|(_, q)| q.id.clone()).collect::<BTreeSet<_>>();
        let union: BTreeSet<String> = parts.iter().flat_map(ids).collect();
        ensure!(union == ids(&full), "depth {}: questions lost or duplicated", d.depth);

        let seed = gensquad::rng::derive_seed(7, &["split", &d.depth.to_string()]);
        let a = split_indices(&full, (0.6, 0.2, 0.2), seed).map_err(|e| e.to_string())?;
        let b = split_indices(&full, (0.6, 0.2, 0.2), seed).map_err(|e| e.to_string())?;
        ensure!(a == b, "split not deterministic");
        let from_file: Vec<&str> = parts[0].data.iter().map(|a| a.title.as_str()).collect();
        let recomputed: Vec<&str> = a[0].iter().map(|&i| full.data[i].title.as_str()).collect();
        ensure!(from_file == recomputed, "depth {}: train split not reproducible from the seed", d.depth);
        lines.push(format!("d{} {}/{}/{}", d.depth, parts[0].paragraph_count(), parts[1].paragraph_count(), parts[2].paragraph_count()));
    }
    Ok(lines.join(", "))
}

// 8

/// Scoring written from scratch: lowercase, whitespace tokens with surrounding
/// punctuation stripped, multiset overlap by sorted merge.
fn oracle_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in s.split_whitespace() {
        let chars: Vec<char> = raw.chars().collect();
        let (mut i, mut j) = (0, chars.len());
        while i < j && !chars[i].is_alphanumeric() {
            i += 1;
        }
        while j > i && !chars[j - 1].is_alphanumeric() {
            j -= 1;
        }
        if i < j {
            out.push(chars[i..j].iter().collect::<String>().to_lowercase());
        }
    }
    out
}

fn oracle_f1(pred: &str, gold: &str) -> f64 {
    let (mut p, mut g) = (oracle_tokens(pred), oracle_tokens(gold));
    if p.is_empty() || g.is_empty() {
        return (p.is_empty() && g.is_empty()) as u8 as f64;
    }
    p.sort();
    g.sort();
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < p.len() && j < g.len() {
        match p[i].cmp(&g[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    2.0 * common as f64 / (p.len() + g.len()) as f64
}

fn scorer() -> Outcome {
    let c = HarnessConfig::default();
    let f = token_f1("in Poland", "Poland", &c);
    ensure!((f - 2.0 / 3.0).abs() < 1e-9, "F1(in Poland, Poland) = {f}");
    for s in ["Poland", "Matt Adler", "28 May 1816", "Uinta, Wyoming, USA"] {
        ensure!(token_f1(s, s, &c) == 1.0, "identity {s}");
    }
    ensure!(token_f1("Germany", "France", &c) == 0.0, "Germany/France");

    // 1000 generated questions with assorted predictions.
    let run = small_run();
    let full = read_ds(&run.out, &format!("{}.json", family_name(1)));
    let ds = gensquad::qa::sample_questions(&full, 1000, 5).map_err(|e| e.to_string())?;
    let mut rng = SplitMix64::new(99);
    let pool: Vec<String> = full.questions().flat_map(|(_, q)| q.answers.iter().map(|a| a.text.clone())).take(500).collect();
    let mut preds = Predictions::new();
    for (_, q) in ds.questions() {
        let gold = q.answers.first().map(|a| a.text.as_str()).unwrap_or("");
        let pred = match rng.random_range(0..6) {
            0 => gold.to_string(),
            1 => format!("in {}", gold.to_uppercase()),
            2 => pool.choose(&mut rng).unwrap().clone(),
            3 => String::new(),
            4 => gold.split_whitespace().next().unwrap_or("x").to_string(),
            _ => continue,
        };
        preds.insert(q.id.clone(), pred);
    }
    let report = score(&ds, &preds, &c);

    let mut sums: BTreeMap<String, (usize, f64, f64)> = BTreeMap::new();
    for (_, q) in ds.questions() {
        let pred = preds.get(&q.id).map_or("", String::as_str);
        let (em, f1) = if q.is_impossible {
            let hit = oracle_tokens(pred).is_empty() as u8 as f64;
            (hit, hit)
        } else {
            q.answers.iter().fold((0.0f64, 0.0f64), |(em, f1), a| {
                let same = oracle_tokens(pred) == oracle_tokens(&a.text);
                (em.max(same as u8 as f64), f1.max(oracle_f1(pred, &a.text)))
            })
        };
        let code = q.id.split(':').rev().nth(1).unwrap().to_string();
        for key in [code, "overall".to_string()] {
            let s = sums.entry(key).or_default();
            *s = (s.0 + 1, s.1 + em, s.2 + f1);
        }
    }
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let mut compared = 0;
    for (key, (n, em, f1)) in &sums {
        let got = match key.as_str() {
            "overall" => report.overall,
            code => report.get(QuestionType::from_code(code).ok_or(format!("unknown code {code}"))?),
        };
        let (em, f1) = (100.0 * em / *n as f64, 100.0 * f1 / *n as f64);
        ensure!(got.n == *n && close(got.exact_match, em) && close(got.f1, f1), "{key}: {got:?} vs n {n} EM {em} F1 {f1}");
        compared += 1;
    }
    let total: usize = report.per_type.iter().map(|(_, s)| s.n).sum();
    ensure!(total == report.overall.n, "per-type n does not add up");
    ensure!(report.per_type.iter().filter(|(_, s)| s.n > 0).count() + 1 == compared, "type sets differ");
    Ok(format!(
        "F1(in Poland, Poland) = {f:.6}; {} items, {compared} report rows match the oracle",
        report.overall.n
    ))
}

// 9

fn windowing() -> Outcome {
    let c = HarnessConfig { max_sequence_tokens: 25, doc_stride: 6, ..Default::default() };
    let s = window_split(7, 35, None, &c).map_err(|e| e.to_string())?;
    let spans: Vec<(usize, usize)> = s.windows.iter().map(|w| (w.token_start, w.token_end)).collect();
    ensure!(s.windows.len() == 3, "windows {spans:?}");
    ensure!(spans.iter().all(|(a, b)| b - a <= 18), "window too long {spans:?}");
    for w in spans.windows(2) {
        ensure!(w[0].1 - w[1].0 == 6, "overlap {spans:?}");
    }
    for ((start, _), listed) in spans.iter().zip([1usize, 12, 24]) {
        ensure!((start + 1).abs_diff(listed) <= 1, "start {} vs listed {listed}", start + 1);
    }

    // Every placement of a 3-token answer.
    let mut placements = 0;
    for a in 0..=32 {
        let answer = (a, a + 3);
        let s = window_split(7, 35, Some(answer), &c).map_err(|e| e.to_string())?;
        ensure!(s.windows.iter().any(|w| w.is_answerable), "answer at {a} in no window");
        for w in &s.windows {
            let inside = a >= w.token_start && a + 3 <= w.token_end;
            let straddles = !inside && a < w.token_end && a + 3 > w.token_start;
            ensure!(w.is_answerable == inside, "answer {answer:?}, window {w:?}");
            ensure!(!(straddles && w.is_answerable), "straddled window {w:?} answerable");
            if inside {
                ensure!(w.answer == Some((a - w.token_start, a + 3 - w.token_start)), "local span {w:?}");
            }
        }
        placements += 1;
    }
    let listed: Vec<String> = spans.iter().map(|(a, b)| format!("{}-{}", a + 1, b)).collect();
    Ok(format!("windows {} (1-indexed), {placements} answer placements checked", listed.join(", ")))
}

// 10, 11

struct LargeRun {
    elapsed: Duration,
    peak_rss_kb: Option<u64>,
    digests: Result<BTreeMap<String, String>, String>,
    single: Result<BTreeMap<String, String>, String>,
    on_disk_ok: Result<usize, String>,
}

fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn large_run() -> &'static LargeRun {
    static RUN: std::sync::OnceLock<LargeRun> = std::sync::OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        fs::create_dir_all(&input).unwrap();
        write_corpus(&input, 2024, 10_000, 40);

        let out8 = dir.path().join("out8");
        let t = Instant::now();
        let eight = run_generate(&config(&input, &out8, vec![0, 1, 2], 8)).map_err(|e| e.to_string());
        let elapsed = t.elapsed();
        let peak_rss_kb = peak_rss_kb();
        // The recorded digests must describe the bytes actually on disk.
        let on_disk_ok = eight.as_ref().map_err(Clone::clone).and_then(|m| {
            for (name, digest) in &m.digests {
                let bytes = fs::read(out8.join(name)).map_err(|e| e.to_string())?;
                if sha256_hex(&bytes) != *digest {
                    return Err(format!("{name} digest does not match its contents"));
                }
            }
            Ok(m.digests.len())
        });
        let _ = fs::remove_dir_all(&out8);

        let out1 = dir.path().join("out1");
        let one = run_generate(&config(&input, &out1, vec![0, 1, 2], 1)).map_err(|e| e.to_string());
        let _ = fs::remove_dir_all(&out1);
        LargeRun {
            elapsed,
            peak_rss_kb,
            digests: eight.map(|m| m.digests),
            single: one.map(|m| m.digests),
            on_disk_ok,
        }
    })
}

fn determinism() -> Outcome {
    let run = large_run();
    let eight = run.digests.as_ref().map_err(|e| format!("8 workers: {e}"))?;
    let one = run.single.as_ref().map_err(|e| format!("1 worker: {e}"))?;
    let files = run.on_disk_ok.as_ref().map_err(Clone::clone)?;
    ensure!(eight == one, "digests differ: {:?}", eight.iter().filter(|(k, v)| one.get(*k) != Some(*v)).map(|(k, _)| k).collect::<Vec<_>>());
    Ok(format!("{files} files byte-identical with 1 and 8 workers"))
}

fn throughput() -> Outcome {
    let run = large_run();
    run.digests.as_ref().map_err(Clone::clone)?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let rss_mb = run.peak_rss_kb.map(|kb| kb / 1024);
    let detail = format!(
        "10,000 persons, depths 0-2, 8 workers on {cores} core(s): {:.1}s, peak RSS {}",
        run.elapsed.as_secs_f64(),
        rss_mb.map_or("unknown".into(), |m| format!("{m} MB"))
    );
    ensure!(run.elapsed < Duration::from_secs(60), "{detail}");
    ensure!(rss_mb.is_some_and(|m| m < 2048), "{detail}");
    Ok(detail)
}

// 12

fn totality() -> Outcome {
    let run = small_run();
    let stats = fs::read_to_string(run.out.join("stats.tsv")).unwrap();
    let mut from_stats: BTreeMap<(u32, String), usize> = BTreeMap::new();
    for line in stats.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        ensure!(cols.len() == 3, "bad stats line {line:?}");
        let depth = cols[0].parse().map_err(|_| format!("bad depth in {line:?}"))?;
        from_stats.insert((depth, cols[1].to_string()), cols[2].parse().map_err(|_| format!("bad count in {line:?}"))?);
    }
    let mut recount: BTreeMap<(u32, String), usize> = BTreeMap::new();
    let mut total = 0;
    for d in &run.manifest.depths {
        let ds = read_ds(&run.out, &format!("{}.json", family_name(d.depth)));
        for (_, q) in ds.questions() {
            let t = QuestionType::from_id(&q.id).ok_or(format!("untyped question {}", q.id))?;
            ensure!(QuestionType::ALL.contains(&t), "{t:?}");
            *recount.entry((d.depth, t.code().to_string())).or_default() += 1;
            total += 1;
        }
    }
    let stats_total: usize = from_stats.values().sum();
    ensure!(stats_total == total, "stats.tsv sums to {stats_total}, JSON holds {total}");
    from_stats.retain(|_, n| *n > 0);
    ensure!(from_stats == recount, "per-type counts differ");
    let types: HashSet<&str> = recount.keys().map(|(_, t)| t.as_str()).collect();
    Ok(format!("{total} questions, all typed ({} of 12 types present), stats.tsv agrees", types.len()))
}
