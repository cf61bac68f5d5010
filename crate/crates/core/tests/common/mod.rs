#![allow(dead_code)]

use std::path::PathBuf;

use gensquad::gedcom::{self, GedcomDocument};
use gensquad::graph::{build_family_tree_graph, FamilyTreeGraph};
use gensquad::kinship::{KinshipMap, UNREACHABLE};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn family() -> (GedcomDocument, FamilyTreeGraph) {
    let doc = gedcom::parse_file(fixture("family.ged")).unwrap();
    let graph = build_family_tree_graph(&doc);
    (doc, graph)
}

pub fn williams() -> GedcomDocument {
    gedcom::parse_file(fixture("williams.ged")).unwrap()
}

pub fn sorted(mut v: Vec<&str>) -> Vec<&str> {
    v.sort();
    v
}

/// Random lineage-linked file: families with zero to two parents and any number of
/// children, people marrying more than once, and disconnected parts.
pub fn random_gedcom(seed: u64, persons: usize) -> String {
    use rand::Rng;
    let mut rng = gensquad::rng::SplitMix64::new(seed);
    let mut famc: Vec<Option<usize>> = vec![None; persons];
    let mut fams: Vec<Vec<usize>> = vec![Vec::new(); persons];
    let mut families: Vec<(Option<usize>, Option<usize>, Vec<usize>)> = Vec::new();
    let male: Vec<bool> = (0..persons).map(|_| rng.random_bool(0.5)).collect();
    let nfam = rng.random_range(0..=persons / 2 + 1);
    for f in 0..nfam {
        let pick = |want_male: bool, rng: &mut gensquad::rng::SplitMix64| {
            let p = rng.random_range(0..persons.max(1));
            (persons > 0 && male[p] == want_male && rng.random_bool(0.85)).then_some(p)
        };
        let h = pick(true, &mut rng);
        let w = pick(false, &mut rng);
        let mut kids = Vec::new();
        for _ in 0..rng.random_range(0..4) {
            let c = rng.random_range(0..persons.max(1));
            if persons > 0 && famc[c].is_none() && Some(c) != h && Some(c) != w {
                famc[c] = Some(f);
                kids.push(c);
            }
        }
        for p in [h, w].into_iter().flatten() {
            fams[p].push(f);
        }
        families.push((h, w, kids));
    }
    let mut out = String::from("0 HEAD\n");
    for p in 0..persons {
        out += &format!("0 @I{p}@ INDI\n1 NAME P{p} /X/\n1 SEX {}\n", if male[p] { "M" } else { "F" });
        if let Some(f) = famc[p] {
            out += &format!("1 FAMC @F{f}@\n");
        }
        for f in &fams[p] {
            out += &format!("1 FAMS @F{f}@\n");
        }
    }
    for (f, (h, w, kids)) in families.iter().enumerate() {
        out += &format!("0 @F{f}@ FAM\n");
        if let Some(h) = h {
            out += &format!("1 HUSB @I{h}@\n");
        }
        if let Some(w) = w {
            out += &format!("1 WIFE @I{w}@\n");
        }
        for c in kids {
            out += &format!("1 CHIL @I{c}@\n");
        }
    }
    out + "0 TRLR\n"
}

/// All-pairs degrees by Floyd–Warshall straight from the records: parent to child
/// costs 1, co-parents of one family cost 0.
pub fn degree_oracle(doc: &GedcomDocument) -> (Vec<String>, Vec<Vec<u32>>) {
    const INF: u32 = u32::MAX / 4;
    let ids: Vec<String> = doc.individuals.keys().cloned().collect();
    let ix = |id: &str| ids.iter().position(|x| x == id);
    let n = ids.len();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for fam in doc.families.values() {
        let parents: Vec<usize> = fam.parents().filter_map(|p| ix(p)).collect();
        let kids: Vec<usize> = fam.children.iter().filter_map(|c| ix(c)).collect();
        for &a in &parents {
            for &b in &parents {
                if a != b {
                    d[a][b] = 0;
                }
            }
            for &c in &kids {
                d[a][c] = d[a][c].min(1);
                d[c][a] = d[c][a].min(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    (ids, d)
}

/// Every pair whose kinship degree disagrees with [`degree_oracle`] on `random_gedcom(seed, persons)`.
pub fn kinship_mismatches(seed: u64, persons: usize) -> Vec<String> {
    let doc = gedcom::parse(&random_gedcom(seed, persons)).unwrap();
    let graph = build_family_tree_graph(&doc);
    let (ids, oracle) = degree_oracle(&doc);
    let mut bad = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        let map = KinshipMap::compute(&graph, graph.person_index(a).unwrap(), None);
        for (j, b) in ids.iter().enumerate() {
            let want = if oracle[i][j] >= u32::MAX / 4 { UNREACHABLE } else { oracle[i][j] };
            let got = map.degree(graph.person_index(b).unwrap());
            if got != want {
                bad.push(format!("seed {seed}: {a} -> {b}: {got} vs {want}"));
            }
        }
    }
    bad
}
