//! Seeded random family trees written as GEDCOM text. Used for property tests,
//! benchmarks and the demo corpus.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::rng::SplitMix64;

const MALE: &[&str] = &["John", "Matt", "Alexander", "Jonathan", "David", "Samuel", "Łukasz", "Henry", "Oscar", "Peter"];
const FEMALE: &[&str] = &["Emily", "Mia", "Mary", "Carol", "Grace", "Zoë", "Anna", "Ruth", "Helen", "Sarah"];
const SURNAMES: &[&str] = &["Williams", "Brown", "Adler", "Nowak", "Smith", "Müller", "Cohen", "Garcia", "Kowalski"];
const PLACES: &[&str] = &[
    "Boston, USA",
    "Salem, USA",
    "Kraków, Poland",
    "Tel Aviv",
    "Chicago, USA",
    "Uinta, Wyoming, USA",
    "Pruszków, Poland",
    "Leeds, England",
    "Lyon, France",
];
const JOBS: &[&str] = &["Farmer", "Blacksmith", "Teacher", "Seamstress", "Carpenter", "Miner", "Clerk"];
const MONTHS: &[&str] = &["JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"];

struct Person {
    male: bool,
    given: &'static str,
    surname: &'static str,
    born: i32,
    famc: Option<usize>,
    fams: Vec<usize>,
}

struct Family {
    husb: usize,
    wife: usize,
    children: Vec<usize>,
}

fn date(rng: &mut SplitMix64, year: i32) -> String {
    match rng.random_range(0..4) {
        0 => format!("{} {} {year}", rng.random_range(1..=28), MONTHS.choose(rng).unwrap()),
        1 => format!("ABT {year}"),
        _ => year.to_string(),
    }
}

fn note(rng: &mut SplitMix64, male: bool) -> String {
    let pron = if male { "He" } else { "She" };
    let place = PLACES.choose(rng).unwrap().split(',').next().unwrap();
    match rng.random_range(0..6) {
        0 => format!("{pron} died of pneumonia after a short illness."),
        1 => format!("{pron} worked as a carpenter for many years."),
        2 => format!("{pron} reached the rank of sergeant during the war."),
        3 => format!("{pron} studied medicine in {place}."),
        4 => format!("{pron} moved to {place} in {}.", rng.random_range(1850..1950)),
        _ => format!("{pron} was fond of music. {pron} kept a diary."),
    }
}

/// A connected random tree of exactly `persons` individuals (at least one).
pub fn random_tree(seed: u64, persons: usize) -> String {
    let mut rng = SplitMix64::new(seed);
    let mut people: Vec<Person> = Vec::new();
    let mut families: Vec<Family> = Vec::new();
    let new_person = |rng: &mut SplitMix64, people: &mut Vec<Person>, male: bool, surname: &'static str, born: i32| {
        let given = if male { MALE } else { FEMALE }.choose(rng).unwrap();
        people.push(Person { male, given, surname, born, famc: None, fams: Vec::new() });
        people.len() - 1
    };
    let first_male = rng.random_bool(0.5);
    let surname = SURNAMES.choose(&mut rng).unwrap();
    let born = rng.random_range(1750..1800);
    new_person(&mut rng, &mut people, first_male, surname, born);

    while people.len() < persons.max(1) {
        let unmarried: Vec<usize> = (0..people.len()).filter(|&p| people[p].fams.is_empty()).collect();
        if families.is_empty() || (!unmarried.is_empty() && rng.random_bool(0.3)) {
            let p = *unmarried.choose(&mut rng).unwrap_or(&0);
            let male = !people[p].male;
            let surname = SURNAMES.choose(&mut rng).unwrap();
            let born = people[p].born + rng.random_range(-5..=5);
            let s = new_person(&mut rng, &mut people, male, surname, born);
            let (husb, wife) = if people[p].male { (p, s) } else { (s, p) };
            people[p].fams.push(families.len());
            people[s].fams.push(families.len());
            families.push(Family { husb, wife, children: Vec::new() });
        } else {
            let f = rng.random_range(0..families.len());
            let fam = &families[f];
            let surname = people[fam.husb].surname;
            let born = people[fam.husb].born.max(people[fam.wife].born) + rng.random_range(18..40);
            let male = rng.random_bool(0.5);
            let c = new_person(&mut rng, &mut people, male, surname, born);
            people[c].famc = Some(f);
            families[f].children.push(c);
        }
    }

    let mut out = String::from("0 HEAD\n1 GEDC\n2 VERS 5.5.1\n2 FORM LINEAGE-LINKED\n1 CHAR UTF-8\n");
    for (i, p) in people.iter().enumerate() {
        let _ = writeln!(out, "0 @I{i}@ INDI\n1 NAME {} /{}/\n1 SEX {}", p.given, p.surname, if p.male { 'M' } else { 'F' });
        out.push_str("1 BIRT\n");
        if rng.random_bool(0.9) {
            let _ = writeln!(out, "2 DATE {}", date(&mut rng, p.born));
        }
        if rng.random_bool(0.8) {
            let _ = writeln!(out, "2 PLAC {}", PLACES.choose(&mut rng).unwrap());
        }
        if rng.random_bool(0.6) {
            let died = p.born + rng.random_range(30..90);
            let _ = writeln!(out, "1 DEAT\n2 DATE {}", date(&mut rng, died));
            if rng.random_bool(0.5) {
                let _ = writeln!(out, "2 PLAC {}", PLACES.choose(&mut rng).unwrap());
            }
            if rng.random_bool(0.3) {
                let _ = writeln!(out, "1 BURI\n2 PLAC {}", PLACES.choose(&mut rng).unwrap());
            }
        }
        if rng.random_bool(0.4) {
            let _ = writeln!(out, "1 OCCU {}", JOBS.choose(&mut rng).unwrap());
        }
        if rng.random_bool(0.2) {
            let _ = writeln!(out, "1 RESI\n2 PLAC {}", PLACES.choose(&mut rng).unwrap());
        }
        if rng.random_bool(0.3) {
            let _ = writeln!(out, "1 NOTE {}", note(&mut rng, p.male));
        }
        if let Some(f) = p.famc {
            let _ = writeln!(out, "1 FAMC @F{f}@");
        }
        for f in &p.fams {
            let _ = writeln!(out, "1 FAMS @F{f}@");
        }
    }
    for (i, f) in families.iter().enumerate() {
        let _ = writeln!(out, "0 @F{i}@ FAM\n1 HUSB @I{}@\n1 WIFE @I{}@", f.husb, f.wife);
        if rng.random_bool(0.7) {
            let year = people[f.husb].born.max(people[f.wife].born) + rng.random_range(18..30);
            let _ = writeln!(out, "1 MARR\n2 DATE {}\n2 PLAC {}", date(&mut rng, year), PLACES.choose(&mut rng).unwrap());
        }
        for c in &f.children {
            let _ = writeln!(out, "1 CHIL @I{c}@");
        }
    }
    out.push_str("0 TRLR\n");
    out
}

/// Trees of `tree_size` persons (the last one smaller) until `total_persons` is reached.
/// Returns `(file name, GEDCOM text)` pairs.
pub fn corpus(seed: u64, total_persons: usize, tree_size: usize) -> Vec<(String, String)> {
    let tree_size = tree_size.max(1);
    let mut out = Vec::new();
    let mut left = total_persons;
    while left > 0 {
        let n = left.min(tree_size);
        let i = out.len();
        out.push((format!("tree{i:04}.ged"), random_tree(seed.wrapping_add(i as u64), n)));
        left -= n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gedcom::parse;

    #[test]
    fn trees_parse_with_requested_size() {
        for (seed, n) in [(1, 1), (2, 2), (3, 17), (4, 50)] {
            let doc = parse(&random_tree(seed, n)).unwrap();
            assert_eq!(doc.individuals.len(), n);
        }
        assert_eq!(random_tree(9, 20), random_tree(9, 20));
    }

    #[test]
    fn corpus_sizes() {
        let c = corpus(0, 250, 100);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2].0, "tree0002.ged");
    }
}
