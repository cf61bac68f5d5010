use std::fmt;

const MONTHS: [&str; 12] = [
    "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC",
];

const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum DateQualifier {
    Exact,
    About,
    Before,
    After,
    Between,
    Unparsed,
}

/// A GEDCOM date value. `raw` is kept verbatim; the parsed parts are best-effort.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GedcomDate {
    pub raw: String,
    pub day: Option<u8>,
    pub month: Option<u8>,
    pub year: Option<i32>,
    /// Upper bound year of a `BET .. AND ..` / `FROM .. TO ..` range.
    pub end_year: Option<i32>,
    pub qualifier: DateQualifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dmy {
    day: Option<u8>,
    month: Option<u8>,
    year: i32,
}

/// Parses the value of a `DATE` line. Never fails: anything unrecognized comes back
/// with [`DateQualifier::Unparsed`].
pub fn parse_date(raw: &str) -> GedcomDate {
    let unparsed = || GedcomDate {
        raw: raw.to_string(),
        day: None,
        month: None,
        year: None,
        end_year: None,
        qualifier: DateQualifier::Unparsed,
    };
    let upper = raw.trim().to_ascii_uppercase();
    let tokens: Vec<&str> = upper.split_whitespace().collect();
    if tokens.is_empty() {
        return unparsed();
    }

    let build = |dmy: Dmy, end_year: Option<i32>, qualifier| GedcomDate {
        raw: raw.to_string(),
        day: dmy.day,
        month: dmy.month,
        year: Some(dmy.year),
        end_year,
        qualifier,
    };

    let single = |q: DateQualifier, rest: &[&str]| match parse_dmy(rest) {
        Some(dmy) => build(dmy, None, q),
        None => unparsed(),
    };

    match tokens[0] {
        "ABT" | "ABOUT" | "CAL" | "EST" | "CIRCA" | "C." => single(DateQualifier::About, &tokens[1..]),
        "BEF" | "BEFORE" => single(DateQualifier::Before, &tokens[1..]),
        "AFT" | "AFTER" => single(DateQualifier::After, &tokens[1..]),
        "BET" | "FROM" => {
            let sep = if tokens[0] == "BET" { "AND" } else { "TO" };
            match tokens.iter().position(|t| *t == sep) {
                Some(i) => match (parse_dmy(&tokens[1..i]), parse_dmy(&tokens[i + 1..])) {
                    (Some(a), Some(b)) => build(a, Some(b.year), DateQualifier::Between),
                    _ => unparsed(),
                },
                // "FROM 1850" alone is a start date.
                None if tokens[0] == "FROM" => single(DateQualifier::After, &tokens[1..]),
                None => unparsed(),
            }
        }
        _ => single(DateQualifier::Exact, &tokens),
    }
}

fn parse_dmy(tokens: &[&str]) -> Option<Dmy> {
    // Trailing era marker.
    let (tokens, bc) = match tokens.last() {
        Some(&"B.C." | &"BC" | &"BCE") => (&tokens[..tokens.len() - 1], true),
        _ => (tokens, false),
    };
    let year = |s: &str| -> Option<i32> {
        if s.is_empty() || s.len() > 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let y: i32 = s.parse().ok()?;
        Some(if bc { -y } else { y })
    };
    let month = |s: &str| MONTHS.iter().position(|m| *m == s).map(|i| i as u8 + 1);
    let day = |s: &str| -> Option<u8> {
        if s.len() > 2 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok().filter(|d| (1..=31).contains(d))
    };
    match tokens {
        [y] => Some(Dmy { day: None, month: None, year: year(y)? }),
        [m, y] => Some(Dmy { day: None, month: Some(month(m)?), year: year(y)? }),
        [d, m, y] => Some(Dmy { day: Some(day(d)?), month: Some(month(m)?), year: year(y)? }),
        _ => None,
    }
}

impl GedcomDate {
    /// Re-serializes the parsed parts in GEDCOM syntax (upper-case month, qualifier keyword).
    /// For `Unparsed` dates this is the raw text.
    pub fn to_gedcom(&self) -> String {
        let dmy = |day: Option<u8>, month: Option<u8>, year: i32| {
            let mut s = String::new();
            if let Some(d) = day {
                s.push_str(&format!("{d} "));
            }
            if let Some(m) = month {
                s.push_str(MONTHS[m as usize - 1]);
                s.push(' ');
            }
            if year < 0 {
                s.push_str(&format!("{} B.C.", -year));
            } else {
                s.push_str(&year.to_string());
            }
            s
        };
        let Some(year) = self.year else {
            return self.raw.clone();
        };
        let main = dmy(self.day, self.month, year);
        match self.qualifier {
            DateQualifier::Exact => main,
            DateQualifier::About => format!("ABT {main}"),
            DateQualifier::Before => format!("BEF {main}"),
            DateQualifier::After => format!("AFT {main}"),
            DateQualifier::Between => match self.end_year {
                Some(end) => format!("BET {main} AND {end}"),
                None => main,
            },
            DateQualifier::Unparsed => self.raw.clone(),
        }
    }

    /// Human phrasing used in generated text, year-granular: "1816", "about 1850",
    /// "between 1850 and 1860". Unparsed dates fall back to the trimmed raw text.
    pub fn year_phrase(&self) -> String {
        let Some(year) = self.year else {
            return self.raw.trim().to_string();
        };
        let y = fmt_year(year);
        match self.qualifier {
            DateQualifier::Exact => y,
            DateQualifier::About => format!("about {y}"),
            DateQualifier::Before => format!("before {y}"),
            DateQualifier::After => format!("after {y}"),
            DateQualifier::Between => match self.end_year {
                Some(end) => format!("between {y} and {}", fmt_year(end)),
                None => y,
            },
            DateQualifier::Unparsed => self.raw.trim().to_string(),
        }
    }

    /// "28 May 1816" style phrasing; falls back to [`year_phrase`](Self::year_phrase).
    pub fn long_phrase(&self) -> String {
        match (self.qualifier, self.day, self.month, self.year) {
            (DateQualifier::Exact, Some(d), Some(m), Some(y)) => {
                format!("{d} {} {}", MONTH_NAMES[m as usize - 1], fmt_year(y))
            }
            (DateQualifier::Exact, None, Some(m), Some(y)) => {
                format!("{} {}", MONTH_NAMES[m as usize - 1], fmt_year(y))
            }
            _ => self.year_phrase(),
        }
    }
}

fn fmt_year(y: i32) -> String {
    if y < 0 {
        format!("{} BC", -y)
    } else {
        y.to_string()
    }
}

impl fmt::Display for GedcomDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_date() {
        let d = parse_date("28 MAY 1816");
        assert_eq!((d.day, d.month, d.year), (Some(28), Some(5), Some(1816)));
        assert_eq!(d.qualifier, DateQualifier::Exact);
    }

    #[test]
    fn year_only() {
        let d = parse_date("1832");
        assert_eq!((d.day, d.month, d.year), (None, None, Some(1832)));
        assert_eq!(d.qualifier, DateQualifier::Exact);
    }

    #[test]
    fn approximations() {
        // GEDCOM 5.5.1 DATE_APPROXIMATED: ABT | CAL | EST
        for raw in ["ABT 1850", "CAL 1850", "EST 1850", "abt 1850"] {
            let d = parse_date(raw);
            assert_eq!(d.year, Some(1850), "{raw}");
            assert_eq!(d.qualifier, DateQualifier::About, "{raw}");
        }
        assert_eq!(parse_date("BEF 3 JUN 1900").qualifier, DateQualifier::Before);
        assert_eq!(parse_date("AFT 1900").qualifier, DateQualifier::After);
        let between = parse_date("BET 1850 AND 1860");
        assert_eq!(between.qualifier, DateQualifier::Between);
        assert_eq!((between.year, between.end_year), (Some(1850), Some(1860)));
        assert_eq!(between.year_phrase(), "between 1850 and 1860");
    }

    #[test]
    fn unparsed_keeps_raw() {
        for raw in ["", "sometime in spring", "32 MAY 1816", "28 MAI 1816", "INT 1850 (maybe)"] {
            let d = parse_date(raw);
            assert_eq!(d.qualifier, DateQualifier::Unparsed, "{raw}");
            assert_eq!(d.raw, raw);
            assert_eq!(d.year, None);
        }
    }

    #[test]
    fn bc_years_are_negative() {
        assert_eq!(parse_date("44 B.C.").year, Some(-44));
    }

    #[test]
    fn exact_round_trip() {
        for raw in ["28 MAY 1816", "7 FEB 1899", "MAY 1999", "1832", "30 Dec 1845"] {
            let d = parse_date(raw);
            assert_eq!(d.to_gedcom().to_lowercase(), raw.to_lowercase());
        }
    }

    #[test]
    fn phrases() {
        let d = parse_date("28 MAY 1816");
        assert_eq!(d.year_phrase(), "1816");
        assert_eq!(d.long_phrase(), "28 May 1816");
        assert_eq!(parse_date("ABT 1850").year_phrase(), "about 1850");
    }
}
