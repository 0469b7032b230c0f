//! Spoken-form date rendering.
//!
//! A pattern is plain text with `{atom}` placeholders, e.g.
//! `"{month_name} {day_ordinal_words} {year_digit_pairs_words}"` renders
//! 2021-01-05 as `"January fifth twenty twenty-one"`. Every atom is fully
//! verbalized, so patterns without digit literals never emit digits.

use chrono::{Datelike, NaiveDate};

use crate::numwords;

const MONTHS: [&str; 12] = [
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateAtom {
    MonthName,
    DayOrdinalWords,
    DayCardinalWords,
    YearWords,
    YearDigitPairsWords,
}

impl DateAtom {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "month_name" => Some(DateAtom::MonthName),
            "day_ordinal_words" => Some(DateAtom::DayOrdinalWords),
            "day_cardinal_words" => Some(DateAtom::DayCardinalWords),
            "year_words" => Some(DateAtom::YearWords),
            "year_digit_pairs_words" => Some(DateAtom::YearDigitPairsWords),
            _ => None,
        }
    }

    fn render(self, date: NaiveDate) -> String {
        match self {
            DateAtom::MonthName => MONTHS[date.month0() as usize].to_string(),
            DateAtom::DayOrdinalWords => numwords::ordinal(u64::from(date.day())),
            DateAtom::DayCardinalWords => numwords::cardinal(u64::from(date.day())),
            DateAtom::YearWords => numwords::year(date.year() as u32),
            DateAtom::YearDigitPairsWords => numwords::year_digit_pairs(date.year() as u32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Literal(String),
    Atom(DateAtom),
}

/// A parsed spoken-date pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatePattern {
    source: String,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("unknown atom `{{{atom}}}` in date pattern `{pattern}`")]
    UnknownAtom { pattern: String, atom: String },
    #[error("unterminated `{{` in date pattern `{pattern}`")]
    Unterminated { pattern: String },
}

impl DatePattern {
    pub fn parse(pattern: &str) -> Result<Self, PatternError> {
        let mut pieces = Vec::new();
        let mut literal = String::new();
        let mut rest = pattern;
        while let Some(open) = rest.find('{') {
            literal.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let close = after.find('}').ok_or_else(|| PatternError::Unterminated {
                pattern: pattern.to_string(),
            })?;
            let name = &after[..close];
            let atom = DateAtom::parse(name).ok_or_else(|| PatternError::UnknownAtom {
                pattern: pattern.to_string(),
                atom: name.to_string(),
            })?;
            if !literal.is_empty() {
                pieces.push(Piece::Literal(std::mem::take(&mut literal)));
            }
            pieces.push(Piece::Atom(atom));
            rest = &after[close + 1..];
        }
        literal.push_str(rest);
        if !literal.is_empty() {
            pieces.push(Piece::Literal(literal));
        }
        Ok(Self {
            source: pattern.to_string(),
            pieces,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the pattern has no pieces and renders the empty string.
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn render(&self, date: NaiveDate) -> String {
        let mut out = String::new();
        for piece in &self.pieces {
            match piece {
                Piece::Literal(text) => out.push_str(text),
                Piece::Atom(atom) => out.push_str(&atom.render(date)),
            }
        }
        out
    }
}

/// Parse and render in one step.
pub fn render_date(pattern: &str, date: NaiveDate) -> Result<String, PatternError> {
    Ok(DatePattern::parse(pattern)?.render(date))
}

/// The four patterns a default policy samples from.
pub fn default_patterns() -> Vec<DatePattern> {
    [
        "{month_name} {day_ordinal_words} {year_digit_pairs_words}",
        "{month_name} {day_ordinal_words}",
        "the {day_ordinal_words} of {month_name} {year_words}",
        "{month_name} {day_cardinal_words} {year_digit_pairs_words}",
    ]
    .iter()
    .map(|p| DatePattern::parse(p).expect("shipped patterns parse"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn fully_verbalized_pattern() {
        let rendered = render_date(
            "{month_name} {day_ordinal_words} {year_digit_pairs_words}",
            date(2021, 1, 5),
        )
        .unwrap();
        assert_eq!(rendered, "January fifth twenty twenty-one");
    }

    #[test]
    fn month_day_pattern() {
        let rendered = render_date("{month_name} {day_ordinal_words}", date(2021, 1, 5)).unwrap();
        assert_eq!(rendered, "January fifth");
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = DatePattern::parse("the {day_ordinal_words} of {month_name} {year_words}").unwrap();
        let d = date(1987, 11, 23);
        assert_eq!(p.render(d), p.render(d));
        assert_eq!(p.render(d), "the twenty-third of November one thousand nine hundred eighty-seven");
    }

    #[test]
    fn unknown_atom_is_rejected() {
        let err = DatePattern::parse("{month_name} {weekday}").unwrap_err();
        assert_eq!(
            err,
            PatternError::UnknownAtom {
                pattern: "{month_name} {weekday}".into(),
                atom: "weekday".into()
            }
        );
        assert!(matches!(
            DatePattern::parse("{month_name").unwrap_err(),
            PatternError::Unterminated { .. }
        ));
    }

    #[test]
    fn default_patterns_emit_no_digits() {
        for pattern in default_patterns() {
            let rendered = pattern.render(date(2024, 8, 31));
            assert!(
                !rendered.chars().any(|c| c.is_ascii_digit()),
                "{} -> {rendered}",
                pattern.source()
            );
        }
    }
}
