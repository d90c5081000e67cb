use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Serialize, Serializer};

use super::ns;
use super::ModelError;

/// RDF term. Literals always carry a datatype; plain strings are
/// `xsd:string`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal { lexical: String, datatype: String },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    /// Validated IRI term.
    pub fn try_iri(s: impl Into<String>) -> Result<Term, ModelError> {
        let s = s.into();
        check_iri(&s)?;
        Ok(Term::Iri(s))
    }

    pub fn string(s: impl Into<String>) -> Term {
        Term::Literal { lexical: s.into(), datatype: ns::XSD_STRING.to_string() }
    }

    pub fn double(v: f64) -> Term {
        Term::Literal { lexical: format_double(v), datatype: ns::XSD_DOUBLE.to_string() }
    }

    pub fn integer(v: i64) -> Term {
        Term::Literal { lexical: v.to_string(), datatype: ns::XSD_INTEGER.to_string() }
    }

    pub fn date_time(t: &DateTime<Utc>) -> Term {
        Term::Literal { lexical: format_date_time(t), datatype: ns::XSD_DATE_TIME.to_string() }
    }

    /// Literal whose lexical form is checked against its datatype.
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Term, ModelError> {
        let (lexical, datatype) = (lexical.into(), datatype.into());
        check_lexical(&lexical, &datatype)?;
        Ok(Term::Literal { lexical, datatype })
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn datatype(&self) -> Option<&str> {
        match self {
            Term::Literal { datatype, .. } => Some(datatype),
            _ => None,
        }
    }

    /// Lexical form of a literal, the IRI text, or the blank label.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Blank(s) => s,
            Term::Literal { lexical, .. } => lexical,
        }
    }

    /// Numeric value of an xsd:integer, xsd:decimal or xsd:double literal.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Term::Literal { lexical, datatype } if is_numeric_datatype(datatype) => parse_double(lexical),
            _ => None,
        }
    }
}

pub fn is_numeric_datatype(dt: &str) -> bool {
    dt == ns::XSD_INTEGER || dt == ns::XSD_DECIMAL || dt == ns::XSD_DOUBLE
}

fn parse_double(s: &str) -> Option<f64> {
    match s {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') => None,
        _ => s.parse().ok(),
    }
}

/// Shortest round-trip decimal form.
pub fn format_double(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "INF".into() } else { "-INF".into() }
    } else {
        format!("{v}")
    }
}

pub fn format_date_time(t: &DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Accepts RFC 3339 date-times, naive `YYYY-MM-DDTHH:MM:SS` (read as UTC)
/// and plain dates (midnight UTC).
pub fn parse_date_time(s: &str) -> Result<DateTime<Utc>, ModelError> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        return Ok(t.and_utc());
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight").and_utc());
    }
    Err(ModelError::InvalidLiteral { lexical: s.to_string(), datatype: ns::XSD_DATE_TIME.to_string() })
}

fn check_lexical(lexical: &str, datatype: &str) -> Result<(), ModelError> {
    let ok = match datatype {
        d if d == ns::XSD_INTEGER => {
            let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        }
        d if d == ns::XSD_DECIMAL => {
            let body = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            let mut parts = body.splitn(2, '.');
            let int = parts.next().unwrap_or("");
            let frac = parts.next().unwrap_or("");
            (!int.is_empty() || !frac.is_empty())
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        d if d == ns::XSD_DOUBLE => parse_double(lexical).is_some(),
        d if d == ns::XSD_BOOLEAN => matches!(lexical, "true" | "false" | "1" | "0"),
        d if d == ns::XSD_DATE_TIME => parse_date_time(lexical).is_ok(),
        d if d == ns::XSD_DATE => NaiveDate::parse_from_str(lexical, "%Y-%m-%d").is_ok(),
        d => {
            check_iri(d)?;
            true
        }
    };
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidLiteral { lexical: lexical.to_string(), datatype: datatype.to_string() })
    }
}

pub(crate) fn check_iri(s: &str) -> Result<(), ModelError> {
    let bad = s.is_empty()
        || !s.contains(':')
        || s.chars().any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c));
    if bad {
        Err(ModelError::InvalidIri(s.to_string()))
    } else {
        Ok(())
    }
}

fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
}

/// N-Triples rendering of a literal's quoted lexical part.
pub(crate) fn quoted(lexical: &str) -> String {
    let mut out = String::with_capacity(lexical.len() + 2);
    out.push('"');
    escape_literal(lexical, &mut out);
    out.push('"');
    out
}

impl fmt::Display for Term {
    /// N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{s}>"),
            Term::Blank(s) => write!(f, "_:{s}"),
            Term::Literal { lexical, datatype } => {
                f.write_str(&quoted(lexical))?;
                if datatype != ns::XSD_STRING {
                    write!(f, "^^<{datatype}>")?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub s: Term,
    pub p: Term,
    pub o: Term,
}

impl Triple {
    pub fn new(s: Term, p: Term, o: Term) -> Self {
        Triple { s, p, o }
    }

    /// Shorthand for IRI subject and predicate.
    pub fn iri(s: &str, p: &str, o: Term) -> Self {
        Triple { s: Term::iri(s), p: Term::iri(p), o }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_checks() {
        assert!(Term::typed("42", ns::XSD_INTEGER).is_ok());
        assert!(Term::typed("4.2", ns::XSD_INTEGER).is_err());
        assert!(Term::typed("-.5", ns::XSD_DECIMAL).is_ok());
        assert!(Term::typed("1e3", ns::XSD_DECIMAL).is_err());
        assert!(Term::typed("1e3", ns::XSD_DOUBLE).is_ok());
        assert!(Term::typed("abc", ns::XSD_DOUBLE).is_err());
        assert!(Term::typed("2021-08-29T16:55:00Z", ns::XSD_DATE_TIME).is_ok());
        assert!(Term::typed("yesterday", ns::XSD_DATE_TIME).is_err());
    }

    #[test]
    fn numeric_values() {
        assert_eq!(Term::typed("0.71", ns::XSD_DECIMAL).unwrap().as_f64(), Some(0.71));
        assert_eq!(Term::string("3").as_f64(), None);
        assert_eq!(Term::double(21.5).value(), "21.5");
    }

    #[test]
    fn display_forms() {
        assert_eq!(Term::iri("urn:a").to_string(), "<urn:a>");
        assert_eq!(Term::string("a \"b\"\n").to_string(), r#""a \"b\"\n""#);
        assert_eq!(
            Term::integer(3).to_string(),
            "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>"
        );
    }

    #[test]
    fn iri_validation() {
        assert!(Term::try_iri("http://x/a b").is_err());
        assert!(Term::try_iri("nocolon").is_err());
        assert!(Term::try_iri("http://x/a").is_ok());
    }

    #[test]
    fn date_time_forms() {
        let a = parse_date_time("2021-08-26").unwrap();
        assert_eq!(format_date_time(&a), "2021-08-26T00:00:00Z");
        let b = parse_date_time("2021-08-26T05:00:00-05:00").unwrap();
        assert_eq!(format_date_time(&b), "2021-08-26T10:00:00Z");
    }
}
