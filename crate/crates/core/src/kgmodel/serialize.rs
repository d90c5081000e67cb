//! N-Triples in and out, Turtle out.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::term::quoted;
use super::{ns, ModelError, Term, Triple};

/// One statement per line, lines sorted bytewise, duplicates removed.
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut lines: Vec<String> = triples.into_iter().map(|t| t.to_string()).collect();
    lines.sort_unstable();
    lines.dedup();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ModelError {
        ModelError::NTriples { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn iri(&mut self) -> Result<String, ModelError> {
        let rest = self.rest();
        let end = rest.find('>').ok_or_else(|| self.err("unterminated IRI"))?;
        let iri = &rest[1..end];
        self.pos += end + 1;
        super::term::check_iri(iri).map_err(|_| self.err(format!("invalid IRI <{iri}>")))?;
        Ok(iri.to_string())
    }

    fn term(&mut self) -> Result<Term, ModelError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with('<') {
            return Ok(Term::Iri(self.iri()?));
        }
        if let Some(label) = rest.strip_prefix("_:") {
            let len = label.find([' ', '\t', '.']).unwrap_or(label.len());
            if len == 0 {
                return Err(self.err("empty blank node label"));
            }
            self.pos += 2 + len;
            return Ok(Term::Blank(label[..len].to_string()));
        }
        if rest.starts_with('"') {
            let mut lexical = String::new();
            let mut chars = rest.char_indices().skip(1);
            let close = loop {
                let Some((i, c)) = chars.next() else { return Err(self.err("unterminated literal")) };
                match c {
                    '"' => break i,
                    '\\' => {
                        let (_, e) = chars.next().ok_or_else(|| self.err("dangling escape"))?;
                        match e {
                            'n' => lexical.push('\n'),
                            'r' => lexical.push('\r'),
                            't' => lexical.push('\t'),
                            '"' => lexical.push('"'),
                            '\\' => lexical.push('\\'),
                            'u' | 'U' => {
                                let n = if e == 'u' { 4 } else { 8 };
                                let hex: String = (0..n).filter_map(|_| chars.next().map(|(_, h)| h)).collect();
                                let cp = u32::from_str_radix(&hex, 16)
                                    .ok()
                                    .and_then(char::from_u32)
                                    .ok_or_else(|| self.err("bad unicode escape"))?;
                                lexical.push(cp);
                            }
                            other => return Err(self.err(format!("unknown escape \\{other}"))),
                        }
                    }
                    c => lexical.push(c),
                }
            };
            self.pos += close + 1;
            let rest = self.rest();
            if rest.starts_with("^^") {
                self.pos += 2;
                if !self.rest().starts_with('<') {
                    return Err(self.err("datatype must be an IRI"));
                }
                let datatype = self.iri()?;
                return Ok(Term::Literal { lexical, datatype });
            }
            if rest.starts_with('@') {
                return Err(self.err("language-tagged literals are not supported"));
            }
            return Ok(Term::string(lexical));
        }
        Err(self.err("expected term"))
    }
}

/// Parse an N-Triples document. Blank lines and `#` comments are skipped.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ModelError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut c = Cursor { s: raw, pos: 0, line: k + 1 };
        let s = c.term()?;
        if s.is_literal() {
            return Err(c.err("literal in subject position"));
        }
        let p = c.term()?;
        if p.as_iri().is_none() {
            return Err(c.err("predicate must be an IRI"));
        }
        let o = c.term()?;
        c.skip_ws();
        if !c.rest().starts_with('.') {
            return Err(c.err("expected '.'"));
        }
        c.pos += 1;
        let tail = c.rest().trim();
        if !tail.is_empty() && !tail.starts_with('#') {
            return Err(c.err("trailing content after '.'"));
        }
        out.push(Triple { s, p, o });
    }
    Ok(out)
}

fn is_pn_local(local: &str) -> bool {
    !local.is_empty()
        && !local.ends_with('.')
        && !local.starts_with(['.', '-'])
        && local.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

fn turtle_iri(iri: &str, prefixes: &[(&str, &str)]) -> String {
    let hit = prefixes
        .iter()
        .filter(|(_, nsi)| iri.starts_with(nsi))
        .max_by_key(|(_, nsi)| nsi.len());
    match hit {
        Some((p, nsi)) if is_pn_local(&iri[nsi.len()..]) => format!("{p}:{}", &iri[nsi.len()..]),
        _ => format!("<{iri}>"),
    }
}

fn turtle_term(t: &Term, prefixes: &[(&str, &str)]) -> String {
    match t {
        Term::Iri(i) => turtle_iri(i, prefixes),
        Term::Blank(b) => format!("_:{b}"),
        Term::Literal { lexical, datatype } if datatype == ns::XSD_STRING => quoted(lexical),
        Term::Literal { lexical, datatype } => format!("{}^^{}", quoted(lexical), turtle_iri(datatype, prefixes)),
    }
}

/// Turtle grouped by subject, subjects and predicate-object pairs sorted.
pub fn serialize_turtle<'a>(triples: impl IntoIterator<Item = &'a Triple>, prefixes: &[(&str, &str)]) -> String {
    let mut by_subject: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for t in triples {
        let p = match t.p.as_iri() {
            Some(ns::RDF_TYPE) => "a".to_string(),
            _ => turtle_term(&t.p, prefixes),
        };
        by_subject
            .entry(turtle_term(&t.s, prefixes))
            .or_default()
            .push((p, turtle_term(&t.o, prefixes)));
    }
    let mut out = String::new();
    for (p, nsi) in prefixes {
        let _ = writeln!(out, "@prefix {p}: <{nsi}> .");
    }
    for (s, mut pos) in by_subject {
        pos.sort();
        pos.dedup();
        out.push('\n');
        out.push_str(&s);
        for (k, (p, o)) in pos.iter().enumerate() {
            let sep = if k == 0 { " " } else { " ;\n    " };
            let _ = write!(out, "{sep}{p} {o}");
        }
        out.push_str(" .\n");
    }
    out
}
