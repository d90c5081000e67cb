use super::lexer::{lex, Spanned, Tok};
use super::QueryError;
use crate::kgmodel::{ns, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.s, &self.p, &self.o]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    /// Operator with operands swapped.
    fn flipped(self) -> CompareOp {
        match self {
            CompareOp::Lt => CompareOp::Gt,
            CompareOp::Gt => CompareOp::Lt,
            CompareOp::Le => CompareOp::Ge,
            CompareOp::Ge => CompareOp::Le,
            op => op,
        }
    }
}

/// `?var op constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    pub var: String,
    pub op: CompareOp,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub prefixes: Vec<(String, String)>,
    pub distinct: bool,
    /// `None` for `SELECT *`.
    pub projection: Option<Vec<String>>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
    pub limit: Option<usize>,
}

impl QueryAst {
    /// Distinct pattern variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patterns {
            for v in p.positions().into_iter().filter_map(PatternTerm::var) {
                if !out.iter().any(|x| x == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn projected(&self) -> Vec<String> {
        self.projection.clone().unwrap_or_else(|| self.variables())
    }
}

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "ORDER", "GROUP", "HAVING", "OFFSET",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "FROM", "BASE", "REDUCED", "EXISTS", "NOT", "LOAD", "CLEAR",
    "AS", "COUNT", "SUM", "AVG", "MIN", "MAX", "REGEX", "STR", "LANG",
];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    prefixes: Vec<(String, String)>,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn syntax(&self, message: impl Into<String>) -> QueryError {
        let (line, col) = self.here();
        QueryError::Syntax { line, col, message: message.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unsupported_or(&self, message: &str) -> QueryError {
        if let Some(Tok::Word(w)) = self.peek() {
            if UNSUPPORTED.iter().any(|k| k.eq_ignore_ascii_case(w)) {
                let (line, col) = self.here();
                return QueryError::Unsupported { token: w.clone(), line, col };
            }
        }
        self.syntax(message)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), QueryError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unsupported_or(&format!("expected {what}")))
        }
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> Result<String, QueryError> {
        if prefix == "_" {
            let (line, col) = self.here();
            return Err(QueryError::Unsupported { token: format!("_:{local}"), line, col });
        }
        let ns_iri = self
            .prefixes
            .iter()
            .rev()
            .find(|(p, _)| p == prefix)
            .map(|(_, n)| n.clone())
            .or_else(|| ns::namespace(prefix).map(str::to_string));
        match ns_iri {
            Some(n) => Ok(format!("{n}{local}")),
            None => {
                let (line, col) = self.here();
                Err(QueryError::UnknownPrefix { prefix: prefix.to_string(), line, col })
            }
        }
    }

    fn iri(&mut self) -> Result<Option<String>, QueryError> {
        match self.peek().cloned() {
            Some(Tok::Iri(i)) => {
                self.pos += 1;
                Ok(Some(i))
            }
            Some(Tok::PName { prefix, local }) => {
                let iri = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(Some(iri))
            }
            _ => Ok(None),
        }
    }

    /// Constant term: IRI or literal.
    fn constant(&mut self) -> Result<Option<Term>, QueryError> {
        if let Some(i) = self.iri()? {
            return Ok(Some(Term::Iri(i)));
        }
        let (line, col) = self.here();
        let lit = |lex: String, dt: &str| {
            Term::typed(lex, dt).map_err(|e| QueryError::Syntax { line, col, message: e.to_string() })
        };
        let t = match self.peek().cloned() {
            Some(Tok::Integer(s)) => lit(s, ns::XSD_INTEGER)?,
            Some(Tok::Decimal(s)) => lit(s, ns::XSD_DECIMAL)?,
            Some(Tok::Double(s)) => lit(s, ns::XSD_DOUBLE)?,
            Some(Tok::Word(w)) if w == "true" || w == "false" => lit(w, ns::XSD_BOOLEAN)?,
            Some(Tok::Str(s)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Caret2) {
                    self.pos += 1;
                    let dt = self.iri()?.ok_or_else(|| self.syntax("expected datatype IRI"))?;
                    return Ok(Some(lit(s, &dt)?));
                }
                if self.peek() == Some(&Tok::At) {
                    let (line, col) = self.here();
                    return Err(QueryError::Unsupported { token: "@".into(), line, col });
                }
                return Ok(Some(Term::string(s)));
            }
            _ => return Ok(None),
        };
        self.pos += 1;
        Ok(Some(t))
    }

    fn term_or_var(&mut self, what: &str) -> Result<PatternTerm, QueryError> {
        if let Some(Tok::Var(v)) = self.peek().cloned() {
            self.pos += 1;
            return Ok(PatternTerm::Var(v));
        }
        match self.constant()? {
            Some(t) => Ok(PatternTerm::Term(t)),
            None => Err(self.unsupported_or(&format!("expected {what}"))),
        }
    }

    fn verb(&mut self) -> Result<PatternTerm, QueryError> {
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "a") {
            self.pos += 1;
            return Ok(PatternTerm::Term(Term::iri(ns::RDF_TYPE)));
        }
        let t = self.term_or_var("predicate")?;
        if let PatternTerm::Term(Term::Literal { .. }) = t {
            return Err(self.syntax("literal in predicate position"));
        }
        Ok(t)
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let s = self.term_or_var("subject")?;
        if let PatternTerm::Term(Term::Literal { .. }) = s {
            return Err(self.syntax("literal in subject position"));
        }
        loop {
            let p = self.verb()?;
            loop {
                let o = self.term_or_var("object")?;
                out.push(TriplePattern { s: s.clone(), p: p.clone(), o });
                if self.peek() != Some(&Tok::Comma) {
                    break;
                }
                self.pos += 1;
            }
            if self.peek() != Some(&Tok::Semi) {
                break;
            }
            while self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBrace)) {
                break;
            }
        }
        Ok(())
    }

    fn filter(&mut self) -> Result<Filter, QueryError> {
        self.expect(Tok::LParen, "'(' after FILTER")?;
        let lhs = self.term_or_var("filter operand")?;
        let op = match self.next() {
            Some(Tok::Lt) => CompareOp::Lt,
            Some(Tok::Gt) => CompareOp::Gt,
            Some(Tok::Le) => CompareOp::Le,
            Some(Tok::Ge) => CompareOp::Ge,
            Some(Tok::Eq) => CompareOp::Eq,
            Some(Tok::Ne) => CompareOp::Ne,
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected comparison operator"));
            }
        };
        let rhs = self.term_or_var("filter operand")?;
        self.expect(Tok::RParen, "')'")?;
        match (lhs, rhs) {
            (PatternTerm::Var(var), PatternTerm::Term(value)) => Ok(Filter { var, op, value }),
            (PatternTerm::Term(value), PatternTerm::Var(var)) => Ok(Filter { var, op: op.flipped(), value }),
            _ => {
                let (line, col) = self.here();
                Err(QueryError::Unsupported { token: "FILTER".into(), line, col })
            }
        }
    }

    fn query(&mut self) -> Result<QueryAst, QueryError> {
        while self.eat_keyword("PREFIX") {
            let (prefix, local) = match self.next() {
                Some(Tok::PName { prefix, local }) if local.is_empty() => (prefix, local),
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax("expected 'prefix:' after PREFIX"));
                }
            };
            let _ = local;
            match self.next() {
                Some(Tok::Iri(i)) => self.prefixes.push((prefix, i)),
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax("expected <iri> in PREFIX"));
                }
            }
        }
        if !self.eat_keyword("SELECT") {
            return Err(self.unsupported_or("expected SELECT"));
        }
        let distinct = self.eat_keyword("DISTINCT");
        let projection = if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            None
        } else {
            let mut vars = Vec::new();
            while let Some(Tok::Var(v)) = self.peek().cloned() {
                self.pos += 1;
                vars.push(v);
            }
            if vars.is_empty() {
                return Err(self.unsupported_or("expected '*' or variables"));
            }
            Some(vars)
        };
        if !self.eat_keyword("WHERE") {
            let (line, col) = self.here();
            if self.peek() == Some(&Tok::LBrace) {
                return Err(QueryError::MissingWhere { line, col });
            }
            return Err(match self.unsupported_or("") {
                e @ QueryError::Unsupported { .. } => e,
                _ => QueryError::MissingWhere { line, col },
            });
        }
        self.expect(Tok::LBrace, "'{'")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Dot) => self.pos += 1,
                None => return Err(self.syntax("expected '}'")),
                _ if self.is_keyword("FILTER") => {
                    self.pos += 1;
                    filters.push(self.filter()?);
                }
                _ => {
                    self.triples(&mut patterns)?;
                    if !matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBrace)) {
                        if self.is_keyword("FILTER") {
                            continue;
                        }
                        return Err(self.unsupported_or("expected '.' or '}'"));
                    }
                }
            }
        }
        let mut limit = None;
        if self.eat_keyword("LIMIT") {
            match self.next() {
                Some(Tok::Integer(n)) => {
                    limit = Some(n.parse().map_err(|_| self.syntax("bad LIMIT"))?);
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax("expected integer after LIMIT"));
                }
            }
        }
        if self.pos < self.toks.len() {
            return Err(self.unsupported_or("unexpected trailing token"));
        }
        let ast = QueryAst { prefixes: self.prefixes.clone(), distinct, projection, patterns, filters, limit };
        let vars = ast.variables();
        for v in ast.projection.iter().flatten().chain(ast.filters.iter().map(|f| &f.var)) {
            if !vars.contains(v) {
                return Err(QueryError::UnboundVariable(v.clone()));
            }
        }
        Ok(ast)
    }
}

/// Parse the supported SPARQL subset.
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    let toks = lex(text)?;
    let end_line = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser { toks, pos: 0, prefixes: Vec::new(), end: (end_line, end_col) };
    p.query()
}
