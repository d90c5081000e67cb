use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Iri(String),
    PName { prefix: String, local: String },
    Var(String),
    /// Quoted string, with optional `^^` datatype token following.
    Str(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Semi,
    Comma,
    Star,
    Caret2,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    At,
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

pub(super) fn lex(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! adv {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok: Tok| out.push(Spanned { tok, line: l0, col: c0 });
        match c {
            c if c.is_whitespace() => adv!(1),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    adv!(1);
                }
            }
            '{' => { push(&mut out, Tok::LBrace); adv!(1) }
            '}' => { push(&mut out, Tok::RBrace); adv!(1) }
            '(' => { push(&mut out, Tok::LParen); adv!(1) }
            ')' => { push(&mut out, Tok::RParen); adv!(1) }
            ';' => { push(&mut out, Tok::Semi); adv!(1) }
            ',' => { push(&mut out, Tok::Comma); adv!(1) }
            '*' => { push(&mut out, Tok::Star); adv!(1) }
            '@' => { push(&mut out, Tok::At); adv!(1) }
            '=' => { push(&mut out, Tok::Eq); adv!(1) }
            '^' if chars.get(i + 1) == Some(&'^') => { push(&mut out, Tok::Caret2); adv!(2) }
            '!' if chars.get(i + 1) == Some(&'=') => { push(&mut out, Tok::Ne); adv!(2) }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(&mut out, Tok::Ge);
                    adv!(2)
                } else {
                    push(&mut out, Tok::Gt);
                    adv!(1)
                }
            }
            '<' => {
                let next = chars.get(i + 1).copied();
                let operator = match next {
                    None => true,
                    Some(n) => n.is_whitespace() || n == '=' || n == '?' || n == '$' || n == '"' || n.is_ascii_digit() || n == '-',
                };
                if operator {
                    if next == Some('=') {
                        push(&mut out, Tok::Le);
                        adv!(2)
                    } else {
                        push(&mut out, Tok::Lt);
                        adv!(1)
                    }
                } else {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j] != '>' && !chars[j].is_whitespace() {
                        j += 1;
                    }
                    if j >= chars.len() || chars[j] != '>' {
                        return Err(QueryError::UnterminatedIri { line: l0, col: c0 });
                    }
                    let iri: String = chars[i + 1..j].iter().collect();
                    push(&mut out, Tok::Iri(iri));
                    adv!(j + 1 - i)
                }
            }
            '?' | '$' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(QueryError::Syntax { line: l0, col: c0, message: "empty variable name".into() });
                }
                push(&mut out, Tok::Var(chars[i + 1..j].iter().collect()));
                adv!(j - i)
            }
            '"' | '\'' => {
                let quote = c;
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(QueryError::Syntax { line: l0, col: c0, message: "unterminated string".into() })
                        }
                        Some(&q) if q == quote => break,
                        Some('\\') => {
                            let e = chars.get(j + 1).copied().unwrap_or(' ');
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                other => other,
                            });
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                push(&mut out, Tok::Str(s));
                adv!(j + 1 - i)
            }
            c if c.is_ascii_digit() || ((c == '-' || c == '+' || c == '.') && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i + 1;
                let (mut dot, mut exp) = (c == '.', false);
                while j < chars.len() {
                    let d = chars[j];
                    if d.is_ascii_digit() {
                        j += 1;
                    } else if d == '.' && !dot && !exp && chars.get(j + 1).is_some_and(|n| n.is_ascii_digit()) {
                        dot = true;
                        j += 1;
                    } else if (d == 'e' || d == 'E') && !exp {
                        exp = true;
                        j += 1;
                        if matches!(chars.get(j), Some('+') | Some('-')) {
                            j += 1;
                        }
                    } else {
                        break;
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let tok = if exp {
                    Tok::Double(lexeme)
                } else if dot {
                    Tok::Decimal(lexeme)
                } else {
                    Tok::Integer(lexeme)
                };
                push(&mut out, tok);
                adv!(j - i)
            }
            c if c.is_alphabetic() || c == ':' || c == '_' => {
                let mut j = i;
                while j < chars.len() && (is_pn_char(chars[j]) || chars[j] == ':') {
                    j += 1;
                }
                // A local name never ends in '.', which terminates the statement.
                while j > i + 1 && chars[j - 1] == '.' {
                    j -= 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.split_once(':') {
                    Some((prefix, local)) => Tok::PName { prefix: prefix.to_string(), local: local.to_string() },
                    None => Tok::Word(word),
                };
                push(&mut out, tok);
                adv!(j - i)
            }
            '.' => { push(&mut out, Tok::Dot); adv!(1) }
            other => {
                return Err(QueryError::Syntax { line: l0, col: c0, message: format!("unexpected character {other:?}") });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn pname_before_dot() {
        assert_eq!(
            toks("kwgr:Earth.NA.US.USA.19_1 ."),
            vec![Tok::PName { prefix: "kwgr".into(), local: "Earth.NA.US.USA.19_1".into() }, Tok::Dot]
        );
        assert_eq!(
            toks("kwg-ont:S2Cell."),
            vec![Tok::PName { prefix: "kwg-ont".into(), local: "S2Cell".into() }, Tok::Dot]
        );
    }

    #[test]
    fn iri_versus_less_than() {
        assert_eq!(toks("<http://x/a>"), vec![Tok::Iri("http://x/a".into())]);
        assert_eq!(toks("?x < 5"), vec![Tok::Var("x".into()), Tok::Lt, Tok::Integer("5".into())]);
        assert_eq!(toks("?x <= 5"), vec![Tok::Var("x".into()), Tok::Le, Tok::Integer("5".into())]);
        assert!(matches!(lex("<http://x/a"), Err(QueryError::UnterminatedIri { line: 1, col: 1 })));
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("1 -2.5 3e2 .5"), vec![
            Tok::Integer("1".into()),
            Tok::Decimal("-2.5".into()),
            Tok::Double("3e2".into()),
            Tok::Decimal(".5".into()),
        ]);
    }

    #[test]
    fn positions() {
        let t = lex("SELECT *\n  WHERE").unwrap();
        assert_eq!((t[2].line, t[2].col), (2, 3));
    }
}
