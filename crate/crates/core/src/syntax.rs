//! Tokenizer shared by the constraint DSL and the query language.

use num_bigint::BigInt;

use crate::error::{CqaError, Result};
use crate::model::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum CmpOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Gt,
        CmpOp::Le,
        CmpOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }

    /// Order comparisons are only defined on numbers.
    pub fn is_order(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
        }
    }

    /// Evaluates the comparison; `None` when the operands are not comparable
    /// (different domains, or an order comparison on symbols).
    pub fn eval(self, lhs: &Value, rhs: &Value) -> Option<bool> {
        match (self, lhs, rhs) {
            (CmpOp::Eq, a, b) if a.ty() == b.ty() => Some(a == b),
            (CmpOp::Ne, a, b) if a.ty() == b.ty() => Some(a != b),
            (op, Value::Num(a), Value::Num(b)) => Some(match op {
                CmpOp::Lt => a < b,
                CmpOp::Gt => a > b,
                CmpOp::Le => a <= b,
                CmpOp::Ge => a >= b,
                CmpOp::Eq | CmpOp::Ne => unreachable!(),
            }),
            _ => None,
        }
    }
}

impl std::fmt::Display for CmpOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Int(BigInt),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Amp,
    Pipe,
    Bang,
    Arrow,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::Int(n) => format!("number {n}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Cmp(op) => format!("`{op}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Tokenizes `text`; `line` is the 1-based line the text starts on.
pub(crate) fn tokenize(text: &str, line: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = line;
    let mut line_start = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i - line_start + 1;
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
        if c == '\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        match c {
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            ',' => push(&mut out, Tok::Comma),
            '.' => push(&mut out, Tok::Dot),
            ':' => push(&mut out, Tok::Colon),
            '&' => push(&mut out, Tok::Amp),
            '|' => push(&mut out, Tok::Pipe),
            '=' => push(&mut out, Tok::Cmp(CmpOp::Eq)),
            '!' if next == Some('=') => {
                push(&mut out, Tok::Cmp(CmpOp::Ne));
                i += 1;
            }
            '!' => push(&mut out, Tok::Bang),
            '<' if next == Some('=') => {
                push(&mut out, Tok::Cmp(CmpOp::Le));
                i += 1;
            }
            '<' if next == Some('>') => {
                push(&mut out, Tok::Cmp(CmpOp::Ne));
                i += 1;
            }
            '<' => push(&mut out, Tok::Cmp(CmpOp::Lt)),
            '>' if next == Some('=') => {
                push(&mut out, Tok::Cmp(CmpOp::Ge));
                i += 1;
            }
            '>' => push(&mut out, Tok::Cmp(CmpOp::Gt)),
            '-' if next == Some('>') => {
                push(&mut out, Tok::Arrow);
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                if c == '-' {
                    i += 1;
                }
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(CqaError::syntax(line, column, "expected digits after `-`"));
                }
                if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    return Err(CqaError::syntax(
                        line,
                        column,
                        "identifiers cannot start with a digit",
                    ));
                }
                let text: String = chars[start..i].iter().collect();
                push(&mut out, Tok::Int(text.parse().expect("digits")));
                continue;
            }
            '\'' | '"' => {
                let quote = c;
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(CqaError::syntax(line, column, "unterminated string"))
                        }
                        Some(&q) if q == quote && chars.get(i + 1) == Some(&quote) => {
                            s.push(quote);
                            i += 2;
                        }
                        Some(&q) if q == quote => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                push(&mut out, Tok::Str(s));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                continue;
            }
            other => {
                return Err(CqaError::syntax(
                    line,
                    column,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
        i += 1;
    }
    let column = chars.len() - line_start + 1;
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Cursor over a token stream.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Spanned>) -> Cursor {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> CqaError {
        let here = self.here();
        CqaError::syntax(here.line, here.column, message)
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn at_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_operators_and_literals() {
        let toks: Vec<Tok> = tokenize("exists x. R(x,'a b',-3) & x != y -> !z <= 4", 1)
            .unwrap()
            .into_iter()
            .map(|s| s.tok)
            .collect();
        assert!(toks.contains(&Tok::Str("a b".into())));
        assert!(toks.contains(&Tok::Int((-3).into())));
        assert!(toks.contains(&Tok::Cmp(CmpOp::Ne)));
        assert!(toks.contains(&Tok::Arrow));
        assert!(toks.contains(&Tok::Bang));
        assert!(toks.contains(&Tok::Cmp(CmpOp::Le)));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }

    #[test]
    fn quote_escapes() {
        let toks = tokenize("'it''s' \"q\"", 1).unwrap();
        assert_eq!(toks[0].tok, Tok::Str("it's".into()));
        assert_eq!(toks[1].tok, Tok::Str("q".into()));
    }

    #[test]
    fn reports_column() {
        match tokenize("R(x) $", 4) {
            Err(CqaError::Syntax { at, .. }) => assert_eq!((at.line, at.column), (4, 6)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_semantics() {
        let (a, b) = (Value::num(3), Value::num(5));
        assert_eq!(CmpOp::Lt.eval(&a, &b), Some(true));
        assert_eq!(CmpOp::Ge.eval(&a, &b), Some(false));
        assert_eq!(CmpOp::Lt.eval(&Value::sym("a"), &Value::sym("b")), None);
        assert_eq!(CmpOp::Eq.eval(&Value::sym("5"), &Value::num(5)), None);
        for op in CmpOp::ALL {
            assert_eq!(op.eval(&a, &b).map(|x| !x), op.negated().eval(&a, &b));
        }
    }
}
