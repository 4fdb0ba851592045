//! Text formats for queries, instances and schemas.
//!
//! ```text
//! query    := "(" [var ("," var)*] ")" ("<-" | "←") atom ("," atom)* ["."]
//! atom     := Rel "(" [var ("," var)*] ")"
//! fact     := Rel "(" [const ("," const)*] ")" ["."]
//! schema   := (Rel "/" arity)*
//! ```
//!
//! Relation names start with an uppercase letter; variables and constants with a
//! lowercase letter. `#` and `%` start a comment that runs to the end of the line.

use crate::error::{Error, Result};
use crate::instance::{Constant, Instance};
use crate::query::{validate, Atom, ConjunctiveQuery, Variable};
use crate::schema::Schema;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    Period,
    Slash,
    Upper(String),
    Lower(String),
    Number(usize),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Period => "`.`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Upper(s) | Tok::Lower(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' | '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '(' | ')' | ',' | '.' | '/' | '←' => {
                bump(&mut chars);
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Period,
                    '/' => Tok::Slash,
                    _ => Tok::Arrow,
                };
                out.push((tok, pos));
            }
            '<' => {
                bump(&mut chars);
                if chars.peek() == Some(&'-') {
                    bump(&mut chars);
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(Error::syntax(pos.line, pos.column, "expected `<-`"));
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                let first = word.chars().next().unwrap_or('_');
                let tok = if first.is_ascii_uppercase() {
                    Tok::Upper(word)
                } else if first.is_ascii_lowercase() {
                    Tok::Lower(word)
                } else if word.chars().all(|c| c.is_ascii_digit()) {
                    Tok::Number(word.parse().map_err(|_| {
                        Error::syntax(
                            pos.line,
                            pos.column,
                            format!("number `{word}` out of range"),
                        )
                    })?)
                } else {
                    return Err(Error::syntax(
                        pos.line,
                        pos.column,
                        format!("invalid identifier `{word}`"),
                    ));
                };
                out.push((tok, pos));
            }
            other => {
                return Err(Error::syntax(
                    pos.line,
                    pos.column,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        let toks = lex(text)?;
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            toks,
            at: 0,
            end: Pos { line, column },
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn error(&self, expected: &str) -> Error {
        let pos = self.pos();
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), Tok::describe);
        Error::syntax(
            pos.line,
            pos.column,
            format!("expected {expected}, found {found}"),
        )
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn upper(&mut self, what: &str) -> Result<(String, Pos)> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Upper(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok((s, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    fn lower(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Lower(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    /// `"(" [lower ("," lower)*] ")"`
    fn lower_list(&mut self, what: &str) -> Result<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut items = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(items);
        }
        loop {
            items.push(self.lower(what)?);
            if self.eat(&Tok::RParen) {
                return Ok(items);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error("`,` or `)`"));
            }
        }
    }

    fn query(&mut self, schema: Option<&Schema>) -> Result<ConjunctiveQuery> {
        let start = self.pos();
        let head = self.lower_list("a variable")?;
        if !self.eat(&Tok::Arrow) {
            return Err(self.error("`<-`"));
        }
        let mut body = Vec::new();
        let mut positions = Vec::new();
        loop {
            let (relation, pos) = self.upper("a relation name")?;
            let args = self.lower_list("a variable")?;
            let args: Vec<Variable> = args.into_iter().map(Variable::new).collect::<Result<_>>()?;
            if let Some(schema) = schema {
                match schema.arity(&relation) {
                    None => return Err(Error::UnknownRelation(relation)),
                    Some(expected) if expected != args.len() => {
                        return Err(Error::ArityMismatch {
                            relation,
                            expected,
                            found: args.len(),
                        })
                    }
                    Some(_) => {}
                }
            }
            body.push(Atom { relation, args });
            positions.push(pos);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.eat(&Tok::Period);
        let head = head
            .into_iter()
            .map(Variable::new)
            .collect::<Result<Vec<_>>>()?;
        ConjunctiveQuery::new(head, body).map_err(|e| match e {
            Error::ArityMismatch { .. } | Error::HeadVariableNotInBody(_) => e,
            other => Error::syntax(start.line, start.column, other.to_string()),
        })
    }
}

/// Parses exactly one query.
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery> {
    parse_query_impl(text, None)
}

/// Parses one query and checks every atom against `schema`.
pub fn parse_query_with_schema(text: &str, schema: &Schema) -> Result<ConjunctiveQuery> {
    parse_query_impl(text, Some(schema))
}

fn parse_query_impl(text: &str, schema: Option<&Schema>) -> Result<ConjunctiveQuery> {
    let mut p = Parser::new(text)?;
    let q = p.query(schema)?;
    if !p.at_end() {
        return Err(p.error("end of query"));
    }
    if let Some(schema) = schema {
        if let Some(e) = validate(&q, schema).first_error() {
            return Err(e);
        }
    }
    Ok(q)
}

/// Parses a sequence of queries, as found in a query file.
pub fn parse_queries(text: &str, schema: Option<&Schema>) -> Result<Vec<ConjunctiveQuery>> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(p.query(schema)?);
    }
    Ok(out)
}

/// Parses whitespace-separated facts such as `R(a, b). L(a).`; duplicates collapse.
pub fn parse_instance(text: &str, schema: Option<&Schema>) -> Result<Instance> {
    let mut p = Parser::new(text)?;
    let mut instance = Instance::new();
    while !p.at_end() {
        let (relation, pos) = p.upper("a relation name")?;
        let args = p
            .lower_list("a constant")?
            .into_iter()
            .map(Constant::new)
            .collect::<Result<Vec<_>>>()?;
        if let Some(schema) = schema {
            match schema.arity(&relation) {
                None => return Err(Error::UnknownRelation(relation)),
                Some(expected) if expected != args.len() => {
                    return Err(Error::ArityMismatch {
                        relation,
                        expected,
                        found: args.len(),
                    })
                }
                Some(_) => {}
            }
        }
        instance.insert(relation, args).map_err(|e| match e {
            Error::ArityMismatch { .. } => e,
            other => Error::syntax(pos.line, pos.column, other.to_string()),
        })?;
        p.eat(&Tok::Period);
    }
    Ok(instance)
}

/// Parses schema entries of the form `R/2`, one per line (any whitespace or commas between).
pub fn parse_schema(text: &str) -> Result<Schema> {
    let mut p = Parser::new(text)?;
    let mut schema = Schema::new();
    while !p.at_end() {
        let (name, _) = p.upper("a relation name")?;
        p.expect(Tok::Slash)?;
        let arity = match p.peek() {
            Some(Tok::Number(n)) => *n,
            _ => return Err(p.error("an arity")),
        };
        p.at += 1;
        schema.add(name, arity)?;
        p.eat(&Tok::Comma);
    }
    Ok(schema)
}
