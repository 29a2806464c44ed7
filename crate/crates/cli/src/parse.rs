//! Reader for `.th` theory files, terms and substitutions.
//!
//! ```text
//! theory Monoid
//! op e : 0
//! op m : 2
//! eq [1] m(e(),x0) = x0
//! rw [3] m(m(x0,x1),x2) -> m(x0,m(x1,x2))
//! ```

use std::fmt;

use lawvere_core::term::{
    check_term, Equation, RewriteSystem, Rule, Signature, Sub, Term, TheoryPresentation,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

/// A cursor over one line.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.text[..pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> PResult<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> PResult<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit())))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn number(&mut self) -> PResult<usize> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        self.pos += len;
        rest[..len]
            .parse()
            .map_err(|_| self.error_at(start, "number too large"))
    }

    fn finish(&mut self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn as_variable(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn term(cur: &mut Cursor<'_>, sig: &Signature, ctx: usize) -> PResult<Term> {
    let (start, name) = cur.ident()?;
    if let Some(k) = as_variable(name) {
        if k >= ctx {
            return Err(cur.error_at(start, format!("variable x{k} out of scope in context {ctx}")));
        }
        return Ok(Term::Var(k));
    }
    let arity = sig
        .arity(name)
        .ok_or_else(|| cur.error_at(start, format!("unknown operation `{name}`")))?;
    cur.expect("(")?;
    let mut args = Vec::new();
    if !cur.eat(")") {
        loop {
            args.push(term(cur, sig, ctx)?);
            if cur.eat(")") {
                break;
            }
            cur.expect(",")?;
        }
    }
    if args.len() != arity {
        return Err(cur.error_at(
            start,
            format!("`{name}` expects {arity} arguments, found {}", args.len()),
        ));
    }
    Ok(Term::App(name.to_string(), args))
}

fn context(cur: &mut Cursor<'_>) -> PResult<usize> {
    cur.expect("[")?;
    let n = cur.number()?;
    cur.expect("]")?;
    Ok(n)
}

/// Parses a single term in context `ctx`.
pub fn parse_term(text: &str, sig: &Signature, ctx: usize) -> PResult<Term> {
    let mut cur = Cursor::new(text, 1);
    let t = term(&mut cur, sig, ctx)?;
    cur.finish()?;
    Ok(t)
}

/// Parses a substitution written `[M](T1,...,Tn)`, the form it is printed in.
pub fn parse_sub(text: &str, sig: &Signature) -> PResult<Sub> {
    let mut cur = Cursor::new(text, 1);
    let dom = context(&mut cur)?;
    cur.expect("(")?;
    let mut comps = Vec::new();
    if !cur.eat(")") {
        loop {
            comps.push(term(&mut cur, sig, dom)?);
            if cur.eat(")") {
                break;
            }
            cur.expect(",")?;
        }
    }
    cur.finish()?;
    Sub::new(dom, comps).map_err(|e| cur.error(e.to_string()))
}

pub fn parse_theory(text: &str) -> PResult<TheoryPresentation> {
    let mut pres: Option<TheoryPresentation> = None;
    let mut rules = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(content, line_no);
        if cur.at_end() {
            continue;
        }
        let (kw_at, keyword) = cur.ident()?;
        let Some(pres) = pres.as_mut() else {
            if keyword != "theory" {
                return Err(cur.error_at(kw_at, "expected `theory NAME` header"));
            }
            let (_, name) = cur.ident()?;
            cur.finish()?;
            pres = Some(TheoryPresentation::free(name, Signature::new()));
            continue;
        };
        match keyword {
            "op" => {
                let (at, name) = cur.ident()?;
                if as_variable(name).is_some() {
                    return Err(cur.error_at(at, format!("`{name}` is reserved for variables")));
                }
                cur.expect(":")?;
                let arity = cur.number()?;
                cur.finish()?;
                pres.signature
                    .add_op(name, arity)
                    .map_err(|e| cur.error_at(at, e.to_string()))?;
            }
            "eq" | "rw" => {
                let ctx = context(&mut cur)?;
                let lhs = term(&mut cur, &pres.signature, ctx)?;
                cur.expect(if keyword == "eq" { "=" } else { "->" })?;
                let rhs = term(&mut cur, &pres.signature, ctx)?;
                cur.finish()?;
                let eq = Equation { ctx, lhs, rhs };
                if keyword == "rw" {
                    rules.push((line_no, Rule {
                        ctx,
                        lhs: eq.lhs.clone(),
                        rhs: eq.rhs.clone(),
                    }));
                }
                if !pres.equations.contains(&eq) {
                    pres.equations.push(eq);
                }
            }
            "theory" => return Err(cur.error_at(kw_at, "duplicate `theory` header")),
            other => return Err(cur.error_at(kw_at, format!("unknown directive `{other}`"))),
        }
    }
    let mut pres = pres.ok_or(ParseError {
        line: last_line.max(1),
        column: 1,
        message: "missing `theory NAME` header".into(),
    })?;
    if !rules.is_empty() {
        let first_line = rules[0].0;
        let rws = RewriteSystem::new(rules.into_iter().map(|(_, r)| r).collect()).map_err(|e| {
            ParseError {
                line: first_line,
                column: 1,
                message: e.to_string(),
            }
        })?;
        pres.rewrites = Some(rws);
    }
    for eq in &pres.equations {
        for t in [&eq.lhs, &eq.rhs] {
            check_term(t, &pres.signature, eq.ctx).map_err(|e| ParseError {
                line: last_line,
                column: 1,
                message: e.to_string(),
            })?;
        }
    }
    Ok(pres)
}
