//! Concrete ASCII syntax.
//!
//! ```text
//! formula  ::= A | Bot | ~F | F /\ F | F \/ F | F -> F | (F)
//!              (precedence ~ > /\ > \/ > ->; -> right, /\ and \/ left)
//! term     ::= x | \x:F. term | mu a:F. term | in1[F] term | in2[F] term
//!            | <term, term> | (term elim ... elim) | (a term) | {term}
//! elim     ::= term | p1 | p2 | [x.term | y.term] | [[elim]]
//! unit     ::= [ctx decl, ..., decl;] term [: F]
//! decl     ::= x:F | a:~F          (a leading ~ over the whole type declares a classical variable)
//! ```
//!
//! Binder bodies are single terms, so `(\x:A. x y)` is the redex
//! `((\x:A. x) y)`. Atoms start with an uppercase letter, variables with a
//! lowercase one. `#` starts a comment that runs to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::scenario::Scenario;
use crate::term::{Elim, MarkId, Side, Term, Var};
use crate::typing::TypingContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("variable `{0}` is classical but used as an intuitionistic variable")]
    ClassicalAsIntuitionistic(String),
    #[error("bad naming form: {0}")]
    Shape(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
}

/// A parsed input file: context, term and an optional expected type.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub ctx: TypingContext,
    pub term: Term,
    pub expected: Option<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Backslash,
    Colon,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    Pipe,
    Arrow,
    AndOp,
    OrOp,
    Tilde,
    Semi,
    Equals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lower(s) | Tok::Upper(s) => return write!(f, "`{s}`"),
            Tok::Backslash => "`\\`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::AndOp => "`/\\`",
            Tok::OrOp => "`\\/`",
            Tok::Tilde => "`~`",
            Tok::Semi => "`;`",
            Tok::Equals => "`=`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '\\' if chars.get(i + 1) == Some(&'/') => {
                adv = 2;
                Tok::OrOp
            }
            '\\' => Tok::Backslash,
            '/' if chars.get(i + 1) == Some(&'\\') => {
                adv = 2;
                Tok::AndOp
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::Arrow
            }
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '|' => Tok::Pipe,
            '~' => Tok::Tilde,
            ';' => Tok::Semi,
            '=' => Tok::Equals,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                adv = j - start;
                let word: String = chars[start..j].iter().collect();
                if c.is_ascii_uppercase() {
                    Tok::Upper(word)
                } else {
                    Tok::Lower(word)
                }
            }
            other => {
                return Err(ParseError {
                    line: l,
                    col: cl,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                })
            }
        };
        out.push(Lexed {
            tok,
            line: l,
            col: cl,
        });
        i += adv;
        col += adv;
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["mu", "in1", "in2", "p1", "p2", "ctx"];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarKind {
    Intu,
    Class,
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    scope: Vec<(String, VarKind)>,
    lenient: bool,
    next_mark: u32,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, lenient: bool) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            scope: Vec::new(),
            lenient,
            next_mark: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let l = &self.toks[self.pos];
        ParseError {
            line: l.line,
            col: l.col,
            kind,
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        self.err_here(ParseErrorKind::Syntax(format!(
            "expected {what}, found {}",
            self.peek()
        )))
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Lower(w) if w == kw)
    }

    fn binder_name(&mut self) -> PResult<Var> {
        match self.peek().clone() {
            Tok::Lower(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.unexpected("a variable name")),
        }
    }

    fn lookup(&self, x: &str) -> Option<VarKind> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, k)| *k)
    }

    // formulas

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::OrOp {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::AndOp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Upper(w) => {
                self.bump();
                Ok(if w == "Bot" {
                    Formula::Bottom
                } else {
                    Formula::Atom(w)
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // terms

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Backslash => {
                self.bump();
                let x = self.binder_name()?;
                self.expect(Tok::Colon)?;
                let ty = self.formula()?;
                self.expect(Tok::Dot)?;
                self.scope.push((x.clone(), VarKind::Intu));
                let body = self.term();
                self.scope.pop();
                Ok(Term::lam(x, ty, body?))
            }
            Tok::Lower(w) if w == "mu" => {
                self.bump();
                let a = self.binder_name()?;
                self.expect(Tok::Colon)?;
                let ty = self.formula()?;
                self.expect(Tok::Dot)?;
                self.scope.push((a.clone(), VarKind::Class));
                let body = self.term();
                self.scope.pop();
                Ok(Term::mu(a, ty, body?))
            }
            Tok::Lower(w) if w == "in1" || w == "in2" => {
                self.bump();
                let side = if w == "in1" { Side::Left } else { Side::Right };
                self.expect(Tok::LBrack)?;
                let ty = self.formula()?;
                self.expect(Tok::RBrack)?;
                let body = self.term()?;
                Ok(Term::inj(side, ty, body))
            }
            Tok::Lower(w) if !KEYWORDS.contains(&w.as_str()) => {
                let at = self.pos;
                self.bump();
                match self.lookup(&w) {
                    Some(VarKind::Intu) => Ok(Term::Var(w)),
                    Some(VarKind::Class) => {
                        self.pos = at;
                        Err(self.err_here(ParseErrorKind::ClassicalAsIntuitionistic(w)))
                    }
                    None if self.lenient => Ok(Term::Var(w)),
                    None => {
                        self.pos = at;
                        Err(self.err_here(ParseErrorKind::Unbound(w)))
                    }
                }
            }
            Tok::LAngle => {
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RAngle)?;
                Ok(Term::pair(a, b))
            }
            Tok::LBrace => {
                self.bump();
                let id = MarkId(self.next_mark);
                self.next_mark += 1;
                let t = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::mark(id, t))
            }
            Tok::LParen => {
                self.bump();
                // naming form: the head is a classical variable
                if let Tok::Lower(w) = self.peek().clone() {
                    if self.lookup(&w) == Some(VarKind::Class) {
                        let at = self.pos;
                        self.bump();
                        let mut elims = Vec::new();
                        while *self.peek() != Tok::RParen {
                            elims.push(self.elim()?);
                        }
                        self.bump();
                        return match elims.pop() {
                            Some(Elim::Term(arg)) if elims.is_empty() => Ok(Term::name(w, arg)),
                            _ => {
                                self.pos = at;
                                Err(self.err_here(ParseErrorKind::Shape(format!(
                                    "classical variable `{w}` must be applied to exactly one term"
                                ))))
                            }
                        };
                    }
                }
                let head = self.term()?;
                let mut elims = Vec::new();
                while *self.peek() != Tok::RParen {
                    if *self.peek() == Tok::Eof {
                        return Err(self.unexpected("`)`"));
                    }
                    elims.push(self.elim()?);
                }
                self.bump();
                Ok(Term::spine(head, elims))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn elim(&mut self) -> PResult<Elim> {
        match self.peek().clone() {
            Tok::Lower(w) if w == "p1" || w == "p2" => {
                self.bump();
                Ok(Elim::Proj(if w == "p1" { Side::Left } else { Side::Right }))
            }
            Tok::LBrack if *self.peek_at(1) == Tok::LBrack => {
                self.bump();
                self.bump();
                let inner = self.elim()?;
                if matches!(inner, Elim::Boxed(_)) {
                    return Err(self.err_here(ParseErrorKind::Syntax("nested boxes".into())));
                }
                self.expect(Tok::RBrack)?;
                self.expect(Tok::RBrack)?;
                Ok(Elim::boxed(inner))
            }
            Tok::LBrack => {
                self.bump();
                let (x1, n1) = self.branch()?;
                self.expect(Tok::Pipe)?;
                let (x2, n2) = self.branch()?;
                self.expect(Tok::RBrack)?;
                Ok(Elim::Case(x1, n1, x2, n2))
            }
            _ => Ok(Elim::Term(self.term()?)),
        }
    }

    fn branch(&mut self) -> PResult<(Var, Term)> {
        let x = self.binder_name()?;
        self.expect(Tok::Dot)?;
        self.scope.push((x.clone(), VarKind::Intu));
        let body = self.term();
        self.scope.pop();
        Ok((x, body?))
    }

    fn context(&mut self) -> PResult<TypingContext> {
        let mut ctx = TypingContext::new();
        if !self.is_kw("ctx") {
            return Ok(ctx);
        }
        self.bump();
        if *self.peek() == Tok::Semi {
            self.bump();
            return Ok(ctx);
        }
        loop {
            let at = self.pos;
            let x = self.binder_name()?;
            self.expect(Tok::Colon)?;
            // `a:~A` is classical only when the `~` covers the whole type;
            // `h:~A -> B` is an ordinary hypothesis
            let start = self.pos;
            let classical = *self.peek() == Tok::Tilde
                && self.unary().is_ok()
                && matches!(self.peek(), Tok::Comma | Tok::Semi);
            self.pos = start;
            let ty = self.formula()?;
            let dup = |p: &Parser| p.toks[at].line;
            if ctx.contains(&x) {
                return Err(ParseError {
                    line: dup(self),
                    col: self.toks[at].col,
                    kind: ParseErrorKind::Duplicate(x),
                });
            }
            match (classical, ty.negated()) {
                (true, Some(inner)) => {
                    ctx.declare_class(x.clone(), inner.clone());
                    self.scope.push((x, VarKind::Class));
                }
                _ => {
                    ctx.declare_intu(x.clone(), ty);
                    self.scope.push((x, VarKind::Intu));
                }
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::Semi => break,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("`,` or `;`"));
                }
            }
        }
        Ok(ctx)
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Semi {
            self.bump();
        }
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn with_scope<T>(
        &mut self,
        names: &[(&str, VarKind)],
        f: impl FnOnce(&mut Parser) -> PResult<T>,
    ) -> PResult<T> {
        let n = self.scope.len();
        self.scope
            .extend(names.iter().map(|(s, k)| (s.to_string(), *k)));
        let r = f(self);
        self.scope.truncate(n);
        r
    }
}

/// Parses a complete unit; every free variable must be declared in the
/// `ctx` block.
pub fn parse(src: &str) -> Result<SourceUnit, ParseError> {
    let mut p = Parser::new(src, false)?;
    let ctx = p.context()?;
    let term = p.term()?;
    let expected = if *p.peek() == Tok::Colon {
        p.bump();
        Some(p.formula()?)
    } else {
        None
    };
    p.finish()?;
    Ok(SourceUnit {
        ctx,
        term,
        expected,
    })
}

/// Parses a lone term. Undeclared variables are taken to be free
/// intuitionistic variables; free classical variables need [`parse`].
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, true)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a lone eliminator, leniently like [`parse_term`].
pub fn parse_elim(src: &str) -> Result<Elim, ParseError> {
    let mut p = Parser::new(src, true)?;
    let e = p.elim()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, true)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a term against a context: declared names resolve with their
/// declared kind, anything else is an error.
pub fn parse_term_in(ctx: &TypingContext, src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, false)?;
    p.scope
        .extend(ctx.intu_vars().map(|(x, _)| (x.clone(), VarKind::Intu)));
    p.scope
        .extend(ctx.class_vars().map(|(a, _)| (a.clone(), VarKind::Class)));
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a scenario file:
///
/// ```text
/// ctx m:A \/ B, f:A -> C, g:B -> C, h:C -> D, d:D;
/// M = m; N1 = (f x1); N2 = (g x2); eps = d; V = [];
/// ```
///
/// The branch bodies `N1` and `N2` see the case binders `x1` and `x2`.
pub fn parse_scenario(src: &str) -> Result<Scenario, ParseError> {
    let mut p = Parser::new(src, false)?;
    let ctx = p.context()?;
    let (mut m, mut n1, mut n2, mut eps, mut rest) = (None, None, None, None, None);
    while *p.peek() != Tok::Eof {
        let key = match p.bump() {
            Tok::Upper(k) | Tok::Lower(k) => k,
            _ => {
                p.pos -= 1;
                return Err(p.unexpected("a binding name (M, N1, N2, eps, V)"));
            }
        };
        p.expect(Tok::Equals)?;
        match key.as_str() {
            "M" => m = Some(p.term()?),
            "N1" => n1 = Some(p.with_scope(&[("x1", VarKind::Intu)], Parser::term)?),
            "N2" => n2 = Some(p.with_scope(&[("x2", VarKind::Intu)], Parser::term)?),
            "eps" => eps = Some(p.elim()?),
            "V" => {
                p.expect(Tok::LBrack)?;
                let mut v = Vec::new();
                while *p.peek() != Tok::RBrack {
                    v.push(p.elim()?);
                    if *p.peek() == Tok::Comma {
                        p.bump();
                    } else if *p.peek() != Tok::RBrack {
                        return Err(p.unexpected("`,` or `]`"));
                    }
                }
                p.bump();
                rest = Some(v);
            }
            other => {
                return Err(p.err_here(ParseErrorKind::Syntax(format!(
                    "unknown scenario binding `{other}`"
                ))))
            }
        }
        if matches!(p.peek(), Tok::Semi | Tok::Comma) {
            p.bump();
        }
    }
    let missing = |what: &str| {
        p.err_here(ParseErrorKind::Syntax(format!(
            "scenario is missing `{what}`"
        )))
    };
    Ok(Scenario {
        ctx,
        scrutinee: m.ok_or_else(|| missing("M"))?,
        x1: "x1".into(),
        branch1: n1.ok_or_else(|| missing("N1"))?,
        x2: "x2".into(),
        branch2: n2.ok_or_else(|| missing("N2"))?,
        eps: eps.ok_or_else(|| missing("eps"))?,
        rest: rest.unwrap_or_default(),
    })
}

// printing

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => f.write_str(x),
        Term::Lam(x, a, b) => {
            write!(f, "\\{x}:{a}. ")?;
            write_term(b, f)
        }
        Term::Mu(x, a, b) => {
            write!(f, "mu {x}:{a}. ")?;
            write_term(b, f)
        }
        Term::Inj(i, a, b) => {
            write!(f, "in{}[{a}] ", i.index())?;
            write_term(b, f)
        }
        Term::Pair(a, b) => {
            f.write_str("<")?;
            write_term(a, f)?;
            f.write_str(", ")?;
            write_term(b, f)?;
            f.write_str(">")
        }
        Term::Name(a, b) => {
            write!(f, "({a} ")?;
            write_term(b, f)?;
            f.write_str(")")
        }
        Term::Mark(_, b) => {
            f.write_str("{")?;
            write_term(b, f)?;
            f.write_str("}")
        }
        Term::App(..) => {
            let (head, elims) = t.unspine();
            f.write_str("(")?;
            write_term(head, f)?;
            for e in elims {
                f.write_str(" ")?;
                write_elim(e, f)?;
            }
            f.write_str(")")
        }
    }
}

fn write_elim(e: &Elim, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Elim::Term(t) => write_term(t, f),
        Elim::Proj(i) => write!(f, "p{}", i.index()),
        Elim::Case(x1, a, x2, b) => {
            write!(f, "[{x1}.")?;
            write_term(a, f)?;
            write!(f, " | {x2}.")?;
            write_term(b, f)?;
            f.write_str("]")
        }
        Elim::Boxed(inner) => {
            f.write_str("[[")?;
            write_elim(inner, f)?;
            f.write_str("]]")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f)
    }
}

impl fmt::Display for Elim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_elim(self, f)
    }
}

impl fmt::Display for TypingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let decls: Vec<String> = self
            .intu_vars()
            .map(|(x, a)| format!("{x}:{}", a.display_unsugared()))
            .chain(
                self.class_vars()
                    .map(|(a, ty)| format!("{a}:{}", Formula::not(ty.clone()))),
            )
            .collect();
        write!(f, "ctx {};", decls.join(", "))
    }
}

impl fmt::Display for SourceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            write!(f, "{} ", self.ctx)?;
        }
        write!(f, "{}", self.term)?;
        if let Some(ty) = &self.expected {
            write!(f, " : {ty}")?;
        }
        Ok(())
    }
}
