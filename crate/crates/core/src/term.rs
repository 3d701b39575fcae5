//! Proof terms and eliminators, positions inside them, and alpha-equivalence.
//!
//! Terms are two-sorted: [`Term`] for proofs and [`Elim`] for the things a
//! proof can be applied to (a term, a projection, or a case split). Variables
//! come in two kinds that never mix: intuitionistic ones, bound by `\x` and by
//! case branches and used as `x`, and classical ones, bound by `mu a` and used
//! only in the naming form `(a M)`.
//!
//! The marked constructors [`Term::Mark`] and [`Elim::Boxed`] only appear in
//! marked terms (see [`crate::marked`]); every other module treats them as
//! transparent wrappers.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

pub type Var = String;

/// Which component of a pair or disjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Side> {
        match i {
            1 => Some(Side::Left),
            2 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn pick<T>(self, left: T, right: T) -> T {
        match self {
            Side::Left => left,
            Side::Right => right,
        }
    }
}

/// Identity of a mark, preserved when marks are copied by reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Lam(Var, Formula, Box<Term>),
    App(Box<Term>, Box<Elim>),
    Pair(Box<Term>, Box<Term>),
    /// Injection; the annotation is the whole disjunction.
    Inj(Side, Formula, Box<Term>),
    /// `mu a:A. M`; the annotation is `A`, so `a : ~A`.
    Mu(Var, Formula, Box<Term>),
    /// `(a M)` with `a` classical.
    Name(Var, Box<Term>),
    Mark(MarkId, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elim {
    Term(Term),
    Proj(Side),
    Case(Var, Term, Var, Term),
    Boxed(Box<Elim>),
}

impl Term {
    pub fn var(x: impl Into<Var>) -> Term {
        Term::Var(x.into())
    }

    pub fn lam(x: impl Into<Var>, ty: Formula, body: Term) -> Term {
        Term::Lam(x.into(), ty, Box::new(body))
    }

    pub fn app(f: Term, e: Elim) -> Term {
        Term::App(Box::new(f), Box::new(e))
    }

    /// `(f e1 ... en)` as a left-nested spine.
    pub fn spine(f: Term, elims: impl IntoIterator<Item = Elim>) -> Term {
        elims.into_iter().fold(f, Term::app)
    }

    pub fn apply(f: Term, arg: Term) -> Term {
        Term::app(f, Elim::Term(arg))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn inj(side: Side, ty: Formula, t: Term) -> Term {
        Term::Inj(side, ty, Box::new(t))
    }

    pub fn mu(a: impl Into<Var>, ty: Formula, body: Term) -> Term {
        Term::Mu(a.into(), ty, Box::new(body))
    }

    pub fn name(a: impl Into<Var>, t: Term) -> Term {
        Term::Name(a.into(), Box::new(t))
    }

    pub fn mark(id: MarkId, t: Term) -> Term {
        Term::Mark(id, Box::new(t))
    }

    /// Splits an application spine into its head and eliminators.
    pub fn unspine(&self) -> (&Term, Vec<&Elim>) {
        let mut elims = Vec::new();
        let mut cur = self;
        while let Term::App(f, e) = cur {
            elims.push(&**e);
            cur = f;
        }
        elims.reverse();
        (cur, elims)
    }

    /// Number of symbols: every node counts one, annotations and the
    /// term-as-eliminator wrapper count zero.
    pub fn cxty(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, _, b)
            | Term::Inj(_, _, b)
            | Term::Mu(_, _, b)
            | Term::Name(_, b)
            | Term::Mark(_, b) => 1 + b.cxty(),
            Term::App(f, e) => 1 + f.cxty() + e.cxty(),
            Term::Pair(a, b) => 1 + a.cxty() + b.cxty(),
        }
    }

    /// True when the term contains no mark and no box.
    pub fn is_plain(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Lam(_, _, b) | Term::Inj(_, _, b) | Term::Mu(_, _, b) | Term::Name(_, b) => {
                b.is_plain()
            }
            Term::App(f, e) => f.is_plain() && e.is_plain(),
            Term::Pair(a, b) => a.is_plain() && b.is_plain(),
            Term::Mark(..) => false,
        }
    }

    pub fn free_ivars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(Node::Term(self), &mut Vec::new(), &mut out, Kind::Intu);
        out
    }

    pub fn free_cvars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(Node::Term(self), &mut Vec::new(), &mut out, Kind::Class);
        out
    }

    /// Number of free occurrences of the intuitionistic variable `x`.
    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(y == x),
            Term::Lam(y, _, b) => {
                if y == x {
                    0
                } else {
                    b.occurrences(x)
                }
            }
            Term::Inj(_, _, b) | Term::Mu(_, _, b) | Term::Name(_, b) | Term::Mark(_, b) => {
                b.occurrences(x)
            }
            Term::App(f, e) => f.occurrences(x) + e.occurrences(x),
            Term::Pair(a, b) => a.occurrences(x) + b.occurrences(x),
        }
    }

    /// Every variable name (of either kind, bound or free) in the term.
    pub fn all_names(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(x, _, b) | Term::Mu(x, _, b) | Term::Name(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            Term::Inj(_, _, b) | Term::Mark(_, b) => b.all_names(out),
            Term::App(f, e) => {
                f.all_names(out);
                e.all_names(out);
            }
            Term::Pair(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
        }
    }

    pub fn subterm_at(&self, path: &Path) -> Result<Node<'_>, PathError> {
        Node::Term(self).at(path)
    }

    /// Replaces the subtree at `path`; the replacement must be of the same
    /// sort as the subtree it replaces.
    pub fn replace_at(&self, path: &Path, with: Subtree) -> Result<Term, PathError> {
        match replace_node(Node::Term(self), path.steps(), with, path)? {
            Subtree::Term(t) => Ok(t),
            Subtree::Elim(_) => Err(PathError::SortMismatch(path.clone())),
        }
    }
}

impl Elim {
    pub fn case(x1: impl Into<Var>, n1: Term, x2: impl Into<Var>, n2: Term) -> Elim {
        Elim::Case(x1.into(), n1, x2.into(), n2)
    }

    pub fn boxed(e: Elim) -> Elim {
        Elim::Boxed(Box::new(e))
    }

    pub fn cxty(&self) -> usize {
        match self {
            Elim::Term(t) => t.cxty(),
            Elim::Proj(_) => 1,
            Elim::Case(_, a, _, b) => 1 + a.cxty() + b.cxty(),
            Elim::Boxed(e) => 1 + e.cxty(),
        }
    }

    pub fn is_case(&self) -> bool {
        matches!(self, Elim::Case(..))
    }

    pub fn is_plain(&self) -> bool {
        match self {
            Elim::Term(t) => t.is_plain(),
            Elim::Proj(_) => true,
            Elim::Case(_, a, _, b) => a.is_plain() && b.is_plain(),
            Elim::Boxed(_) => false,
        }
    }

    pub fn free_ivars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(Node::Elim(self), &mut Vec::new(), &mut out, Kind::Intu);
        out
    }

    pub fn free_cvars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(Node::Elim(self), &mut Vec::new(), &mut out, Kind::Class);
        out
    }

    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Elim::Term(t) => t.occurrences(x),
            Elim::Proj(_) => 0,
            Elim::Case(y1, a, y2, b) => {
                (if y1 == x { 0 } else { a.occurrences(x) })
                    + (if y2 == x { 0 } else { b.occurrences(x) })
            }
            Elim::Boxed(e) => e.occurrences(x),
        }
    }

    pub fn all_names(&self, out: &mut BTreeSet<Var>) {
        match self {
            Elim::Term(t) => t.all_names(out),
            Elim::Proj(_) => {}
            Elim::Case(y1, a, y2, b) => {
                out.insert(y1.clone());
                out.insert(y2.clone());
                a.all_names(out);
                b.all_names(out);
            }
            Elim::Boxed(e) => e.all_names(out),
        }
    }
}

/// Borrowed view of a subtree: either a term or an eliminator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node<'a> {
    Term(&'a Term),
    Elim(&'a Elim),
}

/// Owned subtree, the companion of [`Node`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subtree {
    Term(Term),
    Elim(Elim),
}

impl<'a> Node<'a> {
    /// Child at a constructor-position index, if any.
    ///
    /// `App`: 0 = function, 1 = eliminator. `Pair`: 0, 1. Binders, `Inj`,
    /// `Name`, `Mark`: 0 = body. `Elim::Term`: 0 = the term. `Case`: 0, 1
    /// = branches. `Boxed`: 0 = the boxed eliminator.
    pub fn child(self, i: u8) -> Option<Node<'a>> {
        match (self, i) {
            (Node::Term(Term::Lam(_, _, b)), 0)
            | (Node::Term(Term::Inj(_, _, b)), 0)
            | (Node::Term(Term::Mu(_, _, b)), 0)
            | (Node::Term(Term::Name(_, b)), 0)
            | (Node::Term(Term::Mark(_, b)), 0) => Some(Node::Term(b)),
            (Node::Term(Term::App(f, _)), 0) => Some(Node::Term(f)),
            (Node::Term(Term::App(_, e)), 1) => Some(Node::Elim(e)),
            (Node::Term(Term::Pair(a, _)), 0) => Some(Node::Term(a)),
            (Node::Term(Term::Pair(_, b)), 1) => Some(Node::Term(b)),
            (Node::Elim(Elim::Term(t)), 0) => Some(Node::Term(t)),
            (Node::Elim(Elim::Case(_, a, _, _)), 0) => Some(Node::Term(a)),
            (Node::Elim(Elim::Case(_, _, _, b)), 1) => Some(Node::Term(b)),
            (Node::Elim(Elim::Boxed(e)), 0) => Some(Node::Elim(e)),
            _ => None,
        }
    }

    pub fn arity(self) -> u8 {
        match self {
            Node::Term(Term::Var(_)) | Node::Elim(Elim::Proj(_)) => 0,
            Node::Term(Term::App(..)) | Node::Term(Term::Pair(..)) | Node::Elim(Elim::Case(..)) => {
                2
            }
            _ => 1,
        }
    }

    pub fn at(self, path: &Path) -> Result<Node<'a>, PathError> {
        let mut cur = self;
        for &s in path.steps() {
            cur = cur
                .child(s)
                .ok_or_else(|| PathError::Invalid(path.clone()))?;
        }
        Ok(cur)
    }

    pub fn as_term(self) -> Option<&'a Term> {
        match self {
            Node::Term(t) => Some(t),
            Node::Elim(_) => None,
        }
    }

    pub fn to_owned(self) -> Subtree {
        match self {
            Node::Term(t) => Subtree::Term(t.clone()),
            Node::Elim(e) => Subtree::Elim(e.clone()),
        }
    }
}

impl fmt::Display for Node<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Term(t) => write!(f, "{t}"),
            Node::Elim(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for Subtree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subtree::Term(t) => write!(f, "{t}"),
            Subtree::Elim(e) => write!(f, "{e}"),
        }
    }
}

fn replace_node(
    node: Node<'_>,
    steps: &[u8],
    with: Subtree,
    full: &Path,
) -> Result<Subtree, PathError> {
    let Some((&s, rest)) = steps.split_first() else {
        return match (node, with) {
            (Node::Term(_), w @ Subtree::Term(_)) | (Node::Elim(_), w @ Subtree::Elim(_)) => Ok(w),
            _ => Err(PathError::SortMismatch(full.clone())),
        };
    };
    let child = node
        .child(s)
        .ok_or_else(|| PathError::Invalid(full.clone()))?;
    let new_child = replace_node(child, rest, with, full)?;
    let as_term = |c: Subtree| match c {
        Subtree::Term(t) => t,
        Subtree::Elim(_) => unreachable!("sort is preserved by replace_node"),
    };
    let as_elim = |c: Subtree| match c {
        Subtree::Elim(e) => e,
        Subtree::Term(_) => unreachable!("sort is preserved by replace_node"),
    };
    Ok(match node {
        Node::Term(t) => Subtree::Term(match (t, s) {
            (Term::Lam(x, a, _), _) => Term::lam(x.clone(), a.clone(), as_term(new_child)),
            (Term::Inj(i, a, _), _) => Term::inj(*i, a.clone(), as_term(new_child)),
            (Term::Mu(x, a, _), _) => Term::mu(x.clone(), a.clone(), as_term(new_child)),
            (Term::Name(x, _), _) => Term::name(x.clone(), as_term(new_child)),
            (Term::Mark(id, _), _) => Term::mark(*id, as_term(new_child)),
            (Term::App(_, e), 0) => Term::app(as_term(new_child), (**e).clone()),
            (Term::App(f, _), _) => Term::app((**f).clone(), as_elim(new_child)),
            (Term::Pair(_, b), 0) => Term::pair(as_term(new_child), (**b).clone()),
            (Term::Pair(a, _), _) => Term::pair((**a).clone(), as_term(new_child)),
            (Term::Var(_), _) => unreachable!("variables have no children"),
        }),
        Node::Elim(e) => Subtree::Elim(match (e, s) {
            (Elim::Term(_), _) => Elim::Term(as_term(new_child)),
            (Elim::Case(x1, _, x2, b), 0) => {
                Elim::Case(x1.clone(), as_term(new_child), x2.clone(), b.clone())
            }
            (Elim::Case(x1, a, x2, _), _) => {
                Elim::Case(x1.clone(), a.clone(), x2.clone(), as_term(new_child))
            }
            (Elim::Boxed(_), _) => Elim::boxed(as_elim(new_child)),
            (Elim::Proj(_), _) => unreachable!("projections have no children"),
        }),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Intu,
    Class,
}

fn collect_free<'a>(
    node: Node<'a>,
    bound: &mut Vec<(Kind, &'a str)>,
    out: &mut BTreeSet<Var>,
    want: Kind,
) {
    let is_bound = |bound: &Vec<(Kind, &str)>, k: Kind, x: &str| {
        bound.iter().any(|&(bk, bx)| bk == k && bx == x)
    };
    match node {
        Node::Term(Term::Var(x)) => {
            if want == Kind::Intu && !is_bound(bound, Kind::Intu, x) {
                out.insert(x.clone());
            }
        }
        Node::Term(Term::Lam(x, _, b)) => {
            bound.push((Kind::Intu, x));
            collect_free(Node::Term(b), bound, out, want);
            bound.pop();
        }
        Node::Term(Term::Mu(a, _, b)) => {
            bound.push((Kind::Class, a));
            collect_free(Node::Term(b), bound, out, want);
            bound.pop();
        }
        Node::Term(Term::Name(a, b)) => {
            if want == Kind::Class && !is_bound(bound, Kind::Class, a) {
                out.insert(a.clone());
            }
            collect_free(Node::Term(b), bound, out, want);
        }
        Node::Elim(Elim::Case(x1, a, x2, b)) => {
            bound.push((Kind::Intu, x1));
            collect_free(Node::Term(a), bound, out, want);
            bound.pop();
            bound.push((Kind::Intu, x2));
            collect_free(Node::Term(b), bound, out, want);
            bound.pop();
        }
        other => {
            for i in 0..other.arity() {
                if let Some(c) = other.child(i) {
                    collect_free(c, bound, out, want);
                }
            }
        }
    }
}

/// A position in a term: the sequence of child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<u8>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn new(steps: Vec<u8>) -> Path {
        Path(steps)
    }

    pub fn steps(&self) -> &[u8] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u8) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn join(&self, other: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Path(v)
    }

    pub fn starts_with(&self, prefix: &Path) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, i: u8) {
        self.0.push(i);
    }

    pub fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }
}

/// Paths print as `/` for the root and `/0/1/0` otherwise.
impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for s in &self.0 {
            write!(f, "/{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Path {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Path, PathError> {
        let s = s.trim();
        let bad = || PathError::Syntax(s.to_string());
        let body = s.strip_prefix('/').ok_or_else(bad)?;
        if body.is_empty() {
            return Ok(Path::root());
        }
        body.split('/')
            .map(|p| p.parse::<u8>().map_err(|_| bad()))
            .collect::<Result<_, _>>()
            .map(Path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("invalid path {0}: no such subterm")]
    Invalid(Path),
    #[error("replacement at {0} has the wrong sort")]
    SortMismatch(Path),
    #[error("malformed path `{0}` (expected `/` or `/i/j/...`)")]
    Syntax(String),
}

/// Picks a name based on `base` that `taken` rejects.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Var {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|n| format!("{stem}{n}"))
        .find(|c| !taken(c))
        .expect("unbounded candidate sequence")
}

/// Alpha-canonical form: every bound variable renamed by binding depth to a
/// name no parser can produce. Two terms are alpha-equivalent iff their
/// canonical forms are equal.
pub fn alpha_key(t: &Term) -> Term {
    let mut env = Vec::new();
    canon_term(t, &mut env)
}

pub fn alpha_key_elim(e: &Elim) -> Elim {
    let mut env = Vec::new();
    canon_elim(e, &mut env)
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha_key(a) == alpha_key(b)
}

pub fn alpha_eq_elim(a: &Elim, b: &Elim) -> bool {
    alpha_key_elim(a) == alpha_key_elim(b)
}

fn canon_name(depth: usize) -> Var {
    format!("#{depth}")
}

fn lookup(env: &[(Kind, Var)], k: Kind, x: &str) -> Option<Var> {
    env.iter()
        .rposition(|(bk, bx)| *bk == k && bx == x)
        .map(canon_name)
}

fn canon_term(t: &Term, env: &mut Vec<(Kind, Var)>) -> Term {
    match t {
        Term::Var(x) => Term::Var(lookup(env, Kind::Intu, x).unwrap_or_else(|| x.clone())),
        Term::Lam(x, a, b) => {
            let name = canon_name(env.len());
            env.push((Kind::Intu, x.clone()));
            let body = canon_term(b, env);
            env.pop();
            Term::lam(name, a.clone(), body)
        }
        Term::Mu(x, a, b) => {
            let name = canon_name(env.len());
            env.push((Kind::Class, x.clone()));
            let body = canon_term(b, env);
            env.pop();
            Term::mu(name, a.clone(), body)
        }
        Term::Name(x, b) => Term::name(
            lookup(env, Kind::Class, x).unwrap_or_else(|| x.clone()),
            canon_term(b, env),
        ),
        Term::App(f, e) => Term::app(canon_term(f, env), canon_elim(e, env)),
        Term::Pair(a, b) => Term::pair(canon_term(a, env), canon_term(b, env)),
        Term::Inj(i, a, b) => Term::inj(*i, a.clone(), canon_term(b, env)),
        Term::Mark(id, b) => Term::mark(*id, canon_term(b, env)),
    }
}

fn canon_elim(e: &Elim, env: &mut Vec<(Kind, Var)>) -> Elim {
    match e {
        Elim::Term(t) => Elim::Term(canon_term(t, env)),
        Elim::Proj(i) => Elim::Proj(*i),
        Elim::Case(x1, a, x2, b) => {
            let n = canon_name(env.len());
            env.push((Kind::Intu, x1.clone()));
            let a = canon_term(a, env);
            env.pop();
            env.push((Kind::Intu, x2.clone()));
            let b = canon_term(b, env);
            env.pop();
            Elim::Case(n.clone(), a, n, b)
        }
        Elim::Boxed(inner) => Elim::boxed(canon_elim(inner, env)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("A")
    }

    #[test]
    fn alpha_eq_examples() {
        let id_x = Term::lam("x", a(), Term::var("x"));
        let id_y = Term::lam("y", a(), Term::var("y"));
        assert!(alpha_eq(&id_x, &id_y));
        let const_z = Term::lam("x", a(), Term::var("z"));
        assert!(!alpha_eq(&id_x, &const_z));
        let mu_a = Term::mu("a", a(), Term::name("a", Term::var("x")));
        let mu_b = Term::mu("b", a(), Term::name("b", Term::var("x")));
        assert!(alpha_eq(&mu_a, &mu_b));
    }

    #[test]
    fn alpha_eq_distinguishes_kinds_and_free_names() {
        // \x. \y. x  vs  \x. \y. y
        let k1 = Term::lam("x", a(), Term::lam("y", a(), Term::var("x")));
        let k2 = Term::lam("x", a(), Term::lam("y", a(), Term::var("y")));
        assert!(!alpha_eq(&k1, &k2));
        // mu a. (a x) vs mu a. (b x)
        let m1 = Term::mu("a", a(), Term::name("a", Term::var("x")));
        let m2 = Term::mu("a", a(), Term::name("b", Term::var("x")));
        assert!(!alpha_eq(&m1, &m2));
        // a bound intuitionistic x does not bind a classical x
        let t1 = Term::lam("x", a(), Term::name("x", Term::var("x")));
        let t2 = Term::lam("y", a(), Term::name("x", Term::var("y")));
        assert!(alpha_eq(&t1, &t2));
    }

    #[test]
    fn case_binders_are_alpha_renamable() {
        let c1 = Term::app(
            Term::var("m"),
            Elim::case("x", Term::var("x"), "y", Term::var("y")),
        );
        let c2 = Term::app(
            Term::var("m"),
            Elim::case("u", Term::var("u"), "u", Term::var("u")),
        );
        assert!(alpha_eq(&c1, &c2));
    }

    #[test]
    fn cxty_counts_nodes() {
        assert_eq!(Term::var("x").cxty(), 1);
        assert_eq!(Term::lam("x", a(), Term::var("x")).cxty(), 2);
        assert_eq!(Term::apply(Term::var("x"), Term::var("y")).cxty(), 3);
        assert_eq!(Term::app(Term::var("x"), Elim::Proj(Side::Left)).cxty(), 3);
    }

    #[test]
    fn subterm_at_paths() {
        let t = Term::apply(Term::var("x"), Term::var("y"));
        assert_eq!(t.subterm_at(&Path::root()).unwrap(), Node::Term(&t));
        let e = t.subterm_at(&Path::new(vec![1])).unwrap();
        assert_eq!(e.to_string(), "y");
        assert_eq!(
            t.subterm_at(&Path::new(vec![1, 0])).unwrap(),
            Node::Term(&Term::var("y"))
        );
        let id = Term::lam("x", a(), Term::var("x"));
        assert!(matches!(
            id.subterm_at(&Path::new(vec![1])),
            Err(PathError::Invalid(_))
        ));
    }

    #[test]
    fn replace_at_changes_only_target() {
        let t = Term::pair(Term::var("x"), Term::var("y"));
        let r = t
            .replace_at(&Path::new(vec![1]), Subtree::Term(Term::var("z")))
            .unwrap();
        assert_eq!(r, Term::pair(Term::var("x"), Term::var("z")));
        assert!(t
            .replace_at(&Path::new(vec![1]), Subtree::Elim(Elim::Proj(Side::Left)))
            .is_err());
    }

    #[test]
    fn path_parse_and_display() {
        let p: Path = "/0/1/0".parse().unwrap();
        assert_eq!(p, Path::new(vec![0, 1, 0]));
        assert_eq!(p.to_string(), "/0/1/0");
        assert_eq!("/".parse::<Path>().unwrap(), Path::root());
        assert!("0/1".parse::<Path>().is_err());
    }

    #[test]
    fn fresh_name_skips_taken() {
        let n = fresh_name("y", |c| c == "y1");
        assert_eq!(n, "y2");
        assert_eq!(fresh_name("x3", |_| false), "x1");
    }

    #[test]
    fn free_variables_by_kind() {
        let t = Term::mu(
            "a",
            a(),
            Term::name(
                "b",
                Term::lam("x", a(), Term::apply(Term::var("x"), Term::var("y"))),
            ),
        );
        assert_eq!(
            t.free_ivars().into_iter().collect::<Vec<_>>(),
            vec!["y".to_string()]
        );
        assert_eq!(
            t.free_cvars().into_iter().collect::<Vec<_>>(),
            vec!["b".to_string()]
        );
    }
}
