//! Contexts and simple terms, nice eliminator sequences and the head
//! classification of simple terms.
//!
//! Every term is uniquely `C[M1, ..., Mn]` where the context `C` is built
//! from holes, abstractions, injections, pairs and `mu`, and each `Mi` is
//! simple (a variable, an application or a naming). A simple term falls into
//! exactly one of six rows:
//!
//! | row | shape                         | head                | args           |
//! |-----|-------------------------------|---------------------|----------------|
//! | 0   | `(x T..)` or `(a T)`          | the variable        | the `T`s       |
//! | 1   | `(\x N O T..)`                | `(\x N O)`          | `O`            |
//! | 2   | `(<N1, N2> pi T..)`           | `(<N1, N2> pi)`     | `N1`, `N2`     |
//! | 3   | `(in_i N [x1.O1 \| x2.O2])`   | the whole term      | `N`, `O1`, `O2`|
//! | 4   | `(mu a N e T..)`, `e T..` nice| `(mu a N e)`        | `e`            |
//! | 5   | `(N [x1.O1 \| x2.O2] e T..)`  | the permutative redex | none         |
//!
//! In row 5 the pivot is the last case eliminator that is not at the end of
//! the spine, so that what follows it is nice.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::reduction::{redexes, reduce_at_in, Redex, RedexKind};
use crate::term::{Elim, Path, Side, Subtree, Term, Var};
use crate::typing::TypingContext;

/// `C ::= *i | \x C | in_i C | <C1, C2> | mu a C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HoleContext {
    /// Holes are numbered from 1, left to right.
    Hole(usize),
    Lam(Var, Formula, Box<HoleContext>),
    Inj(Side, Formula, Box<HoleContext>),
    Pair(Box<HoleContext>, Box<HoleContext>),
    Mu(Var, Formula, Box<HoleContext>),
}

impl HoleContext {
    pub fn holes(&self) -> usize {
        match self {
            HoleContext::Hole(_) => 1,
            HoleContext::Lam(_, _, c) | HoleContext::Inj(_, _, c) | HoleContext::Mu(_, _, c) => {
                c.holes()
            }
            HoleContext::Pair(a, b) => a.holes() + b.holes(),
        }
    }
}

impl fmt::Display for HoleContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoleContext::Hole(i) => write!(f, "*{i}"),
            HoleContext::Lam(x, a, c) => write!(f, "\\{x}:{a}. {c}"),
            HoleContext::Inj(s, a, c) => write!(f, "in{}[{a}] {c}", s.index()),
            HoleContext::Pair(a, b) => write!(f, "<{a}, {b}>"),
            HoleContext::Mu(x, a, c) => write!(f, "mu {x}:{a}. {c}"),
        }
    }
}

/// Simple terms are variables, applications and namings. A mark is treated
/// as simple too.
pub fn is_simple(t: &Term) -> bool {
    matches!(
        t,
        Term::Var(_) | Term::App(..) | Term::Name(..) | Term::Mark(..)
    )
}

/// The unique `(C, [M1..Mn])` with `fill(C, Ms) = t` and every `Mi` simple.
pub fn decompose(t: &Term) -> (HoleContext, Vec<Term>) {
    let mut parts = Vec::new();
    let c = decompose_into(t, &mut parts);
    (c, parts)
}

fn decompose_into(t: &Term, parts: &mut Vec<Term>) -> HoleContext {
    match t {
        Term::Lam(x, a, b) => {
            HoleContext::Lam(x.clone(), a.clone(), Box::new(decompose_into(b, parts)))
        }
        Term::Inj(s, a, b) => HoleContext::Inj(*s, a.clone(), Box::new(decompose_into(b, parts))),
        Term::Mu(x, a, b) => {
            HoleContext::Mu(x.clone(), a.clone(), Box::new(decompose_into(b, parts)))
        }
        Term::Pair(a, b) => {
            let l = decompose_into(a, parts);
            let r = decompose_into(b, parts);
            HoleContext::Pair(Box::new(l), Box::new(r))
        }
        _ => {
            parts.push(t.clone());
            HoleContext::Hole(parts.len())
        }
    }
}

/// Paths of the simple components, in hole order.
pub fn component_paths(t: &Term) -> Vec<Path> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
        match t {
            Term::Lam(_, _, b) | Term::Inj(_, _, b) | Term::Mu(_, _, b) => {
                path.push(0);
                go(b, path, out);
                path.pop();
            }
            Term::Pair(a, b) => {
                path.push(0);
                go(a, path, out);
                path.pop();
                path.push(1);
                go(b, path, out);
                path.pop();
            }
            _ => out.push(path.clone()),
        }
    }
    let mut out = Vec::new();
    go(t, &mut Path::root(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeadError {
    #[error("context has {holes} holes but {given} terms were given")]
    Arity { holes: usize, given: usize },
    #[error("hole *{0} is missing or repeated")]
    BadHole(usize),
    #[error("not a simple term: {0}")]
    NotSimple(String),
    #[error("simple term matches no row of the head table: {0}")]
    Unclassifiable(String),
}

/// Plugs the terms into the holes; binders of the context scope over them.
pub fn fill(c: &HoleContext, ms: &[Term]) -> Result<Term, HeadError> {
    let n = c.holes();
    if n != ms.len() {
        return Err(HeadError::Arity {
            holes: n,
            given: ms.len(),
        });
    }
    let mut used = vec![false; n];
    let t = fill_rec(c, ms, &mut used)?;
    Ok(t)
}

fn fill_rec(c: &HoleContext, ms: &[Term], used: &mut [bool]) -> Result<Term, HeadError> {
    Ok(match c {
        HoleContext::Hole(i) => {
            if *i == 0 || *i > ms.len() || used[*i - 1] {
                return Err(HeadError::BadHole(*i));
            }
            used[*i - 1] = true;
            ms[*i - 1].clone()
        }
        HoleContext::Lam(x, a, b) => Term::lam(x.clone(), a.clone(), fill_rec(b, ms, used)?),
        HoleContext::Inj(s, a, b) => Term::inj(*s, a.clone(), fill_rec(b, ms, used)?),
        HoleContext::Mu(x, a, b) => Term::mu(x.clone(), a.clone(), fill_rec(b, ms, used)?),
        HoleContext::Pair(a, b) => Term::pair(fill_rec(a, ms, used)?, fill_rec(b, ms, used)?),
    })
}

/// Every element but the last is a term or a projection.
pub fn is_nice(es: &[Elim]) -> bool {
    let Some((_, init)) = es.split_last() else {
        return true;
    };
    init.iter().all(|e| !is_case_like(e))
}

fn is_case_like(e: &Elim) -> bool {
    match e {
        Elim::Case(..) => true,
        Elim::Boxed(inner) => is_case_like(inner),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    IntuVar(Var),
    ClassVar(Var),
    /// The head redex, located at `HeadRow::head_path`.
    Redex(Term),
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::IntuVar(x) | Head::ClassVar(x) => f.write_str(x),
            Head::Redex(t) => write!(f, "{t}"),
        }
    }
}

/// One argument of the head table, with its position in the classified term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub path: Path,
    pub value: Subtree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeadRow {
    pub case: u8,
    pub head: Head,
    pub args: Vec<Arg>,
    pub head_path: Option<Path>,
    pub head_kind: Option<RedexKind>,
    pub head_reduct: Option<Term>,
}

impl fmt::Display for HeadRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}", self.case)?;
        writeln!(f, "head {}", self.head)?;
        let args: Vec<String> = self.args.iter().map(|a| a.value.to_string()).collect();
        writeln!(f, "args {{{}}}", args.join(", "))?;
        match (&self.head_path, &self.head_kind, &self.head_reduct) {
            (Some(p), Some(k), Some(r)) => write!(f, "hred {r}  ({p} {k})"),
            _ => write!(f, "hred none"),
        }
    }
}

pub fn classify(t: &Term) -> Result<HeadRow, HeadError> {
    classify_in(&TypingContext::new(), t)
}

/// Classifies a simple term; `ctx` is used to compute the head reduct.
pub fn classify_in(ctx: &TypingContext, t: &Term) -> Result<HeadRow, HeadError> {
    if !matches!(t, Term::Var(_) | Term::App(..) | Term::Name(..)) {
        return Err(HeadError::NotSimple(t.to_string()));
    }
    let (h, elims) = t.unspine();
    let n = elims.len();
    // path of the App node that applies elims[k]
    let app_path = |k: usize| Path::new(vec![0; n - 1 - k]);
    let unclassifiable = || HeadError::Unclassifiable(t.to_string());

    if let Some(j) = (0..n.saturating_sub(1))
        .rev()
        .find(|&j| is_case_like(elims[j]))
    {
        let p = app_path(j + 1);
        return Ok(redex_row(ctx, t, 5, p, Vec::new()));
    }
    let arg_term = |path: Path, x: &Term| Arg {
        path,
        value: Subtree::Term(x.clone()),
    };
    match h {
        Term::Var(x) => {
            let args = (0..n)
                .map(|k| Arg {
                    path: app_path(k).child(1),
                    value: Subtree::Elim(elims[k].clone()),
                })
                .collect();
            Ok(HeadRow {
                case: 0,
                head: Head::IntuVar(x.clone()),
                args,
                head_path: None,
                head_kind: None,
                head_reduct: None,
            })
        }
        Term::Name(a, body) if n == 0 => Ok(HeadRow {
            case: 0,
            head: Head::ClassVar(a.clone()),
            args: vec![arg_term(Path::new(vec![0]), body)],
            head_path: None,
            head_kind: None,
            head_reduct: None,
        }),
        _ if n == 0 => Err(unclassifiable()),
        Term::Lam(..) => match elims[0] {
            Elim::Term(o) => Ok(redex_row(
                ctx,
                t,
                1,
                app_path(0),
                vec![arg_term(app_path(0).child(1).child(0), o)],
            )),
            _ => Err(unclassifiable()),
        },
        Term::Pair(a, b) => match elims[0] {
            Elim::Proj(_) => {
                let p = app_path(0).child(0);
                Ok(redex_row(
                    ctx,
                    t,
                    2,
                    app_path(0),
                    vec![arg_term(p.child(0), a), arg_term(p.child(1), b)],
                ))
            }
            _ => Err(unclassifiable()),
        },
        Term::Inj(_, _, body) => match elims[0] {
            Elim::Case(_, o1, _, o2) => {
                let p = app_path(0);
                let args = vec![
                    arg_term(p.child(0).child(0), body),
                    arg_term(p.child(1).child(0), o1),
                    arg_term(p.child(1).child(1), o2),
                ];
                Ok(redex_row(ctx, t, 3, p, args))
            }
            _ => Err(unclassifiable()),
        },
        Term::Mu(..) => {
            let p = app_path(0);
            let arg = Arg {
                path: p.child(1),
                value: Subtree::Elim(elims[0].clone()),
            };
            Ok(redex_row(ctx, t, 4, p, vec![arg]))
        }
        _ => Err(unclassifiable()),
    }
}

fn redex_row(ctx: &TypingContext, t: &Term, case: u8, p: Path, args: Vec<Arg>) -> HeadRow {
    let head = t
        .subterm_at(&p)
        .ok()
        .and_then(|n| n.as_term())
        .cloned()
        .expect("head path resolves");
    let kind = crate::reduction::redex_kind(&head).expect("head is a redex");
    let reduct = reduce_at_in(ctx, t, &p).expect("head is a redex");
    HeadRow {
        case,
        head: Head::Redex(head),
        args,
        head_path: Some(p),
        head_kind: Some(kind),
        head_reduct: Some(reduct),
    }
}

/// The redex the head strategy contracts: the first simple component that
/// is not normal is classified; its head redex is used when it has one, and
/// otherwise the leftmost redex inside it.
pub fn head_strategy_redex(t: &Term) -> Option<Redex> {
    for p in component_paths(t) {
        let m = t.subterm_at(&p).ok()?.as_term()?;
        let inner = redexes(m);
        let Some(first) = inner.first() else { continue };
        if let Ok(row) = classify(m) {
            if let (Some(hp), Some(kind)) = (row.head_path, row.head_kind) {
                return Some(Redex {
                    path: p.join(&hp),
                    kind,
                });
            }
        }
        return Some(Redex {
            path: p.join(&first.path),
            kind: first.kind,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term::alpha_eq;

    fn t(src: &str) -> Term {
        parse_term(src).unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&t("x")), (HoleContext::Hole(1), vec![t("x")]));
        let (c, ms) = decompose(&t("\\x:A.(y z)"));
        assert_eq!(c.to_string(), "\\x:A. *1");
        assert_eq!(ms, vec![t("(y z)")]);
        let (c, ms) = decompose(&t("<x, mu a:A.(a y)>"));
        assert_eq!(c.to_string(), "<*1, mu a:A. *2>");
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0], t("x"));
        assert!(matches!(ms[1], Term::Name(..)));
    }

    #[test]
    fn fill_examples() {
        assert_eq!(fill(&HoleContext::Hole(1), &[t("x")]).unwrap(), t("x"));
        let c = HoleContext::Lam(
            "x".into(),
            Formula::atom("A"),
            Box::new(HoleContext::Hole(1)),
        );
        assert_eq!(fill(&c, &[t("(x y)")]).unwrap().to_string(), "\\x:A. (x y)");
        let c = HoleContext::Pair(
            Box::new(HoleContext::Hole(1)),
            Box::new(HoleContext::Hole(2)),
        );
        assert_eq!(fill(&c, &[t("x"), t("y")]).unwrap(), t("<x, y>"));
        assert_eq!(
            fill(&c, &[t("x")]),
            Err(HeadError::Arity { holes: 2, given: 1 })
        );
        let bad = HoleContext::Pair(
            Box::new(HoleContext::Hole(1)),
            Box::new(HoleContext::Hole(1)),
        );
        assert_eq!(fill(&bad, &[t("x"), t("y")]), Err(HeadError::BadHole(1)));
    }

    #[test]
    fn nice_sequences() {
        let case = Elim::case("y1", t("n"), "y2", t("n"));
        assert!(is_nice(&[]));
        assert!(is_nice(&[
            Elim::Term(t("n")),
            Elim::Proj(Side::Left),
            case.clone()
        ]));
        assert!(!is_nice(&[case, Elim::Term(t("n"))]));
    }

    #[test]
    fn row0() {
        let r = classify(&t("(x t1 t2)")).unwrap();
        assert_eq!(r.case, 0);
        assert_eq!(r.head, Head::IntuVar("x".into()));
        assert_eq!(r.args.len(), 2);
        assert_eq!(r.args[0].path, "/0/1".parse().unwrap());
        assert_eq!(r.head_reduct, None);
        let r = classify(&t("mu a:A.(a (f x))")).unwrap_err();
        assert!(matches!(r, HeadError::NotSimple(_)));
        let named = match t("mu a:A.(a (f x))") {
            Term::Mu(_, _, b) => *b,
            _ => unreachable!(),
        };
        let r = classify(&named).unwrap();
        assert_eq!((r.case, r.head.clone()), (0, Head::ClassVar("a".into())));
        assert_eq!(r.args[0].value, Subtree::Term(t("(f x)")));
    }

    #[test]
    fn row1() {
        let r = classify(&t("(\\x:A.n o t)")).unwrap();
        assert_eq!(r.case, 1);
        assert_eq!(r.head, Head::Redex(t("(\\x:A.n o)")));
        assert_eq!(
            r.args.iter().map(|a| a.value.clone()).collect::<Vec<_>>(),
            vec![Subtree::Term(t("o"))]
        );
        assert!(alpha_eq(r.head_reduct.as_ref().unwrap(), &t("(n t)")));
        let r = classify(&t("(\\x:A.(f x) o t)")).unwrap();
        assert!(alpha_eq(r.head_reduct.as_ref().unwrap(), &t("(f o t)")));
    }

    #[test]
    fn rows_2_to_5() {
        let r = classify(&t("(<n1, n2> p2 t)")).unwrap();
        assert_eq!((r.case, r.args.len()), (2, 2));
        assert!(alpha_eq(r.head_reduct.as_ref().unwrap(), &t("(n2 t)")));

        let r = classify(&t("(in1[A \\/ B] n [x1.(f x1) | x2.o2])")).unwrap();
        assert_eq!(
            (r.case, r.args.len(), r.head_path.clone()),
            (3, 3, Some(Path::root()))
        );
        assert!(alpha_eq(r.head_reduct.as_ref().unwrap(), &t("(f n)")));

        let r = classify(&t("(mu a:A. (a m) e t)")).unwrap();
        assert_eq!((r.case, r.args.len()), (4, 1));
        assert_eq!(r.head_path, Some("/0".parse().unwrap()));

        let r = classify(&t("(mu a:A.m [y1.n1|y2.n2] e)")).unwrap();
        assert_eq!(
            (r.case, r.args.len(), r.head_kind),
            (5, 0, Some(RedexKind::Perm))
        );
        assert_eq!(r.head_path, Some(Path::root()));
    }

    #[test]
    fn row5_pivots_on_the_last_inner_case() {
        let r = classify(&t("(x [y1.a1|y2.a2] t [z1.b1|z2.b2] u v)")).unwrap();
        assert_eq!(r.case, 5);
        assert_eq!(r.head_path, Some("/0".parse().unwrap()));
        let r = classify(&t("(in1[A\\/B] n [y1.a1|y2.a2] t)")).unwrap();
        assert_eq!(r.case, 5);
    }

    #[test]
    fn unclassifiable_raw_terms() {
        assert!(matches!(
            classify(&t("(\\x:A.x p1)")),
            Err(HeadError::Unclassifiable(_))
        ));
        assert!(matches!(
            classify(&t("\\x:A.x")),
            Err(HeadError::NotSimple(_))
        ));
    }

    #[test]
    fn head_strategy_prefers_head_redexes() {
        let r = head_strategy_redex(&t("\\z:A. (mu a:A.m [y1.n1|y2.n2] e)")).unwrap();
        assert_eq!((r.path, r.kind), ("/0".parse().unwrap(), RedexKind::Perm));
        let r = head_strategy_redex(&t("<y, (x (\\u:A.u v))>")).unwrap();
        assert_eq!(r.path, "/1/1/0".parse().unwrap());
        assert!(head_strategy_redex(&t("<y, (x v)>")).is_none());
    }
}
