//! One-step cut elimination: redex enumeration, contraction at a position,
//! the full congruence closure and strategy-driven normalization.
//!
//! Reduction works on raw terms. A typing context is only consulted to
//! retype the annotation of a `mu` that absorbs an eliminator; when the type
//! cannot be determined the old annotation is kept.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::Formula;
use crate::subst::{rename_cvar, rename_ivar, subst_class, subst_intu, SubstClass, SubstIntu};
use crate::term::{alpha_key, fresh_name, Elim, Path, PathError, Subtree, Term};
use crate::typing::{case_binder_types, elim_result_type, TypingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RedexKind {
    Beta,
    Proj,
    CaseInj,
    Perm,
    Clas,
    /// `({N} [[e]])` to `(N e)`; only in marked terms.
    Annihilate,
}

impl RedexKind {
    pub fn is_logical(self) -> bool {
        matches!(self, RedexKind::Beta | RedexKind::Proj | RedexKind::CaseInj)
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Beta => "beta",
            RedexKind::Proj => "proj",
            RedexKind::CaseInj => "case-inj",
            RedexKind::Perm => "perm",
            RedexKind::Clas => "clas",
            RedexKind::Annihilate => "annihilate",
        })
    }
}

impl FromStr for RedexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "beta" => RedexKind::Beta,
            "proj" => RedexKind::Proj,
            "case-inj" => RedexKind::CaseInj,
            "perm" => RedexKind::Perm,
            "clas" => RedexKind::Clas,
            "annihilate" => RedexKind::Annihilate,
            other => return Err(format!("unknown redex kind `{other}`")),
        })
    }
}

/// A redex position; displays as a trace line `<path> <kind>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub path: Path,
    pub kind: RedexKind,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.path, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("no redex at {0}")]
    NotARedex(Path),
}

/// The kind of redex rooted at `t`, if any. At most one rule matches.
pub fn redex_kind(t: &Term) -> Option<RedexKind> {
    let Term::App(f, e) = t else { return None };
    match (&**f, &**e) {
        (Term::Lam(..), Elim::Term(_)) => Some(RedexKind::Beta),
        (Term::Pair(..), Elim::Proj(_)) => Some(RedexKind::Proj),
        (Term::Inj(..), Elim::Case(..)) => Some(RedexKind::CaseInj),
        (Term::App(_, inner), _) if matches!(**inner, Elim::Case(..)) => Some(RedexKind::Perm),
        (Term::Mu(..), _) => Some(RedexKind::Clas),
        (Term::Mark(..), Elim::Boxed(_)) => Some(RedexKind::Annihilate),
        _ => None,
    }
}

/// Every redex of `t`, in preorder (leftmost-outermost).
pub fn redexes(t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    let mut path = Path::root();
    collect_term(t, &mut path, &mut out);
    out
}

fn collect_term(t: &Term, path: &mut Path, out: &mut Vec<Redex>) {
    if let Some(kind) = redex_kind(t) {
        out.push(Redex {
            path: path.clone(),
            kind,
        });
    }
    match t {
        Term::Var(_) => {}
        Term::Lam(_, _, b)
        | Term::Inj(_, _, b)
        | Term::Mu(_, _, b)
        | Term::Name(_, b)
        | Term::Mark(_, b) => {
            path.push(0);
            collect_term(b, path, out);
            path.pop();
        }
        Term::Pair(a, b) => {
            path.push(0);
            collect_term(a, path, out);
            path.pop();
            path.push(1);
            collect_term(b, path, out);
            path.pop();
        }
        Term::App(f, e) => {
            path.push(0);
            collect_term(f, path, out);
            path.pop();
            path.push(1);
            collect_elim(e, path, out);
            path.pop();
        }
    }
}

fn collect_elim(e: &Elim, path: &mut Path, out: &mut Vec<Redex>) {
    match e {
        Elim::Proj(_) => {}
        Elim::Term(t) => {
            path.push(0);
            collect_term(t, path, out);
            path.pop();
        }
        Elim::Case(_, a, _, b) => {
            path.push(0);
            collect_term(a, path, out);
            path.pop();
            path.push(1);
            collect_term(b, path, out);
            path.pop();
        }
        Elim::Boxed(inner) => {
            path.push(0);
            collect_elim(inner, path, out);
            path.pop();
        }
    }
}

/// Contracts the redex at `p`, with no typing information.
pub fn reduce_at(t: &Term, p: &Path) -> Result<Term, ReduceError> {
    reduce_at_in(&TypingContext::new(), t, p)
}

/// Contracts the redex at `p`; `ctx` types the free variables of `t`.
pub fn reduce_at_in(ctx: &TypingContext, t: &Term, p: &Path) -> Result<Term, ReduceError> {
    let mut ctx = ctx.clone();
    let Subtree::Term(r) = rewrite_term(&mut ctx, t, p.steps(), p)? else {
        unreachable!("terms rewrite to terms")
    };
    Ok(r)
}

fn bad(p: &Path) -> ReduceError {
    ReduceError::Path(PathError::Invalid(p.clone()))
}

/// Walks to the redex keeping `ctx` in sync with the binders passed.
fn rewrite_term(
    ctx: &mut TypingContext,
    t: &Term,
    rest: &[u8],
    full: &Path,
) -> Result<Subtree, ReduceError> {
    let Some((&i, rest)) = rest.split_first() else {
        return contract(ctx, t)
            .map(Subtree::Term)
            .ok_or_else(|| ReduceError::NotARedex(full.clone()));
    };
    let sub = |ctx: &mut TypingContext, b: &Term| -> Result<Term, ReduceError> {
        match rewrite_term(ctx, b, rest, full)? {
            Subtree::Term(x) => Ok(x),
            Subtree::Elim(_) => Err(ReduceError::Path(PathError::SortMismatch(full.clone()))),
        }
    };
    let out = match (t, i) {
        (Term::Lam(x, a, b), 0) => {
            let old = ctx.bind_intu(x, Some(a.clone()));
            let r = sub(ctx, b);
            ctx.restore_intu(x, old);
            Term::lam(x.clone(), a.clone(), r?)
        }
        (Term::Mu(x, a, b), 0) => {
            let old = ctx.bind_class(x, Some(a.clone()));
            let r = sub(ctx, b);
            ctx.restore_class(x, old);
            Term::mu(x.clone(), a.clone(), r?)
        }
        (Term::Inj(s, a, b), 0) => Term::inj(*s, a.clone(), sub(ctx, b)?),
        (Term::Name(x, b), 0) => Term::name(x.clone(), sub(ctx, b)?),
        (Term::Mark(id, b), 0) => Term::mark(*id, sub(ctx, b)?),
        (Term::Pair(a, b), 0) => Term::pair(sub(ctx, a)?, (**b).clone()),
        (Term::Pair(a, b), 1) => Term::pair((**a).clone(), sub(ctx, b)?),
        (Term::App(f, e), 0) => Term::app(sub(ctx, f)?, (**e).clone()),
        (Term::App(f, e), 1) => {
            let (l, r) = if contains_case(e) {
                case_binder_types(ctx, f)
            } else {
                (None, None)
            };
            Term::app((**f).clone(), rewrite_elim(ctx, e, rest, full, &l, &r)?)
        }
        _ => return Err(bad(full)),
    };
    Ok(Subtree::Term(out))
}

fn contains_case(e: &Elim) -> bool {
    match e {
        Elim::Case(..) => true,
        Elim::Boxed(inner) => contains_case(inner),
        _ => false,
    }
}

fn rewrite_elim(
    ctx: &mut TypingContext,
    e: &Elim,
    rest: &[u8],
    full: &Path,
    l: &Option<Formula>,
    r: &Option<Formula>,
) -> Result<Elim, ReduceError> {
    let Some((&i, rest)) = rest.split_first() else {
        return Err(ReduceError::NotARedex(full.clone()));
    };
    let sub = |ctx: &mut TypingContext, b: &Term| -> Result<Term, ReduceError> {
        match rewrite_term(ctx, b, rest, full)? {
            Subtree::Term(x) => Ok(x),
            Subtree::Elim(_) => Err(ReduceError::Path(PathError::SortMismatch(full.clone()))),
        }
    };
    Ok(match (e, i) {
        (Elim::Term(t), 0) => Elim::Term(sub(ctx, t)?),
        (Elim::Case(x1, a, x2, b), 0) => {
            let old = ctx.bind_intu(x1, l.clone());
            let res = sub(ctx, a);
            ctx.restore_intu(x1, old);
            Elim::Case(x1.clone(), res?, x2.clone(), b.clone())
        }
        (Elim::Case(x1, a, x2, b), 1) => {
            let old = ctx.bind_intu(x2, r.clone());
            let res = sub(ctx, b);
            ctx.restore_intu(x2, old);
            Elim::Case(x1.clone(), a.clone(), x2.clone(), res?)
        }
        (Elim::Boxed(inner), 0) => Elim::boxed(rewrite_elim(ctx, inner, rest, full, l, r)?),
        _ => return Err(bad(full)),
    })
}

/// The contractum of the redex at the root of `t`.
fn contract(ctx: &mut TypingContext, t: &Term) -> Option<Term> {
    let kind = redex_kind(t)?;
    let Term::App(f, e) = t else { unreachable!() };
    Some(match (kind, &**f, &**e) {
        (RedexKind::Beta, Term::Lam(x, _, body), Elim::Term(n)) => {
            subst_intu(body, &SubstIntu::single(x.clone(), n.clone()))
        }
        (RedexKind::Proj, Term::Pair(a, b), Elim::Proj(side)) => side.pick(&**a, &**b).clone(),
        (RedexKind::CaseInj, Term::Inj(side, _, m), Elim::Case(x1, n1, x2, n2)) => {
            let (x, n) = side.pick((x1, n1), (x2, n2));
            subst_intu(n, &SubstIntu::single(x.clone(), (**m).clone()))
        }
        (RedexKind::Perm, Term::App(m, inner), eps) => {
            let Elim::Case(x1, n1, x2, n2) = &**inner else {
                unreachable!()
            };
            let fv = eps.free_ivars();
            let push = |x: &String, n: &Term| {
                let (x, n) = if fv.contains(x) {
                    let mut taken = fv.clone();
                    n.all_names(&mut taken);
                    let y = fresh_name(x, |c| taken.contains(c));
                    let n = rename_ivar(n, x, &y);
                    (y, n)
                } else {
                    (x.clone(), n.clone())
                };
                (x, Term::app(n, eps.clone()))
            };
            let (y1, b1) = push(x1, n1);
            let (y2, b2) = push(x2, n2);
            Term::app((**m).clone(), Elim::Case(y1, b1, y2, b2))
        }
        (RedexKind::Clas, Term::Mu(a, ty, body), eps) => {
            let new_ty = elim_result_type(ctx, ty, eps).unwrap_or_else(|| ty.clone());
            let fcv = eps.free_cvars();
            let (a, body) = if fcv.contains(a) {
                let mut taken = fcv;
                body.all_names(&mut taken);
                let b = fresh_name(a, |c| taken.contains(c));
                let body = rename_cvar(body, a, &b);
                (b, body)
            } else {
                (a.clone(), (**body).clone())
            };
            let body = subst_class(&body, &SubstClass::new(a.clone(), eps.clone()));
            Term::mu(a, new_ty, body)
        }
        (RedexKind::Annihilate, Term::Mark(_, n), Elim::Boxed(inner)) => {
            Term::app((**n).clone(), (**inner).clone())
        }
        _ => unreachable!("redex_kind and contract agree"),
    })
}

/// All one-step reducts, deduplicated up to alpha; the first redex reaching
/// each class is kept.
pub fn step_all(t: &Term) -> Vec<(Redex, Term)> {
    step_all_in(&TypingContext::new(), t)
}

pub fn step_all_in(ctx: &TypingContext, t: &Term) -> Vec<(Redex, Term)> {
    step_all_keyed(ctx, t)
        .into_iter()
        .map(|(r, t, _)| (r, t))
        .collect()
}

/// Like [`step_all_in`], also returning each reduct's alpha key.
pub(crate) fn step_all_keyed(ctx: &TypingContext, t: &Term) -> Vec<(Redex, Term, Term)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in redexes(t) {
        let reduct = reduce_at_in(ctx, t, &r.path).expect("listed redexes contract");
        let key = alpha_key(&reduct);
        if seen.insert(key.clone()) {
            out.push((r, reduct, key));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The head redex of the first non-normal simple component, else the
    /// leftmost redex inside it.
    Head,
    Leftmost,
    Random(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Head => f.write_str("head"),
            Strategy::Leftmost => f.write_str("leftmost"),
            Strategy::Random(s) => write!(f, "random({s})"),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// Accepts `head`, `leftmost`, `random` (seed 0) and `random(N)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "head" => Ok(Strategy::Head),
            "leftmost" => Ok(Strategy::Leftmost),
            "random" => Ok(Strategy::Random(0)),
            _ => s
                .strip_prefix("random(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(Strategy::Random)
                .ok_or_else(|| {
                    format!("unknown strategy `{s}` (expected head, leftmost or random(N))")
                }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub term: Term,
    pub trace: Vec<Redex>,
    /// Set when `max_steps` ran out before a normal form was reached.
    pub exhausted: bool,
}

/// The redex a strategy picks next, if `t` is not normal.
pub fn choose_redex(t: &Term, strategy: Strategy, rng: &mut ChaCha8Rng) -> Option<Redex> {
    match strategy {
        Strategy::Leftmost => redexes(t).into_iter().next(),
        Strategy::Random(_) => {
            let mut all = redexes(t);
            if all.is_empty() {
                None
            } else {
                let i = rng.gen_range(0..all.len());
                Some(all.swap_remove(i))
            }
        }
        Strategy::Head => crate::head::head_strategy_redex(t),
    }
}

pub fn normalize(t: &Term, strategy: Strategy, max_steps: usize) -> Normalized {
    normalize_in(&TypingContext::new(), t, strategy, max_steps)
}

pub fn normalize_in(
    ctx: &TypingContext,
    t: &Term,
    strategy: Strategy,
    max_steps: usize,
) -> Normalized {
    let seed = match strategy {
        Strategy::Random(s) => s,
        _ => 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut term = t.clone();
    let mut trace = Vec::new();
    loop {
        let Some(r) = choose_redex(&term, strategy, &mut rng) else {
            return Normalized {
                term,
                trace,
                exhausted: false,
            };
        };
        if trace.len() >= max_steps {
            return Normalized {
                term,
                trace,
                exhausted: true,
            };
        }
        term = reduce_at_in(ctx, &term, &r.path).expect("strategies pick listed redexes");
        trace.push(r);
    }
}

/// The terms visited when firing `trace` from `t`, starting with `t`.
pub fn replay(ctx: &TypingContext, t: &Term, trace: &[Redex]) -> Result<Vec<Term>, ReduceError> {
    let mut out = vec![t.clone()];
    for r in trace {
        let next = reduce_at_in(ctx, out.last().unwrap(), &r.path)?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_term};
    use crate::term::alpha_eq;
    use crate::typing::check;

    fn t(src: &str) -> Term {
        parse_term(src).unwrap_or_else(|e| panic!("{e}"))
    }

    fn p(s: &str) -> Path {
        s.parse().unwrap()
    }

    #[test]
    fn listing_examples() {
        assert_eq!(
            redexes(&t("(\\x:A.x y)")),
            vec![Redex {
                path: Path::root(),
                kind: RedexKind::Beta
            }]
        );
        assert!(redexes(&t("y")).is_empty());
        let cp = redexes(&t("(mu a:A.m [x1.n1|x2.n2] e)"));
        assert_eq!(
            cp,
            vec![
                Redex {
                    path: Path::root(),
                    kind: RedexKind::Perm
                },
                Redex {
                    path: p("/0"),
                    kind: RedexKind::Clas
                },
            ]
        );
    }

    #[test]
    fn redexes_inside_case_branches_are_found() {
        let r = redexes(&t("(m [x1.(\\y:A.y x1) | x2.n])"));
        assert_eq!(
            r,
            vec![Redex {
                path: p("/1/0"),
                kind: RedexKind::Beta
            }]
        );
    }

    #[test]
    fn contraction_examples() {
        let r = reduce_at(&t("(in1[A\\/B] m [x1.(f x1) | x2.n2])"), &Path::root()).unwrap();
        assert!(alpha_eq(&r, &t("(f m)")));
        let r = reduce_at(&t("(m [x1.n1 | x2.n2] p1)"), &Path::root()).unwrap();
        assert!(alpha_eq(&r, &t("(m [x1.(n1 p1) | x2.(n2 p1)])")));
        let r = reduce_at(&t("(<m, n> p2)"), &Path::root()).unwrap();
        assert_eq!(r, t("n"));
    }

    #[test]
    fn classical_step_retypes_the_mu() {
        let u = parse("ctx f:A -> B, x:A; (mu a:A->B. (a f) x)").unwrap();
        let r = reduce_at_in(&u.ctx, &u.term, &Path::root()).unwrap();
        assert!(alpha_eq(&r, &t("mu a:B. (a (f x))")));
        assert_eq!(check(&u.ctx, &r).unwrap(), check(&u.ctx, &u.term).unwrap());
        // a case eliminator needs the branch types, which an empty context
        // cannot provide
        let r = reduce_at(&t("(mu a:A \\/ B. (a m) [x1.c | x2.d])"), &Path::root()).unwrap();
        assert!(alpha_eq(&r, &t("mu a:A \\/ B. (a (m [x1.c | x2.d]))")));
    }

    #[test]
    fn classical_step_retypes_under_case_binders() {
        let u = parse("ctx m:A \\/ B, f:A -> C /\\ D, g:B -> C /\\ D; (m [x1.(mu a:C /\\ D. (a (f x1)) p1) | x2.(g x2 p1)])").unwrap();
        let r = reduce_at_in(&u.ctx, &u.term, &p("/1/0")).unwrap();
        assert_eq!(check(&u.ctx, &r).unwrap(), check(&u.ctx, &u.term).unwrap());
    }

    #[test]
    fn classical_step_with_case_retypes_from_the_branches() {
        let u = parse("ctx m:A \\/ B, c:C, d:C; (mu a:A \\/ B. (a m) [x1.c | x2.d])").unwrap();
        let r = reduce_at_in(&u.ctx, &u.term, &Path::root()).unwrap();
        assert!(alpha_eq(&r, &t("mu a:C. (a (m [x1.c | x2.d]))")));
    }

    #[test]
    fn classical_step_does_not_capture_names_in_the_eliminator() {
        // the outer `a` inside the argument must stay distinct from the binder
        let r = reduce_at(
            &t("\\k:A. mu a:A. (mu a:A -> A. (a k) \\z:A. mu c:A. (a z))"),
            &p("/0/0"),
        )
        .unwrap();
        let Term::Lam(_, _, body) = &r else { panic!() };
        let Term::Mu(outer, _, inner) = &**body else {
            panic!()
        };
        let Term::Mu(b, _, _) = &**inner else {
            panic!()
        };
        assert_ne!(outer, b);
    }

    #[test]
    fn permutation_renames_branch_binders_free_in_eps() {
        let r = reduce_at(&t("(m [x.n | y.o] x)"), &Path::root()).unwrap();
        let Term::App(_, e) = &r else { panic!() };
        let Elim::Case(x1, b1, _, _) = &**e else {
            panic!()
        };
        assert_ne!(x1, "x");
        assert!(alpha_eq(&r, &t("(m [z.(n x) | y.(o x)])")));
        let _ = b1;
    }

    #[test]
    fn not_a_redex_is_reported() {
        assert_eq!(
            reduce_at(&t("(x y)"), &Path::root()),
            Err(ReduceError::NotARedex(Path::root()))
        );
        assert!(matches!(
            reduce_at(&t("x"), &p("/0")),
            Err(ReduceError::Path(_))
        ));
    }

    #[test]
    fn step_all_examples() {
        assert!(step_all(&t("y")).is_empty());
        assert_eq!(step_all(&t("(\\x:A.<x,x> (\\y:A.y z))")).len(), 2);
        assert_eq!(step_all(&t("(mu a:A.m [x1.n1|x2.n2] e)")).len(), 2);
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&t("(\\x:A.x y)"), Strategy::Leftmost, 100);
        assert_eq!((n.term, n.trace.len(), n.exhausted), (t("y"), 1, false));
        let n = normalize(&t("(\\x:A.x y)"), Strategy::Leftmost, 0);
        assert_eq!(
            (n.term, n.trace.len(), n.exhausted),
            (t("(\\x:A.x y)"), 0, true)
        );
        let n = normalize(&t("y"), Strategy::Leftmost, 0);
        assert!(!n.exhausted);
    }

    #[test]
    fn normalize_peirce_application() {
        let u = parse("ctx v:A; (\\x:(A->B)->A. mu a:A. (a (x \\y:A. mu b:B. (a y))) \\k:A->B. v)")
            .unwrap();
        let ty = check(&u.ctx, &u.term).unwrap();
        for s in [Strategy::Leftmost, Strategy::Head, Strategy::Random(7)] {
            let n = normalize_in(&u.ctx, &u.term, s, 1000);
            assert!(!n.exhausted);
            assert!(redexes(&n.term).is_empty());
            assert_eq!(check(&u.ctx, &n.term).unwrap(), ty);
        }
    }

    #[test]
    fn trace_lines_and_strategy_names() {
        let r = Redex {
            path: p("/0/1"),
            kind: RedexKind::CaseInj,
        };
        assert_eq!(r.to_string(), "/0/1 case-inj");
        assert_eq!(
            "random(3)".parse::<Strategy>().unwrap(),
            Strategy::Random(3)
        );
        assert_eq!("head".parse::<Strategy>().unwrap(), Strategy::Head);
        assert!("bogus".parse::<Strategy>().is_err());
        assert_eq!("perm".parse::<RedexKind>().unwrap(), RedexKind::Perm);
    }

    #[test]
    fn annihilation() {
        let r = redexes(&t("({n} [[e]])"));
        assert_eq!(
            r,
            vec![Redex {
                path: Path::root(),
                kind: RedexKind::Annihilate
            }]
        );
        assert_eq!(
            reduce_at(&t("({n} [[e]])"), &Path::root()).unwrap(),
            t("(n e)")
        );
    }
}
