//! Syntax-directed typechecking.
//!
//! Contexts are sets of declarations with weakening: one context is used for
//! every premise of a rule. Marks and boxes are typed as their contents.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::Formula;
use crate::reduction::step_all_in;
use crate::term::{Elim, Path, Side, Term, Var};

/// Declarations `x : A` and `a : ~A`; the classical map stores `A`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    intu: BTreeMap<Var, Formula>,
    class: BTreeMap<Var, Formula>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_intu(mut self, x: impl Into<Var>, ty: Formula) -> Self {
        self.declare_intu(x, ty);
        self
    }

    pub fn with_class(mut self, a: impl Into<Var>, ty: Formula) -> Self {
        self.declare_class(a, ty);
        self
    }

    pub fn declare_intu(&mut self, x: impl Into<Var>, ty: Formula) -> Option<Formula> {
        self.intu.insert(x.into(), ty)
    }

    pub fn declare_class(&mut self, a: impl Into<Var>, ty: Formula) -> Option<Formula> {
        self.class.insert(a.into(), ty)
    }

    pub fn intu_type(&self, x: &str) -> Option<&Formula> {
        self.intu.get(x)
    }

    pub fn class_type(&self, a: &str) -> Option<&Formula> {
        self.class.get(a)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.intu.contains_key(x) || self.class.contains_key(x)
    }

    pub fn intu_vars(&self) -> impl Iterator<Item = (&Var, &Formula)> {
        self.intu.iter()
    }

    pub fn class_vars(&self) -> impl Iterator<Item = (&Var, &Formula)> {
        self.class.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.intu.is_empty() && self.class.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intu.len() + self.class.len()
    }

    /// Scoped binding; returns what was shadowed so it can be restored.
    pub(crate) fn bind_intu(&mut self, x: &str, ty: Option<Formula>) -> Option<Formula> {
        match ty {
            Some(t) => self.intu.insert(x.to_string(), t),
            None => self.intu.remove(x),
        }
    }

    pub(crate) fn restore_intu(&mut self, x: &str, old: Option<Formula>) {
        match old {
            Some(t) => self.intu.insert(x.to_string(), t),
            None => self.intu.remove(x),
        };
    }

    pub(crate) fn bind_class(&mut self, a: &str, ty: Option<Formula>) -> Option<Formula> {
        match ty {
            Some(t) => self.class.insert(a.to_string(), t),
            None => self.class.remove(a),
        }
    }

    pub(crate) fn restore_class(&mut self, a: &str, old: Option<Formula>) {
        match old {
            Some(t) => self.class.insert(a.to_string(), t),
            None => self.class.remove(a),
        };
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error at {path}: {kind}")]
pub struct TypeError {
    pub path: Path,
    pub kind: TypeErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound intuitionistic variable `{0}`")]
    UnboundVar(Var),
    #[error("unbound classical variable `{0}`")]
    UnboundClassical(Var),
    #[error("cannot apply a term of type {0} to an argument")]
    NotAnImplication(Formula),
    #[error("argument has type {found}, expected {expected}")]
    ArgumentMismatch { expected: Formula, found: Formula },
    #[error("cannot project from a term of type {0}")]
    NotAConjunction(Formula),
    #[error("cannot do case analysis on a term of type {0}")]
    NotADisjunction(Formula),
    #[error("case branches have different types {0} and {1}")]
    BranchMismatch(Formula, Formula),
    #[error("injection annotation {0} is not a disjunction")]
    InjAnnotNotOr(Formula),
    #[error("injected term has type {found}, annotation expects {expected}")]
    InjMismatch { expected: Formula, found: Formula },
    #[error("body of mu has type {0}, expected Bot")]
    MuBodyNotBottom(Formula),
    #[error("named term has type {found}, but the classical variable expects {expected}")]
    NameMismatch { expected: Formula, found: Formula },
    #[error("a box may only appear as an eliminator")]
    NestedBox,
    #[error("expected type {expected}, found {found}")]
    Expected { expected: Formula, found: Formula },
}

/// The type of `t` under `ctx`, or the first rule violation.
pub fn check(ctx: &TypingContext, t: &Term) -> Result<Formula, TypeError> {
    let mut ctx = ctx.clone();
    let mut path = Path::root();
    infer(&mut ctx, t, &mut path)
}

/// Checks against an expected type.
pub fn check_against(ctx: &TypingContext, t: &Term, expected: &Formula) -> Result<(), TypeError> {
    let found = check(ctx, t)?;
    if &found == expected {
        Ok(())
    } else {
        Err(TypeError {
            path: Path::root(),
            kind: TypeErrorKind::Expected {
                expected: expected.clone(),
                found,
            },
        })
    }
}

/// Like [`check`] on a scratch context that callers extend in place.
pub(crate) fn infer_in(ctx: &mut TypingContext, t: &Term) -> Option<Formula> {
    let mut path = Path::root();
    infer(ctx, t, &mut path).ok()
}

fn fail<T>(path: &Path, kind: TypeErrorKind) -> Result<T, TypeError> {
    Err(TypeError {
        path: path.clone(),
        kind,
    })
}

fn infer(ctx: &mut TypingContext, t: &Term, path: &mut Path) -> Result<Formula, TypeError> {
    match t {
        Term::Var(x) => match ctx.intu_type(x) {
            Some(ty) => Ok(ty.clone()),
            None => fail(path, TypeErrorKind::UnboundVar(x.clone())),
        },
        Term::Lam(x, a, body) => {
            let old = ctx.bind_intu(x, Some(a.clone()));
            path.push(0);
            let r = infer(ctx, body, path);
            path.pop();
            ctx.restore_intu(x, old);
            Ok(Formula::imp(a.clone(), r?))
        }
        Term::Pair(a, b) => {
            path.push(0);
            let ta = infer(ctx, a, path);
            path.pop();
            let ta = ta?;
            path.push(1);
            let tb = infer(ctx, b, path);
            path.pop();
            Ok(Formula::and(ta, tb?))
        }
        Term::Inj(side, annot, body) => {
            let Formula::Or(l, r) = annot else {
                return fail(path, TypeErrorKind::InjAnnotNotOr(annot.clone()));
            };
            path.push(0);
            let tb = infer(ctx, body, path);
            path.pop();
            let tb = tb?;
            let want = side.pick(&**l, &**r);
            if &tb == want {
                Ok(annot.clone())
            } else {
                fail(
                    path,
                    TypeErrorKind::InjMismatch {
                        expected: want.clone(),
                        found: tb,
                    },
                )
            }
        }
        Term::Mu(a, ty, body) => {
            let old = ctx.bind_class(a, Some(ty.clone()));
            path.push(0);
            let r = infer(ctx, body, path);
            path.pop();
            ctx.restore_class(a, old);
            match r? {
                Formula::Bottom => Ok(ty.clone()),
                other => fail(path, TypeErrorKind::MuBodyNotBottom(other)),
            }
        }
        Term::Name(a, body) => {
            let Some(want) = ctx.class_type(a).cloned() else {
                return fail(path, TypeErrorKind::UnboundClassical(a.clone()));
            };
            path.push(0);
            let r = infer(ctx, body, path);
            path.pop();
            let found = r?;
            if found == want {
                Ok(Formula::Bottom)
            } else {
                fail(
                    path,
                    TypeErrorKind::NameMismatch {
                        expected: want,
                        found,
                    },
                )
            }
        }
        Term::Mark(_, body) => {
            path.push(0);
            let r = infer(ctx, body, path);
            path.pop();
            r
        }
        Term::App(f, e) => {
            path.push(0);
            let tf = infer(ctx, f, path);
            path.pop();
            let tf = tf?;
            path.push(1);
            let r = eliminate(ctx, &tf, e, path, false);
            path.pop();
            r
        }
    }
}

/// Type of `(M e)` given the type of `M`; `path` points at `e`.
fn eliminate(
    ctx: &mut TypingContext,
    ty: &Formula,
    e: &Elim,
    path: &mut Path,
    in_box: bool,
) -> Result<Formula, TypeError> {
    match e {
        Elim::Term(arg) => {
            let Formula::Imp(dom, cod) = ty else {
                return fail(path, TypeErrorKind::NotAnImplication(ty.clone()));
            };
            path.push(0);
            let ta = infer(ctx, arg, path);
            path.pop();
            let ta = ta?;
            if &ta == &**dom {
                Ok((**cod).clone())
            } else {
                fail(
                    path,
                    TypeErrorKind::ArgumentMismatch {
                        expected: (**dom).clone(),
                        found: ta,
                    },
                )
            }
        }
        Elim::Proj(side) => match ty {
            Formula::And(l, r) => Ok(side.pick(&**l, &**r).clone()),
            _ => fail(path, TypeErrorKind::NotAConjunction(ty.clone())),
        },
        Elim::Case(x1, n1, x2, n2) => {
            let Formula::Or(l, r) = ty else {
                return fail(path, TypeErrorKind::NotADisjunction(ty.clone()));
            };
            let old = ctx.bind_intu(x1, Some((**l).clone()));
            path.push(0);
            let t1 = infer(ctx, n1, path);
            path.pop();
            ctx.restore_intu(x1, old);
            let t1 = t1?;
            let old = ctx.bind_intu(x2, Some((**r).clone()));
            path.push(1);
            let t2 = infer(ctx, n2, path);
            path.pop();
            ctx.restore_intu(x2, old);
            let t2 = t2?;
            if t1 == t2 {
                Ok(t1)
            } else {
                fail(path, TypeErrorKind::BranchMismatch(t1, t2))
            }
        }
        Elim::Boxed(inner) => {
            if in_box {
                return fail(path, TypeErrorKind::NestedBox);
            }
            path.push(0);
            let r = eliminate(ctx, ty, inner, path, true);
            path.pop();
            r
        }
    }
}

/// Result type of eliminating a value of type `ty` with `e`, where the
/// branches of a case are typed in `ctx`. `None` when it cannot be
/// determined (ill-typed or open raw terms).
pub(crate) fn elim_result_type(ctx: &mut TypingContext, ty: &Formula, e: &Elim) -> Option<Formula> {
    match (e, ty) {
        (Elim::Term(_), Formula::Imp(_, cod)) => Some((**cod).clone()),
        (Elim::Proj(side), Formula::And(l, r)) => Some(side.pick(&**l, &**r).clone()),
        (Elim::Case(x1, n1, x2, n2), Formula::Or(l, r)) => {
            let old = ctx.bind_intu(x1, Some((**l).clone()));
            let t1 = infer_in(ctx, n1);
            ctx.restore_intu(x1, old);
            t1.or_else(|| {
                let old = ctx.bind_intu(x2, Some((**r).clone()));
                let t2 = infer_in(ctx, n2);
                ctx.restore_intu(x2, old);
                t2
            })
        }
        (Elim::Boxed(inner), _) => elim_result_type(ctx, ty, inner),
        _ => None,
    }
}

/// Types of the case binders of a case eliminator applied to `scrutinee`.
pub(crate) fn case_binder_types(
    ctx: &mut TypingContext,
    scrutinee: &Term,
) -> (Option<Formula>, Option<Formula>) {
    match infer_in(ctx, scrutinee) {
        Some(Formula::Or(l, r)) => (Some(*l), Some(*r)),
        _ => (None, None),
    }
}

/// One failure of type preservation along a single reduction step.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub redex: crate::reduction::Redex,
    pub reduct: Term,
    pub found: Result<Formula, TypeError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectReductionReport {
    pub ty: Formula,
    pub reducts: usize,
    pub violations: Vec<Violation>,
}

/// Typechecks every one-step reduct of `t` against the type of `t`.
pub fn subject_reduction_probe(
    ctx: &TypingContext,
    t: &Term,
) -> Result<SubjectReductionReport, TypeError> {
    let ty = check(ctx, t)?;
    let steps = step_all_in(ctx, t);
    let reducts = steps.len();
    let violations = steps
        .into_iter()
        .filter_map(|(redex, reduct)| {
            let found = check(ctx, &reduct);
            (found.as_ref() != Ok(&ty)).then_some(Violation {
                redex,
                reduct,
                found,
            })
        })
        .collect();
    Ok(SubjectReductionReport {
        ty,
        reducts,
        violations,
    })
}

/// Type of a projection; used by generators that build spines.
pub fn project(ty: &Formula, side: Side) -> Option<&Formula> {
    match ty {
        Formula::And(l, r) => Some(side.pick(&**l, &**r)),
        _ => None,
    }
}
