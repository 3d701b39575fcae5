//! Capture-avoiding substitutions.
//!
//! [`SubstIntu`] replaces intuitionistic variables by terms, simultaneously.
//! [`SubstClass`] is the structural substitution `[a:=* e]`, which rewrites
//! every named subterm `(a N)` into `(a (N e))`.

use std::collections::{BTreeMap, BTreeSet};

use crate::term::{fresh_name, Elim, Term, Var};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstIntu {
    map: BTreeMap<Var, Term>,
}

impl SubstIntu {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: impl Into<Var>, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    pub fn insert(&mut self, x: impl Into<Var>, t: Term) {
        self.map.insert(x.into(), t);
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn apply(&self, t: &Term) -> Term {
        subst_intu(t, self)
    }
}

impl FromIterator<(Var, Term)> for SubstIntu {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        SubstIntu {
            map: iter.into_iter().collect(),
        }
    }
}

/// `[a :=* e]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstClass {
    pub var: Var,
    pub elim: Elim,
}

impl SubstClass {
    pub fn new(var: impl Into<Var>, elim: Elim) -> Self {
        SubstClass {
            var: var.into(),
            elim,
        }
    }

    pub fn apply(&self, t: &Term) -> Term {
        subst_class(t, self)
    }
}

struct IntuCtx<'a> {
    map: BTreeMap<&'a str, &'a Term>,
    fiv: BTreeSet<Var>,
    fcv: BTreeSet<Var>,
}

impl<'a> IntuCtx<'a> {
    fn new(map: BTreeMap<&'a str, &'a Term>) -> Self {
        let mut fiv = BTreeSet::new();
        let mut fcv = BTreeSet::new();
        for t in map.values() {
            fiv.extend(t.free_ivars());
            fcv.extend(t.free_cvars());
        }
        IntuCtx { map, fiv, fcv }
    }

    fn without(&self, x: &str) -> Option<IntuCtx<'a>> {
        if !self.map.contains_key(x) {
            return None;
        }
        let mut map = self.map.clone();
        map.remove(x);
        Some(IntuCtx::new(map))
    }
}

pub fn subst_intu(t: &Term, s: &SubstIntu) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    let ctx = IntuCtx::new(s.map.iter().map(|(k, v)| (k.as_str(), v)).collect());
    intu_term(t, &ctx)
}

pub fn subst_intu_elim(e: &Elim, s: &SubstIntu) -> Elim {
    if s.is_empty() {
        return e.clone();
    }
    let ctx = IntuCtx::new(s.map.iter().map(|(k, v)| (k.as_str(), v)).collect());
    intu_elim(e, &ctx)
}

/// Renames a bound intuitionistic binder when it would capture a free
/// variable of the substituted terms.
fn intu_binder(x: &Var, body: &Term, ctx: &IntuCtx<'_>) -> (Var, Term) {
    let narrowed;
    let ctx = match ctx.without(x) {
        Some(c) => {
            narrowed = c;
            &narrowed
        }
        None => ctx,
    };
    if ctx.map.is_empty() {
        return (x.clone(), body.clone());
    }
    if ctx.fiv.contains(x) {
        let mut taken = BTreeSet::new();
        body.all_names(&mut taken);
        taken.extend(ctx.fiv.iter().cloned());
        taken.extend(ctx.map.keys().map(|k| k.to_string()));
        let y = fresh_name(x, |c| taken.contains(c));
        let renamed = rename_ivar(body, x, &y);
        (y, intu_term(&renamed, ctx))
    } else {
        (x.clone(), intu_term(body, ctx))
    }
}

fn intu_term(t: &Term, ctx: &IntuCtx<'_>) -> Term {
    match t {
        Term::Var(x) => match ctx.map.get(x.as_str()) {
            Some(n) => (*n).clone(),
            None => t.clone(),
        },
        Term::Lam(x, a, b) => {
            let (x, b) = intu_binder(x, b, ctx);
            Term::lam(x, a.clone(), b)
        }
        Term::Mu(a, ty, b) => {
            if ctx.fcv.contains(a) {
                let mut taken = BTreeSet::new();
                b.all_names(&mut taken);
                taken.extend(ctx.fcv.iter().cloned());
                let a2 = fresh_name(a, |c| taken.contains(c));
                let renamed = rename_cvar(b, a, &a2);
                Term::mu(a2, ty.clone(), intu_term(&renamed, ctx))
            } else {
                Term::mu(a.clone(), ty.clone(), intu_term(b, ctx))
            }
        }
        Term::Name(a, b) => Term::name(a.clone(), intu_term(b, ctx)),
        Term::App(f, e) => Term::app(intu_term(f, ctx), intu_elim(e, ctx)),
        Term::Pair(a, b) => Term::pair(intu_term(a, ctx), intu_term(b, ctx)),
        Term::Inj(i, a, b) => Term::inj(*i, a.clone(), intu_term(b, ctx)),
        Term::Mark(id, b) => Term::mark(*id, intu_term(b, ctx)),
    }
}

fn intu_elim(e: &Elim, ctx: &IntuCtx<'_>) -> Elim {
    match e {
        Elim::Term(t) => Elim::Term(intu_term(t, ctx)),
        Elim::Proj(i) => Elim::Proj(*i),
        Elim::Case(x1, a, x2, b) => {
            let (x1, a) = intu_binder(x1, a, ctx);
            let (x2, b) = intu_binder(x2, b, ctx);
            Elim::Case(x1, a, x2, b)
        }
        Elim::Boxed(inner) => Elim::boxed(intu_elim(inner, ctx)),
    }
}

/// Renames free occurrences of the intuitionistic `from` to `to`; `to` must
/// be fresh for `t`.
pub fn rename_ivar(t: &Term, from: &str, to: &str) -> Term {
    subst_intu(t, &SubstIntu::single(from, Term::var(to)))
}

/// Renames free occurrences of the classical `from` to `to`; `to` must be
/// fresh for `t`.
pub fn rename_cvar(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, a, b) => Term::lam(x.clone(), a.clone(), rename_cvar(b, from, to)),
        Term::Mu(a, ty, b) => {
            if a == from {
                t.clone()
            } else {
                Term::mu(a.clone(), ty.clone(), rename_cvar(b, from, to))
            }
        }
        Term::Name(a, b) => {
            let a = if a == from { to.to_string() } else { a.clone() };
            Term::name(a, rename_cvar(b, from, to))
        }
        Term::App(f, e) => Term::app(rename_cvar(f, from, to), rename_cvar_elim(e, from, to)),
        Term::Pair(a, b) => Term::pair(rename_cvar(a, from, to), rename_cvar(b, from, to)),
        Term::Inj(i, a, b) => Term::inj(*i, a.clone(), rename_cvar(b, from, to)),
        Term::Mark(id, b) => Term::mark(*id, rename_cvar(b, from, to)),
    }
}

fn rename_cvar_elim(e: &Elim, from: &str, to: &str) -> Elim {
    match e {
        Elim::Term(t) => Elim::Term(rename_cvar(t, from, to)),
        Elim::Proj(i) => Elim::Proj(*i),
        Elim::Case(x1, a, x2, b) => Elim::Case(
            x1.clone(),
            rename_cvar(a, from, to),
            x2.clone(),
            rename_cvar(b, from, to),
        ),
        Elim::Boxed(inner) => Elim::boxed(rename_cvar_elim(inner, from, to)),
    }
}

struct ClassCtx<'a> {
    var: &'a str,
    elim: &'a Elim,
    fiv: BTreeSet<Var>,
    fcv: BTreeSet<Var>,
}

pub fn subst_class(t: &Term, s: &SubstClass) -> Term {
    let ctx = ClassCtx {
        var: &s.var,
        elim: &s.elim,
        fiv: s.elim.free_ivars(),
        fcv: s.elim.free_cvars(),
    };
    class_term(t, &ctx)
}

fn class_ibinder(x: &Var, body: &Term, ctx: &ClassCtx<'_>) -> (Var, Term) {
    if ctx.fiv.contains(x) {
        let mut taken = BTreeSet::new();
        body.all_names(&mut taken);
        taken.extend(ctx.fiv.iter().cloned());
        let y = fresh_name(x, |c| taken.contains(c));
        (y.clone(), class_term(&rename_ivar(body, x, &y), ctx))
    } else {
        (x.clone(), class_term(body, ctx))
    }
}

fn class_term(t: &Term, ctx: &ClassCtx<'_>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, a, b) => {
            let (x, b) = class_ibinder(x, b, ctx);
            Term::lam(x, a.clone(), b)
        }
        Term::Mu(a, ty, b) => {
            if a == ctx.var {
                t.clone()
            } else if ctx.fcv.contains(a) {
                let mut taken = BTreeSet::new();
                b.all_names(&mut taken);
                taken.extend(ctx.fcv.iter().cloned());
                taken.insert(ctx.var.to_string());
                let a2 = fresh_name(a, |c| taken.contains(c));
                Term::mu(
                    a2.clone(),
                    ty.clone(),
                    class_term(&rename_cvar(b, a, &a2), ctx),
                )
            } else {
                Term::mu(a.clone(), ty.clone(), class_term(b, ctx))
            }
        }
        Term::Name(a, b) => {
            let inner = class_term(b, ctx);
            if a == ctx.var {
                Term::name(a.clone(), Term::app(inner, ctx.elim.clone()))
            } else {
                Term::name(a.clone(), inner)
            }
        }
        Term::App(f, e) => Term::app(class_term(f, ctx), class_elim(e, ctx)),
        Term::Pair(a, b) => Term::pair(class_term(a, ctx), class_term(b, ctx)),
        Term::Inj(i, a, b) => Term::inj(*i, a.clone(), class_term(b, ctx)),
        Term::Mark(id, b) => Term::mark(*id, class_term(b, ctx)),
    }
}

fn class_elim(e: &Elim, ctx: &ClassCtx<'_>) -> Elim {
    match e {
        Elim::Term(t) => Elim::Term(class_term(t, ctx)),
        Elim::Proj(i) => Elim::Proj(*i),
        Elim::Case(x1, a, x2, b) => {
            let (x1, a) = class_ibinder(x1, a, ctx);
            let (x2, b) = class_ibinder(x2, b, ctx);
            Elim::Case(x1, a, x2, b)
        }
        Elim::Boxed(inner) => Elim::boxed(class_elim(inner, ctx)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::term::{alpha_eq, Side};

    fn a() -> Formula {
        Formula::atom("A")
    }

    #[test]
    fn variable_hit() {
        let r = subst_intu(&Term::var("x"), &SubstIntu::single("x", Term::var("y")));
        assert_eq!(r, Term::var("y"));
    }

    #[test]
    fn duplication() {
        let id = Term::lam("y", a(), Term::var("y"));
        let t = Term::pair(Term::var("x"), Term::var("x"));
        let r = subst_intu(&t, &SubstIntu::single("x", id.clone()));
        assert_eq!(r, Term::pair(id.clone(), id));
    }

    #[test]
    fn capture_is_avoided() {
        let t = Term::lam("y", a(), Term::var("x"));
        let r = subst_intu(&t, &SubstIntu::single("x", Term::var("y")));
        let Term::Lam(bound, _, body) = &r else {
            panic!("expected a lambda, got {r:?}")
        };
        assert_ne!(bound, "y");
        assert_eq!(**body, Term::var("y"));
        assert!(alpha_eq(&r, &Term::lam("y'", a(), Term::var("y"))));
    }

    #[test]
    fn shadowed_variable_is_untouched() {
        let t = Term::lam("x", a(), Term::var("x"));
        let r = subst_intu(&t, &SubstIntu::single("x", Term::var("z")));
        assert_eq!(r, t);
    }

    #[test]
    fn simultaneous_substitution() {
        let t = Term::pair(Term::var("x"), Term::var("y"));
        let s: SubstIntu = [
            ("x".to_string(), Term::var("y")),
            ("y".to_string(), Term::var("x")),
        ]
        .into_iter()
        .collect();
        assert_eq!(
            subst_intu(&t, &s),
            Term::pair(Term::var("y"), Term::var("x"))
        );
    }

    #[test]
    fn classical_substitution_examples() {
        let p1 = Elim::Proj(Side::Left);
        let r = subst_class(
            &Term::name("a", Term::var("z")),
            &SubstClass::new("a", p1.clone()),
        );
        assert_eq!(r, Term::name("a", Term::app(Term::var("z"), p1.clone())));

        let r = subst_class(&Term::name("b", Term::var("z")), &SubstClass::new("a", p1));
        assert_eq!(r, Term::name("b", Term::var("z")));

        // (a (a x))[a:=* e] = (a ((a (x e)) e))
        let e = Elim::Term(Term::var("e"));
        let t = Term::name("a", Term::name("a", Term::var("x")));
        let expected = Term::name(
            "a",
            Term::app(
                Term::name("a", Term::app(Term::var("x"), e.clone())),
                e.clone(),
            ),
        );
        assert_eq!(subst_class(&t, &SubstClass::new("a", e)), expected);
    }

    #[test]
    fn classical_substitution_avoids_capture() {
        // \e. (a e) [a :=* e]  must not capture the free e.
        let t = Term::lam("e", a(), Term::name("a", Term::var("e")));
        let r = subst_class(&t, &SubstClass::new("a", Elim::Term(Term::var("e"))));
        let expected = Term::lam(
            "f",
            a(),
            Term::name("a", Term::apply(Term::var("f"), Term::var("e"))),
        );
        assert!(alpha_eq(&r, &expected), "{r:?}");
    }

    #[test]
    fn classical_substitution_stops_at_rebinding() {
        let t = Term::mu("a", a(), Term::name("a", Term::var("x")));
        let r = subst_class(&t, &SubstClass::new("a", Elim::Proj(Side::Left)));
        assert_eq!(r, t);
    }
}
