//! Marked terms.
//!
//! A mark `{N}` records a term that will eventually receive an eliminator,
//! and a box `[[e]]` records an eliminator that has not been delivered yet.
//! In a correct term each mark is paired with exactly one box through the
//! acceptable term `U` it sits in, written `(U [[e]])`. Two translations
//! project a marked term back to plain terms: [`t1`] forgets the
//! bookkeeping, and [`t2`] delivers every boxed eliminator to its marks.
//!
//! Reducing the erasure `T1` of a correct term can be mirrored by reducing
//! the marked term ([`lift_step`]), and then `T2` either advances or stays
//! put while a box moves closer to its marks ([`btr_step`], measured by
//! [`lg`]). [`certify_app`] replays a reduction of `S1` this way.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::reduction::{redexes, reduce_at_in, step_all_in, Redex, RedexKind};
use crate::scenario::{BoxMode, Scenario};
use crate::term::{alpha_eq, alpha_key, fresh_name, Elim, MarkId, Node, Path, Term, Var};
use crate::typing::{elim_result_type, infer_in, TypingContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkedError {
    #[error("term is not acceptable")]
    NotAcceptable,
    #[error("term is not correct")]
    NotCorrect,
    #[error("no mark at {0}")]
    NoMark(Path),
    #[error("the mark at {0} belongs to {1} boxes")]
    Ownership(Path, usize),
    #[error("no marked reduction of at most two steps erases to the target")]
    NoLift,
}

/// Number of boxes.
pub fn nb(t: &Term) -> usize {
    fn elim(e: &Elim) -> usize {
        match e {
            Elim::Term(t) => nb(t),
            Elim::Proj(_) => 0,
            Elim::Case(_, a, _, b) => nb(a) + nb(b),
            Elim::Boxed(inner) => 1 + elim(inner),
        }
    }
    match t {
        Term::Var(_) => 0,
        Term::Lam(_, _, b)
        | Term::Inj(_, _, b)
        | Term::Mu(_, _, b)
        | Term::Name(_, b)
        | Term::Mark(_, b) => nb(b),
        Term::Pair(a, b) => nb(a) + nb(b),
        Term::App(f, e) => nb(f) + elim(e),
    }
}

/// Erases marks and boxes.
pub fn t1(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, a, b) => Term::lam(x.clone(), a.clone(), t1(b)),
        Term::Inj(s, a, b) => Term::inj(*s, a.clone(), t1(b)),
        Term::Mu(x, a, b) => Term::mu(x.clone(), a.clone(), t1(b)),
        Term::Name(x, b) => Term::name(x.clone(), t1(b)),
        Term::Mark(_, b) => t1(b),
        Term::Pair(a, b) => Term::pair(t1(a), t1(b)),
        Term::App(f, e) => Term::app(t1(f), t1_elim(e)),
    }
}

pub fn t1_elim(e: &Elim) -> Elim {
    match e {
        Elim::Term(t) => Elim::Term(t1(t)),
        Elim::Proj(s) => Elim::Proj(*s),
        Elim::Case(x1, a, x2, b) => Elim::Case(x1.clone(), t1(a), x2.clone(), t1(b)),
        Elim::Boxed(inner) => t1_elim(inner),
    }
}

/// All one-step reducts, including reductions inside marks and boxes and
/// annihilations `({N} [[e]])` to `(N e)`.
pub fn marked_step_all(ctx: &TypingContext, t: &Term) -> Vec<(Redex, Term)> {
    step_all_in(ctx, t)
}

/// Whether the redex at `r` moves a box: a permutation or a classical step
/// whose eliminator is boxed.
pub fn is_btr(t: &Term, r: &Redex) -> bool {
    if !matches!(r.kind, RedexKind::Perm | RedexKind::Clas) {
        return false;
    }
    matches!(t.subterm_at(&r.path), Ok(Node::Term(Term::App(_, e))) if matches!(**e, Elim::Boxed(_)))
}

/// The box-moving steps.
pub fn btr_step(ctx: &TypingContext, t: &Term) -> Vec<(Redex, Term)> {
    redexes(t)
        .into_iter()
        .filter(|r| is_btr(t, r))
        .map(|r| {
            let reduct = reduce_at_in(ctx, t, &r.path).expect("listed redexes contract");
            (r, reduct)
        })
        .collect()
}

/// Paths, relative to `body`, of the free namings `(a S)`.
fn namings(body: &Term, a: &str) -> Vec<Path> {
    fn go(t: &Term, a: &str, path: &mut Path, out: &mut Vec<Path>) {
        match t {
            Term::Var(_) => {}
            Term::Mu(b, _, _) if b == a => {}
            Term::Name(b, s) => {
                if b == a {
                    out.push(path.clone());
                }
                path.push(0);
                go(s, a, path, out);
                path.pop();
            }
            Term::Lam(_, _, s) | Term::Inj(_, _, s) | Term::Mu(_, _, s) | Term::Mark(_, s) => {
                path.push(0);
                go(s, a, path, out);
                path.pop();
            }
            Term::Pair(l, r) => {
                path.push(0);
                go(l, a, path, out);
                path.pop();
                path.push(1);
                go(r, a, path, out);
                path.pop();
            }
            Term::App(f, e) => {
                path.push(0);
                go(f, a, path, out);
                path.pop();
                path.push(1);
                elim(e, a, path, out);
                path.pop();
            }
        }
    }
    fn elim(e: &Elim, a: &str, path: &mut Path, out: &mut Vec<Path>) {
        match e {
            Elim::Proj(_) => {}
            Elim::Term(t) => {
                path.push(0);
                go(t, a, path, out);
                path.pop();
            }
            Elim::Case(_, l, _, r) => {
                path.push(0);
                go(l, a, path, out);
                path.pop();
                path.push(1);
                go(r, a, path, out);
                path.pop();
            }
            Elim::Boxed(inner) => {
                path.push(0);
                elim(inner, a, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(body, a, &mut Path::root(), &mut out);
    out
}

fn term_at<'a>(t: &'a Term, p: &Path) -> &'a Term {
    t.subterm_at(p)
        .ok()
        .and_then(|n| n.as_term())
        .expect("path to a term")
}

/// `{N}`; `mu a M` where every `(a S)` has `S` acceptable; or `(N [x.P | y.Q])`
/// with `P` and `Q` acceptable.
pub fn acceptable(t: &Term) -> bool {
    match t {
        Term::Mark(..) => true,
        Term::Mu(a, _, body) => namings(body, a)
            .iter()
            .all(|p| acceptable(term_at(body, &p.child(0)))),
        Term::App(_, e) => match &**e {
            Elim::Case(_, l, _, r) => acceptable(l) && acceptable(r),
            _ => false,
        },
        _ => false,
    }
}

/// The marks an acceptable term is responsible for, as paths relative to it.
pub fn st_set(t: &Term) -> Result<Vec<Path>, MarkedError> {
    if !acceptable(t) {
        return Err(MarkedError::NotAcceptable);
    }
    let mut out = Vec::new();
    st_into(t, &mut Path::root(), &mut out);
    Ok(out)
}

fn st_into(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
    match t {
        Term::Mark(..) => out.push(path.clone()),
        Term::Mu(a, _, body) => {
            for q in namings(body, a) {
                let full = path.child(0).join(&q).child(0);
                let mut p = full.clone();
                st_into(term_at(body, &q.child(0)), &mut p, out);
            }
        }
        Term::App(_, e) => {
            if let Elim::Case(_, l, _, r) = &**e {
                path.push(1);
                path.push(0);
                st_into(l, path, out);
                path.pop();
                path.push(1);
                st_into(r, path, out);
                path.pop();
                path.pop();
            }
        }
        _ => {}
    }
}

fn leaves_into(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
    match t {
        Term::Mark(..) => out.push(path.clone()),
        Term::Mu(a, _, body) => {
            let ns = namings(body, a);
            if ns.is_empty() {
                out.push(path.clone());
            }
            for q in ns {
                let mut p = path.child(0).join(&q).child(0);
                leaves_into(term_at(body, &q.child(0)), &mut p, out);
            }
        }
        Term::App(_, e) => {
            if let Elim::Case(_, l, _, r) = &**e {
                for (i, b) in [l, r].into_iter().enumerate() {
                    let mut p = path.child(1).child(i as u8);
                    leaves_into(b, &mut p, out);
                }
            }
        }
        _ => {}
    }
}

/// Labels of the marks in `st(t)`, as a sorted multiset.
pub fn st_ids(t: &Term) -> Result<Vec<MarkId>, MarkedError> {
    let mut ids: Vec<MarkId> = st_set(t)?
        .iter()
        .map(|p| match term_at(t, p) {
            Term::Mark(id, _) => *id,
            _ => unreachable!("st collects marks"),
        })
        .collect();
    ids.sort();
    Ok(ids)
}

/// `t` is in `E`; or `t = mu a M` and every `S` with `(a S)` in `M` is good;
/// or `t = (N [x.P | y.Q])` and `P`, `Q` are good. `E` holds paths relative
/// to `t`.
pub fn good_wrt(t: &Term, e: &BTreeSet<Path>) -> bool {
    good_at(t, &Path::root(), e)
}

fn good_at(t: &Term, at: &Path, e: &BTreeSet<Path>) -> bool {
    if e.contains(at) {
        return true;
    }
    match t {
        Term::Mu(a, _, body) => namings(body, a).iter().all(|q| {
            let p = at.child(0).join(q).child(0);
            good_at(term_at(body, &q.child(0)), &p, e)
        }),
        Term::App(_, el) => match &**el {
            Elim::Case(_, l, _, r) => {
                good_at(l, &at.child(1).child(0), e) && good_at(r, &at.child(1).child(1), e)
            }
            _ => false,
        },
        _ => false,
    }
}

/// A subterm `(U [[e]])`.
#[derive(Clone, Debug)]
struct Site {
    app: Path,
    acceptable: bool,
    payload: Elim,
    /// Marks of `st(U)`, as absolute paths.
    marks: Vec<Path>,
    /// Where the box stops moving: the marks plus every `mu` of the
    /// acceptable spine that names nothing.
    leaves: Vec<Path>,
}

struct Analysis {
    sites: Vec<Site>,
    /// Every mark, with the sites whose `st` contains it.
    owners: BTreeMap<Path, Vec<usize>>,
    /// A box that is not the eliminator of an application.
    stray_box: bool,
    /// Paths of the subterms without boxes.
    box_free: BTreeSet<Path>,
}

fn analyze(t: &Term) -> Analysis {
    let mut a = Analysis {
        sites: Vec::new(),
        owners: BTreeMap::new(),
        stray_box: false,
        box_free: BTreeSet::new(),
    };
    scan_term(t, &mut Path::root(), &mut a);
    for i in 0..a.sites.len() {
        for m in a.sites[i].marks.clone() {
            a.owners.entry(m).or_default().push(i);
        }
    }
    a
}

/// Returns whether the subterm is box-free.
fn scan_term(t: &Term, path: &mut Path, a: &mut Analysis) -> bool {
    let free = match t {
        Term::Var(_) => true,
        Term::Mark(_, b) => {
            a.owners.entry(path.clone()).or_default();
            path.push(0);
            let r = scan_term(b, path, a);
            path.pop();
            r
        }
        Term::Lam(_, _, b) | Term::Inj(_, _, b) | Term::Mu(_, _, b) | Term::Name(_, b) => {
            path.push(0);
            let r = scan_term(b, path, a);
            path.pop();
            r
        }
        Term::Pair(l, r) => {
            path.push(0);
            let x = scan_term(l, path, a);
            path.pop();
            path.push(1);
            let y = scan_term(r, path, a);
            path.pop();
            x && y
        }
        Term::App(f, e) => {
            path.push(0);
            let x = scan_term(f, path, a);
            path.pop();
            path.push(1);
            let y = match &**e {
                Elim::Boxed(inner) => {
                    let acc = acceptable(f);
                    let (mut marks, mut leaves) = (Vec::new(), Vec::new());
                    if acc {
                        st_into(f, &mut path.parent_child(0), &mut marks);
                        leaves_into(f, &mut path.parent_child(0), &mut leaves);
                    }
                    let app = {
                        let mut p = path.clone();
                        p.pop();
                        p
                    };
                    a.sites.push(Site {
                        app,
                        acceptable: acc,
                        payload: (**inner).clone(),
                        marks,
                        leaves,
                    });
                    path.push(0);
                    scan_elim(inner, path, a);
                    path.pop();
                    false
                }
                other => scan_elim(other, path, a),
            };
            path.pop();
            x && y
        }
    };
    if free {
        a.box_free.insert(path.clone());
    }
    free
}

fn scan_elim(e: &Elim, path: &mut Path, a: &mut Analysis) -> bool {
    match e {
        Elim::Proj(_) => true,
        Elim::Term(t) => {
            path.push(0);
            let r = scan_term(t, path, a);
            path.pop();
            r
        }
        Elim::Case(_, l, _, r) => {
            path.push(0);
            let x = scan_term(l, path, a);
            path.pop();
            path.push(1);
            let y = scan_term(r, path, a);
            path.pop();
            x && y
        }
        Elim::Boxed(inner) => {
            a.stray_box = true;
            path.push(0);
            scan_elim(inner, path, a);
            path.pop();
            false
        }
    }
}

trait PathExt {
    fn parent_child(&self, i: u8) -> Path;
}

impl PathExt for Path {
    /// The sibling `i` of this path's last step.
    fn parent_child(&self, i: u8) -> Path {
        let mut p = self.clone();
        p.pop();
        p.push(i);
        p
    }
}

/// The common shape of the boxed eliminators; `None` when there are no
/// boxes, `Err` when shapes are mixed.
pub fn infer_mode(t: &Term) -> Result<Option<BoxMode>, MarkedError> {
    let a = analyze(t);
    let modes: BTreeSet<BoxMode> = a.sites.iter().map(|s| BoxMode::of(&s.payload)).collect();
    match modes.len() {
        0 => Ok(None),
        1 => Ok(modes.into_iter().next()),
        _ => Err(MarkedError::NotCorrect),
    }
}

/// Correctness with the box shape read off the term itself.
pub fn correct(t: &Term) -> bool {
    match infer_mode(t) {
        Ok(mode) => correct_in(t, mode),
        Err(_) => false,
    }
}

/// 1. every box is the eliminator of some `(U [[e]])` with `U` acceptable
///    and `e` of the given shape;
/// 2. every mark lies in `st(U)` for exactly one such box;
/// 3. in case mode, the term is good with respect to its `(U [[e]])`
///    subterms together with its box-free subterms.
pub fn correct_in(t: &Term, mode: Option<BoxMode>) -> bool {
    let a = analyze(t);
    if a.stray_box {
        return false;
    }
    for s in &a.sites {
        if !s.acceptable || matches!(s.payload, Elim::Boxed(_)) {
            return false;
        }
        if mode.is_some_and(|m| BoxMode::of(&s.payload) != m) || mode.is_none() {
            return false;
        }
    }
    if a.owners.values().any(|o| o.len() != 1) {
        return false;
    }
    if mode == Some(BoxMode::Case) {
        let mut e: BTreeSet<Path> = a.sites.iter().map(|s| s.app.clone()).collect();
        e.extend(a.box_free);
        if !good_wrt(t, &e) {
            return false;
        }
    }
    true
}

/// The boxed eliminator owning the mark at `occ`.
pub fn eps_of(t: &Term, occ: &Path) -> Result<Elim, MarkedError> {
    let a = analyze(t);
    let owners = a
        .owners
        .get(occ)
        .ok_or_else(|| MarkedError::NoMark(occ.clone()))?;
    match owners.as_slice() {
        [i] => Ok(a.sites[*i].payload.clone()),
        other => Err(MarkedError::Ownership(occ.clone(), other.len())),
    }
}

/// Renames every binder to a name used nowhere else, so that moving an
/// eliminator under binders cannot capture its free variables.
fn freshen(t: &Term) -> Term {
    let mut taken = BTreeSet::new();
    t.all_names(&mut taken);
    let mut f = Freshener {
        taken,
        intu: HashMap::new(),
        class: HashMap::new(),
    };
    f.term(t)
}

struct Freshener {
    taken: BTreeSet<Var>,
    intu: HashMap<Var, Vec<Var>>,
    class: HashMap<Var, Vec<Var>>,
}

impl Freshener {
    fn fresh(&mut self, x: &str) -> Var {
        let y = fresh_name(x, |c| self.taken.contains(c));
        self.taken.insert(y.clone());
        y
    }

    fn under_intu<T>(&mut self, x: &Var, f: impl FnOnce(&mut Self) -> T) -> (Var, T) {
        let y = self.fresh(x);
        self.intu.entry(x.clone()).or_default().push(y.clone());
        let r = f(self);
        self.intu.get_mut(x).unwrap().pop();
        (y, r)
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(
                self.intu
                    .get(x)
                    .and_then(|s| s.last())
                    .cloned()
                    .unwrap_or_else(|| x.clone()),
            ),
            Term::Lam(x, a, b) => {
                let (y, b) = self.under_intu(x, |s| s.term(b));
                Term::lam(y, a.clone(), b)
            }
            Term::Mu(x, a, b) => {
                let y = self.fresh(x);
                self.class.entry(x.clone()).or_default().push(y.clone());
                let b = self.term(b);
                self.class.get_mut(x).unwrap().pop();
                Term::mu(y, a.clone(), b)
            }
            Term::Name(x, b) => {
                let y = self
                    .class
                    .get(x)
                    .and_then(|s| s.last())
                    .cloned()
                    .unwrap_or_else(|| x.clone());
                Term::name(y, self.term(b))
            }
            Term::Inj(s, a, b) => Term::inj(*s, a.clone(), self.term(b)),
            Term::Mark(id, b) => Term::mark(*id, self.term(b)),
            Term::Pair(a, b) => Term::pair(self.term(a), self.term(b)),
            Term::App(f, e) => Term::app(self.term(f), self.elim(e)),
        }
    }

    fn elim(&mut self, e: &Elim) -> Elim {
        match e {
            Elim::Term(t) => Elim::Term(self.term(t)),
            Elim::Proj(s) => Elim::Proj(*s),
            Elim::Case(x1, a, x2, b) => {
                let (y1, a) = self.under_intu(x1, |s| s.term(a));
                let (y2, b) = self.under_intu(x2, |s| s.term(b));
                Elim::Case(y1, a, y2, b)
            }
            Elim::Boxed(inner) => Elim::boxed(self.elim(inner)),
        }
    }
}

/// Delivers boxed eliminators: each `(U [[e]])` with `U` acceptable becomes
/// `U` with every mark `{N}` of `st(U)` replaced by `(N e)`. Marks whose box
/// is not inside the term stay marks.
pub fn t2(t: &Term) -> Term {
    t2_in(&TypingContext::new(), t)
}

/// [`t2`] where `ctx` types the free variables. Delivering `e` changes the
/// type of `U`, so the `mu` binders along the acceptable structure of `U`
/// are retyped like a classical step would, whenever the types can be
/// computed.
pub fn t2_in(ctx: &TypingContext, t: &Term) -> Term {
    let t = freshen(t);
    let a = analyze(&t);
    let mut owner: HashMap<Path, Path> = HashMap::new();
    let mut sites = HashSet::new();
    let mut flat: Option<TypingContext> = None;
    let mut retype = HashMap::new();
    for s in a.sites.iter().filter(|s| s.acceptable) {
        sites.insert(s.app.clone());
        for m in &s.marks {
            owner.entry(m.clone()).or_insert_with(|| s.app.clone());
        }
        let u_path = s.app.child(0);
        let u = term_at(&t, &u_path);
        if mu_chain(u, &u_path).is_empty() {
            continue;
        }
        let flat = flat.get_or_insert_with(|| binder_context(ctx, &t));
        let Some(u_ty) = infer_in(flat, u) else {
            continue;
        };
        if let Some(r) = elim_result_type(flat, &u_ty, &s.payload) {
            for p in mu_chain(u, &u_path) {
                retype.insert(p, r.clone());
            }
        }
    }
    let r = Rebuild {
        root: &t,
        owner,
        sites,
        retype,
    };
    r.term(&t, &mut Path::root())
}

/// Every binder of `t` with its type, added to `ctx`. Binder names must be
/// distinct, as after [`freshen`].
fn binder_context(ctx: &TypingContext, t: &Term) -> TypingContext {
    fn go(t: &Term, ctx: &mut TypingContext) {
        match t {
            Term::Var(_) => {}
            Term::Lam(x, a, b) => {
                ctx.declare_intu(x.clone(), a.clone());
                go(b, ctx);
            }
            Term::Mu(x, a, b) => {
                ctx.declare_class(x.clone(), a.clone());
                go(b, ctx);
            }
            Term::Inj(_, _, b) | Term::Name(_, b) | Term::Mark(_, b) => go(b, ctx),
            Term::Pair(l, r) => {
                go(l, ctx);
                go(r, ctx);
            }
            Term::App(f, e) => {
                go(f, ctx);
                elim(f, e, ctx);
            }
        }
    }
    fn elim(f: &Term, e: &Elim, ctx: &mut TypingContext) {
        match e {
            Elim::Term(t) => go(t, ctx),
            Elim::Proj(_) => {}
            Elim::Case(x1, l, x2, r) => {
                if let Some(Formula::Or(a, b)) = infer_in(ctx, f) {
                    ctx.declare_intu(x1.clone(), *a);
                    ctx.declare_intu(x2.clone(), *b);
                }
                go(l, ctx);
                go(r, ctx);
            }
            Elim::Boxed(inner) => elim(f, inner, ctx),
        }
    }
    let mut out = ctx.clone();
    go(t, &mut out);
    out
}

/// Paths of the `mu` binders reached through the acceptable structure of `u`
/// (located at `at`).
fn mu_chain(u: &Term, at: &Path) -> Vec<Path> {
    let mut out = Vec::new();
    match u {
        Term::Mu(a, _, body) => {
            out.push(at.clone());
            for q in namings(body, a) {
                let p = at.child(0).join(&q).child(0);
                out.extend(mu_chain(term_at(body, &q.child(0)), &p));
            }
        }
        Term::App(_, e) => {
            if let Elim::Case(_, l, _, r) = &**e {
                out.extend(mu_chain(l, &at.child(1).child(0)));
                out.extend(mu_chain(r, &at.child(1).child(1)));
            }
        }
        _ => {}
    }
    out
}

struct Rebuild<'a> {
    root: &'a Term,
    owner: HashMap<Path, Path>,
    sites: HashSet<Path>,
    retype: HashMap<Path, Formula>,
}

impl Rebuild<'_> {
    fn child(&self, i: u8, b: &Term, path: &mut Path) -> Term {
        path.push(i);
        let r = self.term(b, path);
        path.pop();
        r
    }

    fn term(&self, t: &Term, path: &mut Path) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, _) if self.sites.contains(path) => self.child(0, f, path),
            Term::Mark(id, b) => {
                let inner = self.child(0, b, path);
                match self.owner.get(path) {
                    Some(site) => {
                        let mut p = site.child(1).child(0);
                        let Ok(Node::Elim(e)) = self.root.subterm_at(&p) else {
                            unreachable!("site payload")
                        };
                        Term::app(inner, self.elim(e, &mut p))
                    }
                    None => Term::mark(*id, inner),
                }
            }
            Term::Lam(x, a, b) => Term::lam(x.clone(), a.clone(), self.child(0, b, path)),
            Term::Inj(s, a, b) => Term::inj(*s, a.clone(), self.child(0, b, path)),
            Term::Mu(x, a, b) => {
                let a = self.retype.get(path).unwrap_or(a).clone();
                Term::mu(x.clone(), a, self.child(0, b, path))
            }
            Term::Name(x, b) => Term::name(x.clone(), self.child(0, b, path)),
            Term::Pair(l, r) => {
                let l = self.child(0, l, path);
                Term::pair(l, self.child(1, r, path))
            }
            Term::App(f, e) => {
                let f = self.child(0, f, path);
                path.push(1);
                let e = self.elim(e, path);
                path.pop();
                Term::app(f, e)
            }
        }
    }

    fn elim(&self, e: &Elim, path: &mut Path) -> Elim {
        let mut sub = |i: u8, b: &Term| {
            path.push(i);
            let r = self.term(b, path);
            path.pop();
            r
        };
        match e {
            Elim::Term(t) => Elim::Term(sub(0, t)),
            Elim::Proj(s) => Elim::Proj(*s),
            Elim::Case(x1, a, x2, b) => {
                let a = sub(0, a);
                Elim::Case(x1.clone(), a, x2.clone(), sub(1, b))
            }
            Elim::Boxed(inner) => {
                path.push(0);
                let r = self.elim(inner, path);
                path.pop();
                Elim::boxed(r)
            }
        }
    }
}

/// Sum over marks of the length of the path from the mark up to its box.
///
/// Sum, over every box, of the lengths of the paths from its
/// `(U [[e]])` application down to each leaf of `U`: the marks of `st(U)`,
/// and the `mu` abstractions along the way that name nothing. Without the
/// latter, a box that lost all its marks to an erasing classical step would
/// still move without the measure dropping.
///
/// Nodes are counted along the path from the application down to the leaf,
/// both included, plus one for the box. An application in the
/// function position of another application belongs to the same spine and
/// is not counted again, and the wrapper turning a term into an eliminator
/// is not a node.
pub fn lg(t: &Term) -> Result<usize, MarkedError> {
    let a = analyze(t);
    if a.stray_box
        || a.sites.iter().any(|s| !s.acceptable)
        || a.owners.values().any(|o| o.len() != 1)
    {
        return Err(MarkedError::NotCorrect);
    }
    let mut total = 0;
    for site in &a.sites {
        for leaf in &site.leaves {
            total += path_nodes(t, &site.app, leaf);
        }
    }
    Ok(total)
}

fn path_nodes(t: &Term, site: &Path, leaf: &Path) -> usize {
    let steps = leaf.steps();
    let mut count = 1;
    let mut parent_is_app = false;
    for k in site.len()..=steps.len() {
        let node = t
            .subterm_at(&Path::new(steps[..k].to_vec()))
            .expect("prefix of a leaf path");
        let merged = k > site.len()
            && parent_is_app
            && steps[k - 1] == 0
            && matches!(node, Node::Term(Term::App(..)));
        let wrapper = matches!(node, Node::Elim(Elim::Term(_)));
        if !merged && !wrapper {
            count += 1;
        }
        parent_is_app = matches!(node, Node::Term(Term::App(..)));
    }
    count
}

/// Redexes of a correct term never have a mark as argument, and a mark in
/// function position is always applied to a box.
pub fn car_star_holds(t: &Term) -> bool {
    fn go(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, e) => {
                let arg_mark = matches!(&**e, Elim::Term(Term::Mark(..)));
                let bad_head = matches!(**f, Term::Mark(..)) && !matches!(**e, Elim::Boxed(_));
                !arg_mark && !bad_head && go(f) && elim(e)
            }
            Term::Lam(_, _, b)
            | Term::Inj(_, _, b)
            | Term::Mu(_, _, b)
            | Term::Name(_, b)
            | Term::Mark(_, b) => go(b),
            Term::Pair(a, b) => go(a) && go(b),
        }
    }
    fn elim(e: &Elim) -> bool {
        match e {
            Elim::Term(t) => go(t),
            Elim::Proj(_) => true,
            Elim::Case(_, a, _, b) => go(a) && go(b),
            Elim::Boxed(inner) => elim(inner),
        }
    }
    go(t)
}

/// How a plain step was mirrored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiftCase {
    /// The redex exists in the marked term outside marks and boxes.
    Redex,
    /// The redex lies inside a mark or a box.
    Payload,
    /// A mark meets its box first, then the redex is contracted.
    Annihilate,
}

impl LiftCase {
    pub fn number(self) -> u8 {
        match self {
            LiftCase::Redex => 1,
            LiftCase::Payload => 2,
            LiftCase::Annihilate => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    pub case: LiftCase,
    /// One or two marked steps with the terms they produce.
    pub steps: Vec<(Redex, Term)>,
}

impl Lift {
    pub fn result(&self) -> &Term {
        &self.steps.last().expect("a lift has at least one step").1
    }
}

fn inside_payload(t: &Term, p: &Path) -> bool {
    let steps = p.steps();
    (0..steps.len()).any(|k| {
        matches!(
            t.subterm_at(&Path::new(steps[..k].to_vec())),
            Ok(Node::Term(Term::Mark(..))) | Ok(Node::Elim(Elim::Boxed(_)))
        )
    })
}

/// A correct `M'` with `M` reducing to `M'` in one or two marked steps and
/// `T1(M')` alpha-equal to `target`, found by trying single steps in redex
/// order and then an annihilation followed by one step.
pub fn lift_step(
    ctx: &TypingContext,
    m: &Term,
    target: &Term,
    mode: Option<BoxMode>,
) -> Result<Lift, MarkedError> {
    let target_key = alpha_key(target);
    let hits = |t: &Term| {
        alpha_key(&t1(t)) == target_key && correct_in(t, mode.or(infer_mode(t).ok().flatten()))
    };
    let steps = marked_step_all(ctx, m);
    for (r, m2) in &steps {
        if r.kind != RedexKind::Annihilate && hits(m2) {
            let case = if inside_payload(m, &r.path) {
                LiftCase::Payload
            } else {
                LiftCase::Redex
            };
            return Ok(Lift {
                case,
                steps: vec![(r.clone(), m2.clone())],
            });
        }
    }
    for (r, m1) in steps
        .iter()
        .filter(|(r, _)| r.kind == RedexKind::Annihilate)
    {
        for (r2, m2) in marked_step_all(ctx, m1) {
            if hits(&m2) {
                return Ok(Lift {
                    case: LiftCase::Annihilate,
                    steps: vec![(r.clone(), m1.clone()), (r2, m2)],
                });
            }
        }
    }
    Err(MarkedError::NoLift)
}

/// Length of a shortest reduction from `from` to `to` (up to alpha), found
/// by breadth-first search over at most `budget` terms.
pub fn reduction_distance(
    ctx: &TypingContext,
    from: &Term,
    to: &Term,
    budget: usize,
) -> Option<usize> {
    let goal = alpha_key(to);
    let start = alpha_key(from);
    if start == goal {
        return Some(0);
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(from.clone(), 0usize)]);
    while let Some((t, d)) = queue.pop_front() {
        for (_, n) in step_all_in(ctx, &t) {
            let k = alpha_key(&n);
            if k == goal {
                return Some(d + 1);
            }
            if seen.len() >= budget {
                return None;
            }
            if seen.insert(k) {
                queue.push_back((n, d + 1));
            }
        }
    }
    None
}

/// Search budget for matching `T2` images.
pub const T2_SEARCH_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CertStep {
    pub lift: LiftCase,
    pub kinds: Vec<RedexKind>,
    /// Per marked step, whether it moved a box.
    pub btr: Vec<bool>,
    /// `lg` before the chunk and after each of its marked steps.
    pub lg: Vec<usize>,
    /// Plain steps taken by the `T2` images, per marked step.
    pub t2_steps: Vec<usize>,
    /// `T2` is the same before and after the chunk.
    pub stalled: bool,
}

impl fmt::Display for CertStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kinds: Vec<String> = self
            .kinds
            .iter()
            .zip(&self.btr)
            .map(|(k, b)| if *b { format!("{k}*") } else { k.to_string() })
            .collect();
        let lg: Vec<String> = self.lg.iter().map(|x| x.to_string()).collect();
        write!(
            f,
            "case={} kinds={} lg={} t2={}{}",
            self.lift.number(),
            kinds.join(","),
            lg.join("->"),
            self.t2_steps.iter().sum::<usize>(),
            if self.stalled { " stalled" } else { "" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub mode: BoxMode,
    /// The marked terms `M0, M1, ...`, one per trace term.
    pub marked: Vec<Term>,
    /// `T2(Mi)`; the first one is `S2`.
    pub images: Vec<Term>,
    pub steps: Vec<CertStep>,
}

impl Certificate {
    /// One line per trace step followed by a summary line.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| format!("step {} {s}", i + 1))
            .collect();
        out.push(self.summary());
        out
    }

    pub fn summary(&self) -> String {
        let stalled = self.steps.iter().filter(|s| s.stalled).count();
        let t2: usize = self.steps.iter().flat_map(|s| &s.t2_steps).sum();
        format!(
            "certificate ok mode={} steps={} stalled={stalled} t2_steps={t2}",
            self.mode,
            self.steps.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("the trace does not start at S1")]
    BadStart,
    #[error("T2 of the marked start term is not S2")]
    StartImage,
    #[error("trace step {0} is not a one-step reduction")]
    NotAStep(usize),
    #[error("trace step {0} cannot be lifted to the marked term")]
    NoLift(usize),
    #[error("trace step {0}: the marked term is not correct")]
    Incorrect(usize),
    #[error("trace step {0}: T2 of a marked step does not reduce to T2 of its result")]
    T2NotReached(usize),
    #[error("trace step {0}: T2 stalls but the marked steps do not all move boxes")]
    StallNotBtr(usize),
    #[error("trace step {0}: T2 stalls but lg does not decrease")]
    LgNotDecreasing(usize),
}

/// Replays `trace` (a reduction sequence starting with `S1`) on the marked
/// term `(M [x1.{N1} | x2.{N2}] [[eps]] V)` and checks, for every trace
/// step, that each marked step maps under `T2` to a plain reduction and that
/// whenever `T2` stays the same every marked step moved a box and `lg`
/// dropped at each of them.
pub fn certify_app(sc: &Scenario, trace: &[Term]) -> Result<Certificate, CertError> {
    let ctx = &sc.ctx;
    let mode = sc.mode();
    let m0 = sc.marked();
    if let Some(first) = trace.first() {
        if !alpha_eq(first, &sc.s1()) {
            return Err(CertError::BadStart);
        }
    }
    let img0 = t2_in(ctx, &m0);
    if !alpha_eq(&img0, &sc.s2()) {
        return Err(CertError::StartImage);
    }
    let mut cert = Certificate {
        mode,
        marked: vec![m0.clone()],
        images: vec![img0],
        steps: Vec::new(),
    };
    let mut cur = m0;
    for (i, target) in trace.iter().enumerate().skip(1) {
        let prev_plain = &trace[i - 1];
        let key = alpha_key(target);
        if !step_all_in(ctx, prev_plain)
            .iter()
            .any(|(_, n)| alpha_key(n) == key)
        {
            return Err(CertError::NotAStep(i));
        }
        let lift = lift_step(ctx, &cur, target, Some(mode)).map_err(|_| CertError::NoLift(i))?;
        let mut lgs = vec![lg(&cur).map_err(|_| CertError::Incorrect(i))?];
        let mut t2_steps = Vec::new();
        let mut btr = Vec::new();
        let mut before = cur.clone();
        let mut before_img = t2_in(ctx, &before);
        for (r, after) in &lift.steps {
            if !correct_in(after, Some(mode)) && r.kind != RedexKind::Annihilate {
                return Err(CertError::Incorrect(i));
            }
            btr.push(is_btr(&before, r));
            let after_img = t2_in(ctx, after);
            let d = reduction_distance(ctx, &before_img, &after_img, T2_SEARCH_BUDGET)
                .ok_or(CertError::T2NotReached(i))?;
            t2_steps.push(d);
            lgs.push(lg(after).map_err(|_| CertError::Incorrect(i))?);
            before = after.clone();
            before_img = after_img;
        }
        let stalled = alpha_eq(cert.images.last().unwrap(), &before_img);
        if stalled {
            if !btr.iter().all(|b| *b) {
                return Err(CertError::StallNotBtr(i));
            }
            if lgs.windows(2).any(|w| w[1] >= w[0]) {
                return Err(CertError::LgNotDecreasing(i));
            }
        }
        cert.steps.push(CertStep {
            lift: lift.case,
            kinds: lift.steps.iter().map(|(r, _)| r.kind).collect(),
            btr,
            lg: lgs,
            t2_steps,
            stalled,
        });
        cur = before;
        cert.marked.push(cur.clone());
        cert.images.push(before_img);
    }
    Ok(cert)
}

/// Repeats the leftmost box-moving step; `None` if `max_steps` runs out.
///
/// Experimental: the `T1` image of this normal form is expected to be `T2`
/// of the start term, which [`t2_matches_btr_normal_form`] cross-checks.
pub fn btr_normal_form(ctx: &TypingContext, t: &Term, max_steps: usize) -> Option<Term> {
    let mut cur = t.clone();
    for _ in 0..=max_steps {
        match btr_step(ctx, &cur).into_iter().next() {
            None => return Some(cur),
            Some((_, next)) => cur = next,
        }
    }
    None
}

/// Experimental cross-check of `T2(M)` against `T1` of the box-moving normal
/// form of `M`.
pub fn t2_matches_btr_normal_form(ctx: &TypingContext, t: &Term, max_steps: usize) -> Option<bool> {
    let nf = btr_normal_form(ctx, t, max_steps)?;
    Some(alpha_eq(&t1(&nf), &t2_in(ctx, t)))
}
