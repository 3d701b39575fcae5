//! Seeded generation of well-typed terms by backward proof search.
//!
//! A goal is proved by picking one of the typing rules at random (weighted)
//! and recursively proving its premises within a size budget measured in
//! `cxty`. The `Cut` rule builds a redex on a random intermediate formula,
//! which is how generated terms come to contain logical, permutative and
//! classical cuts. Failed `(goal, budget, hypotheses)` triples are
//! remembered within one attempt.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::Formula;
use crate::reduction::step_all_in;
use crate::scenario::{BoxMode, Scenario};
use crate::subst::SubstIntu;
use crate::term::{Elim, Side, Term, Var};
use crate::typing::{check, TypingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// A hypothesis of the goal type.
    Axiom,
    ImpIntro,
    AndIntro,
    OrIntro,
    /// `mu a:G. M` with `M : Bot`.
    AbsIntro,
    /// `(a M)` for the goal `Bot`.
    AbsElim,
    /// A hypothesis followed by eliminators reaching the goal.
    VarElim,
    /// An introduction immediately eliminated, a `mu` applied to an
    /// eliminator (only when `AbsIntro` has nonzero weight), or a case
    /// split applied to one more eliminator.
    Cut,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Axiom,
        Rule::ImpIntro,
        Rule::AndIntro,
        Rule::OrIntro,
        Rule::AbsIntro,
        Rule::AbsElim,
        Rule::VarElim,
        Rule::Cut,
    ];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Axiom => "axiom",
            Rule::ImpIntro => "imp-intro",
            Rule::AndIntro => "and-intro",
            Rule::OrIntro => "or-intro",
            Rule::AbsIntro => "abs-intro",
            Rule::AbsElim => "abs-elim",
            Rule::VarElim => "var-elim",
            Rule::Cut => "cut",
        };
        f.write_str(s)
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    /// Upper bound on `cxty` of the generated term.
    pub size_budget: usize,
    pub goal: Option<Formula>,
    pub atom_pool: Vec<String>,
    pub weights: BTreeMap<Rule, u32>,
    /// Largest number of hypotheses in the generated context.
    pub max_hypotheses: usize,
    /// Fresh restarts before giving up.
    pub attempts: usize,
    /// How many times one bound variable may occur. Context hypotheses are
    /// unlimited. Low values keep reduction graphs small, since every
    /// occurrence is a copy of whatever gets substituted.
    pub max_bound_uses: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        let weights = [
            (Rule::Axiom, 2),
            (Rule::ImpIntro, 3),
            (Rule::AndIntro, 2),
            (Rule::OrIntro, 2),
            (Rule::AbsIntro, 2),
            (Rule::AbsElim, 3),
            (Rule::VarElim, 4),
            (Rule::Cut, 5),
        ]
        .into_iter()
        .collect();
        GenConfig {
            seed: 0,
            size_budget: 20,
            goal: None,
            atom_pool: vec!["A".into(), "B".into(), "C".into()],
            weights,
            max_hypotheses: 3,
            attempts: 64,
            max_bound_uses: 2,
        }
    }
}

impl GenConfig {
    pub fn new(seed: u64, size_budget: usize) -> Self {
        GenConfig {
            seed,
            size_budget,
            ..GenConfig::default()
        }
    }

    pub fn with_goal(mut self, goal: Formula) -> Self {
        self.goal = Some(goal);
        self
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.size_budget == 0 {
            return Err(GenError::InvalidConfig(
                "size budget must be at least 1".into(),
            ));
        }
        if self.atom_pool.is_empty() {
            return Err(GenError::InvalidConfig("the atom pool is empty".into()));
        }
        if self.weights.values().all(|w| *w == 0) {
            return Err(GenError::InvalidConfig("all rule weights are zero".into()));
        }
        Ok(())
    }

    fn weight(&self, r: Rule) -> u32 {
        self.weights.get(&r).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no term found within the budget after {0} attempts")]
    Infeasible(usize),
}

/// Calls to the prover allowed per attempt.
const FUEL: usize = 4000;

struct Prover<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    intu: Vec<(Var, Formula)>,
    class: Vec<(Var, Formula)>,
    /// Remaining uses per hypothesis, parallel to `intu` and `class`.
    intu_uses: Vec<usize>,
    class_uses: Vec<usize>,
    fuel: usize,
    failed: HashSet<(Formula, usize, u64)>,
    next: usize,
}

impl<'a> Prover<'a> {
    fn new(cfg: &'a GenConfig, rng: ChaCha8Rng) -> Self {
        Prover {
            cfg,
            rng,
            intu: Vec::new(),
            class: Vec::new(),
            intu_uses: Vec::new(),
            class_uses: Vec::new(),
            fuel: FUEL,
            failed: HashSet::new(),
            next: 0,
        }
    }

    fn fresh(&mut self, prefix: &str) -> Var {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn env_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        let mut a: Vec<(&Formula, usize)> = self
            .intu
            .iter()
            .map(|(_, t)| t)
            .zip(self.intu_uses.iter().copied())
            .collect();
        a.sort();
        a.hash(&mut h);
        let mut b: Vec<(&Formula, usize)> = self
            .class
            .iter()
            .map(|(_, t)| t)
            .zip(self.class_uses.iter().copied())
            .collect();
        b.sort();
        b.hash(&mut h);
        h.finish()
    }

    fn atom(&mut self) -> Formula {
        Formula::atom(
            self.cfg
                .atom_pool
                .choose(&mut self.rng)
                .expect("nonempty pool")
                .clone(),
        )
    }

    /// A random formula with at most `depth` nested connectives.
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.45) {
            return self.atom();
        }
        let a = self.formula(depth - 1);
        let b = self.formula(depth - 1);
        match self.rng.gen_range(0..4) {
            0 => Formula::imp(a, b),
            1 => Formula::and(a, b),
            2 => Formula::or(a, b),
            _ => Formula::imp(a, Formula::Bottom),
        }
    }

    /// An intermediate formula for cuts: a random one or a piece of the
    /// hypotheses.
    fn cut_formula(&mut self) -> Formula {
        if !self.intu.is_empty() && self.rng.gen_bool(0.3) {
            let (_, t) = self.intu.choose(&mut self.rng).unwrap().clone();
            let mut parts = Vec::new();
            subformulas(&t, &mut parts);
            parts.retain(|f| *f != Formula::Bottom);
            if let Some(f) = parts.choose(&mut self.rng) {
                return f.clone();
            }
        }
        self.formula(1)
    }

    fn usable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.intu.len()).filter(|i| self.intu_uses[*i] > 0)
    }

    fn with_intu<T>(&mut self, x: &Var, ty: &Formula, f: impl FnOnce(&mut Self) -> T) -> T {
        self.intu.push((x.clone(), ty.clone()));
        self.intu_uses.push(self.cfg.max_bound_uses);
        let r = f(self);
        self.intu.pop();
        self.intu_uses.pop();
        r
    }

    fn with_class<T>(&mut self, a: &Var, ty: &Formula, f: impl FnOnce(&mut Self) -> T) -> T {
        self.class.push((a.clone(), ty.clone()));
        self.class_uses.push(self.cfg.max_bound_uses);
        let r = f(self);
        self.class.pop();
        self.class_uses.pop();
        r
    }

    /// Splits `total` among `k` premises, each receiving at least one.
    fn split(&mut self, total: usize, k: usize) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        if total < k {
            return vec![1; k];
        }
        let mut cuts: Vec<usize> = (0..k - 1)
            .map(|_| self.rng.gen_range(0..=total - k))
            .collect();
        cuts.sort();
        let mut out = Vec::with_capacity(k);
        let mut prev = 0;
        for c in cuts {
            out.push(c - prev + 1);
            prev = c;
        }
        out.push(total - k - prev + 1);
        out
    }

    fn prove(&mut self, goal: &Formula, budget: usize) -> Option<Term> {
        if budget == 0 || self.fuel == 0 {
            return None;
        }
        self.fuel -= 1;
        let key = (goal.clone(), budget, self.env_hash());
        if self.failed.contains(&key) {
            return None;
        }
        let mut rules: Vec<(Rule, u32)> = Rule::ALL
            .into_iter()
            .filter(|r| self.applicable(*r, goal, budget))
            .map(|r| {
                let mut w = self.cfg.weight(r);
                // small budgets should close branches
                if r == Rule::Axiom && budget <= 3 {
                    w = w.saturating_mul(4).max(1);
                }
                (r, w)
            })
            .filter(|(_, w)| *w > 0)
            .collect();
        while !rules.is_empty() {
            let total: u32 = rules.iter().map(|(_, w)| w).sum();
            let mut pick = self.rng.gen_range(0..total);
            let i = rules
                .iter()
                .position(|(_, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .unwrap();
            let (rule, _) = rules.swap_remove(i);
            let uses = (self.intu_uses.clone(), self.class_uses.clone());
            if let Some(t) = self
                .apply(rule, goal, budget)
                .filter(|t| t.cxty() <= budget)
            {
                return Some(t);
            }
            (self.intu_uses, self.class_uses) = uses;
        }
        self.failed.insert(key);
        None
    }

    fn applicable(&self, r: Rule, goal: &Formula, budget: usize) -> bool {
        match r {
            Rule::Axiom => self.usable().any(|i| self.intu[i].1 == *goal),
            Rule::ImpIntro => matches!(goal, Formula::Imp(..)) && budget >= 2,
            Rule::AndIntro => matches!(goal, Formula::And(..)) && budget >= 3,
            Rule::OrIntro => matches!(goal, Formula::Or(..)) && budget >= 2,
            Rule::AbsIntro => *goal != Formula::Bottom && budget >= 3 && self.class.len() < 3,
            Rule::AbsElim => {
                *goal == Formula::Bottom && self.class_uses.iter().any(|u| *u > 0) && budget >= 2
            }
            Rule::VarElim => self.usable().next().is_some() && budget >= 3,
            Rule::Cut => budget >= 5,
        }
    }

    fn apply(&mut self, r: Rule, goal: &Formula, budget: usize) -> Option<Term> {
        match r {
            Rule::Axiom => {
                let hits: Vec<usize> = self.usable().filter(|i| self.intu[*i].1 == *goal).collect();
                let i = *hits.choose(&mut self.rng)?;
                self.intu_uses[i] -= 1;
                Some(Term::Var(self.intu[i].0.clone()))
            }
            Rule::ImpIntro => {
                let Formula::Imp(a, b) = goal else {
                    unreachable!()
                };
                let x = self.fresh("v");
                let body = self.with_intu(&x, a, |p| p.prove(b, budget - 1))?;
                Some(Term::lam(x, (**a).clone(), body))
            }
            Rule::AndIntro => {
                let Formula::And(a, b) = goal else {
                    unreachable!()
                };
                let s = self.split(budget - 1, 2);
                let l = self.prove(a, s[0])?;
                let rest = budget - 1 - l.cxty();
                let r = self.prove(b, rest)?;
                Some(Term::pair(l, r))
            }
            Rule::OrIntro => {
                let Formula::Or(a, b) = goal else {
                    unreachable!()
                };
                let side = if self.rng.gen_bool(0.5) {
                    Side::Left
                } else {
                    Side::Right
                };
                let body = self.prove(side.pick(&**a, &**b), budget - 1)?;
                Some(Term::inj(side, goal.clone(), body))
            }
            Rule::AbsIntro => {
                let a = self.fresh("k");
                let body = self.with_class(&a, goal, |p| p.prove(&Formula::Bottom, budget - 1))?;
                Some(Term::mu(a, goal.clone(), body))
            }
            Rule::AbsElim => {
                let open: Vec<usize> = (0..self.class.len())
                    .filter(|i| self.class_uses[*i] > 0)
                    .collect();
                let i = *open.choose(&mut self.rng)?;
                let (a, ty) = self.class[i].clone();
                self.class_uses[i] -= 1;
                let body = self.prove(&ty, budget - 1)?;
                Some(Term::name(a, body))
            }
            Rule::VarElim => self.var_elim(goal, budget),
            Rule::Cut => self.cut(goal, budget),
        }
    }

    fn var_elim(&mut self, goal: &Formula, budget: usize) -> Option<Term> {
        let mut options = Vec::new();
        for i in self.usable() {
            let mut plans = Vec::new();
            plan_spines(&self.intu[i].1, goal, 3, &mut Vec::new(), &mut plans);
            for p in plans {
                if !p.is_empty() {
                    options.push((i, p));
                }
            }
        }
        let (i, plan) = options.choose(&mut self.rng)?.clone();
        self.intu_uses[i] -= 1;
        let x = self.intu[i].0.clone();
        let fixed: usize = 1 + plan
            .iter()
            .map(|s| match s {
                SpineStep::Arg(_) => 2,
                SpineStep::Proj(_) => 2,
                SpineStep::Case(..) => 4,
            })
            .sum::<usize>();
        if fixed > budget {
            return None;
        }
        let premises = plan
            .iter()
            .map(|s| match s {
                SpineStep::Arg(_) => 1,
                SpineStep::Proj(_) => 0,
                SpineStep::Case(..) => 2,
            })
            .sum();
        let shares = self.split_extra(budget - fixed, premises);
        let mut shares = shares.into_iter();
        let mut spare = 0;
        let mut t = Term::Var(x);
        for step in plan {
            let e = match step {
                SpineStep::Arg(a) => {
                    let b = shares.next().unwrap() + spare;
                    let n = self.prove(&a, b)?;
                    spare = b - n.cxty();
                    Elim::Term(n)
                }
                SpineStep::Proj(s) => Elim::Proj(s),
                SpineStep::Case(a, b) => {
                    let (y1, y2) = (self.fresh("w"), self.fresh("w"));
                    let b1 = shares.next().unwrap() + spare;
                    let n1 = self.with_intu(&y1, &a, |p| p.prove(goal, b1))?;
                    let b2 = shares.next().unwrap() + (b1 - n1.cxty());
                    let n2 = self.with_intu(&y2, &b, |p| p.prove(goal, b2))?;
                    spare = b2 - n2.cxty();
                    Elim::Case(y1, n1, y2, n2)
                }
            };
            t = Term::app(t, e);
        }
        Some(t)
    }

    /// Like [`split`](Self::split) but premises may receive zero extra on
    /// top of their minimum of one, which `fixed` already paid for.
    fn split_extra(&mut self, extra: usize, k: usize) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        self.split(extra + k, k)
    }

    fn cut(&mut self, goal: &Formula, budget: usize) -> Option<Term> {
        let x = self.cut_formula();
        // mu-redexes count as classical introductions
        let shapes = if self.cfg.weight(Rule::AbsIntro) == 0 {
            [0, 1, 2, 5, 5, 5]
        } else {
            [0, 1, 2, 3, 4, 5]
        };
        match *shapes.choose(&mut self.rng).unwrap() {
            // (\v:X. M) N
            0 => {
                let v = self.fresh("v");
                let s = self.split(budget - 2, 2);
                let m = self.with_intu(&v, &x, |p| p.prove(goal, s[0]))?;
                let n = self.prove(&x, (budget - 2).checked_sub(m.cxty())?)?;
                Some(Term::app(Term::lam(v, x, m), Elim::Term(n)))
            }
            // (<M, N> pi)
            1 => {
                let s = self.split(budget - 3, 2);
                let m = self.prove(goal, s[0])?;
                let n = self.prove(&x, (budget - 3).checked_sub(m.cxty())?)?;
                Some(if self.rng.gen_bool(0.5) {
                    Term::app(Term::pair(m, n), Elim::Proj(Side::Left))
                } else {
                    Term::app(Term::pair(n, m), Elim::Proj(Side::Right))
                })
            }
            // (in_i M [y1.N1 | y2.N2])
            2 => {
                let y = self.cut_formula();
                let or = Formula::or(x.clone(), y.clone());
                let side = if self.rng.gen_bool(0.5) {
                    Side::Left
                } else {
                    Side::Right
                };
                let s = self.split(budget - 2, 2);
                let m = self.prove(side.pick(&x, &y), s[0].min(budget - 5))?;
                let (e, _) = self.case_to(goal, &x, &y, (budget - 2).checked_sub(m.cxty())?)?;
                Some(Term::app(Term::inj(side, or, m), e))
            }
            // (mu a:T. M e)
            3 | 4 => {
                let (t, need) = self.eliminable(goal, &x);
                let a = self.fresh("k");
                let s = self.split(budget - 1, 2);
                let body = self.with_class(&a, &t, |p| {
                    p.prove(&Formula::Bottom, s[0].saturating_sub(1))
                })?;
                let e = self.eliminator(&need, goal, (budget - 2).checked_sub(body.cxty())?)?;
                Some(Term::app(Term::mu(a, t, body), e))
            }
            // (P [y1.Q1 | y2.Q2] e)
            _ => {
                let (t, need) = self.eliminable(goal, &x);
                let y = self.cut_formula();
                let s = self.split(budget - 2, 3);
                let p = self.prove(&Formula::or(x.clone(), y.clone()), s[0])?;
                let rest = (budget - 2).checked_sub(p.cxty())?;
                let (case, used) = self.case_to(&t, &x, &y, rest.checked_sub(s[2])?)?;
                let e = self.eliminator(&need, goal, rest.checked_sub(used)?)?;
                Some(Term::app(Term::app(p, case), e))
            }
        }
    }

    /// A case eliminator from `A \/ B` to `goal`, within `budget` (which
    /// includes the case node). Returns it with its `cxty`.
    fn case_to(
        &mut self,
        goal: &Formula,
        a: &Formula,
        b: &Formula,
        budget: usize,
    ) -> Option<(Elim, usize)> {
        if budget < 3 {
            return None;
        }
        let (y1, y2) = (self.fresh("w"), self.fresh("w"));
        let s = self.split(budget - 1, 2);
        let n1 = self.with_intu(&y1, a, |p| p.prove(goal, s[0]))?;
        let n2 = self.with_intu(&y2, b, |p| p.prove(goal, budget - 1 - n1.cxty()))?;
        let e = Elim::Case(y1, n1, y2, n2);
        let c = e.cxty();
        Some((e, c))
    }

    /// A formula `T` that one eliminator turns into `goal`, with what that
    /// eliminator needs.
    fn eliminable(&mut self, goal: &Formula, x: &Formula) -> (Formula, ElimNeed) {
        match self.rng.gen_range(0..4) {
            0 => (
                Formula::imp(x.clone(), goal.clone()),
                ElimNeed::Arg(x.clone()),
            ),
            1 => (
                Formula::and(goal.clone(), x.clone()),
                ElimNeed::Proj(Side::Left),
            ),
            2 => (
                Formula::and(x.clone(), goal.clone()),
                ElimNeed::Proj(Side::Right),
            ),
            _ => {
                let y = self.cut_formula();
                (
                    Formula::or(x.clone(), y.clone()),
                    ElimNeed::Case(x.clone(), y),
                )
            }
        }
    }

    /// The eliminator of `t` described by `need`, within `budget` (counting
    /// its own nodes but not the application).
    fn eliminator(&mut self, need: &ElimNeed, goal: &Formula, budget: usize) -> Option<Elim> {
        match need {
            ElimNeed::Arg(a) => self.prove(a, budget).map(Elim::Term),
            ElimNeed::Proj(s) => (budget >= 1).then_some(Elim::Proj(*s)),
            ElimNeed::Case(a, b) => self.case_to(goal, a, b, budget).map(|(e, _)| e),
        }
    }
}

#[derive(Clone, Debug)]
enum ElimNeed {
    Arg(Formula),
    Proj(Side),
    Case(Formula, Formula),
}

#[derive(Clone, Debug)]
enum SpineStep {
    Arg(Formula),
    Proj(Side),
    /// A final case split whose branches prove the goal.
    Case(Formula, Formula),
}

fn plan_spines(
    t: &Formula,
    goal: &Formula,
    depth: usize,
    acc: &mut Vec<SpineStep>,
    out: &mut Vec<Vec<SpineStep>>,
) {
    if t == goal {
        out.push(acc.clone());
    }
    if depth == 0 {
        return;
    }
    match t {
        Formula::Imp(a, b) => {
            acc.push(SpineStep::Arg((**a).clone()));
            plan_spines(b, goal, depth - 1, acc, out);
            acc.pop();
        }
        Formula::And(a, b) => {
            for (s, c) in [(Side::Left, a), (Side::Right, b)] {
                acc.push(SpineStep::Proj(s));
                plan_spines(c, goal, depth - 1, acc, out);
                acc.pop();
            }
        }
        Formula::Or(a, b) => {
            acc.push(SpineStep::Case((**a).clone(), (**b).clone()));
            out.push(acc.clone());
            acc.pop();
        }
        _ => {}
    }
}

fn subformulas(f: &Formula, out: &mut Vec<Formula>) {
    out.push(f.clone());
    if let Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) = f {
        subformulas(a, out);
        subformulas(b, out);
    }
}

fn random_context(p: &mut Prover<'_>) -> TypingContext {
    let n = p.rng.gen_range(0..=p.cfg.max_hypotheses);
    let mut ctx = TypingContext::new();
    for i in 1..=n {
        let depth = p.rng.gen_range(0..=2);
        let ty = p.formula(depth);
        ctx.declare_intu(format!("h{i}"), ty);
    }
    ctx
}

fn load(p: &mut Prover<'_>, ctx: &TypingContext) {
    p.intu = ctx
        .intu_vars()
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();
    p.class = ctx
        .class_vars()
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();
    p.intu_uses = vec![usize::MAX; p.intu.len()];
    p.class_uses = vec![usize::MAX; p.class.len()];
}

/// A context and a term of the configured (or a random) goal type with
/// `cxty` at most the budget.
pub fn gen_typed(cfg: &GenConfig) -> Result<(TypingContext, Term), GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.attempts {
        let mut p = Prover::new(cfg, ChaCha8Rng::seed_from_u64(rng.gen()));
        let ctx = random_context(&mut p);
        let goal = match &cfg.goal {
            Some(g) => g.clone(),
            None => {
                let d = p.rng.gen_range(0..=2);
                p.formula(d)
            }
        };
        load(&mut p, &ctx);
        if let Some(t) = p.prove(&goal, cfg.size_budget) {
            debug_assert_eq!(check(&ctx, &t).ok(), Some(goal.clone()));
            return Ok((ctx, t));
        }
    }
    Err(GenError::Infeasible(cfg.attempts))
}

/// A scenario whose pushed eliminator has the given shape, with every
/// component typed and the sequence `eps V` nice. The size budget bounds
/// `cxty` of `S1`.
pub fn gen_app_scenarios(cfg: &GenConfig, mode: BoxMode) -> Result<Scenario, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0000_0000_0000 ^ mode as u64);
    for _ in 0..cfg.attempts {
        let mut p = Prover::new(cfg, ChaCha8Rng::seed_from_u64(rng.gen()));
        if let Some(sc) = try_scenario(&mut p, mode) {
            debug_assert!(sc.validate().is_ok());
            return Ok(sc);
        }
    }
    Err(GenError::Infeasible(cfg.attempts))
}

fn try_scenario(p: &mut Prover<'_>, mode: BoxMode) -> Option<Scenario> {
    let mut ctx = random_context(p);
    // every atom inhabited, so that the components below rarely get stuck
    let base = ctx.len();
    for (i, a) in p.cfg.atom_pool.clone().into_iter().enumerate() {
        ctx.declare_intu(format!("h{}", base + i + 1), Formula::atom(a));
    }
    load(p, &ctx);
    let budget = p.cfg.size_budget;
    let a = p.formula(1);
    let b = p.formula(1);
    let c = p.formula(1);
    // the type the branches prove, and the eliminator taking it further
    let (t, result) = match mode {
        BoxMode::Term => {
            let d = p.formula(2);
            (Formula::imp(c.clone(), d.clone()), d)
        }
        BoxMode::Proj => {
            let d = p.formula(2);
            if p.rng.gen_bool(0.5) {
                (Formula::and(d.clone(), c.clone()), d)
            } else {
                (Formula::and(c.clone(), d.clone()), d)
            }
        }
        BoxMode::Case => {
            let d = p.formula(1);
            let g = p.formula(1);
            (Formula::or(c.clone(), d), g)
        }
    };
    let s = p.split(budget.saturating_sub(4).max(4), 4);
    let scrutinee = p.prove(&Formula::or(a.clone(), b.clone()), s[0] + 1)?;
    let branch1 = p.with_intu(&"x1".to_string(), &a, |q| q.prove(&t, s[1] + 1))?;
    let branch2 = p.with_intu(&"x2".to_string(), &b, |q| q.prove(&t, s[2] + 1))?;
    let eps = match (mode, &t) {
        (BoxMode::Term, _) => Elim::Term(p.prove(&c, s[3])?),
        (BoxMode::Proj, Formula::And(l, _)) => Elim::Proj(if **l == result {
            Side::Left
        } else {
            Side::Right
        }),
        (BoxMode::Case, Formula::Or(l, r)) => {
            let (y1, y2) = ("y1".to_string(), "y2".to_string());
            let n1 = p.with_intu(&y1, l, |q| q.prove(&result, s[3]))?;
            let n2 = p.with_intu(&y2, r, |q| q.prove(&result, s[3]))?;
            Elim::Case(y1, n1, y2, n2)
        }
        _ => unreachable!(),
    };
    let mut rest = Vec::new();
    if mode != BoxMode::Case {
        let mut ty = result;
        let extra = p.rng.gen_range(0..=2);
        for _ in 0..extra {
            let e = match ty.clone() {
                Formula::Imp(x, y) => {
                    let n = p.prove(&x, 3)?;
                    ty = *y;
                    Elim::Term(n)
                }
                Formula::And(x, y) => {
                    let side = if p.rng.gen_bool(0.5) {
                        Side::Left
                    } else {
                        Side::Right
                    };
                    ty = side.pick(*x, *y);
                    Elim::Proj(side)
                }
                _ => break,
            };
            rest.push(e);
        }
    }
    let sc = Scenario {
        ctx,
        scrutinee,
        x1: "x1".into(),
        branch1,
        x2: "x2".into(),
        branch2,
        eps,
        rest,
    };
    sc.validate().ok()?;
    Some(sc)
}

/// A correct marked term: the marked start term of a generated scenario
/// after up to `max_steps` random marked reduction steps.
pub fn gen_correct_marked(
    cfg: &GenConfig,
    mode: BoxMode,
    max_steps: usize,
) -> Result<(TypingContext, Term), GenError> {
    let sc = gen_app_scenarios(cfg, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(31).wrapping_add(7));
    let mut t = sc.marked();
    let steps = rng.gen_range(0..=max_steps);
    for _ in 0..steps {
        let next = step_all_in(&sc.ctx, &t);
        let Some((_, n)) = next.choose(&mut rng) else {
            break;
        };
        t = n.clone();
    }
    Ok((sc.ctx, t))
}

/// An instance for the substitution theorem: a typed term whose context
/// has one to three variables of a common type, and a substitution sending
/// them to terms of that type.
pub fn gen_subst_instance(cfg: &GenConfig) -> Result<(TypingContext, Term, SubstIntu), GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0005_0b57);
    for _ in 0..cfg.attempts {
        let mut p = Prover::new(cfg, ChaCha8Rng::seed_from_u64(rng.gen()));
        let mut ctx = random_context(&mut p);
        let d = p.rng.gen_range(1..=2);
        let shared = p.formula(d);
        let k = p.rng.gen_range(1..=3);
        let vars: Vec<Var> = (1..=k).map(|i| format!("s{i}")).collect();
        for v in &vars {
            ctx.declare_intu(v.clone(), shared.clone());
        }
        load(&mut p, &ctx);
        // substituting behaves like contracting a redex binding the
        // variable, so the variables get the bound-variable cap
        for (i, (x, _)) in p.intu.iter().enumerate() {
            if vars.contains(x) {
                p.intu_uses[i] = cfg.max_bound_uses;
            }
        }
        let goal = p.formula(1);
        let Some(m) = p.prove(&goal, cfg.size_budget) else {
            continue;
        };
        // images live in the context without the substituted variables
        let keep: Vec<bool> = p.intu.iter().map(|(x, _)| !vars.contains(x)).collect();
        let mut it = keep.iter();
        p.intu_uses.retain(|_| *it.next().unwrap());
        p.intu.retain(|(x, _)| !vars.contains(x));
        let mut s = SubstIntu::new();
        let mut ok = true;
        for v in &vars {
            let b = (cfg.size_budget / 3).max(3);
            match p.prove(&shared, b) {
                Some(n) => s.insert(v.clone(), n),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((ctx, m, s));
        }
    }
    Err(GenError::Infeasible(cfg.attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::head::{classify_in, component_paths, is_simple};
    use crate::syntax::parse_formula;
    use crate::term::Node;

    #[test]
    fn tiny_identity() {
        let cfg = GenConfig {
            max_hypotheses: 0,
            ..GenConfig::new(3, 2)
        }
        .with_goal(parse_formula("A -> A").unwrap());
        let (ctx, t) = gen_typed(&cfg).unwrap();
        assert!(ctx.is_empty());
        assert_eq!(t.to_string(), "\\v1:A. v1");
    }

    #[test]
    fn deterministic() {
        let cfg = GenConfig::new(42, 25);
        assert_eq!(gen_typed(&cfg).unwrap(), gen_typed(&cfg).unwrap());
        let cfg = GenConfig::new(42, 20);
        assert_eq!(
            gen_app_scenarios(&cfg, BoxMode::Case).unwrap(),
            gen_app_scenarios(&cfg, BoxMode::Case).unwrap()
        );
    }

    #[test]
    fn generated_terms_typecheck_within_budget() {
        for seed in 0..300 {
            let cfg = GenConfig::new(seed, 1 + (seed as usize % 40));
            let (ctx, t) = gen_typed(&cfg).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            check(&ctx, &t).unwrap_or_else(|e| panic!("seed {seed}: {t}: {e}"));
            assert!(t.cxty() <= cfg.size_budget);
        }
    }

    #[test]
    fn goals_are_respected() {
        for (seed, g) in [
            "A -> B -> A",
            "A /\\ B -> B \\/ C",
            "((A -> B) -> A) -> A",
            "Bot -> A",
        ]
        .iter()
        .enumerate()
        {
            let goal = parse_formula(g).unwrap();
            let cfg = GenConfig::new(seed as u64, 20).with_goal(goal.clone());
            let (ctx, t) = gen_typed(&cfg).unwrap();
            assert_eq!(check(&ctx, &t).unwrap(), goal);
        }
    }

    #[test]
    fn scenarios_meet_their_preconditions() {
        for seed in 0..40 {
            for mode in BoxMode::ALL {
                let sc = gen_app_scenarios(&GenConfig::new(seed, 20), mode).unwrap();
                assert_eq!(sc.mode(), mode);
                sc.validate().unwrap();
                if mode == BoxMode::Case {
                    assert!(sc.rest.is_empty());
                }
                if mode == BoxMode::Proj {
                    assert!(matches!(sc.eps, Elim::Proj(_)));
                }
            }
        }
    }

    #[test]
    fn all_head_rows_show_up() {
        let mut seen = [false; 6];
        for seed in 0..500 {
            let (ctx, t) = gen_typed(&GenConfig::new(seed, 30)).unwrap();
            for p in component_paths(&t) {
                let Ok(Node::Term(m)) = t.subterm_at(&p) else {
                    continue;
                };
                if is_simple(m) {
                    if let Ok(r) = classify_in(&ctx, m) {
                        seen[r.case as usize] = true;
                    }
                }
            }
        }
        assert_eq!(seen, [true; 6]);
    }

    #[test]
    fn zero_weight_disables_mu() {
        for seed in 0..100 {
            let mut cfg = GenConfig::new(seed, 30);
            cfg.weights.insert(Rule::AbsIntro, 0);
            let (ctx, t) = gen_typed(&cfg).unwrap();
            check(&ctx, &t).unwrap();
            assert!(!t.to_string().contains("mu "), "{t}");
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let cfg = GenConfig {
            size_budget: 0,
            ..GenConfig::default()
        };
        assert!(matches!(gen_typed(&cfg), Err(GenError::InvalidConfig(_))));
        let cfg = GenConfig {
            weights: BTreeMap::new(),
            ..GenConfig::default()
        };
        assert!(matches!(gen_typed(&cfg), Err(GenError::InvalidConfig(_))));
    }

    #[test]
    fn substitution_instances() {
        for seed in 0..30 {
            let (ctx, m, s) = gen_subst_instance(&GenConfig::new(seed, 15)).unwrap();
            check(&ctx, &m).unwrap();
            let tys: Vec<_> = s
                .domain()
                .map(|x| ctx.intu_type(x).unwrap().clone())
                .collect();
            for (x, n) in s.iter() {
                assert_eq!(&check(&ctx, n).unwrap(), ctx.intu_type(x).unwrap());
            }
            assert!(tys.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
