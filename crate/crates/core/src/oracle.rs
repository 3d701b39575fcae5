//! Strong normalization by exhaustion.
//!
//! [`explore`] builds the whole one-step reduction graph of a term with
//! nodes taken up to alpha-equivalence. A term is strongly normalizing iff
//! its graph is finite and acyclic, and then the longest path from the root
//! is its `eta`. Graphs that hit the node limit make every question about
//! them inconclusive.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::Formula;
use crate::head::{classify_in, HeadError, HeadRow};
use crate::pack::Packer;
use crate::reduction::{step_all_keyed, Redex};
use crate::scenario::{Scenario, ScenarioError};
use crate::subst::{subst_intu, SubstIntu};
use crate::term::{alpha_key, Elim, Subtree, Term, Var};
use crate::typing::{check, TypeError, TypingContext};

pub const DEFAULT_NODE_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub redex: Redex,
}

#[derive(Clone, Debug)]
pub struct ReductionGraph {
    /// Nodes in packed form; see [`ReductionGraph::node`].
    nodes: Vec<Box<[u8]>>,
    packer: Packer,
    edges: Vec<Edge>,
    succ: Vec<Vec<usize>>,
    complete: bool,
    root_type: Option<Formula>,
    /// Edges whose target does not have the root's type.
    violations: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EtaError {
    #[error("the graph is incomplete (node limit reached)")]
    Incomplete,
    #[error("the graph has a cycle")]
    Cycle,
}

/// Explores without typing information.
pub fn explore(t: &Term, limit: usize) -> ReductionGraph {
    explore_in(None, t, limit)
}

/// Breadth-first closure under one-step reduction. With a context, every
/// node is typechecked and edges into nodes of another type are recorded.
pub fn explore_in(ctx: Option<&TypingContext>, t: &Term, limit: usize) -> ReductionGraph {
    let empty = TypingContext::new();
    let step_ctx = ctx.unwrap_or(&empty);
    let root_type = ctx.and_then(|c| check(c, t).ok());
    let mut packer = Packer::default();
    let mut g = ReductionGraph {
        nodes: vec![packer.pack(t)],
        packer: Packer::default(),
        edges: Vec::new(),
        succ: vec![Vec::new()],
        complete: true,
        root_type,
        violations: Vec::new(),
    };
    let mut well_typed = vec![true];
    // packed alpha keys
    let mut index: HashMap<Box<[u8]>, usize> = HashMap::new();
    index.insert(packer.pack(&alpha_key(t)), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let here = packer.unpack(&g.nodes[u]);
        for (redex, reduct, key) in step_all_keyed(step_ctx, &here) {
            let key = packer.pack(&key);
            let v = match index.get(&key) {
                Some(&v) => v,
                None => {
                    if g.nodes.len() >= limit {
                        g.complete = false;
                        g.packer = packer;
                        return g;
                    }
                    let v = g.nodes.len();
                    index.insert(key, v);
                    if let (Some(c), Some(ty)) = (ctx, &g.root_type) {
                        well_typed.push(check(c, &reduct).ok().as_ref() == Some(ty));
                    } else {
                        well_typed.push(true);
                    }
                    g.nodes.push(packer.pack(&reduct));
                    g.succ.push(Vec::new());
                    queue.push_back(v);
                    v
                }
            };
            let e = g.edges.len();
            if !well_typed[v] {
                g.violations.push(e);
            }
            g.edges.push(Edge {
                from: u,
                to: v,
                redex,
            });
            g.succ[u].push(e);
        }
    }
    g.packer = packer;
    g
}

impl ReductionGraph {
    pub fn root(&self) -> Term {
        self.node(0)
    }

    /// The term of node `i`, unpacked.
    pub fn node(&self, i: usize) -> Term {
        self.packer.unpack(&self.nodes[i])
    }

    pub fn nodes(&self) -> impl Iterator<Item = Term> + '_ {
        (0..self.nodes.len()).map(|i| self.node(i))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[u].iter().map(|&e| self.edges[e].to)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// False when the node limit was hit.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn root_type(&self) -> Option<&Formula> {
        self.root_type.as_ref()
    }

    /// Edges that broke type preservation; only tracked with a context.
    pub fn type_violations(&self) -> impl Iterator<Item = &Edge> {
        self.violations.iter().map(|&e| &self.edges[e])
    }

    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }

    /// Longest reduction length from every node, by memoized depth-first
    /// search.
    pub fn etas(&self) -> Result<Vec<usize>, EtaError> {
        if !self.complete {
            return Err(EtaError::Incomplete);
        }
        const NEW: u8 = 0;
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let n = self.nodes.len();
        let mut state = vec![NEW; n];
        let mut eta = vec![0usize; n];
        for start in 0..n {
            if state[start] != NEW {
                continue;
            }
            // (node, index of the next successor edge to visit)
            let mut stack = vec![(start, 0usize)];
            state[start] = OPEN;
            while let Some(&mut (u, ref mut i)) = stack.last_mut() {
                if let Some(&e) = self.succ[u].get(*i) {
                    *i += 1;
                    let v = self.edges[e].to;
                    match state[v] {
                        NEW => {
                            state[v] = OPEN;
                            stack.push((v, 0));
                        }
                        OPEN => return Err(EtaError::Cycle),
                        _ => {}
                    }
                } else {
                    eta[u] = self.successors(u).map(|v| eta[v] + 1).max().unwrap_or(0);
                    state[u] = DONE;
                    stack.pop();
                }
            }
        }
        Ok(eta)
    }

    pub fn eta(&self) -> Result<usize, EtaError> {
        self.etas().map(|e| e[0])
    }

    /// Recomputes every `eta` by relaxing `eta(u) >= eta(v) + 1` over all
    /// edges until nothing changes. A cycle shows up as more than `n` rounds.
    pub fn etas_naive(&self) -> Result<Vec<usize>, EtaError> {
        if !self.complete {
            return Err(EtaError::Incomplete);
        }
        let n = self.nodes.len();
        let mut eta = vec![0usize; n];
        for _ in 0..=n {
            let mut changed = false;
            for e in &self.edges {
                if eta[e.from] < eta[e.to] + 1 {
                    eta[e.from] = eta[e.to] + 1;
                    changed = true;
                }
            }
            if !changed {
                return Ok(eta);
            }
        }
        Err(EtaError::Cycle)
    }

    /// Indices of the nodes without successors.
    pub fn normal_form_ids(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&u| self.succ[u].is_empty())
            .collect()
    }

    pub fn normal_forms(&self) -> Vec<Term> {
        self.normal_form_ids()
            .into_iter()
            .map(|u| self.node(u))
            .collect()
    }

    pub fn sn(&self) -> Sn {
        match self.eta() {
            Ok(k) => Sn::Yes(k),
            Err(EtaError::Cycle) => Sn::No,
            Err(EtaError::Incomplete) => Sn::Unknown,
        }
    }

    /// `nodes=<n> edges=<m> eta=<k> nf=<count>`; `eta` is `?` on an
    /// incomplete graph and `cycle` on a cyclic one.
    pub fn summary(&self) -> String {
        let eta = match self.eta() {
            Ok(k) => k.to_string(),
            Err(EtaError::Incomplete) => "?".into(),
            Err(EtaError::Cycle) => "cycle".into(),
        };
        let mut s = format!(
            "nodes={} edges={} eta={eta} nf={}",
            self.node_count(),
            self.edge_count(),
            self.normal_form_ids().len()
        );
        if !self.complete {
            s.push_str(" incomplete");
        }
        s
    }

    /// The graph in DOT; normal forms are drawn with a double border.
    pub fn to_dot(&self) -> String {
        fn esc(s: &str) -> String {
            s.replace('\\', "\\\\").replace('"', "\\\"")
        }
        let mut out =
            String::from("digraph reduction {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, t) in self.nodes().enumerate() {
            let peripheries = if self.succ[i].is_empty() {
                ", peripheries=2"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  n{i} [label=\"{}\"{peripheries}];",
                esc(&t.to_string())
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}\"];",
                e.from,
                e.to,
                esc(&e.redex.to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Strong normalization status of one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sn {
    /// With the length of the longest reduction.
    Yes(usize),
    No,
    Unknown,
}

impl Sn {
    /// `Some(true)` for SN, `Some(false)` for not SN, `None` when unknown.
    pub fn known(self) -> Option<bool> {
        match self {
            Sn::Yes(_) => Some(true),
            Sn::No => Some(false),
            Sn::Unknown => None,
        }
    }
}

pub fn sn(ctx: Option<&TypingContext>, t: &Term, limit: usize) -> Sn {
    explore_in(ctx, t, limit).sn()
}

fn sn_elim(ctx: Option<&TypingContext>, e: &Elim, limit: usize) -> Sn {
    match e {
        Elim::Term(t) => sn(ctx, t, limit),
        Elim::Proj(_) => Sn::Yes(0),
        Elim::Case(_, a, _, b) => match (sn(None, a, limit), sn(None, b, limit)) {
            (Sn::No, _) | (_, Sn::No) => Sn::No,
            (Sn::Yes(x), Sn::Yes(y)) => Sn::Yes(x.max(y)),
            _ => Sn::Unknown,
        },
        Elim::Boxed(inner) => sn_elim(ctx, inner, limit),
    }
}

/// Outcome of an exhaustive check of a universally quantified statement on
/// one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    fn of(b: Option<bool>) -> Verdict {
        match b {
            Some(true) => Verdict::Holds,
            Some(false) => Verdict::Fails,
            None => Verdict::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CarSnReport {
    pub row: HeadRow,
    pub term: Sn,
    pub args: Vec<Sn>,
    pub head_reduct: Option<Sn>,
    pub verdict: Verdict,
}

/// Checks `M in SN <=> arg(M) in SN and hred(M) in SN` on a simple term.
/// Case branches among the arguments are explored without typing
/// information, which does not affect their reduction graphs.
pub fn verify_carsn(ctx: &TypingContext, t: &Term, limit: usize) -> Result<CarSnReport, HeadError> {
    let row = classify_in(ctx, t)?;
    let lhs = sn(Some(ctx), t, limit);
    let args: Vec<Sn> = row
        .args
        .iter()
        .map(|a| match &a.value {
            Subtree::Term(x) => sn(None, x, limit),
            Subtree::Elim(e) => sn_elim(None, e, limit),
        })
        .collect();
    let head_reduct = row.head_reduct.as_ref().map(|r| sn(Some(ctx), r, limit));
    let rhs = args
        .iter()
        .copied()
        .chain(head_reduct)
        .try_fold(true, |acc, s| s.known().map(|b| acc && b));
    let verdict = Verdict::of(lhs.known().zip(rhs).map(|(l, r)| l == r));
    Ok(CarSnReport {
        row,
        term: lhs,
        args,
        head_reduct,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubstPrecondition {
    #[error("the term is ill-typed: {0}")]
    Untyped(TypeError),
    #[error("`{0}` is not declared in the context")]
    Undeclared(Var),
    #[error("substituted variables have different types")]
    MixedTypes,
    #[error("the image of `{0}` does not have the variable's type")]
    ImageType(Var),
    #[error("the image of `{0}` is not strongly normalizing")]
    ImageNotSn(Var),
}

/// Explores `M[s]` when `M` is typed, all substituted variables share one
/// type and every image is typed at it and strongly normalizing.
pub fn verify_subst(
    ctx: &TypingContext,
    t: &Term,
    s: &SubstIntu,
    limit: usize,
) -> Result<Verdict, SubstPrecondition> {
    check(ctx, t).map_err(SubstPrecondition::Untyped)?;
    let mut shared: Option<&Formula> = None;
    for (x, img) in s.iter() {
        let ty = ctx
            .intu_type(x)
            .ok_or_else(|| SubstPrecondition::Undeclared(x.clone()))?;
        if shared.is_some_and(|s| s != ty) {
            return Err(SubstPrecondition::MixedTypes);
        }
        shared = Some(ty);
        if check(ctx, img).ok().as_ref() != Some(ty) {
            return Err(SubstPrecondition::ImageType(x.clone()));
        }
        match sn(Some(ctx), img, limit) {
            Sn::Yes(_) => {}
            Sn::No => return Err(SubstPrecondition::ImageNotSn(x.clone())),
            Sn::Unknown => return Ok(Verdict::Inconclusive),
        }
    }
    Ok(Verdict::of(sn(Some(ctx), &subst_intu(t, s), limit).known()))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AppPrecondition {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("S2 is not strongly normalizing")]
    S2NotSn,
}

/// Explores `S1` once `S2` is known to be typed and strongly normalizing.
/// Sequences that are not nice are rejected.
pub fn verify_app(sc: &Scenario, limit: usize) -> Result<Verdict, AppPrecondition> {
    sc.validate()?;
    match sn(Some(&sc.ctx), &sc.s2(), limit) {
        Sn::Yes(_) => {}
        Sn::No => return Err(AppPrecondition::S2NotSn),
        Sn::Unknown => return Ok(Verdict::Inconclusive),
    }
    Ok(Verdict::of(sn(Some(&sc.ctx), &sc.s1(), limit).known()))
}
