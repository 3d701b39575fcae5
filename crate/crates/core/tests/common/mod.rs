#![allow(dead_code)]

use ndcut::term::Node;
use ndcut::{Elim, Path, Term};

pub fn all_paths(t: &Term) -> Vec<Path> {
    fn go(n: Node<'_>, p: &mut Path, out: &mut Vec<Path>) {
        out.push(p.clone());
        for i in 0..n.arity() {
            p.push(i);
            go(n.child(i).unwrap(), p, out);
            p.pop();
        }
    }
    let mut out = Vec::new();
    go(Node::Term(t), &mut Path::root(), &mut out);
    out
}

pub fn term_paths(t: &Term, pred: impl Fn(&Term) -> bool) -> Vec<Path> {
    all_paths(t)
        .into_iter()
        .filter(|p| matches!(t.subterm_at(p), Ok(Node::Term(s)) if pred(s)))
        .collect()
}

pub fn sub(t: &Term, p: &Path) -> Term {
    t.subterm_at(p).unwrap().as_term().unwrap().clone()
}

/// Paths `p` with `(U [[e]])` at `p`.
pub fn sites(t: &Term) -> Vec<Path> {
    term_paths(
        t,
        |s| matches!(s, Term::App(_, e) if matches!(**e, Elim::Boxed(_))),
    )
}

pub fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}
