//! Instance checkers for the strong normalization results: the head
//! characterization of simple terms, substitution, and pushing an
//! eliminator into a case split.
//!
//! `cargo run --example sn_theorems`

use ndcut::oracle::{verify_app, verify_carsn, verify_subst, DEFAULT_NODE_LIMIT};
use ndcut::{parse, parse_scenario, parse_term, SubstIntu};

fn main() {
    let unit = parse(r"ctx f:A -> B -> C, v:A, w:B; (\x:A. (f x) v w)").unwrap();
    let r = verify_carsn(&unit.ctx, &unit.term, DEFAULT_NODE_LIMIT).unwrap();
    println!(
        "carSN   row {} term {:?} args {:?} hred {:?} -> {:?}",
        r.row.case, r.term, r.args, r.head_reduct, r.verdict
    );

    let unit = parse(r"ctx x:A -> A, y:A -> A, v:A; (x (y v))").unwrap();
    let mut s = SubstIntu::new();
    s.insert("x", parse_term(r"\z:A. z").unwrap());
    s.insert("y", parse_term(r"\z:A. (\u:A. u z)").unwrap());
    let verdict = verify_subst(&unit.ctx, &unit.term, &s, DEFAULT_NODE_LIMIT).unwrap();
    println!("subst   {} with {{x, y}} -> {verdict:?}", unit.term);

    let sc = parse_scenario(
        r"ctx m:A \/ B, f:A -> C -> D, g:B -> C -> D, c:C;
          M = m; N1 = (f x1); N2 = (g x2); eps = c; V = []",
    )
    .unwrap();
    println!("app     S1 = {}", sc.s1());
    println!("        S2 = {}", sc.s2());
    println!(
        "        -> {:?}",
        verify_app(&sc, DEFAULT_NODE_LIMIT).unwrap()
    );
}
