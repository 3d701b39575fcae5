//! Exhaustive reduction graphs: node and edge counts, the longest
//! reduction (eta), normal forms, subject reduction and DOT export.
//!
//! `cargo run --example explore_graph [OUT.dot]`

use ndcut::oracle::{explore_in, DEFAULT_NODE_LIMIT};
use ndcut::parse;

fn main() {
    let unit = parse(
        r"ctx f:A -> A, v:A;
          (\x:A. (f (f x)) (\y:A. y mu a:A. (a (f v))))",
    )
    .unwrap();
    let g = explore_in(Some(&unit.ctx), &unit.term, DEFAULT_NODE_LIMIT);
    println!("{}", g.summary());
    println!(
        "type {}  violations {}",
        g.root_type().unwrap(),
        g.violation_count()
    );
    let etas = g.etas().unwrap();
    assert_eq!(etas, g.etas_naive().unwrap());
    for (i, t) in g.nodes().enumerate() {
        println!("  [{i}] eta={} {t}", etas[i]);
    }
    for nf in g.normal_forms() {
        println!("normal form {nf}");
    }
    if let Some(out) = std::env::args().nth(1) {
        std::fs::write(&out, g.to_dot()).unwrap();
        println!("wrote {out}");
    }
}
