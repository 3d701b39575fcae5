//! Decomposing terms into simple components and classifying simple terms
//! by their head.
//!
//! `cargo run --example head_table`

use ndcut::head::{classify_in, decompose, fill, head_strategy_redex};
use ndcut::{alpha_eq, parse};

fn main() {
    let ctx_src = r"ctx m:A \/ B, f:A -> C -> D, g:B -> C -> D, c:C, v:A, w:B, h:A -> A, k:A -> B;";
    for body in [
        r"(h v)",
        r"(\x:A. x v)",
        r"(<v, w> p2)",
        r"(in1[A \/ B] v [x.(f x c) | y.(g y c)])",
        r"(mu a:A /\ B. (a <v, (k v)>) p1)",
        r"(m [x1.(f x1) | x2.(g x2)] c)",
    ] {
        let unit = parse(&format!("{ctx_src} {body}")).unwrap();
        let row = classify_in(&unit.ctx, &unit.term).unwrap();
        println!("{}\n{row}\n", unit.term);
    }

    // non-simple terms split into a context with holes and simple pieces
    let unit = parse(&format!(
        "{ctx_src} <\\x:A. (\\y:A. (h y) x), mu a:A. (a (h v))>"
    ))
    .unwrap();
    let (c, parts) = decompose(&unit.term);
    println!("context   {c}");
    for (i, p) in parts.iter().enumerate() {
        println!("  *{}      {p}", i + 1);
    }
    assert!(alpha_eq(&fill(&c, &parts).unwrap(), &unit.term));
    println!(
        "head redex of the whole term: {:?}",
        head_strategy_redex(&unit.term).map(|r| r.to_string())
    );
}
