//! The marked calculus: marks `{N}`, boxes `[[e]]`, correctness, the two
//! translations and the box-moving measure, on the two worked examples.
//!
//! `cargo run --example marked_terms`

use ndcut::marked::{btr_step, correct, lg, nb, st_ids, t1, t2};
use ndcut::parse_term;
use ndcut::TypingContext;

fn main() {
    let a = parse_term("(m [x1.{n} | x2.{o}] [[e]] p)").unwrap();
    let b = parse_term(
        "(m [x1.(n [y1.{o} | y2.mu a:A. p] [[e1]]) | x2.(mu b:B. (b mu c:C. (c (q [z1.mu d:D. r | z2.{s}]))) [[e2]])])",
    )
    .unwrap();
    for (name, t) in [("A", &a), ("B", &b)] {
        println!("{name}      {t}");
        println!(
            "  correct {}  nb {}  lg {}",
            correct(t),
            nb(t),
            lg(t).unwrap()
        );
        println!("  T1      {}", t1(t));
        println!("  T2      {}", t2(t));
    }

    // moving the box of A into the case split lowers lg and keeps T2
    let ctx = TypingContext::new();
    let mut cur = a.clone();
    while let Some((r, next)) = btr_step(&ctx, &cur).into_iter().next() {
        println!(
            "{r:<8} lg {} -> {}  {next}",
            lg(&cur).unwrap(),
            lg(&next).unwrap()
        );
        cur = next;
    }
    println!("T2 unchanged: {}", ndcut::alpha_eq(&t2(&cur), &t2(&a)));

    let u = parse_term("mu a:A. (a {n})").unwrap();
    println!("st(mu a:A. (a {{n}})) = {:?}", st_ids(&u).unwrap());
}
