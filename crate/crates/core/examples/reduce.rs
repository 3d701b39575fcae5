//! One-step reduction and normalization under the three strategies.
//!
//! `cargo run --example reduce`

use ndcut::reduction::{normalize_in, redexes, reduce_at_in, step_all_in, Strategy};
use ndcut::{check, parse};

fn main() {
    let unit = parse(
        r"ctx v:A;
          (\y:(A -> B) -> A. mu a:A. (a (y \x:A. mu b:B. (a x))) \k:A -> B. v)",
    )
    .unwrap();
    let (ctx, t) = (&unit.ctx, &unit.term);
    println!("term      {t}");
    println!("type      {}", check(ctx, t).unwrap());
    for r in redexes(t) {
        println!("redex     {r}");
    }
    for (r, reduct) in step_all_in(ctx, t) {
        println!("{r}  -> {reduct}");
    }
    let first = redexes(t).remove(0);
    println!("fired     {}", reduce_at_in(ctx, t, &first.path).unwrap());

    for strategy in [Strategy::Head, Strategy::Leftmost, Strategy::Random(7)] {
        let n = normalize_in(ctx, t, strategy, 100);
        let steps: Vec<String> = n.trace.iter().map(|r| r.to_string()).collect();
        println!(
            "{strategy}: {} steps [{}] -> {}",
            n.trace.len(),
            steps.join(", "),
            n.term
        );
    }
}
