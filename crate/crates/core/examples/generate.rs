//! Seeded generation of typed terms and of scenarios for each eliminator
//! shape.
//!
//! `cargo run --example generate [SEED]`

use ndcut::generator::{gen_app_scenarios, gen_typed, GenConfig, Rule};
use ndcut::{check, parse_formula, BoxMode};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    for i in 0..4 {
        let (ctx, t) = gen_typed(&GenConfig::new(seed + i, 25)).unwrap();
        println!("{ctx} {t} : {}", check(&ctx, &t).unwrap());
    }

    let goal = parse_formula("((A -> B) -> A) -> A").unwrap();
    let (ctx, t) = gen_typed(&GenConfig::new(seed, 20).with_goal(goal)).unwrap();
    println!("\nPeirce: {ctx} {t}");

    // intuitionistic only: no mu abstraction
    let mut cfg = GenConfig::new(seed, 20);
    cfg.weights.insert(Rule::AbsIntro, 0);
    let (ctx, t) = gen_typed(&cfg).unwrap();
    println!("no mu:  {ctx} {t}");

    for mode in BoxMode::ALL {
        let sc = gen_app_scenarios(&GenConfig::new(seed, 20), mode).unwrap();
        println!("\n[{mode}]\n{sc}");
    }
}
