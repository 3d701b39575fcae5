//! Certifying a reduction of `S1 = (M [x1.N1 | x2.N2] eps V)` against
//! `S2 = (M [x1.(N1 eps) | x2.(N2 eps)] V)` through the marked calculus.
//!
//! `cargo run --example certify`

use ndcut::marked::certify_app;
use ndcut::parse_scenario;
use ndcut::reduction::{normalize_in, replay, Strategy};

fn main() {
    let sc = parse_scenario(
        r"ctx y:B, h:C -> E, k:D -> E, c:C;
          M = mu a:A \/ B. (a in2[A \/ B] y);
          N1 = in1[C \/ D] c;
          N2 = mu b:C \/ D. (b in1[C \/ D] c);
          eps = [y1.(h y1) | y2.(k y2)]; V = []",
    )
    .unwrap();
    println!("{sc}");
    println!("M0 = {}", sc.marked());
    for strategy in [Strategy::Leftmost, Strategy::Head, Strategy::Random(3)] {
        let n = normalize_in(&sc.ctx, &sc.s1(), strategy, 1000);
        let trace = replay(&sc.ctx, &sc.s1(), &n.trace).unwrap();
        println!("-- {strategy}: {} steps", n.trace.len());
        match certify_app(&sc, &trace) {
            Ok(cert) => cert.lines().iter().for_each(|l| println!("{l}")),
            Err(e) => println!("violation: {e}"),
        }
    }
}
