//! Parsing and typechecking proof terms, including classical ones.
//!
//! `cargo run --example typecheck`

use ndcut::{check, parse};

fn main() {
    let sources = [
        r"\x:A. x",
        r"\p:A /\ B. <(p p2), (p p1)>",
        r"\d:A \/ B. (d [x.in2[B \/ A] x | y.in1[B \/ A] y])",
        // Peirce's law, classically
        r"\y:(A -> B) -> A. mu a:A. (a (y \x:A. mu b:B. (a x)))",
        // double negation elimination
        r"\n:~~A. mu a:A. (n \x:A. (a x))",
        r"ctx f:A -> B; \x:B. (f x)",
    ];
    for src in sources {
        let unit = parse(src).expect("the samples parse");
        match check(&unit.ctx, &unit.term) {
            Ok(ty) => println!("{:<58} : {ty}", unit.term),
            Err(e) => println!("{:<58} ! {e}", unit.term),
        }
    }

    match parse(r"\x:A. (x") {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error at {e}"),
    }
}
