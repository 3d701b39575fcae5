//! Driving the command line in-process on the sample files in
//! `examples/data`.
//!
//! `cargo run --example cli_tour`

use std::path::Path;

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let f = |name: &str| data.join(name).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["check".into(), f("id.nd")],
        vec!["check".into(), f("peirce.nd")],
        vec!["step".into(), f("beta.nd")],
        vec![
            "normalize".into(),
            f("peirce.nd"),
            "--strategy".into(),
            "head".into(),
            "--trace".into(),
        ],
        vec!["explore".into(), f("beta.nd")],
        vec!["classify".into(), f("cp.nd")],
        vec![
            "gen".into(),
            "--seed".into(),
            "3".into(),
            "--size".into(),
            "15".into(),
            "--count".into(),
            "2".into(),
        ],
        vec!["harness".into(), "app".into(), f("app_case.scn")],
        vec!["step".into(), f("id.nd")],
    ];
    for args in runs {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ndcut".to_string()).chain(args.iter().cloned());
        let code = ndcut::cli::run(argv, &mut out, &mut err);
        println!("$ ndcut {}", args.join(" "));
        print!(
            "{}{}",
            String::from_utf8_lossy(&out),
            String::from_utf8_lossy(&err)
        );
        println!("[exit {code}]\n");
    }
}
