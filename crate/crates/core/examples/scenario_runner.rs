//! Load a bundled scenario file, run its checks and print the report.
//!
//! `cargo run --example scenario_runner -- [path] [--json]`

use std::path::PathBuf;

use tiltgap::scenario::Scenario;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let json = args.iter().any(|a| a == "--json");
    let path = args
        .iter()
        .find(|a| !a.starts_with("--"))
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/two_point.json"));

    let scenario = match Scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let report = scenario.run(None);
    if json {
        print!("{}", report.render_json(false));
    } else {
        print!("{}", report.render_text(false));
    }
}
