//! Steers the cap-2 Galerkin system from rest towards a target with controls
//! in the first bracket level of a seed set.
//!
//! `cargo run --release --example steer [config.json]`

use cylsat::galerkin::{control_basis, ExperimentConfig, DEMO_CONFIG};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(p).expect("read config"),
        None => DEMO_CONFIG.to_string(),
    };
    let exp = ExperimentConfig::from_json(&text)
        .and_then(|c| c.build())
        .expect("config");
    let (basis, support) = control_basis(&exp.sys, &exp.seed).expect("control basis");
    println!(
        "{} modes, {} tensor entries, antisymmetry violations {}",
        exp.sys.dim(),
        exp.sys.tensor.len(),
        exp.sys.antisymmetry_violations
    );
    println!(
        "control subspace: dim {} on {} modes",
        basis.len(),
        support.len()
    );
    let out = exp.steer().expect("steer");
    for l in &out.levels {
        println!(
            "  {} intervals: distance {:.3e} after {} iterations",
            l.intervals, l.distance, l.iterations
        );
    }
    println!(
        "achieved V-distance {:.3e}, uncontrolled {:.3e}, ratio {:.2e} ({} integrations, {:.1}s)",
        out.distance, out.baseline, out.ratio, out.evaluations, out.seconds
    );
}
