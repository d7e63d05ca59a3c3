//! Replays every built-in step script and prints what matched.
//!
//! `cargo run --release --example replay [step] [qmax]`

use cylsat::replay::{all_steps, default_lengths, find_step, replay};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let steps = match args.first() {
        Some(s) => vec![find_step(s).unwrap_or_else(|| panic!("no step `{s}`"))],
        None => all_steps(),
    };
    let qmax: u32 = args.get(1).map(|s| s.parse().expect("qmax")).unwrap_or(12);
    let qs: Vec<u32> = (4..=qmax).collect();
    let lengths = default_lengths();
    for st in steps {
        let r = replay(&st, &qs, &lengths).expect("replay");
        println!(
            "{:<16} z {}/{}  beta {}/{}  det {}/{} (display {}/{})  indep {}/{} (literal {}/{})  {}",
            r.step,
            r.z_vectors.passed,
            r.z_vectors.total,
            r.betas.passed,
            r.betas.total,
            r.determinants.passed,
            r.determinants.total,
            r.display_consistent_determinants.passed,
            r.display_consistent_determinants.total,
            r.required_independence.passed,
            r.required_independence.total,
            r.literal_independence.passed,
            r.literal_independence.total,
            if r.passed { "ok" } else { "FAIL" }
        );
        for f in &r.findings {
            println!(
                "    {} {} {:?}\n        {}",
                f.case, f.what, f.verdicts, f.first
            );
        }
    }
}
