//! Generates the span chain from the 361-mode seed and checks that every
//! mode with entries ≤ q lies in G^{q-1}.
//!
//! cargo run --release --example saturation -- [cap] [L1 L2 L3]

use cylsat::eigen::SetSpec;
use cylsat::span::{run_verification, VerifyConfig};
use cylsat::trig::DomainLengths;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cap: u32 = args.first().map(|s| s.parse().expect("cap")).unwrap_or(5);
    let lengths = if args.len() >= 4 {
        let l: Vec<&str> = args[1..4].iter().map(|s| s.as_str()).collect();
        DomainLengths::parse(&l).expect("lengths")
    } else {
        DomainLengths::unit()
    };
    let mut cfg = VerifyConfig::new(SetSpec::Thm33, lengths, cap);
    cfg.cap = cap;
    let r = run_verification(&cfg).expect("verification");
    println!(
        "universe {} modes, dims {:?}, {:.1}s",
        r.universe_size, r.dims, r.seconds
    );
    for v in &r.verdicts {
        println!(
            "q={} in G^{}: {} ({} checked, {} missing)",
            v.q,
            v.level,
            v.inclusion.holds,
            v.inclusion.checked,
            v.inclusion.missing.len()
        );
    }
}
