//! Raises the level from q to q+1 region by region and reports which
//! regions are spanned by single brackets with the level-4 generators.
//!
//! `cargo run --release --example walk [q] [L1 L2 L3]`

use cylsat::replay::walk::{induction_walk, DEFAULT_ORDER};
use cylsat::trig::DomainLengths;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map(|s| s.parse().expect("q")).unwrap_or(4);
    let lengths = if args.len() >= 4 {
        DomainLengths::parse(&[&args[1], &args[2], &args[3]]).expect("lengths")
    } else {
        DomainLengths::unit()
    };
    let r = induction_walk(q, &lengths, &DEFAULT_ORDER).expect("walk");
    println!(
        "q = {} -> {}: {} base modes, {} new, {} brackets in cap ({} discarded)",
        q,
        q + 1,
        r.base_modes,
        r.new_modes,
        r.brackets_in_cap,
        r.brackets_discarded
    );
    for g in &r.regions {
        println!(
            "  {:<11} {:>4}/{:<4} holds={} alone={} missing={:?}",
            format!("{:?}", g.region),
            g.reached,
            g.targets,
            g.holds,
            g.holds_alone,
            g.missing.iter().map(|i| i.to_string()).collect::<Vec<_>>()
        );
    }
    println!("  axis region first: holds={}", r.axis_first.holds);
    println!(
        "  axis bracket touches {:?}, lands on the axis alone: {}",
        r.axis_bracket
            .touches
            .iter()
            .map(|(i, g)| format!("{i} {g:?}"))
            .collect::<Vec<_>>(),
        r.axis_bracket.lands_on_axis_alone
    );
    println!("  all new modes reached: {} ({:.1}s)", r.holds, r.seconds);
}
