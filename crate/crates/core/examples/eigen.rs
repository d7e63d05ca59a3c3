//! Enumerates a named eigenfunction set, prints a few members and validates
//! every one of them symbolically.
//!
//! `cargo run --release --example eigen [set] [L1 L2 L3]`

use cylsat::eigen::{canonical, enumerate_set, fmt_w, validate_eigenfunction, SetSpec};
use cylsat::trig::DomainLengths;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = SetSpec::parse(args.first().map(String::as_str).unwrap_or("cq-c:2")).expect("set");
    let l = if args.len() >= 4 {
        DomainLengths::parse(&[&args[1], &args[2], &args[3]]).expect("lengths")
    } else {
        DomainLengths::unit()
    };
    let ids = enumerate_set(&spec);
    println!("{}: {} eigenfunctions on {l}", spec.label(), ids.len());
    let mut bad = 0;
    for (i, id) in ids.iter().enumerate() {
        let e = canonical(*id, &l).unwrap();
        let r = validate_eigenfunction(&e, &l);
        if i < 8 {
            println!(
                "  {id}  w = {}  λ/(νπ²) = {}  |e|² = {}",
                fmt_w(&e.w),
                e.eigen_coeff,
                e.norm2
            );
        }
        if !r.passed() {
            bad += 1;
            println!(
                "  {id} FAILS {:?}",
                r.failures().iter().map(|c| &c.name).collect::<Vec<_>>()
            );
        }
    }
    println!("{} of {} pass every check", ids.len() - bad, ids.len());
}
