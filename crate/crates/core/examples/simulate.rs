//! Free evolution of the cap-2 Galerkin system from a random state, written
//! as CSV to stdout.
//!
//! `cargo run --release --example simulate > run.csv`

use cylsat::galerkin::{assemble, integrate};
use cylsat::trig::DomainLengths;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let sys = assemble(2, 0.05, &DomainLengths::unit(), &[]).unwrap();
    eprintln!("{} modes, {} tensor entries", sys.dim(), sys.tensor.len());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u0: Vec<f64> = (0..sys.dim())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let tr = integrate(&sys, &u0, None, 1.0, 0.001).unwrap();
    eprintln!(
        "energy {:.4} -> {:.4}",
        tr.energy[0],
        tr.energy.last().unwrap()
    );
    tr.write_csv(&sys, &vec![0.0; sys.dim()], std::io::stdout())
        .unwrap();
}
