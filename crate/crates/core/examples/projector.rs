//! Projects an advection term onto the eigenbasis, expands it back and checks
//! that the residual is orthogonal to every retained eigenfunction.

use cylsat::eigen::{canonical, EigenId};
use cylsat::projector::{expand, project, residual_is_orthogonal, Universe};
use cylsat::trig::{advect, divergence, DomainLengths};

fn main() {
    let l = DomainLengths::unit();
    let a = canonical(EigenId::y([1, 1, 1], 1), &l).unwrap();
    let b = canonical(EigenId::z([1, 0, 1], 1), &l).unwrap();
    let f = advect(&a.field, &b.field, &l);
    println!(
        "(Y·∇)Z has {} trig terms, divergence-free: {}",
        f.term_count(),
        divergence(&f, &l).is_zero()
    );

    let uni = Universe::new(3, &l);
    let c = project(&f, &uni).unwrap();
    println!(
        "projection onto {} eigenfunctions has {} nonzero coordinates:",
        uni.len(),
        c.len()
    );
    for (id, v) in &c {
        println!("  {id}: {v}");
    }
    let back = expand(&c, &uni).unwrap();
    println!(
        "projection divergence-free: {}",
        divergence(&back, &l).is_zero()
    );
    println!(
        "projected again unchanged: {}",
        project(&back, &uni).unwrap() == c
    );
    println!(
        "residual orthogonal: {}",
        residual_is_orthogonal(&f, &uni).unwrap()
    );
}
