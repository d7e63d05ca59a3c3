//! Exact trig-polynomial calculus: products, derivatives and the identities
//! `curl grad = 0`, `div curl = 0`.

use cylsat::pipoly::PiPoly;
use cylsat::rational::frac;
use cylsat::trig::{
    curl, divergence, gradient, inner_scalar, parse_pattern, pattern_str, DomainLengths,
    TrigScalar, TrigVectorField,
};

fn show(name: &str, s: &TrigScalar) {
    let terms: Vec<String> = s
        .monomials()
        .iter()
        .map(|m| format!("({}) {}{:?}", m.coeff, pattern_str(&m.factors), m.k))
        .collect();
    println!(
        "{name} = {}",
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    );
}

fn main() {
    let l = DomainLengths::new(frac(1, 1), frac(2, 1), frac(1, 2)).unwrap();
    let f = TrigScalar::monomial([1, 2, 1], parse_pattern("SSC").unwrap(), PiPoly::one());
    let g = TrigScalar::monomial(
        [2, 1, 3],
        parse_pattern("SCS").unwrap(),
        PiPoly::rational(frac(3, 2)),
    );
    show("f", &f);
    show("g", &g);
    show("f g", &f.mul(&g));
    show("d1 f", &f.diff(0, &l));
    show("lap f", &f.laplacian(&l));
    println!("<f, f> = {}", inner_scalar(&f, &f, &l));
    println!("f(0.3, 0.7, 0.2) = {:.6}", f.eval([0.3, 0.7, 0.2], &l));

    let grad = gradient(&f.mul(&g), &l);
    println!("curl grad (fg) is zero: {}", curl(&grad, &l).is_zero());
    let u = TrigVectorField::new(f.clone(), g.clone(), f.mul(&g));
    println!(
        "div curl u is zero: {}",
        divergence(&curl(&u, &l), &l).is_zero()
    );
}
