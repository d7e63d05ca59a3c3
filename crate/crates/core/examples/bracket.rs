//! Symmetrised bracket of a Y and a Z eigenfunction, computed generically and
//! through the closed-form mixed formula, plus the local independence test.

use cylsat::bracket::{
    bracket_generic, check_lin_indep_pair, closed_form_field, decompose, raw_bracket,
    yz_mix_closed_form, yz_mix_projected,
};
use cylsat::eigen::{canonical, fmt_w, EigenId};
use cylsat::projector::Universe;
use cylsat::rational::frac;
use cylsat::trig::DomainLengths;

fn main() {
    let l = DomainLengths::unit();
    let y = canonical(EigenId::y([1, 2, 1], 1), &l).unwrap();
    let z = canonical(EigenId::z([2, 1, 1], 1), &l).unwrap();
    let uni = Universe::new(4, &l);

    let r = bracket_generic(&y, &z, &uni).unwrap();
    println!(
        "B({}, {}) projects onto {} eigenfunctions:",
        y.id,
        z.id,
        r.projected.len()
    );
    for (id, v) in &r.projected {
        println!("  {id}: {v}");
    }
    let cf = yz_mix_closed_form(&[1, 2, 1], &y.w, &[2, 1, 1], &z.w, &l);
    let raw = raw_bracket(&y.field, &z.field, &l);
    println!(
        "closed form has {} shape terms, raw bracket {}",
        cf.len(),
        decompose(&raw).map_or(0, |d| d.len())
    );
    println!(
        "closed form equals raw bracket: {}",
        closed_form_field(&cf) == raw.normalize()
    );
    println!(
        "projected forms agree: {}",
        yz_mix_projected(&y, &z, &uni).unwrap() == r.projected
    );

    let k = [3, 2, 1];
    let a = [frac(1, 1), frac(0, 1), frac(-3, 1)];
    let g = [frac(0, 1), frac(1, 1), frac(-2, 1)];
    println!(
        "Z directions {} and {} span the Z-space at {:?}: {}",
        fmt_w(&a),
        fmt_w(&g),
        k,
        check_lin_indep_pair(&a, &g, &k, &l)
    );
}
