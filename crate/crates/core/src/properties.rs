//! Randomized checks of the algebraic invariants across modules.

use crate::bracket::{check_lin_indep_pair, shape_field};
use crate::eigen::{
    canonical, enumerate_set, index_box, validate_eigenfunction, EigenId, Family, SetSpec,
};
use crate::galerkin::assemble;
use crate::pipoly::PiPoly;
use crate::projector::{expand, project, residual_is_orthogonal, Universe};
use crate::rational::{frac, q, Q};
use crate::replay::{default_lengths, find_step, replay};
use crate::span::{ChainEngine, OverflowPolicy, Subspace};
use crate::trig::{
    advect, curl, divergence, gradient, inner, DomainLengths, Factor, Pattern, TrigScalar,
    TrigVectorField,
};
use num_traits::Zero;
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::Arc;

fn lengths() -> impl Strategy<Value = DomainLengths> {
    prop::array::uniform3((1i64..6, 1i64..5)).prop_map(|a| {
        DomainLengths::new(
            frac(a[0].0, a[0].1),
            frac(a[1].0, a[1].1),
            frac(a[2].0, a[2].1),
        )
        .unwrap()
    })
}

fn factor() -> impl Strategy<Value = Factor> {
    prop_oneof![Just(Factor::Sin), Just(Factor::Cos)]
}

fn scalar(max_k: u32, max_terms: usize) -> impl Strategy<Value = TrigScalar> {
    prop::collection::vec(
        (
            prop::array::uniform3(0..=max_k),
            prop::array::uniform3(factor()),
            -4i64..=4,
            0i32..2,
        ),
        0..=max_terms,
    )
    .prop_map(|ts| {
        let mut s = TrigScalar::zero();
        for (k, p, c, pw) in ts {
            s.add_term(k, p as Pattern, PiPoly::monomial(q(c), pw));
        }
        s
    })
}

fn field(max_k: u32, max_terms: usize) -> impl Strategy<Value = TrigVectorField> {
    (
        scalar(max_k, max_terms),
        scalar(max_k, max_terms),
        scalar(max_k, max_terms),
    )
        .prop_map(|(a, b, c)| TrigVectorField::new(a, b, c))
}

/// Integer combination of a few eigenfunctions with entries ≤ 2.
fn eigen_combo(l: &DomainLengths, picks: &[(usize, i64)]) -> TrigVectorField {
    let uni = Universe::new(2, l);
    let mut f = TrigVectorField::zero();
    for (i, c) in picks {
        f.add_assign(&uni.get(i % uni.len()).field.scale_q(&q(*c)));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalize_idempotent(f in scalar(3, 6)) {
        let n = f.normalize();
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn product_commutes_and_associates(f in scalar(2, 3), g in scalar(2, 3), h in scalar(2, 3)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
    }

    #[test]
    fn product_evaluates_pointwise(f in scalar(3, 4), g in scalar(3, 4), l in lengths(), xs in prop::collection::vec(prop::array::uniform3(0.0f64..1.0), 20)) {
        let fg = f.mul(&g);
        for x in xs {
            let p = [x[0] * l.f64(0), x[1] * l.f64(1), 2.0 * x[2] * l.f64(2)];
            let lhs = fg.eval(p, &l);
            let rhs = f.eval(p, &l) * g.eval(p, &l);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn curl_grad_and_div_curl_vanish(f in scalar(3, 5), u in field(3, 4), l in lengths()) {
        prop_assert!(curl(&gradient(&f, &l), &l).is_zero());
        prop_assert!(divergence(&curl(&u, &l), &l).is_zero());
    }

    #[test]
    fn inner_symmetric_and_positive(u in field(3, 4), v in field(3, 4), l in lengths()) {
        prop_assert_eq!(inner(&u, &v, &l), inner(&v, &u, &l));
        if !u.is_zero() {
            prop_assert!(inner(&u, &u, &l).to_f64() > 0.0);
        }
    }

    #[test]
    fn eigenfunctions_valid_at_random_lengths(l in lengths(), pick in 0usize..1000) {
        let ids = enumerate_set(&SetSpec::CqC { q: 3 });
        let id = ids[pick % ids.len()];
        let e = canonical(id, &l).unwrap();
        prop_assert!(validate_eigenfunction(&e, &l).passed());
        prop_assert!(inner(&e.field, &e.field, &l).to_f64() > 0.0);
    }

    #[test]
    fn projection_idempotent_and_solenoidal(u in field(2, 4), l in lengths()) {
        let uni = Universe::new(2, &l);
        let c = project(&u, &uni).unwrap();
        let pu = expand(&c, &uni).unwrap();
        prop_assert_eq!(project(&pu, &uni).unwrap(), c);
        prop_assert!(divergence(&pu, &l).is_zero());
    }

    #[test]
    fn projection_residual_orthogonal(picks in prop::collection::vec((0usize..61, -3i64..=3), 1..4), phi_k in prop::array::uniform3(0u32..=2), c in 1i64..4, l in lengths()) {
        let uni = Universe::new(2, &l);
        let phi = TrigScalar::monomial(phi_k, [Factor::Cos; 3], PiPoly::rational(q(c)));
        let u = eigen_combo(&l, &picks).add(&gradient(&phi, &l));
        prop_assert!(residual_is_orthogonal(&u, &uni).unwrap());
    }

    #[test]
    fn convection_is_energy_neutral(a in prop::collection::vec((0usize..61, -3i64..=3), 1..3), b in prop::collection::vec((0usize..61, -3i64..=3), 1..3), l in lengths()) {
        let u = eigen_combo(&l, &a);
        let v = eigen_combo(&l, &b);
        prop_assert!(inner(&advect(&u, &v, &l), &v, &l).is_zero());
    }

    #[test]
    fn pair_independence_matches_direct_rank(al in prop::array::uniform3(-3i64..=3), ga in prop::array::uniform3(-3i64..=3), k in prop::array::uniform3(0u32..=3), l in lengths()) {
        let alpha = al.map(q);
        let gamma = ga.map(q);
        let locals: Vec<EigenId> = [EigenId::z(k, 1), EigenId::z(k, 2)].into_iter().filter(|i| i.check().is_ok()).collect();
        // coordinates by explicit inner products with each local eigenfunction
        let coords = |z: &[Q; 3]| -> Vec<Q> {
            let f = shape_field(Family::Z, k, &z.clone().map(PiPoly::rational));
            locals.iter().map(|id| {
                let e = canonical(*id, &l).unwrap();
                let v = inner(&f, &e.field, &l);
                v.as_monomial().map(|(x, _)| x).unwrap_or_else(Q::zero)
            }).collect()
        };
        let (ca, cg) = (coords(&alpha), coords(&gamma));
        let direct = match locals.len() {
            0 => false,
            1 => !ca[0].is_zero() || !cg[0].is_zero(),
            _ => !(&ca[0] * &cg[1] - &ca[1] * &cg[0]).is_zero(),
        };
        prop_assert_eq!(check_lin_indep_pair(&alpha, &gamma, &k, &l), direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn adding_a_member_changes_nothing(picks in prop::collection::vec((0usize..61, -3i64..=3), 1..6), mix in prop::collection::vec(-3i64..=3, 6)) {
        let uni = Arc::new(Universe::new(2, &DomainLengths::unit()));
        let mut s = Subspace::new(uni.clone());
        for (i, c) in &picks {
            let mut v = s.unit(&uni.ids()[*i]).unwrap();
            v[0].1 = q(*c).max(q(1));
            s.add_sparse(v);
        }
        let before = s.basis().to_vec();
        let mut combo = std::collections::BTreeMap::new();
        for (row, m) in before.iter().zip(&mix) {
            for (i, x) in row {
                *combo.entry(*i).or_insert_with(Q::zero) += x * q(*m);
            }
        }
        let v: Vec<(usize, Q)> = combo.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        prop_assert!(!s.add_sparse(v.clone()));
        prop_assert!(!s.add_filtered(v));
        prop_assert_eq!(s.basis(), &before[..]);
    }

    #[test]
    fn chain_ignores_generator_order(perm in Just(enumerate_set(&SetSpec::CqC { q: 1 })).prop_shuffle()) {
        let l = DomainLengths::unit();
        let mut a = ChainEngine::new(enumerate_set(&SetSpec::CqC { q: 1 }), 2, OverflowPolicy::Discard, &l).unwrap();
        let mut b = ChainEngine::new(perm, 2, OverflowPolicy::Discard, &l).unwrap();
        let mut ga = a.chain(1).unwrap().pop().unwrap();
        let mut gb = b.chain(1).unwrap().pop().unwrap();
        prop_assert_eq!(ga.dim(), gb.dim());
        for v in ga.basis().to_vec() {
            prop_assert!(gb.contains_sparse(&v));
        }
        for v in gb.basis().to_vec() {
            prop_assert!(ga.contains_sparse(&v));
        }
    }

    #[test]
    fn tensor_pairing_annihilates_diagonal(l in lengths(), x in prop::collection::vec(-1.0f64..1.0, 13), a in 0usize..13) {
        let sys = assemble(1, 1.0, &l, &[]).unwrap();
        prop_assert_eq!(sys.antisymmetry_violations, 0);
        let s: f64 = sys.tensor.iter().filter(|t| t.a as usize == a).map(|t| t.value * sys.norm2[t.c as usize] * x[t.b as usize] * x[t.c as usize]).sum();
        prop_assert!(s.abs() < 1e-9, "{}", s);
    }

    #[test]
    fn v_norm_is_a_norm(x in prop::collection::vec(-2.0f64..2.0, 61), y in prop::collection::vec(-2.0f64..2.0, 61)) {
        let sys = assemble(2, 0.5, &DomainLengths::unit(), &[]).unwrap();
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(sys.v_norm(&s) <= sys.v_norm(&x) + sys.v_norm(&y) + 1e-12);
        prop_assert_eq!(sys.v_norm(&vec![0.0; 61]), 0.0);
    }
}

#[test]
fn same_index_eigenfunctions_orthogonal() {
    let l = DomainLengths::new(frac(2, 3), frac(5, 7), frac(3, 2)).unwrap();
    for k in index_box(3) {
        for fam in [Family::Y, Family::Z] {
            let mk = |j| EigenId { family: fam, k, j };
            if mk(1).check().is_ok() && mk(2).check().is_ok() {
                let a = canonical(mk(1), &l).unwrap();
                let b = canonical(mk(2), &l).unwrap();
                assert!(inner(&a.field, &b.field, &l).is_zero(), "{k:?} {fam:?}");
            }
        }
    }
}

#[test]
fn cylinder_enumeration_matches_brute_force() {
    for bound in 0..=5 {
        let mut brute = BTreeSet::new();
        for k in index_box(bound) {
            for family in [Family::Y, Family::Z] {
                for j in 1..=2 {
                    let id = EigenId { family, k, j };
                    if id.check().is_ok() {
                        brute.insert(id);
                    }
                }
            }
        }
        let got: BTreeSet<EigenId> = enumerate_set(&SetSpec::CqC { q: bound })
            .into_iter()
            .collect();
        assert_eq!(got, brute, "bound {bound}");
    }
}

#[test]
fn generated_rows_are_solenoidal() {
    let l = DomainLengths::new(frac(3, 2), q(1), frac(2, 3)).unwrap();
    let mut eng = ChainEngine::new(
        enumerate_set(&SetSpec::CqC { q: 1 }),
        2,
        OverflowPolicy::Discard,
        &l,
    )
    .unwrap();
    let chain = eng.chain(2).unwrap();
    for g in &chain {
        for row in g.basis().iter().step_by(5) {
            let f = expand(&g.to_coords(row), g.universe()).unwrap();
            assert!(divergence(&f, &l).is_zero());
        }
    }
}

#[test]
fn replay_is_deterministic() {
    let st = find_step("lines-23-31").unwrap();
    let ls = default_lengths();
    let a = serde_json::to_string(&replay(&st, &[4, 5, 6], &ls).unwrap()).unwrap();
    let b = serde_json::to_string(&replay(&st, &[4, 5, 6], &ls).unwrap()).unwrap();
    assert_eq!(a, b);
}
