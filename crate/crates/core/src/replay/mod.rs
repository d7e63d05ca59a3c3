//! Scripted re-computation of hand-derived bracket coefficients.
//!
//! A step script lists cases; each case fixes a target index, integer
//! parameters with ranges, and items. An item is a pair of eigen-data
//! `(k, w^k)`, `(m, w^m)` combined in a stated order, plus the z-vector
//! expected at the target index. Determinants of z-vectors and the
//! independence verdicts that the argument relies on are checked too.

pub mod expr;
pub mod walk;

use crate::bracket::{
    decompose, det3, index_det, projected_rank, raw_bracket, yz_mix_closed_form, z_local_dim,
    ShapeTerm,
};
use crate::eigen::{y_field, z_field, Family};
use crate::pipoly::PiPoly;
use crate::rational::Q;
use crate::trig::{advect, divergence, DomainLengths, Index3, TrigVectorField};
use expr::{eval, eval_index, Env};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct StepScript {
    pub id: String,
    #[serde(default)]
    pub alias: Option<String>,
    pub summary: String,
    #[serde(default)]
    pub note: Option<String>,
    #[serde(default)]
    pub cases: Vec<CaseScript>,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct VarRange {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct CaseScript {
    pub name: String,
    pub target: [String; 3],
    #[serde(default)]
    pub vars: Vec<VarRange>,
    pub items: Vec<ItemScript>,
    #[serde(default)]
    pub dets: Vec<DetScript>,
    #[serde(default)]
    pub independence: Vec<IndepScript>,
}

/// How the two eigen-data are combined.
#[derive(Deserialize, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `(Y^k·∇)Z^m + (Z^m·∇)Y^k`
    Yz,
    /// `(Z^k·∇)Y^m + (Y^m·∇)Z^k`
    Zy,
    /// `(Y^k·∇)Z^m + (Y^m·∇)Z^k`
    Literal,
}

#[derive(Deserialize, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BetaOf {
    /// `β_{w^k, m}`
    Wk,
    /// `β_{w^m, k}`
    Wm,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct BetaScript {
    pub of: BetaOf,
    /// three of `+`, `-`, `*` (either sign)
    pub signs: String,
    pub value: String,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct ItemScript {
    pub name: String,
    pub k: [String; 3],
    pub m: [String; 3],
    pub wk: [String; 3],
    pub wm: [String; 3],
    pub order: Order,
    #[serde(default)]
    pub alt_order: Option<Order>,
    pub expected: [String; 3],
    /// only the direction of the expected vector matters
    #[serde(default)]
    pub scalar_free: bool,
    #[serde(default)]
    pub betas: Vec<BetaScript>,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DetKind {
    /// `scale · det = value`
    Exact { value: String },
    /// `det = c · factor` with `c ≠ 0` independent of the lengths
    Factor { factor: String },
}

fn one() -> String {
    "1".into()
}

fn yes() -> bool {
    true
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct DetScript {
    /// item names, or `n` for the target index
    pub cols: [String; 3],
    #[serde(default = "one")]
    pub scale: String,
    #[serde(flatten)]
    pub kind: DetKind,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
pub struct IndepScript {
    pub set: Vec<String>,
    #[serde(default = "yes")]
    pub required: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Exact,
    Proportional { ratio: String },
    Mismatch,
    InvalidQuadruple { reason: String },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BetaOutcome {
    pub of: BetaOf,
    pub signs: String,
    pub computed: String,
    pub expected: String,
    pub passed: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ItemOutcome {
    pub name: String,
    pub order: Order,
    pub computed: [String; 3],
    pub expected: [String; 3],
    /// components that do not vanish identically at the target index
    pub compared: [bool; 3],
    #[serde(flatten)]
    pub verdict: Verdict,
    pub passed: bool,
    pub generic_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt: Option<(Order, Verdict)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub betas: Vec<BetaOutcome>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DetOutcome {
    pub cols: [String; 3],
    pub kind: String,
    /// scale times the determinant of the computed columns
    pub computed: String,
    /// the displayed value, or the factor for factor checks
    pub expected: String,
    /// scale times the determinant of the displayed columns
    pub from_display: String,
    pub display_consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display_ratio: Option<String>,
    pub passed: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct IndepOutcome {
    pub set: Vec<String>,
    pub required: bool,
    /// nonvanishing of `det(n | · | ·)` for some pair of the set
    pub literal: bool,
    /// the projections span every Z eigenfunction at the target index
    pub projected: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SampleOutcome {
    pub case: String,
    pub q: u32,
    pub vars: BTreeMap<String, i64>,
    pub lengths: [String; 3],
    pub target: Index3,
    pub items: Vec<ItemOutcome>,
    pub dets: Vec<DetOutcome>,
    pub independence: Vec<IndepOutcome>,
}

impl SampleOutcome {
    pub fn passed(&self) -> bool {
        self.items
            .iter()
            .all(|i| i.passed && i.betas.iter().all(|b| b.passed))
            && self.dets.iter().all(|d| d.passed)
            && self
                .independence
                .iter()
                .filter(|i| i.required)
                .all(|i| i.projected)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct Tally {
    pub total: usize,
    pub passed: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        if ok {
            self.passed += 1;
        }
    }

    pub fn all(&self) -> bool {
        self.total == self.passed
    }
}

/// One failing item or determinant, summarized over every sample where it
/// failed.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Finding {
    pub case: String,
    pub what: String,
    pub verdicts: BTreeMap<String, usize>,
    pub first: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StepReport {
    pub schema: String,
    pub step: String,
    pub alias: Option<String>,
    pub summary: String,
    pub note: Option<String>,
    pub qs: Vec<u32>,
    pub lengths: Vec<[String; 3]>,
    pub z_vectors: Tally,
    pub betas: Tally,
    pub determinants: Tally,
    pub display_consistent_determinants: Tally,
    pub required_independence: Tally,
    pub literal_independence: Tally,
    pub findings: Vec<Finding>,
    pub passed: bool,
    pub samples: Vec<SampleOutcome>,
}

const STEP_FILES: &[&str] = &[
    include_str!("../../steps/r3-edges.json"),
    include_str!("../../steps/r3-first-lines.json"),
    include_str!("../../steps/r3-interior.json"),
    include_str!("../../steps/r1-edges.json"),
    include_str!("../../steps/r1-first-lines.json"),
    include_str!("../../steps/r1-interior.json"),
    include_str!("../../steps/axis.json"),
    include_str!("../../steps/lines-23-31.json"),
    include_str!("../../steps/lines-12.json"),
    include_str!("../../steps/corner.json"),
];

/// Built-in scripts in argument order.
pub fn all_steps() -> Vec<StepScript> {
    STEP_FILES
        .iter()
        .map(|s| serde_json::from_str(s).expect("built-in step script"))
        .collect()
}

pub fn find_step(name: &str) -> Option<StepScript> {
    all_steps()
        .into_iter()
        .find(|s| s.id == name || s.alias.as_deref() == Some(name))
}

/// The five length triples used by default: unit, a triple on which one
/// displayed determinant vanishes at q = 4, and three generic ones.
pub fn default_lengths() -> Vec<DomainLengths> {
    [
        ["1", "1", "1"],
        ["1", "1", "17/2"],
        ["2/3", "5/7", "3/2"],
        ["3", "1/2", "2"],
        ["5/4", "7/3", "1/3"],
    ]
    .iter()
    .map(|t| DomainLengths::parse(t).unwrap())
    .collect()
}

fn vec3(s: &[String; 3], env: &Env) -> Result<[PiPoly; 3], String> {
    Ok([eval(&s[0], env)?, eval(&s[1], env)?, eval(&s[2], env)?])
}

fn qvec3(s: &[String; 3], env: &Env) -> Result<[Q; 3], String> {
    let mut out: [Q; 3] = Default::default();
    for i in 0..3 {
        out[i] = expr::eval_rational(&s[i], env)?;
    }
    Ok(out)
}

fn ivec3(s: &[String; 3], env: &Env) -> Result<Index3, String> {
    Ok([
        eval_index(&s[0], env)?,
        eval_index(&s[1], env)?,
        eval_index(&s[2], env)?,
    ])
}

/// Components of a Z-shape term that are not identically zero at `n`.
pub fn surviving(n: &Index3) -> [bool; 3] {
    [n[0] != 0 && n[2] != 0, n[1] != 0 && n[2] != 0, true]
}

fn z_at(terms: &[ShapeTerm], n: &Index3) -> [PiPoly; 3] {
    let mut z: [PiPoly; 3] = Default::default();
    for t in terms.iter().filter(|t| t.shape == Family::Z && t.k == *n) {
        for i in 0..3 {
            z[i] = &z[i] + &t.z[i];
        }
    }
    z
}

struct Datum {
    k: Index3,
    w: [Q; 3],
}

fn y_of(d: &Datum) -> TrigVectorField {
    y_field(d.k, &d.w)
}

fn z_of(d: &Datum) -> TrigVectorField {
    z_field(d.k, &d.w)
}

fn check_datum(d: &Datum, fam: Family, label: &str, lengths: &DomainLengths) -> Option<String> {
    let f = match fam {
        Family::Y => y_of(d),
        Family::Z => z_of(d),
    };
    let tag = match fam {
        Family::Y => "Y",
        Family::Z => "Z",
    };
    if f.is_zero() {
        return Some(format!(
            "{tag}{:?} with w^{label} = {} is the zero field",
            d.k,
            crate::eigen::fmt_w(&d.w)
        ));
    }
    if !divergence(&f, lengths).is_zero() {
        return Some(format!(
            "{tag}{:?} with w^{label} = {} is not divergence free",
            d.k,
            crate::eigen::fmt_w(&d.w)
        ));
    }
    None
}

fn combine(
    order: Order,
    kd: &Datum,
    md: &Datum,
    lengths: &DomainLengths,
) -> (Option<Vec<ShapeTerm>>, TrigVectorField) {
    match order {
        Order::Yz => (
            Some(yz_mix_closed_form(&kd.k, &kd.w, &md.k, &md.w, lengths)),
            raw_bracket(&y_of(kd), &z_of(md), lengths),
        ),
        Order::Zy => (
            Some(yz_mix_closed_form(&md.k, &md.w, &kd.k, &kd.w, lengths)),
            raw_bracket(&z_of(kd), &y_of(md), lengths),
        ),
        Order::Literal => {
            let f =
                advect(&y_of(kd), &z_of(md), lengths).add(&advect(&y_of(md), &z_of(kd), lengths));
            (None, f)
        }
    }
}

fn validity(order: Order, kd: &Datum, md: &Datum, lengths: &DomainLengths) -> Option<String> {
    let checks: Vec<(&Datum, Family, &str)> = match order {
        Order::Yz => vec![(kd, Family::Y, "k"), (md, Family::Z, "m")],
        Order::Zy => vec![(kd, Family::Z, "k"), (md, Family::Y, "m")],
        Order::Literal => vec![
            (kd, Family::Y, "k"),
            (md, Family::Z, "m"),
            (md, Family::Y, "m"),
            (kd, Family::Z, "k"),
        ],
    };
    let reasons: Vec<String> = checks
        .into_iter()
        .filter_map(|(d, f, l)| check_datum(d, f, l, lengths))
        .collect();
    if reasons.is_empty() {
        None
    } else {
        Some(reasons.join("; "))
    }
}

fn compare(
    computed: &[PiPoly; 3],
    expected: &[PiPoly; 3],
    mask: &[bool; 3],
    scalar_free: bool,
) -> (Verdict, bool) {
    let idx: Vec<usize> = (0..3).filter(|i| mask[*i]).collect();
    if idx.iter().all(|i| computed[*i] == expected[*i]) {
        return (Verdict::Exact, true);
    }
    let Some(&j) = idx.iter().find(|i| !expected[**i].is_zero()) else {
        return (Verdict::Mismatch, false);
    };
    let Some(r) = computed[j].div_monomial(&expected[j]) else {
        return (Verdict::Mismatch, false);
    };
    if r.is_zero() || idx.iter().any(|i| computed[*i] != &expected[*i] * &r) {
        return (Verdict::Mismatch, false);
    }
    (
        Verdict::Proportional {
            ratio: r.to_string(),
        },
        scalar_free,
    )
}

fn expand_signs(p: &str) -> Result<Vec<[i8; 3]>, String> {
    let cs: Vec<char> = p.chars().collect();
    if cs.len() != 3 {
        return Err(format!("sign pattern `{p}` must have three entries"));
    }
    let mut out = vec![[0i8; 3]];
    for (i, c) in cs.iter().enumerate() {
        let opts: Vec<i8> = match c {
            '+' => vec![1],
            '-' => vec![-1],
            '*' => vec![1, -1],
            _ => return Err(format!("bad sign `{c}` in `{p}`")),
        };
        out = out
            .into_iter()
            .flat_map(|s| {
                opts.iter().map(move |o| {
                    let mut t = s;
                    t[i] = *o;
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

fn sign_str(s: &[i8; 3]) -> String {
    s.iter().map(|x| if *x > 0 { '+' } else { '-' }).collect()
}

fn z_rational(z: &[PiPoly; 3]) -> [Q; 3] {
    let pi = PiPoly::pi();
    let mut out: [Q; 3] = Default::default();
    for i in 0..3 {
        out[i] = z[i]
            .div_monomial(&pi)
            .and_then(|p| p.as_rational())
            .unwrap_or_else(|| {
                // not of the form π·rational; fall back to the leading coefficient
                z[i].terms()
                    .last()
                    .map(|t| t.1.clone())
                    .unwrap_or_else(Q::zero)
            });
    }
    out
}

fn pidet(a: &[PiPoly; 3], b: &[PiPoly; 3], c: &[PiPoly; 3]) -> PiPoly {
    det3(a, b, c)
}

/// Evaluates one case at one parameter point.
pub fn replay_case(
    case: &CaseScript,
    q: u32,
    vars: &BTreeMap<String, i64>,
    lengths: &DomainLengths,
) -> Result<SampleOutcome, String> {
    let mut env = Env::new(lengths).with("q", q as i64);
    for (k, v) in vars {
        env.set(k, *v);
    }
    let n = ivec3(&case.target, &env)?;
    let mask = surviving(&n);
    let mut items = Vec::new();
    let mut zc: BTreeMap<String, [PiPoly; 3]> = BTreeMap::new();
    let mut ze: BTreeMap<String, [PiPoly; 3]> = BTreeMap::new();
    for it in &case.items {
        let kd = Datum {
            k: ivec3(&it.k, &env)?,
            w: qvec3(&it.wk, &env)?,
        };
        let md = Datum {
            k: ivec3(&it.m, &env)?,
            w: qvec3(&it.wm, &env)?,
        };
        let expected = vec3(&it.expected, &env)?;
        let (closed, raw) = combine(it.order, &kd, &md, lengths);
        let generic = decompose(&raw).map(|t| z_at(&t, &n));
        let computed = match &closed {
            Some(t) => z_at(t, &n),
            None => generic
                .clone()
                .ok_or("generic bracket has terms of neither shape")?,
        };
        let generic_agrees = generic
            .as_ref()
            .is_some_and(|g| (0..3).all(|i| !mask[i] || g[i] == computed[i]));
        let (mut verdict, mut passed) = compare(&computed, &expected, &mask, it.scalar_free);
        if let Some(reason) = validity(it.order, &kd, &md, lengths) {
            verdict = Verdict::InvalidQuadruple { reason };
            passed = false;
        }
        let alt = it.alt_order.map(|o| {
            let (c, r) = combine(o, &kd, &md, lengths);
            let z = match c {
                Some(t) => z_at(&t, &n),
                None => decompose(&r).map(|t| z_at(&t, &n)).unwrap_or_default(),
            };
            (o, compare(&z, &expected, &mask, it.scalar_free).0)
        });
        let mut betas = Vec::new();
        for b in &it.betas {
            let want = eval(&b.value, &env)?;
            for s in expand_signs(&b.signs)? {
                let got = match b.of {
                    BetaOf::Wk => crate::bracket::beta(&kd.w, &md.k, s, lengths),
                    BetaOf::Wm => crate::bracket::beta(&md.w, &kd.k, s, lengths),
                };
                betas.push(BetaOutcome {
                    of: b.of,
                    signs: sign_str(&s),
                    passed: got == want,
                    computed: got.to_string(),
                    expected: want.to_string(),
                });
            }
        }
        items.push(ItemOutcome {
            name: it.name.clone(),
            order: it.order,
            computed: [
                computed[0].to_string(),
                computed[1].to_string(),
                computed[2].to_string(),
            ],
            expected: [
                expected[0].to_string(),
                expected[1].to_string(),
                expected[2].to_string(),
            ],
            compared: mask,
            verdict,
            passed,
            generic_agrees,
            alt,
            betas,
        });
        zc.insert(it.name.clone(), computed);
        ze.insert(it.name.clone(), expected);
    }
    let nq: [PiPoly; 3] = n.map(|x| PiPoly::rational(Q::from_integer(x.into())));
    let col = |name: &str, m: &BTreeMap<String, [PiPoly; 3]>| -> Result<[PiPoly; 3], String> {
        if name == "n" {
            Ok(nq.clone())
        } else {
            m.get(name)
                .cloned()
                .ok_or_else(|| format!("unknown column `{name}`"))
        }
    };
    let mut dets = Vec::new();
    for d in &case.dets {
        let scale = eval(&d.scale, &env)?;
        let dc = &scale
            * &pidet(
                &col(&d.cols[0], &zc)?,
                &col(&d.cols[1], &zc)?,
                &col(&d.cols[2], &zc)?,
            );
        let dd = &scale
            * &pidet(
                &col(&d.cols[0], &ze)?,
                &col(&d.cols[1], &ze)?,
                &col(&d.cols[2], &ze)?,
            );
        let out = match &d.kind {
            DetKind::Exact { value } => {
                let v = eval(value, &env)?;
                DetOutcome {
                    cols: d.cols.clone(),
                    kind: "exact".into(),
                    passed: dc == v,
                    display_consistent: dd == v,
                    computed: dc.to_string(),
                    expected: v.to_string(),
                    from_display: dd.to_string(),
                    ratio: None,
                    display_ratio: None,
                }
            }
            DetKind::Factor { factor } => {
                let f = eval(factor, &env)?;
                let ratio = if f.is_zero() {
                    None
                } else {
                    dc.div_monomial(&f)
                };
                let dratio = if f.is_zero() {
                    None
                } else {
                    dd.div_monomial(&f)
                };
                // settled across length samples in `replay`
                let ok = match &ratio {
                    Some(r) => !r.is_zero(),
                    None => f.is_zero() && dc.is_zero(),
                };
                let dok = match &dratio {
                    Some(r) => !r.is_zero(),
                    None => f.is_zero() && dd.is_zero(),
                };
                DetOutcome {
                    cols: d.cols.clone(),
                    kind: "factor".into(),
                    passed: ok,
                    display_consistent: dok,
                    computed: dc.to_string(),
                    expected: f.to_string(),
                    from_display: dd.to_string(),
                    ratio: ratio.map(|r| r.to_string()),
                    display_ratio: dratio.map(|r| r.to_string()),
                }
            }
        };
        dets.push(out);
    }
    let mut independence = Vec::new();
    for s in &case.independence {
        let zs: Vec<[Q; 3]> = s
            .set
            .iter()
            .map(|name| {
                zc.get(name)
                    .map(z_rational)
                    .ok_or_else(|| format!("unknown item `{name}`"))
            })
            .collect::<Result<_, _>>()?;
        let literal = match zs.len() {
            1 => (0..3).any(|i| mask[i] && !zs[0][i].is_zero()),
            _ => {
                let mut any = false;
                for a in 0..zs.len() {
                    for b in a + 1..zs.len() {
                        any |= !index_det(&zs[a], &zs[b], &n).is_zero();
                    }
                }
                any
            }
        };
        let full = z_local_dim(&n);
        let projected = full > 0 && projected_rank(&zs, &n, lengths) == full;
        independence.push(IndepOutcome {
            set: s.set.clone(),
            required: s.required,
            literal,
            projected,
        });
    }
    Ok(SampleOutcome {
        case: case.name.clone(),
        q,
        vars: vars.clone(),
        lengths: lengths.to_strings(),
        target: n,
        items,
        dets,
        independence,
    })
}

/// Every parameter point of a case for one q.
pub fn case_points(case: &CaseScript, q: u32) -> Result<Vec<BTreeMap<String, i64>>, String> {
    let mut pts: Vec<BTreeMap<String, i64>> = vec![BTreeMap::new()];
    for v in &case.vars {
        let mut next = Vec::new();
        for p in &pts {
            let mut env = Env::default().with("q", q as i64);
            for (k, x) in p {
                env.set(k, *x);
            }
            let lo = expr::eval_rational(&v.from, &env)?.to_integer();
            let hi = expr::eval_rational(&v.to, &env)?.to_integer();
            let (lo, hi): (i64, i64) = (
                lo.try_into().map_err(|_| "range")?,
                hi.try_into().map_err(|_| "range")?,
            );
            for x in lo..=hi {
                let mut np = p.clone();
                np.insert(v.name.clone(), x);
                next.push(np);
            }
        }
        pts = next;
    }
    Ok(pts)
}

fn describe_vars(v: &BTreeMap<String, i64>) -> String {
    v.iter()
        .map(|(k, x)| format!("{k}={x}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn verdict_key(v: &Verdict) -> String {
    match v {
        Verdict::Exact => "exact".into(),
        Verdict::Proportional { .. } => "proportional".into(),
        Verdict::Mismatch => "mismatch".into(),
        Verdict::InvalidQuadruple { .. } => "invalid_quadruple".into(),
    }
}

/// Replays a step over `qs` and the given length triples.
pub fn replay(
    step: &StepScript,
    qs: &[u32],
    lengths: &[DomainLengths],
) -> Result<StepReport, String> {
    let mut jobs = Vec::new();
    for case in &step.cases {
        for &q in qs {
            for vars in case_points(case, q)? {
                for l in lengths {
                    jobs.push((case, q, vars.clone(), l));
                }
            }
        }
    }
    let mut samples: Vec<SampleOutcome> = jobs
        .par_iter()
        .map(|(c, q, v, l)| replay_case(c, *q, v, l))
        .collect::<Result<_, _>>()?;

    // factor checks: the ratio must not depend on the lengths
    let mut groups: BTreeMap<
        (String, u32, String, usize),
        Vec<(usize, Option<String>, Option<String>)>,
    > = BTreeMap::new();
    for (si, s) in samples.iter().enumerate() {
        for (di, d) in s.dets.iter().enumerate() {
            if d.kind == "factor" {
                groups
                    .entry((s.case.clone(), s.q, describe_vars(&s.vars), di))
                    .or_default()
                    .push((si, d.ratio.clone(), d.display_ratio.clone()));
            }
        }
    }
    for ((_, _, _, di), members) in groups {
        let constant = |rs: Vec<&String>| rs.windows(2).all(|w| w[0] == w[1]);
        let same = constant(members.iter().filter_map(|m| m.1.as_ref()).collect());
        let dsame = constant(members.iter().filter_map(|m| m.2.as_ref()).collect());
        for (si, _, _) in &members {
            let d = &mut samples[*si].dets[di];
            d.passed &= same;
            d.display_consistent &= dsame;
        }
    }

    let mut rep = StepReport {
        schema: "step-report/1".into(),
        step: step.id.clone(),
        alias: step.alias.clone(),
        summary: step.summary.clone(),
        note: step.note.clone(),
        qs: qs.to_vec(),
        lengths: lengths.iter().map(|l| l.to_strings()).collect(),
        z_vectors: Tally::default(),
        betas: Tally::default(),
        determinants: Tally::default(),
        display_consistent_determinants: Tally::default(),
        required_independence: Tally::default(),
        literal_independence: Tally::default(),
        findings: Vec::new(),
        passed: true,
        samples: Vec::new(),
    };
    let mut findings: BTreeMap<(String, String), Finding> = BTreeMap::new();
    let mut note = |case: &str, what: String, key: String, detail: String| {
        let f = findings
            .entry((case.to_string(), what.clone()))
            .or_insert_with(|| Finding {
                case: case.to_string(),
                what,
                verdicts: BTreeMap::new(),
                first: detail,
            });
        *f.verdicts.entry(key).or_default() += 1;
    };
    for s in &samples {
        let at = format!(
            "q={} {} L=({})",
            s.q,
            describe_vars(&s.vars),
            s.lengths.join(",")
        );
        for it in &s.items {
            rep.z_vectors.add(it.passed);
            if !it.passed {
                let detail = match &it.verdict {
                    Verdict::InvalidQuadruple { reason } => format!("{at}: {reason}"),
                    _ => format!(
                        "{at}: computed [{}] expected [{}]",
                        it.computed.join(", "),
                        it.expected.join(", ")
                    ),
                };
                note(
                    &s.case,
                    format!("z {}", it.name),
                    verdict_key(&it.verdict),
                    detail,
                );
            } else if let Verdict::Proportional { ratio } = &it.verdict {
                note(
                    &s.case,
                    format!("z {} (direction only)", it.name),
                    "proportional".into(),
                    format!("{at}: ratio {ratio}"),
                );
            }
            for b in &it.betas {
                rep.betas.add(b.passed);
                if !b.passed {
                    note(
                        &s.case,
                        format!("beta {} {:?}^{}", it.name, b.of, b.signs),
                        "mismatch".into(),
                        format!("{at}: computed {} expected {}", b.computed, b.expected),
                    );
                }
            }
        }
        for d in &s.dets {
            rep.determinants.add(d.passed);
            rep.display_consistent_determinants
                .add(d.display_consistent);
            if !d.passed {
                note(
                    &s.case,
                    format!("det({})", d.cols.join("|")),
                    "mismatch".into(),
                    format!(
                        "{at}: computed {} expected {} ({})",
                        d.computed, d.expected, d.kind
                    ),
                );
            }
        }
        for i in &s.independence {
            if i.required {
                rep.required_independence.add(i.projected);
                rep.literal_independence.add(i.literal);
                if !i.projected {
                    note(
                        &s.case,
                        format!("independence {{{}}}", i.set.join(",")),
                        "dependent".into(),
                        at.clone(),
                    );
                }
            }
        }
    }
    rep.findings = findings.into_values().collect();
    rep.passed = samples.iter().all(|s| s.passed());
    samples.sort_by(|a, b| {
        (&a.case, a.q, describe_vars(&a.vars)).cmp(&(&b.case, b.q, describe_vars(&b.vars)))
    });
    rep.samples = samples;
    Ok(rep)
}

/// One CSV row of a determinant scan.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScanRow {
    pub step: String,
    pub case: String,
    pub q: u32,
    pub vars: String,
    pub l1: String,
    pub l2: String,
    pub l3: String,
    pub dets: String,
    pub all_dets_vanish: bool,
    pub literal_verdict: bool,
    pub projected_verdict: bool,
}

/// Determinant values and independence verdicts per sample.
pub fn scan_determinants(
    step: &StepScript,
    qs: &[u32],
    lengths: &[DomainLengths],
) -> Result<Vec<ScanRow>, String> {
    let rep = replay(step, qs, lengths)?;
    Ok(rep
        .samples
        .iter()
        .filter(|s| !s.dets.is_empty() || !s.independence.is_empty())
        .map(|s| {
            let req: Vec<&IndepOutcome> = s.independence.iter().filter(|i| i.required).collect();
            ScanRow {
                step: step.id.clone(),
                case: s.case.clone(),
                q: s.q,
                vars: describe_vars(&s.vars),
                l1: s.lengths[0].clone(),
                l2: s.lengths[1].clone(),
                l3: s.lengths[2].clone(),
                dets: s
                    .dets
                    .iter()
                    .map(|d| format!("det({})={}", d.cols.join("|"), d.computed))
                    .collect::<Vec<_>>()
                    .join("; "),
                all_dets_vanish: !s.dets.is_empty() && s.dets.iter().all(|d| d.computed == "0"),
                literal_verdict: req.iter().all(|i| i.literal),
                projected_verdict: req.iter().all(|i| i.projected),
            }
        })
        .collect())
}

pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], w: W) -> Result<(), String> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| e.to_string())?;
    }
    wr.flush().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn case(step: &str, name: &str) -> CaseScript {
        let st = find_step(step).unwrap();
        st.cases.into_iter().find(|c| c.name == name).unwrap()
    }

    #[test]
    fn lookup_by_id_or_alias() {
        assert_eq!(all_steps().len(), 10);
        assert_eq!(find_step("3.3.2").unwrap().id, "r3-first-lines");
        assert_eq!(find_step("axis").unwrap().id, "axis");
        assert!(find_step("nope").is_none());
    }

    // q² = (L2L3 + L1L3 − L1L2)/(L1L2) at q = 4 kills det(n|α|γ) and the
    // third bracket restores the literal test. The projection removes the
    // gradient direction, not n, so the projected pair stays independent.
    #[test]
    fn degenerate_lengths_need_the_third_bracket() {
        let l = DomainLengths::new(frac(1, 1), frac(1, 1), frac(17, 2)).unwrap();
        let s = replay_case(&case("3.3.2", "(1,1,q+1)"), 4, &BTreeMap::new(), &l).unwrap();
        let ag = s.dets.iter().find(|d| d.cols[1] == "alpha" && d.cols[2] == "gamma").unwrap();
        assert_eq!(ag.computed, "0");
        assert!(ag.passed);
        let pair = s.independence.iter().find(|i| i.set.len() == 2).unwrap();
        assert!(!pair.literal);
        assert!(pair.projected);
        let triple = s.independence.iter().find(|i| i.set.len() == 3).unwrap();
        assert!(triple.required && triple.projected && triple.literal);
    }

    #[test]
    fn first_line_case_reproduces() {
        let c = case("r3-first-lines", "(1,1,q+1)");
        for q in 4..=6 {
            for l in default_lengths() {
                let s = replay_case(&c, q, &BTreeMap::new(), &l).unwrap();
                assert!(s.items.iter().all(|i| i.passed && i.generic_agrees), "q={q} L={l}");
                assert!(s.dets.iter().all(|d| d.passed), "q={q} L={l}");
            }
        }
    }

    #[test]
    fn both_readings_of_the_third_quadruple_are_reported() {
        let s = replay_case(&case("3.3.2", "(1,1,q+1)"), 4, &BTreeMap::new(), &DomainLengths::unit()).unwrap();
        let delta = s.items.iter().find(|i| i.name == "delta").unwrap();
        assert!(delta.alt.is_some());
    }

    #[test]
    fn interior_delta_is_off_by_a_scalar() {
        let vars = BTreeMap::from([("n1".to_string(), 2), ("n2".to_string(), 3)]);
        let s = replay_case(&case("r3-interior", "(n1,n2,q+1)"), 5, &vars, &DomainLengths::unit()).unwrap();
        let delta = s.items.iter().find(|i| i.name == "delta").unwrap();
        assert!(matches!(delta.verdict, Verdict::Proportional { .. }));
        assert!(!delta.passed);
    }

    #[test]
    fn report_shape_and_determinism() {
        let st = find_step("lines-23-31").unwrap();
        let ls = default_lengths();
        let a = replay(&st, &[4, 5], &ls).unwrap();
        let b = replay(&st, &[4, 5], &ls).unwrap();
        assert!(a.passed);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
