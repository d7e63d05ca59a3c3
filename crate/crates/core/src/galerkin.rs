//! Galerkin truncation of the controlled Navier–Stokes system
//! `u' + Au + B(u,u) + h = η` on the eigenfunctions with entries ≤ cap,
//! fixed-step RK4 integration, and a Levenberg–Marquardt steering loop over
//! piecewise-constant controls valued in a bracket-generated subspace.

use crate::eigen::{enumerate_set, EigenId, SetSpec};
use crate::pipoly::PiPoly;
use crate::projector::{project_indexed, ProjectError, Universe};
use crate::rational::{to_f64, Q};
use crate::span::{ChainEngine, OverflowPolicy, SpanError};
use crate::trig::{advect, DomainLengths};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum GalerkinError {
    #[error("config: {0}")]
    Config(String),
    #[error("state became non-finite at step {step}")]
    BlowUp { step: usize },
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Span(#[from] SpanError),
}

/// One nonzero `T[a][b][c] = ⟨(e_a·∇)e_b, e_c⟩ / ⟨e_c, e_c⟩`.
#[derive(Clone, Copy, Debug)]
pub struct TensorEntry {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub value: f64,
}

pub struct GalerkinSystem {
    pub universe: Arc<Universe>,
    pub nu: f64,
    /// `λ_e = ν π² Σ (k_i/L_i)²`
    pub lambda: Vec<f64>,
    /// `⟨e, e⟩`
    pub norm2: Vec<f64>,
    pub tensor: Vec<TensorEntry>,
    pub forcing: Vec<f64>,
    /// pairs `(b, c)` at which the exact tensor failed antisymmetry
    pub antisymmetry_violations: usize,
    pub nonlinear: bool,
}

fn exact_tensor(uni: &Universe) -> Result<Vec<Vec<(usize, PiPoly)>>, ProjectError> {
    let ext = Universe::new(2 * uni.cap, &uni.lengths);
    let back: Vec<Option<usize>> = ext.ids().iter().map(|id| uni.position(id)).collect();
    let n = uni.len();
    (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            let f = advect(&uni.get(a).field, &uni.get(b).field, &uni.lengths);
            Ok(project_indexed(&f, &ext)?
                .into_iter()
                .filter_map(|(i, v)| back[i].map(|c| (c, v)))
                .filter(|(_, v)| !v.is_zero())
                .collect())
        })
        .collect()
}

/// Assembles the truncated system on the eigenfunctions with entries ≤ cap.
pub fn assemble(
    cap: u32,
    nu: f64,
    lengths: &DomainLengths,
    forcing: &[(EigenId, f64)],
) -> Result<GalerkinSystem, GalerkinError> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(GalerkinError::Config(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    let uni = Arc::new(Universe::new(cap, lengths));
    let n = uni.len();
    let rows = exact_tensor(&uni)?;
    let norm2q: Vec<Q> = (0..n).map(|i| uni.get(i).norm2.clone()).collect();

    let lookup: HashMap<(usize, usize, usize), &PiPoly> = rows
        .iter()
        .enumerate()
        .flat_map(|(ab, r)| r.iter().map(move |(c, v)| ((ab / n, ab % n, *c), v)))
        .collect();
    let zero = PiPoly::zero();
    let mut violations = 0;
    for (&(a, b, c), v) in &lookup {
        let w = lookup.get(&(a, c, b)).copied().unwrap_or(&zero);
        if v.scale(&norm2q[c]) != -(w.scale(&norm2q[b])) {
            violations += 1;
        }
    }

    let tensor = lookup
        .iter()
        .map(|(&(a, b, c), v)| TensorEntry {
            a: a as u32,
            b: b as u32,
            c: c as u32,
            value: v.to_f64(),
        })
        .collect::<Vec<_>>();
    let mut tensor = tensor;
    tensor.sort_by_key(|t| (t.c, t.a, t.b));

    let mut h = vec![0.0; n];
    for (id, x) in forcing {
        let i = uni.position(id).ok_or_else(|| {
            GalerkinError::Config(format!("forcing mode {id} is outside the cap"))
        })?;
        h[i] += x;
    }
    Ok(GalerkinSystem {
        lambda: (0..n).map(|i| uni.get(i).eigenvalue(nu)).collect(),
        norm2: norm2q.iter().map(to_f64).collect(),
        universe: uni,
        nu,
        tensor,
        forcing: h,
        antisymmetry_violations: violations,
        nonlinear: true,
    })
}

impl GalerkinSystem {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Coordinates of `Π(u·∇)u`.
    pub fn nonlinearity(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for t in &self.tensor {
            out[t.c as usize] += t.value * u[t.a as usize] * u[t.b as usize];
        }
        out
    }

    /// `-Au - B(u,u) - h + η`
    pub fn rhs(&self, u: &[f64], eta: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.dim())
            .map(|i| -self.lambda[i] * u[i] - self.forcing[i] + eta[i])
            .collect();
        if self.nonlinear {
            for (o, b) in out.iter_mut().zip(self.nonlinearity(u)) {
                *o -= b;
            }
        }
        out
    }

    /// `‖u‖²_{L2}`
    pub fn l2_sq(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.norm2).map(|(x, n)| x * x * n).sum()
    }

    /// `‖curl u‖_{L2}`
    pub fn v_norm(&self, u: &[f64]) -> f64 {
        self.v_weights()
            .iter()
            .zip(u)
            .map(|(w, x)| w * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨curl e, curl e⟩ = (λ_e/ν) ⟨e, e⟩`
    pub fn v_weights(&self) -> Vec<f64> {
        self.lambda
            .iter()
            .zip(&self.norm2)
            .map(|(l, n)| l / self.nu * n)
            .collect()
    }

    pub fn coords(&self, entries: &[(EigenId, f64)]) -> Result<Vec<f64>, GalerkinError> {
        let mut u = vec![0.0; self.dim()];
        for (id, x) in entries {
            let i = self
                .universe
                .position(id)
                .ok_or_else(|| GalerkinError::Config(format!("mode {id} is outside the cap")))?;
            u[i] += x;
        }
        Ok(u)
    }
}

/// Piecewise-constant control: on interval `i` of a uniform grid over
/// `[0, horizon]`, `η = Σ_j coeffs[i][j] basis[j]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControlParam {
    pub horizon: f64,
    pub coeffs: Vec<Vec<f64>>,
    /// basis directions in universe coordinates
    pub basis: Vec<Vec<f64>>,
}

impl ControlParam {
    pub fn zero(horizon: f64, intervals: usize, basis: Vec<Vec<f64>>) -> Self {
        let m = basis.len();
        ControlParam {
            horizon,
            coeffs: vec![vec![0.0; m]; intervals],
            basis,
        }
    }

    pub fn intervals(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value_on(&self, interval: usize, dim: usize) -> Vec<f64> {
        let mut eta = vec![0.0; dim];
        for (c, g) in self.coeffs[interval].iter().zip(&self.basis) {
            if *c != 0.0 {
                for (e, x) in eta.iter_mut().zip(g) {
                    *e += c * x;
                }
            }
        }
        eta
    }

    /// Same control on a grid twice as fine.
    pub fn refined(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .flat_map(|c| [c.clone(), c.clone()])
            .collect();
        ControlParam {
            horizon: self.horizon,
            coeffs,
            basis: self.basis.clone(),
        }
    }

    fn flat(&self) -> Vec<f64> {
        self.coeffs.concat()
    }

    fn with_flat(&self, x: &[f64]) -> Self {
        let m = self.basis.len();
        ControlParam {
            horizon: self.horizon,
            coeffs: x.chunks(m.max(1)).map(|c| c.to_vec()).collect(),
            basis: self.basis.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `½‖u‖²_{L2}`
    pub energy: Vec<f64>,
    pub v_norm: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// CSV with columns t, energy, v_norm, distance (to `target` in V).
    pub fn write_csv<W: std::io::Write>(
        &self,
        sys: &GalerkinSystem,
        target: &[f64],
        w: W,
    ) -> Result<(), String> {
        #[derive(Serialize)]
        struct Row {
            t: f64,
            energy: f64,
            v_norm: f64,
            distance: f64,
        }
        let mut wr = csv::Writer::from_writer(w);
        for i in 0..self.t.len() {
            let d: Vec<f64> = self.states[i]
                .iter()
                .zip(target)
                .map(|(a, b)| a - b)
                .collect();
            wr.serialize(Row {
                t: self.t[i],
                energy: self.energy[i],
                v_norm: self.v_norm[i],
                distance: sys.v_norm(&d),
            })
            .map_err(|e| e.to_string())?;
        }
        wr.flush().map_err(|e| e.to_string())
    }
}

fn steps_for(horizon: f64, dt: f64, intervals: usize) -> Result<usize, GalerkinError> {
    if !(dt > 0.0 && horizon >= 0.0) {
        return Err(GalerkinError::Config(format!(
            "need dt > 0 and T ≥ 0 (dt = {dt}, T = {horizon})"
        )));
    }
    let n = (horizon / dt).round();
    if (n * dt - horizon).abs() > 1e-9 * horizon.max(1.0) {
        return Err(GalerkinError::Config(format!(
            "T = {horizon} is not a multiple of dt = {dt}"
        )));
    }
    let n = n as usize;
    if intervals > 0 && n % intervals != 0 {
        return Err(GalerkinError::Config(format!(
            "{n} steps do not split into {intervals} control intervals"
        )));
    }
    Ok(n)
}

fn rk4_step(sys: &GalerkinSystem, u: &[f64], eta: &[f64], dt: f64) -> Vec<f64> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * y).collect()
    };
    let k1 = sys.rhs(u, eta);
    let k2 = sys.rhs(&axpy(u, dt / 2.0, &k1), eta);
    let k3 = sys.rhs(&axpy(u, dt / 2.0, &k2), eta);
    let k4 = sys.rhs(&axpy(u, dt, &k3), eta);
    (0..u.len())
        .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Final state only.
pub fn integrate_final(
    sys: &GalerkinSystem,
    u0: &[f64],
    eta: Option<&ControlParam>,
    horizon: f64,
    dt: f64,
) -> Result<Vec<f64>, GalerkinError> {
    let iv = eta.map(|c| c.intervals()).unwrap_or(1);
    let n = steps_for(horizon, dt, iv)?;
    let per = if n == 0 { 1 } else { n / iv };
    let zero = vec![0.0; sys.dim()];
    let mut u = u0.to_vec();
    let mut cur = usize::MAX;
    let mut e = zero.clone();
    for s in 0..n {
        if let Some(c) = eta {
            if s / per != cur {
                cur = s / per;
                e = c.value_on(cur, sys.dim());
            }
        }
        u = rk4_step(sys, &u, &e, dt);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(GalerkinError::BlowUp { step: s + 1 });
        }
    }
    Ok(u)
}

/// RK4 with diagnostics at every step.
pub fn integrate(
    sys: &GalerkinSystem,
    u0: &[f64],
    eta: Option<&ControlParam>,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory, GalerkinError> {
    let iv = eta.map(|c| c.intervals()).unwrap_or(1);
    let n = steps_for(horizon, dt, iv)?;
    let per = if n == 0 { 1 } else { n / iv };
    let mut tr = Trajectory {
        t: vec![0.0],
        states: vec![u0.to_vec()],
        energy: vec![0.5 * sys.l2_sq(u0)],
        v_norm: vec![sys.v_norm(u0)],
    };
    let zero = vec![0.0; sys.dim()];
    let mut u = u0.to_vec();
    for s in 0..n {
        let e = match eta {
            Some(c) => c.value_on(s / per, sys.dim()),
            None => zero.clone(),
        };
        u = rk4_step(sys, &u, &e, dt);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(GalerkinError::BlowUp { step: s + 1 });
        }
        tr.t.push((s + 1) as f64 * dt);
        tr.energy.push(0.5 * sys.l2_sq(&u));
        tr.v_norm.push(sys.v_norm(&u));
        tr.states.push(u.clone());
    }
    Ok(tr)
}

/// Basis of the first bracket level of `seed` inside the system's universe,
/// as dense coordinate vectors. Seed modes above the cap are dropped and
/// brackets leaving the cap are discarded.
pub fn control_basis(
    sys: &GalerkinSystem,
    seed: &SetSpec,
) -> Result<(Vec<Vec<f64>>, Vec<EigenId>), GalerkinError> {
    let uni = &sys.universe;
    let ids: Vec<EigenId> = enumerate_set(seed)
        .into_iter()
        .filter(|i| uni.position(i).is_some())
        .collect();
    if ids.is_empty() {
        return Err(GalerkinError::Config(format!(
            "no mode of `{}` lies within the cap",
            seed.label()
        )));
    }
    let mut eng = ChainEngine::new(ids, uni.cap, OverflowPolicy::Discard, &uni.lengths)?;
    let g0 = eng.seed()?;
    let mut g1 = if g0.is_full() { g0 } else { eng.fl_step(&g0)? };
    let basis: Vec<Vec<f64>> = g1
        .reduced_basis()
        .iter()
        .map(|v| {
            let mut d = vec![0.0; sys.dim()];
            for (i, x) in v {
                d[*i] = to_f64(x);
            }
            d
        })
        .collect();
    let mut support: Vec<EigenId> = (0..sys.dim())
        .filter(|i| basis.iter().any(|g| g[*i] != 0.0))
        .map(|i| uni.ids()[i])
        .collect();
    support.sort();
    Ok((basis, support))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// LM iterations per grid level
    pub max_iters: usize,
    /// number of grid doublings after the first level
    pub refinements: usize,
    /// stop once the V-distance falls below this
    pub tolerance: f64,
    /// relative size of the random initial control; 0 starts from zero
    pub init_jitter: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 25,
            refinements: 1,
            tolerance: 1e-9,
            init_jitter: 0.0,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub intervals: usize,
    pub iterations: usize,
    pub distance: f64,
    pub stagnated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SteerOutcome {
    pub distance: f64,
    /// V-distance with zero control
    pub baseline: f64,
    pub ratio: f64,
    pub levels: Vec<LevelOutcome>,
    pub evaluations: usize,
    pub stagnated: bool,
    pub control: ControlParam,
    pub seconds: f64,
}

struct Problem<'a> {
    sys: &'a GalerkinSystem,
    u0: &'a [f64],
    target: &'a [f64],
    sqrt_w: Vec<f64>,
    horizon: f64,
    dt: f64,
}

impl Problem<'_> {
    fn residual(&self, c: &ControlParam) -> Result<DVector<f64>, GalerkinError> {
        let u = integrate_final(self.sys, self.u0, Some(c), self.horizon, self.dt)?;
        Ok(DVector::from_iterator(
            u.len(),
            (0..u.len()).map(|i| self.sqrt_w[i] * (u[i] - self.target[i])),
        ))
    }
}

fn lm_level(
    p: &Problem,
    start: ControlParam,
    cfg: &OptimizerConfig,
    evals: &mut usize,
) -> Result<(ControlParam, LevelOutcome), GalerkinError> {
    let mut x = DVector::from_vec(start.flat());
    let mut ctl = start;
    let mut r = p.residual(&ctl)?;
    *evals += 1;
    let mut cost = r.norm();
    let mut mu = -1.0;
    let mut iters = 0;
    let mut stagnated = false;
    while iters < cfg.max_iters && cost > cfg.tolerance {
        iters += 1;
        let cols: Vec<Result<DVector<f64>, GalerkinError>> = (0..x.len())
            .into_par_iter()
            .map(|j| {
                let h = 1e-6 * x[j].abs().max(1.0);
                let mut xp = x.clone();
                xp[j] += h;
                Ok((p.residual(&ctl.with_flat(xp.as_slice()))? - &r) / h)
            })
            .collect();
        *evals += x.len();
        let cols = cols.into_iter().collect::<Result<Vec<_>, _>>()?;
        let jac = DMatrix::from_columns(&cols);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        if mu < 0.0 {
            mu = 1e-3 * jtj.diagonal().max().max(1e-12);
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu;
            }
            let Some(ch) = a.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = ch.solve(&(-&g));
            let xn = &x + step;
            let cn = ctl.with_flat(xn.as_slice());
            let trial = match p.residual(&cn) {
                Ok(v) => v,
                Err(GalerkinError::BlowUp { .. }) => {
                    mu *= 4.0;
                    continue;
                }
                Err(e) => return Err(e),
            };
            *evals += 1;
            if trial.norm() < cost {
                improved = trial.norm() < cost * (1.0 - 1e-12);
                x = xn;
                ctl = cn;
                r = trial;
                cost = r.norm();
                mu = (mu / 3.0).max(1e-15);
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            stagnated = true;
            break;
        }
    }
    let out = LevelOutcome {
        intervals: ctl.intervals(),
        iterations: iters,
        distance: cost,
        stagnated,
    };
    Ok((ctl, out))
}

/// Minimizes `‖u(T) - target‖_V` over piecewise-constant controls in the
/// span of `basis`, starting on `intervals` pieces and doubling the grid
/// `cfg.refinements` times, each level warm-started from the previous one.
pub fn steer(
    sys: &GalerkinSystem,
    u0: &[f64],
    target: &[f64],
    horizon: f64,
    dt: f64,
    basis: Vec<Vec<f64>>,
    intervals: usize,
    cfg: &OptimizerConfig,
) -> Result<SteerOutcome, GalerkinError> {
    let t0 = Instant::now();
    if intervals == 0 {
        return Err(GalerkinError::Config(
            "need at least one control interval".into(),
        ));
    }
    steps_for(horizon, dt, intervals << cfg.refinements)?;
    let p = Problem {
        sys,
        u0,
        target,
        sqrt_w: sys.v_weights().iter().map(|w| w.sqrt()).collect(),
        horizon,
        dt,
    };
    let mut ctl = ControlParam::zero(horizon, intervals, basis);
    let baseline = p.residual(&ctl)?.norm();
    let mut evals = 1;
    if cfg.init_jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for row in ctl.coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = cfg.init_jitter * rng.random_range(-1.0..1.0);
            }
        }
    }
    let mut levels = Vec::new();
    for level in 0..=cfg.refinements {
        if level > 0 {
            ctl = ctl.refined();
        }
        let (c, out) = lm_level(&p, ctl, cfg, &mut evals)?;
        ctl = c;
        levels.push(out);
    }
    let last = levels.last().unwrap();
    Ok(SteerOutcome {
        distance: last.distance,
        baseline,
        ratio: if baseline > 0.0 {
            last.distance / baseline
        } else {
            0.0
        },
        stagnated: last.stagnated && last.distance > cfg.tolerance,
        levels,
        evaluations: evals,
        control: ctl,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeValue {
    pub id: String,
    pub value: f64,
}

fn parse_modes(v: &[ModeValue]) -> Result<Vec<(EigenId, f64)>, GalerkinError> {
    v.iter()
        .map(|m| {
            Ok((
                m.id.parse::<EigenId>().map_err(GalerkinError::Config)?,
                m.value,
            ))
        })
        .collect()
}

/// Experiment description read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_cap")]
    pub cap: u32,
    #[serde(default = "unit_lengths")]
    pub lengths: [String; 3],
    pub nu: f64,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub forcing: Vec<ModeValue>,
    #[serde(default)]
    pub initial: Vec<ModeValue>,
    #[serde(default)]
    pub target: Vec<ModeValue>,
    /// generators of the control subspace (its first bracket level is used)
    #[serde(default = "default_seed")]
    pub control_seed: String,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn default_cap() -> u32 {
    2
}

fn unit_lengths() -> [String; 3] {
    ["1".into(), "1".into(), "1".into()]
}

fn default_seed() -> String {
    "thm33".into()
}

fn default_intervals() -> usize {
    2
}

pub struct Experiment {
    pub sys: GalerkinSystem,
    pub u0: Vec<f64>,
    pub target: Vec<f64>,
    pub seed: SetSpec,
    pub config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, GalerkinError> {
        serde_json::from_str(s).map_err(|e| GalerkinError::Config(e.to_string()))
    }

    pub fn build(self) -> Result<Experiment, GalerkinError> {
        let l: Vec<&str> = self.lengths.iter().map(|s| s.as_str()).collect();
        let lengths = DomainLengths::parse(&l).map_err(GalerkinError::Config)?;
        let seed = SetSpec::parse(&self.control_seed).map_err(GalerkinError::Config)?;
        let sys = assemble(self.cap, self.nu, &lengths, &parse_modes(&self.forcing)?)?;
        let u0 = sys.coords(&parse_modes(&self.initial)?)?;
        let target = sys.coords(&parse_modes(&self.target)?)?;
        Ok(Experiment {
            sys,
            u0,
            target,
            seed,
            config: self,
        })
    }
}

impl Experiment {
    pub fn steer(&self) -> Result<SteerOutcome, GalerkinError> {
        let (basis, _) = control_basis(&self.sys, &self.seed)?;
        let c = &self.config;
        steer(
            &self.sys,
            &self.u0,
            &self.target,
            c.horizon,
            c.dt,
            basis,
            c.intervals,
            &c.optimizer,
        )
    }
}

/// Demonstration config: reach half a unit of `Y1(1,1,1)` from rest.
pub const DEMO_CONFIG: &str = include_str!("../configs/demo.json");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::canonical;
    use crate::trig::{curl, inner};

    fn small() -> GalerkinSystem {
        assemble(1, 1.0, &DomainLengths::unit(), &[]).unwrap()
    }

    #[test]
    fn rest_stays_at_rest() {
        let sys = small();
        let u = integrate_final(&sys, &vec![0.0; sys.dim()], None, 1.0, 0.01).unwrap();
        assert!(u.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn eigenvalues() {
        let sys = small();
        let i = sys.universe.position(&EigenId::y([1, 1, 1], 1)).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((sys.lambda[i] - 3.0 * pi2).abs() < 1e-12);
        assert_eq!(
            sys.lambda[sys.universe.position(&EigenId::z000()).unwrap()],
            0.0
        );
    }

    #[test]
    fn v_norm_matches_exact_curl() {
        let l = DomainLengths::new(
            crate::rational::frac(3, 2),
            crate::rational::q(1),
            crate::rational::frac(2, 3),
        )
        .unwrap();
        let sys = assemble(1, 0.5, &l, &[]).unwrap();
        for (i, id) in sys.universe.ids().iter().enumerate() {
            let e = canonical(*id, &l).unwrap();
            let c = curl(&e.field, &l);
            let exact = inner(&c, &c, &l).to_f64();
            let mut u = vec![0.0; sys.dim()];
            u[i] = 1.0;
            assert!(
                (sys.v_norm(&u).powi(2) - exact).abs() < 1e-9 * exact.max(1.0),
                "{id}"
            );
        }
    }

    #[test]
    fn bad_grid_is_config_error() {
        let sys = small();
        let u0 = vec![0.0; sys.dim()];
        assert!(matches!(
            integrate_final(&sys, &u0, None, 1.0, 0.3),
            Err(GalerkinError::Config(_))
        ));
    }

    #[test]
    fn zero_target_needs_no_control() {
        let sys = small();
        let z = vec![0.0; sys.dim()];
        let (basis, _) = control_basis(&sys, &SetSpec::CqC { q: 1 }).unwrap();
        let out = steer(
            &sys,
            &z,
            &z,
            0.5,
            0.01,
            basis,
            1,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(out.distance, 0.0);
        assert!(out.control.coeffs.iter().flatten().all(|c| *c == 0.0));
    }

    #[test]
    fn demo_config_parses() {
        let c = ExperimentConfig::from_json(DEMO_CONFIG).unwrap();
        assert_eq!(c.cap, 2);
        assert!(SetSpec::parse(&c.control_seed).is_ok());
    }
}
