//! Command-line front end. Exit codes: 0 success, 1 a check failed,
//! 2 bad input, 3 cap overflow.

use crate::eigen::{enumerate_set, EigenId, Family, SetSpec};
use crate::galerkin::{integrate, ExperimentConfig, GalerkinError, DEMO_CONFIG};
use crate::replay::walk::{induction_walk, DEFAULT_ORDER};
use crate::replay::{
    all_steps, default_lengths, find_step, replay, scan_determinants, write_scan_csv, StepScript,
};
use crate::span::{run_verification, OverflowPolicy, SpanError, VerifyConfig};
use crate::trig::DomainLengths;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cylsat",
    version,
    about = "Exact eigenfunction brackets, span saturation and Galerkin steering on a periodic cylinder"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Policy {
    Abort,
    Discard,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// List the eigenfunctions of a named set as JSON
    Enumerate {
        /// thm33, cor310, rect-qN, cq-c:N, cq-r:N, <set>-minus-z000, or custom
        #[arg(long)]
        set: String,
        /// JSON array of ids such as "Y1(1,2,3)", for --set custom
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check C^q ⊆ G^{q-1} for q = 4..=qmax
    Verify {
        #[arg(long)]
        set: String,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, num_args = 3, value_names = ["L1", "L2", "L3"])]
        lengths: Option<Vec<String>>,
        #[arg(long, default_value_t = 5)]
        qmax: u32,
        /// universe cap, defaults to qmax
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, value_enum, default_value_t = Policy::Discard)]
        policy: Policy,
        /// only Y targets from the rectangle family C^q_R
        #[arg(long)]
        rectangle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive scripted bracket coefficients, determinants and independence
    Replay {
        /// step id or alias
        #[arg(long, conflicts_with = "all")]
        step: Option<String>,
        #[arg(long)]
        all: bool,
        /// q range, e.g. 4..12 or 7
        #[arg(long, default_value = "4..12")]
        q: String,
        /// one length triple; default is five fixed triples
        #[arg(long, num_args = 3, value_names = ["L1", "L2", "L3"])]
        lengths: Option<Vec<String>>,
        /// directory for one JSON report per step
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// CSV of determinant values and verdicts
        #[arg(long)]
        scan: Option<PathBuf>,
        /// also run the region-by-region walk from this level
        #[arg(long)]
        walk: Option<u32>,
        /// list the available steps and exit
        #[arg(long)]
        list: bool,
    },
    /// Integrate or steer the Galerkin system described by a JSON config
    Simulate {
        /// config path, or `demo` for the built-in one
        config: String,
        #[arg(long)]
        steer: bool,
        /// trajectory CSV (t, energy, v_norm, distance)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

fn cfg_err(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        msg: msg.into(),
    }
}

impl From<SpanError> for Failure {
    fn from(e: SpanError) -> Self {
        let code = if matches!(e, SpanError::CapOverflow { .. }) {
            EXIT_CAP
        } else {
            EXIT_CONFIG
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<GalerkinError> for Failure {
    fn from(e: GalerkinError) -> Self {
        let code = match e {
            GalerkinError::BlowUp { .. } => EXIT_FAIL,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| cfg_err(e.to_string()))?;
    std::fs::write(path, s + "\n").map_err(|e| cfg_err(format!("{}: {e}", path.display())))
}

fn parse_lengths(v: &Option<Vec<String>>) -> Result<Option<DomainLengths>, Failure> {
    match v {
        None => Ok(None),
        Some(v) => {
            let parts: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
            DomainLengths::parse(&parts).map(Some).map_err(cfg_err)
        }
    }
}

fn parse_set(set: &str, file: &Option<PathBuf>) -> Result<SetSpec, Failure> {
    if set == "custom" {
        let path = file
            .as_ref()
            .ok_or_else(|| cfg_err("--set custom needs --file"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let raw: Vec<String> =
            serde_json::from_str(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let ids = raw
            .iter()
            .map(|s| s.parse::<EigenId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(cfg_err)?;
        return Ok(SetSpec::Custom { ids });
    }
    SetSpec::parse(set).map_err(cfg_err)
}

fn parse_q_range(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || cfg_err(format!("bad q range `{s}` (use e.g. 4..12)"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a < 1 || a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

#[derive(Serialize)]
struct Listing {
    schema: &'static str,
    set: String,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    quoted_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    ids: Vec<String>,
}

fn enumerate(set: &str, file: &Option<PathBuf>, out: &Option<PathBuf>) -> Result<i32, Failure> {
    let spec = parse_set(set, file)?;
    let ids = enumerate_set(&spec);
    let quoted = spec.quoted_count();
    let note = quoted.filter(|q| *q != ids.len()).map(|q| {
        format!(
            "enumerated {} ids; the commonly quoted count is {q} (difference {})",
            ids.len(),
            ids.len() as i64 - q as i64
        )
    });
    let listing = Listing {
        schema: "set-listing/1",
        set: spec.label(),
        count: ids.len(),
        quoted_count: quoted,
        note: note.clone(),
        ids: ids.iter().map(|i| i.to_string()).collect(),
    };
    match out {
        Some(p) => write_json(p, &listing)?,
        None => println!("{}", serde_json::to_string_pretty(&listing).unwrap()),
    }
    eprintln!("{}: {} ids", listing.set, listing.count);
    if let Some(n) = note {
        eprintln!("note: {n}");
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    set: &str,
    file: &Option<PathBuf>,
    lengths: &Option<Vec<String>>,
    qmax: u32,
    cap: Option<u32>,
    policy: Policy,
    rectangle: bool,
    out: &Option<PathBuf>,
) -> Result<i32, Failure> {
    let seed = parse_set(set, file)?;
    if qmax < 4 {
        return Err(cfg_err("--qmax must be at least 4"));
    }
    let lengths = parse_lengths(lengths)?.unwrap_or_else(DomainLengths::unit);
    let mut cfg = VerifyConfig::new(seed, lengths, qmax);
    cfg.cap = cap.unwrap_or(qmax);
    if cfg.cap < qmax {
        return Err(cfg_err(format!("--cap {} is below --qmax {qmax}", cfg.cap)));
    }
    cfg.policy = match policy {
        Policy::Abort => OverflowPolicy::Abort,
        Policy::Discard => OverflowPolicy::Discard,
    };
    if rectangle {
        cfg.targets = Some(|q| SetSpec::CqR { q });
        cfg.family = Some(Family::Y);
    }
    let rep = run_verification(&cfg)?;
    println!(
        "seed {} ({} ids), cap {}, universe {}, policy {:?}, dims {:?}",
        rep.seed, rep.seed_size, rep.cap, rep.universe_size, rep.policy, rep.dims
    );
    for v in &rep.verdicts {
        let missing: Vec<String> = v
            .inclusion
            .missing
            .iter()
            .take(12)
            .map(|i| i.to_string())
            .collect();
        println!(
            "q = {}: {} ⊆ G^{}  {}  ({} checked{})",
            v.q,
            v.inclusion.target,
            v.level,
            if v.inclusion.holds { "holds" } else { "FAILS" },
            v.inclusion.checked,
            if missing.is_empty() {
                String::new()
            } else {
                format!(
                    ", {} missing: {}",
                    v.inclusion.missing.len(),
                    missing.join(" ")
                )
            }
        );
    }
    if rep.discarded_brackets > 0 {
        println!(
            "{} brackets left the cap (largest index {}) and were discarded",
            rep.discarded_brackets, rep.largest_index_seen
        );
    }
    if let Some(p) = out {
        write_json(p, &rep)?;
    }
    Ok(if rep.holds { EXIT_OK } else { EXIT_FAIL })
}

#[allow(clippy::too_many_arguments)]
fn do_replay(
    step: &Option<String>,
    all: bool,
    q: &str,
    lengths: &Option<Vec<String>>,
    out_dir: &Option<PathBuf>,
    scan: &Option<PathBuf>,
    walk: Option<u32>,
    list: bool,
) -> Result<i32, Failure> {
    if list {
        for s in all_steps() {
            println!(
                "{:<16} {:<6} {}",
                s.id,
                s.alias.as_deref().unwrap_or(""),
                s.summary
            );
        }
        return Ok(EXIT_OK);
    }
    let steps: Vec<StepScript> = match (step, all) {
        (Some(s), _) => {
            vec![find_step(s).ok_or_else(|| cfg_err(format!("unknown step `{s}` (see --list)")))?]
        }
        (None, true) => all_steps(),
        (None, false) if walk.is_some() => Vec::new(),
        (None, false) => return Err(cfg_err("give --step, --all or --walk")),
    };
    let qs = parse_q_range(q)?;
    let ls = match parse_lengths(lengths)? {
        Some(l) => vec![l],
        None => default_lengths(),
    };
    if let Some(d) = out_dir {
        std::fs::create_dir_all(d).map_err(|e| cfg_err(format!("{}: {e}", d.display())))?;
    }
    let mut ok = true;
    let mut rows = Vec::new();
    for st in &steps {
        let rep = replay(st, &qs, &ls).map_err(cfg_err)?;
        ok &= rep.passed;
        println!(
            "{:<16} z {}/{}  beta {}/{}  det {}/{}  independence {}/{}  {}",
            rep.step,
            rep.z_vectors.passed,
            rep.z_vectors.total,
            rep.betas.passed,
            rep.betas.total,
            rep.determinants.passed,
            rep.determinants.total,
            rep.required_independence.passed,
            rep.required_independence.total,
            if rep.passed { "pass" } else { "FAIL" }
        );
        for f in &rep.findings {
            println!(
                "    {} {}: {:?}; e.g. {}",
                f.case, f.what, f.verdicts, f.first
            );
        }
        if let Some(d) = out_dir {
            write_json(&d.join(format!("{}.json", st.id)), &rep)?;
        }
        if scan.is_some() {
            rows.extend(scan_determinants(st, &qs, &ls).map_err(cfg_err)?);
        }
    }
    if let Some(p) = scan {
        let f = std::fs::File::create(p).map_err(|e| cfg_err(format!("{}: {e}", p.display())))?;
        write_scan_csv(&rows, f).map_err(cfg_err)?;
    }
    if let Some(wq) = walk {
        if wq < 4 {
            return Err(cfg_err("--walk needs q ≥ 4"));
        }
        let l = ls.first().cloned().unwrap_or_else(DomainLengths::unit);
        let w = induction_walk(wq, &l, &DEFAULT_ORDER)?;
        for r in &w.regions {
            println!(
                "walk q={}→{} {:?}: {}/{} reached (alone: {})",
                wq,
                wq + 1,
                r.region,
                r.reached,
                r.targets,
                r.holds_alone
            );
        }
        println!(
            "walk: axis region first {}, displayed axis bracket lands on the axis alone: {}",
            w.axis_first.holds, w.axis_bracket.lands_on_axis_alone
        );
        ok &= w.holds;
        if let Some(d) = out_dir {
            write_json(&d.join(format!("walk-q{wq}.json")), &w)?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct SimSummary {
    schema: &'static str,
    modes: usize,
    tensor_entries: usize,
    antisymmetry_violations: usize,
    final_energy: f64,
    final_v_norm: f64,
    distance_to_target: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    steering: Option<crate::galerkin::SteerOutcome>,
}

fn simulate(
    config: &str,
    steer: bool,
    csv: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<i32, Failure> {
    let text = if config == "demo" {
        DEMO_CONFIG.to_string()
    } else {
        std::fs::read_to_string(config).map_err(|e| cfg_err(format!("{config}: {e}")))?
    };
    let exp = ExperimentConfig::from_json(&text)?.build()?;
    let sys = &exp.sys;
    let steering = if steer { Some(exp.steer()?) } else { None };
    let ctl = steering.as_ref().map(|s| &s.control);
    let tr = integrate(sys, &exp.u0, ctl, exp.config.horizon, exp.config.dt)?;
    let last = tr.last();
    let diff: Vec<f64> = last.iter().zip(&exp.target).map(|(a, b)| a - b).collect();
    let dist = sys.v_norm(&diff);
    println!(
        "{} modes, {} tensor entries; final energy {:.6e}, V-norm {:.6e}",
        sys.dim(),
        sys.tensor.len(),
        tr.energy.last().unwrap(),
        tr.v_norm.last().unwrap()
    );
    if let Some(s) = &steering {
        println!(
            "achieved V-distance {:.6e} (uncontrolled {:.6e}, ratio {:.3e}) in {:.1}s",
            s.distance, s.baseline, s.ratio, s.seconds
        );
        if s.stagnated {
            println!("optimizer stagnated at distance {:.6e}", s.distance);
        }
    } else {
        println!("V-distance to target {dist:.6e}");
    }
    if let Some(p) = csv {
        let f = std::fs::File::create(p).map_err(|e| cfg_err(format!("{}: {e}", p.display())))?;
        tr.write_csv(sys, &exp.target, f).map_err(cfg_err)?;
    }
    if let Some(p) = out {
        let s = SimSummary {
            schema: "simulation/1",
            modes: sys.dim(),
            tensor_entries: sys.tensor.len(),
            antisymmetry_violations: sys.antisymmetry_violations,
            final_energy: *tr.energy.last().unwrap(),
            final_v_norm: *tr.v_norm.last().unwrap(),
            distance_to_target: dist,
            steering,
        };
        write_json(p, &s)?;
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let res = match &cli.cmd {
        Cmd::Enumerate { set, file, out } => enumerate(set, file, out),
        Cmd::Verify {
            set,
            file,
            lengths,
            qmax,
            cap,
            policy,
            rectangle,
            out,
        } => verify(set, file, lengths, *qmax, *cap, *policy, *rectangle, out),
        Cmd::Replay {
            step,
            all,
            q,
            lengths,
            out_dir,
            scan,
            walk,
            list,
        } => do_replay(step, *all, q, lengths, out_dir, scan, *walk, *list),
        Cmd::Simulate {
            config,
            steer,
            csv,
            out,
        } => simulate(config, *steer, csv, out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}
