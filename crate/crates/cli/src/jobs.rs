use rayon::prelude::*;
use serde_json::{json, Value};

use privwit::channels::{standard_dynamics, ChannelKind, DynamicsKind};
use privwit::keyrates::leakage::LeakageInputs;
use privwit::keyrates::measures::delta_from_cmi;
use privwit::keyrates::{
    dw_rate, leakage_bounds, randomness_rates, region_grid, AttackSetup, Povm, RegionKind,
};
use privwit::nonmarkov::{detect_nonmarkov, trace_norm_trajectory, Trajectory};
use privwit::qcore::{entropy_of, DensityMatrix, Operator, SubsystemDims, Tolerances};
use privwit::random::{random_density, random_hermitian};
use privwit::states::{bell_state, coherence_witness, gamma_swap, superdense_example};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::scenario::{grid, BoundsSpec, RangeSpec, Scenario, StateSpec, DEFAULT_P_POINTS};
use crate::table::{fmt_num, json_num, Metadata, ResultTable};

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub enum Job {
    Attack {
        d_s: usize,
        kind: ChannelKind,
        alphas: Vec<f64>,
        p_grid: Vec<f64>,
    },
    Regions {
        kind: RegionKind,
        d_a: usize,
        x: Vec<f64>,
        y: Vec<f64>,
    },
    Bounds(LeakageInputs),
    Randomness {
        state: DensityMatrix,
        a: Vec<String>,
        b: Vec<String>,
    },
    Markov {
        dynamics: DynamicsKind,
        grid: Vec<f64>,
        witness: Operator,
        deriv_tol: f64,
    },
    Superdense,
}

pub enum Output {
    Table(ResultTable),
    /// A bare JSON document, printed as is in either format.
    Json(Value),
}

pub fn plan(sc: &Scenario) -> Result<Job, CliError> {
    match sc.command.as_str() {
        "attack" => plan_attack(sc),
        "regions" => plan_regions(sc),
        "bounds" => plan_bounds(sc.bounds.clone().unwrap_or_default()),
        "randomness" => plan_randomness(sc),
        "markov" => plan_markov(sc),
        "superdense" => Ok(Job::Superdense),
        other => Err(CliError::field(
            "command",
            format!("unknown command `{other}` (attack, regions, bounds, randomness, markov, superdense)"),
        )),
    }
}

fn require<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| CliError::field(field, "section is required for this command"))
}

fn check_unit(v: f64, field: &str) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::field(field, format!("value {v} outside [0, 1]")))
    }
}

fn plan_attack(sc: &Scenario) -> Result<Job, CliError> {
    let state = require(&sc.state, "state")?;
    if state.family != "gamma-swap" {
        return Err(CliError::field(
            "state.family",
            format!("unknown family `{}` for attack (expected gamma-swap)", state.family),
        ));
    }
    let d_s = state.ds.unwrap_or(2);
    if d_s < 2 {
        return Err(CliError::field("state.ds", "shield dimension must be at least 2"));
    }
    let ch = require(&sc.channel, "channel")?;
    let kind: ChannelKind = ch.kind.parse().map_err(|e| CliError::core("channel.kind", e))?;
    let alphas = match (&sc.sweep, ch.alpha) {
        (Some(sw), _) => {
            if sw.variable != "alpha" {
                return Err(CliError::field(
                    "sweep.variable",
                    format!("attack sweeps `alpha`, got `{}`", sw.variable),
                ));
            }
            check_unit(sw.start, "sweep.start")?;
            check_unit(sw.stop, "sweep.stop")?;
            grid(
                &RangeSpec {
                    start: sw.start,
                    stop: sw.stop,
                    points: sw.points,
                },
                "sweep",
            )?
        }
        (None, Some(a)) => {
            check_unit(a, "channel.alpha")?;
            vec![a]
        }
        (None, None) => return Err(CliError::field("channel.alpha", "required when no sweep is given")),
    };
    if let Some(a) = ch.alpha {
        check_unit(a, "channel.alpha")?;
    }
    let p_points = ch.p_points.unwrap_or(DEFAULT_P_POINTS);
    let p_grid = grid(
        &RangeSpec {
            start: 0.0,
            stop: 1.0,
            points: p_points,
        },
        "channel.p_points",
    )?;
    Ok(Job::Attack {
        d_s,
        kind,
        alphas,
        p_grid,
    })
}

fn plan_regions(sc: &Scenario) -> Result<Job, CliError> {
    let r = require(&sc.region, "region")?;
    let kind: RegionKind = r.kind.parse().map_err(|e| CliError::core("region.kind", e))?;
    if r.d_a < 1 {
        return Err(CliError::field("region.d_a", "must be at least 1"));
    }
    let x = grid(&r.x, "region.x")?;
    if let Some(v) = x.iter().find(|v| **v < 0.0) {
        return Err(CliError::field("region.x", format!("information value {v} is negative")));
    }
    Ok(Job::Regions {
        kind,
        d_a: r.d_a,
        x,
        y: grid(&r.y, "region.y")?,
    })
}

fn plan_bounds(b: BoundsSpec) -> Result<Job, CliError> {
    let delta = match (b.delta, b.cmi) {
        (Some(_), Some(_)) => return Err(CliError::field("bounds", "give either delta or cmi, not both")),
        (Some(d), None) => {
            check_unit(d, "bounds.delta")?;
            d
        }
        (None, Some(i)) => {
            if !(i >= 0.0) {
                return Err(CliError::field("bounds.cmi", format!("value {i} is negative")));
            }
            delta_from_cmi(i)
        }
        (None, None) => 0.0,
    };
    let d = LeakageInputs::default();
    let inputs = LeakageInputs {
        s_a: b.s_a.unwrap_or(d.s_a),
        log_a: b.log_a.unwrap_or(d.log_a),
        s_b: b.s_b.unwrap_or(d.s_b),
        s_x: b.s_x.unwrap_or(d.s_x),
        delta,
        d_a: b.d_a.unwrap_or(d.d_a),
        d_big_a: b.d_alice.unwrap_or(d.d_big_a),
        d_b: b.d_b.unwrap_or(d.d_b),
        d_x: b.d_x.unwrap_or(d.d_x),
        s_sigma_c: b.s_sigma_c.unwrap_or(d.s_sigma_c),
        s_sigma_d: b.s_sigma_d.unwrap_or(d.s_sigma_d),
        cmi_a_c_given_b: b.cmi_a_c_given_b.unwrap_or(d.cmi_a_c_given_b),
        er_inf: b.er_inf,
        log_x: b.log_x.unwrap_or(d.log_x),
    };
    // surface range problems under the section name
    leakage_bounds(&inputs).map_err(|e| CliError::core("bounds", e))?;
    Ok(Job::Bounds(inputs))
}

fn rng_for(sc: &Scenario) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sc.seed.unwrap_or(0))
}

fn plan_randomness(sc: &Scenario) -> Result<Job, CliError> {
    let st = require(&sc.state, "state")?;
    let (state, a, b) = bipartite_state(st, &mut rng_for(sc))?;
    Ok(Job::Randomness {
        state,
        a: a.into_iter().map(String::from).collect(),
        b: b.into_iter().map(String::from).collect(),
    })
}

type Cut = (DensityMatrix, Vec<&'static str>, Vec<&'static str>);

fn bipartite_state(st: &StateSpec, rng: &mut ChaCha8Rng) -> Result<Cut, CliError> {
    let ab = || SubsystemDims::new([("A", 2), ("B", 2)]).expect("distinct labels");
    match st.family.as_str() {
        "bell" => Ok((bell_state(), vec!["A"], vec!["B"])),
        "isotropic" => {
            let p = st
                .p
                .ok_or_else(|| CliError::field("state.p", "required for the isotropic family"))?;
            check_unit(p, "state.p")?;
            let mixed = DensityMatrix::maximally_mixed(ab());
            Ok((bell_state().mix(&mixed, 1.0 - p)?, vec!["A"], vec!["B"]))
        }
        "gamma-swap" => {
            let ds = st.ds.unwrap_or(2);
            let g = gamma_swap(ds).map_err(|e| CliError::core("state.ds", e))?;
            Ok((g, vec!["A", "A'"], vec!["B", "B'"]))
        }
        "random" => {
            let (da, db) = (st.da.unwrap_or(2), st.db.unwrap_or(2));
            if da < 1 || db < 1 {
                return Err(CliError::field("state", "da and db must be at least 1"));
            }
            let rank = st.rank.unwrap_or(da * db);
            if rank < 1 || rank > da * db {
                return Err(CliError::field("state.rank", format!("must lie in 1..={}", da * db)));
            }
            let dims = SubsystemDims::new([("A", da), ("B", db)]).expect("distinct labels");
            Ok((random_density(dims, rank, rng), vec!["A"], vec!["B"]))
        }
        other => Err(CliError::field(
            "state.family",
            format!("unknown family `{other}` (bell, isotropic, gamma-swap, random)"),
        )),
    }
}

fn plan_markov(sc: &Scenario) -> Result<Job, CliError> {
    let d = require(&sc.dynamics, "dynamics")?;
    let dynamics = match d.kind.as_str() {
        "semigroup" => DynamicsKind::SemigroupDephasing { gamma: d.gamma },
        "oscillating" => DynamicsKind::OscillatingDephasing {
            gamma: d.gamma,
            omega: d
                .omega
                .ok_or_else(|| CliError::field("dynamics.omega", "required for oscillating dynamics"))?,
        },
        other => {
            return Err(CliError::field(
                "dynamics.kind",
                format!("unknown dynamics `{other}` (semigroup, oscillating)"),
            ))
        }
    };
    let sw = require(&sc.sweep, "sweep")?;
    if sw.variable != "t" {
        return Err(CliError::field("sweep.variable", format!("markov sweeps `t`, got `{}`", sw.variable)));
    }
    if sw.start < 0.0 {
        return Err(CliError::field("sweep.start", "time must be non-negative"));
    }
    let g = grid(
        &RangeSpec {
            start: sw.start,
            stop: sw.stop,
            points: sw.points,
        },
        "sweep",
    )?;
    if g.len() < 3 {
        return Err(CliError::field("sweep.points", "need at least 3 time points"));
    }
    if !(sw.stop > sw.start) {
        return Err(CliError::field("sweep.stop", "must exceed sweep.start"));
    }
    // construct once to validate the parameters
    standard_dynamics(dynamics, sw.stop).map_err(|e| CliError::core("dynamics", e))?;
    let w = sc.witness.clone().unwrap_or_default();
    let witness = match w.kind.as_str() {
        "" | "coherence" => coherence_witness(),
        "random" => {
            let norm = w.norm.unwrap_or(0.5);
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(CliError::field("witness.norm", format!("value {norm} must be positive")));
            }
            let dims = SubsystemDims::new([("S", 2), ("T", 2)]).expect("distinct labels");
            random_hermitian(dims, norm, &mut rng_for(sc))
        }
        other => {
            return Err(CliError::field(
                "witness.kind",
                format!("unknown witness `{other}` (coherence, random)"),
            ))
        }
    };
    let deriv_tol = w.deriv_tol.unwrap_or(privwit::nonmarkov::DEFAULT_DERIV_TOL);
    if !(deriv_tol >= 0.0) {
        return Err(CliError::field("witness.deriv_tol", "must be non-negative"));
    }
    Ok(Job::Markov {
        dynamics,
        grid: g,
        witness,
        deriv_tol,
    })
}

pub fn metadata(sc: &Scenario) -> Metadata {
    Metadata {
        command: sc.command.clone(),
        version: env!("CARGO_PKG_VERSION"),
        scenario_hash: sc.hash(),
        tolerances: Tolerances::default(),
    }
}

pub fn execute(job: &Job, meta: Metadata) -> Result<Output, CliError> {
    match job {
        Job::Attack {
            d_s,
            kind,
            alphas,
            p_grid,
        } => {
            let setup = AttackSetup::new(*d_s)?;
            let points = alphas
                .par_iter()
                .map(|&a| setup.point(*kind, a, p_grid))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = ResultTable::new(meta, &["alpha", "trace_norm_witness", "psq_key_witness", "er_upper_bound"]);
            for p in points {
                t.push(vec![p.alpha, p.trace_norm_witness, p.psq_key_witness, p.er_upper_bound]);
            }
            t.notes.push(format!("state=gamma-swap ds={d_s} channel={kind} p_points={}", p_grid.len()));
            // value and drop differ unless the sweep starts at a unit bound; report both
            if let (Some(first), Some(last)) = (t.rows.first(), t.rows.last()) {
                t.notes.push(format!(
                    "er_upper_bound value_at_alpha={}: {} drop_from_alpha={}: {}",
                    fmt_num(last[0]),
                    fmt_num(last[3]),
                    fmt_num(first[0]),
                    fmt_num(first[3] - last[3]),
                ));
            }
            Ok(Output::Table(t))
        }
        Job::Regions { kind, d_a, x, y } => {
            let g = region_grid(*kind, x, y, *d_a)?;
            let mut t = ResultTable::new(meta, &["x", "y", "inside"]);
            for (i, xi) in g.x.iter().enumerate() {
                for (j, yj) in g.y.iter().enumerate() {
                    t.push(vec![*xi, *yj, if g.inside[i][j] { 1.0 } else { 0.0 }]);
                }
            }
            t.notes.push(format!("kind={kind} d_A={d_a}"));
            Ok(Output::Table(t))
        }
        Job::Bounds(inputs) => {
            let rep = leakage_bounds(inputs)?;
            let entries = rep.entries();
            let mut cols = vec!["delta"];
            cols.extend(entries.iter().map(|e| e.name));
            let mut t = ResultTable::new(meta, &cols);
            let mut row = vec![rep.delta];
            row.extend(entries.iter().map(|e| e.value));
            t.push(row);
            t.extra = Some(json!({
                "inputs": inputs,
                "bounds": entries
                    .iter()
                    .map(|e| json!({"name": e.name, "value": json_num(e.value), "applies_to": e.applies_to}))
                    .collect::<Vec<_>>(),
            }));
            Ok(Output::Table(t))
        }
        Job::Randomness { state, a, b } => {
            let a: Vec<&str> = a.iter().map(String::as_str).collect();
            let b: Vec<&str> = b.iter().map(String::as_str).collect();
            let mut t = ResultTable::new(meta, &["setting", "r_a_max", "r_b_max", "r_sum_max"]);
            for setting in 1..=4u8 {
                let r = randomness_rates(state, &a, &b, setting)?;
                t.push(vec![setting as f64, r.r_a_max, r.r_b_max, r.r_sum_max]);
            }
            t.notes.push(format!("cut {} | {}", a.join(" "), b.join(" ")));
            Ok(Output::Table(t))
        }
        Job::Markov {
            dynamics,
            grid,
            witness,
            deriv_tol,
        } => {
            let t_max = *grid.last().expect("validated non-empty");
            let traj = parallel_trajectory(*dynamics, t_max, witness, grid)?;
            let rep = detect_nonmarkov(&traj, *deriv_tol)?;
            let has_g = traj.g_values.is_some();
            let cols: &[&str] = if has_g {
                &["t", "f", "g", "df_dt", "dg_dt"]
            } else {
                &["t", "f", "df_dt"]
            };
            let mut t = ResultTable::new(meta, cols);
            for k in 0..grid.len() {
                let mut row = vec![traj.t_values[k], traj.f_values[k]];
                if let (Some(g), Some(dg)) = (&traj.g_values, &rep.dg_dt) {
                    row.extend([g[k], rep.df_dt[k], dg[k]]);
                } else {
                    row.push(rep.df_dt[k]);
                }
                t.push(row);
            }
            let spans: Vec<String> = rep
                .intervals
                .iter()
                .map(|iv| format!("[{},{}]", fmt_num(iv.t_start), fmt_num(iv.t_end)))
                .collect();
            t.notes.push(format!(
                "verdict={} deriv_tol={} intervals={}",
                rep.verdict,
                fmt_num(*deriv_tol),
                if spans.is_empty() { "none".to_string() } else { spans.join(";") }
            ));
            t.extra = Some(json!({
                "verdict": rep.verdict,
                "deriv_tol": json_num(*deriv_tol),
                "x_trace_norm": json_num(traj.x_norm),
                "intervals": rep.intervals.iter().map(|iv| json!({
                    "t_start": json_num(iv.t_start),
                    "t_end": json_num(iv.t_end),
                    "max_derivative": json_num(iv.max_derivative),
                })).collect::<Vec<_>>(),
            }));
            Ok(Output::Table(t))
        }
        Job::Superdense => {
            let (before, after) = superdense_rates()?;
            Ok(Output::Json(json!({
                "rate_before": json_num(before),
                "rate_after": json_num(after),
            })))
        }
    }
}

/// Rates of the superdense-coding state before and after `A'` moves from
/// Alice to Eve.
pub fn superdense_rates() -> Result<(f64, f64), CliError> {
    let psi = superdense_example();
    let povm = Povm::computational(4);
    let before = dw_rate(&psi, &["A"], &["B"], &["E"], &povm, None)?;
    let after = dw_rate(&psi, &["A"], &["B"], &["E", "A'"], &povm, None)?;
    let s_a = entropy_of(&psi.density(), &["A'"])?;
    debug_assert!((before - after - 2.0 * s_a).abs() < 1e-9);
    Ok((before, after))
}

/// Contiguous chunks of the grid are evaluated on the worker pool and
/// stitched back in order.
fn parallel_trajectory(
    kind: DynamicsKind,
    t_max: f64,
    x: &Operator,
    grid: &[f64],
) -> Result<Trajectory, CliError> {
    let family = standard_dynamics(kind, t_max)?;
    let chunk = grid.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
    let parts = grid
        .par_chunks(chunk)
        .map(|c| trace_norm_trajectory(&family, x, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Trajectory {
        t_values: Vec::with_capacity(grid.len()),
        f_values: Vec::with_capacity(grid.len()),
        g_values: None,
        x_norm: x.trace_norm(),
    };
    let mut g_all: Option<Vec<f64>> = Some(Vec::new());
    for p in parts {
        out.t_values.extend(p.t_values);
        out.f_values.extend(p.f_values);
        match (&mut g_all, p.g_values) {
            (Some(acc), Some(g)) => acc.extend(g),
            _ => g_all = None,
        }
    }
    out.g_values = g_all;
    Ok(out)
}
