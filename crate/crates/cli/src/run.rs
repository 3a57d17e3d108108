//! Experiment runners. Each returns its outputs in memory; nothing touches
//! disk until every computation has succeeded.

use rayon::prelude::*;
use serde_json::{json, Value};

use loschmidt::classical::{inverted_g, paired_trajectories, theta_inverted};
use loschmidt::fidelity::{
    detect_recurrences, fidelity_curve, fidelity_g3, fidelity_general, lower_bound, Eq34Convention, FidelityCurve,
    RecurrenceReport,
};
use loschmidt::hill::{
    classify_theta_growth_with_window, integrate_complex_hill, integrate_symmetric, monodromy, wronskian_drift,
    CoefficientSpec, InitialPhaseData, MonodromyReport, PhaseTrajectory, ThetaGrowth,
};
use loschmidt::oracle::{oracle_fidelity, PropagatorConfig, SpatialGrid};
use loschmidt::states::{hermite_coefficients, sample_state, special_state, SpecialState, StateSpec};
use loschmidt::Complex64;

use crate::config::{CoefficientConfig, FieldError, OracleConfig, PhaseChoice, RunConfig, StateChoice, SweepConfig};
use crate::output::{Cell, Outputs, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub convention: Eq34Convention,
    /// Sweep threads; `None` defers to the config, then to the available cores.
    pub workers: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            convention: Eq34Convention::Series,
            workers: None,
        }
    }
}

fn numerical(context: &'static str) -> impl FnOnce(loschmidt::Error) -> CliError {
    move |source| CliError::Numerical { context, source }
}

fn build_state(cfg: &RunConfig) -> Result<StateSpec, CliError> {
    match cfg.state {
        StateChoice::Special(id) => Ok(special_state(id)),
        StateChoice::General {
            alpha,
            parity,
            truncation,
        } => hermite_coefficients(alpha, parity, truncation).map_err(numerical("state expansion")),
    }
}

fn trajectory(cfg: &RunConfig, spec: &CoefficientSpec, data: &InitialPhaseData) -> Result<PhaseTrajectory, CliError> {
    if cfg.symmetric {
        integrate_symmetric(spec, data, cfg.horizon, cfg.step)
    } else {
        integrate_complex_hill(spec, data, cfg.horizon, cfg.step)
    }
    .map_err(numerical("phase trajectory"))
}

/// Window for the phase-growth classification: the period for periodic
/// coefficients, half the e-folding time `1/(2w)` for `f = -w^2`.
fn growth_window(coefficient: &CoefficientConfig) -> f64 {
    match *coefficient {
        CoefficientConfig::Constant { value, .. } if value < 0.0 => 0.25 / (-value).sqrt(),
        CoefficientConfig::Constant { period, .. } => period,
        CoefficientConfig::Mathieu { omega, .. } => std::f64::consts::PI / omega,
    }
}

/// `F(dtheta)` honouring the selected convention for the two-term `g = sqrt 3` state.
fn closed_form(cfg: &RunConfig, state: &StateSpec, convention: Eq34Convention, d: f64) -> Result<Complex64, CliError> {
    match cfg.state {
        StateChoice::Special(SpecialState::ChiG3) => Ok(fidelity_g3(d, convention)),
        _ => fidelity_general(state, d).map_err(numerical("closed-form fidelity")),
    }
}

fn oracle_times(horizon: f64, step: f64) -> Vec<f64> {
    let n = (horizon / step * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if horizon - times[n] > 1e-9 * step {
        times.push(horizon);
    }
    times
}

struct OracleComparison {
    times: Vec<f64>,
    closed: Vec<Complex64>,
    oracle: Vec<Complex64>,
    max_step_norm_change: f64,
}

impl OracleComparison {
    fn max_error(&self) -> f64 {
        self.closed
            .iter()
            .zip(&self.oracle)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn compare_with_oracle(
    cfg: &RunConfig,
    oc: &OracleConfig,
    state: &StateSpec,
    traj: &PhaseTrajectory,
    data: &InitialPhaseData,
    spec: &CoefficientSpec,
    convention: Eq34Convention,
) -> Result<OracleComparison, CliError> {
    let grid = SpatialGrid::full_line(oc.x_max, oc.points).map_err(numerical("oracle grid"))?;
    let psi = sample_state(state, data, &grid).map_err(numerical("oracle initial state"))?;
    let times = oracle_times(cfg.horizon, oc.step);
    let run = oracle_fidelity(&psi, spec, cfg.g, &times, &PropagatorConfig::with_dt(oc.dt))
        .map_err(numerical("oracle propagation"))?;
    let closed = times
        .iter()
        .map(|&t| {
            let d = traj.phase_increment(t).map_err(numerical("phase increment"))?;
            closed_form(cfg, state, convention, d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OracleComparison {
        times,
        closed,
        oracle: run.curve.values,
        max_step_norm_change: run.max_step_norm_change,
    })
}

/// Everything `fidelity` reports, shared with the sweep rows.
pub struct FidelitySummary {
    pub trajectory: PhaseTrajectory,
    pub curve: FidelityCurve,
    pub recurrences: RecurrenceReport,
    pub lower_bound: f64,
    pub monodromy: MonodromyReport,
    pub growth: ThetaGrowth,
    pub plateau: Option<Complex64>,
    pub plateau_past: Option<Complex64>,
    pub state: StateSpec,
    pub data: InitialPhaseData,
    oracle: Option<OracleComparison>,
}

pub fn fidelity_summary(cfg: &RunConfig, opts: &Options, with_oracle: bool) -> Result<FidelitySummary, CliError> {
    let spec = cfg.coefficient.build().map_err(numerical("coefficient"))?;
    let data = cfg.phase_data().map_err(numerical("initial phase data"))?;
    let state = build_state(cfg)?;
    let traj = trajectory(cfg, &spec, &data)?;
    let mut curve = fidelity_curve(&traj, &state).map_err(numerical("fidelity curve"))?;
    if matches!(cfg.state, StateChoice::Special(SpecialState::ChiG3)) {
        curve.values = curve.delta_theta.iter().map(|d| fidelity_g3(*d, opts.convention)).collect();
        if opts.convention == Eq34Convention::Paper {
            curve.state = None;
        }
    }
    let recurrences = detect_recurrences(&curve, cfg.tolerance).map_err(numerical("recurrence detection"))?;
    let growth = classify_theta_growth_with_window(&traj, growth_window(&cfg.coefficient))
        .map_err(numerical("phase growth"))?;
    let at = |d: Option<f64>| d.map(|d| closed_form(cfg, &state, opts.convention, d)).transpose();
    let plateau = at(growth.delta_plus())?;
    let plateau_past = at(growth.delta_minus())?;
    let lb = lower_bound(&state).map_err(numerical("lower bound"))?;
    let mono = monodromy(&spec).map_err(numerical("monodromy"))?;
    let oracle = match (&cfg.oracle, with_oracle) {
        (Some(oc), true) => Some(compare_with_oracle(cfg, oc, &state, &traj, &data, &spec, opts.convention)?),
        _ => None,
    };
    Ok(FidelitySummary {
        trajectory: traj,
        curve,
        recurrences,
        lower_bound: lb,
        monodromy: mono,
        growth,
        plateau,
        plateau_past,
        state,
        data,
        oracle,
    })
}

fn complex_json(z: Option<Complex64>) -> Value {
    match z {
        Some(z) => json!({ "re": z.re, "im": z.im, "abs2": z.norm_sqr() }),
        None => Value::Null,
    }
}

fn coefficient_json(c: &CoefficientConfig) -> Value {
    match *c {
        CoefficientConfig::Constant { value, period } => json!({ "kind": "constant", "value": value, "period": period }),
        CoefficientConfig::Mathieu { gamma, delta, omega } => {
            json!({ "kind": "mathieu", "gamma": gamma, "delta": delta, "omega": omega })
        }
    }
}

fn floquet_json(m: &MonodromyReport) -> Value {
    json!({
        "period": m.period,
        "trace": m.trace,
        "determinant": m.determinant,
        "multipliers": m.multipliers.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        "lyapunov": m.lyapunov,
        "stability": m.stability.as_str(),
        "matrix": m.matrix,
    })
}

fn growth_json(g: &ThetaGrowth) -> Value {
    json!({
        "class": g.class().as_str(),
        "window": g.window,
        "delta_plus": g.delta_plus(),
        "delta_minus": g.delta_minus(),
    })
}

fn initial_json(d: &InitialPhaseData) -> Value {
    json!({ "u0": d.u0, "udot0": d.udot0, "theta0": d.theta0, "epsilon": d.epsilon })
}

fn stem(cfg: &RunConfig, default: &str) -> String {
    cfg.name.clone().unwrap_or_else(|| default.to_string())
}

pub fn run_fidelity(cfg: &RunConfig, opts: &Options) -> Result<Outputs, CliError> {
    let s = fidelity_summary(cfg, opts, true)?;
    let traj = &s.trajectory;
    let mut table = Table::new(["t", "u", "udot", "theta", "dtheta", "F_re", "F_im", "F_abs"]);
    for i in 0..traj.len() {
        let f = s.curve.values[i];
        table.push(vec![
            traj.times()[i].into(),
            traj.u()[i].into(),
            traj.udot()[i].into(),
            traj.theta()[i].into(),
            s.curve.delta_theta[i].into(),
            f.re.into(),
            f.im.into(),
            f.norm().into(),
        ]);
    }
    let extremum = |e: &loschmidt::fidelity::Extremum| json!({ "t": e.t, "abs_f": e.value });
    let report = json!({
        "command": "fidelity",
        "state": cfg.state.name(),
        "alpha": s.state.alpha(),
        "g": cfg.g,
        "eq34_convention": opts.convention.as_str(),
        "coefficient": coefficient_json(&cfg.coefficient),
        "initial": initial_json(&s.data),
        "horizon": cfg.horizon,
        "symmetric": cfg.symmetric,
        "recurrence_tolerance": cfg.tolerance,
        "recurrences": s.recurrences.recurrences.iter().map(extremum).collect::<Vec<_>>(),
        "minima": s.recurrences.minima.iter().map(extremum).collect::<Vec<_>>(),
        "min_abs_f": s.recurrences.infimum,
        "lower_bound": s.lower_bound,
        "renormalized": s.curve.renormalized,
        "floquet": floquet_json(&s.monodromy),
        "theta_growth": growth_json(&s.growth),
        "plateau": { "future": complex_json(s.plateau), "past": complex_json(s.plateau_past) },
        "wronskian_drift": wronskian_drift(traj),
        "oracle": s.oracle.as_ref().map(|o| json!({
            "max_error": o.max_error(),
            "max_step_norm_change": o.max_step_norm_change,
            "points": o.times.len(),
        })),
    });
    Ok(Outputs {
        stem: stem(cfg, "fidelity"),
        table: Some(table),
        report,
    })
}

pub fn run_classical(cfg: &RunConfig, _opts: &Options) -> Result<Outputs, CliError> {
    let spec = cfg.coefficient.build().map_err(numerical("coefficient"))?;
    let (g, x0, v0) = match cfg.phase {
        PhaseChoice::Inverted(p) => {
            let z0 = p.z(0.0);
            let y0 = z0.norm();
            (inverted_g(&p), y0, (z0.conj() * p.z_dot(0.0)).re / y0)
        }
        PhaseChoice::Explicit { .. } => {
            let x0 = cfg.classical_x0.ok_or_else(|| {
                CliError::Validation(vec![FieldError {
                    path: "classical.x0".into(),
                    message: "required for the classical run".into(),
                }])
            })?;
            (cfg.classical_g.unwrap_or(cfg.g), x0, cfg.classical_v0)
        }
    };
    let pair = paired_trajectories(&spec, g, x0, v0, cfg.horizon, cfg.step).map_err(numerical("trajectory pair"))?;
    let mut table = Table::new(["t", "x", "y", "theta_tilde", "infidelity", "identity_residual"]);
    let sep = pair.separation();
    for (i, y) in pair.signed_y().enumerate() {
        let th = pair.theta_tilde[i];
        table.push(vec![
            pair.times[i].into(),
            pair.x[i].into(),
            y.into(),
            th.into(),
            sep[i].into(),
            (sep[i] - pair.y[i] * (1.0 - th.cos())).abs().into(),
        ]);
    }
    let vanishing = pair.vanishing_times().map_err(numerical("vanishing times"))?;
    let growth = classify_theta_growth_with_window(pair.solution().trajectory(), growth_window(&cfg.coefficient))
        .map_err(numerical("phase growth"))?;
    let closed = match cfg.phase {
        PhaseChoice::Inverted(p) => {
            let (plus, minus) = p.theta_limits();
            let err = pair
                .times
                .iter()
                .zip(&pair.theta_tilde)
                .map(|(t, th)| (th - theta_inverted(&p, *t)).abs())
                .fold(0.0, f64::max);
            json!({ "theta_plus": plus, "theta_minus": minus, "max_theta_error": err })
        }
        PhaseChoice::Explicit { .. } => Value::Null,
    };
    let report = json!({
        "command": "classical",
        "g": g,
        "x0": x0,
        "v0": v0,
        "coefficient": coefficient_json(&cfg.coefficient),
        "horizon": cfg.horizon,
        "vanishing_times": vanishing,
        "identity_residual": pair.identity_residual(),
        "composition_residual": pair.composition_residual(),
        "ermakov_residual": pair.solution().residual(),
        "theta_growth": growth_json(&growth),
        "inverted_closed_form": closed,
    });
    Ok(Outputs {
        stem: stem(cfg, "classical"),
        table: Some(table),
        report,
    })
}

pub fn run_floquet(cfg: &RunConfig, _opts: &Options) -> Result<Outputs, CliError> {
    let spec = cfg.coefficient.build().map_err(numerical("coefficient"))?;
    let data = cfg.phase_data().map_err(numerical("initial phase data"))?;
    let mono = monodromy(&spec).map_err(numerical("monodromy"))?;
    let traj = trajectory(cfg, &spec, &data)?;
    let growth = classify_theta_growth_with_window(&traj, growth_window(&cfg.coefficient))
        .map_err(numerical("phase growth"))?;
    let mut table = Table::new(["t", "u", "udot", "theta", "theta_dot"]);
    for i in 0..traj.len() {
        table.push(vec![
            traj.times()[i].into(),
            traj.u()[i].into(),
            traj.udot()[i].into(),
            traj.theta()[i].into(),
            traj.theta_dot()[i].into(),
        ]);
    }
    let report = json!({
        "command": "floquet",
        "coefficient": coefficient_json(&cfg.coefficient),
        "initial": initial_json(&data),
        "floquet": floquet_json(&mono),
        "theta_growth": growth_json(&growth),
        "wronskian_drift": wronskian_drift(&traj),
        "route_discrepancy": traj.route_discrepancy(),
    });
    Ok(Outputs {
        stem: stem(cfg, "floquet"),
        table: Some(table),
        report,
    })
}

pub fn run_oracle_check(cfg: &RunConfig, opts: &Options) -> Result<Outputs, CliError> {
    let oc = cfg.oracle.unwrap_or(OracleConfig {
        x_max: 12.0,
        points: 4096,
        dt: 1e-3,
        step: std::f64::consts::PI / 20.0,
    });
    let spec = cfg.coefficient.build().map_err(numerical("coefficient"))?;
    let data = cfg.phase_data().map_err(numerical("initial phase data"))?;
    let state = build_state(cfg)?;
    let traj = trajectory(cfg, &spec, &data)?;
    let cmp = compare_with_oracle(cfg, &oc, &state, &traj, &data, &spec, opts.convention)?;
    let mut table = Table::new(["t", "F_closed_re", "F_closed_im", "F_oracle_re", "F_oracle_im", "abs_error"]);
    for ((t, a), b) in cmp.times.iter().zip(&cmp.closed).zip(&cmp.oracle) {
        table.push(vec![
            (*t).into(),
            a.re.into(),
            a.im.into(),
            b.re.into(),
            b.im.into(),
            (a - b).norm().into(),
        ]);
    }
    let conventions = if matches!(cfg.state, StateChoice::Special(SpecialState::ChiG3)) {
        let err = |conv| {
            cmp.times
                .iter()
                .zip(&cmp.oracle)
                .map(|(t, o)| -> Result<f64, CliError> {
                    let d = traj.phase_increment(*t).map_err(numerical("phase increment"))?;
                    Ok((fidelity_g3(d, conv) - o).norm())
                })
                .try_fold(0.0, |m: f64, e| e.map(|e| m.max(e)))
        };
        let series = err(Eq34Convention::Series)?;
        let paper = err(Eq34Convention::Paper)?;
        let matching = match (series <= 5e-3 && paper >= 0.1, paper <= 5e-3 && series >= 0.1) {
            (true, false) => "series",
            (false, true) => "paper",
            _ => "neither",
        };
        json!({ "series_max_error": series, "paper_max_error": paper, "matching": matching })
    } else {
        Value::Null
    };
    let report = json!({
        "command": "oracle-check",
        "state": cfg.state.name(),
        "g": cfg.g,
        "eq34_convention": opts.convention.as_str(),
        "coefficient": coefficient_json(&cfg.coefficient),
        "grid": { "x_max": oc.x_max, "points": oc.points, "dt": oc.dt },
        "max_error": cmp.max_error(),
        "max_step_norm_change": cmp.max_step_norm_change,
        "conventions": conventions,
    });
    Ok(Outputs {
        stem: stem(cfg, "oracle_check"),
        table: Some(table),
        report,
    })
}

/// Summary columns after the swept parameters.
pub const SWEEP_COLUMNS: [&str; 8] = [
    "trace",
    "lyapunov",
    "stability",
    "lower_bound",
    "min_abs_f",
    "recurrences",
    "theta_growth",
    "error",
];

fn sweep_row(cfg: &RunConfig, opts: &Options) -> Vec<Cell> {
    match fidelity_summary(cfg, opts, false) {
        Ok(s) => vec![
            s.monodromy.trace.into(),
            s.monodromy.lyapunov.into(),
            s.monodromy.stability.as_str().into(),
            s.lower_bound.into(),
            s.recurrences.infimum.into(),
            s.recurrences.recurrences.len().into(),
            s.growth.class().as_str().into(),
            "".into(),
        ],
        Err(e) => {
            let mut row: Vec<Cell> = (0..SWEEP_COLUMNS.len() - 1).map(|_| "".into()).collect();
            row.push(e.to_string().replace(['\n', '\r'], " ").into());
            row
        }
    }
}

pub fn run_sweep(sweep: &SweepConfig, opts: &Options) -> Result<Outputs, CliError> {
    if sweep.base.oracle.is_some() {
        return Err(CliError::Validation(vec![FieldError {
            path: "oracle.enabled".into(),
            message: "not supported in sweeps; use oracle-check on single points".into(),
        }]));
    }
    let points = sweep.points();
    let workers = opts
        .workers
        .or(sweep.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Worker(e.to_string()))?;
    let rows: Vec<Vec<Cell>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let mut row: Vec<Cell> = p.iter().map(|v| Cell::Num(*v)).collect();
                row.extend(sweep_row(&sweep.config_at(p), opts));
                row
            })
            .collect()
    });
    let mut columns: Vec<String> = sweep.axes.iter().map(|a| a.name.clone()).collect();
    columns.extend(SWEEP_COLUMNS.iter().map(|c| c.to_string()));
    let failures = rows
        .iter()
        .filter(|r| matches!(r.last(), Some(Cell::Text(s)) if !s.is_empty()))
        .count();
    let table = Table { columns, rows };
    let report = json!({
        "command": "sweep",
        "state": sweep.base.state.name(),
        "coefficient": coefficient_json(&sweep.base.coefficient),
        "axes": sweep.axes.iter().map(|a| json!({
            "name": a.name, "start": a.start, "end": a.end, "count": a.count,
        })).collect::<Vec<_>>(),
        "points": points.len(),
        "failures": failures,
        "horizon": sweep.base.horizon,
        "eq34_convention": opts.convention.as_str(),
    });
    Ok(Outputs {
        stem: stem(&sweep.base, "sweep"),
        table: Some(table),
        report,
    })
}
