//! Closed-form fidelity `F = exp(-i alpha dtheta) sum |lambda_n|^2 exp(i n dtheta)`,
//! its lower bound, recurrences and plateaus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hill::{classify_theta_growth, PhaseTrajectory, ThetaGrowth};
use crate::states::{special_state, SpecialState, StateSpec};

/// Weight sums further than this from 1 are reported as renormalized.
const RENORMALIZATION_SLACK: f64 = 1e-14;

/// Closed-form fidelity for a phase increment `dtheta`. The weights are
/// divided by their sum.
pub fn fidelity_general(spec: &StateSpec, dtheta: f64) -> Result<Complex64> {
    if spec.components().is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    let alpha = spec.alpha();
    let sum: Complex64 = spec
        .weights()
        .map(|(n, w)| Complex64::from_polar(w, (n as f64 - alpha) * dtheta))
        .sum();
    Ok(sum / spec.weight_sum())
}

pub fn fidelity_g1(dtheta: f64) -> Complex64 {
    Complex64::new(2.0 / 3.0, 0.0) + Complex64::from_polar(1.0 / 3.0, -2.0 * dtheta)
}

/// How the two-term fidelity of `x^3 exp(-x^2/2)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eq34Convention {
    /// `2/5 + 3/5 exp(-2i dtheta)`, the general series with `alpha = 3`.
    #[default]
    Series,
    /// `2/5 + 3/5 exp(-3i dtheta)` as printed.
    Paper,
}

impl Eq34Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Eq34Convention::Series => "series",
            Eq34Convention::Paper => "paper",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "series" => Some(Eq34Convention::Series),
            "paper" => Some(Eq34Convention::Paper),
            _ => None,
        }
    }
}

pub fn fidelity_g3(dtheta: f64, convention: Eq34Convention) -> Complex64 {
    let k = match convention {
        Eq34Convention::Series => 2.0,
        Eq34Convention::Paper => 3.0,
    };
    Complex64::new(2.0 / 5.0, 0.0) + Complex64::from_polar(3.0 / 5.0, -k * dtheta)
}

/// Points in the dense scan of [`lower_bound`].
const SCAN_POINTS: usize = 4096;

/// `min_{dtheta in [0, 2 pi]} |sum w_n exp(i n dtheta)| / sum w_n`: dense scan,
/// then golden-section refinement around the best few samples.
pub fn lower_bound(spec: &StateSpec) -> Result<f64> {
    if spec.components().is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    let total = spec.weight_sum();
    let weights: Vec<(f64, f64)> = spec.weights().map(|(n, w)| (n as f64, w / total)).collect();
    let modulus = |d: f64| -> f64 {
        weights
            .iter()
            .map(|&(n, w)| Complex64::from_polar(w, n * d))
            .sum::<Complex64>()
            .norm()
    };
    let h = 2.0 * PI / SCAN_POINTS as f64;
    let samples: Vec<f64> = (0..=SCAN_POINTS).map(|k| modulus(k as f64 * h)).collect();
    let mut best = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    for k in 0..=SCAN_POINTS {
        let left = if k == 0 { samples[SCAN_POINTS - 1] } else { samples[k - 1] };
        let right = if k == SCAN_POINTS { samples[1] } else { samples[k + 1] };
        if samples[k] <= left && samples[k] <= right {
            let c = k as f64 * h;
            best = best.min(golden_min(&modulus, c - h, c + h).1);
        }
    }
    Ok(best)
}

// Returns `(argmin, min)`.
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `F(t)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `theta(t) - theta(0)`; empty for curves not built from a phase.
    pub delta_theta: Vec<f64>,
    pub state: Option<StateSpec>,
    pub theta_growth: Option<ThetaGrowth>,
    /// Set when the weights did not sum to 1 and were rescaled.
    pub renormalized: bool,
}

impl FidelityCurve {
    pub fn from_values(times: Vec<f64>, values: Vec<Complex64>) -> Self {
        Self {
            times,
            values,
            delta_theta: Vec::new(),
            state: None,
            theta_growth: None,
            renormalized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// Closed-form fidelity on the trajectory's time grid.
pub fn fidelity_curve(traj: &PhaseTrajectory, spec: &StateSpec) -> Result<FidelityCurve> {
    let delta_theta = traj.phase_increments();
    let values = delta_theta
        .iter()
        .map(|&d| fidelity_general(spec, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityCurve {
        times: traj.times().to_vec(),
        values,
        delta_theta,
        state: Some(spec.clone()),
        theta_growth: classify_theta_growth(traj).ok(),
        renormalized: (spec.weight_sum() - 1.0).abs() > RENORMALIZATION_SLACK,
    })
}

/// Convenience form of [`fidelity_curve`] for the two finite-expansion states.
pub fn special_curve(traj: &PhaseTrajectory, id: SpecialState) -> Result<FidelityCurve> {
    fidelity_curve(traj, &special_state(id))
}

/// Extremum located on a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    /// Times with `|F| >= 1 - tol` (t = 0 excluded unless `|F|` never leaves 1).
    pub recurrences: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    /// Smallest `|F|` over the horizon, including refined minima.
    pub infimum: f64,
    /// `F` at the extrapolated `theta(+inf)`, when the phase saturates.
    pub plateau: Option<Complex64>,
    /// `F` at the extrapolated `theta(-inf)`, when the phase saturates.
    pub plateau_past: Option<Complex64>,
}

// Vertex of the parabola through three equally spaced samples.
fn refine(times: &[f64], m: &[f64], i: usize) -> Extremum {
    let (a, b, c) = (m[i - 1], m[i], m[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom == 0.0 {
        return Extremum { t: times[i], value: b };
    }
    let s = (0.5 * (a - c) / denom).clamp(-1.0, 1.0);
    let h = 0.5 * (times[i + 1] - times[i - 1]);
    Extremum {
        t: times[i] + s * h,
        value: b - 0.25 * (a - c) * s,
    }
}

// Extremum of the closed form between the neighbouring phase increments, mapped back to time by
// quadratic interpolation of `t(dtheta)`.
// `sign` is +1 for a minimum and -1 for a maximum.
fn refine_exact(curve: &FidelityCurve, spec: &StateSpec, i: usize, sign: f64) -> Extremum {
    let d = &curve.delta_theta;
    let t = &curve.times;
    let (lo, hi) = (d[i - 1].min(d[i + 1]), d[i - 1].max(d[i + 1]));
    let f = |x: f64| sign * fidelity_general(spec, x).map(|v| v.norm()).unwrap_or(f64::NAN);
    let (x, v) = golden_min(&f, lo, hi);
    let (d0, d1, d2) = (d[i - 1], d[i], d[i + 1]);
    let l0 = (x - d1) * (x - d2) / ((d0 - d1) * (d0 - d2));
    let l1 = (x - d0) * (x - d2) / ((d1 - d0) * (d1 - d2));
    let l2 = (x - d0) * (x - d1) / ((d2 - d0) * (d2 - d1));
    let tx = (l0 * t[i - 1] + l1 * t[i] + l2 * t[i + 1]).clamp(t[i - 1], t[i + 1]);
    Extremum { t: tx, value: sign * v }
}

/// Locates recurrences (local maxima whose refined `|F|` is at least `1 - tol`), local minima and
/// plateaus of a curve.
pub fn detect_recurrences(curve: &FidelityCurve, tol: f64) -> Result<RecurrenceReport> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", "must lie in (0, 1)"));
    }
    let m = curve.magnitudes();
    let times = &curve.times;
    let n = m.len();
    let threshold = 1.0 - tol;
    // Strictly increasing phase lets extrema be refined on the closed form itself.
    let exact = curve.state.as_ref().filter(|_| {
        curve.delta_theta.len() == n && curve.delta_theta.windows(2).all(|w| w[1] > w[0])
    });
    let refine_at = |i: usize, sign: f64| match exact {
        Some(spec) => refine_exact(curve, spec, i, sign),
        None => refine(times, &m, i),
    };
    let mut recurrences = Vec::new();
    let mut minima = Vec::new();
    let mut infimum = m.iter().cloned().fold(f64::INFINITY, f64::min);

    if n > 0 && m.iter().all(|&v| v >= threshold) {
        recurrences = times.iter().zip(&m).map(|(&t, &value)| Extremum { t, value }).collect();
    } else {
        for i in 1..n.saturating_sub(1) {
            let (a, b, c) = (m[i - 1], m[i], m[i + 1]);
            if b > a && b >= c {
                let mut e = refine_at(i, -1.0);
                e.value = e.value.min(1.0);
                if e.value >= threshold && times[i] != 0.0 {
                    recurrences.push(e);
                }
            } else if b < a && b <= c {
                let e = refine_at(i, 1.0);
                infimum = infimum.min(e.value);
                minima.push(e);
            }
        }
        // A maximum on the last sample counts only if it reaches 1 - tol.
        if n >= 2 && m[n - 1] >= threshold && m[n - 1] >= m[n - 2] && times[n - 1] != 0.0 {
            recurrences.push(Extremum {
                t: times[n - 1],
                value: m[n - 1],
            });
        }
    }

    let plateau_at = |d: Option<f64>| -> Result<Option<Complex64>> {
        match (d, &curve.state) {
            (Some(d), Some(spec)) => Ok(Some(fidelity_general(spec, d)?)),
            _ => Ok(None),
        }
    };
    let growth = curve.theta_growth;
    Ok(RecurrenceReport {
        recurrences,
        minima,
        infimum,
        plateau: plateau_at(growth.and_then(|g| g.delta_plus()))?,
        plateau_past: plateau_at(growth.and_then(|g| g.delta_minus()))?,
    })
}
