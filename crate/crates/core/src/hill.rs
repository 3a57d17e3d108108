//! Complex Hill equation `x'' + f(t) x = 0`, amplitude/phase coordinates and
//! Floquet classification.
//!
//! A complex solution is written `x = exp(u + i theta)`. Because `f` is real
//! the Wronskian `Im(conj(x) x') = theta' exp(2u)` is a constant, written
//! `exp(2 eps)`. The phase increment `theta(t) - theta(0)` is the single
//! dynamical input of every fidelity formula in this crate.
//!
//! The linear equation is integrated (never the nonlinear equation for `u`)
//! and `(u, u', theta)` are read off the complex state. The phase is carried
//! by two independent routes: continuous unwrapping of `arg x`, and the
//! quadrature `exp(2 eps) * int exp(-2u)` integrated as an extra ODE component.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::ode::{Integrator, Stepping, Tolerances};

/// One harmonic of a Fourier-series coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub harmonic: u32,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Constant { value: f64 },
    Mathieu { gamma: f64, delta: f64 },
    Fourier { offset: f64, terms: Vec<FourierTerm> },
}

/// The periodic coefficient `f(t)`. Constant coefficients carry a nominal
/// period used for monodromy and phase-growth windows.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpec {
    kind: Kind,
    period: f64,
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, "must be finite"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(name, "must be positive and finite"))
    }
}

impl CoefficientSpec {
    pub fn constant(value: f64, period: f64) -> Result<Self> {
        Ok(Self {
            kind: Kind::Constant {
                value: finite("value", value)?,
            },
            period: positive("period", period)?,
        })
    }

    /// `f(t) = gamma + delta cos(omega t)`.
    pub fn mathieu(gamma: f64, delta: f64, omega: f64) -> Result<Self> {
        let omega = positive("omega", omega)?;
        Ok(Self {
            kind: Kind::Mathieu {
                gamma: finite("gamma", gamma)?,
                delta: finite("delta", delta)?,
            },
            period: TAU / omega,
        })
    }

    /// `f(t) = offset + sum_k (cos_k cos(k omega t) + sin_k sin(k omega t))`.
    pub fn fourier(offset: f64, omega: f64, terms: Vec<FourierTerm>) -> Result<Self> {
        let omega = positive("omega", omega)?;
        for term in &terms {
            if term.harmonic == 0 {
                return Err(invalid("harmonic", "harmonic index must be >= 1"));
            }
            finite("cos", term.cos)?;
            finite("sin", term.sin)?;
        }
        Ok(Self {
            kind: Kind::Fourier {
                offset: finite("offset", offset)?,
                terms,
            },
            period: TAU / omega,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        TAU / self.period
    }

    /// True for constant coefficients (where the period is only nominal).
    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant { .. })
    }

    /// The constant value, when the coefficient is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            Kind::Constant { value } => Some(value),
            _ => None,
        }
    }

    /// Evaluates `f(t)`. The time is reduced modulo the period first, so
    /// `eval(t + T)` and `eval(t)` agree to rounding of the reduction.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant { value } => *value,
            Kind::Mathieu { gamma, delta } => {
                if *delta == 0.0 {
                    return *gamma;
                }
                let phase = self.omega() * t.rem_euclid(self.period);
                gamma + delta * phase.cos()
            }
            Kind::Fourier { offset, terms } => {
                let phase = self.omega() * t.rem_euclid(self.period);
                offset
                    + terms
                        .iter()
                        .map(|k| {
                            let arg = k.harmonic as f64 * phase;
                            k.cos * arg.cos() + k.sin * arg.sin()
                        })
                        .sum::<f64>()
            }
        }
    }
}

/// Initial amplitude/phase data `(u0, u0', theta0, eps)`. The initial phase
/// velocity is implied: `theta'(0) = exp(-2(u0 - eps))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialPhaseData {
    pub u0: f64,
    pub udot0: f64,
    pub theta0: f64,
    pub epsilon: f64,
}

impl InitialPhaseData {
    pub fn new(u0: f64, udot0: f64, theta0: f64, epsilon: f64) -> Result<Self> {
        let data = Self {
            u0: finite("u0", u0)?,
            udot0: finite("udot0", udot0)?,
            theta0: finite("theta0", theta0)?,
            epsilon: finite("epsilon", epsilon)?,
        };
        let rate = data.theta_dot0();
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid("u0", "implied phase velocity exp(-2(u0 - eps)) is not representable"));
        }
        Ok(data)
    }

    pub fn theta_dot0(&self) -> f64 {
        (-2.0 * (self.u0 - self.epsilon)).exp()
    }

    /// The conserved Wronskian constant `exp(2 eps)`.
    pub fn wronskian(&self) -> f64 {
        (2.0 * self.epsilon).exp()
    }

    /// Complex initial position and velocity of the Hill solution.
    pub fn complex_state(&self) -> (Complex64, Complex64) {
        let x0 = Complex64::from_polar(self.u0.exp(), self.theta0);
        let v0 = Complex64::new(self.udot0, self.theta_dot0()) * x0;
        (x0, v0)
    }
}

/// Integration settings for the complex Hill solver.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HillOptions {
    pub stepping: Stepping,
}

impl HillOptions {
    pub fn adaptive(rtol: f64, atol: f64) -> Result<Self> {
        Ok(Self {
            stepping: Stepping::Adaptive(Tolerances::new(rtol, atol)?),
        })
    }

    pub fn fixed() -> Self {
        Self {
            stepping: Stepping::Fixed,
        }
    }
}

const AMPLITUDE_MAX: f64 = 1e150;
const AMPLITUDE_MIN: f64 = 1e-150;
// Any accepted step whose phase increment reaches this is refined.
const UNWRAP_LIMIT: f64 = PI / 2.0;

/// Sampled `(u, u', theta)` of a complex Hill solution on a uniform,
/// ascending time grid that contains `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    times: Vec<f64>,
    u: Vec<f64>,
    udot: Vec<f64>,
    theta: Vec<f64>,
    theta_dot: Vec<f64>,
    theta_quad: Vec<f64>,
    origin: usize,
    step: f64,
    coefficient: CoefficientSpec,
    initial: InitialPhaseData,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    x: Complex64,
    v: Complex64,
    theta: f64,
    theta_quad: f64,
}

fn uniform_grid(horizon: f64, step: f64) -> Result<(usize, f64)> {
    finite("horizon", horizon)?;
    positive("step", step)?;
    if horizon == 0.0 {
        return Ok((0, step));
    }
    let n = ((horizon.abs() / step).round() as usize).max(1);
    Ok((n, horizon / n as f64))
}

fn integrate_branch(
    spec: &CoefficientSpec,
    init: &InitialPhaseData,
    horizon: f64,
    step: f64,
    opts: &HillOptions,
) -> Result<Vec<Sample>> {
    let (n, h) = uniform_grid(horizon, step)?;
    let w = init.wronskian();
    let (x0, v0) = init.complex_state();
    let rhs = |t: f64, y: &[f64; 5]| {
        let f = spec.eval(t);
        let r2 = y[0] * y[0] + y[1] * y[1];
        [y[2], y[3], -f * y[0], -f * y[1], w / r2]
    };
    let fixed = matches!(opts.stepping, Stepping::Fixed);
    let mut integ = Integrator::new(opts.stepping);
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = [x0.re, x0.im, v0.re, v0.im, 0.0];
    let mut theta = init.theta0;
    samples.push(Sample {
        t: 0.0,
        x: x0,
        v: v0,
        theta,
        theta_quad: init.theta0,
    });
    for i in 0..n {
        let t0 = i as f64 * h;
        let t1 = (i + 1) as f64 * h;
        let mut pending = 0.0;
        state = integ.advance(&rhs, t0, state, t1, |t_new, old, new| {
            let r2 = new[0] * new[0] + new[1] * new[1];
            let r = r2.sqrt();
            if !(r < AMPLITUDE_MAX) {
                return Err(Error::Overflow { t: t_new });
            }
            if r < AMPLITUDE_MIN {
                return Err(Error::Underflow { t: t_new });
            }
            let cross = old[0] * new[1] - old[1] * new[0];
            let dot = old[0] * new[0] + old[1] * new[1];
            let inc = cross.atan2(dot);
            if inc.abs() >= UNWRAP_LIMIT {
                if fixed {
                    return Err(Error::StepTooCoarse { t: t_new, increment: inc });
                }
                return Ok(false);
            }
            pending += inc;
            Ok(true)
        })?;
        theta += pending;
        samples.push(Sample {
            t: t1,
            x: Complex64::new(state[0], state[1]),
            v: Complex64::new(state[2], state[3]),
            theta,
            theta_quad: init.theta0 + state[4],
        });
    }
    Ok(samples)
}

/// Integrates the complex Hill equation from `t = 0` to `horizon` (which may be
/// negative) with output spacing close to `step`. The spacing is adjusted so
/// the grid ends exactly at `horizon`.
pub fn integrate_complex_hill(
    spec: &CoefficientSpec,
    init: &InitialPhaseData,
    horizon: f64,
    step: f64,
) -> Result<PhaseTrajectory> {
    integrate_complex_hill_with(spec, init, horizon, step, &HillOptions::default())
}

pub fn integrate_complex_hill_with(
    spec: &CoefficientSpec,
    init: &InitialPhaseData,
    horizon: f64,
    step: f64,
    opts: &HillOptions,
) -> Result<PhaseTrajectory> {
    let mut samples = integrate_branch(spec, init, horizon, step, opts)?;
    let h = if samples.len() > 1 {
        (samples[1].t - samples[0].t).abs()
    } else {
        step
    };
    let origin = if horizon < 0.0 {
        samples.reverse();
        samples.len() - 1
    } else {
        0
    };
    Ok(PhaseTrajectory::from_samples(samples, origin, h, spec, init))
}

/// Integrates forward to `+half_span` and backward to `-half_span` and merges
/// both branches into one ascending grid.
pub fn integrate_symmetric(
    spec: &CoefficientSpec,
    init: &InitialPhaseData,
    half_span: f64,
    step: f64,
) -> Result<PhaseTrajectory> {
    integrate_symmetric_with(spec, init, half_span, step, &HillOptions::default())
}

pub fn integrate_symmetric_with(
    spec: &CoefficientSpec,
    init: &InitialPhaseData,
    half_span: f64,
    step: f64,
    opts: &HillOptions,
) -> Result<PhaseTrajectory> {
    let half_span = finite("half_span", half_span)?.abs();
    let forward = integrate_branch(spec, init, half_span, step, opts)?;
    let backward = integrate_branch(spec, init, -half_span, step, opts)?;
    let h = if forward.len() > 1 {
        forward[1].t - forward[0].t
    } else {
        step
    };
    let origin = backward.len() - 1;
    let mut samples: Vec<Sample> = backward.into_iter().rev().collect();
    samples.extend(forward.into_iter().skip(1));
    Ok(PhaseTrajectory::from_samples(samples, origin, h, spec, init))
}

impl PhaseTrajectory {
    fn from_samples(
        samples: Vec<Sample>,
        origin: usize,
        step: f64,
        spec: &CoefficientSpec,
        init: &InitialPhaseData,
    ) -> Self {
        let n = samples.len();
        let mut traj = Self {
            times: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            udot: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
            theta_dot: Vec::with_capacity(n),
            theta_quad: Vec::with_capacity(n),
            origin,
            step,
            coefficient: spec.clone(),
            initial: *init,
        };
        for s in samples {
            let ratio = s.v / s.x;
            traj.times.push(s.t);
            traj.u.push(s.x.norm().ln());
            traj.udot.push(ratio.re);
            traj.theta.push(s.theta);
            traj.theta_dot.push(ratio.im);
            traj.theta_quad.push(s.theta_quad);
        }
        // The origin sample carries the initial data verbatim.
        traj.u[origin] = init.u0;
        traj.udot[origin] = init.udot0;
        traj.theta[origin] = init.theta0;
        traj.theta_quad[origin] = init.theta0;
        traj
    }

    /// Builds a trajectory from a closed-form complex solution `t -> (x, x')`.
    /// `times` must be uniform, ascending and contain `0`. The phase is
    /// unwrapped outward from the origin; the quadrature route is not
    /// available and mirrors the unwrapped phase.
    pub fn from_analytic<F>(
        spec: &CoefficientSpec,
        init: &InitialPhaseData,
        times: &[f64],
        solution: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> (Complex64, Complex64),
    {
        let origin = times
            .iter()
            .position(|&t| t == 0.0)
            .ok_or_else(|| invalid("times", "grid must contain t = 0"))?;
        let step = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
        let states: Vec<(Complex64, Complex64)> = times.iter().map(|&t| solution(t)).collect();
        let mut theta = vec![0.0; times.len()];
        theta[origin] = init.theta0;
        for i in origin + 1..times.len() {
            theta[i] = theta[i - 1] + (states[i].0 / states[i - 1].0).arg();
        }
        for i in (0..origin).rev() {
            theta[i] = theta[i + 1] + (states[i].0 / states[i + 1].0).arg();
        }
        let samples = times
            .iter()
            .zip(&states)
            .zip(&theta)
            .map(|((&t, &(x, v)), &th)| Sample {
                t,
                x,
                v,
                theta: th,
                theta_quad: th,
            })
            .collect();
        Ok(Self::from_samples(samples, origin, step, spec, init))
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn udot(&self) -> &[f64] {
        &self.udot
    }
    /// Unwrapped phase samples (absolute, `theta[origin] = theta0`).
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn theta_dot(&self) -> &[f64] {
        &self.theta_dot
    }
    /// Phase samples from the quadrature route (absolute).
    pub fn theta_quadrature(&self) -> &[f64] {
        &self.theta_quad
    }
    pub fn origin(&self) -> usize {
        self.origin
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn coefficient(&self) -> &CoefficientSpec {
        &self.coefficient
    }
    pub fn initial(&self) -> &InitialPhaseData {
        &self.initial
    }
    pub fn wronskian(&self) -> f64 {
        self.initial.wronskian()
    }
    pub fn start(&self) -> f64 {
        self.times[0]
    }
    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Phase increments `theta_i - theta(0)` for every sample.
    pub fn phase_increments(&self) -> Vec<f64> {
        let base = self.theta[self.origin];
        self.theta.iter().map(|th| th - base).collect()
    }

    /// Complex solution value at sample `i`.
    pub fn x(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.u[i].exp(), self.theta[i])
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = (self.start(), self.end());
        let slack = 1e-9 * self.step.abs().max(1e-300);
        if !(t >= start - slack && t <= end + slack) {
            return Err(Error::OutsideGrid { t, start, end });
        }
        if self.times.len() == 1 {
            return Ok((0, 0.0));
        }
        let pos = (t - start) / self.step;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            return Ok(((nearest as usize).min(self.times.len() - 1), 0.0));
        }
        let i = (pos.floor() as usize).min(self.times.len() - 2);
        Ok((i, (t - self.times[i]) / self.step))
    }

    fn hermite(&self, values: &[f64], i: usize, s: f64) -> f64 {
        if s == 0.0 {
            return values[i];
        }
        let h = self.step;
        let (p0, p1) = (values[i], values[i + 1]);
        let (m0, m1) = (self.theta_dot[i] * h, self.theta_dot[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    /// `theta(t) - theta(0)` from the unwrapped phase. Off-grid times use
    /// cubic Hermite interpolation with the sampled phase velocity.
    pub fn phase_increment(&self, t: f64) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        Ok(self.hermite(&self.theta, i, s) - self.theta[self.origin])
    }

    /// `(u, u', theta)` at `t`. Off-grid values use cubic Hermite
    /// interpolation; `u''` comes from the u-equation
    /// `u'' = -f - u'^2 + theta'^2`.
    pub fn phase_state(&self, t: f64) -> Result<(f64, f64, f64)> {
        let (i, s) = self.locate(t)?;
        if s == 0.0 {
            return Ok((self.u[i], self.udot[i], self.theta[i]));
        }
        let h = self.step;
        let cubic = |p0: f64, p1: f64, m0: f64, m1: f64| {
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 * h + (-2.0 * s3 + 3.0 * s2) * p1
                + (s3 - s2) * m1 * h
        };
        let uddot = |j: usize| {
            -self.coefficient.eval(self.times[j]) - self.udot[j].powi(2) + self.theta_dot[j].powi(2)
        };
        let u = cubic(self.u[i], self.u[i + 1], self.udot[i], self.udot[i + 1]);
        let udot = cubic(self.udot[i], self.udot[i + 1], uddot(i), uddot(i + 1));
        let theta = self.hermite(&self.theta, i, s);
        Ok((u, udot, theta))
    }

    /// `exp(2 eps) * int_0^t exp(-2u)` from the quadrature route.
    pub fn phase_increment_quadrature(&self, t: f64) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        Ok(self.hermite(&self.theta_quad, i, s) - self.theta_quad[self.origin])
    }

    /// Largest gap between the two phase routes over the grid.
    pub fn route_discrepancy(&self) -> f64 {
        let b0 = self.theta[self.origin];
        let b1 = self.theta_quad[self.origin];
        self.theta
            .iter()
            .zip(&self.theta_quad)
            .map(|(a, q)| ((a - b0) - (q - b1)).abs())
            .fold(0.0, f64::max)
    }

    /// Max over samples of `|u'' + u'^2 - exp(-4(u - eps)) + f|`, with `u''`
    /// from central differences of `u'`. Second order in the sample step.
    pub fn u_equation_residual(&self) -> f64 {
        let eps = self.initial.epsilon;
        let h = self.step;
        (1..self.times.len().saturating_sub(1))
            .map(|i| {
                let uddot = (self.udot[i + 1] - self.udot[i - 1]) / (2.0 * h);
                let f = self.coefficient.eval(self.times[i]);
                (uddot + self.udot[i].powi(2) - (-4.0 * (self.u[i] - eps)).exp() + f).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `theta(t) - theta(0)` on a trajectory.
pub fn phase_increment(traj: &PhaseTrajectory, t: f64) -> Result<f64> {
    traj.phase_increment(t)
}

/// Maximum relative drift `|theta' exp(2u) - exp(2 eps)| / exp(2 eps)`.
pub fn wronskian_drift(traj: &PhaseTrajectory) -> f64 {
    let w = traj.wronskian();
    traj.theta_dot
        .iter()
        .zip(&traj.u)
        .map(|(td, u)| ((td * (2.0 * u).exp() - w) / w).abs())
        .fold(0.0, f64::max)
}

/// Floquet stability class of Hill's equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

/// `||tr M| - 2|` at or below this is reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-8;

/// Period map of Hill's equation on `(x, x')`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyReport {
    pub matrix: [[f64; 2]; 2],
    pub period: f64,
    pub trace: f64,
    pub determinant: f64,
    pub multipliers: [Complex64; 2],
    pub lyapunov: f64,
    pub stability: Stability,
}

pub fn monodromy(spec: &CoefficientSpec) -> Result<MonodromyReport> {
    monodromy_with(spec, Tolerances::new(1e-13, 1e-13)?)
}

pub fn monodromy_with(spec: &CoefficientSpec, tol: Tolerances) -> Result<MonodromyReport> {
    let period = spec.period();
    let rhs = |t: f64, y: &[f64; 4]| {
        let f = spec.eval(t);
        [y[1], -f * y[0], y[3], -f * y[2]]
    };
    let mut integ = Integrator::new(Stepping::Adaptive(tol));
    let y = integ.advance(&rhs, 0.0, [1.0, 0.0, 0.0, 1.0], period, |t, _, new| {
        if new.iter().any(|v| !v.is_finite() || v.abs() > AMPLITUDE_MAX) {
            return Err(Error::Overflow { t });
        }
        Ok(true)
    })?;
    // Columns are the images of (1, 0) and (0, 1).
    let matrix = [[y[0], y[2]], [y[1], y[3]]];
    let trace = matrix[0][0] + matrix[1][1];
    let determinant = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let disc = trace * trace - 4.0 * determinant;
    let multipliers = if disc < 0.0 {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(0.5 * trace, im), Complex64::new(0.5 * trace, -im)]
    } else {
        let big = 0.5 * (trace + trace.signum() * disc.sqrt());
        let small = if big != 0.0 { determinant / big } else { 0.0 };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    };
    let stability = if (trace.abs() - 2.0).abs() <= MARGINAL_BAND {
        Stability::Marginal
    } else if trace.abs() < 2.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let lyapunov = match stability {
        Stability::Unstable => multipliers[0].norm().max(multipliers[1].norm()).ln() / period,
        _ => 0.0,
    };
    Ok(MonodromyReport {
        matrix,
        period,
        trace,
        determinant,
        multipliers,
        lyapunov,
        stability,
    })
}

/// Minimum number of whole windows needed for a growth verdict.
pub const MIN_WINDOWS: usize = 20;
/// Number of trailing windows used in the geometric fit.
pub const FIT_WINDOWS: usize = 10;
/// Fitted per-window ratio below which the phase is declared saturating.
pub const SATURATION_RATIO: f64 = 0.9;

/// Phase-growth verdict for one time direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthSide {
    /// Per-window increments stay bounded below.
    Unbounded { ratio: f64 },
    /// Increments decay geometrically; `limit` is the extrapolated
    /// `theta(+-inf) - theta(0)`.
    Saturating { limit: f64, ratio: f64 },
    /// Fewer than [`MIN_WINDOWS`] windows of data.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    Unbounded,
    Saturating,
    Inconclusive,
}

impl GrowthClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthClass::Unbounded => "unbounded",
            GrowthClass::Saturating => "saturating",
            GrowthClass::Inconclusive => "inconclusive",
        }
    }
}

/// Phase-growth classification in the future and (if sampled) the past.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrowth {
    pub future: Option<GrowthSide>,
    pub past: Option<GrowthSide>,
    pub window: f64,
}

impl ThetaGrowth {
    pub fn class(&self) -> GrowthClass {
        let sides = [self.future, self.past];
        let present = sides.iter().flatten();
        if present.clone().any(|s| matches!(s, GrowthSide::Unbounded { .. })) {
            GrowthClass::Unbounded
        } else if present.clone().any(|s| matches!(s, GrowthSide::Saturating { .. })) {
            GrowthClass::Saturating
        } else {
            GrowthClass::Inconclusive
        }
    }

    /// Extrapolated `theta(+inf) - theta(0)`.
    pub fn delta_plus(&self) -> Option<f64> {
        match self.future {
            Some(GrowthSide::Saturating { limit, .. }) => Some(limit),
            _ => None,
        }
    }

    /// Extrapolated `theta(-inf) - theta(0)`.
    pub fn delta_minus(&self) -> Option<f64> {
        match self.past {
            Some(GrowthSide::Saturating { limit, .. }) => Some(limit),
            _ => None,
        }
    }
}

fn classify_side(traj: &PhaseTrajectory, end: f64, window: f64) -> Result<GrowthSide> {
    let span = end.abs();
    let count = (span / window * (1.0 + 1e-12)).floor() as usize;
    if count < MIN_WINDOWS {
        return Ok(GrowthSide::Inconclusive);
    }
    let dir = end.signum();
    let boundary = |j: usize| end - dir * (count - j) as f64 * window;
    let mut increments = Vec::with_capacity(count);
    let mut prev = traj.phase_increment(boundary(0))?;
    for j in 1..=count {
        let next = traj.phase_increment(boundary(j))?;
        increments.push((next - prev).abs());
        prev = next;
    }
    let last = *increments.last().expect("count >= MIN_WINDOWS");
    let tail = &increments[count - FIT_WINDOWS..];
    let final_delta = traj.phase_increment(end)?;
    if tail.iter().any(|d| *d <= f64::MIN_POSITIVE) {
        return Ok(GrowthSide::Saturating {
            limit: final_delta,
            ratio: 0.0,
        });
    }
    // Least-squares slope of ln(increment) against window index.
    let n = tail.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = tail.iter().map(|d| d.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, d) in tail.iter().enumerate() {
        let dx = k as f64 - xm;
        sxy += dx * (d.ln() - ym);
        sxx += dx * dx;
    }
    let ratio = (sxy / sxx).exp();
    if ratio < SATURATION_RATIO {
        let limit = final_delta + dir * last * ratio / (1.0 - ratio);
        Ok(GrowthSide::Saturating { limit, ratio })
    } else {
        Ok(GrowthSide::Unbounded { ratio })
    }
}

/// Classifies phase growth using the coefficient's period as the window.
pub fn classify_theta_growth(traj: &PhaseTrajectory) -> Result<ThetaGrowth> {
    classify_theta_growth_with_window(traj, traj.coefficient().period())
}

pub fn classify_theta_growth_with_window(traj: &PhaseTrajectory, window: f64) -> Result<ThetaGrowth> {
    let window = positive("window", window)?;
    let future = if traj.end() > 0.0 {
        Some(classify_side(traj, traj.end(), window)?)
    } else {
        None
    };
    let past = if traj.start() < 0.0 {
        Some(classify_side(traj, traj.start(), window)?)
    } else {
        None
    };
    Ok(ThetaGrowth { future, past, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> (CoefficientSpec, InitialPhaseData) {
        (
            CoefficientSpec::constant(1.0, TAU).unwrap(),
            InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap(),
        )
    }

    #[test]
    fn coefficient_examples() {
        let m = CoefficientSpec::mathieu(1.0, 0.0, 1.0).unwrap();
        assert_eq!(m.eval(17.3), 1.0);
        let c = CoefficientSpec::constant(-1.0, 1.0).unwrap();
        assert_eq!(c.eval(123.4), -1.0);
        let m = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
        assert_eq!(m.eval(0.0), 2.5);
        for &t in &[0.3, -7.1, 1234.5] {
            assert!((m.eval(t) - m.eval(t + m.period())).abs() < 1e-12);
        }
    }

    #[test]
    fn malformed_coefficients_rejected() {
        assert!(CoefficientSpec::mathieu(1.0, 1.0, 0.0).is_err());
        assert!(CoefficientSpec::mathieu(1.0, 1.0, -2.0).is_err());
        assert!(CoefficientSpec::constant(1.0, 0.0).is_err());
        assert!(CoefficientSpec::constant(f64::NAN, 1.0).is_err());
        let bad = FourierTerm {
            harmonic: 0,
            cos: 1.0,
            sin: 0.0,
        };
        assert!(CoefficientSpec::fourier(0.0, 1.0, vec![bad]).is_err());
    }

    #[test]
    fn fourier_series_matches_mathieu() {
        let term = FourierTerm {
            harmonic: 1,
            cos: 0.5,
            sin: 0.0,
        };
        let f = CoefficientSpec::fourier(2.0, 2.0, vec![term]).unwrap();
        let m = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
        for &t in &[0.0, 0.4, 3.3, -2.0] {
            assert!((f.eval(t) - m.eval(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn circular_solution_has_linear_phase() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, 10.0, 0.05).unwrap();
        for (i, &t) in traj.times().iter().enumerate() {
            assert!(traj.u()[i].abs() < 1e-9);
            assert!((traj.theta()[i] - t).abs() < 1e-9);
        }
        assert!((traj.phase_increment(PI).unwrap() - PI).abs() < 1e-9);
    }

    #[test]
    fn zero_horizon_is_single_sample() {
        let spec = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
        let init = InitialPhaseData::new(0.3, -0.2, 1.1, 0.1).unwrap();
        let traj = integrate_complex_hill(&spec, &init, 0.0, 0.1).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.u()[0], 0.3);
        assert_eq!(traj.udot()[0], -0.2);
        assert_eq!(traj.theta()[0], 1.1);
        assert_eq!(traj.phase_increment(0.0).unwrap(), 0.0);
    }

    #[test]
    fn backward_horizon_keeps_ascending_grid() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, -4.0, 0.1).unwrap();
        assert_eq!(traj.end(), 0.0);
        assert!((traj.start() + 4.0).abs() < 1e-12);
        assert!((traj.phase_increment(-4.0).unwrap() + 4.0).abs() < 1e-9);
        assert!(traj.theta().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn out_of_grid_time_is_error() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, 1.0, 0.1).unwrap();
        assert!(matches!(traj.phase_increment(1.5), Err(Error::OutsideGrid { .. })));
    }

    #[test]
    fn coarse_fixed_step_is_refused() {
        let (spec, init) = unit_circle();
        let err = integrate_complex_hill_with(&spec, &init, 10.0, 2.0, &HillOptions::fixed()).unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse { .. }));
    }

    #[test]
    fn adaptive_mode_refines_coarse_output_steps() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, 12.0, 3.0).unwrap();
        assert!((traj.phase_increment(12.0).unwrap() - 12.0).abs() < 1e-8);
    }

    #[test]
    fn overflow_reported_with_time() {
        let spec = CoefficientSpec::constant(-100.0, 1.0).unwrap();
        let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
        match integrate_complex_hill(&spec, &init, 100.0, 0.5) {
            Err(Error::Overflow { t }) => assert!(t > 30.0 && t < 40.0, "t = {t}"),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn analytic_trajectory_has_zero_drift() {
        let (spec, init) = unit_circle();
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let traj = PhaseTrajectory::from_analytic(&spec, &init, &times, |t| {
            let x = Complex64::from_polar(1.0, t);
            (x, Complex64::i() * x)
        })
        .unwrap();
        assert!(wronskian_drift(&traj) < 1e-12);
    }

    #[test]
    fn monodromy_constant_coefficients() {
        let r = monodromy(&CoefficientSpec::constant(2.0, TAU).unwrap()).unwrap();
        let expected = 2.0 * (TAU * 2f64.sqrt()).cos();
        assert!((r.trace - expected).abs() < 1e-9);
        assert_eq!(r.stability, Stability::Stable);
        assert_eq!(r.lyapunov, 0.0);

        let r = monodromy(&CoefficientSpec::constant(-1.0, TAU).unwrap()).unwrap();
        assert!((r.trace - 2.0 * TAU.cosh()).abs() / r.trace < 1e-10);
        assert_eq!(r.stability, Stability::Unstable);
        assert!((r.lyapunov - 1.0).abs() < 1e-10);

        let r = monodromy(&CoefficientSpec::constant(1.0, TAU).unwrap()).unwrap();
        assert!((r.trace - 2.0).abs() < 1e-9);
        assert_eq!(r.stability, Stability::Marginal);
    }

    #[test]
    fn theta_growth_unbounded_for_circle() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, 21.0 * TAU, 0.1).unwrap();
        let growth = classify_theta_growth(&traj).unwrap();
        assert_eq!(growth.class(), GrowthClass::Unbounded);
        assert!(growth.past.is_none());
    }

    #[test]
    fn theta_growth_inconclusive_on_short_data() {
        let (spec, init) = unit_circle();
        let traj = integrate_complex_hill(&spec, &init, 5.0 * TAU, 0.1).unwrap();
        assert_eq!(classify_theta_growth(&traj).unwrap().class(), GrowthClass::Inconclusive);
    }
}
