//! Classical trajectories of `H_0(t)` and `H_g(t)` sharing initial data.
//!
//! The `H_g` trajectory `y > 0` solves the Ermakov-Pinney equation
//! `y'' + f y - 2 g^2 / y^3 = 0` and is obtained as `y = exp(u)` from a complex
//! Hill solution with Wronskian `g sqrt(2)`. The relative phase is
//! `theta~(t) = g sqrt(2) int_0^t y^-2` and the `H_0` trajectory is
//! `x = y cos theta~`, so `|x - y| = y (1 - cos theta~)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hill::{integrate_complex_hill, CoefficientSpec, InitialPhaseData, PhaseTrajectory};
use crate::ode::{Integrator, Stepping, Tolerances};

/// `y`, `y'` and `theta~` of an Ermakov-Pinney solution on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErmakovSolution {
    pub times: Vec<f64>,
    pub y: Vec<f64>,
    pub ydot: Vec<f64>,
    pub theta_tilde: Vec<f64>,
    pub g: f64,
    trajectory: PhaseTrajectory,
}

impl ErmakovSolution {
    pub fn trajectory(&self) -> &PhaseTrajectory {
        &self.trajectory
    }

    /// Max of `|y'' + f y - 2 g^2 / y^3|` with `y'' = (theta'^2 - f) y` from the
    /// sampled complex state, i.e. `|W(t)^2 - 2 g^2| / y^3`.
    pub fn residual(&self) -> f64 {
        let g2 = 2.0 * self.g * self.g;
        self.trajectory
            .theta_dot()
            .iter()
            .zip(&self.y)
            .map(|(td, y)| (td * td * y - g2 / y.powi(3)).abs())
            .fold(0.0, f64::max)
    }

    /// `1/2 (y'^2 + y^2) + g^2 / y^2` at every sample (conserved for `f = 1`).
    pub fn energy(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.ydot)
            .map(|(y, v)| 0.5 * (v * v + y * y) + self.g * self.g / (y * y))
            .collect()
    }
}

fn ermakov_initial(g: f64, y0: f64, ydot0: f64) -> Result<InitialPhaseData> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(invalid("g", "the Ermakov-Pinney route needs g > 0"));
    }
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(invalid("y0", "must be positive and finite"));
    }
    if !ydot0.is_finite() {
        return Err(invalid("ydot0", "must be finite"));
    }
    InitialPhaseData::new(y0.ln(), ydot0 / y0, 0.0, 0.5 * (g * SQRT_2).ln())
}

/// Solves `y'' + f y - 2 g^2/y^3 = 0`, `y(0) = y0 > 0`, `y'(0) = ydot0`, from
/// `t = 0` to `horizon` (either sign) with output spacing close to `step`.
pub fn ermakov_pinney_solve(
    spec: &CoefficientSpec,
    g: f64,
    y0: f64,
    ydot0: f64,
    horizon: f64,
    step: f64,
) -> Result<ErmakovSolution> {
    let init = ermakov_initial(g, y0, ydot0)?;
    let trajectory = integrate_complex_hill(spec, &init, horizon, step).map_err(|e| match e {
        Error::Underflow { t } => Error::Collapse { t, y: 0.0 },
        other => other,
    })?;
    let y: Vec<f64> = trajectory.u().iter().map(|u| u.exp()).collect();
    let ydot = trajectory.udot().iter().zip(&y).map(|(ud, y)| ud * y).collect();
    Ok(ErmakovSolution {
        times: trajectory.times().to_vec(),
        theta_tilde: trajectory.phase_increments(),
        y,
        ydot,
        g,
        trajectory,
    })
}

/// Integrates a real second-order system from `t = 0` outward to every time
/// of an ascending grid containing `0`.
fn integrate_on_grid<F>(times: &[f64], state0: [f64; 2], rhs: F, floor: Option<f64>) -> Result<Vec<[f64; 2]>>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let origin = times
        .iter()
        .position(|&t| t == 0.0)
        .ok_or_else(|| invalid("times", "grid must contain t = 0"))?;
    let mut out = vec![[0.0; 2]; times.len()];
    out[origin] = state0;
    let guard = |t: f64, _: &[f64; 2], new: &[f64; 2]| -> Result<bool> {
        match floor {
            Some(min) if new[0] <= min => Err(Error::Collapse { t, y: new[0] }),
            _ => Ok(true),
        }
    };
    let stepping = Stepping::Adaptive(Tolerances::default());
    let mut integ = Integrator::new(stepping);
    for i in origin + 1..times.len() {
        out[i] = integ.advance(&rhs, times[i - 1], out[i - 1], times[i], guard)?;
    }
    let mut integ = Integrator::new(stepping);
    for i in (0..origin).rev() {
        out[i] = integ.advance(&rhs, times[i + 1], out[i + 1], times[i], guard)?;
    }
    Ok(out)
}

/// Solves the Ermakov-Pinney equation directly in `(y, y')`, as a check on
/// [`ermakov_pinney_solve`]. `times` must be ascending and contain `0`.
pub fn ermakov_pinney_direct(
    spec: &CoefficientSpec,
    g: f64,
    y0: f64,
    ydot0: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    ermakov_initial(g, y0, ydot0)?;
    let g2 = 2.0 * g * g;
    let rhs = |t: f64, s: &[f64; 2]| [s[1], -spec.eval(t) * s[0] + g2 / s[0].powi(3)];
    let states = integrate_on_grid(times, [y0, ydot0], rhs, Some(1e-150))?;
    Ok(states.iter().map(|s| s[0]).collect())
}

/// `x` for `H_0` and `y` for `H_g` with `x(0) = y(0)`, `x'(0) = y'(0)`.
///
/// `y` is stored positive; for `x0 < 0` both trajectories carry `sign = -1`,
/// so the signed `H_g` trajectory is `sign * y`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPair {
    pub times: Vec<f64>,
    /// `H_0` trajectory integrated on its own from `x'' + f x = 0`.
    pub x: Vec<f64>,
    /// `sign * y cos theta~`.
    pub x_composed: Vec<f64>,
    pub y: Vec<f64>,
    pub theta_tilde: Vec<f64>,
    pub sign: f64,
    pub g: f64,
    pub x0: f64,
    pub v0: f64,
    solution: ErmakovSolution,
}

impl TrajectoryPair {
    pub fn solution(&self) -> &ErmakovSolution {
        &self.solution
    }

    pub fn signed_y(&self) -> impl Iterator<Item = f64> + '_ {
        self.y.iter().map(move |y| self.sign * y)
    }

    /// `|x - sign y|` per sample.
    pub fn separation(&self) -> Vec<f64> {
        self.x.iter().zip(self.signed_y()).map(|(x, y)| (x - y).abs()).collect()
    }

    /// Max of `| |x - sign y| - y (1 - cos theta~) |`.
    pub fn identity_residual(&self) -> f64 {
        self.separation()
            .iter()
            .zip(&self.y)
            .zip(&self.theta_tilde)
            .map(|((s, y), th)| (s - y * (1.0 - th.cos())).abs())
            .fold(0.0, f64::max)
    }

    /// Max of `|x - x_composed|`.
    pub fn composition_residual(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.x_composed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Times where `theta~ = 2 k pi`, `k != 0`, i.e. where the trajectories
    /// meet again. Located by cubic interpolation of the phase.
    pub fn vanishing_times(&self) -> Result<Vec<f64>> {
        let traj = self.solution.trajectory();
        let mut out = Vec::new();
        for w in 0..self.times.len().saturating_sub(1) {
            let (a, b) = (self.theta_tilde[w], self.theta_tilde[w + 1]);
            let (lo, hi) = (a.min(b), a.max(b));
            let k_lo = (lo / (2.0 * PI)).ceil() as i64;
            let k_hi = (hi / (2.0 * PI)).floor() as i64;
            for k in k_lo..=k_hi {
                if k == 0 {
                    continue;
                }
                let target = 2.0 * PI * k as f64;
                if target == b && w + 2 < self.times.len() {
                    // Counted in the next window.
                    continue;
                }
                let (mut t0, mut t1) = (self.times[w], self.times[w + 1]);
                for _ in 0..200 {
                    let mid = 0.5 * (t0 + t1);
                    if traj.phase_increment(mid)? < target {
                        t0 = mid;
                    } else {
                        t1 = mid;
                    }
                    if t1 - t0 < 1e-15 * mid.abs().max(1.0) {
                        break;
                    }
                }
                out.push(0.5 * (t0 + t1));
            }
        }
        Ok(out)
    }
}

/// Builds the pair for `x(0) = x0 != 0`, `x'(0) = v0`.
pub fn paired_trajectories(
    spec: &CoefficientSpec,
    g: f64,
    x0: f64,
    v0: f64,
    horizon: f64,
    step: f64,
) -> Result<TrajectoryPair> {
    if x0 == 0.0 || !x0.is_finite() {
        return Err(invalid("x0", "must be finite and non-zero"));
    }
    let sign = x0.signum();
    let solution = ermakov_pinney_solve(spec, g, x0.abs(), sign * v0, horizon, step)?;
    let times = solution.times.clone();
    let rhs = |t: f64, s: &[f64; 2]| [s[1], -spec.eval(t) * s[0]];
    let x = integrate_on_grid(&times, [x0, v0], rhs, None)?
        .iter()
        .map(|s| s[0])
        .collect();
    let x_composed = solution
        .y
        .iter()
        .zip(&solution.theta_tilde)
        .map(|(y, th)| sign * y * th.cos())
        .collect();
    Ok(TrajectoryPair {
        times,
        x,
        x_composed,
        y: solution.y.clone(),
        theta_tilde: solution.theta_tilde.clone(),
        sign,
        g,
        x0,
        v0,
        solution,
    })
}

/// `y^2 = alpha + beta cos(2 w t) + gamma sin(2 w t)` solving the
/// Ermakov-Pinney equation for `f = w^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub g: f64,
    pub omega: f64,
}

impl QuarticParams {
    /// Validates `alpha^2 - beta^2 - gamma^2 = 2 g^2 / w^2` (to `1e-12`
    /// relative) and `alpha + beta > 0`.
    pub fn new(alpha: f64, beta: f64, gamma: f64, g: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", "must be positive and finite"));
        }
        let p = Self {
            alpha,
            beta,
            gamma,
            g,
            omega,
        };
        let scale = alpha * alpha + beta * beta + gamma * gamma;
        if !(quartic_residual(&p).abs() <= 1e-12 * scale.max(1.0)) {
            return Err(invalid("alpha", "alpha^2 - beta^2 - gamma^2 must equal 2 g^2 / omega^2"));
        }
        if !(alpha + beta > 0.0) {
            return Err(invalid("beta", "alpha + beta must be positive"));
        }
        Ok(p)
    }

    /// Parameters of the solution through `y(0) = y0 > 0`, `y'(0) = ydot0` for `f = 1`.
    pub fn from_initial(y0: f64, ydot0: f64, g: f64) -> Result<Self> {
        Self::from_initial_with_omega(y0, ydot0, g, 1.0)
    }

    pub fn from_initial_with_omega(y0: f64, ydot0: f64, g: f64, omega: f64) -> Result<Self> {
        if !(y0 > 0.0 && y0.is_finite()) {
            return Err(invalid("y0", "must be positive and finite"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", "must be positive and finite"));
        }
        let y2 = y0 * y0;
        let gamma = y0 * ydot0 / omega;
        let alpha = (y2 * y2 + gamma * gamma + 2.0 * g * g / (omega * omega)) / (2.0 * y2);
        Ok(Self {
            alpha,
            beta: y2 - alpha,
            gamma,
            g,
            omega,
        })
    }

    pub fn y(&self, t: f64) -> f64 {
        let s = 2.0 * self.omega * t;
        (self.alpha + self.beta * s.cos() + self.gamma * s.sin()).sqrt()
    }

    pub fn initial(&self) -> (f64, f64) {
        let y0 = (self.alpha + self.beta).sqrt();
        (y0, self.omega * self.gamma / y0)
    }

    pub fn coefficient(&self) -> Result<CoefficientSpec> {
        CoefficientSpec::constant(self.omega * self.omega, PI / self.omega)
    }
}

/// `alpha^2 - beta^2 - gamma^2 - 2 g^2 / w^2`.
pub fn quartic_residual(p: &QuarticParams) -> f64 {
    p.alpha * p.alpha - p.beta * p.beta - p.gamma * p.gamma - 2.0 * p.g * p.g / (p.omega * p.omega)
}

/// `z(t) = (a + ib) exp(w t) + (c + id) exp(-w t)`, a complex solution of
/// `z'' - w^2 z = 0`. Its modulus solves the Ermakov-Pinney equation for
/// `f = -w^2` with `g = sqrt(2) w |ad - bc|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub omega: f64,
}

impl InvertedParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::with_omega(a, b, c, d, 1.0)
    }

    pub fn with_omega(a: f64, b: f64, c: f64, d: f64, omega: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", "must be positive and finite"));
        }
        if a * d - b * c == 0.0 {
            return Err(Error::Degenerate);
        }
        Ok(Self { a, b, c, d, omega })
    }

    fn det(&self) -> f64 {
        (self.a * self.d - self.b * self.c).abs()
    }

    // |z|^2 = p e^{2wt} + q e^{-2wt} + 2 r
    fn pqr(&self) -> (f64, f64, f64) {
        (
            self.a * self.a + self.b * self.b,
            self.c * self.c + self.d * self.d,
            self.a * self.c + self.b * self.d,
        )
    }

    pub fn z(&self, t: f64) -> Complex64 {
        let e = (self.omega * t).exp();
        Complex64::new(self.a, self.b) * e + Complex64::new(self.c, self.d) / e
    }

    pub fn z_dot(&self, t: f64) -> Complex64 {
        let e = (self.omega * t).exp();
        (Complex64::new(self.a, self.b) * e - Complex64::new(self.c, self.d) / e) * self.omega
    }

    /// `|z(t)|^2`, strictly positive when `ad - bc != 0`.
    pub fn modulus_squared(&self, t: f64) -> f64 {
        let (p, q, r) = self.pqr();
        let e = (2.0 * self.omega * t).exp();
        p * e + q / e + 2.0 * r
    }

    /// `y(t) = |z(t)|`.
    pub fn y(&self, t: f64) -> f64 {
        self.modulus_squared(t).sqrt()
    }

    pub fn direction(&self, t: f64) -> Complex64 {
        let z = self.z(t);
        z / z.norm()
    }

    /// `f = -w^2`. The period entry only sets the growth-classification
    /// window, here half the e-folding time `1/(2w)` of the phase increment.
    pub fn coefficient(&self) -> Result<CoefficientSpec> {
        CoefficientSpec::constant(-self.omega * self.omega, 0.25 / self.omega)
    }

    /// Complex Hill initial data of `z` or `conj z`, whichever turns with
    /// positive phase velocity.
    pub fn phase_data(&self) -> Result<InitialPhaseData> {
        let flip = self.b * self.c - self.a * self.d < 0.0;
        let orient = |w: Complex64| if flip { w.conj() } else { w };
        let (z0, v0) = (orient(self.z(0.0)), orient(self.z_dot(0.0)));
        let ratio = v0 / z0;
        let wronskian = (z0.conj() * v0).im;
        InitialPhaseData::new(z0.norm().ln(), ratio.re, z0.arg(), 0.5 * wronskian.ln())
    }

    /// `theta~(+inf)` and `theta~(-inf)`.
    pub fn theta_limits(&self) -> (f64, f64) {
        let (p, _, r) = self.pqr();
        let d = self.det();
        let start = ((p + r) / d).atan();
        (0.5 * PI - start, (r / d).atan() - start)
    }
}

/// `g = sqrt(2) w |ad - bc|`.
pub fn inverted_g(p: &InvertedParams) -> f64 {
    SQRT_2 * p.omega * p.det()
}

/// `theta~(t) = arctan((P e^{2wt} + R)/D) - arctan((P + R)/D)` with
/// `P = a^2 + b^2`, `R = ac + bd`, `D = |ad - bc|`. The prefactor
/// `g sqrt(2) / (2 w D)` is identically 1.
pub fn theta_inverted(p: &InvertedParams, t: f64) -> f64 {
    let (pp, _, r) = p.pqr();
    let d = p.det();
    let prefactor = inverted_g(p) * SQRT_2 / (2.0 * p.omega * d);
    debug_assert!((prefactor - 1.0).abs() < 1e-14);
    let e = (2.0 * p.omega * t).exp();
    prefactor * (((pp * e + r) / d).atan() - ((pp + r) / d).atan())
}

/// `g sqrt(2) int_0^t |z(s)|^-2 ds` by adaptive Simpson quadrature.
pub fn theta_inverted_quadrature(p: &InvertedParams, t: f64, tol: f64) -> f64 {
    let k = inverted_g(p) * SQRT_2;
    let f = |s: f64| k / p.modulus_squared(s);
    adaptive_simpson(&f, 0.0, t, tol)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverted_examples() {
        let p = InvertedParams::new(0.5, 0.5, 0.5, -0.5).unwrap();
        assert!((inverted_g(&p) - 1.0 / SQRT_2).abs() < 1e-15);
        let q = InvertedParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((inverted_g(&q) - SQRT_2).abs() < 1e-15);
        assert_eq!(InvertedParams::new(1.0, 1.0, 1.0, 1.0), Err(Error::Degenerate));
        for t in [-2.0f64, -0.3, 0.0, 0.7, 3.0] {
            let expected = (2.0 * t).exp().atan() - PI / 4.0;
            assert!((theta_inverted(&q, t) - expected).abs() < 1e-15);
            assert!((theta_inverted_quadrature(&q, t, 1e-13) - expected).abs() < 1e-11);
        }
        let (plus, minus) = q.theta_limits();
        assert!((plus - PI / 4.0).abs() < 1e-15 && (minus + PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn inverted_phase_data_is_positively_oriented() {
        let q = InvertedParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        let init = q.phase_data().unwrap();
        assert!((init.u0 - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((init.epsilon - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(init.udot0.abs() < 1e-15);
        assert!((init.theta0 + PI / 4.0).abs() < 1e-15);
        let p = InvertedParams::new(0.5, 0.5, 0.5, -0.5).unwrap();
        let init = p.phase_data().unwrap();
        assert!(init.u0.abs() < 1e-15 && init.epsilon.abs() < 1e-15 && init.udot0.abs() < 1e-15);
    }

    #[test]
    fn quartic_constructor() {
        let g = 0.8;
        let p = QuarticParams::new(SQRT_2 * g, 0.0, 0.0, g, 1.0).unwrap();
        assert!(quartic_residual(&p).abs() < 1e-15);
        let q = QuarticParams::from_initial(1.3, -0.4, g).unwrap();
        assert!(quartic_residual(&q).abs() < 1e-12);
        let (y0, v0) = q.initial();
        assert!((y0 - 1.3).abs() < 1e-14 && (v0 + 0.4).abs() < 1e-14);
        assert!(QuarticParams::new(1.0, 0.0, 0.0, g, 1.0).is_err());
    }

    #[test]
    fn simpson_integrates_smooth_function() {
        let v = adaptive_simpson(&|x: f64| x.cos(), 0.0, 2.0, 1e-13);
        assert!((v - 2f64.sin()).abs() < 1e-12);
    }
}
