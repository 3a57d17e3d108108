//! Independent grid-based checks of the closed forms.
//!
//! [`propagate`] steps the Schrodinger equation for
//! `H_g(t) = P^2/2 + f(t) Q^2/2 + g^2/Q^2` with Crank-Nicolson on a uniform
//! grid (Dirichlet ends, potential at the step midpoint). [`oracle_fidelity`]
//! co-propagates one initial state under `g` and under `0`.
//! [`closed_form_evolution`] samples the explicit evolved states and
//! [`factorized_propagator_apply`] applies the dilation/phase factorization
//! of the `g = 0` propagator.

use std::io::{self, Read, Write};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fidelity::FidelityCurve;
use crate::hill::{CoefficientSpec, PhaseTrajectory};
use crate::quadrature::hermite_functions_into;
use crate::states::{SqueezeParams, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    HalfLine,
    FullLine,
}

impl Domain {
    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::HalfLine => "half-line",
            Domain::FullLine => "full-line",
        }
    }
}

/// Uniform grid `x_k = first + k h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    domain: Domain,
    first: f64,
    spacing: f64,
    points: usize,
    x_max: f64,
    layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    HalfLine,
    Staggered,
    Nodal,
}

impl SpatialGrid {
    /// Symmetric grid on `[-x_max, x_max]` with nodes at `+-(k + 1/2) h`, so
    /// `x = 0` is never a node. `points` must be even.
    pub fn full_line(x_max: f64, points: usize) -> Result<Self> {
        check_extent(x_max, points)?;
        if points % 2 != 0 {
            return Err(invalid("points", "staggered full-line grids need an even point count"));
        }
        let h = 2.0 * x_max / points as f64;
        Ok(Self {
            domain: Domain::FullLine,
            first: -x_max + 0.5 * h,
            spacing: h,
            points,
            x_max,
            layout: Layout::Staggered,
        })
    }

    /// Symmetric grid with `x = 0` as a node (`points` odd). Only usable for `g = 0`.
    pub fn full_line_nodal(x_max: f64, points: usize) -> Result<Self> {
        check_extent(x_max, points)?;
        if points % 2 != 1 {
            return Err(invalid("points", "nodal full-line grids need an odd point count"));
        }
        let h = 2.0 * x_max / (points + 1) as f64;
        Ok(Self {
            domain: Domain::FullLine,
            first: -x_max + h,
            spacing: h,
            points,
            x_max,
            layout: Layout::Nodal,
        })
    }

    /// Half-line grid with nodes `(k + 1/2) h`, i.e. inner cutoff `h/2`.
    pub fn half_line(x_max: f64, points: usize) -> Result<Self> {
        check_extent(x_max, points)?;
        let h = x_max / points as f64;
        Ok(Self {
            domain: Domain::HalfLine,
            first: 0.5 * h,
            spacing: h,
            points,
            x_max,
            layout: Layout::HalfLine,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn points(&self) -> usize {
        self.points
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn node(&self, k: usize) -> f64 {
        self.first + k as f64 * self.spacing
    }
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |k| self.node(k))
    }

    pub fn contains_origin(&self) -> bool {
        self.layout == Layout::Nodal
    }

    /// Mirror index of node `k` on symmetric grids.
    pub fn mirror(&self, k: usize) -> Option<usize> {
        match self.layout {
            Layout::HalfLine => None,
            _ => Some(self.points - 1 - k),
        }
    }

    fn tag(&self) -> u8 {
        match self.layout {
            Layout::HalfLine => 0,
            Layout::Staggered => 1,
            Layout::Nodal => 2,
        }
    }

    fn from_tag(tag: u8, x_max: f64, points: usize) -> Result<Self> {
        match tag {
            0 => Self::half_line(x_max, points),
            1 => Self::full_line(x_max, points),
            2 => Self::full_line_nodal(x_max, points),
            _ => Err(invalid("domain", format!("unknown domain tag {tag}"))),
        }
    }
}

fn check_extent(x_max: f64, points: usize) -> Result<()> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(invalid("x_max", "must be positive and finite"));
    }
    if points < 3 {
        return Err(invalid("points", "need at least 3 points"));
    }
    Ok(())
}

/// Complex amplitudes on a grid with a cached L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
    norm: f64,
}

/// Fraction of `x_max` beyond which probability counts as having reached the edge.
pub const EDGE_FRACTION: f64 = 0.9;

impl GridState {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.points() {
            return Err(invalid("amplitudes", "length differs from the grid point count"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(invalid("amplitudes", "non-finite amplitude"));
        }
        let norm = l2_norm(&amplitudes, grid.spacing());
        Ok(Self { grid, amplitudes, norm })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn normalized(&self) -> Self {
        let inv = 1.0 / self.norm;
        Self {
            grid: self.grid.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * inv).collect(),
            norm: 1.0,
        }
    }

    /// `<self, other> = h sum conj(self) other`.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        debug_assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        sum * self.grid.spacing()
    }

    pub fn distance(&self, other: &GridState) -> f64 {
        let sum: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (sum * self.grid.spacing()).sqrt()
    }

    /// Probability beyond `EDGE_FRACTION * x_max`.
    pub fn edge_mass(&self) -> f64 {
        let limit = EDGE_FRACTION * self.grid.x_max();
        let sum: f64 = self
            .grid
            .nodes()
            .zip(&self.amplitudes)
            .filter(|(x, _)| x.abs() > limit)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        sum * self.grid.spacing()
    }

    /// L2 norms of the even and odd parts (symmetric grids only).
    pub fn parity_norms(&self) -> Option<(f64, f64)> {
        let h = self.grid.spacing();
        let mut even = 0.0;
        let mut odd = 0.0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            let m = self.amplitudes[self.grid.mirror(k)?];
            even += (0.5 * (a + m)).norm_sqr();
            odd += (0.5 * (a - m)).norm_sqr();
        }
        Some(((even * h).sqrt(), (odd * h).sqrt()))
    }

    /// Writes the debug dump: magic `GRDS`, version `u32`, domain tag `u8`,
    /// `x_max` as `f64`, point count as `u64`, then interleaved re/im `f64`,
    /// all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&[self.grid.tag()])?;
        w.write_all(&self.grid.x_max().to_le_bytes())?;
        w.write_all(&(self.grid.points() as u64).to_le_bytes())?;
        for a in &self.amplitudes {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io_err = |e: io::Error| invalid("dump", e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != DUMP_MAGIC {
            return Err(invalid("dump", "bad magic"));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4).map_err(io_err)?;
        let version = u32::from_le_bytes(b4);
        if version != DUMP_VERSION {
            return Err(invalid("dump", format!("unsupported version {version}")));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag).map_err(io_err)?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8).map_err(io_err)?;
        let x_max = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io_err)?;
        let points = u64::from_le_bytes(b8) as usize;
        let grid = SpatialGrid::from_tag(tag[0], x_max, points)?;
        let mut amplitudes = Vec::with_capacity(points);
        for _ in 0..points {
            r.read_exact(&mut b8).map_err(io_err)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8).map_err(io_err)?;
            let im = f64::from_le_bytes(b8);
            amplitudes.push(Complex64::new(re, im));
        }
        GridState::new(grid, amplitudes)
    }
}

const DUMP_MAGIC: &[u8; 4] = b"GRDS";
const DUMP_VERSION: u32 = 1;

fn l2_norm(amps: &[Complex64], h: f64) -> f64 {
    (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * h).sqrt()
}

/// Tridiagonal discretization `-1/2 D_h + f x^2/2 + g^2/x^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    diag: Vec<f64>,
    off: f64,
}

/// Builds the discrete Hamiltonian at a frozen coefficient value.
pub fn build_hamiltonian(grid: &SpatialGrid, f_value: f64, g: f64) -> Result<DiscreteHamiltonian> {
    let base = PotentialBase::new(grid, g)?;
    Ok(DiscreteHamiltonian {
        diag: base.diagonal(f_value),
        off: base.off,
    })
}

impl DiscreteHamiltonian {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
    pub fn off_diagonal(&self) -> f64 {
        self.off
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = psi.len();
        (0..n)
            .map(|k| {
                let mut v = psi[k] * self.diag[k];
                if k > 0 {
                    v += psi[k - 1] * self.off;
                }
                if k + 1 < n {
                    v += psi[k + 1] * self.off;
                }
                v
            })
            .collect()
    }

    /// `<psi, H psi>` (real up to rounding) with grid weight `h`.
    pub fn expectation(&self, psi: &[Complex64], h: f64) -> f64 {
        self.apply(psi)
            .iter()
            .zip(psi)
            .map(|(hp, p)| (p.conj() * hp).re)
            .sum::<f64>()
            * h
    }
}

// The f-independent pieces of the diagonal.
struct PotentialBase {
    kinetic: f64,
    half_x2: Vec<f64>,
    singular: Vec<f64>,
    off: f64,
}

impl PotentialBase {
    fn new(grid: &SpatialGrid, g: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(invalid("g", "coupling must be finite and non-negative"));
        }
        if g > 0.0 && grid.contains_origin() {
            return Err(Error::SingularGrid { g });
        }
        let h = grid.spacing();
        let g2 = g * g;
        Ok(Self {
            kinetic: 1.0 / (h * h),
            half_x2: grid.nodes().map(|x| 0.5 * x * x).collect(),
            singular: grid
                .nodes()
                .map(|x| if g2 == 0.0 { 0.0 } else { g2 / (x * x) })
                .collect(),
            off: -0.5 / (h * h),
        })
    }

    fn diagonal(&self, f: f64) -> Vec<f64> {
        self.half_x2
            .iter()
            .zip(&self.singular)
            .map(|(hx, s)| self.kinetic + f * hx + s)
            .collect()
    }
}

/// Crank-Nicolson settings. The scheme, Dirichlet ends and midpoint
/// evaluation of `f` are fixed; only the step and the escape threshold vary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    /// Largest tolerated probability beyond `EDGE_FRACTION * x_max`.
    pub escape_tolerance: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            escape_tolerance: 1e-6,
        }
    }
}

impl PropagatorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive and finite"));
        }
        Ok(())
    }
}

/// One Crank-Nicolson stepper bound to a grid and a coupling. The Thomas
/// factorization is cached for the last `(f, dt)` pair.
struct CrankNicolson {
    base: PotentialBase,
    cached: Option<(f64, f64)>,
    diag: Vec<f64>,
    cprime: Vec<Complex64>,
    inv_den: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl CrankNicolson {
    fn new(grid: &SpatialGrid, g: f64) -> Result<Self> {
        let n = grid.points();
        Ok(Self {
            base: PotentialBase::new(grid, g)?,
            cached: None,
            diag: vec![0.0; n],
            cprime: vec![Complex64::new(0.0, 0.0); n],
            inv_den: vec![Complex64::new(0.0, 0.0); n],
            rhs: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    fn factorize(&mut self, f: f64, tau: f64) {
        if self.cached == Some((f, tau)) {
            return;
        }
        self.diag = self.base.diagonal(f);
        let a = Complex64::new(0.0, tau * self.base.off);
        let n = self.diag.len();
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let b = Complex64::new(1.0, tau * self.diag[k]);
            let den = if k == 0 { b } else { b - a * prev };
            let inv = den.inv();
            self.inv_den[k] = inv;
            prev = a * inv;
            self.cprime[k] = prev;
        }
        self.cached = Some((f, tau));
    }

    /// `(1 + i tau H) psi' = (1 - i tau H) psi`, `tau = dt/2`.
    fn step(&mut self, psi: &mut [Complex64], f: f64, dt: f64) {
        let tau = 0.5 * dt;
        self.factorize(f, tau);
        let n = psi.len();
        let off = self.base.off;
        for k in 0..n {
            let mut hp = psi[k] * self.diag[k];
            if k > 0 {
                hp += psi[k - 1] * off;
            }
            if k + 1 < n {
                hp += psi[k + 1] * off;
            }
            self.rhs[k] = psi[k] - Complex64::new(0.0, tau) * hp;
        }
        let a = Complex64::new(0.0, tau * off);
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let d = if k == 0 { self.rhs[0] } else { self.rhs[k] - a * prev };
            prev = d * self.inv_den[k];
            psi[k] = prev;
        }
        for k in (0..n - 1).rev() {
            let next = psi[k + 1];
            psi[k] -= self.cprime[k] * next;
        }
    }
}

/// Result of a propagation segment.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub state: GridState,
    /// Largest `| ||psi'|| - ||psi|| |` over single steps.
    pub max_step_norm_change: f64,
    /// `| ||psi(t1)|| - ||psi(t0)|| |`.
    pub final_norm_defect: f64,
    pub steps: usize,
}

fn check_escape(state: &GridState, t: f64, config: &PropagatorConfig) -> Result<()> {
    let edge_mass = state.edge_mass();
    if edge_mass > config.escape_tolerance {
        return Err(Error::GridEscape { t, edge_mass });
    }
    Ok(())
}

/// Propagates `state` from `t_span.0` to `t_span.1` under `H_g(t)`.
pub fn propagate(
    state: &GridState,
    spec: &CoefficientSpec,
    g: f64,
    t_span: (f64, f64),
    config: &PropagatorConfig,
) -> Result<Propagation> {
    config.validate()?;
    let mut stepper = CrankNicolson::new(state.grid(), g)?;
    let mut amps = state.amplitudes().to_vec();
    let h = state.grid().spacing();
    let (t0, t1) = t_span;
    let n = ((t1 - t0).abs() / config.dt).ceil() as usize;
    let dt = if n == 0 { 0.0 } else { (t1 - t0) / n as f64 };
    let mut norm = state.norm();
    let mut max_change: f64 = 0.0;
    for i in 0..n {
        let t_mid = t0 + (i as f64 + 0.5) * dt;
        stepper.step(&mut amps, spec.eval(t_mid), dt);
        let next = l2_norm(&amps, h);
        max_change = max_change.max((next - norm).abs());
        norm = next;
    }
    let out = GridState::new(state.grid().clone(), amps)?;
    check_escape(&out, t1, config)?;
    Ok(Propagation {
        final_norm_defect: (out.norm() - state.norm()).abs(),
        state: out,
        max_step_norm_change: max_change,
        steps: n,
    })
}

/// Oracle fidelity together with solver diagnostics.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub curve: FidelityCurve,
    pub max_step_norm_change: f64,
}

/// `F(t) = <U_0(t,0) psi0, U_g(t,0) psi0>` by co-propagation on the same grid
/// with the same step. `times` must be ascending and non-negative; the
/// initial state is normalized on the grid first.
pub fn oracle_fidelity(
    psi0: &GridState,
    spec: &CoefficientSpec,
    g: f64,
    times: &[f64],
    config: &PropagatorConfig,
) -> Result<OracleRun> {
    config.validate()?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be finite, non-negative and ascending"));
    }
    let start = psi0.normalized();
    let grid = start.grid().clone();
    let h = grid.spacing();
    let mut free = CrankNicolson::new(&grid, 0.0)?;
    let mut pert = CrankNicolson::new(&grid, g)?;
    let mut a0 = start.amplitudes().to_vec();
    let mut ag = a0.clone();
    let mut t = 0.0;
    let mut values = Vec::with_capacity(times.len());
    let mut max_change: f64 = 0.0;
    for &target in times {
        let n = ((target - t) / config.dt).ceil() as usize;
        if n > 0 {
            let dt = (target - t) / n as f64;
            for i in 0..n {
                let f = spec.eval(t + (i as f64 + 0.5) * dt);
                let (n0, ng) = (l2_norm(&a0, h), l2_norm(&ag, h));
                free.step(&mut a0, f, dt);
                pert.step(&mut ag, f, dt);
                max_change = max_change
                    .max((l2_norm(&a0, h) - n0).abs())
                    .max((l2_norm(&ag, h) - ng).abs());
            }
            t = target;
        }
        let s0 = GridState::new(grid.clone(), a0.clone())?;
        let sg = GridState::new(grid.clone(), ag.clone())?;
        check_escape(&s0, t, config)?;
        check_escape(&sg, t, config)?;
        values.push(s0.inner(&sg));
    }
    Ok(OracleRun {
        curve: FidelityCurve::from_values(times.to_vec(), values),
        max_step_norm_change: max_change,
    })
}

/// Which evolution a closed-form sample represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `U_0(t, 0)`: Hermite components acquire phases `(n + 1/2) theta`.
    Free,
    /// `U_g(t, 0)`: the reference profile is an eigenstate, global phase only.
    Perturbed,
}

fn same_initial_data(a: &SqueezeParams, b: &SqueezeParams) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()));
    close(a.u0, b.u0) && close(a.udot0, b.udot0) && close(a.theta0, b.theta0) && close(a.epsilon, b.epsilon)
}

fn domain_factor(grid: &SpatialGrid) -> f64 {
    match grid.domain() {
        Domain::HalfLine => std::f64::consts::SQRT_2,
        Domain::FullLine => 1.0,
    }
}

/// Samples the explicitly evolved squeezed state at time `t`.
pub fn closed_form_evolution(
    spec: &StateSpec,
    squeeze: &SqueezeParams,
    branch: Branch,
    traj: &PhaseTrajectory,
    t: f64,
    grid: &SpatialGrid,
) -> Result<GridState> {
    if !same_initial_data(squeeze, traj.initial()) {
        return Err(Error::MismatchedInitialData);
    }
    let (u, udot, theta) = traj.phase_state(t)?;
    let s = u - squeeze.epsilon;
    let scale = (-s).exp();
    let jacobian = (-0.5 * s).exp() * domain_factor(grid);
    let alpha = spec.alpha();
    let amplitudes: Vec<Complex64> = match branch {
        Branch::Perturbed => {
            let global = Complex64::from_polar(1.0, -(alpha + 0.5) * theta);
            grid.nodes()
                .map(|x| {
                    let profile = jacobian * spec.reference_value(x * scale);
                    global * Complex64::from_polar(profile, 0.5 * udot * x * x)
                })
                .collect()
        }
        Branch::Free => {
            let theta0 = squeeze.theta0;
            let coeffs: Vec<(usize, Complex64)> = spec
                .components()
                .iter()
                .map(|c| {
                    let n = c.n as f64;
                    let phase = -theta * (n + 0.5) + theta0 * (n - alpha);
                    (c.n, Complex64::from_polar(c.amplitude, phase))
                })
                .collect();
            let n_max = spec.truncation();
            let mut phi = Vec::with_capacity(n_max + 1);
            grid.nodes()
                .map(|x| {
                    hermite_functions_into(n_max, x * scale, &mut phi);
                    let sum: Complex64 = coeffs.iter().map(|(n, c)| c * phi[*n]).sum();
                    sum * jacobian * Complex64::from_polar(1.0, 0.5 * udot * x * x)
                })
                .collect()
        }
    };
    GridState::new(grid.clone(), amplitudes)
}

/// Largest tolerated Hermite-expansion defect in the factorized propagator.
pub const EXPANSION_TOLERANCE: f64 = 1e-8;

/// Applies the `g = 0` propagator in factorized form: undo the initial
/// quadratic phase and dilation, rotate Hermite components by
/// `exp(-i dtheta (n + 1/2))`, apply the dilation and quadratic phase at `t`.
///
/// The dilations are folded into the Hermite basis (the state is projected on
/// dilated Hermite functions and rebuilt from them), which avoids resampling.
pub fn factorized_propagator_apply(
    state: &GridState,
    traj: &PhaseTrajectory,
    g: f64,
    t: f64,
    modes: usize,
) -> Result<GridState> {
    if g != 0.0 {
        return Err(invalid("g", "the factorized propagator is only available for g = 0"));
    }
    let grid = state.grid();
    if grid.domain() != Domain::FullLine {
        return Err(invalid("grid", "the factorized propagator needs a full-line grid"));
    }
    let init = traj.initial();
    let eps = init.epsilon;
    let h = grid.spacing();
    let n_max = modes.saturating_sub(1);

    let s0 = init.u0 - eps;
    let (scale0, jac0) = ((-s0).exp(), (-0.5 * s0).exp());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut phi = Vec::with_capacity(n_max + 1);
    for (x, a) in grid.nodes().zip(state.amplitudes()) {
        hermite_functions_into(n_max, x * scale0, &mut phi);
        let twisted = a * Complex64::from_polar(h * jac0, -0.5 * init.udot0 * x * x);
        for (c, p) in coeffs.iter_mut().zip(&phi) {
            *c += twisted * p;
        }
    }
    let norm2 = state.norm().powi(2);
    let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let defect = ((norm2 - captured) / norm2).max(0.0);
    if defect > EXPANSION_TOLERANCE {
        return Err(Error::ExpansionDefect {
            defect,
            tolerance: EXPANSION_TOLERANCE,
        });
    }

    let (u, udot, theta) = traj.phase_state(t)?;
    let dtheta = theta - init.theta0;
    for (n, c) in coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -dtheta * (n as f64 + 0.5));
    }
    let s = u - eps;
    let (scale, jac) = ((-s).exp(), (-0.5 * s).exp());
    let amplitudes = grid
        .nodes()
        .map(|x| {
            hermite_functions_into(n_max, x * scale, &mut phi);
            let sum: Complex64 = coeffs.iter().zip(&phi).map(|(c, p)| c * p).sum();
            sum * Complex64::from_polar(jac, 0.5 * udot * x * x)
        })
        .collect();
    GridState::new(grid.clone(), amplitudes)
}
