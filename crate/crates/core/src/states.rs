//! Reference states: the lowest-weight profiles `c x^alpha exp(-x^2/2)`, their
//! squeezed versions and their Hermite-function coefficients.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::hill::InitialPhaseData;
use crate::oracle::{Domain, GridState, SpatialGrid};
use crate::quadrature::{gauss_laguerre, hermite_functions_into};

/// Squeeze parametrization `(u0, u0', theta0, eps)` of a generalized
/// coherent state. Shares its representation with the Hill initial data.
pub type SqueezeParams = InitialPhaseData;

/// Exponent `alpha = 1/2 + sqrt(1/4 + 2 g^2)`.
pub fn alpha_of_g(g: f64) -> Result<f64> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(invalid("g", "coupling must be finite and non-negative"));
    }
    Ok(0.5 + (0.25 + 2.0 * g * g).sqrt())
}

/// Inverse of [`alpha_of_g`] on `alpha >= 1`.
pub fn g_of_alpha(alpha: f64) -> Option<f64> {
    (alpha >= 1.0 && alpha.is_finite()).then(|| (0.5 * alpha * (alpha - 1.0)).sqrt())
}

/// `c` with `c^2 int_R |x|^{2 alpha} exp(-x^2) dx = 1`, i.e. `c^2 = 1/Gamma(alpha + 1/2)`.
pub fn normalization_constant(alpha: f64) -> Result<f64> {
    if !(alpha > -0.5 && alpha.is_finite()) {
        return Err(invalid("alpha", "must exceed -1/2"));
    }
    Ok((-0.5 * ln_gamma(alpha + 0.5)).exp())
}

/// Parity extension of `x^alpha` to negative `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    /// `|x|^alpha`
    #[default]
    Even,
    /// `sgn(x) |x|^alpha`
    Odd,
}

impl Parity {
    pub fn matches(&self, n: usize) -> bool {
        match self {
            Parity::Even => n % 2 == 0,
            Parity::Odd => n % 2 == 1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Real Hermite-function amplitude `lambda_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteComponent {
    pub n: usize,
    pub amplitude: f64,
}

impl HermiteComponent {
    pub fn weight(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// A reference state and its Hermite decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    g: Option<f64>,
    alpha: f64,
    parity: Parity,
    components: Vec<HermiteComponent>,
    truncation: usize,
    norm_defect: f64,
    tolerance: f64,
}

/// The two states whose Hermite expansion is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialState {
    /// `c1 x^2 exp(-x^2/2)`, ground state for `g = 1`.
    PhiG1,
    /// `c2 x^3 exp(-x^2/2)`, ground state for `g = sqrt(3)`.
    ChiG3,
}

pub fn special_state(id: SpecialState) -> StateSpec {
    let (alpha, parity, comps) = match id {
        SpecialState::PhiG1 => (2.0, Parity::Even, [(0, 1.0 / 3.0), (2, 2.0 / 3.0)]),
        SpecialState::ChiG3 => (3.0, Parity::Odd, [(1, 3.0 / 5.0), (3, 2.0 / 5.0)]),
    };
    StateSpec {
        g: g_of_alpha(alpha),
        alpha,
        parity,
        components: comps
            .iter()
            .map(|&(n, w): &(usize, f64)| HermiteComponent {
                n,
                amplitude: w.sqrt(),
            })
            .collect(),
        truncation: comps[1].0,
        norm_defect: 0.0,
        tolerance: 0.0,
    }
}

/// Settings for [`hermite_coefficients_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    /// Fixed node count; `None` starts at `4(N+1)` and doubles until the top
    /// coefficient is stable to `1e-12`.
    pub nodes: Option<usize>,
    pub norm_tolerance: f64,
    pub max_nodes: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            nodes: None,
            norm_tolerance: 1e-6,
            max_nodes: 16_384,
        }
    }
}

/// Default truncation for general exponents.
pub const DEFAULT_TRUNCATION: usize = 200;

/// `|lambda_n|^2` for `n <= n_max` of the parity extension of
/// `c x^alpha exp(-x^2/2)`.
pub fn hermite_coefficients(alpha: f64, parity: Parity, n_max: usize) -> Result<StateSpec> {
    hermite_coefficients_with(alpha, parity, n_max, &ProjectionOptions::default())
}

// After s = x^2 the projection integrand is s^a exp(-s) times a polynomial in
// s (even n, a = (alpha-1)/2) or times sqrt(s) * polynomial (odd n, a = alpha/2),
// so a generalized Gauss-Laguerre rule with > n_max/2 nodes is exact.
fn project(alpha: f64, parity: Parity, n_max: usize, nodes: usize) -> Result<Vec<HermiteComponent>> {
    let c = normalization_constant(alpha)?;
    let a = match parity {
        Parity::Even => 0.5 * (alpha - 1.0),
        Parity::Odd => 0.5 * alpha,
    };
    let rule = gauss_laguerre(nodes, a)?;
    let mut sums = vec![0.0; n_max + 1];
    let mut phi = Vec::with_capacity(n_max + 1);
    for (&s, &lw) in rule.nodes.iter().zip(&rule.log_weights) {
        let scaled = (lw + 0.5 * s).exp();
        if scaled == 0.0 || !scaled.is_finite() {
            continue;
        }
        let x = s.sqrt();
        hermite_functions_into(n_max, x, &mut phi);
        let factor = match parity {
            Parity::Even => scaled,
            Parity::Odd => scaled / x,
        };
        for n in (0..=n_max).filter(|n| parity.matches(*n)) {
            sums[n] += factor * phi[n];
        }
    }
    Ok((0..=n_max)
        .filter(|n| parity.matches(*n))
        .map(|n| HermiteComponent {
            n,
            amplitude: c * sums[n],
        })
        .collect())
}

pub fn hermite_coefficients_with(
    alpha: f64,
    parity: Parity,
    n_max: usize,
    opts: &ProjectionOptions,
) -> Result<StateSpec> {
    normalization_constant(alpha)?;
    let needed = n_max / 2 + 1;
    let components = match opts.nodes {
        Some(nodes) => {
            if nodes < needed {
                return Err(Error::IncreaseNodes { nodes, n_max });
            }
            project(alpha, parity, n_max, nodes)?
        }
        None => {
            let mut nodes = (4 * (n_max + 1)).max(needed);
            let mut current = project(alpha, parity, n_max, nodes)?;
            loop {
                let doubled = nodes * 2;
                if doubled > opts.max_nodes {
                    return Err(Error::IncreaseNodes { nodes, n_max });
                }
                let refined = project(alpha, parity, n_max, doubled)?;
                let top = |v: &[HermiteComponent]| v.last().map_or(0.0, |c| c.amplitude);
                let change = (top(&refined) - top(&current)).abs();
                current = refined;
                nodes = doubled;
                if change < 1e-12 {
                    break;
                }
            }
            current
        }
    };
    if components.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    let sum: f64 = components.iter().map(HermiteComponent::weight).sum();
    let defect = (1.0 - sum).max(0.0);
    if defect > opts.norm_tolerance {
        return Err(Error::NormDefect {
            defect,
            tolerance: opts.norm_tolerance,
        });
    }
    Ok(StateSpec {
        g: g_of_alpha(alpha),
        alpha,
        parity,
        components,
        truncation: n_max,
        norm_defect: defect,
        tolerance: opts.norm_tolerance,
    })
}

impl StateSpec {
    /// Reference state for coupling `g`, expanded up to `n_max`.
    pub fn for_coupling(g: f64, parity: Parity, n_max: usize) -> Result<Self> {
        let mut spec = hermite_coefficients(alpha_of_g(g)?, parity, n_max)?;
        spec.g = Some(g);
        Ok(spec)
    }

    /// A state given directly by its amplitudes. The exponent only enters the
    /// fidelity phase and the reference profile.
    pub fn from_components(alpha: f64, parity: Parity, components: Vec<HermiteComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if components.iter().any(|c| !parity.matches(c.n)) {
            return Err(invalid("components", "component parity differs from the declared parity"));
        }
        let sum: f64 = components.iter().map(HermiteComponent::weight).sum();
        if !(sum > 0.0 && sum <= 1.0 + 1e-12) {
            return Err(invalid("components", "weights must sum to a value in (0, 1]"));
        }
        let truncation = components.iter().map(|c| c.n).max().unwrap_or(0);
        Ok(Self {
            g: g_of_alpha(alpha),
            alpha,
            parity,
            components,
            truncation,
            norm_defect: (1.0 - sum).max(0.0),
            tolerance: (1.0 - sum).max(0.0),
        })
    }

    pub fn g(&self) -> Option<f64> {
        self.g
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn components(&self) -> &[HermiteComponent] {
        &self.components
    }
    pub fn truncation(&self) -> usize {
        self.truncation
    }
    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `(n, |lambda_n|^2)` pairs.
    pub fn weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.components.iter().map(|c| (c.n, c.weight()))
    }

    pub fn weight_sum(&self) -> f64 {
        self.components.iter().map(HermiteComponent::weight).sum()
    }

    pub fn weight_of(&self, n: usize) -> f64 {
        self.components
            .iter()
            .find(|c| c.n == n)
            .map_or(0.0, HermiteComponent::weight)
    }

    /// The unsqueezed profile `c x^alpha exp(-x^2/2)` (parity-extended) on the full line.
    pub fn reference_value(&self, x: f64) -> f64 {
        let c = normalization_constant(self.alpha).expect("alpha validated at construction");
        let mag = c * x.abs().powf(self.alpha) * (-0.5 * x * x).exp();
        match self.parity {
            Parity::Odd if x < 0.0 => -mag,
            _ => mag,
        }
    }
}

/// Largest probability a sampled state may carry near the grid edge.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Samples the squeezed state
/// `exp(-i(alpha+1/2) theta0) exp(i u0' x^2/2) exp(-s/2) psi(x exp(-s))`, `s = u0 - eps`.
pub fn sample_state(spec: &StateSpec, squeeze: &SqueezeParams, grid: &SpatialGrid) -> Result<GridState> {
    let s = squeeze.u0 - squeeze.epsilon;
    let scale = (-s).exp();
    let jacobian = (-0.5 * s).exp();
    // Half-line states carry the mass of both parity halves.
    let domain_factor = match grid.domain() {
        Domain::HalfLine => std::f64::consts::SQRT_2,
        Domain::FullLine => 1.0,
    };
    let global = Complex64::from_polar(1.0, -(spec.alpha() + 0.5) * squeeze.theta0);
    let amplitudes = grid
        .nodes()
        .map(|x| {
            let profile = domain_factor * jacobian * spec.reference_value(x * scale);
            global * Complex64::from_polar(profile, 0.5 * squeeze.udot0 * x * x)
        })
        .collect();
    let state = GridState::new(grid.clone(), amplitudes)?;
    let tail = state.edge_mass();
    if tail > TAIL_TOLERANCE {
        return Err(invalid(
            "x_max",
            format!("state has mass {tail:.3e} near the grid edge; enlarge x_max"),
        ));
    }
    let defect = (state.norm() - 1.0).abs();
    if defect > 1e-6 {
        return Err(Error::NormDefect {
            defect,
            tolerance: 1e-6,
        });
    }
    Ok(state)
}
