//! Gauss quadrature rules and normalized Hermite functions.
//!
//! Rules are built with the Golub-Welsch construction: nodes are the
//! eigenvalues of the Jacobi matrix of the weight, weights are `mu0` times the
//! squared first components of its eigenvectors.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// A Gauss rule. `log_weights` is kept alongside `weights` because the
/// weights of large rules underflow long before their logarithms do.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
/// row of the eigenvector matrix. `diag` is overwritten with eigenvalues,
/// `first` (initially `e_1`) with first eigenvector components.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    // off[i] couples i and i+1; off[n-1] is padding.
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(invalid("quadrature", "QL iteration failed to converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let fz = first[i + 1];
                first[i + 1] = s * first[i] + c * fz;
                first[i] = c * first[i] - s * fz;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

fn golub_welsch(mut diag: Vec<f64>, off: &[f64], ln_mu0: f64) -> Result<GaussRule> {
    let n = diag.len();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    let mut first = vec![0.0; n];
    if n > 0 {
        first[0] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut e, &mut first)?;
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, z)| (x, ln_mu0 + 2.0 * z.abs().ln()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nodes = pairs.iter().map(|p| p.0).collect();
    let log_weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(GaussRule {
        nodes,
        weights,
        log_weights,
    })
}

/// Gauss-Hermite rule for `int_R exp(-x^2) p(x) dx`.
pub fn gauss_hermite(n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(invalid("nodes", "need at least one node"));
    }
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut rule = golub_welsch(vec![0.0; n], &off, 0.5 * PI.ln())?;
    // Exact symmetry keeps odd integrands at pure roundoff.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let lw = 0.5 * (rule.log_weights[i] + rule.log_weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.log_weights[i] = lw;
        rule.log_weights[j] = lw;
        rule.weights[i] = lw.exp();
        rule.weights[j] = lw.exp();
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    Ok(rule)
}

/// Generalized Gauss-Laguerre rule for `int_0^inf s^a exp(-s) p(s) ds`, `a > -1`.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(invalid("nodes", "need at least one node"));
    }
    if !(a > -1.0 && a.is_finite()) {
        return Err(invalid("a", "Laguerre parameter must exceed -1"));
    }
    let diag = (0..n).map(|k| 2.0 * k as f64 + 1.0 + a).collect();
    let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
    golub_welsch(diag, &off, ln_gamma(a + 1.0))
}

/// Normalized Hermite functions `phi_0..=phi_n_max` at `x`,
/// `phi_n = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2)`.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    hermite_functions_into(n_max, x, &mut out);
    out
}

pub fn hermite_functions_into(n_max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let p0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n_max == 0 {
        return;
    }
    out.push(std::f64::consts::SQRT_2 * x * p0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_integrates_moments() {
        let rule = gauss_hermite(20).unwrap();
        let m = |k: i32| -> f64 { rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k)).sum() };
        assert!((m(0) - PI.sqrt()).abs() < 1e-13);
        assert!((m(2) - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((m(4) - 0.75 * PI.sqrt()).abs() < 1e-13);
        assert!(m(5).abs() < 1e-15);
    }

    #[test]
    fn laguerre_rule_integrates_moments() {
        let a = 0.3;
        let rule = gauss_laguerre(12, a).unwrap();
        for k in 0..8 {
            let exact = ln_gamma(a + 1.0 + k as f64).exp();
            let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(s, w)| w * s.powi(k)).sum();
            assert!((got - exact).abs() < 1e-12 * exact, "k={k}");
        }
    }

    #[test]
    fn large_rules_keep_finite_log_weights() {
        let rule = gauss_laguerre(800, 0.5).unwrap();
        assert!(rule.nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(rule.nodes[0] > 0.0);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - ln_gamma(1.5).exp()).abs() < 1e-12);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let rule = gauss_hermite(60).unwrap();
        let n_max = 12;
        let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            // phi_m phi_n = exp(-x^2) * poly; undo the Gaussian for the rule.
            let phi = hermite_functions(n_max, *x);
            let scale = w * (x * x).exp();
            for m in 0..=n_max {
                for n in 0..=n_max {
                    gram[m][n] += scale * phi[m] * phi[n];
                }
            }
        }
        for m in 0..=n_max {
            for n in 0..=n_max {
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((gram[m][n] - expected).abs() < 1e-12, "({m},{n})");
            }
        }
    }
}
