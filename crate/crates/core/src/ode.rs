//! Dormand-Prince 5(4) stepping for small fixed-size real systems.
//!
//! The integrator works on `[f64; N]` states and exposes a segment-wise
//! `advance` so callers can inspect every accepted step (phase unwrapping,
//! overflow checks) and veto it, which forces a step-halving retry.

use crate::error::{Error, Result};

/// Mixed absolute/relative local error tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        if !(rtol > 0.0 && rtol.is_finite()) {
            return Err(crate::error::invalid("rtol", "must be positive and finite"));
        }
        if !(atol > 0.0 && atol.is_finite()) {
            return Err(crate::error::invalid("atol", "must be positive and finite"));
        }
        Ok(Self { rtol, atol })
    }
}

/// How a segment between two output times is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepping {
    /// Error-controlled steps with the given tolerances.
    Adaptive(Tolerances),
    /// One fifth-order step per output interval, no error control.
    Fixed,
}

impl Default for Stepping {
    fn default() -> Self {
        Stepping::Adaptive(Tolerances::default())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Nominal convergence order of the propagated solution.
pub const ORDER: u32 = 5;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One Dormand-Prince step. Returns the fifth-order solution, the embedded
/// error estimate and the derivative at the new point (FSAL).
fn dp_step<const N: usize, F>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = rhs(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err, k7)
}

fn error_norm<const N: usize>(tol: &Tolerances, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Segment integrator. `h` is carried between calls so consecutive segments
/// reuse the last accepted step size.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub stepping: Stepping,
    pub max_steps: usize,
    h: f64,
}

impl Integrator {
    pub fn new(stepping: Stepping) -> Self {
        Self {
            stepping,
            max_steps: 5_000_000,
            h: 0.0,
        }
    }

    /// Integrates from `t0` to `t1`. `check(t_new, y_old, y_new)` is called
    /// for every step that passes error control; `Ok(false)` rejects it and
    /// halves the step (adaptive mode) or is reported as an error (fixed mode,
    /// where the caller is expected to return its own error instead).
    pub fn advance<const N: usize, F, C>(
        &mut self,
        rhs: &F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        mut check: C,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        C: FnMut(f64, &[f64; N], &[f64; N]) -> Result<bool>,
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y0);
        }
        match self.stepping {
            Stepping::Fixed => {
                let k1 = rhs(t0, &y0);
                let (y_new, _, _) = dp_step(rhs, t0, &y0, &k1, span);
                if check(t1, &y0, &y_new)? {
                    Ok(y_new)
                } else {
                    Err(Error::StepTooCoarse {
                        t: t1,
                        increment: f64::NAN,
                    })
                }
            }
            Stepping::Adaptive(tol) => self.advance_adaptive(rhs, &tol, t0, y0, t1, &mut check),
        }
    }

    fn advance_adaptive<const N: usize, F, C>(
        &mut self,
        rhs: &F,
        tol: &Tolerances,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        check: &mut C,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        C: FnMut(f64, &[f64; N], &[f64; N]) -> Result<bool>,
    {
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut h = if self.h > 0.0 { self.h } else { (0.01 * span).min(1e-2) };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut steps = 0usize;
        let h_floor = 1e-14 * t0.abs().max(t1.abs()).max(1.0);

        loop {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-15 * t1.abs().max(1.0) {
                return Ok(y);
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    max_steps: self.max_steps,
                });
            }
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            let (y_new, err, k7) = dp_step(rhs, t, &y, &k1, dir * h_try);
            let en = error_norm(tol, &y, &y_new, &err);
            if !en.is_finite() {
                h = 0.5 * h_try;
                if h < h_floor {
                    return Err(Error::StepSizeUnderflow { t });
                }
                continue;
            }
            if en <= 1.0 {
                let t_new = if last { t1 } else { t + dir * h_try };
                if !check(t_new, &y, &y_new)? {
                    h = 0.5 * h_try;
                    if h < h_floor {
                        return Err(Error::StepSizeUnderflow { t });
                    }
                    continue;
                }
                let fac = if en == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * en.powf(-1.0 / ORDER as f64)).clamp(FAC_MIN, FAC_MAX)
                };
                // A clipped final step says nothing about the natural step size.
                if !last {
                    h = h_try * fac;
                }
                self.h = h;
                t = t_new;
                y = y_new;
                k1 = k7;
            } else {
                let fac = (SAFETY * en.powf(-1.0 / ORDER as f64)).clamp(FAC_MIN, 1.0);
                h = h_try * fac;
                if h < h_floor {
                    return Err(Error::StepSizeUnderflow { t });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn adaptive_matches_cosine() {
        let mut integ = Integrator::new(Stepping::Adaptive(Tolerances::new(1e-12, 1e-12).unwrap()));
        let y = integ
            .advance(&oscillator, 0.0, [1.0, 0.0], 10.0, |_, _, _| Ok(true))
            .unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((y[1] + 10f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let mut integ = Integrator::new(Stepping::default());
        let y = integ
            .advance(&oscillator, 0.0, [1.0, 0.0], -3.0, |_, _, _| Ok(true))
            .unwrap();
        assert!((y[0] - 3f64.cos()).abs() < 1e-8);
        assert!((y[1] - 3f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn fixed_step_is_fifth_order() {
        let err = |n: usize| {
            let mut integ = Integrator::new(Stepping::Fixed);
            let h = 4.0 / n as f64;
            let mut y = [1.0, 0.0];
            for i in 0..n {
                y = integ
                    .advance(&oscillator, i as f64 * h, y, (i + 1) as f64 * h, |_, _, _| Ok(true))
                    .unwrap();
            }
            (y[0] - 4f64.cos()).abs()
        };
        let slope = (err(10) / err(40)).ln() / 4f64.ln();
        assert!((slope - 5.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn vetoed_steps_are_retried_smaller() {
        let mut max_dt: f64 = 0.0;
        let mut integ = Integrator::new(Stepping::default());
        let mut t_prev = 0.0;
        integ
            .advance(&oscillator, 0.0, [1.0, 0.0], 5.0, |t, _, _| {
                if t - t_prev > 0.05 {
                    return Ok(false);
                }
                max_dt = max_dt.max(t - t_prev);
                t_prev = t;
                Ok(true)
            })
            .unwrap();
        assert!(max_dt <= 0.05);
    }
}
