//! Fixed-step and step-doubling adaptive RK4, with drift monitoring of the
//! conserved quantities along the trajectory.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{conserved_quantities, rhs, ConservedSet, Mode, Model, ParticleState, Phase};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Components larger than this count as blowup.
pub const BLOWUP_BOUND: f64 = 1e12;

/// A first-order system `dy/ds = f(s, y)` over flat real coefficients.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, s: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Wraps a closure as an [`OdeSystem`].
pub struct FnSystem<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, s: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.f)(s, y, dy);
        Ok(())
    }
}

fn checked_rhs<S: OdeSystem + ?Sized>(sys: &S, s: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
    sys.rhs(s, y, dy)?;
    if dy.iter().any(|d| !d.is_finite()) {
        return Err(Error::Blowup { s });
    }
    Ok(())
}

/// One classical four-stage Runge-Kutta step.
pub fn step_rk4<S: OdeSystem + ?Sized>(sys: &S, s: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    checked_rhs(sys, s, y, &mut k1)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    checked_rhs(sys, s + 0.5 * h, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    checked_rhs(sys, s + 0.5 * h, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    checked_rhs(sys, s + h, &tmp, &mut k4)?;
    Ok((0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// The equations of motion of a [`Model`] over flattened [`Phase`] coefficients.
pub struct EquationsOfMotion<'a, T> {
    pub model: &'a Model,
    pub template: Phase<T>,
    pub mode: Mode,
}

impl<T: Scalar> OdeSystem for EquationsOfMotion<'_, T> {
    fn dim(&self) -> usize {
        self.template.flat_len()
    }

    fn rhs(&self, s: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let state = ParticleState::new(s, self.template.read_flat(y));
        rhs(&state, self.model, self.mode)?.write_flat(dy);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4Fixed,
    Rk4Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Fixed step, or the initial step in adaptive mode.
    pub h: f64,
    pub s_end: f64,
    /// Local error target of the adaptive mode.
    pub tol: f64,
    /// Keep every n-th accepted step (the last step is always kept).
    pub sample_every: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::Rk4Fixed,
            h: 1e-3,
            s_end: 10.0,
            tol: 1e-10,
            sample_every: 1,
        }
    }
}

impl IntegratorOptions {
    pub fn fixed(h: f64, s_end: f64) -> Self {
        IntegratorOptions {
            h,
            s_end,
            ..Default::default()
        }
    }

    pub fn validate(&self, s0: f64) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::config(format!(
                "step h must be positive, got {}",
                self.h
            )));
        }
        if !self.s_end.is_finite() || self.s_end <= s0 {
            return Err(Error::config(format!(
                "s_end ({}) must exceed the initial s ({s0})",
                self.s_end
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::config("tolerance must be positive"));
        }
        if self.sample_every == 0 {
            return Err(Error::config("sample_every must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T = f64> {
    pub s: f64,
    pub phase: Phase<T>,
    pub conserved: ConservedSet<T>,
}

/// Largest deviation of one invariant from its value at the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub initial: f64,
    pub max_abs: f64,
}

impl Drift {
    /// `max_abs / |initial|`; `None` when the initial value vanishes.
    pub fn max_rel(&self) -> Option<f64> {
        (self.initial != 0.0).then(|| self.max_abs / self.initial.abs())
    }

    /// `max_abs / max(|initial|, 1)`: relative for large values, absolute for small.
    pub fn scaled(&self) -> f64 {
        self.max_abs / self.initial.abs().max(1.0)
    }
}

/// Drift of each monitored invariant. For graded values `max_abs` is taken over
/// all coefficients and `initial` is the largest initial coefficient magnitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriftReport {
    pub c1: Option<Drift>,
    pub c2: Option<Drift>,
    pub c3: Option<Drift>,
    pub casimir: Option<Drift>,
}

impl DriftReport {
    pub fn entries(&self) -> Vec<(&'static str, Drift)> {
        [
            ("C1", self.c1),
            ("C2", self.c2),
            ("C3", self.c3),
            ("casimir", self.casimir),
        ]
        .into_iter()
        .filter_map(|(k, d)| d.map(|d| (k, d)))
        .collect()
    }
}

fn coeffs<T: Scalar>(v: &T) -> Vec<f64> {
    let mut out = vec![0.0; v.width()];
    v.write_flat(&mut out);
    out
}

fn drift_of<T: Scalar>(values: impl Iterator<Item = T>) -> Option<Drift> {
    let mut init: Option<Vec<f64>> = None;
    let mut max_abs: f64 = 0.0;
    for v in values {
        let c = coeffs(&v);
        match &init {
            None => init = Some(c),
            Some(c0) => {
                for (a, b) in c.iter().zip(c0) {
                    max_abs = max_abs.max(libm::fabs(a - b));
                }
            }
        }
    }
    init.map(|c0| Drift {
        initial: c0.iter().fold(0.0, |m, c| m.max(libm::fabs(*c))),
        max_abs,
    })
}

pub fn drift_report<T: Scalar>(samples: &[Sample<T>]) -> DriftReport {
    let has_c1 = samples.first().is_some_and(|s| s.conserved.c1.is_some());
    let has_c3 = samples.first().is_some_and(|s| s.conserved.c3.is_some());
    DriftReport {
        c1: if has_c1 {
            drift_of(samples.iter().filter_map(|s| s.conserved.c1.clone()))
        } else {
            None
        },
        c2: drift_of(samples.iter().map(|s| s.conserved.c2.clone())),
        c3: if has_c3 {
            drift_of(samples.iter().filter_map(|s| s.conserved.c3.clone()))
        } else {
            None
        },
        casimir: drift_of(samples.iter().map(|s| s.conserved.casimir.clone())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    pub samples: Vec<Sample<T>>,
    pub drift: DriftReport,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest accepted local error estimate (adaptive mode only).
    pub max_local_error: Option<f64>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> Option<&Sample<T>> {
        self.samples.last()
    }
}

/// An integration that stopped early, with everything sampled before the failure.
#[derive(Debug, Clone)]
pub struct Failure<T = f64> {
    pub error: Error,
    pub partial: Trajectory<T>,
}

impl<T> core::fmt::Display for Failure<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        self.error.fmt(f)
    }
}

struct Recorder<'a, T> {
    model: &'a Model,
    template: &'a Phase<T>,
    samples: Vec<Sample<T>>,
    accepted: usize,
    rejected: usize,
    max_local_error: Option<f64>,
}

impl<T: Scalar> Recorder<'_, T> {
    fn record(&mut self, s: f64, y: &[f64]) -> Result<()> {
        let phase = self.template.read_flat(y);
        let conserved = conserved_quantities(&phase, self.model)?;
        self.samples.push(Sample {
            s,
            phase,
            conserved,
        });
        Ok(())
    }

    fn finish(self) -> Trajectory<T> {
        Trajectory {
            drift: drift_report(&self.samples),
            samples: self.samples,
            accepted_steps: self.accepted,
            rejected_steps: self.rejected,
            max_local_error: self.max_local_error,
        }
    }
}

fn check_bound(s: f64, y: &[f64]) -> Result<()> {
    if y.iter()
        .any(|c| !c.is_finite() || libm::fabs(*c) > BLOWUP_BOUND)
    {
        return Err(Error::Blowup { s });
    }
    Ok(())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max(libm::fabs(x - y)))
}

/// Integrates `state0` to `opts.s_end` with the equations selected by `mode`.
#[allow(clippy::result_large_err)]
pub fn integrate<T: Scalar>(
    state0: &ParticleState<T>,
    model: &Model,
    opts: &IntegratorOptions,
    mode: Mode,
) -> core::result::Result<Trajectory<T>, Failure<T>> {
    let mut rec = Recorder {
        model,
        template: &state0.phase,
        samples: Vec::new(),
        accepted: 0,
        rejected: 0,
        max_local_error: None,
    };
    match run(&mut rec, state0, opts, mode) {
        Ok(()) => Ok(rec.finish()),
        Err(error) => Err(Failure {
            error,
            partial: rec.finish(),
        }),
    }
}

fn run<T: Scalar>(
    rec: &mut Recorder<'_, T>,
    state0: &ParticleState<T>,
    opts: &IntegratorOptions,
    mode: Mode,
) -> Result<()> {
    opts.validate(state0.s)?;
    mode.check(&state0.phase)?;
    let sys = EquationsOfMotion {
        model: rec.model,
        template: state0.phase.clone(),
        mode,
    };
    let s0 = state0.s;
    let mut y = state0.phase.to_flat();
    check_bound(s0, &y)?;
    rec.record(s0, &y)?;

    match opts.method {
        Method::Rk4Fixed => {
            let span = opts.s_end - s0;
            let n_steps = libm::ceil(span / opts.h - 1e-9).max(1.0) as usize;
            let mut s = s0;
            for i in 1..=n_steps {
                let s_next = if i == n_steps {
                    opts.s_end
                } else {
                    s0 + i as f64 * opts.h
                };
                y = step_rk4(&sys, s, &y, s_next - s)?;
                check_bound(s_next, &y)?;
                s = s_next;
                rec.accepted += 1;
                if i.is_multiple_of(opts.sample_every) || i == n_steps {
                    rec.record(s, &y)?;
                }
            }
        }
        Method::Rk4Adaptive => {
            let mut s = s0;
            let mut h = opts.h;
            while s < opts.s_end {
                let h_try = h.min(opts.s_end - s);
                let last = h_try >= opts.s_end - s;
                let full = step_rk4(&sys, s, &y, h_try)?;
                let mid = step_rk4(&sys, s, &y, 0.5 * h_try)?;
                let fine = step_rk4(&sys, s + 0.5 * h_try, &mid, 0.5 * h_try)?;
                let err = max_diff(&full, &fine);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * libm::pow(opts.tol / err, 0.2)).clamp(0.2, 5.0)
                };
                if err <= opts.tol {
                    let s_next = if last { opts.s_end } else { s + h_try };
                    check_bound(s_next, &fine)?;
                    y = fine;
                    s = s_next;
                    rec.accepted += 1;
                    rec.max_local_error = Some(rec.max_local_error.unwrap_or(0.0).max(err));
                    if rec.accepted.is_multiple_of(opts.sample_every) || last {
                        rec.record(s, &y)?;
                    }
                } else {
                    rec.rejected += 1;
                }
                h = h_try * factor;
                if s < opts.s_end && h < 1e-14 * s.abs().max(1.0) {
                    return Err(Error::StepUnderflow { s, h });
                }
            }
        }
    }
    Ok(())
}

/// Observed convergence order, or exactness when the error is at roundoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Exact,
    Measured(f64),
}

/// Observed order `log2(err_h / err_{h/2})`, with errors taken against a
/// reference run at `h/8`. `run(h)` returns the final flat state.
pub fn convergence_order(run: impl Fn(f64) -> Result<Vec<f64>>, h: f64) -> Result<Order> {
    let coarse = run(h)?;
    let half = run(h / 2.0)?;
    let reference = run(h / 8.0)?;
    let scale = reference.iter().fold(1.0f64, |m, c| m.max(libm::fabs(*c)));
    let err_h = max_diff(&coarse, &reference);
    let err_half = max_diff(&half, &reference);
    if err_h <= 1e-11 * scale || err_half == 0.0 {
        return Ok(Order::Exact);
    }
    Ok(Order::Measured(libm::log2(err_h / err_half)))
}

/// Self-convergence order from runs at `h`, `h/2`, `h/4`:
/// `log2(|y_h - y_{h/2}| / |y_{h/2} - y_{h/4}|)`.
pub fn self_convergence_order(runs: [&[f64]; 3]) -> Order {
    let d1 = max_diff(runs[0], runs[1]);
    let d2 = max_diff(runs[1], runs[2]);
    let scale = runs[2].iter().fold(1.0f64, |m, c| m.max(libm::fabs(*c)));
    if d1 <= 1e-11 * scale || d2 == 0.0 {
        Order::Exact
    } else {
        Order::Measured(libm::log2(d1 / d2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_leaves_state() {
        let sys = FnSystem {
            dim: 3,
            f: |_s: f64, _y: &[f64], dy: &mut [f64]| dy.fill(0.0),
        };
        let y = [1.0, -2.0, 3.5];
        assert_eq!(step_rk4(&sys, 0.0, &y, 0.1).unwrap(), y.to_vec());
    }

    #[test]
    fn exponential_one_step() {
        let sys = FnSystem {
            dim: 1,
            f: |_s: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0],
        };
        let y1 = step_rk4(&sys, 0.0, &[1.0], 0.1).unwrap()[0];
        // 1 + h + h^2/2 + h^3/6 + h^4/24
        let h: f64 = 0.1;
        let want = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((y1 - want).abs() < 1e-15);
        assert!((y1 - 1.105_170_833_333_333).abs() < 1e-14);
    }

    #[test]
    fn skew_precession_matches_fourth_order_series() {
        // dQ/ds = Omega Q with Omega = [[0, -w], [w, 0]]
        let w = 0.7;
        let sys = FnSystem {
            dim: 2,
            f: move |_s: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = -w * y[1];
                dy[1] = w * y[0];
            },
        };
        let h = 0.3;
        let y = step_rk4(&sys, 0.0, &[1.0, 0.0], h).unwrap();
        // sum_{k<=4} (h Omega)^k / k! applied to (1, 0)
        let t = w * h;
        let want = [1.0 - t * t / 2.0 + t.powi(4) / 24.0, t - t.powi(3) / 6.0];
        assert!((y[0] - want[0]).abs() < 1e-15 && (y[1] - want[1]).abs() < 1e-15);
    }

    #[test]
    fn non_finite_derivative_reports_blowup() {
        let sys = FnSystem {
            dim: 1,
            f: |_s: f64, _y: &[f64], dy: &mut [f64]| dy[0] = f64::NAN,
        };
        assert_eq!(
            step_rk4(&sys, 1.5, &[1.0], 0.1),
            Err(Error::Blowup { s: 1.5 })
        );
    }

    #[test]
    fn options_validation() {
        assert!(IntegratorOptions::fixed(0.0, 1.0).validate(0.0).is_err());
        assert!(IntegratorOptions::fixed(0.1, 0.0).validate(0.0).is_err());
        let mut o = IntegratorOptions::fixed(0.1, 1.0);
        o.sample_every = 0;
        assert!(o.validate(0.0).is_err());
        assert!(IntegratorOptions::fixed(0.1, 1.0).validate(0.0).is_ok());
    }
}
