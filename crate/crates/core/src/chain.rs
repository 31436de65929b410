//! The Markov chain `X_n = alpha_n (X_{n-1} - beta_n)` and its functionals.
//!
//! With `A_n = alpha_1 ... alpha_n`, `B_n = sum_{i<=n} beta_i / A_{i-1}` and
//! `D_n = A_n B_n`, the chain started at `x0` satisfies
//! `X_n = A_n x0 - D_n = A_n (x0 - B_n)`.

use alloc::vec::Vec;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;
use rand_core::RngCore;

use crate::measure::{MeasureSpec, Sampler, DEFAULT_CRITICAL_TOLERANCE};
use crate::operator::GridFunction;
use crate::rng::{ensemble, mean_stderr};
use crate::{Error, Result};

/// Default cap on the number of steps for the stopping time `tau_-`.
pub const DEFAULT_MAX_STOPPING_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrajectory {
    pub x0: f64,
    /// Steps `n = 1, 2, ...`; `A_0 = 1`, `B_0 = D_0 = 0` are implicit.
    pub steps: Vec<ChainStep>,
    /// Set when `|A_n|` (or `X_n`, `D_n`) left the representable range and
    /// the trajectory was truncated before that step.
    pub overflowed: bool,
}

impl ChainTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Advances the state `(X, A, B, D)` by one step.
#[inline]
fn advance(prev: (f64, f64, f64, f64), alpha: f64, beta: f64) -> (f64, f64, f64, f64) {
    let (x, a, b, d) = prev;
    (alpha * (x - beta), a * alpha, b + beta / a, alpha * (d + beta))
}

fn require_steps(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("number of steps must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Simulates `n` steps from `x0`.
pub fn simulate<R: RngCore + ?Sized>(spec: &MeasureSpec, x0: f64, n: usize, rng: &mut R) -> Result<ChainTrajectory> {
    require_steps(n)?;
    let sampler = Sampler::new(spec)?;
    Ok(simulate_with(&sampler, x0, n, rng))
}

pub(crate) fn simulate_with<R: RngCore + ?Sized>(sampler: &Sampler, x0: f64, n: usize, rng: &mut R) -> ChainTrajectory {
    let mut steps = Vec::with_capacity(n);
    let mut state = (x0, 1.0, 0.0, 0.0);
    let mut overflowed = false;
    for _ in 0..n {
        let (alpha, beta) = sampler.draw(rng);
        let next = advance(state, alpha, beta);
        if !(next.0.is_finite() && next.1.is_finite() && next.2.is_finite() && next.3.is_finite()) {
            overflowed = true;
            break;
        }
        state = next;
        steps.push(ChainStep {
            alpha,
            beta,
            x: next.0,
            a: next.1,
            b: next.2,
            d: next.3,
        });
    }
    ChainTrajectory { x0, steps, overflowed }
}

/// `(A_n, D_n, D°_n)` from one fresh draw of `n` coefficient pairs, where
/// `D°_n = sum_i beta_i A_i` is the shift sum taken in reversed order.
pub(crate) fn shift_sums<R: RngCore + ?Sized>(sampler: &Sampler, n: usize, rng: &mut R) -> (f64, f64, f64) {
    let (mut a, mut d, mut reversed) = (1.0, 0.0, 0.0);
    for _ in 0..n {
        let (alpha, beta) = sampler.draw(rng);
        d = alpha * (d + beta);
        a *= alpha;
        reversed += beta * a;
    }
    (a, d, reversed)
}

/// `D°_n = sum_{i=1..n} beta_i A_i` for a fresh i.i.d. draw.
pub fn reversed_tail_sum<R: RngCore + ?Sized>(spec: &MeasureSpec, n: usize, rng: &mut R) -> Result<f64> {
    require_steps(n)?;
    let sampler = Sampler::new(spec)?;
    Ok(shift_sums(&sampler, n, rng).2)
}

/// `D_n = sum_{i=1..n} beta_i alpha_i ... alpha_n` for a fresh i.i.d. draw.
pub fn forward_shift_sum<R: RngCore + ?Sized>(spec: &MeasureSpec, n: usize, rng: &mut R) -> Result<f64> {
    require_steps(n)?;
    let sampler = Sampler::new(spec)?;
    Ok(shift_sums(&sampler, n, rng).1)
}

/// Values of the chain's functionals at `tau_- = inf{n >= 1 : A_n < 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppedRun {
    pub tau: usize,
    /// `A_tau < 0`.
    pub a: f64,
    pub b: f64,
    /// `ln|A_tau| = sum_{i <= tau} ln|alpha_i|`, accumulated without overflow.
    pub log_abs_a: f64,
}

fn require_negative_alpha(spec: &MeasureSpec, operation: &'static str) -> Result<f64> {
    let q = spec.prob_alpha_negative();
    if q > 0.0 {
        Ok(q)
    } else {
        Err(Error::NotApplicable { operation })
    }
}

/// Runs the chain until the running product first turns negative.
pub fn stopping_time_negative<R: RngCore + ?Sized>(
    spec: &MeasureSpec,
    rng: &mut R,
    max_steps: usize,
) -> Result<StoppedRun> {
    let sampler = Sampler::new(spec)?;
    require_negative_alpha(spec, "stopping_time_negative")?;
    stop_negative(&sampler, rng, max_steps)
}

pub(crate) fn stop_negative<R: RngCore + ?Sized>(
    sampler: &Sampler,
    rng: &mut R,
    max_steps: usize,
) -> Result<StoppedRun> {
    let (mut a, mut b, mut log_abs_a) = (1.0f64, 0.0f64, 0.0f64);
    for tau in 1..=max_steps {
        let (alpha, beta) = sampler.draw(rng);
        b += beta / a;
        a *= alpha;
        log_abs_a += alpha.abs().ln();
        if a < 0.0 {
            return Ok(StoppedRun { tau, a, b, log_abs_a });
        }
    }
    Err(Error::NotTerminated { max_steps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaldReport {
    /// Monte Carlo mean of `ln|A_{tau_-}|`.
    pub lhs: f64,
    /// `E{tau_-} * K = K / q`.
    pub rhs: f64,
    pub stderr: f64,
    pub mean_tau: f64,
    pub tau_stderr: f64,
    /// `1 / q`.
    pub expected_tau: f64,
    /// Paths that did not stop within the step cap (excluded from the means).
    pub excluded: usize,
}

/// Compares `E{ln|A_{tau_-}|}` with `E{tau_-} E{ln|alpha|}` over `n_paths` stopped paths.
pub fn wald_check(spec: &MeasureSpec, n_paths: usize, seed: u64, max_steps: usize) -> Result<WaldReport> {
    let sampler = Sampler::new(spec)?;
    let q = require_negative_alpha(spec, "wald_check")?;
    let k = spec.classify(DEFAULT_CRITICAL_TOLERANCE)?.k;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Regime {
            operation: "wald_check",
            expected: "in (0, inf)",
            k,
        });
    }
    let runs = ensemble(seed, n_paths, |rng, _| stop_negative(&sampler, rng, max_steps).ok());
    let stopped: Vec<StoppedRun> = runs.iter().flatten().copied().collect();
    let logs: Vec<f64> = stopped.iter().map(|r| r.log_abs_a).collect();
    let taus: Vec<f64> = stopped.iter().map(|r| r.tau as f64).collect();
    let (lhs, stderr) = mean_stderr(&logs);
    let (mean_tau, tau_stderr) = mean_stderr(&taus);
    Ok(WaldReport {
        lhs,
        rhs: k / q,
        stderr,
        mean_tau,
        tau_stderr,
        expected_tau: 1.0 / q,
        excluded: n_paths - stopped.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleReport {
    /// Monte Carlo mean of `y(X_n)` over paths started at `x0`.
    pub estimate: f64,
    /// `y(x0)`.
    pub reference: f64,
    pub stderr: f64,
}

impl MartingaleReport {
    pub fn gap(&self) -> f64 {
        (self.estimate - self.reference).abs()
    }
}

/// Estimates `E_{x0}{y(X_n)}` to compare with `y(x0)`.
///
/// For a bounded harmonic `y` the two agree; the gap is reported, not judged.
pub fn martingale_check(
    spec: &MeasureSpec,
    y: &GridFunction,
    x0: f64,
    n: usize,
    n_paths: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    require_steps(n)?;
    let sampler = Sampler::new(spec)?;
    let values = ensemble(seed, n_paths, |rng, _| {
        let mut x = x0;
        for _ in 0..n {
            let (alpha, beta) = sampler.draw(rng);
            x = alpha * (x - beta);
        }
        // the clamp extension makes infinite arguments evaluable as well
        y.eval(x)
    });
    let (estimate, stderr) = mean_stderr(&values);
    Ok(MartingaleReport {
        estimate,
        reference: y.eval(x0),
        stderr,
    })
}
