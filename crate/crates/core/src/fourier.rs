//! Characteristic-function identities.
//!
//! For `alpha > 0` the Fourier transform of a solution's derivative obeys
//! `z(s) = E{e^{i s beta} z(s / alpha)}`, hence after `n` steps
//! `z(s) = E{e^{i s B_n} z(s / A_n)}` and in the limit `z(s) = z(0) E{e^{i s Upsilon}}`.
//! When `alpha` can be negative the same iteration over the blocks between
//! sign changes of `A_n` picks up a factor `(-1)^n`.

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::chain::stop_negative;
use crate::measure::{cis, MeasureSpec, Sampler, DEFAULT_CRITICAL_TOLERANCE};
use crate::rng::{ensemble, par_map};
use crate::series::{SeriesConfig, SeriesSampler};
use crate::{Error, Result};

/// Values of a (characteristic) function on a list of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub s_values: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SpectrumGrid {
    /// Linear interpolation in `s`, using `z(-s) = conj z(s)` when the grid
    /// holds only non-negative frequencies, and clamping beyond its range.
    ///
    /// Expects `s_values` sorted ascending.
    pub fn eval(&self, s: f64) -> Complex64 {
        let (xs, vs) = (&self.s_values, &self.values);
        if xs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        if s < 0.0 && xs[0] >= 0.0 {
            return self.eval(-s).conj();
        }
        let j = xs.partition_point(|&x| x <= s);
        if j == 0 {
            return vs[0];
        }
        if j == xs.len() {
            return vs[xs.len() - 1];
        }
        let t = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
        vs[j - 1] + (vs[j] - vs[j - 1]) * t
    }

    /// `max_k |self(s_k) - other(s_k)|` over `s_k` in `[lo, hi]`.
    pub fn sup_distance_on(&self, other: &SpectrumGrid, lo: f64, hi: f64) -> f64 {
        self.s_values
            .iter()
            .zip(&self.values)
            .filter(|(s, _)| (lo..=hi).contains(*s))
            .map(|(&s, v)| (v - other.eval(s)).norm())
            .fold(0.0, f64::max)
    }
}

/// `s = 0` followed by `count` geometrically spaced points in `[lo, hi]`.
pub fn geometric_s_values(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut s = Vec::with_capacity(count + 1);
    s.push(0.0);
    if count == 1 {
        s.push(lo);
    } else {
        let ratio = (hi / lo).ln() / (count - 1) as f64;
        s.extend((0..count).map(|k| lo * (ratio * k as f64).exp()));
    }
    s
}

/// 256 geometric points from 0.01 to 100, plus `s = 0`.
pub fn default_s_values() -> Vec<f64> {
    geometric_s_values(0.01, 100.0, 256)
}

/// A Monte Carlo estimate with per-frequency standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub grid: SpectrumGrid,
    /// Standard error of the sample mean (zero for exact recursions).
    pub stderr: Vec<f64>,
}

fn mean_cis(values: &[f64], s: f64) -> (Complex64, f64) {
    let n = values.len() as f64;
    let (mut c, mut si, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for &v in values {
        let (sv, cv) = (s * v).sin_cos();
        c += cv;
        si += sv;
        c2 += cv * cv;
        s2 += sv * sv;
    }
    let mean = Complex64::new(c / n, si / n);
    let var = (c2 / n - mean.re * mean.re) + (s2 / n - mean.im * mean.im);
    (mean, (var.max(0.0) / n).sqrt())
}

/// `(1/N) sum_k e^{i s x_k}` for every `s`.
pub fn charfn_from_samples(samples: &[f64], s_values: &[f64]) -> SpectrumEstimate {
    let est: Vec<(Complex64, f64)> = par_map(s_values, |&s| mean_cis(samples, s));
    SpectrumEstimate {
        grid: SpectrumGrid {
            s_values: s_values.to_vec(),
            values: est.iter().map(|e| e.0).collect(),
        },
        stderr: est.iter().map(|e| e.1).collect(),
    }
}

/// Empirical characteristic function of `Upsilon` from `n` draws.
pub fn charfn(
    spec: &MeasureSpec,
    s_values: &[f64],
    n: usize,
    cfg: SeriesConfig,
    seed: u64,
) -> Result<SpectrumEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let sampler = SeriesSampler::forward(spec, cfg)?;
    let samples: Vec<f64> = sampler.draw_many(n, seed).iter().map(|d| d.value).collect();
    Ok(charfn_from_samples(&samples, s_values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierMethod {
    /// Closed-form product over the single branch of a point-mass `alpha`.
    ExactRecursion,
    /// Mean over simulated coefficient paths.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierIterate {
    pub estimate: SpectrumEstimate,
    pub method: FourierMethod,
}

fn require_positive_alpha(spec: &MeasureSpec, n: usize) -> Result<()> {
    if !spec.validate()?.nonzero_alpha {
        return Err(Error::ZeroAlpha);
    }
    let q = spec.prob_alpha_negative();
    if q > 0.0 {
        return Err(Error::NegativeAlpha {
            operation: "fourier_iterate (see alternation_probe)",
            q,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    Ok(())
}

/// `E{e^{i s B_n} z0(s / A_n)}`, exactly when `alpha` is a point mass and by
/// path simulation otherwise.
pub fn fourier_iterate<F>(
    spec: &MeasureSpec,
    z0: F,
    s_values: &[f64],
    n: usize,
    n_paths: usize,
    seed: u64,
) -> Result<FourierIterate>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    require_positive_alpha(spec, n)?;
    if spec.alpha_point_mass().is_some() {
        Ok(FourierIterate {
            estimate: fourier_iterate_exact(spec, z0, s_values, n)?,
            method: FourierMethod::ExactRecursion,
        })
    } else {
        Ok(FourierIterate {
            estimate: fourier_iterate_monte_carlo(spec, z0, s_values, n, n_paths, seed)?,
            method: FourierMethod::MonteCarlo,
        })
    }
}

/// Single-branch recursion for `alpha = a` a.s.:
/// `z0(s / a^n) prod_{k<n} phi_beta(s / a^k)`.
pub fn fourier_iterate_exact<F>(spec: &MeasureSpec, z0: F, s_values: &[f64], n: usize) -> Result<SpectrumEstimate>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    require_positive_alpha(spec, n)?;
    let a = spec
        .alpha_point_mass()
        .ok_or_else(|| Error::InvalidArgument("exact recursion needs a point-mass alpha".into()))?;
    let values = par_map(s_values, |&s| {
        let mut t = s;
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            acc *= spec.beta_charfn(t);
            t /= a;
        }
        acc * z0(t)
    });
    Ok(SpectrumEstimate {
        grid: SpectrumGrid {
            s_values: s_values.to_vec(),
            values,
        },
        stderr: alloc::vec![0.0; s_values.len()],
    })
}

/// Path-simulation estimate of `E{e^{i s B_n} z0(s / A_n)}` over `n_paths` paths.
pub fn fourier_iterate_monte_carlo<F>(
    spec: &MeasureSpec,
    z0: F,
    s_values: &[f64],
    n: usize,
    n_paths: usize,
    seed: u64,
) -> Result<SpectrumEstimate>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    require_positive_alpha(spec, n)?;
    if n_paths == 0 {
        return Err(Error::InvalidArgument("path count must be positive".into()));
    }
    let sampler = Sampler::new(spec)?;
    let paths: Vec<(f64, f64)> = ensemble(seed, n_paths, |rng, _| {
        let (mut a, mut b) = (1.0f64, 0.0f64);
        for _ in 0..n {
            let (alpha, beta) = sampler.draw(rng);
            b += beta / a;
            a *= alpha;
        }
        (b, a)
    });
    let np = n_paths as f64;
    let est: Vec<(Complex64, f64)> = par_map(s_values, |&s| {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sq = 0.0;
        for &(b, a) in &paths {
            let v = cis(s * b) * z0(s / a);
            sum += v;
            sq += v.norm_sqr();
        }
        let mean = sum / np;
        let var = (sq / np - mean.norm_sqr()).max(0.0);
        (mean, (var / np).sqrt())
    });
    Ok(SpectrumEstimate {
        grid: SpectrumGrid {
            s_values: s_values.to_vec(),
            values: est.iter().map(|e| e.0).collect(),
        },
        stderr: est.iter().map(|e| e.1).collect(),
    })
}

/// One value of the sign-alternating iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternationPoint {
    pub n: usize,
    pub s: f64,
    /// `(-1)^n E{e^{i s Upsilon~_n}}`.
    pub value: Complex64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternationProbe {
    pub points: Vec<AlternationPoint>,
    /// Paths dropped because a block exceeded the stopping-time cap.
    pub excluded: usize,
}

/// `r_n(s) = (-1)^n E{e^{i s Upsilon~_n}}` for `n` in `n_lo..=n_hi`, where
/// `Upsilon~_n = sum_{i<=n} beta~_i / A~_{i-1}` is built from i.i.d. blocks
/// `(alpha~, beta~) = (A_{tau_-}, B_{tau_-})` of independent stopped runs.
pub fn alternation_probe(
    spec: &MeasureSpec,
    s_values: &[f64],
    n_lo: usize,
    n_hi: usize,
    n_paths: usize,
    seed: u64,
    max_steps: usize,
) -> Result<AlternationProbe> {
    let sampler = Sampler::new(spec)?;
    if spec.prob_alpha_negative() <= 0.0 {
        return Err(Error::NotApplicable {
            operation: "alternation_probe",
        });
    }
    let k = spec.classify(DEFAULT_CRITICAL_TOLERANCE)?.k;
    if !(k > 0.0) {
        return Err(Error::Regime {
            operation: "alternation_probe",
            expected: "> 0",
            k,
        });
    }
    if n_lo == 0 || n_lo > n_hi || n_paths == 0 {
        return Err(Error::InvalidArgument(
            "need 1 <= n_lo <= n_hi and a positive path count".into(),
        ));
    }
    let width = n_hi - n_lo + 1;
    let partial: Vec<Option<Vec<f64>>> = ensemble(seed, n_paths, |rng, _| {
        let mut out = Vec::with_capacity(width);
        let (mut inv_a, mut sum) = (1.0f64, 0.0f64);
        for n in 1..=n_hi {
            let block = stop_negative(&sampler, rng, max_steps).ok()?;
            sum += block.b * inv_a;
            inv_a /= block.a;
            if n >= n_lo {
                out.push(sum);
            }
        }
        Some(out)
    });
    let kept: Vec<&Vec<f64>> = partial.iter().flatten().collect();
    let excluded = n_paths - kept.len();
    if kept.is_empty() {
        return Err(Error::NotTerminated { max_steps });
    }
    let mut points = Vec::with_capacity(width * s_values.len());
    for (offset, n) in (n_lo..=n_hi).enumerate() {
        let column: Vec<f64> = kept.iter().map(|p| p[offset]).collect();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for (&s, (mean, se)) in s_values.iter().zip(par_map(s_values, |&s| mean_cis(&column, s))) {
            points.push(AlternationPoint {
                n,
                s,
                value: mean * sign,
                stderr: se,
            });
        }
    }
    Ok(AlternationProbe { points, excluded })
}
