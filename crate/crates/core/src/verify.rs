//! Executable checks of the structural results, each with a measured
//! statistic, its tolerance and a pass flag.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::measure::{MeasureSpec, Regime, DEFAULT_CRITICAL_TOLERANCE};
use crate::operator::{iterate, GridFunction, TransferOperator, DEFAULT_INTERIOR_MARGIN};
use crate::rng::ensemble;
use crate::series::{canonical_cdf, CanonicalOptions, EmpiricalCdf, SeriesConfig, SeriesSampler, DEFAULT_DKW_DELTA};
use crate::{Error, Result};

pub mod suites;

/// Default fraction of the grid used for each edge window.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckReport {
    pub suite: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Supporting quantities, by name.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Vec::is_empty"))]
    pub details: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn new(suite: &str, statistic: f64, tolerance: f64, pass: bool) -> Self {
        CheckReport {
            suite: suite.to_string(),
            statistic,
            tolerance,
            pass,
            details: Vec::new(),
        }
    }

    /// `statistic < tolerance`.
    pub fn below(suite: &str, statistic: f64, tolerance: f64) -> Self {
        Self::new(suite, statistic, tolerance, statistic < tolerance)
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.details.push((name.to_string(), value));
        self
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|d| d.0 == name).map(|d| d.1)
    }
}

/// Uniform grid description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub m: usize,
}

impl GridSpec {
    /// `[-1.5 bound, 1.5 bound]` for measures with a deterministic bound on `|Upsilon|`.
    pub fn around_support(spec: &MeasureSpec, m: usize) -> Option<Self> {
        let b = spec.upsilon_bound()?;
        (b > 0.0).then_some(GridSpec {
            xmin: -1.5 * b,
            xmax: 1.5 * b,
            m,
        })
    }

    /// The sample range widened by 50% on each side.
    pub fn around_samples(samples: &[f64], m: usize) -> Self {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (c, w) = (0.5 * (lo + hi), (0.5 * (hi - lo)).max(0.5));
        GridSpec {
            xmin: c - 1.5 * w,
            xmax: c + 1.5 * w,
            m,
        }
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Result<GridFunction> {
        GridFunction::from_fn(self.xmin, self.xmax, self.m, f)
    }
}

/// Wraps an empirical CDF as a grid function.
pub fn cdf_on_grid(cdf: &EmpiricalCdf, grid: GridSpec) -> Result<GridFunction> {
    grid.sample(|x| cdf.eval(x))
}

/// Residual of the empirical canonical solution on a grid.
pub fn check_canonical(
    spec: &MeasureSpec,
    n: usize,
    grid: Option<GridSpec>,
    tol: f64,
    cfg: SeriesConfig,
    seed: u64,
) -> Result<CheckReport> {
    let cdf = canonical_cdf(spec, n, cfg, seed, CanonicalOptions::default())?;
    let grid = grid.unwrap_or_else(|| {
        GridSpec::around_support(spec, 2001).unwrap_or(GridSpec::around_samples(cdf.samples(), 2001))
    });
    let f = cdf_on_grid(&cdf, grid)?;
    let r = TransferOperator::new(spec)?.residual(&f, DEFAULT_INTERIOR_MARGIN)?;
    Ok(CheckReport::below("canonical", r, tol)
        .with("dkwHalfwidth", cdf.dkw_halfwidth(DEFAULT_DKW_DELTA))
        .with("N", n as f64)
        .with("meanDepth", cdf.diagnostics.mean_depth)
        .with("maxDepthHits", cdf.diagnostics.max_depth_hits as f64))
}

/// Iterates `T` from `f0` and checks collapse to the constant `E{f0(-Upsilon°)}`.
pub fn check_subcritical_collapse(
    spec: &MeasureSpec,
    f0: &GridFunction,
    iterations: usize,
    tol: f64,
    oracle_samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let k = spec.classify(DEFAULT_CRITICAL_TOLERANCE)?;
    if k.regime != Regime::Subcritical {
        return Err(Error::Regime {
            operation: "check_subcritical_collapse",
            expected: "< 0",
            k: k.k,
        });
    }
    let it = iterate(spec, f0, iterations, DEFAULT_INTERIOR_MARGIN)?;
    let range = it.f.interior_range(DEFAULT_INTERIOR_MARGIN);
    let limit = subcritical_limit(spec, f0, oracle_samples, seed)?;
    let deviation =
        it.f.interior(DEFAULT_INTERIOR_MARGIN)
            .map(|j| (it.f.values()[j] - limit).abs())
            .fold(0.0, f64::max);
    let statistic = range.max(deviation);
    Ok(CheckReport::below("subcritical_collapse", statistic, tol)
        .with("range", range)
        .with("limit", limit)
        .with("deviation", deviation))
}

/// Monte Carlo estimate of `E{f0(-Upsilon°)}`.
pub fn subcritical_limit(spec: &MeasureSpec, f0: &GridFunction, samples: usize, seed: u64) -> Result<f64> {
    let sampler = SeriesSampler::reversed(spec, SeriesConfig::default())?;
    let values = ensemble(seed, samples, |rng, _| f0.eval(-sampler.draw(rng).value));
    Ok(values.iter().sum::<f64>() / samples as f64)
}

/// Edge-window infima and suprema, proxies for the lim inf / lim sup at `+-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct LimitReport {
    pub m_plus: f64,
    pub m_minus: f64,
    pub big_m_plus: f64,
    pub big_m_minus: f64,
    /// Mean over each edge window.
    pub l_plus: f64,
    pub l_minus: f64,
    pub window_fraction: f64,
}

impl LimitReport {
    pub fn lower(&self) -> f64 {
        self.m_plus.min(self.m_minus)
    }

    pub fn upper(&self) -> f64 {
        self.big_m_plus.max(self.big_m_minus)
    }

    /// Largest oscillation inside either edge window.
    pub fn edge_spread(&self) -> f64 {
        (self.big_m_plus - self.m_plus).max(self.big_m_minus - self.m_minus)
    }
}

pub fn edge_limits(f: &GridFunction, window_fraction: f64) -> LimitReport {
    let v = f.values();
    let k = ((window_fraction * v.len() as f64).round() as usize).clamp(1, v.len());
    let stats = |w: &[f64]| {
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi, w.iter().sum::<f64>() / w.len() as f64)
    };
    let (m_minus, big_m_minus, l_minus) = stats(&v[..k]);
    let (m_plus, big_m_plus, l_plus) = stats(&v[v.len() - k..]);
    LimitReport {
        m_plus,
        m_minus,
        big_m_plus,
        big_m_minus,
        l_plus,
        l_minus,
        window_fraction,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrinciple {
    pub limits: LimitReport,
    pub check: CheckReport,
}

/// Checks `min(m+, m-) - eps <= f <= max(M+, M-) + eps` on the whole grid.
pub fn check_max_principle(f: &GridFunction, window_fraction: f64, eps: f64) -> MaxPrinciple {
    let limits = edge_limits(f, window_fraction);
    let excess = (limits.lower() - f.min()).max(f.max() - limits.upper()).max(0.0);
    let check = CheckReport::new("max_principle", excess, eps, excess <= eps)
        .with("m", limits.lower())
        .with("M", limits.upper());
    MaxPrinciple { limits, check }
}

/// For `P(alpha < 0) > 0`: equal edge limits, and a candidate with small
/// residual and flat edges must be flat throughout.
pub fn check_limit_equality(
    f: &GridFunction,
    spec: &MeasureSpec,
    window_fraction: f64,
    tol: f64,
) -> Result<CheckReport> {
    if spec.prob_alpha_negative() <= 0.0 {
        return Err(Error::NotApplicable {
            operation: "check_limit_equality",
        });
    }
    let limits = edge_limits(f, window_fraction);
    let gap = (limits.big_m_plus - limits.big_m_minus)
        .abs()
        .max((limits.m_plus - limits.m_minus).abs());
    let residual = TransferOperator::new(spec)?.residual(f, DEFAULT_INTERIOR_MARGIN)?;
    let range = f.max() - f.min();
    let near_solution = residual < tol && limits.edge_spread() < tol;
    let constant_ok = !near_solution || range < 2.0 * tol;
    Ok(CheckReport::new("limit_equality", gap, tol, gap < tol && constant_ok)
        .with("residual", residual)
        .with("range", range)
        .with("edgeSpread", limits.edge_spread()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit {
    pub c0: f64,
    pub c1: f64,
    pub distance: f64,
    pub check: CheckReport,
}

/// Fits `f = c0 + c1 F_Upsilon` with `c1 = L+ - L-`, `c0 = L-` read from the edge windows.
pub fn check_affine_uniqueness(
    f: &GridFunction,
    spec: &MeasureSpec,
    n: usize,
    tol: f64,
    window_fraction: f64,
    seed: u64,
) -> Result<AffineFit> {
    let limits = edge_limits(f, window_fraction);
    if limits.edge_spread() >= tol {
        return Err(Error::Precondition(alloc::format!(
            "edge windows are not flat (spread {} >= {tol})",
            limits.edge_spread()
        )));
    }
    let cdf = canonical_cdf(spec, n, SeriesConfig::default(), seed, CanonicalOptions::default())?;
    let (c0, c1) = (limits.l_minus, limits.l_plus - limits.l_minus);
    let distance = (0..f.m())
        .map(|j| (f.values()[j] - (c0 + c1 * cdf.eval(f.node(j)))).abs())
        .fold(0.0, f64::max);
    let check = CheckReport::below("affine_uniqueness", distance, tol)
        .with("c0", c0)
        .with("c1", c1)
        .with("dkwHalfwidth", cdf.dkw_halfwidth(DEFAULT_DKW_DELTA));
    Ok(AffineFit {
        c0,
        c1,
        distance,
        check,
    })
}
