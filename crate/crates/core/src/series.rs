//! The random series `Upsilon = sum_n beta_n / A_{n-1}` and the canonical
//! solution `F_Upsilon(x) = P(Upsilon <= x)`.

use alloc::vec::Vec;
use rand_core::RngCore;

use crate::ecdf::{dkw_halfwidth, Ecdf};
use crate::measure::{MeasureSpec, Sampler, DEFAULT_CRITICAL_TOLERANCE};
use crate::rng::ensemble;
use crate::{Error, Result};

/// Default confidence parameter of the DKW band.
pub const DEFAULT_DKW_DELTA: f64 = 0.05;

/// Truncation control for the partial sums.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct SeriesConfig {
    /// Stop once the running scale factor drops to this value.
    pub tail_tolerance: f64,
    pub min_depth: usize,
    pub max_depth: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            tail_tolerance: 1e-12,
            min_depth: 16,
            max_depth: 10_000,
        }
    }
}

impl SeriesConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0) || self.min_depth > self.max_depth || self.max_depth == 0 {
            return Err(Error::InvalidArgument(alloc::format!("invalid series config {self:?}")));
        }
        Ok(())
    }
}

/// One truncated draw of the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesDraw {
    pub value: f64,
    pub depth: usize,
    /// The partial sum stopped at `max_depth` rather than at the tolerance.
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// `sum beta_n / A_{n-1}`, for `K > 0`.
    Forward,
    /// `sum beta_n A_n`, for `K < 0`.
    Reversed,
}

/// A spec checked for its regime and prepared for repeated series draws.
#[derive(Debug, Clone)]
pub struct SeriesSampler {
    sampler: Sampler,
    cfg: SeriesConfig,
    direction: Direction,
}

impl SeriesSampler {
    /// Sampler for `Upsilon`; requires `K > 0` and a finite log-moment of `beta`.
    pub fn forward(spec: &MeasureSpec, cfg: SeriesConfig) -> Result<Self> {
        Self::build(spec, cfg, Direction::Forward)
    }

    /// Sampler for the reversed limit `Upsilon° = sum beta_n A_n`; requires `K < 0`.
    pub fn reversed(spec: &MeasureSpec, cfg: SeriesConfig) -> Result<Self> {
        Self::build(spec, cfg, Direction::Reversed)
    }

    fn build(spec: &MeasureSpec, cfg: SeriesConfig, direction: Direction) -> Result<Self> {
        cfg.check()?;
        let report = spec.classify(DEFAULT_CRITICAL_TOLERANCE)?;
        let k = report.k;
        let ok = match direction {
            Direction::Forward => report.regime == crate::Regime::Supercritical,
            Direction::Reversed => report.regime == crate::Regime::Subcritical,
        };
        if !ok {
            return Err(Error::Regime {
                operation: match direction {
                    Direction::Forward => "sample_upsilon",
                    Direction::Reversed => "sample_upsilon_reversed",
                },
                expected: match direction {
                    Direction::Forward => "> 0",
                    Direction::Reversed => "< 0",
                },
                k,
            });
        }
        Ok(SeriesSampler {
            sampler: Sampler::new(spec)?,
            cfg,
            direction,
        })
    }

    pub fn spec(&self) -> &MeasureSpec {
        self.sampler.spec()
    }

    pub fn config(&self) -> &SeriesConfig {
        &self.cfg
    }

    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> SeriesDraw {
        let cfg = &self.cfg;
        let mut value = 0.0;
        match self.direction {
            Direction::Forward => {
                // scale = 1 / A_{n-1}
                let mut scale = 1.0f64;
                for n in 1..=cfg.max_depth {
                    let (alpha, beta) = self.sampler.draw(rng);
                    value += beta * scale;
                    scale /= alpha;
                    if n >= cfg.min_depth && scale.abs() <= cfg.tail_tolerance {
                        return SeriesDraw {
                            value,
                            depth: n,
                            capped: false,
                        };
                    }
                }
            }
            Direction::Reversed => {
                let mut a = 1.0f64;
                for n in 1..=cfg.max_depth {
                    let (alpha, beta) = self.sampler.draw(rng);
                    a *= alpha;
                    value += beta * a;
                    if n >= cfg.min_depth && a.abs() <= cfg.tail_tolerance {
                        return SeriesDraw {
                            value,
                            depth: n,
                            capped: false,
                        };
                    }
                }
            }
        }
        SeriesDraw {
            value,
            depth: cfg.max_depth,
            capped: true,
        }
    }

    /// `n` draws using the counter-based streams of `seed`.
    pub fn draw_many(&self, n: usize, seed: u64) -> Vec<SeriesDraw> {
        ensemble(seed, n, |rng, _| self.draw(rng))
    }
}

/// One truncated draw of `Upsilon`.
pub fn sample_upsilon<R: RngCore + ?Sized>(spec: &MeasureSpec, cfg: SeriesConfig, rng: &mut R) -> Result<SeriesDraw> {
    Ok(SeriesSampler::forward(spec, cfg)?.draw(rng))
}

/// One truncated draw of `Upsilon°` (the `K < 0` reversed series).
pub fn sample_upsilon_reversed<R: RngCore + ?Sized>(
    spec: &MeasureSpec,
    cfg: SeriesConfig,
    rng: &mut R,
) -> Result<SeriesDraw> {
    Ok(SeriesSampler::reversed(spec, cfg)?.draw(rng))
}

/// What the empirical `F_Upsilon` represents for its measure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase", tag = "status"))]
pub enum CdfStatus {
    /// A bounded continuous solution of the archetypal equation.
    Solution,
    /// `alpha (c - beta) = c` almost surely: `Upsilon = c` and the CDF is a unit step.
    Degenerate { fixed_point: Option<f64> },
    /// `P(alpha < 0) > 0`: the CDF exists but does not solve the equation.
    NotASolution { q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct TruncationDiagnostics {
    pub mean_depth: f64,
    pub max_depth_hits: usize,
}

/// Empirical `F_Upsilon` from `N` independent draws.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    ecdf: Ecdf,
    pub diagnostics: TruncationDiagnostics,
    pub status: CdfStatus,
}

impl EmpiricalCdf {
    pub fn from_draws(draws: &[SeriesDraw], status: CdfStatus) -> Self {
        let n = draws.len().max(1) as f64;
        let diagnostics = TruncationDiagnostics {
            mean_depth: draws.iter().map(|d| d.depth as f64).sum::<f64>() / n,
            max_depth_hits: draws.iter().filter(|d| d.capped).count(),
        };
        EmpiricalCdf {
            ecdf: Ecdf::new(draws.iter().map(|d| d.value).collect()),
            diagnostics,
            status,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.ecdf.eval(x)
    }

    pub fn samples(&self) -> &[f64] {
        self.ecdf.samples()
    }

    pub fn len(&self) -> usize {
        self.ecdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ecdf.is_empty()
    }

    pub fn ecdf(&self) -> &Ecdf {
        &self.ecdf
    }

    pub fn dkw_halfwidth(&self, delta: f64) -> f64 {
        dkw_halfwidth(self.len(), delta)
    }

    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        self.ecdf.ks_distance(cdf)
    }

    pub fn max_jump(&self) -> f64 {
        self.ecdf.max_jump()
    }

    pub fn is_solution(&self) -> bool {
        self.status == CdfStatus::Solution
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CanonicalOptions {
    /// Return the CDF even when it is not a (continuous) solution.
    pub allow_non_solution: bool,
}

/// Builds the empirical canonical solution from `n` draws of `Upsilon`.
///
/// Refuses measures with `P(alpha < 0) > 0` or a degenerate common fixed
/// point unless `opts.allow_non_solution` is set, in which case the result
/// carries the corresponding [`CdfStatus`].
pub fn canonical_cdf(
    spec: &MeasureSpec,
    n: usize,
    cfg: SeriesConfig,
    seed: u64,
    opts: CanonicalOptions,
) -> Result<EmpiricalCdf> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let sampler = SeriesSampler::forward(spec, cfg)?;
    let assumptions = spec.validate()?;
    let q = spec.prob_alpha_negative();
    let status = if q > 0.0 {
        CdfStatus::NotASolution { q }
    } else if !assumptions.no_common_fixed_point {
        CdfStatus::Degenerate {
            fixed_point: assumptions.fixed_point,
        }
    } else {
        CdfStatus::Solution
    };
    if !opts.allow_non_solution {
        match status {
            CdfStatus::NotASolution { q } => {
                return Err(Error::NegativeAlpha {
                    operation: "canonical_cdf",
                    q,
                })
            }
            CdfStatus::Degenerate { fixed_point } => return Err(Error::Degenerate { fixed_point }),
            CdfStatus::Solution => {}
        }
    }
    Ok(EmpiricalCdf::from_draws(&sampler.draw_many(n, seed), status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Marginal;
    use crate::rng::stream;

    fn point(a: f64, b: f64) -> MeasureSpec {
        MeasureSpec::product(Marginal::PointMass { v: a }, Marginal::PointMass { v: b })
    }

    fn signs(a: f64) -> MeasureSpec {
        MeasureSpec::product(
            Marginal::PointMass { v: a },
            Marginal::discrete(&[(-1.0, 0.5), (1.0, 0.5)]),
        )
    }

    #[test]
    fn single_atom_series() {
        let d = sample_upsilon(&point(2.0, 1.0), SeriesConfig::default(), &mut stream(0, 0)).unwrap();
        assert!((d.value - 2.0).abs() < 1e-11);
        assert!(!d.capped);
        assert_eq!(d.depth, 40);
    }

    #[test]
    fn signed_series_bounded() {
        let s = SeriesSampler::forward(&signs(2.0), SeriesConfig::default()).unwrap();
        for d in s.draw_many(2000, 4) {
            assert!(d.value.abs() <= 2.0);
        }
    }

    #[test]
    fn regime_errors() {
        let sub = signs(0.5);
        assert!(matches!(
            sample_upsilon(&sub, SeriesConfig::default(), &mut stream(0, 0)),
            Err(Error::Regime { .. })
        ));
        assert!(matches!(
            sample_upsilon_reversed(&signs(2.0), SeriesConfig::default(), &mut stream(0, 0)),
            Err(Error::Regime { .. })
        ));
    }

    #[test]
    fn reversed_geometric() {
        let d = sample_upsilon_reversed(&point(0.5, 1.0), SeriesConfig::default(), &mut stream(0, 0)).unwrap();
        assert!((d.value - 1.0).abs() < 1e-11);
        let d = sample_upsilon_reversed(&point(0.5, 0.0), SeriesConfig::default(), &mut stream(0, 0)).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn depth_cap_recorded() {
        let cfg = SeriesConfig {
            tail_tolerance: 1e-12,
            min_depth: 1,
            max_depth: 5,
        };
        let d = sample_upsilon(&signs(2.0), cfg, &mut stream(0, 0)).unwrap();
        assert!(d.capped);
        assert_eq!(d.depth, 5);
        let bad = SeriesConfig {
            tail_tolerance: 0.0,
            ..cfg
        };
        assert!(sample_upsilon(&signs(2.0), bad, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn degenerate_refused_then_point_mass() {
        let spec = point(2.0, 1.0);
        let err = canonical_cdf(&spec, 100, SeriesConfig::default(), 0, CanonicalOptions::default()).unwrap_err();
        assert_eq!(err, Error::Degenerate { fixed_point: Some(2.0) });
        let f = canonical_cdf(
            &spec,
            100,
            SeriesConfig::default(),
            0,
            CanonicalOptions {
                allow_non_solution: true,
            },
        )
        .unwrap();
        assert_eq!(f.eval(1.9), 0.0);
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.max_jump(), 1.0);
        assert!(!f.is_solution());
    }

    #[test]
    fn negative_alpha_refused() {
        let spec = MeasureSpec::product(
            Marginal::discrete(&[(-2.0, 0.5), (3.0, 0.5)]),
            Marginal::discrete(&[(-1.0, 0.5), (1.0, 0.5)]),
        );
        let err = canonical_cdf(&spec, 100, SeriesConfig::default(), 0, CanonicalOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NegativeAlpha { .. }));
        let f = canonical_cdf(
            &spec,
            100,
            SeriesConfig::default(),
            0,
            CanonicalOptions {
                allow_non_solution: true,
            },
        )
        .unwrap();
        assert_eq!(f.status, CdfStatus::NotASolution { q: 0.5 });
    }

    #[test]
    fn diagnostics_reported() {
        let f = canonical_cdf(
            &signs(2.0),
            1000,
            SeriesConfig::default(),
            0,
            CanonicalOptions::default(),
        )
        .unwrap();
        assert_eq!(f.diagnostics.mean_depth, 40.0);
        assert_eq!(f.diagnostics.max_depth_hits, 0);
        assert!(f.is_solution());
    }
}
