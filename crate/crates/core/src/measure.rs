//! The law `mu` of the coefficient pair `(alpha, beta)`.
//!
//! A [`MeasureSpec`] is either a finite list of joint atoms or a product of
//! two independent marginals. All expectations over `mu` are computed from
//! a finite set of weighted nodes: the atoms themselves for discrete laws,
//! 64-node Gauss rules for parametric marginals.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;
use rand_core::RngCore;

use crate::quadrature;
use crate::rng::uniform;
use crate::{Error, Result};

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// `|K|` below this reports the critical regime for quadrature-based `K`.
pub const DEFAULT_CRITICAL_TOLERANCE: f64 = 1e-9;

/// One joint atom `P(alpha = a, beta = b) = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Atom {
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl Atom {
    pub const fn new(a: f64, b: f64, p: f64) -> Self {
        Atom { a, b, p }
    }
}

/// One atom of a discrete marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedValue {
    pub v: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "camelCase"))]
pub enum Marginal {
    PointMass { v: f64 },
    Discrete { atoms: Vec<WeightedValue> },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "camelCase"))]
pub enum MeasureSpec {
    Discrete { atoms: Vec<Atom> },
    Product { alpha: Marginal, beta: Marginal },
}

impl Marginal {
    pub fn discrete(pairs: &[(f64, f64)]) -> Self {
        Marginal::Discrete {
            atoms: pairs.iter().map(|&(v, p)| WeightedValue { v, p }).collect(),
        }
    }

    fn check(&self, which: &str) -> Result<()> {
        match self {
            Marginal::PointMass { v } => finite(*v, which),
            Marginal::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Malformed(format!("{which}: empty atom list")));
                }
                for w in atoms {
                    finite(w.v, which)?;
                    check_probability(w.p, which)?;
                }
                check_total(atoms.iter().map(|w| w.p), which)
            }
            Marginal::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::Malformed(format!(
                        "{which}: exponential rate must be positive, got {rate}"
                    )));
                }
                Ok(())
            }
            Marginal::Uniform { lo, hi } => {
                finite(*lo, which)?;
                finite(*hi, which)?;
                if lo >= hi {
                    return Err(Error::Malformed(format!(
                        "{which}: uniform needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Marginal::PointMass { .. } | Marginal::Discrete { .. })
    }

    /// Weighted nodes: exact atoms, or a 64-node Gauss rule.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match self {
            Marginal::PointMass { v } => alloc::vec![(*v, 1.0)],
            Marginal::Discrete { atoms } => atoms.iter().map(|w| (w.v, w.p)).collect(),
            Marginal::Exponential { rate } => quadrature::gauss_laguerre()
                .into_iter()
                .map(|(x, w)| (x / rate, w))
                .collect(),
            Marginal::Uniform { lo, hi } => {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                quadrature::gauss_legendre()
                    .into_iter()
                    .map(|(x, w)| (mid + half * x, 0.5 * w))
                    .collect()
            }
        }
    }

    fn excludes_zero(&self) -> bool {
        match self {
            Marginal::PointMass { v } => *v != 0.0,
            Marginal::Discrete { atoms } => atoms.iter().all(|w| w.v != 0.0),
            // open support (0, inf)
            Marginal::Exponential { .. } => true,
            Marginal::Uniform { lo, hi } => *lo > 0.0 || *hi < 0.0,
        }
    }

    fn prob_negative(&self) -> f64 {
        match self {
            Marginal::PointMass { v } => indicator(*v < 0.0),
            Marginal::Discrete { atoms } => atoms.iter().filter(|w| w.v < 0.0).map(|w| w.p).sum(),
            Marginal::Exponential { .. } => 0.0,
            Marginal::Uniform { lo, hi } => ((0.0f64.min(*hi) - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    fn sup_abs(&self) -> Option<f64> {
        match self {
            Marginal::PointMass { v } => Some(v.abs()),
            Marginal::Discrete { atoms } => Some(atoms.iter().map(|w| w.v.abs()).fold(0.0, f64::max)),
            Marginal::Exponential { .. } => None,
            Marginal::Uniform { lo, hi } => Some(lo.abs().max(hi.abs())),
        }
    }

    fn inf_abs(&self) -> f64 {
        match self {
            Marginal::PointMass { v } => v.abs(),
            Marginal::Discrete { atoms } => atoms.iter().map(|w| w.v.abs()).fold(f64::INFINITY, f64::min),
            Marginal::Exponential { .. } => 0.0,
            Marginal::Uniform { lo, hi } => {
                if *lo > 0.0 {
                    *lo
                } else if *hi < 0.0 {
                    -hi
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact characteristic function `E{e^{i t V}}`.
    pub fn charfn(&self, t: f64) -> Complex64 {
        match self {
            Marginal::PointMass { v } => cis(t * v),
            Marginal::Discrete { atoms } => atoms.iter().map(|w| cis(t * w.v) * w.p).sum(),
            Marginal::Exponential { rate } => Complex64::new(*rate, 0.0) / Complex64::new(*rate, -t),
            Marginal::Uniform { lo, hi } => {
                if t == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    (cis(t * hi) - cis(t * lo)) / Complex64::new(0.0, t * (hi - lo))
                }
            }
        }
    }

    fn draw<R: RngCore + ?Sized>(&self, cumulative: &[f64], rng: &mut R) -> f64 {
        match self {
            Marginal::PointMass { v } => *v,
            Marginal::Discrete { atoms } => atoms[pick(cumulative, uniform(rng))].v,
            Marginal::Exponential { rate } => -(1.0 - uniform(rng)).ln() / rate,
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * uniform(rng),
        }
    }

    fn cumulative(&self) -> Vec<f64> {
        match self {
            Marginal::Discrete { atoms } => cumulative(atoms.iter().map(|w| w.p)),
            _ => Vec::new(),
        }
    }
}

pub(crate) fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn finite(x: f64, which: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Malformed(format!("{which}: non-finite value {x}")))
    }
}

fn check_probability(p: f64, which: &str) -> Result<()> {
    if p.is_finite() && p > 0.0 && p <= 1.0 + PROBABILITY_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Malformed(format!("{which}: probability {p} outside (0, 1]")))
    }
}

fn check_total(ps: impl Iterator<Item = f64>, which: &str) -> Result<()> {
    let total: f64 = ps.sum();
    if (total - 1.0).abs() <= PROBABILITY_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "{which}: probabilities sum to {total}, not 1"
        )))
    }
}

fn cumulative(ps: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = ps
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    // guard against rounding of the total so that u < 1 always selects an atom
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

/// Flags for the standing assumptions on `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct AssumptionReport {
    /// (i) `P(alpha != 0) = 1`.
    pub nonzero_alpha: bool,
    /// (ii) `P(|alpha| != 1) > 0`.
    pub non_unit_scale: bool,
    /// (iii) no `c` with `alpha (c - beta) = c` almost surely.
    pub no_common_fixed_point: bool,
    /// The common fixed point when (iii) fails and it is unique.
    pub fixed_point: Option<f64>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.nonzero_alpha && self.non_unit_scale && self.no_common_fixed_point
    }

    /// Errors in the order (i), (ii), (iii).
    pub fn require_all(&self) -> Result<()> {
        if !self.nonzero_alpha {
            Err(Error::ZeroAlpha)
        } else if !self.non_unit_scale {
            Err(Error::UnitScale)
        } else if !self.no_common_fixed_point {
            Err(Error::Degenerate {
                fixed_point: self.fixed_point,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct CriticalityReport {
    /// `K = E{ln|alpha|}`.
    pub k: f64,
    /// `E{ln max(|beta|, 1)}`.
    pub beta_log_moment: f64,
    pub regime: Regime,
    /// `P(alpha < 0)`.
    pub q: f64,
    pub assumptions: AssumptionReport,
    /// `true` when `K` is a finite sum over atoms rather than a quadrature.
    pub exact: bool,
    pub warning: Option<&'static str>,
}

/// Candidate fixed point `c` with `a (c - b) = c` for one atom.
enum FixedPoint {
    Unique(f64),
    Any,
    None,
}

fn atom_fixed_point(a: f64, b: f64) -> FixedPoint {
    if a == 1.0 {
        if b == 0.0 {
            FixedPoint::Any
        } else {
            FixedPoint::None
        }
    } else {
        FixedPoint::Unique(a * b / (a - 1.0))
    }
}

fn common_fixed_point(pairs: impl Iterator<Item = (f64, f64)>) -> (bool, Option<f64>) {
    let mut common: Option<f64> = None;
    for (a, b) in pairs {
        match atom_fixed_point(a, b) {
            FixedPoint::None => return (true, None),
            FixedPoint::Any => {}
            FixedPoint::Unique(c) => match common {
                None => common = Some(c),
                Some(c0) => {
                    if (c - c0).abs() > 1e-12 * c0.abs().max(c.abs()).max(1.0) {
                        return (true, None);
                    }
                }
            },
        }
    }
    // every atom shares `common` (or every atom is the identity map)
    (false, common)
}

impl MeasureSpec {
    pub fn discrete(atoms: &[(f64, f64, f64)]) -> Self {
        MeasureSpec::Discrete {
            atoms: atoms.iter().map(|&(a, b, p)| Atom { a, b, p }).collect(),
        }
    }

    pub fn product(alpha: Marginal, beta: Marginal) -> Self {
        MeasureSpec::Product { alpha, beta }
    }

    fn check_well_formed(&self) -> Result<()> {
        match self {
            MeasureSpec::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Malformed("empty atom list".into()));
                }
                for at in atoms {
                    finite(at.a, "atom a")?;
                    finite(at.b, "atom b")?;
                    check_probability(at.p, "atom")?;
                }
                check_total(atoms.iter().map(|a| a.p), "atoms")
            }
            MeasureSpec::Product { alpha, beta } => {
                alpha.check("alpha")?;
                beta.check("beta")
            }
        }
    }

    /// Checks well-formedness and evaluates the standing assumptions.
    /// Both coordinates take finitely many values.
    pub fn is_discrete(&self) -> bool {
        match self {
            MeasureSpec::Discrete { .. } => true,
            MeasureSpec::Product { alpha, beta } => alpha.is_discrete() && beta.is_discrete(),
        }
    }

    pub fn validate(&self) -> Result<AssumptionReport> {
        self.check_well_formed()?;
        let report = match self {
            MeasureSpec::Discrete { atoms } => {
                let (ok, c) = common_fixed_point(atoms.iter().map(|at| (at.a, at.b)));
                AssumptionReport {
                    nonzero_alpha: atoms.iter().all(|at| at.a != 0.0),
                    non_unit_scale: atoms.iter().any(|at| at.a.abs() != 1.0),
                    no_common_fixed_point: ok,
                    fixed_point: c,
                }
            }
            MeasureSpec::Product { alpha, beta } => {
                let non_unit_scale = match alpha {
                    Marginal::PointMass { v } => v.abs() != 1.0,
                    Marginal::Discrete { atoms } => atoms.iter().any(|w| w.v.abs() != 1.0),
                    _ => true,
                };
                let (ok, c) = if alpha.is_discrete() && beta.is_discrete() {
                    let (an, bn) = (alpha.nodes(), beta.nodes());
                    common_fixed_point(an.iter().flat_map(|&(a, _)| bn.iter().map(move |&(b, _)| (a, b))))
                } else {
                    // a continuous marginal puts zero mass on every single solution of a(c - b) = c
                    (true, None)
                };
                AssumptionReport {
                    nonzero_alpha: alpha.excludes_zero(),
                    non_unit_scale,
                    no_common_fixed_point: ok,
                    fixed_point: c,
                }
            }
        };
        Ok(report)
    }

    /// Computes `K`, the log-moment of `beta`, `q = P(alpha < 0)` and the regime.
    pub fn classify(&self, tol: f64) -> Result<CriticalityReport> {
        let assumptions = self.validate()?;
        if !assumptions.nonzero_alpha {
            return Err(Error::ZeroAlpha);
        }
        let alpha = self.alpha_nodes();
        let k: f64 = alpha.iter().map(|&(a, w)| w * a.abs().ln()).sum();
        let beta_log_moment: f64 = self.beta_nodes().iter().map(|&(b, w)| w * b.abs().max(1.0).ln()).sum();
        if !beta_log_moment.is_finite() || !k.is_finite() {
            return Err(Error::MomentDivergence);
        }
        let exact = self.alpha_is_discrete();
        let threshold = if exact {
            // rounding level of the finite sum
            8.0 * f64::EPSILON * alpha.iter().map(|&(a, w)| w * a.abs().ln().abs()).sum::<f64>()
        } else {
            tol
        };
        let (regime, warning) = if k.abs() <= threshold {
            (
                Regime::Critical,
                Some("critical case K = 0: no existence or uniqueness claims are made"),
            )
        } else if k < 0.0 {
            (Regime::Subcritical, None)
        } else {
            (Regime::Supercritical, None)
        };
        Ok(CriticalityReport {
            k,
            beta_log_moment,
            regime,
            q: self.prob_alpha_negative(),
            assumptions,
            exact,
            warning,
        })
    }

    fn alpha_is_discrete(&self) -> bool {
        match self {
            MeasureSpec::Discrete { .. } => true,
            MeasureSpec::Product { alpha, .. } => alpha.is_discrete(),
        }
    }

    /// Weighted nodes of the `alpha` marginal.
    pub fn alpha_nodes(&self) -> Vec<(f64, f64)> {
        match self {
            MeasureSpec::Discrete { atoms } => atoms.iter().map(|at| (at.a, at.p)).collect(),
            MeasureSpec::Product { alpha, .. } => alpha.nodes(),
        }
    }

    /// Weighted nodes of the `beta` marginal.
    pub fn beta_nodes(&self) -> Vec<(f64, f64)> {
        match self {
            MeasureSpec::Discrete { atoms } => atoms.iter().map(|at| (at.b, at.p)).collect(),
            MeasureSpec::Product { beta, .. } => beta.nodes(),
        }
    }

    /// Weighted joint nodes; `E{g(alpha, beta)}` is `sum p * g(a, b)` over them.
    pub fn expectation_nodes(&self) -> Vec<Atom> {
        match self {
            MeasureSpec::Discrete { atoms } => atoms.clone(),
            MeasureSpec::Product { alpha, beta } => {
                let bn = beta.nodes();
                alpha
                    .nodes()
                    .into_iter()
                    .flat_map(|(a, wa)| bn.iter().map(move |&(b, wb)| Atom { a, b, p: wa * wb }))
                    .collect()
            }
        }
    }

    pub fn prob_alpha_negative(&self) -> f64 {
        match self {
            MeasureSpec::Discrete { atoms } => atoms.iter().filter(|at| at.a < 0.0).map(|at| at.p).sum(),
            MeasureSpec::Product { alpha, .. } => alpha.prob_negative(),
        }
    }

    /// `Some(a)` when `alpha` is almost surely the constant `a`.
    pub fn alpha_point_mass(&self) -> Option<f64> {
        match self {
            MeasureSpec::Discrete { atoms } => {
                let a = atoms.first()?.a;
                atoms.iter().all(|at| at.a == a).then_some(a)
            }
            MeasureSpec::Product { alpha, .. } => match alpha {
                Marginal::PointMass { v } => Some(*v),
                Marginal::Discrete { atoms } => {
                    let v = atoms.first()?.v;
                    atoms.iter().all(|w| w.v == v).then_some(v)
                }
                _ => None,
            },
        }
    }

    /// Exact `E{e^{i t beta}}`.
    pub fn beta_charfn(&self, t: f64) -> Complex64 {
        match self {
            MeasureSpec::Discrete { atoms } => atoms.iter().map(|at| cis(t * at.b) * at.p).sum(),
            MeasureSpec::Product { beta, .. } => beta.charfn(t),
        }
    }

    /// Deterministic bound on `|Upsilon|`: `sup|beta| / (1 - 1/inf|alpha|)`.
    ///
    /// `None` when `beta` is unbounded or `inf|alpha| <= 1`.
    pub fn upsilon_bound(&self) -> Option<f64> {
        let (sup_b, inf_a) = match self {
            MeasureSpec::Discrete { atoms } => (
                atoms.iter().map(|at| at.b.abs()).fold(0.0, f64::max),
                atoms.iter().map(|at| at.a.abs()).fold(f64::INFINITY, f64::min),
            ),
            MeasureSpec::Product { alpha, beta } => (beta.sup_abs()?, alpha.inf_abs()),
        };
        (inf_a > 1.0).then(|| sup_b / (1.0 - 1.0 / inf_a))
    }

    /// The same law with `alpha` replaced by `1 / alpha`.
    pub fn with_inverted_alpha(&self) -> Result<Self> {
        match self {
            MeasureSpec::Discrete { atoms } => Ok(MeasureSpec::Discrete {
                atoms: atoms.iter().map(|at| Atom { a: 1.0 / at.a, ..*at }).collect(),
            }),
            MeasureSpec::Product { alpha, beta } => {
                let inverted = match alpha {
                    Marginal::PointMass { v } => Marginal::PointMass { v: 1.0 / v },
                    Marginal::Discrete { atoms } => Marginal::Discrete {
                        atoms: atoms.iter().map(|w| WeightedValue { v: 1.0 / w.v, p: w.p }).collect(),
                    },
                    _ => {
                        return Err(Error::InvalidArgument(
                            "alpha inversion is only defined for discrete alpha marginals".into(),
                        ))
                    }
                };
                Ok(MeasureSpec::Product {
                    alpha: inverted,
                    beta: beta.clone(),
                })
            }
        }
    }
}

/// Free-function form of [`MeasureSpec::validate`].
pub fn validate(spec: &MeasureSpec) -> Result<AssumptionReport> {
    spec.validate()
}

/// Free-function form of [`MeasureSpec::classify`].
pub fn classify(spec: &MeasureSpec, tol: f64) -> Result<CriticalityReport> {
    spec.classify(tol)
}

/// A validated spec prepared for repeated draws of `(alpha, beta)`.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: MeasureSpec,
    joint: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Sampler {
    /// Fails on malformed specs and when assumption (i) does not hold.
    pub fn new(spec: &MeasureSpec) -> Result<Self> {
        if !spec.validate()?.nonzero_alpha {
            return Err(Error::ZeroAlpha);
        }
        let (joint, alpha, beta) = match spec {
            MeasureSpec::Discrete { atoms } => (cumulative(atoms.iter().map(|a| a.p)), Vec::new(), Vec::new()),
            MeasureSpec::Product { alpha, beta } => (Vec::new(), alpha.cumulative(), beta.cumulative()),
        };
        Ok(Sampler {
            spec: spec.clone(),
            joint,
            alpha,
            beta,
        })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    /// One draw of `(alpha, beta)`; product marginals draw alpha first.
    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match &self.spec {
            MeasureSpec::Discrete { atoms } => {
                let at = atoms[pick(&self.joint, uniform(rng))];
                (at.a, at.b)
            }
            MeasureSpec::Product { alpha, beta } => {
                let a = alpha.draw(&self.alpha, rng);
                let b = beta.draw(&self.beta, rng);
                (a, b)
            }
        }
    }
}

/// One draw of `(alpha, beta)` from `spec`.
pub fn sample<R: RngCore + ?Sized>(spec: &MeasureSpec, rng: &mut R) -> Result<(f64, f64)> {
    Ok(Sampler::new(spec)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use core::f64::consts::LN_2;

    fn point(a: f64, b: f64) -> MeasureSpec {
        MeasureSpec::product(Marginal::PointMass { v: a }, Marginal::PointMass { v: b })
    }

    fn de_rham() -> MeasureSpec {
        MeasureSpec::product(
            Marginal::PointMass { v: 3.0 },
            Marginal::discrete(&[
                (0.0, 1.0 / 3.0),
                (-1.0 / 3.0, 1.0 / 9.0),
                (1.0 / 3.0, 1.0 / 9.0),
                (-2.0 / 3.0, 2.0 / 9.0),
                (2.0 / 3.0, 2.0 / 9.0),
            ]),
        )
    }

    #[test]
    fn degenerate_fixed_point_detected() {
        let r = point(2.0, 1.0).validate().unwrap();
        assert!(r.nonzero_alpha && r.non_unit_scale);
        assert!(!r.no_common_fixed_point);
        assert_eq!(r.fixed_point, Some(2.0));
        assert_eq!(r.require_all(), Err(Error::Degenerate { fixed_point: Some(2.0) }));
    }

    #[test]
    fn de_rham_satisfies_all_assumptions() {
        assert!(de_rham().validate().unwrap().all_hold());
    }

    #[test]
    fn identity_map_violates_unit_scale() {
        let r = point(1.0, 0.0).validate().unwrap();
        assert!(!r.non_unit_scale);
        assert!(!r.no_common_fixed_point);
        assert_eq!(r.fixed_point, None);
    }

    #[test]
    fn shared_fixed_point_across_atoms() {
        // a(c - b) = c with c = 1: (2, 1/2) and (3, 2/3)
        let spec = MeasureSpec::discrete(&[(2.0, 0.5, 0.5), (3.0, 2.0 / 3.0, 0.5)]);
        let r = spec.validate().unwrap();
        assert!(!r.no_common_fixed_point);
        assert!((r.fixed_point.unwrap() - 1.0).abs() < 1e-12);
        // a = 1 with b != 0 admits no fixed point
        let spec = MeasureSpec::discrete(&[(2.0, 1.0, 0.5), (1.0, 1.0, 0.5)]);
        assert!(spec.validate().unwrap().no_common_fixed_point);
    }

    #[test]
    fn product_of_discrete_marginals_checked_over_product_atoms() {
        let spec = MeasureSpec::product(
            Marginal::discrete(&[(2.0, 0.5), (3.0, 0.5)]),
            Marginal::PointMass { v: 0.0 },
        );
        let r = spec.validate().unwrap();
        assert!(!r.no_common_fixed_point);
        assert_eq!(r.fixed_point, Some(0.0));
        let spec = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Exponential { rate: 1.0 });
        assert!(spec.validate().unwrap().no_common_fixed_point);
    }

    #[test]
    fn malformed_specs_rejected() {
        assert!(matches!(
            MeasureSpec::Discrete { atoms: Vec::new() }.validate(),
            Err(Error::Malformed(_))
        ));
        let bad = MeasureSpec::discrete(&[(2.0, 0.0, 0.5), (3.0, 0.0, 0.4)]);
        assert!(matches!(bad.validate(), Err(Error::Malformed(_))));
        // renormalisation is not applied silently
        let scaled = MeasureSpec::discrete(&[(2.0, 0.0, 1.0), (3.0, 0.0, 1.0)]);
        assert!(scaled.validate().is_err());
        let bad_rate = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Exponential { rate: 0.0 });
        assert!(bad_rate.validate().is_err());
        let bad_uniform = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Uniform { lo: 1.0, hi: 1.0 });
        assert!(bad_uniform.validate().is_err());
    }

    #[test]
    fn zero_alpha_flagged_and_refused() {
        let spec = MeasureSpec::discrete(&[(0.0, 1.0, 0.5), (2.0, 1.0, 0.5)]);
        assert!(!spec.validate().unwrap().nonzero_alpha);
        assert_eq!(spec.classify(1e-9), Err(Error::ZeroAlpha));
        let straddle = MeasureSpec::product(Marginal::Uniform { lo: -1.0, hi: 2.0 }, Marginal::PointMass { v: 1.0 });
        assert!(!straddle.validate().unwrap().nonzero_alpha);
        assert!(Sampler::new(&straddle).is_err());
    }

    #[test]
    fn classify_examples() {
        let r = de_rham().classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert_eq!(r.k, 3.0f64.ln());
        assert_eq!(r.regime, Regime::Supercritical);
        assert_eq!(r.q, 0.0);

        let sub = MeasureSpec::product(
            Marginal::discrete(&[(0.5, 0.5), (1.0 / 3.0, 0.5)]),
            Marginal::PointMass { v: 1.0 },
        );
        let r = sub.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert!((r.k + (LN_2 + 3.0f64.ln()) / 2.0).abs() < 1e-15);
        assert_eq!(r.regime, Regime::Subcritical);

        let neg = MeasureSpec::product(
            Marginal::discrete(&[(-2.0, 0.5), (3.0, 0.5)]),
            Marginal::PointMass { v: 1.0 },
        );
        let r = neg.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert!((r.k - (LN_2 + 3.0f64.ln()) / 2.0).abs() < 1e-15);
        assert_eq!(r.q, 0.5);
    }

    #[test]
    fn exact_critical_detected() {
        let spec = MeasureSpec::product(
            Marginal::discrete(&[(3.0, 0.5), (1.0 / 3.0, 0.5)]),
            Marginal::PointMass { v: 1.0 },
        );
        let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert_eq!(r.regime, Regime::Critical);
        assert!(r.warning.is_some());
    }

    #[test]
    fn quadrature_log_moments() {
        // E{ln alpha} for alpha ~ U(1, e) is 1/(e - 1)
        let e = core::f64::consts::E;
        let spec = MeasureSpec::product(Marginal::Uniform { lo: 1.0, hi: e }, Marginal::PointMass { v: 0.5 });
        let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert!((r.k - 1.0 / (e - 1.0)).abs() < 1e-12);
        assert!(!r.exact);
        assert_eq!(r.beta_log_moment, 0.0);
        // E{ln max(beta, 1)} for beta ~ Exp(1) is E_1(1) = 0.21938393439552...
        let spec = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Exponential { rate: 1.0 });
        let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        assert!(
            (r.beta_log_moment - 0.219_383_934_395_520_3).abs() < 5e-3,
            "{}",
            r.beta_log_moment
        );
    }

    #[test]
    fn near_critical_quadrature_reported_critical() {
        // alpha ~ U(1/c, c) has E ln alpha close to zero for c near 1; pick lo so that K is tiny
        let spec = MeasureSpec::product(Marginal::Uniform { lo: 0.5, hi: 2.0 }, Marginal::PointMass { v: 1.0 });
        let r = spec.classify(1e-9).unwrap();
        // K = (2 ln 2 - 2 - 0.5 ln 0.5 + 0.5) / 1.5
        let exact = (2.0 * LN_2 - 2.0 - 0.5 * (0.5f64).ln() + 0.5) / 1.5;
        assert!((r.k - exact).abs() < 1e-12);
        let r = spec.classify(1.0).unwrap();
        assert_eq!(r.regime, Regime::Critical);
    }

    #[test]
    fn point_mass_sampling_is_constant() {
        let s = Sampler::new(&point(3.0, 0.0)).unwrap();
        let mut rng = stream(0, 0);
        for _ in 0..100 {
            assert_eq!(s.draw(&mut rng), (3.0, 0.0));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = MeasureSpec::discrete(&[(2.0, -1.0, 0.5), (2.0, 1.0, 0.5)]);
        let s = Sampler::new(&spec).unwrap();
        let draw = |seed| {
            let mut rng = stream(seed, 0);
            (0..1000).map(|_| s.draw(&mut rng).1).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        let n = 100_000;
        let mut rng = stream(5, 0);
        let mean = (0..n).map(|_| s.draw(&mut rng).1).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn exponential_beta_mean() {
        let spec = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Exponential { rate: 1.0 });
        let s = Sampler::new(&spec).unwrap();
        let n = 100_000;
        let mut rng = stream(9, 0);
        let mean = (0..n).map(|_| s.draw(&mut rng).1).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn discrete_frequencies_converge() {
        let spec = MeasureSpec::discrete(&[(2.0, 0.0, 0.2), (3.0, 1.0, 0.3), (-2.0, 5.0, 0.5)]);
        let s = Sampler::new(&spec).unwrap();
        let n = 100_000usize;
        let mut counts = [0usize; 3];
        let mut rng = stream(3, 0);
        for _ in 0..n {
            let (a, _) = s.draw(&mut rng);
            let k = if a == 2.0 {
                0
            } else if a == 3.0 {
                1
            } else {
                2
            };
            counts[k] += 1;
        }
        let nf = n as f64;
        let bound = 4.0 * (nf.ln() / nf).sqrt();
        for (c, p) in counts.iter().zip([0.2, 0.3, 0.5]) {
            assert!((*c as f64 / nf - p).abs() < bound);
        }
    }

    #[test]
    fn upsilon_bounds() {
        assert!((de_rham().upsilon_bound().unwrap() - 1.0).abs() < 1e-15);
        let bern = MeasureSpec::product(
            Marginal::PointMass { v: 2.0 },
            Marginal::discrete(&[(-1.0, 0.5), (1.0, 0.5)]),
        );
        assert_eq!(bern.upsilon_bound(), Some(2.0));
        let pant = MeasureSpec::product(Marginal::PointMass { v: 2.0 }, Marginal::Exponential { rate: 1.0 });
        assert_eq!(pant.upsilon_bound(), None);
    }

    #[test]
    fn marginal_charfns() {
        let u = Marginal::Uniform { lo: -1.0, hi: 1.0 };
        let t: f64 = 1.3;
        assert!((u.charfn(t) - Complex64::new(t.sin() / t, 0.0)).norm() < 1e-15);
        let e = Marginal::Exponential { rate: 2.0 };
        let expect = Complex64::new(2.0, 0.0) / Complex64::new(2.0, -t);
        assert!((e.charfn(t) - expect).norm() < 1e-15);
    }
}
