//! Named measures for well-known members of the equation family.
//!
//! | preset                  | equation                                            |
//! |-------------------------|-----------------------------------------------------|
//! | `bernoulli_convolution` | `y(x) = y(a(x+1))/2 + y(a(x-1))/2`, `a > 1`         |
//! | `de_rham`               | integrated de Rham three-scale equation, `alpha = 3`|
//! | `pantograph_const`      | `y'(x) + y(x) = y(alpha x)`                         |
//! | `pantograph_general`    | `y'(x) + y(x) = sum p_i y(a_i x)`                   |
//! | `schilling_like`        | two-scale form `z(x) = a sum p_i z(a(x - b_i))`     |
//! | `subcritical_demo`      | `alpha in {1/2, 1/3}`, `beta in {-1, 1}`            |
//! | `negative_alpha_demo`   | `alpha in {-2, 3}`, `beta in {-1, 1}`               |
//!
//! The pantograph presets use `beta ~ Exp(1)` independent of `alpha`:
//! differentiating `y(x) = int_0^inf y(alpha (x - b)) e^{-b} db` gives
//! `y' + y = E{y(alpha x)}`. For `pantograph_general` the independence of
//! `alpha` and `beta` is an extrapolation of the constant-`alpha` statement.
//!
//! Rvachev's equation and Choquet-Deny convolution equations belong to the
//! same family but come without an explicit coefficient law, so they are
//! not constructible here.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::measure::{Marginal, MeasureSpec};
use crate::{Error, Result};

pub const NAMES: [&str; 7] = [
    "bernoulli_convolution",
    "de_rham",
    "pantograph_const",
    "pantograph_general",
    "schilling_like",
    "subcritical_demo",
    "negative_alpha_demo",
];

/// Optional parameters accepted by [`preset`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetParams {
    /// Scale `a` for `bernoulli_convolution` (default 2) and `schilling_like` (default 3).
    pub a: Option<f64>,
    /// Constant `alpha` for `pantograph_const` (default 2).
    pub alpha: Option<f64>,
    /// `(a_i, p_i)` for `pantograph_general`.
    pub alpha_atoms: Option<Vec<(f64, f64)>>,
    /// `(b_i, p_i)` masks for `schilling_like`; defaults to Schilling's `(1/4, 1/2, 1/4)` at `b = 1/a, 0, -1/a`.
    pub masks: Option<Vec<(f64, f64)>>,
}

fn signs() -> Marginal {
    Marginal::discrete(&[(-1.0, 0.5), (1.0, 0.5)])
}

pub fn bernoulli_convolution(a: f64) -> Result<MeasureSpec> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "bernoulli_convolution needs a > 1, got {a}"
        )));
    }
    Ok(MeasureSpec::product(Marginal::PointMass { v: a }, signs()))
}

pub fn de_rham() -> MeasureSpec {
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

pub fn pantograph_const(alpha: f64) -> Result<MeasureSpec> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "pantograph_const needs alpha > 1, got {alpha}"
        )));
    }
    Ok(MeasureSpec::product(
        Marginal::PointMass { v: alpha },
        Marginal::Exponential { rate: 1.0 },
    ))
}

pub fn pantograph_general(atoms: &[(f64, f64)]) -> Result<MeasureSpec> {
    if atoms.iter().any(|&(a, _)| !(a > 0.0)) {
        return Err(Error::InvalidArgument("pantograph_general needs a_i > 0".into()));
    }
    let spec = MeasureSpec::product(Marginal::discrete(atoms), Marginal::Exponential { rate: 1.0 });
    spec.validate()?;
    Ok(spec)
}

/// `z(x) = a sum_i p_i z(a (x - b_i))` with the given masks.
pub fn schilling_like(a: f64, masks: &[(f64, f64)]) -> Result<MeasureSpec> {
    if !(a.is_finite() && a.abs() > 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "schilling_like needs |a| > 1, got {a}"
        )));
    }
    let spec = MeasureSpec::product(Marginal::PointMass { v: a }, Marginal::discrete(masks));
    spec.validate()?;
    Ok(spec)
}

/// Schilling's masks `(1/4, 1/2, 1/4)` at shifts `(1/a, 0, -1/a)`.
pub fn schilling_masks(a: f64) -> Vec<(f64, f64)> {
    alloc::vec![(1.0 / a, 0.25), (0.0, 0.5), (-1.0 / a, 0.25)]
}

pub fn subcritical_demo() -> MeasureSpec {
    MeasureSpec::product(Marginal::discrete(&[(0.5, 0.5), (1.0 / 3.0, 0.5)]), signs())
}

pub fn negative_alpha_demo() -> MeasureSpec {
    MeasureSpec::product(Marginal::discrete(&[(-2.0, 0.5), (3.0, 0.5)]), signs())
}

/// Builds a preset by name.
pub fn preset(name: &str, params: &PresetParams) -> Result<MeasureSpec> {
    match name {
        "bernoulli_convolution" => bernoulli_convolution(params.a.unwrap_or(2.0)),
        "de_rham" => Ok(de_rham()),
        "pantograph_const" => pantograph_const(params.alpha.unwrap_or(2.0)),
        "pantograph_general" => {
            let atoms = params
                .alpha_atoms
                .clone()
                .ok_or_else(|| Error::InvalidArgument("pantograph_general needs alpha atoms (a_i, p_i)".into()))?;
            pantograph_general(&atoms)
        }
        "schilling_like" => {
            let a = params.a.unwrap_or(3.0);
            let masks = params.masks.clone().unwrap_or_else(|| schilling_masks(a));
            schilling_like(a, &masks)
        }
        "subcritical_demo" => Ok(subcritical_demo()),
        "negative_alpha_demo" => Ok(negative_alpha_demo()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Documented `K` of each preset under default parameters.
pub fn documented_k(name: &str) -> Option<f64> {
    let ln = libm::log;
    Some(match name {
        "bernoulli_convolution" | "pantograph_const" => ln(2.0),
        "de_rham" | "schilling_like" => ln(3.0),
        "subcritical_demo" => -(ln(2.0) + ln(3.0)) / 2.0,
        "negative_alpha_demo" => (ln(2.0) + ln(3.0)) / 2.0,
        _ => return None,
    })
}

pub fn names() -> impl Iterator<Item = String> {
    NAMES.iter().map(|s| s.to_string())
}
