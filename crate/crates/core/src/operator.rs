//! The transition operator `(Tf)(x) = E{f(alpha (x - beta))}` on uniform grids.

use alloc::vec::Vec;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::measure::{Atom, MeasureSpec};
use crate::rng::par_map;
use crate::{Error, Result};

/// Default fraction of the grid excluded on each side by interior statistics.
pub const DEFAULT_INTERIOR_MARGIN: f64 = 0.1;

/// Above this fraction of clamped evaluations `iterate` raises its warning.
pub const CLAMP_WARNING_FRACTION: f64 = 0.5;

/// How a [`GridFunction`] is continued outside `[xmin, xmax]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub enum Extension {
    /// Constant continuation by the edge values.
    #[default]
    Clamp,
}

/// Values on `m` equispaced nodes with linear interpolation in between.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    xmin: f64,
    xmax: f64,
    values: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn new(xmin: f64, xmax: f64, values: Vec<f64>) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && xmin < xmax) {
            return Err(Error::InvalidGrid(alloc::format!("bounds [{xmin}, {xmax}]")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid("at least two nodes are required".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(alloc::format!("non-finite value {v}")));
        }
        Ok(GridFunction {
            xmin,
            xmax,
            values,
            extension: Extension::Clamp,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(xmin: f64, xmax: f64, m: usize, f: F) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid("at least two nodes are required".into()));
        }
        let h = (xmax - xmin) / (m - 1) as f64;
        Self::new(xmin, xmax, (0..m).map(|j| f(xmin + j as f64 * h)).collect())
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidGrid("value count does not match grid".into()));
        }
        Self::new(self.xmin, self.xmax, values)
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn h(&self) -> f64 {
        (self.xmax - self.xmin) / (self.m() - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.m() {
            self.xmax
        } else {
            self.xmin + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m()).map(|j| self.node(j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `true` when `x` lies outside the grid and the extension rule applies.
    #[inline]
    pub fn is_clamped(&self, x: f64) -> bool {
        !(x >= self.xmin && x <= self.xmax)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let v = &self.values;
        if x <= self.xmin {
            return v[0];
        }
        if x >= self.xmax {
            return v[v.len() - 1];
        }
        if x.is_nan() {
            return f64::NAN;
        }
        let t = (x - self.xmin) / self.h();
        let j = (t.floor() as usize).min(v.len() - 2);
        let frac = t - j as f64;
        v[j] + frac * (v[j + 1] - v[j])
    }

    /// Node index range of the central `(1 - 2 margin)` window.
    pub fn interior(&self, margin: f64) -> core::ops::RangeInclusive<usize> {
        let last = (self.m() - 1) as f64;
        let lo = (margin * last - 1e-9).ceil().max(0.0) as usize;
        let hi = ((1.0 - margin) * last + 1e-9).floor().min(last) as usize;
        lo..=hi.max(lo)
    }

    /// `max - min` over the interior window.
    pub fn interior_range(&self, margin: f64) -> f64 {
        let w = &self.values[self.interior(margin)];
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Centered difference quotient (one-sided at the ends).
    pub fn derivative(&self) -> Self {
        let (v, h, m) = (&self.values, self.h(), self.m());
        let d = (0..m)
            .map(|j| match j {
                0 => (v[1] - v[0]) / h,
                j if j + 1 == m => (v[m - 1] - v[m - 2]) / h,
                j => (v[j + 1] - v[j - 1]) / (2.0 * h),
            })
            .collect();
        GridFunction {
            values: d,
            ..self.clone()
        }
    }

    /// `sup_j |f(x_j) - g(x_j)|` over the interior window of `self`.
    pub fn sup_distance(&self, other: &Self, margin: f64) -> f64 {
        self.interior(margin)
            .map(|j| (self.values[j] - other.eval(self.node(j))).abs())
            .fold(0.0, f64::max)
    }
}

/// `T` for a fixed measure, holding its expectation nodes.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    nodes: Vec<Atom>,
}

/// Result of one application with its clamping statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub f: GridFunction,
    /// Probability mass of evaluations that fell outside the grid, averaged over nodes.
    pub clamped_fraction: f64,
}

impl TransferOperator {
    pub fn new(spec: &MeasureSpec) -> Result<Self> {
        if !spec.validate()?.nonzero_alpha {
            return Err(Error::ZeroAlpha);
        }
        Ok(TransferOperator {
            nodes: spec.expectation_nodes(),
        })
    }

    pub fn nodes(&self) -> &[Atom] {
        &self.nodes
    }

    /// `(Tf)(x) = sum_k p_k f(a_k (x - b_k))`.
    ///
    /// The average is formed as `f_0 + sum_k p_k (f_k - f_0)` so constants
    /// map to themselves bit-for-bit.
    pub fn apply_with_stats(&self, f: &GridFunction) -> Applied {
        let xs = f.nodes();
        let out: Vec<(f64, f64)> = par_map(&xs, |&x| {
            let first = f.eval(self.nodes[0].a * (x - self.nodes[0].b));
            let mut acc = 0.0;
            let mut clamped = 0.0;
            for at in &self.nodes {
                let arg = at.a * (x - at.b);
                acc += at.p * (f.eval(arg) - first);
                if f.is_clamped(arg) {
                    clamped += at.p;
                }
            }
            (first + acc, clamped)
        });
        let clamped_fraction = out.iter().map(|o| o.1).sum::<f64>() / out.len() as f64;
        let values = out.into_iter().map(|o| o.0).collect();
        Applied {
            f: GridFunction { values, ..f.clone() },
            clamped_fraction,
        }
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        self.apply_with_stats(f).f
    }

    /// Derivative form `(T'z)(x) = E{alpha z(alpha (x - beta))}`.
    pub fn apply_deriv(&self, z: &GridFunction) -> GridFunction {
        let xs = z.nodes();
        let values = par_map(&xs, |&x| {
            self.nodes
                .iter()
                .map(|at| at.p * at.a * z.eval(at.a * (x - at.b)))
                .sum()
        });
        GridFunction { values, ..z.clone() }
    }

    /// `sup |f - Tf|` over the interior window.
    pub fn residual(&self, f: &GridFunction, margin: f64) -> Result<f64> {
        check_margin(margin)?;
        Ok(f.sup_distance(&self.apply(f), margin))
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if (0.0..0.5).contains(&margin) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "interior margin {margin} outside [0, 1/2)"
        )))
    }
}

pub fn apply_t(spec: &MeasureSpec, f: &GridFunction) -> Result<GridFunction> {
    Ok(TransferOperator::new(spec)?.apply(f))
}

pub fn apply_t_deriv(spec: &MeasureSpec, z: &GridFunction) -> Result<GridFunction> {
    Ok(TransferOperator::new(spec)?.apply_deriv(z))
}

pub fn residual(spec: &MeasureSpec, f: &GridFunction, margin: f64) -> Result<f64> {
    TransferOperator::new(spec)?.residual(f, margin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Interior `max - min` of the `iteration`-th iterate.
    pub range: f64,
    /// Interior `sup |f - Tf|` of the `iteration`-th iterate.
    pub residual: f64,
    pub clamped_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    pub f: GridFunction,
    pub history: Vec<IterationRecord>,
    /// Some application clamped more than half of its evaluations; under
    /// `K > 0` the chain leaves every bounded window and the grid iterate
    /// mostly reflects the extension rule.
    pub clamp_warning: bool,
}

/// `n`-fold application of `T` with per-iteration diagnostics.
pub fn iterate(spec: &MeasureSpec, f0: &GridFunction, n: usize, margin: f64) -> Result<Iteration> {
    if n == 0 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    check_margin(margin)?;
    let op = TransferOperator::new(spec)?;
    let mut history = Vec::with_capacity(n);
    let mut step = op.apply_with_stats(f0);
    let mut clamp_warning = step.clamped_fraction > CLAMP_WARNING_FRACTION;
    for k in 1..=n {
        let next = op.apply_with_stats(&step.f);
        clamp_warning |= next.clamped_fraction > CLAMP_WARNING_FRACTION;
        history.push(IterationRecord {
            iteration: k,
            range: step.f.interior_range(margin),
            residual: step.f.sup_distance(&next.f, margin),
            clamped_fraction: step.clamped_fraction,
        });
        if k == n {
            break;
        }
        step = next;
    }
    Ok(Iteration {
        f: step.f,
        history,
        clamp_warning,
    })
}
