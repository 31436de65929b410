//! Fixed 64-node Gauss rules used for parametric marginals.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

pub(crate) const NODES: usize = 64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre() -> Vec<(f64, f64)> {
    let n = NODES;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Laguerre nodes and weights for `int_0^inf g(x) e^{-x} dx`.
pub(crate) fn gauss_laguerre() -> Vec<(f64, f64)> {
    let n = NODES;
    let nf = n as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        // initial guesses after the classic asymptotic recipe
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - out[i - 2].0)
            }
        };
        let mut p2 = 0.0;
        let mut pp = 1.0;
        for _ in 0..200 {
            let (l, lm1) = laguerre(n, z);
            p2 = lm1;
            pp = nf * (l - lm1) / z;
            let z1 = z;
            z = z1 - l / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (l, lm1) = laguerre(n, z);
        if l.is_finite() {
            p2 = lm1;
            pp = nf * (l - lm1) / z;
        }
        out.push((z, -1.0 / (pp * nf * p2)));
    }
    // weights from the recursion carry the sign convention L_n = sum (-x)^k/k! ...
    for w in out.iter_mut() {
        w.1 = w.1.abs();
    }
    out
}

/// `(L_n(x), L_{n-1}(x))` by the three-term recurrence.
fn laguerre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (0.0, 1.0);
    for j in 1..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0 - x) * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}
