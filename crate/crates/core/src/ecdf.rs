//! Empirical distribution functions and Kolmogorov-Smirnov distances.

use alloc::vec::Vec;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

/// Right-continuous empirical CDF over a sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    samples: Vec<f64>,
}

impl Ecdf {
    /// Sorts the sample; NaNs are not allowed.
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(samples.iter().all(|x| !x.is_nan()), "NaN in empirical sample");
        samples.sort_by(f64::total_cmp);
        Ecdf { samples }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `#{x_i <= x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// Largest single jump, i.e. the largest tie multiplicity over `N`.
    pub fn max_jump(&self) -> f64 {
        let mut best = 0usize;
        let mut run = 0usize;
        for (i, x) in self.samples.iter().enumerate() {
            run = if i > 0 && self.samples[i - 1] == *x { run + 1 } else { 1 };
            best = best.max(run);
        }
        best as f64 / self.samples.len().max(1) as f64
    }

    /// `sup_x |F_N(x) - F(x)|` against a continuous reference CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.samples.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < self.samples.len() {
            let x = self.samples[i];
            let mut j = i;
            while j < self.samples.len() && self.samples[j] == x {
                j += 1;
            }
            let f = cdf(x);
            d = d.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
            i = j;
        }
        d
    }

    /// Two-sample statistic `sup_x |F_N(x) - G_M(x)|`.
    pub fn ks_two_sample(&self, other: &Ecdf) -> f64 {
        ks_two_sample_sorted(&self.samples, &other.samples)
    }
}

/// Halfwidth of the Dvoretzky-Kiefer-Wolfowitz band at level `1 - delta`.
pub fn dkw_halfwidth(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

fn ks_two_sample_sorted(xs: &[f64], ys: &[f64]) -> f64 {
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic of unsorted samples.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    Ecdf::new(xs.to_vec()).ks_two_sample(&Ecdf::new(ys.to_vec()))
}
