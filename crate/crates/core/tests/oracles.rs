//! Closed-form and hand-computed references for the Monte Carlo routines.

use archetypal_core::chain::{stopping_time_negative, wald_check, DEFAULT_MAX_STOPPING_STEPS};
use archetypal_core::ecdf::{dkw_halfwidth, ks_two_sample, Ecdf};
use archetypal_core::fourier::{
    alternation_probe, charfn, fourier_iterate, fourier_iterate_monte_carlo, FourierMethod,
};
use archetypal_core::measure::DEFAULT_CRITICAL_TOLERANCE;
use archetypal_core::operator::{iterate, GridFunction};
use archetypal_core::presets;
use archetypal_core::rng::{ensemble, stream};
use archetypal_core::series::{canonical_cdf, CanonicalOptions, SeriesConfig, SeriesSampler};
use archetypal_core::verify::{check_subcritical_collapse, subcritical_limit};
use archetypal_core::{Complex64, Marginal, MeasureSpec, Regime};

fn signs() -> Marginal {
    Marginal::discrete(&[(-1.0, 0.5), (1.0, 0.5)])
}

fn uniform_cdf(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    move |x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
}

#[test]
fn bernoulli_two_is_uniform() {
    let spec = presets::bernoulli_convolution(2.0).unwrap();
    let cdf = canonical_cdf(&spec, 100_000, SeriesConfig::default(), 11, CanonicalOptions::default()).unwrap();
    let ks = cdf.ks_distance(uniform_cdf(-2.0, 2.0));
    assert!(ks < 0.01, "ks = {ks}");
    assert!(cdf.dkw_halfwidth(0.05) < 0.0043);
    assert_eq!(cdf.diagnostics.max_depth_hits, 0);
}

// a = 3 gives the middle-thirds Cantor law on [-3/2, 3/2]; its CDF is the
// Cantor function, which is computed here from ternary digits.
fn cantor(x: f64) -> f64 {
    let mut t = ((x + 1.5) / 3.0).clamp(0.0, 1.0);
    if t >= 1.0 {
        return 1.0;
    }
    let (mut out, mut scale) = (0.0, 0.5);
    for _ in 0..60 {
        t *= 3.0;
        let d = t.floor();
        t -= d;
        if d == 1.0 {
            return out + scale;
        }
        out += scale * (d / 2.0);
        scale /= 2.0;
    }
    out
}

#[test]
fn bernoulli_three_is_cantor() {
    let spec = presets::bernoulli_convolution(3.0).unwrap();
    let cdf = canonical_cdf(&spec, 50_000, SeriesConfig::default(), 2, CanonicalOptions::default()).unwrap();
    let ks = cdf.ks_distance(cantor);
    assert!(ks < 3.0 * cdf.dkw_halfwidth(0.05), "ks = {ks}");
}

#[test]
fn reversed_series_for_half_is_uniform() {
    // sum beta_i 2^{-i} with fair signs is uniform on [-1, 1]
    let spec = MeasureSpec::product(Marginal::PointMass { v: 0.5 }, signs());
    let sampler = SeriesSampler::reversed(&spec, SeriesConfig::default()).unwrap();
    let xs: Vec<f64> = sampler.draw_many(50_000, 3).iter().map(|d| d.value).collect();
    let ks = Ecdf::new(xs).ks_distance(uniform_cdf(-1.0, 1.0));
    assert!(ks < 2.0 * dkw_halfwidth(50_000, 0.05));
}

#[test]
fn reversed_series_matches_scaled_forward_series() {
    // Upsilon° for alpha has the law of alpha * Upsilon for 1/alpha
    let spec = MeasureSpec::product(Marginal::discrete(&[(0.5, 0.5), (1.0 / 3.0, 0.5)]), signs());
    let inverse = spec.with_inverted_alpha().unwrap();
    let rev = SeriesSampler::reversed(&spec, SeriesConfig::default()).unwrap();
    let fwd = SeriesSampler::forward(&inverse, SeriesConfig::default()).unwrap();
    let alpha = archetypal_core::measure::Sampler::new(&spec).unwrap();
    let a: Vec<f64> = rev.draw_many(20_000, 4).iter().map(|d| d.value).collect();
    let b: Vec<f64> = ensemble(5, 20_000, |rng, _| {
        let (scale, _) = alpha.draw(rng);
        scale * fwd.draw(rng).value
    });
    assert!(ks_two_sample(&a, &b) < 0.025);
}

#[test]
fn subcritical_iterates_reach_sin_one() {
    // E cos(U) = sin 1 for U uniform on [-1, 1]
    let spec = MeasureSpec::product(Marginal::PointMass { v: 0.5 }, signs());
    let f0 = GridFunction::from_fn(-10.0, 10.0, 2001, f64::cos).unwrap();
    let it = iterate(&spec, &f0, 60, 0.1).unwrap();
    for j in it.f.interior(0.1) {
        assert!((it.f.values()[j] - 1f64.sin()).abs() < 1e-3);
    }
    let limit = subcritical_limit(&spec, &f0, 20_000, 1).unwrap();
    assert!((limit - 1f64.sin()).abs() < 0.01);
}

#[test]
fn subcritical_demo_collapses() {
    let f0 = GridFunction::from_fn(-10.0, 10.0, 2001, f64::cos).unwrap();
    let r = check_subcritical_collapse(&presets::subcritical_demo(), &f0, 100, 0.05, 100_000, 7).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.detail("range").unwrap() < 1e-6);
}

#[test]
fn wald_identity_for_negative_demo() {
    let k = (2f64.ln() + 3f64.ln()) / 2.0;
    let r = wald_check(&presets::negative_alpha_demo(), 100_000, 9, DEFAULT_MAX_STOPPING_STEPS).unwrap();
    assert!((r.rhs - 6f64.ln()).abs() < 1e-12);
    assert!((r.rhs - k / 0.5).abs() < 1e-12);
    assert!((r.lhs - r.rhs).abs() < 3.0 * r.stderr);
    assert!((r.mean_tau - 2.0).abs() < 3.0 * r.tau_stderr);
    assert_eq!(r.expected_tau, 2.0);
}

#[test]
fn stopping_time_is_geometric() {
    let spec = presets::negative_alpha_demo();
    let n = 40_000;
    let taus: Vec<usize> = (0..n)
        .map(|i| {
            stopping_time_negative(&spec, &mut stream(21, i), DEFAULT_MAX_STOPPING_STEPS)
                .unwrap()
                .tau
        })
        .collect();
    for k in 1..=5 {
        let freq = taus.iter().filter(|&&t| t == k).count() as f64 / n as f64;
        let p = 0.5f64.powi(k as i32);
        assert!(
            (freq - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(),
            "k={k} freq={freq}"
        );
    }
}

#[test]
fn bernoulli_charfn_is_sinc() {
    let spec = presets::bernoulli_convolution(2.0).unwrap();
    let s: Vec<f64> = (1..=100).map(|k| 0.1 * k as f64).collect();
    let est = charfn(&spec, &s, 100_000, SeriesConfig::default(), 13).unwrap();
    for (s, z) in s.iter().zip(&est.grid.values) {
        let exact = (2.0 * s).sin() / (2.0 * s);
        assert!((z - Complex64::new(exact, 0.0)).norm() < 0.02);
    }
    let it = fourier_iterate(&spec, |_| Complex64::new(1.0, 0.0), &s, 40, 1, 0).unwrap();
    assert_eq!(it.method, FourierMethod::ExactRecursion);
    for (s, z) in s.iter().zip(&it.estimate.grid.values) {
        assert!((z.re - (2.0 * s).sin() / (2.0 * s)).abs() < 1e-6);
    }
}

#[test]
fn pantograph_charfn_is_product_of_exponentials() {
    // beta ~ Exp(1), alpha = 2: phi(s) = prod_k 1 / (1 - i s 2^{-k})
    let spec = presets::pantograph_const(2.0).unwrap();
    let s = [0.25, 0.5, 1.0, 2.0, 4.0];
    let est = charfn(&spec, &s, 50_000, SeriesConfig::default(), 8).unwrap();
    for (i, &s) in s.iter().enumerate() {
        let exact = (0..60).fold(Complex64::new(1.0, 0.0), |acc, k| {
            acc / Complex64::new(1.0, -s / 2f64.powi(k))
        });
        assert!(
            (est.grid.values[i] - exact).norm() < 4.0 * est.stderr[i] + 1e-3,
            "s={s}"
        );
    }
}

#[test]
fn monte_carlo_iterate_agrees_with_recursion() {
    let spec = presets::de_rham();
    let s = [0.3, 1.0, 3.0, 7.5];
    let z0 = |t: f64| Complex64::new((-t * t).exp(), 0.0);
    let exact = fourier_iterate(&spec, z0, &s, 6, 1, 0).unwrap().estimate;
    let mc = fourier_iterate_monte_carlo(&spec, z0, &s, 6, 40_000, 3).unwrap();
    for i in 0..s.len() {
        assert!((exact.grid.values[i] - mc.grid.values[i]).norm() < 5.0 * mc.stderr[i] + 1e-9);
    }
}

#[test]
fn alternation_at_zero_is_exact() {
    let probe = alternation_probe(
        &presets::negative_alpha_demo(),
        &[0.0],
        1,
        20,
        500,
        1,
        DEFAULT_MAX_STOPPING_STEPS,
    )
    .unwrap();
    assert_eq!(probe.points.len(), 20);
    for p in &probe.points {
        assert_eq!(p.value, Complex64::new(if p.n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    }
}

#[test]
fn quadrature_moments() {
    // E ln alpha for alpha ~ U[2, 4] is 3 ln 2 - 1
    let spec = MeasureSpec::product(Marginal::Uniform { lo: 2.0, hi: 4.0 }, signs());
    let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
    assert!((r.k - (3.0 * 2f64.ln() - 1.0)).abs() < 1e-10);
    assert!(!r.exact);
    // alpha ~ Exp(1): E ln alpha = -gamma
    let spec = MeasureSpec::product(Marginal::Exponential { rate: 1.0 }, signs());
    let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
    assert!((r.k + 0.577_215_664_901_532_9).abs() < 1e-2);
    assert_eq!(r.regime, Regime::Subcritical);
}

#[test]
fn documented_preset_constants() {
    for name in presets::NAMES {
        let Some(k) = presets::documented_k(name) else { continue };
        let spec = presets::preset(name, &Default::default()).unwrap();
        let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        let tol = if r.exact { 1e-12 } else { 1e-6 };
        assert!((r.k - k).abs() < tol, "{name}: {} vs {k}", r.k);
        assert!(spec.validate().unwrap().all_hold(), "{name}");
    }
}
