use archetypal_core::chain::simulate;
use archetypal_core::ecdf::Ecdf;
use archetypal_core::fourier::charfn_from_samples;
use archetypal_core::measure::DEFAULT_CRITICAL_TOLERANCE;
use archetypal_core::operator::{GridFunction, TransferOperator};
use archetypal_core::rng::{ensemble, stream, uniform};
use archetypal_core::{Marginal, MeasureSpec};
use proptest::prelude::*;

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = p[..p.len() - 1].iter().sum();
    *p.last_mut().unwrap() = 1.0 - head;
    p
}

fn alpha_value() -> impl Strategy<Value = f64> {
    prop_oneof![-4.0..-0.2f64, 0.2..4.0f64]
}

fn discrete_spec() -> impl Strategy<Value = MeasureSpec> {
    (1usize..5)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(alpha_value(), k),
                prop::collection::vec(-2.0..2.0f64, k),
                prop::collection::vec(0.1..1.0f64, k),
            )
        })
        .prop_map(|(a, b, w)| {
            let p = normalized(w);
            let atoms: Vec<(f64, f64, f64)> = (0..a.len()).map(|i| (a[i], b[i], p[i])).collect();
            MeasureSpec::discrete(&atoms)
        })
}

fn grid_values(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_identities(spec in discrete_spec(), x0 in -5.0..5.0f64, seed in any::<u64>()) {
        let traj = simulate(&spec, x0, 12, &mut stream(seed, 0)).unwrap();
        let (mut x, mut a) = (x0, 1.0);
        for st in &traj.steps {
            x = st.alpha * (x - st.beta);
            a *= st.alpha;
            let scale = 1.0 + x.abs().max(a.abs() * (1.0 + x0.abs()));
            prop_assert!((st.x - x).abs() <= 1e-9 * scale);
            prop_assert!((st.a - a).abs() <= 1e-12 * a.abs());
            prop_assert!((st.a * x0 - st.d - st.x).abs() <= 1e-9 * scale);
            prop_assert!((st.a * (x0 - st.b) - st.x).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn criticality_is_weighted_log_sum(spec in discrete_spec()) {
        let MeasureSpec::Discrete { atoms } = &spec else { unreachable!() };
        let k: f64 = atoms.iter().map(|t| t.p * t.a.abs().ln()).sum();
        let q: f64 = atoms.iter().filter(|t| t.a < 0.0).map(|t| t.p).sum();
        let r = spec.classify(DEFAULT_CRITICAL_TOLERANCE).unwrap();
        prop_assert!((r.k - k).abs() < 1e-12);
        prop_assert!((r.q - q).abs() < 1e-12);
    }

    #[test]
    fn operator_preserves_constants(spec in discrete_spec(), c in -10.0..10.0f64) {
        let op = TransferOperator::new(&spec).unwrap();
        let f = GridFunction::new(-4.0, 4.0, vec![c; 81]).unwrap();
        prop_assert!(op.apply(&f).values().iter().all(|&v| v == c));
    }

    #[test]
    fn operator_is_monotone_and_bounded(spec in discrete_spec(), f in grid_values(81), bump in prop::collection::vec(0.0..1.0f64, 81)) {
        let op = TransferOperator::new(&spec).unwrap();
        let g: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let f = GridFunction::new(-4.0, 4.0, f).unwrap();
        let g = GridFunction::new(-4.0, 4.0, g).unwrap();
        let (tf, tg) = (op.apply(&f), op.apply(&g));
        for (a, b) in tf.values().iter().zip(tg.values()) {
            prop_assert!(a <= b);
        }
        for &v in tf.values() {
            prop_assert!(v >= f.min() - 1e-12 && v <= f.max() + 1e-12);
        }
    }

    #[test]
    fn operator_is_linear(spec in discrete_spec(), f in grid_values(81), g in grid_values(81), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let op = TransferOperator::new(&spec).unwrap();
        let comb: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let (f, g, comb) = (
            GridFunction::new(-4.0, 4.0, f).unwrap(),
            GridFunction::new(-4.0, 4.0, g).unwrap(),
            GridFunction::new(-4.0, 4.0, comb).unwrap(),
        );
        let (tf, tg, tc) = (op.apply(&f), op.apply(&g), op.apply(&comb));
        for j in 0..81 {
            prop_assert!((tc.values()[j] - a * tf.values()[j] - b * tg.values()[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_eval_is_exact_at_nodes(f in grid_values(33)) {
        let g = GridFunction::new(-1.0, 3.0, f.clone()).unwrap();
        for (j, v) in f.iter().enumerate() {
            prop_assert_eq!(g.eval(g.node(j)), *v);
        }
        prop_assert_eq!(g.eval(-100.0), f[0]);
        prop_assert_eq!(g.eval(100.0), f[32]);
    }

    #[test]
    fn ecdf_is_a_distribution_function(xs in prop::collection::vec(-5.0..5.0f64, 1..200), probes in prop::collection::vec(-6.0..6.0f64, 20)) {
        let e = Ecdf::new(xs);
        let mut probes = probes;
        probes.sort_by(f64::total_cmp);
        let vals: Vec<f64> = probes.iter().map(|&x| e.eval(x)).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(vals.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert_eq!(e.eval(-6.0), 0.0);
        prop_assert_eq!(e.eval(6.0), 1.0);
    }

    #[test]
    fn empirical_charfn_is_hermitian(xs in prop::collection::vec(-5.0..5.0f64, 1..100), s in 0.0..20.0f64) {
        let est = charfn_from_samples(&xs, &[s, -s, 0.0]);
        let v = &est.grid.values;
        prop_assert!((v[0] - v[1].conj()).norm() < 1e-12);
        prop_assert!(v[0].norm() <= 1.0 + 1e-12);
        prop_assert!((v[2].re - 1.0).abs() < 1e-12 && v[2].im.abs() < 1e-12);
    }
}

#[test]
fn ensembles_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ensemble(42, 5_000, |rng, i| uniform(rng) + i as f64))
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn invalid_measures_are_rejected() {
    let bad = MeasureSpec::discrete(&[(2.0, 1.0, 0.5), (3.0, 0.0, 0.4)]);
    assert!(bad.validate().is_err());
    let zero = MeasureSpec::product(
        Marginal::discrete(&[(0.0, 0.5), (2.0, 0.5)]),
        Marginal::PointMass { v: 1.0 },
    );
    assert!(!zero.validate().unwrap().nonzero_alpha);
}
