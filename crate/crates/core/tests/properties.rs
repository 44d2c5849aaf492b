use num_complex::Complex64;
use proptest::prelude::*;
use semijulia::dynamics::{enumerate_words, word_count};
use semijulia::grid::{dilate, hausdorff_cells, interior_disk_exists, isolated_cells, union};
use semijulia::{
    eval_generator, eval_word, forward_invariance, inverse_images, BranchRequest, Family, GeneratorSpec,
    InvarianceParams, Metric, Scenario, ScenarioConfig, SemigroupWord, SetMask, Viewport,
};

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex64::new(re, im))
}

fn nonzero(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, -3.1f64..3.1).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn generator() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![
        (nonzero(0.1, 2.0), complex(4.0)).prop_map(|(l, c)| GeneratorSpec::scaled_sine(l, c).unwrap()),
        (nonzero(0.05, 2.0), complex(4.0)).prop_map(|(l, c)| GeneratorSpec::scaled_exp(l, c).unwrap()),
        Just(GeneratorSpec::z_minus_exp_shift()),
        (nonzero(1.01, 4.0), 2u32..6).prop_map(|(a, d)| GeneratorSpec::power_over_a(a, d).unwrap()),
        (2u32..6).prop_map(|d| GeneratorSpec::power(d).unwrap()),
    ]
}

fn viewport(cols: usize, rows: usize) -> Viewport {
    Viewport::new(Complex64::new(0.0, 0.0), 1.0, 1.0, cols, rows, Metric::Plane).unwrap()
}

fn mask() -> impl Strategy<Value = SetMask> {
    (3usize..20, 3usize..20)
        .prop_flat_map(|(c, r)| (Just(c), Just(r), proptest::collection::vec(proptest::bool::weighted(0.2), c * r)))
        .prop_map(|(c, r, bits)| SetMask::from_bits(viewport(c, r), bits).unwrap())
}

fn mask_pair() -> impl Strategy<Value = (SetMask, SetMask)> {
    (3usize..16, 3usize..16).prop_flat_map(|(c, r)| {
        let bits = || proptest::collection::vec(proptest::bool::weighted(0.2), c * r);
        (bits(), bits()).prop_map(move |(a, b)| {
            (
                SetMask::from_bits(viewport(c, r), a).unwrap(),
                SetMask::from_bits(viewport(c, r), b).unwrap(),
            )
        })
    })
}

fn word(n_gens: usize) -> impl Strategy<Value = SemigroupWord> {
    proptest::collection::vec(0..n_gens, 1..5).prop_map(|v| SemigroupWord::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generator_rebuilds_from_its_parts(g in generator()) {
        let back = GeneratorSpec::from_parts(g.family(), g.lambda(), g.shift(), g.a(), g.degree()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn inverse_images_round_trip(g in generator(), w in complex(8.0)) {
        let inv = inverse_images(&g, w, &BranchRequest::default()).unwrap();
        for p in &inv.points {
            let back = eval_generator(&g, *p).unwrap();
            prop_assert!((back - w).norm() <= 1e-9 * w.norm().max(1.0), "p={} g(p)={} w={}", p, back, w);
        }
        if g.family() == Family::PowerOverA {
            prop_assert_eq!(inv.points.len(), g.degree() as usize);
        }
    }

    #[test]
    fn word_composition_is_associative(u in word(3), v in word(3), z in complex(1.0)) {
        let gens = [
            GeneratorSpec::power(2).unwrap(),
            GeneratorSpec::power_over_a(Complex64::new(2.0, 0.0), 2).unwrap(),
            GeneratorSpec::scaled_sine(Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)).unwrap(),
        ];
        let whole = eval_word(&gens, &u.concat(&v), z).unwrap();
        let staged = eval_word(&gens, &u, eval_word(&gens, &v, z).unwrap()).unwrap();
        prop_assert!(whole == staged || (whole - staged).norm() <= 1e-12 * whole.norm().max(1.0));
    }

    #[test]
    fn dilation_is_monotone_and_composes(m in mask(), a in 0usize..4, b in 0usize..4) {
        let da = dilate(&m, a);
        prop_assert!(m.is_subset_of(&da).unwrap());
        prop_assert!(da.is_subset_of(&dilate(&m, a + 1)).unwrap());
        prop_assert_eq!(dilate(&da, b), dilate(&m, a + b));
    }

    #[test]
    fn union_contains_both_and_commutes((a, b) in mask_pair()) {
        let u = union(&a, &b).unwrap();
        prop_assert!(a.is_subset_of(&u).unwrap());
        prop_assert!(b.is_subset_of(&u).unwrap());
        prop_assert_eq!(&u, &union(&b, &a).unwrap());
        prop_assert_eq!(dilate(&u, 1), union(&dilate(&a, 1), &dilate(&b, 1)).unwrap());
    }

    #[test]
    fn hausdorff_is_a_metric((a, b) in mask_pair()) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let ab = hausdorff_cells(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_cells(&b, &a).unwrap());
        prop_assert_eq!(hausdorff_cells(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab == 0.0, a == b);
        let u = union(&a, &b).unwrap();
        prop_assert!(hausdorff_cells(&a, &b).unwrap() <= hausdorff_cells(&a, &u).unwrap() + hausdorff_cells(&u, &b).unwrap());
    }

    #[test]
    fn dilated_masks_have_no_isolated_cells(m in mask(), r in 1usize..3) {
        prop_assert!(isolated_cells(&dilate(&m, r)).is_empty());
    }

    #[test]
    fn interior_disks_nest(m in mask(), r in 3usize..6) {
        let thick = dilate(&m, 2);
        if interior_disk_exists(&thick, r).unwrap().is_some() {
            prop_assert!(interior_disk_exists(&thick, r - 1).unwrap().is_some());
        }
    }

    #[test]
    fn word_enumeration_is_deterministic(n in 1usize..4, len in 1usize..5) {
        let a = enumerate_words(n, len).unwrap();
        prop_assert_eq!(a.len() as u128, word_count(n, len));
        prop_assert_eq!(a, enumerate_words(n, len).unwrap());
    }

    #[test]
    fn forward_violations_fall_with_tolerance(m in mask(), seed in any::<u64>()) {
        prop_assume!(!m.is_empty());
        let gens = [GeneratorSpec::power(2).unwrap()];
        let mut last = usize::MAX;
        for t in 0..3 {
            let p = InvarianceParams { samples: 200, seed, tolerance_cells: t, ..InvarianceParams::default() };
            match forward_invariance(&m, &gens, &p) {
                Ok(r) => {
                    prop_assert!(r.violations <= last);
                    prop_assert_eq!(r.violation_fraction, r.violations as f64 / r.samples_tested as f64);
                    last = r.violations;
                }
                Err(_) => break,
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_text_round_trips(
        preset in prop_oneof![Just(Scenario::SinePair), Just(Scenario::ExpPair), Just(Scenario::RationalPair)],
        cols in 8usize..600,
        half in 0.5f64..20.0,
        max_iter in 10u32..500,
        samples in 1usize..5000,
        seed in any::<u64>(),
        dilation in 0usize..3,
        word_len in 1usize..9,
    ) {
        let mut cfg = ScenarioConfig::preset(preset);
        cfg.viewport.cols = cols;
        cfg.viewport.half_width = half;
        cfg.classify.max_iter = max_iter;
        cfg.invariance.samples = samples;
        cfg.invariance.seed = seed;
        cfg.hull.closure_dilation = dilation;
        cfg.semigroup_word_len = word_len;
        let text = cfg.to_config_string();
        let back: ScenarioConfig = text.parse().unwrap();
        prop_assert_eq!(back, cfg);
    }
}
