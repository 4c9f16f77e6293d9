use approx::relative_eq;
use faabe_core::abe::{self, AbeConfig, SimilarityKind, SolutionKind, WeightVector};
use faabe_core::dataset::{self, Dataset, Feature, FeatureKind, FeatureSchema, FeatureValue, Manifest, Project};
use faabe_core::firefly::{self, FaConfig};
use faabe_core::metrics;
use faabe_core::select;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n)
}

fn paired(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| (prop::collection::vec(-50.0..50.0f64, n), prop::collection::vec(-50.0..50.0f64, n)))
}

fn numeric_dataset(cols: &[Vec<f64>], effort: &[f64]) -> Dataset {
    let features = (0..cols.len()).map(|i| Feature { name: format!("f{i}"), kind: FeatureKind::Numeric }).collect();
    let schema = FeatureSchema::new(features, "effort").unwrap();
    let projects = effort
        .iter()
        .enumerate()
        .map(|(r, &e)| Project::numeric(&cols.iter().map(|c| c[r]).collect::<Vec<_>>(), e))
        .collect();
    Dataset::new("p", schema, projects).unwrap()
}

proptest! {
    #[test]
    fn pearson_symmetric_and_affine((x, y) in paired(3..30), a in 0.1..10.0f64, b in -5.0..5.0f64) {
        let r = select::pearson(&x, &y).unwrap();
        prop_assert_eq!(r.map(f64::to_bits), select::pearson(&y, &x).unwrap().map(f64::to_bits));
        if let Some(r) = r {
            prop_assume!(r.abs() > 1e-6);
            let pos: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let neg: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assert!(relative_eq!(select::pearson(&pos, &y).unwrap().unwrap(), r, max_relative = 1e-9));
            prop_assert!(relative_eq!(select::pearson(&neg, &y).unwrap().unwrap(), -r, max_relative = 1e-9));
        }
    }

    #[test]
    fn selection_monotone_and_row_order_free(
        cols in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 12), 1..6),
        effort in prop::collection::vec(1.0..100.0f64, 12),
        t1 in 0.0..1.0f64,
        t2 in 0.0..1.0f64,
        perm_seed in any::<u64>(),
    ) {
        let d = numeric_dataset(&cols, &effort);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let strict = select::select_features(&d, hi);
        let loose = select::select_features(&d, lo);
        // Fallback may keep one feature under the strict threshold that the
        // loose one would also keep.
        prop_assert!(strict.kept.iter().all(|f| loose.kept.contains(f)));

        let mut rows: Vec<usize> = (0..12).collect();
        rand::seq::SliceRandom::shuffle(&mut rows[..], &mut ChaCha8Rng::seed_from_u64(perm_seed));
        let shuffled = select::select_features_on(&d, &rows, lo);
        prop_assert_eq!(shuffled.kept, loose.kept);
    }

    #[test]
    fn similarity_symmetric_and_scaled(p in unit_vec(4), q in unit_vec(4), w in unit_vec(4)) {
        let (p, q) = (Project::numeric(&p, 1.0), Project::numeric(&q, 1.0));
        let w = WeightVector::new(w).unwrap();
        for kind in SimilarityKind::ALL {
            prop_assert_eq!(abe::similarity(&p, &q, &w, kind).unwrap(), abe::similarity(&q, &p, &w, kind).unwrap());
        }
        // Euclidean = sqrt(Manhattan); they cross where the weighted sum + δ is 1.
        let e = abe::similarity(&p, &q, &w, SimilarityKind::Euclidean).unwrap();
        let m = abe::similarity(&p, &q, &w, SimilarityKind::Manhattan).unwrap();
        prop_assert!(relative_eq!(e * e, m, max_relative = 1e-12));
        prop_assert_eq!(e >= m, m <= 1.0);
    }

    #[test]
    fn iwm_is_convex(base in prop::collection::vec((unit_vec(3), 1.0..1000.0f64), 3..10), q in unit_vec(3), w in unit_vec(3), k in 1usize..4) {
        let base: Vec<Project> = base.iter().map(|(v, e)| Project::numeric(v, *e)).collect();
        let q = Project::numeric(&q, 1.0);
        let w = WeightVector::new(w).unwrap();
        for similarity in SimilarityKind::ALL {
            let cfg = AbeConfig { similarity, solution: SolutionKind::InverseWeightedMean, k_analogies: k };
            let near = abe::retrieve_analogies(&q, &base, &w, &cfg).unwrap();
            let est = abe::solve(&near, cfg.solution).unwrap();
            let lo = near.iter().map(|n| n.project.effort).fold(f64::INFINITY, f64::min);
            let hi = near.iter().map(|n| n.project.effort).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(est >= lo * (1.0 - 1e-12) && est <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn weight_scaling_keeps_neighbour_order(base in prop::collection::vec(unit_vec(3), 4..10), q in unit_vec(3), w in prop::collection::vec(0.2..=1.0f64, 3), c in 0.2..1.0f64) {
        // With δ negligible against the distances, scaling all weights by c
        // does not change the ranking; require a clear margin between scores.
        let base: Vec<Project> = base.iter().map(|v| Project::numeric(v, 1.0)).collect();
        let q = Project::numeric(&q, 1.0);
        let w1 = WeightVector::new(w.clone()).unwrap();
        let wc = WeightVector::new(w.iter().map(|x| x * c).collect()).unwrap();
        let mut d: Vec<f64> = base.iter().map(|p| abe::weighted_distance(&q, p, &w1).unwrap()).collect();
        d.sort_by(f64::total_cmp);
        prop_assume!(d[0] > 1e-2 && d.windows(2).all(|p| p[1] - p[0] > 1e-3));
        let cfg = AbeConfig { k_analogies: base.len(), ..AbeConfig::default() };
        let order = |w: &WeightVector| abe::retrieve_analogies(&q, &base, w, &cfg).unwrap().iter().map(|n| n.index).collect::<Vec<_>>();
        prop_assert_eq!(order(&w1), order(&wc));
    }

    #[test]
    fn metrics_permutation_and_scaling(pairs in prop::collection::vec((1.0..1e4f64, 0.0..1e4f64), 1..40), c in 0.1..10.0f64) {
        let (a, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let m = metrics::compute_metrics(&a, &p).unwrap();
        let (ra, rp): (Vec<f64>, Vec<f64>) = pairs.iter().rev().copied().unzip();
        let r = metrics::compute_metrics(&ra, &rp).unwrap();
        for (x, y) in m.values().into_iter().zip(r.values()) {
            prop_assert!(relative_eq!(x, y, max_relative = 1e-12, epsilon = 1e-12));
        }
        let sa: Vec<f64> = a.iter().map(|v| v * c).collect();
        let sp: Vec<f64> = p.iter().map(|v| v * c).collect();
        let s = metrics::compute_metrics(&sa, &sp).unwrap();
        prop_assert!(relative_eq!(s.mmre, m.mmre, max_relative = 1e-9, epsilon = 1e-12));
        prop_assert!(relative_eq!(s.mae, c * m.mae, max_relative = 1e-9, epsilon = 1e-9));
        prop_assert!(relative_eq!(s.mse, c * c * m.mse, max_relative = 1e-9, epsilon = 1e-9));
        prop_assert!(m.mae <= m.rmse * (1.0 + 1e-12));
    }

    #[test]
    fn split_is_a_partition(n in 3usize..600, seed in any::<u64>()) {
        let s = metrics::make_split(n, seed).unwrap();
        let mut all: Vec<usize> = s.basic.iter().chain(&s.train).chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(s.test.len(), metrics::test_size(n, 0.33));
        prop_assert!(s.basic.len() == s.train.len() || s.basic.len() == s.train.len() + 1);
        prop_assert_eq!(&s, &metrics::make_split(n, seed).unwrap());
    }

    #[test]
    fn firefly_distance_is_a_metric(a in unit_vec(5), b in unit_vec(5), c in unit_vec(5)) {
        let d = |x: &[f64], y: &[f64]| firefly::firefly_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert_eq!(d(&a, &a), 0.0);
    }

    #[test]
    fn moves_stay_in_bounds(xi in unit_vec(6), xj in unit_vec(6), alpha in 0.0..5.0f64, beta0 in 0.0..3.0f64, gamma in 0.0..10.0f64, seed in any::<u64>()) {
        let cfg = FaConfig { alpha, beta0, gamma, ..FaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (xi, xj) = (WeightVector::new(xi).unwrap(), WeightVector::new(xj).unwrap());
        let moved = firefly::move_toward(&xi, &xj, &cfg, &mut rng);
        let walked = firefly::random_walk(&xi, &cfg, &mut rng);
        for w in [moved, walked] {
            prop_assert!(w.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((0.0..1e6f64, 0u8..3, 0.5..1e5f64), 1..20)) {
        let schema = FeatureSchema::new(
            vec![Feature { name: "size".into(), kind: FeatureKind::Numeric }, Feature { name: "lang".into(), kind: FeatureKind::Nominal }],
            "effort",
        ).unwrap();
        let projects = rows
            .iter()
            .map(|(s, l, e)| Project::new(vec![FeatureValue::Numeric(*s), FeatureValue::Nominal(format!("L{l}"))], *e))
            .collect();
        let d = Dataset::new("rt", schema, projects).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = dataset::load_csv_from("rt", buf.as_slice(), &d.manifest()).unwrap();
        prop_assert_eq!(back.schema, d.schema);
        prop_assert_eq!(back.projects, d.projects);
    }
}

#[test]
fn normalization_keeps_effort_statistics() {
    let d = numeric_dataset(&[vec![3.0, 9.0, 1.0, 4.0], vec![2.0, 2.0, 2.0, 2.0]], &[10.0, 40.0, 25.0, 7.5]);
    let n = dataset::normalize(&d).unwrap();
    let (a, b) = (dataset::describe(&d), dataset::describe(&n));
    assert_eq!((a.effort_min, a.effort_max, a.effort_median), (b.effort_min, b.effort_max, b.effort_median));
    assert!(n.projects.iter().all(|p| p.values[1] == FeatureValue::Numeric(0.0)));
}

#[test]
fn manifest_round_trip() {
    let m = Manifest::parse("effort = E\nnominal = a, b\nignore = id\n").unwrap();
    assert_eq!(Manifest::parse(&m.to_string()).unwrap(), m);
}

#[test]
fn shipped_manifests_parse() {
    let dir = std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"));
    for name in faabe_core::config::DATASETS {
        let m = Manifest::from_file(&dir.join(format!("{name}.manifest"))).unwrap();
        assert!(!m.effort.is_empty(), "{name}");
    }
}
