use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vanvleck_core::analysis::*;
use vanvleck_core::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn figure_operator() -> LameOperator {
    let q3 = Polynomial::from_roots(&[c(0.0, 1.0), c(0.0, -1.0), c(2.0, 3.0), c(3.0, -2.0)]);
    LameOperator::new(vec![Polynomial::zero(), Polynomial::zero(), q3]).unwrap()
}

fn legendre_type() -> LameOperator {
    LameOperator::new(vec![
        Polynomial::from_real(&[-0.5, 0.0, 1.5]),
        Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
    ])
    .unwrap()
}

fn classical_lame() -> (ClassicalSpec, LameOperator) {
    let spec = ClassicalSpec::real(&[-1.0, -0.3, 0.4, 1.0], &[0.5, 1.0, 0.7, 0.3], 2);
    let op = build_classical(&spec).unwrap();
    (spec, op)
}

fn all_roots(p: &SpectralPair) -> Vec<Complex> {
    let mut out = Vec::new();
    for q in [&p.v, &p.s] {
        if q.degree().unwrap_or(0) > 0 {
            out.extend(vanvleck_core::poly::roots(q).unwrap().expanded());
        }
    }
    out
}

fn point_in_disk() -> impl Strategy<Value = Complex> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Complex::from_polar(r.sqrt(), a))
}

proptest! {
    #[test]
    fn transform_matches_direct_sum(zs in prop::collection::vec(point_in_disk(), 1..=15), angle in 0.0f64..std::f64::consts::TAU, stretch in 2.0f64..6.0) {
        let p = Polynomial::from_roots(&zs);
        let radius = zs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(0.1);
        let z = Complex::from_polar(stretch * radius, angle);
        let value = cauchy_transform(&p, z).unwrap();
        let m = zs.len() as f64;
        let direct: Complex = zs.iter().map(|&w| c(1.0, 0.0) / (z - w)).sum::<Complex>() / m;
        prop_assert!((value - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn both_sided_estimate_holds(
        unit in prop::collection::vec(point_in_disk(), 1..=20),
        z0 in (-3.0f64..3.0, -3.0f64..3.0),
        r0 in 0.01f64..5.0,
        sep in 1.1f64..20.0,
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let z0 = c(z0.0, z0.1);
        let mu = RootCountingMeasure::new(unit.iter().map(|&u| z0 + u * r0).collect()).unwrap();
        let z = z0 + Complex::from_polar(sep * r0, angle);
        prop_assert!(cauchy_bounds_check(&mu, z0, r0, z).unwrap());
    }
}

#[test]
fn circle_measure_near_the_boundary() {
    let pts: Vec<Complex> = (0..16)
        .map(|j| Complex::from_polar(1.0, std::f64::consts::TAU * j as f64 / 16.0))
        .collect();
    let mu = RootCountingMeasure::new(pts).unwrap();
    for d in [1.01, 1.5, 10.0, 1e3] {
        assert!(cauchy_bounds_check(&mu, c(0.0, 0.0), 1.0, c(d, 0.3 * d)).unwrap());
    }
}

#[test]
fn roots_stay_in_the_localization_disk() {
    let (_, lame) = classical_lame();
    let opts = SolveOptions::default();
    for (op, top) in [(figure_operator(), 30), (legendre_type(), 30), (lame, 12)] {
        let bound = localization_bound(&op).unwrap();
        for n in bound.n0..=top {
            for p in solve(&op, n, &opts).unwrap().pairs {
                for z in all_roots(&p) {
                    assert!(z.norm() <= bound.r0, "n={n}: |{z}| > {}", bound.r0);
                }
            }
        }
    }
}

#[test]
fn classical_roots_lie_on_the_segment() {
    let (_, op) = classical_lame();
    for n in 1..=8 {
        let rep = solve(&op, n, &SolveOptions::default()).unwrap();
        let hull = hull_report(&op, &rep.pairs, 1e-8).unwrap();
        assert!(hull.max_distance <= 1e-8, "n={n}: {}", hull.max_distance);
        assert_eq!(hull.beyond_eps, 0);
    }
}

#[test]
fn complex_points_positive_weights_stay_in_hull() {
    let spec = ClassicalSpec::new(
        vec![c(0.0, 1.0), c(-1.0, -0.5), c(1.5, -0.2)],
        vec![0.4, 1.0, 0.8],
        2,
    );
    let op = build_classical(&spec).unwrap();
    for n in 1..=8 {
        let rep = solve(&op, n, &SolveOptions::default()).unwrap();
        let hull = hull_report(&op, &rep.pairs, 1e-8).unwrap();
        assert!(hull.max_distance <= 1e-8, "n={n}: {}", hull.max_distance);
    }
}

#[test]
fn figure_hull_distance_shrinks() {
    let op = figure_operator();
    let dist: Vec<f64> = [10, 20, 30]
        .iter()
        .map(|&n| {
            let rep = solve(&op, n, &SolveOptions::default()).unwrap();
            let hull = hull_report(&op, &rep.pairs, 1e-2).unwrap();
            assert_eq!(hull.unpolished, 0);
            hull.max_distance
        })
        .collect();
    // S vanishes at every corner where V does not, so the true distances are
    // exactly zero and the computed ones are rounding at the corners.
    assert!(dist.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{dist:?}");
}

#[test]
fn identity_and_coprimality_on_classical_pairs() {
    let (spec, op) = classical_lame();
    for n in 1..=10 {
        for p in solve(&op, n, &SolveOptions::default()).unwrap().pairs {
            assert!(polya_identity_check(&spec, &p, 1e-6).unwrap(), "n={n}");
            assert!(coprimality_check(&p, 1e-8), "n={n}");
        }
    }
}

#[test]
fn three_point_hand_example() {
    let spec = ClassicalSpec::real(&[-1.0, 0.0, 1.0], &[0.5, 0.5, 0.5], 2);
    let op = build_classical(&spec).unwrap();
    let rep = solve(&op, 1, &SolveOptions::default()).unwrap();
    let out = classical_verdict(&spec, &rep).unwrap();
    assert!(out.all_pass());
    let mut dist: Vec<_> = out
        .verdicts
        .iter()
        .map(|v| v.distribution.clone())
        .collect();
    dist.sort();
    assert_eq!(dist, vec![vec![0, 1], vec![1, 0]]);
    for p in &rep.pairs {
        assert!(polya_identity_check(&spec, p, 1e-10).unwrap());
    }
}

#[test]
fn random_classical_specs_are_real_simple_and_bijective() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = SolveOptions::default();
    for _ in 0..20 {
        let l = rng.random_range(2..=4);
        let mut alphas: Vec<f64> = Vec::new();
        while alphas.len() < l {
            let a: f64 = rng.random_range(-2.0..2.0);
            if alphas.iter().all(|b| (a - b).abs() > 0.2) {
                alphas.push(a);
            }
        }
        alphas.sort_by(f64::total_cmp);
        let betas: Vec<f64> = (0..l).map(|_| rng.random_range(0.1..2.0)).collect();
        let spec = ClassicalSpec::real(&alphas, &betas, 2);
        let op = build_classical(&spec).unwrap();
        let n = rng.random_range(0..=8);
        let rep = solve(&op, n, &opts).unwrap();
        let out = classical_verdict(&spec, &rep).unwrap();
        assert!(out.all_pass(), "{spec:?} n={n}: {out:?}");
    }
}

#[test]
fn third_order_arrangements_are_exhausted() {
    let spec = ClassicalSpec::real(&[-1.0, -0.2, 0.5, 1.0], &[1.0, 0.6, 0.8, 1.2], 3);
    let op = build_classical(&spec).unwrap();
    for n in 2..=6 {
        let rep = solve(&op, n, &SolveOptions::default()).unwrap();
        let out = classical_verdict(&spec, &rep).unwrap();
        assert!(out.bijective, "n={n}: {out:?}");
        assert!(out
            .verdicts
            .iter()
            .all(|v| v.all_real && v.all_simple && v.in_interval && v.coprime));
    }
}

#[test]
fn classical_top_terms_preserve_hyperbolicity() {
    let q2 = Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]);
    let op = LameOperator::new(vec![q2.derivative(1).scale(c(0.5, 0.0)), q2]).unwrap();
    assert_eq!(
        hyperbolicity_preserver_sample(&op, 10_000, 1..=8, 11),
        HyperbolicityVerdict::NoCounterexampleFound(10_000)
    );
}
