use num_complex::Complex64;
use proptest::prelude::*;
use proptest::sample::select;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fusionkit::characters::{eval_char, eval_char_trace, eval_d, random_regular_point, virtual_normalize, EvalPoint};
use fusionkit::csmodel::{build_model, LatticeOperator, OperatorBasis, StateVector};
use fusionkit::fusion::{fuse, fuse_level_k, level_k_weights, tensor_decompose, DecompMap, VerlindeOracle};
use fusionkit::identity::verify_numerator_identity;
use fusionkit::theta::{kac_weyl_char, standard_grid, theta_sum, theta_weyl, verify_kw_identity, ThetaContext};
use fusionkit::weights::{conjugate, weight_system, weyl_dimension};
use fusionkit::{AlgebraSpec, Caps, Level, Weight};

const SMALL: &[&str] = &["A1", "A2", "A3", "B2", "B3", "C3", "G2"];
const RANK4: &[&str] = &["A4", "B4", "C4", "D4", "F4"];

fn spec(name: &str) -> AlgebraSpec {
    AlgebraSpec::parse(name).unwrap()
}

/// An algebra from `names` together with a weight whose labels lie in `lo..=hi`.
fn algebra_and_weight(names: &'static [&'static str], lo: i64, hi: i64) -> impl Strategy<Value = (String, Weight)> {
    select(names).prop_flat_map(move |name| {
        let rank = spec(name).rank();
        proptest::collection::vec(lo..=hi, rank).prop_map(move |v| (name.to_string(), Weight::new(v)))
    })
}

fn point(s: &AlgebraSpec, seed: u64) -> EvalPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_regular_point(s, &mut rng, 0.05).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflections_are_isometric_involutions((name, beta) in algebra_and_weight(SMALL, -5, 5)) {
        let s = spec(&name);
        for i in 1..=s.rank() {
            let r = s.simple_reflection(i, &beta).unwrap();
            prop_assert_eq!(s.simple_reflection(i, &r).unwrap(), beta.clone());
            prop_assert_eq!(s.inner_product(&r, &r).unwrap(), s.inner_product(&beta, &beta).unwrap());
            prop_assert_eq!(s.inner_product(&r, s.rho()).unwrap(), s.inner_product(&beta, &s.simple_reflection(i, s.rho()).unwrap()).unwrap());
        }
    }

    #[test]
    fn dominant_reduction_is_orbit_invariant((name, beta) in algebra_and_weight(SMALL, -4, 4), pick in any::<prop::sample::Index>()) {
        let s = spec(&name);
        let group = s.weyl_group().unwrap();
        let w = &group[pick.index(group.len())];
        let a = s.reflect_to_dominant(&beta);
        let b = s.reflect_to_dominant(&w.apply(&beta));
        prop_assert_eq!(&a.weight, &b.weight);
        prop_assert_eq!(a.sign * w.sign(), b.sign);
        let (da, _) = s.dominant_representative(&beta);
        let (db, _) = s.dominant_representative(&w.apply(&beta));
        prop_assert_eq!(da, db);
    }

    #[test]
    fn multiplicities_are_weyl_invariant((name, mu) in algebra_and_weight(SMALL, 0, 2), picks in proptest::collection::vec(any::<prop::sample::Index>(), 20)) {
        let s = spec(&name);
        let ws = weight_system(&s, &mu).unwrap();
        let entries: Vec<(&Weight, u64)> = ws.iter().collect();
        for p in picks {
            let (w, m) = entries[p.index(entries.len())];
            let i = 1 + p.index(s.rank());
            prop_assert_eq!(ws.multiplicity(&s.simple_reflection(i, w).unwrap()), m);
        }
    }

    #[test]
    fn dimension_matches_weyl_formula((name, mu) in algebra_and_weight(SMALL, 0, 3)) {
        let s = spec(&name).with_caps(Caps { dim: 1_000_000, ..Caps::default() });
        let ws = weight_system(&s, &mu).unwrap();
        prop_assert_eq!(ws.dimension() as u128, weyl_dimension(&s, &mu).unwrap());
        let sq = ws.mult_sum_squares();
        prop_assert!(sq >= ws.dimension());
        prop_assert_eq!(sq == ws.dimension(), ws.iter().all(|(_, m)| m == 1));
    }

    #[test]
    fn conjugate_system_is_negated((name, mu) in algebra_and_weight(SMALL, 0, 2)) {
        let s = spec(&name);
        let ws = weight_system(&s, &mu).unwrap();
        let wc = weight_system(&s, &conjugate(&s, &mu).unwrap()).unwrap();
        prop_assert_eq!(ws.len(), wc.len());
        for (w, m) in ws.iter() {
            prop_assert_eq!(wc.multiplicity(&-w), m);
        }
    }

    #[test]
    fn characters_are_weyl_invariant((name, mu) in algebra_and_weight(SMALL, 0, 2), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let s = spec(&name);
        let p = point(&s, seed);
        let group = s.weyl_group().unwrap();
        let w = &group[pick.index(group.len())];
        let a = eval_char(&s, &mu, &p).unwrap();
        let b = eval_char(&s, &mu, &p.transform(w)).unwrap();
        prop_assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        let lam = &mu + s.rho();
        let d1 = eval_d(&s, &w.apply(&lam), &p).unwrap();
        let d0 = eval_d(&s, &lam, &p).unwrap();
        prop_assert!((d1 - d0 * w.sign() as f64).norm() < 1e-12 * d0.norm().max(1.0));
    }

    #[test]
    fn ratio_form_equals_trace_form((name, mu) in algebra_and_weight(SMALL, 0, 2), seed in any::<u64>()) {
        let s = spec(&name);
        let p = point(&s, seed);
        let a = eval_char(&s, &mu, &p).unwrap();
        let b = eval_char_trace(&s, &mu, &p).unwrap();
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn virtual_characters_are_consistent((name, lam) in algebra_and_weight(&["A1", "A2", "A3", "B2", "C3", "G2"], -4, 4), seed in any::<u64>()) {
        let s = spec(&name);
        let p = point(&s, seed);
        let v = virtual_normalize(&s, &lam);
        let lhs = match v.dominant {
            Some(d) => eval_char(&s, &d, &p).unwrap() * v.sign as f64,
            None => Complex64::new(0.0, 0.0),
        };
        let rhs = eval_d(&s, &(&lam + s.rho()), &p).unwrap() / eval_d(&s, s.rho(), &p).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn tensor_products_preserve_dimension((name, mu) in algebra_and_weight(&["A1", "A2", "B2", "G2"], 0, 3), (_, nu0) in algebra_and_weight(&["A2"], 0, 3)) {
        let s = spec(&name).with_caps(Caps { dim: 1_000_000, ..Caps::default() });
        let nu = Weight::new(nu0.labels().iter().cycle().take(s.rank()).cloned().collect());
        let d = tensor_decompose(&s, &mu, &nu).unwrap();
        let prod = weyl_dimension(&s, &mu).unwrap() * weyl_dimension(&s, &nu).unwrap();
        prop_assert_eq!(d.dimension_sum(&s).unwrap(), prod);
        prop_assert_eq!(&d, &tensor_decompose(&s, &nu, &mu).unwrap());
    }

    #[test]
    fn fusion_is_bounded_by_tensor((name, mu) in algebra_and_weight(&["A1", "A2", "B2", "C3", "G2"], 0, 2), k in 0u32..5, pick in any::<prop::sample::Index>()) {
        let s = spec(&name);
        prop_assume!(s.is_integrable(&mu, k));
        let ws = level_k_weights(&s, k);
        let nu = &ws[pick.index(ws.len())];
        let f = fuse_level_k(&s, &mu, nu, k).unwrap();
        let t = tensor_decompose(&s, &mu, nu).unwrap();
        for (l, n) in f.iter() {
            prop_assert!(n <= t.get(l));
            prop_assert!(s.is_integrable(l, k));
        }
        let bar = |w: &Weight| conjugate(&s, w).unwrap();
        let fc = fuse_level_k(&s, &bar(&mu), &bar(nu), k).unwrap();
        for (l, n) in f.iter() {
            prop_assert_eq!(fc.get(&bar(l)), n);
        }
    }

    #[test]
    fn theta_is_antisymmetric_and_normalized((name, g) in algebra_and_weight(&["A1", "A2"], -3, 3), re in -0.5f64..0.5, im in 0.4f64..2.0, u0 in -0.5f64..0.5, u1 in -0.1f64..0.1) {
        let s = spec(&name);
        let u: Vec<Complex64> = (0..s.rank()).map(|i| Complex64::new(u0 + 0.17 * i as f64, u1)).collect();
        let ctx = ThetaContext::new(&s, 5, Complex64::new(re, im), u).unwrap();
        let base = theta_weyl(&ctx, &g, -1).unwrap();
        for i in 1..=s.rank() {
            let r = s.simple_reflection(i, &g).unwrap();
            prop_assert!((theta_weyl(&ctx, &r, -1).unwrap() + base).norm() < 1e-12 * base.norm().max(1.0));
        }
        let v = theta_sum(&ctx, &g).unwrap();
        let wide = ctx.clone().with_radius(2.0 * ctx.radius());
        prop_assert!((theta_sum(&wide, &g).unwrap() - v).norm() < ctx.epsilon());
        if let Ok(one) = kac_weyl_char(&ctx, &Weight::zero(s.rank())) {
            prop_assert!((one - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn lattice_operators_are_unitary(name in select(&["A1", "A2"][..]), k in 0u32..3, seed in any::<u64>()) {
        let s = spec(name);
        let m = build_model(&s, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(m.dimension(), &mut rng);
        let r = s.rank();
        let ops = [
            LatticeOperator::clock(r, 0, 1),
            LatticeOperator::shift(r, r - 1, -2),
            m.s_operator(),
            m.s_inverse_operator(),
            LatticeOperator::Product(vec![m.s_operator(), LatticeOperator::clock(r, r - 1, 3), LatticeOperator::shift(r, 0, 1)]),
        ];
        for op in &ops {
            prop_assert!((m.apply(op, &psi).norm() - psi.norm()).abs() < 1e-12 * psi.norm());
        }
        let group = s.weyl_group().unwrap();
        let op = m.wilson_operator(&level_k_weights(&s, k).last().unwrap().clone(), OperatorBasis::B).unwrap();
        for w in group {
            let a = m.apply(&op, &m.weyl_act(w, &psi));
            let b = m.weyl_act(w, &m.apply(&op, &psi));
            prop_assert!(a.distance(&b) < 1e-12);
        }
    }
}

#[test]
fn weyl_order_counts_rho_orbit() {
    for name in SMALL.iter().chain(RANK4) {
        let s = spec(name);
        assert_eq!(s.weyl_orbit(s.rho()).unwrap().len() as u128, s.weyl_order(), "{name}");
    }
}

#[test]
fn fusion_matches_verlinde_everywhere() {
    for (name, kmax) in [("A1", 6u32), ("A2", 4)] {
        let s = spec(name);
        for k in 0..=kmax {
            let oracle = VerlindeOracle::new(&s, k).unwrap();
            let ws = level_k_weights(&s, k);
            for mu in &ws {
                for nu in &ws {
                    let f = fuse_level_k(&s, mu, nu, k).unwrap();
                    for l in &ws {
                        assert_eq!(f.get(l), oracle.coefficient(mu, nu, l).unwrap(), "{name} k={k} {mu} {nu} {l}");
                    }
                }
            }
        }
    }
}

fn multiply(s: &AlgebraSpec, k: u32, a: &DecompMap, b: &Weight) -> DecompMap {
    let mut acc = std::collections::BTreeMap::new();
    for (x, n) in a.iter() {
        for (y, m) in fuse_level_k(s, x, b, k).unwrap().iter() {
            *acc.entry(y.clone()).or_insert(0) += n * m;
        }
    }
    DecompMap::from_entries(acc)
}

#[test]
fn fusion_ring_is_commutative_and_associative() {
    for (name, kmax) in [("A1", 4u32), ("A2", 2)] {
        let s = spec(name);
        for k in 0..=kmax {
            let ws = level_k_weights(&s, k);
            for a in &ws {
                for b in &ws {
                    let ab = fuse_level_k(&s, a, b, k).unwrap();
                    assert_eq!(ab, fuse_level_k(&s, b, a, k).unwrap());
                    for c in &ws {
                        let left = multiply(&s, k, &ab, c);
                        let bc = fuse_level_k(&s, b, c, k).unwrap();
                        let right = multiply(&s, k, &bc, a);
                        assert_eq!(left, right, "{name} k={k} {a} {b} {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn identity_holds_on_square_residue_grid() {
    // Residues gamma in {0..K-1}^2 for A2 (a subset of classes, but the one
    // most often tabulated).
    let a2 = spec("A2");
    for k in 1..=3u32 {
        let kk = (k + 3) as i64;
        let gammas: Vec<Weight> = (0..kk).flat_map(|a| (0..kk).map(move |b| Weight::from([a, b]))).collect();
        let ws = level_k_weights(&a2, k);
        for mu in &ws {
            for nu in &ws {
                let r = verify_numerator_identity(&a2, mu, nu, k, &gammas).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
    }
}

#[test]
fn theta_identity_holds_for_all_su2_pairs() {
    let a1 = spec("A1");
    let grid = standard_grid(1);
    for k in 0..=3u32 {
        let ws = level_k_weights(&a1, k);
        for mu in &ws {
            for nu in &ws {
                let r = verify_kw_identity(&a1, mu, nu, k, &grid, 1e-9).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
    }
}

#[test]
fn clock_commutators_at_all_supported_levels() {
    for (name, kmax) in [("A1", 6u32), ("A2", 2)] {
        let s = spec(name);
        for k in 0..=kmax {
            let m = build_model(&s, k).unwrap();
            assert!(m.check_clock_commutator() < 1e-12);
            assert!(m.check_orthonormality().unwrap() < 1e-12);
        }
    }
}

#[test]
fn infinite_level_fusion_is_tensor_product() {
    let a2 = spec("A2");
    let mu = Weight::from([2, 1]);
    let nu = Weight::from([1, 2]);
    assert_eq!(fuse(&a2, &mu, &nu, Level::Infinite).unwrap(), tensor_decompose(&a2, &mu, &nu).unwrap());
}
