//! Verification of the weight-shifted character identity
//!
//! `sum_{mu' in Omega_mu} chi_{mu'+nu} = sum_l N_{mu nu}^l chi_l`
//!
//! at generic points (tensor-product coefficients) and, in denominator-free
//! form, on the level-k variety (fusion coefficients). Also the integer
//! corollaries: the squared-coefficient bound, the dimension bound and the
//! conjugation symmetry of the coefficient sums.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Series, Weight};
use crate::characters::{eval_char, eval_d, eval_virtual_char, EvalPoint};
use crate::csmodel::variety_points;
use crate::error::Result;
use crate::fusion::{fuse, fuse_level_k, level_k_weights, DecompMap, Level};
use crate::weights::{conjugate, weight_system};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub points_checked: u64,
    pub max_abs_residual: f64,
    pub passed: bool,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    /// Builds a report from `(point label, lhs, rhs)` triples. Witnesses are
    /// the worst failures, largest residual first.
    pub fn from_samples<I>(case_id: impl Into<String>, tolerance: f64, samples: I) -> Self
    where
        I: IntoIterator<Item = (String, Complex64, Complex64)>,
    {
        let mut max = 0.0f64;
        let mut count = 0u64;
        let mut failures: Vec<(f64, Witness)> = Vec::new();
        for (point, lhs, rhs) in samples {
            count += 1;
            let r = (lhs - rhs).norm();
            let r = if r.is_nan() { f64::INFINITY } else { r };
            max = max.max(r);
            if r > tolerance {
                failures.push((r, Witness { point, lhs: [lhs.re, lhs.im], rhs: [rhs.re, rhs.im] }));
            }
        }
        failures.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.point.cmp(&b.1.point)));
        failures.truncate(MAX_WITNESSES);
        VerificationReport {
            case_id: case_id.into(),
            points_checked: count,
            max_abs_residual: max,
            passed: max <= tolerance,
            tolerance,
            witnesses: failures.into_iter().map(|(_, w)| w).collect(),
        }
    }
}

/// `sum_{mu' in Omega_mu} m_{mu'} chi_{mu'+nu}(p)` with virtual characters.
pub fn lhs_char_sum(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, p: &EvalPoint) -> Result<Complex64> {
    let ws = weight_system(spec, mu)?;
    let mut acc = Complex64::zero();
    for (w, m) in ws.iter() {
        acc += eval_virtual_char(spec, &(w + nu), p)? * m as f64;
    }
    Ok(acc)
}

/// `sum_l N_{mu nu}^l chi_l(p)`.
pub fn rhs_fusion_sum(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, p: &EvalPoint, level: Level) -> Result<Complex64> {
    let decomp = fuse(spec, mu, nu, level)?;
    let mut acc = Complex64::zero();
    for (l, n) in decomp.iter() {
        acc += eval_char(spec, l, p)? * n as f64;
    }
    Ok(acc)
}

/// `sum_{mu'} m_{mu'} D_{mu'+nu+rho}(p)`.
pub fn numerator_lhs(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, p: &EvalPoint) -> Result<Complex64> {
    let ws = weight_system(spec, mu)?;
    let base = nu + spec.rho();
    let mut acc = Complex64::zero();
    for (w, m) in ws.iter() {
        acc += eval_d(spec, &(&base + w), p)? * m as f64;
    }
    Ok(acc)
}

/// `sum_l N^l D_{l+rho}(p)`.
pub fn numerator_rhs(spec: &AlgebraSpec, decomp: &DecompMap, p: &EvalPoint) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (l, n) in decomp.iter() {
        acc += eval_d(spec, &(l + spec.rho()), p)? * n as f64;
    }
    Ok(acc)
}

fn pair_id(prefix: &str, spec: &AlgebraSpec, mu: &Weight, nu: &Weight, level: Level) -> String {
    format!("{prefix}:{}:k={level}:mu={mu}:nu={nu}", spec.name())
}

/// Denominator-free identity on variety points `gamma` with `K = k + c`,
/// using the supplied coefficients on the right-hand side.
pub fn verify_numerator_identity_with(
    spec: &AlgebraSpec,
    mu: &Weight,
    nu: &Weight,
    k: u32,
    decomp: &DecompMap,
    gammas: &[Weight],
    tolerance: f64,
) -> Result<VerificationReport> {
    let mut samples = Vec::with_capacity(gammas.len());
    for g in gammas {
        let p = EvalPoint::variety(spec, g.clone(), k);
        let lhs = numerator_lhs(spec, mu, nu, &p)?;
        let rhs = numerator_rhs(spec, decomp, &p)?;
        samples.push((format!("gamma={g}"), lhs, rhs));
    }
    Ok(VerificationReport::from_samples(pair_id("numerator", spec, mu, nu, Level::Finite(k)), tolerance, samples))
}

/// Denominator-free identity with level-k fusion coefficients.
pub fn verify_numerator_identity(
    spec: &AlgebraSpec,
    mu: &Weight,
    nu: &Weight,
    k: u32,
    gammas: &[Weight],
) -> Result<VerificationReport> {
    let decomp = fuse_level_k(spec, mu, nu, k)?;
    verify_numerator_identity_with(spec, mu, nu, k, &decomp, gammas, DEFAULT_TOLERANCE)
}

/// The `nu = 0` case: `sum_{mu' in Omega_mu} chi_{mu'} = chi_mu`.
pub fn verify_lemma_weightsum(
    spec: &AlgebraSpec,
    mu: &Weight,
    k: u32,
    gammas: &[Weight],
) -> Result<VerificationReport> {
    let zero = Weight::zero(spec.rank());
    let mut report = verify_numerator_identity(spec, mu, &zero, k, gammas)?;
    report.case_id = format!("weightsum:{}:k={k}:mu={mu}", spec.name());
    Ok(report)
}

/// Ratio-form identity at generic points against tensor-product coefficients.
pub fn verify_generic_identity(
    spec: &AlgebraSpec,
    mu: &Weight,
    nu: &Weight,
    points: &[EvalPoint],
    tolerance: f64,
) -> Result<VerificationReport> {
    let decomp = fuse(spec, mu, nu, Level::Infinite)?;
    let mut samples = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let lhs = lhs_char_sum(spec, mu, nu, p)?;
        let mut rhs = Complex64::zero();
        for (l, n) in decomp.iter() {
            rhs += eval_char(spec, l, p)? * n as f64;
        }
        samples.push((format!("generic#{i}"), lhs, rhs));
    }
    Ok(VerificationReport::from_samples(pair_id("generic", spec, mu, nu, Level::Infinite), tolerance, samples))
}

/// Runs [`verify_numerator_identity`] for every integrable pair at level `k`
/// over the full residue set of variety points.
pub fn scan_numerator_identity(spec: &AlgebraSpec, k: u32, tolerance: f64) -> Result<Vec<VerificationReport>> {
    let gammas = variety_points(spec, k)?;
    let weights = level_k_weights(spec, k);
    let mut out = Vec::new();
    for mu in &weights {
        for nu in &weights {
            let decomp = fuse_level_k(spec, mu, nu, k)?;
            out.push(verify_numerator_identity_with(spec, mu, nu, k, &decomp, &gammas, tolerance)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub passed: bool,
}

/// `sum_l (N_{sigma mu}^l)^2 <= min(sum m_{mu'}^2, sum m_{sigma'}^2)`.
pub fn parseval_bound(spec: &AlgebraSpec, mu: &Weight, sigma: &Weight, level: Level) -> Result<BoundCheck> {
    let decomp = fuse(spec, mu, sigma, level)?;
    let lhs = decomp.sum_squares();
    let rhs = weight_system(spec, mu)?.mult_sum_squares().min(weight_system(spec, sigma)?.mult_sum_squares());
    Ok(BoundCheck { lhs, rhs, passed: lhs <= rhs })
}

/// `sum_l N_{mu nu}^l <= min(dim mu, dim nu)`.
pub fn dim_bound(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, level: Level) -> Result<BoundCheck> {
    let decomp = fuse(spec, mu, nu, level)?;
    let lhs = decomp.total();
    let rhs = weight_system(spec, mu)?.dimension().min(weight_system(spec, nu)?.dimension());
    Ok(BoundCheck { lhs, rhs, passed: lhs <= rhs })
}

/// True for the algebras with complex representations: A_n (n >= 2), D_n
/// (n odd) and E6. For the others conjugation is trivial.
pub fn admits_complex_representations(spec: &AlgebraSpec) -> bool {
    match spec.series() {
        Series::A => spec.rank() >= 2,
        Series::D => spec.rank() % 2 == 1,
        Series::E => spec.rank() == 6,
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyCheck {
    pub squares: (u64, u64),
    pub linear: (u64, u64),
    pub equal: bool,
    /// False when the algebra has no complex representations; the check is
    /// then trivially satisfied.
    pub complex_reps: bool,
}

/// Compares `sum (N_{ab}^l)^2` with `sum (N_{a bbar}^l)^2`, and the plain sums.
pub fn conjugacy_square_check(spec: &AlgebraSpec, a: &Weight, b: &Weight, level: Level) -> Result<ConjugacyCheck> {
    let bbar = conjugate(spec, b)?;
    let d1 = fuse(spec, a, b, level)?;
    let d2 = fuse(spec, a, &bbar, level)?;
    let squares = (d1.sum_squares(), d2.sum_squares());
    let linear = (d1.total(), d2.total());
    Ok(ConjugacyCheck {
        squares,
        linear,
        equal: squares.0 == squares.1 && linear.0 == linear.1,
        complex_reps: admits_complex_representations(spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::characters::random_regular_point;

    fn spec(name: &str) -> AlgebraSpec {
        AlgebraSpec::parse(name).unwrap()
    }

    fn w<const N: usize>(x: [i64; N]) -> Weight {
        Weight::from(x)
    }

    #[test]
    fn su2_worked_examples() {
        let a1 = spec("A1");
        let p = EvalPoint::angles(&a1, &[0.83]);
        let chi = |n: i64| eval_char(&a1, &w([n]), &p).unwrap();
        let l = lhs_char_sum(&a1, &w([1]), &w([1]), &p).unwrap();
        assert!((l - (chi(0) + chi(2))).norm() < 1e-12);
        let l = lhs_char_sum(&a1, &w([2]), &w([1]), &p).unwrap();
        assert!((l - (chi(1) + chi(3))).norm() < 1e-12);
        let l = lhs_char_sum(&a1, &w([3]), &w([0]), &p).unwrap();
        assert!((l - chi(3)).norm() < 1e-12);
        let r = rhs_fusion_sum(&a1, &w([1]), &w([1]), &p, Level::Infinite).unwrap();
        assert!((r - (chi(0) + chi(2))).norm() < 1e-12);
        let l = lhs_char_sum(&a1, &w([0]), &w([4]), &p).unwrap();
        assert!((l - chi(4)).norm() < 1e-12);
    }

    #[test]
    fn level_two_rhs_on_variety() {
        let a1 = spec("A1");
        let p = EvalPoint::variety(&a1, w([1]), 2);
        let r = rhs_fusion_sum(&a1, &w([2]), &w([2]), &p, Level::Finite(2)).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
    }

    #[test]
    fn numerator_identity_su2() {
        let a1 = spec("A1");
        let gammas: Vec<Weight> = (0..12).map(|g| w([g])).collect();
        let r = verify_numerator_identity(&a1, &w([1]), &w([1]), 4, &gammas).unwrap();
        assert!(r.passed && r.max_abs_residual < 1e-10, "{r:?}");
        let r = verify_numerator_identity(&a1, &w([0]), &w([3]), 4, &gammas).unwrap();
        assert_eq!(r.max_abs_residual, 0.0);
    }

    #[test]
    fn corrupted_coefficients_fail() {
        let a1 = spec("A1");
        let gammas = variety_points(&a1, 2).unwrap();
        let good = verify_numerator_identity(&a1, &w([2]), &w([2]), 2, &gammas).unwrap();
        assert!(good.passed && good.witnesses.is_empty());
        let bad_map = DecompMap::from_entries([(w([0]), 2)]);
        let bad =
            verify_numerator_identity_with(&a1, &w([2]), &w([2]), 2, &bad_map, &gammas, DEFAULT_TOLERANCE).unwrap();
        assert!(!bad.passed);
        assert!(!bad.witnesses.is_empty());
        // Tensor coefficients also satisfy the numerator form: D_5 = -D_3 at K = 4.
        let tensor = fuse(&a1, &w([2]), &w([2]), Level::Infinite).unwrap();
        let t = verify_numerator_identity_with(&a1, &w([2]), &w([2]), 2, &tensor, &gammas, DEFAULT_TOLERANCE).unwrap();
        assert!(t.passed);
    }

    #[test]
    fn weightsum_lemma() {
        let a1 = spec("A1");
        let g1 = variety_points(&a1, 3).unwrap();
        assert!(verify_lemma_weightsum(&a1, &w([3]), 3, &g1).unwrap().passed);
        let a2 = spec("A2");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        use rand::Rng;
        let gammas: Vec<Weight> = (0..30).map(|_| w([rng.gen_range(-20..20), rng.gen_range(-20..20)])).collect();
        let r = verify_lemma_weightsum(&a2, &w([1, 1]), 3, &gammas).unwrap();
        assert!(r.passed && r.max_abs_residual < 1e-9);
    }

    #[test]
    fn generic_identity_a2() {
        let a2 = spec("A2");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<EvalPoint> = (0..5).map(|_| random_regular_point(&a2, &mut rng, 0.1).unwrap()).collect();
        let r = verify_generic_identity(&a2, &w([2, 1]), &w([1, 1]), &pts, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn bounds_examples() {
        let a1 = spec("A1");
        assert_eq!(
            dim_bound(&a1, &w([1]), &w([1]), Level::Finite(2)).unwrap(),
            BoundCheck { lhs: 2, rhs: 2, passed: true }
        );
        let a2 = spec("A2");
        let b = parseval_bound(&a2, &w([1, 1]), &w([1, 1]), Level::Infinite).unwrap();
        assert_eq!(b.rhs, 10);
        // 8 x 8 = 1 + 2*8 + 10 + 10bar + 27: 1 + 4 + 1 + 1 + 1 = 8.
        assert_eq!(b.lhs, 8);
        let v = parseval_bound(&a2, &w([1, 0]), &w([0, 0]), Level::Finite(2)).unwrap();
        assert_eq!(v.lhs, 1);
    }

    #[test]
    fn conjugacy_examples() {
        let a2 = spec("A2");
        let c = conjugacy_square_check(&a2, &w([1, 0]), &w([1, 0]), Level::Finite(2)).unwrap();
        assert!(c.equal && c.complex_reps);
        let c = conjugacy_square_check(&a2, &w([0, 0]), &w([2, 1]), Level::Finite(3)).unwrap();
        assert_eq!(c.linear, (1, 1));
        assert!(!admits_complex_representations(&spec("B3")));
        assert!(admits_complex_representations(&spec("D5")));
        assert!(!admits_complex_representations(&spec("D4")));
    }

    #[test]
    fn report_invariants() {
        let r = VerificationReport::from_samples(
            "x",
            1e-9,
            vec![
                ("a".to_string(), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
                ("b".to_string(), Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)),
            ],
        );
        assert!(!r.passed);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.points_checked, 2);
        assert_eq!(r.max_abs_residual, 1.0);
    }
}
