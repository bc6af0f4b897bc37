//! Alternating Weyl sums `D_lambda`, Weyl characters and their virtual
//! extension to arbitrary lattice weights.
//!
//! Two kinds of evaluation point are supported. A generic point is a complex
//! vector `u` in Dynkin-label coordinates, and a weight `r` contributes
//! `exp((r, u))` with the pairing taken through the quadratic form. A variety
//! point is an integer weight `gamma` together with the shifted level
//! `K = k + c`; there `r` contributes `exp(2 pi i gamma^T C^-1 r / K)` and the
//! phase is reduced modulo 1 in exact arithmetic before exponentiating.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Rational, Weight, WeylElement};
use crate::error::{Error, Result};
use crate::weights::weight_system;

/// Below this magnitude `D_rho` is treated as a zero of the Weyl denominator.
pub const SINGULAR_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EvalPoint {
    Generic { u: Vec<Complex64> },
    Variety { gamma: Weight, shifted_level: u32 },
}

impl EvalPoint {
    pub fn generic(u: Vec<Complex64>) -> Self {
        EvalPoint::Generic { u }
    }

    /// Generic point with `exp((r, u)) = exp(i sum_j r_j theta_j)`, i.e.
    /// `u = i G^-1 theta`. For A1 this makes `chi_1 = 2 cos(theta)`.
    pub fn angles(spec: &AlgebraSpec, theta: &[f64]) -> Self {
        let ginv = spec.quad_form_inverse_f64();
        let u = (0..spec.rank())
            .map(|i| {
                let re: f64 = (0..spec.rank()).map(|j| ginv[i][j] * theta[j]).sum();
                Complex64::new(0.0, re)
            })
            .collect();
        EvalPoint::Generic { u }
    }

    /// Variety point for level `k` (phases use `K = k + c`).
    pub fn variety(spec: &AlgebraSpec, gamma: Weight, k: u32) -> Self {
        EvalPoint::Variety { gamma, shifted_level: k + spec.dual_coxeter() }
    }

    /// Variety point from an explicit shifted level; requires `K >= c`.
    pub fn variety_shifted(spec: &AlgebraSpec, gamma: Weight, shifted_level: u32) -> Result<Self> {
        if shifted_level < spec.dual_coxeter() {
            return Err(Error::Parse(format!(
                "shifted level {shifted_level} below dual Coxeter number {}",
                spec.dual_coxeter()
            )));
        }
        Ok(EvalPoint::Variety { gamma, shifted_level })
    }

    /// Image of the point under a Weyl group element.
    pub fn transform(&self, w: &WeylElement) -> Self {
        match self {
            EvalPoint::Generic { u } => EvalPoint::Generic { u: w.apply_vec(u) },
            EvalPoint::Variety { gamma, shifted_level } => {
                EvalPoint::Variety { gamma: w.apply(gamma), shifted_level: *shifted_level }
            }
        }
    }

    fn check(&self, spec: &AlgebraSpec) -> Result<()> {
        let got = match self {
            EvalPoint::Generic { u } => u.len(),
            EvalPoint::Variety { gamma, .. } => gamma.rank(),
        };
        if got != spec.rank() {
            return Err(Error::RankMismatch { expected: spec.rank(), got });
        }
        Ok(())
    }
}

/// Fractional part of a rational, in `[0, 1)`.
pub(crate) fn frac(x: Rational) -> Rational {
    let n = x.numer().rem_euclid(*x.denom());
    Rational::new(n, *x.denom())
}

/// `exp(2 pi i x)` for an exact rational `x`.
pub(crate) fn unit_phase(x: Rational) -> Complex64 {
    let f = frac(x).to_f64().unwrap();
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f)
}

/// `exp((r, p))`.
pub fn phase(spec: &AlgebraSpec, r: &Weight, p: &EvalPoint) -> Complex64 {
    match p {
        EvalPoint::Generic { u } => {
            let g = spec.quad_form();
            let mut acc = Complex64::zero();
            for (i, &ri) in r.labels().iter().enumerate() {
                if ri == 0 {
                    continue;
                }
                for (j, uj) in u.iter().enumerate() {
                    let gij = g[i][j];
                    if !gij.is_zero() {
                        acc += uj * (ri as f64 * gij.to_f64().unwrap());
                    }
                }
            }
            acc.exp()
        }
        EvalPoint::Variety { gamma, shifted_level } => {
            let x = spec.cartan_pairing(gamma, r) / Rational::from_integer(*shifted_level as i64);
            unit_phase(x)
        }
    }
}

/// Alternating sum `D_lambda(p) = sum_w (-1)^w exp((w lambda, p))`.
/// Exactly zero when `lambda` is fixed by a reflection.
pub fn eval_d(spec: &AlgebraSpec, lambda: &Weight, p: &EvalPoint) -> Result<Complex64> {
    spec.check_rank(lambda)?;
    p.check(spec)?;
    let group = spec.weyl_group()?;
    let (dom, _) = spec.dominant_representative(lambda);
    if !dom.is_strictly_dominant() {
        return Ok(Complex64::zero());
    }
    let mut acc = Complex64::zero();
    for w in group {
        let img = w.apply(lambda);
        let e = phase(spec, &img, p);
        if w.sign() > 0 {
            acc += e;
        } else {
            acc -= e;
        }
    }
    Ok(acc)
}

fn singular_error(spec: &AlgebraSpec, p: &EvalPoint, magnitude: f64) -> Error {
    // D_rho = prod_{alpha>0} (e^{alpha/2} - e^{-alpha/2}); the nearest wall is
    // the root whose factor is smallest.
    let wall = spec
        .positive_roots()
        .iter()
        .map(|a| ((phase(spec, &a.labels, p) - 1.0).norm(), a))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, a)| a.labels.labels().to_vec())
        .unwrap_or_default();
    Error::SingularPoint { magnitude, wall }
}

/// Weyl character `D_{mu+rho}(p) / D_rho(p)` of a dominant weight.
pub fn eval_char(spec: &AlgebraSpec, mu: &Weight, p: &EvalPoint) -> Result<Complex64> {
    spec.check_rank(mu)?;
    if !mu.is_dominant() {
        return Err(Error::NotDominant(mu.labels().to_vec()));
    }
    let den = eval_d(spec, spec.rho(), p)?;
    if den.norm() < SINGULAR_THRESHOLD {
        return Err(singular_error(spec, p, den.norm()));
    }
    Ok(eval_d(spec, &(mu + spec.rho()), p)? / den)
}

/// Trace form `sum_{r in Omega_mu} m_r exp((r, p))`.
pub fn eval_char_trace(spec: &AlgebraSpec, mu: &Weight, p: &EvalPoint) -> Result<Complex64> {
    p.check(spec)?;
    let ws = weight_system(spec, mu)?;
    Ok(ws.iter().map(|(r, m)| phase(spec, r, p) * m as f64).sum())
}

/// Normal form of the character of an arbitrary lattice weight:
/// `chi_lambda = sign * chi_dominant`, with sign 0 on walls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualChar {
    pub sign: i8,
    pub dominant: Option<Weight>,
}

pub fn virtual_normalize(spec: &AlgebraSpec, lambda: &Weight) -> VirtualChar {
    let sd = spec.reflect_to_dominant(&(lambda + spec.rho()));
    VirtualChar { sign: sd.sign, dominant: sd.weight.map(|w| &w - spec.rho()) }
}

/// `chi_lambda(p)` for any lattice weight, through [`virtual_normalize`].
pub fn eval_virtual_char(spec: &AlgebraSpec, lambda: &Weight, p: &EvalPoint) -> Result<Complex64> {
    spec.check_rank(lambda)?;
    let v = virtual_normalize(spec, lambda);
    match v.dominant {
        None => {
            // Still reject singular points so callers see a consistent contract.
            let den = eval_d(spec, spec.rho(), p)?;
            if den.norm() < SINGULAR_THRESHOLD {
                return Err(singular_error(spec, p, den.norm()));
            }
            Ok(Complex64::zero())
        }
        Some(d) => Ok(eval_char(spec, &d, p)? * v.sign as f64),
    }
}

/// Closed form `sin(pi (n+1) x / (k+2)) / sin(pi x / (k+2))` of the level-k
/// su(2) character at real argument `x`.
pub fn char_su2_closed(n: i64, k: u32, x: f64) -> Result<f64> {
    let kk = k as f64 + 2.0;
    let den = (std::f64::consts::PI * x / kk).sin();
    if den.abs() < 1e-12 {
        return Err(Error::SingularPoint { magnitude: den.abs(), wall: vec![2] });
    }
    Ok((std::f64::consts::PI * (n + 1) as f64 * x / kk).sin() / den)
}

/// Random generic point with purely imaginary `u` (bounded characters),
/// rejecting points where `|D_rho| < min_denominator`.
pub fn random_regular_point<R: Rng + ?Sized>(
    spec: &AlgebraSpec,
    rng: &mut R,
    min_denominator: f64,
) -> Result<EvalPoint> {
    loop {
        let theta: Vec<f64> = (0..spec.rank()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let p = EvalPoint::angles(spec, &theta);
        if eval_d(spec, spec.rho(), &p)?.norm() >= min_denominator {
            return Ok(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(name: &str) -> AlgebraSpec {
        AlgebraSpec::parse(name).unwrap()
    }

    #[test]
    fn su2_table() {
        let a1 = spec("A1");
        for &x in &[0.3, 1.1, 2.5, -0.7] {
            let p = EvalPoint::angles(&a1, &[x]);
            let chi = |n: i64| eval_char(&a1, &Weight::from([n]), &p).unwrap();
            assert!((chi(0) - 1.0).norm() < 1e-12);
            assert!((chi(1) - 2.0 * x.cos()).norm() < 1e-12);
            assert!((chi(2) - ((2.0 * x).cos() + 2.0 * x.cos().powi(2))).norm() < 1e-12);
            assert!((chi(3) - 4.0 * x.cos() * (2.0 * x).cos()).norm() < 1e-12);
        }
    }

    #[test]
    fn d_on_variety() {
        let a1 = spec("A1");
        let p = EvalPoint::variety_shifted(&a1, Weight::from([1]), 4).unwrap();
        let d = eval_d(&a1, &Weight::from([2]), &p).unwrap();
        assert!((d - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        assert_eq!(eval_d(&a1, &Weight::from([0]), &p).unwrap(), Complex64::zero());
        let a2 = spec("A2");
        let p2 = EvalPoint::variety(&a2, Weight::from([1, 2]), 2);
        assert_eq!(eval_d(&a2, &Weight::from([2, 0]), &p2).unwrap(), Complex64::zero());
    }

    #[test]
    fn virtual_normal_forms() {
        let a1 = spec("A1");
        assert_eq!(virtual_normalize(&a1, &Weight::from([-1])).sign, 0);
        assert_eq!(
            virtual_normalize(&a1, &Weight::from([-2])),
            VirtualChar { sign: -1, dominant: Some(Weight::from([0])) }
        );
        for m in 1..=6 {
            let v = virtual_normalize(&a1, &Weight::from([-m]));
            if m == 1 {
                assert_eq!(v.sign, 0);
            } else {
                assert_eq!(v.sign, -1);
                assert_eq!(v.dominant, Some(Weight::from([m - 2])));
            }
        }
    }

    #[test]
    fn variety_matches_su2_closed_form() {
        let a1 = spec("A1");
        for k in 1..=5u32 {
            let kk = k as i64 + 2;
            for g in 1..2 * kk {
                if g % kk == 0 {
                    continue;
                }
                let p = EvalPoint::variety(&a1, Weight::from([g]), k);
                for n in 0..=k as i64 + 1 {
                    let lhs = eval_char(&a1, &Weight::from([n]), &p).unwrap();
                    let rhs = char_su2_closed(n, k, g as f64).unwrap();
                    assert!((lhs - rhs).norm() < 1e-10, "k={k} g={g} n={n}");
                }
            }
        }
    }

    #[test]
    fn level_two_roots_of_unity() {
        // chi_{k+1} vanishes and chi_4 = -chi_2 at k = 2.
        assert!(char_su2_closed(3, 2, 1.0).unwrap().abs() < 1e-14);
        assert!((char_su2_closed(4, 2, 1.0).unwrap() + char_su2_closed(2, 2, 1.0).unwrap()).abs() < 1e-14);
        assert!((char_su2_closed(0, 7, 0.37).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_point_reports_wall() {
        let a2 = spec("A2");
        let p = EvalPoint::variety(&a2, Weight::zero(2), 1);
        match eval_char(&a2, &Weight::from([1, 0]), &p) {
            Err(Error::SingularPoint { wall, .. }) => assert_eq!(wall.len(), 2),
            other => panic!("expected singular point, got {other:?}"),
        }
        assert!(char_su2_closed(1, 2, 0.0).is_err());
    }

    #[test]
    fn ratio_equals_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, mus) in [
            ("A2", vec![vec![1, 0], vec![1, 1], vec![2, 1]]),
            ("B2", vec![vec![1, 0], vec![0, 1], vec![1, 1]]),
            ("G2", vec![vec![1, 0], vec![0, 1]]),
        ] {
            let s = spec(name);
            for _ in 0..10 {
                let p = random_regular_point(&s, &mut rng, 1e-3).unwrap();
                for mu in &mus {
                    let mu = Weight::new(mu.clone());
                    let a = eval_char(&s, &mu, &p).unwrap();
                    let b = eval_char_trace(&s, &mu, &p).unwrap();
                    assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "{name} {mu}");
                }
            }
        }
    }

    #[test]
    fn unit_limit_is_dimension() {
        let a2 = spec("A2");
        let p = EvalPoint::angles(&a2, &[0.01, 0.023]);
        let v = eval_char(&a2, &Weight::from([1, 1]), &p).unwrap();
        assert!((v.re - 8.0).abs() < 0.05);
    }
}
