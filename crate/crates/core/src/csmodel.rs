//! Finite Gaussian model: clock and shift operators on the weight lattice
//! modulo `K` times the root lattice, the Weyl-odd primary states, the
//! discrete Fourier operator and the fusion ring realized by Wilson loops.
//!
//! States are labelled by classes of `P / K Q` (`K = k + c`), represented by
//! canonical Dynkin labels. The quotient is taken modulo the root lattice so
//! that affine reflections identify states, which is what makes the Wilson
//! loop products truncate to level-k fusion.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;

use crate::algebra::{AlgebraSpec, Weight, WeylElement};
use crate::characters::{eval_d, EvalPoint};
use crate::error::{Error, Result};
use crate::fusion::{level_k_weights, DecompMap};
use crate::weights::weight_system;

/// Rounding guard for coefficients read off by inner products.
pub const OPERATOR_ROUNDING_GUARD: f64 = 1e-8;

/// Hermite normal form of the rows of `m`, lower triangular with positive
/// diagonal. Row `i` is supported on columns `0..=i`.
fn hermite_lower(mut m: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let r = m.len();
    for col in (0..r).rev() {
        loop {
            let pivot =
                (0..=col).filter(|&i| m[i][col] != 0).min_by_key(|&i| m[i][col].abs()).expect("full rank lattice");
            m.swap(pivot, col);
            let mut done = true;
            for i in 0..col {
                let q = m[i][col].div_euclid(m[col][col]);
                if q != 0 {
                    let row = m[col].clone();
                    for (x, y) in m[i].iter_mut().zip(&row) {
                        *x -= q * y;
                    }
                }
                if m[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[col][col] < 0 {
            for x in m[col].iter_mut() {
                *x = -*x;
            }
        }
    }
    // Reduce entries left of the diagonal so the basis is canonical.
    for i in 0..r {
        for j in (0..i).rev() {
            let q = m[i][j].div_euclid(m[j][j]);
            if q != 0 {
                let row = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(&row) {
                    *x -= q * y;
                }
            }
        }
    }
    m
}

/// The finite group `P / K Q` in Dynkin labels.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    basis: Vec<Vec<i64>>,
    moduli: Vec<i64>,
    strides: Vec<usize>,
    size: usize,
}

impl LatticeQuotient {
    pub fn new(spec: &AlgebraSpec, shifted_level: u32) -> Result<Self> {
        let kk = shifted_level as i64;
        let gens = spec.cartan().iter().map(|row| row.iter().map(|x| x * kk).collect()).collect();
        let basis = hermite_lower(gens);
        let moduli: Vec<i64> = (0..spec.rank()).map(|i| basis[i][i]).collect();
        let required: u128 = moduli.iter().map(|&d| d as u128).product();
        let cap = spec.caps().hilbert;
        if required > cap {
            return Err(Error::CapExceeded { what: "hilbert space", required, cap });
        }
        let mut strides = vec![1usize; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1] as usize;
        }
        Ok(LatticeQuotient { basis, moduli, strides, size: required as usize })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    /// Canonical representative with `0 <= v_i < moduli[i]`.
    pub fn reduce(&self, w: &Weight) -> Weight {
        let mut v = w.labels().to_vec();
        for i in (0..v.len()).rev() {
            let q = v[i].div_euclid(self.moduli[i]);
            if q != 0 {
                for (x, y) in v.iter_mut().zip(&self.basis[i]) {
                    *x -= q * y;
                }
            }
        }
        Weight::new(v)
    }

    pub fn index(&self, w: &Weight) -> usize {
        self.reduce(w).labels().iter().zip(&self.strides).map(|(&x, &s)| x as usize * s).sum()
    }

    pub fn representative(&self, mut idx: usize) -> Weight {
        let mut v = Vec::with_capacity(self.moduli.len());
        for &s in &self.strides {
            v.push((idx / s) as i64);
            idx %= s;
        }
        Weight::new(v)
    }

    /// All canonical representatives in index order.
    pub fn representatives(&self) -> Vec<Weight> {
        (0..self.size).map(|i| self.representative(i)).collect()
    }
}

/// Canonical representatives of the variety residues at level `k`.
pub fn variety_points(spec: &AlgebraSpec, k: u32) -> Result<Vec<Weight>> {
    Ok(LatticeQuotient::new(spec, k + spec.dual_coxeter())?.representatives())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(n: usize) -> Self {
        StateVector { amplitudes: vec![Complex64::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut s = Self::zeros(n);
        s.amplitudes[i] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        StateVector {
            amplitudes: (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn axpy(&mut self, c: Complex64, other: &StateVector) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += c * b;
        }
    }
}

/// Operators built from clocks `a_j`, shifts `b_j` and the Fourier kernel,
/// applied without forming matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeOperator {
    /// `sum c * prod_j a_j^{n_j}`.
    Clock(Vec<(Weight, f64)>),
    /// `sum c * prod_j b_j^{v_j}`.
    Shift(Vec<(Weight, f64)>),
    /// `S` when `inverse` is false, `S^-1` otherwise.
    Fourier { inverse: bool },
    /// Product `A_0 A_1 ... A_n`; `A_n` acts first.
    Product(Vec<LatticeOperator>),
}

impl LatticeOperator {
    pub fn identity(rank: usize) -> Self {
        LatticeOperator::Shift(vec![(Weight::zero(rank), 1.0)])
    }

    pub fn clock(rank: usize, j: usize, power: i64) -> Self {
        LatticeOperator::Clock(vec![(Weight::unit(rank, j).scale(power), 1.0)])
    }

    pub fn shift(rank: usize, j: usize, power: i64) -> Self {
        LatticeOperator::Shift(vec![(Weight::unit(rank, j).scale(power), 1.0)])
    }

    pub fn then(self, first: LatticeOperator) -> Self {
        LatticeOperator::Product(vec![self, first])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorBasis {
    A,
    B,
}

/// The Gaussian model at level `k` of a simply-laced algebra.
#[derive(Clone, Debug)]
pub struct GaussianModel {
    spec: AlgebraSpec,
    k: u32,
    shifted_level: u32,
    quotient: LatticeQuotient,
    /// `q C^-1` as integers, `q` the inverse denominator.
    scaled_inverse: Vec<Vec<i64>>,
    /// Roots of unity of order `q K`.
    roots: Vec<Complex64>,
}

pub fn build_model(spec: &AlgebraSpec, k: u32) -> Result<GaussianModel> {
    GaussianModel::build(spec, k)
}

impl GaussianModel {
    pub fn build(spec: &AlgebraSpec, k: u32) -> Result<Self> {
        if !spec.is_simply_laced() {
            return Err(Error::NotSimplyLaced("gaussian model"));
        }
        let shifted_level = k + spec.dual_coxeter();
        let quotient = LatticeQuotient::new(spec, shifted_level)?;
        let q = spec.inverse_denominator();
        let scaled_inverse =
            spec.cartan_inverse().iter().map(|row| row.iter().map(|x| (x * q).to_integer()).collect()).collect();
        let order = (q * shifted_level as i64) as usize;
        let roots = (0..order)
            .map(|n| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * n as f64 / order as f64))
            .collect();
        Ok(GaussianModel { spec: spec.clone(), k, shifted_level, quotient, scaled_inverse, roots })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn shifted_level(&self) -> u32 {
        self.shifted_level
    }

    pub fn quotient(&self) -> &LatticeQuotient {
        &self.quotient
    }

    pub fn dimension(&self) -> usize {
        self.quotient.size()
    }

    pub fn vacuum(&self) -> StateVector {
        StateVector::basis(self.dimension(), 0)
    }

    pub fn ket(&self, v: &Weight) -> StateVector {
        StateVector::basis(self.dimension(), self.quotient.index(v))
    }

    /// `exp(2 pi i n / (q K))`.
    fn root(&self, n: i64) -> Complex64 {
        self.roots[n.rem_euclid(self.roots.len() as i64) as usize]
    }

    /// `q C^-1 v`.
    fn dual(&self, v: &Weight) -> Vec<i64> {
        self.scaled_inverse.iter().map(|row| row.iter().zip(v.labels()).map(|(a, b)| a * b).sum()).collect()
    }

    /// Eigenvalue of `prod_j a_j^{n_j}` on `|v>`.
    pub fn clock_eigenvalue(&self, exponents: &Weight, v: &Weight) -> Complex64 {
        let d = self.dual(v);
        self.root(exponents.labels().iter().zip(&d).map(|(a, b)| a * b).sum())
    }

    pub fn apply(&self, op: &LatticeOperator, psi: &StateVector) -> StateVector {
        let n = self.dimension();
        match op {
            LatticeOperator::Clock(terms) => {
                let mut out = StateVector::zeros(n);
                for (idx, amp) in psi.amplitudes.iter().enumerate() {
                    if amp.is_zero() {
                        continue;
                    }
                    let v = self.quotient.representative(idx);
                    let f: Complex64 = terms.iter().map(|(e, c)| self.clock_eigenvalue(e, &v) * c).sum();
                    out.amplitudes[idx] = f * amp;
                }
                out
            }
            LatticeOperator::Shift(terms) => {
                let mut out = StateVector::zeros(n);
                for (idx, amp) in psi.amplitudes.iter().enumerate() {
                    if amp.is_zero() {
                        continue;
                    }
                    let v = self.quotient.representative(idx);
                    for (s, c) in terms {
                        out.amplitudes[self.quotient.index(&(&v + s))] += amp * c;
                    }
                }
                out
            }
            LatticeOperator::Fourier { inverse } => {
                let sign = if *inverse { 1 } else { -1 };
                let scale = 1.0 / (n as f64).sqrt();
                let duals: Vec<Vec<i64>> = (0..n).map(|i| self.dual(&self.quotient.representative(i))).collect();
                let reps: Vec<Weight> = self.quotient.representatives();
                let mut out = StateVector::zeros(n);
                for (i, d) in duals.iter().enumerate() {
                    let mut acc = Complex64::zero();
                    for (j, amp) in psi.amplitudes.iter().enumerate() {
                        if amp.is_zero() {
                            continue;
                        }
                        let e: i64 = d.iter().zip(reps[j].labels()).map(|(a, b)| a * b).sum();
                        acc += self.root(sign * e) * amp;
                    }
                    out.amplitudes[i] = acc * scale;
                }
                out
            }
            LatticeOperator::Product(ops) => {
                let mut cur = psi.clone();
                for o in ops.iter().rev() {
                    cur = self.apply(o, &cur);
                }
                cur
            }
        }
    }

    /// `|v> -> |w v>`.
    pub fn weyl_act(&self, w: &WeylElement, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dimension());
        for (idx, amp) in psi.amplitudes.iter().enumerate() {
            if !amp.is_zero() {
                let v = self.quotient.representative(idx);
                out.amplitudes[self.quotient.index(&w.apply(&v))] += amp;
            }
        }
        out
    }

    /// Maximum over `(m, j)` and test states of
    /// `|a_m b_j a_m^-1 b_j^-1 psi - exp(2 pi i (C^-1)_mj / K) psi|`.
    pub fn check_clock_commutator(&self) -> f64 {
        let r = self.spec.rank();
        let states = self.test_states();
        let mut worst = 0.0f64;
        for m in 0..r {
            for j in 0..r {
                let op = LatticeOperator::Product(vec![
                    LatticeOperator::clock(r, m, 1),
                    LatticeOperator::shift(r, j, 1),
                    LatticeOperator::clock(r, m, -1),
                    LatticeOperator::shift(r, j, -1),
                ]);
                let expected = self.root(self.scaled_inverse[m][j]);
                for s in &states {
                    let got = self.apply(&op, s);
                    let mut want = s.clone();
                    want.amplitudes.iter_mut().for_each(|a| *a *= expected);
                    worst = worst.max(got.distance(&want));
                }
            }
        }
        worst
    }

    /// Basis states (up to 64 of them) and one fixed pseudo-random state.
    fn test_states(&self) -> Vec<StateVector> {
        use rand::SeedableRng;
        let n = self.dimension();
        let mut out: Vec<StateVector> = (0..n.min(64)).map(|i| StateVector::basis(n, i)).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        out.push(StateVector::random(n, &mut rng));
        out
    }

    /// `(1/sqrt|W|) sum_w (-1)^w |w(r + rho)>`.
    pub fn primary_state(&self, r: &Weight) -> Result<StateVector> {
        self.spec.require_integrable(r, self.k)?;
        Ok(self.antisymmetrized(&(r + self.spec.rho())))
    }

    fn antisymmetrized(&self, lambda: &Weight) -> StateVector {
        let group = self.spec.weyl_group().expect("weyl group within caps");
        let scale = 1.0 / (group.len() as f64).sqrt();
        let mut out = StateVector::zeros(self.dimension());
        for w in group {
            let idx = self.quotient.index(&w.apply(lambda));
            out.amplitudes[idx] += Complex64::new(w.sign() as f64 * scale, 0.0);
        }
        out
    }

    /// `O_mu = sum_{v in Omega_mu} m_v prod_j x_j^{v_j}` for `x = a` or `b`.
    pub fn wilson_operator(&self, mu: &Weight, basis: OperatorBasis) -> Result<LatticeOperator> {
        let ws = weight_system(&self.spec, mu)?;
        let terms = ws.iter().map(|(w, m)| (w.clone(), m as f64)).collect();
        Ok(match basis {
            OperatorBasis::A => LatticeOperator::Clock(terms),
            OperatorBasis::B => LatticeOperator::Shift(terms),
        })
    }

    pub fn s_operator(&self) -> LatticeOperator {
        LatticeOperator::Fourier { inverse: false }
    }

    pub fn s_inverse_operator(&self) -> LatticeOperator {
        LatticeOperator::Fourier { inverse: true }
    }

    /// Maximum of `|S^-1 b_j S psi - a_j psi|` over `j` and test states.
    pub fn check_s_conjugation(&self) -> f64 {
        let r = self.spec.rank();
        let states = self.test_states();
        let mut worst = 0.0f64;
        for j in 0..r {
            let lhs = LatticeOperator::Product(vec![
                self.s_inverse_operator(),
                LatticeOperator::shift(r, j, 1),
                self.s_operator(),
            ]);
            let rhs = LatticeOperator::clock(r, j, 1);
            for s in &states {
                worst = worst.max(self.apply(&lhs, s).distance(&self.apply(&rhs, s)));
            }
        }
        worst
    }

    /// Maximum deviation of `<psi_r|psi_s>` from `delta_rs`.
    pub fn check_orthonormality(&self) -> Result<f64> {
        let ws = level_k_weights(&self.spec, self.k);
        let states: Vec<StateVector> = ws.iter().map(|r| self.primary_state(r)).collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - want).norm());
            }
        }
        Ok(worst)
    }

    /// `<gamma|S^-1|psi_mu>`.
    pub fn character_as_inner_product(&self, gamma: &Weight, mu: &Weight) -> Result<Complex64> {
        let psi = self.primary_state(mu)?;
        let out = self.apply(&self.s_inverse_operator(), &psi);
        Ok(out.amplitudes[self.quotient.index(gamma)])
    }

    /// The same quantity from the alternating sum:
    /// `D_{mu+rho}(gamma) / sqrt(|Lambda| |W|)`.
    pub fn character_from_denominator(&self, gamma: &Weight, mu: &Weight) -> Result<Complex64> {
        let p = EvalPoint::variety(&self.spec, gamma.clone(), self.k);
        let d = eval_d(&self.spec, &(mu + self.spec.rho()), &p)?;
        let norm = (self.dimension() as f64 * self.spec.weyl_order() as f64).sqrt();
        Ok(d / norm)
    }

    /// Largest gap between the two sides above, over all states and
    /// integrable weights.
    pub fn check_character_inner_products(&self) -> Result<f64> {
        let sinv = self.s_inverse_operator();
        let mut worst = 0.0f64;
        for mu in level_k_weights(&self.spec, self.k) {
            let image = self.apply(&sinv, &self.primary_state(&mu)?);
            for (idx, got) in image.amplitudes.iter().enumerate() {
                let gamma = self.quotient.representative(idx);
                worst = worst.max((got - self.character_from_denominator(&gamma, &mu)?).norm());
            }
        }
        Ok(worst)
    }

    /// Largest `|O_mu w psi - w O_mu psi|` over Weyl elements, a few
    /// integrable `mu` and the test states.
    pub fn check_weyl_evenness(&self) -> Result<f64> {
        let group = self.spec.weyl_group()?;
        let states = self.test_states();
        let mut worst = 0.0f64;
        for mu in level_k_weights(&self.spec, self.k).iter().take(4) {
            for basis in [OperatorBasis::A, OperatorBasis::B] {
                let op = self.wilson_operator(mu, basis)?;
                for w in group {
                    for s in states.iter().rev().take(3) {
                        let a = self.apply(&op, &self.weyl_act(w, s));
                        let b = self.weyl_act(w, &self.apply(&op, s));
                        worst = worst.max(a.distance(&b));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Expands `O_mu(b) psi_nu` in the primary basis and rounds the
    /// coefficients.
    pub fn fusion_from_operators(&self, mu: &Weight, nu: &Weight) -> Result<DecompMap> {
        self.spec.require_integrable(mu, self.k)?;
        let image = self.apply(&self.wilson_operator(mu, OperatorBasis::B)?, &self.primary_state(nu)?);
        let mut residual = image.clone();
        let mut entries = Vec::new();
        for l in level_k_weights(&self.spec, self.k) {
            let psi = self.primary_state(&l)?;
            let c = psi.inner(&image);
            let n = c.re.round();
            if (c - n).norm() > OPERATOR_ROUNDING_GUARD || n < 0.0 {
                return Err(Error::OracleInconsistency(format!("coefficient of {l} in O_{mu} psi_{nu} is {c}")));
            }
            residual.axpy(-c, &psi);
            entries.push((l, n as u64));
        }
        let rest = residual.norm();
        if rest > OPERATOR_ROUNDING_GUARD {
            return Err(Error::OracleInconsistency(format!("O_{mu} psi_{nu} leaves the primary span by {rest}")));
        }
        Ok(DecompMap::from_entries(entries))
    }
}
