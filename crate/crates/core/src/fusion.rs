//! Tensor products (Racah-Speiser), level-k fusion (Kac-Walton folding of the
//! tensor product) and the Verlinde S-matrix oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Rational, SignedDominant, Weight};
use crate::characters::unit_phase;
use crate::error::{Error, Result};
use crate::weights::{weight_system, weyl_dimension};

/// Residual above which the Verlinde oracle refuses to round.
pub const ORACLE_ROUNDING_GUARD: f64 = 1e-6;

/// Serialized as a number for finite levels and as `"inf"` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "LevelRepr", try_from = "LevelRepr")]
pub enum Level {
    Finite(u32),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LevelRepr {
    Finite(u32),
    Named(String),
}

impl From<Level> for LevelRepr {
    fn from(l: Level) -> Self {
        match l {
            Level::Finite(k) => LevelRepr::Finite(k),
            Level::Infinite => LevelRepr::Named("inf".into()),
        }
    }
}

impl TryFrom<LevelRepr> for Level {
    type Error = Error;
    fn try_from(r: LevelRepr) -> Result<Self> {
        match r {
            LevelRepr::Finite(k) => Ok(Level::Finite(k)),
            LevelRepr::Named(s) => s.parse(),
        }
    }
}

impl Level {
    /// `K = k + c` for finite levels.
    pub fn shifted(self, spec: &AlgebraSpec) -> Option<u32> {
        match self {
            Level::Finite(k) => Some(k + spec.dual_coxeter()),
            Level::Infinite => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(k) => write!(f, "{k}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Level::Infinite),
            t => t.parse().map(Level::Finite).map_err(|_| Error::Parse(format!("bad level {t:?}"))),
        }
    }
}

/// Decomposition of a product into irreducibles: dominant weight to
/// nonnegative coefficient. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompMap {
    entries: BTreeMap<Weight, u64>,
}

impl DecompMap {
    pub fn from_entries<I: IntoIterator<Item = (Weight, u64)>>(it: I) -> Self {
        DecompMap { entries: it.into_iter().filter(|(_, n)| *n > 0).collect() }
    }

    fn from_signed(acc: HashMap<Weight, i64>, what: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (w, n) in acc {
            if n < 0 {
                return Err(Error::OracleInconsistency(format!("{what} produced negative coefficient {n} at {w}")));
            }
            if n > 0 {
                entries.insert(w, n as u64);
            }
        }
        Ok(DecompMap { entries })
    }

    pub fn get(&self, w: &Weight) -> u64 {
        self.entries.get(w).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &BTreeMap<Weight, u64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, u64)> {
        self.entries.iter().map(|(w, &n)| (w, n))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum_l N^l`.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// `sum_l (N^l)^2`.
    pub fn sum_squares(&self) -> u64 {
        self.entries.values().map(|n| n * n).sum()
    }

    /// `sum_l N^l dim(l)`.
    pub fn dimension_sum(&self, spec: &AlgebraSpec) -> Result<u128> {
        let mut acc = 0u128;
        for (w, n) in self.iter() {
            acc += n as u128 * weyl_dimension(spec, w)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for DecompMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(w, n)| format!("{w}:{n}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn require_dominant(spec: &AlgebraSpec, w: &Weight) -> Result<()> {
    spec.check_rank(w)?;
    if !w.is_dominant() {
        return Err(Error::NotDominant(w.labels().to_vec()));
    }
    Ok(())
}

/// Racah-Speiser: `mu (x) nu = sum_{mu' in Omega_mu} sign * [ (nu + mu' + rho)^+ - rho ]`.
pub fn tensor_decompose(spec: &AlgebraSpec, mu: &Weight, nu: &Weight) -> Result<DecompMap> {
    require_dominant(spec, mu)?;
    require_dominant(spec, nu)?;
    let ws = weight_system(spec, mu)?;
    let base = nu + spec.rho();
    let mut acc: HashMap<Weight, i64> = HashMap::new();
    for (w, m) in ws.iter() {
        let sd = spec.reflect_to_dominant(&(&base + w));
        if let Some(d) = sd.weight {
            *acc.entry(&d - spec.rho()).or_insert(0) += sd.sign as i64 * m as i64;
        }
    }
    DecompMap::from_signed(acc, "Racah-Speiser")
}

/// Signed reduction of `beta` into the open level-`K` alcove: simple
/// reflections at the lowest negative label, and the affine reflection
/// `beta -> beta + (K - (beta, theta)) theta` when `(beta, theta) > K`.
/// Any zero label or `(beta, theta) = K` is a wall.
pub fn affine_reflect_to_alcove(spec: &AlgebraSpec, beta: &Weight, shifted_level: u32) -> SignedDominant {
    let kk = shifted_level as i64;
    let theta = spec.highest_root();
    let mut b = beta.clone();
    let mut sign = 1i8;
    loop {
        if b.labels().contains(&0) {
            return SignedDominant::wall();
        }
        let lvl = spec.level_of(&b);
        if lvl == kk {
            return SignedDominant::wall();
        }
        if let Some(i) = b.labels().iter().position(|&x| x < 0) {
            b = spec.simple_reflection(i + 1, &b).expect("index in range");
            sign = -sign;
        } else if lvl > kk {
            b = &b + &theta.scale(kk - lvl);
            sign = -sign;
        } else {
            return SignedDominant { weight: Some(b), sign };
        }
    }
}

/// Level-k fusion coefficients by folding the tensor product into the alcove.
pub fn fuse_level_k(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, k: u32) -> Result<DecompMap> {
    spec.require_integrable(mu, k)?;
    spec.require_integrable(nu, k)?;
    let tensor = tensor_decompose(spec, mu, nu)?;
    let kk = k + spec.dual_coxeter();
    let mut acc: HashMap<Weight, i64> = HashMap::new();
    for (sigma, n) in tensor.iter() {
        let sd = affine_reflect_to_alcove(spec, &(sigma + spec.rho()), kk);
        if let Some(d) = sd.weight {
            *acc.entry(&d - spec.rho()).or_insert(0) += sd.sign as i64 * n as i64;
        }
    }
    let out = DecompMap::from_signed(acc, "Kac-Walton folding")?;
    debug_assert!(out.iter().all(|(w, _)| spec.is_integrable(w, k)));
    Ok(out)
}

/// Dispatches to [`tensor_decompose`] or [`fuse_level_k`].
pub fn fuse(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, level: Level) -> Result<DecompMap> {
    match level {
        Level::Infinite => tensor_decompose(spec, mu, nu),
        Level::Finite(k) => fuse_level_k(spec, mu, nu, k),
    }
}

/// All integrable weights at level `k`, ordered by `(lambda, theta)` and then
/// by labels compared from the last position.
pub fn level_k_weights(spec: &AlgebraSpec, k: u32) -> Vec<Weight> {
    let comarks = spec.comarks();
    let r = spec.rank();
    let mut out = Vec::new();
    let mut labels = vec![0i64; r];
    fn rec(i: usize, budget: i64, labels: &mut Vec<i64>, comarks: &[i64], out: &mut Vec<Weight>) {
        if i == labels.len() {
            out.push(Weight::new(labels.clone()));
            return;
        }
        let mut x = 0;
        while x * comarks[i] <= budget {
            labels[i] = x;
            rec(i + 1, budget - x * comarks[i], labels, comarks, out);
            x += 1;
        }
        labels[i] = 0;
    }
    rec(0, k as i64, &mut labels, comarks, &mut out);
    out.sort_by(|a, b| {
        spec.level_of(a).cmp(&spec.level_of(b)).then_with(|| a.labels().iter().rev().cmp(b.labels().iter().rev()))
    });
    out
}

/// Unit-normalized modular S-matrix on the integrable weights at level `k`.
#[derive(Clone, Debug)]
pub struct VerlindeOracle {
    k: u32,
    weights: Vec<Weight>,
    index: HashMap<Weight, usize>,
    s: Vec<Vec<Complex64>>,
}

impl VerlindeOracle {
    pub fn new(spec: &AlgebraSpec, k: u32) -> Result<Self> {
        let weights = level_k_weights(spec, k);
        let group = spec.weyl_group()?;
        let kk = Rational::from_integer((k + spec.dual_coxeter()) as i64);
        let shifted: Vec<Weight> = weights.iter().map(|w| w + spec.rho()).collect();
        let mut s = vec![vec![Complex64::zero(); weights.len()]; weights.len()];
        for (a, alpha) in shifted.iter().enumerate() {
            for (b, beta) in shifted.iter().enumerate() {
                let mut acc = Complex64::zero();
                for w in group {
                    let x = spec.inner_unchecked(&w.apply(alpha), beta) / kk;
                    acc += unit_phase(-x) * w.sign() as f64;
                }
                s[a][b] = acc;
            }
            let norm = s[a].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in s[a].iter_mut() {
                *z /= norm;
            }
        }
        let index = weights.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(VerlindeOracle { k, weights, index, s })
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn s_matrix(&self) -> &[Vec<Complex64>] {
        &self.s
    }

    fn idx(&self, w: &Weight) -> Result<usize> {
        self.index.get(w).copied().ok_or_else(|| Error::NotIntegrable { weight: w.labels().to_vec(), level: self.k })
    }

    /// Unrounded `sum_sigma S_mu,sigma S_nu,sigma conj(S_lambda,sigma) / S_0,sigma`.
    pub fn raw(&self, mu: &Weight, nu: &Weight, lambda: &Weight) -> Result<Complex64> {
        let (m, n, l) = (self.idx(mu)?, self.idx(nu)?, self.idx(lambda)?);
        let vac = 0;
        Ok((0..self.weights.len()).map(|s| self.s[m][s] * self.s[n][s] * self.s[l][s].conj() / self.s[vac][s]).sum())
    }

    pub fn coefficient(&self, mu: &Weight, nu: &Weight, lambda: &Weight) -> Result<u64> {
        let v = self.raw(mu, nu, lambda)?;
        let rounded = v.re.round();
        let residual = (v - Complex64::new(rounded, 0.0)).norm();
        if residual > ORACLE_ROUNDING_GUARD || rounded < 0.0 {
            return Err(Error::OracleInconsistency(format!(
                "Verlinde N_{{{mu},{nu}}}^{lambda} = {v} (residual {residual:e})"
            )));
        }
        Ok(rounded as u64)
    }

    /// Full fusion product `mu x nu` read off the oracle.
    pub fn product(&self, mu: &Weight, nu: &Weight) -> Result<DecompMap> {
        let mut entries = Vec::new();
        for l in &self.weights {
            entries.push((l.clone(), self.coefficient(mu, nu, l)?));
        }
        Ok(DecompMap::from_entries(entries))
    }
}

/// Single Verlinde coefficient `N_{mu nu}^lambda` at level `k`.
pub fn verlinde_n(spec: &AlgebraSpec, mu: &Weight, nu: &Weight, lambda: &Weight, k: u32) -> Result<u64> {
    for w in [mu, nu, lambda] {
        spec.require_integrable(w, k)?;
    }
    VerlindeOracle::new(spec, k)?.coefficient(mu, nu, lambda)
}
