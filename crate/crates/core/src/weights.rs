//! Weight systems of irreducible representations via Freudenthal's recursion.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::Zero;

use crate::algebra::{AlgebraSpec, Rational, Weight};
use crate::error::{Error, Result};

/// The multiset of weights `Omega_mu` of the irreducible representation `mu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    highest: Weight,
    entries: BTreeMap<Weight, u64>,
}

impl WeightSystem {
    pub fn highest(&self) -> &Weight {
        &self.highest
    }

    pub fn entries(&self) -> &BTreeMap<Weight, u64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, u64)> {
        self.entries.iter().map(|(w, &m)| (w, m))
    }

    pub fn multiplicity(&self, w: &Weight) -> u64 {
        self.entries.get(w).copied().unwrap_or(0)
    }

    /// Number of distinct weights.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of multiplicities.
    pub fn dimension(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Sum of squared multiplicities.
    pub fn mult_sum_squares(&self) -> u64 {
        self.entries.values().map(|m| m * m).sum()
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Weyl dimension formula `prod_{alpha>0} (mu+rho, alpha) / (rho, alpha)`.
///
/// Saturates at `u128::MAX` if intermediate products overflow.
pub fn weyl_dimension(spec: &AlgebraSpec, mu: &Weight) -> Result<u128> {
    spec.check_rank(mu)?;
    let shifted = mu + spec.rho();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for root in spec.positive_roots() {
        let a = spec.inner_product(&shifted, &root.labels)?;
        let b = spec.inner_product(spec.rho(), &root.labels)?;
        let f = a / b;
        if f <= Rational::zero() {
            return Ok(0);
        }
        let (n, d) = (*f.numer() as u128, *f.denom() as u128);
        let g1 = gcd_u128(n, den);
        let g2 = gcd_u128(d, num);
        let (n, d2) = (n / g1, den / g1);
        let (d, n2) = (d / g2, num / g2);
        num = match n2.checked_mul(n) {
            Some(v) => v,
            None => return Ok(u128::MAX),
        };
        den = match d2.checked_mul(d) {
            Some(v) => v,
            None => return Ok(u128::MAX),
        };
    }
    debug_assert_eq!(num % den, 0);
    Ok(num / den)
}

fn require_dominant(spec: &AlgebraSpec, mu: &Weight) -> Result<()> {
    spec.check_rank(mu)?;
    if !mu.is_dominant() {
        return Err(Error::NotDominant(mu.labels().to_vec()));
    }
    Ok(())
}

/// Dominant weights of the representation `mu` with their multiplicities.
pub fn dominant_multiplicities(spec: &AlgebraSpec, mu: &Weight) -> Result<Vec<(Weight, u64)>> {
    require_dominant(spec, mu)?;
    let dim = weyl_dimension(spec, mu)?;
    let cap = spec.caps().dim;
    if dim > cap {
        return Err(Error::CapExceeded { what: "representation dimension", required: dim, cap });
    }

    // Every dominant weight below mu is reachable from mu through a chain of
    // dominant weights, each step subtracting one positive root.
    let mut depth: HashMap<Weight, i64> = HashMap::new();
    depth.insert(mu.clone(), 0);
    let mut queue = VecDeque::from([mu.clone()]);
    while let Some(w) = queue.pop_front() {
        let d = depth[&w];
        for root in spec.positive_roots() {
            let next = &w - &root.labels;
            if next.is_dominant() && !depth.contains_key(&next) {
                depth.insert(next.clone(), d + root.height());
                queue.push_back(next);
            }
        }
    }
    let mut order: Vec<(Weight, i64)> = depth.into_iter().collect();
    order.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));

    let shifted_top = mu + spec.rho();
    let top_norm = spec.inner_unchecked(&shifted_top, &shifted_top);
    let mut mult: HashMap<Weight, u64> = HashMap::new();
    let lookup = |mult: &HashMap<Weight, u64>, w: &Weight| -> Option<u64> {
        let (dom, _) = spec.dominant_representative(w);
        mult.get(&dom).copied()
    };
    for (lambda, d) in &order {
        if *d == 0 {
            mult.insert(lambda.clone(), 1);
            continue;
        }
        let mut num = Rational::zero();
        for root in spec.positive_roots() {
            let mut j = 1;
            loop {
                let shifted = lambda + &root.labels.scale(j);
                match lookup(&mult, &shifted) {
                    Some(m) if m > 0 => {
                        let ip = spec.inner_unchecked(&shifted, &root.labels);
                        num += ip * Rational::from_integer(m as i64);
                    }
                    _ => break,
                }
                j += 1;
            }
        }
        num *= Rational::from_integer(2);
        let lr = lambda + spec.rho();
        let den = top_norm - spec.inner_unchecked(&lr, &lr);
        let m = num / den;
        debug_assert!(m.is_integer() && m >= Rational::zero(), "Freudenthal gave {m}");
        let m = m.to_integer();
        if m > 0 {
            mult.insert(lambda.clone(), m as u64);
        }
    }
    let mut out: Vec<(Weight, u64)> = mult.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Full weight system `Omega_mu` with exact multiplicities.
pub fn weight_system(spec: &AlgebraSpec, mu: &Weight) -> Result<WeightSystem> {
    let dominant = dominant_multiplicities(spec, mu)?;
    let mut entries = BTreeMap::new();
    for (lambda, m) in dominant {
        for (w, _) in spec.orbit_unchecked(&lambda) {
            entries.insert(w, m);
        }
    }
    Ok(WeightSystem { highest: mu.clone(), entries })
}

pub fn dimension(ws: &WeightSystem) -> u64 {
    ws.dimension()
}

pub fn mult_sum_squares(ws: &WeightSystem) -> u64 {
    ws.mult_sum_squares()
}

/// Conjugate representation `-w0(mu)`: the dominant representative of `-mu`.
pub fn conjugate(spec: &AlgebraSpec, mu: &Weight) -> Result<Weight> {
    require_dominant(spec, mu)?;
    Ok(spec.dominant_representative(&-mu).0)
}
