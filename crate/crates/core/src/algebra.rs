//! Cartan data and exact Weyl-group arithmetic for the simple Lie algebras.
//!
//! All weights are stored in the Dynkin-label (fundamental weight) basis. In
//! that basis the simple root `alpha_i` is row `i` of the Cartan matrix, so
//! simple reflections are integer operations. Inner products go through the
//! quadratic form `G = C^-1 * diag((alpha_i, alpha_i) / 2)` with long roots of
//! squared length 2.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Integer vector of Dynkin labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(labels: Vec<i64>) -> Self {
        Weight(labels)
    }

    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// Unit vector `e_j` (0-based index).
    pub fn unit(rank: usize, j: usize) -> Self {
        let mut v = vec![0; rank];
        v[j] = 1;
        Weight(v)
    }

    pub fn labels(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_strictly_dominant(&self) -> bool {
        self.0.iter().all(|&x| x > 0)
    }

    pub fn scale(&self, factor: i64) -> Weight {
        Weight(self.0.iter().map(|x| x * factor).collect())
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

impl<const N: usize> From<[i64; N]> for Weight {
    fn from(v: [i64; N]) -> Self {
        Weight(v.to_vec())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Parses comma-separated labels, e.g. `"1,0"`; parentheses are optional.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        trimmed
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| Error::Parse(format!("bad weight label {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Weight)
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        &self + &rhs
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        &self - &rhs
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|x| -x).collect())
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        -&self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Series> {
        Some(match c.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return None,
        })
    }
}

/// Resource limits. Exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub weyl_order: u128,
    pub dim: u128,
    pub hilbert: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { weyl_order: 1_000_000, dim: 100_000, hilbert: 1_000_000 }
    }
}

/// A positive root, in simple-root coordinates and in Dynkin labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub coeffs: Vec<i64>,
    pub labels: Weight,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

/// Weyl group element as an integer matrix acting on row vectors of labels.
#[derive(Clone, Debug)]
pub struct WeylElement {
    matrix: Vec<Vec<i64>>,
    sign: i8,
}

impl WeylElement {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        let r = self.matrix.len();
        let mut out = vec![0i64; r];
        for (l, &x) in w.labels().iter().enumerate() {
            if x != 0 {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += x * self.matrix[l][j];
                }
            }
        }
        Weight(out)
    }

    /// Applies the same linear map to a real or complex coordinate vector.
    pub fn apply_vec<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + Zero + std::ops::Mul<f64, Output = T>,
    {
        let r = self.matrix.len();
        let mut out = vec![T::zero(); r];
        for (l, &x) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.matrix[l][j];
                if m != 0 {
                    *o = *o + x * (m as f64);
                }
            }
        }
        out
    }
}

/// Result of reflecting a weight into the open dominant chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedDominant {
    pub weight: Option<Weight>,
    pub sign: i8,
}

impl SignedDominant {
    pub fn wall() -> Self {
        SignedDominant { weight: None, sign: 0 }
    }
}

/// Immutable description of a simple Lie algebra.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    series: Series,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    cartan_inverse: Vec<Vec<Rational>>,
    root_norms: Vec<Rational>,
    quad_form: Vec<Vec<Rational>>,
    rho: Weight,
    dual_coxeter: u32,
    highest_root: Weight,
    comarks: Vec<i64>,
    weyl_order: u128,
    positive_roots: Vec<Root>,
    caps: Caps,
    weyl_group: OnceLock<Vec<WeylElement>>,
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

fn symmetrized_form(series: Series, rank: usize) -> Result<Vec<Vec<Rational>>> {
    let invalid = |reason| Error::InvalidAlgebra { series: series.letter(), rank, reason };
    let n = rank;
    let mut b = vec![vec![Rational::zero(); n]; n];
    let r = |a: i64, d: i64| Rational::new(a, d);
    let link = |b: &mut Vec<Vec<Rational>>, i: usize, j: usize, v: Rational| {
        b[i][j] = v;
        b[j][i] = v;
    };
    match series {
        Series::A => {
            if n < 1 {
                return Err(invalid("A_n needs n >= 1"));
            }
            for i in 0..n {
                b[i][i] = r(2, 1);
            }
            for i in 0..n.saturating_sub(1) {
                link(&mut b, i, i + 1, r(-1, 1));
            }
        }
        Series::B => {
            if n < 2 {
                return Err(invalid("B_n needs n >= 2"));
            }
            for i in 0..n {
                b[i][i] = r(2, 1);
            }
            b[n - 1][n - 1] = r(1, 1);
            for i in 0..n - 1 {
                link(&mut b, i, i + 1, r(-1, 1));
            }
        }
        Series::C => {
            if n < 3 {
                return Err(invalid("C_n needs n >= 3"));
            }
            for i in 0..n {
                b[i][i] = r(1, 1);
            }
            b[n - 1][n - 1] = r(2, 1);
            for i in 0..n - 2 {
                link(&mut b, i, i + 1, r(-1, 2));
            }
            link(&mut b, n - 2, n - 1, r(-1, 1));
        }
        Series::D => {
            if n < 4 {
                return Err(invalid("D_n needs n >= 4"));
            }
            for i in 0..n {
                b[i][i] = r(2, 1);
            }
            for i in 0..n - 2 {
                link(&mut b, i, i + 1, r(-1, 1));
            }
            link(&mut b, n - 3, n - 1, r(-1, 1));
        }
        Series::E => {
            if !(6..=8).contains(&n) {
                return Err(invalid("E_n needs n in 6..=8"));
            }
            for i in 0..n {
                b[i][i] = r(2, 1);
            }
            // Bourbaki: 1-3-4-5-6-..., node 2 attached to node 4.
            link(&mut b, 0, 2, r(-1, 1));
            link(&mut b, 1, 3, r(-1, 1));
            for i in 2..n - 1 {
                link(&mut b, i, i + 1, r(-1, 1));
            }
        }
        Series::F => {
            if n != 4 {
                return Err(invalid("F_n exists only for n = 4"));
            }
            b[0][0] = r(2, 1);
            b[1][1] = r(2, 1);
            b[2][2] = r(1, 1);
            b[3][3] = r(1, 1);
            link(&mut b, 0, 1, r(-1, 1));
            link(&mut b, 1, 2, r(-1, 1));
            link(&mut b, 2, 3, r(-1, 2));
        }
        Series::G => {
            if n != 2 {
                return Err(invalid("G_n exists only for n = 2"));
            }
            b[0][0] = r(2, 3);
            b[1][1] = r(2, 1);
            link(&mut b, 0, 1, r(-1, 1));
        }
    }
    Ok(b)
}

fn weyl_order_table(series: Series, n: usize) -> u128 {
    let n128 = n as u128;
    match series {
        Series::A => factorial(n128 + 1),
        Series::B | Series::C => (1u128 << n) * factorial(n128),
        Series::D => (1u128 << (n - 1)) * factorial(n128),
        Series::E => match n {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        Series::F => 1_152,
        Series::G => 12,
    }
}

pub(crate) fn invert_rational(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).expect("Cartan matrix is nonsingular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * ac;
                    inv[r][j] -= f * ic;
                }
            }
        }
    }
    inv
}

fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Root> {
    let n = cartan.len();
    let labels_of = |coeffs: &[i64]| {
        let mut l = vec![0i64; n];
        for (i, &c) in coeffs.iter().enumerate() {
            for j in 0..n {
                l[j] += c * cartan[i][j];
            }
        }
        Weight(l)
    };
    let mut known: HashSet<Vec<i64>> = HashSet::new();
    let mut roots: Vec<Root> = Vec::new();
    for i in 0..n {
        let mut c = vec![0; n];
        c[i] = 1;
        known.insert(c.clone());
        roots.push(Root { labels: labels_of(&c), coeffs: c });
    }
    // Roots are appended in nondecreasing height, so a single pass suffices.
    let mut idx = 0;
    while idx < roots.len() {
        let beta = roots[idx].clone();
        for i in 0..n {
            let mut p = 0;
            let mut down = beta.coeffs.clone();
            loop {
                down[i] -= 1;
                if down[i] < 0 || !known.contains(&down) {
                    break;
                }
                p += 1;
            }
            let q = p - beta.labels.labels()[i];
            if q > 0 {
                let mut up = beta.coeffs.clone();
                up[i] += 1;
                if known.insert(up.clone()) {
                    roots.push(Root { labels: labels_of(&up), coeffs: up });
                }
            }
        }
        idx += 1;
    }
    roots
}

impl AlgebraSpec {
    /// Builds the Cartan data for `series` of the given rank.
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let form = symmetrized_form(series, rank)?;
        let n = rank;
        let root_norms: Vec<Rational> = (0..n).map(|i| form[i][i]).collect();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = form[i][j] * Rational::from_integer(2) / root_norms[j];
                        debug_assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        let cartan_rat: Vec<Vec<Rational>> =
            cartan.iter().map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect()).collect();
        let cartan_inverse = invert_rational(&cartan_rat);
        let quad_form: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| cartan_inverse[i][j] * root_norms[j] / Rational::from_integer(2)).collect())
            .collect();
        let roots = positive_roots(&cartan);
        let highest_root = roots.iter().max_by_key(|r| r.height()).expect("at least one root").labels.clone();
        let comarks: Vec<i64> = (0..n)
            .map(|i| {
                let v: Rational = (0..n).map(|j| quad_form[i][j] * Rational::from_integer(highest_root.0[j])).sum();
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect();
        let dual_coxeter = (comarks.iter().sum::<i64>() + 1) as u32;
        Ok(AlgebraSpec {
            series,
            rank,
            cartan,
            cartan_inverse,
            root_norms,
            quad_form,
            rho: Weight(vec![1; n]),
            dual_coxeter,
            highest_root,
            comarks,
            weyl_order: weyl_order_table(series, n),
            positive_roots: roots,
            caps: Caps::default(),
            weyl_group: OnceLock::new(),
        })
    }

    /// Parses names like `"A2"`, `"e6"`, `"G2"`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let mut chars = name.chars();
        let letter = chars.next().ok_or_else(|| Error::Parse("empty algebra name".into()))?;
        let series = Series::from_letter(letter).ok_or_else(|| Error::Parse(format!("unknown series {letter:?}")))?;
        let rank: usize = chars.as_str().parse().map_err(|_| Error::Parse(format!("bad rank in {name:?}")))?;
        AlgebraSpec::new(series, rank)
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.series.letter(), self.rank)
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn cartan_inverse(&self) -> &[Vec<Rational>] {
        &self.cartan_inverse
    }

    pub fn quad_form(&self) -> &[Vec<Rational>] {
        &self.quad_form
    }

    /// Squared lengths `(alpha_i, alpha_i)` of the simple roots.
    pub fn root_norms(&self) -> &[Rational] {
        &self.root_norms
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn dual_coxeter(&self) -> u32 {
        self.dual_coxeter
    }

    pub fn highest_root(&self) -> &Weight {
        &self.highest_root
    }

    /// `(omega_i, theta)` for each fundamental weight.
    pub fn comarks(&self) -> &[i64] {
        &self.comarks
    }

    pub fn weyl_order(&self) -> u128 {
        self.weyl_order
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.series, Series::A | Series::D | Series::E)
    }

    /// Simple root `alpha_i` in Dynkin labels (0-based index).
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight(self.cartan[i].clone())
    }

    pub fn check_rank(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank {
            Err(Error::RankMismatch { expected: self.rank, got: w.rank() })
        } else {
            Ok(())
        }
    }

    /// Exact `lambda^T G mu`.
    pub fn inner_product(&self, lambda: &Weight, mu: &Weight) -> Result<Rational> {
        self.check_rank(lambda)?;
        self.check_rank(mu)?;
        Ok(self.inner_unchecked(lambda, mu))
    }

    pub(crate) fn inner_unchecked(&self, lambda: &Weight, mu: &Weight) -> Rational {
        let mut acc = Rational::zero();
        for (i, &a) in lambda.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in mu.0.iter().enumerate() {
                if b != 0 {
                    acc += self.quad_form[i][j] * Rational::from_integer(a * b);
                }
            }
        }
        acc
    }

    /// `(lambda, theta)`, always an integer.
    pub fn level_of(&self, lambda: &Weight) -> i64 {
        lambda.0.iter().zip(&self.comarks).map(|(a, b)| a * b).sum()
    }

    pub fn is_integrable(&self, lambda: &Weight, k: u32) -> bool {
        lambda.is_dominant() && self.level_of(lambda) <= k as i64
    }

    pub(crate) fn require_integrable(&self, lambda: &Weight, k: u32) -> Result<()> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.0.clone()));
        }
        if !self.is_integrable(lambda, k) {
            return Err(Error::NotIntegrable { weight: lambda.0.clone(), level: k });
        }
        Ok(())
    }

    /// `s_i(lambda)` with 1-based `i`.
    pub fn simple_reflection(&self, i: usize, lambda: &Weight) -> Result<Weight> {
        if i == 0 || i > self.rank {
            return Err(Error::IndexOutOfRange { index: i, rank: self.rank });
        }
        self.check_rank(lambda)?;
        Ok(self.reflect0(i - 1, lambda))
    }

    pub(crate) fn reflect0(&self, i: usize, lambda: &Weight) -> Weight {
        let li = lambda.0[i];
        if li == 0 {
            return lambda.clone();
        }
        Weight(lambda.0.iter().zip(&self.cartan[i]).map(|(a, c)| a - li * c).collect())
    }

    /// Signed reduction into the open dominant chamber, reflecting at the
    /// lowest negative index each step. Any zero label is a wall.
    pub fn reflect_to_dominant(&self, beta: &Weight) -> SignedDominant {
        assert_eq!(beta.rank(), self.rank, "weight rank mismatch");
        let mut b = beta.clone();
        let mut sign = 1i8;
        loop {
            if b.0.contains(&0) {
                return SignedDominant::wall();
            }
            match b.0.iter().position(|&x| x < 0) {
                Some(i) => {
                    b = self.reflect0(i, &b);
                    sign = -sign;
                }
                None => return SignedDominant { weight: Some(b), sign },
            }
        }
    }

    /// Dominant Weyl representative (walls allowed) and the parity of the
    /// reflection word used to reach it.
    pub fn dominant_representative(&self, beta: &Weight) -> (Weight, i8) {
        let mut b = beta.clone();
        let mut sign = 1i8;
        while let Some(i) = b.0.iter().position(|&x| x < 0) {
            b = self.reflect0(i, &b);
            sign = -sign;
        }
        (b, sign)
    }

    /// All Weyl group elements, built once by closure on the orbit of `rho`.
    pub fn weyl_group(&self) -> Result<&[WeylElement]> {
        if self.weyl_order > self.caps.weyl_order {
            return Err(Error::CapExceeded {
                what: "Weyl group order",
                required: self.weyl_order,
                cap: self.caps.weyl_order,
            });
        }
        Ok(self.weyl_group.get_or_init(|| self.build_weyl_group()))
    }

    fn build_weyl_group(&self) -> Vec<WeylElement> {
        let n = self.rank;
        let identity: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let mut seen: HashMap<Weight, usize> = HashMap::new();
        let mut out = vec![WeylElement { matrix: identity, sign: 1 }];
        let mut images = vec![self.rho.clone()];
        seen.insert(self.rho.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(idx) = queue.pop_front() {
            for i in 0..n {
                let img = self.reflect0(i, &images[idx]);
                if seen.contains_key(&img) {
                    continue;
                }
                // w' = s_i o w, i.e. M' = M * S_i with S_i = I - e_i^T C_i.
                let m = &out[idx].matrix;
                let new_m: Vec<Vec<i64>> = m
                    .iter()
                    .map(|row| {
                        let ri = row[i];
                        row.iter().zip(&self.cartan[i]).map(|(x, c)| x - ri * c).collect()
                    })
                    .collect();
                seen.insert(img.clone(), out.len());
                out.push(WeylElement { matrix: new_m, sign: -out[idx].sign });
                images.push(img);
                queue.push_back(out.len() - 1);
            }
        }
        out
    }

    /// Orbit of `lambda` with the parity of the group element that produced
    /// each entry, relative to `lambda` itself. For weights on a wall the
    /// parity is not defined by the element alone (both parities occur), and
    /// every entry carries sign 0.
    pub fn weyl_orbit(&self, lambda: &Weight) -> Result<Vec<(Weight, i8)>> {
        self.check_rank(lambda)?;
        if self.weyl_order > self.caps.weyl_order {
            return Err(Error::CapExceeded {
                what: "Weyl group order",
                required: self.weyl_order,
                cap: self.caps.weyl_order,
            });
        }
        Ok(self.orbit_unchecked(lambda))
    }

    pub(crate) fn orbit_unchecked(&self, lambda: &Weight) -> Vec<(Weight, i8)> {
        let (dom, base_sign) = self.dominant_representative(lambda);
        let regular = dom.is_strictly_dominant();
        let mut depth: HashMap<Weight, usize> = HashMap::new();
        let mut order = vec![dom.clone()];
        depth.insert(dom.clone(), 0);
        let mut idx = 0;
        // Going down from the dominant element: reflecting at a positive label
        // always lowers the element, so the depth is the length of a reduced word.
        while idx < order.len() {
            let cur = order[idx].clone();
            let d = depth[&cur];
            for i in 0..self.rank {
                if cur.0[i] > 0 {
                    let next = self.reflect0(i, &cur);
                    if !depth.contains_key(&next) {
                        depth.insert(next.clone(), d + 1);
                        order.push(next);
                    }
                }
            }
            idx += 1;
        }
        order
            .into_iter()
            .map(|w| {
                let s = if regular {
                    let p: i8 = if depth[&w].is_multiple_of(2) { 1 } else { -1 };
                    p * base_sign
                } else {
                    0
                };
                (w, s)
            })
            .collect()
    }

    /// Smallest positive integer `q` with `q * C^-1` integral.
    pub fn inverse_denominator(&self) -> i64 {
        let mut q = 1i64;
        for row in &self.cartan_inverse {
            for x in row {
                q = num_integer_lcm(q, *x.denom());
            }
        }
        q
    }

    /// Exact `gamma^T C^-1 r`.
    pub fn cartan_pairing(&self, gamma: &Weight, r: &Weight) -> Rational {
        let mut acc = Rational::zero();
        for (i, &g) in gamma.0.iter().enumerate() {
            if g == 0 {
                continue;
            }
            for (j, &x) in r.0.iter().enumerate() {
                if x != 0 {
                    acc += self.cartan_inverse[i][j] * Rational::from_integer(g * x);
                }
            }
        }
        acc
    }

    pub fn quad_form_f64(&self) -> Vec<Vec<f64>> {
        self.quad_form.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect()).collect()
    }

    /// Inverse of the quadratic form, i.e. the metric used for Laplacians in
    /// Dynkin-label coordinates.
    pub fn quad_form_inverse_f64(&self) -> Vec<Vec<f64>> {
        invert_rational(&self.quad_form).iter().map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect()).collect()
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.abs()
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn a1_data() {
        let a1 = AlgebraSpec::new(Series::A, 1).unwrap();
        assert_eq!(a1.cartan(), &[vec![2]]);
        assert_eq!(a1.quad_form(), &[vec![r(1, 2)]]);
        assert_eq!(a1.dual_coxeter(), 2);
        assert_eq!(a1.rho(), &Weight::from([1]));
        assert_eq!(a1.highest_root(), &Weight::from([2]));
    }

    #[test]
    fn a2_data() {
        let a2 = AlgebraSpec::new(Series::A, 2).unwrap();
        assert_eq!(a2.cartan(), &[vec![2, -1], vec![-1, 2]]);
        assert_eq!(a2.dual_coxeter(), 3);
        assert_eq!(a2.highest_root(), &Weight::from([1, 1]));
        assert_eq!(a2.positive_roots().len(), 3);
    }

    #[test]
    fn dual_coxeter_table() {
        let table = [
            ("A1", 2),
            ("A4", 5),
            ("B2", 3),
            ("B3", 5),
            ("C3", 4),
            ("C4", 5),
            ("D4", 6),
            ("D5", 8),
            ("E6", 12),
            ("E7", 18),
            ("E8", 30),
            ("F4", 9),
            ("G2", 4),
        ];
        for (name, c) in table {
            assert_eq!(AlgebraSpec::parse(name).unwrap().dual_coxeter(), c, "{name}");
        }
    }

    #[test]
    fn root_counts() {
        let table =
            [("A3", 6), ("B3", 9), ("C3", 9), ("D4", 12), ("E6", 36), ("E7", 63), ("E8", 120), ("F4", 24), ("G2", 6)];
        for (name, n) in table {
            assert_eq!(AlgebraSpec::parse(name).unwrap().positive_roots().len(), n, "{name}");
        }
    }

    #[test]
    fn invalid_pairs_rejected() {
        for (s, n) in [
            (Series::A, 0),
            (Series::B, 1),
            (Series::C, 2),
            (Series::D, 3),
            (Series::E, 5),
            (Series::E, 9),
            (Series::F, 3),
            (Series::G, 3),
        ] {
            assert!(matches!(AlgebraSpec::new(s, n), Err(Error::InvalidAlgebra { .. })));
        }
    }

    #[test]
    fn inner_products() {
        let a1 = AlgebraSpec::parse("A1").unwrap();
        assert_eq!(a1.inner_product(&Weight::from([1]), &Weight::from([1])).unwrap(), r(1, 2));
        let a2 = AlgebraSpec::parse("A2").unwrap();
        assert_eq!(a2.inner_product(a2.rho(), a2.rho()).unwrap(), r(2, 1));
        assert_eq!(a2.inner_product(&Weight::from([3, -2]), &Weight::zero(2)).unwrap(), r(0, 1));
        assert!(matches!(a2.inner_product(&Weight::from([1]), &Weight::from([1, 0])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn theta_has_norm_two() {
        for name in ["A1", "A3", "B3", "C3", "D4", "E6", "F4", "G2"] {
            let s = AlgebraSpec::parse(name).unwrap();
            let t = s.highest_root().clone();
            assert_eq!(s.inner_product(&t, &t).unwrap(), r(2, 1), "{name}");
        }
    }

    #[test]
    fn quad_form_is_symmetric_and_ade_equals_inverse() {
        for name in ["A3", "B3", "C3", "D4", "E6", "F4", "G2"] {
            let s = AlgebraSpec::parse(name).unwrap();
            let g = s.quad_form();
            for i in 0..s.rank() {
                for j in 0..s.rank() {
                    assert_eq!(g[i][j], g[j][i], "{name}");
                }
            }
            if s.is_simply_laced() {
                assert_eq!(g, s.cartan_inverse(), "{name}");
            }
        }
    }

    #[test]
    fn g_times_c_maps_roots_to_labels() {
        // (alpha_i, omega_j) = delta_ij (alpha_i, alpha_i)/2, so sum_l C_il G_lj
        // must be the diagonal of half-norms.
        for name in ["A2", "B3", "C3", "G2", "F4"] {
            let s = AlgebraSpec::parse(name).unwrap();
            let n = s.rank();
            for i in 0..n {
                for j in 0..n {
                    let v: Rational =
                        (0..n).map(|l| Rational::from_integer(s.cartan()[i][l]) * s.quad_form()[l][j]).sum();
                    let expect = if i == j { s.root_norms()[i] / Rational::from_integer(2) } else { Rational::zero() };
                    assert_eq!(v, expect, "{name} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn reflections() {
        let a1 = AlgebraSpec::parse("A1").unwrap();
        assert_eq!(a1.simple_reflection(1, &Weight::from([3])).unwrap(), Weight::from([-3]));
        let a2 = AlgebraSpec::parse("A2").unwrap();
        assert_eq!(a2.simple_reflection(1, &Weight::from([1, 0])).unwrap(), Weight::from([-1, 1]));
        assert!(matches!(a2.simple_reflection(3, &Weight::from([1, 0])), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(a2.simple_reflection(0, &Weight::from([1, 0])), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn reflect_to_dominant_cases() {
        let a1 = AlgebraSpec::parse("A1").unwrap();
        assert_eq!(
            a1.reflect_to_dominant(&Weight::from([-3])),
            SignedDominant { weight: Some(Weight::from([3])), sign: -1 }
        );
        assert_eq!(a1.reflect_to_dominant(&Weight::from([0])), SignedDominant::wall());
        let a2 = AlgebraSpec::parse("A2").unwrap();
        assert_eq!(
            a2.reflect_to_dominant(&Weight::from([2, 1])),
            SignedDominant { weight: Some(Weight::from([2, 1])), sign: 1 }
        );
        // (-1, 2) -> s1 -> (1, 1).
        assert_eq!(
            a2.reflect_to_dominant(&Weight::from([-1, 2])),
            SignedDominant { weight: Some(Weight::from([1, 1])), sign: -1 }
        );
        // (-1, 1) -> s1 -> (1, 0): wall.
        assert_eq!(a2.reflect_to_dominant(&Weight::from([-1, 1])), SignedDominant::wall());
    }

    #[test]
    fn weyl_orders_match_orbit_of_rho() {
        for name in ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2"] {
            let s = AlgebraSpec::parse(name).unwrap();
            let orbit = s.weyl_orbit(s.rho()).unwrap();
            assert_eq!(orbit.len() as u128, s.weyl_order(), "{name}");
            assert_eq!(s.weyl_group().unwrap().len() as u128, s.weyl_order(), "{name}");
        }
    }

    #[test]
    fn orbit_examples() {
        let a1 = AlgebraSpec::parse("A1").unwrap();
        let o = a1.weyl_orbit(&Weight::from([1])).unwrap();
        assert_eq!(o, vec![(Weight::from([1]), 1), (Weight::from([-1]), -1)]);
        let a2 = AlgebraSpec::parse("A2").unwrap();
        assert_eq!(a2.weyl_orbit(a2.rho()).unwrap().len(), 6);
        let wall = a2.weyl_orbit(&Weight::from([1, 0])).unwrap();
        assert_eq!(wall.len(), 3);
        assert!(wall.iter().all(|(_, s)| *s == 0));
    }

    #[test]
    fn orbit_cap() {
        let e8 = AlgebraSpec::parse("E8").unwrap();
        match e8.weyl_orbit(e8.rho()) {
            Err(Error::CapExceeded { required, .. }) => assert_eq!(required, 696_729_600),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn group_elements_agree_with_orbit_signs() {
        let s = AlgebraSpec::parse("B3").unwrap();
        let lam = Weight::from([3, 1, 2]);
        let orbit: HashMap<Weight, i8> = s.weyl_orbit(&lam).unwrap().into_iter().collect();
        for w in s.weyl_group().unwrap() {
            assert_eq!(orbit[&w.apply(&lam)], w.sign());
        }
    }

    #[test]
    fn inverse_denominators() {
        assert_eq!(AlgebraSpec::parse("A1").unwrap().inverse_denominator(), 2);
        assert_eq!(AlgebraSpec::parse("A2").unwrap().inverse_denominator(), 3);
        assert_eq!(AlgebraSpec::parse("E8").unwrap().inverse_denominator(), 1);
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("1,0".parse::<Weight>().unwrap(), Weight::from([1, 0]));
        assert_eq!("(-2)".parse::<Weight>().unwrap(), Weight::from([-2]));
        assert!("1,x".parse::<Weight>().is_err());
    }
}
