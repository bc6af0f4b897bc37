//! Root-lattice theta functions
//!
//! `Theta_{gamma,K}(tau, u) = sum_{alpha in Q} exp(i pi K tau |alpha + gamma/K|^2
//!                                              + 2 pi i K (alpha + gamma/K, u))`
//!
//! for simply-laced algebras, with `u` a complex vector in Dynkin-label
//! coordinates paired through the quadratic form. Includes the Weyl
//! (anti)symmetrizations, Kac-Weyl characters at finite `tau` and residual
//! checks of the `T` transformation and the heat equation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{AlgebraSpec, Weight};
use crate::characters::{EvalPoint, SINGULAR_THRESHOLD};
use crate::error::{Error, Result};
use crate::fusion::fuse_level_k;
use crate::identity::VerificationReport;
use crate::weights::weight_system;

pub const DEFAULT_EPSILON: f64 = 1e-12;
/// Largest enumeration box for a single theta sum.
pub const MAX_LATTICE_POINTS: u128 = 4_000_000;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Evaluation data for `Theta_{gamma,K}(tau, u)`.
#[derive(Clone, Debug)]
pub struct ThetaContext<'a> {
    spec: &'a AlgebraSpec,
    level: u32,
    tau: Complex64,
    u: Vec<Complex64>,
    epsilon: f64,
    radius: f64,
}

impl<'a> ThetaContext<'a> {
    pub fn new(spec: &'a AlgebraSpec, level: u32, tau: Complex64, u: Vec<Complex64>) -> Result<Self> {
        Self::with_epsilon(spec, level, tau, u, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(
        spec: &'a AlgebraSpec,
        level: u32,
        tau: Complex64,
        u: Vec<Complex64>,
        epsilon: f64,
    ) -> Result<Self> {
        if !spec.is_simply_laced() {
            return Err(Error::NotSimplyLaced("theta functions"));
        }
        if !(tau.im > 0.0) {
            return Err(Error::InvalidTau(tau.im));
        }
        if u.len() != spec.rank() {
            return Err(Error::RankMismatch { expected: spec.rank(), got: u.len() });
        }
        if level == 0 {
            return Err(Error::Parse("theta level must be positive".into()));
        }
        let mut ctx = ThetaContext { spec, level, tau, u, epsilon, radius: 0.0 };
        ctx.radius = ctx.required_radius();
        Ok(ctx)
    }

    /// Same algebra, level and epsilon at another `(tau, u)`.
    pub fn at(&self, tau: Complex64, u: Vec<Complex64>) -> Result<Self> {
        Self::with_epsilon(self.spec, self.level, tau, u, self.epsilon)
    }

    /// Overrides the truncation radius.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn spec(&self) -> &AlgebraSpec {
        self.spec
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn u(&self) -> &[Complex64] {
        &self.u
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Distance (in the quadratic form) from the Gaussian centre beyond which
    /// lattice terms are dropped.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn gaussian_width(&self) -> f64 {
        PI * self.level as f64 * self.tau.im
    }

    /// `-Im(u) / Im(tau)`, the maximum of the term moduli.
    fn centre(&self) -> Vec<f64> {
        self.u.iter().map(|z| -z.im / self.tau.im).collect()
    }

    /// `log` of the largest term modulus, `pi K |Im u|^2 / Im tau`.
    fn log_peak(&self) -> f64 {
        let g = self.spec.quad_form_f64();
        let v: Vec<f64> = self.u.iter().map(|z| z.im).collect();
        let mut q = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                q += v[i] * g[i][j] * v[j];
            }
        }
        PI * self.level as f64 * q / self.tau.im
    }

    /// Upper bound for the moduli of all terms at distance `>= r` from the
    /// centre. Shifted root-lattice points are at least `sqrt 2` apart, so a
    /// ball of radius `t` holds at most `(sqrt(2) t + 1)^rank` of them.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let a = self.gaussian_width();
        let rank = self.spec.rank() as i32;
        let lp = self.log_peak();
        let width = (0.5 / a.sqrt()).max(1.0);
        let mut total = 0.0;
        let mut lo = r;
        loop {
            let count = (std::f64::consts::SQRT_2 * (lo + width) + 1.0).powi(rank);
            let term = (count.ln() - a * lo * lo + lp).exp();
            total += term;
            if term < 1e-40 || (lo > r + 4.0 * width && term < total * 1e-18) {
                break;
            }
            lo += width;
        }
        total
    }

    fn required_radius(&self) -> f64 {
        let a = self.gaussian_width();
        let floor = ((self.log_peak() - self.epsilon.ln()) / a).max(0.0).sqrt();
        let step = (floor / 200.0).max(0.25);
        let mut r = floor.max(0.5);
        while self.tail_bound(r) >= self.epsilon {
            r += step;
        }
        r
    }

    /// Shifted lattice points `alpha + gamma/K` within the truncation radius,
    /// ordered by `|alpha|^2`, then lexicographically in root coordinates.
    fn lattice_points(&self, gamma: &Weight) -> Result<Vec<Vec<f64>>> {
        let r = self.spec.rank();
        let kk = self.level as f64;
        let c = self.spec.cartan();
        let g = self.spec.quad_form_f64();
        let x0 = self.centre();
        let shift: Vec<f64> = gamma.labels().iter().map(|&x| x as f64 / kk).collect();
        // Root coordinates n with x = C^T n + gamma/K; the centre sits at n0.
        let ct = DMatrix::from_fn(r, r, |i, j| c[j][i] as f64);
        let rhs = DVector::from_fn(r, |i, _| x0[i] - shift[i]);
        let n0 = ct.clone().lu().solve(&rhs).expect("Cartan matrix is invertible");
        let cm = DMatrix::from_fn(r, r, |i, j| c[i][j] as f64);
        let lambda_min = SymmetricEigen::new(cm).eigenvalues.min();
        let half = self.radius / lambda_min.sqrt();
        let lo: Vec<i64> = (0..r).map(|i| (n0[i] - half).ceil() as i64).collect();
        let hi: Vec<i64> = (0..r).map(|i| (n0[i] + half).floor() as i64).collect();
        let mut required: u128 = 1;
        for i in 0..r {
            required = required.saturating_mul((hi[i] - lo[i] + 1).max(0) as u128);
        }
        if required > MAX_LATTICE_POINTS {
            return Err(Error::RadiusOverflow { required, cap: MAX_LATTICE_POINTS });
        }
        let r2 = self.radius * self.radius;
        let mut keyed: Vec<(i64, Vec<i64>, Vec<f64>)> = Vec::new();
        if required == 0 {
            return Ok(Vec::new());
        }
        let mut n = lo.clone();
        loop {
            let x: Vec<f64> =
                (0..r).map(|j| (0..r).map(|i| n[i] as f64 * c[i][j] as f64).sum::<f64>() + shift[j]).collect();
            let mut d2 = 0.0;
            for i in 0..r {
                for j in 0..r {
                    d2 += (x[i] - x0[i]) * g[i][j] * (x[j] - x0[j]);
                }
            }
            if d2 <= r2 {
                let mut norm = 0i64;
                for i in 0..r {
                    for j in 0..r {
                        norm += n[i] * c[i][j] * n[j];
                    }
                }
                keyed.push((norm, n.clone(), x));
            }
            let mut i = r;
            loop {
                if i == 0 {
                    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
                    return Ok(keyed.into_iter().map(|(_, _, x)| x).collect());
                }
                i -= 1;
                if n[i] < hi[i] {
                    n[i] += 1;
                    break;
                }
                n[i] = lo[i];
            }
        }
    }

    /// Sum over prepared points at an arbitrary `(tau, u)`.
    fn sum_points(&self, points: &[Vec<f64>], tau: Complex64, u: &[Complex64]) -> Complex64 {
        let g = self.spec.quad_form_f64();
        let kk = self.level as f64;
        let r = self.spec.rank();
        let gu: Vec<Complex64> = (0..r).map(|i| (0..r).map(|j| u[j] * g[i][j]).sum()).collect();
        let mut acc = Complex64::zero();
        for x in points {
            let mut q = 0.0;
            for i in 0..r {
                for j in 0..r {
                    q += x[i] * g[i][j] * x[j];
                }
            }
            let l: Complex64 = x.iter().zip(&gu).map(|(a, b)| b * *a).sum();
            acc += (I * PI * kk * tau * q + 2.0 * PI * I * kk * l).exp();
        }
        acc
    }
}

/// `Theta_{gamma,K}(tau, u)`, truncated to the context radius.
pub fn theta_sum(ctx: &ThetaContext, gamma: &Weight) -> Result<Complex64> {
    ctx.spec.check_rank(gamma)?;
    let pts = ctx.lattice_points(gamma)?;
    Ok(ctx.sum_points(&pts, ctx.tau, &ctx.u))
}

/// `sum_w (parity)^w Theta_{w gamma, K}`; `parity` is `1` or `-1`.
pub fn theta_weyl(ctx: &ThetaContext, gamma: &Weight, parity: i8) -> Result<Complex64> {
    ctx.spec.check_rank(gamma)?;
    let mut acc = Complex64::zero();
    for w in ctx.spec.weyl_group()? {
        let s = if parity < 0 { w.sign() as f64 } else { 1.0 };
        acc += theta_sum(ctx, &w.apply(gamma))? * s;
    }
    Ok(acc)
}

/// `Theta^-_{mu+rho,K} / Theta^-_{rho,K}` with `K` the context level.
pub fn kac_weyl_char(ctx: &ThetaContext, mu: &Weight) -> Result<Complex64> {
    ctx.spec.check_rank(mu)?;
    let rho = ctx.spec.rho();
    let den = theta_weyl(ctx, rho, -1)?;
    if den.norm() < SINGULAR_THRESHOLD {
        return Err(Error::SingularPoint { magnitude: den.norm(), wall: Vec::new() });
    }
    Ok(theta_weyl(ctx, &(mu + rho), -1)? / den)
}

/// `|Theta(tau + 1) - exp(i pi |gamma|^2 / K) Theta(tau)|`.
pub fn check_t_transform(ctx: &ThetaContext, gamma: &Weight) -> Result<f64> {
    ctx.spec.check_rank(gamma)?;
    let pts = ctx.lattice_points(gamma)?;
    let norm = ctx.spec.inner_product(gamma, gamma)? / crate::algebra::Rational::from_integer(ctx.level as i64);
    let phase = crate::characters::unit_phase(norm / crate::algebra::Rational::from_integer(2));
    let shifted = ctx.sum_points(&pts, ctx.tau + 1.0, &ctx.u);
    let base = ctx.sum_points(&pts, ctx.tau, &ctx.u);
    Ok((shifted - phase * base).norm())
}

/// Residual of `(Laplacian_u - 4 pi i K d/dtau) Theta = 0` with central
/// differences of step `h`. The Laplacian is `sum (G^-1)_ij d_i d_j`.
pub fn check_heat_equation(ctx: &ThetaContext, gamma: &Weight, h: f64) -> Result<f64> {
    ctx.spec.check_rank(gamma)?;
    // Real shifts of tau and u leave the truncation set unchanged.
    let pts = ctx.lattice_points(gamma)?;
    let ginv = ctx.spec.quad_form_inverse_f64();
    let r = ctx.spec.rank();
    let f = |du: &[(usize, f64)]| {
        let mut u = ctx.u.clone();
        for &(i, d) in du {
            u[i] += d;
        }
        ctx.sum_points(&pts, ctx.tau, &u)
    };
    let centre = f(&[]);
    let mut lap = Complex64::zero();
    for i in 0..r {
        for j in 0..r {
            if ginv[i][j] == 0.0 {
                continue;
            }
            let d2 = if i == j {
                (f(&[(i, h)]) - centre * 2.0 + f(&[(i, -h)])) / (h * h)
            } else {
                (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)]) + f(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            };
            lap += d2 * ginv[i][j];
        }
    }
    let dtau = (ctx.sum_points(&pts, ctx.tau + h, &ctx.u) - ctx.sum_points(&pts, ctx.tau - h, &ctx.u)) / (2.0 * h);
    Ok((lap - 4.0 * PI * I * ctx.level as f64 * dtau).norm())
}

/// `residual(h) / residual(h/2)`; close to 4 in the convergent regime.
pub fn heat_convergence_ratio(ctx: &ThetaContext, gamma: &Weight, h: f64) -> Result<f64> {
    Ok(check_heat_equation(ctx, gamma, h)? / check_heat_equation(ctx, gamma, h / 2.0)?)
}

/// A 3 x 3 grid of `(tau, u)`: `Im tau` in `{0.5, 1, 2}` against three
/// fixed `u` vectors.
pub fn standard_grid(rank: usize) -> Vec<(Complex64, Vec<Complex64>)> {
    let taus = [Complex64::new(0.1, 0.5), Complex64::new(-0.2, 1.0), Complex64::new(0.3, 2.0)];
    let us: Vec<Vec<Complex64>> = (0..3)
        .map(|s| {
            (0..rank).map(|i| Complex64::new(0.05 + 0.11 * (s + i) as f64, 0.03 * s as f64 - 0.02 * i as f64)).collect()
        })
        .collect();
    let mut out = Vec::new();
    for t in taus {
        for u in &us {
            out.push((t, u.clone()));
        }
    }
    out
}

/// Numerator form of the weight-shifted identity at finite `tau`:
/// `sum_{mu'} m_{mu'} Theta^-_{mu'+nu+rho} = sum_l N^l Theta^-_{l+rho}` at
/// `K = k + c`.
pub fn verify_kw_identity(
    spec: &AlgebraSpec,
    mu: &Weight,
    nu: &Weight,
    k: u32,
    grid: &[(Complex64, Vec<Complex64>)],
    tolerance: f64,
) -> Result<VerificationReport> {
    let decomp = fuse_level_k(spec, mu, nu, k)?;
    let ws = weight_system(spec, mu)?;
    let kk = k + spec.dual_coxeter();
    let base = nu + spec.rho();
    let mut samples = Vec::with_capacity(grid.len());
    for (tau, u) in grid {
        let ctx = ThetaContext::new(spec, kk, *tau, u.clone())?;
        let mut lhs = Complex64::zero();
        for (w, m) in ws.iter() {
            lhs += theta_weyl(&ctx, &(&base + w), -1)? * m as f64;
        }
        let mut rhs = Complex64::zero();
        for (l, n) in decomp.iter() {
            rhs += theta_weyl(&ctx, &(l + spec.rho()), -1)? * n as f64;
        }
        let label = format!(
            "tau={}{:+}i;u=[{}]",
            tau.re,
            tau.im,
            u.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(",")
        );
        samples.push((label, lhs, rhs));
    }
    Ok(VerificationReport::from_samples(format!("theta:{}:k={k}:mu={mu}:nu={nu}", spec.name()), tolerance, samples))
}

/// One-dimensional level-`k` su(2) numerator for spin label `j`:
/// `sum_n [e(K tau (n+b)^2 + K u (n+b)) - e(K tau (n-b)^2 + K u (n-b))]` with
/// `e(x) = exp(2 pi i x)`, `b = (j+1)/(2K)` and `K = k + 2`.
pub fn su2_numerator_closed(j: i64, k: u32, tau: Complex64, u: Complex64, epsilon: f64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidTau(tau.im));
    }
    let kk = (k + 2) as f64;
    let b = (j + 1) as f64 / (2.0 * kk);
    let a = 2.0 * PI * kk * tau.im;
    // |term| = exp(-a (t - t0)^2 + a t0^2) with t = n +- b.
    let t0 = -u.im / (2.0 * tau.im);
    let reach = (t0 * t0 + (100.0 / epsilon).ln() / a).sqrt() + 1.0;
    let lo = (t0 - reach - b.abs()).floor() as i64;
    let hi = (t0 + reach + b.abs()).ceil() as i64;
    let mut ns: Vec<i64> = (lo..=hi).collect();
    ns.sort_by(|x, y| {
        let dx = (*x as f64 - t0).abs();
        let dy = (*y as f64 - t0).abs();
        dx.total_cmp(&dy).then(x.cmp(y))
    });
    let term = |t: f64| (2.0 * PI * I * (kk * tau * t * t + kk * u * t)).exp();
    let mut acc = Complex64::zero();
    for n in ns {
        let n = n as f64;
        acc += term(n + b) - term(n - b);
    }
    Ok(acc)
}

/// Ratio of [`su2_numerator_closed`] at `j` and at `0`.
pub fn su2_character_closed(j: i64, k: u32, tau: Complex64, u: Complex64, epsilon: f64) -> Result<Complex64> {
    let den = su2_numerator_closed(0, k, tau, u, epsilon)?;
    if den.norm() < SINGULAR_THRESHOLD {
        return Err(Error::SingularPoint { magnitude: den.norm(), wall: Vec::new() });
    }
    Ok(su2_numerator_closed(j, k, tau, u, epsilon)? / den)
}

/// Generic evaluation point matching the `tau -> i infinity` limit of the
/// Kac-Weyl character at `u`: `exp((r, 2 pi i u))`.
pub fn limit_point(u: &[Complex64]) -> EvalPoint {
    EvalPoint::generic(u.iter().map(|z| z * 2.0 * PI * I).collect())
}
