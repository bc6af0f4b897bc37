//! Command-line front end. The binary only forwards `std::env::args` here so
//! the whole interface is testable in-process.
//!
//! Exit codes: 0 success, 1 resource cap exceeded, 2 usage error,
//! 3 verification failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Caps, Weight};
use crate::characters::random_regular_point;
use crate::csmodel::variety_points;
use crate::csmodel::GaussianModel;
use crate::error::{Error, Result};
use crate::fusion::{fuse, level_k_weights, DecompMap, Level, VerlindeOracle};
use crate::identity::{
    conjugacy_square_check, dim_bound, parseval_bound, scan_numerator_identity, verify_generic_identity,
    verify_lemma_weightsum, BoundCheck, VerificationReport, Witness, DEFAULT_TOLERANCE,
};
use crate::theta::{
    check_heat_equation, check_t_transform, heat_convergence_ratio, kac_weyl_char, standard_grid, theta_sum,
    theta_weyl, verify_kw_identity, ThetaContext,
};
use crate::weights::weight_system;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CAP: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

/// Environment variable overriding resource caps, e.g.
/// `weyl_order=1000000,dim=100000,hilbert=1000000`.
pub const CAPS_ENV: &str = "FUSIONKIT_CAPS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Suite {
    Identity,
    Lemma,
    Bounds,
    Conjugacy,
    Theta,
    Csmodel,
    All,
}

#[derive(Parser, Debug)]
#[command(name = "fusionkit", version, about = "Weight systems, fusion rules and character identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Residual tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Seed for random evaluation points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weight system of an irreducible representation.
    Weights {
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: Weight,
    },
    /// Tensor product (`--k inf`) or level-k fusion product.
    Fuse {
        algebra: String,
        #[arg(long, default_value = "inf")]
        k: Level,
        #[arg(long, allow_hyphen_values = true)]
        mu: Weight,
        #[arg(long, allow_hyphen_values = true)]
        nu: Weight,
        /// Cross-check against the Verlinde formula.
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite; one JSON object per case.
    Verify {
        algebra: String,
        #[arg(long)]
        k: Level,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Theta function values and residuals. The theta level is `k + c`.
    Theta {
        algebra: String,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<Weight>,
        /// Modular parameter, e.g. `0+1i`; may be repeated.
        #[arg(long, allow_hyphen_values = true, required = true)]
        tau: Vec<String>,
        /// Comma-separated complex vector; may be repeated.
        #[arg(long, allow_hyphen_values = true, required = true)]
        u: Vec<String>,
        /// Weyl-antisymmetrized sum.
        #[arg(long, conflicts_with = "sym")]
        antisym: bool,
        /// Weyl-symmetrized sum.
        #[arg(long)]
        sym: bool,
        /// Kac-Weyl character of `--mu` instead of a theta value.
        #[arg(long = "char", requires = "mu")]
        character: bool,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<Weight>,
        /// Finite-difference step for the heat-equation residual.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
}

/// Settings shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algebra: String,
    pub level: Level,
    pub tolerance: f64,
    pub caps: Caps,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(algebra: &str, level: Level) -> Self {
        RunConfig {
            algebra: algebra.to_string(),
            level,
            tolerance: DEFAULT_TOLERANCE,
            caps: Caps::default(),
            seed: 0,
            format: Format::Json,
            output: None,
        }
    }

    pub fn spec(&self) -> Result<AlgebraSpec> {
        Ok(AlgebraSpec::parse(&self.algebra)?.with_caps(self.caps))
    }
}

/// Parses `key=value` pairs for [`CAPS_ENV`] on top of the defaults.
pub fn parse_caps(s: &str) -> Result<Caps> {
    let mut caps = Caps::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad cap entry {part:?}")))?;
        let v: u128 = value.trim().parse().map_err(|_| Error::Parse(format!("bad cap value {value:?}")))?;
        if v == 0 {
            return Err(Error::Parse(format!("cap {key} must be positive")));
        }
        match key.trim() {
            "weyl_order" => caps.weyl_order = v,
            "dim" => caps.dim = v,
            "hilbert" => caps.hilbert = v,
            other => return Err(Error::Parse(format!("unknown cap {other:?}"))),
        }
    }
    Ok(caps)
}

/// Parses a comma-separated list of complex numbers such as `0.1,0.2+0.3i`.
pub fn parse_complex_vec(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(|t| parse_complex(t.trim())).collect()
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    Complex64::from_str(s).map_err(|_| Error::Parse(format!("bad complex number {s:?}")))
}

/// One line of `verify` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub algebra: String,
    pub k: Level,
    pub mu: Option<Weight>,
    pub nu: Option<Weight>,
    pub points_checked: u64,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

impl CaseRecord {
    fn from_report(
        spec: &AlgebraSpec,
        k: Level,
        mu: Option<&Weight>,
        nu: Option<&Weight>,
        r: VerificationReport,
    ) -> Self {
        CaseRecord {
            case_id: r.case_id,
            algebra: spec.name(),
            k,
            mu: mu.cloned(),
            nu: nu.cloned(),
            points_checked: r.points_checked,
            max_abs_residual: r.max_abs_residual,
            tolerance: r.tolerance,
            passed: r.passed,
            witnesses: r.witnesses,
        }
    }

    fn from_bound(case_id: String, spec: &AlgebraSpec, k: Level, mu: &Weight, nu: &Weight, b: BoundCheck) -> Self {
        let excess = b.lhs.saturating_sub(b.rhs) as f64;
        let witnesses = if b.passed {
            Vec::new()
        } else {
            vec![Witness { point: "lhs<=rhs".into(), lhs: [b.lhs as f64, 0.0], rhs: [b.rhs as f64, 0.0] }]
        };
        CaseRecord {
            case_id,
            algebra: spec.name(),
            k,
            mu: Some(mu.clone()),
            nu: Some(nu.clone()),
            points_checked: 1,
            max_abs_residual: excess,
            tolerance: 0.0,
            passed: b.passed,
            witnesses,
        }
    }

    fn scalar(case_id: String, spec: &AlgebraSpec, k: Level, residual: f64, tolerance: f64, points: u64) -> Self {
        let passed = residual <= tolerance;
        CaseRecord {
            case_id,
            algebra: spec.name(),
            k,
            mu: None,
            nu: None,
            points_checked: points,
            max_abs_residual: residual,
            tolerance,
            passed,
            witnesses: Vec::new(),
        }
    }

    fn failure(case_id: String, spec: &AlgebraSpec, k: Level, mu: &Weight, nu: &Weight, msg: String) -> Self {
        CaseRecord {
            case_id,
            algebra: spec.name(),
            k,
            mu: Some(mu.clone()),
            nu: Some(nu.clone()),
            points_checked: 0,
            max_abs_residual: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            witnesses: vec![Witness { point: msg, lhs: [0.0, 0.0], rhs: [0.0, 0.0] }],
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_cap() {
        EXIT_CAP
    } else if matches!(e, Error::OracleInconsistency(_)) {
        EXIT_FAILED
    } else {
        EXIT_USAGE
    }
}

fn require_finite(level: Level, what: &str) -> Result<u32> {
    match level {
        Level::Finite(k) => Ok(k),
        Level::Infinite => Err(Error::Parse(format!("suite {what} needs a finite level"))),
    }
}

/// Dominant weights used for pair scans: integrable ones at finite level,
/// those of level at most 2 otherwise.
fn scan_weights(spec: &AlgebraSpec, level: Level) -> Vec<Weight> {
    match level {
        Level::Finite(k) => level_k_weights(spec, k),
        Level::Infinite => level_k_weights(spec, 2),
    }
}

fn suite_identity(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    match cfg.level {
        Level::Finite(k) => {
            let ws = level_k_weights(spec, k);
            let reports = scan_numerator_identity(spec, k, cfg.tolerance)?;
            let mut out = Vec::new();
            let mut it = reports.into_iter();
            for mu in &ws {
                for nu in &ws {
                    let r = it.next().expect("one report per pair");
                    out.push(CaseRecord::from_report(spec, cfg.level, Some(mu), Some(nu), r));
                }
            }
            Ok(out)
        }
        Level::Infinite => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let ws = scan_weights(spec, cfg.level);
            let mut out = Vec::new();
            for mu in &ws {
                for nu in &ws {
                    let pts = (0..25).map(|_| random_regular_point(spec, &mut rng, 0.1)).collect::<Result<Vec<_>>>()?;
                    let r = verify_generic_identity(spec, mu, nu, &pts, cfg.tolerance)?;
                    out.push(CaseRecord::from_report(spec, cfg.level, Some(mu), Some(nu), r));
                }
            }
            Ok(out)
        }
    }
}

fn suite_lemma(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    let k = require_finite(cfg.level, "lemma")?;
    let gammas = variety_points(spec, k)?;
    let zero = Weight::zero(spec.rank());
    let mut out = Vec::new();
    for mu in level_k_weights(spec, k) {
        let mut r = verify_lemma_weightsum(spec, &mu, k, &gammas)?;
        r.passed = r.max_abs_residual <= cfg.tolerance;
        r.tolerance = cfg.tolerance;
        out.push(CaseRecord::from_report(spec, cfg.level, Some(&mu), Some(&zero), r));
    }
    Ok(out)
}

fn suite_bounds(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    let ws = scan_weights(spec, cfg.level);
    let mut out = Vec::new();
    for mu in &ws {
        for nu in &ws {
            let p = parseval_bound(spec, mu, nu, cfg.level)?;
            let id = format!("parseval:{}:k={}:mu={mu}:nu={nu}", spec.name(), cfg.level);
            out.push(CaseRecord::from_bound(id, spec, cfg.level, mu, nu, p));
            let d = dim_bound(spec, mu, nu, cfg.level)?;
            let id = format!("dim:{}:k={}:mu={mu}:nu={nu}", spec.name(), cfg.level);
            out.push(CaseRecord::from_bound(id, spec, cfg.level, mu, nu, d));
        }
    }
    Ok(out)
}

fn suite_conjugacy(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    let ws = scan_weights(spec, cfg.level);
    let mut out = Vec::new();
    for a in &ws {
        for b in &ws {
            let c = conjugacy_square_check(spec, a, b, cfg.level)?;
            let lhs = [c.squares.0 as f64, c.linear.0 as f64];
            let rhs = [c.squares.1 as f64, c.linear.1 as f64];
            let residual = (lhs[0] - rhs[0]).abs().max((lhs[1] - rhs[1]).abs());
            out.push(CaseRecord {
                case_id: format!("conjugacy:{}:k={}:mu={a}:nu={b}", spec.name(), cfg.level),
                algebra: spec.name(),
                k: cfg.level,
                mu: Some(a.clone()),
                nu: Some(b.clone()),
                points_checked: 1,
                max_abs_residual: residual,
                tolerance: 0.0,
                passed: c.equal,
                witnesses: if c.equal {
                    Vec::new()
                } else {
                    vec![Witness { point: "squares,linear".into(), lhs, rhs }]
                },
            });
        }
    }
    Ok(out)
}

/// Fixed sample for the theta residual checks.
fn theta_samples(rank: usize) -> Vec<(Complex64, Vec<Complex64>)> {
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&t| {
            let u = (0..rank).map(|i| Complex64::new(0.1 + 0.07 * i as f64, 0.0)).collect();
            (Complex64::new(0.1, t), u)
        })
        .collect()
}

fn suite_theta(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    let k = require_finite(cfg.level, "theta")?;
    if !spec.is_simply_laced() {
        return Err(Error::NotSimplyLaced("theta suite"));
    }
    let kk = k + spec.dual_coxeter();
    let ws = level_k_weights(spec, k);
    let grid = standard_grid(spec.rank());
    let mut out = Vec::new();
    for mu in &ws {
        for nu in &ws {
            let r = verify_kw_identity(spec, mu, nu, k, &grid, cfg.tolerance)?;
            out.push(CaseRecord::from_report(spec, cfg.level, Some(mu), Some(nu), r));
        }
    }
    let mut t_worst = 0.0f64;
    let mut t_points = 0;
    for (tau, u) in theta_samples(spec.rank()) {
        let ctx = ThetaContext::new(spec, kk, tau, u)?;
        for lam in &ws {
            t_worst = t_worst.max(check_t_transform(&ctx, &(lam + spec.rho()))?);
            t_points += 1;
        }
    }
    out.push(CaseRecord::scalar(format!("theta-T:{}:K={kk}", spec.name()), spec, cfg.level, t_worst, 1e-10, t_points));
    let u = (0..spec.rank()).map(|i| Complex64::new(0.1 + 0.2 * i as f64, 0.02)).collect();
    let ctx = ThetaContext::new(spec, kk, Complex64::new(0.1, 1.0), u)?;
    let ratio = heat_convergence_ratio(&ctx, spec.rho(), 0.02)?;
    let mut rec = CaseRecord::scalar(
        format!("theta-heat-ratio:{}:K={kk}", spec.name()),
        spec,
        cfg.level,
        (ratio - 4.0).abs(),
        0.5,
        2,
    );
    rec.witnesses = if rec.passed {
        Vec::new()
    } else {
        vec![Witness { point: "ratio".into(), lhs: [ratio, 0.0], rhs: [4.0, 0.0] }]
    };
    out.push(rec);
    Ok(out)
}

fn suite_csmodel(cfg: &RunConfig, spec: &AlgebraSpec) -> Result<Vec<CaseRecord>> {
    let k = require_finite(cfg.level, "csmodel")?;
    let model = GaussianModel::build(spec, k)?;
    let n = model.dimension() as u64;
    let name = spec.name();
    let mut out = vec![
        CaseRecord::scalar(
            format!("cs-commutator:{name}:k={k}"),
            spec,
            cfg.level,
            model.check_clock_commutator(),
            1e-12,
            n,
        ),
        CaseRecord::scalar(
            format!("cs-orthonormal:{name}:k={k}"),
            spec,
            cfg.level,
            model.check_orthonormality()?,
            1e-12,
            n,
        ),
        CaseRecord::scalar(
            format!("cs-s-conjugation:{name}:k={k}"),
            spec,
            cfg.level,
            model.check_s_conjugation(),
            1e-10,
            n,
        ),
        CaseRecord::scalar(
            format!("cs-character:{name}:k={k}"),
            spec,
            cfg.level,
            model.check_character_inner_products()?,
            1e-10,
            n,
        ),
        CaseRecord::scalar(
            format!("cs-weyl-even:{name}:k={k}"),
            spec,
            cfg.level,
            model.check_weyl_evenness()?,
            1e-12,
            n,
        ),
    ];
    let oracle = VerlindeOracle::new(spec, k)?;
    let ws = level_k_weights(spec, k);
    for mu in &ws {
        for nu in &ws {
            let id = format!("cs-fusion:{name}:k={k}:mu={mu}:nu={nu}");
            let folded = fuse(spec, mu, nu, cfg.level)?;
            let verlinde = oracle.product(mu, nu);
            let ops = model.fusion_from_operators(mu, nu);
            let rec = match (verlinde, ops) {
                (Ok(v), Ok(o)) => {
                    let mismatch = mismatches(&folded, &v) + mismatches(&folded, &o);
                    let mut r = CaseRecord::scalar(id, spec, cfg.level, mismatch as f64, 0.0, ws.len() as u64);
                    r.mu = Some(mu.clone());
                    r.nu = Some(nu.clone());
                    if mismatch > 0 {
                        r.witnesses.push(Witness {
                            point: format!("folding={folded} verlinde={v} operators={o}"),
                            lhs: [folded.total() as f64, 0.0],
                            rhs: [o.total() as f64, 0.0],
                        });
                    }
                    r
                }
                (Err(e), _) | (_, Err(e)) => {
                    if e.is_cap() {
                        return Err(e);
                    }
                    CaseRecord::failure(id, spec, cfg.level, mu, nu, e.to_string())
                }
            };
            out.push(rec);
        }
    }
    Ok(out)
}

/// Number of weights whose coefficients differ.
fn mismatches(a: &DecompMap, b: &DecompMap) -> u64 {
    let mut keys: Vec<&Weight> = a.entries().keys().chain(b.entries().keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().filter(|w| a.get(w) != b.get(w)).count() as u64
}

/// Runs a suite and returns its case records in a fixed order.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<Vec<CaseRecord>> {
    let spec = cfg.spec()?;
    match suite {
        Suite::Identity => suite_identity(cfg, &spec),
        Suite::Lemma => suite_lemma(cfg, &spec),
        Suite::Bounds => suite_bounds(cfg, &spec),
        Suite::Conjugacy => suite_conjugacy(cfg, &spec),
        Suite::Theta => suite_theta(cfg, &spec),
        Suite::Csmodel => suite_csmodel(cfg, &spec),
        Suite::All => {
            let finite = matches!(cfg.level, Level::Finite(_));
            let mut out = suite_identity(cfg, &spec)?;
            if finite {
                out.extend(suite_lemma(cfg, &spec)?);
            }
            out.extend(suite_bounds(cfg, &spec)?);
            out.extend(suite_conjugacy(cfg, &spec)?);
            if finite && spec.is_simply_laced() {
                out.extend(suite_theta(cfg, &spec)?);
                out.extend(suite_csmodel(cfg, &spec)?);
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct WeightsReport<'a> {
    algebra: String,
    mu: &'a Weight,
    weights: Vec<(&'a Weight, u64)>,
    dim: u64,
    sumsq: u64,
}

/// `weights` command; returns the rendered output.
pub fn cmd_weights(cfg: &RunConfig, mu: &Weight) -> Result<String> {
    let spec = cfg.spec()?;
    let ws = weight_system(&spec, mu)?;
    let mut s = String::new();
    match cfg.format {
        Format::Json => {
            let r = WeightsReport {
                algebra: spec.name(),
                mu,
                weights: ws.iter().collect(),
                dim: ws.dimension(),
                sumsq: ws.mult_sum_squares(),
            };
            s.push_str(&serde_json::to_string(&r).expect("serializable"));
            s.push('\n');
        }
        Format::Text | Format::Csv => {
            let map = DecompMap::from_entries(ws.iter().map(|(w, m)| (w.clone(), m)));
            let _ = writeln!(s, "{map}");
            let _ = writeln!(s, "dim {}", ws.dimension());
            let _ = writeln!(s, "sumsq {}", ws.mult_sum_squares());
        }
    }
    Ok(s)
}

#[derive(Serialize)]
struct FuseReport<'a> {
    algebra: String,
    k: Level,
    mu: &'a Weight,
    nu: &'a Weight,
    result: Vec<(&'a Weight, u64)>,
    oracle_agrees: Option<bool>,
}

/// `fuse` command; the flag is true when the oracle disagreed.
pub fn cmd_fuse(cfg: &RunConfig, mu: &Weight, nu: &Weight, oracle: bool) -> Result<(String, bool)> {
    let spec = cfg.spec()?;
    let d = fuse(&spec, mu, nu, cfg.level)?;
    let agrees = if oracle {
        match cfg.level {
            Level::Finite(k) => Some(match VerlindeOracle::new(&spec, k)?.product(mu, nu) {
                Ok(v) => v == d,
                Err(Error::OracleInconsistency(_)) => false,
                Err(e) => return Err(e),
            }),
            // The oracle only exists at finite level; large-level fusion must
            // reproduce the tensor product.
            Level::Infinite => {
                let big = (spec.level_of(mu) + spec.level_of(nu)) as u32;
                Some(fuse(&spec, mu, nu, Level::Finite(big))? == d)
            }
        }
    } else {
        None
    };
    let mut s = String::new();
    match cfg.format {
        Format::Json => {
            let r = FuseReport {
                algebra: spec.name(),
                k: cfg.level,
                mu,
                nu,
                result: d.iter().collect(),
                oracle_agrees: agrees,
            };
            s.push_str(&serde_json::to_string(&r).expect("serializable"));
            s.push('\n');
        }
        Format::Text | Format::Csv => {
            let _ = writeln!(s, "{d}");
            match agrees {
                Some(true) => s.push_str("oracle: agrees\n"),
                Some(false) => s.push_str("oracle: MISMATCH\n"),
                None => {}
            }
        }
    }
    Ok((s, agrees == Some(false)))
}

/// `verify` command; the flag is true when every case passed.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<(String, bool)> {
    let records = run_suite(cfg, suite)?;
    let mut s = String::new();
    let all = records.iter().all(|r| r.passed);
    for r in &records {
        match cfg.format {
            Format::Text => {
                let _ = writeln!(
                    s,
                    "{} {} residual={:e} points={}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.case_id,
                    r.max_abs_residual,
                    r.points_checked
                );
            }
            _ => {
                s.push_str(&serde_json::to_string(r).expect("serializable"));
                s.push('\n');
            }
        }
    }
    Ok((s, all))
}

/// Options of the `theta` command.
#[derive(Clone, Debug)]
pub struct ThetaRequest {
    pub k: u32,
    pub gamma: Option<Weight>,
    pub taus: Vec<Complex64>,
    pub us: Vec<Vec<Complex64>>,
    pub parity: Option<i8>,
    pub character: Option<Weight>,
    pub h: f64,
}

/// `theta` command: one CSV row per `(tau, u)`.
pub fn cmd_theta(cfg: &RunConfig, req: &ThetaRequest) -> Result<String> {
    let spec = cfg.spec()?;
    for t in &req.taus {
        if !(t.im > 0.0) {
            return Err(Error::InvalidTau(t.im));
        }
    }
    let kk = req.k + spec.dual_coxeter();
    let label = match (&req.character, &req.gamma) {
        (Some(mu), _) => mu.clone(),
        (None, Some(g)) => g.clone(),
        (None, None) => Weight::zero(spec.rank()),
    };
    // Residuals refer to the theta function whose value (or numerator) is
    // reported.
    let residual_gamma = match &req.character {
        Some(mu) => mu + spec.rho(),
        None => label.clone(),
    };
    spec.check_rank(&label)?;
    let mut s = String::new();
    let json = cfg.format == Format::Json;
    if !json {
        let mut header = vec!["gamma".to_string(), "tau_re".into(), "tau_im".into()];
        header.extend((1..=spec.rank()).flat_map(|i| [format!("u{i}_re"), format!("u{i}_im")]));
        header.extend(["value_re", "value_im", "t_residual", "heat_residual"].map(String::from));
        let _ = writeln!(s, "{}", header.join(","));
    }
    for tau in &req.taus {
        for u in &req.us {
            if u.len() != spec.rank() {
                return Err(Error::RankMismatch { expected: spec.rank(), got: u.len() });
            }
            let ctx = ThetaContext::new(&spec, kk, *tau, u.clone())?;
            let value = match (&req.character, req.parity) {
                (Some(mu), _) => kac_weyl_char(&ctx, mu)?,
                (None, Some(p)) => theta_weyl(&ctx, &label, p)?,
                (None, None) => theta_sum(&ctx, &label)?,
            };
            let t_res = check_t_transform(&ctx, &residual_gamma)?;
            let heat = check_heat_equation(&ctx, &residual_gamma, req.h)?;
            if json {
                let row = serde_json::json!({
                    "gamma": label,
                    "tau": [tau.re, tau.im],
                    "u": u.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "value": [value.re, value.im],
                    "t_residual": t_res,
                    "heat_residual": heat,
                });
                let _ = writeln!(s, "{row}");
            } else {
                let mut cols = vec![
                    format!("\"{}\"", label.labels().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
                    tau.re.to_string(),
                    tau.im.to_string(),
                ];
                for z in u {
                    cols.push(z.re.to_string());
                    cols.push(z.im.to_string());
                }
                cols.extend([value.re, value.im, t_res, heat].map(|x| format!("{x:e}")));
                let _ = writeln!(s, "{}", cols.join(","));
            }
        }
    }
    Ok(s)
}

fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match &cfg.output {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses arguments and runs a command, writing results to `out` and
/// diagnostics to `err`. Caps come from `caps_env` (the value of
/// [`CAPS_ENV`], if set). Returns the process exit code.
pub fn run<I, T>(args: I, caps_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let target: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let caps = match caps_env.map(parse_caps).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(err, "error: {CAPS_ENV}: {e}");
            return EXIT_USAGE;
        }
    };
    if !(cli.tolerance > 0.0) {
        let _ = writeln!(err, "error: tolerance must be positive");
        return EXIT_USAGE;
    }
    let make = |algebra: &str, level: Level, default: Format| RunConfig {
        algebra: algebra.to_string(),
        level,
        tolerance: cli.tolerance,
        caps,
        seed: cli.seed,
        format: cli.format.unwrap_or(default),
        output: cli.output.clone(),
    };
    let result: Result<(RunConfig, String, i32)> = match &cli.command {
        Command::Weights { algebra, mu } => {
            let cfg = make(algebra, Level::Infinite, Format::Text);
            cmd_weights(&cfg, mu).map(|s| (cfg, s, EXIT_OK))
        }
        Command::Fuse { algebra, k, mu, nu, oracle } => {
            let cfg = make(algebra, *k, Format::Text);
            cmd_fuse(&cfg, mu, nu, *oracle).map(|(s, bad)| (cfg, s, if bad { EXIT_FAILED } else { EXIT_OK }))
        }
        Command::Verify { algebra, k, suite } => {
            let cfg = make(algebra, *k, Format::Json);
            cmd_verify(&cfg, *suite).map(|(s, ok)| (cfg, s, if ok { EXIT_OK } else { EXIT_FAILED }))
        }
        Command::Theta { algebra, k, gamma, tau, u, antisym, sym, character, mu, h } => {
            let cfg = make(algebra, Level::Finite(*k), Format::Csv);
            let parsed = (|| -> Result<ThetaRequest> {
                Ok(ThetaRequest {
                    k: *k,
                    gamma: gamma.clone(),
                    taus: tau.iter().map(|t| parse_complex(t)).collect::<Result<_>>()?,
                    us: u.iter().map(|v| parse_complex_vec(v)).collect::<Result<_>>()?,
                    parity: if *antisym {
                        Some(-1)
                    } else if *sym {
                        Some(1)
                    } else {
                        None
                    },
                    character: if *character { mu.clone() } else { None },
                    h: *h,
                })
            })();
            parsed.and_then(|req| cmd_theta(&cfg, &req)).map(|s| (cfg, s, EXIT_OK))
        }
    };
    match result {
        Ok((cfg, text, code)) => {
            let written = emit(&cfg, &text, out, err);
            if written != EXIT_OK {
                written
            } else {
                code
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["fusionkit"];
        full.extend_from_slice(args);
        let code = run(full, None, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn weights_text() {
        let (code, out, _) = call(&["weights", "A1", "--mu", "2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("{(-2):1, (0):1, (2):1}"), "{out}");
        let (_, out, _) = call(&["weights", "A2", "--mu", "1,1"]);
        assert!(out.contains("dim 8") && out.contains("sumsq 10"));
        let (_, out, _) = call(&["weights", "A1", "--mu", "0"]);
        assert!(out.starts_with("{(0):1}"));
    }

    #[test]
    fn fuse_examples() {
        let (code, out, _) = call(&["fuse", "A1", "--k", "2", "--mu", "2", "--nu", "2"]);
        assert_eq!((code, out.trim()), (0, "{(0):1}"));
        let (_, out, _) = call(&["fuse", "A1", "--k", "inf", "--mu", "1", "--nu", "1"]);
        assert_eq!(out.trim(), "{(0):1, (2):1}");
        let (code, out, _) = call(&["fuse", "A2", "--k", "1", "--mu", "1,0", "--nu", "1,0", "--oracle"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("{(0,1):1}"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["weights", "A1", "--mu", "-1"]).0, EXIT_USAGE);
        assert_eq!(call(&["weights", "X1", "--mu", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["weights", "E8", "--mu", "1,1,1,1,1,1,1,1"]).0, EXIT_CAP);
        assert_eq!(call(&["fuse", "A1", "--k", "1", "--mu", "2", "--nu", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["theta", "A1", "--k", "2", "--gamma", "1", "--tau", "0-1i", "--u", "0.05"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn caps_parsing() {
        let c = parse_caps("dim=10, hilbert=20").unwrap();
        assert_eq!((c.dim, c.hilbert, c.weyl_order), (10, 20, Caps::default().weyl_order));
        assert!(parse_caps("dim=0").is_err());
        assert!(parse_caps("foo=1").is_err());
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["fusionkit", "weights", "A2", "--mu", "3,3"], Some("dim=10"), &mut out, &mut err);
        assert_eq!(code, EXIT_CAP);
    }

    #[test]
    fn verify_json_lines() {
        let (code, out, _) = call(&["verify", "A1", "--k", "2", "--suite", "identity"]);
        assert_eq!(code, 0);
        let recs: Vec<CaseRecord> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(recs.len(), 9);
        assert!(recs.iter().all(|r| r.passed && r.max_abs_residual < 1e-9));
        for (line, r) in out.lines().zip(&recs) {
            assert_eq!(serde_json::to_string(r).unwrap(), line);
        }
    }

    #[test]
    fn theta_csv() {
        let (code, out, _) = call(&["theta", "A1", "--k", "2", "--gamma", "1", "--tau", "0+1i", "--u", "0.05"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        let t: f64 = row[row.len() - 2].parse().unwrap();
        assert!(t < 1e-10);
        let (_, out, _) =
            call(&["theta", "A1", "--k", "2", "--gamma", "2", "--antisym", "--tau", "0+1i", "--u", "0.05"]);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        let re: f64 = row[row.len() - 4].parse().unwrap();
        let im: f64 = row[row.len() - 3].parse().unwrap();
        // gamma = 2 is not on a wall; gamma = 0 is.
        assert!(re.abs() + im.abs() > 0.0);
        let (_, out, _) =
            call(&["theta", "A1", "--k", "2", "--gamma", "0", "--antisym", "--tau", "0+1i", "--u", "0.05"]);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[row.len() - 4].parse::<f64>().unwrap(), 0.0);
        let (_, out, _) = call(&["theta", "A1", "--k", "2", "--char", "--mu", "0", "--tau", "0+1i", "--u", "0.05"]);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert!((row[row.len() - 4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}
