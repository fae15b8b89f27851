//! Seeded sampling and extremal search inside matrix classes.
//!
//! Chains walk through a class by random entry perturbations, rejecting any
//! move that leaves the class. Every class here is a cone, so candidates are
//! renormalized to `max|a_ij| = 1` after each move.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{
    dispersal_sign_check, hadamard_fischer_check, m_matrix_check, newton_check, omega_tau_check,
    p_matrix_check, stability_check, varga_cone_check, MAX_OMEGA_ORDER,
};
use crate::classify::{classify, Classification};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::minors::{principal_minor_table, MinorMode};
use crate::report::{ClassReport, Verdict, Witness};
use crate::rng::{normal, stream, uniform, Stream};
use crate::spectrum::{char_poly, eigenvalues, min_real_eigenvalue};
use crate::tolerance::Tolerances;

pub const SEARCH_SCHEMA: &str = "gkk-tau/search/v1";
/// Largest order accepted by the search routines.
pub const MAX_SEARCH_ORDER: usize = 12;
/// Attempts allowed when a chain draws its starting member.
pub const START_BUDGET: usize = 10_000;
/// Number of trace samples kept per chain, besides the endpoints.
pub const TRACE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixClass {
    P,
    #[serde(rename = "GKK")]
    Gkk,
    #[serde(rename = "strictGKK")]
    StrictGkk,
    /// Sign-symmetric P-matrices.
    #[serde(rename = "signSymmetric")]
    SignSymmetric,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "GKKtau")]
    GkkTau,
    #[serde(rename = "Mmatrix")]
    MMatrix,
    #[serde(rename = "HPD")]
    Hpd,
    #[serde(rename = "realSpectrum")]
    RealSpectrum,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 10] = [
        MatrixClass::P,
        MatrixClass::Gkk,
        MatrixClass::StrictGkk,
        MatrixClass::SignSymmetric,
        MatrixClass::Omega,
        MatrixClass::Tau,
        MatrixClass::GkkTau,
        MatrixClass::MMatrix,
        MatrixClass::Hpd,
        MatrixClass::RealSpectrum,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MatrixClass::P => "P",
            MatrixClass::Gkk => "GKK",
            MatrixClass::StrictGkk => "strictGKK",
            MatrixClass::SignSymmetric => "signSymmetric",
            MatrixClass::Omega => "omega",
            MatrixClass::Tau => "tau",
            MatrixClass::GkkTau => "GKKtau",
            MatrixClass::MMatrix => "Mmatrix",
            MatrixClass::Hpd => "HPD",
            MatrixClass::RealSpectrum => "realSpectrum",
        }
    }

    /// Class membership report; the class holds exactly when it passes.
    pub fn report(self, a: &Matrix, tol: &Tolerances) -> Result<ClassReport> {
        let n = a.order();
        let table = || principal_minor_table(a, MinorMode::Float);
        let p = || table().map(|t| p_matrix_check(&t, tol));
        let tau = || omega_tau_check(a, tol).map(|o| o.tau);
        Ok(match self {
            MatrixClass::P => p()?,
            MatrixClass::Gkk => and_then(p()?, || dispersal_sign_check(a, 1, false, tol))?,
            MatrixClass::StrictGkk => and_then(p()?, || dispersal_sign_check(a, 1, true, tol))?,
            MatrixClass::SignSymmetric => {
                and_then(p()?, || dispersal_sign_check(a, n, false, tol))?
            }
            MatrixClass::Omega => omega_tau_check(a, tol)?.omega,
            MatrixClass::Tau => tau()?,
            MatrixClass::GkkTau => {
                let gkk = and_then(p()?, || dispersal_sign_check(a, 1, false, tol))?;
                and_then(gkk, tau)?
            }
            MatrixClass::MMatrix => m_matrix_check(a, &table()?, tol),
            MatrixClass::Hpd => {
                if a.is_symmetric() {
                    p()?
                } else {
                    failed(f64::NEG_INFINITY, None, "not symmetric")
                }
            }
            MatrixClass::RealSpectrum => {
                let s = eigenvalues(a, tol)?;
                match s.values().iter().find(|z| z.im != 0.0) {
                    Some(z) => failed(-z.im.abs(), Some((*z).into()), "non-real eigenvalue"),
                    None => ClassReport {
                        checked_count: s.len(),
                        ..ClassReport::vacuous()
                    },
                }
            }
        })
    }

    pub fn contains(self, a: &Matrix, tol: &Tolerances) -> Result<bool> {
        Ok(self.report(a, tol)?.passed())
    }

    fn symmetric(self) -> bool {
        self == MatrixClass::Hpd
    }
}

fn failed(margin: f64, witness: Option<Witness>, note: &str) -> ClassReport {
    ClassReport {
        verdict: Verdict::Fail,
        margin,
        witness,
        checked_count: 1,
        marginal: false,
        note: Some(note.into()),
    }
}

/// Conjunction that skips the second check once the first has failed.
fn and_then(
    first: ClassReport,
    second: impl FnOnce() -> Result<ClassReport>,
) -> Result<ClassReport> {
    if first.passed() {
        Ok(first.and(second()?))
    } else {
        Ok(first)
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MatrixClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MatrixClass::ALL
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown matrix class {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Objective {
    MinStabilityMargin,
    MinVargaMargin,
    MinNewtonMargin,
    #[serde(rename = "minStrictGKKMargin")]
    MinStrictGkkMargin,
    #[serde(rename = "minHFMargin")]
    MinHfMargin,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::MinStabilityMargin,
        Objective::MinVargaMargin,
        Objective::MinNewtonMargin,
        Objective::MinStrictGkkMargin,
        Objective::MinHfMargin,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Objective::MinStabilityMargin => "minStabilityMargin",
            Objective::MinVargaMargin => "minVargaMargin",
            Objective::MinNewtonMargin => "minNewtonMargin",
            Objective::MinStrictGkkMargin => "minStrictGKKMargin",
            Objective::MinHfMargin => "minHFMargin",
        }
    }

    /// The margin of the corresponding certifier, or `None` when it is undefined.
    pub fn evaluate(self, a: &Matrix, tol: &Tolerances) -> Result<Option<f64>> {
        let report = match self {
            Objective::MinStabilityMargin => stability_check(&eigenvalues(a, tol)?, tol),
            Objective::MinVargaMargin => {
                let s = eigenvalues(a, tol)?;
                let l = min_real_eigenvalue(&s, tol);
                varga_cone_check(&s, l, a.order(), tol)
            }
            Objective::MinNewtonMargin => newton_check(&normalized_coefficients(a), tol),
            Objective::MinStrictGkkMargin => {
                let t = principal_minor_table(a, MinorMode::Float)?;
                p_matrix_check(&t, tol).and(dispersal_sign_check(a, 1, true, tol)?)
            }
            Objective::MinHfMargin => {
                hadamard_fischer_check(&principal_minor_table(a, MinorMode::Float)?, tol)?
            }
        };
        Ok(match report.verdict {
            Verdict::Undefined => None,
            _ => Some(report.margin),
        })
    }

    fn compatible_with(self, class: MatrixClass) -> bool {
        match self {
            Objective::MinVargaMargin => matches!(
                class,
                MatrixClass::Omega
                    | MatrixClass::Tau
                    | MatrixClass::GkkTau
                    | MatrixClass::MMatrix
                    | MatrixClass::Hpd
                    | MatrixClass::RealSpectrum
            ),
            _ => true,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Objective::ALL
            .into_iter()
            .find(|o| o.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown objective {s:?}")))
    }
}

/// `c_j`: the elementary symmetric functions of the spectrum divided by
/// `C(n, j)`, read off the characteristic polynomial.
pub fn normalized_coefficients(a: &Matrix) -> Vec<f64> {
    let n = a.order();
    let mut binom = 1.0;
    char_poly(a)
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 0 {
                binom = binom * (n + 1 - j) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * c / binom
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Standard deviation of the first perturbation.
    pub step_init: f64,
    /// Per-iteration multiplicative decay of the step.
    pub step_decay: f64,
    pub restarts: usize,
}

impl SearchConfig {
    /// Defaults: one restart, step 0.1 shrinking by a factor of `10^4` over the run.
    pub fn new(n: usize, seed: u64, iterations: usize) -> Self {
        SearchConfig {
            n,
            seed,
            iterations,
            step_init: 0.1,
            step_decay: 1e-4f64.powf(1.0 / iterations.max(1) as f64),
            restarts: 1,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        if self.n > MAX_SEARCH_ORDER {
            return Err(Error::OrderTooLarge {
                order: self.n,
                cap: MAX_SEARCH_ORDER,
            });
        }
        if self.iterations == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument(
                "iterations and restarts must be at least 1".into(),
            ));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return Err(Error::InvalidArgument("step_init must be positive".into()));
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(Error::InvalidArgument("step_decay must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    #[serde(with = "crate::io::ext_f64")]
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub epsilon: f64,
    pub require_tau: bool,
    pub found: bool,
    /// Max-entry distance from the input to the best candidate.
    pub distance: f64,
    /// Strict GKK margin of the best candidate (combined with τ when required).
    #[serde(with = "crate::io::ext_f64")]
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub schema: &'static str,
    pub class: MatrixClass,
    pub objective: Objective,
    pub seed: u64,
    pub config: SearchConfig,
    pub best: Matrix,
    #[serde(with = "crate::io::ext_f64")]
    pub best_objective: f64,
    pub best_restart: usize,
    pub restart_objectives: Vec<crate::io::ext_f64::Value>,
    /// Best objective so far of the winning chain; non-increasing.
    pub trace: Vec<TracePoint>,
    pub accepted: usize,
    pub rejected: usize,
    /// Visited members that failed an oracle the class guarantees.
    pub oracle_violations: usize,
    /// Labels whose report on `best` lies within the marginal band.
    pub marginal_labels: Vec<&'static str>,
    pub membership_audit: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximation: Option<Approximation>,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("search results serialize")
    }
}

/// One entry of a dispersal profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersalLevel {
    pub d: usize,
    pub report: ClassReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersalProfile {
    pub levels: Vec<DispersalLevel>,
    /// Largest `d` whose check passes; 0 when even `d = 1` fails.
    pub largest_d: usize,
    pub stability: ClassReport,
}

/// The dispersal-`d` sign check for every `d = 1..n`, with the stability
/// verdict alongside.
pub fn dispersal_profile(a: &Matrix, tol: &Tolerances) -> Result<DispersalProfile> {
    let n = a.order();
    let levels = (1..=n)
        .map(|d| Ok(DispersalLevel { d, report: dispersal_sign_check(a, d, false, tol)? }))
        .collect::<Result<Vec<_>>>()?;
    let largest_d = levels
        .iter()
        .take_while(|l| l.report.passed())
        .last()
        .map_or(0, |l| l.d);
    Ok(DispersalProfile {
        levels,
        largest_d,
        stability: stability_check(&eigenvalues(a, tol)?, tol),
    })
}

fn normalize(data: &mut [f64]) {
    let m = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        data.iter_mut().for_each(|v| *v /= m);
    }
}

fn gaussian(n: usize, rng: &mut Stream) -> Vec<f64> {
    (0..n * n).map(|_| normal(rng)).collect()
}

fn add_shift(data: &mut [f64], n: usize, t: f64) {
    for i in 0..n {
        data[i * n + i] += t;
    }
}

fn sym_gaussian(n: usize, rng: &mut Stream) -> Vec<f64> {
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = normal(rng);
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    s
}

/// One draw from the constructive family of a class, or a generic proposal
/// for the classes that are sampled by rejection.
fn propose(class: MatrixClass, n: usize, rng: &mut Stream) -> Vec<f64> {
    let root = (n as f64).sqrt();
    let mut data = match class {
        MatrixClass::Hpd => {
            let g = gaussian(n, rng);
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum();
                }
            }
            add_shift(&mut h, n, 0.1);
            h
        }
        MatrixClass::MMatrix => {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    if i != j {
                        let v = -uniform(rng, 0.0, 1.0);
                        m[i * n + j] = v;
                        row -= v;
                    }
                }
                m[i * n + i] = row + uniform(rng, 0.1, 1.0);
            }
            m
        }
        MatrixClass::RealSpectrum => {
            let d: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
            let mut s = gaussian(n, rng);
            add_shift(&mut s, n, root);
            let sm = Matrix::new(n, s).expect("finite");
            match sm.inverse() {
                Ok(inv) => {
                    let sd = Matrix::from_fn(n, |i, j| sm.get(i, j) * d[j]);
                    sd.mul(&inv).expect("same order").as_slice().to_vec()
                }
                Err(_) => vec![0.0; n * n],
            }
        }
        _ => match rng_index(rng, 4) {
            0 => {
                let mut g = gaussian(n, rng);
                add_shift(&mut g, n, root * uniform(rng, 0.0, 2.0));
                g
            }
            1 => {
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    g[i * n + i] = normal(rng);
                    for j in i + 1..n {
                        let sign = if normal(rng) < 0.0 { -1.0 } else { 1.0 };
                        g[i * n + j] = sign * normal(rng).abs();
                        g[j * n + i] = sign * normal(rng).abs();
                    }
                }
                add_shift(&mut g, n, root * uniform(rng, 0.0, 2.0));
                g
            }
            2 => {
                let mut z = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        if i != j && normal(rng) > 0.0 {
                            z[i * n + j] = -uniform(rng, 0.0, 1.0);
                        }
                    }
                }
                add_shift(&mut z, n, root * uniform(rng, 0.5, 2.0));
                z
            }
            _ => {
                let eps = uniform(rng, 0.0, 0.2);
                let s = sym_gaussian(n, rng);
                let noise = gaussian(n, rng);
                let d: Vec<f64> = (0..n).map(|_| (0.5 * normal(rng)).exp()).collect();
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] = d[i] * (s[i * n + j] + eps * noise[i * n + j]) / d[j];
                    }
                }
                add_shift(&mut g, n, 2.0 * root * uniform(rng, 0.5, 1.5));
                g
            }
        },
    };
    normalize(&mut data);
    data
}

fn sample_member(
    class: MatrixClass,
    n: usize,
    rng: &mut Stream,
    budget: usize,
    tol: &Tolerances,
) -> Result<Matrix> {
    for _ in 0..budget {
        let data = propose(class, n, rng);
        let Ok(a) = Matrix::new(n, data) else { continue };
        if a.max_abs() > 0.0 && class.contains(&a, tol)? {
            return Ok(a);
        }
    }
    Err(Error::BudgetExhausted { attempts: budget })
}

/// A random member of `class` drawn with at most `budget` proposals.
pub fn random_matrix_in_class(
    class: MatrixClass,
    n: usize,
    seed: u64,
    budget: usize,
    tol: &Tolerances,
) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    if n > MAX_OMEGA_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: MAX_OMEGA_ORDER,
        });
    }
    sample_member(class, n, &mut stream(seed, 0), budget, tol)
}

fn perturb(current: &Matrix, step: f64, symmetric: bool, rng: &mut Stream) -> Matrix {
    let n = current.order();
    let mut data = current.as_slice().to_vec();
    if normal(rng) < 0.0 {
        let i = rng_index(rng, n);
        let j = rng_index(rng, n);
        let delta = step * normal(rng);
        data[i * n + j] += delta;
        if symmetric && i != j {
            data[j * n + i] += delta;
        }
    } else {
        let scale = step / n as f64;
        for i in 0..n {
            for j in 0..n {
                if !symmetric || j >= i {
                    let delta = scale * normal(rng);
                    data[i * n + j] += delta;
                    if symmetric && j > i {
                        data[j * n + i] += delta;
                    }
                }
            }
        }
    }
    normalize(&mut data);
    Matrix::new(n, data).unwrap_or_else(|_| current.clone())
}

fn rng_index(rng: &mut Stream, n: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..n)
}

struct Chain {
    best: Matrix,
    best_objective: f64,
    trace: Vec<TracePoint>,
    accepted: usize,
    rejected: usize,
    oracle_violations: usize,
}

fn trace_stride(iterations: usize) -> usize {
    iterations.div_ceil(TRACE_POINTS).max(1)
}

fn run_chain(
    class: MatrixClass,
    objective: Objective,
    cfg: &SearchConfig,
    restart: usize,
    tol: &Tolerances,
) -> Result<Chain> {
    let mut rng = stream(cfg.seed, restart as u64);
    let check_oracle = class == MatrixClass::RealSpectrum;
    let mut oracle_violations = 0;
    let mut visit = |a: &Matrix| {
        if check_oracle && !newton_check(&normalized_coefficients(a), tol).passed() {
            oracle_violations += 1;
        }
    };
    let mut start = None;
    let mut attempts = 0;
    while start.is_none() && attempts < START_BUDGET {
        let a = sample_member(class, cfg.n, &mut rng, START_BUDGET - attempts, tol)?;
        attempts += 1;
        if let Some(v) = objective.evaluate(&a, tol)? {
            start = Some((a, v));
        }
    }
    let (mut current, mut value) = start.ok_or(Error::BudgetExhausted { attempts })?;
    visit(&current);
    let stride = trace_stride(cfg.iterations);
    let mut trace = vec![TracePoint { iteration: 0, objective: value }];
    let (mut accepted, mut rejected) = (0, 0);
    let mut step = cfg.step_init;
    for it in 1..=cfg.iterations {
        let candidate = perturb(&current, step, class.symmetric(), &mut rng);
        step *= cfg.step_decay;
        let improved = match objective.evaluate(&candidate, tol)? {
            Some(v) if v <= value => Some(v),
            _ => None,
        };
        match improved {
            Some(v) if class.contains(&candidate, tol)? => {
                visit(&candidate);
                current = candidate;
                value = v;
                accepted += 1;
            }
            _ => rejected += 1,
        }
        if it % stride == 0 || it == cfg.iterations {
            trace.push(TracePoint { iteration: it, objective: value });
        }
    }
    Ok(Chain {
        best: current,
        best_objective: value,
        trace,
        accepted,
        rejected,
        oracle_violations,
    })
}

fn marginal_labels(c: &Classification) -> Vec<&'static str> {
    let r = &c.reports;
    [
        ("p", &r.p),
        ("gkk", &r.gkk),
        ("strict_gkk", &r.strict_gkk),
        ("sign_symmetric", &r.sign_symmetric),
        ("omega", &r.omega),
        ("tau", &r.tau),
        ("gkk_tau", &r.gkk_tau),
        ("m", &r.m),
        ("stable", &r.stable),
        ("varga", &r.varga),
        ("hf", &r.hf),
        ("newton", &r.newton),
    ]
    .into_iter()
    .filter(|(_, r)| r.marginal)
    .map(|(name, _)| name)
    .collect()
}

/// Picks the chain with the smallest objective, the lowest index on ties.
fn pick_best(chains: &[Chain]) -> usize {
    let mut best = 0;
    for (i, c) in chains.iter().enumerate().skip(1) {
        if c.best_objective < chains[best].best_objective {
            best = i;
        }
    }
    best
}

/// Hill descent on `objective` inside `class`, with independent restarts
/// run in parallel.
pub fn extremal_search(
    class: MatrixClass,
    objective: Objective,
    cfg: &SearchConfig,
    tol: &Tolerances,
) -> Result<SearchResult> {
    cfg.validate()?;
    if !objective.compatible_with(class) {
        return Err(Error::InvalidArgument(format!(
            "objective {objective} is undefined on class {class}"
        )));
    }
    let chains = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_chain(class, objective, cfg, r, tol))
        .collect::<Result<Vec<_>>>()?;
    let winner = pick_best(&chains);
    let audit = classify(&chains[winner].best, tol)?;
    let c = &chains[winner];
    Ok(SearchResult {
        schema: SEARCH_SCHEMA,
        class,
        objective,
        seed: cfg.seed,
        config: cfg.clone(),
        best: c.best.clone(),
        best_objective: c.best_objective,
        best_restart: winner,
        restart_objectives: chains
            .iter()
            .map(|c| crate::io::ext_f64::Value(c.best_objective))
            .collect(),
        trace: c.trace.clone(),
        accepted: chains.iter().map(|c| c.accepted).sum(),
        rejected: chains.iter().map(|c| c.rejected).sum(),
        oracle_violations: chains.iter().map(|c| c.oracle_violations).sum(),
        marginal_labels: marginal_labels(&audit),
        membership_audit: audit,
        approximation: None,
    })
}

fn strictness(a: &Matrix, require_tau: bool, tol: &Tolerances) -> Result<ClassReport> {
    let strict = MatrixClass::StrictGkk.report(a, tol)?;
    if require_tau {
        Ok(strict.and(MatrixClass::Tau.report(a, tol)?))
    } else {
        Ok(strict)
    }
}

/// Searches the max-entry ball of radius `epsilon` around `a` for a strict
/// GKK matrix (also τ when `require_tau` is set).
///
/// The search maximizes the strictness margin; `best_objective` is its
/// negation so that, as for [`extremal_search`], smaller is better. Not
/// finding a member is a result, not an error.
pub fn approximate_by_strict_gkk(
    a: &Matrix,
    epsilon: f64,
    require_tau: bool,
    cfg: &SearchConfig,
    tol: &Tolerances,
) -> Result<SearchResult> {
    let cfg = SearchConfig { n: a.order(), ..cfg.clone() };
    cfg.validate()?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument("epsilon must be finite and nonnegative".into()));
    }
    let start = strictness(a, require_tau, tol)?;
    let chains = if start.passed() || epsilon == 0.0 {
        vec![Chain {
            best: a.clone(),
            best_objective: -start.margin,
            trace: vec![TracePoint { iteration: 0, objective: -start.margin }],
            accepted: 0,
            rejected: 0,
            oracle_violations: 0,
        }]
    } else {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| approximation_chain(a, epsilon, require_tau, &cfg, r, start.margin, tol))
            .collect::<Result<Vec<_>>>()?
    };
    let winner = pick_best(&chains);
    let c = &chains[winner];
    let report = strictness(&c.best, require_tau, tol)?;
    let audit = classify(&c.best, tol)?;
    let class = if require_tau { MatrixClass::GkkTau } else { MatrixClass::StrictGkk };
    Ok(SearchResult {
        schema: SEARCH_SCHEMA,
        class,
        objective: Objective::MinStrictGkkMargin,
        seed: cfg.seed,
        best: c.best.clone(),
        best_objective: c.best_objective,
        best_restart: winner,
        restart_objectives: chains
            .iter()
            .map(|c| crate::io::ext_f64::Value(c.best_objective))
            .collect(),
        trace: c.trace.clone(),
        accepted: chains.iter().map(|c| c.accepted).sum(),
        rejected: chains.iter().map(|c| c.rejected).sum(),
        oracle_violations: 0,
        marginal_labels: marginal_labels(&audit),
        membership_audit: audit,
        approximation: Some(Approximation {
            epsilon,
            require_tau,
            found: report.passed(),
            distance: c.best.max_entry_distance(a)?,
            margin: report.margin,
        }),
        config: cfg,
    })
}

/// Clamps `v` so that the computed `|v - c|` does not exceed `epsilon`.
fn into_ball(v: f64, c: f64, epsilon: f64) -> f64 {
    let mut v = v.clamp(c - epsilon, c + epsilon);
    while (v - c).abs() > epsilon {
        v = if v > c { v.next_down() } else { v.next_up() };
    }
    v
}

fn approximation_chain(
    centre: &Matrix,
    epsilon: f64,
    require_tau: bool,
    cfg: &SearchConfig,
    restart: usize,
    start_margin: f64,
    tol: &Tolerances,
) -> Result<Chain> {
    let n = centre.order();
    let mut rng = stream(cfg.seed, restart as u64);
    let mut current = centre.clone();
    let mut margin = start_margin;
    let stride = trace_stride(cfg.iterations);
    let mut trace = vec![TracePoint { iteration: 0, objective: -margin }];
    let (mut accepted, mut rejected) = (0, 0);
    let mut step = cfg.step_init.min(epsilon);
    for it in 1..=cfg.iterations {
        let mut data = current.as_slice().to_vec();
        for (k, v) in data.iter_mut().enumerate() {
            if normal(&mut rng) < 0.0 {
                let c = centre.as_slice()[k];
                *v = into_ball(*v + step * normal(&mut rng), c, epsilon);
            }
        }
        step *= cfg.step_decay;
        let candidate = Matrix::new(n, data)?;
        let m = strictness(&candidate, require_tau, tol)?.margin;
        if m >= margin {
            current = candidate;
            margin = m;
            accepted += 1;
        } else {
            rejected += 1;
        }
        if it % stride == 0 || it == cfg.iterations {
            trace.push(TracePoint { iteration: it, objective: -margin });
        }
    }
    Ok(Chain {
        best: current,
        best_objective: -margin,
        trace,
        accepted,
        rejected,
        oracle_violations: 0,
    })
}
