//! Post-selection conditions as residual systems, and a multi-start solver.
//!
//! A gate works when every structure-preserving configuration of the central
//! block has the same amplitude, except the all-ones configuration, which
//! must carry the opposite sign. Residuals are differences of those
//! amplitudes, evaluated with all phases at zero so everything is real.

mod lm;

pub use lm::{fd_jacobian, levenberg_marquardt, LmOptions, LmOutcome};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{ccz_block, cz_block};
use crate::mesh::{build_network, Scheme};
use crate::numerics::{permanent, permanent_with_multiplicity, ComplexMatrix, IndexSelection};

/// Accepted solutions satisfy `‖r‖` below this.
pub const ACCEPT_TOL: f64 = 1e-10;
/// Solutions whose success amplitude is this small satisfy the conditions
/// trivially and are discarded.
pub const DEGENERATE_AMPLITUDE: f64 = 1e-6;

/// Block index sets (0-based) of the eight CCZ expressions, `|000⟩` first
/// and `|111⟩` last.
pub const CCZ_EXPRESSION_SETS: [&[usize]; 8] =
    [&[1, 3], &[1, 3, 4], &[1, 2, 3], &[1, 2, 3, 4], &[0, 1, 3], &[0, 1, 3, 4], &[0, 1, 2, 3], &[0, 1, 2, 3, 4]];
/// Number of permutation terms in each CCZ expression.
pub const CCZ_TERM_COUNTS: [usize; 8] = [2, 6, 6, 24, 6, 24, 24, 120];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum ConditionProblem {
    Cz,
    Ccz { scheme: Scheme },
    /// CZ with `k` photons on the auxiliary rail.
    Tower { k: u32 },
}

impl ConditionProblem {
    pub fn dim(&self) -> usize {
        match self {
            ConditionProblem::Ccz { .. } => 10,
            _ => 3,
        }
    }

    pub fn residual_count(&self) -> usize {
        match self {
            ConditionProblem::Ccz { .. } => 7,
            _ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConditionProblem::Cz => "cz",
            ConditionProblem::Ccz { .. } => "ccz",
            ConditionProblem::Tower { .. } => "tower",
        }
    }

    pub fn block_modes(&self) -> usize {
        match self {
            ConditionProblem::Ccz { .. } => 5,
            _ => 3,
        }
    }

    pub fn residuals(&self, t: &[f64]) -> Result<Vec<f64>> {
        match *self {
            ConditionProblem::Cz => cz_residuals(as3(t)?).map(Vec::from),
            ConditionProblem::Ccz { scheme } => ccz_residuals(as10(t)?, scheme).map(Vec::from),
            ConditionProblem::Tower { k } => tower_residuals(as3(t)?, k).map(Vec::from),
        }
    }

    /// Amplitude of the all-zeros configuration.
    pub fn success_amplitude(&self, t: &[f64]) -> Result<Complex64> {
        match *self {
            ConditionProblem::Cz => Ok(block_inverse3(as3(t)?)?[(1, 1)]),
            ConditionProblem::Ccz { scheme } => {
                let inv = block_inverse10(as10(t)?, scheme)?;
                permanent(&inv.principal(CCZ_EXPRESSION_SETS[0])?)
            }
            ConditionProblem::Tower { k } => {
                check_k(k)?;
                Ok(tower_expressions(&block_inverse3(as3(t)?)?, k)?[0])
            }
        }
    }
}

impl fmt::Display for ConditionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionProblem::Cz => f.write_str("cz"),
            ConditionProblem::Ccz { scheme } => write!(f, "ccz ({})", scheme.name()),
            ConditionProblem::Tower { k } => write!(f, "tower (k = {k})"),
        }
    }
}

impl FromStr for ConditionProblem {
    type Err = Error;

    /// `cz`, `ccz`, `ccz:reck`, `tower:3`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("cz", None) => Ok(ConditionProblem::Cz),
            ("ccz", None) => Ok(ConditionProblem::Ccz { scheme: Scheme::Clements }),
            ("ccz", Some(a)) => Ok(ConditionProblem::Ccz { scheme: a.parse()? }),
            ("tower", a) => {
                let k = a.unwrap_or("1").parse().map_err(|_| Error::Domain(format!("bad photon count in `{s}`")))?;
                check_k(k)?;
                Ok(ConditionProblem::Tower { k })
            }
            _ => Err(Error::Unknown(s.into())),
        }
    }
}

fn as3(t: &[f64]) -> Result<&[f64; 3]> {
    t.try_into().map_err(|_| Error::Dimension(format!("expected 3 transmittances, got {}", t.len())))
}

fn as10(t: &[f64]) -> Result<&[f64; 10]> {
    t.try_into().map_err(|_| Error::Dimension(format!("expected 10 transmittances, got {}", t.len())))
}

fn check_t(t: &[f64]) -> Result<()> {
    match t.iter().find(|x| !x.is_finite() || x.abs() > 1.0) {
        Some(x) => Err(Error::Domain(format!("transmittance {x} outside [-1, 1]"))),
        None => Ok(()),
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("auxiliary photon count must be at least 1".into()));
    }
    Ok(())
}

fn block_inverse3(t: &[f64; 3]) -> Result<ComplexMatrix> {
    check_t(t)?;
    Ok(build_network(&cz_block(t))?.adjoint())
}

fn block_inverse10(t: &[f64; 10], scheme: Scheme) -> Result<ComplexMatrix> {
    check_t(t)?;
    Ok(build_network(&ccz_block(t, scheme))?.adjoint())
}

/// Three CZ residuals: `|10⟩`, `|01⟩` against `|00⟩`, and `|11⟩` against `−|00⟩`.
pub fn cz_residuals(t: &[f64; 3]) -> Result<[f64; 3]> {
    let inv = block_inverse3(t)?;
    let e00 = inv[(1, 1)].re;
    let e10 = permanent(&inv.principal(&[0, 1])?)?.re;
    let e01 = permanent(&inv.principal(&[1, 2])?)?.re;
    let e11 = permanent(&inv)?.re;
    Ok([e00 - e10, e00 - e01, e00 + e11])
}

/// Structure-preserving amplitudes `[|00⟩, |10⟩, |01⟩, |11⟩]` with `k` photons
/// on the middle rail.
fn tower_expressions(inv: &ComplexMatrix, k: u32) -> Result<[Complex64; 4]> {
    let aux = vec![1usize; k as usize];
    let norm: f64 = (1..=k).map(f64::from).product();
    let amp = |front: bool, back: bool| -> Result<Complex64> {
        let mut idx = Vec::with_capacity(k as usize + 2);
        if front {
            idx.push(0);
        }
        idx.extend_from_slice(&aux);
        if back {
            idx.push(2);
        }
        Ok(permanent_with_multiplicity(inv, &IndexSelection::new(idx.clone(), idx))? / norm)
    };
    Ok([amp(false, false)?, amp(true, false)?, amp(false, true)?, amp(true, true)?])
}

/// CZ residuals with `k` auxiliary photons; identical to [`cz_residuals`] at `k = 1`.
pub fn tower_residuals(t: &[f64; 3], k: u32) -> Result<[f64; 3]> {
    check_k(k)?;
    let e = tower_expressions(&block_inverse3(t)?, k)?;
    Ok([(e[0] - e[1]).re, (e[0] - e[2]).re, (e[0] + e[3]).re])
}

/// Seven CCZ residuals: six expressions against `|000⟩`, and `|111⟩` against `−|000⟩`.
pub fn ccz_residuals(t: &[f64; 10], scheme: Scheme) -> Result<[f64; 7]> {
    let inv = block_inverse10(t, scheme)?;
    let mut e = [0.0; 8];
    for (slot, set) in e.iter_mut().zip(CCZ_EXPRESSION_SETS) {
        *slot = permanent(&inv.principal(set)?)?.re;
    }
    let mut r = [0.0; 7];
    for i in 1..7 {
        r[i - 1] = e[0] - e[i];
    }
    r[6] = e[0] + e[7];
    Ok(r)
}

/// Central-difference Jacobian in transmittance variables, rows = residuals.
/// Falls back to a one-sided difference at the `|t| = 1` boundary.
pub fn residual_jacobian(problem: &ConditionProblem, t: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    check_t(t)?;
    let base = problem.residuals(t)?;
    let mut jac = vec![vec![0.0; t.len()]; base.len()];
    let mut tp = t.to_vec();
    for j in 0..t.len() {
        let (hi, lo) = ((t[j] + h).min(1.0), (t[j] - h).max(-1.0));
        tp[j] = hi;
        let fp = problem.residuals(&tp)?;
        tp[j] = lo;
        let fm = problem.residuals(&tp)?;
        tp[j] = t[j];
        for i in 0..base.len() {
            jac[i][j] = (fp[i] - fm[i]) / (hi - lo);
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSolution {
    pub t: Vec<f64>,
    pub residual_norm: f64,
    pub amplitude: Complex64,
    /// `|A|²`.
    pub probability: f64,
    /// Whether the symmetry-reduced representative was chosen.
    pub canonical_form_applied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartDiagnostic {
    pub index: usize,
    /// Came from a caller-supplied seed point rather than the PRNG.
    pub seeded: bool,
    pub start: Vec<f64>,
    pub residual_norm: f64,
    pub amplitude: f64,
    pub iterations: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
    pub seed_points: Vec<Vec<f64>>,
    pub accept_tol: f64,
    /// Climb `|A|` along the solution set after convergence.
    pub ascend: bool,
    pub lm: LmOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { starts: 200, seed: 42, seed_points: Vec::new(), accept_tol: ACCEPT_TOL, ascend: false, lm: LmOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    #[serde(flatten)]
    pub problem: ConditionProblem,
    pub solutions: Vec<SolverSolution>,
    pub diagnostics: Vec<StartDiagnostic>,
}

impl SolveOutcome {
    pub fn best(&self) -> Option<&SolverSolution> {
        self.solutions.first()
    }
}

fn to_angles(t: &[f64]) -> Vec<f64> {
    t.iter().map(|x| x.clamp(-1.0, 1.0).asin()).collect()
}

fn to_t(x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| a.sin()).collect()
}

/// Runs LM from one start in angle variables, optionally followed by ascent.
pub fn refine(problem: &ConditionProblem, t0: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, LmOutcome)> {
    if t0.len() != problem.dim() {
        return Err(Error::Dimension(format!("{problem} needs {} transmittances, got {}", problem.dim(), t0.len())));
    }
    check_t(t0)?;
    let f = |x: &[f64]| problem.residuals(&to_t(x));
    let mut out = levenberg_marquardt(&f, &to_angles(t0), &opts.lm)?;
    if opts.ascend && out.residual_norm < opts.accept_tol {
        out = ascend(problem, out, opts)?;
    }
    Ok((to_t(&out.x), out))
}

/// Projected-gradient climb of `|A|` on the solution set, re-converging the
/// residuals after every step of length `1e-3`.
fn ascend(problem: &ConditionProblem, mut cur: LmOutcome, opts: &SolveOptions) -> Result<LmOutcome> {
    let f = |x: &[f64]| problem.residuals(&to_t(x));
    let a = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![problem.success_amplitude(&to_t(x))?.norm()]) };
    let mut value = a(&cur.x)?[0];
    for _ in 0..20_000 {
        let grad = fd_jacobian(&a, &cur.x, opts.lm.fd_step)?.row(0).transpose();
        let j = fd_jacobian(&f, &cur.x, opts.lm.fd_step)?;
        let jjt = &j * j.transpose() + DMatrix::identity(j.nrows(), j.nrows()) * 1e-14;
        let Some(w) = jjt.lu().solve(&(&j * &grad)) else { break };
        let proj: DVector<f64> = &grad - j.transpose() * w;
        let len = proj.norm();
        if len < 1e-12 {
            break;
        }
        let x_try: Vec<f64> = cur.x.iter().zip(proj.iter()).map(|(x, p)| x + 1e-3 * p / len).collect();
        let next = levenberg_marquardt(&f, &x_try, &opts.lm)?;
        if next.residual_norm >= opts.accept_tol {
            break;
        }
        let v = a(&next.x)?[0];
        if v - value < 1e-8 {
            if v > value {
                cur = next;
            }
            break;
        }
        value = v;
        cur = LmOutcome { iterations: cur.iterations + next.iterations, ..next };
    }
    Ok(cur)
}

/// Symmetry-reduced CZ representative: the orbit under `t₁ ↔ t₃` and the
/// joint flip `(t₁, t₃) → (−t₁, −t₃)`, preferring `t₃ ≥ t₁ ≥ 0`.
pub fn canonicalize_cz(t: &[f64]) -> (Vec<f64>, bool) {
    let (a, b, c) = (t[0], t[1], t[2]);
    let orbit = [[a, b, c], [c, b, a], [-a, b, -c], [-c, b, -a]];
    let score = |v: &[f64; 3]| u8::from(v[0] >= 0.0) + u8::from(v[2] >= v[0]);
    // ties broken by the first coordinate, then the last, so every orbit member maps to one representative
    let best = orbit
        .iter()
        .max_by(|x, y| score(x).cmp(&score(y)).then(y[0].total_cmp(&x[0])).then(y[2].total_cmp(&x[2])))
        .expect("nonempty");
    (best.to_vec(), score(best) == 2)
}

fn cmp_solutions(x: &SolverSolution, y: &SolverSolution) -> Ordering {
    y.amplitude
        .norm()
        .total_cmp(&x.amplitude.norm())
        .then_with(|| x.t.iter().zip(&y.t).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal))
}

/// Deterministic multi-start search. Seed points run first, then `starts`
/// uniform draws from `[−1, 1]^d`. Returns accepted, deduplicated solutions
/// sorted by `|A|` descending.
pub fn solve(problem: &ConditionProblem, opts: &SolveOptions) -> Result<SolveOutcome> {
    if opts.starts == 0 && opts.seed_points.is_empty() {
        return Err(Error::Domain("need at least one start".into()));
    }
    if let ConditionProblem::Tower { k } = problem {
        check_k(*k)?;
    }
    let d = problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<(bool, Vec<f64>)> = opts.seed_points.iter().map(|p| (true, p.clone())).collect();
    starts.extend((0..opts.starts).map(|_| (false, (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())));

    let run = |(i, (seeded, t0)): (usize, &(bool, Vec<f64>))| -> Result<(StartDiagnostic, Option<SolverSolution>)> {
        let (t, out) = refine(problem, t0, opts)?;
        let amplitude = problem.success_amplitude(&t)?;
        let accepted = out.residual_norm < opts.accept_tol && amplitude.norm() > DEGENERATE_AMPLITUDE;
        let diag = StartDiagnostic {
            index: i,
            seeded: *seeded,
            start: t0.clone(),
            residual_norm: out.residual_norm,
            amplitude: amplitude.norm(),
            iterations: out.iterations,
            accepted,
        };
        let sol = accepted.then(|| {
            let (t, canonical) = match problem {
                ConditionProblem::Ccz { .. } => (t, false),
                _ => canonicalize_cz(&t),
            };
            SolverSolution {
                t,
                residual_norm: out.residual_norm,
                amplitude,
                probability: amplitude.norm_sqr(),
                canonical_form_applied: canonical,
            }
        });
        Ok((diag, sol))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        starts.par_iter().enumerate().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = starts.iter().enumerate().map(run).collect::<Result<_>>()?;

    let (diagnostics, found): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut solutions: Vec<SolverSolution> = found.into_iter().flatten().collect();
    solutions.sort_by(cmp_solutions);
    let mut unique: Vec<SolverSolution> = Vec::new();
    for s in solutions {
        let dup = unique.iter().any(|u| u.t.iter().zip(&s.t).all(|(a, b)| (a - b).abs() < 1e-6));
        if !dup {
            unique.push(s);
        }
    }
    Ok(SolveOutcome { problem: *problem, solutions: unique, diagnostics })
}

/// Fits the transmittances of a `scheme` mesh so that it reproduces `target`
/// entry by entry. Returns the settings and the largest entry error.
pub fn fit_unitary(scheme: Scheme, target: &ComplexMatrix, t0: &[f64], opts: &LmOptions) -> Result<(Vec<f64>, f64)> {
    let m = target.rows();
    let layout = scheme.layout(m);
    if !target.is_square() || t0.len() != layout.mzi_count() {
        return Err(Error::Dimension(format!(
            "{} settings for a {}-MZI {} mesh on a {}×{} target",
            t0.len(),
            layout.mzi_count(),
            scheme.name(),
            target.rows(),
            target.cols()
        )));
    }
    check_t(t0)?;
    let f = |x: &[f64]| -> Result<Vec<f64>> {
        let u = build_network(&layout.with_transmittances(&to_t(x))?)?;
        Ok(u.as_slice().iter().zip(target.as_slice()).flat_map(|(a, b)| [(a - b).re, (a - b).im]).collect())
    };
    let out = levenberg_marquardt(&f, &to_angles(t0), opts)?;
    let t = to_t(&out.x);
    let err = build_network(&layout.with_transmittances(&t)?)?.max_abs_diff(target)?;
    Ok((t, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{CCZ_CLEMENTS_PRINTED, CCZ_RECK_PRINTED, CZ_PRINTED};

    fn norm(r: &[f64]) -> f64 {
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn printed_cz_nearly_satisfies() {
        assert!(norm(&cz_residuals(&CZ_PRINTED).unwrap()) < 1e-3);
        assert!(norm(&cz_residuals(&[1.0, 1.0, 1.0]).unwrap()) > 1e-2);
        let a = ConditionProblem::Cz.success_amplitude(&CZ_PRINTED).unwrap();
        assert!((a.norm() - 0.3904).abs() < 1e-4);
    }

    #[test]
    fn tower_reduces_to_cz() {
        for t in [CZ_PRINTED, [0.1, -0.7, 0.4], [1.0, 0.0, -1.0]] {
            let a = cz_residuals(&t).unwrap();
            let b = tower_residuals(&t, 1).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
        }
        assert!(tower_residuals(&CZ_PRINTED, 0).is_err());
    }

    #[test]
    fn printed_ccz_nearly_satisfies() {
        assert!(norm(&ccz_residuals(&CCZ_CLEMENTS_PRINTED, Scheme::Clements).unwrap()) < 2e-3);
        assert!(norm(&ccz_residuals(&CCZ_RECK_PRINTED, Scheme::Reck).unwrap()) < 2e-3);
        let a = ConditionProblem::Ccz { scheme: Scheme::Reck }.success_amplitude(&CCZ_RECK_PRINTED).unwrap();
        assert!((a.norm() - 0.163231).abs() < 1e-4);
    }

    #[test]
    fn term_counts_match_expression_sizes() {
        for (set, count) in CCZ_EXPRESSION_SETS.iter().zip(CCZ_TERM_COUNTS) {
            assert_eq!((1..=set.len()).product::<usize>(), count);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(cz_residuals(&[1.2, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(ConditionProblem::Cz.residuals(&[0.0; 4]).is_err());
    }

    #[test]
    fn canonical_form() {
        let (t, ok) = canonicalize_cz(&[-0.8686, -0.2192, -0.3686]);
        assert!(ok);
        assert_eq!(t, vec![0.3686, -0.2192, 0.8686]);
    }

    #[test]
    fn parse_problems() {
        assert_eq!("tower:4".parse::<ConditionProblem>().unwrap(), ConditionProblem::Tower { k: 4 });
        assert_eq!("ccz:reck".parse::<ConditionProblem>().unwrap(), ConditionProblem::Ccz { scheme: Scheme::Reck });
        assert!("tower:0".parse::<ConditionProblem>().is_err());
    }

    #[test]
    fn seeded_cz_converges() {
        let opts = SolveOptions { starts: 0, seed_points: vec![CZ_PRINTED.to_vec()], ..Default::default() };
        let out = solve(&ConditionProblem::Cz, &opts).unwrap();
        let s = out.best().unwrap();
        assert!(s.residual_norm < ACCEPT_TOL);
        assert!(s.t.iter().zip(CZ_PRINTED).all(|(a, b)| (a - b).abs() < 1e-4));
    }
}
