//! Numerical sup-inf estimates of `M(G)`, `R(G)` and `D(G)`, and the orbit-distance trace.
//!
//! All values here are estimates. Inner suprema over the group come from multistart
//! Riemannian ascent and can only undershoot; outer optimization over sphere pairs
//! is local. Certified bounds come from [`crate::witness`] only.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{bracket_closure, LieAlgebraBasis};
use crate::numkernel::random::{random_unit_vector, stream_rng};
use crate::numkernel::{
    expm_skew, hermitian_inner, operator_norm, ComplexMatrix, ComplexVector, C64, DEFAULT_RANK_TOL,
};
use crate::system::{ControlSchedule, QuantumSystem, DRIFT_NORM_TOL};

/// Tolerance of the trace check `d(t) ≤ t`.
pub const TRACE_TOL: f64 = 1e-2;

/// Sufficient-increase fraction; rejects steps that overshoot past the quadratic model optimum.
const ARMIJO: f64 = 0.3;
const MIN_STEP: f64 = 1e-12;
/// Cap on `step · ‖direction‖` for one group move.
const MAX_ROTATION: f64 = std::f64::consts::FRAC_PI_2;
/// Cap on `step · ‖gradient‖` for one move on the sphere pair.
const MAX_SPHERE_MOVE: f64 = 0.5;
const OUTER_STREAM: u64 = 1 << 40;

/// Settings shared by every optimizer in this module.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub starts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub step_shrink: f64,
    pub conv_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 32,
            max_iters: 500,
            step_init: 0.5,
            step_shrink: 0.5,
            conv_tol: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Usage("starts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Usage("max_iters must be at least 1".into()));
        }
        if !(self.step_init.is_finite() && self.step_init > 0.0) {
            return Err(Error::Usage(format!(
                "step_init {} must be positive",
                self.step_init
            )));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::Usage(format!(
                "step_shrink {} must lie in (0, 1)",
                self.step_shrink
            )));
        }
        if !(self.conv_tol.is_finite() && self.conv_tol > 0.0) {
            return Err(Error::Usage(format!(
                "conv_tol {} must be positive",
                self.conv_tol
            )));
        }
        Ok(())
    }

    fn with_seed_and_starts(&self, seed: u64, starts: usize) -> Self {
        Self {
            seed,
            starts,
            ..self.clone()
        }
    }

    /// Outer iterations over sphere pairs.
    fn outer_iters(&self) -> usize {
        (self.max_iters / 5).max(1)
    }

    /// Outer multistart count.
    fn outer_starts(&self) -> usize {
        (self.starts / 4).max(1)
    }

    /// Inner starts per outer step (warm start and identity included).
    fn inner_starts(&self) -> usize {
        (self.starts / 8).max(2)
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    /// `|<gX, Y>|²`
    AbsSquared,
    /// `Re <gX, Y>`
    Real,
}

impl Objective {
    fn value(self, z: C64) -> f64 {
        match self {
            Objective::AbsSquared => z.norm_sqr(),
            Objective::Real => z.re,
        }
    }

    /// Derivative along `w = <L gX, Y>`.
    fn slope(self, z: C64, w: C64) -> f64 {
        match self {
            Objective::AbsSquared => 2.0 * (z.conj() * w).re,
            Objective::Real => w.re,
        }
    }
}

#[derive(Clone, Debug)]
struct Ascent {
    value: f64,
    z: C64,
    g: ComplexMatrix,
    converged: bool,
    evaluations: u64,
}

/// Steepest ascent on the group by left multiplication `g ← exp(s Σ cₗLₗ) g`
/// with Armijo backtracking.
fn ascend(
    basis: &LieAlgebraBasis,
    x: &ComplexVector,
    y: &ComplexVector,
    g0: ComplexMatrix,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> Result<Ascent> {
    let mut g = g0;
    let mut u = g.apply(x);
    let mut z = u.dot(y);
    let mut value = objective.value(z);
    let mut evaluations = 1u64;
    let mut converged = false;
    let mut step = cfg.step_init;
    for _ in 0..cfg.max_iters {
        let grad: Vec<f64> = basis
            .elements()
            .iter()
            .map(|l| objective.slope(z, l.apply(&u).dot(y)))
            .collect();
        let norm_sq: f64 = grad.iter().map(|c| c * c).sum();
        if norm_sq.sqrt() < cfg.conv_tol {
            converged = true;
            break;
        }
        let direction = basis.combine(&grad);
        let norm = norm_sq.sqrt();
        step = step.min(MAX_ROTATION / norm);
        let first_trial = step;
        let mut accepted = false;
        while step > MIN_STEP {
            let e = expm_skew(&direction, step)?;
            let u_new = e.apply(&u);
            let z_new = u_new.dot(y);
            let v_new = objective.value(z_new);
            evaluations += 1;
            if v_new >= value + ARMIJO * step * norm_sq {
                g = &e * &g;
                u = u_new;
                z = z_new;
                value = v_new;
                accepted = true;
                break;
            }
            step *= cfg.step_shrink;
        }
        if accepted && step == first_trial {
            step /= cfg.step_shrink;
        }
        if !accepted {
            // no ascent along the gradient at machine resolution: stationary
            converged = true;
            break;
        }
    }
    Ok(Ascent {
        value,
        z,
        g,
        converged,
        evaluations,
    })
}

/// Best of several ascents: the explicit starts first, then `random` group elements drawn
/// from streams `(seed, 0..random)`. Ties go to the lowest start index.
fn best_ascent(
    basis: &LieAlgebraBasis,
    x: &ComplexVector,
    y: &ComplexVector,
    explicit: Vec<ComplexMatrix>,
    random: usize,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> Result<(Ascent, u64)> {
    let count = explicit.len() + random;
    let runs: Vec<Result<Ascent>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let g0 = if i < explicit.len() {
                explicit[i].clone()
            } else {
                let mut rng = stream_rng(cfg.seed, (i - explicit.len()) as u64);
                basis.random_group_element(&mut rng)
            };
            ascend(basis, x, y, g0, objective, cfg)
        })
        .collect();
    let mut best: Option<Ascent> = None;
    let mut evaluations = 0;
    for run in runs {
        let run = run?;
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    Ok((best.expect("at least one start"), evaluations))
}

/// Numerical `sup_g |<gX,Y>|` and `sup_g Re<gX,Y>`.
#[derive(Clone, Debug)]
pub struct OverlapOptimum {
    pub abs_max: f64,
    pub re_max: f64,
    pub g_best: ComplexMatrix,
    pub converged: bool,
    pub evaluations: u64,
}

fn check_pair(basis: &LieAlgebraBasis, x: &ComplexVector, y: &ComplexVector) -> Result<()> {
    if !basis.is_closed() {
        return Err(Error::Precondition(
            "overlap optimization needs a bracket-closed basis".into(),
        ));
    }
    for (name, v) in [("X", x), ("Y", y)] {
        if v.dim() != basis.n() {
            return Err(Error::Usage(format!(
                "{name} has dimension {}, algebra acts on ℂ^{}",
                v.dim(),
                basis.n()
            )));
        }
        if (v.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Usage(format!("‖{name}‖ = {} is not 1", v.norm())));
        }
    }
    Ok(())
}

fn sup_overlap_from(
    basis: &LieAlgebraBasis,
    x: &ComplexVector,
    y: &ComplexVector,
    explicit: Vec<ComplexMatrix>,
    cfg: &OptimizerConfig,
) -> Result<OverlapOptimum> {
    let random = cfg.starts.saturating_sub(explicit.len());
    let (abs, e1) = best_ascent(
        basis,
        x,
        y,
        explicit.clone(),
        random,
        Objective::AbsSquared,
        cfg,
    )?;
    let (re, e2) = best_ascent(basis, x, y, explicit, random, Objective::Real, cfg)?;
    let abs_at_abs = abs.z.norm();
    let abs_at_re = re.z.norm();
    let (abs_max, g_best, converged) = if abs_at_re > abs_at_abs {
        (abs_at_re, re.g.clone(), re.converged)
    } else {
        (abs_at_abs, abs.g, abs.converged)
    };
    Ok(OverlapOptimum {
        abs_max,
        re_max: re.value.max(abs.z.re),
        g_best,
        converged: converged && re.converged,
        evaluations: e1 + e2,
    })
}

/// Multistart ascent for `sup_g |<gX,Y>|` (and the real part). Start 0 is the identity,
/// start `i ≥ 1` is drawn from stream `(cfg.seed, i − 1)`.
pub fn sup_overlap(
    basis: &LieAlgebraBasis,
    x: &ComplexVector,
    y: &ComplexVector,
    cfg: &OptimizerConfig,
) -> Result<OverlapOptimum> {
    cfg.validate()?;
    check_pair(basis, x, y)?;
    sup_overlap_from(basis, x, y, vec![ComplexMatrix::identity(basis.n())], cfg)
}

/// Projects `v` onto the tangent space of the sphere at `p`.
fn tangent(v: &ComplexVector, p: &ComplexVector) -> ComplexVector {
    let mut t = v.clone();
    t.axpy(C64::new(-v.real_inner(p), 0.0), p);
    t
}

fn retract(p: &ComplexVector, v: &ComplexVector, step: f64) -> ComplexVector {
    let mut q = p.clone();
    q.axpy(C64::new(-step, 0.0), v);
    q.normalized().unwrap_or_else(|_| p.clone())
}

#[derive(Clone, Debug)]
struct PairSearch {
    x: ComplexVector,
    y: ComplexVector,
    converged: bool,
    evaluations: u64,
}

/// Minimizes `φ(X, Y) = sup_g obj(<gX, Y>)` over pairs of unit vectors by projected
/// descent, using the envelope gradient at the best `g` of each inner solve.
fn minimize_over_pairs(
    basis: &LieAlgebraBasis,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> Result<Vec<PairSearch>> {
    let n = basis.n();
    (0..cfg.outer_starts())
        .into_par_iter()
        .map(|j| -> Result<PairSearch> {
            let mut rng = stream_rng(cfg.seed, OUTER_STREAM + j as u64);
            let mut x = random_unit_vector(n, &mut rng);
            let mut y = random_unit_vector(n, &mut rng);
            let inner_cfg =
                cfg.with_seed_and_starts(splitmix(cfg.seed ^ j as u64), cfg.inner_starts());
            let solve = |x: &ComplexVector, y: &ComplexVector, warm: &ComplexMatrix| {
                best_ascent(
                    basis,
                    x,
                    y,
                    vec![warm.clone(), ComplexMatrix::identity(n)],
                    inner_cfg.starts - 2,
                    objective,
                    &inner_cfg,
                )
            };
            let (mut inner, mut evaluations) = solve(&x, &y, &ComplexMatrix::identity(n))?;
            let mut converged = false;
            let mut step = cfg.step_init;
            for _ in 0..cfg.outer_iters() {
                let u = inner.g.apply(&x);
                let v = inner.g.adjoint().apply(&y);
                let (gx, gy) = match objective {
                    Objective::AbsSquared => {
                        (v.scale(inner.z * 2.0), u.scale(inner.z.conj() * 2.0))
                    }
                    Objective::Real => (v, u),
                };
                let gx = tangent(&gx, &x);
                let gy = tangent(&gy, &y);
                let norm_sq = gx.norm().powi(2) + gy.norm().powi(2);
                if norm_sq.sqrt() < cfg.conv_tol {
                    converged = true;
                    break;
                }
                step = step.min(MAX_SPHERE_MOVE / norm_sq.sqrt());
                let first_trial = step;
                let mut accepted = false;
                while step > 1e-10 {
                    let xn = retract(&x, &gx, step);
                    let yn = retract(&y, &gy, step);
                    let (trial, e) = solve(&xn, &yn, &inner.g)?;
                    evaluations += e;
                    if trial.value <= inner.value - ARMIJO * step * norm_sq {
                        x = xn;
                        y = yn;
                        inner = trial;
                        accepted = true;
                        break;
                    }
                    step *= cfg.step_shrink;
                }
                if accepted && step == first_trial {
                    step /= cfg.step_shrink;
                }
                if !accepted {
                    converged = true;
                    break;
                }
            }
            Ok(PairSearch {
                x,
                y,
                converged,
                evaluations,
            })
        })
        .collect()
}

/// Outer search followed by a full multistart `sup_overlap` at every candidate pair;
/// returns the candidate with the smallest re-evaluated `key`.
fn best_pair(
    basis: &LieAlgebraBasis,
    objective: Objective,
    cfg: &OptimizerConfig,
) -> Result<(PairSearch, OverlapOptimum, u64)> {
    cfg.validate()?;
    if !basis.is_closed() {
        return Err(Error::Precondition(
            "estimation needs a bracket-closed basis".into(),
        ));
    }
    let key = |o: &OverlapOptimum| match objective {
        Objective::AbsSquared => o.abs_max,
        Objective::Real => o.re_max,
    };
    let mut best: Option<(PairSearch, OverlapOptimum)> = None;
    let mut evaluations = 0;
    for search in minimize_over_pairs(basis, objective, cfg)? {
        let full = sup_overlap_from(
            basis,
            &search.x,
            &search.y,
            vec![ComplexMatrix::identity(basis.n())],
            cfg,
        )?;
        evaluations += search.evaluations + full.evaluations;
        if best.as_ref().is_none_or(|(_, b)| key(&full) < key(b)) {
            best = Some((search, full));
        }
    }
    let (search, full) = best.expect("at least one outer start");
    Ok((search, full, evaluations))
}

/// Estimate of `M(G) = inf_{X,Y} sup_g |<gX,Y>|`: the smallest full-multistart inner
/// supremum over the pairs found by the outer descent.
pub fn estimate_m(basis: &LieAlgebraBasis, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(best_pair(basis, Objective::AbsSquared, cfg)?.1.abs_max)
}

/// Numerical diameter estimate with the overlaps at the returned pair.
#[derive(Clone, Debug)]
pub struct DiameterEstimate {
    pub d_est: f64,
    pub m_est: f64,
    pub r_est: f64,
    pub argmax_pair: (ComplexVector, ComplexVector),
    pub converged: bool,
    pub evaluations: u64,
}

impl DiameterEstimate {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_est >= 0.0 && (0.0..=1.0 + 1e-12).contains(&self.m_est)) {
            return Err(Error::Internal(format!(
                "estimate out of range: D = {}, M = {}",
                self.d_est, self.m_est
            )));
        }
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&self.r_est) {
            return Err(Error::Internal(format!(
                "R estimate {} outside [-1, 1]",
                self.r_est
            )));
        }
        if self.m_est < self.r_est - 1e-8 {
            return Err(Error::Internal(format!(
                "M estimate {} below R estimate {}",
                self.m_est, self.r_est
            )));
        }
        if self.d_est.powi(2) > 2.0 * (1.0 - self.r_est) + 1e-6 {
            return Err(Error::Internal(format!(
                "D estimate {} inconsistent with R estimate {}",
                self.d_est, self.r_est
            )));
        }
        Ok(())
    }
}

/// Estimate of `D(G)` via `D² = 2 sup_{X,Y} inf_g (1 − Re<gX,Y>)`. `R_est` and `M_est`
/// are full multistart suprema at the returned pair and `D_est = √(2(1 − R_est))`.
pub fn estimate_d(basis: &LieAlgebraBasis, cfg: &OptimizerConfig) -> Result<DiameterEstimate> {
    let (search, full, evaluations) = best_pair(basis, Objective::Real, cfg)?;
    let r_est = full.re_max.clamp(-1.0, 1.0);
    let estimate = DiameterEstimate {
        d_est: (2.0 * (1.0 - r_est)).max(0.0).sqrt(),
        m_est: full.abs_max.min(1.0),
        r_est,
        argmax_pair: (search.x, search.y),
        converged: search.converged && full.converged,
        evaluations,
    };
    estimate.validate()?;
    Ok(estimate)
}

/// One sample of [`orbit_distance_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub d_numeric: f64,
    pub sphere_bound: f64,
}

impl TracePoint {
    pub fn within_bound(&self) -> bool {
        self.d_numeric <= self.sphere_bound + TRACE_TOL
    }
}

/// Integrates the system under `schedule` from `x0` and records, at `samples` evenly spaced
/// times in `[0, horizon]`, the arc distance `d(t) = inf_g dist_S(X(0), g X(t))` over the
/// control group against the speed bound `t`.
pub fn orbit_distance_trace(
    system: &QuantumSystem,
    schedule: &ControlSchedule,
    x0: &ComplexVector,
    horizon: f64,
    samples: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<TracePoint>> {
    cfg.validate()?;
    let norm = operator_norm(system.drift())?;
    if (norm - 1.0).abs() > DRIFT_NORM_TOL {
        return Err(Error::Domain(format!(
            "drift has operator norm {norm}, expected 1"
        )));
    }
    if x0.dim() != system.n() || (x0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Usage(
            "initial state must be a unit vector of the state space".into(),
        ));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Usage(format!("horizon {horizon} must be positive")));
    }
    if samples < 2 {
        return Err(Error::Usage("trace needs at least 2 samples".into()));
    }
    schedule.validate(system.controls().len())?;
    if schedule.total_duration() < horizon - 1e-12 {
        return Err(Error::Usage(format!(
            "schedule covers {} time units, horizon is {horizon}",
            schedule.total_duration()
        )));
    }
    let basis = bracket_closure(system.controls(), DEFAULT_RANK_TOL)?;
    let times: Vec<f64> = (0..samples)
        .map(|i| horizon * i as f64 / (samples - 1) as f64)
        .collect();
    let mut states = Vec::with_capacity(samples);
    let mut x = x0.clone();
    let mut t_prev = 0.0;
    for &t in &times {
        x = schedule.propagator(system, t_prev, t)?.apply(&x);
        x = x.normalized()?;
        states.push(x.clone());
        t_prev = t;
    }
    times
        .iter()
        .zip(&states)
        .map(|(&t, xt)| {
            let o = sup_overlap(&basis, xt, x0, cfg)?;
            Ok(TracePoint {
                t,
                d_numeric: o.re_max.clamp(-1.0, 1.0).acos(),
                sphere_bound: t,
            })
        })
        .collect()
}

/// `|<X, Y>|` convenience used by reports and tests.
pub fn overlap_at_identity(x: &ComplexVector, y: &ComplexVector) -> Result<f64> {
    Ok(hermitian_inner(x, y)?.norm())
}
