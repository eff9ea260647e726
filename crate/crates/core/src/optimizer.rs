//! Composite surrogate objective `G(y) = sum_l w_l y_l(x)^2` and its
//! minimization over a box.
//!
//! The local solver is a projected limited-memory BFGS: variables pinned at a
//! bound with the gradient pushing outward are frozen, the two-loop recursion
//! runs on the free variables, and an Armijo backtracking search is done along
//! the projected path. Several starts (corner-biased plus Latin hypercube) are
//! run and the best end point is kept.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::bayes_lm::{FittedModel, SigmaMode};
use crate::dataset::ScaledDomain;
use crate::designgen::LhsDesign;
use crate::error::{Error, Result};
use crate::polybasis::BasisSpec;

/// Output weights of the sum-of-squares objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Objective {
    weights: Vec<f64>,
}

impl Objective {
    /// Plain sum of squares over `m` outputs.
    pub fn sum_of_squares(m: usize) -> Self {
        Self {
            weights: vec![1.0; m],
        }
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument(
                "objective weights must be finite and nonnegative".into(),
            ));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidArgument("objective weights are all zero".into()));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// `G` for one coefficient set (`m x p`, row per output) on a basis.
#[derive(Clone, Copy)]
pub struct Surrogate<'a> {
    basis: &'a BasisSpec,
    betas: &'a DMatrix<f64>,
    objective: &'a Objective,
}

impl<'a> Surrogate<'a> {
    pub fn new(basis: &'a BasisSpec, betas: &'a DMatrix<f64>, objective: &'a Objective) -> Result<Self> {
        if betas.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: betas.ncols(),
            });
        }
        if betas.nrows() != objective.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: objective.weights.len(),
                found: betas.nrows(),
            });
        }
        Ok(Self {
            basis,
            betas,
            objective,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn responses(&self, feats: &[f64]) -> Vec<f64> {
        (0..self.betas.nrows())
            .map(|l| {
                self.betas
                    .row(l)
                    .iter()
                    .zip(feats)
                    .map(|(b, f)| b * f)
                    .sum()
            })
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let feats = self.basis.expand(x)?;
        Ok(self
            .responses(&feats)
            .iter()
            .zip(&self.objective.weights)
            .map(|(y, w)| w * y * y)
            .sum())
    }

    /// `grad G = sum_l 2 w_l y_l J^T beta_l` with `J` the feature Jacobian.
    pub fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let feats = self.basis.expand(x)?;
        let jac = self.basis.gradient(x)?;
        let ys = self.responses(&feats);
        let d = self.dim();
        let mut grad = vec![0.0; d];
        let mut value = 0.0;
        for (l, (&y, &w)) in ys.iter().zip(&self.objective.weights).enumerate() {
            value += w * y * y;
            if w == 0.0 || y == 0.0 {
                continue;
            }
            for (k, g) in grad.iter_mut().enumerate() {
                let dy: f64 = (0..jac.nrows()).map(|j| jac[(j, k)] * self.betas[(l, j)]).sum();
                *g += 2.0 * w * y * dy;
            }
        }
        Ok((value, grad))
    }
}

pub fn eval_objective(basis: &BasisSpec, betas: &DMatrix<f64>, obj: &Objective, x: &[f64]) -> Result<f64> {
    Surrogate::new(basis, betas, obj)?.value(x)
}

pub fn eval_gradient(basis: &BasisSpec, betas: &DMatrix<f64>, obj: &Objective, x: &[f64]) -> Result<Vec<f64>> {
    Ok(Surrogate::new(basis, betas, obj)?.value_and_gradient(x)?.1)
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument("bounds must have equal, nonzero length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::InvalidArgument("box is degenerate or unbounded".into()));
        }
        Ok(Self { lower, upper })
    }

    /// The coded box `[-1, 1]^d`.
    pub fn coded(d: usize) -> Self {
        Self {
            lower: vec![-1.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Euclidean norm of `P(x - g) - x`.
    pub fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        x.iter()
            .zip(g)
            .enumerate()
            .map(|(k, (&xi, &gi))| {
                let t = (xi - gi).clamp(self.lower[k], self.upper[k]) - xi;
                t * t
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimSettings {
    /// Total number of starts.
    pub starts: usize,
    pub memory: usize,
    pub max_iter: usize,
    pub pg_tol: f64,
    pub step_tol: f64,
    /// Seed and sub-stream for the Latin hypercube starts.
    pub seed: u64,
    pub stream: u64,
}

impl Default for OptimSettings {
    fn default() -> Self {
        Self {
            starts: 16,
            memory: 10,
            max_iter: 500,
            pg_tol: 1e-8,
            step_tol: 1e-12,
            seed: 0,
            stream: 0,
        }
    }
}

/// Outcome of one local run.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalResult {
    pub start: Vec<f64>,
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub pg_norm: f64,
}

/// Projected L-BFGS from one start point.
pub fn local_minimize(problem: &Surrogate<'_>, bounds: &Bounds, start: &[f64], settings: &OptimSettings) -> Result<LocalResult> {
    let d = bounds.dim();
    if start.len() != d || problem.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: start.len(),
        });
    }
    let mut x = start.to_vec();
    bounds.project(&mut x);
    let (mut f, mut g) = problem.value_and_gradient(&x)?;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(settings.memory);
    let mut converged = false;
    let mut iterations = 0;
    let mut pg = bounds.projected_gradient_norm(&x, &g);

    while iterations < settings.max_iter {
        if pg <= settings.pg_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let free: Vec<bool> = (0..d)
            .map(|k| {
                let at_lower = x[k] <= bounds.lower[k] && g[k] > 0.0;
                let at_upper = x[k] >= bounds.upper[k] && g[k] < 0.0;
                !(at_lower || at_upper)
            })
            .collect();

        let mut step = None;
        for attempt in 0..2 {
            if attempt == 1 {
                if memory.is_empty() {
                    break;
                }
                memory.clear();
            }
            let dir = search_direction(&g, &free, &memory);
            if let Some(s) = line_search(problem, bounds, &x, f, &g, &dir, memory.is_empty())? {
                step = Some(s);
                break;
            }
        }
        let Some((x_new, f_new, g_new)) = step else {
            break;
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let step_norm = dot(&s, &s).sqrt();
        if sy > 1e-12 * step_norm * dot(&y, &y).sqrt() && sy > 0.0 {
            if memory.len() == settings.memory {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        f = f_new;
        g = g_new;
        pg = bounds.projected_gradient_norm(&x, &g);
        if step_norm <= settings.step_tol {
            converged = true;
            break;
        }
    }
    if pg <= settings.pg_tol {
        converged = true;
    }
    Ok(LocalResult {
        start: start.to_vec(),
        x,
        value: f,
        converged,
        iterations,
        pg_norm: pg,
    })
}

fn search_direction(g: &[f64], free: &[bool], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mask = |v: &mut Vec<f64>| {
        for (vi, &f) in v.iter_mut().zip(free) {
            if !f {
                *vi = 0.0;
            }
        }
    };
    let mut q = g.to_vec();
    mask(&mut q);
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * masked_dot(s, &q, free);
        for ((qi, yi), &f) in q.iter_mut().zip(y).zip(free) {
            if f {
                *qi -= a * yi;
            }
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let yy = masked_dot(y, y, free);
        let sy = masked_dot(s, y, free);
        if yy > 0.0 && sy > 0.0 {
            let gamma = sy / yy;
            q.iter_mut().for_each(|v| *v *= gamma);
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
        let b = rho * masked_dot(y, &q, free);
        for ((qi, si), &f) in q.iter_mut().zip(s).zip(free) {
            if f {
                *qi += (a - b) * si;
            }
        }
    }
    mask(&mut q);
    let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
    // fall back to steepest descent on the free set if not a descent direction
    let gd = dot(g, &dir);
    if !(gd < 0.0) || !gd.is_finite() {
        dir = g.iter().map(|v| -v).collect();
        mask(&mut dir);
    }
    dir
}

#[allow(clippy::type_complexity)]
fn line_search(
    problem: &Surrogate<'_>,
    bounds: &Bounds,
    x: &[f64],
    f: f64,
    g: &[f64],
    dir: &[f64],
    first: bool,
) -> Result<Option<(Vec<f64>, f64, Vec<f64>)>> {
    const ARMIJO: f64 = 1e-4;
    let dmax = dir.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if dmax == 0.0 || !dmax.is_finite() {
        return Ok(None);
    }
    // Without curvature information, cap the first trial step at one unit.
    let mut t = if first { (1.0 / dmax).min(1.0) } else { 1.0 };
    let mut trial = vec![0.0; x.len()];
    for _ in 0..60 {
        for k in 0..x.len() {
            trial[k] = x[k] + t * dir[k];
        }
        bounds.project(&mut trial);
        let decrease: f64 = g.iter().zip(trial.iter().zip(x)).map(|(gi, (a, b))| gi * (a - b)).sum();
        if decrease < 0.0 {
            let (f_new, g_new) = problem.value_and_gradient(&trial)?;
            if f_new <= f + ARMIJO * decrease {
                return Ok(Some((trial, f_new, g_new)));
            }
        } else if trial.iter().zip(x).all(|(a, b)| a == b) {
            return Ok(None);
        }
        t *= 0.5;
    }
    Ok(None)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn masked_dot(a: &[f64], b: &[f64], free: &[bool]) -> f64 {
    a.iter()
        .zip(b)
        .zip(free)
        .filter(|(_, &f)| f)
        .map(|((x, y), _)| x * y)
        .sum()
}

/// Start points: `2^min(d, 4)` corner-biased points (half-way from the centre to
/// each corner of the first four dimensions) followed by Latin hypercube points.
pub fn start_points(bounds: &Bounds, settings: &OptimSettings) -> Result<Vec<Vec<f64>>> {
    let d = bounds.dim();
    let total = settings.starts.max(1);
    let corner_dims = d.min(4);
    let n_corners = (1usize << corner_dims).min(total);
    let centre: Vec<f64> = (0..d).map(|k| 0.5 * (bounds.lower[k] + bounds.upper[k])).collect();
    let half: Vec<f64> = (0..d).map(|k| 0.5 * (bounds.upper[k] - bounds.lower[k])).collect();
    let mut starts = Vec::with_capacity(total);
    for c in 0..n_corners {
        let mut x = centre.clone();
        for k in 0..corner_dims {
            let sign = if c >> k & 1 == 1 { 1.0 } else { -1.0 };
            x[k] += 0.5 * sign * half[k];
        }
        starts.push(x);
    }
    let n_lhs = total - n_corners;
    if n_lhs > 0 {
        let des = LhsDesign::generate_stream(n_lhs, d, settings.seed, settings.stream)?;
        for i in 0..n_lhs {
            starts.push(
                (0..d)
                    .map(|k| bounds.lower[k] + des.points()[(i, k)] * (bounds.upper[k] - bounds.lower[k]))
                    .collect(),
            );
        }
    }
    Ok(starts)
}

/// Best local result over the multi-start set, ties broken by the
/// lexicographically smallest point.
pub fn minimize_in_box(problem: &Surrogate<'_>, bounds: &Bounds, settings: &OptimSettings) -> Result<(LocalResult, usize)> {
    let starts = start_points(bounds, settings)?;
    let mut best: Option<LocalResult> = None;
    for s in &starts {
        let r = local_minimize(problem, bounds, s, settings)?;
        let better = match &best {
            None => true,
            Some(b) => r.value < b.value || (r.value == b.value && lex_less(&r.x, &b.x)),
        };
        if better {
            best = Some(r);
        }
    }
    Ok((best.expect("at least one start"), starts.len()))
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimResult {
    pub x_star: Vec<f64>,
    pub x_star_coded: Vec<f64>,
    pub objective_value: f64,
    pub starts_used: usize,
    pub converged: bool,
    pub iterations: usize,
    pub projected_gradient_norm: f64,
}

/// Minimizes `G` over the coded box and reports the optimum in physical units.
pub fn minimize(
    basis: &BasisSpec,
    betas: &DMatrix<f64>,
    obj: &Objective,
    domain: &ScaledDomain,
    settings: &OptimSettings,
) -> Result<OptimResult> {
    if domain.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: domain.dim(),
        });
    }
    let problem = Surrogate::new(basis, betas, obj)?;
    let bounds = Bounds::coded(basis.dim());
    let (best, starts_used) = minimize_in_box(&problem, &bounds, settings)?;
    let mut x_star = domain.from_coded(&best.x)?;
    for (v, s) in x_star.iter_mut().zip(domain.specs()) {
        *v = s.clamp(*v);
    }
    Ok(OptimResult {
        x_star,
        objective_value: best.value,
        x_star_coded: best.x,
        starts_used,
        converged: best.converged,
        iterations: best.iterations,
        projected_gradient_norm: best.pg_norm,
    })
}

/// Point-estimate optimum of a fitted model.
pub fn minimize_model(model: &FittedModel, obj: &Objective, settings: &OptimSettings) -> Result<OptimResult> {
    minimize(model.basis(), &model.beta_hat_matrix(), obj, model.domain(), settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quantiles {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Linear interpolation between order statistics (`(n - 1) q` positions).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

fn summarize(values: &[f64]) -> Option<Quantiles> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(Quantiles {
        median: quantile_sorted(&sorted, 0.5),
        q25: quantile_sorted(&sorted, 0.25),
        q75: quantile_sorted(&sorted, 0.75),
    })
}

/// Optimal decisions under `R` posterior draws.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionEnsemble {
    pub names: Vec<String>,
    /// `R x d`, physical units.
    pub decisions: DMatrix<f64>,
    pub objective_values: Vec<f64>,
    pub converged: Vec<bool>,
    /// Per-dimension summaries over converged draws; `None` when no draw converged.
    pub summaries: Vec<Option<Quantiles>>,
    pub seed: u64,
}

impl DecisionEnsemble {
    pub fn len(&self) -> usize {
        self.objective_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objective_values.is_empty()
    }

    pub fn non_converged(&self) -> usize {
        self.converged.iter().filter(|c| !**c).count()
    }

    pub fn converged_column(&self, k: usize) -> Vec<f64> {
        self.decisions
            .column(k)
            .iter()
            .zip(&self.converged)
            .filter(|(_, &c)| c)
            .map(|(v, _)| *v)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["draw_index".to_string(), "converged".to_string()];
        header.extend(self.names.iter().cloned());
        header.push("objective_value".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec = vec![i.to_string(), self.converged[i].to_string()];
            rec.extend(self.decisions.row(i).iter().map(|v| format!("{v}")));
            rec.push(format!("{}", self.objective_values[i]));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn summary(&self, point: &OptimResult) -> EnsembleSummary {
        EnsembleSummary {
            dimensions: self
                .names
                .iter()
                .zip(&self.summaries)
                .map(|(name, q)| DimensionSummary {
                    name: name.clone(),
                    median: q.map(|q| q.median),
                    q25: q.map(|q| q.q25),
                    q75: q.map(|q| q.q75),
                })
                .collect(),
            point_estimate: point.clone(),
            minimum_objective: point.objective_value,
            draws: self.len(),
            converged_draws: self.len() - self.non_converged(),
            non_converged_draws: self.non_converged(),
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionSummary {
    pub name: String,
    pub median: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub dimensions: Vec<DimensionSummary>,
    pub point_estimate: OptimResult,
    pub minimum_objective: f64,
    pub draws: usize,
    pub converged_draws: usize,
    pub non_converged_draws: usize,
    pub seed: u64,
}

/// Draws `r` coefficient sets from the posterior and minimizes `G` under each.
/// Draw `i` uses posterior stream `i` and multi-start stream `i` of `seed`.
pub fn decision_ensemble(
    model: &FittedModel,
    obj: &Objective,
    r: usize,
    seed: u64,
    mode: SigmaMode,
    settings: &OptimSettings,
) -> Result<DecisionEnsemble> {
    if r == 0 {
        return Err(Error::InvalidArgument("number of draws must be >= 1".into()));
    }
    let sampler = model.sampler(seed, mode);
    let results: Vec<OptimResult> = (0..r as u64)
        .into_par_iter()
        .map(|i| {
            let draw = sampler.draw(i);
            let s = OptimSettings {
                seed,
                stream: i,
                ..settings.clone()
            };
            minimize(model.basis(), &draw.betas, obj, model.domain(), &s)
        })
        .collect::<Result<_>>()?;
    let d = model.d();
    let decisions = DMatrix::from_fn(r, d, |i, k| results[i].x_star[k]);
    let converged: Vec<bool> = results.iter().map(|o| o.converged).collect();
    let nc = converged.iter().filter(|c| !**c).count();
    if nc > 0 {
        log::warn!("{nc} of {r} posterior draws did not converge; excluded from quantiles");
    }
    let mut ens = DecisionEnsemble {
        names: model.domain().specs().iter().map(|s| s.name.clone()).collect(),
        decisions,
        objective_values: results.iter().map(|o| o.objective_value).collect(),
        converged,
        summaries: Vec::new(),
        seed,
    };
    ens.summaries = (0..d).map(|k| summarize(&ens.converged_column(k))).collect();
    Ok(ens)
}
