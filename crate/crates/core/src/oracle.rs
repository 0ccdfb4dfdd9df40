//! Independent numerical solvers for `min_p ||r_o - R p||^2 / 2` over the
//! probability simplex. They share nothing with the support enumeration
//! beyond the problem data and exist to cross-check it.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{dot, half_sq_dist, CoefficientVector, StateSet};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200_000;
pub const GRID_MAX_STATES: usize = 4;
pub const GRID_MAX_RESOLUTION: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    ProjectedGradient,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub distance: f64,
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub method: OracleMethod,
}

/// Euclidean projection onto `{p >= 0, sum p = 1}` (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

struct Quadratic {
    gram: DMatrix<f64>,
    proj: Vec<f64>,
    target_sq: f64,
}

impl Quadratic {
    fn new(target: &CoefficientVector, set: &StateSet) -> Result<Self> {
        if target.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: target.dim(),
            });
        }
        let m = set.members();
        let n = m.len();
        let gram = DMatrix::from_fn(n, n, |i, j| m[i].dot(&m[j]));
        let proj = m.iter().map(|r| r.dot(target)).collect();
        Ok(Self {
            gram,
            proj,
            target_sq: target.norm_sqr(),
        })
    }

    fn value(&self, p: &[f64]) -> f64 {
        let gp = self.gram_times(p);
        0.5 * (self.target_sq - 2.0 * dot(&self.proj, p) + dot(p, &gp))
    }

    fn gram_times(&self, p: &[f64]) -> Vec<f64> {
        let n = p.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.gram[(i, j)] * p[j]).sum())
            .collect()
    }
}

fn direct_distance(target: &CoefficientVector, set: &StateSet, p: &[f64]) -> Result<f64> {
    let mix = set.mixture(p)?;
    Ok(half_sq_dist(target.coeffs(), &mix))
}

/// Projected gradient descent with step `1/L`, `L = lambda_max(R^T R)`,
/// started from uniform weights.
///
/// Stops when the objective decrease is below `tol` and the gradient
/// mapping norm is below `sqrt(tol)`. Without convergence the best iterate
/// is returned with `converged = false`.
pub fn projected_gradient(
    target: &CoefficientVector,
    set: &StateSet,
    tol: f64,
    max_iter: usize,
) -> Result<OracleResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Format(format!(
            "oracle tolerance must be positive, got {tol}"
        )));
    }
    let q = Quadratic::new(target, set)?;
    let n = set.len();
    let lipschitz = SymmetricEigen::new(q.gram.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    let step = if lipschitz > 0.0 {
        1.0 / lipschitz
    } else {
        1.0
    };

    let mut p = vec![1.0 / n as f64; n];
    let mut value = q.value(&p);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let gp = q.gram_times(&p);
        let trial: Vec<f64> = p
            .iter()
            .zip(gp.iter().zip(&q.proj))
            .map(|(pi, (gi, ci))| pi - step * (gi - ci))
            .collect();
        let next = project_simplex(&trial);
        let next_value = q.value(&next);
        let mapping = next
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / step;
        let decrease = value - next_value;
        if next_value <= value {
            p = next;
            value = next_value;
        }
        if decrease < tol && mapping < tol.sqrt() {
            converged = true;
            break;
        }
    }
    Ok(OracleResult {
        distance: direct_distance(target, set, &p)?,
        weights: p,
        iterations,
        converged,
        method: OracleMethod::ProjectedGradient,
    })
}

/// Projected gradient with [`DEFAULT_TOL`] and [`DEFAULT_MAX_ITER`].
pub fn projected_gradient_default(
    target: &CoefficientVector,
    set: &StateSet,
) -> Result<OracleResult> {
    projected_gradient(target, set, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Exhaustive search over weights `j / resolution`.
pub fn grid_bruteforce(
    target: &CoefficientVector,
    set: &StateSet,
    resolution: usize,
) -> Result<OracleResult> {
    if set.len() > GRID_MAX_STATES {
        return Err(Error::OverCap {
            what: "grid state count",
            limit: GRID_MAX_STATES,
        });
    }
    if resolution > GRID_MAX_RESOLUTION {
        return Err(Error::OverCap {
            what: "grid resolution",
            limit: GRID_MAX_RESOLUTION,
        });
    }
    let resolution = resolution.max(1);
    let q = Quadratic::new(target, set)?;
    let n = set.len();

    let mut counts = vec![0usize; n];
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut evaluated = 0usize;
    let mut p = vec![0.0; n];
    visit(&mut counts, 0, resolution, &mut |c| {
        for (pi, &ci) in p.iter_mut().zip(c) {
            *pi = ci as f64 / resolution as f64;
        }
        evaluated += 1;
        let v = q.value(&p);
        if v < best.0 {
            best = (v, p.clone());
        }
    });
    let weights = best.1;
    Ok(OracleResult {
        distance: direct_distance(target, set, &weights)?,
        weights,
        iterations: evaluated,
        converged: true,
        method: OracleMethod::Grid,
    })
}

// Enumerates all compositions of `remaining` into `counts[pos..]`.
fn visit(counts: &mut [usize], pos: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        f(counts);
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        visit(counts, pos + 1, remaining - c, f);
    }
}
