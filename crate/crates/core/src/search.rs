//! Search over supports for the closest convex mixture.
//!
//! Every candidate answer comes from the support system in [`crate::kkt`].
//! Two strategies pick which supports to solve:
//!
//! * [`Strategy::Exhaustive`] solves every support of size at most
//!   `min(N, d^2)`, level by level from the largest size down, and keeps
//!   the minimum over all feasible ones.
//! * [`Strategy::Auto`] first walks to the optimal mixture with a
//!   nearest-point active-set iteration (each step is a support solve),
//!   then enumerates only subsets of the optimal face, smallest first.
//!   Any support attaining the optimum lies on that face, so the result
//!   matches the exhaustive one at a fraction of the cost.
//!
//! Either strategy falls back to the projected-gradient oracle plus
//! [`caratheodory_reduce`] once the number of supports exceeds the budget.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kkt::{clamp_feasible, InnerProducts, SupportOutcome, SupportSystem};
use crate::oracle;
use crate::state::{half_sq_dist, CoefficientVector, StateSet, TargetFamily};

/// Default cap on the number of supports solved in one search.
pub const DEFAULT_BUDGET: usize = 1_000_000;
/// Distances within this of the optimum count as optimal for minimal `n`.
pub const DISTANCE_TIE_TOL: f64 = 1e-9;
/// Lower bound on directional derivatives accepted as optimal.
pub const CERTIFICATE_TOL: f64 = 1e-8;
/// Members closer than this (max abs difference) are merged before search.
pub const DUPLICATE_TOL: f64 = 1e-12;
/// Directional-derivative slack for membership in the optimal face.
const FACE_TOL: f64 = 1e-7;
const DEFAULT_TRACE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Auto,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Maximum number of supports to solve before falling back.
    pub budget: usize,
    pub strategy: Strategy,
    /// Evaluate the supports of a level on the rayon pool.
    pub parallel: bool,
    /// Maximum number of per-support entries kept in the trace.
    pub trace_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            strategy: Strategy::Auto,
            parallel: true,
            trace_limit: DEFAULT_TRACE_LIMIT,
        }
    }
}

impl SearchOptions {
    pub fn exhaustive() -> Self {
        Self {
            strategy: Strategy::Exhaustive,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// Indices into the original set.
    pub support: Vec<usize>,
    pub outcome: SupportOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub feasible: usize,
    pub infeasible_sign: usize,
    pub rank_deficient: usize,
}

impl OutcomeCounts {
    fn add(&mut self, outcome: SupportOutcome) {
        match outcome {
            SupportOutcome::Feasible => self.feasible += 1,
            SupportOutcome::InfeasibleSign => self.infeasible_sign += 1,
            SupportOutcome::RankDeficient => self.rank_deficient += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.feasible + self.infeasible_sign + self.rank_deficient
    }
}

/// Diagnostic record of the supports that were solved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaseTrace {
    pub entries: Vec<TraceEntry>,
    /// More supports were solved than `entries` holds.
    pub truncated: bool,
    pub counts: OutcomeCounts,
    /// Set when the budget forced the oracle fallback.
    pub fallback: Option<String>,
}

/// Optimal mixture of a [`StateSet`] for one target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxSolution {
    pub distance: f64,
    /// One weight per member of the original set, zero off the support.
    pub weights: Vec<f64>,
    pub support: Vec<usize>,
    pub minimal_n: usize,
    pub evaluated_supports: usize,
    pub strategy: Strategy,
    /// `(dropped, kept)` pairs for members merged as duplicates.
    pub duplicates: Vec<(usize, usize)>,
    pub case_trace: CaseTrace,
}

impl ApproxSolution {
    /// Weights restricted to the support, in support order.
    pub fn support_weights(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.weights[i]).collect()
    }
}

/// Solves with [`SearchOptions::default`].
pub fn solve(target: &CoefficientVector, set: &StateSet) -> Result<ApproxSolution> {
    solve_with(target, set, &SearchOptions::default())
}

pub fn solve_with(
    target: &CoefficientVector,
    set: &StateSet,
    opts: &SearchOptions,
) -> Result<ApproxSolution> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if target.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: target.dim(),
        });
    }

    let (reps, duplicates) = deduplicate(set);
    if !duplicates.is_empty() {
        log::warn!(
            "merged {} duplicate state(s) before search: {:?}",
            duplicates.len(),
            duplicates
        );
    }
    let members: Vec<&[f64]> = reps.iter().map(|&i| set.members()[i].coeffs()).collect();
    let table = InnerProducts::new(target.coeffs(), &members);
    let max_level = reps.len().min(set.dim() * set.dim());

    let mut search = Search {
        table: &table,
        reps: &reps,
        opts,
        trace: CaseTrace::default(),
        evaluated: 0,
    };

    let found = match opts.strategy {
        Strategy::Auto => match search.face_search(max_level)? {
            Some(best) => Some(best),
            None => search.exhaustive(max_level)?,
        },
        Strategy::Exhaustive => search.exhaustive(max_level)?,
    };
    let best = match found {
        Some(best) => best,
        None => search.fallback(target, set)?,
    };

    let mut weights = vec![0.0; set.len()];
    let support: Vec<usize> = best.support.iter().map(|&u| reps[u]).collect();
    for (&i, &w) in support.iter().zip(&best.weights) {
        weights[i] = w;
    }
    let mix = set.mixture(&weights)?;
    let distance = half_sq_dist(target.coeffs(), &mix);
    Ok(ApproxSolution {
        distance,
        minimal_n: support.len(),
        weights,
        support,
        evaluated_supports: search.evaluated,
        strategy: opts.strategy,
        duplicates,
        case_trace: search.trace,
    })
}

/// Keeps the first of each group of (near-)identical members.
fn deduplicate(set: &StateSet) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut reps: Vec<usize> = Vec::with_capacity(set.len());
    let mut dups = Vec::new();
    for (i, m) in set.members().iter().enumerate() {
        let same = reps.iter().copied().find(|&j| {
            set.members()[j]
                .coeffs()
                .iter()
                .zip(m.coeffs())
                .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL)
        });
        match same {
            Some(j) => dups.push((i, j)),
            None => reps.push(i),
        }
    }
    (reps, dups)
}

/// A feasible support in deduplicated index space.
#[derive(Debug, Clone)]
struct Candidate {
    support: Vec<usize>,
    weights: Vec<f64>,
    distance: f64,
}

struct Evaluation {
    outcome: SupportOutcome,
    candidate: Option<Candidate>,
}

fn evaluate(table: &InnerProducts, support: &[usize]) -> Evaluation {
    let sys = SupportSystem::from_table(table, support);
    let Some(values) = sys.pseudo_probabilities() else {
        return Evaluation {
            outcome: SupportOutcome::RankDeficient,
            candidate: None,
        };
    };
    match clamp_feasible(&values) {
        Some(weights) => Evaluation {
            outcome: SupportOutcome::Feasible,
            candidate: Some(Candidate {
                distance: table.distance(support, &weights),
                support: support.to_vec(),
                weights,
            }),
        },
        None => Evaluation {
            outcome: SupportOutcome::InfeasibleSign,
            candidate: None,
        },
    }
}

struct Search<'a> {
    table: &'a InnerProducts,
    reps: &'a [usize],
    opts: &'a SearchOptions,
    trace: CaseTrace,
    evaluated: usize,
}

impl Search<'_> {
    /// Solves every support of one level, in lexicographic order.
    fn run_level(&mut self, supports: Vec<Vec<usize>>) -> Vec<Candidate> {
        let table = self.table;
        let evals: Vec<Evaluation> = if self.opts.parallel {
            supports.par_iter().map(|s| evaluate(table, s)).collect()
        } else {
            supports.iter().map(|s| evaluate(table, s)).collect()
        };
        self.evaluated += supports.len();
        let mut feasible = Vec::new();
        for (support, ev) in supports.into_iter().zip(evals) {
            self.trace.counts.add(ev.outcome);
            if self.trace.entries.len() < self.opts.trace_limit {
                self.trace.entries.push(TraceEntry {
                    support: support.iter().map(|&u| self.reps[u]).collect(),
                    outcome: ev.outcome,
                });
            } else {
                self.trace.truncated = true;
            }
            if let Some(c) = ev.candidate {
                feasible.push(c);
            }
        }
        feasible
    }

    fn exhaustive(&mut self, max_level: usize) -> Result<Option<Candidate>> {
        let n = self.table.len();
        let total: usize = (1..=max_level).map(|k| binomial(n, k)).sum();
        if self.evaluated.saturating_add(total) > self.opts.budget {
            return Ok(None);
        }
        let items: Vec<usize> = (0..n).collect();
        let mut feasible = Vec::new();
        for k in (1..=max_level).rev() {
            feasible.extend(self.run_level(combinations(&items, k)));
        }
        Ok(pick_minimal(feasible))
    }

    fn face_search(&mut self, max_level: usize) -> Result<Option<Candidate>> {
        let Some(p) = nearest_point(self.table) else {
            log::debug!("active-set walk did not settle; switching to full enumeration");
            return Ok(None);
        };
        let grad = self.table.gradient(&p);
        let lambda: f64 = p.iter().zip(&grad).map(|(a, b)| a * b).sum();
        let face: Vec<usize> = (0..self.table.len())
            .filter(|&i| grad[i] - lambda <= FACE_TOL || p[i] > 0.0)
            .collect();
        let all: Vec<usize> = (0..p.len()).collect();
        let reference = self.table.distance(&all, &p);

        for k in 1..=face.len().min(max_level) {
            if self.evaluated.saturating_add(binomial(face.len(), k)) > self.opts.budget {
                return Ok(None);
            }
            let accepted: Vec<Candidate> = self
                .run_level(combinations(&face, k))
                .into_iter()
                .filter(|c| c.distance <= reference + DISTANCE_TIE_TOL)
                .collect();
            if let Some(best) = pick_minimal(accepted) {
                if certificate_gap(self.table, &best) >= -CERTIFICATE_TOL {
                    return Ok(Some(best));
                }
                log::debug!(
                    "face support failed the optimality check; switching to full enumeration"
                );
                return Ok(None);
            }
        }
        Ok(None)
    }

    fn fallback(&mut self, target: &CoefficientVector, set: &StateSet) -> Result<Candidate> {
        let reason = format!(
            "support budget of {} exceeded; used projected-gradient oracle with Caratheodory reduction",
            self.opts.budget
        );
        log::warn!("{reason}");
        self.trace.fallback = Some(reason);

        let reduced_set = StateSet::new(
            self.reps
                .iter()
                .map(|&i| set.members()[i].clone())
                .collect(),
        )?;
        let orc = oracle::projected_gradient_default(target, &reduced_set)?;
        let (w, idx) = caratheodory_reduce(&orc.weights, reduced_set.members())?;
        // exact solve on the reduced support when it is feasible
        let ev = evaluate(self.table, &idx);
        self.evaluated += 1;
        self.trace.counts.add(ev.outcome);
        let oracle_candidate = Candidate {
            distance: self.table.distance(&idx, &w),
            support: idx,
            weights: w,
        };
        Ok(match ev.candidate {
            Some(c) if c.distance <= oracle_candidate.distance + DISTANCE_TIE_TOL => c,
            _ => oracle_candidate,
        })
    }
}

/// Smallest distance, then within [`DISTANCE_TIE_TOL`] the smallest support,
/// then the lexicographically smallest one.
fn pick_minimal(candidates: Vec<Candidate>) -> Option<Candidate> {
    let best = candidates
        .iter()
        .map(|c| c.distance)
        .fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.distance <= best + DISTANCE_TIE_TOL)
        .min_by(|a, b| {
            a.support
                .len()
                .cmp(&b.support.len())
                .then_with(|| a.support.cmp(&b.support))
        })
}

/// `min_i (g_i - sum_j p_j g_j)` for a candidate over the whole table.
fn certificate_gap(table: &InnerProducts, c: &Candidate) -> f64 {
    let mut p = vec![0.0; table.len()];
    for (&i, &w) in c.support.iter().zip(&c.weights) {
        p[i] = w;
    }
    directional_gap(&table.gradient(&p), &p)
}

fn directional_gap(grad: &[f64], p: &[f64]) -> f64 {
    let lambda: f64 = p.iter().zip(grad).map(|(a, b)| a * b).sum();
    grad.iter()
        .map(|g| g - lambda)
        .fold(f64::INFINITY, f64::min)
}

/// Smallest directional derivative of the distance at `weights` towards any
/// vertex of the simplex. Nonnegative (up to rounding) exactly at the optimum.
pub fn optimality_gap(target: &CoefficientVector, set: &StateSet, weights: &[f64]) -> Result<f64> {
    if weights.len() != set.len() {
        return Err(Error::LengthMismatch {
            expected: set.len(),
            found: weights.len(),
        });
    }
    if target.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: target.dim(),
        });
    }
    let mix = set.mixture(weights)?;
    let residual: Vec<f64> = mix
        .iter()
        .zip(target.coeffs())
        .map(|(m, t)| m - t)
        .collect();
    let grad: Vec<f64> = set
        .members()
        .iter()
        .map(|r| r.coeffs().iter().zip(&residual).map(|(a, b)| a * b).sum())
        .collect();
    Ok(directional_gap(&grad, weights))
}

const WALK_ZERO: f64 = 1e-12;
const WALK_OPT_TOL: f64 = 1e-12;

/// Nearest point of the convex hull to the target, by the minimum-norm-point
/// active-set walk. Major steps add the vertex with the steepest descent
/// direction; minor steps solve the support system and, when it leaves the
/// simplex, move to the boundary and drop the vanishing members.
///
/// Returns weights over the table, or `None` when the walk hits a
/// rank-deficient support or stops making progress.
fn nearest_point(table: &InnerProducts) -> Option<Vec<f64>> {
    let n = table.len();
    let start = (0..n)
        .min_by(|&a, &b| {
            let fa = table.gram[(a, a)] - 2.0 * table.proj[a];
            let fb = table.gram[(b, b)] - 2.0 * table.proj[b];
            fa.total_cmp(&fb)
        })
        .expect("table is nonempty");
    let mut active = vec![start];
    let mut w = vec![1.0];
    let mut last_value = f64::INFINITY;

    for _ in 0..(20 * n + 50) {
        let mut p = vec![0.0; n];
        for (&i, &wi) in active.iter().zip(&w) {
            p[i] = wi;
        }
        let value = table.distance(&active, &w);
        let grad = table.gradient(&p);
        let lambda: f64 = active.iter().zip(&w).map(|(&i, wi)| wi * grad[i]).sum();
        let (entering, gmin) = grad
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("table is nonempty");
        if gmin >= lambda - WALK_OPT_TOL || active.contains(&entering) || value >= last_value {
            return Some(p);
        }
        last_value = value;
        active.push(entering);
        w.push(0.0);

        let mut settled = false;
        for _ in 0..=active.len() {
            let y = SupportSystem::from_table(table, &active).pseudo_probabilities()?;
            if y.iter().all(|&v| v > WALK_ZERO) {
                w = y;
                settled = true;
                break;
            }
            let mut theta = f64::INFINITY;
            let mut leaving = 0;
            for (a, (&wa, &ya)) in w.iter().zip(&y).enumerate() {
                if ya <= WALK_ZERO {
                    let t = if wa - ya > 0.0 { wa / (wa - ya) } else { 0.0 };
                    if t < theta {
                        theta = t;
                        leaving = a;
                    }
                }
            }
            for (wa, ya) in w.iter_mut().zip(&y) {
                *wa += theta * (ya - *wa);
            }
            w[leaving] = 0.0;
            let keep: Vec<bool> = w.iter().map(|&x| x > WALK_ZERO).collect();
            active = active
                .iter()
                .zip(&keep)
                .filter_map(|(&i, &k)| k.then_some(i))
                .collect();
            w = w
                .iter()
                .zip(&keep)
                .filter_map(|(&x, &k)| k.then_some(x))
                .collect();
            if active.is_empty() {
                return None;
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
        }
        if !settled {
            return None;
        }
    }
    None
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All `k`-subsets of `items` in lexicographic order of positions.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if k == 0 || k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Reduces a convex combination to at most `d^2` members with the same
/// mixture, by repeatedly cancelling along an affine dependency.
///
/// Returns the surviving weights and their indices into `vectors`.
pub fn caratheodory_reduce(
    weights: &[f64],
    vectors: &[CoefficientVector],
) -> Result<(Vec<f64>, Vec<usize>)> {
    if weights.len() != vectors.len() {
        return Err(Error::LengthMismatch {
            expected: vectors.len(),
            found: weights.len(),
        });
    }
    let Some(first) = vectors.first() else {
        return Err(Error::EmptySet);
    };
    let dim = first.dim();
    if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.dim(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights);
    }

    let cap = dim * dim;
    let mut q = weights.to_vec();
    let mut active: Vec<usize> = (0..q.len()).filter(|&i| q[i] > 0.0).collect();
    while active.len() > cap {
        let group = &active[..cap + 1];
        let l = null_combination(group.iter().map(|&i| vectors[i].coeffs()), cap);
        let mut l = l;
        if !l.iter().any(|&x| x > 0.0) {
            l.iter_mut().for_each(|x| *x = -*x);
        }
        let mut alpha = f64::INFINITY;
        let mut drop_at = 0;
        for (a, &la) in l.iter().enumerate() {
            if la > 0.0 {
                let r = q[group[a]] / la;
                if r < alpha {
                    alpha = r;
                    drop_at = a;
                }
            }
        }
        for (a, &la) in l.iter().enumerate() {
            let i = group[a];
            q[i] = (q[i] - alpha * la).max(0.0);
        }
        q[group[drop_at]] = 0.0;
        active.retain(|&i| q[i] > 0.0);
    }
    let reduced = active.iter().map(|&i| q[i]).collect();
    Ok((reduced, active))
}

/// A unit vector `l` with `sum_a l_a v_a ~ 0` for `rows + 1` vectors of
/// length `rows`: the right singular vector of the smallest singular value.
fn null_combination<'a>(vectors: impl Iterator<Item = &'a [f64]>, rows: usize) -> Vec<f64> {
    let cols: Vec<&[f64]> = vectors.collect();
    let m = cols.len();
    // pad with zero rows so the SVD returns a full right basis
    let size = m.max(rows);
    let a = DMatrix::from_fn(size, m, |r, c| if r < rows { cols[c][r] } else { 0.0 });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    v_t.row(imin).iter().copied().collect()
}

/// One row of a sweep over the interpolation parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub k: f64,
    pub distance: f64,
    pub minimal_n: usize,
    pub support: Vec<usize>,
    /// Weights aligned with `support`.
    pub weights: Vec<f64>,
}

/// Solves every grid point of `family` against `set`, in grid order.
pub fn minimal_support_profile(
    family: &TargetFamily,
    set: &StateSet,
    k_grid: &[f64],
    opts: &SearchOptions,
) -> Result<Vec<SweepRecord>> {
    if let Some(&bad) = k_grid.iter().find(|k| !(0.0..=1.0).contains(*k)) {
        return Err(Error::InvalidParameter(bad));
    }
    let row = |&k: &f64| -> Result<SweepRecord> {
        let target = crate::state::interpolate(family, k)?;
        let sol = solve_with(&target, set, opts)?;
        Ok(SweepRecord {
            k,
            distance: sol.distance,
            minimal_n: sol.minimal_n,
            weights: sol.support_weights(),
            support: sol.support,
        })
    };
    if opts.parallel {
        k_grid.par_iter().map(row).collect()
    } else {
        k_grid.iter().map(row).collect()
    }
}

/// `steps` evenly spaced points from 0 to 1 inclusive.
pub fn uniform_grid(steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    1.0
                } else {
                    i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cv(c: &[f64]) -> CoefficientVector {
        CoefficientVector::from_coeffs(c.to_vec()).unwrap()
    }

    fn paulis() -> StateSet {
        StateSet::new(vec![
            cv(&[S2, S2, 0.0, 0.0]),
            cv(&[S2, -S2, 0.0, 0.0]),
            cv(&[S2, 0.0, S2, 0.0]),
            cv(&[S2, 0.0, -S2, 0.0]),
            cv(&[S2, 0.0, 0.0, S2]),
            cv(&[S2, 0.0, 0.0, -S2]),
        ])
        .unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c = combinations(&[0, 1, 2, 3], 2);
        assert_eq!(
            c,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(&[5, 7], 3), Vec::<Vec<usize>>::new());
        assert_eq!(binomial(20, 16), 4845);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn member_target_is_exact() {
        let set = paulis();
        for strategy in [Strategy::Auto, Strategy::Exhaustive] {
            let opts = SearchOptions {
                strategy,
                ..SearchOptions::default()
            };
            let sol = solve_with(&set.members()[3], &set, &opts).unwrap();
            assert!(sol.distance <= 1e-12);
            assert_eq!(sol.minimal_n, 1);
            assert_eq!(sol.support, vec![3]);
            assert_eq!(sol.weights[3], 1.0);
        }
    }

    #[test]
    fn maximally_mixed_uses_an_antipodal_pair() {
        let set = paulis();
        let target = cv(&[S2, 0.0, 0.0, 0.0]);
        for opts in [SearchOptions::default(), SearchOptions::exhaustive()] {
            let sol = solve_with(&target, &set, &opts).unwrap();
            assert!(sol.distance <= 1e-12);
            assert_eq!(sol.minimal_n, 2);
            // lexicographically first antipodal pair
            assert_eq!(sol.support, vec![0, 1]);
        }
    }

    #[test]
    fn duplicates_are_merged() {
        let a = cv(&[S2, 0.0, 0.0, S2]);
        let b = cv(&[S2, 0.0, 0.0, -S2]);
        let set = StateSet::new(vec![a.clone(), b.clone(), a.clone()]).unwrap();
        let target = cv(&[S2, 0.0, 0.0, 0.2]);
        let sol = solve(&target, &set).unwrap();
        assert_eq!(sol.duplicates, vec![(2, 0)]);
        assert_eq!(sol.support, vec![0, 1]);
        assert_eq!(sol.weights[2], 0.0);
        assert!(sol.distance < 1e-15);
    }

    #[test]
    fn obtuse_vertex_optimum_is_not_hidden_by_a_feasible_edge() {
        // Target sits in the normal cone of the middle vertex while the
        // projection onto the opposite edge falls inside that edge.
        let v = cv(&[S2, 0.0, 0.0, 0.0]);
        let a = cv(&[S2, -0.3, 0.3, 0.0]);
        let b = cv(&[S2, 0.3, 0.3, 0.0]);
        let t = cv(&[S2, 0.0, -0.3, 0.0]);
        let set = StateSet::new(vec![a, b, v]).unwrap();
        for opts in [SearchOptions::default(), SearchOptions::exhaustive()] {
            let sol = solve_with(&t, &set, &opts).unwrap();
            assert_eq!(sol.support, vec![2]);
            assert!((sol.distance - 0.045).abs() < 1e-15);
        }
    }

    #[test]
    fn budget_exhaustion_falls_back_to_oracle() {
        let set = paulis();
        let target = cv(&[S2, 0.3, 0.2, 0.1]);
        let exact = solve(&target, &set).unwrap();
        let opts = SearchOptions::default().with_budget(0);
        let sol = solve_with(&target, &set, &opts).unwrap();
        assert!(sol.case_trace.fallback.is_some());
        assert!((sol.distance - exact.distance).abs() < 1e-7);
        assert!(sol.support.len() <= 4);
    }

    #[test]
    fn caratheodory_leaves_small_inputs_alone() {
        let set = paulis();
        let m = &set.members()[..3];
        let (w, idx) = caratheodory_reduce(&[0.2, 0.3, 0.5], m).unwrap();
        assert_eq!(idx, vec![0, 1, 2]);
        assert_eq!(w, vec![0.2, 0.3, 0.5]);
        assert_eq!(
            caratheodory_reduce(&[0.5, 0.6, -0.1], m).unwrap_err(),
            Error::InvalidWeights
        );
    }

    #[test]
    fn caratheodory_preserves_mixture() {
        let set = crate::state::random_state_set(2, 5, 11).unwrap();
        let w = vec![0.2; 5];
        let before = set.mixture(&w).unwrap();
        let (rw, idx) = caratheodory_reduce(&w, set.members()).unwrap();
        assert!(idx.len() <= 4);
        let mut full = vec![0.0; 5];
        for (&i, &x) in idx.iter().zip(&rw) {
            full[i] = x;
        }
        let after = set.mixture(&full).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((rw.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = uniform_grid(101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!((g[33] - 0.33).abs() < 1e-15);
    }
}
