//! Stationarity system on a fixed support.
//!
//! For a support `i_1 < ... < i_K` with the last element as reference `K`,
//!
//! ```text
//! A(i, j) = (r_i - r_K)^T r_j + delta_iK
//! B(i)    = (r_i - r_K)^T r_o + delta_iK
//! ```
//!
//! The reference row is all ones and pins `sum p = 1`; the other rows are
//! differences of the stationarity conditions with the multiplier of the
//! normalization eliminated. `A` is singular exactly when the support is
//! affinely dependent.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{dot, half_sq_dist, CoefficientVector, StateSet};

/// Pseudo-probabilities down to `-FEASIBILITY_TOL` count as nonnegative.
pub const FEASIBILITY_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_RTOL: f64 = 1e-10;
/// Allowed drift of `sum p` away from one after the linear solve.
pub const SUM_TOL: f64 = 1e-9;
const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportOutcome {
    Feasible,
    InfeasibleSign,
    RankDeficient,
}

/// Assembled linear system for one support.
#[derive(Debug, Clone)]
pub struct SupportSystem {
    support: Vec<usize>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    rank: usize,
    gram: DMatrix<f64>,
}

impl SupportSystem {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `R_K^T R_K`, the Hessian of the distance restricted to the support.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.support.len()
    }

    /// Assembles the system from precomputed inner products.
    ///
    /// `gram(i, j) = r_i . r_j` and `proj[i] = r_i . r_o` over the whole set.
    pub(crate) fn from_table(table: &InnerProducts, support: &[usize]) -> Self {
        let k = support.len();
        let last = support[k - 1];
        let g = &table.gram;
        let a = DMatrix::from_fn(k, k, |i, j| {
            if i == k - 1 {
                1.0
            } else {
                g[(support[i], support[j])] - g[(last, support[j])]
            }
        });
        let b = DVector::from_fn(k, |i, _| {
            if i == k - 1 {
                1.0
            } else {
                table.proj[support[i]] - table.proj[last]
            }
        });
        let gram = DMatrix::from_fn(k, k, |i, j| g[(support[i], support[j])]);
        let rank = numerical_rank(&a);
        Self {
            support: support.to_vec(),
            a,
            b,
            rank,
            gram,
        }
    }

    /// Raw `A^{-1} B`, or `None` when the support is rank deficient.
    pub fn pseudo_probabilities(&self) -> Option<Vec<f64>> {
        if !self.is_full_rank() {
            return None;
        }
        let x = self.a.clone().lu().solve(&self.b)?;
        Some(x.iter().copied().collect())
    }
}

fn numerical_rank(a: &DMatrix<f64>) -> usize {
    let sv = a.clone().singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * largest).count()
}

/// Inner products of the set members with each other and with the target.
#[derive(Debug, Clone)]
pub(crate) struct InnerProducts {
    pub gram: DMatrix<f64>,
    pub proj: Vec<f64>,
    pub target_sq: f64,
}

impl InnerProducts {
    pub fn new(target: &[f64], members: &[&[f64]]) -> Self {
        let n = members.len();
        let mut gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(members[i], members[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let proj = members.iter().map(|m| dot(m, target)).collect();
        Self {
            gram,
            proj,
            target_sq: dot(target, target),
        }
    }

    pub fn len(&self) -> usize {
        self.proj.len()
    }

    /// Distance of the mixture with `weights` on `support`, via inner products.
    pub fn distance(&self, support: &[usize], weights: &[f64]) -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for (a, &i) in support.iter().enumerate() {
            lin += weights[a] * self.proj[i];
            for (b, &j) in support.iter().enumerate() {
                quad += weights[a] * weights[b] * self.gram[(i, j)];
            }
        }
        (0.5 * (self.target_sq - 2.0 * lin + quad)).max(0.0)
    }

    /// Gradient of the distance over all members: `g = G p - c`.
    pub fn gradient(&self, weights: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut g = -self.proj[i];
                for (j, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        g += self.gram[(i, j)] * w;
                    }
                }
                g
            })
            .collect()
    }
}

/// Result of solving one support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoProbability {
    /// `A^{-1} B` as solved; empty when rank deficient.
    pub values: Vec<f64>,
    pub outcome: SupportOutcome,
    /// Clamped and renormalized weights, present when feasible.
    pub weights: Option<Vec<f64>>,
    /// Distance of the weighted mixture, present when feasible.
    pub distance: Option<f64>,
}

impl PseudoProbability {
    pub fn is_feasible(&self) -> bool {
        self.outcome == SupportOutcome::Feasible
    }

    fn rank_deficient() -> Self {
        Self {
            values: Vec::new(),
            outcome: SupportOutcome::RankDeficient,
            weights: None,
            distance: None,
        }
    }
}

/// Feasibility test plus clamping of values in `[-FEASIBILITY_TOL, 0)`.
pub(crate) fn clamp_feasible(values: &[f64]) -> Option<Vec<f64>> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL || values.iter().any(|&p| p < -FEASIBILITY_TOL) {
        return None;
    }
    let clamped: Vec<f64> = values.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Some(clamped.into_iter().map(|p| p / total).collect())
}

fn finish(
    values: Vec<f64>,
    target: &CoefficientVector,
    members: &[&CoefficientVector],
) -> PseudoProbability {
    match clamp_feasible(&values) {
        Some(weights) => {
            let mut mix = vec![0.0; target.len()];
            for (m, &w) in members.iter().zip(&weights) {
                for (o, c) in mix.iter_mut().zip(m.coeffs()) {
                    *o += w * c;
                }
            }
            let distance = half_sq_dist(target.coeffs(), &mix);
            PseudoProbability {
                values,
                outcome: SupportOutcome::Feasible,
                weights: Some(weights),
                distance: Some(distance),
            }
        }
        None => PseudoProbability {
            values,
            outcome: SupportOutcome::InfeasibleSign,
            weights: None,
            distance: None,
        },
    }
}

fn check_support(support: &[usize], len: usize) -> Result<()> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    for w in support.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::UnsortedSupport);
        }
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= len) {
        return Err(Error::IndexOutOfRange { index: bad, len });
    }
    Ok(())
}

fn check_dims(target: &CoefficientVector, set: &StateSet) -> Result<()> {
    if target.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: target.dim(),
        });
    }
    Ok(())
}

/// Builds `A`, `B` and the support Gram matrix.
pub fn build_system(
    target: &CoefficientVector,
    set: &StateSet,
    support: &[usize],
) -> Result<SupportSystem> {
    check_dims(target, set)?;
    check_support(support, set.len())?;
    let members: Vec<&[f64]> = support.iter().map(|&i| set.members()[i].coeffs()).collect();
    let table = InnerProducts::new(target.coeffs(), &members);
    let local: Vec<usize> = (0..support.len()).collect();
    let mut sys = SupportSystem::from_table(&table, &local);
    sys.support = support.to_vec();
    Ok(sys)
}

/// Solves a system built by [`build_system`] from the same `target` and `set`.
pub fn solve_support(
    sys: &SupportSystem,
    target: &CoefficientVector,
    set: &StateSet,
) -> Result<PseudoProbability> {
    check_dims(target, set)?;
    check_support(sys.support(), set.len())?;
    let values = match sys.pseudo_probabilities() {
        Some(v) => v,
        None => return Ok(PseudoProbability::rank_deficient()),
    };
    let members: Vec<&CoefficientVector> =
        sys.support().iter().map(|&i| &set.members()[i]).collect();
    Ok(finish(values, target, &members))
}

fn diff(a: &CoefficientVector, b: &CoefficientVector) -> Vec<f64> {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x - y)
        .collect()
}

fn same_dims(vs: &[&CoefficientVector]) -> Result<()> {
    let d = vs[0].dim();
    for v in vs {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

/// Two-state formula: `p1 = (r_o - r_2).(r_1 - r_2) / |r_1 - r_2|^2`.
pub fn closed_k2(
    target: &CoefficientVector,
    r1: &CoefficientVector,
    r2: &CoefficientVector,
) -> Result<PseudoProbability> {
    same_dims(&[target, r1, r2])?;
    let u = diff(r1, r2);
    let e = diff(target, r2);
    let den = dot(&u, &u);
    if den <= DEGENERATE_TOL {
        return Err(Error::DegeneratePair);
    }
    let p1 = dot(&e, &u) / den;
    Ok(finish(vec![p1, 1.0 - p1], target, &[r1, r2]))
}

/// Three-state formula, written in the antisymmetric bracket form
/// `p1 = a^T [e c^T - c e^T] c / det`, `p2 = a^T [w f^T - f w^T] w / det` with
/// `a = r1 - r2`, `c = r2 - r3`, `e = r_o - r2`, `w = r1 - r3`, `f = r_o - r1`
/// and `det = |r1 - r2|^2 |r3 - r2|^2 - ((r1 - r2).(r3 - r2))^2`.
pub fn closed_k3(
    target: &CoefficientVector,
    r1: &CoefficientVector,
    r2: &CoefficientVector,
    r3: &CoefficientVector,
) -> Result<PseudoProbability> {
    same_dims(&[target, r1, r2, r3])?;
    let a = diff(r1, r2);
    let c = diff(r2, r3);
    let e = diff(target, r2);
    let w = diff(r1, r3);
    let f = diff(target, r1);
    let v = diff(r3, r2);
    let av = dot(&a, &v);
    let det = dot(&a, &a) * dot(&v, &v) - av * av;
    if det <= DEGENERATE_TOL {
        return Err(Error::DegenerateTriple);
    }
    // x^T [y z^T - z y^T] z = (x.y)(z.z) - (x.z)(y.z)
    let bracket = |x: &[f64], y: &[f64], z: &[f64]| dot(x, y) * dot(z, z) - dot(x, z) * dot(y, z);
    let p1 = bracket(&a, &e, &c) / det;
    let p2 = -bracket(&a, &f, &w) / det;
    Ok(finish(vec![p1, p2, 1.0 - p1 - p2], target, &[r1, r2, r3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cv(c: &[f64]) -> CoefficientVector {
        CoefficientVector::from_coeffs(c.to_vec()).unwrap()
    }

    fn up() -> CoefficientVector {
        cv(&[S2, 0.0, 0.0, S2])
    }
    fn down() -> CoefficientVector {
        cv(&[S2, 0.0, 0.0, -S2])
    }
    fn plus() -> CoefficientVector {
        cv(&[S2, S2, 0.0, 0.0])
    }
    fn y_plus() -> CoefficientVector {
        cv(&[S2, 0.0, S2, 0.0])
    }
    fn mixed() -> CoefficientVector {
        cv(&[S2, 0.0, 0.0, 0.0])
    }

    #[test]
    fn single_state_support() {
        let set = StateSet::new(vec![up()]).unwrap();
        let sys = build_system(&down(), &set, &[0]).unwrap();
        assert_eq!(sys.matrix().as_slice(), &[1.0]);
        assert_eq!(sys.rhs().as_slice(), &[1.0]);
        let p = solve_support(&sys, &down(), &set).unwrap();
        assert_eq!(p.values, vec![1.0]);
        assert!(p.is_feasible());
        assert!((p.distance.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn antipodal_pair_splits_evenly() {
        let set = StateSet::new(vec![up(), down()]).unwrap();
        let sys = build_system(&mixed(), &set, &[0, 1]).unwrap();
        let p = solve_support(&sys, &mixed(), &set).unwrap();
        assert!((p.values[0] - 0.5).abs() < 1e-15 && (p.values[1] - 0.5).abs() < 1e-15);
        assert!(p.distance.unwrap() < 1e-30);
    }

    #[test]
    fn z_and_x_pair_against_mixed_target() {
        // |1/2 (up + plus) - I/2|^2 / 2 = 1/8
        let set = StateSet::new(vec![up(), plus()]).unwrap();
        let sys = build_system(&mixed(), &set, &[0, 1]).unwrap();
        let p = solve_support(&sys, &mixed(), &set).unwrap();
        assert!((p.values[0] - 0.5).abs() < 1e-14);
        assert!((p.distance.unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn duplicated_states_are_rank_deficient() {
        let set = StateSet::new(vec![up(), plus(), up()]).unwrap();
        let sys = build_system(&mixed(), &set, &[0, 1, 2]).unwrap();
        assert!(sys.rank() < 3);
        let p = solve_support(&sys, &mixed(), &set).unwrap();
        assert_eq!(p.outcome, SupportOutcome::RankDeficient);
        assert!(p.values.is_empty());
    }

    #[test]
    fn all_six_pauli_states_are_rank_deficient() {
        let set = StateSet::new(vec![
            plus(),
            cv(&[S2, -S2, 0.0, 0.0]),
            y_plus(),
            cv(&[S2, 0.0, -S2, 0.0]),
            up(),
            down(),
        ])
        .unwrap();
        let sys = build_system(&mixed(), &set, &[0, 1, 2, 3, 4, 5]).unwrap();
        // six points in a three-dimensional affine space
        assert_eq!(sys.rank(), 4);
        let p = solve_support(&sys, &mixed(), &set).unwrap();
        assert_eq!(p.outcome, SupportOutcome::RankDeficient);
    }

    #[test]
    fn negative_weights_are_infeasible() {
        let set = StateSet::new(vec![up(), mixed()]).unwrap();
        let sys = build_system(&down(), &set, &[0, 1]).unwrap();
        let p = solve_support(&sys, &down(), &set).unwrap();
        assert_eq!(p.outcome, SupportOutcome::InfeasibleSign);
        assert!((p.values[0] + 1.0).abs() < 1e-14);
        assert!((p.values.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.distance.is_none());
    }

    #[test]
    fn support_validation() {
        let set = StateSet::new(vec![up(), down()]).unwrap();
        assert_eq!(
            build_system(&mixed(), &set, &[]).unwrap_err(),
            Error::EmptySupport
        );
        assert_eq!(
            build_system(&mixed(), &set, &[1, 0]).unwrap_err(),
            Error::UnsortedSupport
        );
        assert_eq!(
            build_system(&mixed(), &set, &[0, 2]).unwrap_err(),
            Error::IndexOutOfRange { index: 2, len: 2 }
        );
    }

    #[test]
    fn pair_formula_examples() {
        let p = closed_k2(&up(), &up(), &down()).unwrap();
        assert_eq!(p.values[0], 1.0);
        let p = closed_k2(&mixed(), &up(), &down()).unwrap();
        assert!((p.values[0] - 0.5).abs() < 1e-15);
        assert_eq!(
            closed_k2(&mixed(), &up(), &up()).unwrap_err(),
            Error::DegeneratePair
        );
    }

    #[test]
    fn triple_formula_examples() {
        let p = closed_k3(&y_plus(), &up(), &plus(), &y_plus()).unwrap();
        for (a, w) in p.values.iter().zip([0.0, 0.0, 1.0]) {
            assert!((a - w).abs() < 1e-12);
        }
        let p = closed_k3(&mixed(), &up(), &plus(), &y_plus()).unwrap();
        for a in &p.values {
            assert!((a - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!(p.is_feasible());
        let collinear = cv(&[S2, 0.0, 0.0, 0.0]);
        assert_eq!(
            closed_k3(&mixed(), &up(), &down(), &collinear).unwrap_err(),
            Error::DegenerateTriple
        );
    }
}
