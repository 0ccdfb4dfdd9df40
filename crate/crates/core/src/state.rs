//! Targets and state sets in coefficient form.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::basis::{devectorize, vectorize, CMatrix, HermitianBasis, C64};
use crate::error::{Error, Result};

/// Real coefficients of a Hermitian operator in a [`HermitianBasis`].
///
/// Only the length (`d^2`) is enforced on construction. Unit trace and
/// positivity are checked on request by [`validate_state`], so vectors
/// printed at limited precision can be used as-is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if coeffs.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, coeffs })
    }

    /// Infers `d` from a length that must be a perfect square.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        let n = coeffs.len();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(Error::Format(format!(
                "coefficient count {n} is not a perfect square"
            )));
        }
        Self::new(d, coeffs)
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; dim * dim];
        if let Some(c0) = coeffs.first_mut() {
            *c0 = 1.0 / (dim as f64).sqrt();
        }
        Self::new(dim, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.coeffs, &other.coeffs)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An ordered, nonempty list of states sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    members: Vec<CoefficientVector>,
    labels: Option<Vec<String>>,
}

impl StateSet {
    pub fn new(members: Vec<CoefficientVector>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        Ok(Self {
            dim,
            members,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.members.len() {
            return Err(Error::LengthMismatch {
                expected: self.members.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CoefficientVector] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Option<&CoefficientVector> {
        self.members.get(i)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Returns a new set with `state` appended (label, if any, is its index).
    pub fn pushed(&self, state: CoefficientVector) -> Result<Self> {
        let mut members = self.members.clone();
        members.push(state);
        let set = Self::new(members)?;
        match &self.labels {
            Some(l) => {
                let mut l = l.clone();
                l.push(format!("{}", l.len()));
                set.with_labels(l)
            }
            None => Ok(set),
        }
    }

    /// Mixture `sum_i w_i r_i` as a raw coefficient array.
    pub fn mixture(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: weights.len(),
            });
        }
        let mut out = vec![0.0; self.dim * self.dim];
        for (m, &w) in self.members.iter().zip(weights) {
            if w != 0.0 {
                for (o, c) in out.iter_mut().zip(m.coeffs()) {
                    *o += w * c;
                }
            }
        }
        Ok(out)
    }
}

/// Two endpoint states for the family `k * at_one + (1 - k) * at_zero`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFamily {
    pub at_one: CoefficientVector,
    pub at_zero: CoefficientVector,
    pub description: String,
}

impl TargetFamily {
    pub fn new(
        at_one: CoefficientVector,
        at_zero: CoefficientVector,
        description: impl Into<String>,
    ) -> Result<Self> {
        at_one.check_dim(&at_zero)?;
        Ok(Self {
            at_one,
            at_zero,
            description: description.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.at_one.dim()
    }
}

pub const TRACE_TOL: f64 = 1e-9;
pub const PURITY_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub trace: f64,
    pub purity: f64,
    /// Smallest eigenvalue of the reconstructed matrix (strict mode only).
    pub min_eigenvalue: Option<f64>,
    pub trace_ok: bool,
    pub purity_ok: bool,
    pub psd_ok: Option<bool>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.trace_ok && self.purity_ok && self.psd_ok.unwrap_or(true)
    }
}

/// Reports trace, purity and (when `strict`) the minimum eigenvalue.
///
/// Purity and positivity only count against validity in strict mode.
pub fn validate_state(
    r: &CoefficientVector,
    basis: &HermitianBasis,
    strict: bool,
) -> Result<ValidationReport> {
    if r.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: r.dim(),
        });
    }
    let trace = r.coeffs()[0] * (r.dim() as f64).sqrt();
    let purity = r.norm_sqr();
    let (min_eigenvalue, purity_ok, psd_ok) = if strict {
        let m = devectorize(r, basis)?;
        let eig = SymmetricEigen::new(m).eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        (Some(min), purity <= 1.0 + PURITY_TOL, Some(min >= -PSD_TOL))
    } else {
        (None, true, None)
    };
    Ok(ValidationReport {
        trace,
        purity,
        min_eigenvalue,
        trace_ok: (trace - 1.0).abs() <= TRACE_TOL,
        purity_ok,
        psd_ok,
    })
}

/// A Ginibre density matrix `G G^dagger / Tr(G G^dagger)` drawn from `rng`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / C64::new(tr, 0.0)
}

pub fn random_density_with<R: Rng + ?Sized>(
    basis: &HermitianBasis,
    rng: &mut R,
) -> Result<CoefficientVector> {
    vectorize(&random_density_matrix(basis.dim(), rng), basis)
}

/// Deterministic Ginibre state for `(d, seed)`.
pub fn random_density(d: usize, seed: u64) -> Result<CoefficientVector> {
    let basis = HermitianBasis::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(&basis, &mut rng)
}

/// `n` Ginibre states drawn in sequence from one seeded stream.
pub fn random_state_set(d: usize, n: usize, seed: u64) -> Result<StateSet> {
    let basis = HermitianBasis::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..n)
        .map(|_| random_density_with(&basis, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(members)
}

/// `k * at_one + (1 - k) * at_zero`, componentwise.
pub fn interpolate(family: &TargetFamily, k: f64) -> Result<CoefficientVector> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidParameter(k));
    }
    if k == 1.0 {
        return Ok(family.at_one.clone());
    }
    if k == 0.0 {
        return Ok(family.at_zero.clone());
    }
    let coeffs = family
        .at_one
        .coeffs()
        .iter()
        .zip(family.at_zero.coeffs())
        .map(|(a, b)| {
            // keeps a shared component (the trace term) bit-identical
            if a == b {
                *a
            } else {
                k * a + (1.0 - k) * b
            }
        })
        .collect();
    CoefficientVector::new(family.dim(), coeffs)
}

/// Hilbert-Schmidt distance `||a - b||^2 / 2`.
pub fn hs_distance(a: &CoefficientVector, b: &CoefficientVector) -> Result<f64> {
    a.check_dim(b)?;
    Ok(half_sq_dist(a.coeffs(), b.coeffs()))
}

pub(crate) fn half_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::trace_product;

    const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cv(d: usize, c: &[f64]) -> CoefficientVector {
        CoefficientVector::new(d, c.to_vec()).unwrap()
    }

    #[test]
    fn maximally_mixed_validates() {
        let b = HermitianBasis::new(2).unwrap();
        let r = cv(2, &[S2, 0.0, 0.0, 0.0]);
        let rep = validate_state(&r, &b, true).unwrap();
        assert!((rep.trace - 1.0).abs() < 1e-15);
        assert!((rep.purity - 0.5).abs() < 1e-15);
        assert!((rep.min_eigenvalue.unwrap() - 0.5).abs() < 1e-14);
        assert!(rep.is_valid());
    }

    #[test]
    fn half_filled_qutrit_vector_is_checked_by_eigenvalues() {
        // (1, 1/2, ..., 1/2)/sqrt(3): unit purity; positivity is decided by
        // the spectrum of the reconstructed matrix.
        let b = HermitianBasis::new(3).unwrap();
        let s3 = 1.0 / 3f64.sqrt();
        let mut c = vec![0.5 * s3; 9];
        c[0] = s3;
        let r = cv(3, &c);
        let rep = validate_state(&r, &b, true).unwrap();
        assert!((rep.purity - 1.0).abs() < 1e-12);
        let m = devectorize(&r, &b).unwrap();
        let eig = SymmetricEigen::new(m).eigenvalues;
        let oracle_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((rep.min_eigenvalue.unwrap() - oracle_min).abs() < 1e-14);
        assert_eq!(rep.psd_ok, Some(oracle_min >= -PSD_TOL));
    }

    #[test]
    fn zero_trace_is_invalid() {
        let b = HermitianBasis::new(2).unwrap();
        let r = cv(2, &[0.0, 0.1, 0.0, 0.0]);
        let rep = validate_state(&r, &b, false).unwrap();
        assert!(!rep.trace_ok);
        assert!(!rep.is_valid());
        assert_eq!(rep.min_eigenvalue, None);
    }

    #[test]
    fn random_density_is_deterministic_and_physical() {
        let a = random_density(3, 42).unwrap();
        let b = random_density(3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_density(3, 43).unwrap());
        let basis = HermitianBasis::new(3).unwrap();
        assert!(validate_state(&a, &basis, true).unwrap().is_valid());
    }

    #[test]
    fn random_density_purity_identity() {
        let basis = HermitianBasis::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density_matrix(3, &mut rng);
        let r = vectorize(&rho, &basis).unwrap();
        assert!((r.coeffs()[0] - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let direct = trace_product(&rho, &rho).re;
        assert!((r.norm_sqr() - direct).abs() < 1e-12);
    }

    #[test]
    fn qubit_purity_mean_is_between_bounds() {
        let basis = HermitianBasis::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1000;
        let mean = (0..n)
            .map(|_| random_density_with(&basis, &mut rng).unwrap().norm_sqr())
            .sum::<f64>()
            / n as f64;
        // Hilbert-Schmidt measure on qubits gives E[Tr rho^2] = 4/5.
        assert!(mean > 0.5 && mean < 1.0, "mean purity {mean}");
        assert!((mean - 0.8).abs() < 0.02, "mean purity {mean}");
    }

    #[test]
    fn interpolation_endpoints_and_midpoint() {
        let one = cv(2, &[S2, 0.0, 0.0, 0.0]);
        let zero = cv(2, &[S2, 0.4533, 0.1255, 0.5061]);
        let fam = TargetFamily::new(one.clone(), zero.clone(), "t").unwrap();
        assert_eq!(interpolate(&fam, 1.0).unwrap(), one);
        assert_eq!(interpolate(&fam, 0.0).unwrap(), zero);
        let mid = interpolate(&fam, 0.5).unwrap();
        let want = [S2, 0.22665, 0.06275, 0.25305];
        for (a, w) in mid.coeffs().iter().zip(want) {
            assert!((a - w).abs() < 1e-15);
        }
        assert_eq!(mid.coeffs()[0], S2);
        assert!(matches!(
            interpolate(&fam, 1.5),
            Err(Error::InvalidParameter(_))
        ));
        assert!(interpolate(&fam, -0.1).is_err());
    }

    #[test]
    fn distance_examples() {
        let up = cv(2, &[S2, 0.0, 0.0, S2]);
        let down = cv(2, &[S2, 0.0, 0.0, -S2]);
        let mixed = cv(2, &[S2, 0.0, 0.0, 0.0]);
        assert_eq!(hs_distance(&up, &up).unwrap(), 0.0);
        assert!((hs_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        assert!((hs_distance(&mixed, &up).unwrap() - 0.25).abs() < 1e-15);
        let q = CoefficientVector::maximally_mixed(3).unwrap();
        assert!(matches!(
            hs_distance(&up, &q),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructor_checks() {
        assert!(matches!(
            CoefficientVector::new(2, vec![0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            CoefficientVector::new(2, vec![f64::NAN, 0.0, 0.0, 0.0]),
            Err(Error::NonFinite)
        ));
        assert!(CoefficientVector::from_coeffs(vec![0.0; 5]).is_err());
        assert_eq!(StateSet::new(vec![]).unwrap_err(), Error::EmptySet);
        let mixed = StateSet::new(vec![
            CoefficientVector::maximally_mixed(2).unwrap(),
            CoefficientVector::maximally_mixed(3).unwrap(),
        ]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
    }
}
