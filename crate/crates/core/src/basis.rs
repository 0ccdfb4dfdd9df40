//! Orthonormal Hermitian operator basis and the matrix <-> coefficient maps.
//!
//! The basis is the generalized Gell-Mann family scaled to unit
//! Hilbert-Schmidt norm. Ordering is fixed:
//!
//! 1. `I / sqrt(d)`
//! 2. symmetric pairs `(E_jk + E_kj) / sqrt(2)`, `j < k`, row-major
//! 3. antisymmetric pairs `-i (E_jk - E_kj) / sqrt(2)`, same order
//! 4. diagonal traceless matrices of increasing rank
//!
//! For `d = 2` this gives `I/sqrt(2)` followed by the Pauli matrices
//! `x, y, z` divided by `sqrt(2)`.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::state::CoefficientVector;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Tolerance on the anti-Hermitian part of an input matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// An immutable orthonormal basis of Hermitian `d x d` matrices.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Arc<[CMatrix]>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Result<Self> {
        build_basis(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `d^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &CMatrix {
        &self.elements[i]
    }

    pub fn vectorize(&self, m: &CMatrix) -> Result<CoefficientVector> {
        vectorize(m, self)
    }

    pub fn devectorize(&self, r: &CoefficientVector) -> Result<CMatrix> {
        devectorize(r, self)
    }
}

/// Builds the generalized Gell-Mann basis for dimension `d`.
pub fn build_basis(d: usize) -> Result<HermitianBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let zero = C64::new(0.0, 0.0);
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);

    elements.push(CMatrix::from_diagonal_element(
        d,
        d,
        C64::new(1.0 / (d as f64).sqrt(), 0.0),
    ));

    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::from_element(d, d, zero);
            m[(j, k)] = C64::new(s2, 0.0);
            m[(k, j)] = C64::new(s2, 0.0);
            elements.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::from_element(d, d, zero);
            m[(j, k)] = C64::new(0.0, -s2);
            m[(k, j)] = C64::new(0.0, s2);
            elements.push(m);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::from_element(d, d, zero);
        for j in 0..l {
            m[(j, j)] = C64::new(1.0 / norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) / norm, 0.0);
        elements.push(m);
    }
    debug_assert_eq!(elements.len(), d * d);

    Ok(HermitianBasis {
        dim: d,
        elements: elements.into(),
    })
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `Tr(a * b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Expands a Hermitian matrix in the basis: `r[i] = Tr(M X_i)`.
///
/// Matrices within [`HERMITIAN_TOL`] of Hermitian are symmetrized first.
pub fn vectorize(m: &CMatrix, basis: &HermitianBasis) -> Result<CoefficientVector> {
    let d = basis.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if m.nrows() != d { m.nrows() } else { m.ncols() },
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let coeffs = basis
        .elements()
        .iter()
        .map(|x| trace_product(&sym, x).re)
        .collect();
    CoefficientVector::new(d, coeffs)
}

/// Inverse of [`vectorize`]: `M = sum_i r[i] X_i`.
pub fn devectorize(r: &CoefficientVector, basis: &HermitianBasis) -> Result<CMatrix> {
    let d = basis.dim();
    if r.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: r.dim(),
        });
    }
    let mut m = CMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for (x, &c) in basis.elements().iter().zip(r.coeffs()) {
        if c != 0.0 {
            m += x * C64::new(c, 0.0);
        }
    }
    Ok(m)
}
