//! Dense complex matrix kernel.
//!
//! Everything here is sized for the small operators of a qubit coupled to a
//! truncated bosonic mode (dimension a few tens). Storage is a thin newtype
//! over `nalgebra::DMatrix<Complex64>`; the Schur factorization and the
//! Hermitian eigensolver come from nalgebra, while the matrix exponential,
//! the eigenvector back-substitution and the biorthogonal normalization are
//! implemented here.
//!
//! Tensor products always place the system as the left (slow) factor.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

pub type CVector = DVector<C64>;

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}", self.0)
    }
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::try_from(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(rows, cols, &entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product `ket · bra†`.
    pub fn outer(ket: &CVector, bra: &CVector) -> Self {
        Self(ket * bra.adjoint())
    }

    #[allow(dead_code)]
    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(Error::NotSquare {
                rows: self.nrows(),
                cols: self.ncols(),
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Maximum column sum of absolute values.
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        Self(&self.0 * C64::new(factor, 0.0))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or(Error::Singular)
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &CMatrix) -> Result<Self> {
        self.require_square()?;
        self.0
            .clone()
            .lu()
            .solve(&rhs.0)
            .map(Self)
            .ok_or(Error::Singular)
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        &self.0 * v
    }

    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).into_owned()
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }
}

impl TryFrom<DMatrix<C64>> for CMatrix {
    type Error = Error;

    fn try_from(m: DMatrix<C64>) -> Result<Self> {
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::NonFinite)
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Add for CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 + rhs.0)
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 - rhs.0)
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 * rhs.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

/// Kronecker product `a ⊗ b`; `a` indexes the slow (left) factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix(a.0.kronecker(&b.0))
}

fn check_composite(m: &CMatrix, dim_sys: usize, dim_bath: usize) -> Result<usize> {
    let n = dim_sys * dim_bath;
    if dim_sys == 0 || dim_bath == 0 || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "composite of {dim_sys}x{dim_bath} must be {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(n)
}

/// Traces out the right (bath) factor of a `dim_sys ⊗ dim_bath` operator.
pub fn partial_trace_bath(m: &CMatrix, dim_sys: usize, dim_bath: usize) -> Result<CMatrix> {
    check_composite(m, dim_sys, dim_bath)?;
    Ok(CMatrix::from_fn(dim_sys, dim_sys, |i, j| {
        (0..dim_bath)
            .map(|k| m.0[(i * dim_bath + k, j * dim_bath + k)])
            .sum()
    }))
}

/// Traces out the left (system) factor of a `dim_sys ⊗ dim_bath` operator.
pub fn partial_trace_system(m: &CMatrix, dim_sys: usize, dim_bath: usize) -> Result<CMatrix> {
    check_composite(m, dim_sys, dim_bath)?;
    Ok(CMatrix::from_fn(dim_bath, dim_bath, |i, j| {
        (0..dim_sys)
            .map(|k| m.0[(k * dim_bath + i, k * dim_bath + j)])
            .sum()
    }))
}

// Padé [m/m] numerator coefficients and backward-error thresholds for the
// scaling-and-squaring exponential (Higham 2005).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539_398_330_063_23e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pade_low_order(a: &DMatrix<C64>, coeffs: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::<C64>::identity(n, n);
    let mut odd = DMatrix::<C64>::zeros(n, n);
    let mut even = DMatrix::<C64>::zeros(n, n);
    for pair in coeffs.chunks(2) {
        even += &power * re(pair[0]);
        odd += &power * re(pair[1]);
        power = &power * &a2;
    }
    (a * odd, even)
}

fn pade13(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let b = |k: usize| re(PADE13[k]);
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = a * inner_u;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    (u, v)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn matrix_exp(a: &CMatrix) -> Result<CMatrix> {
    let n = a.require_square()?;
    if a.0.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(CMatrix::identity(n));
    }
    let norm = a.norm_one();
    let (u, v, squarings) = if norm <= THETA3 {
        let (u, v) = pade_low_order(&a.0, &PADE3);
        (u, v, 0)
    } else if norm <= THETA5 {
        let (u, v) = pade_low_order(&a.0, &PADE5);
        (u, v, 0)
    } else if norm <= THETA7 {
        let (u, v) = pade_low_order(&a.0, &PADE7);
        (u, v, 0)
    } else if norm <= THETA9 {
        let (u, v) = pade_low_order(&a.0, &PADE9);
        (u, v, 0)
    } else {
        let s = (norm / THETA13).log2().ceil().max(0.0) as i32;
        let scaled = &a.0 * re(2f64.powi(-s));
        let (u, v) = pade13(&scaled);
        (u, v, s)
    };
    let denom = &v - &u;
    let numer = &v + &u;
    let mut result = denom.lu().solve(&numer).ok_or(Error::Singular)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    CMatrix::try_from(result)
}

/// Eigendecomposition of a general (possibly non-normal) square matrix.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub values: Vec<C64>,
    /// Columns are unit-norm right eigenvectors.
    pub right_vectors: CMatrix,
    /// Columns are left eigenvectors scaled so that `left† · right = I`.
    pub left_vectors: CMatrix,
    /// 2-norm condition number of `right_vectors` (unit columns), at least 1.
    pub condition_estimate: f64,
}

impl EigDecomposition {
    /// `right · diag(values) · left†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply_diagonal(|z| z)
    }

    /// `right · diag(f(values)) · left†`, i.e. `f` applied to the matrix.
    pub fn apply_diagonal(&self, f: impl Fn(C64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.right_vectors.0.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        CMatrix(scaled * self.left_vectors.0.adjoint())
    }
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * scale).max(f64::MIN_POSITIVE * n as f64 / f64::EPSILON);
    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = re(1.0);
        for i in (0..k).rev() {
            let mut acc = t[(i, k)];
            for j in (i + 1)..k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                den = re(small);
            }
            y[(i, k)] = -acc / den;
        }
    }
    y
}

/// Eigendecomposition of a general square matrix.
///
/// Left eigenvectors come from inverting the right-eigenvector matrix, so
/// `left† · right = I` holds by construction. Returns
/// [`Error::NearDefective`] when the eigenvector condition estimate exceeds
/// [`tol::NEAR_DEFECTIVE`].
pub fn eig_general(a: &CMatrix) -> Result<EigDecomposition> {
    let decomposition = eig_unchecked(a)?;
    if decomposition.condition_estimate > tol::NEAR_DEFECTIVE {
        return Err(Error::NearDefective {
            condition: decomposition.condition_estimate,
        });
    }
    Ok(decomposition)
}

fn eig_unchecked(a: &CMatrix) -> Result<EigDecomposition> {
    let n = a.require_square()?;
    let schur = nalgebra::Schur::try_new(a.0.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut v = q * triangular_eigenvectors(&t);
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= re(norm);
        }
    }
    let singular = v.clone().svd(false, false).singular_values;
    let smax = singular.max();
    let smin = singular.min();
    let condition_estimate = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !condition_estimate.is_finite() {
        return Err(Error::NearDefective {
            condition: condition_estimate,
        });
    }
    let inv = v.clone().try_inverse().ok_or(Error::NearDefective {
        condition: f64::INFINITY,
    })?;
    Ok(EigDecomposition {
        values,
        right_vectors: CMatrix(v),
        left_vectors: CMatrix(inv.adjoint()),
        condition_estimate: condition_estimate.max(1.0),
    })
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// orthonormal eigenvector columns. The input is symmetrized first.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.require_square()?;
    let eig = nalgebra::SymmetricEigen::try_new(a.hermitian_part().0, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, CMatrix(vectors)))
}

/// `V · diag(f(λ)) · V†` for a Hermitian eigensystem.
pub(crate) fn hermitian_function(
    values: &[f64],
    vectors: &CMatrix,
    f: impl Fn(f64) -> f64,
) -> CMatrix {
    let mut scaled = vectors.0.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let w = re(f(lambda));
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= w;
        }
    }
    CMatrix(scaled * vectors.0.adjoint())
}

/// Positive square root and its inverse of a Hermitian positive-definite matrix.
pub fn sqrt_positive_definite(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if !a.is_hermitian(tol::HERMITICITY * a.max_abs().max(1.0)) {
        return Err(Error::InvalidState("metric is not Hermitian".into()));
    }
    let (values, vectors) = hermitian_eigen(a)?;
    if let Some(&bad) = values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: bad });
    }
    Ok((
        hermitian_function(&values, &vectors, f64::sqrt),
        hermitian_function(&values, &vectors, |v| 1.0 / v.sqrt()),
    ))
}

/// Logarithm of a (generalized) density matrix.
///
/// Eigenvalues below `clip` are floored at `clip` before the logarithm.
/// Hermitian inputs go through the Hermitian eigensolver; anything else
/// through [`eig_general`].
pub fn matrix_log_psd(a: &CMatrix, clip: f64) -> Result<CMatrix> {
    a.require_square()?;
    if a.is_hermitian(tol::HERMITICITY) {
        let (values, vectors) = hermitian_eigen(a)?;
        if let Some(&bad) = values.iter().find(|&&v| v < -clip) {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: bad });
        }
        return Ok(hermitian_function(&values, &vectors, |v| v.max(clip).ln()));
    }
    let eig = eig_general(a)?;
    for z in &eig.values {
        if z.im.abs() > tol::IMAG_EIGENVALUE {
            return Err(Error::InvalidState(format!("complex eigenvalue {z}")));
        }
        if z.re < -clip {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: z.re });
        }
    }
    Ok(eig.apply_diagonal(|z| re(z.re.max(clip).ln())))
}
