//! Dense complex linear algebra: the substrate every other module builds on.
//!
//! Matrices are small (the constructions here live at `d <= 8`, Choi matrices
//! at `d^2 <= 64`), so everything is a plain row-major `Vec` and the Hermitian
//! eigensolver is a cyclic complex Jacobi iteration, which is accurate to
//! machine precision on matrices of this size.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::math::{log2, sqrt};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Absolute and relative numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        if !(abs_eps.is_finite() && rel_eps.is_finite() && abs_eps >= 0.0 && rel_eps >= 0.0) {
            return Err(Error::OutOfRange("tolerances must be finite and >= 0".into()));
        }
        Ok(Self { abs_eps, rel_eps })
    }

    /// Same absolute and relative threshold.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_eps: 1e-9, rel_eps: 1e-9 }
    }
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::OutOfRange("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::BadShape { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ONE; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::OutOfRange("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::OutOfRange("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0))).collect())
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&v)
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    /// Matrix unit `|i><j|` of a `d x d` space.
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        self.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||m - m^dagger||_F`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        sqrt(acc)
    }

    /// `(m + m^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        let half = C64::new(0.5, 0.0);
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * half;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Fallible product; the `Mul` impl panics on mismatched shapes.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(m)
    }

    /// `self * x * self^dagger`
    pub fn sandwich(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Frobenius distance; infinite when shapes differ.
    pub fn distance(&self, other: &Self) -> f64 {
        self.try_sub(other).map_or(f64::INFINITY, |d| d.frobenius_norm())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Entry-wise (Hadamard) product.
pub fn schur_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.same_shape(y)?;
    Ok(ComplexMatrix {
        rows: x.rows,
        cols: x.cols,
        data: x.data.iter().zip(&y.data).map(|(a, b)| a * b).collect(),
    })
}

/// Kronecker product; joint index `(i, k)` maps to `i * b.rows() + k`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut m = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    m[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out the second factor of a `(d1*d2) x (d1*d2)` matrix.
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    if d1 == 0 || d2 == 0 || n != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, found: n });
    }
    let mut out = ComplexMatrix::zeros(d1, d1);
    for i in 0..d1 {
        for j in 0..d1 {
            out[(i, j)] = (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum();
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(diag(lambda)) V^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        m
    }
}

/// Hermitian eigendecomposition with the default tolerance.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eigen_with(m, &Tolerance::default())
}

/// Hermitian eigendecomposition. The input is symmetrized before the
/// iteration; inputs further than `(abs_eps + rel_eps ||m||_F) d` from
/// Hermitian are rejected.
pub fn hermitian_eigen_with(m: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let n = m.ensure_square()?;
    let dev = m.hermitian_deviation();
    if dev > (tol.abs_eps + tol.rel_eps * m.frobenius_norm()) * n as f64 {
        return Err(Error::NotHermitian(dev));
    }
    let (values, vectors) = jacobi(m.hermitian_part());
    Ok(HermitianEigen { values, vectors })
}

fn jacobi(mut a: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.rows;
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if sqrt(off) <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    (values, vectors)
}

// One complex Jacobi rotation annihilating a[p][q]: the phase of a[p][q] is
// absorbed into a diagonal unitary, then a real rotation finishes the job.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r <= 1e-300 || r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase_conj = (apq / r).conj();
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 / (tau + sqrt(1.0 + tau * tau)) } else { -1.0 / (-tau + sqrt(1.0 + tau * tau)) };
    let c = 1.0 / sqrt(1.0 + t * t);
    let s = t * c;
    let g00 = C64::new(c, 0.0);
    let g01 = C64::new(s, 0.0);
    let g10 = phase_conj * (-s);
    let g11 = phase_conj * c;
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g00 + akq * g10;
        a[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

/// PSD test: `lambda_min >= -(abs_eps + rel_eps * max |lambda|)`.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    let eig = hermitian_eigen_with(m, tol)?;
    Ok(psd_from_spectrum(&eig.values, tol))
}

pub(crate) fn psd_from_spectrum(values: &[f64], tol: &Tolerance) -> bool {
    let largest = values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    min >= -(tol.abs_eps + tol.rel_eps * largest)
}

/// Trace norm `tr sqrt(M^dagger M)`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let n = m.ensure_square()?;
    let tol = Tolerance::default();
    if m.hermitian_deviation() <= 1e-12 * (1.0 + m.frobenius_norm()) * n as f64 {
        let eig = hermitian_eigen_with(m, &tol)?;
        return Ok(eig.values.iter().map(|x| x.abs()).sum());
    }
    let gram = m.adjoint().matmul(m)?;
    let eig = hermitian_eigen_with(&gram, &tol)?;
    Ok(eig.values.iter().map(|&x| sqrt(x.max(0.0))).sum())
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * log2(x)
    }
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange("binary entropy argument outside [0, 1]".into()));
    }
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// Shannon entropy in bits of a nonnegative weight vector; `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

fn check_state(rho: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let n = rho.ensure_square()?;
    let eig = hermitian_eigen_with(rho, tol)?;
    if !psd_from_spectrum(&eig.values, tol) {
        return Err(Error::NotPsd(eig.min()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol.abs_eps * n as f64 || tr.im.abs() > tol.abs_eps * n as f64 {
        return Err(Error::InvalidTrace(tr.re));
    }
    Ok(eig)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let eig = check_state(rho, &Tolerance::default())?;
    Ok(shannon_entropy(&eig.values))
}

/// Quantum relative entropy `S(rho || sigma)` in bits; `+inf` when the
/// support of `rho` is not contained in the support of `sigma`.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let tol = Tolerance::default();
    if rho.rows != sigma.rows {
        return Err(Error::DimensionMismatch { expected: rho.rows, found: sigma.rows });
    }
    let er = check_state(rho, &tol)?;
    let es = check_state(sigma, &tol)?;
    let neg_entropy: f64 = er.values.iter().map(|&x| xlog2x(x)).sum();
    let mut cross = 0.0;
    for (k, &mu) in es.values.iter().enumerate() {
        let w = es.vector(k);
        let rw = rho.mul_vec(&w)?;
        let weight: f64 = w.iter().zip(&rw).map(|(a, b)| (a.conj() * b).re).sum();
        if mu <= tol.abs_eps {
            if weight > tol.abs_eps {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * log2(mu);
    }
    Ok(neg_entropy - cross)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.ensure_square()?;
    let mut a = m.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = a[(i, col)] / p;
            if f == ZERO {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    Ok(det)
}

/// Numerical rank of a family of vectors by modified Gram-Schmidt with one
/// re-orthogonalization pass. A vector counts as independent when its residual
/// exceeds `rel_tol` times the largest input norm.
pub fn vector_rank(vectors: &[Vec<C64>], rel_tol: f64) -> usize {
    let scale = vectors
        .iter()
        .map(|v| sqrt(v.iter().map(|z| z.norm_sqr()).sum()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= proj * bi;
                }
            }
        }
        let norm = sqrt(r.iter().map(|z| z.norm_sqr()).sum());
        if norm > rel_tol * scale {
            basis.push(r.iter().map(|z| z / norm).collect());
        }
    }
    basis.len()
}
