//! Kraus maps, Schur maps and the plumbing that compares them.
//!
//! Two maps are treated as equal when their Choi matrices agree to within
//! `1e-10 * d` in Frobenius norm.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cos, sin, sqrt};
use crate::numkit::{hermitian_eigen, hermitian_eigen_with, is_psd, psd_from_spectrum, tensor, vector_rank};
use crate::states::DensityMatrix;
use crate::{ComplexMatrix, Error, Result, Tolerance, C64};

/// Choi-matrix distance (scaled by `d`) below which two maps are equal.
pub const CHANNEL_EQ_EPS: f64 = 1e-10;
/// Relative eigenvalue threshold for Choi and Schur-matrix ranks.
pub const RANK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletenessClass {
    TracePreserving,
    TraceNonIncreasing,
    Invalid,
}

/// Classifies `sum_i K_i^dagger K_i` against the identity.
pub fn completeness_class(kraus: &[ComplexMatrix], tol: &Tolerance) -> CompletenessClass {
    let Some(first) = kraus.first() else {
        return CompletenessClass::Invalid;
    };
    let d = first.rows();
    if kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
        return CompletenessClass::Invalid;
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    let id = ComplexMatrix::identity(d);
    if sum.distance(&id) <= tol.abs_eps * d as f64 {
        return CompletenessClass::TracePreserving;
    }
    match is_psd(&(&id - &sum), tol) {
        Ok(true) => CompletenessClass::TraceNonIncreasing,
        _ => CompletenessClass::Invalid,
    }
}

/// Trace non-increasing completely positive map on `d x d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, &Tolerance::default())
    }

    pub fn with_tolerance(kraus: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.ensure_square()?;
        for k in &kraus {
            k.ensure_square()?;
            if k.rows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.rows() });
            }
        }
        if completeness_class(&kraus, tol) == CompletenessClass::Invalid {
            return Err(Error::NotTraceNonIncreasing);
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim: d, kraus: vec![ComplexMatrix::identity(d)] }
    }

    /// Full dephasing `{|i><i|}`.
    pub fn dephasing(d: usize) -> Self {
        Self { dim: d, kraus: (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect() }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn completeness(&self) -> CompletenessClass {
        completeness_class(&self.kraus, &Tolerance::default())
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness() == CompletenessClass::TracePreserving
    }

    /// `sum_i K_i x K_i^dagger` for an arbitrary square `x`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.rows() });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &k.sandwich(x)?;
        }
        Ok(out)
    }

    /// Unnormalized output and its trace (the success probability).
    pub fn apply(&self, rho: &DensityMatrix) -> Result<(ComplexMatrix, f64)> {
        let out = self.apply_matrix(rho.matrix())?;
        let p = out.trace().re;
        Ok((out, p))
    }

    /// `C[(i,a),(j,b)] = Lambda(|i><j|)[a,b]`, joint index `i * d + a`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut c = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let v: Vec<C64> = (0..d * d).map(|idx| k[(idx % d, idx / d)]).collect();
            for (r, &vr) in v.iter().enumerate() {
                if vr == C64::new(0.0, 0.0) {
                    continue;
                }
                for (s, &vs) in v.iter().enumerate() {
                    c[(r, s)] += vr * vs.conj();
                }
            }
        }
        c
    }

    /// Choi-matrix equality within `1e-10 * d`.
    pub fn same_channel(&self, other: &KrausMap) -> bool {
        self.dim == other.dim && self.choi().distance(&other.choi()) <= CHANNEL_EQ_EPS * self.dim as f64
    }

    /// `self` after `first`.
    pub fn compose_after(&self, first: &KrausMap) -> Result<KrausMap> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: first.dim });
        }
        let mut ops = Vec::with_capacity(self.len() * first.len());
        for a in &self.kraus {
            for b in &first.kraus {
                ops.push(a * b);
            }
        }
        KrausMap::new(ops)
    }
}

/// Hermitian PSD matrix `A` with `0 <= A_ii <= 1`, acting as `rho -> A (.) rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurMatrix {
    matrix: ComplexMatrix,
}

impl SchurMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, &Tolerance::default())
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let eig = hermitian_eigen_with(&matrix, tol)?;
        if !psd_from_spectrum(&eig.values, tol) {
            return Err(Error::NotPsd(eig.min()));
        }
        for a in matrix.real_diagonal() {
            if a < -tol.abs_eps || a > 1.0 + tol.abs_eps {
                return Err(Error::NotSgi);
            }
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_unit_diagonal(&self, eps: f64) -> bool {
        self.matrix.real_diagonal().iter().all(|a| (a - 1.0).abs() <= eps)
    }

    /// `A (.) x`
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        crate::numkit::schur_product(&self.matrix, x)
    }
}

/// Diagonal Kraus operators realizing `rho -> A (.) rho`: one per positive
/// eigenvalue of `A`, `K_k = diag(sqrt(lambda_k) v_k)`.
pub fn schur_map(a: &SchurMatrix) -> Result<KrausMap> {
    let eig = hermitian_eigen(a.matrix())?;
    let cutoff = RANK_EPS * eig.max().max(0.0);
    let mut ops = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= cutoff || lam <= 0.0 {
            continue;
        }
        let s = sqrt(lam);
        let diag: Vec<C64> = eig.vector(k).iter().map(|z| z * s).collect();
        ops.push(ComplexMatrix::from_diagonal(&diag));
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(a.dim(), a.dim()));
    }
    KrausMap::new(ops)
}

/// The Schur matrix of `m`, if `m` acts as an entrywise product.
pub fn extract_schur_matrix(m: &KrausMap) -> Option<SchurMatrix> {
    extract_schur_matrix_with(m, &Tolerance::default())
}

pub fn extract_schur_matrix_with(m: &KrausMap, tol: &Tolerance) -> Option<SchurMatrix> {
    let d = m.dim();
    let c = m.choi();
    let mut a = ComplexMatrix::zeros(d, d);
    for r in 0..d * d {
        let (i, ai) = (r / d, r % d);
        for s in 0..d * d {
            let (j, bj) = (s / d, s % d);
            if ai == i && bj == j {
                a[(i, j)] = c[(r, s)];
            } else if c[(r, s)].norm() > tol.abs_eps {
                return None;
            }
        }
    }
    SchurMatrix::with_tolerance(a, tol).ok()
}

/// `L_i = sum_j V_ij K_j`. Accepted when the new operators implement the
/// same map; that holds whenever `V^dagger V = 1`.
pub fn transform_representation(m: &KrausMap, v: &ComplexMatrix) -> Result<KrausMap> {
    if v.cols() != m.len() {
        return Err(Error::DimensionMismatch { expected: m.len(), found: v.cols() });
    }
    let d = m.dim();
    let mut ops = Vec::with_capacity(v.rows());
    for i in 0..v.rows() {
        let mut l = ComplexMatrix::zeros(d, d);
        for (j, k) in m.kraus().iter().enumerate() {
            let w = v[(i, j)];
            if w != C64::new(0.0, 0.0) {
                l = &l + &k.scale(w);
            }
        }
        ops.push(l);
    }
    let deviation = v.adjoint().matmul(v)?.distance(&ComplexMatrix::identity(v.cols()));
    let out = KrausMap { dim: d, kraus: ops };
    if !m.same_channel(&out) {
        return Err(Error::NotPartialIsometry(deviation));
    }
    Ok(out)
}

/// Linearly independent Kraus operators for the same map. Representations that
/// are already independent come back unchanged; otherwise operators are read
/// off the Choi eigenvectors.
pub fn minimal_representation(m: &KrausMap) -> Result<KrausMap> {
    let d = m.dim();
    let vecs: Vec<Vec<C64>> = m.kraus().iter().map(|k| k.entries().to_vec()).collect();
    if vector_rank(&vecs, RANK_EPS) == m.len() {
        return Ok(m.clone());
    }
    let eig = hermitian_eigen(&m.choi())?;
    let cutoff = RANK_EPS * eig.max();
    let mut ops = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate().rev() {
        if lam <= cutoff {
            continue;
        }
        let s = sqrt(lam);
        let v = eig.vector(k);
        let mut op = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for a in 0..d {
                op[(a, i)] = v[i * d + a] * s;
            }
        }
        ops.push(op);
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(d, d));
    }
    Ok(KrausMap { dim: d, kraus: ops })
}

/// Rank of the Choi matrix with the relative threshold [`RANK_EPS`].
pub fn choi_rank(m: &KrausMap) -> Result<usize> {
    let eig = hermitian_eigen(&m.choi())?;
    let cutoff = RANK_EPS * eig.max();
    Ok(eig.values.iter().filter(|&&x| x > cutoff).count())
}

/// Bijection on `{0, ..., d-1}`; `|j> -> |mapping[j]>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let d = mapping.len();
        if d == 0 {
            return Err(Error::OutOfRange("empty permutation".into()));
        }
        let mut seen = vec![false; d];
        for &x in &mapping {
            if x >= d || seen[x] {
                return Err(Error::OutOfRange("mapping is not a bijection".into()));
            }
            seen[x] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(d: usize) -> Self {
        Self { mapping: (0..d).collect() }
    }

    pub fn transposition(d: usize, a: usize, b: usize) -> Result<Self> {
        if a >= d || b >= d {
            return Err(Error::OutOfRange("transposition index exceeds dimension".into()));
        }
        let mut mapping: Vec<usize> = (0..d).collect();
        mapping.swap(a, b);
        Ok(Self { mapping })
    }

    pub fn dim(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn image(&self, j: usize) -> usize {
        self.mapping[j]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (j, &x) in self.mapping.iter().enumerate() {
            inv[x] = j;
        }
        Self { mapping: inv }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Permutation) -> Self {
        Self { mapping: first.mapping.iter().map(|&j| self.mapping[j]).collect() }
    }

    pub fn unitary(&self) -> ComplexMatrix {
        permutation_unitary(self)
    }

    /// Transpositions `t_1, ..., t_m` with `P = P_{t_1} ... P_{t_m}`.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let mut cur = self.mapping.clone();
        let mut out = Vec::new();
        for j in 0..cur.len() {
            if cur[j] != j {
                let a = cur[j];
                out.push((a, j));
                for x in cur.iter_mut() {
                    if *x == a {
                        *x = j;
                    } else if *x == j {
                        *x = a;
                    }
                }
            }
        }
        out
    }

    /// Permutes amplitudes: output index `mapping[j]` receives input `j`.
    pub fn apply_vec<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.mapping[j]] = x;
        }
        out
    }

    /// All permutations of `{0, ..., d-1}` by Heap's algorithm.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut a: Vec<usize> = (0..d).collect();
        let mut c = vec![0usize; d];
        let mut out = vec![Permutation { mapping: a.clone() }];
        let mut i = 0;
        while i < d {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                out.push(Permutation { mapping: a.clone() });
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }
}

/// `P[mapping[j], j] = 1`
pub fn permutation_unitary(p: &Permutation) -> ComplexMatrix {
    let d = p.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for (j, &i) in p.mapping.iter().enumerate() {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// `diag(e^{i theta_0}, ..., e^{i theta_{d-1}})`
pub fn diagonal_unitary(phases: &[f64]) -> ComplexMatrix {
    let diag: Vec<C64> = phases.iter().map(|&t| C64::new(cos(t), sin(t))).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `{K_i (x) L_j}`
pub fn tensor_channels(a: &KrausMap, b: &KrausMap) -> Result<KrausMap> {
    let mut ops = Vec::with_capacity(a.len() * b.len());
    for k in a.kraus() {
        for l in b.kraus() {
            ops.push(tensor(k, l));
        }
    }
    KrausMap::new(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::plus_state;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn eq63() -> KrausMap {
        let h = 0.5f64.sqrt();
        let k1 = ComplexMatrix::from_rows(&[
            vec![c(0.0, h), c(0.0, 0.0), c(h, 0.0)],
            vec![c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0); 3],
        ])
        .unwrap();
        let k2 = ComplexMatrix::from_rows(&[
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, h)],
            vec![c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0); 3],
        ])
        .unwrap();
        KrausMap::new(vec![k1, k2]).unwrap()
    }

    fn erase() -> KrausMap {
        KrausMap::new(vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 0, 1)]).unwrap()
    }

    fn rand_matrix(d: usize, vals: &[f64]) -> ComplexMatrix {
        let data = (0..d * d).map(|k| c(vals[2 * k], vals[2 * k + 1])).collect();
        ComplexMatrix::new(d, d, data).unwrap()
    }

    // Random channel from an isometry: the columns of a random matrix are
    // orthonormalized and cut into Kraus blocks.
    fn rand_channel(d: usize, n: usize, vals: &[f64]) -> KrausMap {
        let rows = n * d;
        let mut cols: Vec<Vec<C64>> = (0..d).map(|j| (0..rows).map(|r| c(vals[2 * (j * rows + r)], vals[2 * (j * rows + r) + 1])).collect()).collect();
        for j in 0..d {
            for p in 0..j {
                let proj: C64 = cols[p].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let prev = cols[p].clone();
                for (x, y) in cols[j].iter_mut().zip(&prev) {
                    *x -= proj * y;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        let ops = (0..n)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(d, d);
                for a in 0..d {
                    for j in 0..d {
                        m[(a, j)] = cols[j][k * d + a];
                    }
                }
                m
            })
            .collect();
        KrausMap::new(ops).unwrap()
    }

    #[test]
    fn apply_examples() {
        let rho = plus_state(3).unwrap().to_density();
        let (out, p) = KrausMap::identity(3).apply(&rho).unwrap();
        assert_eq!(out, *rho.matrix());
        assert!((p - 1.0).abs() < 1e-15);

        let (out, p) = eq63().apply(&rho).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        let expected = [C64::from_polar((2.0f64 / 3.0).sqrt(), core::f64::consts::FRAC_PI_4), c((1.0f64 / 3.0).sqrt(), 0.0), c(0.0, 0.0)];
        assert!(out.distance(&ComplexMatrix::outer(&expected, &expected)) < 1e-14);

        let qubit = DensityMatrix::new(ComplexMatrix::from_rows(&[vec![c(0.3, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.7, 0.0)]]).unwrap()).unwrap();
        let (out, p) = erase().apply(&qubit).unwrap();
        assert!(out.distance(&ComplexMatrix::unit(2, 0, 0)) < 1e-15);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn completeness_examples() {
        let tol = Tolerance::default();
        let id = ComplexMatrix::identity(2);
        assert_eq!(completeness_class(&[id.clone()], &tol), CompletenessClass::TracePreserving);
        assert_eq!(completeness_class(&[id.scale_real(0.5)], &tol), CompletenessClass::TraceNonIncreasing);
        assert_eq!(completeness_class(&[id.scale_real(2f64.sqrt())], &tol), CompletenessClass::Invalid);
        assert_eq!(completeness_class(&[], &tol), CompletenessClass::Invalid);
        assert!(matches!(KrausMap::new(vec![id.scale_real(2.0)]), Err(Error::NotTraceNonIncreasing)));
        assert!(matches!(KrausMap::new(vec![]), Err(Error::EmptyKraus)));
    }

    #[test]
    fn choi_examples() {
        let bell = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(KrausMap::identity(2).choi(), ComplexMatrix::outer(&bell, &bell));
        assert_eq!(KrausMap::dephasing(2).choi(), ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn schur_extraction() {
        let a = extract_schur_matrix(&KrausMap::identity(3)).unwrap();
        assert_eq!(a.matrix(), &ComplexMatrix::ones(3, 3));
        let a = extract_schur_matrix(&KrausMap::dephasing(3)).unwrap();
        assert_eq!(a.matrix(), &ComplexMatrix::identity(3));
        assert!(extract_schur_matrix(&erase()).is_none());
        assert!(extract_schur_matrix(&KrausMap::unitary(permutation_unitary(&Permutation::transposition(2, 0, 1).unwrap())).unwrap()).is_none());

        // the GI map reaching [[3/4,1/4],[1/4,1/4]] from |+_2>
        let r = 1.0 / 3f64.sqrt();
        let target = SchurMatrix::new(ComplexMatrix::from_real_rows(&[&[1.0, r], &[r, 1.0]]).unwrap()).unwrap();
        let map = schur_map(&target).unwrap();
        let back = extract_schur_matrix(&map).unwrap();
        assert!(back.matrix().distance(target.matrix()) < 1e-14);
    }

    #[test]
    fn eq35_mixing_exposes_coherence() {
        let k1 = ComplexMatrix::unit(3, 0, 0).scale_real(0.5f64.sqrt());
        let k2 = &ComplexMatrix::unit(3, 1, 0).scale_real(0.5f64.sqrt()) + &ComplexMatrix::unit(3, 2, 1);
        let k3 = ComplexMatrix::unit(3, 2, 2);
        let m = KrausMap::new(vec![k1, k2, k3]).unwrap();
        let h = 0.5f64.sqrt();
        let v = ComplexMatrix::from_real_rows(&[&[h, h, 0.0], &[h, -h, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        let l = transform_representation(&m, &v).unwrap();
        let col: Vec<_> = l.kraus()[0].column(0).iter().map(|z| z.norm() > 1e-12).collect();
        assert_eq!(col, vec![true, true, false]);
        assert!(l.same_channel(&m));
        assert_eq!(transform_representation(&m, &ComplexMatrix::identity(3)).unwrap(), m);
        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(transform_representation(&m, &bad), Err(Error::NotPartialIsometry(_))));
    }

    #[test]
    fn minimal_representation_examples() {
        let k = ComplexMatrix::from_real_rows(&[&[0.6, 0.0], &[0.0, 0.8]]).unwrap();
        let dup = KrausMap::new(vec![k.scale_real(0.5f64.sqrt()), k.scale_real(0.5f64.sqrt())]).unwrap();
        let min = minimal_representation(&dup).unwrap();
        assert_eq!(min.len(), 1);
        assert!(min.same_channel(&dup));
        assert_eq!(minimal_representation(&KrausMap::identity(3)).unwrap().len(), 1);

        let a: Vec<f64> = (1..=4).map(|k| 1.0 / k as f64).collect();
        let ik = [c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)];
        let b: Vec<C64> = a.iter().zip(ik).map(|(&x, p)| p * (1.0 - x * x).sqrt()).collect();
        let t19 = KrausMap::new(vec![ComplexMatrix::from_real_diagonal(&a), ComplexMatrix::from_diagonal(&b)]).unwrap();
        assert_eq!(minimal_representation(&t19).unwrap(), t19);
        assert_eq!(choi_rank(&t19).unwrap(), 2);
    }

    #[test]
    fn permutations() {
        let p = Permutation::transposition(2, 0, 1).unwrap();
        assert_eq!(permutation_unitary(&p), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
        assert_eq!(&p.unitary() * &p.unitary(), ComplexMatrix::identity(2));
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert_eq!(Permutation::all(4).len(), 24);
        let mut all = Permutation::all(4);
        all.sort_by(|a, b| a.mapping.cmp(&b.mapping));
        all.dedup();
        assert_eq!(all.len(), 24);
        for q in Permutation::all(5) {
            let mut prod = ComplexMatrix::identity(5);
            for (a, b) in q.transpositions() {
                prod = &prod * &Permutation::transposition(5, a, b).unwrap().unitary();
            }
            assert_eq!(prod, q.unitary());
            assert_eq!(q.compose(&q.inverse()), Permutation::identity(5));
        }
        let v = [1usize, 2, 3];
        let q = Permutation::new(vec![2, 0, 1]).unwrap();
        let moved = q.apply_vec(&v);
        let as_c: Vec<C64> = v.iter().map(|&x| c(x as f64, 0.0)).collect();
        let via_matrix = q.unitary().mul_vec(&as_c).unwrap();
        assert!(moved.iter().zip(&via_matrix).all(|(&a, b)| (a as f64 - b.re).abs() < 1e-15));
    }

    #[test]
    fn diagonal_unitaries() {
        let u = diagonal_unitary(&[0.0, core::f64::consts::PI / 2.0]);
        assert!((u[(1, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((&u * &u.adjoint()).distance(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let id = tensor_channels(&KrausMap::identity(2), &KrausMap::identity(2)).unwrap();
        assert!(id.same_channel(&KrausMap::identity(4)));
        let dd = tensor_channels(&KrausMap::dephasing(2), &KrausMap::dephasing(2)).unwrap();
        assert!(dd.same_channel(&KrausMap::dephasing(4)));
        assert_eq!(extract_schur_matrix(&dd).unwrap().matrix(), &ComplexMatrix::identity(4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn choi_invariants(vals in prop::collection::vec(-1.0f64..1.0, 2 * 3 * 3 * 2), w in 0.0f64..1.0, rvals in prop::collection::vec(-1.0f64..1.0, 36)) {
            let m = rand_channel(3, 2, &vals);
            let choi = m.choi();
            prop_assert!(is_psd(&choi, &Tolerance::default()).unwrap());
            prop_assert!((choi.trace().re - 3.0).abs() < 1e-9);
            prop_assert_eq!(choi_rank(&m).unwrap(), minimal_representation(&m).unwrap().len());
            prop_assert!(minimal_representation(&m).unwrap().same_channel(&m));

            // linearity on convex combinations
            let a = rand_matrix(3, &rvals);
            let rho = DensityMatrix::normalized(&a * &a.adjoint()).unwrap();
            let sigma = DensityMatrix::maximally_mixed(3).unwrap();
            let mix = DensityMatrix::new(&rho.matrix().scale_real(w) + &sigma.matrix().scale_real(1.0 - w)).unwrap();
            let lhs = m.apply(&mix).unwrap().0;
            let rhs = &m.apply(&rho).unwrap().0.scale_real(w) + &m.apply(&sigma).unwrap().0.scale_real(1.0 - w);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn unitary_mixing_preserves_channel(vals in prop::collection::vec(-1.0f64..1.0, 2 * 2 * 2 * 2), uvals in prop::collection::vec(-1.0f64..1.0, 2 * 2 * 2 * 2)) {
            let m = rand_channel(2, 2, &vals);
            let u = rand_channel(2, 1, &uvals).kraus()[0].clone();
            let l = transform_representation(&m, &u).unwrap();
            prop_assert!(l.choi().distance(&m.choi()) <= 1e-10);
        }

        #[test]
        fn schur_maps_act_entrywise(vals in prop::collection::vec(-1.0f64..1.0, 18), rvals in prop::collection::vec(-1.0f64..1.0, 18)) {
            let g = rand_matrix(3, &vals);
            let gram = &g * &g.adjoint();
            let dmax = gram.real_diagonal().into_iter().fold(0.0, f64::max);
            let a = SchurMatrix::new(gram.scale_real(1.0 / dmax)).unwrap();
            let m = schur_map(&a).unwrap();
            let back = extract_schur_matrix(&m).unwrap();
            prop_assert!(back.matrix().distance(a.matrix()) < 1e-10);
            let r = rand_matrix(3, &rvals);
            let rho = DensityMatrix::normalized(&r * &r.adjoint()).unwrap();
            let out = m.apply(&rho).unwrap().0;
            prop_assert!(out.distance(&a.apply_matrix(rho.matrix()).unwrap()) < 1e-10);
            let sq = tensor_channels(&m, &m).unwrap();
            let sa = extract_schur_matrix(&sq).unwrap();
            prop_assert!(sa.matrix().distance(&tensor(a.matrix(), a.matrix())) < 1e-10);
        }
    }
}
