//! States in the fixed incoherent basis `{|0>, ..., |d-1>}`.

use alloc::vec::Vec;

use crate::math::{log2, sqrt};
use crate::numkit::{self, binary_entropy, hermitian_eigen_with, psd_from_spectrum, shannon_entropy};
use crate::{ComplexMatrix, Error, Result, Tolerance, C64};

/// Normalization slack shared by pure and mixed states.
pub const NORM_EPS: f64 = 1e-10;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::OutOfRange("state dimension must be positive".into()));
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_EPS {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Basis state `|i>`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::OutOfRange("basis index exceeds dimension".into()));
        }
        let mut a = alloc::vec![C64::new(0.0, 0.0); d];
        a[i] = C64::new(1.0, 0.0);
        Self::new(a)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Squared moduli `|psi_i|^2`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `|psi><psi|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { matrix: self.projector() }
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let overlap: C64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(overlap.norm_sqr())
    }
}

/// Hermitian, PSD, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, &Tolerance::default())
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        matrix.ensure_square()?;
        let eig = hermitian_eigen_with(&matrix, tol)?;
        if !psd_from_spectrum(&eig.values, tol) {
            return Err(Error::NotPsd(eig.min()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_EPS || tr.im.abs() > NORM_EPS {
            return Err(Error::InvalidTrace(tr.re));
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    /// Divides by the trace before validating.
    pub fn normalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::OutOfRange("state dimension must be positive".into()));
        }
        Self::new(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.real_diagonal()
    }

    pub fn spectrum(&self) -> Vec<f64> {
        numkit::hermitian_eigen(&self.matrix).map(|e| e.values).unwrap_or_default()
    }

    /// True if every off-diagonal entry is at most `eps` in modulus.
    pub fn is_incoherent(&self, eps: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].norm() <= eps))
    }

    /// Returns the state vector if the matrix is rank one within `eps`.
    pub fn as_pure(&self, eps: f64) -> Option<PureState> {
        let eig = numkit::hermitian_eigen(&self.matrix).ok()?;
        if (eig.max() - 1.0).abs() > eps {
            return None;
        }
        let v = eig.vector(self.dim() - 1);
        // fix the global phase so the first nonzero amplitude is real positive
        let lead = v.iter().copied().find(|z| z.norm() > 1e-12)?;
        let phase = (lead / lead.norm()).conj();
        PureState::normalized(v.into_iter().map(|z| z * phase).collect()).ok()
    }
}

/// Sorted indices of nonzero amplitudes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceSet {
    pub dim: usize,
    pub members: Vec<usize>,
}

impl CoherenceSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &CoherenceSet) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    /// Indices outside the set.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.contains(i)).collect()
    }
}

/// `|+_d> = d^{-1/2} sum_i |i>`
pub fn plus_state(d: usize) -> Result<PureState> {
    if d < 1 {
        return Err(Error::OutOfRange("d must be at least 1".into()));
    }
    let a = C64::new(1.0 / sqrt(d as f64), 0.0);
    PureState::new(alloc::vec![a; d])
}

pub fn coherence_set(psi: &PureState, tol: &Tolerance) -> CoherenceSet {
    let members = psi.amplitudes.iter().enumerate().filter(|(_, z)| z.norm() > tol.abs_eps).map(|(i, _)| i).collect();
    CoherenceSet { dim: psi.dim(), members }
}

pub fn coherence_rank(psi: &PureState) -> usize {
    coherence_set(psi, &Tolerance::default()).len()
}

/// Full dephasing: keeps the diagonal.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix { matrix: ComplexMatrix::from_diagonal(&rho.matrix.diagonal()) }
}

/// Relative entropy of coherence `S(Delta rho) - S(rho)` in bits.
pub fn rel_entropy_coherence(rho: &DensityMatrix) -> f64 {
    let diag: Vec<f64> = rho.populations().iter().map(|x| x.max(0.0)).collect();
    let spectrum: Vec<f64> = rho.spectrum().iter().map(|x| x.max(0.0)).collect();
    (shannon_entropy(&diag) - shannon_entropy(&spectrum)).max(0.0)
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < -NORM_EPS) {
        return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > NORM_EPS {
        return Err(Error::InvalidDistribution(alloc::format!("entries sum to {s}")));
    }
    Ok(())
}

/// True iff `p` majorizes `q`.
pub fn majorizes(p: &[f64], q: &[f64]) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let mut ps = p.to_vec();
    let mut qs = q.to_vec();
    ps.sort_by(|a, b| b.total_cmp(a));
    qs.sort_by(|a, b| b.total_cmp(a));
    let (mut sp, mut sq) = (0.0, 0.0);
    for (a, b) in ps.iter().zip(&qs) {
        sp += a;
        sq += b;
        if sp + NORM_EPS < sq {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `eps log2 d + 2 h(eps / 2)`
pub fn continuity_bound(eps: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange("eps outside [0, 1]".into()));
    }
    if d < 2 {
        return Err(Error::OutOfRange("d must be at least 2".into()));
    }
    Ok(eps * log2(d as f64) + 2.0 * binary_entropy(eps / 2.0)?)
}
