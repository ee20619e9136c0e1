//! Membership predicates for the incoherent-operation classes, hidden
//! coherence witnesses, extremality and mixed-unitary decompositions.
//!
//! `io`, `sio` and `fi` look at the Kraus operators as given; every other flag
//! is computed from the Choi matrix and so does not depend on the
//! representation. The implications between flags hold for trace-preserving
//! maps; for stochastic branches `fi` need not imply `dio`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{extract_schur_matrix_with, minimal_representation, transform_representation, KrausMap, SchurMatrix};
use crate::math::{acos, cos, sin, sqrt};
use crate::numkit::{determinant, hermitian_eigen, vector_rank};
use crate::{ComplexMatrix, Error, Result, Tolerance, C64};

/// True iff every column has at most one entry above `abs_eps`.
pub fn is_incoherent_operator(k: &ComplexMatrix, tol: &Tolerance) -> bool {
    (0..k.cols()).all(|j| (0..k.rows()).filter(|&i| k[(i, j)].norm() > tol.abs_eps).count() <= 1)
}

/// True iff all operators are incoherent and, column by column, put their
/// nonzero entry in the same row.
pub fn same_form(kraus: &[ComplexMatrix], tol: &Tolerance) -> bool {
    let Some(first) = kraus.first() else {
        return true;
    };
    if kraus.iter().any(|k| k.rows() != first.rows() || k.cols() != first.cols()) {
        return false;
    }
    for j in 0..first.cols() {
        let mut shared = None;
        for k in kraus {
            let mut rows = (0..k.rows()).filter(|&i| k[(i, j)].norm() > tol.abs_eps);
            if let Some(r) = rows.next() {
                if rows.next().is_some() {
                    return false;
                }
                match shared {
                    None => shared = Some(r),
                    Some(s) if s != r => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Nondegenerate Hamiltonian diagonal in the incoherent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::OutOfRange("empty spectrum".into()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (i, a) in energies.iter().enumerate() {
            for b in &energies[i + 1..] {
                if (a - b).abs() <= 1e-12 {
                    return Err(Error::DegenerateHamiltonian);
                }
            }
        }
        Ok(Self { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub io: bool,
    pub gi: bool,
    pub sgi: bool,
    pub fi: bool,
    pub sio: bool,
    pub mio: bool,
    pub dio: bool,
    /// Present only when a Hamiltonian was supplied.
    pub tio: Option<bool>,
    pub trace_preserving: bool,
    /// Present iff `sgi` (and therefore whenever `gi`).
    pub schur: Option<SchurMatrix>,
}

pub fn classify_channel(m: &KrausMap, h: Option<&Hamiltonian>) -> Result<ClassificationReport> {
    classify_channel_with(m, h, &Tolerance::default())
}

pub fn classify_channel_with(m: &KrausMap, h: Option<&Hamiltonian>, tol: &Tolerance) -> Result<ClassificationReport> {
    let d = m.dim();
    if let Some(h) = h {
        if h.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: h.dim() });
        }
    }
    let kraus = m.kraus();
    let io = kraus.iter().all(|k| is_incoherent_operator(k, tol));
    let fi = io && same_form(kraus, tol);
    let sio = io && kraus.iter().all(|k| is_incoherent_operator(&k.adjoint(), tol));

    let choi = m.choi();
    let at = |i: usize, a: usize, j: usize, b: usize| choi[(i * d + a, j * d + b)];
    let mio = (0..d).all(|i| (0..d).all(|a| (0..d).all(|b| a == b || at(i, a, i, b).norm() <= tol.abs_eps)));
    let dio = mio && (0..d).all(|i| (0..d).all(|j| i == j || (0..d).all(|a| at(i, a, j, a).norm() <= tol.abs_eps)));

    let schur = extract_schur_matrix_with(m, tol);
    let sgi = schur.is_some();
    let gi = schur.as_ref().is_some_and(|a| a.is_unit_diagonal(tol.abs_eps * d as f64));

    let tio = h.map(|h| {
        let e = h.energies();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let f = e[i] - e[j] - e[a] + e[b];
                        acc += (at(i, a, j, b) * f).norm_sqr();
                    }
                }
            }
        }
        sqrt(acc) <= 1e-9 * (d * d) as f64
    });

    Ok(ClassificationReport {
        io,
        gi,
        sgi,
        fi,
        sio,
        mio,
        dio,
        tio,
        trace_preserving: m.is_trace_preserving(),
        schur,
    })
}

/// An equivalent representation with a coherence-creating Kraus operator, or
/// `None` when the map is fully incoherent.
pub fn expose_hidden_coherence(m: &KrausMap) -> Result<Option<KrausMap>> {
    let tol = Tolerance::default();
    let kraus = m.kraus();
    if !kraus.iter().all(|k| is_incoherent_operator(k, &tol)) {
        return Err(Error::NotIncoherentRepresentation);
    }
    if same_form(kraus, &tol) {
        return Ok(None);
    }
    let row_of = |k: &ComplexMatrix, j: usize| (0..k.rows()).find(|&i| k[(i, j)].norm() > tol.abs_eps);
    for j in 0..m.dim() {
        for a in 0..kraus.len() {
            let Some(ra) = row_of(&kraus[a], j) else { continue };
            for b in (a + 1)..kraus.len() {
                let Some(rb) = row_of(&kraus[b], j) else { continue };
                if ra == rb {
                    continue;
                }
                let n = kraus.len();
                let h = C64::new(1.0 / sqrt(2.0), 0.0);
                let mut v = ComplexMatrix::identity(n);
                v[(a, a)] = h;
                v[(a, b)] = h;
                v[(b, a)] = h;
                v[(b, b)] = -h;
                return transform_representation(m, &v).map(Some);
            }
        }
    }
    Err(Error::Precondition("no column with differing rows".into()))
}

/// Result of the unital-extremality test.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityWitness {
    pub extremal: bool,
    pub rank_found: usize,
    pub rank_required: usize,
    /// `(t, u, v, w)` for two-operator minimal representations.
    pub witness_vectors: Option<[Vec<C64>; 4]>,
    /// `det(t, u, v, w)` when that family is square (`d = 4`).
    pub family_determinant: Option<C64>,
}

fn gi_schur(m: &KrausMap) -> Result<SchurMatrix> {
    let report = classify_channel(m, None)?;
    match report.schur {
        Some(a) if report.gi => Ok(a),
        _ => Err(Error::NotGi),
    }
}

/// Extremality among unital (equivalently GI) maps: the diagonals of
/// `K_i^dagger K_j` over a minimal representation must be independent.
pub fn gi_extremality(m: &KrausMap) -> Result<ExtremalityWitness> {
    gi_schur(m)?;
    let min = minimal_representation(m)?;
    let diags: Vec<Vec<C64>> = min.kraus().iter().map(|k| k.diagonal()).collect();
    let n = diags.len();
    let mut family = Vec::with_capacity(n * n);
    for ki in &diags {
        for kj in &diags {
            family.push(ki.iter().zip(kj).map(|(x, y)| x.conj() * y).collect::<Vec<_>>());
        }
    }
    let rank_found = vector_rank(&family, 1e-9);
    let rank_required = n * n;
    let (witness_vectors, family_determinant) = if n == 2 {
        let (a, b) = (&diags[0], &diags[1]);
        let t: Vec<C64> = a.iter().map(|x| C64::new(x.norm_sqr(), 0.0)).collect();
        let u: Vec<C64> = b.iter().map(|x| C64::new(x.norm_sqr(), 0.0)).collect();
        let v: Vec<C64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
        let w: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * y.conj()).collect();
        let det = if m.dim() == 4 {
            let mut mat = ComplexMatrix::zeros(4, 4);
            for (col, vec) in [&t, &u, &v, &w].into_iter().enumerate() {
                for (row, z) in vec.iter().enumerate() {
                    mat[(row, col)] = *z;
                }
            }
            Some(determinant(&mat)?)
        } else {
            None
        };
        (Some([t, u, v, w]), det)
    } else {
        (None, None)
    };
    Ok(ExtremalityWitness { extremal: rank_found == rank_required, rank_found, rank_required, witness_vectors, family_determinant })
}

/// One term `p U rho U^dagger` with `U = diag(e^{i phases})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedUnitaryTerm {
    pub weight: f64,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MixedUnitaryOutcome {
    Found(Vec<MixedUnitaryTerm>),
    /// Extremal with more than one Kraus operator: provably no decomposition.
    NotMixedUnitary,
    /// The search ran out of iterations or terms; nothing is claimed.
    BudgetExhausted,
}

impl MixedUnitaryOutcome {
    pub fn terms(&self) -> Option<&[MixedUnitaryTerm]> {
        match self {
            Self::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// Default iteration budget of [`mixed_unitary_decompose`].
pub const DEFAULT_DECOMPOSE_BUDGET: usize = 10_000;

pub fn mixed_unitary_decompose(m: &KrausMap, max_terms: usize, seed: u64) -> Result<MixedUnitaryOutcome> {
    mixed_unitary_decompose_with_budget(m, max_terms, seed, DEFAULT_DECOMPOSE_BUDGET)
}

/// Writes a GI map as a mixture of diagonal unitaries. Qubits use a closed
/// form; larger dimensions peel off one rank-one unimodular term at a time.
pub fn mixed_unitary_decompose_with_budget(m: &KrausMap, max_terms: usize, seed: u64, budget: usize) -> Result<MixedUnitaryOutcome> {
    let a = gi_schur(m)?;
    let ext = gi_extremality(m)?;
    if ext.extremal && ext.rank_required > 1 {
        return Ok(MixedUnitaryOutcome::NotMixedUnitary);
    }
    let d = m.dim();
    let terms = match d {
        1 => Some(vec![MixedUnitaryTerm { weight: 1.0, phases: vec![0.0] }]),
        2 => Some(qubit_decomposition(a.matrix())),
        _ => peel_search(a.matrix(), seed, budget),
    };
    let Some(terms) = terms else {
        return Ok(MixedUnitaryOutcome::BudgetExhausted);
    };
    if terms.len() > max_terms || reconstruction_error(a.matrix(), &terms) > 1e-8 {
        return Ok(MixedUnitaryOutcome::BudgetExhausted);
    }
    Ok(MixedUnitaryOutcome::Found(terms))
}

/// `||A - sum_k p_k u_k u_k^dagger||_F`
pub fn reconstruction_error(a: &ComplexMatrix, terms: &[MixedUnitaryTerm]) -> f64 {
    let d = a.rows();
    let mut acc = ComplexMatrix::zeros(d, d);
    for t in terms {
        let u = unimodular(&t.phases);
        acc = &acc + &ComplexMatrix::outer(&u, &u).scale_real(t.weight);
    }
    acc.distance(a)
}

fn unimodular(phases: &[f64]) -> Vec<C64> {
    phases.iter().map(|&t| C64::new(cos(t), sin(t))).collect()
}

fn wrap(t: f64) -> f64 {
    let r = t - TAU * libm::floor(t / TAU);
    if r >= TAU - 1e-15 {
        0.0
    } else {
        r
    }
}

fn qubit_decomposition(a: &ComplexMatrix) -> Vec<MixedUnitaryTerm> {
    let z = a[(0, 1)];
    let r = z.norm().min(1.0);
    if r >= 1.0 - 1e-12 {
        return vec![MixedUnitaryTerm { weight: 1.0, phases: vec![0.0, wrap(-z.arg())] }];
    }
    let theta = if r <= 1e-12 { FRAC_PI_2 } else { z.arg() };
    let alpha = acos(r);
    vec![
        MixedUnitaryTerm { weight: 0.5, phases: vec![0.0, wrap(-(theta + alpha))] },
        MixedUnitaryTerm { weight: 0.5, phases: vec![0.0, wrap(-(theta - alpha))] },
    ]
}

// Repeated peeling A = t u u^dagger + (1 - t) A' with u unimodular in the
// range of A and t maximal, so the rank of A' drops by at least one.
fn peel_search(a: &ComplexMatrix, seed: u64, budget: usize) -> Option<Vec<MixedUnitaryTerm>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0usize;
    while spent < budget {
        let mut cur = a.clone();
        let mut remaining = 1.0;
        let mut terms = Vec::new();
        let mut ok = false;
        for _ in 0..=a.rows() {
            let eig = hermitian_eigen(&cur).ok()?;
            let cutoff = 1e-9 * eig.max();
            let range: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > cutoff).collect();
            if range.len() == 1 {
                let v = eig.vector(range[0]);
                let phases: Vec<f64> = v.iter().map(|z| wrap((z / v[0]).arg())).collect();
                terms.push(MixedUnitaryTerm { weight: remaining, phases });
                ok = true;
                break;
            }
            let u = find_unimodular_in_range(&eig, &range, &mut rng, &mut spent, budget)?;
            let ainv_u: f64 = range
                .iter()
                .map(|&k| {
                    let v = eig.vector(k);
                    let proj: C64 = v.iter().zip(&u).map(|(x, y)| x.conj() * y).sum();
                    proj.norm_sqr() / eig.values[k]
                })
                .sum();
            let t = (1.0 / ainv_u).min(1.0);
            let phases: Vec<f64> = u.iter().map(|z| wrap((z / u[0]).arg())).collect();
            terms.push(MixedUnitaryTerm { weight: remaining * t, phases });
            if t >= 1.0 - 1e-12 {
                ok = true;
                break;
            }
            let next = (&cur - &ComplexMatrix::outer(&u, &u).scale_real(t)).scale_real(1.0 / (1.0 - t));
            cur = next.hermitian_part();
            for i in 0..cur.rows() {
                cur[(i, i)] = C64::new(1.0, 0.0);
            }
            remaining *= 1.0 - t;
        }
        if ok && reconstruction_error(a, &terms) <= 1e-8 {
            return Some(terms);
        }
        spent += 1;
    }
    None
}

fn find_unimodular_in_range(
    eig: &crate::numkit::HermitianEigen,
    range: &[usize],
    rng: &mut ChaCha8Rng,
    spent: &mut usize,
    budget: usize,
) -> Option<Vec<C64>> {
    let d = eig.values.len();
    if range.len() == d {
        return Some((0..d).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..TAU))).collect());
    }
    let null: Vec<usize> = (0..d).filter(|k| !range.contains(k)).collect();
    if d == 3 && null.len() == 1 {
        *spent += 1;
        return triangle_solution(&eig.vector(null[0]));
    }
    let basis: Vec<Vec<C64>> = range.iter().map(|&k| eig.vector(k)).collect();
    let project = |x: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); d];
        for b in &basis {
            let c: C64 = b.iter().zip(x).map(|(p, q)| p.conj() * q).sum();
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    };
    while *spent < budget {
        let mut u: Vec<C64> = (0..d).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..TAU))).collect();
        for _ in 0..500 {
            *spent += 1;
            let p = project(&u);
            let resid: f64 = p.iter().zip(&u).map(|(x, y)| (x - y).norm_sqr()).sum();
            if resid < 1e-24 {
                return Some(u);
            }
            u = p.iter().zip(&u).map(|(x, y)| if x.norm() > 1e-14 { x / x.norm() } else { *y }).collect();
            if *spent >= budget {
                return None;
            }
        }
    }
    None
}

// Unimodular u orthogonal to w: sum_j conj(w_j) e^{i theta_j} = 0 closes a
// triangle with side lengths |w_j|.
fn triangle_solution(w: &[C64]) -> Option<Vec<C64>> {
    let s: Vec<f64> = w.iter().map(|z| z.norm()).collect();
    let scale = s.iter().copied().fold(0.0, f64::max);
    let mut phi = [0.0f64; 3];
    if let Some(z) = (0..3).find(|&j| s[j] <= 1e-9 * scale) {
        let (p, q) = ((z + 1) % 3, (z + 2) % 3);
        if (s[p] - s[q]).abs() > 1e-7 * scale {
            return None;
        }
        phi[q] = PI;
    } else {
        let c = (s[2] * s[2] - s[0] * s[0] - s[1] * s[1]) / (2.0 * s[0] * s[1]);
        if !(-1.0 - 1e-7..=1.0 + 1e-7).contains(&c) {
            return None;
        }
        phi[1] = acos(c.clamp(-1.0, 1.0));
        let z01 = C64::new(s[0], 0.0) + C64::from_polar(s[1], phi[1]);
        phi[2] = (-z01).arg();
    }
    Some((0..3).map(|j| C64::from_polar(1.0, phi[j] + w[j].arg())).collect())
}
