//! State conversion under genuinely and fully incoherent operations.
//!
//! Every verdict that says "possible" carries a map; applying it to the
//! source reproduces the target. Verdicts backed only by a failed search are
//! marked `conclusive: false`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::channels::{diagonal_unitary, extract_schur_matrix, permutation_unitary, schur_map, KrausMap, Permutation, SchurMatrix};
use crate::math::sqrt;
use crate::numkit::is_psd;
use crate::oracle::{psd_complete, search_fi_map, PartialMatrix, SearchBudget};
use crate::states::{coherence_set, DensityMatrix, PureState};
use crate::{ComplexMatrix, Error, Result, Tolerance, C64};

/// Slack for comparing populations and moduli.
pub const POPULATION_EPS: f64 = 1e-9;
/// Largest dimension for exhaustive permutation searches.
pub const MAX_PERMUTATION_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    DiagonalMismatch,
    SupportViolation,
    RankViolation,
    NotUnitarilyEquivalent,
    NoPureProjection,
    CompletionInfeasible,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::DiagonalMismatch => "DiagonalMismatch",
            Reason::SupportViolation => "SupportViolation",
            Reason::RankViolation => "RankViolation",
            Reason::NotUnitarilyEquivalent => "NotUnitarilyEquivalent",
            Reason::NoPureProjection => "NoPureProjection",
            Reason::CompletionInfeasible => "CompletionInfeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionVerdict {
    pub possible: bool,
    /// Success probability; 1 for deterministic conversions.
    pub probability: f64,
    pub map: Option<KrausMap>,
    pub reason: Option<Reason>,
    /// False when the negative answer only reflects an unsuccessful search.
    pub conclusive: bool,
}

impl ConversionVerdict {
    fn achieved(map: KrausMap, probability: f64) -> Self {
        Self { possible: true, probability, map: Some(map), reason: None, conclusive: true }
    }

    fn ruled_out(reason: Reason) -> Self {
        Self { possible: false, probability: 0.0, map: None, reason: Some(reason), conclusive: true }
    }

    fn undecided(reason: Option<Reason>) -> Self {
        Self { possible: false, probability: 0.0, map: None, reason, conclusive: false }
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Deterministic GI conversion of pure states: only diagonal unitaries work.
pub fn gi_deterministic_pure(psi: &PureState, phi: &PureState) -> Result<ConversionVerdict> {
    same_dim(psi.dim(), phi.dim())?;
    let (pp, pf) = (psi.populations(), phi.populations());
    if pp.iter().zip(&pf).any(|(a, b)| (a - b).abs() > POPULATION_EPS) {
        return Ok(ConversionVerdict::ruled_out(Reason::DiagonalMismatch));
    }
    let tol = Tolerance::default();
    let support = coherence_set(psi, &tol);
    let phases: Vec<f64> = (0..psi.dim())
        .map(|i| if support.contains(i) { phi.amplitudes()[i].arg() - psi.amplitudes()[i].arg() } else { 0.0 })
        .collect();
    Ok(ConversionVerdict::achieved(KrausMap::unitary(diagonal_unitary(&phases))?, 1.0))
}

/// A pure state together with the GI map that sends it to a given state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureParent {
    pub state: PureState,
    pub schur: SchurMatrix,
    pub map: KrausMap,
}

/// `psi_i = sqrt(rho_ii)` and `A_ij = rho_ij / sqrt(rho_ii rho_jj)`. Indices
/// with `rho_ii = 0` get `A_ii = 1` so the map stays trace preserving.
pub fn gi_pure_parent(rho: &DensityMatrix) -> Result<PureParent> {
    let d = rho.dim();
    let pops: Vec<f64> = rho.populations().iter().map(|x| x.max(0.0)).collect();
    let state = PureState::normalized(pops.iter().map(|&p| C64::new(sqrt(p), 0.0)).collect())?;
    let m = rho.matrix();
    let mut a = ComplexMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            if i != j && pops[i] > 1e-14 && pops[j] > 1e-14 {
                a[(i, j)] = m[(i, j)] / sqrt(pops[i] * pops[j]);
            }
        }
    }
    let schur = SchurMatrix::new(a)?;
    let map = schur_map(&schur)?;
    Ok(PureParent { state, schur, map })
}

pub fn gi_deterministic(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ConversionVerdict> {
    gi_deterministic_with(rho, sigma, &SearchBudget::default())
}

/// Deterministic GI conversion between arbitrary states: the Schur matrix is
/// pinned to `sigma_ij / rho_ij` where `rho_ij != 0` and completed elsewhere.
pub fn gi_deterministic_with(rho: &DensityMatrix, sigma: &DensityMatrix, budget: &SearchBudget) -> Result<ConversionVerdict> {
    let d = rho.dim();
    same_dim(d, sigma.dim())?;
    let tol = Tolerance::default();
    let (pr, ps) = (rho.populations(), sigma.populations());
    if pr.iter().zip(&ps).any(|(a, b)| (a - b).abs() > POPULATION_EPS) {
        return Ok(ConversionVerdict::ruled_out(Reason::DiagonalMismatch));
    }
    if rho.as_pure(1e-9).is_none() && sigma.as_pure(1e-9).is_some() {
        return Ok(ConversionVerdict::ruled_out(Reason::NotUnitarilyEquivalent));
    }
    let (r, s) = (rho.matrix(), sigma.matrix());
    let mut vals = ComplexMatrix::identity(d);
    let mut mask = vec![true; d * d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            if r[(i, j)].norm() > tol.abs_eps {
                vals[(i, j)] = s[(i, j)] / r[(i, j)];
            } else if s[(i, j)].norm() > tol.abs_eps {
                return Ok(ConversionVerdict::ruled_out(Reason::SupportViolation));
            } else {
                mask[i * d + j] = false;
            }
        }
    }
    let fully_pinned = mask.iter().all(|&p| p);
    let problem = PartialMatrix::new(vals.hermitian_part(), mask)?;
    let result = psd_complete(&problem, budget)?;
    let Some(witness) = result.witness() else {
        return Ok(if fully_pinned {
            ConversionVerdict::ruled_out(Reason::CompletionInfeasible)
        } else {
            ConversionVerdict::undecided(Some(Reason::CompletionInfeasible))
        });
    };
    let mut exact = witness.clone();
    for i in 0..d {
        for j in 0..d {
            if problem.is_pinned(i, j) {
                exact[(i, j)] = problem.values()[(i, j)];
            }
        }
    }
    let a = if is_psd(&exact, &tol)? { exact } else { witness.clone() };
    let map = schur_map(&SchurMatrix::new(a)?)?;
    let (out, _) = map.apply(rho)?;
    if out.distance(s) > 1e-8 {
        return Ok(ConversionVerdict::undecided(Some(Reason::CompletionInfeasible)));
    }
    Ok(ConversionVerdict::achieved(map, 1.0))
}

/// Optimal single-branch SGI conversion `min_{i in R(phi)} |psi_i|^2/|phi_i|^2`.
pub fn sgi_optimal_probability(psi: &PureState, phi: &PureState) -> Result<ConversionVerdict> {
    same_dim(psi.dim(), phi.dim())?;
    let tol = Tolerance::default();
    let rpsi = coherence_set(psi, &tol);
    let rphi = coherence_set(phi, &tol);
    if !rphi.is_subset(&rpsi) {
        return Ok(ConversionVerdict::ruled_out(Reason::SupportViolation));
    }
    let (pp, pf) = (psi.populations(), phi.populations());
    let p = rphi.members.iter().map(|&i| pp[i] / pf[i]).fold(f64::INFINITY, f64::min).min(1.0);
    let s = sqrt(p);
    let diag: Vec<C64> = (0..psi.dim())
        .map(|i| if rpsi.contains(i) { phi.amplitudes()[i] / psi.amplitudes()[i] * s } else { C64::new(0.0, 0.0) })
        .collect();
    let map = KrausMap::new(vec![ComplexMatrix::from_diagonal(&diag)])?;
    Ok(ConversionVerdict::achieved(map, p))
}

/// Completes an SGI branch with the diagonal branch `diag(1 - A_ii)`.
pub fn complete_sgi(map: &KrausMap) -> Result<KrausMap> {
    let a = extract_schur_matrix(map).ok_or(Error::NotSgi)?;
    let d = map.dim();
    let mut ops = map.kraus().to_vec();
    for (i, aii) in a.matrix().real_diagonal().into_iter().enumerate() {
        let rest = 1.0 - aii;
        if rest > 1e-15 {
            ops.push(ComplexMatrix::unit(d, i, i).scale_real(sqrt(rest)));
        }
    }
    KrausMap::new(ops)
}

/// Outcome of the mixed-to-pure SGI test.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedToPure {
    pub verdict: ConversionVerdict,
    pub subspace: Option<(usize, usize)>,
    pub target: Option<PureState>,
}

/// A coherent mixed state reaches a pure coherent state with nonzero
/// probability iff some two-level projection of it is pure and coherent.
pub fn sgi_mixed_to_pure(rho: &DensityMatrix) -> Result<MixedToPure> {
    let tol = Tolerance::default();
    if rho.as_pure(1e-9).is_some() {
        return Err(Error::Precondition("state is pure".into()));
    }
    if rho.is_incoherent(tol.abs_eps) {
        return Err(Error::Precondition("state is incoherent".into()));
    }
    let d = rho.dim();
    let m = rho.matrix();
    for i in 0..d {
        for j in (i + 1)..d {
            let (a, b, c) = (m[(i, i)].re, m[(j, j)].re, m[(i, j)]);
            if c.norm() <= tol.abs_eps {
                continue;
            }
            let tr = a + b;
            let det = a * b - c.norm_sqr();
            let disc = sqrt(((a - b) * (a - b) + 4.0 * c.norm_sqr()).max(0.0));
            let (lmin, lmax) = ((tr - disc) / 2.0, (tr + disc) / 2.0);
            if lmin.abs() > 1e-9 * lmax && det.abs() > 1e-12 * tr * tr {
                continue;
            }
            let mut amps = vec![C64::new(0.0, 0.0); d];
            amps[i] = C64::new(sqrt(a), 0.0);
            amps[j] = c.conj() / sqrt(a);
            let target = PureState::normalized(amps)?;
            let mut p = ComplexMatrix::zeros(d, d);
            p[(i, i)] = C64::new(1.0, 0.0);
            p[(j, j)] = C64::new(1.0, 0.0);
            let map = KrausMap::new(vec![p])?;
            return Ok(MixedToPure { verdict: ConversionVerdict::achieved(map, tr), subspace: Some((i, j)), target: Some(target) });
        }
    }
    Ok(MixedToPure { verdict: ConversionVerdict::ruled_out(Reason::NoPureProjection), subspace: None, target: None })
}

/// Single-system GI map induced by a joint GI map on `rho (x) sigma` after
/// tracing out the second system: `A~_ij = sum_k sigma_kk A_(ik),(jk)`.
pub fn reduce_joint(a_joint: &SchurMatrix, sigma: &DensityMatrix) -> Result<SchurMatrix> {
    let d = sigma.dim();
    if a_joint.dim() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: a_joint.dim() });
    }
    if !a_joint.is_unit_diagonal(1e-9) {
        return Err(Error::NotGi);
    }
    let a = a_joint.matrix();
    let w = sigma.populations();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = (0..d).map(|k| a[(i * d + k, j * d + k)] * w[k]).sum();
        }
    }
    for i in 0..d {
        out[(i, i)] = C64::new(1.0, 0.0);
    }
    SchurMatrix::new(out)
}

fn sorted_moduli(psi: &PureState) -> Vec<f64> {
    let mut v: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn moduli_match(psi: &PureState, phi: &PureState) -> bool {
    sorted_moduli(psi).iter().zip(sorted_moduli(phi)).all(|(a, b)| (a - b).abs() <= POPULATION_EPS)
}

/// Permutation-times-phase unitary taking `psi` to `phi` when their moduli
/// agree as multisets.
fn fi_unitary_between(psi: &PureState, phi: &PureState) -> Result<Option<ComplexMatrix>> {
    if !moduli_match(psi, phi) {
        return Ok(None);
    }
    let d = psi.dim();
    let order = |s: &PureState| {
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&x, &y| s.amplitudes()[y].norm().total_cmp(&s.amplitudes()[x].norm()));
        idx
    };
    let (os, of) = (order(psi), order(phi));
    let mut mapping = vec![0; d];
    for (&src, &dst) in os.iter().zip(&of) {
        mapping[src] = dst;
    }
    let perm = Permutation::new(mapping)?;
    let phases: Vec<f64> = (0..d)
        .map(|j| {
            let a = psi.amplitudes()[j];
            if a.norm() > Tolerance::default().abs_eps {
                phi.amplitudes()[perm.image(j)].arg() - a.arg()
            } else {
                0.0
            }
        })
        .collect();
    Ok(Some(&permutation_unitary(&perm) * &diagonal_unitary(&phases)))
}

pub fn fi_deterministic_pure(psi: &PureState, phi: &PureState) -> Result<ConversionVerdict> {
    fi_deterministic_pure_with(psi, phi, &SearchBudget::default())
}

/// Deterministic FI conversion of pure states. Rank-preserving conversions
/// are decided exactly; rank-decreasing ones to coherent targets are only
/// settled when a witness map is found.
pub fn fi_deterministic_pure_with(psi: &PureState, phi: &PureState, budget: &SearchBudget) -> Result<ConversionVerdict> {
    same_dim(psi.dim(), phi.dim())?;
    let tol = Tolerance::default();
    let (rpsi, rphi) = (coherence_set(psi, &tol), coherence_set(phi, &tol));
    if rphi.len() > rpsi.len() {
        return Ok(ConversionVerdict::ruled_out(Reason::RankViolation));
    }
    if rphi.len() == rpsi.len() {
        return Ok(match fi_unitary_between(psi, phi)? {
            Some(u) => ConversionVerdict::achieved(KrausMap::unitary(u)?, 1.0),
            None => ConversionVerdict::ruled_out(Reason::NotUnitarilyEquivalent),
        });
    }
    if rphi.len() == 1 {
        return Ok(ConversionVerdict::achieved(fi_erase(rphi.members[0], psi.dim())?, 1.0));
    }
    if psi.dim() > 4 {
        return Ok(ConversionVerdict::undecided(None));
    }
    Ok(match search_fi_map(psi, phi, budget)? {
        Some(map) => ConversionVerdict::achieved(map, 1.0),
        None => ConversionVerdict::undecided(None),
    })
}

/// The qutrit two-operator family `K_k = [[a_k, 0, c_k], [0, b_k, 0], [0, 0, 0]]`.
pub fn build_fi_rank2_map(a: [C64; 2], b: [C64; 2], c: [C64; 2]) -> Result<KrausMap> {
    let cross = (a[0] * c[0].conj() + a[1] * c[1].conj()).norm();
    let mut worst = cross;
    for x in [a, b, c] {
        worst = worst.max((x[0].norm_sqr() + x[1].norm_sqr() - 1.0).abs());
    }
    if worst > 1e-10 {
        return Err(Error::ConstraintViolation(worst));
    }
    let z = C64::new(0.0, 0.0);
    let ops = (0..2)
        .map(|k| ComplexMatrix::from_rows(&[vec![a[k], z, c[k]], vec![z, b[k], z], vec![z, z, z]]))
        .collect::<Result<Vec<_>>>()?;
    KrausMap::new(ops)
}

/// `psi_3 / psi_1` for which the rank-two family yields a pure output;
/// `None` when the defining denominator vanishes.
pub fn fi_rank2_input_ratio(a: [C64; 2], b: [C64; 2], c: [C64; 2]) -> Option<C64> {
    let den = b[1] * c[0] - b[0] * c[1];
    if den.norm() <= 1e-15 {
        return None;
    }
    Some((a[1] * b[0] - a[0] * b[1]) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plus3Kind {
    /// Any incoherent basis state.
    BasisState,
    /// `sqrt(2/3)|0> + sqrt(1/3)|1>`
    RankTwo,
    /// `|+_3>` itself.
    Plus,
}

/// True iff `phi` is reachable from `|+_3>` by a deterministic FI operation,
/// i.e. its moduli match a basis state, `(sqrt(2/3), sqrt(1/3), 0)` or `|+_3>`.
pub fn plus3_reachable(phi: &PureState) -> Result<bool> {
    if phi.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: phi.dim() });
    }
    let mut pops = phi.populations();
    pops.sort_by(|a, b| b.total_cmp(a));
    let families = [[1.0, 0.0, 0.0], [2.0 / 3.0, 1.0 / 3.0, 0.0], [1.0 / 3.0; 3]];
    Ok(families.iter().any(|f| f.iter().zip(&pops).all(|(x, y)| (x - y).abs() <= POPULATION_EPS)))
}

/// Kraus operators of the map taking `|+_3>` to the representative of `kind`.
pub fn plus3_witness(kind: Plus3Kind) -> Result<KrausMap> {
    match kind {
        Plus3Kind::BasisState => fi_erase(0, 3),
        Plus3Kind::Plus => Ok(KrausMap::identity(3)),
        Plus3Kind::RankTwo => {
            let h = sqrt(0.5);
            let (z, r, i) = (C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, h));
            let k1 = ComplexMatrix::from_rows(&[vec![i, z, r], vec![z, r, z], vec![z, z, z]])?;
            let k2 = ComplexMatrix::from_rows(&[vec![r, z, i], vec![z, r, z], vec![z, z, z]])?;
            let u = diagonal_unitary(&[-FRAC_PI_4, 0.0, 0.0]);
            KrausMap::new(vec![&u * &k1, &u * &k2])
        }
    }
}

/// Permutation-improved lower bound for stochastic FI conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct SfiBound {
    pub lower_bound: f64,
    /// The bound is the optimum when both states have the same coherence rank.
    pub exact: bool,
    pub permutation: Permutation,
    pub map: Option<KrausMap>,
}

pub fn sfi_probability(psi: &PureState, phi: &PureState) -> Result<SfiBound> {
    let d = psi.dim();
    same_dim(d, phi.dim())?;
    if d > MAX_PERMUTATION_DIM {
        return Err(Error::TooLarge(d));
    }
    let tol = Tolerance::default();
    let rphi = coherence_set(phi, &tol);
    let pf = phi.populations();
    let pp = psi.populations();
    let mut best = (-1.0, Permutation::identity(d));
    for perm in Permutation::all(d) {
        let moved = perm.apply_vec(&pp);
        let v = rphi.members.iter().map(|&i| moved[i] / pf[i]).fold(f64::INFINITY, f64::min);
        if v > best.0 {
            best = (v, perm);
        }
    }
    let (value, perm) = best;
    let lower_bound = value.clamp(0.0, 1.0);
    let exact = coherence_set(psi, &tol).len() == rphi.len();
    let map = if exact && lower_bound > 0.0 {
        let moved = PureState::new(perm.apply_vec(psi.amplitudes()))?;
        let branch = sgi_optimal_probability(&moved, phi)?.map.ok_or(Error::NotSgi)?;
        let p = permutation_unitary(&perm);
        Some(KrausMap::new(branch.kraus().iter().map(|k| k * &p).collect())?)
    } else {
        None
    };
    Ok(SfiBound { lower_bound, exact, permutation: perm, map })
}

/// Fixed-output map `rho -> |target><target|` with Kraus operators `|target><j|`.
pub fn fi_erase(target: usize, d: usize) -> Result<KrausMap> {
    if target >= d {
        return Err(Error::OutOfRange("target index exceeds dimension".into()));
    }
    KrausMap::new((0..d).map(|j| ComplexMatrix::unit(d, target, j)).collect())
}

/// True iff the maximally mixed state is FI-reachable from `rho`, which
/// happens exactly when all populations equal `1/d`.
pub fn fi_max_mixed_reachable(rho: &DensityMatrix) -> bool {
    let d = rho.dim() as f64;
    rho.populations().iter().all(|p| (p - 1.0 / d).abs() <= POPULATION_EPS)
}

/// GI verdicts for `P rho P^dagger -> sigma` over every permutation `P`.
pub fn permuted_gi_verdicts(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Vec<(Permutation, ConversionVerdict)>> {
    let d = rho.dim();
    same_dim(d, sigma.dim())?;
    if d > MAX_PERMUTATION_DIM {
        return Err(Error::TooLarge(d));
    }
    let mut out = Vec::new();
    for perm in Permutation::all(d) {
        let p = permutation_unitary(&perm);
        let moved = DensityMatrix::new(p.sandwich(rho.matrix())?)?;
        out.push((perm, gi_deterministic(&moved, sigma)?));
    }
    Ok(out)
}

/// Deterministic FI conversion to a full-rank target. Full-rank outputs
/// force full-rank Kraus operators, so the map is a GI map after a
/// permutation and every permutation is tried.
pub fn fi_deterministic_full_rank(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ConversionVerdict> {
    if sigma.spectrum().first().copied().unwrap_or(0.0) <= 1e-9 {
        return Err(Error::Precondition("target must be full rank".into()));
    }
    let verdicts = permuted_gi_verdicts(rho, sigma)?;
    let mut all_conclusive = true;
    let mut all_diag = true;
    for (perm, v) in &verdicts {
        if let Some(gi) = &v.map {
            let p = permutation_unitary(perm);
            return Ok(ConversionVerdict::achieved(KrausMap::new(gi.kraus().iter().map(|k| k * &p).collect())?, 1.0));
        }
        all_conclusive &= v.conclusive;
        all_diag &= v.reason == Some(Reason::DiagonalMismatch);
    }
    let reason = if all_diag { Reason::DiagonalMismatch } else { Reason::CompletionInfeasible };
    Ok(if all_conclusive { ConversionVerdict::ruled_out(reason) } else { ConversionVerdict::undecided(Some(reason)) })
}

/// Two-copy activation: `|+_2> (x) |+_2>` is mapped by an FI operation to
/// `(sqrt(2)|00> + |01> + |11>)/2`, whose first qubit is a state that no
/// single-copy GI or FI operation reaches from `|+_2>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationDemo {
    pub joint_map: KrausMap,
    pub joint_output: PureState,
    pub reduced_output: DensityMatrix,
    pub gi_verdict: ConversionVerdict,
    pub fi_verdict: ConversionVerdict,
    pub one_copy_possible: bool,
}

pub fn fi_activation_demo() -> Result<ActivationDemo> {
    let h = sqrt(0.5);
    let (z, r, i) = (C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, h));
    let k1 = ComplexMatrix::from_rows(&[vec![i, z, r, z], vec![z, r, z, z], vec![z, z, z, z], vec![z, z, z, r]])?;
    let k2 = ComplexMatrix::from_rows(&[vec![r, z, i, z], vec![z, r, z, z], vec![z, z, z, z], vec![z, z, z, r]])?;
    let u = diagonal_unitary(&[-FRAC_PI_4, 0.0, 0.0, 0.0]);
    let joint_map = KrausMap::new(vec![&u * &k1, &u * &k2])?;

    let plus2 = crate::states::plus_state(2)?;
    let input = PureState::new(crate::numkit::tensor_vec(plus2.amplitudes(), plus2.amplitudes()))?;
    let (out, p) = joint_map.apply(&input.to_density())?;
    let joint = DensityMatrix::new(out.scale_real(1.0 / p))?;
    let joint_output = joint.as_pure(1e-9).ok_or(Error::Precondition("joint output is not pure".into()))?;
    let reduced_output = DensityMatrix::new(crate::numkit::partial_trace_second(joint.matrix(), 2, 2)?)?;

    let source = plus2.to_density();
    let gi_verdict = gi_deterministic(&source, &reduced_output)?;
    let fi_verdict = fi_deterministic_full_rank(&source, &reduced_output)?;
    let one_copy_possible = gi_verdict.possible || fi_verdict.possible;
    Ok(ActivationDemo { joint_map, joint_output, reduced_output, gi_verdict, fi_verdict, one_copy_possible })
}
