//! Brute-force engines the closed forms are checked against.
//!
//! Every search here is one-sided: a returned witness is verified, but
//! `NoWitnessFound` or `None` is never a proof of impossibility.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::KrausMap;
use crate::classify::classify_channel;
use crate::math::sqrt;
use crate::numkit::{hermitian_eigen, is_psd, relative_entropy};
use crate::states::{coherence_set, DensityMatrix, PureState};
use crate::{ComplexMatrix, Error, Result, Tolerance, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    pub max_iterations: usize,
    pub seed: u64,
    pub convergence_eps: f64,
}

impl SearchBudget {
    pub fn new(max_iterations: usize, seed: u64, convergence_eps: f64) -> Result<Self> {
        if max_iterations == 0 || !(convergence_eps.is_finite() && convergence_eps > 0.0) {
            return Err(Error::OutOfRange("budget needs positive iterations and epsilon".into()));
        }
        Ok(Self { max_iterations, seed, convergence_eps })
    }

    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_iterations: 10_000, seed: 0, convergence_eps: 1e-8 }
    }
}

/// Hermitian matrix with some entries fixed and the rest free.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMatrix {
    values: ComplexMatrix,
    pinned: Vec<bool>,
}

impl PartialMatrix {
    /// `pinned` is row-major; values at free positions are ignored.
    pub fn new(values: ComplexMatrix, pinned: Vec<bool>) -> Result<Self> {
        let d = values.ensure_square()?;
        if pinned.len() != d * d {
            return Err(Error::BadShape { expected: d * d, found: pinned.len() });
        }
        for i in 0..d {
            for j in i..d {
                let (pij, pji) = (pinned[i * d + j], pinned[j * d + i]);
                if pij != pji {
                    return Err(Error::InconsistentPinning(i, j));
                }
                if pij && (values[(i, j)] - values[(j, i)].conj()).norm() > 1e-12 {
                    return Err(Error::InconsistentPinning(i, j));
                }
            }
        }
        Ok(Self { values, pinned })
    }

    pub fn fully_pinned(values: ComplexMatrix) -> Result<Self> {
        let n = values.rows() * values.cols();
        Self::new(values, vec![true; n])
    }

    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    pub fn is_pinned(&self, i: usize, j: usize) -> bool {
        self.pinned[i * self.dim() + j]
    }

    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    fn pinned_residual(&self, x: &ComplexMatrix) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                if self.is_pinned(i, j) {
                    acc += (x[(i, j)] - self.values[(i, j)]).norm_sqr();
                }
            }
        }
        sqrt(acc)
    }

    fn reset_pinned(&self, x: &mut ComplexMatrix) {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if self.is_pinned(i, j) {
                    x[(i, j)] = self.values[(i, j)];
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityStatus {
    Feasible(ComplexMatrix),
    NoWitnessFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Frobenius distance between the final PSD iterate and the pinned entries.
    pub residual: f64,
    pub iterations: usize,
}

impl FeasibilityResult {
    pub fn witness(&self) -> Option<&ComplexMatrix> {
        match &self.status {
            FeasibilityStatus::Feasible(w) => Some(w),
            FeasibilityStatus::NoWitnessFound => None,
        }
    }
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub fn project_psd(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(&x.hermitian_part())?;
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// PSD completion by alternating projections between the pinned affine set
/// and the PSD cone.
pub fn psd_complete(pinned: &PartialMatrix, budget: &SearchBudget) -> Result<FeasibilityResult> {
    let tol = Tolerance::default();
    let d = pinned.dim();
    if pinned.pinned.iter().all(|&p| p) {
        let ok = is_psd(pinned.values(), &tol)?;
        let status = if ok { FeasibilityStatus::Feasible(pinned.values().clone()) } else { FeasibilityStatus::NoWitnessFound };
        let residual = if ok { 0.0 } else { pinned.pinned_residual(&project_psd(pinned.values())?) };
        return Ok(FeasibilityResult { status, residual, iterations: 0 });
    }
    let mut x = ComplexMatrix::zeros(d, d);
    pinned.reset_pinned(&mut x);
    let mut checkpoint = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for it in 1..=budget.max_iterations {
        let y = project_psd(&x)?;
        residual = pinned.pinned_residual(&y);
        if residual <= budget.convergence_eps {
            return Ok(FeasibilityResult { status: FeasibilityStatus::Feasible(y), residual, iterations: it });
        }
        if it % 20 == 0 {
            if residual > checkpoint * (1.0 - 1e-6) {
                return Ok(polish_or_give_up(pinned, &y, residual, it));
            }
            checkpoint = residual;
        }
        x = y;
        pinned.reset_pinned(&mut x);
    }
    Ok(polish_or_give_up(pinned, &project_psd(&x)?, residual, budget.max_iterations))
}

fn polish_or_give_up(pinned: &PartialMatrix, start: &ComplexMatrix, residual: f64, iterations: usize) -> FeasibilityResult {
    match polish_factor(pinned, start) {
        Some((w, res)) => FeasibilityResult { status: FeasibilityStatus::Feasible(w), residual: res, iterations },
        None => FeasibilityResult { status: FeasibilityStatus::NoWitnessFound, residual, iterations },
    }
}

/// Alternating projections crawl when every completion is singular. A
/// factored problem `A = V V^dagger` with `V` of the right width converges
/// quickly, so widths `1..=d` are tried in turn, each seeded with the
/// leading eigenpairs of `start`.
fn polish_factor(pinned: &PartialMatrix, start: &ComplexMatrix) -> Option<(ComplexMatrix, f64)> {
    let d = pinned.dim();
    let eig = hermitian_eigen(&start.hermitian_part()).ok()?;
    (1..=d).find_map(|width| {
        let mut v = ComplexMatrix::zeros(d, width);
        for c in 0..width {
            let k = d - 1 - c;
            let s = sqrt(eig.values[k].max(1e-8));
            for (i, z) in eig.vector(k).into_iter().enumerate() {
                v[(i, c)] = z * s;
            }
        }
        factored_lm(pinned, v)
    })
}

/// Levenberg-Marquardt on the pinned entries of `V V^dagger`.
fn factored_lm(pinned: &PartialMatrix, mut v: ComplexMatrix) -> Option<(ComplexMatrix, f64)> {
    let d = pinned.dim();
    let w = v.cols();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).filter(|&(i, j)| pinned.is_pinned(i, j)).collect();
    let n = 2 * d * w;
    let residuals = |v: &ComplexMatrix| -> Vec<f64> {
        let g = v * &v.adjoint();
        let mut r = Vec::with_capacity(2 * pairs.len());
        for &(i, j) in &pairs {
            let e = g[(i, j)] - pinned.values[(i, j)];
            r.push(e.re);
            if i != j {
                r.push(e.im);
            }
        }
        r
    };
    let norm = |r: &[f64]| sqrt(r.iter().map(|x| x * x).sum());
    let mut r = residuals(&v);
    let mut mu = 1e-3;
    for _ in 0..100 {
        if norm(&r) <= 1e-14 {
            break;
        }
        // Jacobian columns: real then imaginary part of each V_ik.
        let mut jac = vec![0.0; r.len() * n];
        let mut row = 0;
        for &(i, j) in &pairs {
            for k in 0..w {
                // G_ij = sum_k V_ik conj(V_jk); columns hold d/dx and d/dy
                // of V = x + i y.
                let dz = v[(j, k)].conj();
                let col = 2 * (i * w + k);
                jac[row * n + col] += dz.re;
                jac[row * n + col + 1] -= dz.im;
                if i != j {
                    jac[(row + 1) * n + col] += dz.im;
                    jac[(row + 1) * n + col + 1] += dz.re;
                }
                let vi = v[(i, k)];
                let col = 2 * (j * w + k);
                jac[row * n + col] += vi.re;
                jac[row * n + col + 1] += vi.im;
                if i != j {
                    jac[(row + 1) * n + col] += vi.im;
                    jac[(row + 1) * n + col + 1] -= vi.re;
                }
            }
            row += if i != j { 2 } else { 1 };
        }
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for m in 0..r.len() {
            let jr = &jac[m * n..(m + 1) * n];
            for a in 0..n {
                if jr[a] == 0.0 {
                    continue;
                }
                jtr[a] += jr[a] * r[m];
                for b in 0..n {
                    jtj[a * n + b] += jr[a] * jr[b];
                }
            }
        }
        loop {
            let mut sys = jtj.clone();
            for a in 0..n {
                sys[a * n + a] += mu;
            }
            let step = cholesky_solve(&mut sys, &jtr, n)?;
            let mut trial = v.clone();
            for i in 0..d {
                for k in 0..w {
                    let idx = 2 * (i * w + k);
                    trial[(i, k)] -= C64::new(step[idx], step[idx + 1]);
                }
            }
            let rt = residuals(&trial);
            if norm(&rt) < norm(&r) {
                v = trial;
                r = rt;
                mu = (mu / 3.0).max(1e-15);
                break;
            }
            mu *= 4.0;
            if mu > 1e12 {
                return None;
            }
        }
    }
    let mut w = (&v * &v.adjoint()).hermitian_part();
    let res = pinned.pinned_residual(&w);
    if res > 1e-8 {
        return None;
    }
    pinned.reset_pinned(&mut w);
    let tol = Tolerance::default();
    if !is_psd(&w, &tol).ok()? {
        return None;
    }
    Some((w, res))
}

/// Solves `M x = b` for symmetric positive definite `M` (overwritten).
fn cholesky_solve(m: &mut [f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut s = m[j * n + j];
        for k in 0..j {
            s -= m[j * n + k] * m[j * n + k];
        }
        if s <= 0.0 {
            return None;
        }
        let l = sqrt(s);
        m[j * n + j] = l;
        for i in (j + 1)..n {
            let mut t = m[i * n + j];
            for k in 0..j {
                t -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = t / l;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= m[i * n + k] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= m[k * n + i] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    Some(y)
}

/// Largest `k` for which some PSD `A` with `A_ii <= 1` satisfies
/// `A (.) rho_psi = k rho_phi`, by bisection over feasibility problems.
pub fn search_sgi_probability(psi: &PureState, phi: &PureState, budget: &SearchBudget) -> Result<f64> {
    let d = psi.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: phi.dim() });
    }
    let rp = psi.projector();
    let rf = phi.projector();
    let tol = Tolerance::default();
    let zero = |z: C64| z.norm() <= tol.abs_eps * tol.abs_eps;
    for i in 0..d {
        for j in 0..d {
            if zero(rp[(i, j)]) && !zero(rf[(i, j)]) {
                return Ok(0.0);
            }
        }
    }
    let feasible = |k: f64| -> Result<bool> {
        // block diag(A, S) with S diagonal and S_ii = 1 - A_ii
        let n = 2 * d;
        let mut vals = ComplexMatrix::zeros(n, n);
        let mut mask = vec![true; n * n];
        for i in 0..d {
            for j in 0..d {
                if zero(rp[(i, j)]) {
                    mask[i * n + j] = false;
                } else {
                    vals[(i, j)] = rf[(i, j)] * k / rp[(i, j)];
                }
            }
        }
        let mut free_diag = Vec::new();
        for i in 0..d {
            if mask[i * n + i] {
                vals[(d + i, d + i)] = C64::new(1.0 - vals[(i, i)].re, 0.0);
            } else {
                mask[(d + i) * n + d + i] = false;
                free_diag.push(i);
            }
        }
        let problem = PartialMatrix::new(vals, mask)?;
        if free_diag.is_empty() {
            return Ok(psd_complete(&problem, budget)?.witness().is_some());
        }
        // free diagonals are coupled through A_ii + S_ii = 1: project by hand
        let mut x = problem.values.clone();
        for &i in &free_diag {
            x[(i, i)] = C64::new(0.5, 0.0);
            x[(d + i, d + i)] = C64::new(0.5, 0.0);
        }
        let mut checkpoint = f64::INFINITY;
        for it in 1..=budget.max_iterations {
            let y = project_psd(&x)?;
            let pr = problem.pinned_residual(&y);
            let mut res = pr * pr;
            for &i in &free_diag {
                let e = y[(i, i)].re + y[(d + i, d + i)].re - 1.0;
                res += e * e;
            }
            let res = sqrt(res);
            if res <= budget.convergence_eps {
                return Ok(true);
            }
            if it % 20 == 0 {
                if res > checkpoint * (1.0 - 1e-6) {
                    return Ok(false);
                }
                checkpoint = res;
            }
            x = y;
            problem.reset_pinned(&mut x);
            for &i in &free_diag {
                let excess = (x[(i, i)].re + x[(d + i, d + i)].re - 1.0) / 2.0;
                x[(i, i)] = C64::new(x[(i, i)].re - excess, 0.0);
                x[(d + i, d + i)] = C64::new(x[(d + i, d + i)].re - excess, 0.0);
            }
        }
        Ok(false)
    };
    if feasible(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Branch statistics from repeated sampling of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    pub empirical_success: f64,
    /// Hits per Kraus branch.
    pub branch_counts: Vec<u64>,
    pub failures: u64,
    /// `tr(K_i rho K_i^dagger)` per branch.
    pub analytic_branches: Vec<f64>,
    pub analytic_success: f64,
}

/// Samples Kraus branches with their Born probabilities; the missing weight
/// `1 - sum_i p_i` is a failure branch. Trace-preserving maps never fail.
pub fn monte_carlo_protocol(m: &KrausMap, rho: &DensityMatrix, trials: u64, seed: u64) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("at least one trial required".into()));
    }
    let mut probs = Vec::with_capacity(m.len());
    for k in m.kraus() {
        probs.push(k.sandwich(rho.matrix())?.trace().re.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    let tp = m.is_trace_preserving();
    let span = if tp { total } else { 1.0 };
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut failures = 0u64;
    for _ in 0..trials {
        let u: f64 = rng.gen::<f64>() * span;
        match cumulative.iter().position(|&c| u < c) {
            Some(i) => counts[i] += 1,
            None if tp => *counts.last_mut().expect("nonempty Kraus list") += 1,
            None => failures += 1,
        }
    }
    let successes: u64 = counts.iter().sum();
    Ok(MonteCarloReport {
        trials,
        seed,
        empirical_success: successes as f64 / trials as f64,
        branch_counts: counts,
        failures,
        analytic_branches: probs,
        analytic_success: if tp { 1.0 } else { total.min(1.0) },
    })
}

/// `min_q S(rho || diag(q, 1 - q))` by grid search plus golden-section
/// refinement.
pub fn search_cr(rho: &DensityMatrix, grid_steps: usize) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    if grid_steps < 2 {
        return Err(Error::OutOfRange("grid needs at least two steps".into()));
    }
    let f = |q: f64| -> Result<f64> {
        let sigma = ComplexMatrix::from_real_diagonal(&[q, 1.0 - q]);
        relative_entropy(rho.matrix(), &sigma)
    };
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..=grid_steps {
        let v = f(k as f64 / grid_steps as f64)?;
        if v < best.0 {
            best = (v, k);
        }
    }
    let step = 1.0 / grid_steps as f64;
    let mut a = (best.1 as f64 - 1.0).max(0.0) * step;
    let mut b = ((best.1 as f64 + 1.0) * step).min(1.0);
    let g = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    for _ in 0..80 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e)?;
        }
    }
    Ok(best.0.min(fc).min(fe).min(f(a)?).min(f(b)?).max(0.0))
}

/// Searches two-operator fully incoherent channels taking `psi` to `phi`.
///
/// Such a channel sends each input column to a single output row, with at
/// most two columns per row. Every admissible grouping of the support of
/// `psi` whose block weights match `|phi_r|^2` is tried; the per-row blocks
/// are then realized by 2x2 unitaries steering the amplitudes onto a common,
/// randomly drawn branch vector.
pub fn search_fi_map(psi: &PureState, phi: &PureState, budget: &SearchBudget) -> Result<Option<KrausMap>> {
    let d = psi.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: phi.dim() });
    }
    let tol = Tolerance::default();
    let rpsi = coherence_set(psi, &tol);
    let rphi = coherence_set(phi, &tol);
    if d > 4 || rphi.len() < 2 || rphi.len() >= rpsi.len() {
        return Err(Error::Precondition("search needs 2 <= r(phi) < r(psi) and d <= 4".into()));
    }
    let src = &rpsi.members;
    let rows = &rphi.members;
    let weights = psi.populations();
    let targets = phi.populations();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut assign = vec![0usize; src.len()];
    let total = rows.len().pow(src.len() as u32);
    for (tried, code) in (0..total).enumerate() {
        if tried >= budget.max_iterations {
            break;
        }
        let mut c = code;
        for a in assign.iter_mut() {
            *a = c % rows.len();
            c /= rows.len();
        }
        let mut load = vec![0usize; rows.len()];
        let mut mass = vec![0.0; rows.len()];
        for (k, &r) in assign.iter().enumerate() {
            load[r] += 1;
            mass[r] += weights[src[k]];
        }
        if load.iter().any(|&l| l == 0 || l > 2) {
            continue;
        }
        if rows.iter().zip(&mass).any(|(&r, &m)| (m - targets[r]).abs() > 1e-9) {
            continue;
        }
        let kappa = random_unit2(&mut rng);
        let Some(map) = realize_pattern(psi, phi, src, rows, &assign, kappa) else { continue };
        if verify_fi_witness(&map, psi, phi)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

fn random_unit2(rng: &mut ChaCha8Rng) -> [C64; 2] {
    let theta: f64 = rng.gen_range(0.1..1.4);
    let p0: f64 = rng.gen_range(0.0..TAU);
    let p1: f64 = rng.gen_range(0.0..TAU);
    [C64::from_polar(crate::math::cos(theta), p0), C64::from_polar(crate::math::sin(theta), p1)]
}

fn orth2(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

fn realize_pattern(psi: &PureState, phi: &PureState, src: &[usize], rows: &[usize], assign: &[usize], kappa: [C64; 2]) -> Option<KrausMap> {
    let d = psi.dim();
    let a = psi.amplitudes();
    let f = phi.amplitudes();
    let mut k1 = ComplexMatrix::zeros(d, d);
    let mut k2 = ComplexMatrix::zeros(d, d);
    let mut put = |row: usize, col: usize, c: [C64; 2]| {
        k1[(row, col)] = c[0];
        k2[(row, col)] = c[1];
    };
    let mut spare: Vec<(usize, [C64; 2])> = Vec::new();
    let mut used_rows = vec![false; d];
    for (slot, &row) in rows.iter().enumerate() {
        used_rows[row] = true;
        let cols: Vec<usize> = assign.iter().enumerate().filter(|(_, &s)| s == slot).map(|(k, _)| src[k]).collect();
        let target = [f[row] * kappa[0], f[row] * kappa[1]];
        match cols.as_slice() {
            [j] => {
                let c = [target[0] / a[*j], target[1] / a[*j]];
                put(row, *j, c);
                spare.push((row, orth2(c)));
            }
            [j, l] => {
                let n = sqrt(a[*j].norm_sqr() + a[*l].norm_sqr());
                let u = [a[*j] / n, a[*l] / n];
                let v = [target[0] / n, target[1] / n];
                let (uo, vo) = (orth2(u), orth2(v));
                // X = v u^dagger + vo uo^dagger; columns are the branch vectors
                let col = |x: usize| [v[0] * u[x].conj() + vo[0] * uo[x].conj(), v[1] * u[x].conj() + vo[1] * uo[x].conj()];
                put(row, *j, col(0));
                put(row, *l, col(1));
            }
            _ => return None,
        }
    }
    let zero_cols: Vec<usize> = (0..d).filter(|j| !src.contains(j)).collect();
    let mut free_rows = (0..d).filter(|&r| !used_rows[r]).flat_map(|r| {
        [(r, [C64::new(1.0, 0.0), ZERO]), (r, [ZERO, C64::new(1.0, 0.0)])]
    });
    let mut spare = spare.into_iter();
    for j in zero_cols {
        let (row, c) = spare.next().or_else(|| free_rows.next())?;
        put(row, j, c);
    }
    KrausMap::new(vec![k1, k2]).ok()
}

/// FI, trace preserving, and `psi -> phi` with fidelity `>= 1 - 1e-8`.
pub fn verify_fi_witness(m: &KrausMap, psi: &PureState, phi: &PureState) -> Result<bool> {
    let report = classify_channel(m, None)?;
    if !(report.fi && report.trace_preserving) {
        return Ok(false);
    }
    let (out, p) = m.apply(&psi.to_density())?;
    if p <= 0.0 {
        return Ok(false);
    }
    let fid: C64 = {
        let v = out.mul_vec(phi.amplitudes())?;
        phi.amplitudes().iter().zip(&v).map(|(x, y)| x.conj() * y).sum()
    };
    Ok(fid.re / p >= 1.0 - 1e-8)
}
