//! Seeded generators for random states, channels and Hamiltonians.
//!
//! All draws come from a single `ChaCha8Rng`, so a seed fixes the whole
//! sequence of objects produced by a [`Sampler`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{schur_map, KrausMap, Permutation, SchurMatrix};
use crate::classify::Hamiltonian;
use crate::math::{cos, ln, sqrt};
use crate::numkit::hermitian_eigen;
use crate::states::{DensityMatrix, PureState};
use crate::{ComplexMatrix, Result, C64};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Standard normal draw (Box-Muller).
    pub fn gaussian(&mut self) -> f64 {
        let u = 1.0 - self.uniform();
        let v = self.uniform();
        sqrt(-2.0 * ln(u)) * cos(TAU * v)
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian())
    }

    pub fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.rng.gen_range(0.0..TAU))
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols).map(|_| self.complex_gaussian()).collect();
        ComplexMatrix::new(rows, cols, data).expect("shape is consistent")
    }

    /// Uniformly distributed pure state with full coherence rank (almost surely).
    pub fn pure_state(&mut self, d: usize) -> Result<PureState> {
        PureState::normalized((0..d).map(|_| self.complex_gaussian()).collect())
    }

    /// Random pure state with a random support of size `rank`.
    pub fn pure_state_with_rank(&mut self, d: usize, rank: usize) -> Result<PureState> {
        let mut idx: Vec<usize> = (0..d).collect();
        idx.shuffle(&mut self.rng);
        let mut amps = vec![C64::new(0.0, 0.0); d];
        for &i in idx.iter().take(rank.max(1)) {
            amps[i] = self.complex_gaussian();
        }
        PureState::normalized(amps)
    }

    /// Probability vector drawn uniformly from the simplex.
    pub fn distribution(&mut self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| -ln(1.0 - self.uniform())).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    /// Full-rank mixed state from the Hilbert-Schmidt ensemble.
    pub fn density(&mut self, d: usize) -> Result<DensityMatrix> {
        self.density_with_rank(d, d)
    }

    pub fn density_with_rank(&mut self, d: usize, rank: usize) -> Result<DensityMatrix> {
        let g = self.ginibre(d, rank.max(1));
        DensityMatrix::normalized((&g * &g.adjoint()).hermitian_part())
    }

    /// Haar-like unitary from Gram-Schmidt on a Ginibre matrix.
    pub fn unitary(&mut self, d: usize) -> ComplexMatrix {
        loop {
            let g = self.ginibre(d, d);
            let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
            let mut ok = true;
            for j in 0..d {
                let mut v = g.column(j);
                for _ in 0..2 {
                    for q in &cols {
                        let dot: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                        for (x, y) in v.iter_mut().zip(q) {
                            *x -= dot * y;
                        }
                    }
                }
                let n = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
                if n < 1e-8 {
                    ok = false;
                    break;
                }
                cols.push(v.into_iter().map(|z| z / n).collect());
            }
            if ok {
                let mut u = ComplexMatrix::zeros(d, d);
                for (j, c) in cols.iter().enumerate() {
                    for (i, z) in c.iter().enumerate() {
                        u[(i, j)] = *z;
                    }
                }
                return u;
            }
        }
    }

    /// PSD unit-diagonal matrix of rank `rank`: normalized Gram matrix of
    /// random vectors.
    pub fn schur_matrix(&mut self, d: usize, rank: usize) -> Result<SchurMatrix> {
        let v = self.ginibre(d, rank.max(1));
        let g = &v * &v.adjoint();
        let mut a = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] = g[(i, j)] / sqrt(g[(i, i)].re * g[(j, j)].re);
            }
            a[(i, i)] = C64::new(1.0, 0.0);
        }
        SchurMatrix::new(a.hermitian_part())
    }

    pub fn gi_map(&mut self, d: usize, rank: usize) -> Result<KrausMap> {
        schur_map(&self.schur_matrix(d, rank)?)
    }

    /// Schur matrix with diagonal in `[0, 1]`, giving a trace non-increasing map.
    pub fn sgi_schur_matrix(&mut self, d: usize, rank: usize) -> Result<SchurMatrix> {
        let a = self.schur_matrix(d, rank)?;
        let s: Vec<f64> = (0..d).map(|_| sqrt(self.uniform())).collect();
        let m = a.matrix();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = m[(i, j)] * (s[i] * s[j]);
            }
        }
        SchurMatrix::new(out.hermitian_part())
    }

    /// FI channel: every Kraus operator has the pattern of one random function
    /// `f` of columns to rows, and columns sharing a row carry orthonormal
    /// coefficient vectors. `n` is raised to the largest collision count.
    pub fn fi_map(&mut self, d: usize, n: usize) -> Result<KrausMap> {
        let f: Vec<usize> = (0..d).map(|_| self.index(d)).collect();
        let largest = (0..d).map(|r| f.iter().filter(|&&x| x == r).count()).max().unwrap_or(1);
        let n = n.max(largest).max(1);
        let mut ops = vec![ComplexMatrix::zeros(d, d); n];
        for r in 0..d {
            let cols: Vec<usize> = (0..d).filter(|&j| f[j] == r).collect();
            if cols.is_empty() {
                continue;
            }
            let u = self.unitary(n);
            for (t, &j) in cols.iter().enumerate() {
                for (k, op) in ops.iter_mut().enumerate() {
                    op[(r, j)] = u[(k, t)];
                }
            }
        }
        KrausMap::new(ops)
    }

    /// Incoherent channel `K_k = D_k P_k` with random permutations `P_k` and
    /// diagonal weights whose squared moduli sum to one per column.
    pub fn io_map(&mut self, d: usize, n: usize) -> Result<KrausMap> {
        let perms: Vec<Permutation> = (0..n.max(1)).map(|_| self.permutation(d)).collect();
        self.permuted_weights(d, &perms)
    }

    /// Incoherent channel whose operators are not all of the same form, so
    /// that a different representation exposes coherence.
    pub fn incoherent_not_same_form(&mut self, d: usize, n: usize) -> Result<KrausMap> {
        assert!(d >= 2, "needs two levels");
        let mut perms: Vec<Permutation> = (0..n.max(2)).map(|_| self.permutation(d)).collect();
        if perms.iter().all(|p| p == &perms[0]) {
            let t = Permutation::transposition(d, 0, 1)?;
            perms[1] = perms[0].compose(&t);
        }
        self.permuted_weights(d, &perms)
    }

    fn permuted_weights(&mut self, d: usize, perms: &[Permutation]) -> Result<KrausMap> {
        let n = perms.len();
        let weights: Vec<Vec<f64>> = (0..d).map(|_| self.distribution(n)).collect();
        let mut ops = Vec::with_capacity(n);
        for (k, p) in perms.iter().enumerate() {
            let mut op = ComplexMatrix::zeros(d, d);
            for (j, w) in weights.iter().enumerate() {
                op[(p.image(j), j)] = self.phase() * sqrt(w[k]);
            }
            ops.push(op);
        }
        KrausMap::new(ops)
    }

    pub fn permutation(&mut self, d: usize) -> Permutation {
        let mut m: Vec<usize> = (0..d).collect();
        m.shuffle(&mut self.rng);
        Permutation::new(m).expect("shuffled identity is a permutation")
    }

    /// Mixture of `n` random unitaries.
    pub fn unital_map(&mut self, d: usize, n: usize) -> Result<KrausMap> {
        let p = self.distribution(n.max(1));
        let ops = p.iter().map(|&w| self.unitary(d).scale_real(sqrt(w))).collect();
        KrausMap::new(ops)
    }

    /// Generic channel with `n` Kraus operators: `K_k = G_k (G^dagger G)^{-1/2}`.
    pub fn channel(&mut self, d: usize, n: usize) -> Result<KrausMap> {
        let n = n.max(1);
        let blocks: Vec<ComplexMatrix> = (0..n).map(|_| self.ginibre(d, d)).collect();
        let mut gram = ComplexMatrix::zeros(d, d);
        for b in &blocks {
            gram = &gram + &(&b.adjoint() * b);
        }
        let inv_sqrt = hermitian_eigen(&gram.hermitian_part())?.reconstruct_with(|x| 1.0 / sqrt(x));
        KrausMap::new(blocks.iter().map(|b| b * &inv_sqrt).collect())
    }

    /// Nondegenerate energies with gaps of at least 0.1.
    pub fn hamiltonian(&mut self, d: usize) -> Result<Hamiltonian> {
        let mut e = 0.0;
        let mut energies = Vec::with_capacity(d);
        for _ in 0..d {
            e += 0.1 + self.uniform();
            energies.push(e);
        }
        energies.shuffle(&mut self.rng);
        Hamiltonian::new(energies)
    }
}
