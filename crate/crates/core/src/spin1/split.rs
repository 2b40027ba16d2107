//! Beamsplitter splitting into two subsystems, stored by local particle number.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::fock::{fock_dim, index_of, FockBasis};
use super::rotation::SpinRotation;
use crate::entropy::{conditional_block, plogp_sum, JointDistribution};
use crate::error::{Error, Result};
use crate::qmath::{hermitian_eigen, singular_values, CMatrix, CVector, PureStateVector, C64};

const NORM_TOL: f64 = 1e-9;

/// Pure state of two subsystems with `N` particles in total, one block per sector.
///
/// Block `n` holds the amplitudes with `n` particles in A, shaped `D(n) × D(N - n)` and indexed by
/// the Fock bases of both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlockedState {
    n_total: usize,
    blocks: Vec<CMatrix>,
}

/// `√(C(n, m) / 2^n)` for `m = 0..=n`.
fn binomial_amplitudes(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 0.5f64.powi(n as i32);
    for m in 0..n {
        p[m + 1] = p[m] * (n - m) as f64 / (m + 1) as f64;
    }
    p.into_iter().map(f64::sqrt).collect()
}

impl SectorBlockedState {
    pub fn new(n_total: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != n_total + 1 {
            return Err(Error::Dimension(format!("{} blocks for N = {n_total}", blocks.len())));
        }
        for (n, b) in blocks.iter().enumerate() {
            if b.shape() != (fock_dim(n), fock_dim(n_total - n)) {
                return Err(Error::Dimension(format!("block {n} has shape {:?}", b.shape())));
            }
        }
        let norm: f64 = blocks.iter().map(|b| b.norm_squared()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm}")));
        }
        Ok(Self { n_total, blocks })
    }

    pub fn particles(&self) -> usize {
        self.n_total
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `p(n)`, the probability of `n` particles in A.
    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.norm_squared()).collect()
    }

    /// Particle-number entanglement `H({p(n)})`.
    pub fn number_entropy(&self) -> f64 {
        plogp_sum(&self.weights())
    }

    /// Configurational entanglement `Σ_n p(n) H(ρ_B^(n))`, from the B-side sector spectra.
    pub fn configurational(&self) -> f64 {
        self.blocks
            .par_iter()
            .map(|b| {
                let p = b.norm_squared();
                if p <= 0.0 {
                    return 0.0;
                }
                let rho_b = b.transpose() * b.conjugate();
                let vals: Vec<f64> = hermitian_eigen(&rho_b).values.iter().map(|v| v.max(0.0)).collect();
                plogp_sum(&vals) + p * p.log2()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    /// `-H(A|B) = H(ρ_A)`, from the singular values of every block.
    pub fn entanglement(&self) -> f64 {
        self.blocks
            .par_iter()
            .map(|b| {
                let s: Vec<f64> = singular_values(b).iter().map(|x| x * x).collect();
                plogp_sum(&s)
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    /// `R_A^(n) Φ_n R_B^(N-n)ᵀ` on every block.
    pub fn rotate(&self, a: &SpinRotation, b: &SpinRotation) -> Result<SectorBlockedState> {
        check_rotation(a, self.n_total)?;
        check_rotation(b, self.n_total)?;
        let n = self.n_total;
        let blocks = self
            .blocks
            .par_iter()
            .enumerate()
            .map(|(k, phi)| b.apply_right(n - k, &a.apply_left(k, phi)))
            .collect();
        Ok(Self { n_total: n, blocks })
    }

    /// Squared moduli of every block.
    pub fn probabilities(&self) -> BlockedDistribution {
        BlockedDistribution {
            n_total: self.n_total,
            blocks: self.blocks.iter().map(|b| b.map(|z| z.norm_sqr())).collect(),
        }
    }

    /// Dense vector on `(⊕_n H^(n)) ⊗ (⊕_n H^(n))`; only sensible for small N.
    pub fn to_dense(&self) -> PureStateVector {
        let offsets = sector_offsets(self.n_total);
        let d = offsets[self.n_total + 1];
        let mut v = CVector::zeros(d * d);
        for (n, b) in self.blocks.iter().enumerate() {
            let (oa, ob) = (offsets[n], offsets[self.n_total - n]);
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    v[(oa + i) * d + ob + j] = b[(i, j)];
                }
            }
        }
        PureStateVector::new(v, vec![d, d]).expect("blocks are normalized")
    }
}

fn check_rotation(r: &SpinRotation, n: usize) -> Result<()> {
    if r.n_max() < n {
        return Err(Error::Dimension(format!("rotation cached up to {} particles, need {n}", r.n_max())));
    }
    Ok(())
}

/// Start of each sector in the direct sum `⊕_{n=0}^{N} H^(n)`, plus the total dimension.
pub fn sector_offsets(n_total: usize) -> Vec<usize> {
    let mut out = vec![0];
    for n in 0..=n_total {
        out.push(out[n] + fock_dim(n));
    }
    out
}

/// Dense `⊕_{n=0}^{N} R^(n)` on the direct sum of sectors.
pub fn block_diagonal(r: &SpinRotation, n_total: usize) -> Result<CMatrix> {
    check_rotation(r, n_total)?;
    let off = sector_offsets(n_total);
    let mut m = CMatrix::zeros(off[n_total + 1], off[n_total + 1]);
    for k in 0..=n_total {
        let d = off[k + 1] - off[k];
        m.view_mut((off[k], off[k]), (d, d)).copy_from(&r.sector(k));
    }
    Ok(m)
}

/// Maps `a_k† → (a_{A,k}† + a_{B,k}†)/√2` on a state of the Fock basis of `n_total` particles.
pub fn beamsplit(n_total: usize, psi: &CVector) -> Result<SectorBlockedState> {
    let basis = FockBasis::new(n_total);
    if psi.len() != basis.len() {
        return Err(Error::Dimension(format!("state of length {} for N = {n_total}", psi.len())));
    }
    let mut blocks: Vec<CMatrix> =
        (0..=n_total).map(|n| CMatrix::zeros(fock_dim(n), fock_dim(n_total - n))).collect();
    for (amp, occ) in psi.iter().zip(basis.states()) {
        if *amp == C64::new(0.0, 0.0) {
            continue;
        }
        let w: Vec<Vec<f64>> = occ.iter().map(|&k| binomial_amplitudes(k)).collect();
        for m1 in 0..=occ[0] {
            for m0 in 0..=occ[1] {
                for m2 in 0..=occ[2] {
                    let a_occ = [m1, m0, m2];
                    let b_occ = [occ[0] - m1, occ[1] - m0, occ[2] - m2];
                    let n = m1 + m0 + m2;
                    let ia = index_of(n, &a_occ).expect("valid A occupation");
                    let ib = index_of(n_total - n, &b_occ).expect("valid B occupation");
                    blocks[n][(ia, ib)] += amp * (w[0][m1] * w[1][m0] * w[2][m2]);
                }
            }
        }
    }
    SectorBlockedState::new(n_total, blocks)
}

/// Probability tables per sector: rows are A outcomes with `n` particles, columns B outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedDistribution {
    pub n_total: usize,
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockedDistribution {
    /// `H(X_A|X_B)`; every B outcome fixes the sector, so the blocks contribute independently.
    pub fn conditional_entropy(&self) -> f64 {
        self.blocks.iter().map(conditional_block).sum()
    }

    /// Dense joint distribution labelled by `(N₁, N₀, N₋₁)` occupations on each side.
    pub fn to_joint(&self) -> Result<JointDistribution> {
        let n = self.n_total;
        let offsets = sector_offsets(n);
        let d = offsets[n + 1];
        let mut table = DMatrix::zeros(d, d);
        for (k, b) in self.blocks.iter().enumerate() {
            table.view_mut((offsets[k], offsets[n - k]), b.shape()).copy_from(b);
        }
        JointDistribution::with_labels(table, outcome_labels(n), outcome_labels(n))
    }
}

/// Occupation labels of `⊕_{n=0}^{N} H^(n)` in storage order.
pub fn outcome_labels(n_total: usize) -> Vec<Vec<i64>> {
    (0..=n_total)
        .flat_map(|n| FockBasis::new(n).states().to_vec())
        .map(|o| o.iter().map(|&x| x as i64).collect())
        .collect()
}

/// Joint distribution after the local rotations `u_A ⊗ u_B` and bare-mode counting.
pub fn bipartite_distribution(
    state: &SectorBlockedState,
    a: &SpinRotation,
    b: &SpinRotation,
) -> Result<JointDistribution> {
    state.rotate(a, b)?.probabilities().to_joint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{cr, identity};
    use crate::spin1::rotation::fourier3;
    use approx::assert_abs_diff_eq;

    fn fock(n: usize, occ: [usize; 3]) -> CVector {
        let mut v = CVector::zeros(fock_dim(n));
        v[index_of(n, &occ).unwrap()] = cr(1.0);
        v
    }

    #[test]
    fn single_particle_split() {
        let s = beamsplit(1, &fock(1, [1, 0, 0])).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(s.blocks()[0][(0, 0)].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.blocks()[1][(0, 0)].re, h, epsilon = 1e-15);
        assert_eq!(s.blocks()[1][(1, 0)], cr(0.0));
        assert_abs_diff_eq!(s.number_entropy(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.configurational(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_split_is_binomial() {
        let n = 9;
        let s = beamsplit(n, &fock(n, [0, n, 0])).unwrap();
        let mut c = 1.0;
        for (k, w) in s.weights().iter().enumerate() {
            assert_abs_diff_eq!(*w, c / 512.0, epsilon = 1e-14);
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        assert_abs_diff_eq!(s.configurational(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.entanglement(), s.number_entropy(), epsilon = 1e-10);
    }

    #[test]
    fn decomposition_adds_up() {
        let n = 6;
        let basis = FockBasis::new(n);
        let psi = CVector::from_iterator(basis.len(), (0..basis.len()).map(|k| C64::new((k as f64).sin(), 0.3 * k as f64)));
        let psi = psi.unscale(psi.norm());
        let s = beamsplit(n, &psi).unwrap();
        assert_abs_diff_eq!(s.entanglement(), s.number_entropy() + s.configurational(), epsilon = 1e-9);
        let dense = s.to_dense();
        let exact = crate::entropy::von_neumann(&dense.reduce(&[0]).unwrap());
        assert_abs_diff_eq!(exact, s.entanglement(), epsilon = 1e-9);
    }

    #[test]
    fn identity_rotation_distribution() {
        let n = 4;
        let s = beamsplit(n, &fock(n, [0, n, 0])).unwrap();
        let id = SpinRotation::new(identity(3), n).unwrap();
        let p = bipartite_distribution(&s, &id, &id).unwrap();
        let labels = p.x_labels().to_vec();
        let mut total = 0.0;
        for (i, la) in labels.iter().enumerate() {
            for (j, lb) in labels.iter().enumerate() {
                let v = p.table()[(i, j)];
                total += v;
                let expect = if la[0] == 0 && la[2] == 0 && lb[0] == 0 && lb[2] == 0 && la[1] + lb[1] == n as i64 {
                    let k = la[1] as usize;
                    (1..=k).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64) / 16.0
                } else {
                    0.0
                };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn local_rotation_keeps_other_marginal() {
        let n = 5;
        let basis = FockBasis::new(n);
        let psi = CVector::from_iterator(basis.len(), (0..basis.len()).map(|k| C64::new(1.0, k as f64 * 0.1)));
        let s = beamsplit(n, &psi.unscale(psi.norm())).unwrap();
        let id = SpinRotation::new(identity(3), n).unwrap();
        let f = SpinRotation::new(fourier3(), n).unwrap();
        let plain = bipartite_distribution(&s, &id, &id).unwrap();
        let rotated = bipartite_distribution(&s, &f, &id).unwrap();
        let (a, b) = (plain.marginal_y(), rotated.marginal_y());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}
