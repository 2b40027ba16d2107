//! Single-instance checks: purification duality, Petz recovery, tightness scans, and the
//! sector-projection consistency of spin-1 distributions.

use rand::Rng;
use rayon::prelude::*;

use super::random::{ginibre, rng_for, sample_unitary};
use crate::entropy::{conditional_classical, conditional_quantum};
use crate::error::{Error, Result};
use crate::measurement::{cq_conditional, joint_distribution_pure, post_measure, residual_conditional, Measurement};
use crate::qmath::{
    c, fourier_matrix, inv_sqrtm_psd, polar_unitary, purify, schmidt, sqrtm_psd, tensor_product, CMatrix, CVector,
    DensityOperator, PureStateVector,
};
use crate::spin1::split::{bipartite_distribution, block_diagonal, sector_offsets};
use crate::spin1::{fock_dim, SectorBlockedState, SpinRotation};

/// `|H(Z|C) - (H(Z|B) - [H(A|B) - H(A|ZB)])|` with `C` purifying `AB`.
pub fn duality_check(rho: &DensityOperator, z: &Measurement) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension("duality check needs a bipartite state".into()));
    }
    let rho_ac = DensityOperator::from_pure(&purify(rho)).reduce(&[0, 2])?;
    let lhs = cq_conditional(&rho_ac, z)?;
    let rhs = cq_conditional(rho, z)? - (conditional_quantum(rho)? - residual_conditional(rho, z)?);
    Ok((lhs - rhs).abs())
}

/// Frobenius distance between `ρ_AB` and its Petz reconstruction from the two dephased states,
/// `d √ρ_ZB (1 ⊗ ρ_B^{-1/2}) ρ_XB (1 ⊗ ρ_B^{-1/2}) √ρ_ZB`.
pub fn petz_probe(rho: &DensityOperator, x: &Measurement, z: &Measurement) -> Result<f64> {
    if !x.is_basis() || !z.is_basis() {
        return Err(Error::InvalidMeasurement("recovery probe needs two bases".into()));
    }
    if rho.dims().len() != 2 {
        return Err(Error::Dimension("recovery probe needs a bipartite state".into()));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let rho_zb = post_measure(rho, z)?;
    let rho_xb = post_measure(rho, x)?;
    let b = rho_zb.partial_trace(1)?;
    let w = tensor_product(&CMatrix::identity(da, da), &inv_sqrtm_psd(b.matrix())?);
    let root = sqrtm_psd(rho_zb.matrix())?;
    let rec = (&root * &w * rho_xb.matrix() * &w * &root) * c(da as f64, 0.0);
    debug_assert_eq!(rec.nrows(), da * db);
    Ok((rho.matrix() - rec).norm())
}

/// `H(X|X') + H(Z|Z') - H(A|B) - log d` for the basis pair `(V, V F)` on A.
pub fn tightness_gap(psi: &PureStateVector, v: &CMatrix, xb: &CMatrix, zb: &CMatrix) -> Result<f64> {
    let d = v.nrows();
    let x = Measurement::basis(v.clone())?;
    let z = Measurement::basis(v * fourier_matrix(d))?;
    let h_xx = conditional_classical(&joint_distribution_pure(psi, &x, &Measurement::basis(xb.clone())?)?);
    let h_zz = conditional_classical(&joint_distribution_pure(psi, &z, &Measurement::basis(zb.clone())?)?);
    let rho = DensityOperator::from_pure(psi);
    Ok(h_xx + h_zz - conditional_quantum(&rho)? - (d as f64).log2())
}

/// B basis closest to the states steered by measuring `u` on A.
///
/// Outcome `x` leaves B in `(⟨x| ⊗ 1)|ψ⟩`; these are the columns of `Mᵀ ū` for the amplitude
/// matrix `M`. The basis is the polar factor of that matrix.
pub fn steered_basis(psi: &PureStateVector, u: &CMatrix) -> Result<CMatrix> {
    let m = psi.amplitude_matrix()?;
    polar_unitary(&(m.transpose() * u.conjugate()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessScan {
    pub trials: usize,
    pub min_gap: f64,
    pub argmin_trial: usize,
}

/// Smallest tightness gap over sampled instances.
///
/// Even trials rotate A by a Haar unitary, odd trials by the Schmidt basis with random
/// phases and ordering. Trials with `i / 2` even measure B in the steered bases, the others
/// in Haar bases.
pub fn tightness_scan(psi: &PureStateVector, trials: usize, seed: u64) -> Result<TightnessScan> {
    let dims = psi.dims();
    if dims.len() != 2 || dims[0] != dims[1] || dims[0] > 4 {
        return Err(Error::Dimension(format!("tightness scan needs d_A = d_B <= 4, got {dims:?}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial".into()));
    }
    let d = dims[0];
    let s = schmidt(psi)?;
    let aligned = crate::qmath::complete_basis(&s.left_vectors);
    let gaps: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed.wrapping_add(i as u64));
            let v = if i % 2 == 0 {
                sample_unitary(d, &mut rng)
            } else {
                let mut perm: Vec<usize> = (0..d).collect();
                for k in (1..d).rev() {
                    perm.swap(k, rng.random_range(0..=k));
                }
                CMatrix::from_fn(d, d, |r, col| {
                    aligned[(r, perm[col])] * c(0.0, 2.0 * std::f64::consts::PI * rng_phase(seed, i, col)).exp()
                })
            };
            let (xb, zb) = if (i / 2) % 2 == 0 {
                (steered_basis(psi, &v)?, steered_basis(psi, &(&v * fourier_matrix(d)))?)
            } else {
                (sample_unitary(d, &mut rng), sample_unitary(d, &mut rng))
            };
            tightness_gap(psi, &v, &xb, &zb)
        })
        .collect();
    let mut best = TightnessScan { trials, min_gap: f64::INFINITY, argmin_trial: 0 };
    for (i, g) in gaps.into_iter().enumerate() {
        let g = g?;
        if g < best.min_gap {
            best.min_gap = g;
            best.argmin_trial = i;
        }
    }
    Ok(best)
}

fn rng_phase(seed: u64, trial: usize, col: usize) -> f64 {
    let mut rng = rng_for(seed.wrapping_add(trial as u64).rotate_left(17) ^ col as u64);
    rng.random::<f64>()
}

/// Random sector-blocked pure state of `n_total` particles split across A and B.
pub fn random_blocked_state(n_total: usize, seed: u64) -> Result<SectorBlockedState> {
    let mut rng = rng_for(seed);
    let mut blocks: Vec<CMatrix> =
        (0..=n_total).map(|n| ginibre(fock_dim(n), fock_dim(n_total - n), &mut rng)).collect();
    let norm: f64 = blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
    for b in &mut blocks {
        *b = b.unscale(norm);
    }
    SectorBlockedState::new(n_total, blocks)
}

/// Largest entrywise difference between the distributions of `ψ`, of `ψ̄ = Σ_n Π^(n) ψψ† Π^(n)`
/// and of the blockwise route, for `pairs` random number-conserving rotation pairs.
///
/// The dense route builds `⊕_n R^(n)` explicitly, so `n_total` should stay small.
pub fn conserved_distribution_gap(state: &SectorBlockedState, pairs: usize, seed: u64) -> Result<f64> {
    let n = state.particles();
    let off = sector_offsets(n);
    let dim = off[n + 1];
    let psi = state.to_dense();
    let components: Vec<(f64, PureStateVector)> = state
        .blocks()
        .iter()
        .enumerate()
        .filter_map(|(k, b)| {
            let w = b.norm_squared();
            (w > 0.0).then(|| {
                let mut v = CVector::zeros(dim * dim);
                for i in 0..b.nrows() {
                    for j in 0..b.ncols() {
                        v[(off[k] + i) * dim + off[n - k] + j] = b[(i, j)];
                    }
                }
                (w, PureStateVector::normalized(v, vec![dim, dim]).expect("nonzero block"))
            })
        })
        .collect();

    let gaps: Vec<Result<f64>> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed.wrapping_add(i));
            let a = SpinRotation::new(sample_unitary(3, &mut rng), n)?;
            let b = SpinRotation::new(sample_unitary(3, &mut rng), n)?;
            let ma = Measurement::basis(block_diagonal(&a, n)?.adjoint())?;
            let mb = Measurement::basis(block_diagonal(&b, n)?.adjoint())?;
            let full = joint_distribution_pure(&psi, &ma, &mb)?;
            let mut bar = nalgebra::DMatrix::<f64>::zeros(dim, dim);
            for (w, comp) in &components {
                bar += joint_distribution_pure(comp, &ma, &mb)?.table() * *w;
            }
            let blockwise = bipartite_distribution(state, &a, &b)?;
            let g1 = (full.table() - &bar).amax();
            let g2 = (full.table() - blockwise.table()).amax();
            Ok(g1.max(g2))
        })
        .collect();
    gaps.into_iter().try_fold(0.0f64, |acc, g| Ok(acc.max(g?)))
}

/// Smallest `max_jk |U_jk|²` over Haar samples of `U(d)`; the Fourier matrix attains `1/d`.
pub fn fourier_probe(d: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed);
    (0..samples)
        .map(|_| sample_unitary(d, &mut rng).iter().map(|z| z.norm_sqr()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}
