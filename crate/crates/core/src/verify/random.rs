//! Seeded random states, unitaries and measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::qmath::{hermitize, inv_sqrtm_psd, CMatrix, DensityOperator, PureStateVector, C64};

/// Generator for a seed; every sampler in this module draws from it.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / std::f64::consts::SQRT_2
    })
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn sample_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let x = r[(j, j)];
        let phase = if x.norm() > 0.0 { x / x.norm() } else { C64::new(1.0, 0.0) };
        col *= phase;
    }
    q
}

pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    sample_unitary(d, &mut rng_for(seed))
}

/// Reduced state of a random pure state on `d ⊗ rank`.
pub fn sample_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(hermitize(&m.unscale(tr)), dims.to_vec())
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    sample_density(&[d], rank, &mut rng_for(seed))
}

/// Bipartite state with a rank drawn uniformly from `1..=d_A d_B`.
pub fn sample_bipartite<R: Rng + ?Sized>(da: usize, db: usize, rng: &mut R) -> Result<DensityOperator> {
    let rank = rng.random_range(1..=da * db);
    sample_density(&[da, db], rank, rng)
}

pub fn sample_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureStateVector {
    let d: usize = dims.iter().product();
    let g = ginibre(d, 1, rng).column(0).into_owned();
    PureStateVector::normalized(g, dims.to_vec()).expect("nonzero Gaussian vector")
}

/// `Σ_k p_k ρ_A^k ⊗ ρ_B^k` with random weights and random-rank factors.
pub fn sample_separable<R: Rng + ?Sized>(da: usize, db: usize, terms: usize, rng: &mut R) -> Result<DensityOperator> {
    if terms == 0 {
        return Err(Error::InvalidParameter("separable state needs at least one term".into()));
    }
    let weights: Vec<f64> = (0..terms).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(da * db, da * db);
    for w in weights {
        let ra = rng.random_range(1..=da);
        let rb = rng.random_range(1..=db);
        let a = sample_density(&[da], ra, rng)?;
        let b = sample_density(&[db], rb, rng)?;
        m += a.tensor(&b).matrix() * C64::new(w / total, 0.0);
    }
    DensityOperator::new(hermitize(&m), vec![da, db])
}

pub fn random_separable(da: usize, db: usize, terms: usize, seed: u64) -> Result<DensityOperator> {
    sample_separable(da, db, terms, &mut rng_for(seed))
}

pub fn sample_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Measurement {
    Measurement::basis(sample_unitary(d, rng)).expect("Haar sample is unitary")
}

/// `E_k = S^{-1/2} G_k S^{-1/2}` with `G_k` random positive operators and `S = Σ G_k`.
///
/// With `blocks`, every `G_k` is first pinched onto the given orthogonal projectors, so the
/// elements commute with them.
pub fn sample_povm_pinched<R: Rng + ?Sized>(
    d: usize,
    outcomes: usize,
    blocks: Option<&[CMatrix]>,
    rng: &mut R,
) -> Result<Measurement> {
    if outcomes == 0 {
        return Err(Error::InvalidParameter("POVM needs at least one outcome".into()));
    }
    let mut gs = Vec::with_capacity(outcomes);
    for k in 0..outcomes {
        // a full-rank last element keeps the sum invertible
        let r = if k + 1 == outcomes { d } else { rng.random_range(1..=d) };
        let a = ginibre(d, r, rng);
        let g = &a * a.adjoint();
        gs.push(match blocks {
            Some(ps) => ps.iter().map(|p| p * &g * p).fold(CMatrix::zeros(d, d), |acc, x| acc + x),
            None => g,
        });
    }
    let s = gs.iter().fold(CMatrix::zeros(d, d), |acc, g| acc + g);
    let t = inv_sqrtm_psd(&s)?;
    Measurement::povm(gs.iter().map(|g| hermitize(&(&t * g * &t))).collect())
}

pub fn sample_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Measurement> {
    sample_povm_pinched(d, outcomes, None, rng)
}

pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<Measurement> {
    sample_povm(d, outcomes, &mut rng_for(seed))
}

/// Unitary that is block diagonal with respect to orthogonal coordinate blocks `labels`.
pub fn sample_block_unitary<R: Rng + ?Sized>(labels: &[i64], rng: &mut R) -> CMatrix {
    let d = labels.len();
    let mut u = CMatrix::zeros(d, d);
    let mut values = labels.to_vec();
    values.sort_unstable();
    values.dedup();
    for v in values {
        let idx: Vec<usize> = (0..d).filter(|&i| labels[i] == v).collect();
        let w = sample_unitary(idx.len(), rng);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                u[(i, j)] = w[(a, b)];
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{conditional_quantum, von_neumann};
    use crate::qmath::{identity, is_unitary, max_abs_diff};

    #[test]
    fn unitaries_are_unitary_and_seeded() {
        for d in 1..6 {
            let u = random_unitary(d, 3);
            assert!(is_unitary(&u, 1e-10));
            assert_eq!(u, random_unitary(d, 3));
        }
        assert_ne!(random_unitary(3, 1), random_unitary(3, 2));
    }

    #[test]
    fn density_examples() {
        let rho = random_density(4, 1, 9).unwrap();
        assert!(von_neumann(&rho).abs() < 1e-9);
        let rho = random_density(4, 4, 9).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(rho.eigenvalues().iter().all(|&v| v > -1e-12));
        assert!(random_density(2, 3, 0).is_err());
    }

    #[test]
    fn separable_states_have_nonnegative_conditional_entropy() {
        for seed in 0..40 {
            let rho = random_separable(2, 3, 1 + (seed as usize % 4), seed).unwrap();
            assert!(conditional_quantum(&rho).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn povms_sum_to_identity() {
        let m = random_povm(3, 5, 4).unwrap();
        let sum = m.elements().iter().fold(CMatrix::zeros(3, 3), |a, e| a + e);
        assert!(max_abs_diff(&sum, &identity(3)) < 1e-10);

        let labels = [0, 1, 1];
        let p0 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]));
        let p1 = identity(3) - &p0;
        let mut rng = rng_for(5);
        let m = sample_povm_pinched(3, 4, Some(&[p0.clone(), p1]), &mut rng).unwrap();
        for e in m.elements() {
            assert!(max_abs_diff(&(&p0 * &e), &(&e * &p0)) < 1e-10);
        }
        let u = sample_block_unitary(&labels, &mut rng);
        assert!(is_unitary(&u, 1e-10));
        assert_eq!(u[(0, 1)], C64::new(0.0, 0.0));
    }
}
