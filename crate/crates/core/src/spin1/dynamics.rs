//! Spin-mixing dynamics and ground states at fixed particle number.

use nalgebra::DMatrix;

use super::fock::{fock_dim, index_of, ladder_quadratic, FockBasis, Occupation};
use crate::error::{Error, Result};
use crate::qmath::{cr, symmetric_eigen, CMatrix, CVector, C64};

/// Spin-mixing Hamiltonian
/// `g (a₁†a₋₁†a₀a₀ + h.c. + (N₀ - ½)(N₁ + N₋₁)) + q (N₁ + N₋₁)` on the full Fock space.
pub fn spin_mixing_hamiltonian(n: usize, g: f64, q: f64) -> DMatrix<f64> {
    let basis = FockBasis::new(n);
    let d = basis.len();
    let mut h = DMatrix::zeros(d, d);
    for (col, occ) in basis.states().iter().enumerate() {
        let side = (occ[0] + occ[2]) as f64;
        h[(col, col)] += g * (occ[1] as f64 - 0.5) * side + q * side;
        if occ[1] >= 2 {
            let to: Occupation = [occ[0] + 1, occ[1] - 2, occ[2] + 1];
            let amp = ((occ[1] * (occ[1] - 1)) as f64).sqrt() * ((to[0] * to[2]) as f64).sqrt();
            let row = index_of(n, &to).expect("number conserving");
            h[(row, col)] += g * amp;
            h[(col, row)] += g * amp;
        }
    }
    h
}

/// Occupation `|k, N-2k, k⟩` of the zero-magnetization pair ladder.
pub fn pair_state(n: usize, k: usize) -> Occupation {
    [k, n - 2 * k, k]
}

/// Same Hamiltonian restricted to `span{|k, N-2k, k⟩ : k = 0..=N/2}`.
pub fn pair_hamiltonian(n: usize, g: f64, q: f64) -> DMatrix<f64> {
    let m = n / 2 + 1;
    let mut h = DMatrix::zeros(m, m);
    for k in 0..m {
        let n0 = (n - 2 * k) as f64;
        h[(k, k)] = g * (n0 - 0.5) * (2 * k) as f64 + q * (2 * k) as f64;
        if k + 1 < m {
            let amp = g * (k + 1) as f64 * (n0 * (n0 - 1.0)).sqrt();
            h[(k + 1, k)] = amp;
            h[(k, k + 1)] = amp;
        }
    }
    h
}

/// `q = -g (N - ½)`, which cancels the depletion term near the polar state.
pub fn squeezing_q(n: usize, g: f64) -> f64 {
    -g * (n as f64 - 0.5)
}

/// Amplitudes over the pair ladder, embedded into the full Fock basis.
pub fn embed_pairs(n: usize, amps: &CVector) -> CVector {
    let mut out = CVector::zeros(fock_dim(n));
    for (k, a) in amps.iter().enumerate() {
        out[index_of(n, &pair_state(n, k)).expect("valid pair state")] = *a;
    }
    out
}

/// `e^{-iHt} ψ` through the spectral decomposition of a real symmetric `H`.
pub fn evolve(psi: &CVector, h: &DMatrix<f64>, t: f64) -> Result<CVector> {
    if psi.len() != h.nrows() {
        return Err(Error::Dimension(format!("state of length {} for operator of size {}", psi.len(), h.nrows())));
    }
    Ok(Propagator::new(h).apply(psi, t))
}

/// Cached eigendecomposition for repeated evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    vectors: CMatrix,
    values: Vec<f64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<f64>) -> Self {
        let (values, vectors) = symmetric_eigen(h);
        Self { vectors: vectors.map(cr), values }
    }

    pub fn apply(&self, psi: &CVector, t: f64) -> CVector {
        let mut w = self.vectors.adjoint() * psi;
        for (x, &e) in w.iter_mut().zip(&self.values) {
            *x *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * w
    }
}

/// Two-mode-squeezed evolution from `|0, N, 0⟩` at `q = -g(N - ½)`, labeled by `r = N g t`.
#[derive(Debug, Clone)]
pub struct SqueezingEvolution {
    n: usize,
    g: f64,
    propagator: Propagator,
}

impl SqueezingEvolution {
    pub fn new(n: usize, g: f64) -> Result<Self> {
        if n < 2 || g == 0.0 || !g.is_finite() {
            return Err(Error::InvalidParameter(format!("need N >= 2 and finite nonzero g, got N={n}, g={g}")));
        }
        Ok(Self { n, g, propagator: Propagator::new(&pair_hamiltonian(n, g, squeezing_q(n, g))) })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// Pair-ladder amplitudes at squeezing `r`.
    pub fn pair_amplitudes(&self, r: f64) -> CVector {
        let mut psi0 = CVector::zeros(self.n / 2 + 1);
        psi0[0] = cr(1.0);
        self.propagator.apply(&psi0, r / (self.n as f64 * self.g))
    }

    pub fn state(&self, r: f64) -> CVector {
        embed_pairs(self.n, &self.pair_amplitudes(r))
    }
}

/// Undepleted-pump amplitudes `(-i tanh r)^k / cosh r` on the pair ladder, truncated at `N/2`.
pub fn squeezed_reference(n: usize, r: f64) -> CVector {
    CVector::from_iterator(
        n / 2 + 1,
        (0..=n / 2).map(|k| C64::new(0.0, -r.tanh()).powu(k as u32) / r.cosh()),
    )
}

/// `|⟨reference|ψ⟩|²`.
pub fn fidelity(reference: &CVector, psi: &CVector) -> f64 {
    reference.dotc(psi).norm_sqr()
}

/// Lowest eigenpair of the pair-ladder Hamiltonian, largest amplitude made positive.
pub fn pair_ground_state(n: usize, g: f64, q: f64) -> (f64, CVector) {
    let (values, vectors) = symmetric_eigen(&pair_hamiltonian(n, g, q));
    let k = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let mut v = vectors.column(k).into_owned();
    let big = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
    if big < 0.0 {
        v.neg_mut();
    }
    (values[k], v.map(cr))
}

/// Lowest eigenvalue over the full Fock space.
pub fn full_ground_energy(n: usize, g: f64, q: f64) -> f64 {
    symmetric_eigen(&spin_mixing_hamiltonian(n, g, q)).0.first().copied().unwrap_or(0.0)
}

/// `S(φ) = (i/√2)(e^{-iφ} a₀†(a₁ - a₋₁) + h.c.)`.
pub fn spin_operator(n: usize, phi: f64) -> CMatrix {
    let a = C64::new(0.0, 1.0 / 2f64.sqrt()) * C64::from_polar(1.0, -phi);
    let mut c = CMatrix::zeros(3, 3);
    c[(1, 0)] = a;
    c[(1, 2)] = -a;
    c[(0, 1)] = a.conj();
    c[(2, 1)] = -a.conj();
    ladder_quadratic(n, &c)
}
