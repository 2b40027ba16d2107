//! Fock-space representations of single-particle U(3) rotations.
//!
//! A single-particle unitary `u` maps `a_k† → Σ_j u_jk a_j†`. Its representation on the
//! `n`-particle sector is built from that substitution directly, sector by sector; the
//! generator route `exp(i dΓ(-i log u))` is kept as an independent check.

use nalgebra::{DMatrix, Schur};
use std::f64::consts::PI;

use super::fock::{fock_dim, index_of, FockBasis};
use crate::error::{Error, Result};
use super::fock::ladder_quadratic;
use crate::qmath::{c, cmatmul, cr, expm_i, is_unitary, CMatrix, CVector, C64};

const UNITARY_TOL: f64 = 1e-9;

/// Representation of `u` on every sector `0..=n_max`, via `R^(n)|k⟩ = b_j† R^(n-1)|k - e_j⟩ / √k_j`.
pub fn symmetric_powers(u: &CMatrix, n_max: usize) -> Vec<CMatrix> {
    let mut out = vec![CMatrix::from_element(1, 1, cr(1.0))];
    for n in 1..=n_max {
        let prev = &out[n - 1];
        let basis = FockBasis::new(n);
        let lower = FockBasis::new(n - 1);
        let mut raise = Vec::with_capacity(lower.len());
        for occ in lower.states() {
            let mut row = [(0usize, 0.0f64); 3];
            for (i, slot) in row.iter_mut().enumerate() {
                let mut up = *occ;
                up[i] += 1;
                *slot = (index_of(n, &up).expect("raised state"), (up[i] as f64).sqrt());
            }
            raise.push(row);
        }
        let mut r = CMatrix::zeros(basis.len(), basis.len());
        for (col, occ) in basis.states().iter().enumerate() {
            let j = (0..3).find(|&j| occ[j] > 0).expect("n > 0");
            let mut lowered = *occ;
            lowered[j] -= 1;
            let src = index_of(n - 1, &lowered).expect("lowered state");
            let norm = 1.0 / (occ[j] as f64).sqrt();
            for (m, amp) in prev.column(src).iter().enumerate() {
                if *amp == C64::new(0.0, 0.0) {
                    continue;
                }
                for (i, &(row, s)) in raise[m].iter().enumerate() {
                    r[(row, col)] += u[(i, j)] * amp * (s * norm);
                }
            }
        }
        out.push(r);
    }
    out
}

/// Representation through the generator, with a flag for an eigenvalue at the branch cut.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRepresentation {
    pub matrix: CMatrix,
    /// `u` has an eigenvalue at -1, where the principal logarithm is ambiguous.
    pub branch_ambiguous: bool,
}

/// Hermitian `K` with `exp(iK) = u`, taking principal arguments.
pub fn unitary_log(u: &CMatrix) -> Result<(CMatrix, bool)> {
    if !is_unitary(u, UNITARY_TOL) {
        return Err(Error::InvalidParameter("single-particle rotation is not unitary".into()));
    }
    let (q, t) = Schur::new(u.clone()).unpack();
    let mut ambiguous = false;
    let args: Vec<C64> = (0..u.nrows())
        .map(|k| {
            let a = t[(k, k)].arg();
            if PI - a.abs() < 1e-8 {
                ambiguous = true;
            }
            cr(a)
        })
        .collect();
    let k = &q * CMatrix::from_diagonal(&CVector::from_vec(args)) * q.adjoint();
    Ok(((&k + k.adjoint()).scale(0.5), ambiguous))
}

/// `exp(i Σ K_jk a_j† a_k)` with `K = -i log u` on the `n`-particle sector.
pub fn represent(u: &CMatrix, n: usize) -> Result<GeneratorRepresentation> {
    let (k, branch_ambiguous) = unitary_log(u)?;
    Ok(GeneratorRepresentation { matrix: expm_i(&ladder_quadratic(n, &k), 1.0), branch_ambiguous })
}

#[derive(Debug, Clone, PartialEq)]
enum Sectors {
    /// Diagonal `u`: the Fock states are eigenvectors, only the phases are kept.
    Diagonal(Vec<CVector>),
    Dense(Vec<CMatrix>),
}

/// A single-particle rotation with its cached sector representations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRotation {
    u: CMatrix,
    sectors: Sectors,
}

impl SpinRotation {
    pub fn new(u: CMatrix, n_max: usize) -> Result<Self> {
        if u.shape() != (3, 3) || !is_unitary(&u, UNITARY_TOL) {
            return Err(Error::InvalidParameter("spin rotation needs a 3x3 unitary".into()));
        }
        let diagonal = (0..3).all(|i| (0..3).all(|j| i == j || u[(i, j)] == C64::new(0.0, 0.0)));
        let sectors = if diagonal {
            Sectors::Diagonal(
                (0..=n_max)
                    .map(|n| {
                        let b = FockBasis::new(n);
                        CVector::from_iterator(
                            b.len(),
                            b.states().iter().map(|o| (0..3).map(|i| u[(i, i)].powu(o[i] as u32)).product()),
                        )
                    })
                    .collect(),
            )
        } else {
            Sectors::Dense(symmetric_powers(&u, n_max))
        };
        Ok(Self { u, sectors })
    }

    pub fn single_particle(&self) -> &CMatrix {
        &self.u
    }

    pub fn n_max(&self) -> usize {
        match &self.sectors {
            Sectors::Diagonal(v) => v.len() - 1,
            Sectors::Dense(v) => v.len() - 1,
        }
    }

    /// `R^(n)` as a dense matrix.
    pub fn sector(&self, n: usize) -> CMatrix {
        match &self.sectors {
            Sectors::Diagonal(v) => CMatrix::from_diagonal(&v[n]),
            Sectors::Dense(v) => v[n].clone(),
        }
    }

    /// True when every sector matrix is diagonal (pure phase rotations).
    pub fn is_diagonal(&self) -> bool {
        matches!(self.sectors, Sectors::Diagonal(_))
    }

    /// `R^(n) Φ`.
    pub fn apply_left(&self, n: usize, phi: &CMatrix) -> CMatrix {
        match &self.sectors {
            Sectors::Diagonal(v) => {
                let mut out = phi.clone();
                for (mut row, p) in out.row_iter_mut().zip(v[n].iter()) {
                    row *= *p;
                }
                out
            }
            Sectors::Dense(v) => cmatmul(&v[n], phi),
        }
    }

    /// `Φ R^(n)ᵀ`.
    pub fn apply_right(&self, n: usize, phi: &CMatrix) -> CMatrix {
        match &self.sectors {
            Sectors::Diagonal(v) => {
                let mut out = phi.clone();
                for (mut col, p) in out.column_iter_mut().zip(v[n].iter()) {
                    col *= *p;
                }
                out
            }
            Sectors::Dense(v) => cmatmul(phi, &v[n].transpose()),
        }
    }

    /// `max_jk |R^(n)_jk|²`.
    pub fn max_overlap(&self, n: usize) -> f64 {
        match &self.sectors {
            Sectors::Diagonal(_) => 1.0,
            Sectors::Dense(v) => v[n].iter().map(|z| z.norm_sqr()).fold(0.0, f64::max),
        }
    }

    /// Rotation whose sectors are `R_X^(n) R_Z^(n)†`.
    pub fn relative(x: &SpinRotation, z: &SpinRotation) -> Result<SpinRotation> {
        SpinRotation::new(x.u.clone() * z.u.adjoint(), x.n_max().min(z.n_max()))
    }

    pub fn dim(&self, n: usize) -> usize {
        fock_dim(n)
    }
}

/// `c_jk = |(R_X^(n) R_Z^(n)†)_jk|²`, rows labelled by X outcomes and columns by Z outcomes.
pub fn sector_overlap(x: &SpinRotation, z: &SpinRotation, n: usize) -> DMatrix<f64> {
    match (&x.sectors, &z.sectors) {
        (Sectors::Diagonal(_), Sectors::Dense(zs)) => zs[n].transpose().map(|w| w.norm_sqr()),
        (Sectors::Dense(xs), Sectors::Diagonal(_)) => xs[n].map(|w| w.norm_sqr()),
        (Sectors::Diagonal(_), Sectors::Diagonal(_)) => DMatrix::identity(fock_dim(n), fock_dim(n)),
        (Sectors::Dense(xs), Sectors::Dense(zs)) => cmatmul(&xs[n], &zs[n].adjoint()).map(|w| w.norm_sqr()),
    }
}

/// `(F₃)_jk = (i/√3) exp(2πi jk/3)`.
pub fn fourier3() -> CMatrix {
    let s = 1.0 / 3f64.sqrt();
    CMatrix::from_fn(3, 3, |j, k| c(0.0, s) * C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / 3.0))
}

/// `diag(e^{iφ₁}, e^{iφ₀}, e^{iφ₋₁})`.
pub fn phase_rotation(phi: [f64; 3]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(3, phi.iter().map(|&p| C64::from_polar(1.0, p))))
}

/// Single-particle spin-1 `S_y` in the `(1, 0, -1)` basis.
pub fn spin_y() -> CMatrix {
    let s = 1.0 / 2f64.sqrt();
    CMatrix::from_row_slice(
        3,
        3,
        &[cr(0.0), c(0.0, -s), cr(0.0), c(0.0, s), cr(0.0), c(0.0, -s), cr(0.0), c(0.0, s), cr(0.0)],
    )
}

fn zero_mode_phase_then_spin_y(angle: f64) -> CMatrix {
    let n0 = CMatrix::from_diagonal(&CVector::from_vec(vec![cr(0.0), cr(1.0), cr(0.0)]));
    expm_i(&n0, -angle) * expm_i(&spin_y(), -PI / 2.0)
}

/// Single-particle `e^{-iπ/4 N₀} e^{-iπ/2 S_y}`.
pub fn squeezed_rotation() -> CMatrix {
    zero_mode_phase_then_spin_y(PI / 4.0)
}

/// Single-particle `e^{-i3π/4 N₀} e^{-iπ/2 S_y}`.
pub fn antisqueezed_rotation() -> CMatrix {
    zero_mode_phase_then_spin_y(3.0 * PI / 4.0)
}
