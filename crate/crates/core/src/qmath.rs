//! State representations and dense linear algebra shared by every other module.
//!
//! Tensor layouts are A-major throughout: for a product space with subsystem
//! dimensions `[d_0, d_1, ..., d_k]` the flat index is the mixed-radix number
//! whose most significant digit belongs to subsystem 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for the density-operator invariants.
pub const STATE_TOL: f64 = 1e-10;
/// Relative cutoff separating the numerical null space from the support.
pub const ZERO_CUTOFF: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Hermitian part `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

/// Kronecker product `A ⊗ B` with A as the major index.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Complex product through four real products, which hit the optimized real kernel.
pub fn cmatmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < 32 * 32 * 32 {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, C64::new)
}

/// Embeds `op` acting on subsystem `k` of a product space into the full space.
pub fn embed(op: &CMatrix, dims: &[usize], k: usize) -> Result<CMatrix> {
    if k >= dims.len() {
        return Err(Error::Subsystem { index: k, count: dims.len() });
    }
    if op.nrows() != dims[k] || op.ncols() != dims[k] {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, subsystem {k} has dimension {}",
            op.nrows(),
            op.ncols(),
            dims[k]
        )));
    }
    let before: usize = dims[..k].iter().product();
    let after: usize = dims[k + 1..].iter().product();
    Ok(identity(before).kronecker(op).kronecker(&identity(after)))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Rebuilds `Σ f(λ) |v⟩⟨v|`.
    pub fn rebuild(&self, mapped: &[C64]) -> CMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (j, f) in mapped.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= *f;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Diagonalizes the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianSpectrum {
    let n = m.nrows();
    if n == 0 {
        return HermitianSpectrum { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    let h = hermitize(m);
    let eig = to_faer(&h).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver did not converge");
    let values: Vec<f64> = (0..n).map(|k| eig.S()[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.U()[(r, col)]);
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    HermitianSpectrum { values, vectors }
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    sequential_faer();
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Keeps faer single-threaded so results do not depend on the thread pool.
fn sequential_faer() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    sequential_faer();
    let sym = (m + m.transpose()) * 0.5;
    let eig = faer::Mat::from_fn(n, n, |i, j| sym[(i, j)])
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigensolver did not converge");
    let values = (0..n).map(|k| eig.S()[k]).collect();
    (values, DMatrix::from_fn(n, n, |r, c| eig.U()[(r, c)]))
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let s = to_faer(m).singular_values().expect("singular value decomposition did not converge");
    s.into_iter().map(|x| x.max(0.0)).collect()
}
/// Unitary factor `U W†` of the SVD `m = U Σ W†`, the closest unitary to a square `m`.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("polar factor of a non-square matrix".into()));
    }
    let svd = to_faer(m).svd().map_err(|_| Error::Numerical("SVD did not converge".into()))?;
    let (u, v) = (svd.U(), svd.V());
    let n = m.nrows();
    Ok(CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * v[(j, k)].conj()).sum()))
}

/// Largest eigenvalue of the Hermitian part. For positive arguments this is the operator norm.
pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.last().copied().unwrap_or(0.0)
}

/// Applies `f` to the eigenvalues of the Hermitian part of `h`.
///
/// With `zero_cutoff = Some(c)`, eigenvalues with `|λ| <= c · max|λ|` are mapped
/// to exactly zero, which turns log, sqrt and inverse into pseudo-functions on
/// the support. `f` returning `None` on a retained eigenvalue is a domain error.
pub fn spectral_function<F>(h: &CMatrix, f: F, zero_cutoff: Option<f64>) -> Result<CMatrix>
where
    F: Fn(f64) -> Option<C64>,
{
    if !h.is_square() {
        return Err(Error::Dimension("spectral function of a non-square matrix".into()));
    }
    let spec = hermitian_eigen(h);
    let threshold = zero_cutoff.map(|c| c * spec.max_abs_value());
    let mut mapped = Vec::with_capacity(spec.values.len());
    for &lam in &spec.values {
        let v = match threshold {
            Some(t) if lam.abs() <= t => C64::new(0.0, 0.0),
            _ => f(lam).ok_or(Error::SpectralDomain(lam))?,
        };
        mapped.push(v);
    }
    Ok(spec.rebuild(&mapped))
}

/// Square root of a positive semidefinite operator.
pub fn sqrtm_psd(h: &CMatrix) -> Result<CMatrix> {
    spectral_function(h, |x| (x >= 0.0).then(|| cr(x.sqrt())), Some(ZERO_CUTOFF))
}

/// Inverse square root restricted to the support.
pub fn inv_sqrtm_psd(h: &CMatrix) -> Result<CMatrix> {
    spectral_function(h, |x| (x > 0.0).then(|| cr(1.0 / x.sqrt())), Some(ZERO_CUTOFF))
}

/// Base-2 logarithm restricted to the support.
pub fn log2m_psd(h: &CMatrix) -> Result<CMatrix> {
    spectral_function(h, |x| (x > 0.0).then(|| cr(x.log2())), Some(ZERO_CUTOFF))
}

/// `exp(i t H)` for Hermitian `H`.
pub fn expm_i(h: &CMatrix, t: f64) -> CMatrix {
    spectral_function(h, |x| Some(C64::from_polar(1.0, t * x)), None)
        .expect("exponential is defined everywhere")
}

/// Mixed-radix decomposition of flat indices into (kept, traced) indices.
///
/// `keep` lists subsystems in the order they should appear in the kept index.
fn split_indices(dims: &[usize], keep: &[usize]) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    for (pos, &k) in keep.iter().enumerate() {
        if k >= dims.len() {
            return Err(Error::Subsystem { index: k, count: dims.len() });
        }
        if keep[..pos].contains(&k) {
            return Err(Error::InvalidParameter(format!("subsystem {k} listed twice")));
        }
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let d_keep: usize = keep.iter().map(|&k| dims[k]).product();
    let d_rest: usize = rest.iter().map(|&k| dims[k]).product();
    let total: usize = dims.iter().product();
    let mut digits = vec![0usize; dims.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let a = keep.iter().fold(0, |acc, &k| acc * dims[k] + digits[k]);
        let t = rest.iter().fold(0, |acc, &k| acc * dims[k] + digits[k]);
        out.push((a, t));
        for k in (0..dims.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok((d_keep, d_rest, out))
}

/// Hermitian, positive, unit-trace operator on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates the density-operator invariants at [`STATE_TOL`].
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if !matrix.is_square() || matrix.nrows() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, dims {:?} require {d}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        let herm = max_abs_diff(&matrix, &matrix.adjoint());
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigen(&matrix).values.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix: hermitize(&matrix), dims })
    }

    /// Wraps a matrix known to be a state up to rounding; only symmetrizes.
    pub(crate) fn from_raw(matrix: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        Self { matrix: hermitize(&matrix), dims }
    }

    pub fn from_pure(psi: &PureStateVector) -> Self {
        let m = &psi.amplitudes * psi.amplitudes.adjoint();
        Self::from_raw(m, psi.dims.clone())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::from_raw(identity(d).unscale(d as f64), dims)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64], dims: Vec<usize>) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(probs.len(), probs.iter().map(|&p| cr(p))));
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).values
    }

    /// `self ⊗ other` with concatenated subsystem lists.
    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_raw(tensor_product(&self.matrix, &other.matrix), dims)
    }

    /// Reduced state on `keep` (in the listed order), tracing out everything else.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        let (dk, dr, idx) = split_indices(&self.dims, keep)?;
        let mut table = vec![0usize; dk * dr];
        for (i, &(a, t)) in idx.iter().enumerate() {
            table[a * dr + t] = i;
        }
        let mut out = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut s = C64::new(0.0, 0.0);
                for t in 0..dr {
                    s += self.matrix[(table[a * dr + t], table[b * dr + t])];
                }
                out[(a, b)] = s;
            }
        }
        Ok(Self::from_raw(out, keep.iter().map(|&k| self.dims[k]).collect()))
    }

    /// Reduced state of a single subsystem; requires at least two factors.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityOperator> {
        if self.dims.len() < 2 {
            return Err(Error::Dimension("partial trace needs at least two subsystems".into()));
        }
        self.reduce(&[keep])
    }

    /// Conjugation `U ρ U†` keeping the subsystem split.
    pub fn conjugate(&self, u: &CMatrix) -> DensityOperator {
        Self::from_raw(u * &self.matrix * u.adjoint(), self.dims.clone())
    }
}

/// Normalized amplitude vector on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureStateVector {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if amplitudes.len() != d {
            return Err(Error::Dimension(format!(
                "{} amplitudes, dims {:?} require {d}",
                amplitudes.len(),
                dims
            )));
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("squared norm {n2} differs from 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new(amplitudes.unscale(n), dims)
    }

    /// Computational basis state `|i_0 i_1 ...⟩`.
    pub fn basis(digits: &[usize], dims: Vec<usize>) -> Result<Self> {
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::InvalidParameter(format!("basis digits {digits:?} for dims {dims:?}")));
        }
        let d: usize = dims.iter().product();
        let idx = digits.iter().zip(&dims).fold(0, |acc, (i, d)| acc * d + i);
        let mut v = CVector::zeros(d);
        v[idx] = cr(1.0);
        Self::new(v, dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn tensor(&self, other: &PureStateVector) -> PureStateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes), dims }
    }

    /// Amplitudes reshaped as a `d_A × d_B` matrix for a bipartite state.
    pub fn amplitude_matrix(&self) -> Result<CMatrix> {
        if self.dims.len() != 2 {
            return Err(Error::Dimension(format!("expected two subsystems, got {:?}", self.dims)));
        }
        let (da, db) = (self.dims[0], self.dims[1]);
        Ok(CMatrix::from_fn(da, db, |i, j| self.amplitudes[i * db + j]))
    }

    /// Builds a bipartite state from its `d_A × d_B` amplitude matrix.
    pub fn from_amplitude_matrix(m: &CMatrix) -> Result<Self> {
        let (da, db) = m.shape();
        let v = CVector::from_fn(da * db, |k, _| m[(k / db, k % db)]);
        Self::new(v, vec![da, db])
    }

    /// Reduced density operator on `keep`, computed as `M M†` without forming `|ψ⟩⟨ψ|`.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        let (dk, dr, idx) = split_indices(&self.dims, keep)?;
        let mut m = CMatrix::zeros(dk, dr);
        for (i, &(a, t)) in idx.iter().enumerate() {
            m[(a, t)] = self.amplitudes[i];
        }
        Ok(DensityOperator::from_raw(
            &m * m.adjoint(),
            keep.iter().map(|&k| self.dims[k]).collect(),
        ))
    }

    pub fn apply(&self, u: &CMatrix) -> Result<PureStateVector> {
        if u.ncols() != self.amplitudes.len() || u.nrows() != u.ncols() {
            return Err(Error::Dimension("operator does not match state dimension".into()));
        }
        Ok(Self { amplitudes: u * &self.amplitudes, dims: self.dims.clone() })
    }

    pub fn inner(&self, other: &PureStateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// `ψ = Σ_i s_i |l_i⟩ ⊗ |r_i⟩` with `s` descending.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: CMatrix,
    pub right_vectors: CMatrix,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CVector {
        let (da, db) = (self.left_vectors.nrows(), self.right_vectors.nrows());
        let mut v = CVector::zeros(da * db);
        for (k, &s) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                let li = self.left_vectors[(i, k)] * s;
                for j in 0..db {
                    v[i * db + j] += li * self.right_vectors[(j, k)];
                }
            }
        }
        v
    }

    /// Squared coefficients, i.e. the spectrum of either reduced state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }
}

/// Schmidt decomposition of a bipartite pure state via the SVD of its amplitude matrix.
pub fn schmidt(psi: &PureStateVector) -> Result<SchmidtDecomposition> {
    let m = psi.amplitude_matrix()?;
    let svd = to_faer(&m).thin_svd().map_err(|_| Error::Numerical("SVD did not converge".into()))?;
    let (u, v, sv) = (svd.U(), svd.V(), svd.S());
    let k = sv.dim();
    let mut order: Vec<usize> = (0..k).collect();
    // stable: ties keep solver order
    order.sort_by(|&a, &b| sv[b].re.total_cmp(&sv[a].re));
    let coefficients = order.iter().map(|&i| sv[i].re.max(0.0)).collect();
    let left_vectors = CMatrix::from_fn(u.nrows(), k, |r, col| u[(r, order[col])]);
    // M = U S V†, so the B-side vector of term i is the conjugate of column i of V.
    let right_vectors = CMatrix::from_fn(v.nrows(), k, |r, col| v[(r, order[col])].conj());
    Ok(SchmidtDecomposition { coefficients, left_vectors, right_vectors })
}

/// Canonical purification `Σ √λ_i |e_i⟩ ⊗ |i⟩` with the ancilla appended as the last factor.
///
/// The ancilla dimension is the rank after the relative zero cutoff; eigenvalues are
/// taken in descending order.
pub fn purify(rho: &DensityOperator) -> PureStateVector {
    let spec = hermitian_eigen(rho.matrix());
    let threshold = ZERO_CUTOFF * spec.max_abs_value();
    let kept: Vec<usize> = (0..spec.values.len())
        .rev()
        .filter(|&i| spec.values[i] > threshold)
        .collect();
    let rank = kept.len().max(1);
    let d = rho.dim();
    let mut v = CVector::zeros(d * rank);
    for (a, &i) in kept.iter().enumerate() {
        let w = spec.values[i].sqrt();
        for r in 0..d {
            v[r * rank + a] = spec.vectors[(r, i)] * w;
        }
    }
    let n = v.norm();
    let mut dims = rho.dims().to_vec();
    dims.push(rank);
    PureStateVector { amplitudes: v.unscale(n), dims }
}

/// Completes the orthonormal columns of `m` to a full unitary by Gram–Schmidt on the standard basis.
pub fn complete_basis(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let mut cols: Vec<CVector> = Vec::with_capacity(d);
    for j in 0..m.ncols() {
        cols.push(m.column(j).into_owned());
    }
    let mut e = 0;
    while cols.len() < d && e < d {
        let mut v = CVector::zeros(d);
        v[e] = cr(1.0);
        for _ in 0..2 {
            for c in &cols {
                let p = c.dotc(&v);
                v -= c * p;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v.unscale(n));
        }
        e += 1;
    }
    CMatrix::from_columns(&cols)
}

/// Discrete Fourier matrix `F_jk = ω^{jk} / √d`.
pub fn fourier_matrix(d: usize) -> CMatrix {
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        C64::from_polar(s, 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64)
    })
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}
