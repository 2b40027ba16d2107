//! Projective and generalized measurements on one side of a bipartite system.

use nalgebra::DMatrix;

use crate::entropy::{conditional_quantum, plogp_sum, von_neumann, JointDistribution, MARGINAL_FLOOR};
use crate::error::{Error, Result};
use crate::qmath::{
    cr, embed, fourier_matrix, hermitian_eigen, hermitize, identity, is_unitary, max_abs_diff, max_eigenvalue,
    sqrtm_psd, CMatrix, CVector, DensityOperator, PureStateVector, C64,
};

/// Outcome label: an integer tuple such as a lattice site or a Fock occupation.
pub type Outcome = Vec<i64>;

pub const UNITARY_TOL: f64 = 1e-9;
pub const POVM_POSITIVITY_TOL: f64 = 1e-10;
pub const POVM_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementKind {
    /// Orthonormal basis given by the columns of a unitary.
    Basis(CMatrix),
    /// Positive operators summing to the identity.
    Povm(Vec<CMatrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    kind: MeasurementKind,
    labels: Vec<Outcome>,
}

fn default_labels(n: usize) -> Vec<Outcome> {
    (0..n as i64).map(|i| vec![i]).collect()
}

impl Measurement {
    pub fn basis(u: CMatrix) -> Result<Self> {
        if !is_unitary(&u, UNITARY_TOL) {
            return Err(Error::InvalidMeasurement("basis matrix is not unitary".into()));
        }
        let labels = default_labels(u.ncols());
        Ok(Self { kind: MeasurementKind::Basis(u), labels })
    }

    pub fn povm(elements: Vec<CMatrix>) -> Result<Self> {
        let d = elements
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("empty POVM".into()))?
            .nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidMeasurement(format!("element {k} has the wrong shape")));
            }
            if max_abs_diff(e, &e.adjoint()) > POVM_POSITIVITY_TOL {
                return Err(Error::InvalidMeasurement(format!("element {k} is not Hermitian")));
            }
            let min = hermitian_eigen(e).values[0];
            if min < -POVM_POSITIVITY_TOL {
                return Err(Error::InvalidMeasurement(format!("element {k} has eigenvalue {min:e}")));
            }
            sum += e;
        }
        let dev = max_abs_diff(&sum, &identity(d));
        if dev > POVM_SUM_TOL {
            return Err(Error::InvalidMeasurement(format!("elements sum to identity only within {dev:e}")));
        }
        let labels = default_labels(elements.len());
        Ok(Self { kind: MeasurementKind::Povm(elements.iter().map(hermitize).collect()), labels })
    }

    pub fn with_labels(mut self, labels: Vec<Outcome>) -> Result<Self> {
        if labels.len() != self.outcomes() {
            return Err(Error::InvalidMeasurement(format!(
                "{} labels for {} outcomes",
                labels.len(),
                self.outcomes()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn computational(d: usize) -> Self {
        Self::basis(identity(d)).expect("identity is unitary")
    }

    pub fn fourier(d: usize) -> Self {
        Self::basis(fourier_matrix(d)).expect("Fourier matrix is unitary")
    }

    pub fn kind(&self) -> &MeasurementKind {
        &self.kind
    }

    pub fn labels(&self) -> &[Outcome] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MeasurementKind::Basis(u) => u.nrows(),
            MeasurementKind::Povm(e) => e[0].nrows(),
        }
    }

    pub fn outcomes(&self) -> usize {
        match &self.kind {
            MeasurementKind::Basis(u) => u.ncols(),
            MeasurementKind::Povm(e) => e.len(),
        }
    }

    pub fn is_basis(&self) -> bool {
        matches!(self.kind, MeasurementKind::Basis(_))
    }

    /// Measurement operators; rank-1 projectors for a basis.
    pub fn elements(&self) -> Vec<CMatrix> {
        match &self.kind {
            MeasurementKind::Basis(u) => (0..u.ncols())
                .map(|k| {
                    let v = u.column(k);
                    v * v.adjoint()
                })
                .collect(),
            MeasurementKind::Povm(e) => e.clone(),
        }
    }

    /// Square roots of the measurement operators.
    pub fn sqrt_elements(&self) -> Result<Vec<CMatrix>> {
        match &self.kind {
            MeasurementKind::Basis(_) => Ok(self.elements()),
            MeasurementKind::Povm(e) => e.iter().map(sqrtm_psd).collect(),
        }
    }

    /// The same operators viewed as a POVM.
    pub fn as_povm(&self) -> Measurement {
        Measurement { kind: MeasurementKind::Povm(self.elements()), labels: self.labels.clone() }
    }

    /// True for bases and for POVMs whose elements are all rank-1 projectors.
    pub fn is_rank_one_projective(&self, tol: f64) -> bool {
        match &self.kind {
            MeasurementKind::Basis(_) => true,
            MeasurementKind::Povm(e) => e
                .iter()
                .all(|p| max_abs_diff(&(p * p), p) <= tol && (p.trace().re - 1.0).abs() <= tol),
        }
    }
}

/// Squared overlaps `c_xz = |⟨X^x|Z^z⟩|²` of two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    entries: DMatrix<f64>,
}

impl OverlapMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("overlap entries must be finite and nonnegative".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn max(&self) -> f64 {
        self.entries.max()
    }

    pub fn row_max(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.max()).collect()
    }

    pub fn transpose(&self) -> OverlapMatrix {
        Self { entries: self.entries.transpose() }
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.entries.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol)
            && self.entries.column_iter().all(|c| (c.sum() - 1.0).abs() <= tol)
    }
}

fn basis_matrix(m: &Measurement) -> Result<&CMatrix> {
    match m.kind() {
        MeasurementKind::Basis(u) => Ok(u),
        MeasurementKind::Povm(_) => Err(Error::InvalidMeasurement(
            "overlap matrix needs two bases; use povm_overlap_h for POVMs".into(),
        )),
    }
}

pub fn overlap_matrix(x: &Measurement, z: &Measurement) -> Result<OverlapMatrix> {
    let (ux, uz) = (basis_matrix(x)?, basis_matrix(z)?);
    if ux.nrows() != uz.nrows() {
        return Err(Error::Dimension(format!("bases of dimension {} and {}", ux.nrows(), uz.nrows())));
    }
    let g = ux.adjoint() * uz;
    OverlapMatrix::new(g.map(|v| v.norm_sqr()))
}

/// `h(x, z) = ‖√Z^z X^x √Z^z‖`, the largest eigenvalue of the sandwiched operator.
pub fn povm_overlap_h(x: &Measurement, z: &Measurement) -> Result<DMatrix<f64>> {
    if x.dim() != z.dim() {
        return Err(Error::Dimension(format!("POVMs of dimension {} and {}", x.dim(), z.dim())));
    }
    let xs = x.elements();
    let zs = z.sqrt_elements()?;
    Ok(DMatrix::from_fn(xs.len(), zs.len(), |i, j| {
        max_eigenvalue(&(&zs[j] * &xs[i] * &zs[j])).max(0.0)
    }))
}

/// Same table from the conjugate form `‖√X^x Z^z √X^x‖`.
pub fn povm_overlap_h_conjugate(x: &Measurement, z: &Measurement) -> Result<DMatrix<f64>> {
    if x.dim() != z.dim() {
        return Err(Error::Dimension(format!("POVMs of dimension {} and {}", x.dim(), z.dim())));
    }
    let xs = x.sqrt_elements()?;
    let zs = z.elements();
    Ok(DMatrix::from_fn(xs.len(), zs.len(), |i, j| {
        max_eigenvalue(&(&xs[i] * &zs[j] * &xs[i])).max(0.0)
    }))
}

fn require_split(rho_dims: &[usize], a: &Measurement, b: &Measurement) -> Result<()> {
    if rho_dims.len() != 2 || rho_dims[0] != a.dim() || rho_dims[1] != b.dim() {
        return Err(Error::Dimension(format!(
            "state dims {:?} vs measurement dims ({}, {})",
            rho_dims,
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `Tr_B[(1 ⊗ F) ρ]` for an operator `F` on B.
fn contract_b(rho: &CMatrix, da: usize, db: usize, f: &CMatrix) -> CMatrix {
    CMatrix::from_fn(da, da, |a, a2| {
        let mut s = C64::new(0.0, 0.0);
        for b in 0..db {
            for b2 in 0..db {
                s += rho[(a * db + b, a2 * db + b2)] * f[(b2, b)];
            }
        }
        s
    })
}

/// `Tr_A[(E ⊗ 1) ρ]` for an operator `E` on A.
fn contract_a(rho: &CMatrix, da: usize, db: usize, e: &CMatrix) -> CMatrix {
    CMatrix::from_fn(db, db, |b, b2| {
        let mut s = C64::new(0.0, 0.0);
        for a in 0..da {
            for a2 in 0..da {
                s += rho[(a * db + b, a2 * db + b2)] * e[(a2, a)];
            }
        }
        s
    })
}

/// `P(x, y) = Tr[(X^x ⊗ Y^y) ρ_AB]`.
pub fn joint_distribution(rho: &DensityOperator, ma: &Measurement, mb: &Measurement) -> Result<JointDistribution> {
    require_split(rho.dims(), ma, mb)?;
    let (da, db) = (ma.dim(), mb.dim());
    let ea = ma.elements();
    let eb = mb.elements();
    let mut table = DMatrix::zeros(ea.len(), eb.len());
    for (y, f) in eb.iter().enumerate() {
        let m = contract_b(rho.matrix(), da, db, f);
        for (x, e) in ea.iter().enumerate() {
            table[(x, y)] = (e.transpose().component_mul(&m)).sum().re;
        }
    }
    JointDistribution::with_labels(table, ma.labels().to_vec(), mb.labels().to_vec())
}

/// Joint distribution of a pure state, via its amplitude matrix when both sides are bases.
pub fn joint_distribution_pure(
    psi: &PureStateVector,
    ma: &Measurement,
    mb: &Measurement,
) -> Result<JointDistribution> {
    require_split(psi.dims(), ma, mb)?;
    match (ma.kind(), mb.kind()) {
        (MeasurementKind::Basis(ua), MeasurementKind::Basis(ub)) => {
            let amp = ua.adjoint() * psi.amplitude_matrix()? * ub.conjugate();
            JointDistribution::with_labels(amp.map(|z| z.norm_sqr()), ma.labels().to_vec(), mb.labels().to_vec())
        }
        _ => joint_distribution(&DensityOperator::from_pure(psi), ma, mb),
    }
}

/// Distribution of a single measurement on subsystem `k`.
pub fn marginal_distribution(rho: &DensityOperator, m: &Measurement, k: usize) -> Result<Vec<f64>> {
    let r = rho.partial_trace(k)?;
    if r.dim() != m.dim() {
        return Err(Error::Dimension("measurement does not match subsystem".into()));
    }
    Ok(m.elements().iter().map(|e| (e * r.matrix()).trace().re).collect())
}

/// Post-measurement state after measuring `m` on subsystem `k`.
///
/// A basis measurement dephases subsystem `k` in that basis and keeps the dims. A POVM
/// produces `Σ_x |x⟩⟨x| ⊗ √X^x ρ √X^x` with the classical register prepended.
pub fn post_measure_on(rho: &DensityOperator, m: &Measurement, k: usize) -> Result<DensityOperator> {
    let dims = rho.dims().to_vec();
    if k >= dims.len() {
        return Err(Error::Subsystem { index: k, count: dims.len() });
    }
    if dims[k] != m.dim() {
        return Err(Error::Dimension(format!("subsystem {k} has dim {}, measurement {}", dims[k], m.dim())));
    }
    match m.kind() {
        MeasurementKind::Basis(_) => {
            let mut out = CMatrix::zeros(rho.dim(), rho.dim());
            for p in m.elements() {
                let e = embed(&p, &dims, k)?;
                out += &e * rho.matrix() * &e;
            }
            Ok(DensityOperator::from_raw(out, dims))
        }
        MeasurementKind::Povm(_) => {
            let roots = m.sqrt_elements()?;
            let kk = roots.len();
            let d = rho.dim();
            let mut out = CMatrix::zeros(kk * d, kk * d);
            for (x, s) in roots.iter().enumerate() {
                let e = embed(s, &dims, k)?;
                let block = &e * rho.matrix() * &e;
                out.view_mut((x * d, x * d), (d, d)).copy_from(&block);
            }
            let mut nd = vec![kk];
            nd.extend(dims);
            Ok(DensityOperator::from_raw(out, nd))
        }
    }
}

/// Post-measurement state of a measurement on A.
pub fn post_measure(rho: &DensityOperator, z: &Measurement) -> Result<DensityOperator> {
    post_measure_on(rho, z, 0)
}

/// Classical-quantum conditional entropy `H(X_A|B)` of measuring `m` on A.
pub fn cq_conditional(rho: &DensityOperator, m: &Measurement) -> Result<f64> {
    if rho.dims().len() != 2 || rho.dims()[0] != m.dim() {
        return Err(Error::Dimension(format!("state dims {:?}, measurement dim {}", rho.dims(), m.dim())));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let mut h_xb = 0.0;
    for e in m.elements() {
        let sigma = contract_a(rho.matrix(), da, db, &e);
        let vals = hermitian_eigen(&sigma).values;
        let vals: Vec<f64> = vals.into_iter().map(|v| v.max(0.0)).collect();
        h_xb += plogp_sum(&vals);
    }
    Ok(h_xb - von_neumann(&rho.partial_trace(1)?))
}

/// `ρ^Z = V ρ V†` with `V = Σ_x |x⟩|x⟩ ⊗ √Z^x`, on registers `Z ⊗ Z' ⊗ A ⊗ B`.
pub fn isometry_extend(rho: &DensityOperator, z: &Measurement) -> Result<DensityOperator> {
    if rho.dims().len() != 2 || rho.dims()[0] != z.dim() {
        return Err(Error::Dimension(format!("state dims {:?}, measurement dim {}", rho.dims(), z.dim())));
    }
    let roots = z.sqrt_elements()?;
    let kk = roots.len();
    let d = rho.dim();
    let mut v = CMatrix::zeros(kk * kk * d, d);
    for (x, s) in roots.iter().enumerate() {
        let e = embed(s, rho.dims(), 0)?;
        let row = (x * kk + x) * d;
        v.view_mut((row, 0), (d, d)).copy_from(&e);
    }
    let mut dims = vec![kk, kk];
    dims.extend_from_slice(rho.dims());
    Ok(DensityOperator::from_raw(&v * rho.matrix() * v.adjoint(), dims))
}

/// `H(A|ZB)` of the post-measurement state: `Σ_z p(z) H(A|B)` over normalized branches.
pub fn residual_conditional(rho: &DensityOperator, z: &Measurement) -> Result<f64> {
    if rho.dims().len() != 2 || rho.dims()[0] != z.dim() {
        return Err(Error::Dimension(format!("state dims {:?}, measurement dim {}", rho.dims(), z.dim())));
    }
    let mut total = 0.0;
    for s in z.sqrt_elements()? {
        let e = embed(&s, rho.dims(), 0)?;
        let branch = &e * rho.matrix() * &e;
        let p = branch.trace().re;
        if p < MARGINAL_FLOOR {
            continue;
        }
        let state = DensityOperator::from_raw(branch.unscale(p), rho.dims().to_vec());
        total += p * conditional_quantum(&state)?;
    }
    Ok(total)
}

/// Outcome of the quantum-classical (zero-discord) test.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumClassicalReport {
    pub quantum_classical: bool,
    /// `H(A|Z) - H(A|B)` with Z the eigenbasis of ρ_B.
    pub discord_gap: f64,
    /// Largest elementwise change caused by dephasing B.
    pub deviation: f64,
    /// ρ_B has a repeated eigenvalue, so the tested eigenbasis is one representative.
    pub degenerate: bool,
}

/// Checks `ρ_AB = ρ_AZ` with Z the eigenbasis of ρ_B.
pub fn is_quantum_classical(rho: &DensityOperator, tol: f64) -> Result<QuantumClassicalReport> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a bipartite state, got dims {:?}", rho.dims())));
    }
    let rb = rho.partial_trace(1)?;
    let spec = hermitian_eigen(rb.matrix());
    let degenerate = spec.values.windows(2).any(|w| (w[1] - w[0]).abs() <= tol);
    let basis = Measurement::basis(spec.vectors.clone())?;
    let dephased = post_measure_on(rho, &basis, 1)?;
    let deviation = max_abs_diff(dephased.matrix(), rho.matrix());
    let discord_gap = conditional_quantum(&dephased)? - conditional_quantum(rho)?;
    Ok(QuantumClassicalReport { quantum_classical: deviation <= tol, discord_gap, deviation, degenerate })
}

/// Ket `|v⟩` for a column of a basis matrix, as a convenience for tests and examples.
pub fn basis_vector(u: &CMatrix, k: usize) -> CVector {
    u.column(k).into_owned()
}

/// Trivial single-outcome POVM `{1}`.
pub fn trivial_povm(d: usize) -> Measurement {
    Measurement::povm(vec![identity(d)]).expect("identity is a POVM")
}

/// Uniformly coarse-grained POVM `{1/k, ..., 1/k}`.
pub fn uniform_noise_povm(d: usize, k: usize) -> Measurement {
    Measurement::povm(vec![identity(d).scale(1.0 / k as f64); k]).expect("scaled identities form a POVM")
}

#[doc(hidden)]
pub fn hadamard() -> CMatrix {
    let s = 1.0 / 2f64.sqrt();
    CMatrix::from_row_slice(2, 2, &[cr(s), cr(s), cr(s), cr(-s)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::c;
    use approx::assert_abs_diff_eq;

    fn bell_pure() -> PureStateVector {
        let s = 1.0 / 2f64.sqrt();
        PureStateVector::new(CVector::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]), vec![2, 2]).unwrap()
    }

    fn bell() -> DensityOperator {
        DensityOperator::from_pure(&bell_pure())
    }

    fn had() -> Measurement {
        Measurement::basis(hadamard()).unwrap()
    }

    fn assert_table(p: &JointDistribution, expect: &[f64]) {
        let (r, cc) = p.table().shape();
        for i in 0..r {
            for j in 0..cc {
                assert_abs_diff_eq!(p.table()[(i, j)], expect[i * cc + j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let comp = Measurement::computational(2);
        let c0 = overlap_matrix(&comp, &comp).unwrap();
        assert_eq!(c0.entries(), &DMatrix::identity(2, 2));
        let c1 = overlap_matrix(&comp, &had()).unwrap();
        assert!(c1.entries().iter().all(|&v| (v - 0.5).abs() < 1e-15));
        // F_3 with a leading i, as used for the spin-1 single-particle Fourier transform
        let f3 = fourier_matrix(3).map(|z| z * c(0.0, 1.0));
        let c3 = overlap_matrix(&Measurement::computational(3), &Measurement::basis(f3).unwrap()).unwrap();
        assert!(c3.entries().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert!(c3.is_doubly_stochastic(1e-12));
    }

    #[test]
    fn overlap_rejects_povm() {
        let p = trivial_povm(2);
        assert!(matches!(overlap_matrix(&p, &had()), Err(Error::InvalidMeasurement(_))));
    }

    #[test]
    fn h_examples() {
        let comp = Measurement::computational(2);
        let h = povm_overlap_h(&comp.as_povm(), &had().as_povm()).unwrap();
        let cc = overlap_matrix(&comp, &had()).unwrap();
        assert!((h - cc.entries()).abs().max() < 1e-12);

        let h = povm_overlap_h(&trivial_povm(2), &had()).unwrap();
        assert!(h.iter().all(|&v| (v - 1.0).abs() < 1e-12));

        let h = povm_overlap_h(&uniform_noise_povm(2, 2), &comp).unwrap();
        assert!(h.iter().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn povm_validation() {
        assert!(Measurement::povm(vec![identity(2).scale(0.5)]).is_err());
        let mut bad = identity(2);
        bad[(1, 1)] = cr(-0.1);
        let mut comp = identity(2);
        comp[(1, 1)] = cr(1.1);
        comp[(0, 0)] = cr(0.0);
        assert!(Measurement::povm(vec![bad, comp]).is_err());
        assert!(Measurement::basis(CMatrix::from_element(2, 2, cr(1.0))).is_err());
    }

    #[test]
    fn joint_distribution_examples() {
        let comp = Measurement::computational(2);
        let p = joint_distribution(&bell(), &comp, &comp).unwrap();
        assert_table(&p, &[0.5, 0.0, 0.0, 0.5]);
        let p = joint_distribution(&bell(), &had(), &had()).unwrap();
        assert_table(&p, &[0.5, 0.0, 0.0, 0.5]);
        let pp = joint_distribution_pure(&bell_pure(), &had(), &had()).unwrap();
        assert_table(&pp, &[0.5, 0.0, 0.0, 0.5]);

        let ra = DensityOperator::diagonal(&[0.7, 0.3], vec![2]).unwrap();
        let rb = DensityOperator::diagonal(&[0.2, 0.8], vec![2]).unwrap();
        let p = joint_distribution(&ra.tensor(&rb), &comp, &comp).unwrap();
        assert_table(&p, &[0.14, 0.56, 0.06, 0.24]);
    }

    #[test]
    fn joint_distribution_dimension_mismatch() {
        let r = joint_distribution(&bell(), &Measurement::computational(3), &Measurement::computational(2));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn post_measure_examples() {
        let comp = Measurement::computational(2);
        let classical = DensityOperator::diagonal(&[0.5, 0.0, 0.0, 0.5], vec![2, 2]).unwrap();
        let out = post_measure(&classical, &comp).unwrap();
        assert!(max_abs_diff(out.matrix(), classical.matrix()) < 1e-15);

        let out = post_measure(&bell(), &comp).unwrap();
        assert!(max_abs_diff(out.matrix(), classical.matrix()) < 1e-15);

        let plus = DensityOperator::from_raw(CMatrix::from_element(2, 2, cr(0.5)), vec![2]);
        let rb = DensityOperator::diagonal(&[0.2, 0.8], vec![2]).unwrap();
        let out = post_measure(&plus.tensor(&rb), &comp).unwrap();
        let expect = DensityOperator::maximally_mixed(vec![2]).tensor(&rb);
        assert!(max_abs_diff(out.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn post_measure_idempotent_for_bases() {
        let once = post_measure(&bell(), &had()).unwrap();
        let twice = post_measure(&once, &had()).unwrap();
        assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-14);
    }

    #[test]
    fn isometry_extend_examples() {
        let r = isometry_extend(&bell(), &trivial_povm(2)).unwrap();
        assert_eq!(r.dims(), &[1, 1, 2, 2]);
        assert!(max_abs_diff(r.matrix(), bell().matrix()) < 1e-14);

        let ext = isometry_extend(&bell(), &had().as_povm()).unwrap();
        assert_abs_diff_eq!(von_neumann(&ext), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ext.matrix().trace().re, 1.0, epsilon = 1e-12);
        // H(A|ZB) of ρ^Z after discarding Z'
        let zab = ext.reduce(&[0, 2, 3]).unwrap();
        let h = crate::entropy::conditional_entropy(&zab, &[1], &[0, 2]).unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn residual_examples() {
        assert_abs_diff_eq!(residual_conditional(&bell(), &had().as_povm()).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(residual_conditional(&bell(), &trivial_povm(2)).unwrap(), -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            residual_conditional(&bell(), &uniform_noise_povm(2, 2)).unwrap(),
            -1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn quantum_classical_examples() {
        let classical = DensityOperator::diagonal(&[0.5, 0.0, 0.0, 0.5], vec![2, 2]).unwrap();
        let r = is_quantum_classical(&classical, 1e-9).unwrap();
        assert!(r.quantum_classical);
        assert_abs_diff_eq!(r.discord_gap, 0.0, epsilon = 1e-10);

        let r = is_quantum_classical(&bell(), 1e-9).unwrap();
        assert!(!r.quantum_classical);
        assert!(r.degenerate);

        let ra = DensityOperator::diagonal(&[0.7, 0.3], vec![2]).unwrap();
        let rb = DensityOperator::from_raw(
            CMatrix::from_row_slice(2, 2, &[cr(0.6), c(0.1, 0.2), c(0.1, -0.2), cr(0.4)]),
            vec![2],
        );
        let r = is_quantum_classical(&ra.tensor(&rb), 1e-9).unwrap();
        assert!(r.quantum_classical);
        assert!(!r.degenerate);
    }
}
