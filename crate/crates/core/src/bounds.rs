//! Complementarity factors and the entanglement lower bounds built from them.
//!
//! Every bound reads `q - H(X_A|X'_B) - H(Z_A|Z'_B)` (minus a residual term for the
//! POVM relations) and lower-bounds `-H(A|B)`.

use std::fmt;

use nalgebra::DMatrix;

use crate::entropy::{
    clean_probabilities, conditional_classical, conditional_quantum, plogp_sum, shannon, JointDistribution,
    MARGINAL_FLOOR,
};
use crate::error::{Error, Result};
use crate::measurement::{
    joint_distribution, overlap_matrix, povm_overlap_h, residual_conditional, Measurement, OverlapMatrix,
};
use crate::qmath::{
    hermitize, identity, max_abs_diff, max_eigenvalue, tensor_product, CMatrix, DensityOperator, PureStateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// State-independent overlap factor for two bases.
    MaassenUffink,
    /// Trace-overlap factor for two POVMs.
    FrankLieb,
    /// Summed-norm factor for two POVMs, with a residual term.
    Tomamichel,
    /// Marginal-dependent factor for two bases.
    Marginal,
    /// Fully state-dependent factor for two bases.
    FullyStateDependent,
    /// Fully state-dependent factor for two POVMs, with a residual term.
    FullyStateDependentPovm,
    /// Sector-wise overlap factor weighted by the local particle-number distribution.
    ParticleNumber,
}

impl RelationKind {
    pub const ALL: [RelationKind; 7] = [
        RelationKind::MaassenUffink,
        RelationKind::FrankLieb,
        RelationKind::Tomamichel,
        RelationKind::Marginal,
        RelationKind::FullyStateDependent,
        RelationKind::FullyStateDependentPovm,
        RelationKind::ParticleNumber,
    ];

    /// Whether the bound subtracts a residual conditional entropy of a post-measurement state.
    pub fn uses_residual(self) -> bool {
        matches!(self, RelationKind::Tomamichel | RelationKind::FullyStateDependentPovm)
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::MaassenUffink => "mu",
            RelationKind::FrankLieb => "fl",
            RelationKind::Tomamichel => "ct",
            RelationKind::Marginal => "c",
            RelationKind::FullyStateDependent => "fsd",
            RelationKind::FullyStateDependentPovm => "fsdp",
            RelationKind::ParticleNumber => "pn",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which measurement plays the role of `X` in an asymmetric factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    XZ,
    ZX,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::XZ => "xz",
            Orientation::ZX => "zx",
        })
    }
}

/// Bounds at or below this value do not certify entanglement.
pub const CERTIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: RelationKind,
    pub q: f64,
    /// `H(X_A|X'_B)`.
    pub h_x: f64,
    /// `H(Z_A|Z'_B)`.
    pub h_z: f64,
    pub residual: Option<f64>,
    /// Lower bound on `-H(A|B)`.
    pub bound: f64,
    /// Exact `-H(A|B)` of the state, when known.
    pub exact: Option<f64>,
    /// `-H(A|B)` of the sector-projected state, when conservation data is known.
    pub configurational: Option<f64>,
    /// Winning orientation for asymmetric factors.
    pub orientation: Option<Orientation>,
}

impl BoundReport {
    /// The bound recomputed from the stored terms.
    pub fn recomputed(&self) -> f64 {
        self.q - self.h_x - self.h_z - self.residual.unwrap_or(0.0)
    }

    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_configurational(mut self, value: f64) -> Self {
        self.configurational = Some(value);
        self
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = Some(o);
        self
    }

    /// True when the bound certifies entanglement, i.e. exceeds rounding noise.
    pub fn certifies(&self) -> bool {
        self.bound > CERTIFY_TOL
    }
}

pub fn assemble_bound(kind: RelationKind, q: f64, h_x: f64, h_z: f64, residual: Option<f64>) -> Result<BoundReport> {
    if residual.is_some() != kind.uses_residual() {
        return Err(Error::InvalidParameter(format!(
            "relation {kind} {} a residual term",
            if kind.uses_residual() { "requires" } else { "does not take" }
        )));
    }
    if ![q, h_x, h_z, residual.unwrap_or(0.0)].iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("non-finite bound term".into()));
    }
    let bound = q - h_x - h_z - residual.unwrap_or(0.0);
    Ok(BoundReport {
        kind,
        q,
        h_x,
        h_z,
        residual,
        bound,
        exact: None,
        configurational: None,
        orientation: None,
    })
}

/// `-log2 max_{x,z} c_xz`.
pub fn q_mu(c: &OverlapMatrix) -> f64 {
    -c.max().log2()
}

fn same_dim(x: &Measurement, z: &Measurement) -> Result<()> {
    if x.dim() != z.dim() {
        return Err(Error::Dimension(format!("measurements of dimension {} and {}", x.dim(), z.dim())));
    }
    Ok(())
}

/// `-log2 max_{x,z} Tr(X^x Z^z)`.
pub fn q_fl(x: &Measurement, z: &Measurement) -> Result<f64> {
    same_dim(x, z)?;
    let zs = z.elements();
    let mut best = f64::NEG_INFINITY;
    for xe in x.elements() {
        for ze in &zs {
            best = best.max((&xe * ze).trace().re);
        }
    }
    Ok(-best.log2())
}

/// `-log2 max_x ‖Σ_z Z^z X^x Z^z‖`.
///
/// `Z` sandwiches `X`: with the roles the other way round the sum collapses to `X²` for any
/// basis pair and the factor would exceed `max_{x,z} ‖√X √Z‖²`, the bound it must satisfy.
pub fn q_ct(x: &Measurement, z: &Measurement) -> Result<f64> {
    same_dim(x, z)?;
    let zs = z.elements();
    let mut best = f64::NEG_INFINITY;
    for xe in x.elements() {
        let mut sum = CMatrix::zeros(x.dim(), x.dim());
        for ze in &zs {
            sum += ze * &xe * ze;
        }
        best = best.max(max_eigenvalue(&hermitize(&sum)));
    }
    Ok(-best.log2())
}

/// `-Σ_x P_X(x) log2 max_z c_xz`.
pub fn q_c(c: &OverlapMatrix, p_x: &[f64]) -> Result<f64> {
    if p_x.len() != c.entries().nrows() {
        return Err(Error::Dimension(format!("{} marginal entries for {} rows", p_x.len(), c.entries().nrows())));
    }
    let p = clean_probabilities(p_x)?;
    Ok(c.row_max()
        .iter()
        .zip(&p)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&m, &w)| -w * m.log2())
        .sum())
}

/// Larger of `q_c` with `(c, P_X)` and with `(cᵀ, P_Z)`.
pub fn q_c_best(c: &OverlapMatrix, p_x: &[f64], p_z: &[f64]) -> Result<(f64, Orientation)> {
    let xz = q_c(c, p_x)?;
    let zx = q_c(&c.transpose(), p_z)?;
    Ok(if zx > xz { (zx, Orientation::ZX) } else { (xz, Orientation::XZ) })
}

/// `-Σ_{x,y} P_XY(x,y) log2 Σ_z k_xz P_ZY(z|y)` on possibly unnormalized tables.
///
/// Columns of `p_zy` are conditioned on their own sums, so a block of a larger table may be
/// passed as long as each column carries its full Y-marginal. Columns with marginal below
/// the floor are skipped.
pub fn fsd_kernel(k: &DMatrix<f64>, p_xy: &DMatrix<f64>, p_zy: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    let mut inner = vec![0.0; k.nrows()];
    for y in 0..p_xy.ncols() {
        let col = p_zy.column(y);
        let py: f64 = col.sum();
        if py < MARGINAL_FLOOR {
            continue;
        }
        for (x, slot) in inner.iter_mut().enumerate() {
            let mut s = 0.0;
            for z in 0..k.ncols() {
                s += k[(x, z)] * col[z];
            }
            *slot = (s / py).max(f64::MIN_POSITIVE);
        }
        for (x, &w) in p_xy.column(y).iter().enumerate() {
            if w > 0.0 {
                total -= w * inner[x].log2();
            }
        }
    }
    total
}

fn check_fsd_shapes(k: &DMatrix<f64>, p_xy: &JointDistribution, p_zy: &JointDistribution) -> Result<()> {
    let (kx, kz) = k.shape();
    let (xr, xc) = p_xy.table().shape();
    let (zr, zc) = p_zy.table().shape();
    if kx != xr || kz != zr || xc != zc {
        return Err(Error::Dimension(format!(
            "overlap {kx}x{kz}, P_XY {xr}x{xc}, P_ZY {zr}x{zc}"
        )));
    }
    Ok(())
}

/// Fully state-dependent factor for two bases, conditioned on a measurement of B.
pub fn q_fsd(c: &OverlapMatrix, p_xy: &JointDistribution, p_zy: &JointDistribution) -> Result<f64> {
    check_fsd_shapes(c.entries(), p_xy, p_zy)?;
    Ok(fsd_kernel(c.entries(), p_xy.table(), p_zy.table()))
}

/// Fully state-dependent factor for two POVMs, using the sandwiched overlap table `h`.
pub fn q_fsdp(h: &DMatrix<f64>, p_xy: &JointDistribution, p_zy: &JointDistribution) -> Result<f64> {
    check_fsd_shapes(h, p_xy, p_zy)?;
    Ok(fsd_kernel(h, p_xy.table(), p_zy.table()))
}

/// `-Σ_n P_N(n) log2 max_{jk} |R^(n)_jk|²`.
pub fn q_pn(sector_maxima: &[f64], p_n: &[f64]) -> Result<f64> {
    if sector_maxima.len() != p_n.len() {
        return Err(Error::Dimension(format!("{} sectors, {} weights", sector_maxima.len(), p_n.len())));
    }
    let p = clean_probabilities(p_n)?;
    Ok(sector_maxima
        .iter()
        .zip(&p)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&m, &w)| -w * m.log2())
        .sum())
}

/// The four joint distributions of a basis-pair experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistributions {
    pub xx: JointDistribution,
    pub zz: JointDistribution,
    /// `Z_A` with `X'_B`.
    pub zx: JointDistribution,
    /// `X_A` with `Z'_B`.
    pub xz: JointDistribution,
}

impl PairDistributions {
    pub fn measure(
        rho: &DensityOperator,
        xa: &Measurement,
        za: &Measurement,
        xb: &Measurement,
        zb: &Measurement,
    ) -> Result<Self> {
        Ok(Self {
            xx: joint_distribution(rho, xa, xb)?,
            zz: joint_distribution(rho, za, zb)?,
            zx: joint_distribution(rho, za, xb)?,
            xz: joint_distribution(rho, xa, zb)?,
        })
    }
}

/// Larger `q_fsd` over both orientations: `(c, P_XX', P_ZX')` and `(cᵀ, P_ZZ', P_XZ')`.
pub fn q_fsd_best(c: &OverlapMatrix, d: &PairDistributions) -> Result<(f64, Orientation)> {
    let xz = q_fsd(c, &d.xx, &d.zx)?;
    let zx = q_fsd(&c.transpose(), &d.zz, &d.xz)?;
    Ok(if zx > xz { (zx, Orientation::ZX) } else { (xz, Orientation::XZ) })
}

/// Maassen–Uffink, marginal and fully state-dependent reports from measured data.
pub fn basis_reports(c: &OverlapMatrix, d: &PairDistributions) -> Result<Vec<BoundReport>> {
    let h_x = conditional_classical(&d.xx);
    let h_z = conditional_classical(&d.zz);
    let mu = assemble_bound(RelationKind::MaassenUffink, q_mu(c), h_x, h_z, None)?;
    let (qc, oc) = q_c_best(c, &d.xx.marginal_x(), &d.zz.marginal_x())?;
    let marginal = assemble_bound(RelationKind::Marginal, qc, h_x, h_z, None)?.with_orientation(oc);
    let (qf, of) = q_fsd_best(c, d)?;
    let fsd = assemble_bound(RelationKind::FullyStateDependent, qf, h_x, h_z, None)?.with_orientation(of);
    Ok(vec![mu, marginal, fsd])
}

/// Basis-pair reports for a known state, with the exact `-H(A|B)` attached.
pub fn evaluate_bases(
    rho: &DensityOperator,
    xa: &Measurement,
    za: &Measurement,
    xb: &Measurement,
    zb: &Measurement,
) -> Result<Vec<BoundReport>> {
    let c = overlap_matrix(xa, za)?;
    let d = PairDistributions::measure(rho, xa, za, xb, zb)?;
    let exact = -conditional_quantum(rho)?;
    Ok(basis_reports(&c, &d)?.into_iter().map(|r| r.with_exact(exact)).collect())
}

/// Frank–Lieb, summed-norm and POVM fully state-dependent reports for a known state.
pub fn evaluate_povms(
    rho: &DensityOperator,
    xa: &Measurement,
    za: &Measurement,
    xb: &Measurement,
    zb: &Measurement,
) -> Result<Vec<BoundReport>> {
    let d = PairDistributions::measure(rho, xa, za, xb, zb)?;
    let exact = -conditional_quantum(rho)?;
    let h_x = conditional_classical(&d.xx);
    let h_z = conditional_classical(&d.zz);
    let fl = assemble_bound(RelationKind::FrankLieb, q_fl(xa, za)?, h_x, h_z, None)?;

    let res_z = residual_conditional(rho, za)?;
    let res_x = residual_conditional(rho, xa)?;
    let ct_xz = assemble_bound(RelationKind::Tomamichel, q_ct(xa, za)?, h_x, h_z, Some(res_x))?
        .with_orientation(Orientation::XZ);
    let ct_zx = assemble_bound(RelationKind::Tomamichel, q_ct(za, xa)?, h_x, h_z, Some(res_z))?
        .with_orientation(Orientation::ZX);

    let fsdp_xz = assemble_bound(
        RelationKind::FullyStateDependentPovm,
        q_fsdp(&povm_overlap_h(xa, za)?, &d.xx, &d.zx)?,
        h_x,
        h_z,
        Some(res_z),
    )?
    .with_orientation(Orientation::XZ);
    let fsdp_zx = assemble_bound(
        RelationKind::FullyStateDependentPovm,
        q_fsdp(&povm_overlap_h(za, xa)?, &d.zz, &d.xz)?,
        h_x,
        h_z,
        Some(res_x),
    )?
    .with_orientation(Orientation::ZX);

    let pick = |a: BoundReport, b: BoundReport| if b.bound > a.bound { b } else { a };
    Ok(vec![fl, pick(ct_xz, ct_zx), pick(fsdp_xz, fsdp_zx)]
        .into_iter()
        .map(|r| r.with_exact(exact))
        .collect())
}

/// `H(A|B) - H(A|ZB)_{ρ^Z}`, nonnegative for separable states.
pub fn witness_povm(rho: &DensityOperator, z: &Measurement) -> Result<f64> {
    Ok(conditional_quantum(rho)? - residual_conditional(rho, z)?)
}

const PROJECTOR_TOL: f64 = 1e-9;

/// One eigenspace `Π_A ⊗ Π_B` of a local conserved quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub label: (i64, i64),
    pub pa: CMatrix,
    pub pb: CMatrix,
}

impl Sector {
    pub fn projector(&self) -> CMatrix {
        tensor_product(&self.pa, &self.pb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedQuantity {
    sectors: Vec<Sector>,
    dims: [usize; 2],
}

fn check_projector(p: &CMatrix, what: &str) -> Result<()> {
    if max_abs_diff(p, &p.adjoint()) > PROJECTOR_TOL || max_abs_diff(&(p * p), p) > PROJECTOR_TOL {
        return Err(Error::InvalidParameter(format!("{what} is not an orthogonal projector")));
    }
    Ok(())
}

impl ConservedQuantity {
    pub fn new(sectors: Vec<Sector>) -> Result<Self> {
        let first = sectors.first().ok_or_else(|| Error::InvalidParameter("no sectors".into()))?;
        let dims = [first.pa.nrows(), first.pb.nrows()];
        let d = dims[0] * dims[1];
        let mut total = CMatrix::zeros(d, d);
        let mut full = Vec::with_capacity(sectors.len());
        for s in &sectors {
            if s.pa.nrows() != dims[0] || s.pb.nrows() != dims[1] {
                return Err(Error::Dimension(format!("sector {:?} has mismatched dims", s.label)));
            }
            check_projector(&s.pa, "A projector")?;
            check_projector(&s.pb, "B projector")?;
            let p = s.projector();
            for q in &full {
                if crate::qmath::max_abs(&(&p * q)) > PROJECTOR_TOL {
                    return Err(Error::InvalidParameter(format!("sector {:?} overlaps another", s.label)));
                }
            }
            total += &p;
            full.push(p);
        }
        if max_abs_diff(&total, &identity(d)) > PROJECTOR_TOL {
            return Err(Error::InvalidParameter("sector projectors do not sum to identity".into()));
        }
        Ok(Self { sectors, dims })
    }

    /// All eigenspace pairs of diagonal local quantities given by their eigenvalue lists.
    pub fn from_diagonal(na: &[i64], nb: &[i64]) -> Result<Self> {
        let values = |v: &[i64]| {
            let mut u = v.to_vec();
            u.sort_unstable();
            u.dedup();
            u
        };
        let proj = |v: &[i64], n: i64| {
            CMatrix::from_fn(v.len(), v.len(), |i, j| {
                if i == j && v[i] == n {
                    crate::qmath::cr(1.0)
                } else {
                    crate::qmath::cr(0.0)
                }
            })
        };
        let mut sectors = Vec::new();
        for &a in &values(na) {
            for &b in &values(nb) {
                sectors.push(Sector { label: (a, b), pa: proj(na, a), pb: proj(nb, b) });
            }
        }
        Self::new(sectors)
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// Whether an operator on A (`side = 0`) or B (`side = 1`) commutes with every local projector.
    pub fn commutes_locally(&self, op: &CMatrix, side: usize, tol: f64) -> bool {
        self.sectors.iter().all(|s| {
            let p = if side == 0 { &s.pa } else { &s.pb };
            max_abs_diff(&(p * op), &(op * p)) <= tol
        })
    }
}

fn check_conserved_dims(rho_dims: &[usize], n: &ConservedQuantity) -> Result<()> {
    if rho_dims != n.dims() {
        return Err(Error::Dimension(format!("state dims {:?}, conserved quantity dims {:?}", rho_dims, n.dims())));
    }
    Ok(())
}

/// `ρ̄ = Σ_n Π^(n) ρ Π^(n)`.
pub fn project_conserved(rho: &DensityOperator, n: &ConservedQuantity) -> Result<DensityOperator> {
    check_conserved_dims(rho.dims(), n)?;
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for s in n.sectors() {
        let p = s.projector();
        out += &p * rho.matrix() * &p;
    }
    Ok(DensityOperator::from_raw(hermitize(&out), rho.dims().to_vec()))
}

/// Split of the entanglement of a pure state into number and configurational parts.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDecomposition {
    pub labels: Vec<(i64, i64)>,
    pub weights: Vec<f64>,
    /// `H({p(n)})`.
    pub number_part: f64,
    /// `-H(A|B)` of the sector-projected state.
    pub configurational: f64,
    /// `-H(A|B) = H(B)` of the pure state.
    pub total: f64,
}

pub fn number_decomposition(psi: &PureStateVector, n: &ConservedQuantity) -> Result<NumberDecomposition> {
    check_conserved_dims(psi.dims(), n)?;
    let rho = DensityOperator::from_pure(psi);
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for s in n.sectors() {
        let v = s.projector() * psi.amplitudes();
        let w = v.norm_squared();
        labels.push(s.label);
        weights.push(w);
    }
    let number_part = plogp_sum(&weights);
    let bar = project_conserved(&rho, n)?;
    let configurational = -conditional_quantum(&bar)?;
    let total = -conditional_quantum(&rho)?;
    Ok(NumberDecomposition { labels, weights, number_part, configurational, total })
}

/// Shannon entropy of sector weights, validated as a distribution.
pub fn sector_entropy(weights: &[f64]) -> Result<f64> {
    shannon(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{hadamard, trivial_povm, uniform_noise_povm};
    use crate::qmath::{cr, fourier_matrix, CVector};
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityOperator {
        let s = 1.0 / 2f64.sqrt();
        let psi = PureStateVector::new(CVector::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]), vec![2, 2]).unwrap();
        DensityOperator::from_pure(&psi)
    }

    fn comp(d: usize) -> Measurement {
        Measurement::computational(d)
    }

    fn had() -> Measurement {
        Measurement::basis(hadamard()).unwrap()
    }

    fn overlap(rows: &[f64], n: usize) -> OverlapMatrix {
        OverlapMatrix::new(DMatrix::from_row_slice(rows.len() / n, n, rows)).unwrap()
    }

    #[test]
    fn q_mu_examples() {
        assert_eq!(q_mu(&overlap_matrix(&comp(3), &comp(3)).unwrap()), 0.0);
        for d in [2usize, 3, 5] {
            let c = overlap_matrix(&comp(d), &Measurement::fourier(d)).unwrap();
            assert_abs_diff_eq!(q_mu(&c), (d as f64).log2(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(q_mu(&overlap_matrix(&comp(2), &had()).unwrap()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn q_fl_examples() {
        assert_abs_diff_eq!(q_fl(&comp(2), &had()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_fl(&trivial_povm(2), &trivial_povm(2)).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_fl(&comp(3), &comp(3)).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn q_ct_examples() {
        assert_abs_diff_eq!(q_ct(&comp(2), &had()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_ct(&comp(2), &comp(2)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_ct(&had(), &comp(2)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_ct(&comp(3), &Measurement::fourier(3)).unwrap(), 3f64.log2(), epsilon = 1e-12);
        // a trivial second measurement carries no complementarity
        assert_abs_diff_eq!(q_ct(&comp(2), &trivial_povm(2)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_ct(&comp(2), &uniform_noise_povm(2, 4)).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn q_c_examples() {
        let c = overlap_matrix(&comp(3), &Measurement::fourier(3)).unwrap();
        assert_abs_diff_eq!(q_c(&c, &[0.7, 0.2, 0.1]).unwrap(), 3f64.log2(), epsilon = 1e-12);
        let c = overlap(&[0.5, 0.5, 1.0, 0.0], 2);
        assert_abs_diff_eq!(q_c(&c, &[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q_c(&c, &[0.5, 0.5]).unwrap(), 0.5, epsilon = 1e-12);
        assert!(q_c(&c, &[0.5, 0.6]).is_err());
    }

    #[test]
    fn q_fsd_examples() {
        let c = overlap_matrix(&comp(3), &Measurement::fourier(3)).unwrap();
        let pxy = JointDistribution::new(DMatrix::from_row_slice(3, 2, &[0.3, 0.1, 0.0, 0.2, 0.25, 0.15])).unwrap();
        let pzy = JointDistribution::new(DMatrix::from_row_slice(3, 2, &[0.05, 0.2, 0.4, 0.05, 0.1, 0.2])).unwrap();
        assert_abs_diff_eq!(q_fsd(&c, &pxy, &pzy).unwrap(), 3f64.log2(), epsilon = 1e-12);

        let id = overlap_matrix(&comp(2), &comp(2)).unwrap();
        let diag = JointDistribution::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert_abs_diff_eq!(q_fsd(&id, &diag, &diag).unwrap(), 0.0, epsilon = 1e-12);
        let p = JointDistribution::new(DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.4])).unwrap();
        // c = I gives -Σ P log P(x|y) = H(X|Y)
        assert_abs_diff_eq!(q_fsd(&id, &p, &p).unwrap(), conditional_classical(&p), epsilon = 1e-12);

        let b = bell();
        let pxy = joint_distribution(&b, &comp(2), &comp(2)).unwrap();
        let pzy = joint_distribution(&b, &had(), &comp(2)).unwrap();
        let c = overlap_matrix(&comp(2), &had()).unwrap();
        assert_abs_diff_eq!(q_fsd(&c, &pxy, &pzy).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn q_fsd_drops_empty_columns() {
        let c = overlap(&[0.5, 0.5, 0.5, 0.5], 2);
        let pxy = JointDistribution::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.5, 0.0])).unwrap();
        let v = q_fsd(&c, &pxy, &pxy).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn q_fsdp_examples() {
        let b = bell();
        let pxy = joint_distribution(&b, &comp(2), &comp(2)).unwrap();
        let pzy = joint_distribution(&b, &had(), &comp(2)).unwrap();
        let h = povm_overlap_h(&comp(2), &had()).unwrap();
        let c = overlap_matrix(&comp(2), &had()).unwrap();
        assert_abs_diff_eq!(
            q_fsdp(&h, &pxy, &pzy).unwrap(),
            q_fsd(&c, &pxy, &pzy).unwrap(),
            epsilon = 1e-12
        );

        let pzy1 = joint_distribution(&b, &trivial_povm(2), &comp(2)).unwrap();
        let h = povm_overlap_h(&comp(2), &trivial_povm(2)).unwrap();
        assert_abs_diff_eq!(q_fsdp(&h, &pxy, &pzy1).unwrap(), 0.0, epsilon = 1e-12);

        let noise = uniform_noise_povm(2, 2);
        let pxy = joint_distribution(&b, &noise, &comp(2)).unwrap();
        let h = povm_overlap_h(&noise, &comp(2)).unwrap();
        let pzy = joint_distribution(&b, &comp(2), &comp(2)).unwrap();
        assert_abs_diff_eq!(q_fsdp(&h, &pxy, &pzy).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn q_pn_examples() {
        let third = 1.0 / 3.0;
        assert_eq!(q_pn(&[1.0, third], &[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(q_pn(&[1.0, third], &[0.0, 1.0]).unwrap(), 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(q_pn(&[1.0, third], &[0.5, 0.5]).unwrap(), 0.5 * 3f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn assemble_examples() {
        let r = assemble_bound(RelationKind::MaassenUffink, 1.0, 0.0, 0.0, None).unwrap().with_exact(1.0);
        assert_eq!(r.bound, 1.0);
        assert_eq!(r.exact, Some(1.0));
        let r = assemble_bound(RelationKind::MaassenUffink, 0.0, 0.3, 0.2, None).unwrap();
        assert!(r.bound <= 0.0);
        assert!(assemble_bound(RelationKind::FullyStateDependentPovm, 1.0, 0.0, 0.0, None).is_err());
        assert!(assemble_bound(RelationKind::FullyStateDependent, 1.0, 0.0, 0.0, Some(0.0)).is_err());
        let r = assemble_bound(RelationKind::FullyStateDependentPovm, 1.0, 0.25, 0.25, Some(-0.5)).unwrap();
        assert_abs_diff_eq!(r.bound, r.recomputed(), epsilon = 1e-15);
    }

    #[test]
    fn bell_reports_are_tight() {
        let reports = evaluate_bases(&bell(), &comp(2), &had(), &comp(2), &had()).unwrap();
        for r in &reports {
            assert_abs_diff_eq!(r.bound, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.exact.unwrap(), 1.0, epsilon = 1e-12);
        }
        let povm = evaluate_povms(&bell(), &comp(2).as_povm(), &had().as_povm(), &comp(2), &had()).unwrap();
        assert_abs_diff_eq!(povm[0].bound, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(povm[2].bound, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn witness_examples() {
        let ra = DensityOperator::diagonal(&[0.7, 0.3], vec![2]).unwrap();
        let rb = DensityOperator::diagonal(&[0.2, 0.8], vec![2]).unwrap();
        let prod = ra.tensor(&rb);
        assert!(witness_povm(&prod, &uniform_noise_povm(2, 3)).unwrap() >= -1e-12);
        let b = bell();
        assert_abs_diff_eq!(
            witness_povm(&b, &had().as_povm()).unwrap(),
            conditional_quantum(&b).unwrap(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(witness_povm(&b, &uniform_noise_povm(2, 2)).unwrap(), 0.0, epsilon = 1e-10);
    }

    fn one_particle_split() -> (PureStateVector, ConservedQuantity) {
        // A and B each hold 0 or 1 particle; the particle sits in either half
        let s = 1.0 / 2f64.sqrt();
        let psi = PureStateVector::new(CVector::from_vec(vec![cr(0.0), cr(s), cr(s), cr(0.0)]), vec![2, 2]).unwrap();
        (psi, ConservedQuantity::from_diagonal(&[0, 1], &[0, 1]).unwrap())
    }

    #[test]
    fn project_conserved_examples() {
        let (psi, n) = one_particle_split();
        let rho = DensityOperator::from_pure(&psi);
        let bar = project_conserved(&rho, &n).unwrap();
        let expect = DensityOperator::diagonal(&[0.0, 0.5, 0.5, 0.0], vec![2, 2]).unwrap();
        assert!(max_abs_diff(bar.matrix(), expect.matrix()) < 1e-15);
        let again = project_conserved(&bar, &n).unwrap();
        assert!(max_abs_diff(bar.matrix(), again.matrix()) < 1e-15);
        assert_abs_diff_eq!(bar.matrix().trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn number_decomposition_examples() {
        let (psi, n) = one_particle_split();
        let dec = number_decomposition(&psi, &n).unwrap();
        assert_abs_diff_eq!(dec.number_part, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.configurational, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.total, dec.number_part + dec.configurational, epsilon = 1e-12);

        let single = PureStateVector::basis(&[1, 0], vec![2, 2]).unwrap();
        let dec = number_decomposition(&single, &n).unwrap();
        assert_abs_diff_eq!(dec.number_part, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.configurational, dec.total, epsilon = 1e-12);
    }

    #[test]
    fn conserved_validation() {
        let p = identity(2);
        let bad = Sector { label: (0, 0), pa: p.clone(), pb: p.scale(0.5) };
        assert!(ConservedQuantity::new(vec![bad]).is_err());
        let f = fourier_matrix(2);
        let n = ConservedQuantity::from_diagonal(&[0, 1], &[0, 1]).unwrap();
        assert!(!n.commutes_locally(&f, 0, 1e-12));
        assert!(n.commutes_locally(&identity(2), 1, 1e-12));
    }
}
