//! Randomized audits of the uncertainty relations.
//!
//! Every trial draws a fresh instance from `seed + trial` and records the slack
//! `LHS - RHS` in bits. A trial with slack below `-SLACK_TOL` is a violation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::random::{
    rng_for, sample_basis, sample_bipartite, sample_block_unitary, sample_povm, sample_povm_pinched,
    sample_pure, sample_separable, sample_unitary,
};
use crate::bounds::{
    q_c_best, q_ct, q_fl, q_fsd, q_fsd_best, q_fsdp, q_mu, witness_povm, ConservedQuantity, PairDistributions,
};
use crate::entropy::{conditional_classical, conditional_quantum, relative_classical, von_neumann, Divergence};
use crate::error::{Error, Result};
use crate::measurement::{
    cq_conditional, joint_distribution, joint_distribution_pure, marginal_distribution, overlap_matrix,
    povm_overlap_h, residual_conditional, Measurement,
};
use crate::qmath::{max_eigenvalue, purify, schmidt, tensor_product, CMatrix, DensityOperator, PureStateVector};

pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuditRelation {
    /// `H(X) + H(Z) ≥ q_MU + H(ρ)` on A alone.
    MaassenUffink,
    /// `H(X|B) + H(Z|B) ≥ q_MU + H(A|B)`.
    Berta,
    /// `H(X|B) + H(Z|B) ≥ q_FL + H(A|B)` for POVMs.
    FrankLieb,
    /// `H(X|B) + H(Z|B) ≥ q_CT + H(A|B) - H(A|XB)` for POVMs.
    Tomamichel,
    /// `H(X|Y) + H(Z|B) ≥ H(A|B) + q_FSD` with a POVM `Y` on B.
    FullyStateDependent,
    /// `H(X|Y) + H(Z|C) ≥ q_FSDP` with `C` purifying `AB`.
    Tripartite,
    /// `H(X|Y) + H(Z|B) ≥ H(A|B) - H(A|ZB) + q_FSDP`.
    FullyStateDependentPovm,
    /// `H(A|B) - H(A|ZB) ≥ 0` for separable states.
    Witness,
    /// Measured relations for the sector-projected state under number-conserving measurements;
    /// the slack is the smaller of the POVM and the basis variant.
    Conserved,
    /// `‖Σ_z Z X Z‖ ≤ max_z ‖√Z X √Z‖` for every POVM element `X`.
    OverlapNorm,
    /// `q_MU ≤ q_C ≤ q_FSD` for basis pairs.
    Ordering,
    /// Schmidt-basis identity: `q_FSD - H(X|Y) - H(Z|Z') = D(P_XY ‖ P_XY of the dephased state)`.
    /// The slack is `-|LHS - RHS|`.
    Schmidt,
}

impl AuditRelation {
    pub const ALL: [AuditRelation; 12] = [
        AuditRelation::MaassenUffink,
        AuditRelation::Berta,
        AuditRelation::FrankLieb,
        AuditRelation::Tomamichel,
        AuditRelation::FullyStateDependent,
        AuditRelation::Tripartite,
        AuditRelation::FullyStateDependentPovm,
        AuditRelation::Witness,
        AuditRelation::Conserved,
        AuditRelation::OverlapNorm,
        AuditRelation::Ordering,
        AuditRelation::Schmidt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditRelation::MaassenUffink => "mu",
            AuditRelation::Berta => "berta",
            AuditRelation::FrankLieb => "fl",
            AuditRelation::Tomamichel => "ct",
            AuditRelation::FullyStateDependent => "fsd",
            AuditRelation::Tripartite => "tri",
            AuditRelation::FullyStateDependentPovm => "fsdp",
            AuditRelation::Witness => "witness",
            AuditRelation::Conserved => "conserved",
            AuditRelation::OverlapNorm => "overlap-norm",
            AuditRelation::Ordering => "ordering",
            AuditRelation::Schmidt => "schmidt",
        }
    }

    /// Whether the relation needs `d_A = d_B`.
    pub fn needs_equal_dims(self) -> bool {
        matches!(self, AuditRelation::Schmidt)
    }
}

impl fmt::Display for AuditRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AuditRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuditRelation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown relation {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub relation: AuditRelation,
    pub dims: [usize; 2],
    pub trials: usize,
    pub min_slack: f64,
    /// Seed of the trial with the smallest slack.
    pub argmin_seed: u64,
    pub violations: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Runs `trials` independent instances of `relation` on `d_A ⊗ d_B`.
pub fn audit_relation(relation: AuditRelation, dims: [usize; 2], trials: usize, seed: u64) -> Result<AuditReport> {
    let [da, db] = dims;
    if da == 0 || db == 0 || da > 4 || db > 4 {
        return Err(Error::InvalidParameter(format!("audit dims {dims:?} outside 1..=4")));
    }
    if relation.needs_equal_dims() && da != db {
        return Err(Error::InvalidParameter(format!("{relation} needs equal dims, got {dims:?}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial".into()));
    }
    let slacks: Vec<Result<(u64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            trial_slack(relation, da, db, s).map(|v| (s, v))
        })
        .collect();
    let mut min_slack = f64::INFINITY;
    let mut argmin_seed = seed;
    let mut violations = 0;
    for r in slacks {
        let (s, v) = r?;
        if v.is_nan() {
            return Err(Error::Numerical(format!("{relation} slack is NaN at seed {s}")));
        }
        if v < -SLACK_TOL {
            violations += 1;
        }
        if v < min_slack {
            min_slack = v;
            argmin_seed = s;
        }
    }
    Ok(AuditReport { relation, dims, trials, min_slack, argmin_seed, violations })
}

/// Slack of a single instance drawn from `seed`.
pub fn trial_slack(relation: AuditRelation, da: usize, db: usize, seed: u64) -> Result<f64> {
    let mut rng = rng_for(seed);
    let rng = &mut rng;
    match relation {
        AuditRelation::MaassenUffink => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (sample_basis(da, rng), sample_basis(da, rng));
            let c = overlap_matrix(&x, &z)?;
            let hx = crate::entropy::shannon(&marginal_distribution(&rho, &x, 0)?)?;
            let hz = crate::entropy::shannon(&marginal_distribution(&rho, &z, 0)?)?;
            Ok(hx + hz - q_mu(&c) - von_neumann(&rho.partial_trace(0)?))
        }
        AuditRelation::Berta => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (sample_basis(da, rng), sample_basis(da, rng));
            let c = overlap_matrix(&x, &z)?;
            Ok(cq_conditional(&rho, &x)? + cq_conditional(&rho, &z)? - q_mu(&c) - conditional_quantum(&rho)?)
        }
        AuditRelation::FrankLieb => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (povm(da, rng)?, povm(da, rng)?);
            Ok(cq_conditional(&rho, &x)? + cq_conditional(&rho, &z)? - q_fl(&x, &z)? - conditional_quantum(&rho)?)
        }
        AuditRelation::Tomamichel => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (povm(da, rng)?, povm(da, rng)?);
            Ok(cq_conditional(&rho, &x)? + cq_conditional(&rho, &z)? - q_ct(&x, &z)? - conditional_quantum(&rho)?
                + residual_conditional(&rho, &x)?)
        }
        AuditRelation::FullyStateDependent => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (sample_basis(da, rng), sample_basis(da, rng));
            let y = povm(db, rng)?;
            let c = overlap_matrix(&x, &z)?;
            let p_xy = joint_distribution(&rho, &x, &y)?;
            let p_zy = joint_distribution(&rho, &z, &y)?;
            Ok(conditional_classical(&p_xy) + cq_conditional(&rho, &z)?
                - conditional_quantum(&rho)?
                - q_fsd(&c, &p_xy, &p_zy)?)
        }
        AuditRelation::Tripartite => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (povm(da, rng)?, povm(da, rng)?);
            let y = povm(db, rng)?;
            let rho_ac = DensityOperator::from_pure(&purify(&rho)).reduce(&[0, 2])?;
            let p_xy = joint_distribution(&rho, &x, &y)?;
            let p_zy = joint_distribution(&rho, &z, &y)?;
            let h = povm_overlap_h(&x, &z)?;
            Ok(conditional_classical(&p_xy) + cq_conditional(&rho_ac, &z)? - q_fsdp(&h, &p_xy, &p_zy)?)
        }
        AuditRelation::FullyStateDependentPovm => {
            let rho = sample_bipartite(da, db, rng)?;
            let (x, z) = (povm(da, rng)?, povm(da, rng)?);
            let y = povm(db, rng)?;
            let p_xy = joint_distribution(&rho, &x, &y)?;
            let p_zy = joint_distribution(&rho, &z, &y)?;
            let h = povm_overlap_h(&x, &z)?;
            Ok(conditional_classical(&p_xy) + cq_conditional(&rho, &z)? - conditional_quantum(&rho)?
                + residual_conditional(&rho, &z)?
                - q_fsdp(&h, &p_xy, &p_zy)?)
        }
        AuditRelation::Witness => {
            let terms = rng.random_range(1..=4);
            let rho = sample_separable(da, db, terms, rng)?;
            let z = povm(da, rng)?;
            witness_povm(&rho, &z)
        }
        AuditRelation::Conserved => conserved_slack(da, db, rng),
        AuditRelation::OverlapNorm => {
            let (x, z) = (povm(da, rng)?, povm(da, rng)?);
            overlap_norm_slack(&x, &z)
        }
        AuditRelation::Ordering => {
            let rho = sample_bipartite(da, db, rng)?;
            let (xa, za) = (sample_basis(da, rng), sample_basis(da, rng));
            let (xb, zb) = (sample_basis(db, rng), sample_basis(db, rng));
            let c = overlap_matrix(&xa, &za)?;
            let d = PairDistributions::measure(&rho, &xa, &za, &xb, &zb)?;
            let (qc, _) = q_c_best(&c, &d.xx.marginal_x(), &d.zz.marginal_x())?;
            let (qf, _) = q_fsd_best(&c, &d)?;
            Ok((qc - q_mu(&c)).min(qf - qc))
        }
        AuditRelation::Schmidt => {
            let psi = sample_pure(&[da, db], rng);
            let rotation = tensor_product(&sample_unitary(da, rng), &sample_unitary(db, rng));
            let psi = psi.apply(&rotation)?;
            let v = sample_unitary(da, rng);
            Ok(-schmidt_identity_residual(&psi, &v)?.abs())
        }
    }
}

fn povm(d: usize, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    let k = rng.random_range(2..=2 * d);
    sample_povm(d, k, rng)
}

fn random_labels(d: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    (0..d).map(|_| rng.random_range(0..2)).collect()
}

fn coordinate_projectors(labels: &[i64]) -> Vec<CMatrix> {
    let mut values = labels.to_vec();
    values.sort_unstable();
    values.dedup();
    values
        .into_iter()
        .map(|v| {
            CMatrix::from_fn(labels.len(), labels.len(), |i, j| {
                crate::qmath::cr(if i == j && labels[i] == v { 1.0 } else { 0.0 })
            })
        })
        .collect()
}

/// Both measured relations for `ρ̄` with measurements that commute with local number labels.
fn conserved_slack(da: usize, db: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = sample_bipartite(da, db, rng)?;
    let (na, nb) = (random_labels(da, rng), random_labels(db, rng));
    let n = ConservedQuantity::from_diagonal(&na, &nb)?;
    let bar = crate::bounds::project_conserved(&rho, &n)?;
    let h_bar = conditional_quantum(&bar)?;
    let (pa, pb) = (coordinate_projectors(&na), coordinate_projectors(&nb));

    let block_povm = |d: usize, ps: &[CMatrix], rng: &mut ChaCha8Rng| -> Result<Measurement> {
        let k = rng.random_range(2..=2 * d);
        sample_povm_pinched(d, k, Some(ps), rng)
    };
    let (x, z) = (block_povm(da, &pa, rng)?, block_povm(da, &pa, rng)?);
    let (xb, zb) = (block_povm(db, &pb, rng)?, block_povm(db, &pb, rng)?);
    let p_xx = joint_distribution(&rho, &x, &xb)?;
    let p_zz = joint_distribution(&rho, &z, &zb)?;
    let p_zx = joint_distribution(&rho, &z, &xb)?;
    let q = q_fsdp(&povm_overlap_h(&x, &z)?, &p_xx, &p_zx)?;
    let povm_slack = conditional_classical(&p_xx) + conditional_classical(&p_zz) - q - h_bar
        + residual_conditional(&bar, &z)?;

    let x = Measurement::basis(sample_block_unitary(&na, rng))?;
    let z = Measurement::basis(sample_block_unitary(&na, rng))?;
    let xb = Measurement::basis(sample_block_unitary(&nb, rng))?;
    let zb = Measurement::basis(sample_block_unitary(&nb, rng))?;
    let c = overlap_matrix(&x, &z)?;
    let d = PairDistributions::measure(&rho, &x, &z, &xb, &zb)?;
    let (q, _) = q_fsd_best(&c, &d)?;
    let basis_slack = conditional_classical(&d.xx) + conditional_classical(&d.zz) - q - h_bar;
    Ok(povm_slack.min(basis_slack))
}

/// `min_x [max_z ‖√Z X √Z‖ - ‖Σ_z Z X Z‖]`.
pub fn overlap_norm_slack(x: &Measurement, z: &Measurement) -> Result<f64> {
    if x.dim() != z.dim() {
        return Err(Error::Dimension("POVMs act on different spaces".into()));
    }
    let zs = z.elements();
    let roots = z.sqrt_elements()?;
    let mut slack = f64::INFINITY;
    for xe in x.elements() {
        let sum = zs.iter().fold(CMatrix::zeros(x.dim(), x.dim()), |acc, ze| acc + ze * &xe * ze);
        let lhs = max_eigenvalue(&sum);
        let rhs = roots.iter().map(|r| max_eigenvalue(&(r * &xe * r))).fold(f64::NEG_INFINITY, f64::max);
        slack = slack.min(rhs - lhs);
    }
    Ok(slack)
}

/// `LHS - RHS` of the Schmidt-basis identity for a pure state.
///
/// `Z` and `Z'` are the Schmidt bases `U_A`, `U_B` of `ψ`; `X = U_A V` and `Y = U_B V` are
/// rotated copies. The identity reads
/// `q_FSD(c_XZ, P_XY, P_ZY) - H(X|Y) - H(Z|Z') = D(P_XY(ψ) ‖ P_XY(ρ_ZZ'))`.
pub fn schmidt_identity_residual(psi: &PureStateVector, v: &CMatrix) -> Result<f64> {
    let s = schmidt(psi)?;
    let d = psi.dims()[0];
    if psi.dims().len() != 2 || psi.dims()[1] != d || v.nrows() != d {
        return Err(Error::Dimension("Schmidt identity needs d_A = d_B and a matching rotation".into()));
    }
    let ua = crate::qmath::complete_basis(&s.left_vectors);
    let ub = crate::qmath::complete_basis(&s.right_vectors);
    let z = Measurement::basis(ua.clone())?;
    let zp = Measurement::basis(ub.clone())?;
    let x = Measurement::basis(&ua * v)?;
    let y = Measurement::basis(&ub * v)?;

    let p_xy = joint_distribution_pure(psi, &x, &y)?;
    let p_zy = joint_distribution_pure(psi, &z, &y)?;
    let p_zz = joint_distribution_pure(psi, &z, &zp)?;
    let c = overlap_matrix(&x, &z)?;
    let lhs = q_fsd(&c, &p_xy, &p_zy)? - conditional_classical(&p_xy) - conditional_classical(&p_zz);

    let mut probs = vec![0.0; d * d];
    for (i, &l) in s.coefficients.iter().enumerate() {
        probs[i * d + i] = l * l;
    }
    let dephased = DensityOperator::diagonal(&probs, vec![d, d])?.conjugate(&tensor_product(&ua, &ub));
    let q_xy = joint_distribution(&dephased, &x, &y)?;
    let flat = |m: &nalgebra::DMatrix<f64>| m.iter().copied().collect::<Vec<f64>>();
    let rhs = match relative_classical(&flat(p_xy.table()), &flat(q_xy.table()))? {
        Divergence::Finite(v) => v,
        Divergence::Infinite => return Err(Error::Numerical("Schmidt identity divergence is infinite".into())),
    };
    Ok(lhs - rhs)
}
