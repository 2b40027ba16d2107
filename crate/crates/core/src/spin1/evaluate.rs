//! Entanglement bounds for the split condensate, evaluated sector by sector.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::dynamics::{embed_pairs, pair_ground_state, SqueezingEvolution};
use super::rotation::{fourier3, phase_rotation, sector_overlap, SpinRotation};
use super::split::{beamsplit, SectorBlockedState};
use crate::bounds::{assemble_bound, fsd_kernel, q_pn, BoundReport, Orientation, RelationKind};
use crate::entropy::conditional_block;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::table::Table;

/// Bounds for one measurement pair on a split state, with the exact decomposition alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBounds {
    pub number_entropy: f64,
    pub configurational: f64,
    pub exact: f64,
    pub mu: BoundReport,
    pub pn: BoundReport,
    pub c: BoundReport,
    pub fsd: BoundReport,
}

impl SpinBounds {
    /// `H(X_A|X_B) + H(Z_A|Z_B)`.
    pub fn entropy_sum(&self) -> f64 {
        self.fsd.h_x + self.fsd.h_z
    }

    pub fn reports(&self) -> [&BoundReport; 4] {
        [&self.mu, &self.pn, &self.c, &self.fsd]
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct SectorTerms {
    weight: f64,
    max_c: f64,
    h_x: f64,
    h_z: f64,
    qc_xz: f64,
    qc_zx: f64,
    qf_xz: f64,
    qf_zx: f64,
}

fn sector_terms(state: &SectorBlockedState, x: &SpinRotation, z: &SpinRotation, k: usize) -> SectorTerms {
    let n = state.particles();
    let phi = &state.blocks()[k];
    let lx = x.apply_left(k, phi);
    let lz = z.apply_left(k, phi);
    let sq = |m: nalgebra::DMatrix<crate::qmath::C64>| m.map(|w| w.norm_sqr());
    let xx = sq(x.apply_right(n - k, &lx));
    let xz = sq(z.apply_right(n - k, &lx));
    let zx = sq(x.apply_right(n - k, &lz));
    let zz = sq(z.apply_right(n - k, &lz));
    let c = sector_overlap(x, z, k);
    let ct = c.transpose();

    let marginal_term = |p: &DMatrix<f64>, k: &DMatrix<f64>| -> f64 {
        p.row_iter()
            .zip(k.row_iter())
            .map(|(pr, kr)| {
                let w = pr.sum();
                if w > 0.0 {
                    -w * kr.max().log2()
                } else {
                    0.0
                }
            })
            .sum()
    };

    SectorTerms {
        weight: phi.norm_squared(),
        max_c: c.max(),
        h_x: conditional_block(&xx),
        h_z: conditional_block(&zz),
        qc_xz: marginal_term(&xx, &c),
        qc_zx: marginal_term(&zz, &ct),
        qf_xz: fsd_kernel(&c, &xx, &zx),
        qf_zx: fsd_kernel(&ct, &zz, &xz),
    }
}

/// Bounds for measuring `X = ⊕R_X` and `Z = ⊕R_Z` on both halves of a split state.
pub fn evaluate_pair(state: &SectorBlockedState, x: &SpinRotation, z: &SpinRotation) -> Result<SpinBounds> {
    let n = state.particles();
    if x.n_max() < n || z.n_max() < n {
        return Err(Error::Dimension(format!("rotations cached below N = {n}")));
    }
    let terms: Vec<SectorTerms> = (0..=n).into_par_iter().map(|k| sector_terms(state, x, z, k)).collect();

    let sum = |f: fn(&SectorTerms) -> f64| terms.iter().map(f).sum::<f64>();
    let (h_x, h_z) = (sum(|t| t.h_x), sum(|t| t.h_z));
    let weights: Vec<f64> = terms.iter().map(|t| t.weight).collect();
    let maxima: Vec<f64> = terms.iter().map(|t| t.max_c).collect();
    let best = |a: f64, b: f64| if b > a { (b, Orientation::ZX) } else { (a, Orientation::XZ) };
    let (qc, oc) = best(sum(|t| t.qc_xz), sum(|t| t.qc_zx));
    let (qf, of) = best(sum(|t| t.qf_xz), sum(|t| t.qf_zx));
    let q_mu = -maxima.iter().copied().fold(0.0, f64::max).log2();

    let number_entropy = state.number_entropy();
    let configurational = state.configurational();
    let exact = state.entanglement();
    let finish = |r: BoundReport| r.with_exact(exact).with_configurational(configurational);
    Ok(SpinBounds {
        number_entropy,
        configurational,
        exact,
        mu: finish(assemble_bound(RelationKind::MaassenUffink, q_mu, h_x, h_z, None)?),
        pn: finish(assemble_bound(RelationKind::ParticleNumber, q_pn(&maxima, &weights)?, h_x, h_z, None)?),
        c: finish(assemble_bound(RelationKind::Marginal, qc, h_x, h_z, None)?.with_orientation(oc)),
        fsd: finish(assemble_bound(RelationKind::FullyStateDependent, qf, h_x, h_z, None)?.with_orientation(of)),
    })
}

/// `X = D_φ` and `Z = F₃ D_φ` on sectors up to `n`.
pub fn phase_fourier_pair(phases: [f64; 3], n: usize) -> Result<(SpinRotation, SpinRotation)> {
    let d = phase_rotation(phases);
    Ok((SpinRotation::new(d.clone(), n)?, SpinRotation::new(fourier3() * d, n)?))
}

/// Bare counting and its single-particle Fourier transform.
pub fn bare_fourier_pair(n: usize) -> Result<(SpinRotation, SpinRotation)> {
    phase_fourier_pair([0.0; 3], n)
}

/// `(a, b) ↦ (a, b, -a - b)`.
pub fn constrained_phases(a: f64, b: f64) -> [f64; 3] {
    [a, b, -a - b]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseObjective {
    /// Minimize `H(X_A|X_B) + H(Z_A|Z_B)`.
    EntropySum,
    /// Maximize the fully state-dependent bound.
    FsdBound,
}

impl PhaseObjective {
    /// Value to minimize.
    pub fn value(self, b: &SpinBounds) -> f64 {
        match self {
            PhaseObjective::EntropySum => b.entropy_sum(),
            PhaseObjective::FsdBound => -b.fsd.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptimum {
    pub phases: [f64; 3],
    pub value: f64,
    pub bounds: SpinBounds,
    /// Index of the winning restart.
    pub restart: usize,
    /// False when the winning run hit the iteration cap.
    pub converged: bool,
}

/// Bounds for `X = D_φ`, `Z = F₃ D_φ` at given phases.
pub fn phase_bounds(state: &SectorBlockedState, phases: [f64; 3]) -> Result<SpinBounds> {
    let (x, z) = phase_fourier_pair(phases, state.particles())?;
    evaluate_pair(state, &x, &z)
}

/// Nelder–Mead over the two free phases from `restarts` uniform starts in `[-π, π]²`.
pub fn optimize_phases(
    state: &SectorBlockedState,
    objective: PhaseObjective,
    restarts: usize,
    seed: u64,
) -> Result<PhaseOptimum> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<[f64; 2]> = (0..restarts).map(|_| [rng.random_range(-PI..PI), rng.random_range(-PI..PI)]).collect();
    let opts = NelderMeadOptions { initial_step: 0.3, max_iterations: 400, tolerance: 1e-10 };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|s| {
            nelder_mead(
                |p| match phase_bounds(state, constrained_phases(p[0], p[1])) {
                    Ok(b) => objective.value(&b),
                    Err(_) => f64::INFINITY,
                },
                s,
                opts,
            )
        })
        .collect();
    let (restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    if !best.value.is_finite() {
        return Err(Error::Numerical("phase objective not finite at any start".into()));
    }
    let wrap = |v: f64| (v + PI).rem_euclid(2.0 * PI) - PI;
    let phases = constrained_phases(wrap(best.x[0]), wrap(best.x[1]));
    let bounds = phase_bounds(state, phases)?;
    Ok(PhaseOptimum { phases, value: objective.value(&bounds), bounds, restart, converged: best.converged })
}

/// Split state after squeezing `r` from the polar state.
pub fn squeezed_split_state(evolution: &SqueezingEvolution, r: f64) -> Result<SectorBlockedState> {
    beamsplit(evolution.particles(), &evolution.state(r))
}

/// Critical quadratic Zeeman shift `2 N |g|`.
pub fn critical_q(n: usize, g: f64) -> f64 {
    2.0 * n as f64 * g.abs()
}

/// Split ground state of the spin-mixing Hamiltonian at `q`.
pub fn ground_split_state(n: usize, g: f64, q: f64) -> Result<SectorBlockedState> {
    if !(g < 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("need g < 0 and finite q, got g={g}, q={q}")));
    }
    let (_, v) = pair_ground_state(n, g, q);
    beamsplit(n, &embed_pairs(n, &v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinPoint {
    /// `r` for squeezing runs, `q` for ground-state runs.
    pub parameter: f64,
    pub bounds: SpinBounds,
}

/// Ground-state bounds with bare counting and the single-particle Fourier transform.
pub fn ground_state_sweep(n: usize, g: f64, qs: &[f64]) -> Result<Vec<SpinPoint>> {
    let (x, z) = bare_fourier_pair(n)?;
    qs.par_iter()
        .map(|&q| Ok(SpinPoint { parameter: q, bounds: evaluate_pair(&ground_split_state(n, g, q)?, &x, &z)? }))
        .collect()
}

/// Squeezing sweep for a fixed measurement pair.
pub fn squeezing_sweep(n: usize, rs: &[f64], x: &SpinRotation, z: &SpinRotation) -> Result<Vec<SpinPoint>> {
    let ev = SqueezingEvolution::new(n, 1.0)?;
    rs.par_iter()
        .map(|&r| Ok(SpinPoint { parameter: r, bounds: evaluate_pair(&squeezed_split_state(&ev, r)?, x, z)? }))
        .collect()
}

/// `points` values evenly spaced over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

pub const SQUEEZING_COLUMNS: [&str; 9] = [
    "N",
    "r",
    "p_number_entropy",
    "configurational_negHAB",
    "bound_mu",
    "bound_pn",
    "bound_c",
    "bound_fsd",
    "neg_HAB_exact",
];

pub const GROUND_STATE_COLUMNS: [&str; 9] = [
    "N",
    "q_over_qc",
    "p_number_entropy",
    "neg_HAB_configurational",
    "bound_mu",
    "bound_pn",
    "bound_c",
    "bound_fsd",
    "neg_HAB_exact",
];

fn push_points(t: &mut Table, n: usize, points: &[SpinPoint], scale: f64) -> Result<()> {
    for p in points {
        let b = &p.bounds;
        t.push(vec![
            n.into(),
            (p.parameter / scale).into(),
            b.number_entropy.into(),
            b.configurational.into(),
            b.mu.bound.into(),
            b.pn.bound.into(),
            b.c.bound.into(),
            b.fsd.bound.into(),
            b.exact.into(),
        ])?;
    }
    Ok(())
}

/// Phases maximizing the fsd bound of the squeezed state at `(n, r)`.
pub fn optimal_phases(n: usize, r: f64, restarts: usize, seed: u64) -> Result<PhaseOptimum> {
    let ev = SqueezingEvolution::new(n, 1.0)?;
    optimize_phases(&squeezed_split_state(&ev, r)?, PhaseObjective::FsdBound, restarts, seed)
}

/// Squeezing curves measured with fixed phases `phases` for each particle number.
pub fn squeezing_table(sizes: &[usize], rs: &[f64], phases: [f64; 3]) -> Result<Table> {
    let mut t = Table::new(SQUEEZING_COLUMNS);
    for &n in sizes {
        let (x, z) = phase_fourier_pair(phases, n)?;
        push_points(&mut t, n, &squeezing_sweep(n, rs, &x, &z)?, 1.0)?;
    }
    Ok(t)
}

/// Ground-state curves over `q / q_c`.
pub fn ground_state_table(n: usize, g: f64, q_over_qc: &[f64]) -> Result<Table> {
    let qc = critical_q(n, g);
    let qs: Vec<f64> = q_over_qc.iter().map(|v| v * qc).collect();
    let mut t = Table::new(GROUND_STATE_COLUMNS);
    push_points(&mut t, n, &ground_state_sweep(n, g, &qs)?, qc)?;
    Ok(t)
}
