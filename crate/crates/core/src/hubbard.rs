//! Two distinguishable particles on an open chain with on-site interaction.
//!
//! Basis states `|i1, i2⟩` are ordered with particle 1 major. The first measurement is the
//! site basis, the second one is the site basis after free tunneling for time `t`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bounds::{basis_reports, BoundReport, PairDistributions, RelationKind};
use crate::entropy::{plogp_sum, JointDistribution};
use crate::error::{Error, Result};
use crate::measurement::OverlapMatrix;
use crate::qmath::{singular_values, symmetric_eigen, CMatrix, CVector, PureStateVector, C64};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub l: usize,
    pub j: f64,
    pub u: f64,
}

impl LatticeModel {
    pub fn new(l: usize, j: f64, u: f64) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("lattice needs at least 2 sites, got {l}")));
        }
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::InvalidParameter(format!("hopping must be positive, got {j}")));
        }
        if !u.is_finite() {
            return Err(Error::InvalidParameter("interaction must be finite".into()));
        }
        Ok(Self { l, j, u })
    }

    pub fn dim(&self) -> usize {
        self.l * self.l
    }
}

/// Single-particle hopping `-Σ_i (|i⟩⟨i+1| + h.c.)` with unit amplitude and open ends.
pub fn hopping_matrix(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(l, l, |i, k| if i.abs_diff(k) == 1 { -1.0 } else { 0.0 })
}

/// Real symmetric two-particle Hamiltonian on the `L²` site-pair basis.
pub fn build_hamiltonian(m: &LatticeModel) -> DMatrix<f64> {
    let l = m.l;
    let h1 = hopping_matrix(l) * m.j;
    let mut h = DMatrix::zeros(l * l, l * l);
    for i1 in 0..l {
        for i2 in 0..l {
            let row = i1 * l + i2;
            for k in 0..l {
                h[(row, k * l + i2)] += h1[(i1, k)];
                h[(row, i1 * l + k)] += h1[(i2, k)];
            }
            if i1 == i2 {
                h[(row, row)] += m.u;
            }
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub model: LatticeModel,
    pub energy: f64,
    /// Real amplitudes `Ψ[i1, i2]`.
    pub amplitudes: DMatrix<f64>,
}

impl GroundState {
    pub fn state(&self) -> PureStateVector {
        let l = self.model.l;
        let v = CVector::from_iterator(
            l * l,
            (0..l * l).map(|k| C64::new(self.amplitudes[(k / l, k % l)], 0.0)),
        );
        PureStateVector::new(v, vec![l, l]).expect("eigenvector is normalized")
    }

    /// `-H(A|B) = H(B)` from the squared singular values of the amplitude matrix.
    pub fn entanglement(&self) -> f64 {
        let sv = singular_values(&self.amplitudes.map(|x| C64::new(x, 0.0)));
        let p: Vec<f64> = sv.iter().map(|s| s * s).collect();
        plogp_sum(&p)
    }

    /// Weight on doubly occupied sites.
    pub fn diagonal_weight(&self) -> f64 {
        (0..self.model.l).map(|i| self.amplitudes[(i, i)].powi(2)).sum()
    }
}

/// Lowest eigenvector, with its largest-modulus amplitude made positive.
pub fn ground_state(m: &LatticeModel) -> Result<GroundState> {
    let h = build_hamiltonian(m);
    let (values, vectors) = symmetric_eigen(&h);
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
    let mut v = vectors.column(k).into_owned();
    let big = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
    if big < 0.0 {
        v.neg_mut();
    }
    v /= v.norm();
    let l = m.l;
    Ok(GroundState { model: *m, energy: values[k], amplitudes: DMatrix::from_fn(l, l, |i, j| v[i * l + j]) })
}

/// Single-particle rotation `R(t) = exp(i t H₁)` with unit hopping.
pub fn tunneling_unitary(l: usize, t: f64) -> CMatrix {
    let (values, vectors) = symmetric_eigen(&hopping_matrix(l));
    let v = vectors.map(|x| C64::new(x, 0.0));
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        l,
        values.iter().map(|&e| C64::from_polar(1.0, e * t)),
    ));
    &v * phases * v.adjoint()
}

/// `c_xz = |R_zx|²` for the site basis and the tunneled site basis.
pub fn overlap(r: &CMatrix) -> OverlapMatrix {
    OverlapMatrix::new(r.transpose().map(|z| z.norm_sqr())).expect("squared moduli are nonnegative")
}

fn site_labels(l: usize) -> Vec<Vec<i64>> {
    (0..l as i64).map(|i| vec![i]).collect()
}

/// Joint distributions of both particles measured in the site basis or after tunneling.
pub fn pair_distributions(psi: &DMatrix<f64>, r: &CMatrix) -> Result<PairDistributions> {
    let l = psi.nrows();
    let p = psi.map(|x| C64::new(x, 0.0));
    let rp = r * &p;
    let pr = &p * r.transpose();
    let rpr = &rp * r.transpose();
    let joint = |m: DMatrix<f64>| JointDistribution::with_labels(m, site_labels(l), site_labels(l));
    Ok(PairDistributions {
        xx: joint(psi.map(|x| x * x))?,
        zz: joint(rpr.map(|z| z.norm_sqr()))?,
        zx: joint(rp.map(|z| z.norm_sqr()))?,
        xz: joint(pr.map(|z| z.norm_sqr()))?,
    })
}

/// One grid point of the tunneling-time sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardPoint {
    pub l: usize,
    pub t: f64,
    pub mu: BoundReport,
    pub marginal: BoundReport,
    pub fsd: BoundReport,
}

impl HubbardPoint {
    pub fn exact(&self) -> f64 {
        self.fsd.exact.unwrap_or(f64::NAN)
    }
}

pub fn evaluate(gs: &GroundState, t: f64) -> Result<HubbardPoint> {
    let r = tunneling_unitary(gs.model.l, t);
    let c = overlap(&r);
    let d = pair_distributions(&gs.amplitudes, &r)?;
    let exact = gs.entanglement();
    let mut reports = basis_reports(&c, &d)?.into_iter().map(|r| r.with_exact(exact));
    let mu = reports.next().expect("three reports");
    let marginal = reports.next().expect("three reports");
    let fsd = reports.next().expect("three reports");
    debug_assert_eq!(fsd.kind, RelationKind::FullyStateDependent);
    Ok(HubbardPoint { l: gs.model.l, t, mu, marginal, fsd })
}

/// `t = L·k/points` for `k = 1..=points`.
pub fn t_grid(l: usize, points: usize) -> Vec<f64> {
    (1..=points).map(|k| l as f64 * k as f64 / points as f64).collect()
}

/// Tunneling time in `(0, L]` maximizing `q_mu`, from a grid scan refined by golden section.
pub fn optimal_time(l: usize) -> f64 {
    let f = |t: f64| -overlap(&tunneling_unitary(l, t)).max().log2();
    let n = 400 * l;
    let h = l as f64 / n as f64;
    let best = (1..=n).max_by(|&a, &b| f(a as f64 * h).total_cmp(&f(b as f64 * h))).unwrap_or(1);
    let (mut a, mut b) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "L", "t_over_L", "q_mu", "q_c", "q_fsd", "H_XX", "H_ZZ", "bound_mu", "bound_c", "bound_fsd", "neg_HAB_exact",
];

fn sweep_row(p: &HubbardPoint) -> Vec<Cell> {
    vec![
        p.l.into(),
        (p.t / p.l as f64).into(),
        p.mu.q.into(),
        p.marginal.q.into(),
        p.fsd.q.into(),
        p.fsd.h_x.into(),
        p.fsd.h_z.into(),
        p.mu.bound.into(),
        p.marginal.bound.into(),
        p.fsd.bound.into(),
        p.exact().into(),
    ]
}

/// Sweep over lattice sizes and tunneling times; rows ordered by `(L, t)`.
pub fn sweep(sizes: &[usize], points: usize, j: f64, u: f64) -> Result<Vec<HubbardPoint>> {
    let states: Vec<GroundState> = sizes
        .par_iter()
        .map(|&l| LatticeModel::new(l, j, u).and_then(|m| ground_state(&m)))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, f64)> = states
        .iter()
        .enumerate()
        .flat_map(|(k, gs)| t_grid(gs.model.l, points).into_iter().map(move |t| (k, t)))
        .collect();
    tasks.par_iter().map(|&(k, t)| evaluate(&states[k], t)).collect()
}

/// Sweep table shared by the fully state-dependent and state-independent figures.
pub fn sweep_table(points: &[HubbardPoint]) -> Result<Table> {
    let mut t = Table::new(SWEEP_COLUMNS);
    for p in points {
        t.push(sweep_row(p))?;
    }
    Ok(t)
}

/// Ground-state entanglement against the maximally entangled reference `log2 L`.
pub fn fig1(sizes: &[usize], j: f64, u: f64) -> Result<Table> {
    let rows: Vec<(usize, f64, f64)> = sizes
        .par_iter()
        .map(|&l| {
            let gs = ground_state(&LatticeModel::new(l, j, u)?)?;
            Ok((l, gs.entanglement(), gs.diagonal_weight()))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(["L", "neg_HAB", "log2_L_reference", "diagonal_weight"]);
    for (l, e, w) in rows {
        t.push(vec![l.into(), e.into(), (l as f64).log2().into(), w.into()])?;
    }
    Ok(t)
}

/// `q_mu / log2 L` over the tunneling-time grid.
pub fn fig2(sizes: &[usize], points: usize) -> Result<Table> {
    let tasks: Vec<(usize, f64)> =
        sizes.iter().flat_map(|&l| t_grid(l, points).into_iter().map(move |t| (l, t))).collect();
    let rows: Vec<(usize, f64, f64)> = tasks
        .par_iter()
        .map(|&(l, t)| (l, t, -overlap(&tunneling_unitary(l, t)).max().log2()))
        .collect();
    let mut tab = Table::new(["L", "t_over_L", "q_mu", "q_mu_normalized"]);
    for (l, t, q) in rows {
        tab.push(vec![l.into(), (t / l as f64).into(), q.into(), (q / (l as f64).log2()).into()])?;
    }
    Ok(tab)
}

/// Histogram of all overlap elements with uniform bins over `[0, max c]`.
pub fn fig3(l: usize, t: f64, bins: usize) -> Result<Table> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let c = overlap(&tunneling_unitary(l, t));
    let top = c.max();
    let mut counts = vec![0usize; bins];
    for &v in c.entries().iter() {
        let k = if top > 0.0 { ((v / top) * bins as f64).floor() as usize } else { 0 };
        counts[k.min(bins - 1)] += 1;
    }
    let mut tab = Table::new(["bin_lo", "bin_hi", "count"]);
    for (k, &n) in counts.iter().enumerate() {
        let w = top / bins as f64;
        tab.push(vec![(k as f64 * w).into(), ((k + 1) as f64 * w).into(), n.into()])?;
    }
    Ok(tab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{hermitian_eigen, is_unitary};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&LatticeModel::new(2, 1.0, 0.0).unwrap());
        let spec = hermitian_eigen(&h.map(|x| C64::new(x, 0.0))).values;
        for (v, e) in spec.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
        let h = build_hamiltonian(&LatticeModel::new(2, 1.0, -3.0).unwrap());
        let diag: Vec<f64> = (0..4).map(|k| h[(k, k)]).collect();
        assert_eq!(diag, vec![-3.0, 0.0, 0.0, -3.0]);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn model_validation() {
        assert!(LatticeModel::new(1, 1.0, 0.0).is_err());
        assert!(LatticeModel::new(3, 0.0, 0.0).is_err());
        assert!(LatticeModel::new(3, -1.0, 0.0).is_err());
    }

    #[test]
    fn ground_state_examples() {
        let gs = ground_state(&LatticeModel::new(2, 1.0, -100.0).unwrap()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(gs.amplitudes[(0, 0)], s, epsilon = 1e-3);
        assert_abs_diff_eq!(gs.amplitudes[(1, 1)], s, epsilon = 1e-3);
        assert_abs_diff_eq!(gs.entanglement(), 1.0, epsilon = 5e-3);

        let gs = ground_state(&LatticeModel::new(5, 1.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(gs.entanglement(), 0.0, epsilon = 1e-9);

        let gs = ground_state(&LatticeModel::new(12, 1.0, -100.0).unwrap()).unwrap();
        assert!(gs.diagonal_weight() > 0.99);
        let e = gs.entanglement();
        assert!(e < (12f64).log2() && e > 3.0);
    }

    #[test]
    fn tunneling_examples() {
        assert!(crate::qmath::max_abs_diff(&tunneling_unitary(4, 0.0), &CMatrix::identity(4, 4)) < 1e-12);
        assert!(is_unitary(&tunneling_unitary(30, 15.0), 1e-10));
        let c = overlap(&tunneling_unitary(2, FRAC_PI_4));
        assert!(c.entries().iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert_abs_diff_eq!(optimal_time(2), FRAC_PI_4, epsilon = 1e-6);
    }

    #[test]
    fn tunneling_matches_dense_exponential() {
        let h = hopping_matrix(3).map(|x| C64::new(x, 0.0));
        let r = crate::qmath::expm_i(&h, 0.7);
        assert!(crate::qmath::max_abs_diff(&r, &tunneling_unitary(3, 0.7)) < 1e-12);
    }

    #[test]
    fn distributions_match_generic_route() {
        let gs = ground_state(&LatticeModel::new(3, 1.0, -4.0).unwrap()).unwrap();
        let r = tunneling_unitary(3, 0.9);
        let fast = pair_distributions(&gs.amplitudes, &r).unwrap();
        let x = crate::measurement::Measurement::computational(3);
        let z = crate::measurement::Measurement::basis(r.adjoint()).unwrap();
        let rho = crate::qmath::DensityOperator::from_pure(&gs.state());
        let slow = PairDistributions::measure(&rho, &x, &z, &x, &z).unwrap();
        for (a, b) in [(&fast.xx, &slow.xx), (&fast.zz, &slow.zz), (&fast.zx, &slow.zx), (&fast.xz, &slow.xz)] {
            assert!((a.table() - b.table()).abs().max() < 1e-12);
        }
        let c_generic = crate::measurement::overlap_matrix(&x, &z).unwrap();
        assert!((overlap(&r).entries() - c_generic.entries()).abs().max() < 1e-12);
        let exact = -crate::entropy::conditional_quantum(&rho).unwrap();
        assert_abs_diff_eq!(gs.entanglement(), exact, epsilon = 1e-10);
    }

    #[test]
    fn fsd_dominates_mu() {
        let pts = sweep(&[2, 4], 12, 1.0, -100.0).unwrap();
        for p in &pts {
            assert!(p.fsd.bound >= p.mu.bound - 1e-12);
            assert!(p.fsd.bound > 0.0);
        }
    }

    #[test]
    fn histogram_counts_everything() {
        let t = fig3(6, 3.0, 10).unwrap();
        let total: f64 = t.column("count").unwrap().iter().sum();
        assert_eq!(total, 36.0);
    }
}
