//! Classical and quantum entropy functionals, all in bits.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qmath::{hermitian_eigen, DensityOperator, ZERO_CUTOFF};

/// Entries in `[-NEG_CLIP, 0)` are rounding noise and get clipped to zero.
pub const NEG_CLIP: f64 = 1e-12;
/// Allowed deviation of a probability table's total from one.
pub const NORM_TOL: f64 = 1e-9;
/// Marginals below this are treated as empty conditioning events.
pub const MARGINAL_FLOOR: f64 = 1e-15;

/// Relative entropy value with an explicit infinity for support violations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Divergence::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(*v),
            Divergence::Infinite => None,
        }
    }
}

impl Eq for Divergence {}

impl Ord for Divergence {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Divergence::Finite(a), Divergence::Finite(b)) => a.total_cmp(b),
            (Divergence::Finite(_), Divergence::Infinite) => Ordering::Less,
            (Divergence::Infinite, Divergence::Finite(_)) => Ordering::Greater,
            (Divergence::Infinite, Divergence::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Divergence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{v}"),
            Divergence::Infinite => write!(f, "inf"),
        }
    }
}

/// `-Σ w log2 w` over positive weights, with no normalization check.
///
/// Blockwise entropy evaluations sum these partial terms.
pub fn plogp_sum<'a, I: IntoIterator<Item = &'a f64>>(weights: I) -> f64 {
    weights
        .into_iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum()
}

/// Clips rounding-level negatives and checks normalization.
pub fn clean_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(p.len());
    for &x in p {
        if !x.is_finite() {
            return Err(Error::InvalidDistribution(format!("non-finite entry {x}")));
        }
        if x < -NEG_CLIP {
            return Err(Error::InvalidDistribution(format!("negative entry {x:e}")));
        }
        out.push(x.max(0.0));
    }
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    out.iter_mut().for_each(|x| *x /= total);
    Ok(out)
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon(p: &[f64]) -> Result<f64> {
    Ok(plogp_sum(&clean_probabilities(p)?))
}

/// Eigenvalues with the relative null-space cutoff applied.
fn clipped_spectrum(rho: &DensityOperator) -> Vec<f64> {
    let values = rho.eigenvalues();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    values
        .into_iter()
        .map(|v| if v <= ZERO_CUTOFF * scale { 0.0 } else { v })
        .collect()
}

/// `H(ρ) = -Tr ρ log2 ρ`.
pub fn von_neumann(rho: &DensityOperator) -> f64 {
    plogp_sum(&clipped_spectrum(rho))
}

/// `H(ρ_{ab}) - H(ρ_b)` for arbitrary groups of subsystems.
pub fn conditional_entropy(rho: &DensityOperator, a: &[usize], b: &[usize]) -> Result<f64> {
    let mut ab: Vec<usize> = a.to_vec();
    ab.extend_from_slice(b);
    let h_ab = if ab.len() == rho.dims().len() {
        let mut sorted = ab.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ab.len() {
            return Err(Error::InvalidParameter("overlapping subsystem groups".into()));
        }
        von_neumann(rho)
    } else {
        von_neumann(&rho.reduce(&ab)?)
    };
    let h_b = if b.is_empty() { 0.0 } else { von_neumann(&rho.reduce(b)?) };
    Ok(h_ab - h_b)
}

fn require_bipartite(rho: &DensityOperator) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a bipartite state, got dims {:?}", rho.dims())));
    }
    Ok(())
}

/// `H(A|B) = H(ρ_AB) - H(ρ_B)`.
pub fn conditional_quantum(rho: &DensityOperator) -> Result<f64> {
    require_bipartite(rho)?;
    Ok(von_neumann(rho) - von_neumann(&rho.partial_trace(1)?))
}

/// `I(A:B) = H(ρ_A) + H(ρ_B) - H(ρ_AB)`.
pub fn mutual_information(rho: &DensityOperator) -> Result<f64> {
    require_bipartite(rho)?;
    Ok(von_neumann(&rho.partial_trace(0)?) + von_neumann(&rho.partial_trace(1)?) - von_neumann(rho))
}

/// Support-violation threshold for the quantum relative entropy.
pub const SUPPORT_TOL: f64 = 1e-9;

/// `D(ρ||σ) = Tr ρ log ρ - Tr ρ log σ`, infinite when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Divergence> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let spec = hermitian_eigen(sigma.matrix());
    let threshold = ZERO_CUTOFF * spec.max_abs_value();
    let mut null_weight = 0.0;
    let mut cross = 0.0;
    for (k, &lam) in spec.values.iter().enumerate() {
        let v = spec.vectors.column(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if lam <= threshold {
            null_weight += w;
        } else {
            cross += w * lam.log2();
        }
    }
    if null_weight > SUPPORT_TOL {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(-von_neumann(rho) - cross))
}

/// Normalized table `P(x, y)` with rows indexed by X outcomes and columns by Y outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    table: DMatrix<f64>,
    x_labels: Vec<Vec<i64>>,
    y_labels: Vec<Vec<i64>>,
}

fn default_labels(n: usize) -> Vec<Vec<i64>> {
    (0..n as i64).map(|i| vec![i]).collect()
}

impl JointDistribution {
    pub fn new(table: DMatrix<f64>) -> Result<Self> {
        let (r, c) = table.shape();
        Self::with_labels(table, default_labels(r), default_labels(c))
    }

    pub fn with_labels(table: DMatrix<f64>, x_labels: Vec<Vec<i64>>, y_labels: Vec<Vec<i64>>) -> Result<Self> {
        if x_labels.len() != table.nrows() || y_labels.len() != table.ncols() {
            return Err(Error::Dimension("label count does not match table shape".into()));
        }
        let (r, c) = table.shape();
        let cleaned = clean_probabilities(table.as_slice())?;
        Ok(Self { table: DMatrix::from_vec(r, c, cleaned), x_labels, y_labels })
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn x_labels(&self) -> &[Vec<i64>] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[Vec<i64>] {
        &self.y_labels
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.table.row_iter().map(|r| r.sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.table.column_iter().map(|c| c.sum()).collect()
    }

    pub fn transpose(&self) -> JointDistribution {
        Self {
            table: self.table.transpose(),
            x_labels: self.y_labels.clone(),
            y_labels: self.x_labels.clone(),
        }
    }

    /// Outer product of two marginals.
    pub fn product(px: &[f64], py: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_fn(px.len(), py.len(), |i, j| px[i] * py[j]))
    }
}

/// `H(XY) - H(Y)` of an unnormalized block whose columns carry their full Y-marginal.
pub fn conditional_block(table: &DMatrix<f64>) -> f64 {
    let cols: Vec<f64> = table.column_iter().map(|c| c.sum()).collect();
    plogp_sum(table.as_slice()) - plogp_sum(&cols)
}

/// `H(X|Y) = H(XY) - H(Y)`.
pub fn conditional_classical(p: &JointDistribution) -> f64 {
    conditional_block(p.table())
}

/// Classical relative entropy `D(P||Q)`, infinite when P has mass where Q vanishes.
pub fn relative_classical(p: &[f64], q: &[f64]) -> Result<Divergence> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("{} vs {}", p.len(), q.len())));
    }
    let p = clean_probabilities(p)?;
    let q = clean_probabilities(q)?;
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(&q) {
        if qi < MARGINAL_FLOOR {
            if pi > NEG_CLIP {
                return Ok(Divergence::Infinite);
            }
            continue;
        }
        if pi > 0.0 {
            d += pi * (pi / qi).log2();
        }
    }
    Ok(Divergence::Finite(d))
}
