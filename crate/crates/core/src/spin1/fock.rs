//! Three-mode Fock space at fixed particle number.
//!
//! Modes are ordered `(m = 1, 0, -1)` and map to indices `0, 1, 2`.

use crate::qmath::{CMatrix, C64};

pub type Occupation = [usize; 3];

/// `D(n) = (n+1)(n+2)/2`.
pub fn fock_dim(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Fock states `|N₁, N₀, N₋₁⟩` in lexicographically descending `(N₁, N₀)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n: usize,
    states: Vec<Occupation>,
}

impl FockBasis {
    pub fn new(n: usize) -> Self {
        let mut states = Vec::with_capacity(fock_dim(n));
        for n1 in (0..=n).rev() {
            for n0 in (0..=n - n1).rev() {
                states.push([n1, n0, n - n1 - n0]);
            }
        }
        Self { n, states }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, k: usize) -> Occupation {
        self.states[k]
    }

    /// Closed-form position of an occupation, or `None` if it has the wrong particle number.
    pub fn index(&self, occ: &Occupation) -> Option<usize> {
        index_of(self.n, occ)
    }
}

pub fn index_of(n: usize, occ: &Occupation) -> Option<usize> {
    if occ.iter().sum::<usize>() != n {
        return None;
    }
    let m = n - occ[0];
    Some(m * (m + 1) / 2 + (m - occ[1]))
}

/// Magnetization `N₁ - N₋₁`.
pub fn magnetization(occ: &Occupation) -> i64 {
    occ[0] as i64 - occ[2] as i64
}

/// `Σ_jk C_jk a_j† a_k` on the fixed-`n` Fock space.
pub fn ladder_quadratic(n: usize, c: &CMatrix) -> CMatrix {
    assert_eq!(c.shape(), (3, 3), "coefficient matrix must be 3x3");
    let basis = FockBasis::new(n);
    let d = basis.len();
    let mut out = CMatrix::zeros(d, d);
    for (col, occ) in basis.states().iter().enumerate() {
        for k in 0..3 {
            if occ[k] == 0 {
                continue;
            }
            let mut lowered = *occ;
            lowered[k] -= 1;
            let down = (occ[k] as f64).sqrt();
            for j in 0..3 {
                if c[(j, k)] == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut raised = lowered;
                raised[j] += 1;
                let up = (raised[j] as f64).sqrt();
                let row = basis.index(&raised).expect("number conserving");
                out[(row, col)] += c[(j, k)] * (down * up);
            }
        }
    }
    out
}
