//! Fixtures shared by the benchmarks.

use eurbound::bounds::PairDistributions;
use eurbound::measurement::overlap_matrix;
use eurbound::verify::random::{rng_for, sample_basis, sample_bipartite};
use eurbound::{DensityOperator, Measurement, OverlapMatrix};

/// A random state with random local bases on both sides.
pub struct Case {
    pub rho: DensityOperator,
    pub bases: [Measurement; 4],
    pub overlap: OverlapMatrix,
    pub distributions: PairDistributions,
}

pub fn random_case(d: usize, seed: u64) -> Case {
    let mut rng = rng_for(seed);
    let rho = sample_bipartite(d, d, &mut rng).expect("valid dims");
    let bases = [(); 4].map(|_| sample_basis(d, &mut rng));
    let overlap = overlap_matrix(&bases[0], &bases[1]).expect("matching dims");
    let distributions =
        PairDistributions::measure(&rho, &bases[0], &bases[1], &bases[2], &bases[3]).expect("matching dims");
    Case { rho, bases, overlap, distributions }
}
