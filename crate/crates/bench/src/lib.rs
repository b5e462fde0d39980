//! Shared fixtures for the benchmarks.

use relweyl::lab::PairConfig;
use relweyl::spectral::{GridPolicy, RadialGrid};
use relweyl::{Dimension, PairSpec, PotentialSpec};

/// `−1/r + 0.1` in three dimensions.
pub fn hydrogen() -> PotentialSpec {
    PotentialSpec::power(Dimension::Three, 1.0, 1.0, 0.1).expect("valid hydrogen parameters")
}

/// The default relative pair, `−r^{−1.3} + 1` and its `r^{−1/2}` perturbation.
pub fn default_pair() -> PairSpec {
    PairConfig::default().build().expect("valid default pair")
}

/// Default grid for `potential` at `h`.
pub fn grid(potential: &PotentialSpec, h: f64) -> RadialGrid {
    GridPolicy::default().grid_for(potential, h).expect("grid")
}

/// Default shared grid for both members of `pair` at `h`.
pub fn shared_grid(pair: &PairSpec, h: f64) -> RadialGrid {
    GridPolicy::default()
        .grid_for_all(&[&pair.first, &pair.second], h)
        .expect("grid")
}
