use serde::{Deserialize, Serialize};

use super::iterate::Method;

/// Complex multiply-add counts per detector phase.
///
/// Counts follow the nominal complexity formulas rather than instrumenting
/// the arithmetic: `MN² + MN` for the Gram build, `Σ N_c³` for the Stage-1
/// inversions, `(Σ N_c²)·N/C + Σ N_c²` for forming `Ψ` and `x̃`, and the
/// per-iteration costs in [`Method::per_iteration_cost`]. With uniform
/// clusters these reduce to `C·(N/C)³`, `N³/C²` and `N²/C`.
///
/// The `Ψ` count is the customary nominal figure. A serial dense product
/// actually needs `N³/C` multiply-adds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopLedger {
    pub gram_build: u64,
    pub block_invert: u64,
    pub transform: u64,
    /// Number of iterations executed.
    pub iterations: u64,
    /// Total multiply-adds spent across those iterations.
    pub iterative: u64,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_gram(&mut self, antennas: usize, users: usize) {
        let (m, n) = (antennas as u64, users as u64);
        self.gram_build += m * n * n + m * n;
    }

    pub fn record_iteration(&mut self, method: Method, users: usize) {
        self.iterations += 1;
        self.iterative += method.per_iteration_cost(users);
    }

    /// Cost of one iteration, if any ran.
    pub fn per_iteration(&self) -> Option<u64> {
        (self.iterations > 0).then(|| self.iterative / self.iterations)
    }

    pub fn stage1_total(&self) -> u64 {
        self.block_invert + self.transform
    }

    pub fn total(&self) -> u64 {
        self.gram_build + self.block_invert + self.transform + self.iterative
    }

    pub fn merge(&mut self, other: &FlopLedger) {
        self.gram_build += other.gram_build;
        self.block_invert += other.block_invert;
        self.transform += other.transform;
        self.iterations += other.iterations;
        self.iterative += other.iterative;
    }
}
