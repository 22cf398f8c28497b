use crate::linalg::C64;
use crate::operators::{SpectralDecomposition, SUPPORT_CUTOFF};

use super::matrices::TimeGrid;

/// max over distinct support levels N ≠ M of |(1/(N_T+1)) Σ_j e^{−it_j(E_N − E_M)}|.
pub fn phase_cancellation_residual(spectral: &SpectralDecomposition, grid: &TimeGrid) -> f64 {
    let levels = spectral.support_levels(SUPPORT_CUTOFF);
    let times = grid.times();
    let mut worst: f64 = 0.0;
    for (a, &(en, _)) in levels.iter().enumerate() {
        for &(em, _) in &levels[a + 1..] {
            let sum: C64 = times.iter().map(|&t| C64::from_polar(1.0, -t * (en - em))).sum();
            worst = worst.max(sum.norm() / times.len() as f64);
        }
    }
    worst
}
