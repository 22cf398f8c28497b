//! Textbook phase estimation on exact controlled powers, used as a baseline.
//!
//! Ancilla m controls e^{−iHt·2^m}, so ancilla 0 holds the least significant
//! bit of the outcome k. After the inverse Fourier transform the amplitude of
//! |k⟩ for an eigencomponent of energy E is (1/2ⁿ)Σ_j e^{−itj(ω_k + E)} with
//! ω_k = 2πk/(2ⁿt); the distribution peaks where ω_k = −E modulo 2π/t.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::operators::{QubitHamiltonian, SpectralDecomposition};
use crate::simulator::{Circuit, ExactPropagator, Gate, MeasurementBackend, Propagator, StateVector};
use crate::subspace::TimeGrid;

/// Fourier transform |j⟩ → 2^{−n/2} Σ_k e^{2πijk/2ⁿ}|k⟩, final swaps included.
pub fn qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidInput("Fourier transform needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    for q in (0..n).rev() {
        c.push(Gate::H(q))?;
        for ctl in (0..q).rev() {
            c.push(Gate::CPhase {
                control: ctl,
                target: q,
                angle: PI / (1u64 << (q - ctl)) as f64,
            })?;
        }
    }
    for a in 0..n / 2 {
        c.push(Gate::Swap(a, n - 1 - a))?;
    }
    Ok(c)
}

/// |j⟩ → 2^{−n/2} Σ_k e^{−2πijk/2ⁿ}|k⟩.
pub fn inverse_qft(n: usize) -> Result<Circuit> {
    Ok(qft(n)?.inverse())
}

/// Ancilla outcome distribution of one phase-estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct QpeResult {
    pub n_ancilla: usize,
    pub t: f64,
    pub probabilities: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl QpeResult {
    /// Outcome with the largest probability (lowest k on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = k;
            }
        }
        best
    }

    /// CSV with header `k,omega_k,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,omega_k,probability\n");
        for (k, (w, p)) in self.omegas.iter().zip(&self.probabilities).enumerate() {
            let _ = writeln!(out, "{k},{w},{p}");
        }
        out
    }
}

/// ω_k = 2πk/(2ⁿt).
pub fn omega_grid(n_ancilla: usize, t: f64) -> Vec<f64> {
    let size = 1usize << n_ancilla;
    (0..size).map(|k| 2.0 * PI * k as f64 / (size as f64 * t)).collect()
}

fn check_args(n_ancilla: usize, t: f64) -> Result<()> {
    if n_ancilla == 0 || n_ancilla > 16 {
        return Err(Error::InvalidInput(format!("ancilla count {n_ancilla} outside 1..=16")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidInput(format!("evolution time must be positive, got {t}")));
    }
    Ok(())
}

/// Simulate the full phase-estimation circuit and read the ancilla register.
pub fn run_qpe(
    h: &QubitHamiltonian,
    psi: &StateVector,
    n_ancilla: usize,
    t: f64,
    backend: &MeasurementBackend,
) -> Result<QpeResult> {
    check_args(n_ancilla, t)?;
    let n = h.n_qubits();
    if psi.n_qubits() != n {
        return Err(Error::WireMismatch {
            expected: n,
            got: psi.n_qubits(),
        });
    }
    crate::operators::check_limit(n + n_ancilla, crate::operators::DEFAULT_ORACLE_LIMIT + 4)?;
    let prop = ExactPropagator::new(h, t)?;
    let mut reg = psi.with_ancillas(n_ancilla);
    for m in 0..n_ancilla {
        Gate::H(n + m).apply(reg.amplitudes_mut());
    }
    for m in 0..n_ancilla {
        prop.apply_power(&mut reg, 1i64 << m, Some(n + m))?;
    }
    inverse_qft(n_ancilla)?.shifted(n, n + n_ancilla)?.apply(&mut reg)?;
    let exact = reg.marginal_high(n);

    let probabilities = match *backend {
        MeasurementBackend::Exact => exact,
        MeasurementBackend::Shots { shots, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dist = WeightedIndex::new(&exact).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let mut counts = vec![0u64; exact.len()];
            for _ in 0..shots {
                counts[dist.sample(&mut rng)] += 1;
            }
            counts.iter().map(|&c| c as f64 / shots as f64).collect()
        }
    };
    Ok(QpeResult {
        n_ancilla,
        t,
        probabilities,
        omegas: omega_grid(n_ancilla, t),
    })
}

/// P(k) = Σ_N |φ_N|² |(1/2ⁿ)Σ_j e^{−itj(ω_k + E_N)}|².
pub fn analytic_distribution(spectral: &SpectralDecomposition, n_ancilla: usize, t: f64) -> Result<Vec<f64>> {
    check_args(n_ancilla, t)?;
    let size = 1usize << n_ancilla;
    let weights = spectral.weights();
    Ok(omega_grid(n_ancilla, t)
        .iter()
        .map(|&w| {
            spectral
                .energies
                .iter()
                .zip(&weights)
                .map(|(&e, &p)| {
                    let sum: C64 = (0..size).map(|j| C64::from_polar(1.0, -t * j as f64 * (w + e))).sum();
                    p * (sum / size as f64).norm_sqr()
                })
                .sum()
        })
        .collect())
}

/// Fourier combinations |ω_k⟩ = (N_T+1)^{−1/2} Σ_j e^{−iω_k t_j}|φ_j⟩ of exactly
/// evolved states. Returns the larger of (a) the deviation of their Gram
/// matrix from F†SF and (b) the deviation of ‖ω_k‖²/(N_T+1) from the
/// simulated phase-estimation distribution with t = Δt.
pub fn fourier_basis_check(h: &QubitHamiltonian, psi: &StateVector, grid: &TimeGrid) -> Result<f64> {
    let size = grid.dim();
    if !size.is_power_of_two() || size < 2 {
        return Err(Error::InvalidInput(format!(
            "N_T + 1 = {size} must be a power of two ≥ 2"
        )));
    }
    let n_anc = size.trailing_zeros() as usize;
    let prop = ExactPropagator::new(h, grid.dt)?;
    let phis: Vec<StateVector> = (0..size as i64).map(|j| prop.evolve(psi, j)).collect::<Result<_>>()?;
    let omegas = omega_grid(n_anc, grid.dt);
    let norm = 1.0 / (size as f64).sqrt();
    let f = CMatrix::from_fn(size, size, |j, k| C64::from_polar(norm, -omegas[k] * grid.times()[j]));
    let s = CMatrix::from_fn(size, size, |j, k| phis[j].inner(&phis[k]));

    let dim = psi.dim();
    let omega_states: Vec<Vec<C64>> = (0..size)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            for (j, phi) in phis.iter().enumerate() {
                for (vi, a) in v.iter_mut().zip(phi.amplitudes()) {
                    *vi += f[(j, k)] * a;
                }
            }
            v
        })
        .collect();
    let gram = CMatrix::from_fn(size, size, |k, l| {
        omega_states[k]
            .iter()
            .zip(&omega_states[l])
            .map(|(a, b)| a.conj() * b)
            .sum()
    });
    let implied = f.adjoint() * s * &f;
    let gram_dev = crate::linalg::max_abs_diff(&gram, &implied);

    let qpe = run_qpe(h, psi, n_anc, grid.dt, &MeasurementBackend::Exact)?;
    let prob_dev = (0..size)
        .map(|k| (gram[(k, k)].re / size as f64 - qpe.probabilities[k]).abs())
        .fold(0.0, f64::max);
    Ok(gram_dev.max(prob_dev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::operators::{hubbard_model, parse_pauli_sum, spectral_decompose};

    #[test]
    fn single_qubit_transform_is_hadamard() {
        assert_eq!(inverse_qft(1).unwrap().gates(), &[Gate::H(0)]);
    }

    #[test]
    fn matches_dft_matrix() {
        for n in 1..=4 {
            let size = 1usize << n;
            let want = CMatrix::from_fn(size, size, |k, j| {
                C64::from_polar(1.0 / (size as f64).sqrt(), -2.0 * PI * (j * k) as f64 / size as f64)
            });
            let got = inverse_qft(n).unwrap().unitary().unwrap();
            assert!(max_abs_diff(&got, &want) < 1e-12, "n = {n}");
            let round = got * qft(n).unwrap().unitary().unwrap();
            assert!(max_abs_diff(&round, &CMatrix::identity(size, size)) < 1e-12);
        }
    }

    #[test]
    fn exactly_representable_phase() {
        let t = 0.7;
        let h = parse_pauli_sum(&format!("{}\n{} Z0", PI / (2.0 * t), -PI / (2.0 * t))).unwrap();
        let psi = StateVector::basis(1, 1).unwrap();
        let r = run_qpe(&h, &psi, 2, t, &MeasurementBackend::Exact).unwrap();
        let k = r.mode();
        assert!((r.probabilities[k] - 1.0).abs() < 1e-12);
        let e = PI / t;
        let period = 2.0 * PI / t;
        assert!(((r.omegas[k] + e).rem_euclid(period)).min(period - (r.omegas[k] + e).rem_euclid(period)) < 1e-12);
    }

    #[test]
    fn circuit_matches_analytic() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let psi = StateVector::hartree_fock(4, 2).unwrap();
        let spec = spectral_decompose(&h, &psi).unwrap();
        for n in 1..=4 {
            let r = run_qpe(&h, &psi, n, 0.37, &MeasurementBackend::Exact).unwrap();
            let a = analytic_distribution(&spec, n, 0.37).unwrap();
            assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            for (p, q) in r.probabilities.iter().zip(&a) {
                assert!((p - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fourier_check_small() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let psi = StateVector::hartree_fock(4, 2).unwrap();
        for nt in [1, 3] {
            let dev = fourier_basis_check(&h, &psi, &TimeGrid::new(0.2, nt).unwrap()).unwrap();
            assert!(dev < 1e-10, "{dev}");
        }
        assert!(fourier_basis_check(&h, &psi, &TimeGrid::new(0.2, 2).unwrap()).is_err());
    }

    #[test]
    fn csv_header() {
        let h = parse_pauli_sum("1.0 Z0").unwrap();
        let r = run_qpe(
            &h,
            &StateVector::basis(1, 0).unwrap(),
            1,
            1.0,
            &MeasurementBackend::Exact,
        )
        .unwrap();
        assert!(r.to_csv().starts_with("k,omega_k,probability\n0,0,"));
    }
}
