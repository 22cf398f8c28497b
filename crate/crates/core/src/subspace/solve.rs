use std::f64::consts::PI;

use log::warn;
use serde::Serialize;

use super::matrices::SubspaceMatrices;
use crate::error::{Error, Result};
use crate::linalg::{eig_general, eigh, CMatrix, C64};

/// |λ| window (1 ± δ) inside which unitary-path eigenvalues are renormalized.
pub const UNITARITY_WINDOW: f64 = 0.5;

/// Columns v_i/√σ_i for the retained eigenpairs of S.
#[derive(Debug, Clone)]
pub struct Orthogonalization {
    pub basis: CMatrix,
    pub n_independent: usize,
    /// All eigenvalues of S, ascending.
    pub s_eigenvalues: Vec<f64>,
}

/// Canonical orthogonalization keeping eigenvalues of S above `threshold`.
pub fn canonical_orthogonalize(s: &CMatrix, threshold: f64) -> Orthogonalization {
    let eig = eigh(s);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > threshold).collect();
    let mut basis = CMatrix::zeros(s.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let scale = 1.0 / eig.values[i].sqrt();
        basis.set_column(c, &(eig.vectors.column(i) * C64::new(scale, 0.0)));
    }
    Orthogonalization {
        basis,
        n_independent: keep.len(),
        s_eigenvalues: eig.values,
    }
}

/// Energies, optional phases, and coefficient columns c with c†Sc = 1.
#[derive(Debug, Clone, Serialize)]
pub struct EigenSolution {
    pub energies: Vec<f64>,
    /// λ per state on the unitary path (renormalized where within the window).
    pub phases: Vec<C64>,
    /// |λ| before renormalization.
    pub phase_moduli: Vec<f64>,
    /// States whose |λ| fell outside the window.
    pub non_unitary: Vec<bool>,
    #[serde(skip)]
    pub coefficients: CMatrix,
    pub n_independent: usize,
    pub threshold: f64,
    /// Aliasing period 2π/Δt of unitary-path energies.
    pub alias_period: Option<f64>,
}

impl EigenSolution {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

fn orthogonalize_or_fail(s: &CMatrix, threshold: f64) -> Result<Orthogonalization> {
    let orth = canonical_orthogonalize(s, threshold);
    if orth.n_independent == 0 {
        return Err(Error::NoIndependentStates(threshold));
    }
    Ok(orth)
}

/// Solve Hc = εSc in the canonically orthogonalized space.
pub fn solve_hamiltonian(m: &SubspaceMatrices, threshold: f64) -> Result<EigenSolution> {
    let h = &m.h.as_ref().ok_or(Error::MissingMatrix("H"))?.value;
    let x = orthogonalize_or_fail(&m.s, threshold)?;
    let projected = x.basis.adjoint() * h * &x.basis;
    let eig = eigh(&projected);
    Ok(EigenSolution {
        energies: eig.values,
        phases: Vec::new(),
        phase_moduli: Vec::new(),
        non_unitary: Vec::new(),
        coefficients: &x.basis * eig.vectors,
        n_independent: x.n_independent,
        threshold,
        alias_period: None,
    })
}

/// Energy on the principal branch (−π/Δt, π/Δt] from λ = e^{−iεΔt}.
pub fn phase_to_energy(lambda: C64, dt: f64) -> f64 {
    let e = -lambda.arg() / dt;
    if e <= -PI / dt {
        e + 2.0 * PI / dt
    } else {
        e
    }
}

/// Solve U(Δt)c = λSc in the orthogonalized space and convert λ to ε.
pub fn solve_unitary(m: &SubspaceMatrices, threshold: f64, dt: f64) -> Result<EigenSolution> {
    let u = m.u.as_ref().ok_or(Error::MissingMatrix("U"))?;
    let x = orthogonalize_or_fail(&m.s, threshold)?;
    let projected = x.basis.adjoint() * u * &x.basis;
    let (values, vectors) = eig_general(&projected);
    let coeffs = &x.basis * vectors;

    let mut states: Vec<(f64, C64, f64, bool, usize)> = values
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let modulus = lambda.norm();
            let inside = (modulus - 1.0).abs() <= UNITARITY_WINDOW;
            if !inside {
                warn!("unitary-path eigenvalue |λ| = {modulus:.4} outside [0.5, 1.5]");
            }
            let lambda = if inside && modulus > 0.0 {
                lambda / modulus
            } else {
                lambda
            };
            (phase_to_energy(lambda, dt), lambda, modulus, !inside, i)
        })
        .collect();
    states.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.4.cmp(&b.4)));

    let mut coefficients = CMatrix::zeros(coeffs.nrows(), states.len());
    for (c, s) in states.iter().enumerate() {
        coefficients.set_column(c, &coeffs.column(s.4));
    }
    Ok(EigenSolution {
        energies: states.iter().map(|s| s.0).collect(),
        phases: states.iter().map(|s| s.1).collect(),
        phase_moduli: states.iter().map(|s| s.2).collect(),
        non_unitary: states.iter().map(|s| s.3).collect(),
        coefficients,
        n_independent: x.n_independent,
        threshold,
        alias_period: Some(2.0 * PI / dt),
    })
}

/// First-order sampling standard deviation of the Hamiltonian-path ground
/// energy, ∂ε = c†(∂H − (ε − c_I)∂S)c with independent element noise.
pub fn ground_energy_std(m: &SubspaceMatrices, sol: &EigenSolution) -> Result<f64> {
    let h = m.h.as_ref().ok_or(Error::MissingMatrix("H"))?;
    let c = sol.coefficients.column(0);
    let shift = sol.energies[0] - m.h_identity;
    let d = c.len();
    let mut var = 0.0;
    for j in 0..d {
        var += c[j].norm_sqr().powi(2) * h.var_re[(j, j)];
        for k in j + 1..d {
            let p = c[j].conj() * c[k];
            var += (2.0 * p.re).powi(2) * h.var_re[(j, k)] + (2.0 * p.im).powi(2) * h.var_im[(j, k)];
        }
    }
    if let Some(row) = &m.row {
        for lag in 0..d {
            let (mut dre, mut dim) = (0.0, 0.0);
            for j in 0..d - lag {
                let p = c[j].conj() * c[j + lag];
                if lag == 0 {
                    dre += p.re;
                } else {
                    dre += 2.0 * p.re;
                    dim -= 2.0 * p.im;
                }
            }
            let (vr, vi) = row.variances[lag];
            var += shift * shift * (dre * dre * vr + if lag == 0 { 0.0 } else { dim * dim * vi });
        }
    }
    Ok(var.sqrt())
}

/// Largest ‖Hc − εSc‖ over the returned states.
pub fn hamiltonian_residual(m: &SubspaceMatrices, sol: &EigenSolution) -> Result<f64> {
    let h = &m.h.as_ref().ok_or(Error::MissingMatrix("H"))?.value;
    Ok((0..sol.energies.len())
        .map(|i| {
            let c = sol.coefficients.column(i);
            (h * c - (&m.s * c) * C64::new(sol.energies[i], 0.0)).norm()
        })
        .fold(0.0, f64::max))
}
