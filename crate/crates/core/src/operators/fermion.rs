//! Second-quantized operators and their Jordan–Wigner image.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::hamiltonian::QubitHamiltonian;
use super::pauli::{Pauli, PauliWord};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// A real-weighted fermionic term in physicist ordering.
///
/// `OneBody { p, q }` is f·a†_p a_q; `TwoBody { p, q, r, s }` is
/// h·a†_p a†_q a_r a_s. No index symmetry is assumed: callers supply every
/// term they want, including Hermitian conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FermionTerm {
    OneBody {
        p: usize,
        q: usize,
        coeff: f64,
    },
    TwoBody {
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        coeff: f64,
    },
}

impl FermionTerm {
    fn indices(&self) -> Vec<usize> {
        match *self {
            FermionTerm::OneBody { p, q, .. } => vec![p, q],
            FermionTerm::TwoBody { p, q, r, s, .. } => vec![p, q, r, s],
        }
    }
}

type PauliSum = BTreeMap<PauliWord, C64>;

/// a†_j (creation = true) or a_j as a Pauli sum:
/// Z_0…Z_{j−1} ⊗ ½(X_j ∓ iY_j).
fn ladder(j: usize, creation: bool) -> PauliSum {
    let string: Vec<(usize, Pauli)> = (0..j).map(|i| (i, Pauli::Z)).collect();
    let with = |p: Pauli| {
        let mut f = string.clone();
        f.push((j, p));
        PauliWord::new(f).unwrap()
    };
    let sign = if creation { -1.0 } else { 1.0 };
    let mut out = PauliSum::new();
    out.insert(with(Pauli::X), C64::new(0.5, 0.0));
    out.insert(with(Pauli::Y), C64::new(0.0, 0.5 * sign));
    out
}

fn product(a: &PauliSum, b: &PauliSum) -> PauliSum {
    let mut out = PauliSum::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let (phase, w) = wa.mul(wb);
            *out.entry(w).or_default() += ca * cb * phase;
        }
    }
    out.retain(|_, c| c.norm() > 1e-15);
    out
}

/// Map fermionic terms onto qubits with the Jordan–Wigner encoding,
/// spin-orbital i on qubit i.
pub fn jordan_wigner(terms: &[FermionTerm], n_spin_orbitals: usize) -> Result<QubitHamiltonian> {
    let mut total = PauliSum::new();
    for term in terms {
        for idx in term.indices() {
            if idx >= n_spin_orbitals {
                return Err(Error::IndexOutOfRange {
                    what: "spin-orbitals",
                    index: idx,
                    size: n_spin_orbitals,
                });
            }
        }
        let (coeff, ops): (f64, Vec<(usize, bool)>) = match *term {
            FermionTerm::OneBody { p, q, coeff } => (coeff, vec![(p, true), (q, false)]),
            FermionTerm::TwoBody { p, q, r, s, coeff } => (coeff, vec![(p, true), (q, true), (r, false), (s, false)]),
        };
        let mut acc = PauliSum::new();
        acc.insert(PauliWord::identity(), C64::new(coeff, 0.0));
        for (j, creation) in ops {
            acc = product(&acc, &ladder(j, creation));
        }
        for (w, c) in acc {
            *total.entry(w).or_default() += c;
        }
    }
    QubitHamiltonian::from_combined(n_spin_orbitals, total)
}

/// Open-chain Hubbard model on `n_sites` sites, interleaved spin ordering
/// (qubit 2i = site i up, 2i+1 = site i down):
/// −t Σ_{⟨ij⟩σ}(a†_{iσ}a_{jσ} + h.c.) + U Σ_i n_{i↑}n_{i↓}.
pub fn hubbard_model(n_sites: usize, t: f64, u: f64) -> Result<QubitHamiltonian> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("Hubbard model needs at least one site".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n_sites.saturating_sub(1) {
        let j = i + 1;
        for spin in 0..2 {
            let (a, b) = (2 * i + spin, 2 * j + spin);
            terms.push(FermionTerm::OneBody { p: a, q: b, coeff: -t });
            terms.push(FermionTerm::OneBody { p: b, q: a, coeff: -t });
        }
    }
    for i in 0..n_sites {
        let (up, down) = (2 * i, 2 * i + 1);
        // a†_up a†_down a_down a_up = n_up n_down
        terms.push(FermionTerm::TwoBody {
            p: up,
            q: down,
            r: down,
            s: up,
            coeff: u,
        });
    }
    jordan_wigner(&terms, 2 * n_sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli::PauliTerm;

    fn word(f: &[(usize, Pauli)]) -> PauliWord {
        PauliWord::new(f.iter().copied()).unwrap()
    }

    #[test]
    fn number_operator() {
        let h = jordan_wigner(&[FermionTerm::OneBody { p: 0, q: 0, coeff: 1.0 }], 1).unwrap();
        let expected = QubitHamiltonian::from_terms(
            1,
            [
                PauliTerm::new(0.5, PauliWord::identity()),
                PauliTerm::new(-0.5, word(&[(0, Pauli::Z)])),
            ],
        )
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn hopping_pair() {
        let h = jordan_wigner(
            &[
                FermionTerm::OneBody { p: 0, q: 1, coeff: 1.0 },
                FermionTerm::OneBody { p: 1, q: 0, coeff: 1.0 },
            ],
            2,
        )
        .unwrap();
        let expected = QubitHamiltonian::from_terms(
            2,
            [
                PauliTerm::new(0.5, word(&[(0, Pauli::X), (1, Pauli::X)])),
                PauliTerm::new(0.5, word(&[(0, Pauli::Y), (1, Pauli::Y)])),
            ],
        )
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn lone_hopping_is_not_hermitian() {
        let err = jordan_wigner(&[FermionTerm::OneBody { p: 0, q: 1, coeff: 1.0 }], 2).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn empty_terms() {
        let h = jordan_wigner(&[], 3).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.n_qubits(), 3);
    }

    #[test]
    fn index_out_of_range() {
        let err = jordan_wigner(&[FermionTerm::OneBody { p: 0, q: 4, coeff: 1.0 }], 4).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 4, .. }));
    }

    #[test]
    fn dimer_term_count() {
        // 4 hopping strings, 4 single Z, 2 ZZ, identity
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        assert_eq!(h.n_qubits(), 4);
        assert_eq!(h.len(), 11);
        assert!((h.identity_coefficient() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_site_without_interaction_is_zero() {
        let h = hubbard_model(1, 1.0, 0.0).unwrap();
        assert!(h.is_empty());
        assert!(hubbard_model(0, 1.0, 1.0).is_err());
    }
}
