use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{C64, ONE};

/// Single-qubit Pauli factor. Identity factors are never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product of two single-qubit Paulis as (phase, result); `None` is identity.
    fn mul(self, other: Pauli) -> (C64, Option<Pauli>) {
        use Pauli::*;
        let i = C64::new(0.0, 1.0);
        match (self, other) {
            (a, b) if a == b => (ONE, None),
            (X, Y) => (i, Some(Z)),
            (Y, X) => (-i, Some(Z)),
            (Y, Z) => (i, Some(X)),
            (Z, Y) => (-i, Some(X)),
            (Z, X) => (i, Some(Y)),
            (X, Z) => (-i, Some(Y)),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of non-identity Paulis, sorted by qubit index.
///
/// The derived ordering (qubit index first, then X < Y < Z) is the canonical
/// lexicographic word order used for serialization and Trotter sequencing.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord(Vec<(usize, Pauli)>);

impl PauliWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Build from (qubit, factor) pairs. Returns `None` if a qubit repeats.
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>) -> Option<Self> {
        let mut v: Vec<(usize, Pauli)> = factors.into_iter().collect();
        v.sort_by_key(|&(q, _)| q);
        if v.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(Self(v))
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        Self(vec![(qubit, p)])
    }

    /// Z on every qubit whose bit is set in `mask`.
    pub fn z_mask(mask: u64) -> Self {
        Self((0..64).filter(|q| mask >> q & 1 == 1).map(|q| (q, Pauli::Z)).collect())
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.0.last().map(|&(q, _)| q)
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.0
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.0[i].1)
    }

    /// Bit masks (x, z): X sets x, Z sets z, Y sets both.
    pub fn masks(&self) -> (u64, u64) {
        let (mut x, mut z) = (0u64, 0u64);
        for &(q, p) in &self.0 {
            match p {
                Pauli::X => x |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                Pauli::Z => z |= 1 << q,
            }
        }
        (x, z)
    }

    /// Action on a computational basis state: P|b⟩ = phase·|b'⟩.
    pub fn apply_to_basis(&self, b: usize) -> (C64, usize) {
        let mut phase = ONE;
        let mut out = b;
        for &(q, p) in &self.0 {
            let bit = b >> q & 1;
            match p {
                Pauli::X => out ^= 1 << q,
                Pauli::Y => {
                    out ^= 1 << q;
                    phase *= if bit == 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    };
                }
                Pauli::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (phase, out)
    }

    /// Operator product self·other = phase·word.
    pub fn mul(&self, other: &PauliWord) -> (C64, PauliWord) {
        let mut phase = ONE;
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(qa, pa)), Some(&(qb, pb))) if qa == qb => {
                    let (ph, p) = pa.mul(pb);
                    phase *= ph;
                    if let Some(p) = p {
                        out.push((qa, p));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(qa, pa)), Some(&(qb, _))) if qa < qb => {
                    out.push((qa, pa));
                    i += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (phase, PauliWord(out))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(q, p)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliWord {
    type Err = String;

    /// Whitespace-separated factors such as `X0 Y3`; empty text is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut factors = Vec::new();
        for tok in s.split_whitespace() {
            let mut chars = tok.chars();
            let pauli = chars
                .next()
                .and_then(Pauli::from_letter)
                .ok_or_else(|| format!("invalid Pauli factor '{tok}'"))?;
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| format!("invalid qubit index in '{tok}'"))?;
            factors.push((q, pauli));
        }
        PauliWord::new(factors).ok_or_else(|| "qubit repeated within a word".to_string())
    }
}

/// A weighted Pauli word h·P.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: C64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<C64>, word: PauliWord) -> Self {
        Self {
            coefficient: coefficient.into(),
            word,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_follow_pauli_algebra() {
        let x = PauliWord::single(0, Pauli::X);
        let y = PauliWord::single(0, Pauli::Y);
        let (ph, w) = x.mul(&y);
        assert_eq!(w, PauliWord::single(0, Pauli::Z));
        assert_eq!(ph, C64::new(0.0, 1.0));
        let (ph, w) = x.mul(&x);
        assert!(w.is_identity());
        assert_eq!(ph, ONE);
    }

    #[test]
    fn repeated_qubit_rejected() {
        assert!(PauliWord::new([(0, Pauli::X), (0, Pauli::Z)]).is_none());
    }

    #[test]
    fn display_is_space_separated() {
        let w = PauliWord::new([(3, Pauli::Y), (0, Pauli::Z)]).unwrap();
        assert_eq!(w.to_string(), "Z0 Y3");
    }
}
