use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::pauli::{Pauli, PauliTerm, PauliWord};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Coefficients below this modulus are dropped after combining duplicates.
pub const PRUNE_TOLERANCE: f64 = 1e-12;
/// Largest imaginary part tolerated on a combined coefficient.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Hermitian sum of weighted Pauli words, H = Σ_k h_k P_k.
///
/// Terms are kept in canonical word order with duplicates combined and all
/// coefficients real.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl QubitHamiltonian {
    /// Combine duplicate words, prune, and check Hermiticity and wire range.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut combined: BTreeMap<PauliWord, C64> = BTreeMap::new();
        for t in terms {
            if let Some(q) = t.word.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::IndexOutOfRange {
                        what: "qubits",
                        index: q,
                        size: n_qubits,
                    });
                }
            }
            *combined.entry(t.word).or_default() += t.coefficient;
        }
        Self::from_combined(n_qubits, combined)
    }

    pub(crate) fn from_combined(n_qubits: usize, combined: BTreeMap<PauliWord, C64>) -> Result<Self> {
        let mut terms = Vec::with_capacity(combined.len());
        for (word, c) in combined {
            if c.norm() < PRUNE_TOLERANCE {
                continue;
            }
            if c.im.abs() > HERMITIAN_TOLERANCE {
                return Err(Error::NonHermitian {
                    word: if word.is_identity() {
                        "I".into()
                    } else {
                        word.to_string()
                    },
                    imag: c.im,
                });
            }
            terms.push(PauliTerm::new(c.re, word));
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity word, zero if absent.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.word.is_identity())
            .map_or(0.0, |t| t.coefficient.re)
    }

    /// Terms with a non-empty word, in canonical order.
    pub fn non_identity_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| !t.word.is_identity())
    }

    /// Σ|h_k| over all terms.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    /// Same terms on a wider register.
    pub fn widened(&self, n_qubits: usize) -> Result<Self> {
        Self::from_terms(n_qubits, self.terms.iter().cloned())
    }

    /// Text serialization: `qubits: N` header, then one term per line in
    /// canonical word order. Coefficients use the shortest round-trip form.
    pub fn to_pauli_sum(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits: {}", self.n_qubits);
        for t in &self.terms {
            if t.word.is_identity() {
                let _ = writeln!(out, "{}", t.coefficient.re);
            } else {
                let _ = writeln!(out, "{} {}", t.coefficient.re, t.word);
            }
        }
        out
    }
}

/// Parse the Pauli-sum text format.
///
/// ```text
/// # comment
/// qubits: 4
/// -0.0988
/// 0.1712 Z0
/// (0.5,0.0) X0 Y1
/// ```
pub fn parse_pauli_sum(text: &str) -> Result<QubitHamiltonian> {
    let mut declared: Option<usize> = None;
    let mut combined: BTreeMap<PauliWord, C64> = BTreeMap::new();
    let mut max_qubit: Option<usize> = None;
    let mut seen_term = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("qubits:") {
            if seen_term || declared.is_some() {
                return Err(err("qubit header must precede all terms and appear once".into()));
            }
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|e| err(format!("bad qubit count: {e}")))?;
            declared = Some(n);
            continue;
        }
        seen_term = true;

        let (coeff, rest) = split_coefficient(line).map_err(err)?;
        let mut factors = Vec::new();
        for tok in rest.split_whitespace() {
            let mut chars = tok.chars();
            let letter = chars.next().unwrap();
            let pauli = Pauli::from_letter(letter).ok_or_else(|| err(format!("invalid Pauli factor '{tok}'")))?;
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| err(format!("invalid qubit index in '{tok}'")))?;
            if let Some(n) = declared {
                if q >= n {
                    return Err(err(format!("qubit {q} exceeds declared count {n}")));
                }
            }
            max_qubit = Some(max_qubit.map_or(q, |m| m.max(q)));
            factors.push((q, pauli));
        }
        let word = PauliWord::new(factors).ok_or_else(|| err("qubit repeated within a term".into()))?;
        *combined.entry(word).or_default() += coeff;
    }

    let n_qubits = declared.unwrap_or_else(|| max_qubit.map_or(0, |m| m + 1));
    QubitHamiltonian::from_combined(n_qubits, combined)
}

fn split_coefficient(line: &str) -> std::result::Result<(C64, &str), String> {
    if let Some(body) = line.strip_prefix('(') {
        let close = body.find(')').ok_or("unterminated complex coefficient")?;
        let (inner, rest) = body.split_at(close);
        let mut parts = inner.split(',');
        let re = parts.next().map(str::trim).unwrap_or("");
        let im = parts
            .next()
            .map(str::trim)
            .ok_or("complex coefficient needs '(re,im)'")?;
        if parts.next().is_some() {
            return Err("complex coefficient needs '(re,im)'".into());
        }
        let re: f64 = re.parse().map_err(|_| format!("bad real part '{re}'"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
        Ok((C64::new(re, im), &rest[1..]))
    } else {
        let (tok, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let re: f64 = tok.parse().map_err(|_| format!("bad coefficient '{tok}'"))?;
        if !re.is_finite() {
            return Err(format!("non-finite coefficient '{tok}'"));
        }
        Ok((C64::new(re, 0.0), rest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_combine() {
        let h = parse_pauli_sum("0.5 Z0\n0.5 Z0\n").unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.terms()[0].coefficient, C64::new(1.0, 0.0));
        assert_eq!(h.terms()[0].word, PauliWord::single(0, Pauli::Z));
    }

    #[test]
    fn two_qubit_term() {
        let h = parse_pauli_sum("-1.0 X0 X1").unwrap();
        assert_eq!(h.n_qubits(), 2);
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn bad_letter_reports_line() {
        match parse_pauli_sum("0.5 Q3") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn header_bounds_indices() {
        let err = parse_pauli_sum("qubits: 2\n# fine\n1.0 Z0\n\n1.0 X2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        let h = parse_pauli_sum("qubits: 6\n1.0 Z0\n").unwrap();
        assert_eq!(h.n_qubits(), 6);
    }

    #[test]
    fn imaginary_coefficient_rejected() {
        let err = parse_pauli_sum("(0.0,0.5) X0 Y1").unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
        let h = parse_pauli_sum("(0.25,0.0) X0 Y1\n(0.25, 1e-14) X0 Y1").unwrap();
        assert_eq!(h.terms()[0].coefficient.im, 0.0);
    }

    #[test]
    fn identity_and_comments() {
        let h = parse_pauli_sum("# header\n-0.75   # constant\n0.1 Z1 # tail\n").unwrap();
        assert_eq!(h.identity_coefficient(), -0.75);
        assert_eq!(h.n_qubits(), 2);
    }

    #[test]
    fn serialization_sorted() {
        let h = parse_pauli_sum("1 Z1\n2 X0\n3\n4 Z0 Z1").unwrap();
        assert_eq!(h.to_pauli_sum(), "qubits: 2\n3\n2 X0\n4 Z0 Z1\n1 Z1\n");
    }

    #[test]
    fn pruning_removes_cancellations() {
        let h = parse_pauli_sum("0.5 Z0\n-0.5 Z0\n1 X1").unwrap();
        assert_eq!(h.len(), 1);
    }
}
