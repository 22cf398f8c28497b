#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use vqpe_core::operators::{parse_pauli_sum, Pauli, QubitHamiltonian};
use vqpe_core::simulator::StateVector;

/// Singlet ground energy (U − √(U² + 16t²))/2 of the dimer at t = 1, U = 0.5.
pub fn dimer_ground() -> f64 {
    (0.5 - (0.25f64 + 16.0).sqrt()) / 2.0
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn h2() -> QubitHamiltonian {
    parse_pauli_sum(&std::fs::read_to_string(data_path("h2_sto3g_0.7414.txt")).unwrap()).unwrap()
}

/// |0011⟩ with qubit 0 as the least significant bit.
pub fn h2_reference() -> StateVector {
    StateVector::basis(4, 3).unwrap()
}

fn single(p: Option<Pauli>) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match p {
        None => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Some(Pauli::X) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Some(Pauli::Y) => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Some(Pauli::Z) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Σ h_k P_k built from explicit Kronecker products, highest qubit leftmost.
pub fn kron_dense(h: &QubitHamiltonian) -> DMatrix<C> {
    let n = h.n_qubits();
    let dim = 1 << n;
    let mut out = DMatrix::<C>::zeros(dim, dim);
    for t in h.terms() {
        let mut m = DMatrix::<C>::identity(1, 1);
        for q in (0..n).rev() {
            m = m.kronecker(&single(t.word.get(q)));
        }
        out += m * t.coefficient;
    }
    out
}

/// Hermitian eigendecomposition through the real symmetric embedding
/// [[A, −B], [B, A]], which repeats every eigenvalue twice.
pub fn eigh(m: &DMatrix<C>) -> (Vec<f64>, DMatrix<C>) {
    let d = m.nrows();
    let big = DMatrix::<f64>::from_fn(2 * d, 2 * d, |r, c| {
        let (a, b) = (m[(r % d, c % d)].re, m[(r % d, c % d)].im);
        match (r < d, c < d) {
            (true, true) | (false, false) => a,
            (true, false) => -b,
            (false, true) => b,
        }
    });
    let eig = big.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::new();
    let mut vectors: Vec<DVector<C>> = Vec::new();
    for &i in &order {
        let col = eig.eigenvectors.column(i);
        let mut v = DVector::<C>::from_fn(d, |r, _| C::new(col[r], col[r + d]));
        for _ in 0..2 {
            for u in &vectors {
                let p = u.dotc(&v);
                v -= u * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-3 {
            vectors.push(v / C::new(norm, 0.0));
            values.push(eig.eigenvalues[i]);
        }
        if vectors.len() == d {
            break;
        }
    }
    (values, DMatrix::from_columns(&vectors))
}

/// e^{−iHt} from the oracle eigendecomposition.
pub fn expm(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let (vals, vecs) = eigh(h);
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C::from_polar(1.0, -e * t)),
    ));
    &vecs * phases * vecs.adjoint()
}

pub fn column(psi: &StateVector) -> DVector<C> {
    DVector::from_column_slice(psi.amplitudes())
}

/// States e^{−iH t_j}|ψ⟩ for j = 0…n−1 as columns.
pub fn krylov_states(h: &DMatrix<C>, psi: &StateVector, dt: f64, count: usize) -> Vec<DVector<C>> {
    let step = expm(h, dt);
    let mut out = vec![column(psi)];
    for _ in 1..count {
        let next = &step * out.last().unwrap();
        out.push(next);
    }
    out
}

pub fn gram(states: &[DVector<C>], op: Option<&DMatrix<C>>) -> DMatrix<C> {
    let d = states.len();
    DMatrix::from_fn(d, d, |j, k| match op {
        Some(m) => states[j].dotc(&(m * &states[k])),
        None => states[j].dotc(&states[k]),
    })
}

pub fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random Hermitian Pauli sum text on `n` qubits.
pub fn random_pauli_text(n: usize, terms: &[(f64, Vec<u8>)]) -> String {
    let mut s = format!("qubits: {n}\n");
    for (c, letters) in terms {
        let mut line = format!("{c}");
        for (q, &l) in letters.iter().enumerate().take(n) {
            match l {
                1 => line += &format!(" X{q}"),
                2 => line += &format!(" Y{q}"),
                3 => line += &format!(" Z{q}"),
                _ => {}
            }
        }
        s += &line;
        s.push('\n');
    }
    s
}
