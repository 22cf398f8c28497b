mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use vqpe_core::operators::*;
use vqpe_core::simulator::*;
use vqpe_core::subspace::*;
use vqpe_core::vff::{ansatz_circuit, VffModel};

fn letters(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, n)
}

fn pauli_sum(n: usize, max_terms: usize) -> impl Strategy<Value = String> {
    prop::collection::vec((-2.0f64..2.0, letters(n)), 1..=max_terms).prop_map(move |t| random_pauli_text(n, &t))
}

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    letters(n).prop_map(|l| {
        PauliWord::new(l.iter().enumerate().filter_map(|(q, &c)| match c {
            1 => Some((q, Pauli::X)),
            2 => Some((q, Pauli::Y)),
            3 => Some((q, Pauli::Z)),
            _ => None,
        }))
        .unwrap()
    })
}

fn word_matrix(w: &PauliWord, n: usize) -> DMatrix<C> {
    kron_dense(&QubitHamiltonian::from_terms(n, [PauliTerm::new(1.0, w.clone())]).unwrap())
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", |v| {
        StateVector::normalized(v.into_iter().map(|(a, b)| C::new(a, b)).collect()).ok()
    })
}

fn is_unitary(u: &DMatrix<C>, tol: f64) -> bool {
    max_diff(&(u.adjoint() * u), &DMatrix::identity(u.nrows(), u.ncols())) < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn words_commute_or_anticommute(a in word(4), b in word(4)) {
        let (ma, mb) = (word_matrix(&a, 4), word_matrix(&b, 4));
        let clashes = a.factors().iter().filter(|&&(q, p)| b.get(q).is_some_and(|o| o != p)).count();
        let sign = if clashes % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(max_diff(&(&ma * &mb), &(&mb * &ma * C::new(sign, 0.0))) < 1e-14);
        let (phase, prod) = a.mul(&b);
        prop_assert!(max_diff(&(word_matrix(&prod, 4) * phase), &(ma * mb)) < 1e-14);
    }

    #[test]
    fn dense_matches_kronecker(text in pauli_sum(3, 8)) {
        let h = parse_pauli_sum(&text).unwrap();
        prop_assert!(max_diff(&dense_matrix(&h).unwrap(), &kron_dense(&h)) < 1e-13);
    }

    #[test]
    fn serialization_round_trips(text in pauli_sum(5, 10)) {
        let h = parse_pauli_sum(&text).unwrap();
        let again = parse_pauli_sum(&h.to_pauli_sum()).unwrap();
        prop_assert_eq!(&again, &h);
        for pair in h.terms().windows(2) {
            prop_assert!(pair[0].word < pair[1].word);
        }
        for t in h.terms() {
            prop_assert_eq!(t.coefficient.im, 0.0);
        }
    }

    #[test]
    fn gadgets_are_unitary_and_invert(w in word(4), theta in -6.0f64..6.0) {
        prop_assume!(!w.is_identity());
        let g = pauli_gadget(&w, theta, 4).unwrap().unitary().unwrap();
        let back = pauli_gadget(&w, -theta, 4).unwrap().unitary().unwrap();
        prop_assert!(is_unitary(&g, 1e-12));
        prop_assert!(max_diff(&(&back * &g), &DMatrix::identity(16, 16)) < 1e-12);
        prop_assert!(max_diff(&g, &expm(&word_matrix(&w, 4), theta / 2.0)) < 1e-12);
    }

    #[test]
    fn trotter_steps_are_unitary(text in pauli_sum(3, 6), dt in 0.01f64..1.0) {
        let h = parse_pauli_sum(&text).unwrap();
        let u = trotter_step(&h, dt).unwrap().unitary().unwrap();
        prop_assert!(is_unitary(&u, 1e-12));
    }

    #[test]
    fn exact_evolution_composes(text in pauli_sum(3, 6), psi in random_state(3), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let h = parse_pauli_sum(&text).unwrap().widened(3).unwrap();
        let a = exact_evolve(&h, t2, &exact_evolve(&h, t1, &psi).unwrap()).unwrap();
        let b = exact_evolve(&h, t1 + t2, &psi).unwrap();
        prop_assert!((a.inner(&b).norm() - 1.0).abs() < 1e-10);
        prop_assert!((a.inner(&b) - C::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn ansatz_conserves_particle_number(theta in prop::collection::vec(-3.0f64..3.0, 12), basis in 0usize..16) {
        let mut model = VffModel::new(4, 0.1, 1, 2).unwrap();
        let n = model.n_theta();
        model.set_theta(&theta[..n.min(theta.len())].iter().copied().chain(std::iter::repeat(0.3)).take(n).collect::<Vec<_>>());
        let w = ansatz_circuit(&model).unwrap();
        let out = apply_circuit(&w, &StateVector::basis(4, basis).unwrap()).unwrap();
        let weight = basis.count_ones();
        let leaked: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i.count_ones() != weight)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        prop_assert!(leaked < 1e-24);
    }

    #[test]
    fn overlap_matrix_is_toeplitz(entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..7)) {
        let mut e: Vec<C> = entries.into_iter().map(|(a, b)| C::new(a, b)).collect();
        e[0] = C::new(1.0, 0.0);
        let nt = e.len() - 1;
        let row = OverlapRow::from_entries(0.1, e.clone());
        let s = assemble_s(&row, nt).unwrap();
        for j in 0..=nt {
            for k in 0..=nt {
                let expected = if k >= j { e[k - j] } else { e[j - k].conj() };
                prop_assert_eq!(s[(j, k)], expected);
                prop_assert_eq!(s[(j, k)], s[(k, j)].conj());
            }
        }
    }

    #[test]
    fn solutions_satisfy_generalized_problem(text in pauli_sum(3, 6), psi in random_state(3), dt in 0.05f64..0.8, nt in 0usize..6) {
        let h = parse_pauli_sum(&text).unwrap().widened(3).unwrap();
        let prop = ExactPropagator::new(&h, dt).unwrap();
        let grid = TimeGrid::new(dt, nt).unwrap();
        let row = build_overlap_row(&prop, &psi, &grid, &MeasurementBackend::Exact).unwrap();
        let mut m = SubspaceMatrices::from_row(row, grid, Provenance::Exact, MeasurementBackend::Exact).unwrap();
        m.measure_h(&prop, &psi, &h).unwrap();
        let sol = solve_hamiltonian(&m, 1e-6).unwrap();
        let spec = spectral_decompose(&h, &psi).unwrap();
        prop_assert!(sol.n_independent <= nt + 1);
        prop_assert!(sol.n_independent <= spec.support_dimension(1e-12));
        prop_assert!(sol.energies.windows(2).all(|p| p[0] <= p[1]));
        let scale = 1.0 + h.one_norm();
        if sol.n_independent == nt + 1 {
            prop_assert!(hamiltonian_residual(&m, &sol).unwrap() < 1e-7 * scale);
        }
        let x = canonical_orthogonalize(&m.s, 1e-6).basis;
        let hm = &m.h.as_ref().unwrap().value;
        for i in 0..sol.n_independent {
            let c = sol.coefficients.column(i);
            let r = x.adjoint() * (hm * c - (&m.s * c) * C::new(sol.energies[i], 0.0));
            prop_assert!(r.norm() < 1e-8 * scale);
            let norm = (c.adjoint() * &m.s * c)[(0, 0)];
            prop_assert!((norm - C::new(1.0, 0.0)).norm() < 1e-8);
        }
        prop_assert!(sol.energies[0] >= spec.energies[0] - 1e-8);
    }
}
