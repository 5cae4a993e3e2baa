use proptest::prelude::*;
use trotter_lowenergy::bounds::{error_decomposition, Verdict};
use trotter_lowenergy::pauli::{heisenberg_chain, tfim_chain, Boundary, Letter, ModelFile, PauliString};
use trotter_lowenergy::spectral::spectral_norm;
use trotter_lowenergy::{Dense, Hamiltonian, Hamiltonian32, Schedule, Schedule32};

fn pauli(n: usize, codes: &[u8]) -> PauliString {
    let letters: Vec<(usize, Letter)> = codes
        .iter()
        .enumerate()
        .filter_map(|(q, c)| match c % 4 {
            1 => Some((q, Letter::X)),
            2 => Some((q, Letter::Y)),
            3 => Some((q, Letter::Z)),
            _ => None,
        })
        .collect();
    PauliString::from_letters(n, &letters).unwrap()
}

fn codes(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, n)
}

proptest! {
    #[test]
    fn pauli_products_associate(a in codes(5), b in codes(5), c in codes(5)) {
        let (pa, pb, pc) = (pauli(5, &a), pauli(5, &b), pauli(5, &c));
        let (ph1, ab) = pa.product(&pb).unwrap();
        let (ph2, left) = ab.product(&pc).unwrap();
        let (ph3, bc) = pb.product(&pc).unwrap();
        let (ph4, right) = pa.product(&bc).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(ph1 * ph2, ph3 * ph4);
        let (sq, id) = pa.product(&pa).unwrap();
        prop_assert!(id.is_identity());
        prop_assert_eq!(sq.power(), 0);
        prop_assert_eq!(pa.commutes_with(&pb), pb.commutes_with(&pa));
    }

    #[test]
    fn formulas_are_unitary(j in 0.2f64..2.0, h in 0.2f64..2.0, s in 0.001f64..0.5) {
        let ham = tfim_chain(4, j, h, Boundary::Open).unwrap();
        let model = Dense::new(&ham).unwrap();
        for f in [Schedule::lie_trotter(2).unwrap(), Schedule::suzuki(4, 2).unwrap()] {
            let w = model.apply_formula(&f, s).unwrap();
            let id = nalgebra::DMatrix::identity(16, 16);
            prop_assert!(spectral_norm(&(w.adjoint() * &w - id)) < 1e-10);
            prop_assert!(model.step_error(&f, s).unwrap() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn decomposition_obeys_triangle(pct in 0.0f64..100.0, gap in 0.0f64..6.0, s in 0.001f64..0.3) {
        let ham = heisenberg_chain(4, 1.0, Boundary::Open, false).unwrap();
        let model = Dense::new(&ham).unwrap();
        let delta = model.spectrum().percentile_energy(pct).unwrap();
        let d = error_decomposition(&model, &Schedule::strang(2).unwrap(), s, delta, delta + gap).unwrap();
        prop_assert!(d.triangle_holds());
        prop_assert!(d.leakage <= 1.0 + 1e-12);
        prop_assert!(d.retained <= d.eps + d.leakage + 1e-12);
    }

    #[test]
    fn verdicts_follow_the_numbers(m in 0.0f64..2.0, b in 0.0f64..2.0) {
        let v = Verdict::compare(m, Some(b));
        prop_assert_eq!(v == Verdict::Pass, m <= b + 1e-12);
        prop_assert_eq!(Verdict::compare(m, None), Verdict::Na);
    }
}

#[test]
fn model_file_round_trips_through_json() {
    let h: Hamiltonian = heisenberg_chain(6, 0.75, Boundary::Periodic, true).unwrap();
    let text = serde_json::to_string(&h.to_model_file()).unwrap();
    let file: ModelFile = serde_json::from_str(&text).unwrap();
    let back: Hamiltonian = file.build(12).unwrap();
    assert_eq!(back.params(), h.params());
    assert!(spectral_norm(&(back.dense().unwrap() - h.dense().unwrap())) < 1e-14);
}

#[test]
fn single_precision_tracks_double() {
    let h32: Hamiltonian32 = tfim_chain(4, 1.0f32, 0.8, Boundary::Open).unwrap();
    let h64: Hamiltonian = tfim_chain(4, 1.0, 0.8, Boundary::Open).unwrap();
    let m32 = trotter_lowenergy::formulas::DenseModel::new(&h32).unwrap();
    let m64 = Dense::new(&h64).unwrap();
    for (a, b) in m32.spectrum().eigenvalues().iter().zip(m64.spectrum().eigenvalues()) {
        assert!((f64::from(*a) - b).abs() < 1e-4);
    }
    let e32 = m32.step_error(&Schedule32::strang(2).unwrap(), 0.05).unwrap();
    let e64 = m64.step_error(&Schedule::strang(2).unwrap(), 0.05).unwrap();
    assert!((f64::from(e32) - e64).abs() < 1e-5, "{e32} vs {e64}");
}
