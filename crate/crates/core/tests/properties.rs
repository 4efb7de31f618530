use nalgebra::Matrix4;
use proptest::prelude::*;

use plt_core::classify::{state_conditions, state_eigenvalues, Status};
use plt_core::jacobi::hermitian_eigenvalues;
use plt_core::lsvd::{compute_b, compute_d};
use plt_core::oracle::{partial_transpose, partial_transpose_matrix, random_mixed, random_separable};
use plt_core::qubit_map::{apply_plt_left, apply_plt_right, canonical_state, coefficients};
use plt_core::spacetime::{minkowski_dot, CausalClass};
use plt_core::{
    lsvd, reconstruct_a, rho_to_a, separable_decomposition, verdict, verify_decomposition, FourVector,
    LorentzTransform, MinkowskiMap, StateType, Tolerances, C64,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 96, ..ProptestConfig::default() }
}

fn four_vector() -> impl Strategy<Value = FourVector> {
    prop::array::uniform4(-3.0f64..3.0).prop_map(FourVector)
}

fn sorted_abs(mu: [f64; 4]) -> [f64; 3] {
    let mut v = [mu[1].abs(), mu[2].abs(), mu[3].abs()];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lorentz_preserves_interval(seed in any::<u64>(), u in four_vector(), v in four_vector()) {
        let l = LorentzTransform::random(seed, 3.0);
        let scale = u.euclidean_norm() * v.euclidean_norm();
        let d = minkowski_dot(&l.apply(&u), &l.apply(&v)) - minkowski_dot(&u, &v);
        // the transform itself has entries up to cosh 3
        prop_assert!(d.abs() <= 1e-10 * scale * 400.0 + 1e-12);
    }

    #[test]
    fn lorentz_preserves_future_cone(seed in any::<u64>(), x in prop::array::uniform3(-1.0f64..1.0), t in 0.0f64..2.0) {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        prop_assume!(r > 1e-3);
        let l = LorentzTransform::random(seed, 3.0);
        let timelike = FourVector::new(r + 0.1 + t, x[0], x[1], x[2]);
        let null = FourVector::new(r, x[0], x[1], x[2]);
        prop_assert_eq!(l.apply(&timelike).causal_class(1e-9), CausalClass::FutureTimelike);
        prop_assert_eq!(l.apply(&null).causal_class(1e-9), CausalClass::FutureLightlike);
    }

    #[test]
    fn lsvd_orbit_invariance(seed in any::<u64>(), rank in 1usize..=4) {
        let tol = Tolerances::default();
        let a = rho_to_a(&random_mixed(seed, rank).unwrap());
        let r0 = lsvd(&a, &tol).unwrap();
        let l = LorentzTransform::random(seed ^ 0x5eed, 2.0);
        let rr = LorentzTransform::random(seed.wrapping_add(7), 2.0);
        let b = apply_plt_right(&apply_plt_left(&a, &l).unwrap(), &rr).unwrap();
        let r1 = lsvd(&b, &tol).unwrap();
        prop_assert_eq!(r0.state_type, r1.state_type);
        prop_assert_eq!(r0.sign_class, r1.sign_class);
        let (n0, n1) = (r0.normalized_mu().unwrap(), r1.normalized_mu().unwrap());
        for k in 0..4 {
            prop_assert!((n0[k] - n1[k]).abs() <= 1e-8, "{:?} vs {:?}", n0, n1);
        }
    }

    #[test]
    fn lsvd_round_trip_and_identities(seed in any::<u64>(), rank in 1usize..=4) {
        let a = rho_to_a(&random_mixed(seed, rank).unwrap());
        let r = lsvd(&a, &Tolerances::default()).unwrap();
        let c = a.matrix();
        prop_assert!((reconstruct_a(&r).matrix() - c).norm() <= 1e-9 * c.norm());
        let (b, d) = (*compute_b(&a).matrix(), *compute_d(&a).matrix());
        for k in 0..4 {
            prop_assert!((r.lambda[k] - r.mu[k] * r.mu[k]).abs() <= 1e-9 * r.lambda[0]);
            let e = r.right_frame.leg(k).to_vector();
            let f = r.left_frame.leg(k).to_vector();
            prop_assert!((d * e - e * r.lambda[k]).norm() <= 1e-9 * d.norm());
            prop_assert!((b * f - f * r.lambda[k]).norm() <= 1e-9 * b.norm());
        }
        prop_assert!(r.left_frame.gram_defect() <= 1e-10);
        prop_assert!(r.right_frame.gram_defect() <= 1e-10);
    }

    #[test]
    fn verdict_scale_invariant(seed in any::<u64>(), rank in 1usize..=4, c in 1e-3f64..1e3) {
        let tol = Tolerances::default();
        let rho = random_mixed(seed, rank).unwrap();
        let v1 = verdict(rho.matrix(), &tol).unwrap();
        let v2 = verdict(&(rho.matrix() * C64::new(c, 0.0)), &tol).unwrap();
        prop_assert_eq!(v1.status, v2.status);
        prop_assert_eq!(v1.state_type, v2.state_type);
        let (m1, m2) = (v1.margin.unwrap(), v2.margin.unwrap());
        prop_assert!((m1 - m2).abs() <= 1e-9);
    }

    #[test]
    fn verdict_plt_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let tol = Tolerances::default();
        let rho = random_mixed(seed, rank).unwrap();
        let v0 = verdict(rho.matrix(), &tol).unwrap();
        prop_assume!(!v0.near_boundary);
        let l = LorentzTransform::random(seed.rotate_left(17), 1.5);
        let moved = plt_core::a_to_rho(&apply_plt_left(&rho_to_a(&rho), &l).unwrap());
        prop_assert_eq!(verdict(&moved, &tol).unwrap().status, v0.status);
    }

    #[test]
    fn partial_transpose_flips_sign_class(seed in any::<u64>(), rank in 1usize..=4) {
        let tol = Tolerances::default();
        let rho = random_mixed(seed, rank).unwrap();
        let r = lsvd(&rho_to_a(&rho), &tol).unwrap();
        prop_assume!(r.state_type == StateType::TypeI);
        let pt = MinkowskiMap::both_lower(coefficients(&partial_transpose(&rho)));
        // the DEC can fail for the transpose of an entangled state
        if let Ok(rt) = lsvd(&pt, &tol) {
            prop_assert_eq!(rt.state_type, StateType::TypeI);
            let (a0, a1) = (sorted_abs(r.normalized_mu().unwrap()), sorted_abs(rt.normalized_mu().unwrap()));
            for k in 0..3 {
                prop_assert!((a0[k] - a1[k]).abs() <= 1e-8, "{:?} vs {:?}", a0, a1);
            }
            prop_assert_eq!(rt.sign_class, r.sign_class.flipped());
        }
    }

    #[test]
    fn partial_transpose_is_involution(seed in any::<u64>()) {
        let rho = random_mixed(seed, 4).unwrap();
        let m = rho.matrix();
        let twice = partial_transpose_matrix(&partial_transpose_matrix(m));
        prop_assert_eq!(&twice, m);
        prop_assert_eq!(partial_transpose_matrix(m).trace(), m.trace());
    }

    #[test]
    fn state_conditions_match_spectrum(mu in prop::array::uniform3(-1.2f64..1.2)) {
        let full = [1.0, mu[0], mu[1], mu[2]];
        let ev = hermitian_eigenvalues(&canonical_state(full));
        let psd = ev[0] >= -1e-12;
        prop_assert_eq!(state_conditions(full, 1e-12), psd);
        let mut closed = state_eigenvalues(full).map(|e| e / 4.0);
        closed.sort_by(f64::total_cmp);
        for k in 0..4 {
            prop_assert!((closed[k] - ev[k]).abs() <= 1e-10);
        }
    }

    #[test]
    fn separable_states_decompose(seed in any::<u64>(), terms in 1usize..=6) {
        let tol = Tolerances::default();
        let rho = random_separable(seed, terms).unwrap();
        let v = verdict(rho.matrix(), &tol).unwrap();
        prop_assert_eq!(v.status, Status::Separable);
        let r = lsvd(&rho_to_a(&rho), &tol).unwrap();
        for all_null in [false, true] {
            let d = separable_decomposition(&r, all_null, &tol).unwrap();
            let check = verify_decomposition(&d, &rho);
            prop_assert!(check.residual <= 1e-9, "residual {}", check.residual);
            prop_assert!(check.all_factors_causal && check.weights_positive);
            prop_assert!(check.weight_defect <= 1e-10);
            // SEC on the canonical reassembly
            let k = r.canonical_coefficients();
            prop_assert!(-(k[(1, 1)] + k[(2, 2)] + k[(3, 3)]) <= k[(0, 0)] * (1.0 + 1e-10));
        }
    }

    #[test]
    fn entangled_states_refuse(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let rho = random_mixed(seed, 1).unwrap();
        let v = verdict(rho.matrix(), &tol).unwrap();
        prop_assume!(v.status == Status::Entangled && !v.near_boundary);
        let r = lsvd(&rho_to_a(&rho), &tol).unwrap();
        prop_assert!(separable_decomposition(&r, false, &tol).is_err());
        prop_assert!(hermitian_eigenvalues(&partial_transpose(&rho))[0] < 0.0);
    }
}

#[test]
fn identity_frames_round_trip() {
    let a = MinkowskiMap::both_lower(Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.2, -0.3, 0.1)));
    let r = lsvd(&a, &Tolerances::default()).unwrap();
    assert!((reconstruct_a(&r).matrix() - a.matrix()).norm() < 1e-12);
}
