use ncxft_core::collision::{enumerate_trajectories, EnumerationOptions};
use ncxft_core::commutant::{
    generalized_swap, solve_allowed_interactions, unitary_from_interaction,
    verify_charge_preserving,
};
use ncxft_core::gibbs::{gibbs_state, Bath, Charge};
use ncxft_core::matlin::{comm_norm, expm_hermitian, herm_eig, kron, unitary_exp, CMatrix};
use ncxft_core::qubit::{evaluate_point, qubit_table, ChargeSet, EvalOptions, QubitModelParams};
use ncxft_core::statistics::{build_distribution, negate_key, DEFAULT_EPS};
use ncxft_core::Complex64;
use proptest::prelude::*;

fn hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-2.0f64..2.0, dim * dim * 2).prop_map(move |v| {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let k = 2 * (i * dim + j);
                m[(i, j)] = Complex64::new(v[k], v[k + 1]);
            }
        }
        (&m + &m.adjoint()).scale_real(0.5)
    })
}

fn any_hermitian() -> impl Strategy<Value = CMatrix> {
    (2usize..=6).prop_flat_map(hermitian)
}

fn square(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0f64..1.0, dim * dim * 2).prop_map(move |v| {
        let mut m = CMatrix::zeros(dim);
        for (k, c) in v.chunks(2).enumerate() {
            m[(k / dim, k % dim)] = Complex64::new(c[0], c[1]);
        }
        m
    })
}

fn affinity() -> impl Strategy<Value = f64> {
    prop_oneof![-1.5f64..-0.05, 0.05f64..1.5]
}

fn qubit_params() -> impl Strategy<Value = QubitModelParams> {
    (affinity(), affinity(), affinity(), affinity(), -3.0f64..3.0)
        .prop_map(|(a, b, c, d, e)| QubitModelParams::new(a, b, c, d, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(m in any_hermitian()) {
        let e = herm_eig(&m).unwrap();
        let d = m.dim();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let v = &e.vectors;
        prop_assert!((&(&v.adjoint() * v) - &CMatrix::identity(d)).frob_norm() < 1e-12);
        let rebuilt = e.map_spectrum(|x| Complex64::new(x, 0.0));
        prop_assert!((&rebuilt - &m).frob_norm() < 1e-11 * m.frob_norm().max(1.0));
        let tr: f64 = e.values.iter().sum();
        prop_assert!((tr - m.trace().re).abs() < 1e-12 * m.frob_norm().max(1.0));
    }

    #[test]
    fn exponential_inverse(m in any_hermitian(), s in -1.0f64..1.0) {
        let p = &expm_hermitian(&m, s).unwrap() * &expm_hermitian(&m, -s).unwrap();
        prop_assert!((&p - &CMatrix::identity(m.dim())).frob_norm() < 1e-9);
    }

    #[test]
    fn unitary_group_law(h in any_hermitian(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let u1 = unitary_exp(&h, t1).unwrap();
        let u2 = unitary_exp(&h, t2).unwrap();
        let u12 = unitary_exp(&h, t1 + t2).unwrap();
        prop_assert!(u1.unitarity_residual() < 1e-11);
        prop_assert!((&(&u1 * &u2) - &u12).frob_norm() < 1e-10);
    }

    #[test]
    fn kron_mixed_product(
        a in square(2), b in square(3), c in square(2), d in square(3)
    ) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!((&lhs - &rhs).frob_norm() < 1e-12);
    }

    #[test]
    fn gibbs_state_is_a_state(q1 in hermitian(3), q2 in hermitian(3), l1 in -1.0f64..1.0, l2 in -1.0f64..1.0) {
        let bath = Bath::new(vec![Charge::new("a", q1), Charge::new("b", q2)], vec![l1, l2]).unwrap();
        let g = gibbs_state(&bath);
        prop_assert!((g.rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(g.rho.hermiticity_residual() < 1e-12);
        prop_assert!(herm_eig(&g.rho).unwrap().values[0] > 0.0);
        prop_assert!(comm_norm(&g.rho, &g.hop).unwrap() < 1e-11);
    }

    #[test]
    fn commutant_is_closed_under_combinations(
        coeffs in prop::collection::vec(-1.0f64..1.0, 2),
        tau in -2.0f64..2.0,
        l in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let charges = || vec![
            Charge::new("z", CMatrix::pauli_z()),
            Charge::new("x", CMatrix::pauli_x()),
        ];
        let a = Bath::new(charges(), vec![l[0], l[1]]).unwrap();
        let b = Bath::new(charges(), vec![l[2], l[3]]).unwrap();
        let basis = solve_allowed_interactions(&a, &b).unwrap();
        prop_assert_eq!(basis.len(), 2);
        let h = basis.iter().zip(&coeffs).fold(CMatrix::zeros(4), |acc, (m, &c)| &acc + &m.scale_real(c));
        let inter = unitary_from_interaction(&h, tau).unwrap();
        prop_assert!(verify_charge_preserving(&inter.u, &a, &b).unwrap().pass);
    }

    #[test]
    fn swap_is_always_certified(alpha in -6.0f64..6.0) {
        let q = || vec![Charge::new("z", CMatrix::pauli_z()), Charge::new("x", CMatrix::pauli_x())];
        let a = Bath::new(q(), vec![0.3, 0.2]).unwrap();
        let b = Bath::new(q(), vec![0.1, 0.9]).unwrap();
        prop_assert!(verify_charge_preserving(&generalized_swap(alpha), &a, &b).unwrap().pass);
    }

    #[test]
    fn trajectory_level_detailed_relation(p in qubit_params()) {
        let t = qubit_table(&p, ChargeSet::NonAbelian).unwrap();
        prop_assert!((t.total_probability() - 1.0).abs() < 1e-12);
        for r in t.supported() {
            let rev = t.reverse(r);
            if !rev.supported {
                prop_assert!(r.prob < 1e-10);
                continue;
            }
            let log_ratio = (r.prob / rev.prob).ln();
            prop_assert!((log_ratio - r.entropy(&t.deltas_lambda)).abs() < 1e-8);
            prop_assert!((rev.delta + r.delta).abs() < 1e-9);
        }
    }

    #[test]
    fn distribution_mass_and_near_symmetric_keys(p in qubit_params()) {
        let t = qubit_table(&p, ChargeSet::NonAbelian).unwrap();
        let dist = build_distribution(&t, DEFAULT_EPS);
        prop_assert!((dist.total() - 1.0).abs() < 1e-12);
        for (k, pk) in dist.iter() {
            if dist.get(&negate_key(k)).is_none() {
                prop_assert!(pk.prob < 1e-10);
            }
        }
    }

    #[test]
    fn sweep_point_invariants(p in qubit_params()) {
        let pt = evaluate_point(&p, ChargeSet::NonAbelian, &EvalOptions::default());
        prop_assert!(pt.is_ok());
        prop_assert!((pt.integral_ft - 1.0).abs() < 1e-10);
        prop_assert!(pt.detailed_ft_residual < 1e-8);
        prop_assert!(pt.sigma_avg >= -1e-10);
        prop_assert!(pt.relative_entropy_residual < 1e-10);
        prop_assert!(pt.tail_bound_ok);
        prop_assert!(pt.tur_min_margin.is_none_or(|m| m >= -1e-9));
        prop_assert_eq!(pt.double_inversion, pt.inversion_z && pt.inversion_x);
        if pt.double_inversion {
            prop_assert!(pt.uncorrected_second_law < 0.0 && pt.avg_delta > 0.0);
        }
    }

    #[test]
    fn swap_angle_symmetry(p in qubit_params()) {
        let opts = EvalOptions::default();
        let a = evaluate_point(&p, ChargeSet::NonAbelian, &opts);
        let b = evaluate_point(&QubitModelParams { alpha: -p.alpha, ..p }, ChargeSet::NonAbelian, &opts);
        for (x, y) in [
            (a.avg_dq_z, b.avg_dq_z),
            (a.avg_dq_x, b.avg_dq_x),
            (a.avg_delta, b.avg_delta),
            (a.sigma_avg, b.sigma_avg),
            (a.naive_ft, b.naive_ft),
            (a.uncorrected_second_law, b.uncorrected_second_law),
        ] {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn commuting_charges_have_no_correction(la in -1.0f64..1.0, lb in -1.0f64..1.0, alpha in -3.0f64..3.0) {
        prop_assume!(la.abs() > 1e-3 && lb.abs() > 1e-3);
        let bath = |l: f64| Bath::new(vec![Charge::new("z", CMatrix::pauli_z())], vec![l]).unwrap();
        let inter = ncxft_core::qubit::swap_interaction(alpha);
        let t = enumerate_trajectories(&bath(la), &bath(lb), &inter, EnumerationOptions::default()).unwrap();
        for r in t.supported() {
            prop_assert!(r.delta.abs() < 1e-12);
        }
    }
}
