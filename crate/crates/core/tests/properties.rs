use catfield::dissipation::{
    decoherence_time_analytic, evolve_master, squeezed_cat_moments, MasterOptions, ReservoirParams,
};
use catfield::engineering::{prepare_cat, EngineeringOptions, ProtocolConfig};
use catfield::fock::{annihilation_matrix, expectation, wigner, DensityMatrix, FockState, GridSpec};
use catfield::optimizer::{maximize_tau, tau_objective, SearchConfig};
use catfield::squeeze::{
    dispersive_weak_detail, integrate_bogoliubov, integrate_characteristic, resonant_solution, Branch,
    CharacteristicOptions, DriveConfig,
};
use catfield::{angle_diff, C64};
use proptest::prelude::*;

const TAU: f64 = std::f64::consts::TAU;

fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| C64::new(re, im))
}

/// Normalized state supported on the lowest `k` levels of a `dim`-level space.
fn low_state(k: usize, dim: usize) -> impl Strategy<Value = FockState> {
    prop::collection::vec(complex(1.0), k)
        .prop_filter("non-zero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let mut amps: Vec<C64> = v.iter().map(|c| c / norm).collect();
            amps.resize(dim, C64::new(0.0, 0.0));
            FockState::from_amplitudes(amps).unwrap()
        })
}

/// Squeeze parameter with `|ε| < r_max`.
fn squeeze_param(r_max: f64) -> impl Strategy<Value = C64> {
    (0.0..r_max, 0.0..TAU).prop_map(|(r, phi)| C64::from_polar(r, phi))
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

fn resonant_drive() -> impl Strategy<Value = DriveConfig> {
    (0.3f64..2.0, 0.01f64..0.2).prop_map(|(omega, kappa)| DriveConfig::resonant(omega, 0.0, kappa, 0.0, 0.0, 0.0, 0.0))
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn unitary_operations_keep_the_norm(
        psi in low_state(8, 96),
        eps in squeeze_param(0.5),
        theta in complex(1.5),
        beta in -10.0f64..10.0,
    ) {
        for out in [psi.apply_squeeze(eps).unwrap(), psi.apply_displacement(theta).unwrap(), psi.apply_rotation(beta)] {
            prop_assert!((out.norm() - 1.0).abs() < 1e-10, "norm {}", out.norm());
        }
    }

    #[test]
    fn squeeze_is_undone_by_its_inverse(psi in low_state(8, 128), eps in squeeze_param(0.5)) {
        let back = psi.apply_squeeze(eps).unwrap().apply_squeeze(-eps).unwrap();
        let f = back.fidelity(&psi).unwrap();
        prop_assert!(1.0 - f < 1e-8, "fidelity {f}");
    }

    #[test]
    fn expectation_is_conjugate_symmetric(psi in low_state(10, 24), w in complex(1.0), z in complex(1.0)) {
        let a = annihilation_matrix(24).unwrap();
        let o = &a * &a * w + a.adjoint() * z + &a;
        prop_assert_eq!(expectation(&psi, &o.adjoint()).unwrap(), expectation(&psi, &o).unwrap().conj());
        let rho = psi.to_density();
        prop_assert_eq!(expectation(&rho, &o.adjoint()).unwrap(), expectation(&rho, &o).unwrap().conj());
    }

    #[test]
    fn prepared_cats_are_normalized(
        amp in 0.5f64..1.5,
        arg in 0.0f64..TAU,
        mix in 0.2f64..1.4,
        rel in 0.0f64..TAU,
        detected in 1u8..=2,
    ) {
        let cfg = DriveConfig::resonant(1.0, 1.0, 0.05, 0.0, 4.0, 4.0 + std::f64::consts::FRAC_PI_2, 6.0);
        let p = ProtocolConfig {
            alpha: C64::from_polar(amp, arg),
            c1: C64::new(mix.cos(), 0.0),
            c2: C64::from_polar(mix.sin(), rel),
            detected,
            target_theta: None,
        };
        let opts = EngineeringOptions { n_max: Some(96), ..Default::default() };
        let cat = prepare_cat(&cfg, &p, &opts).unwrap();
        prop_assert!((cat.state.norm() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn wigner_of_mixed_states_is_normalized(
        s1 in low_state(6, 20),
        s2 in low_state(6, 20),
        s3 in low_state(6, 20),
        w in (0.0f64..1.0, 0.0f64..1.0, 0.05f64..1.0),
    ) {
        let rho = DensityMatrix::mixture(&[(w.0, &s1), (w.1, &s2), (w.2, &s3)]).unwrap();
        let g = wigner(&rho, &GridSpec::square(6.0, 121)).unwrap();
        prop_assert!((g.integral() - 1.0).abs() < 1e-3, "integral {}", g.integral());
    }

    #[test]
    fn resonant_flow_conserves_its_constant_and_matches_the_closed_form(
        cfg in resonant_drive(),
        r_i in 0.05f64..1.0,
        psi_i in 0.0f64..TAU,
        u in 0.1f64..8.0,
    ) {
        prop_assume!(psi_i.cos().abs() > 0.2);
        let t = u / (4.0 * cfg.kappa);
        let cfg = DriveConfig { t2: t, t_end: t, ..cfg };
        let phi_i = psi_i + cfg.eta(0.0);
        let times: Vec<f64> = (0..=16).map(|k| t * k as f64 / 16.0).collect();
        let tr = integrate_characteristic(&cfg, None, (r_i, phi_i), &times).unwrap();
        let cs = tr.constants(&cfg);
        for (s, c) in tr.samples.iter().zip(&cs) {
            prop_assert!((c / cs[0] - 1.0).abs() < 1e-9, "t = {}: {} vs {}", s.t, c, cs[0]);
            let (r, phi) = resonant_solution(&cfg, r_i, phi_i, 0.0, s.t).unwrap();
            prop_assert!(((2.0 * r).cosh() / s.bogoliubov.cosh_2r() - 1.0).abs() < 1e-8);
            prop_assert!(angle_diff(phi, s.phi).abs() < 1e-8);
        }
    }

    #[test]
    fn weak_coupling_stays_inside_its_envelope(
        kappa in 0.02f64..0.45,
        second in any::<bool>(),
        t in 0.0f64..12.0,
    ) {
        let branch = if second { Branch::Two } else { Branch::One };
        let cfg = DriveConfig::resonant(0.9, 1.0, kappa, 0.0, 2.0, 14.0, 14.0);
        let p = cfg.coupling(branch);
        let (r1, phi1) = catfield::squeeze::analytic_branch_state(&cfg, branch, cfg.t1).unwrap();
        let w = dispersive_weak_detail(&cfg, branch, r1, phi1, cfg.t1 + t).unwrap();
        let q = 1.0 - p * p;
        let s = (w.c1 * w.c1 - q).sqrt() / w.c1;
        let lo = w.c1 * (1.0 - p.abs() * s) / q;
        let hi = w.c1 * (1.0 + p.abs() * s) / q;
        prop_assert!(w.cosh_2r >= lo * (1.0 - 1e-12) && w.cosh_2r <= hi * (1.0 + 1e-12), "{} not in [{lo}, {hi}]", w.cosh_2r);
    }

    #[test]
    fn characteristic_flow_is_reversible(
        omega in 0.3f64..2.0,
        chi in 0.5f64..1.5,
        kappa in 0.02f64..0.2,
        r0 in 0.0f64..1.0,
        phi0 in 0.0f64..TAU,
        second in any::<bool>(),
    ) {
        let branch = if second { Branch::Two } else { Branch::One };
        let cfg = DriveConfig::resonant(omega, chi, kappa, 0.0, 1.0, 5.0, 6.0);
        let fw = integrate_characteristic(&cfg, Some(branch), (r0, phi0), &[0.5, 5.5]).unwrap();
        let bw = integrate_bogoliubov(&cfg, Some(branch), fw.last().bogoliubov, &[5.5, 0.5], CharacteristicOptions::default()).unwrap();
        let s = bw.last();
        prop_assert!((s.r - r0).abs() < 1e-8, "r {} vs {r0}", s.r);
        if r0 > 1e-3 {
            prop_assert!(angle_diff(s.phi, phi0).abs() < 1e-8, "phi {} vs {phi0}", s.phi);
        }
    }

    #[test]
    fn master_equation_keeps_a_valid_density_matrix(
        psi in low_state(5, 32),
        r_t in 0.0f64..0.4,
        phi_t in 0.0f64..TAU,
    ) {
        let res = ReservoirParams::squeezed_vacuum(1.0, r_t, phi_t).unwrap();
        let opts = MasterOptions { grid_points: 7, snapshot_stride: 1, ..Default::default() };
        let traj = evolve_master(&psi.to_density(), &res, 0.3, &opts).unwrap();
        for (tr, ev) in traj.trace.iter().zip(&traj.min_eigenvalue) {
            prop_assert!((tr - 1.0).abs() < 1e-9);
            prop_assert!(*ev >= -1e-8);
        }
        for (_, s) in &traj.snapshots {
            prop_assert!(s.hermiticity_error() < 1e-10);
        }
    }

    #[test]
    fn decoherence_time_ignores_the_global_phase(
        psi in low_state(10, 32),
        gamma in 0.0f64..TAU,
        r_t in 0.0f64..2.0,
        phi_t in 0.0f64..TAU,
    ) {
        let res = ReservoirParams::squeezed_vacuum(1.0, r_t, phi_t).unwrap();
        let a = decoherence_time_analytic(&psi.moments(), &res);
        let b = decoherence_time_analytic(&psi.apply_phase(gamma).moments(), &res);
        prop_assert!(a == b || ((a - b) / a).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn objective_has_period_two_pi(
        alpha in 0.5f64..3.0,
        r in 0.0f64..2.0,
        theta in 0.0f64..TAU,
        r_t in 0.0f64..3.0,
        k in 0u32..(1 << 22),
    ) {
        // dyadic angles keep φ̃ + 2π exactly representable
        let phi_t = TAU * 0.999 * k as f64 / (1u32 << 22) as f64;
        let phi_t = (phi_t * 1048576.0).floor() / 1048576.0;
        prop_assume!(phi_t + TAU - TAU == phi_t);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = squeezed_cat_moments(C64::new(alpha, 0.0), C64::new(h, 0.0), C64::from_polar(h, theta), C64::new(r, 0.0)).unwrap();
        prop_assert_eq!(tau_objective(&m, 1.0, r_t, phi_t).unwrap(), tau_objective(&m, 1.0, r_t, phi_t + TAU).unwrap());
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn refinement_never_loses_to_the_grid(
        alpha in 0.5f64..3.0,
        r in 0.0f64..2.0,
        theta in 0.0f64..TAU,
        eps_arg in 0.0f64..TAU,
    ) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = squeezed_cat_moments(C64::new(alpha, 0.0), C64::new(h, 0.0), C64::from_polar(h, theta), C64::from_polar(r, eps_arg)).unwrap();
        let res = maximize_tau(&m, 1.0, &SearchConfig::default(), None).unwrap();
        prop_assert!(res.grid_tau <= res.tau_opt, "{} > {}", res.grid_tau, res.tau_opt);
    }
}
