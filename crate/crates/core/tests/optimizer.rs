use catfield::dissipation::squeezed_cat_moments;
use catfield::fock::Moments;
use catfield::optimizer::{
    maximize_tau, moment_optimum, optimal_reservoir_closed_form, tau_objective, ReservoirCase, SearchConfig,
};
use catfield::{angle_diff, C64};

fn cat_moments(alpha: f64, r: f64, theta: f64) -> Moments {
    let h = 0.5f64.sqrt();
    squeezed_cat_moments(C64::new(alpha, 0.0), C64::new(h, 0.0), C64::from_polar(h, theta), C64::new(r, 0.0)).unwrap()
}

/// Moments of `S(r)(|α⟩ + |−α⟩)` with the component overlap dropped.
fn asymptotic_moments(alpha: f64, r: f64) -> Moments {
    let a2 = alpha * alpha * (2.0 * r).exp();
    Moments { a: C64::new(0.0, 0.0), n: a2 + r.sinh().powi(2), a2: C64::new(a2 + r.sinh() * r.cosh(), 0.0) }
}

#[test]
fn search_finds_the_exact_optimum() {
    let cfg = SearchConfig::default();
    for (alpha, r, theta) in [(2f64.sqrt(), 1.5, 0.0), (2.0, 1.0, 0.0), (2.0, 2.0, 0.0), (1.2, 0.4, 1.0)] {
        let m = cat_moments(alpha, r, theta);
        let exact = moment_optimum(&m, 1.0).unwrap();
        let res = maximize_tau(&m, 1.0, &cfg, None).unwrap();
        assert!(!res.plateau);
        assert!((res.r_tilde_opt - exact.r_tilde).abs() < 1e-5, "{alpha} {r}: {} vs {}", res.r_tilde_opt, exact.r_tilde);
        assert!(angle_diff(res.phi_tilde_opt, exact.phi_tilde).abs() < 1e-5);
        assert!(((res.tau_opt - exact.tau) / exact.tau).abs() < 1e-9);
        assert!(res.grid_tau <= res.tau_opt);
    }
}

#[test]
fn closed_form_holds_for_large_amplitudes() {
    let cfg = SearchConfig::default();
    for (alpha, r) in [(2.0, 1.0), (2.0, 2.0), (3.0, 1.5)] {
        let m = cat_moments(alpha, r, 0.0);
        let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A).unwrap();
        let res = maximize_tau(&m, 1.0, &cfg, Some(cf)).unwrap();
        let cmp = res.closed_form.unwrap();
        assert!(cmp.r_tilde_rel_error < 0.01, "alpha {alpha} r {r}: {}", cmp.r_tilde_rel_error);
        assert!(cmp.phi_tilde_error.abs() < 1e-2);
        assert!(cmp.tau_reference <= res.tau_opt * (1.0 + 1e-12));
    }
}

#[test]
fn closed_form_drifts_as_components_overlap() {
    // the closed form neglects e^{-2α²}; the drift grows as α decreases
    let r = 1.5;
    let errs: Vec<f64> = [3.0, 2.0, 1.5, 2f64.sqrt(), 1.0]
        .iter()
        .map(|&alpha| {
            let exact = moment_optimum(&cat_moments(alpha, r, 0.0), 1.0).unwrap();
            let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A).unwrap();
            (exact.r_tilde - cf.r_tilde).abs() / cf.r_tilde
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] > w[0]), "{errs:?}");
    assert!(errs[0] < 1e-6);
    for (alpha, r) in [(2.0, 1.5), (2.5, 2.0), (3.0, 1.5)] {
        let exact = moment_optimum(&asymptotic_moments(alpha, r), 1.0).unwrap();
        let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A).unwrap();
        assert!((exact.r_tilde - cf.r_tilde).abs() < 1e-12);
    }
}

#[test]
fn quarter_phase_cat_has_a_lower_maximum() {
    let cfg = SearchConfig::default();
    for (alpha, r) in [(2f64.sqrt(), 1.5), (2.0, 1.0), (2.0, 2.0)] {
        let even = maximize_tau(&cat_moments(alpha, r, 0.0), 1.0, &cfg, None).unwrap();
        let quarter = maximize_tau(&cat_moments(alpha, r, std::f64::consts::FRAC_PI_2), 1.0, &cfg, None).unwrap();
        assert!(quarter.tau_opt < even.tau_opt, "alpha {alpha} r {r}: {} vs {}", quarter.tau_opt, even.tau_opt);
    }
}

#[test]
fn closed_form_is_stationary_without_overlap() {
    for (alpha, r) in [(2.0, 1.5), (2.5, 2.0), (3.0, 1.5)] {
        let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A).unwrap();
        let m = asymptotic_moments(alpha, r);
        let f = |rt: f64, pt: f64| tau_objective(&m, 1.0, rt, pt).unwrap();
        let h = 1e-4;
        let t0 = f(cf.r_tilde, cf.phi_tilde);
        let dr = (f(cf.r_tilde + h, cf.phi_tilde) - f(cf.r_tilde - h, cf.phi_tilde)) / (2.0 * h) / t0;
        let dp = (f(cf.r_tilde, cf.phi_tilde + h) - f(cf.r_tilde, cf.phi_tilde - h)) / (2.0 * h) / t0;
        assert!(dr.abs() < 1e-6 && dp.abs() < 1e-6, "alpha {alpha} r {r}: grad ({dr:e}, {dp:e})");
    }
}

#[test]
fn perpendicular_case_needs_the_minus_branch() {
    let (alpha, r) = (2f64.sqrt(), 2.0);
    let h = 0.5f64.sqrt();
    let m = squeezed_cat_moments(C64::new(alpha, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-r, 0.0)).unwrap();
    let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::B).unwrap();
    assert!((cf.r_tilde - (2.0 - 9f64.ln() / 4.0)).abs() < 1e-12);
    let exact = moment_optimum(&m, 1.0).unwrap();
    let res = maximize_tau(&m, 1.0, &SearchConfig::default(), Some(cf)).unwrap();
    assert!((res.r_tilde_opt - exact.r_tilde).abs() < 1e-5);
    assert!(angle_diff(res.phi_tilde_opt, std::f64::consts::PI).abs() < 1e-5);
    // compressed components: the bath is squeezed less than the state
    assert!(res.r_tilde_opt < r);
}

#[test]
fn optimum_dominates_the_unsqueezed_bath() {
    for (alpha, r) in [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0)] {
        let m = cat_moments(alpha, r, 0.0);
        let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A).unwrap();
        let plain = tau_objective(&m, 1.0, 0.0, 0.0).unwrap();
        let res = maximize_tau(&m, 1.0, &SearchConfig::default(), Some(cf)).unwrap();
        assert!(res.tau_opt >= plain);
        assert!(tau_objective(&m, 1.0, cf.r_tilde, cf.phi_tilde).unwrap() >= plain);
    }
}

#[test]
fn coherent_moments_plateau() {
    let m = Moments::coherent(C64::new(1.5, -0.5));
    let res = maximize_tau(&m, 1.0, &SearchConfig::default(), None).unwrap();
    assert!(res.plateau);
    assert!(res.tau_opt.is_infinite());
}
