//! Cross-checks that pair independent computation routes: section values
//! against closed forms, profiles against the reduced slow flow, event states
//! against conserved quantities, and the order-1 bifurcation root against the
//! shooting result.

use zfk::asymptotics::{self, SlowSeries};
use zfk::charts::{self, K1Point, K2Point};
use zfk::integrate::{self, Event, IntegratorConfig};
use zfk::model::{self, Params};
use zfk::shooting::{self, Segment, ShootConfig};

#[test]
fn theta_refinement_moves_root_below_microtolerance() {
    // deepening the section from Theta = 12 to 16 must not move cbar
    let cfg = ShootConfig::default();
    let (result, shift) = shooting::find_min_speed_refined(0.01, &cfg).unwrap();
    assert!(result.cbar > 1.0);
    assert!(shift <= 1e-6, "Theta refinement moved cbar by {shift:.2e}");
}

#[test]
fn strong_profile_shape_matches_expected_front() {
    // minimal-speed profile: theta climbs from <= 1e-3 to 1 - O(eps) over an
    // O(1) window, with no slow segment
    let cfg = ShootConfig::default();
    let eps = 0.01;
    let r = shooting::find_min_speed(eps, &cfg).unwrap();
    let p = shooting::build_profile(r.cbar, eps, &cfg, 30.0).unwrap();
    p.validate().unwrap();
    assert!(!p.segments.contains(&Segment::Slow));
    assert!(p.theta[0] <= 1e-3);
    assert!((p.theta[p.len() - 1] - 1.0).abs() <= 5.0 * eps);
    // z-extent of the rise theta in [0.1, 0.9]
    let z_lo =
        p.z.iter()
            .zip(p.theta.iter())
            .find(|(_, &t)| t >= 0.1)
            .unwrap()
            .0;
    let z_hi =
        p.z.iter()
            .zip(p.theta.iter())
            .find(|(_, &t)| t >= 0.9)
            .unwrap()
            .0;
    let width = z_hi - z_lo;
    assert!(
        width > 0.5 && width < 5.0,
        "front width {width} should be order one"
    );
}

#[test]
fn weak_profile_lands_on_slow_manifold() {
    // at (c, eps) = (1.5, 0.05) the fast segment must terminate on the
    // series graph: terminal eta agrees with the K = 2 height within ten
    // times the K = 2 truncation proxy
    let cfg = ShootConfig::default();
    let p = shooting::build_profile(1.5, 0.05, &cfg, 30.0).unwrap();
    let first_fast = p
        .segments
        .iter()
        .position(|&s| s == Segment::Fast)
        .expect("fast segment exists");
    let (theta_land, eta_land) = (p.theta[first_fast], p.eta[first_fast]);
    let series = SlowSeries::build(1.5, 2).unwrap();
    let v = series.eta(theta_land, 0.05).unwrap();
    assert!(
        (eta_land - v.eta).abs() <= 10.0 * v.last_term.max(1e-3 * v.eta),
        "landing eta {eta_land:.6e} vs series {:.6e} (proxy {:.2e})",
        v.eta,
        v.last_term
    );
}

#[test]
fn profile_samples_satisfy_the_ode() {
    // per-step defect of the non-slow samples against the phase-plane system
    let cfg = ShootConfig::default();
    let eps = 0.05;
    let p = shooting::build_profile(1.5, eps, &cfg, 20.0).unwrap();
    let params = Params::new(1.5, eps).unwrap();
    let idx: Vec<usize> = (0..p.len())
        .filter(|&i| p.segments[i] != Segment::Slow)
        .collect();
    let times: Vec<f64> = idx.iter().map(|&i| p.z[i]).collect();
    let states: Vec<Vec<f64>> = idx.iter().map(|&i| vec![p.theta[i], p.eta[i]]).collect();
    let field = |_z: f64, y: &[f64], dy: &mut [f64]| {
        let (a, b) = model::vector_field_raw(model::PhasePoint::new(y[0], y[1]), params);
        dy[0] = a;
        dy[1] = b;
    };
    let defect = integrate::max_step_defect(field, &times, &states, &cfg.integrator).unwrap();
    assert!(
        defect <= 100.0 * cfg.integrator.rel_tol,
        "profile ODE defect {defect:.2e}"
    );
}

#[test]
fn symmetry_example_at_coarse_eps() {
    // reversal at eps = 0.1 (section lowered to Theta = 8 to keep
    // eps * Theta admissible): the mirrored samples solve the -c system
    let cfg = ShootConfig {
        theta_match: 8.0,
        ..ShootConfig::default()
    };
    let eps = 0.1;
    let p = shooting::build_profile(1.5, eps, &cfg, 20.0).unwrap();
    let m = model::apply_symmetry(&p);
    assert_eq!(m.c, -1.5);
    let idx: Vec<usize> = (0..m.len())
        .filter(|&i| m.segments[i] != Segment::Slow)
        .collect();
    let times: Vec<f64> = idx.iter().map(|&i| m.z[i]).collect();
    let states: Vec<Vec<f64>> = idx.iter().map(|&i| vec![m.theta[i], m.eta[i]]).collect();
    let c_neg = m.c;
    let field = |_z: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = c_neg * y[1] - model::reaction_omega_raw(y[0], eps);
    };
    let defect = integrate::max_step_defect(field, &times, &states, &cfg.integrator).unwrap();
    assert!(
        defect <= 100.0 * cfg.integrator.rel_tol,
        "defect {defect:.2e}"
    );
}

#[test]
fn section_event_state_sits_on_the_trajectory() {
    // observer event at theta2 = -10 during a backward separatrix run: the
    // reported state satisfies the event equation and conserves H
    let params = Params::new(1.0, 0.0).unwrap();
    let lambda = shooting::k2_stable_eigenvalue(params);
    let seed = [-1e-6, 1e-6 * (-lambda)];
    let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (a, b) = charts::k2_vector_field(K2Point::new(y[0], y[1]), params).unwrap();
        dy[0] = a;
        dy[1] = b;
    };
    let events = [
        Event::observer(|_t: f64, y: &[f64]| y[0] + 10.0),
        Event::terminal(|_t: f64, y: &[f64]| y[0] + 12.0),
    ];
    let traj = integrate::integrate(
        field,
        &seed,
        (0.0, -1e4),
        &IntegratorConfig::default(),
        &events,
    )
    .unwrap();
    let hit = traj
        .event_hits
        .iter()
        .find(|h| h.event_index == 0)
        .expect("observer hit recorded");
    assert!(
        (hit.state[0] + 10.0).abs() <= 1e-9,
        "event equation off by {:.2e}",
        (hit.state[0] + 10.0).abs()
    );
    let h = charts::hamiltonian(K2Point::new(hit.state[0], hit.state[1])).unwrap();
    assert!((h - 0.5).abs() <= 1e-8, "H at the hit: {h}");
}

#[test]
fn k1_orbits_conserve_eps() {
    // r1 * eps1 is a first integral of the chart field
    let params = Params::new(1.2, 0.0).unwrap();
    let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (a, b, g) = charts::k1_vector_field(K1Point::new(y[0], y[1], y[2]), params);
        dy[0] = a;
        dy[1] = b;
        dy[2] = g;
    };
    let y0 = [0.3, 1.0, 0.05];
    let product0 = y0[0] * y0[2];
    let traj =
        integrate::integrate(field, &y0, (0.0, 1.0), &IntegratorConfig::default(), &[]).unwrap();
    for y in &traj.states {
        assert!(
            (y[0] * y[2] - product0).abs() <= 1e-10,
            "eps drifted to {}",
            y[0] * y[2]
        );
    }
}

#[test]
fn profile_distance_keeps_shrinking_at_smaller_eps() {
    // one halving past the acceptance pair; the measured distances run
    // 0.0556, 0.0347, 0.0206, consistent with eps |ln eps| shrinkage
    let cfg = ShootConfig::default();
    let p01 = shooting::build_profile(1.5, 0.01, &cfg, 30.0).unwrap();
    let p005 = shooting::build_profile(1.5, 0.005, &cfg, 30.0).unwrap();
    let d01 = shooting::profile_gamma_distance(&p01);
    let d005 = shooting::profile_gamma_distance(&p005);
    assert!(d005 < d01, "{d005} !< {d01}");
    assert!(d005 <= 0.025, "distance at eps = 0.005: {d005}");
}

#[test]
fn slope_sign_is_load_bearing_in_the_tolerances() {
    // a sign flip of the tail-integral slope violates the acceptance
    // tolerances of both criteria that consume it
    let i = asymptotics::hs_tail_integral(1e-9).unwrap();
    let slope = i - 1.0;
    assert!((slope - 0.34405).abs() <= 1e-4);
    assert!((-slope - 0.34405).abs() > 1e-4);
    let b = asymptotics::b_eps_derivative(0.5, 1e-9).unwrap();
    assert!((b + 0.34405).abs() <= 2e-4);
    assert!((-b + 0.34405).abs() > 2e-4);
}

#[test]
fn pde_profile_data_stays_in_unit_interval() {
    // no clipping needed when the evolution starts from a computed wave
    let cfg = ShootConfig::default();
    let eps = 0.05;
    let cbar = shooting::find_min_speed(eps, &cfg).unwrap().cbar;
    let profile = shooting::build_profile(cbar, eps, &cfg, 30.0).unwrap();
    let pde_cfg = zfk::pde::PdeConfig {
        n: 801,
        t_final: 1.0,
        dt: zfk::pde::PdeConfig::stable_dt(8.0, 801),
        ..zfk::pde::PdeConfig::default()
    };
    let track = zfk::pde::pde_run(&pde_cfg, eps, zfk::pde::InitialData::Profile(&profile)).unwrap();
    assert_eq!(track.clip_count, 0, "profile data must not need clipping");
    assert!(!track.truncated);
}

#[test]
fn near_minimal_weak_profiles_are_flagged() {
    let cfg = ShootConfig::default();
    let p = shooting::build_profile(1.02, 0.02, &cfg, 20.0).unwrap();
    assert!(
        p.near_minimal_weak,
        "c = 1.02 weak profile should carry the flag"
    );
    let p = shooting::build_profile(1.5, 0.02, &cfg, 20.0).unwrap();
    assert!(!p.near_minimal_weak);
}

#[test]
fn bifurcation_root_tracks_shooting() {
    // the order-1 residual root is a cross-check of the shooting speed up to
    // its O(eps^2), delta-dependent remainder
    let eps = 0.01;
    let cfg = ShootConfig::default();
    let cbar = shooting::find_min_speed(eps, &cfg).unwrap().cbar;
    let root_05 = asymptotics::bifurcation_speed_order1(eps, 0.5).unwrap();
    let root_01 = asymptotics::bifurcation_speed_order1(eps, 0.1).unwrap();
    assert!(
        (root_05 - cbar).abs() <= 2e-4,
        "delta = 0.5: {root_05} vs {cbar}"
    );
    assert!(
        (root_01 - cbar).abs() <= 6e-4,
        "delta = 0.1: {root_01} vs {cbar}"
    );
}

#[test]
fn graph_mode_quantifies_the_dropped_remainder() {
    // the analytic unstable graph differs from the integrated manifold at
    // the section by ~ (Theta + 1) e^{-Theta} / 2, independent of eps
    let cfg = ShootConfig::default();
    let expect = 13.0 * (-12.0f64).exp() / 2.0;
    for &eps in &[0.05, 0.02] {
        let v = shooting::unstable_eta_validated(Params::new(1.0, eps).unwrap(), &cfg).unwrap();
        assert!(
            (v.discrepancy - expect).abs() < 0.5 * expect,
            "eps = {eps}: discrepancy {:.3e} vs expected {expect:.3e}",
            v.discrepancy
        );
    }
}
