//! Support edges, tent law, late-change states and Lorentz contraction.

use causalab::algebra::{Kind, Sign};
use causalab::dynamics::{evolve_causal, time_reverse, translate, State, WindowedState};
use causalab::field::{
    localization_probability, make_bump_1d, Grid, RegionMask, Representation, SpinorField, E3,
    MINUS_E3,
};
use causalab::frontier::*;
use causalab::{Error, C64};
use proptest::prelude::*;

const TAU: f64 = DEFAULT_TAU;

fn grid() -> Grid {
    Grid::new_1d(2048, 0.01)
}

fn spinor(kind: Kind) -> Vec<C64> {
    match kind {
        Kind::Dirac { .. } => generic_dirac_spinor().to_vec(),
        Kind::Weyl { .. } => generic_weyl_spinor().to_vec(),
    }
}

fn bump(kind: Kind, c: f64, w: f64) -> SpinorField {
    make_bump_1d(grid(), kind, c, w, &spinor(kind), 0.0).unwrap()
}

fn dirac(m: f64) -> Kind {
    Kind::Dirac { mass: m }
}

/// A seed whose `t_ē` is 0.6: case (i) with τ = −0.6, δ = 0.6.
fn late_seed(kind: Kind) -> PrescribedTent {
    construct_prescribed_tent(&bump(kind, 0.0, 0.5), (0.0, 0.0), -0.6, 0.6, TentCase::I).unwrap()
}

#[test]
fn edge_translation_covariance_and_component_minimum() {
    let psi = bump(dirac(1.0), 0.0, 0.5);
    let e = support_edge(&psi, E3, TAU).unwrap();
    for lam in [0.37, -1.2, 2.05] {
        let shifted = translate(&psi, [0.0, 0.0, lam]);
        let es = support_edge(&shifted, E3, TAU).unwrap();
        assert!((es - e - lam).abs() <= grid().dx() + 1e-12, "λ = {lam}: {es} vs {e}");
    }
    // components placed at different positions: the edge is the minimum
    let g = grid();
    let k = dirac(1.0);
    let parts: Vec<SpinorField> = [(-1.0, 0), (0.5, 2)]
        .iter()
        .map(|&(c, comp)| {
            let mut sp = vec![C64::new(0.0, 0.0); 4];
            sp[comp] = C64::new(1.0, 0.0);
            make_bump_1d(g, k, c, 0.5, &sp, 0.0).unwrap()
        })
        .collect();
    let sum = parts[0].add(&parts[1]).normalized().unwrap();
    let e_sum = support_edge(&sum, E3, TAU).unwrap();
    let e0 = support_edge(&parts[0], E3, TAU).unwrap();
    let e1 = support_edge(&parts[1], E3, TAU).unwrap();
    assert!((e_sum - e0.min(e1)).abs() <= g.dx() + 1e-12, "{e_sum} {e0} {e1}");
}

#[test]
fn profile_at_time_zero_is_the_edge() {
    let psi = bump(dirac(1.0), 0.3, 0.5);
    let p = frontier_profile(&State::Smooth(psi.clone()), E3, &[0.0], TAU).unwrap();
    assert_eq!(p.edges, vec![support_edge(&psi, E3, TAU).unwrap()]);
}

#[test]
fn profile_guard_is_enforced() {
    let psi = bump(dirac(1.0), 0.0, 0.5);
    let r = frontier_profile(&State::Smooth(psi), E3, &[0.0, 15.0], TAU);
    assert!(matches!(r, Err(Error::GuardViolation(_))), "{r:?}");
}

#[test]
fn degenerate_states_are_rejected() {
    let g = grid();
    let psi = make_bump_1d(g, dirac(1.0), 0.0, 0.015, &generic_dirac_spinor(), 0.0).unwrap();
    let r = change_times(&State::Smooth(psi), &symmetric_times(1.0, 10), TAU);
    assert!(matches!(r, Err(Error::DegenerateState(_))), "{r:?}");
}

/// Min law, upper bound, causal slope bound, the change-time bounds and the
/// late-time linear law for one state.
fn check_frontier_laws(state: &State, label: &str) {
    let f = state.sample().unwrap();
    let dx = f.grid().dx();
    let e = support_edge(&f, E3, TAU).unwrap();
    let eb = support_edge(&f, MINUS_E3, TAU).unwrap();
    let diam = -eb - e;
    let k = 40;
    let times = symmetric_times(2.0 * diam, k);
    let dt = times[1] - times[0];
    let (p, m) = frontier_profiles_pm(state, &times, TAU).unwrap();
    let (fp, fm) = (fit_tent(&p).unwrap(), fit_tent(&m).unwrap());
    assert!(fp.residual <= 2.0 * dx && fm.residual <= 2.0 * dx, "{label}: {fp:?} {fm:?}");
    for (prof, e_here, eb_here) in [(&p, e, eb), (&m, eb, e)] {
        for i in 0..=k {
            let t = times[k + i];
            let lo = prof.edges[k + i].min(prof.edges[k - i]);
            assert!((lo - (e_here - t)).abs() <= 2.0 * dx, "{label}: min law at t = {t}");
        }
        for (t, et) in prof.times.iter().zip(&prof.edges) {
            assert!(*et <= -2.0 * eb_here - e_here - t.abs() + 2.0 * dx, "{label}: upper bound");
        }
        for w in prof.edges.windows(2) {
            assert!(w[1] >= w[0] - dt - 2.0 * dx, "{label}: causal slope");
        }
    }
    // change-time bounds: e(ψ_t) ≤ −ē(ψ) − |t − t_e| and |t_e| + |t_ē| ≤ diameter
    for (t, et) in p.times.iter().zip(&p.edges) {
        assert!(*et <= -eb - (t - fp.t_e).abs() + 2.0 * dx, "{label}: bound (a) at {t}");
    }
    assert!(fp.t_e.abs() + fm.t_e.abs() <= diam + 4.0 * dt, "{label}: bound (b)");
    // late-time linear law for a state in [c−R, c+R]
    let r = 0.5 * diam;
    let i2r = times.iter().position(|t| *t >= 2.0 * r - 1e-12).unwrap();
    for prof in [&p, &m] {
        for i in i2r..times.len() {
            let pred = prof.edges[i2r] + times[i2r] - times[i];
            assert!((prof.edges[i] - pred).abs() <= 2.0 * dx, "{label}: late-time law");
        }
    }
}

#[test]
fn tent_law_on_constructed_states() {
    let kinds = [dirac(0.5), dirac(1.0), dirac(2.0), Kind::Weyl { chirality: Sign::Plus }];
    let params = [(0.0, 0.0), (0.2, 0.3), (-0.2, 0.3), (0.5, 0.2), (-0.5, 0.2)];
    for k in kinds {
        let psi1 = bump(k, 0.0, 0.5);
        for &(tau, delta) in &params {
            let case = TentCase::classify(tau, delta);
            let p = construct_prescribed_tent(&psi1, (0.0, 0.0), tau, delta, case).unwrap();
            let state = State::Smooth(p.state.clone());
            let label = format!("{k:?} τ={tau} δ={delta}");
            let times = symmetric_times(2.0 * (1.0 + delta + tau.abs()), 40);
            let dt = times[1] - times[0];
            let ct = change_times(&state, &times, TAU).unwrap();
            assert!((ct.plus.t_e - p.t_e).abs() <= 2.0 * dt, "{label}: {:?} vs {}", ct.plus, p.t_e);
            assert!(
                (ct.minus.t_e - p.t_ebar).abs() <= 2.0 * dt,
                "{label}: {:?} vs {}",
                ct.minus,
                p.t_ebar
            );
            check_frontier_laws(&state, &label);
        }
    }
}

#[test]
fn change_times_made_zero() {
    // start from a state with t¹_e ≠ t¹_ē, then τ = t¹_ē − t¹_e, δ = |τ|
    let k = dirac(1.0);
    let base = construct_prescribed_tent(&bump(k, 0.0, 0.5), (0.0, 0.0), 0.5, 0.2, TentCase::II)
        .unwrap();
    let times = symmetric_times(4.0, 80);
    let dt = times[1] - times[0];
    let c1 = change_times(&State::Smooth(base.state.clone()), &times, TAU).unwrap();
    let tau = c1.minus.t_e - c1.plus.t_e;
    let p = construct_prescribed_tent(&base.state, (c1.plus.t_e, c1.minus.t_e), tau, tau.abs(), TentCase::I)
        .unwrap();
    assert!((p.t_e - p.t_ebar).abs() < 1e-12);
    let shifted = State::Smooth(evolve_causal(&p.state, p.t_e).unwrap());
    let c = change_times(&shifted, &times, TAU).unwrap();
    assert!(c.plus.t_e.abs() <= 2.0 * dt && c.minus.t_e.abs() <= 2.0 * dt, "{c:?}");
}

#[test]
fn change_times_under_time_shift_and_reversal() {
    let k = dirac(1.0);
    let p = construct_prescribed_tent(&bump(k, 0.0, 0.5), (0.0, 0.0), 0.5, 0.2, TentCase::II)
        .unwrap();
    let times = symmetric_times(3.0, 60);
    let dt = times[1] - times[0];
    let base = change_times(&State::Smooth(p.state.clone()), &times, TAU).unwrap();
    let s = 0.3;
    let shifted = change_times(&State::Smooth(evolve_causal(&p.state, s).unwrap()), &times, TAU)
        .unwrap();
    assert!((shifted.plus.t_e - (base.plus.t_e - s)).abs() <= 2.0 * dt);
    assert!((shifted.minus.t_e - (base.minus.t_e - s)).abs() <= 2.0 * dt);
    let rev = change_times(&State::Smooth(time_reverse(&p.state)), &times, TAU).unwrap();
    assert!((rev.plus.t_e + base.plus.t_e).abs() <= 2.0 * dt);
    assert!((rev.minus.t_e + base.minus.t_e).abs() <= 2.0 * dt);
}

#[test]
fn late_change_state_geometry_and_equivalent_properties() {
    for sg in [Sign::Plus, Sign::Minus] {
        let seed = late_seed(dirac(1.0));
        let lc = make_late_change_state(&seed.state, 0.4, sg, &symmetric_times(4.0, 80), TAU)
            .unwrap();
        let f = lc.state.sample().unwrap();
        let dx = f.grid().dx();
        let (e, top) = (support_edge(&f, E3, TAU).unwrap(), -support_edge(&f, MINUS_E3, TAU).unwrap());
        assert!(e >= -dx && e < top && top <= 2.0 * lc.alpha + dx, "{e} {top}");
        // fit certifies ς·t_ē ≥ α
        let times = symmetric_times(1.0, 50);
        let dt = times[1] - times[0];
        let ct = change_times(&lc.state, &times, TAU).unwrap();
        assert!(sg.value() * ct.minus.t_e >= lc.alpha - 2.0 * dt, "{sg:?}: {:?}", ct.minus);
        // (d): ψ_{ςα} lies in {x ≤ α}
        let r = late_change_residual(&lc.state, lc.alpha, sg).unwrap();
        assert!(r <= 1e-8, "{sg:?}: {r}");
        // and not for the opposite orientation
        assert!(late_change_residual(&lc.state, lc.alpha, sg.flip()).unwrap() > 1e-2);
        // (b): boosts with ςρ ≥ 0 stay in [0, 2α e^{−ςρ}]
        for r in [0.5, 1.0, 2.0] {
            let hi = 2.0 * lc.alpha * (-r as f64).exp();
            let p = boosted_probability_in(&lc.state, sg.value() * r, 0.0, hi, hi / 100.0).unwrap();
            assert!(1.0 - p <= 1e-6, "{sg:?} ρ = {r}: {}", 1.0 - p);
        }
    }
}

#[test]
fn late_change_seed_must_change_late() {
    let plain = bump(dirac(1.0), 0.0, 0.5);
    let r = make_late_change_state(&plain, 0.2, Sign::Plus, &symmetric_times(2.0, 40), TAU);
    assert!(matches!(r, Err(Error::NoLateChangeSeed(_))), "{r:?}");
    let seed = late_seed(dirac(1.0));
    let r = make_late_change_state(&seed.state, 0.9, Sign::Plus, &symmetric_times(4.0, 80), TAU);
    assert!(matches!(r, Err(Error::DomainViolation(_))), "{r:?}");
}

#[test]
fn early_slice_does_not_contract() {
    // the bottom slice of a plain bump is not a late-change state
    let seed = late_seed(dirac(1.0));
    let pos = seed.state.clone();
    let bottom = support_edge(&pos, E3, TAU).unwrap();
    let w = WindowedState::new(pos, bottom, bottom + 0.4, 0.0)
        .unwrap()
        .normalized()
        .unwrap()
        .translated(-bottom)
        .unwrap();
    let st = State::Windowed(w);
    let hi = 0.4 * (-3.0f64).exp();
    let p = boosted_probability_in(&st, 3.0, 0.0, hi, hi / 100.0).unwrap();
    assert!(p < 0.9, "{p}");
}

#[test]
fn projection_onto_late_change_states() {
    // a heavy, slow state so the 1D defect decays within the grid
    let k = dirac(40.0);
    let g = Grid::new_1d(8192, 0.01);
    let psi = make_bump_1d(g, k, 1.0, 1.0, &generic_dirac_spinor(), 0.0).unwrap();
    for sg in [Sign::Plus, Sign::Minus] {
        let d: Vec<f64> =
            [1.0, 2.0, 4.0, 8.0].iter().map(|&a| projection_defect(&psi, a, sg).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(d[3] < 1e-3, "{d:?}");
        // dual route: the discarded part by kernel quadrature, and
        // Pythagoras for the orthogonal projection
        let s = sg.value() * 2.0;
        let eta = evolve_causal(&psi, -s).unwrap().in_representation(Representation::Position);
        let rest = WindowedState::new(eta, 2.0, f64::INFINITY, s).unwrap();
        assert!((rest.norm_sqr().sqrt() - d[1]).abs() < 1e-5, "{} vs {}", rest.norm_sqr(), d[1]);
        let pa = project_late_change(&psi, 2.0, sg).unwrap();
        assert!((pa.norm_sqr() + rest.norm_sqr() - 1.0).abs() < 1e-8);
        // sampled difference; the grid sum of its light-cone kinks is only
        // second-order accurate
        let diff = pa.sample().unwrap().sub(&psi).norm();
        assert!((diff / d[1] - 1.0).abs() < 1e-2, "{diff} vs {}", d[1]);
        // ψ^α lies in [0, 2α] and is late-change for the opposite orientation
        let f = pa.sample().unwrap();
        let outside = localization_probability(&f, &RegionMask::strip(E3, 0.0, 4.0).complement())
            .unwrap();
        assert!(outside <= 1e-8, "{outside}");
        assert!(late_change_residual(&pa, 2.0, sg.flip()).unwrap() <= 1e-8);
    }
}

#[test]
fn contraction_scan_baseline_and_reversal_symmetry() {
    let seed = late_seed(dirac(1.0));
    let lc = make_late_change_state(&seed.state, 0.4, Sign::Plus, &symmetric_times(4.0, 80), TAU)
        .unwrap();
    let scan = lorentz_contraction_scan(&lc.state, 0.1, &[0.0, 3.0], 1e-3).unwrap();
    let f = lc.state.sample().unwrap();
    let base = localization_probability(&f, &RegionMask::strip(E3, -0.1, 0.1)).unwrap()
        / lc.state.norm_sqr();
    assert!((scan[0].1 - base).abs() < 1e-3, "{scan:?} vs {base}");
    assert!(scan[1].1 >= 0.999, "{scan:?}");
    // p(ρ; 𝒯ψ) = p(−ρ; ψ)
    let smooth = State::Smooth(bump(dirac(1.0), 0.3, 0.5));
    let rev = smooth.time_reversed().unwrap();
    let rhos = [-1.0, -0.5, 0.5, 1.0];
    let a = lorentz_contraction_scan(&smooth, 0.5, &rhos, 5e-3).unwrap();
    let b = lorentz_contraction_scan(&rev, 0.5, &rhos, 5e-3).unwrap();
    for i in 0..rhos.len() {
        assert!((a[i].1 - b[rhos.len() - 1 - i].1).abs() < 1e-8, "{a:?} {b:?}");
    }
}

#[test]
fn mass_scan_reports_change_times() {
    let psi = late_seed(dirac(1.0)).state;
    let rows = mass_dependence_scan(&psi, &[0.5, 1.0, 2.0], &symmetric_times(4.0, 80), TAU).unwrap();
    assert_eq!(rows.len(), 3);
    for (_, ct) in rows {
        assert!(ct.plus.residual <= 0.02 && ct.minus.residual <= 0.02);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn edges_are_monotone_in_tolerance(c in -1.0f64..1.0, w in 0.2f64..0.8) {
        let psi = bump(dirac(1.0), c, w);
        let taus = [1e-10, 1e-8, 1e-6, 1e-4, 1e-2];
        let es: Vec<f64> = taus.iter().map(|t| support_edge(&psi, E3, *t).unwrap()).collect();
        prop_assert!(es.windows(2).all(|p| p[1] >= p[0]));
        let ebs: Vec<f64> = taus.iter().map(|t| support_edge(&psi, MINUS_E3, *t).unwrap()).collect();
        prop_assert!(ebs.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn prescribed_tents_are_recovered(
        tau in -0.6f64..0.6,
        delta in 0.0f64..0.5,
        which in 0usize..4,
    ) {
        let k = [dirac(0.5), dirac(1.0), dirac(2.0), Kind::Weyl { chirality: Sign::Minus }][which];
        let case = TentCase::classify(tau, delta);
        let p = construct_prescribed_tent(&bump(k, 0.0, 0.5), (0.0, 0.0), tau, delta, case).unwrap();
        let times = symmetric_times(2.0 * (1.0 + delta + tau.abs()), 40);
        let dt = times[1] - times[0];
        let ct = change_times(&State::Smooth(p.state), &times, TAU).unwrap();
        prop_assert!(ct.plus.residual <= 0.02 && ct.minus.residual <= 0.02);
        prop_assert!((ct.plus.t_e - p.t_e).abs() <= 2.0 * dt, "{:?} vs {}", ct.plus, p.t_e);
        prop_assert!((ct.minus.t_e - p.t_ebar).abs() <= 2.0 * dt, "{:?} vs {}", ct.minus, p.t_ebar);
    }

    #[test]
    fn case_mismatch_is_detected(tau in -1.0f64..1.0, delta in 0.0f64..1.0) {
        let psi = bump(dirac(1.0), 0.0, 0.5);
        let actual = TentCase::classify(tau, delta);
        for case in [TentCase::I, TentCase::II, TentCase::III] {
            let r = construct_prescribed_tent(&psi, (0.0, 0.0), tau, delta, case);
            prop_assert_eq!(r.is_ok(), case == actual);
        }
    }
}
