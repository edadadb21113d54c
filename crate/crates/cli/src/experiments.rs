//! One runner per subcommand. Each returns a [`Report`]: the CSV table plus
//! the invariants it checked.

use std::f64::consts::PI;

use causalab::algebra::{energy_projector, Kind, Sign};
use causalab::causalgeo::{
    influence_ball, influence_boosted_point, influence_cylinder, influence_strip, line_hits,
    monte_carlo_line_measure, Cmp, DiamondRegion, FlatBase, Interval, LightconeRegion, Rect,
    Relation, SamplingBox,
};
use causalab::dynamics::{evolve_causal, evolve_newton_wigner, State};
use causalab::field::{localization_probability, make_bump, Grid, RegionMask, SpinorField, E3};
use causalab::frontier::{
    boosted_probability_in, construct_prescribed_tent, fit_tent, frontier_profiles_pm,
    generic_dirac_spinor, generic_weyl_spinor, lorentz_contraction_scan, make_late_change_state,
    symmetric_times, LateChange, TentCase,
};
use causalab::pol::{
    energy_growth, measurement_cascade, nepom_check, point_localized_sequence, pol_expectation,
    random_positive_energy_state, shell_state,
};
use causalab::weylradial::{crosscheck_against_spectral, radial_table, RadialProfile};
use causalab::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{Cell, Report};

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::ConfigError(msg.into())
}

/// Run an experiment on a resolved configuration.
pub fn run(exp: Experiment, c: &ExperimentConfig) -> Result<Report> {
    match exp {
        Experiment::Evolve => evolve(c),
        Experiment::Frontier => frontier(c),
        Experiment::Boost => boost(c),
        Experiment::Contract => contract(c),
        Experiment::Radial => radial(c),
        Experiment::Pol => pol(c),
        Experiment::Cascade => cascade(c),
        Experiment::Lattice => lattice(c),
        Experiment::Lines => lines(c),
        Experiment::Selftest => selftest(c),
    }
}

fn grid_of(c: &ExperimentConfig) -> Result<Grid> {
    let dim = c.grid.dim.ok_or_else(|| cfg_err("grid.dim is required"))?;
    let n = c.grid.n.ok_or_else(|| cfg_err("grid.n is required"))?;
    let dx = c.f(c.grid.dx, "grid.dx")?;
    if !(n >= 2 && n.is_power_of_two()) {
        return Err(cfg_err(format!("grid.n = {n} must be a power of two")));
    }
    if !(dx > 0.0) {
        return Err(cfg_err(format!("grid.dx = {dx} must be positive")));
    }
    match dim {
        1 => Ok(Grid::new_1d(n, dx)),
        3 => Ok(Grid::new_3d(n, dx)),
        _ => Err(cfg_err(format!("grid.dim = {dim} must be 1 or 3"))),
    }
}

fn spinor(kind: Kind) -> Vec<C64> {
    match kind {
        Kind::Dirac { .. } => generic_dirac_spinor().to_vec(),
        Kind::Weyl { .. } => generic_weyl_spinor().to_vec(),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn bump(c: &ExperimentConfig, kind: Kind, horizon: f64) -> Result<SpinorField> {
    let center = c.f(c.state.center, "state.center")?;
    let width = c.f(c.state.width, "state.width")?;
    make_bump(grid_of(c)?, kind, [0.0, 0.0, center], width, &spinor(kind), horizon)
}

// ---------------------------------------------------------------------------

/// Causal vs Newton–Wigner evolution of a compact bump: norm and the
/// probability outside the light cone of the initial support.
fn evolve(c: &ExperimentConfig) -> Result<Report> {
    let kind = c.system()?;
    let times = c.times()?;
    let psi = bump(c, kind, max_abs(&times))?;
    let (center, width) = (c.f(c.state.center, "state.center")?, c.f(c.state.width, "state.width")?);
    let (tol_norm, tol_leak) = (c.tol(c.tolerances.norm, "norm")?, c.tol(c.tolerances.leak, "leak")?);
    let outside = |t: f64| {
        let r = width + t.abs();
        if psi.grid().dim() == 1 {
            RegionMask::Union(vec![
                RegionMask::half_space_below(E3, center - r),
                RegionMask::half_space_above(E3, center + r),
            ])
        } else {
            RegionMask::ball([0.0, 0.0, center], r).complement()
        }
    };
    let mut rep = Report::new(&["t", "norm_sqr", "causal_outside_cone", "newton_wigner_outside_cone"]);
    rep.note(format!("state: bump of radius {width} at x3 = {center}, {kind:?}"));
    let (mut worst_norm, mut worst_leak, mut nw_max) = (0.0f64, 0.0f64, 0.0f64);
    for &t in &times {
        let causal = evolve_causal(&psi, t)?;
        let nw = evolve_newton_wigner(&psi, t, Sign::Plus)?;
        let n = causal.norm_sqr();
        let pc = localization_probability(&causal, &outside(t))?;
        let pn = localization_probability(&nw, &outside(t))?;
        worst_norm = worst_norm.max((n - 1.0).abs());
        worst_leak = worst_leak.max(pc);
        nw_max = nw_max.max(pn);
        rep.row(vec![t.into(), n.into(), pc.into(), pn.into()]);
    }
    rep.note(format!("largest Newton–Wigner outside-cone probability: {nw_max:.3e}"));
    rep.check("norm", worst_norm <= tol_norm, format!("max |‖ψ_t‖² − 1| = {worst_norm:.3e} ≤ {tol_norm:.1e}"));
    rep.check("causal-leak", worst_leak <= tol_leak, format!("max outside-cone probability {worst_leak:.3e} ≤ {tol_leak:.1e}"));
    Ok(rep)
}

/// Support edges `e(ψ_t)` in both directions and their tent fits.
fn frontier(c: &ExperimentConfig) -> Result<Report> {
    let kind = c.system()?;
    let tau_edge = c.tol(c.tolerances.edge, "edge")?;
    let psi1 = bump(c, kind, 0.0)?;
    let dx = psi1.grid().dx();
    let (state, predicted) = match c.recipe() {
        "bump" => (psi1, None),
        "tent" => {
            let (tau, delta) = (c.f(c.state.tau, "state.tau")?, c.f(c.state.delta, "state.delta")?);
            let case = TentCase::classify(tau, delta);
            // a centred symmetric bump has t_e = t_ē = 0
            let p = construct_prescribed_tent(&psi1, (0.0, 0.0), tau, delta, case)?;
            (p.state, Some((p.t_e, p.t_ebar)))
        }
        r => return Err(cfg_err(format!("frontier does not support recipe '{r}'"))),
    };
    let times = c.times()?;
    let dt = times.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let (p, m) = frontier_profiles_pm(&State::Smooth(state), &times, tau_edge)?;
    let (fp, fm) = (fit_tent(&p)?, fit_tent(&m)?);
    let mut rep = Report::new(&["t", "edge_plus", "edge_minus", "tent_plus", "tent_minus"]);
    for (i, &t) in times.iter().enumerate() {
        rep.row(vec![t.into(), p.edges[i].into(), m.edges[i].into(), fp.value(t).into(), fm.value(t).into()]);
    }
    rep.note(format!("fit +e3: e0 = {}, t_e = {}, residual = {}", fp.e0, fp.t_e, fp.residual));
    rep.note(format!("fit -e3: e0 = {}, t_e = {}, residual = {}", fm.e0, fm.t_e, fm.residual));
    let bound = c.tol(c.tolerances.tent_cells, "tent_cells")? * dx;
    rep.check(
        "tent-residual",
        fp.residual <= bound && fm.residual <= bound,
        format!("residuals {:.3e}, {:.3e} ≤ {bound:.3e}", fp.residual, fm.residual),
    );
    if let Some((te, teb)) = predicted {
        let ok = (fp.t_e - te).abs() <= 2.0 * dt && (fm.t_e - teb).abs() <= 2.0 * dt;
        rep.check(
            "change-times",
            ok,
            format!("fitted ({}, {}) vs predicted ({te}, {teb}) within 2Δt = {}", fp.t_e, fm.t_e, 2.0 * dt),
        );
    }
    Ok(rep)
}

/// A late-change state cut from the top of a case-(i) tent seed.
fn late_change(c: &ExperimentConfig) -> Result<LateChange> {
    let kind = c.system()?;
    if c.recipe() != "late-change" {
        return Err(cfg_err(format!("recipe '{}' is not 'late-change'", c.recipe())));
    }
    let tau_edge = c.tol(c.tolerances.edge, "edge")?;
    let psi1 = bump(c, kind, 0.0)?;
    // τ = −0.6, δ = 0.6 gives a seed with t_ē = 0.6
    let seed = construct_prescribed_tent(&psi1, (0.0, 0.0), -0.6, 0.6, TentCase::I)?;
    let slice = c.f(c.state.slice, "state.slice")?;
    make_late_change_state(&seed.state, slice, c.orientation()?, &symmetric_times(4.0, 80), tau_edge)
}

/// Boosted late-change states stay in the contracted carrier `[0, 2α e^{−ρ}]`.
fn boost(c: &ExperimentConfig) -> Result<Report> {
    let lc = late_change(c)?;
    let sg = lc.orientation;
    let tol = c.tol(c.tolerances.probability, "probability")?;
    let rhos = c.schedule.rhos.clone().ok_or_else(|| cfg_err("schedule.rhos is required"))?;
    let mut rep = Report::new(&["rho", "signed_rho", "upper", "probability", "outside"]);
    rep.note(format!("late-change state: carrier [{}, {}], α = {}, ς = {sg}", lc.e, lc.upper, lc.alpha));
    let mut worst = 0.0f64;
    for rho in rhos {
        if rho < 0.0 {
            return Err(cfg_err("rapidities must be ≥ 0 (the orientation sets the sign)"));
        }
        let hi = 2.0 * lc.alpha * (-rho).exp();
        let p = boosted_probability_in(&lc.state, sg.value() * rho, 0.0, hi, hi / 100.0)?;
        worst = worst.max(1.0 - p);
        rep.row(vec![rho.into(), (sg.value() * rho).into(), hi.into(), p.into(), (1.0 - p).into()]);
    }
    rep.check("contracted-carrier", worst <= tol, format!("max outside probability {worst:.3e} ≤ {tol:.1e}"));
    Ok(rep)
}

/// Probability of boosted late-change states in the strip `|x₃| ≤ δ`.
fn contract(c: &ExperimentConfig) -> Result<Report> {
    let lc = late_change(c)?;
    let delta = c.f(c.state.delta, "state.delta")?;
    let tol = c.tol(c.tolerances.probability, "probability")?;
    let rhos = c.schedule.rhos.clone().ok_or_else(|| cfg_err("schedule.rhos is required"))?;
    let signed: Vec<f64> = rhos.iter().map(|r| lc.orientation.value() * r).collect();
    let scan = lorentz_contraction_scan(&lc.state, delta, &signed, 1e-3)?;
    let mut rep = Report::new(&["rho", "probability"]);
    rep.note(format!("strip |x3| ≤ {delta}; late-change carrier [{}, {}]", lc.e, lc.upper));
    for (rho, p) in &scan {
        rep.row(vec![(*rho).into(), (*p).into()]);
    }
    let (rho_max, p_max) = scan
        .iter()
        .copied()
        .max_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .ok_or_else(|| cfg_err("schedule.rhos is empty"))?;
    rep.check("contraction", p_max >= 1.0 - tol, format!("p(ρ = {rho_max}) = {p_max} ≥ 1 − {tol:.1e}"));
    Ok(rep)
}

/// Radial Weyl diagnostics from the closed form.
fn radial(c: &ExperimentConfig) -> Result<Report> {
    let Kind::Weyl { chirality } = c.system()? else {
        return Err(cfg_err("radial needs a Weyl system"));
    };
    let nodes = c.grid.n.ok_or_else(|| cfg_err("grid.n is required"))?;
    let radius = c.f(c.state.width, "state.width")?;
    let sp = generic_weyl_spinor();
    let profile = RadialProfile::bump(radius, sp, nodes)?;
    let times = c.times()?;
    let rows = radial_table(&profile, chirality, &times)?;
    let mut rep = Report::new(&[
        "t", "ball_prob", "outer_prob", "slab_prob", "norm_a_plus", "norm_a_minus", "norm_r", "spectral_error",
    ]);
    rep.note(format!("profile: bump of radius {radius} on {nodes} nodes, χ = {chirality}; ball B_|t| centred"));
    let mut spectral_worst = 0.0f64;
    let (mut outer_min, mut range_ok) = (f64::INFINITY, true);
    for r in &rows {
        let spectral = if r.t != 0.0 && r.t.abs() <= 2.0 {
            let e = crosscheck_against_spectral(&profile, r.t, None)?;
            spectral_worst = spectral_worst.max(e);
            e
        } else {
            f64::NAN
        };
        let outer = 1.0 - r.ball_prob;
        if r.t.abs() >= 5.0 {
            outer_min = outer_min.min(outer);
        }
        range_ok &= (-1e-12..=1.0 + 1e-12).contains(&r.ball_prob) && (-1e-12..=1.0 + 1e-12).contains(&r.slab_prob);
        rep.row(vec![
            r.t.into(),
            r.ball_prob.into(),
            outer.into(),
            r.slab_prob.into(),
            r.norm_a_plus.into(),
            r.norm_a_minus.into(),
            r.norm_r.into(),
            spectral.into(),
        ]);
    }
    let tol = c.tol(c.tolerances.probability, "probability")?;
    rep.check("probability-range", range_ok, "ball and slab probabilities in [0, 1]");
    rep.check("spectral-crosscheck", spectral_worst <= 1e-5, format!("max relative L² error {spectral_worst:.3e} ≤ 1e-5"));
    if outer_min.is_finite() {
        rep.check("outer-probability", outer_min >= 0.23, format!("min outer probability for |t| ≥ 5: {outer_min}"));
    }
    if let Some(last) = rows.iter().max_by(|a, b| a.t.abs().total_cmp(&b.t.abs())) {
        if last.t.abs() >= 40.0 {
            let d = (last.ball_prob - 0.5).abs();
            rep.check("centred-limit", d <= 0.02 + tol, format!("|p(t = {}) − ½| = {d:.3e}", last.t));
        }
    }
    Ok(rep)
}

/// Point-localized sequences (gaussian recipe) or energy growth (shell).
fn pol(c: &ExperimentConfig) -> Result<Report> {
    let kind = c.system()?;
    let Kind::Dirac { mass } = kind else {
        return Err(cfg_err("pol needs a Dirac system"));
    };
    let grid = grid_of(c)?;
    if grid.dim() != 3 {
        return Err(cfg_err("pol needs a 3D grid"));
    }
    let ns = c.schedule.ns.clone().ok_or_else(|| cfg_err("schedule.ns is required"))?;
    let u0: [C64; 4] = generic_dirac_spinor();
    match c.recipe() {
        "gaussian" => {
            let sig = c.f(c.state.sigma, "state.sigma")?;
            let seed = SpinorField::from_momentum_fn(grid, kind, |p, out| {
                let e = (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2.0 * sig * sig)).exp();
                for (o, u) in out.iter_mut().zip(&u0) {
                    *o = u * e;
                }
            })
            .normalized()?;
            let radius = c.f(c.region.radius, "region.radius")?;
            let ball = RegionMask::ball([0.0; 3], radius);
            let mut rep = Report::new(&["n", "pol_ball", "ball_norm", "negative_fraction"]);
            rep.note(format!("seed: gaussian momentum profile σ = {sig}, ball radius {radius}, mass {mass}"));
            let mut vals = Vec::new();
            let mut last_neg = f64::NAN;
            for &n in &ns {
                let phi = point_localized_sequence(&seed, n)?;
                let t = pol_expectation(&phi, &ball, Sign::Plus)?;
                let (bn, neg) = match nepom_check(&[(n, phi)], &ball) {
                    Ok(r) => (r[0].ball_norm, r[0].negative_fraction),
                    Err(Error::DegenerateState(_)) => (0.0, f64::NAN),
                    Err(e) => return Err(e),
                };
                last_neg = neg;
                vals.push(t);
                rep.row(vec![n.into(), t.into(), bn.into(), neg.into()]);
            }
            let tol = c.tol(c.tolerances.probability, "probability")?;
            let tneg = c.tol(c.tolerances.negative, "negative")?;
            let mono = vals.windows(2).all(|w| w[1] >= w[0] - 1e-3);
            let last = *vals.last().ok_or_else(|| cfg_err("schedule.ns is empty"))?;
            rep.check("nondecreasing", mono, "⟨φ_n, T(B)φ_n⟩ nondecreasing within 1e-3");
            rep.check("concentration", last >= 1.0 - tol, format!("final ⟨φ_n, T(B)φ_n⟩ = {last} ≥ 1 − {tol}"));
            rep.check("negative-energy", last_neg <= tneg, format!("final negative fraction {last_neg} ≤ {tneg}"));
            Ok(rep)
        }
        "shell" => {
            let (r_in, r_out) = (c.f(c.state.r_in, "state.r_in")?, c.f(c.state.r_out, "state.r_out")?);
            let phi0 = shell_state(grid, mass, u0, r_in, r_out)?;
            let eg = energy_growth(&phi0, &ns)?;
            // ⟨|p|⟩ of the uniform shell
            let exact = 0.75 * (r_out.powi(4) - r_in.powi(4)) / (r_out.powi(3) - r_in.powi(3));
            let mut rep = Report::new(&["n", "energy_per_n", "lattice_target", "continuum_target", "relative_error"]);
            rep.note(format!("shell {r_in} ≤ |p| ≤ {r_out}, mass {mass}; continuum target ⟨|p|⟩ = {exact}"));
            for &(n, e) in &eg.rows {
                rep.row(vec![n.into(), e.into(), eg.target.into(), exact.into(), ((e - exact) / exact).into()]);
            }
            let tol = c.tol(c.tolerances.energy, "energy")?;
            let (n, e) = *eg.rows.last().ok_or_else(|| cfg_err("schedule.ns is empty"))?;
            let err = ((e - exact) / exact).abs();
            rep.check("energy-growth", err <= tol, format!("relative error {err:.3e} at n = {n} ≤ {tol}"));
            Ok(rep)
        }
        r => Err(cfg_err(format!("pol does not support recipe '{r}'"))),
    }
}

/// Measurement cascades on random positive-energy states.
fn cascade(c: &ExperimentConfig) -> Result<Report> {
    let kind = c.system()?;
    let grid = grid_of(c)?;
    let seed = c.seed.ok_or_else(|| cfg_err("seed is required"))?;
    let count = c.state.count.unwrap_or(50);
    let sigma = c.f(c.state.sigma, "state.sigma")?;
    let depth = c.schedule.steps.unwrap_or(8);
    let radius = c.f(c.region.radius, "region.radius")?;
    let tol = c.tol(c.tolerances.pol, "pol")?;
    let ball = RegionMask::ball([0.0; 3], radius);
    let mut rep = Report::new(&["state", "n", "gamma_even", "gamma_odd", "omega", "sigma"]);
    rep.note(format!("{count} random states (σ_p = {sigma}, seeds {seed}..), ball radius {radius}, depth {depth}"));
    let (mut omega_ok, mut sigma_ok, mut moment_ok, mut pair_ok) = (true, true, true, true);
    let mut pair_range = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..count as u64 {
        let phi = random_positive_energy_state(grid, kind, sigma, seed.wrapping_add(i))?;
        let s = measurement_cascade(&phi, &ball, depth)?;
        for n in 0..s.omega.len() {
            rep.row(vec![
                i.into(),
                (n + 1).into(),
                s.gamma[2 * n].into(),
                s.gamma[2 * n + 1].into(),
                s.omega[n].into(),
                s.sigma[n].into(),
            ]);
        }
        omega_ok &= s.omega.windows(2).all(|w| w[1] >= w[0] - tol);
        sigma_ok &= s.sigma.windows(2).all(|w| w[1] <= w[0] + tol);
        moment_ok &= (1..s.gamma.len() - 1).filter(|k| *k <= 8).all(|k| {
            s.gamma[k - 1] * s.gamma[k + 1] >= s.gamma[k] * s.gamma[k] - tol
        });
        let pair = s.sigma2 + s.sigma2_prime;
        pair_range = (pair_range.0.min(pair), pair_range.1.max(pair));
        pair_ok &= pair >= 0.5 - tol && pair < 1.0;
    }
    rep.check("omega-monotone", omega_ok, format!("ω_n nondecreasing within {tol:.0e}"));
    rep.check("sigma-monotone", sigma_ok, format!("σ_n nonincreasing within {tol:.0e}"));
    rep.check("moments", moment_ok, "γ_{k−1}γ_{k+1} ≥ γ_k² for k ≤ 8");
    rep.check("pair-sum", pair_ok, format!("σ₂ + σ₂′ ∈ [{}, {}] ⊂ [½, 1)", pair_range.0, pair_range.1));
    Ok(rep)
}

/// Exact closed-form and lattice identities.
fn lattice(_c: &ExperimentConfig) -> Result<Report> {
    let mut rep = Report::new(&["witness", "computed", "expected", "pass"]);
    let add = |rep: &mut Report, name: &str, computed: String, expected: String, ok: bool| {
        rep.row(vec![name.into(), computed.clone().into(), expected.clone().into(), ok.into()]);
        rep.check(name, ok, format!("{computed} vs {expected}"));
    };
    // regions of influence
    let b = influence_ball([1.0, 2.0, 3.0], -2.0);
    let want = RegionMask::Ball { center: [1.0, 2.0, 3.0], radius: 2.0 };
    add(&mut rep, "influence-ball", format!("{b:?}"), format!("{want:?}"), b == want);
    let b = influence_boosted_point([0.0, 0.0, 1.0], 1.0);
    let want = RegionMask::Ball { center: [0.0, 0.0, 1f64.cosh()], radius: 1f64.sinh().abs() };
    add(&mut rep, "influence-boosted-point", format!("{b:?}"), format!("{want:?}"), b == want);
    let s = influence_strip(0.0, 1.5, E3, 0.5)?;
    let want = RegionMask::Strip { e: E3, lo: 0.0, hi: 1.5 * 0.5f64.exp() };
    add(&mut rep, "influence-strip", format!("{s:?}"), format!("{want:?}"), s == want);
    let p = influence_cylinder(1.0, 1.0, 2.0, 1.0)?;
    let (ch, th, e1) = (1f64.cosh(), 1f64.tanh(), 1f64.exp());
    let want = [[1.0, 0.0, (-1f64).exp()], [1.0 + th, 0.0, 1.0 / ch], [1.0 + th * 2.0, 0.0, 2.0 / ch], [1.0, 0.0, e1 * 2.0]];
    add(&mut rep, "influence-cylinder", format!("{:?}", p.points), format!("{want:?}"), p.points == want);

    // causal lattice in lightcone coordinates
    let (g, d) = (1.0, -0.5);
    let r = LightconeRegion::h(Cmp::Le, g).intersection(&LightconeRegion::k(Cmp::Ge, d));
    let got = r.causal_complement();
    let want = LightconeRegion::h(Cmp::Gt, g).intersection(&LightconeRegion::k(Cmp::Lt, d));
    rep.note(format!("R = {r}"));
    add(&mut rep, "half-space-complement", got.to_string(), want.to_string(), got == want);
    let got = LightconeRegion::h(Cmp::Le, g).causal_complement();
    add(&mut rep, "half-plane-complement-empty", got.to_string(), "∅".into(), got.is_empty());

    let two = LightconeRegion::point(0.0, 0.0).union(&LightconeRegion::point(2.0, 0.0));
    let got = two.completion(Relation::Causal);
    let want = LightconeRegion::rect(Interval::closed(0.0, 2.0), Interval::closed(0.0, 2.0));
    add(&mut rep, "two-point-completion", got.to_string(), want.to_string(), got == want);

    let l = LightconeRegion::h(Cmp::Lt, 0.0).intersection(&LightconeRegion::k(Cmp::Gt, 2.0));
    let m = LightconeRegion::h(Cmp::Lt, 0.0).intersection(&LightconeRegion::k(Cmp::Gt, 0.0));
    rep.note(format!("L = {l}"));
    rep.note(format!("M = {m}"));
    let got = l.join(&m.causal_complement(), Relation::Causal).meet(&m, Relation::Causal);
    add(&mut rep, "orthomodularity-failure", got.to_string(), format!("{m} ≠ L"), got == m && got != l);

    let (alpha, delta) = (-0.5, 1.5);
    let rect = Rect::new(Interval::at_least(alpha, true), Interval::at_most(delta, true));
    let base = FlatBase::of_diamond(&rect)?;
    let want = FlatBase { x0: 0.5 * (delta + alpha), x3: Interval::at_most(0.5 * (delta - alpha), true) };
    let ok = base == want && base.completion() == LightconeRegion::rect(rect.u, rect.v);
    add(&mut rep, "flat-base", format!("x0 = {}, x3 ∈ {}", base.x0, base.x3), format!("x0 = {}, x3 ∈ {}", want.x0, want.x3), ok);

    let sigma = FlatBase { x0: 0.0, x3: Interval::at_least(0.0, false) };
    let got = sigma.completion();
    let want = LightconeRegion::h(Cmp::Le, 0.0)
        .intersection(&LightconeRegion::k(Cmp::Ge, 0.0))
        .difference(&LightconeRegion::point(0.0, 0.0));
    add(&mut rep, "half-hyperplane-completion", got.to_string(), want.to_string(), got == want);
    Ok(rep)
}

/// Monte Carlo measure of the timelike lines meeting two diamonds.
fn lines(c: &ExperimentConfig) -> Result<Report> {
    let seed = c.seed.ok_or_else(|| cfg_err("seed is required"))?;
    let n = c.lines.samples.ok_or_else(|| cfg_err("lines.samples is required"))?;
    let hw = c.f(c.lines.half_width, "lines.half_width")?;
    let target = c.lines_target()?;
    let z_tol = c.tol(c.tolerances.z, "z")?;
    let m = DiamondRegion::point_pair(1.0, [0.0; 3], 1.0)?;
    let l = DiamondRegion::point_pair(-1.0, [0.0; 3], 1.0)?;
    let meet = m.meet(&l)?.ok_or_else(|| Error::InvariantFailure("M ∧′ L is empty".into()))?;
    let bx = SamplingBox::new(hw);
    let both = monte_carlo_line_measure(|u| line_hits(&m, u) && line_hits(&l, u), bx, n, seed)?;
    let point = monte_carlo_line_measure(|u| line_hits(&meet, u), bx, n, seed.wrapping_add(1))?;
    let mut rep = Report::new(&["experiment", "N", "estimate", "stderr", "target", "z_score"]);
    rep.note("M = {|x0 − 1| + |x| ≤ 1}, L = {|x0 + 1| + |x| ≤ 1}, M ∧′ L = {0}");
    rep.note(format!("sampling x ∈ [−{hw}, {hw}]³, v ∈ O₁; seed {seed}"));
    let z = both.z_score(target);
    rep.row(vec!["T_M ∩ T_L".into(), both.samples.into(), both.estimate.into(), both.stderr.into(), target.into(), z.into()]);
    rep.row(vec![
        "T_(M meet L)".into(),
        point.samples.into(),
        point.estimate.into(),
        point.stderr.into(),
        0.0.into(),
        point.z_score(0.0).into(),
    ]);
    rep.check("target", z.abs() <= z_tol, format!("z = {z:.3} for target {target}, |z| ≤ {z_tol}"));
    rep.check("meet-null", point.hits == 0, format!("{} hits on M ∧′ L", point.hits));
    Ok(rep)
}

/// A desk-scale property battery over every module.
fn selftest(c: &ExperimentConfig) -> Result<Report> {
    let seed = c.seed.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new(&["module", "property", "value", "threshold", "pass"]);
    let add = |rep: &mut Report, module: &str, prop: &str, value: f64, thr: f64, ok: bool| {
        rep.row(vec![module.into(), prop.into(), Cell::Num(value), Cell::Num(thr), ok.into()]);
        rep.check(format!("{module}/{prop}"), ok, format!("{value:.3e} vs {thr:.1e}"));
    };

    // algebra: energy projectors are complementary idempotents
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let kind = Kind::Dirac { mass: rng.gen_range(0.1..2.0) };
        let (pp, pm) = (energy_projector(p, Sign::Plus, kind)?, energy_projector(p, Sign::Minus, kind)?);
        for i in 0..4 {
            for j in 0..4 {
                let sum = pp.entry(i, j) + pm.entry(i, j) - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                let sq: C64 = (0..4).map(|k| pp.entry(i, k) * pp.entry(k, j)).sum::<C64>() - pp.entry(i, j);
                worst = worst.max(sum.norm()).max(sq.norm());
            }
        }
    }
    add(&mut rep, "algebra", "projector-identities", worst, 1e-12, worst <= 1e-12);

    // dynamics: unitarity and causal support
    let kind = Kind::Dirac { mass: 1.0 };
    let psi = make_bump(Grid::new_1d(1024, 0.02), kind, [0.0; 3], 1.0, &generic_dirac_spinor(), 3.0)?;
    let out = evolve_causal(&psi, 2.0)?;
    let dn = (out.norm_sqr() - 1.0).abs();
    add(&mut rep, "dynamics", "norm", dn, 1e-10, dn <= 1e-10);
    let leak = localization_probability(
        &out,
        &RegionMask::Union(vec![RegionMask::half_space_below(E3, -3.0), RegionMask::half_space_above(E3, 3.0)]),
    )?;
    add(&mut rep, "dynamics", "causal-leak", leak, 1e-8, leak <= 1e-8);

    // frontier: tent fit of a bump
    let psi = make_bump(Grid::new_1d(1024, 0.01), kind, [0.0; 3], 0.5, &generic_dirac_spinor(), 0.0)?;
    let (p, _) = frontier_profiles_pm(&State::Smooth(psi), &symmetric_times(1.0, 20), 1e-6)?;
    let fit = fit_tent(&p)?;
    add(&mut rep, "frontier", "tent-residual", fit.residual, 0.02, fit.residual <= 0.02);

    // weylradial: closed form vs Fourier-sine route
    let profile = RadialProfile::bump(1.0, generic_weyl_spinor(), 1024)?;
    let e = crosscheck_against_spectral(&profile, 1.0, None)?;
    add(&mut rep, "weylradial", "spectral-crosscheck", e, 1e-4, e <= 1e-4);

    // pol: cascade monotonicity on a random state
    let phi = random_positive_energy_state(Grid::new_3d(16, 0.5), kind, 1.5, seed)?;
    let s = measurement_cascade(&phi, &RegionMask::ball([0.0; 3], 1.0), 6)?;
    let viol = s
        .omega
        .windows(2)
        .map(|w| w[0] - w[1])
        .chain(s.sigma.windows(2).map(|w| w[1] - w[0]))
        .fold(0.0f64, f64::max);
    add(&mut rep, "pol", "cascade-monotonicity", viol, 1e-12, viol <= 1e-12);

    // causalgeo: closure laws on random rectangle unions
    let mut failures = 0.0;
    for _ in 0..100 {
        let rects: Vec<Rect> = (0..rng.gen_range(1..4))
            .map(|_| {
                let mut iv = || {
                    let (a, b) = (rng.gen_range(-4..=4) as f64 * 0.5, rng.gen_range(-4..=4) as f64 * 0.5);
                    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                    Interval::new(
                        causalab::causalgeo::Bound { value: lo, closed: rng.gen() },
                        causalab::causalgeo::Bound { value: hi, closed: rng.gen() },
                    )
                };
                Rect::new(iv(), iv())
            })
            .collect();
        let r = LightconeRegion::from_rects(rects);
        for rel in [Relation::Causal, Relation::NonTimelike] {
            let hat = r.completion(rel);
            let ok = r.is_subset(&hat) && hat.completion(rel) == hat && hat.complement(rel) == r.complement(rel);
            if !ok {
                failures += 1.0;
            }
        }
    }
    add(&mut rep, "causalgeo", "closure-laws", failures, 0.0, failures == 0.0);
    let m = DiamondRegion::point_pair(1.0, [0.0; 3], 1.0)?;
    let l = DiamondRegion::point_pair(-1.0, [0.0; 3], 1.0)?;
    let est = monte_carlo_line_measure(|u| line_hits(&m, u) && line_hits(&l, u), SamplingBox::new(2.0), 200_000, seed)?;
    let z = est.z_score(2.0 * PI * PI / 9.0).abs();
    add(&mut rep, "causalgeo", "line-measure-z", z, 4.0, z <= 4.0);
    Ok(rep)
}
