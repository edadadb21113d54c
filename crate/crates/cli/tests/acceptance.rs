//! Acceptance criteria, one PASS/FAIL line each. The process exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use causalab::algebra::{Kind, Sign};
use causalab::causalgeo::*;
use causalab::dynamics::{evolve_causal, evolve_newton_wigner, State, EPS_LEAK};
use causalab::field::{
    localization_probability, make_bump, make_bump_1d, Grid, RegionMask, SpinorField, E3, MINUS_E3,
};
use causalab::frontier::*;
use causalab::pol::*;
use causalab::weylradial::*;
use causalab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag and a one-line summary.
struct Outcome {
    pass: bool,
    detail: String,
}

/// Accumulates named sub-checks of a criterion.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failed.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn outcome(self) -> Outcome {
        let pass = self.failed.is_empty();
        let mut parts = self.notes;
        if !pass {
            parts.push(format!("failed: {}", self.failed.join("; ")));
        }
        Outcome { pass, detail: parts.join("; ") }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const TAU: f64 = DEFAULT_TAU;

fn dirac(m: f64) -> Kind {
    Kind::Dirac { mass: m }
}

fn spinor(kind: Kind) -> Vec<C64> {
    match kind {
        Kind::Dirac { .. } => generic_dirac_spinor().to_vec(),
        Kind::Weyl { .. } => generic_weyl_spinor().to_vec(),
    }
}

fn bump_1d(kind: Kind, c: f64, w: f64) -> SpinorField {
    make_bump_1d(Grid::new_1d(2048, 0.01), kind, c, w, &spinor(kind), 0.0).unwrap()
}

// ---------------------------------------------------------------------------

fn tent_law() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let params = [(0.0, 0.0), (0.2, 0.3), (-0.2, 0.3), (0.5, 0.2), (-0.5, 0.2)];
    let mut states: Vec<(Kind, f64, f64)> = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        states.extend(params.iter().map(|&(t, d)| (dirac(m), t, d)));
    }
    for (i, &(t, d)) in params.iter().enumerate() {
        let chi = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        states.push((Kind::Weyl { chirality: chi }, t, d));
    }
    let (mut worst_fit, mut worst_min) = (0.0f64, 0.0f64);
    for &(kind, tau, delta) in &states {
        let label = format!("{kind:?} τ={tau} δ={delta}");
        let p = construct_prescribed_tent(&bump_1d(kind, 0.0, 0.5), (0.0, 0.0), tau, delta, TentCase::classify(tau, delta))
            .unwrap();
        let f = p.state;
        let dx = f.grid().dx();
        let e = support_edge(&f, E3, TAU).unwrap();
        let eb = support_edge(&f, MINUS_E3, TAU).unwrap();
        let diam = -eb - e;
        let k = 40;
        let times = symmetric_times(2.0 * diam, k);
        let (pp, pm) = frontier_profiles_pm(&State::Smooth(f), &times, TAU).unwrap();
        for (prof, e0) in [(&pp, e), (&pm, eb)] {
            let fit = fit_tent(prof).unwrap();
            worst_fit = worst_fit.max(fit.residual / dx);
            c.check(fit.residual <= 2.0 * dx, format!("{label}: tent residual {}", fit.residual));
            // min(e(ψ_t), e(ψ_{−t})) = e(ψ) − t for t ≥ 0
            for i in 0..=k {
                let t = times[k + i];
                let lo = prof.edges[k + i].min(prof.edges[k - i]);
                let d = (lo - (e0 - t)).abs();
                worst_min = worst_min.max(d / dx);
                c.check(d <= 2.0 * dx, format!("{label}: min law at t = {t}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let nd = states.iter().filter(|s| matches!(s.0, Kind::Dirac { .. })).count();
    c.check(nd >= 10 && states.len() - nd >= 5, "state counts");
    c.check(secs <= 60.0, format!("runtime {secs:.1} s"));
    c.note(format!(
        "{nd} Dirac + {} Weyl states; max residual {worst_fit:.2}Δx, max min-law error {worst_min:.2}Δx; {secs:.1} s",
        states.len() - nd
    ));
    c.outcome()
}

fn lorentz_contraction() -> Outcome {
    let mut c = Checks::default();
    let seed = construct_prescribed_tent(&bump_1d(dirac(1.0), 0.0, 0.5), (0.0, 0.0), -0.6, 0.6, TentCase::I).unwrap();
    let mut worst = 0.0f64;
    for sg in [Sign::Plus, Sign::Minus] {
        let lc = make_late_change_state(&seed.state, 0.4, sg, &symmetric_times(4.0, 80), TAU).unwrap();
        for rho in [0.5, 1.0, 2.0, 3.0] {
            let hi = 2.0 * lc.alpha * f64::exp(-rho);
            let p = boosted_probability_in(&lc.state, sg.value() * rho, 0.0, hi, hi / 100.0).unwrap();
            worst = worst.max(1.0 - p);
            c.check(p >= 1.0 - 1e-5, format!("ς = {sg}, ρ = {rho}: p = {p}"));
        }
        let strip = lorentz_contraction_scan(&lc.state, 0.1, &[sg.value() * 3.0], 1e-3).unwrap()[0].1;
        c.check(strip >= 0.999, format!("ς = {sg}: strip probability {strip}"));
        c.note(format!("ς = {sg}: p(ρ=3, δ=0.1) = {strip:.6}"));
    }
    c.note(format!("max probability outside [0, 2α e^(−ρ)]: {worst:.2e}"));
    c.outcome()
}

const WEYL_SPINOR: Spinor2 = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.3, im: -0.4 }];

fn weyl_profile() -> RadialProfile {
    RadialProfile::bump(1.0, WEYL_SPINOR, 4096).unwrap()
}

fn weyl_radial_oracle() -> Outcome {
    let mut c = Checks::default();
    let p = weyl_profile();
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let e = crosscheck_against_spectral(&p, t, None).unwrap();
        worst = worst.max(e);
        c.check(e <= 1e-5, format!("t = {t}: spectral error {e:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_ip = 0.0f64;
    for _ in 0..400 {
        let x: [f64; 3] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() < 1e-3 {
            continue;
        }
        let t = rng.gen_range(-2.5..2.5);
        let chi = if rng.gen() { Sign::Plus } else { Sign::Minus };
        let (ap, am, _) = closed_form_components(&p, chi, t, x).unwrap();
        let ip = (ap[0].conj() * am[0] + ap[1].conj() * am[1]).norm();
        let scale = ((ap[0].norm_sqr() + ap[1].norm_sqr()) * (am[0].norm_sqr() + am[1].norm_sqr())).sqrt();
        worst_ip = worst_ip.max(ip / scale.max(1.0));
    }
    c.check(worst_ip <= 1e-13, format!("pointwise ⟨A⁺, A⁻⟩ = {worst_ip:e}"));
    let mut worst_norm = 0.0f64;
    for t in [-2.0f64, -0.5, 0.3, 0.8, 3.0] {
        for s in [Sign::Plus, Sign::Minus] {
            let lhs = 2.0 * RadialEvolution::norm_a_sqr(&p, t, s);
            let rhs = 1.0 - s.value() * t.signum() * p.ball_mass(t.abs());
            worst_norm = worst_norm.max((lhs - rhs).abs());
        }
    }
    c.check(worst_norm <= 1e-6, format!("norm identity error {worst_norm:e}"));
    c.note(format!(
        "spectral {worst:.1e}, orthogonality {worst_ip:.1e}, norm identity {worst_norm:.1e}"
    ));
    c.outcome()
}

fn asymptotic_ball() -> Outcome {
    let mut c = Checks::default();
    let p = weyl_profile();
    let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
    let mut worst_match = 0.0f64;
    for chi in [Sign::Plus, Sign::Minus] {
        let (l0p, l0m) = asymptotic_ball_probability(&p, [0.0; 3], chi);
        c.check((l0p - 0.5).abs() <= 1e-3 && (l0m - 0.5).abs() <= 1e-3, format!("b = 0 limits {l0p}, {l0m}"));
        for b in [[0.0, 0.0, 0.5], [0.3, -0.4, 0.8], [0.0, 2.0, 0.0], [1.0, 1.0, -1.0]] {
            let (lp, lm) = asymptotic_ball_probability(&p, b, chi);
            for l in [lp, lm] {
                spread = (spread.0.min(l), spread.1.max(l));
                c.check((0.25..=0.75).contains(&l), format!("b = {b:?}: limit {l}"));
            }
            let sp = ball_probability(&p, chi, 40.0, b, 40.0);
            let sm = ball_probability(&p, chi, -40.0, b, 40.0);
            worst_match = worst_match.max((sp - lp).abs()).max((sm - lm).abs());
        }
    }
    c.check(worst_match <= 0.02, format!("t = ±40 vs limit: {worst_match}"));
    let e = [0.0, 0.6, 0.8];
    let mut slab_min = f64::INFINITY;
    for b in [[0.0; 3], [0.2, 0.5, -0.3]] {
        for sign in [1.0, -1.0] {
            let ts: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|t| sign * t).collect();
            let table = slab_probability_limit(&p, Sign::Minus, b, e, &ts).unwrap();
            slab_min = slab_min.min(table.last().unwrap().1);
        }
    }
    c.check(slab_min >= 0.99, format!("slab probability {slab_min}"));
    c.note(format!(
        "off-centre limits in [{:.3}, {:.3}], |p(±40) − limit| ≤ {worst_match:.1e}, slab(|t|=40) ≥ {slab_min:.4}",
        spread.0, spread.1
    ));
    c.outcome()
}

fn dirac_weyl_contrast() -> Outcome {
    let mut c = Checks::default();
    // Dirac: a 1D bump of mass 1 leaves the strip {|x₃| ≤ |t|} only through
    // its fastest momenta
    let psi = make_bump(Grid::new_1d(8192, 0.05), dirac(1.0), [0.0; 3], 1.0, &generic_dirac_spinor(), 100.0).unwrap();
    let outer: Vec<f64> = [20.0, 50.0, 100.0, -100.0]
        .iter()
        .map(|&t| {
            let f = evolve_causal(&psi, t).unwrap();
            localization_probability(&f, &RegionMask::strip(E3, -t.abs(), t.abs()).complement()).unwrap()
        })
        .collect();
    c.check(outer[0] > outer[1] && outer[1] > outer[2], format!("Dirac outer not decreasing: {outer:?}"));
    c.check(outer[1..].iter().all(|&o| o <= 0.01), format!("Dirac outer {outer:?}"));
    // Weyl radial states
    let p = weyl_profile();
    let mut outer_min = f64::INFINITY;
    let mut inner_max = 0.0f64;
    for b in [[0.0; 3], [0.0, 0.0, 0.9], [1.5, 0.0, 0.0]] {
        for t in [2.0, 5.0, 10.0, 20.0, 40.0, -10.0, -40.0] {
            let o = 1.0 - ball_probability(&p, Sign::Plus, t, b, f64::abs(t));
            outer_min = outer_min.min(o);
            if t.abs() >= 10.0 {
                inner_max = inner_max.max(ball_probability(&p, Sign::Plus, t, b, 0.5 * f64::abs(t)));
            }
        }
    }
    let centred = 1.0 - ball_probability(&p, Sign::Plus, 40.0, [0.0; 3], 40.0);
    c.check(outer_min >= 0.23, format!("Weyl outer minimum {outer_min}"));
    c.check((centred - 0.5).abs() <= 0.02, format!("Weyl outer at t = 40: {centred}"));
    c.check(inner_max <= 0.01, format!("Weyl inner B_(|t|/2) maximum {inner_max}"));
    c.note(format!(
        "Dirac outer(|t|=50,100) = {:.1e}, {:.1e}; Weyl outer ≥ {outer_min:.3} (→ {centred:.4}); Weyl inner ≤ {inner_max:.1e}",
        outer[1], outer[2]
    ));
    c.outcome()
}

fn pol_statistics() -> Outcome {
    let mut c = Checks::default();
    let ball = RegionMask::ball([0.0; 3], 1.0);
    let mut pair = (f64::INFINITY, f64::NEG_INFINITY);
    for seed in 0..50 {
        let phi = random_positive_energy_state(Grid::new_3d(32, 0.25), dirac(1.0), 1.5, 100 + seed).unwrap();
        let s = measurement_cascade(&phi, &ball, MAX_CASCADE_DEPTH).unwrap();
        c.check(s.omega.windows(2).all(|w| w[1] >= w[0] - 1e-12), format!("seed {seed}: ω not monotone"));
        c.check(s.sigma.windows(2).all(|w| w[1] <= w[0] + 1e-12), format!("seed {seed}: σ not monotone"));
        for k in 1..s.gamma.len() - 1 {
            c.check(
                s.gamma[k - 1] * s.gamma[k + 1] >= s.gamma[k].powi(2) - 1e-12,
                format!("seed {seed}: moment inequality at k = {k}"),
            );
        }
        let x = s.sigma2 + s.sigma2_prime;
        pair = (pair.0.min(x), pair.1.max(x));
        c.check((0.5 - 1e-12..1.0).contains(&x), format!("seed {seed}: σ₂ + σ₂′ = {x}"));
    }
    c.note(format!("50 states, depth {MAX_CASCADE_DEPTH}; σ₂ + σ₂′ ∈ [{:.4}, {:.4}]", pair.0, pair.1));
    c.outcome()
}

const U0: [C64; 4] = [
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 0.3, im: -0.2 },
    C64 { re: 0.0, im: 0.5 },
    C64 { re: -0.4, im: 0.1 },
];

fn energy_growth_shell() -> Outcome {
    let mut c = Checks::default();
    let dx = 2.0 * PI / (64.0 * 0.1);
    let shell = shell_state(Grid::new_3d(64, dx), 1.0, U0, 1.0, 2.0).unwrap();
    let eg = energy_growth(&shell, &[64.0]).unwrap();
    // ⟨|p|⟩ over the uniform shell 1 ≤ |p| ≤ 2: (3/4)(2⁴ − 1)/(2³ − 1)
    let exact = 0.75 * 15.0 / 7.0;
    let v = eg.rows[0].1;
    let rel = (v - exact).abs() / exact;
    c.check(rel <= 0.02, format!("(1/64)⟨H⟩ = {v}"));
    c.note(format!("(1/64)⟨φ₆₄, Hφ₆₄⟩ = {v:.6} vs 45/28 = {exact:.6}, relative error {rel:.2e}"));
    c.outcome()
}

fn point_localization() -> Outcome {
    let mut c = Checks::default();
    let sig: f64 = 0.12;
    let seed = SpinorField::from_momentum_fn(Grid::new_3d(64, 4.0), dirac(1.0), |p, out| {
        let e = (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2.0 * sig * sig)).exp();
        for (o, u) in out.iter_mut().zip(&U0) {
            *o = u * e;
        }
    })
    .normalized()
    .unwrap();
    let ball = RegionMask::ball([0.0; 3], 1.0);
    let phi = point_localized_sequence(&seed, 64.0).unwrap();
    let t = pol_expectation(&phi, &ball, Sign::Plus).unwrap();
    let row = nepom_check(&[(64.0, phi)], &ball).unwrap()[0];
    c.check(t >= 0.99, format!("⟨T(B)⟩ = {t}"));
    c.check(row.negative_fraction <= 0.05, format!("negative fraction {}", row.negative_fraction));
    c.note(format!("n = 64: ⟨φ, T(B)φ⟩ = {t:.5}, negative fraction {:.4}", row.negative_fraction));
    c.outcome()
}

fn lattice_constant() -> Outcome {
    let mut c = Checks::default();
    let m = DiamondRegion::point_pair(1.0, [0.0; 3], 1.0).unwrap();
    let l = DiamondRegion::point_pair(-1.0, [0.0; 3], 1.0).unwrap();
    let meet = m.meet(&l).unwrap().expect("the diamonds touch at the origin");
    let bx = SamplingBox::new(2.0);
    let n = 10_000_000;
    let both = monte_carlo_line_measure(|u| line_hits(&m, u) && line_hits(&l, u), bx, n, 2024).unwrap();
    let point = monte_carlo_line_measure(|u| line_hits(&meet, u), bx, n, 2025).unwrap();
    let target = 4.0 * PI * PI / 45.0;
    let z = both.z_score(target);
    c.check(z.abs() <= 3.0, format!("z = {z:.1} against 4π²/45"));
    c.check(point.hits == 0, format!("{} hits on the meet", point.hits));
    c.note(format!(
        "N = 1e7: estimate {:.5} ± {:.5}; 4π²/45 = {target:.6} (z = {z:.1}); 2π²/9 = {:.6} (z = {:.2}); meet hits {}",
        both.estimate,
        both.stderr,
        2.0 * PI * PI / 9.0,
        both.z_score(2.0 * PI * PI / 9.0),
        point.hits
    ));
    c.outcome()
}

fn exact_identities() -> Outcome {
    let mut c = Checks::default();
    // regions of influence
    c.check(
        influence_ball([1.0, 2.0, 3.0], -2.0) == RegionMask::Ball { center: [1.0, 2.0, 3.0], radius: 2.0 },
        "ball",
    );
    for rho in [1.0f64, -0.7, 2.5] {
        let y = [0.3, -1.0, 1.7];
        let want = RegionMask::Ball { center: [y[0], y[1], rho.cosh() * y[2]], radius: (rho.sinh() * y[2]).abs() };
        c.check(influence_boosted_point(y, rho) == want, format!("boosted point ρ = {rho}"));
        let want = RegionMask::Strip { e: E3, lo: 0.25 * (-rho.abs()).exp(), hi: 1.5 * rho.abs().exp() };
        c.check(influence_strip(0.25, 1.5, E3, rho).unwrap() == want, format!("strip ρ = {rho}"));
    }
    let cyl = influence_cylinder(1.0, 1.0, 2.0, 1.0).unwrap();
    let (ch, th) = (1f64.cosh(), 1f64.tanh());
    let want = [
        [1.0, 0.0, (-1f64).exp() * 1.0],
        [1.0 + th * 1.0, 0.0, 1.0 / ch],
        [1.0 + th * 2.0, 0.0, 2.0 / ch],
        [1.0, 0.0, 1f64.exp() * 2.0],
    ];
    c.check(cyl.points == want, "cylinder profile points");

    // forward half-spaces
    let h = LightconeRegion::h;
    let k = LightconeRegion::k;
    for (g, d) in [(1.0, -0.5), (-2.0, 0.0), (0.5, 3.0)] {
        let got = h(Cmp::Le, g).intersection(&k(Cmp::Ge, d)).causal_complement();
        c.check(got == h(Cmp::Gt, g).intersection(&k(Cmp::Lt, d)), format!("forward half-spaces γ = {g}, δ = {d}"));
        c.check(h(Cmp::Le, g).causal_complement().is_empty(), "h(≤γ)^⊥ = ∅");
        c.check(k(Cmp::Ge, d).causal_complement().is_empty(), "k(≥δ)^⊥ = ∅");
    }
    // two-point completion
    for s in [2.0, 0.5, -1.0] {
        let pts = LightconeRegion::point(0.0, 0.0).union(&LightconeRegion::point(s, 0.0));
        let iv = Interval::closed(s.min(0.0), s.max(0.0));
        c.check(pts.completion(Relation::Causal) == LightconeRegion::rect(iv, iv), format!("two points s = {s}"));
    }
    // orthomodularity failure
    let l = h(Cmp::Lt, 0.0).intersection(&k(Cmp::Gt, 2.0));
    let m = h(Cmp::Lt, 0.0).intersection(&k(Cmp::Gt, 0.0));
    let w = l.join(&m.causal_complement(), Relation::Causal).meet(&m, Relation::Causal);
    c.check(w == m && w != l, "(L ∨ M^⊥) ∧ M = M ≠ L");
    // flat base of a diamond
    for (alpha, delta) in [(-0.5, 1.5), (0.0, 2.0), (1.0, 1.25)] {
        let r = Rect::new(Interval::at_least(alpha, true), Interval::at_most(delta, true));
        let base = FlatBase::of_diamond(&r).unwrap();
        let want = FlatBase { x0: 0.5 * (delta + alpha), x3: Interval::at_most(0.5 * (delta - alpha), true) };
        c.check(base == want, format!("flat base α = {alpha}, δ = {delta}"));
        c.check(base.completion() == LightconeRegion::rect(r.u, r.v), "flat base completion");
    }
    // spacelike half-hyperplane
    let sigma = FlatBase { x0: 0.0, x3: Interval::at_least(0.0, false) };
    let want = h(Cmp::Le, 0.0).intersection(&k(Cmp::Ge, 0.0)).difference(&LightconeRegion::point(0.0, 0.0));
    c.check(sigma.completion() == want, "(σ^>)^∧′ = {u ≤ 0 ≤ v} ∖ {0}");
    c.note("influence regions (a)–(d), forward half-spaces, two-point completion, orthomodularity witness, flat bases, half-hyperplane completion");
    c.outcome()
}

fn acausal_foil() -> Outcome {
    let mut c = Checks::default();
    let psi = make_bump_1d(Grid::new_1d(2048, 0.01), dirac(1.0), 0.0, 1.0, &generic_dirac_spinor(), 4.0).unwrap();
    let outside = |t: f64| RegionMask::strip(E3, -1.0 - t.abs(), 1.0 + t.abs()).complement();
    let nw = localization_probability(&evolve_newton_wigner(&psi, 1.0, Sign::Plus).unwrap(), &outside(1.0)).unwrap();
    c.check(nw >= 100.0 * EPS_LEAK, format!("Newton–Wigner leak {nw:e}"));
    let mut causal = 0.0f64;
    for t in [-2.0, 1.0, 2.0, 3.0] {
        causal = causal.max(localization_probability(&evolve_causal(&psi, t).unwrap(), &outside(t)).unwrap());
    }
    c.check(causal <= EPS_LEAK, format!("causal leak {causal:e}"));
    c.note(format!(
        "t = 1: Newton–Wigner leak {nw:.2e} = {:.1e} × ε_leak; causal leak ≤ {causal:.1e}",
        nw / EPS_LEAK
    ));
    c.outcome()
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("tent law", tent_law),
        ("Lorentz contraction of late-change states", lorentz_contraction),
        ("Weyl radial closed form", weyl_radial_oracle),
        ("asymptotic ball probability", asymptotic_ball),
        ("Dirac vs Weyl long-term contrast", dirac_weyl_contrast),
        ("localization cascade statistics", pol_statistics),
        ("energy growth of the shell state", energy_growth_shell),
        ("point localization", point_localization),
        ("Monte Carlo lattice constant", lattice_constant),
        ("exact geometry and lattice identities", exact_identities),
        ("acausal foil", acausal_foil),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome { pass: false, detail: format!("panicked: {msg}") }
        });
        passed += out.pass as usize;
        println!(
            "criterion {:2} {}: {} ({}) [{:.1} s]",
            i + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
