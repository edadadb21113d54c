//! The support edge `e(ψ)`, its time dependence and the tent law.
//!
//! `e(ψ)` is the largest α such that ψ carries (numerically: at most a mass
//! fraction τ) no probability in the half-space `{x·e ≤ α}`; `ē` refers to
//! the opposite direction, so the carrier of ψ along `e` is
//! `[e(ψ), −ē(ψ)]`. For compact states the frontier follows the tent
//! `e(ψ_t) = e(ψ) + |t_e| − |t − t_e|` with a unique change time `t_e`.
//!
//! This module measures frontiers, fits tents, builds states with
//! prescribed change times and late-change states, and runs the
//! Lorentz-contraction experiments. All experiments are 1D along `e₃` unless
//! stated otherwise.

use rayon::prelude::*;

use crate::algebra::{Kind, Sign};
use crate::dynamics::{
    check_guard, evolve_causal, translate, State, WindowedState,
};
use crate::error::{Error, Result};
use crate::field::{
    localization_probability, Grid, RegionMask, Representation, SpinorField, E3, MINUS_E3,
};
use crate::C64;

/// Default mass-fraction tolerance for edges.
pub const DEFAULT_TAU: f64 = 1e-6;

/// Largest admissible edge tolerance.
pub const MAX_TAU: f64 = 1e-2;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `sup{α : P({x·e ≤ α}) ≤ τ·‖ψ‖²}`.
///
/// Membership is decided at cell centres, so the supremum is reported at
/// the cell boundary just below the first cell that pushes the cumulative
/// mass over the tolerance (for axis-aligned `e`; otherwise half a cell
/// below that cell's projected centre).
pub fn support_edge(psi: &SpinorField, e: [f64; 3], tau: f64) -> Result<f64> {
    psi.require(Representation::Position)?;
    if !(tau > 0.0 && tau <= MAX_TAU) {
        return Err(Error::DomainViolation(format!("edge tolerance τ = {tau} outside (0, 1e-2]")));
    }
    let g = psi.grid();
    let dens = psi.density();
    let total: f64 = dens.iter().sum::<f64>() * g.cell_volume();
    if total <= tau {
        return Err(Error::AllMassBelowTolerance(total));
    }
    let mut proj: Vec<(f64, f64)> =
        dens.iter().enumerate().map(|(s, v)| (dot(g.point(s), e), *v)).collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0));
    let budget = tau * total / g.cell_volume();
    let mut acc = 0.0;
    let mut i = 0;
    while i < proj.len() {
        // cells sharing a projected coordinate enter together
        let s = proj[i].0;
        let mut j = i;
        let mut layer = 0.0;
        while j < proj.len() && (proj[j].0 - s).abs() <= 1e-9 * g.dx() {
            layer += proj[j].1;
            j += 1;
        }
        if acc + layer > budget {
            return Ok(s - 0.5 * g.dx());
        }
        acc += layer;
        i = j;
    }
    unreachable!("total mass exceeds the budget")
}

/// `e(ψ_t)` sampled over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierProfile {
    pub direction: [f64; 3],
    pub times: Vec<f64>,
    pub edges: Vec<f64>,
    pub tau: f64,
    /// Spatial resolution of the underlying grid.
    pub dx: f64,
}

impl FrontierProfile {
    /// Largest time step of the profile.
    pub fn dt(&self) -> f64 {
        self.times.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }
}

/// Evolve the state to every time and record its edge in direction `e`.
pub fn frontier_profile(
    state: &State,
    e: [f64; 3],
    times: &[f64],
    tau: f64,
) -> Result<FrontierProfile> {
    if let State::Smooth(f) = state {
        let tmax = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        check_guard(f, tmax)?;
    }
    let edges: Vec<Result<f64>> = times
        .par_iter()
        .map(|&t| support_edge(&state.evolved(t)?, e, tau))
        .collect();
    let edges = edges.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(FrontierProfile {
        direction: e,
        times: times.to_vec(),
        edges,
        tau,
        dx: state.grid().dx(),
    })
}

/// Frontiers in both directions `±e₃` from a single set of evolutions.
pub fn frontier_profiles_pm(
    state: &State,
    times: &[f64],
    tau: f64,
) -> Result<(FrontierProfile, FrontierProfile)> {
    if let State::Smooth(f) = state {
        let tmax = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        check_guard(f, tmax)?;
    }
    let pairs: Vec<Result<(f64, f64)>> = times
        .par_iter()
        .map(|&t| {
            let f = state.evolved(t)?;
            Ok((support_edge(&f, E3, tau)?, support_edge(&f, MINUS_E3, tau)?))
        })
        .collect();
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let dx = state.grid().dx();
    let mk = |dir, edges| FrontierProfile { direction: dir, times: times.to_vec(), edges, tau, dx };
    Ok((
        mk(E3, pairs.iter().map(|p| p.0).collect()),
        mk(MINUS_E3, pairs.iter().map(|p| p.1).collect()),
    ))
}

/// Least-squares tent `t ↦ e0 + |t_e| − |t − t_e|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TentFit {
    pub e0: f64,
    pub t_e: f64,
    /// `max_i |fit(t_i) − edge_i|`.
    pub residual: f64,
}

impl TentFit {
    pub fn value(&self, t: f64) -> f64 {
        self.e0 + self.t_e.abs() - (t - self.t_e).abs()
    }
}

/// Fit the tent with unit slopes: locate the kink coarsely at the maximum
/// edge, fit a line of slope +1 to the rising branch and one of slope −1
/// to the falling branch, intersect, and repeat with the branches split at
/// the refined kink until the split is stable.
pub fn fit_tent(profile: &FrontierProfile) -> Result<TentFit> {
    let n = profile.times.len();
    if n < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| profile.times[a].total_cmp(&profile.times[b]));
    let t: Vec<f64> = idx.iter().map(|&i| profile.times[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| profile.edges[i]).collect();
    let imax = (0..n).max_by(|&a, &b| y[a].total_cmp(&y[b]).then(b.cmp(&a))).unwrap();
    let mut split = t[imax];
    let mut fit = None;
    for _ in 0..20 {
        // rising branch strictly before the kink, falling strictly after;
        // the sample nearest the kink is left out of both
        let (mut cl, mut nl, mut cr, mut nr) = (0.0, 0, 0.0, 0);
        let nearest = (0..n)
            .min_by(|&a, &b| (t[a] - split).abs().total_cmp(&(t[b] - split).abs()))
            .unwrap();
        for i in 0..n {
            if i == nearest {
                continue;
            }
            if t[i] < split {
                cl += y[i] - t[i];
                nl += 1;
            } else {
                cr += y[i] + t[i];
                nr += 1;
            }
        }
        if nl < 2 || nr < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: nl.min(nr) });
        }
        let (cl, cr) = (cl / nl as f64, cr / nr as f64);
        let te = 0.5 * (cr - cl);
        let peak = 0.5 * (cr + cl);
        let candidate = (peak - te.abs(), te);
        let stable = fit == Some(candidate);
        fit = Some(candidate);
        if stable || (te - split).abs() < 1e-15 {
            break;
        }
        split = te;
    }
    let (e0, t_e) = fit.expect("at least one iteration");
    let tf = TentFit { e0, t_e, residual: 0.0 };
    let residual = t.iter().zip(&y).map(|(ti, yi)| (tf.value(*ti) - yi).abs()).fold(0.0, f64::max);
    Ok(TentFit { residual, ..tf })
}

/// Cases of the prescribed-tent construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TentCase {
    /// `|τ| ≤ δ`
    I,
    /// `τ > δ`
    II,
    /// `−τ > δ`
    III,
}

impl TentCase {
    /// The case that the parameters fall into.
    pub fn classify(tau: f64, delta: f64) -> TentCase {
        if tau.abs() <= delta {
            TentCase::I
        } else if tau > delta {
            TentCase::II
        } else {
            TentCase::III
        }
    }
}

/// Result of [`construct_prescribed_tent`].
#[derive(Debug, Clone)]
pub struct PrescribedTent {
    pub state: SpinorField,
    /// Predicted change time for `e = e₃`.
    pub t_e: f64,
    /// Predicted change time for `ē = −e₃`.
    pub t_ebar: f64,
}

/// `ψ = ψ¹ + W(δe₃)ψ¹_τ` (normalised) with the change times predicted from
/// those of `ψ¹`, `(t¹_e, t¹_ē)`.
pub fn construct_prescribed_tent(
    psi1: &SpinorField,
    t1: (f64, f64),
    tau: f64,
    delta: f64,
    case: TentCase,
) -> Result<PrescribedTent> {
    if delta < 0.0 {
        return Err(Error::CaseMismatch(format!("space shift δ = {delta} must be ≥ 0")));
    }
    let actual = TentCase::classify(tau, delta);
    if actual != case {
        return Err(Error::CaseMismatch(format!(
            "τ = {tau}, δ = {delta} belong to case {actual:?}, not {case:?}"
        )));
    }
    let (te1, teb1) = t1;
    let (t_e, t_ebar) = match case {
        TentCase::I => (te1, teb1 - tau),
        TentCase::II => (te1 + 0.5 * (delta - tau), teb1 - 0.5 * (tau + delta)),
        TentCase::III => (te1 - 0.5 * (tau + delta), teb1 + 0.5 * (delta - tau)),
    };
    let psi1 = psi1.in_representation(Representation::Position);
    let second = translate(&evolve_causal(&psi1, tau)?, [0.0, 0.0, delta]);
    let state = psi1.add(&second).normalized()?;
    Ok(PrescribedTent { state, t_e, t_ebar })
}

/// Change times of a state, both directions, from one set of evolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeTimes {
    pub plus: TentFit,
    pub minus: TentFit,
}

/// Fit `t_e` and `t_ē` (directions `±e₃`) over the given times.
///
/// States whose carrier is narrower than four cells are rejected: their
/// edges are not resolved by the grid.
pub fn change_times(state: &State, times: &[f64], tau: f64) -> Result<ChangeTimes> {
    let f = state.sample()?;
    let dx = f.grid().dx();
    let width = -support_edge(&f, MINUS_E3, tau)? - support_edge(&f, E3, tau)?;
    if width < 4.0 * dx {
        return Err(Error::DegenerateState(format!(
            "carrier width {width} is below four cells ({dx})"
        )));
    }
    let (p, m) = frontier_profiles_pm(state, times, tau)?;
    Ok(ChangeTimes { plus: fit_tent(&p)?, minus: fit_tent(&m)? })
}

/// Symmetric uniform time grid `[−T, T]` with `2k+1` samples.
pub fn symmetric_times(t_max: f64, k: usize) -> Vec<f64> {
    (0..=2 * k).map(|i| -t_max + t_max * i as f64 / k as f64).collect()
}

/// A late-change state with its geometric data.
#[derive(Debug, Clone)]
pub struct LateChange {
    pub state: State,
    pub orientation: Sign,
    /// `e(ψ)` along `e₃`.
    pub e: f64,
    /// `−ē(ψ)`, the upper end of the carrier.
    pub upper: f64,
    /// `α = ½(−ē(ψ) − e(ψ))`.
    pub alpha: f64,
    /// Fitted `t_ē` of the seed.
    pub seed_t_ebar: f64,
}

/// Truncate a seed `η` with `t_ē(η) = υ > 0` to the top slice
/// `{−ē(η) − δ ≤ x₃ ≤ −ē(η)}`, translated to `[0, δ]`. For `ς = −` the
/// result is time-reversed.
///
/// `times` is the grid used to fit `t_ē(η)`; the fit must exceed the time
/// step, and `δ` must lie in `(0, υ)`.
pub fn make_late_change_state(
    eta: &SpinorField,
    delta: f64,
    orientation: Sign,
    times: &[f64],
    tau: f64,
) -> Result<LateChange> {
    let seed = State::Smooth(eta.in_representation(Representation::Position));
    let (_, minus) = frontier_profiles_pm(&seed, times, tau)?;
    let fit = fit_tent(&minus)?;
    let dt = minus.dt();
    let upsilon = fit.t_e;
    if upsilon <= dt {
        return Err(Error::NoLateChangeSeed(upsilon));
    }
    if !(delta > 0.0 && delta < upsilon) {
        return Err(Error::DomainViolation(format!(
            "slice width δ = {delta} must lie in (0, t_ē = {upsilon})"
        )));
    }
    let pos = seed.sample()?;
    let top = -support_edge(&pos, MINUS_E3, tau)?;
    // place the carrier at [0, δ] so boosts about the origin contract it
    let w = WindowedState::new(pos, top - delta, top, 0.0)?
        .normalized()?
        .translated(delta - top)?;
    let state = match orientation {
        Sign::Plus => State::Windowed(w),
        Sign::Minus => State::Windowed(w.time_reversed()?),
    };
    let (lo, hi) = match &state {
        State::Windowed(w) => w.window(),
        State::Smooth(_) => unreachable!(),
    };
    Ok(LateChange {
        state,
        orientation,
        e: lo,
        upper: hi,
        alpha: 0.5 * (hi - lo),
        seed_t_ebar: upsilon,
    })
}

/// `ψ^α = W(ςα)·E({x₃ ≤ α})·W(ςα)⁻¹ψ` as a windowed state, where `W(t)`
/// is evolution by `t`. `(ψ^α)_{−ςα}` lies in `{x₃ ≤ α}`, so ψ^α is a
/// late-change state of orientation −ς; as α → ∞, ψ^α → ψ.
pub fn project_late_change(psi: &SpinorField, alpha: f64, orientation: Sign) -> Result<State> {
    let s = orientation.value() * alpha;
    let pos = psi.in_representation(Representation::Position);
    let back = evolve_causal(&pos, -s)?;
    Ok(State::Windowed(WindowedState::new(back, f64::NEG_INFINITY, alpha, s)?))
}

/// `‖ψ − ψ^α‖ = ‖1_{(α,∞)}W(ςα)⁻¹ψ‖` for the projection of
/// [`project_late_change`], computed on the grid.
pub fn projection_defect(psi: &SpinorField, alpha: f64, orientation: Sign) -> Result<f64> {
    let pos = psi.in_representation(Representation::Position);
    let back = evolve_causal(&pos, -orientation.value() * alpha)?;
    let above = RegionMask::half_space_above(E3, pos.grid().snap_to_boundary(alpha));
    Ok(localization_probability(&back, &above)?.sqrt())
}

/// Relative probability of `ψ_{ςα}` in `{x₃ > α}`. It vanishes exactly for
/// late-change states of orientation ς carried by `[0, 2α]`.
pub fn late_change_residual(state: &State, alpha: f64, orientation: Sign) -> Result<f64> {
    let f = state.evolved(orientation.value() * alpha)?;
    let above = RegionMask::half_space_above(E3, f.grid().snap_to_boundary(alpha));
    Ok(localization_probability(&f, &above)? / state.norm_sqr())
}

/// A 1D grid of spacing `dx` whose cell boundaries lie on `ℤ·dx` and which
/// covers the boost shadow of the state, plus a few cells on each side
/// (rounded up to a power of two).
pub fn boost_output_grid(state: &State, rho: f64, dx: f64) -> Result<Grid> {
    if !(dx > 0.0) {
        return Err(Error::DomainViolation(format!("output spacing {dx} must be positive")));
    }
    let (s0, s1) = state.boost_shadow(rho)?;
    if !(s0 <= s1) {
        return Err(Error::DegenerateState("empty boost shadow".into()));
    }
    let lo = (s0 / dx).floor() - 4.0;
    let hi = (s1 / dx).ceil() + 4.0;
    let n = ((hi - lo) as usize).next_power_of_two();
    Ok(Grid::new_1d(n, dx).with_origin((lo + 0.5) * dx))
}

/// Probability that `W(A_ρe₃)ψ` lies in `[lo, hi]` along `e₃`, computed as
/// one minus the mass outside (the boost is unitary), so the grid-sum error
/// is confined to the small outer mass. The boosted field is sampled with
/// spacing `dx` over its whole causal shadow.
pub fn boosted_probability_in(state: &State, rho: f64, lo: f64, hi: f64, dx: f64) -> Result<f64> {
    let og = boost_output_grid(state, rho, dx)?;
    let b = state.boosted_on(rho, &og)?;
    let strip = RegionMask::strip(E3, og.snap_to_boundary(lo), og.snap_to_boundary(hi));
    let outside = localization_probability(&b, &strip.complement())?;
    Ok(1.0 - outside / state.norm_sqr())
}

/// Probability of `W(A_ρe₃)ψ` in the strip `{|x₃| ≤ δ}` for each ρ, with
/// the boosted field sampled at spacing `dx`.
pub fn lorentz_contraction_scan(
    state: &State,
    delta: f64,
    rhos: &[f64],
    dx: f64,
) -> Result<Vec<(f64, f64)>> {
    rhos.iter()
        .map(|&rho| Ok((rho, boosted_probability_in(state, rho, -delta, delta, dx)?)))
        .collect()
}

/// Re-fit the change times of the same spatial state under different
/// masses. The scaling relation between masses is reported, not asserted.
pub fn mass_dependence_scan(
    psi: &SpinorField,
    masses: &[f64],
    times: &[f64],
    tau: f64,
) -> Result<Vec<(f64, ChangeTimes)>> {
    masses
        .iter()
        .map(|&m| {
            let f = psi.clone().with_kind(Kind::Dirac { mass: m });
            Ok((m, change_times(&State::Smooth(f), times, tau)?))
        })
        .collect()
}

/// A generic spinor (all four components present, both mover classes).
pub fn generic_dirac_spinor() -> [C64; 4] {
    [C64::new(1.0, 0.0), C64::new(0.3, -0.2), C64::new(0.0, 0.5), C64::new(-0.4, 0.1)]
}

/// A generic Weyl spinor (both components present).
pub fn generic_weyl_spinor() -> [C64; 2] {
    [C64::new(1.0, 0.0), C64::new(0.4, 0.3)]
}
