//! Free time evolution, boosts along `e₃`, time reversal and translations.
//!
//! Smooth states are propagated exactly in momentum space with the
//! multiplier `e^{ith(p)} = cos(tε)I + i·t·sinc(tε)·h(p)` (Dirac) or its
//! massless Weyl analogue. The periodic grid makes this exact only while the
//! light-cone-fattened support fits in the box; every call checks that
//! anti-wraparound guard and fails with [`Error::GuardViolation`] otherwise.
//!
//! Sharply truncated states are not band-limited, so the spectral route
//! smears their edges. The [`kernel`] submodule evolves such *windowed*
//! states with the exact 1D light-cone kernel instead; [`State`] hides the
//! difference from the frontier experiments.

pub mod kernel;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::algebra::{
    boost_matrix_e3, boost_spinor_rep, dirac_hamiltonian, energy, norm3, time_reversal_matrix,
    weyl_hamiltonian, Kind, Sign, SpinorMatrix,
};
use crate::error::{Error, Result};
use crate::field::{Grid, Representation, SpinorField};
use crate::numerics::sinc;
use crate::C64;

pub use kernel::{Interpolator, WindowedState};

/// Documented spectral-leak budget (fraction of total probability) for
/// well-resolved C^∞ bumps.
pub const EPS_LEAK: f64 = 1e-8;

/// Mass fraction ignored on each side when measuring the support used by
/// the anti-wraparound guard.
pub const GUARD_TAIL: f64 = 1e-10;

/// Cells of slack added around a support before boost evaluation.
pub const BOOST_MARGIN_CELLS: f64 = 16.0;

/// Which one-parameter group generates the evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    /// `e^{itH}` — the causal Dirac/Weyl dynamics.
    Causal,
    /// `e^{itηε(p)}` — the Newton–Wigner (scalar energy) dynamics of sign η.
    NewtonWigner(Sign),
}

/// A time-evolution operator as a pointwise unitary momentum multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub evolution: Evolution,
    pub system: Kind,
    pub t: f64,
}

impl Propagator {
    pub fn causal(system: Kind, t: f64) -> Self {
        Self { evolution: Evolution::Causal, system, t }
    }

    pub fn newton_wigner(system: Kind, eta: Sign, t: f64) -> Self {
        Self { evolution: Evolution::NewtonWigner(eta), system, t }
    }

    /// The multiplier at momentum `p`.
    pub fn multiplier(&self, p: [f64; 3]) -> SpinorMatrix {
        causal_or_nw_multiplier(self.evolution, self.system, self.t, p)
    }

    /// Apply to a momentum-space field without any guard.
    pub fn apply_momentum(&self, phi: &SpinorField) -> Result<SpinorField> {
        phi.require(Representation::Momentum)?;
        let me = *self;
        Ok(phi.map_sites(move |p, s| {
            let m = me.multiplier(p);
            let v = s.to_vec();
            m.apply_slice(&v, s);
        }))
    }
}

fn causal_or_nw_multiplier(ev: Evolution, system: Kind, t: f64, p: [f64; 3]) -> SpinorMatrix {
    match ev {
        Evolution::Causal => causal_multiplier(system, t, p),
        Evolution::NewtonWigner(eta) => {
            let eps = match system {
                Kind::Dirac { mass } => energy(p, mass),
                Kind::Weyl { .. } => norm3(p),
            };
            let ph = C64::from_polar(1.0, t * eta.value() * eps);
            match system {
                Kind::Dirac { .. } => {
                    SpinorMatrix::Four(crate::algebra::Mat4::identity().scale(ph))
                }
                Kind::Weyl { .. } => {
                    SpinorMatrix::Two(crate::algebra::Mat2::identity().scale(ph))
                }
            }
        }
    }
}

/// `cos(tε)I + i·t·sinc(tε)·h(p)`.
pub fn causal_multiplier(system: Kind, t: f64, p: [f64; 3]) -> SpinorMatrix {
    match system {
        Kind::Dirac { mass } => {
            let eps = energy(p, mass);
            let h = dirac_hamiltonian(p, mass);
            let c = (t * eps).cos();
            let s = C64::new(0.0, t * sinc(t * eps));
            SpinorMatrix::Four(crate::algebra::Mat4::identity().scale_re(c) + h.scale(s))
        }
        Kind::Weyl { chirality } => {
            let eps = norm3(p);
            let h = weyl_hamiltonian(p, chirality);
            let c = (t * eps).cos();
            let s = C64::new(0.0, t * sinc(t * eps));
            SpinorMatrix::Two(crate::algebra::Mat2::identity().scale_re(c) + h.scale(s))
        }
    }
}

/// Per-axis interval `[lo, hi]` (cell boundaries) outside of which at most
/// `tail·‖ψ‖²` of the mass lies on each side. 1D grids report one interval
/// (the `e₃` axis); 3D grids report three.
pub fn support_box(psi: &SpinorField, tail: f64) -> Result<Vec<(f64, f64)>> {
    psi.require(Representation::Position)?;
    let g = *psi.grid();
    let n = g.n();
    let dens = psi.density();
    let total: f64 = dens.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateState("zero field has no support".into()));
    }
    let axes: Vec<usize> = if g.dim() == 1 { vec![2] } else { vec![0, 1, 2] };
    let mut out = Vec::with_capacity(axes.len());
    for axis in axes {
        let mut marg = vec![0.0; n];
        for (s, v) in dens.iter().enumerate() {
            marg[g.unravel(s)[axis]] += v;
        }
        let budget = tail * total;
        let mut acc = 0.0;
        let mut lo = 0;
        while lo < n - 1 && acc + marg[lo] <= budget {
            acc += marg[lo];
            lo += 1;
        }
        let mut acc = 0.0;
        let mut hi = n - 1;
        while hi > lo && acc + marg[hi] <= budget {
            acc += marg[hi];
            hi -= 1;
        }
        out.push((g.x(lo) - 0.5 * g.dx(), g.x(hi) + 0.5 * g.dx()));
    }
    Ok(out)
}

/// Anti-wraparound guard: the support fattened by `|t|` must fit in the grid.
pub fn check_guard(psi: &SpinorField, t: f64) -> Result<()> {
    let pos = psi.in_representation(Representation::Position);
    let (glo, ghi) = pos.grid().bounds();
    for (lo, hi) in support_box(&pos, GUARD_TAIL)? {
        if lo - t.abs() < glo || hi + t.abs() > ghi {
            return Err(Error::GuardViolation(format!(
                "support [{lo}, {hi}] fattened by |t| = {} leaves the grid [{glo}, {ghi}]",
                t.abs()
            )));
        }
    }
    Ok(())
}

fn evolve_with(psi: &SpinorField, prop: Propagator) -> Result<SpinorField> {
    if prop.t == 0.0 {
        return Ok(psi.clone());
    }
    check_guard(psi, prop.t)?;
    let repr = psi.representation();
    let phi = psi.in_representation(Representation::Momentum);
    let out = prop.apply_momentum(&phi)?;
    Ok(out.in_representation(repr))
}

/// Causal evolution `ψ_t = e^{itH}ψ`; the result is returned in the input
/// representation.
pub fn evolve_causal(psi: &SpinorField, t: f64) -> Result<SpinorField> {
    evolve_with(psi, Propagator::causal(psi.kind(), t))
}

/// Newton–Wigner evolution `e^{itηε(p)}` — unitary but not causal.
pub fn evolve_newton_wigner(psi: &SpinorField, t: f64, eta: Sign) -> Result<SpinorField> {
    evolve_with(psi, Propagator::newton_wigner(psi.kind(), eta, t))
}

/// `Hψ` computed spectrally (returned in the input representation).
pub fn apply_hamiltonian(psi: &SpinorField) -> SpinorField {
    let repr = psi.representation();
    let kind = psi.kind();
    let phi = psi.in_representation(Representation::Momentum);
    let out = phi.map_sites(move |p, s| {
        let v = s.to_vec();
        match kind {
            Kind::Dirac { mass } => dirac_hamiltonian(p, mass).apply_slice(&v, s),
            Kind::Weyl { chirality } => weyl_hamiltonian(p, chirality).apply_slice(&v, s),
        }
    });
    out.in_representation(repr)
}

/// Translation `(W(b)ψ)(x) = ψ(x − b)`; 1D grids use `b[2]`.
pub fn translate(psi: &SpinorField, b: [f64; 3]) -> SpinorField {
    let repr = psi.representation();
    let phi = psi.in_representation(Representation::Momentum);
    let out = phi.map_sites(move |p, s| {
        let ph = C64::from_polar(1.0, -(p[0] * b[0] + p[1] * b[1] + p[2] * b[2]));
        s.iter_mut().for_each(|z| *z *= ph);
    });
    out.in_representation(repr)
}

/// Time reversal `𝒯ψ = ωψ̄` (antiunitary, `𝒯² = −I`).
pub fn time_reverse(psi: &SpinorField) -> SpinorField {
    let repr = psi.representation();
    let pos = psi.in_representation(Representation::Position);
    let w = time_reversal_matrix(psi.kind());
    let out = pos.map_sites(move |_, s| {
        let v: Vec<C64> = s.iter().map(|z| z.conj()).collect();
        w.apply_slice(&v, s);
    });
    out.in_representation(repr)
}

/// Boost `W(A_ρ)` along `e₃` of a smooth 1D state.
///
/// `(Wψ)(x) = s(A_ρ)·ψ_{sinh(ρ)x}(cosh(ρ)x)`: the momentum-space Fourier sum
/// is evaluated directly at the non-uniform space-time points, O(N²).
/// Points outside the causal shadow of the (margin-fattened) support carry
/// no amplitude and are set to zero; points inside are evaluated only where
/// the periodic images of the fattened support do not overlap, otherwise
/// the call fails with [`Error::GuardViolation`].
pub fn boost_e3(psi: &SpinorField, rho: f64) -> Result<SpinorField> {
    if rho == 0.0 {
        return Ok(psi.clone());
    }
    let repr = psi.representation();
    Ok(boost_e3_on(psi, rho, psi.grid())?.in_representation(repr))
}

/// [`boost_e3`] sampled on an arbitrary 1D output grid (position
/// representation), e.g. a finer grid around a contracted image.
pub fn boost_e3_on(psi: &SpinorField, rho: f64, out_grid: &Grid) -> Result<SpinorField> {
    let g = *psi.grid();
    if g.dim() != 1 || out_grid.dim() != 1 {
        return Err(Error::DomainViolation("boost_e3 acts on 1D grids only".into()));
    }
    let og = *out_grid;
    let pos = psi.in_representation(Representation::Position);
    let (a, b) = support_box(&pos, GUARD_TAIL)?[0];
    let margin = BOOST_MARGIN_CELLS * g.dx();
    let (a, b) = (a - margin, b + margin);
    let (glo, ghi) = og.bounds();
    let (e_lo, e_hi) = ((-rho.abs()).exp(), rho.abs().exp());
    let img_lo = (a * e_lo).min(a * e_hi);
    let img_hi = (b * e_hi).max(b * e_lo);
    if img_lo < glo || img_hi > ghi {
        return Err(Error::GuardViolation(format!(
            "boosted support [{img_lo}, {img_hi}] leaves the grid [{glo}, {ghi}]"
        )));
    }
    let phi = pos.to_momentum()?;
    let kind = psi.kind();
    let d = kind.components();
    let srep = boost_spinor_rep(&boost_matrix_e3(rho), kind)?;
    let l = g.extent();
    let (sh, ch) = (rho.sinh(), rho.cosh());
    let n = g.n();
    // per-mode data: p, ε, φ_k and h(p)φ_k
    let modes: Vec<(f64, f64, Vec<C64>, Vec<C64>)> = (0..n)
        .map(|k| {
            let p = g.p(k);
            let pv = [0.0, 0.0, p];
            let f = phi.at(k).to_vec();
            let mut hf = vec![C64::new(0.0, 0.0); d];
            let eps = match kind {
                Kind::Dirac { mass } => {
                    dirac_hamiltonian(pv, mass).apply_slice(&f, &mut hf);
                    energy(pv, mass)
                }
                Kind::Weyl { chirality } => {
                    weyl_hamiltonian(pv, chirality).apply_slice(&f, &mut hf);
                    p.abs()
                }
            };
            (p, eps, f, hf)
        })
        .collect();
    let pref = g.dp() / (2.0 * PI).sqrt();
    let mut out = SpinorField::zeros(og, kind, Representation::Position);
    let failures: Vec<String> = out
        .values_mut()
        .par_chunks_mut(d)
        .enumerate()
        .filter_map(|(j, o)| {
            let x = og.x(j);
            let s = sh * x;
            let y = ch * x;
            let (flo, fhi) = (a - s.abs(), b + s.abs());
            if y < flo || y > fhi {
                return None;
            }
            if y - l >= flo || y + l <= fhi {
                return Some(format!(
                    "periodic images overlap at x = {x} (time {s}, box {l})"
                ));
            }
            let mut acc = vec![C64::new(0.0, 0.0); d];
            for (p, eps, f, hf) in &modes {
                let e = C64::from_polar(1.0, p * y);
                let c = (s * eps).cos();
                let si = s * sinc(s * eps);
                for i in 0..d {
                    acc[i] += e * (f[i] * c + C64::new(0.0, si) * hf[i]);
                }
            }
            acc.iter_mut().for_each(|z| *z *= pref);
            srep.apply_slice(&acc, o);
            None
        })
        .collect();
    if let Some(msg) = failures.into_iter().next() {
        return Err(Error::GuardViolation(msg));
    }
    Ok(out)
}

/// The set of `x` whose boosted space-time point `(T + sinh(ρ)x, cosh(ρ)x)`
/// lies in the causal shadow of `[lo, hi]` at time `T`; it is an interval
/// whose ends solve `cosh(ρ)x = hi ± (T + sinh(ρ)x)` or
/// `cosh(ρ)x = lo ∓ (T + sinh(ρ)x)`.
pub fn boost_shadow(lo: f64, hi: f64, time: f64, rho: f64) -> (f64, f64) {
    let (sh, ch) = (rho.sinh(), rho.cosh());
    let inside = |x: f64| {
        let tt = time + sh * x;
        let y = ch * x;
        let slack = 1e-12 * (1.0 + x.abs());
        y >= lo - tt.abs() - slack && y <= hi + tt.abs() + slack
    };
    let mut ends = (f64::INFINITY, f64::NEG_INFINITY);
    for sg in [1.0, -1.0] {
        for x in [(hi + sg * time) / (ch - sg * sh), (lo - sg * time) / (ch + sg * sh)] {
            if x.is_finite() && inside(x) {
                ends = (ends.0.min(x), ends.1.max(x));
            }
        }
    }
    ends
}

/// A state that can be evolved and boosted: either a smooth grid field
/// (spectral route) or a sharply windowed one (light-cone kernel route).
#[derive(Debug, Clone)]
pub enum State {
    Smooth(SpinorField),
    Windowed(WindowedState),
}

impl State {
    pub fn grid(&self) -> Grid {
        match self {
            State::Smooth(f) => *f.grid(),
            State::Windowed(w) => *w.grid(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            State::Smooth(f) => f.kind(),
            State::Windowed(w) => w.kind(),
        }
    }

    /// Position samples of the state itself.
    pub fn sample(&self) -> Result<SpinorField> {
        self.evolved(0.0)
    }

    /// Position samples of `ψ_t`.
    pub fn evolved(&self, t: f64) -> Result<SpinorField> {
        match self {
            State::Smooth(f) => {
                Ok(evolve_causal(f, t)?.in_representation(Representation::Position))
            }
            State::Windowed(w) => w.sample(t),
        }
    }

    /// Position samples of `W(A_ρ)ψ`.
    pub fn boosted(&self, rho: f64) -> Result<SpinorField> {
        self.boosted_on(rho, &self.grid())
    }

    /// Position samples of `W(A_ρ)ψ` on another 1D grid.
    pub fn boosted_on(&self, rho: f64, out_grid: &Grid) -> Result<SpinorField> {
        match self {
            State::Smooth(f) => boost_e3_on(f, rho, out_grid),
            State::Windowed(w) => w.boost_e3_on(rho, out_grid),
        }
    }

    /// The state `ψ_s` as a new [`State`].
    pub fn time_shifted(&self, s: f64) -> Result<State> {
        Ok(match self {
            State::Smooth(f) => State::Smooth(evolve_causal(f, s)?),
            State::Windowed(w) => State::Windowed(w.time_shifted(s)),
        })
    }

    pub fn time_reversed(&self) -> Result<State> {
        Ok(match self {
            State::Smooth(f) => State::Smooth(time_reverse(f)),
            State::Windowed(w) => State::Windowed(w.time_reversed()?),
        })
    }

    /// `W(b e₃)ψ`.
    pub fn translated(&self, b: f64) -> Result<State> {
        Ok(match self {
            State::Smooth(f) => State::Smooth(translate(f, [0.0, 0.0, b])),
            State::Windowed(w) => State::Windowed(w.translated(b)?),
        })
    }

    /// Interval of output positions at which `W(A_ρ)ψ` can be nonzero.
    pub fn boost_shadow(&self, rho: f64) -> Result<(f64, f64)> {
        Ok(match self {
            State::Smooth(f) => {
                let pos = f.in_representation(Representation::Position);
                let (a, b) = support_box(&pos, GUARD_TAIL)?[0];
                let margin = BOOST_MARGIN_CELLS * f.grid().dx();
                boost_shadow(a - margin, b + margin, 0.0, rho)
            }
            State::Windowed(w) => {
                let (lo, hi) = w.window();
                boost_shadow(lo, hi, w.time(), rho)
            }
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            State::Smooth(f) => f.norm_sqr(),
            State::Windowed(w) => w.norm_sqr(),
        }
    }
}

impl From<SpinorField> for State {
    fn from(f: SpinorField) -> Self {
        State::Smooth(f)
    }
}
