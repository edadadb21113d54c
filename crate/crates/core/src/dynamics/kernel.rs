//! Exact light-cone kernel for sharply windowed 1D states.
//!
//! In one space dimension the causal propagator `e^{itH}` has the kernel
//!
//! ```text
//! K(t,x) = ½(I+α₃)δ(x+t) + ½(I−α₃)δ(x−t)
//!        + θ(|t|−|x|)·½[ −m|t|·J₁(ms)/s·I + sgn(t)·m·x·J₁(ms)/s·α₃
//!                        + i·sgn(t)·m·J₀(ms)·β ],      s = √(t²−x²),
//! ```
//!
//! obtained from `cos(tE) + i·sin(tE)/E·H` with the Klein–Gordon kernel
//! `½sgn(t)θ(|t|−|x|)J₀(ms)` of `sin(tE)/E`. For Weyl systems `α₃ → χσ₃`
//! and the mass vanishes, leaving pure translations.
//!
//! A [`WindowedState`] is `W(s)·1_{[lo,hi]}·η` with smooth `η`; the kernel
//! integrates the smooth part with composite Gauss–Legendre panels and
//! evaluates `η` off-grid through an oversampled band-limited interpolant.
//! Everything is exact up to quadrature and interpolation error, so sharp
//! windows keep exact light-cone support — something no periodic spectral
//! propagator can offer.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{boost_matrix_e3, boost_spinor_rep, Kind};
#[cfg(test)]
use crate::algebra::Sign;
use crate::error::{Error, Result};
use crate::field::{Grid, Representation, SpinorField};
use crate::numerics::{bessel_j0, bessel_j1_over_z, gauss_legendre};
use crate::C64;

use super::{support_box, time_reverse, translate};

/// Default oversampling factor of the interpolant.
pub const OVERSAMPLE: usize = 8;
/// Number of Lagrange nodes used for off-grid evaluation.
const LAGRANGE_POINTS: usize = 8;
/// Gauss–Legendre order per panel.
const GL_ORDER: usize = 8;
/// Mass fraction of `η` that may be dropped when the window is clipped to
/// the numerical support of `η` (an L² change of at most 1e-10).
pub const WINDOW_TAIL: f64 = 1e-20;

/// Band-limited interpolant of a smooth 1D grid field: zero-padded FFT onto
/// an `R`-times finer grid, then local Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct Interpolator {
    origin: f64,
    dx: f64,
    n: usize,
    d: usize,
    values: Vec<C64>,
}

impl Interpolator {
    pub fn new(eta: &SpinorField, oversample: usize) -> Result<Self> {
        let g = *eta.grid();
        if g.dim() != 1 {
            return Err(Error::DomainViolation("interpolation needs a 1D field".into()));
        }
        assert!(oversample.is_power_of_two(), "oversampling factor must be a power of two");
        let d = eta.components();
        let phi = eta.in_representation(Representation::Momentum);
        let n = g.n();
        let nf = n * oversample;
        let fine = Grid::new_1d(nf, g.dx() / oversample as f64).with_origin(g.origin());
        let mut vals = vec![C64::new(0.0, 0.0); nf * d];
        for k in 0..n {
            let kk = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
            let kf = kk.rem_euclid(nf as i64) as usize;
            vals[kf * d..(kf + 1) * d].copy_from_slice(phi.at(k));
        }
        let fine_field = SpinorField::from_values(fine, eta.kind(), Representation::Momentum, vals)
            .to_position()?;
        Ok(Self {
            origin: fine.origin(),
            dx: fine.dx(),
            n: nf,
            d,
            values: fine_field.into_values(),
        })
    }

    /// `η(y)`; zero beyond the sampled range.
    pub fn eval(&self, y: f64, out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let u = (y - self.origin) / self.dx;
        let half = (LAGRANGE_POINTS / 2) as i64;
        let i0 = u.floor() as i64 - half + 1;
        if i0 < 0 || i0 + LAGRANGE_POINTS as i64 > self.n as i64 {
            return;
        }
        let r = u - i0 as f64;
        let mut w = [0.0; LAGRANGE_POINTS];
        for (j, wj) in w.iter_mut().enumerate() {
            let mut acc = 1.0;
            for k in 0..LAGRANGE_POINTS {
                if k != j {
                    acc *= (r - k as f64) / (j as f64 - k as f64);
                }
            }
            *wj = acc;
        }
        for (j, wj) in w.iter().enumerate() {
            let base = (i0 as usize + j) * self.d;
            for c in 0..self.d {
                out[c] += self.values[base + c] * *wj;
            }
        }
    }
}

/// `W(time)·1_{[lo,hi]}·η` for a smooth 1D field `η`.
#[derive(Debug, Clone)]
pub struct WindowedState {
    eta: SpinorField,
    interp: Arc<Interpolator>,
    lo: f64,
    hi: f64,
    time: f64,
    rule: Arc<(Vec<f64>, Vec<f64>)>,
}

impl WindowedState {
    /// Window `[lo, hi]` (either end may be infinite) applied to `η`, then
    /// evolved for `time`. The window is intersected with the numerical
    /// support of `η` (mass tail [`WINDOW_TAIL`]).
    pub fn new(eta: SpinorField, lo: f64, hi: f64, time: f64) -> Result<Self> {
        let eta = eta.in_representation(Representation::Position);
        if eta.grid().dim() != 1 {
            return Err(Error::DomainViolation("windowed states are 1D".into()));
        }
        let (a, b) = support_box(&eta, WINDOW_TAIL)?[0];
        let (lo, hi) = (lo.max(a), hi.min(b));
        if !(hi > lo) {
            return Err(Error::DegenerateState(format!("empty window [{lo}, {hi}]")));
        }
        let interp = Arc::new(Interpolator::new(&eta, OVERSAMPLE)?);
        Ok(Self { eta, interp, lo, hi, time, rule: Arc::new(gauss_legendre(GL_ORDER)) })
    }

    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    pub fn kind(&self) -> Kind {
        self.eta.kind()
    }

    pub fn eta(&self) -> &SpinorField {
        &self.eta
    }

    /// Effective window `[lo, hi]`.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Signs of `α₃` (Dirac) or `χσ₃` (Weyl) per component: `+1` moves left.
    fn movers(&self) -> Vec<f64> {
        match self.kind() {
            Kind::Dirac { .. } => vec![1.0, -1.0, -1.0, 1.0],
            Kind::Weyl { chirality } => vec![chirality.value(), -chirality.value()],
        }
    }

    fn in_window(&self, z: f64) -> bool {
        self.lo <= z && z <= self.hi
    }

    /// Value of `W(T)·1_{[lo,hi]}·η` at `y`, with `T` the absolute time.
    pub fn eval(&self, t_abs: f64, y: f64, out: &mut [C64]) {
        let d = out.len();
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mut tmp = vec![C64::new(0.0, 0.0); d];
        let a3 = self.movers();
        if t_abs == 0.0 {
            if self.in_window(y) {
                self.interp.eval(y, out);
            }
            return;
        }
        // light-front (delta) terms
        if self.in_window(y + t_abs) {
            self.interp.eval(y + t_abs, &mut tmp);
            for c in 0..d {
                if a3[c] > 0.0 {
                    out[c] += tmp[c];
                }
            }
        }
        if self.in_window(y - t_abs) {
            self.interp.eval(y - t_abs, &mut tmp);
            for c in 0..d {
                if a3[c] < 0.0 {
                    out[c] += tmp[c];
                }
            }
        }
        let m = match self.kind() {
            Kind::Dirac { mass } => mass,
            Kind::Weyl { .. } => 0.0,
        };
        if m == 0.0 {
            return;
        }
        // interior (massive) part
        let ta = t_abs.abs();
        let sg = t_abs.signum();
        let za = (y - ta).max(self.lo);
        let zb = (y + ta).min(self.hi);
        if !(zb > za) {
            return;
        }
        let panels = ((zb - za) / self.grid().dx()).ceil().max(1.0) as usize;
        let h = (zb - za) / panels as f64;
        let mut acc = [C64::new(0.0, 0.0); 4];
        for k in 0..panels {
            let mid = za + (k as f64 + 0.5) * h;
            for (xi, wi) in self.rule.0.iter().zip(&self.rule.1) {
                let z = mid + 0.5 * h * xi;
                let x = y - z;
                let s = (ta * ta - x * x).max(0.0).sqrt();
                let j1s = m * bessel_j1_over_z(m * s);
                let j0 = bessel_j0(m * s);
                self.interp.eval(z, &mut tmp);
                let wt = 0.5 * h * wi * 0.5;
                let c_id = -m * ta * j1s;
                let c_a3 = sg * m * x * j1s;
                let c_b = C64::new(0.0, sg * m * j0);
                let beta_v = [tmp[2], tmp[3], tmp[0], tmp[1]];
                for c in 0..4 {
                    acc[c] += (tmp[c] * (c_id + c_a3 * a3[c]) + c_b * beta_v[c]) * wt;
                }
            }
        }
        for c in 0..4 {
            out[c] += acc[c];
        }
    }

    /// Position samples of `ψ_t` (relative time `t`) on the grid of `η`.
    pub fn sample(&self, t: f64) -> Result<SpinorField> {
        let tt = self.time + t;
        let g = *self.grid();
        let (glo, ghi) = g.bounds();
        let (a, b) = (self.lo - tt.abs(), self.hi + tt.abs());
        if a < glo || b > ghi {
            return Err(Error::GuardViolation(format!(
                "light-cone support [{a}, {b}] leaves the grid [{glo}, {ghi}]"
            )));
        }
        let d = self.eta.components();
        let mut out = SpinorField::zeros(g, self.kind(), Representation::Position);
        out.values_mut().par_chunks_mut(d).enumerate().for_each(|(j, o)| {
            let y = g.x(j);
            if y >= a && y <= b {
                self.eval(tt, y, o);
            }
        });
        Ok(out)
    }

    /// Position samples of `W(A_ρ)ψ` along `e₃`:
    /// `s(A_ρ)·ψ_{sinh(ρ)x}(cosh(ρ)x)`.
    pub fn boost_e3(&self, rho: f64) -> Result<SpinorField> {
        let g = *self.grid();
        self.boost_e3_on(rho, &g)
    }

    /// [`WindowedState::boost_e3`] sampled on an arbitrary 1D output grid.
    pub fn boost_e3_on(&self, rho: f64, out_grid: &Grid) -> Result<SpinorField> {
        let g = *out_grid;
        if g.dim() != 1 {
            return Err(Error::DomainViolation("boosts act on 1D grids only".into()));
        }
        let d = self.eta.components();
        let srep = boost_spinor_rep(&boost_matrix_e3(rho), self.kind())?;
        let (sh, ch) = (rho.sinh(), rho.cosh());
        let inside = |x: f64| {
            let tt = self.time + sh * x;
            let y = ch * x;
            y >= self.lo - tt.abs() && y <= self.hi + tt.abs()
        };
        let (glo, ghi) = g.bounds();
        if inside(glo) || inside(ghi) {
            return Err(Error::GuardViolation(format!(
                "boosted support reaches the grid boundary at rapidity {rho}"
            )));
        }
        let mut out = SpinorField::zeros(g, self.kind(), Representation::Position);
        out.values_mut().par_chunks_mut(d).enumerate().for_each(|(j, o)| {
            let x = g.x(j);
            if inside(x) {
                let mut v = vec![C64::new(0.0, 0.0); d];
                self.eval(self.time + sh * x, ch * x, &mut v);
                srep.apply_slice(&v, o);
            }
        });
        Ok(out)
    }

    /// `‖1_{[lo,hi]}η‖²` by Gauss–Legendre quadrature of the interpolant.
    pub fn norm_sqr(&self) -> f64 {
        let dx = self.grid().dx() / OVERSAMPLE as f64;
        let panels = ((self.hi - self.lo) / dx).ceil().max(1.0) as usize;
        let h = (self.hi - self.lo) / panels as f64;
        let d = self.eta.components();
        let mut tmp = vec![C64::new(0.0, 0.0); d];
        let mut acc = 0.0;
        for k in 0..panels {
            let mid = self.lo + (k as f64 + 0.5) * h;
            for (xi, wi) in self.rule.0.iter().zip(&self.rule.1) {
                self.interp.eval(mid + 0.5 * h * xi, &mut tmp);
                acc += 0.5 * h * wi * tmp.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        acc
    }

    /// Same window and time with `η` multiplied by `s`.
    pub fn scaled(&self, s: C64) -> Result<Self> {
        Self::new(self.eta.scale(s), self.lo, self.hi, self.time)
    }

    /// Normalised copy.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) {
            return Err(Error::DegenerateState("windowed state has zero norm".into()));
        }
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    /// `W(s)` applied lazily.
    pub fn time_shifted(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.time += s;
        out
    }

    /// `𝒯W(s)1η = W(−s)1(𝒯η)`.
    pub fn time_reversed(&self) -> Result<Self> {
        Self::new(time_reverse(&self.eta), self.lo, self.hi, -self.time)
    }

    /// `W(b)W(s)1_{[lo,hi]}η = W(s)1_{[lo+b,hi+b]}W(b)η`.
    pub fn translated(&self, b: f64) -> Result<Self> {
        Self::new(translate(&self.eta, [0.0, 0.0, b]), self.lo + b, self.hi + b, self.time)
    }
}
