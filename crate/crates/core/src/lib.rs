//! Numerical laboratory for the causal localization of free Dirac and Weyl
//! particles.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] — 2×2 / 4×4 complex matrices: Hamiltonians, energy
//!   projectors, cross sections, Wigner rotations, boost spinor
//!   representations and time reversal.
//! * [`field`] — grid-sampled spinor fields with their Fourier duals,
//!   localization probabilities, dilations and state constructors.
//! * [`dynamics`] — exact-in-momentum propagators (causal and Newton–Wigner),
//!   boosts along `e₃`, time reversal, plus an exact light-cone kernel for
//!   sharply truncated states.
//! * [`frontier`] — the support edge `e(ψ)`, tent-law fits, late-change
//!   constructions and Lorentz-contraction scans.
//! * [`weylradial`] — closed-form evolution of radial Weyl states and its
//!   asymptotics.
//! * [`pol`] — the causal positive-operator localization `P⁺E P⁺`,
//!   point-localized sequences and measurement cascades.
//! * [`causalgeo`] — regions of influence, the (u,v) causal lattice and the
//!   timelike-line Monte Carlo measure.
//!
//! Units are natural (`c = ħ = 1`). Transforms follow
//! `φ(p) = (2π)^{-d/2} ∫ e^{-ixp} ψ(x) dx` and time evolution is
//! `ψ_t = e^{itH} ψ`.

pub mod algebra;
pub mod causalgeo;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod frontier;
pub mod numerics;
pub mod pol;
pub mod weylradial;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type C64 = num_complex::Complex<f64>;
