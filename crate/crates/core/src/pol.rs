//! Causal positive-operator localization.
//!
//! For a Dirac system the localization operators are `T(Δ) = P⁺E(Δ)P⁺`,
//! where `P⁺` multiplies by the positive-energy projector `π⁺(p)` in
//! momentum representation and `E(Δ)` is the position-space mask. Weyl
//! systems use `T^{χη}(Δ) = P^{χη}E(Δ)P^{χη}` with their own energy
//! projectors. Everything here works in momentum representation; masks are
//! applied through an FFT round trip.
//!
//! Besides `T(Δ)` itself the module builds point-localized sequences
//! `φ_n ∝ P⁺D_n⁻¹φ` (with `(D_λφ)(p) = λ^{3/2}φ(λp)`), the energy growth of
//! such sequences, and the statistics of repeated (cascaded) measurements.
//!
//! Conventions at `p = 0`: the massless projectors `π^{χη}(p)` and
//! `π₀(p) = ½(I + α·p/|p|)` are undefined there; on the grid they act as
//! zero at that single momentum sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{
    alpha, dirac_hamiltonian, energy_projector, norm3, weyl_hamiltonian, Kind, Sign, SpinorMatrix,
};
use crate::error::{Error, Result};
use crate::field::{apply_mask, relabel_dilate, Grid, RegionMask, Representation, SpinorField};
use crate::C64;

/// Relative residual `‖(I−P)φ‖/‖φ‖` below which a state counts as lying in
/// the range of an energy projector.
pub const RANGE_TOL: f64 = 1e-10;

/// Smallest admissible `‖Qφ‖/‖φ‖` for a point-localized sequence.
pub const MIN_Q_NORM: f64 = 1e-6;

/// Deepest supported measurement cascade.
pub const MAX_CASCADE_DEPTH: usize = 12;

/// Relative mass at `p = 0` or on the Nyquist planes above which a state
/// counts as touching them.
pub const DOMAIN_TAIL: f64 = 1e-24;

/// Energy projector of sign η at `p` for the system of `phi`; `None` where
/// it is undefined (massless, `p = 0`).
fn projector_at(kind: Kind, p: [f64; 3], eta: Sign) -> Option<SpinorMatrix> {
    energy_projector(p, eta, kind).ok()
}

/// `P^η φ` (site-wise `π^η(p)φ(p)`); for Weyl systems this is `P^{χη}`.
pub fn energy_project(phi: &SpinorField, eta: Sign) -> Result<SpinorField> {
    require_momentum(phi)?;
    let kind = phi.kind();
    Ok(phi.map_sites(move |p, s| match projector_at(kind, p, eta) {
        Some(m) => {
            let v = s.to_vec();
            m.apply_slice(&v, s);
        }
        None => s.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0)),
    }))
}

/// `P⁺φ`.
pub fn positive_energy_project(phi: &SpinorField) -> Result<SpinorField> {
    energy_project(phi, Sign::Plus)
}

/// `‖(I − P^η)φ‖ / ‖φ‖`.
pub fn range_residual(phi: &SpinorField, eta: Sign) -> Result<f64> {
    let n = phi.norm();
    if !(n > 0.0) {
        return Err(Error::DegenerateState("zero state".into()));
    }
    Ok(phi.sub(&energy_project(phi, eta)?).norm() / n)
}

/// `Qφ` with `π₀(p) = ½(I₄ + α·p/|p|)`, the massless limit of `π⁺` that
/// governs dilated Dirac states.
pub fn massless_limit_project(phi: &SpinorField) -> Result<SpinorField> {
    require_momentum(phi)?;
    require_dirac(phi)?;
    let a = [alpha(1), alpha(2), alpha(3)];
    Ok(phi.map_sites(move |p, s| {
        let r = norm3(p);
        if r == 0.0 {
            s.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            return;
        }
        let v = [s[0], s[1], s[2], s[3]];
        let mut out = v;
        for (k, ak) in a.iter().enumerate() {
            let w = ak.apply(&v);
            for c in 0..4 {
                out[c] += w[c] * (p[k] / r);
            }
        }
        for c in 0..4 {
            s[c] = out[c] * 0.5;
        }
    }))
}

fn require_momentum(phi: &SpinorField) -> Result<()> {
    if phi.representation() != Representation::Momentum {
        return Err(Error::WrongRepresentation { expected: "momentum" });
    }
    Ok(())
}

fn require_dirac(phi: &SpinorField) -> Result<f64> {
    match phi.kind() {
        Kind::Dirac { mass } => Ok(mass),
        Kind::Weyl { .. } => Err(Error::DomainViolation("a Dirac state is required".into())),
    }
}

fn require_in_range(phi: &SpinorField, eta: Sign) -> Result<()> {
    let r = range_residual(phi, eta)?;
    if r > RANGE_TOL {
        return Err(match phi.kind() {
            Kind::Dirac { .. } if eta == Sign::Plus => Error::NotPositiveEnergy(r),
            _ => Error::NotInRange(r),
        });
    }
    Ok(())
}

/// `T(Δ)φ = P^η E(Δ) φ` for `φ` in the range of `P^η` (momentum in, momentum
/// out).
pub fn pol_apply_sector(phi: &SpinorField, mask: &RegionMask, eta: Sign) -> Result<SpinorField> {
    require_momentum(phi)?;
    require_in_range(phi, eta)?;
    localize(phi, mask, eta)
}

/// `T(Δ)φ = P⁺E(Δ)φ` for a positive-energy `φ` (momentum in, momentum out).
pub fn pol_apply(phi: &SpinorField, mask: &RegionMask) -> Result<SpinorField> {
    pol_apply_sector(phi, mask, Sign::Plus)
}

/// `P^η E(Δ) φ` without the range check (used inside cascades, where the
/// iterates stay in range by construction).
fn localize(phi: &SpinorField, mask: &RegionMask, eta: Sign) -> Result<SpinorField> {
    let masked = apply_mask(&phi.to_position()?, mask)?;
    energy_project(&masked.to_momentum()?, eta)
}

/// `⟨φ, T(Δ)φ⟩ = ‖E(Δ)φ‖²` for `φ` in the range of `P^η`.
pub fn pol_expectation(phi: &SpinorField, mask: &RegionMask, eta: Sign) -> Result<f64> {
    require_momentum(phi)?;
    require_in_range(phi, eta)?;
    let pos = phi.to_position()?;
    let masked = apply_mask(&pos, mask)?;
    Ok(masked.norm_sqr() / phi.norm_sqr())
}

/// `D_n⁻¹φ`, `(D_n⁻¹φ)(p) = n^{−3/2}φ(p/n)`, realised exactly by relabelling
/// the grid (all lengths shrink by `n`).
pub fn inverse_dilate(phi: &SpinorField, n: f64) -> Result<SpinorField> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::DomainViolation(format!("dilation index {n} must be positive")));
    }
    Ok(relabel_dilate(phi, 1.0 / n))
}

/// `φ_n = P⁺D_n⁻¹φ / ‖P⁺D_n⁻¹φ‖` for a Dirac state `φ` with `Qφ ≠ 0`.
pub fn point_localized_sequence(phi0: &SpinorField, n: f64) -> Result<SpinorField> {
    require_momentum(phi0)?;
    require_dirac(phi0)?;
    let q = massless_limit_project(phi0)?.norm() / phi0.norm();
    if !(q > MIN_Q_NORM) {
        return Err(Error::NullDilationLimit(q));
    }
    positive_energy_project(&inverse_dilate(phi0, n)?)?.normalized()
}

/// `φ_n = D_n⁻¹φ / ‖φ‖` for a Weyl state in the range of `P^{χη}`; the
/// projector is dilation invariant, so no re-projection is needed.
pub fn weyl_pol_sequence(phi: &SpinorField, eta: Sign, n: f64) -> Result<SpinorField> {
    require_momentum(phi)?;
    if !matches!(phi.kind(), Kind::Weyl { .. }) {
        return Err(Error::DomainViolation("a Weyl state is required".into()));
    }
    require_in_range(phi, eta)?;
    inverse_dilate(phi, n)?.normalized()
}

/// `⟨φ, Hφ⟩` computed site-wise in momentum representation.
pub fn energy_expectation(phi: &SpinorField) -> Result<f64> {
    require_momentum(phi)?;
    let kind = phi.kind();
    let d = phi.components();
    let g = phi.grid();
    let vals = phi.values();
    let s: f64 = (0..g.sites())
        .map(|site| {
            let p = g.momentum(site);
            let v = &vals[site * d..(site + 1) * d];
            let mut hv = vec![C64::new(0.0, 0.0); d];
            match kind {
                Kind::Dirac { mass } => dirac_hamiltonian(p, mass).apply_slice(v, &mut hv),
                Kind::Weyl { chirality } => weyl_hamiltonian(p, chirality).apply_slice(v, &mut hv),
            }
            v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        })
        .sum();
    Ok(s * g.momentum_cell_volume() / phi.norm_sqr())
}

/// Energy growth of a point-localized sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrowth {
    /// `(n, (1/n)⟨φ_n, Hφ_n⟩)`.
    pub rows: Vec<(f64, f64)>,
    /// `⟨Qφ, |P|Qφ⟩ / ‖Qφ‖²`.
    pub target: f64,
}

/// `(1/n)⟨φ_n, Hφ_n⟩` for each `n` and the limit `⟨Qφ,|P|Qφ⟩/‖Qφ‖²`.
///
/// `φ0` must have compact momentum support away from `p = 0` and from the
/// Nyquist planes.
pub fn energy_growth(phi0: &SpinorField, ns: &[f64]) -> Result<EnergyGrowth> {
    require_momentum(phi0)?;
    require_dirac(phi0)?;
    check_band_domain(phi0)?;
    let q = massless_limit_project(phi0)?;
    let qn = q.norm_sqr();
    if !(qn.sqrt() / phi0.norm() > MIN_Q_NORM) {
        return Err(Error::NullDilationLimit(qn.sqrt() / phi0.norm()));
    }
    let abs_p = q.map_sites(|p, s| {
        let r = norm3(p);
        s.iter_mut().for_each(|z| *z *= r);
    });
    let target = q.inner(&abs_p).re / qn;
    let rows = ns
        .iter()
        .map(|&n| Ok((n, energy_expectation(&point_localized_sequence(phi0, n)?)? / n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyGrowth { rows, target })
}

fn check_band_domain(phi: &SpinorField) -> Result<()> {
    let g = phi.grid();
    let d = phi.components();
    let total: f64 = phi.values().iter().map(|z| z.norm_sqr()).sum();
    let edge = g.p(g.n() / 2);
    let mut at_zero = 0.0;
    let mut at_nyquist = 0.0;
    for (site, s) in phi.values().chunks(d).enumerate() {
        let p = g.momentum(site);
        let w: f64 = s.iter().map(|z| z.norm_sqr()).sum();
        if norm3(p) == 0.0 {
            at_zero += w;
        }
        if p.iter().any(|c| *c == edge) {
            at_nyquist += w;
        }
    }
    if at_zero > DOMAIN_TAIL * total {
        return Err(Error::DomainViolation("momentum support touches p = 0".into()));
    }
    if at_nyquist > DOMAIN_TAIL * total {
        return Err(Error::DomainViolation("momentum support touches the Nyquist band".into()));
    }
    Ok(())
}

/// One row of the negative-energy check of ball-truncated states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NepomRow {
    pub n: f64,
    /// `‖E(B)φ_n‖`.
    pub ball_norm: f64,
    /// `‖(I − P⁺)φ̂_n‖` with `φ̂_n = E(B)φ_n/‖E(B)φ_n‖`.
    pub negative_fraction: f64,
}

/// Negative-energy content of the ball truncations of a sequence.
pub fn nepom_check(sequence: &[(f64, SpinorField)], ball: &RegionMask) -> Result<Vec<NepomRow>> {
    sequence
        .iter()
        .map(|(n, phi)| {
            require_momentum(phi)?;
            let trunc = apply_mask(&phi.to_position()?, ball)?;
            let ball_norm = trunc.norm() / phi.norm();
            let hat = trunc.normalized()?.to_momentum()?;
            let neg = hat.sub(&positive_energy_project(&hat)?).norm();
            Ok(NepomRow { n: *n, ball_norm, negative_fraction: neg })
        })
        .collect()
}

/// Statistics of repeated measurements of `T(Δ)` on `φ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeStats {
    /// `γ_k = ⟨φ₁, T(Δ)^k φ₁⟩`, `k = 0..=2N`.
    pub gamma: Vec<f64>,
    /// `ω_n = γ_{2n−1}/γ_{2n−2}`, `n = 1..=N`.
    pub omega: Vec<f64>,
    /// `σ_n = γ_{2n−2}`, `n = 1..=N`.
    pub sigma: Vec<f64>,
    /// `‖T(Δ)φ₁‖²`.
    pub sigma2: f64,
    /// `‖T(Δ′)φ₁‖²` for the complement `Δ′`.
    pub sigma2_prime: f64,
    /// `⟨φ₁, T(Δ)T(Δ′)φ₁⟩`.
    pub sigma2_bar: f64,
    /// `⟨φ₁, T(Δ′)T(Δ)φ₁⟩`.
    pub sigma2_bar_prime: f64,
    /// `ω_N`, the best available estimate of `sup_n ω_n`.
    pub omega_est: f64,
}

/// Run a depth-`N` cascade: `γ_k` from the iterates `ψ_j = T(Δ)^j φ₁`
/// (`γ_{2j} = ‖ψ_j‖²`, `γ_{2j+1} = ⟨ψ_j, ψ_{j+1}⟩`), no renormalization.
pub fn measurement_cascade(phi1: &SpinorField, mask: &RegionMask, depth: usize) -> Result<CascadeStats> {
    if !(2..=MAX_CASCADE_DEPTH).contains(&depth) {
        return Err(Error::DomainViolation(format!(
            "cascade depth {depth} outside 2..={MAX_CASCADE_DEPTH}"
        )));
    }
    require_momentum(phi1)?;
    require_in_range(phi1, Sign::Plus)?;
    let phi = phi1.normalized()?;
    let mut iterates = vec![phi.clone()];
    for _ in 0..depth {
        let next = localize(iterates.last().expect("nonempty"), mask, Sign::Plus)?;
        iterates.push(next);
    }
    let mut gamma = Vec::with_capacity(2 * depth + 1);
    for j in 0..=depth {
        gamma.push(iterates[j].norm_sqr());
        if j < depth {
            gamma.push(iterates[j].inner(&iterates[j + 1]).re);
        }
    }
    if !(gamma[1] > 0.0) {
        return Err(Error::DegenerateState(format!("T(Δ)φ₁ vanishes (γ₁ = {})", gamma[1])));
    }
    let omega: Vec<f64> = (1..=depth).map(|n| gamma[2 * n - 1] / gamma[2 * n - 2]).collect();
    let sigma: Vec<f64> = (1..=depth).map(|n| gamma[2 * n - 2]).collect();
    let t_in = &iterates[1];
    let t_out = localize(&phi, &mask.clone().complement(), Sign::Plus)?;
    Ok(CascadeStats {
        sigma2: t_in.norm_sqr(),
        sigma2_prime: t_out.norm_sqr(),
        sigma2_bar: t_in.inner(&t_out).re,
        sigma2_bar_prime: t_out.inner(t_in).re,
        omega_est: *omega.last().expect("depth ≥ 2"),
        gamma,
        omega,
        sigma,
    })
}

/// Random positive-energy test state: Gaussian momentum envelope of width
/// `sigma_p` about a random centre (within `sigma_p` of the origin) times a
/// random complex spinor, projected by `P⁺` (or `P^{χ+}`) and normalized.
pub fn random_positive_energy_state(grid: Grid, kind: Kind, sigma_p: f64, seed: u64) -> Result<SpinorField> {
    if !(sigma_p > 0.0) {
        return Err(Error::DomainViolation("envelope width must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = kind.components();
    let spinor: Vec<C64> =
        (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let centre: [f64; 3] = std::array::from_fn(|_| sigma_p * (2.0 * rng.gen::<f64>() - 1.0));
    let phi = SpinorField::from_momentum_fn(grid, kind, |p, out| {
        let q = [p[0] - centre[0], p[1] - centre[1], p[2] - centre[2]];
        let env = (-(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / (2.0 * sigma_p * sigma_p)).exp();
        for (o, u) in out.iter_mut().zip(&spinor) {
            *o = u * env;
        }
    });
    positive_energy_project(&phi)?.normalized()
}

/// Shell state `1_{r_in ≤ |p| ≤ r_out}(p)·π₀(p)u`, normalized (so `Qφ = φ`).
pub fn shell_state(grid: Grid, mass: f64, spinor: [C64; 4], r_in: f64, r_out: f64) -> Result<SpinorField> {
    if !(0.0 < r_in && r_in < r_out) {
        return Err(Error::DomainViolation(format!("shell [{r_in}, {r_out}] is empty")));
    }
    let phi = SpinorField::from_momentum_fn(grid, Kind::Dirac { mass }, |p, out| {
        let r = norm3(p);
        let on = (r_in..=r_out).contains(&r);
        for (o, u) in out.iter_mut().zip(&spinor) {
            *o = if on { *u } else { C64::new(0.0, 0.0) };
        }
    });
    massless_limit_project(&phi)?.normalized()
}
