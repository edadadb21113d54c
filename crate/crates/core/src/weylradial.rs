//! Closed-form evolution of radially symmetric Weyl states.
//!
//! For `ψ = g(|x|)` with a 2-spinor profile `g`, the evolved state is
//! `ψ_t = A⁺_t + A⁻_t + R_t` with
//!
//! * `A^ς_t(x) = π^{χς}(n)·((r+ςt)/r)·g(|r+ςt|)`, `n = x/r`,
//! * `R_t(x) = h^χ(n)·(G(|r+t|) − G(|r−t|))/(2r²)`, `G(r) = −∫₀^r ρ g(ρ) dρ`,
//!
//! where `h^χ(n) = χσ·n` and `π^{χς}(n) = ½(I + ς h^χ(n))`. Collecting terms,
//! `ψ_t(x) = u(r) + h^χ(n) v(r)` with `u = ½(a⁺ + a⁻)` and
//! `v = ½(a⁺ − a⁻) + w`, so that the density is `|u|² + |v|² + n·S(r)` with
//! `S = 2χ Re⟨u, σ v⟩`. Ball and slab probabilities, including off-centre
//! ones, therefore reduce to one radial integral with a spherical-cap weight.
//!
//! The independent numeric route is the Fourier-sine representation
//! `j f = 𝒮(j g)` of the momentum profile, from which `u` and `v` follow by
//! three sine/cosine integrals.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{sigma, sigma_dot, Kind, Sign};
use crate::error::{Error, Result};
use crate::field::{Grid, Representation, SpinorField};
use crate::numerics::{gauss_legendre, simpson};
use crate::C64;

/// A 2-spinor.
pub type Spinor2 = [C64; 2];

const GL_POINTS: usize = 8;

fn zero2() -> Spinor2 {
    [C64::new(0.0, 0.0); 2]
}

fn add2(a: Spinor2, b: Spinor2) -> Spinor2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub2(a: Spinor2, b: Spinor2) -> Spinor2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale2(a: Spinor2, s: f64) -> Spinor2 {
    [a[0] * s, a[1] * s]
}

fn norm_sqr2(a: Spinor2) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

fn inner2(a: Spinor2, b: Spinor2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// `Re⟨a, σ_k b⟩` for k = 1, 2, 3.
fn sigma_expectation(a: Spinor2, b: Spinor2) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let sb = sigma(k + 1).apply(&b);
        *o = inner2(a, sb).re;
    }
    out
}

type ProfileFn = dyn Fn(f64) -> Spinor2 + Send + Sync;

/// A normalized radial profile `g` supported in `[0, r_max]`, sampled on
/// `nodes + 1` uniform radial nodes, with `G(r) = −∫₀^r ρ g(ρ) dρ` tabulated
/// on the same nodes.
#[derive(Clone)]
pub struct RadialProfile {
    r_max: f64,
    dr: f64,
    r: Vec<f64>,
    g: Vec<Spinor2>,
    cum: Vec<Spinor2>,
    func: Arc<ProfileFn>,
    scale: f64,
    rule: Arc<(Vec<f64>, Vec<f64>)>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("r_max", &self.r_max)
            .field("nodes", &(self.r.len() - 1))
            .finish()
    }
}

impl RadialProfile {
    /// Sample `g` on `[0, r_max]` with an even number of intervals and
    /// normalize it so that `4π∫r²|g|² dr = 1`. `g` is taken to vanish
    /// beyond `r_max`.
    pub fn new<F>(r_max: f64, nodes: usize, g: F) -> Result<Self>
    where
        F: Fn(f64) -> Spinor2 + Send + Sync + 'static,
    {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::DomainViolation(format!("support radius {r_max} must be positive")));
        }
        if nodes < 2 || nodes % 2 == 1 {
            return Err(Error::DomainViolation(format!(
                "radial node count {nodes} must be even and ≥ 2"
            )));
        }
        let dr = r_max / nodes as f64;
        let r: Vec<f64> = (0..=nodes).map(|j| j as f64 * dr).collect();
        let raw: Vec<Spinor2> = r.iter().map(|&x| g(x)).collect();
        let dens: Vec<f64> = r.iter().zip(&raw).map(|(x, v)| x * x * norm_sqr2(*v)).collect();
        let norm2 = 4.0 * PI * simpson(&dens, dr);
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::DegenerateState(format!("radial profile has norm² {norm2}")));
        }
        let scale = norm2.sqrt().recip();
        let rule = Arc::new(gauss_legendre(GL_POINTS));
        let func: Arc<ProfileFn> = Arc::new(g);
        let mut p = RadialProfile {
            r_max,
            dr,
            g: raw.iter().map(|v| scale2(*v, scale)).collect(),
            r,
            cum: Vec::new(),
            func,
            scale,
            rule,
        };
        let mut cum = vec![zero2(); nodes + 1];
        for k in 1..=nodes {
            let piece = p.moment_integral(p.r[k - 1], p.r[k]);
            cum[k] = sub2(cum[k - 1], piece);
        }
        p.cum = cum;
        Ok(p)
    }

    /// Smooth compactly supported profile `bump(r)·s` of radius `radius`.
    pub fn bump(radius: f64, spinor: Spinor2, nodes: usize) -> Result<Self> {
        Self::new(radius, nodes, move |r| {
            let b = crate::field::bump_profile(r, radius);
            [spinor[0] * b, spinor[1] * b]
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn samples(&self) -> &[Spinor2] {
        &self.g
    }

    /// `G` at the nodes.
    pub fn cumulative(&self) -> &[Spinor2] {
        &self.cum
    }

    /// Quadrature scheme used for the profile integrals.
    pub fn scheme(&self) -> &'static str {
        "gauss-legendre-8/panel=dr"
    }

    /// Normalized `g(r)` for `r ≥ 0`.
    pub fn g(&self, r: f64) -> Spinor2 {
        if r > self.r_max {
            return zero2();
        }
        scale2((self.func)(r), self.scale)
    }

    /// `∫_a^b ρ g(ρ) dρ` by Gauss–Legendre on a single panel.
    fn moment_integral(&self, a: f64, b: f64) -> Spinor2 {
        let (xs, ws) = &*self.rule;
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = zero2();
        for (x, w) in xs.iter().zip(ws) {
            let rho = mid + half * x;
            acc = add2(acc, scale2(self.g(rho), rho * w * half));
        }
        acc
    }

    /// `G(r) = −∫₀^r ρ g(ρ) dρ`.
    pub fn big_g(&self, r: f64) -> Spinor2 {
        let n = self.r.len() - 1;
        if r >= self.r_max {
            return self.cum[n];
        }
        let k = ((r / self.dr).floor() as usize).min(n - 1);
        sub2(self.cum[k], self.moment_integral(self.r[k], r))
    }

    /// `4π∫_a^b r²|g|² dr`.
    pub fn shell_mass(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.min(self.r_max));
        radial_integral(|r| r * r * norm_sqr2(self.g(r)), a, b, self.dr, &self.rule) * 4.0 * PI
    }

    /// `‖E(B_T)ψ‖²` for the untranslated state.
    pub fn ball_mass(&self, t_radius: f64) -> f64 {
        self.shell_mass(0.0, t_radius)
    }
}

/// Composite Gauss–Legendre over `[a, b]` with panels no longer than `h`.
fn radial_integral<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    h: f64,
    rule: &(Vec<f64>, Vec<f64>),
) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let panels = ((b - a) / h).ceil().max(1.0) as usize;
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * step;
            rule.0.iter().zip(&rule.1).map(|(x, w)| f(mid + 0.5 * step * x) * w).sum::<f64>()
                * 0.5
                * step
        })
        .sum()
}

/// The pieces of `ψ_t` on a radius: `a^±`, `w`, and the combination
/// `ψ_t = u + h^χ(n) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPieces {
    pub a_plus: Spinor2,
    pub a_minus: Spinor2,
    pub w: Spinor2,
    pub u: Spinor2,
    pub v: Spinor2,
}

/// Closed-form pieces at radius `r > 0`.
pub fn radial_pieces(profile: &RadialProfile, t: f64, r: f64) -> Result<RadialPieces> {
    if !(r > 0.0) {
        return Err(Error::OriginSingular);
    }
    let a = |s: f64| scale2(profile.g((r + s * t).abs()), (r + s * t) / r);
    let a_plus = a(1.0);
    let a_minus = a(-1.0);
    let w = scale2(
        sub2(profile.big_g((r + t).abs()), profile.big_g((r - t).abs())),
        0.5 / (r * r),
    );
    let u = scale2(add2(a_plus, a_minus), 0.5);
    let v = add2(scale2(sub2(a_plus, a_minus), 0.5), w);
    Ok(RadialPieces { a_plus, a_minus, w, u, v })
}

fn h_chi(n: [f64; 3], chi: Sign) -> crate::algebra::Mat2 {
    sigma_dot(n).scale_re(chi.value())
}

/// `(A⁺_t(x), A⁻_t(x), R_t(x))` at a point `x ≠ 0` (state centred at 0).
pub fn closed_form_components(
    profile: &RadialProfile,
    chi: Sign,
    t: f64,
    x: [f64; 3],
) -> Result<(Spinor2, Spinor2, Spinor2)> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let p = radial_pieces(profile, t, r)?;
    let n = [x[0] / r, x[1] / r, x[2] / r];
    let h = h_chi(n, chi);
    let proj = |s: f64, a: Spinor2| {
        let ha = h.apply(&a);
        [0.5 * (a[0] + ha[0] * s), 0.5 * (a[1] + ha[1] * s)]
    };
    Ok((proj(1.0, p.a_plus), proj(-1.0, p.a_minus), h.apply(&p.w)))
}

/// `ψ_t(x)` at a point `x ≠ 0` (state centred at 0).
pub fn closed_form_at(profile: &RadialProfile, chi: Sign, t: f64, x: [f64; 3]) -> Result<Spinor2> {
    let (ap, am, rt) = closed_form_components(profile, chi, t, x)?;
    Ok(add2(add2(ap, am), rt))
}

/// `ψ_t` on radial nodes, as `u + h^χ(n) v`, with the `A^±`, `R` pieces.
#[derive(Debug, Clone)]
pub struct RadialEvolution {
    pub t: f64,
    pub chirality: Sign,
    pub r: Vec<f64>,
    pub pieces: Vec<RadialPieces>,
}

impl RadialEvolution {
    /// Sample `ψ_t(x − center)` on a 3D grid. Sites closer to the centre
    /// than half a radial step are rejected.
    pub fn sample_on(
        profile: &RadialProfile,
        chi: Sign,
        t: f64,
        grid: Grid,
        center: [f64; 3],
    ) -> Result<SpinorField> {
        if grid.dim() != 3 {
            return Err(Error::DomainViolation("radial sampling needs a 3D grid".into()));
        }
        let mut f =
            SpinorField::zeros(grid, Kind::Weyl { chirality: chi }, Representation::Position);
        let min_r = 0.5 * profile.dr();
        let bad = f
            .values_mut()
            .par_chunks_mut(2)
            .enumerate()
            .map(|(site, o)| {
                let p = grid.point(site);
                let x = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r < min_r {
                    return true;
                }
                match closed_form_at(profile, chi, t, x) {
                    Ok(v) => {
                        o.copy_from_slice(&v);
                        false
                    }
                    Err(_) => true,
                }
            })
            .any(|b| b);
        if bad {
            return Err(Error::OriginSingular);
        }
        Ok(f)
    }

    /// `‖A^ς_t‖² = 2π∫r²|a^ς|² dr` (the angular average of `|π^{χς} a|²` is
    /// `½|a|²`).
    pub fn norm_a_sqr(profile: &RadialProfile, t: f64, s: Sign) -> f64 {
        Self::ball_norm_a_sqr(profile, t, s, f64::INFINITY)
    }

    /// `‖E(B_T(0))A^ς_t‖² = 2π∫₀^T r²|a^ς|² dr`.
    pub fn ball_norm_a_sqr(profile: &RadialProfile, t: f64, s: Sign, radius: f64) -> f64 {
        let (lo, hi) = support_interval(profile, t);
        let hi = hi.min(radius);
        // a^ς has a kink where r + ςt crosses zero
        let kink = [(-s.value() * t).max(0.0)];
        split_integral(
            &|r| {
                radial_pieces(profile, t, r)
                    .map(|p| {
                        let a = if s == Sign::Plus { p.a_plus } else { p.a_minus };
                        r * r * norm_sqr2(a)
                    })
                    .unwrap_or(0.0)
            },
            lo,
            hi,
            &kink,
            profile,
        ) * 2.0
            * PI
    }

    /// `‖R_t‖² = 4π∫r²|w|² dr`.
    pub fn norm_r_sqr(profile: &RadialProfile, t: f64) -> f64 {
        let (lo, hi) = support_interval(profile, t);
        radial_integral(
            |r| radial_pieces(profile, t, r).map(|p| r * r * norm_sqr2(p.w)).unwrap_or(0.0),
            lo,
            hi,
            profile.dr(),
            &profile.rule,
        ) * 4.0
            * PI
    }
}

/// Closed-form `ψ_t` on the given radii (all must be positive).
pub fn radial_evolve_closed_form(
    profile: &RadialProfile,
    chi: Sign,
    t: f64,
    radii: &[f64],
) -> Result<RadialEvolution> {
    let pieces = radii
        .par_iter()
        .map(|&r| radial_pieces(profile, t, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialEvolution { t, chirality: chi, r: radii.to_vec(), pieces })
}

/// Radii outside of which `ψ_t` vanishes: `[max(0, |t| − R), |t| + R]`.
fn support_interval(profile: &RadialProfile, t: f64) -> (f64, f64) {
    ((t.abs() - profile.r_max()).max(0.0), t.abs() + profile.r_max())
}

/// Momentum-side settings of the Fourier-sine route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineSettings {
    /// Upper momentum cutoff.
    pub s_max: f64,
    /// Number of momentum intervals (even).
    pub s_nodes: usize,
}

impl SineSettings {
    /// Cutoff `s_max = min(400π/R, π/(2Δr))` (the momentum profile of a
    /// smooth bump has decayed below ~1e-15 at the first bound; the second keeps
    /// the forward transform of the sampled profile free of aliasing) and a
    /// momentum step resolving the fastest oscillation `sin((r+|t|)s)` with
    /// ~25 points per period.
    pub fn for_profile(profile: &RadialProfile, t: f64) -> Self {
        let s_max = (400.0 * PI / profile.r_max()).min(0.5 * PI / profile.dr());
        let reach = 2.0 * profile.r_max() + t.abs();
        let ds = 0.25 / reach;
        let s_nodes = (((s_max / ds).ceil() as usize) + 1) & !1;
        SineSettings { s_max, s_nodes }
    }
}

/// Composite Simpson weights for `n + 1` uniform nodes (`n` even).
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// `(u, v)` of `ψ_t = u + h^χ(n)v` by the Fourier-sine route:
/// `F = 𝒮(jg)` on the momentum nodes, then
/// `u = (1/r)√(2/π)∫sin(sr)cos(ts)F ds` and
/// `v = (1/r)√(2/π)∫cos(sr)sin(ts)F ds − (1/r²)√(2/π)∫sin(sr)sin(ts)F/s ds`.
pub fn fourier_sine_evolution(
    profile: &RadialProfile,
    t: f64,
    radii: &[f64],
    settings: SineSettings,
) -> Result<Vec<(Spinor2, Spinor2)>> {
    if settings.s_nodes < 2 || settings.s_nodes % 2 == 1 || !(settings.s_max > 0.0) {
        return Err(Error::DomainViolation("momentum grid needs an even node count".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::OriginSingular);
    }
    let c = (2.0 / PI).sqrt();
    let ns = settings.s_nodes;
    let ds = settings.s_max / ns as f64;
    let ws = simpson_weights(ns, ds);
    let rn = profile.nodes();
    let wr = simpson_weights(rn.len() - 1, profile.dr());
    // r·g(r) with the Simpson weight folded in
    let jg: Vec<Spinor2> = rn
        .iter()
        .zip(profile.samples())
        .zip(&wr)
        .map(|((r, g), w)| scale2(*g, r * w))
        .collect();
    // F(s)·w_s and (F(s)/s)·w_s; F/s → √(2/π)∫r²g at s = 0
    let f: Vec<(Spinor2, Spinor2)> = (0..=ns)
        .into_par_iter()
        .map(|k| {
            let sk = k as f64 * ds;
            let mut acc = zero2();
            let mut acc0 = zero2();
            for (r, v) in rn.iter().zip(&jg) {
                if sk == 0.0 {
                    acc0 = add2(acc0, scale2(*v, *r));
                } else {
                    acc = add2(acc, scale2(*v, (r * sk).sin()));
                }
            }
            let fo = scale2(acc, c * ws[k]);
            let fs = if sk == 0.0 { scale2(acc0, c * ws[k]) } else { scale2(fo, 1.0 / sk) };
            (fo, fs)
        })
        .collect();
    let trig_t: Vec<(f64, f64)> = (0..=ns).map(|k| (t * k as f64 * ds).sin_cos()).collect();
    Ok(radii
        .par_iter()
        .map(|&r| {
            let (mut u, mut v1, mut v2) = (zero2(), zero2(), zero2());
            for k in 0..=ns {
                let (sr, cr) = (r * k as f64 * ds).sin_cos();
                let (st, ct) = trig_t[k];
                let (fo, fs) = &f[k];
                for comp in 0..2 {
                    u[comp] += fo[comp] * (sr * ct);
                    v1[comp] += fo[comp] * (cr * st);
                    v2[comp] += fs[comp] * (sr * st);
                }
            }
            let u = scale2(u, c / r);
            let v = sub2(scale2(v1, c / r), scale2(v2, c / (r * r)));
            (u, v)
        })
        .collect())
}

/// Relative L² distance between the closed form and the Fourier-sine
/// route at time `t`: `4π∫r²(|Δu|² + |Δv|²) dr` over the support of `ψ_t`
/// (the cross term averages out over directions).
pub fn crosscheck_against_spectral(
    profile: &RadialProfile,
    t: f64,
    settings: Option<SineSettings>,
) -> Result<f64> {
    let settings = settings.unwrap_or_else(|| SineSettings::for_profile(profile, t));
    let hi = t.abs() + profile.r_max();
    let m = (((hi / profile.dr()).ceil() as usize).min(4096) + 1) & !1;
    let h = hi / m as f64;
    let radii: Vec<f64> = (1..=m).map(|j| j as f64 * h).collect();
    let spectral = fourier_sine_evolution(profile, t, &radii, settings)?;
    let closed = radii
        .par_iter()
        .map(|&r| radial_pieces(profile, t, r))
        .collect::<Result<Vec<_>>>()?;
    let mut integrand = vec![0.0];
    integrand.extend(radii.iter().zip(closed.iter().zip(&spectral)).map(|(r, (c, (u, v)))| {
        r * r * (norm_sqr2(sub2(c.u, *u)) + norm_sqr2(sub2(c.v, *v)))
    }));
    Ok((4.0 * PI * simpson(&integrand, h)).max(0.0).sqrt())
}

/// Density of `ψ_t` on the sphere of radius r: `D(r) + n·S(r)`.
fn density_parts(profile: &RadialProfile, chi: Sign, t: f64, r: f64) -> (f64, [f64; 3]) {
    match radial_pieces(profile, t, r) {
        Ok(p) => {
            let s = sigma_expectation(p.u, p.v);
            let k = 2.0 * chi.value();
            (norm_sqr2(p.u) + norm_sqr2(p.v), [k * s[0], k * s[1], k * s[2]])
        }
        Err(_) => (0.0, [0.0; 3]),
    }
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `‖E(B_T(0))ψ_t‖²` for `ψ = g(|x − b|)`.
pub fn ball_probability(
    profile: &RadialProfile,
    chi: Sign,
    t: f64,
    b: [f64; 3],
    radius: f64,
) -> f64 {
    // in the frame of the state, the ball is centred at c = −b
    let c = [-b[0], -b[1], -b[2]];
    let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let (lo, hi) = support_interval(profile, t);
    let (lo, hi) = (lo.max((cn - radius).max(0.0)), hi.min(cn + radius));
    let ch = unit(c);
    let weight = |r: f64| -> f64 {
        let (d, s) = density_parts(profile, chi, t, r);
        match ch {
            None => {
                if r <= radius {
                    4.0 * PI * r * r * d
                } else {
                    0.0
                }
            }
            Some(e) => {
                let xi0 = ((r * r + cn * cn - radius * radius) / (2.0 * r * cn)).clamp(-1.0, 1.0);
                r * r * (2.0 * PI * (1.0 - xi0) * d + PI * (1.0 - xi0 * xi0) * dot3(e, s))
            }
        }
    };
    split_integral(&weight, lo, hi, &[(radius - cn).abs()], profile)
}

/// `‖E({|x·e| ≤ T})ψ_t‖²` for `ψ = g(|x − b|)`.
pub fn slab_probability(
    profile: &RadialProfile,
    chi: Sign,
    t: f64,
    b: [f64; 3],
    e: [f64; 3],
    half_width: f64,
) -> Result<f64> {
    let e = unit(e).ok_or_else(|| Error::DomainViolation("slab normal must be nonzero".into()))?;
    // slab {|y·e − β| ≤ T} in the frame of the state
    let beta = -dot3(b, e);
    let (lo, hi) = support_interval(profile, t);
    let weight = |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let (d, s) = density_parts(profile, chi, t, r);
        let x1 = ((beta - half_width) / r).clamp(-1.0, 1.0);
        let x2 = ((beta + half_width) / r).clamp(-1.0, 1.0);
        r * r * (2.0 * PI * (x2 - x1) * d + PI * (x2 * x2 - x1 * x1) * dot3(e, s))
    };
    let kinks = [(beta - half_width).abs(), (beta + half_width).abs()];
    Ok(split_integral(&weight, lo, hi, &kinks, profile))
}

/// Integrate over `[lo, hi]` with panels split at the given kinks.
fn split_integral(
    f: &(dyn Fn(f64) -> f64 + Sync),
    lo: f64,
    hi: f64,
    kinks: &[f64],
    profile: &RadialProfile,
) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let mut cuts = vec![lo, hi];
    cuts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|w| radial_integral(f, w[0], w[1], profile.dr(), &profile.rule))
        .sum()
}

/// Limits of `‖E(B_{|t|})ψ_t‖²` for `t → +∞` and `t → −∞`, with
/// `ψ = g(|x − b|)`: `½ ± 2π∫₀¹∫₀^{|b|ξ} ξ r² ⟨g, h^χ(b/|b|) g⟩ dr dξ`.
///
/// Exchanging the order of integration turns the double integral into
/// `½∫₀^{|b|} r²(1 − r²/|b|²)⟨g, h^χ g⟩ dr`.
pub fn asymptotic_ball_probability(profile: &RadialProfile, b: [f64; 3], chi: Sign) -> (f64, f64) {
    let Some(bh) = unit(b) else {
        return (0.5, 0.5);
    };
    let bn = dot3(b, bh);
    let h = h_chi(bh, chi);
    let j = PI
        * radial_integral(
            |r| {
                let g = profile.g(r);
                r * r * (1.0 - r * r / (bn * bn)) * inner2(g, h.apply(&g)).re
            },
            0.0,
            bn.min(profile.r_max()),
            profile.dr(),
            &profile.rule,
        );
    (0.5 + j, 0.5 - j)
}

/// One row of the radial diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialRow {
    pub t: f64,
    /// `‖E(B_{|t|})ψ_t‖²`
    pub ball_prob: f64,
    /// `‖E({|x₃| ≤ |t|})ψ_t‖²`
    pub slab_prob: f64,
    pub norm_a_plus: f64,
    pub norm_a_minus: f64,
    pub norm_r: f64,
}

/// Diagnostics for a centred radial state over a list of times.
pub fn radial_table(profile: &RadialProfile, chi: Sign, times: &[f64]) -> Result<Vec<RadialRow>> {
    times
        .iter()
        .map(|&t| {
            Ok(RadialRow {
                t,
                ball_prob: ball_probability(profile, chi, t, [0.0; 3], t.abs()),
                slab_prob: slab_probability(profile, chi, t, [0.0; 3], [0.0, 0.0, 1.0], t.abs())?,
                norm_a_plus: RadialEvolution::norm_a_sqr(profile, t, Sign::Plus).sqrt(),
                norm_a_minus: RadialEvolution::norm_a_sqr(profile, t, Sign::Minus).sqrt(),
                norm_r: RadialEvolution::norm_r_sqr(profile, t).sqrt(),
            })
        })
        .collect()
}

/// `‖E({|x·e| ≤ |t|})ψ_t‖²` for each time, `ψ = g(|x − b|)`.
pub fn slab_probability_limit(
    profile: &RadialProfile,
    chi: Sign,
    b: [f64; 3],
    e: [f64; 3],
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    times.iter().map(|&t| Ok((t, slab_probability(profile, chi, t, b, e, t.abs())?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn profile(nodes: usize) -> RadialProfile {
        RadialProfile::bump(1.0, [c(1.0, 0.0), c(0.3, -0.4)], nodes).unwrap()
    }

    #[test]
    fn profile_is_normalized_with_cumulative_moment() {
        let p = profile(512);
        assert!((p.ball_mass(1.0) - 1.0).abs() < 1e-12);
        assert_eq!(p.cumulative()[0], zero2());
        // G is linear in g: compare a node value with an independent Simpson
        let k = 256;
        let f: Vec<f64> = p.nodes()[..=k].iter().zip(p.samples()).map(|(r, g)| r * g[0].re).collect();
        let s = -simpson(&f, p.dr());
        assert!((p.cumulative()[k][0].re - s).abs() < 1e-9);
        assert!(matches!(RadialProfile::bump(1.0, [c(1.0, 0.0); 2], 7), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn time_zero_reproduces_the_state() {
        let p = profile(512);
        for x in [[0.1, 0.2, 0.3], [0.0, 0.0, 0.7], [-0.5, 0.1, 0.0]] {
            let (ap, am, rt) = closed_form_components(&p, Sign::Plus, 0.0, x).unwrap();
            let r = dot3(x, x).sqrt();
            let g = p.g(r);
            let sum = add2(ap, am);
            assert!(norm_sqr2(sub2(sum, g)).sqrt() < 1e-12 && norm_sqr2(rt) == 0.0);
        }
        assert_eq!(closed_form_at(&p, Sign::Plus, 1.0, [0.0; 3]), Err(Error::OriginSingular));
    }

    #[test]
    fn pointwise_orthogonality() {
        let p = profile(512);
        for t in [-1.3, 0.4, 2.0] {
            for x in [[0.1, 0.2, 0.3], [0.9, -0.1, 0.5], [-1.5, 0.2, 0.1]] {
                let (ap, am, _) = closed_form_components(&p, Sign::Minus, t, x).unwrap();
                let scale = norm_sqr2(ap).sqrt() * norm_sqr2(am).sqrt() + 1e-300;
                assert!(inner2(ap, am).norm() <= 1e-13 * scale.max(1.0));
            }
        }
    }
}
