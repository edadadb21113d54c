//! Grid-sampled spinor wave functions.
//!
//! A [`SpinorField`] lives on a periodic [`Grid`] (1D along `e₃`, or 3D) in
//! either position or momentum representation. Sample `j` along an axis sits
//! at `origin + j·Δx`; by default the origin is chosen so that cell
//! *boundaries* fall on integer multiples of `Δx` (zero is a boundary).
//! Momenta are `p_k = 2πk/(NΔx)` in FFT order with the Nyquist mode taken
//! negative.
//!
//! Values are stored interleaved: `values[site·d + component]`. In 3D the
//! site index is `(i₀·N + i₁)·N + i₂` for coordinates `(x₁, x₂, x₃)`.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{Kind, Sign};
use crate::error::{Error, Result};
use crate::C64;

/// Discretisation of ℝ (along `e₃`) or ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    dx: f64,
    origin: f64,
}

impl Grid {
    /// 1D grid (the line spanned by `e₃`) with cell boundaries on `ℤ·Δx`.
    pub fn new_1d(n: usize, dx: f64) -> Self {
        Self::new(1, n, dx)
    }

    /// 3D grid, `n` points per axis, same origin convention on every axis.
    pub fn new_3d(n: usize, dx: f64) -> Self {
        Self::new(3, n, dx)
    }

    pub fn new(dim: usize, n: usize, dx: f64) -> Self {
        assert!(dim == 1 || dim == 3, "dimension must be 1 or 3");
        assert!(n.is_power_of_two() && n >= 2, "N must be a power of two");
        assert!(dx > 0.0 && dx.is_finite(), "Δx must be positive");
        let origin = -((n / 2) as f64) * dx + 0.5 * dx;
        Self { dim, n, dx, origin }
    }

    /// Same grid with an explicit position of sample 0.
    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Number of sites (`N^dim`).
    pub fn sites(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Total extent `L = N·Δx`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.dx
    }

    /// Momentum spacing `2π/L`.
    pub fn dp(&self) -> f64 {
        2.0 * PI / self.extent()
    }

    /// Nyquist momentum `π/Δx`.
    pub fn nyquist(&self) -> f64 {
        PI / self.dx
    }

    /// Position of sample `j` along an axis.
    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.dx
    }

    /// Momentum of mode `k` along an axis (FFT order).
    pub fn p(&self, k: usize) -> f64 {
        let kk = if k < self.n / 2 { k as i64 } else { k as i64 - self.n as i64 };
        kk as f64 * self.dp()
    }

    /// Lower and upper cell boundaries of the whole grid.
    pub fn bounds(&self) -> (f64, f64) {
        (self.origin - 0.5 * self.dx, self.origin + (self.n as f64 - 0.5) * self.dx)
    }

    /// Per-axis indices of a site.
    pub fn unravel(&self, site: usize) -> [usize; 3] {
        match self.dim {
            1 => [0, 0, site],
            _ => {
                let n = self.n;
                [site / (n * n), (site / n) % n, site % n]
            }
        }
    }

    /// Spatial point of a site; 1D grids live on the `e₃` axis.
    pub fn point(&self, site: usize) -> [f64; 3] {
        let [a, b, c] = self.unravel(site);
        match self.dim {
            1 => [0.0, 0.0, self.x(c)],
            _ => [self.x(a), self.x(b), self.x(c)],
        }
    }

    /// Momentum vector of a site (same embedding as [`Grid::point`]).
    pub fn momentum(&self, site: usize) -> [f64; 3] {
        let [a, b, c] = self.unravel(site);
        match self.dim {
            1 => [0.0, 0.0, self.p(c)],
            _ => [self.p(a), self.p(b), self.p(c)],
        }
    }

    /// Volume element `Δx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// Momentum volume element `Δp^dim`.
    pub fn momentum_cell_volume(&self) -> f64 {
        self.dp().powi(self.dim as i32)
    }

    /// Nearest cell boundary to `alpha`.
    pub fn snap_to_boundary(&self, alpha: f64) -> f64 {
        let b0 = self.origin - 0.5 * self.dx;
        b0 + ((alpha - b0) / self.dx).round() * self.dx
    }

    /// The grid describing `D_λ`-dilated samples: every length scales by λ.
    pub fn dilated(&self, lambda: f64) -> Grid {
        Grid { dim: self.dim, n: self.n, dx: self.dx * lambda, origin: self.origin * lambda }
    }
}

/// Position or momentum representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// Grid-sampled `ℂ^d`-valued wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    kind: Kind,
    repr: Representation,
    values: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(grid: Grid, kind: Kind, repr: Representation) -> Self {
        let d = kind.components();
        Self { grid, kind, repr, values: vec![C64::new(0.0, 0.0); grid.sites() * d] }
    }

    /// Wrap raw interleaved values.
    pub fn from_values(grid: Grid, kind: Kind, repr: Representation, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), grid.sites() * kind.components(), "value count mismatch");
        Self { grid, kind, repr, values }
    }

    /// Sample a position-space function `f(x) ∈ ℂ^d`.
    pub fn from_fn<F>(grid: Grid, kind: Kind, f: F) -> Self
    where
        F: Fn([f64; 3], &mut [C64]) + Sync,
    {
        let d = kind.components();
        let mut values = vec![C64::new(0.0, 0.0); grid.sites() * d];
        values.par_chunks_mut(d).enumerate().for_each(|(site, out)| f(grid.point(site), out));
        Self { grid, kind, repr: Representation::Position, values }
    }

    /// Sample a momentum-space function `φ(p) ∈ ℂ^d`.
    pub fn from_momentum_fn<F>(grid: Grid, kind: Kind, f: F) -> Self
    where
        F: Fn([f64; 3], &mut [C64]) + Sync,
    {
        let d = kind.components();
        let mut values = vec![C64::new(0.0, 0.0); grid.sites() * d];
        values.par_chunks_mut(d).enumerate().for_each(|(site, out)| f(grid.momentum(site), out));
        Self { grid, kind, repr: Representation::Momentum, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    /// Spinor dimension `d`.
    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Spinor at a site.
    pub fn at(&self, site: usize) -> &[C64] {
        let d = self.components();
        &self.values[site * d..(site + 1) * d]
    }

    pub(crate) fn require(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::WrongRepresentation { expected: repr.name() });
        }
        Ok(())
    }

    fn measure(&self) -> f64 {
        match self.repr {
            Representation::Position => self.grid.cell_volume(),
            Representation::Momentum => self.grid.momentum_cell_volume(),
        }
    }

    /// `‖ψ‖²` with the measure of the current representation.
    pub fn norm_sqr(&self) -> f64 {
        self.measure() * self.values.par_iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩` (antilinear in the first slot).
    pub fn inner(&self, other: &SpinorField) -> C64 {
        self.check_compatible(other);
        let s: C64 = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.measure()
    }

    fn check_compatible(&self, other: &SpinorField) {
        assert!(self.grid == other.grid, "fields live on different grids");
        assert!(self.repr == other.repr, "fields are in different representations");
        assert!(self.components() == other.components(), "component mismatch");
    }

    pub fn scale(&self, s: C64) -> SpinorField {
        let mut out = self.clone();
        out.values.par_iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn normalized(&self) -> Result<SpinorField> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::DegenerateState("cannot normalise a zero field".into()));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &SpinorField) -> SpinorField {
        self.check_compatible(other);
        let mut out = self.clone();
        out.values.par_iter_mut().zip(other.values.par_iter()).for_each(|(a, b)| *a += b);
        out
    }

    pub fn sub(&self, other: &SpinorField) -> SpinorField {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Apply a site-dependent `d×d` operation in place: `f(coordinate, spinor)`.
    /// The coordinate is the position (position rep) or momentum (momentum
    /// rep) of the site.
    pub fn map_sites<F>(&self, f: F) -> SpinorField
    where
        F: Fn([f64; 3], &mut [C64]) + Sync,
    {
        let d = self.components();
        let grid = self.grid;
        let repr = self.repr;
        let mut out = self.clone();
        out.values.par_chunks_mut(d).enumerate().for_each(|(site, s)| {
            let c = match repr {
                Representation::Position => grid.point(site),
                Representation::Momentum => grid.momentum(site),
            };
            f(c, s)
        });
        out
    }

    /// Position-space density `Σ_c |ψ_c|²` per site.
    pub fn density(&self) -> Vec<f64> {
        let d = self.components();
        self.values.par_chunks(d).map(|s| s.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Fourier transform to momentum representation (unitary).
    pub fn to_momentum(&self) -> Result<SpinorField> {
        self.require(Representation::Position)?;
        let mut out = self.clone();
        transform(&mut out.values, &self.grid, self.components(), Direction::Forward);
        out.repr = Representation::Momentum;
        Ok(out)
    }

    /// Inverse Fourier transform to position representation (unitary).
    pub fn to_position(&self) -> Result<SpinorField> {
        self.require(Representation::Momentum)?;
        let mut out = self.clone();
        transform(&mut out.values, &self.grid, self.components(), Direction::Inverse);
        out.repr = Representation::Position;
        Ok(out)
    }

    /// Convert to the requested representation (no-op if already there).
    pub fn in_representation(&self, repr: Representation) -> SpinorField {
        match (self.repr, repr) {
            (a, b) if a == b => self.clone(),
            (Representation::Position, _) => self.to_momentum().expect("checked"),
            _ => self.to_position().expect("checked"),
        }
    }

    /// Relabel the samples as those of a different grid of the same shape
    /// (used for exact dilations).
    pub fn with_grid(mut self, grid: Grid) -> SpinorField {
        assert_eq!(grid.sites(), self.grid.sites(), "grid shape mismatch");
        self.grid = grid;
        self
    }

    pub fn with_kind(mut self, kind: Kind) -> SpinorField {
        assert_eq!(kind.components(), self.components(), "component mismatch");
        self.kind = kind;
        self
    }

    /// Smallest and largest cell boundaries enclosing all sites whose density
    /// exceeds `thresh` (absolute). `None` if there is none.
    pub fn support_bounds_1d(&self, thresh: f64) -> Option<(f64, f64)> {
        let dens = self.density();
        let first = dens.iter().position(|&v| v > thresh)?;
        let last = dens.iter().rposition(|&v| v > thresh)?;
        let g = &self.grid;
        match g.dim {
            1 => Some((g.x(first) - 0.5 * g.dx, g.x(last) + 0.5 * g.dx)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    }
}

/// Unnormalised FFT along one axis of a single-component array.
fn fft_axis(data: &mut [C64], grid: &Grid, axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let n = grid.n;
    if grid.dim == 1 || axis == 2 {
        data.par_chunks_mut(n).for_each(|line| fft.process(line));
        return;
    }
    // strided axes: process each i₀-slab (axis 1) or each (i₁,i₂) column (axis 0)
    let stride = if axis == 1 { n } else { n * n };
    if axis == 1 {
        data.par_chunks_mut(n * n).for_each(|slab| {
            let mut buf = vec![C64::new(0.0, 0.0); n];
            for i2 in 0..n {
                for k in 0..n {
                    buf[k] = slab[k * stride + i2];
                }
                fft.process(&mut buf);
                for k in 0..n {
                    slab[k * stride + i2] = buf[k];
                }
            }
        });
    } else {
        let cols: Vec<Vec<C64>> = (0..n * n)
            .into_par_iter()
            .map(|c| {
                let mut buf: Vec<C64> = (0..n).map(|k| data[k * stride + c]).collect();
                fft.process(&mut buf);
                buf
            })
            .collect();
        for (c, col) in cols.into_iter().enumerate() {
            for k in 0..n {
                data[k * stride + c] = col[k];
            }
        }
    }
}

fn transform(values: &mut [C64], grid: &Grid, d: usize, dir: Direction) {
    let sites = grid.sites();
    let fft = plan(grid.n, dir);
    let sign = if dir == Direction::Forward { -1.0 } else { 1.0 };
    // per-axis phase e^{∓i·origin·p_k}
    let phase: Vec<C64> =
        (0..grid.n).map(|k| C64::from_polar(1.0, sign * grid.origin * grid.p(k))).collect();
    let scale = match dir {
        Direction::Forward => (grid.dx / (2.0 * PI).sqrt()).powi(grid.dim as i32),
        Direction::Inverse => (grid.dp() / (2.0 * PI).sqrt()).powi(grid.dim as i32),
    };
    let site_phase = |site: usize| -> C64 {
        let [a, b, c] = grid.unravel(site);
        match grid.dim {
            1 => phase[c],
            _ => phase[a] * phase[b] * phase[c],
        }
    };
    for comp in 0..d {
        let mut buf: Vec<C64> = (0..sites).map(|s| values[s * d + comp]).collect();
        if dir == Direction::Inverse {
            buf.par_iter_mut().enumerate().for_each(|(s, z)| *z *= site_phase(s));
        }
        for axis in (3 - grid.dim)..3 {
            fft_axis(&mut buf, grid, axis, &fft);
        }
        if dir == Direction::Forward {
            buf.par_iter_mut().enumerate().for_each(|(s, z)| *z *= site_phase(s));
        }
        for (s, z) in buf.into_iter().enumerate() {
            values[s * d + comp] = z * scale;
        }
    }
}

/// A region of ℝ³ (1D grids use the `e₃` axis), decided at cell centres.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionMask {
    All,
    Empty,
    /// `{x : x·e ≤ α}`.
    HalfSpaceBelow { e: [f64; 3], alpha: f64 },
    /// `{x : lo ≤ x·e ≤ hi}`.
    Strip { e: [f64; 3], lo: f64, hi: f64 },
    /// Closed ball.
    Ball { center: [f64; 3], radius: f64 },
    Complement(Box<RegionMask>),
    Union(Vec<RegionMask>),
    Intersection(Vec<RegionMask>),
}

pub const E3: [f64; 3] = [0.0, 0.0, 1.0];
pub const MINUS_E3: [f64; 3] = [0.0, 0.0, -1.0];

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl RegionMask {
    pub fn half_space_below(e: [f64; 3], alpha: f64) -> Self {
        RegionMask::HalfSpaceBelow { e, alpha }
    }

    /// `{x : x·e > α}`, the exact complement of [`RegionMask::half_space_below`].
    pub fn half_space_above(e: [f64; 3], alpha: f64) -> Self {
        RegionMask::Complement(Box::new(RegionMask::HalfSpaceBelow { e, alpha }))
    }

    pub fn strip(e: [f64; 3], lo: f64, hi: f64) -> Self {
        RegionMask::Strip { e, lo, hi }
    }

    pub fn ball(center: [f64; 3], radius: f64) -> Self {
        RegionMask::Ball { center, radius }
    }

    pub fn complement(self) -> Self {
        RegionMask::Complement(Box::new(self))
    }

    pub fn contains(&self, x: [f64; 3]) -> bool {
        match self {
            RegionMask::All => true,
            RegionMask::Empty => false,
            RegionMask::HalfSpaceBelow { e, alpha } => dot(x, *e) <= *alpha,
            RegionMask::Strip { e, lo, hi } => {
                let s = dot(x, *e);
                *lo <= s && s <= *hi
            }
            RegionMask::Ball { center, radius } => {
                let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                dot(d, d) <= radius * radius
            }
            RegionMask::Complement(m) => !m.contains(x),
            RegionMask::Union(ms) => ms.iter().any(|m| m.contains(x)),
            RegionMask::Intersection(ms) => ms.iter().all(|m| m.contains(x)),
        }
    }

    /// Indicator over all grid sites.
    pub fn indicator(&self, grid: &Grid) -> Vec<bool> {
        (0..grid.sites()).into_par_iter().map(|s| self.contains(grid.point(s))).collect()
    }
}

/// `E(Δ)ψ = 1_Δ ψ` in position representation.
pub fn apply_mask(psi: &SpinorField, mask: &RegionMask) -> Result<SpinorField> {
    psi.require(Representation::Position)?;
    Ok(psi.map_sites(|x, s| {
        if !mask.contains(x) {
            s.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
    }))
}

/// `⟨ψ, E(Δ)ψ⟩ = ‖1_Δψ‖²`.
pub fn localization_probability(psi: &SpinorField, mask: &RegionMask) -> Result<f64> {
    psi.require(Representation::Position)?;
    let g = psi.grid;
    let d = psi.components();
    let s: f64 = psi
        .values
        .par_chunks(d)
        .enumerate()
        .filter(|(site, _)| mask.contains(g.point(*site)))
        .map(|(_, sp)| sp.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    Ok(s * g.cell_volume())
}

/// Relative mass below which a tail counts as outside the band in
/// [`dilate`]'s Nyquist check.
pub const BAND_TAIL: f64 = 1e-12;

/// Momentum radius (per axis, max-norm) holding all but `BAND_TAIL` of the
/// mass of a momentum-space field.
fn momentum_band(phi: &SpinorField) -> f64 {
    let g = phi.grid;
    let d = phi.components();
    let total: f64 = phi.values.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut by_k: Vec<(f64, f64)> = phi
        .values
        .chunks(d)
        .enumerate()
        .map(|(s, sp)| {
            let p = g.momentum(s);
            let r = p[0].abs().max(p[1].abs()).max(p[2].abs());
            (r, sp.iter().map(|z| z.norm_sqr()).sum::<f64>())
        })
        .collect();
    by_k.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    for (r, w) in by_k {
        tail += w;
        if tail > BAND_TAIL * total {
            return r;
        }
    }
    0.0
}

/// Position half-width (max-norm about the origin) holding all but
/// `BAND_TAIL` of the mass.
fn position_extent(psi: &SpinorField) -> f64 {
    let g = psi.grid;
    let d = psi.components();
    let total: f64 = psi.values.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut by_r: Vec<(f64, f64)> = psi
        .values
        .chunks(d)
        .enumerate()
        .map(|(s, sp)| {
            let x = g.point(s);
            let r = x[0].abs().max(x[1].abs()).max(x[2].abs()) + 0.5 * g.dx;
            (r, sp.iter().map(|z| z.norm_sqr()).sum::<f64>())
        })
        .collect();
    by_r.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    for (r, w) in by_r {
        tail += w;
        if tail > BAND_TAIL * total {
            return r;
        }
    }
    0.0
}

/// Dilation `(D_λφ)(p) = λ^{dim/2} φ(λp)` evaluated exactly from the
/// Fourier series of the position samples at the scaled momenta.
///
/// O(N²) in 1D; in 3D the evaluation is separable (O(N⁴) per axis).
pub fn dilate(phi: &SpinorField, lambda: f64) -> Result<SpinorField> {
    phi.require(Representation::Momentum)?;
    assert!(lambda > 0.0, "dilation factor must be positive");
    if lambda == 1.0 {
        return Ok(phi.clone());
    }
    let g = phi.grid;
    let band = momentum_band(phi);
    if band / lambda > g.nyquist() {
        return Err(Error::BandExceeded { lambda });
    }
    let psi = phi.to_position()?;
    let ext = position_extent(&psi);
    let (lo, hi) = g.bounds();
    if ext * lambda > hi.min(-lo) {
        return Err(Error::SupportExceedsGuard { lo: -ext * lambda, hi: ext * lambda });
    }
    let d = phi.components();
    let n = g.n;
    let pref = (g.dx / (2.0 * PI).sqrt()).powi(g.dim as i32) * lambda.powf(0.5 * g.dim as f64);
    // T[k][j] = e^{−iλ p_k x_j}; φ is band-limited, so scaled momenta
    // beyond Nyquist contribute nothing (rather than a periodic alias).
    let table: Vec<C64> = (0..n * n)
        .into_par_iter()
        .map(|kj| {
            let (k, j) = (kj / n, kj % n);
            if (lambda * g.p(k)).abs() > g.nyquist() {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar(1.0, -lambda * g.p(k) * g.x(j))
            }
        })
        .collect();
    let mut out = SpinorField::zeros(g, phi.kind, Representation::Momentum);
    for comp in 0..d {
        let mut buf: Vec<C64> = (0..g.sites()).map(|s| psi.values[s * d + comp]).collect();
        for axis in (3 - g.dim)..3 {
            buf = apply_axis_matrix(&buf, &g, axis, &table);
        }
        for (s, z) in buf.into_iter().enumerate() {
            out.values[s * d + comp] = z * pref;
        }
    }
    Ok(out)
}

/// `out[.., k, ..] = Σ_j T[k][j] in[.., j, ..]` along one axis.
fn apply_axis_matrix(input: &[C64], g: &Grid, axis: usize, table: &[C64]) -> Vec<C64> {
    let n = g.n;
    let stride = match (g.dim, axis) {
        (1, _) | (_, 2) => 1,
        (_, 1) => n,
        _ => n * n,
    };
    let mut out = vec![C64::new(0.0, 0.0); input.len()];
    out.par_iter_mut().enumerate().for_each(|(s, o)| {
        let k = (s / stride) % n;
        let base = s - k * stride;
        let row = &table[k * n..(k + 1) * n];
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += row[j] * input[base + j * stride];
        }
        *o = acc;
    });
    out
}

/// Exact dilation by relabelling the grid: the samples are unchanged up to
/// the factor `λ^{±dim/2}` while all lengths scale by λ. Works in either
/// representation.
pub fn relabel_dilate(f: &SpinorField, lambda: f64) -> SpinorField {
    assert!(lambda > 0.0, "dilation factor must be positive");
    let dimf = f.grid.dim as f64;
    let factor = match f.repr {
        Representation::Position => lambda.powf(-0.5 * dimf),
        Representation::Momentum => lambda.powf(0.5 * dimf),
    };
    let g = f.grid.dilated(lambda);
    f.scale(C64::new(factor, 0.0)).with_grid(g)
}

/// The C^∞ bump profile `exp(−w²/(w²−r²))` (zero for `r ≥ w`).
pub fn bump_profile(r: f64, w: f64) -> f64 {
    if r.abs() >= w {
        0.0
    } else {
        (-(w * w) / (w * w - r * r)).exp()
    }
}

/// Normalised smooth compactly supported state `f(|x−c|)·u`.
///
/// `horizon` is the largest |t| (or boost stretch) the caller intends to
/// apply; the support fattened by it must fit inside the grid.
pub fn make_bump(
    grid: Grid,
    kind: Kind,
    center: [f64; 3],
    width: f64,
    spinor: &[C64],
    horizon: f64,
) -> Result<SpinorField> {
    let d = kind.components();
    assert_eq!(spinor.len(), d, "spinor length must match the kind");
    let (lo, hi) = grid.bounds();
    let axes: &[usize] = if grid.dim == 1 { &[2] } else { &[0, 1, 2] };
    for &a in axes {
        let (l, h) = (center[a] - width - horizon, center[a] + width + horizon);
        if l < lo || h > hi {
            return Err(Error::SupportExceedsGuard { lo: l, hi: h });
        }
    }
    let un: f64 = spinor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if un == 0.0 {
        return Err(Error::DegenerateState("zero spinor direction".into()));
    }
    let u: Vec<C64> = spinor.iter().map(|z| z / un).collect();
    let psi = SpinorField::from_fn(grid, kind, |x, out| {
        let r = match grid.dim {
            1 => (x[2] - center[2]).abs(),
            _ => {
                let q = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                dot(q, q).sqrt()
            }
        };
        let f = bump_profile(r, width);
        for (o, c) in out.iter_mut().zip(&u) {
            *o = c * f;
        }
    });
    psi.normalized()
}

/// 1D convenience wrapper for [`make_bump`] centred at `c` on the `e₃` axis.
pub fn make_bump_1d(
    grid: Grid,
    kind: Kind,
    c: f64,
    width: f64,
    spinor: &[C64],
    horizon: f64,
) -> Result<SpinorField> {
    make_bump(grid, kind, [0.0, 0.0, c], width, spinor, horizon)
}

/// Radially symmetric 3D state `ψ(x) = g(|x|)` (not renormalised).
pub fn make_radial_state<G>(grid: Grid, kind: Kind, g: G) -> SpinorField
where
    G: Fn(f64, &mut [C64]) + Sync,
{
    assert_eq!(grid.dim, 3, "radial states need a 3D grid");
    SpinorField::from_fn(grid, kind, |x, out| g(dot(x, x).sqrt(), out))
}

// ---------------------------------------------------------------------------
// Serialisation
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"CLSF";
const VERSION: u32 = 1;

/// Write a field snapshot: header followed by little-endian complex64
/// (two f32 per value, real part first).
pub fn write_field<W: Write>(w: &mut W, f: &SpinorField) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(f.grid.dim as u32).to_le_bytes())?;
    w.write_all(&(f.grid.n as u64).to_le_bytes())?;
    w.write_all(&f.grid.dx.to_le_bytes())?;
    w.write_all(&f.grid.origin.to_le_bytes())?;
    w.write_all(&(f.components() as u32).to_le_bytes())?;
    let (tag, param) = match f.kind {
        Kind::Dirac { mass } => (0u8, mass),
        Kind::Weyl { chirality } => (1u8, chirality.value()),
    };
    w.write_all(&[tag])?;
    w.write_all(&param.to_le_bytes())?;
    let rep = match f.repr {
        Representation::Position => 0u8,
        Representation::Momentum => 1u8,
    };
    w.write_all(&[rep])?;
    let mut buf = Vec::with_capacity(f.values.len() * 8);
    for z in &f.values {
        buf.extend_from_slice(&(z.re as f32).to_le_bytes());
        buf.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    w.write_all(&buf)
}

/// Read a snapshot written by [`write_field`].
pub fn read_field<R: Read>(r: &mut R) -> std::io::Result<SpinorField> {
    use std::io::{Error as IoError, ErrorKind};
    let bad = |m: &str| IoError::new(ErrorKind::InvalidData, m.to_string());
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b4)?;
    if &b4 != MAGIC {
        return Err(bad("not a field snapshot"));
    }
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != VERSION {
        return Err(bad("unsupported snapshot version"));
    }
    r.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let dx = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let origin = f64::from_le_bytes(b8);
    r.read_exact(&mut b4)?;
    let d = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b1)?;
    let tag = b1[0];
    r.read_exact(&mut b8)?;
    let param = f64::from_le_bytes(b8);
    r.read_exact(&mut b1)?;
    let repr = match b1[0] {
        0 => Representation::Position,
        1 => Representation::Momentum,
        _ => return Err(bad("bad representation tag")),
    };
    let kind = match tag {
        0 => Kind::Dirac { mass: param },
        1 => Kind::Weyl { chirality: Sign::of(param) },
        _ => return Err(bad("bad kind tag")),
    };
    if (dim != 1 && dim != 3) || !n.is_power_of_two() || kind.components() != d {
        return Err(bad("inconsistent header"));
    }
    let grid = Grid::new(dim, n, dx).with_origin(origin);
    let count = grid.sites() * d;
    let mut raw = vec![0u8; count * 8];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            C64::new(re as f64, im as f64)
        })
        .collect();
    Ok(SpinorField::from_values(grid, kind, repr, values))
}

/// `(point, |ψ|²)` rows for CSV export.
pub fn density_rows(f: &SpinorField) -> Result<Vec<([f64; 3], f64)>> {
    f.require(Representation::Position)?;
    let dens = f.density();
    Ok(dens.into_iter().enumerate().map(|(s, v)| (f.grid.point(s), v)).collect())
}
