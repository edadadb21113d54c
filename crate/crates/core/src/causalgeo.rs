//! Causal geometry: regions of influence, the causal lattice of
//! transverse-invariant regions, and measures on the space of timelike
//! lines.
//!
//! Regions of ℝ⁴ that do not depend on `(x₁, x₂)` are described in
//! lightcone coordinates `u = x₀ − x₃`, `v = x₀ + x₃`. For such regions the
//! transverse separation can always be chosen zero, so two points are
//! spacelike separated iff `Δu·Δv < 0`, and non-timelike separated (distinct
//! with `(x − y)² ≤ 0`) iff `Δu·Δv ≤ 0` and `(Δu, Δv) ≠ 0`. Regions are
//! finite unions of rectangles in the `(u, v)` plane whose endpoints carry
//! open/closed flags; the causal complement `⊥`, the non-timelike complement
//! `⊥′`, completions, meets and joins are computed exactly.
//!
//! Timelike lines are parameterized by their position `x` at `x₀ = 0` and
//! velocity `v` with `|v| < 1`; the Lebesgue measure on `ℝ³ × O₁` is
//! estimated by stratified Monte Carlo.

use std::cmp::Ordering;
use std::fmt;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::RegionMask;

// ---------------------------------------------------------------------------
// Regions of influence in ℝ³
// ---------------------------------------------------------------------------

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!("{what} must be finite")))
    }
}

/// Region of influence of the event `(t, y)` in the hyperplane `x₀ = 0`:
/// the ball with centre `y` and radius `|t|`.
pub fn influence_ball(y: [f64; 3], t: f64) -> RegionMask {
    RegionMask::Ball { center: y, radius: t.abs() }
}

/// Region of influence of the boosted point `A_ρ·y` (boost along `e₃`): the
/// ball with centre `(y₁, y₂, cosh(ρ)y₃)` and radius `|sinh(ρ)y₃|`.
pub fn influence_boosted_point(y: [f64; 3], rho: f64) -> RegionMask {
    RegionMask::Ball {
        center: [y[0], y[1], rho.cosh() * y[2]],
        radius: (rho.sinh() * y[2]).abs(),
    }
}

/// Region of influence of the boosted strip `{a ≤ x·e ≤ b}` (boost along
/// the unit vector `e` with rapidity ρ, `0 ≤ a < b`):
/// `{a e^{−|ρ|} ≤ x·e ≤ b e^{|ρ|}}`.
pub fn influence_strip(a: f64, b: f64, e: [f64; 3], rho: f64) -> Result<RegionMask> {
    check_finite(&[a, b, rho], "strip data")?;
    if !(0.0 <= a && a < b) {
        return Err(Error::DomainViolation(format!("strip needs 0 ≤ a < b, got [{a}, {b}]")));
    }
    let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::DomainViolation(format!("strip normal has length {n}")));
    }
    let r = rho.abs();
    Ok(RegionMask::Strip { e, lo: a * (-r).exp(), hi: b * r.exp() })
}

/// A circular arc in the `(x₁, x₃)` half-plane of a profile curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileArc {
    /// Centre `(x₁, x₃)`.
    pub center: [f64; 2],
    pub radius: f64,
}

/// Profile curve of the region of influence of a boosted cylinder
/// `{x₁² + x₂² ≤ c², a ≤ x₃ ≤ b}`: rotating the curve
/// `P₁ –arc– P₂ –segment– P₃ –arc– P₄` about the `x₃` axis bounds the solid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderProfile {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    /// `P₁..P₄` as points `(x₁, 0, x₃)`.
    pub points: [[f64; 3]; 4],
    /// Arc from `P₁` to `P₂`.
    pub lower_arc: ProfileArc,
    /// Arc from `P₃` to `P₄`.
    pub upper_arc: ProfileArc,
}

/// The boosted-cylinder profile with `c_ρ = cosh ρ`, `s_ρ = sinh|ρ|`,
/// `t_ρ = tanh|ρ|`:
/// `P₁ = (c, 0, e^{−|ρ|}a)`, `P₂ = (c + t_ρ a, 0, a/c_ρ)`,
/// `P₃ = (c + t_ρ b, 0, b/c_ρ)`, `P₄ = (c, 0, e^{|ρ|}b)`; the arcs are centred
/// at `(c, c_ρ a)` and `(c, c_ρ b)` with radii `s_ρ a` and `s_ρ b`.
pub fn influence_cylinder(c: f64, a: f64, b: f64, rho: f64) -> Result<CylinderProfile> {
    check_finite(&[c, a, b, rho], "cylinder data")?;
    if !(c > 0.0 && 0.0 <= a && a < b) {
        return Err(Error::DomainViolation(format!(
            "cylinder needs c > 0 and 0 ≤ a < b, got c = {c}, [{a}, {b}]"
        )));
    }
    let r = rho.abs();
    let (cr, sr, tr) = (rho.cosh(), r.sinh(), r.tanh());
    Ok(CylinderProfile {
        c,
        a,
        b,
        rho,
        points: [
            [c, 0.0, (-r).exp() * a],
            [c + tr * a, 0.0, a / cr],
            [c + tr * b, 0.0, b / cr],
            [c, 0.0, r.exp() * b],
        ],
        lower_arc: ProfileArc { center: [c, cr * a], radius: sr * a },
        upper_arc: ProfileArc { center: [c, cr * b], radius: sr * b },
    })
}

impl CylinderProfile {
    /// Points along the profile curve (`(x₁, 0, x₃)`), `per_piece` samples on
    /// each of the three pieces, in order from `P₁` to `P₄`.
    pub fn sample_curve(&self, per_piece: usize) -> Vec<[f64; 3]> {
        let per_piece = per_piece.max(2);
        let [p1, p2, p3, p4] = self.points;
        let mut out = Vec::with_capacity(3 * per_piece);
        let arc = |arc: &ProfileArc, from: [f64; 3], to: [f64; 3]| {
            let ang = |p: [f64; 3]| (p[2] - arc.center[1]).atan2(p[0] - arc.center[0]);
            let (t0, mut t1) = (ang(from), ang(to));
            // take the short way round
            if t1 - t0 > PI {
                t1 -= 2.0 * PI;
            } else if t0 - t1 > PI {
                t1 += 2.0 * PI;
            }
            (0..per_piece)
                .map(|k| {
                    let t = t0 + (t1 - t0) * k as f64 / (per_piece - 1) as f64;
                    [arc.center[0] + arc.radius * t.cos(), 0.0, arc.center[1] + arc.radius * t.sin()]
                })
                .collect::<Vec<_>>()
        };
        out.extend(arc(&self.lower_arc, p1, p2));
        out.extend((0..per_piece).map(|k| {
            let s = k as f64 / (per_piece - 1) as f64;
            [p2[0] + s * (p3[0] - p2[0]), 0.0, p2[2] + s * (p3[2] - p2[2])]
        }));
        out.extend(arc(&self.upper_arc, p3, p4));
        out
    }

    /// Signed membership of `x` in the boosted cylinder's region of
    /// influence: `min_{y₃∈[a,b]} (dist((ϱ, x₃), (min(ϱ,c), cosh(ρ)y₃)) −
    /// |sinh(ρ)y₃|)` with `ϱ = √(x₁²+x₂²)`; `≤ 0` means inside. The function
    /// of `y₃` is convex and is minimised by golden-section search.
    pub fn influence_defect(&self, x: [f64; 3]) -> f64 {
        let rr = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (ch, sh) = (self.rho.cosh(), self.rho.sinh().abs());
        let dr = (rr - self.c).max(0.0);
        let f = |y3: f64| (dr * dr + (x[2] - ch * y3).powi(2)).sqrt() - sh * y3;
        golden_min(f, self.a, self.b, 1e-13).1
    }
}

/// Golden-section minimisation of a convex function on `[lo, hi]`;
/// returns `(argmin, min)`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    candidates.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty")
}

// ---------------------------------------------------------------------------
// Interval algebra on the (u, v) plane
// ---------------------------------------------------------------------------

/// One endpoint of an interval; infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub closed: bool,
}

impl Bound {
    pub fn closed(value: f64) -> Self {
        Bound { value, closed: value.is_finite() }
    }

    pub fn open(value: f64) -> Self {
        Bound { value, closed: false }
    }

    pub const NEG_INF: Bound = Bound { value: f64::NEG_INFINITY, closed: false };
    pub const POS_INF: Bound = Bound { value: f64::INFINITY, closed: false };
}

/// A (possibly empty, possibly unbounded) interval of ℝ with open/closed
/// endpoint flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: Bound { value: 1.0, closed: false }, hi: Bound { value: 0.0, closed: false } };
    pub const ALL: Interval = Interval { lo: Bound::NEG_INF, hi: Bound::POS_INF };

    pub fn new(lo: Bound, hi: Bound) -> Self {
        let fix = |b: Bound| Bound { value: b.value, closed: b.closed && b.value.is_finite() };
        let i = Interval { lo: fix(lo), hi: fix(hi) };
        if i.is_empty() {
            Interval::EMPTY
        } else {
            i
        }
    }

    pub fn closed(a: f64, b: f64) -> Self {
        Self::new(Bound::closed(a), Bound::closed(b))
    }

    pub fn open(a: f64, b: f64) -> Self {
        Self::new(Bound::open(a), Bound::open(b))
    }

    pub fn point(a: f64) -> Self {
        Self::closed(a, a)
    }

    /// `(−∞, b]` or `(−∞, b)`.
    pub fn at_most(b: f64, closed: bool) -> Self {
        Self::new(Bound::NEG_INF, Bound { value: b, closed })
    }

    /// `[a, ∞)` or `(a, ∞)`.
    pub fn at_least(a: f64, closed: bool) -> Self {
        Self::new(Bound { value: a, closed }, Bound::POS_INF)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.value > self.hi.value
            || (self.lo.value == self.hi.value && !(self.lo.closed && self.hi.closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo.value || (self.lo.closed && x == self.lo.value);
        let below = x < self.hi.value || (self.hi.closed && x == self.hi.value);
        above && below
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        let lo = match self.lo.value.partial_cmp(&o.lo.value) {
            Some(Ordering::Greater) => self.lo,
            Some(Ordering::Less) => o.lo,
            _ => Bound { value: self.lo.value, closed: self.lo.closed && o.lo.closed },
        };
        let hi = match self.hi.value.partial_cmp(&o.hi.value) {
            Some(Ordering::Less) => self.hi,
            Some(Ordering::Greater) => o.hi,
            _ => Bound { value: self.hi.value, closed: self.hi.closed && o.hi.closed },
        };
        Interval::new(lo, hi)
    }

    /// `{x : x > y for all y in self}`.
    pub fn strictly_above(&self) -> Interval {
        if self.is_empty() {
            return Interval::ALL;
        }
        if !self.hi.value.is_finite() {
            return Interval::EMPTY;
        }
        Interval::at_least(self.hi.value, !self.hi.closed)
    }

    /// `{x : x < y for all y in self}`.
    pub fn strictly_below(&self) -> Interval {
        if self.is_empty() {
            return Interval::ALL;
        }
        if !self.lo.value.is_finite() {
            return Interval::EMPTY;
        }
        Interval::at_most(self.lo.value, !self.lo.closed)
    }

    /// `{x : x ≥ y for all y in self}`.
    pub fn weakly_above(&self) -> Interval {
        if self.is_empty() {
            return Interval::ALL;
        }
        if !self.hi.value.is_finite() {
            return Interval::EMPTY;
        }
        Interval::at_least(self.hi.value, true)
    }

    /// `{x : x ≤ y for all y in self}`.
    pub fn weakly_below(&self) -> Interval {
        if self.is_empty() {
            return Interval::ALL;
        }
        if !self.lo.value.is_finite() {
            return Interval::EMPTY;
        }
        Interval::at_most(self.lo.value, true)
    }

    /// Attained maximum.
    pub fn max(&self) -> Option<f64> {
        (!self.is_empty() && self.hi.closed).then_some(self.hi.value)
    }

    /// Attained minimum.
    pub fn min(&self) -> Option<f64> {
        (!self.is_empty() && self.lo.closed).then_some(self.lo.value)
    }

    /// Image under `x ↦ scale·x + shift` with `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> Interval {
        debug_assert!(scale > 0.0);
        if self.is_empty() {
            return Interval::EMPTY;
        }
        let m = |b: Bound| Bound { value: scale * b.value + shift, closed: b.closed };
        Interval::new(m(self.lo), m(self.hi))
    }

    fn finite_endpoints(&self) -> impl Iterator<Item = f64> {
        [self.lo.value, self.hi.value].into_iter().filter(|x| x.is_finite())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        if self.lo.value == self.hi.value {
            return write!(f, "{{{}}}", self.lo.value);
        }
        let num = |x: f64| {
            if x == f64::INFINITY {
                "∞".to_string()
            } else if x == f64::NEG_INFINITY {
                "−∞".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(
            f,
            "{}{}, {}{}",
            if self.lo.closed { '[' } else { '(' },
            num(self.lo.value),
            num(self.hi.value),
            if self.hi.closed { ']' } else { ')' }
        )
    }
}

/// An axis-parallel rectangle `u ∈ I, v ∈ J` of the lightcone plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u: Interval,
    pub v: Interval,
}

impl Rect {
    pub fn new(u: Interval, v: Interval) -> Self {
        Rect { u, v }
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty() || self.v.is_empty()
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.contains(u) && self.v.contains(v)
    }

    pub fn intersect(&self, o: &Rect) -> Rect {
        Rect { u: self.u.intersect(&o.u), v: self.v.intersect(&o.v) }
    }

    /// Points spacelike to every point of the rectangle:
    /// `(above I × below J) ∪ (below I × above J)` with strict bounds.
    pub fn causal_complement(&self) -> Vec<Rect> {
        if self.is_empty() {
            return vec![Rect::new(Interval::ALL, Interval::ALL)];
        }
        vec![
            Rect::new(self.u.strictly_above(), self.v.strictly_below()),
            Rect::new(self.u.strictly_below(), self.v.strictly_above()),
        ]
    }

    /// Points distinct from and non-timelike to every point of the
    /// rectangle. Besides the weak quadrants, a point at an attained end of
    /// `I` must avoid `J` altogether.
    pub fn ntl_complement(&self) -> Vec<Rect> {
        if self.is_empty() {
            return vec![Rect::new(Interval::ALL, Interval::ALL)];
        }
        let mut out = vec![
            Rect::new(self.u.strictly_above(), self.v.weakly_below()),
            Rect::new(self.u.strictly_below(), self.v.weakly_above()),
        ];
        if let Some(m) = self.u.max() {
            out.push(Rect::new(Interval::point(m), self.v.strictly_below()));
        }
        if let Some(m) = self.u.min() {
            out.push(Rect::new(Interval::point(m), self.v.strictly_above()));
        }
        out
    }
}

/// Which orthocomplement a lattice operation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `⊥`: spacelike separation.
    Causal,
    /// `⊥′`: distinct and not timelike separated.
    NonTimelike,
}

/// Comparison used by the half-plane constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

fn half_line(cmp: Cmp, x: f64) -> Interval {
    match cmp {
        Cmp::Lt => Interval::at_most(x, false),
        Cmp::Le => Interval::at_most(x, true),
        Cmp::Gt => Interval::at_least(x, false),
        Cmp::Ge => Interval::at_least(x, true),
    }
}

/// A transverse-invariant region of ℝ⁴: a finite union of `(u, v)`
/// rectangles in canonical form (pairwise disjoint, maximally merged, so that
/// equal sets have equal representations).
#[derive(Debug, Clone, PartialEq)]
pub struct LightconeRegion {
    rects: Vec<Rect>,
}

/// Elementary pieces of ℝ cut at the sorted breakpoints, with a
/// representative point each.
fn pieces(breaks: &[f64]) -> Vec<(Interval, f64)> {
    if breaks.is_empty() {
        return vec![(Interval::ALL, 0.0)];
    }
    let mut out = Vec::with_capacity(2 * breaks.len() + 1);
    out.push((Interval::at_most(breaks[0], false), breaks[0] - 1.0));
    for (k, &b) in breaks.iter().enumerate() {
        out.push((Interval::point(b), b));
        match breaks.get(k + 1) {
            Some(&n) => out.push((Interval::open(b, n), 0.5 * (b + n))),
            None => out.push((Interval::at_least(b, false), b + 1.0)),
        }
    }
    out
}

fn sorted_breaks<'a>(it: impl Iterator<Item = &'a Interval>) -> Vec<f64> {
    let mut b: Vec<f64> = it.flat_map(|i| i.finite_endpoints()).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Merge a run of adjacent elementary pieces into one interval.
fn join_adjacent(first: &Interval, last: &Interval) -> Interval {
    Interval::new(first.lo, last.hi)
}

impl LightconeRegion {
    /// Canonical form of the union of the given rectangles.
    pub fn from_rects(rects: Vec<Rect>) -> Self {
        Self::from_predicate(&rects, |u, v| rects.iter().any(|r| r.contains(u, v)))
    }

    /// Canonical form of `{(u,v) : pred(u,v)}` where `pred` is constant on
    /// the cells cut by the endpoints of `rects`.
    fn from_predicate<F: Fn(f64, f64) -> bool>(rects: &[Rect], pred: F) -> Self {
        let live: Vec<&Rect> = rects.iter().filter(|r| !r.is_empty()).collect();
        let ub = sorted_breaks(live.iter().map(|r| &r.u));
        let vb = sorted_breaks(live.iter().map(|r| &r.v));
        let (up, vp) = (pieces(&ub), pieces(&vb));
        // column of each u-piece: maximal runs of v-pieces inside the set
        let columns: Vec<Vec<Interval>> = up
            .iter()
            .map(|(_, ru)| {
                let mut col = Vec::new();
                let mut run: Option<(Interval, Interval)> = None;
                for (iv, rv) in &vp {
                    if pred(*ru, *rv) {
                        run = Some(match run {
                            Some((first, _)) => (first, *iv),
                            None => (*iv, *iv),
                        });
                    } else if let Some((first, last)) = run.take() {
                        col.push(join_adjacent(&first, &last));
                    }
                }
                if let Some((first, last)) = run {
                    col.push(join_adjacent(&first, &last));
                }
                col
            })
            .collect();
        let mut rects = Vec::new();
        let mut k = 0;
        while k < up.len() {
            let mut j = k;
            while j + 1 < up.len() && columns[j + 1] == columns[k] {
                j += 1;
            }
            let u = join_adjacent(&up[k].0, &up[j].0);
            rects.extend(columns[k].iter().map(|v| Rect::new(u, *v)));
            k = j + 1;
        }
        LightconeRegion { rects }
    }

    pub fn empty() -> Self {
        LightconeRegion { rects: Vec::new() }
    }

    /// The whole plane.
    pub fn all() -> Self {
        Self::from_rects(vec![Rect::new(Interval::ALL, Interval::ALL)])
    }

    pub fn rect(u: Interval, v: Interval) -> Self {
        Self::from_rects(vec![Rect::new(u, v)])
    }

    /// The (transverse plane through the) event `(x₀, x₃)`.
    pub fn point(x0: f64, x3: f64) -> Self {
        Self::rect(Interval::point(x0 - x3), Interval::point(x0 + x3))
    }

    /// `h(cmp γ) = {x : x₀ − x₃ cmp γ}`.
    pub fn h(cmp: Cmp, gamma: f64) -> Self {
        Self::rect(half_line(cmp, gamma), Interval::ALL)
    }

    /// `k(cmp δ) = {x : x₀ + x₃ cmp δ}`.
    pub fn k(cmp: Cmp, delta: f64) -> Self {
        Self::rect(Interval::ALL, half_line(cmp, delta))
    }

    /// Canonical disjoint rectangles.
    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn contains_uv(&self, u: f64, v: f64) -> bool {
        self.rects.iter().any(|r| r.contains(u, v))
    }

    /// Membership of the event `(x₀, x₃)` (any transverse coordinates).
    pub fn contains(&self, x0: f64, x3: f64) -> bool {
        self.contains_uv(x0 - x3, x0 + x3)
    }

    pub fn union(&self, o: &Self) -> Self {
        Self::from_rects(self.rects.iter().chain(&o.rects).copied().collect())
    }

    pub fn intersection(&self, o: &Self) -> Self {
        let all: Vec<Rect> = self.rects.iter().chain(&o.rects).copied().collect();
        Self::from_predicate(&all, |u, v| self.contains_uv(u, v) && o.contains_uv(u, v))
    }

    pub fn difference(&self, o: &Self) -> Self {
        let all: Vec<Rect> = self.rects.iter().chain(&o.rects).copied().collect();
        Self::from_predicate(&all, |u, v| self.contains_uv(u, v) && !o.contains_uv(u, v))
    }

    /// Set-theoretic complement in the plane.
    pub fn set_complement(&self) -> Self {
        Self::from_predicate(&self.rects, |u, v| !self.contains_uv(u, v))
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.difference(o).is_empty()
    }

    fn complement_by(&self, per_rect: fn(&Rect) -> Vec<Rect>) -> Self {
        self.rects.iter().fold(Self::all(), |acc, r| acc.intersection(&Self::from_rects(per_rect(r))))
    }

    /// `R^⊥ = {x : (x − y)² < 0 for all y ∈ R}`.
    pub fn causal_complement(&self) -> Self {
        self.complement_by(Rect::causal_complement)
    }

    /// `R^⊥′ = {x : x ≠ y and (x − y)² ≤ 0 for all y ∈ R}`.
    pub fn ntl_complement(&self) -> Self {
        self.complement_by(Rect::ntl_complement)
    }

    pub fn complement(&self, rel: Relation) -> Self {
        match rel {
            Relation::Causal => self.causal_complement(),
            Relation::NonTimelike => self.ntl_complement(),
        }
    }

    /// `R^∧ = R^{⊥⊥}` (or `R^{⊥′⊥′}`).
    pub fn completion(&self, rel: Relation) -> Self {
        self.complement(rel).complement(rel)
    }

    pub fn is_complete(&self, rel: Relation) -> bool {
        self.completion(rel) == *self
    }

    /// Lattice meet of the completions: `R₁^∧ ∩ R₂^∧`.
    pub fn meet(&self, o: &Self, rel: Relation) -> Self {
        self.completion(rel).intersection(&o.completion(rel))
    }

    /// Lattice join: `(R₁ ∪ R₂)^∧`.
    pub fn join(&self, o: &Self, rel: Relation) -> Self {
        self.union(o).completion(rel)
    }
}

impl fmt::Display for LightconeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rects.is_empty() {
            return f.write_str("∅");
        }
        for (k, r) in self.rects.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "u∈{} × v∈{}", r.u, r.v)?;
        }
        Ok(())
    }
}

/// A flat piece `{x : x₀ = t, x₃ ∈ X}` of a non-timelike hyperplane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatBase {
    pub x0: f64,
    pub x3: Interval,
}

impl FlatBase {
    /// Flat base of a lightcone diamond `u ∈ [α, α′], v ∈ [δ′, δ]` (closed at
    /// `α` and `δ`): either the one-sided diamond `h(≥α) ∩ k(≤δ)`, with base
    /// `{x₀ = (δ+α)/2, x₃ ≤ (δ−α)/2}`, or a bounded diamond with
    /// `α + δ = α′ + δ′`.
    pub fn of_diamond(r: &Rect) -> Result<FlatBase> {
        let (u, v) = (r.u, r.v);
        if r.is_empty() || !u.lo.closed || !v.hi.closed {
            return Err(Error::DomainViolation("diamond must be closed at u = α and v = δ".into()));
        }
        let (alpha, delta) = (u.lo.value, v.hi.value);
        let x0 = 0.5 * (alpha + delta);
        let top = 0.5 * (delta - alpha);
        if u.hi.value == f64::INFINITY && v.lo.value == f64::NEG_INFINITY {
            return Ok(FlatBase { x0, x3: Interval::at_most(top, true) });
        }
        if u.hi.closed && v.lo.closed && alpha + delta == u.hi.value + v.lo.value {
            return Ok(FlatBase { x0, x3: Interval::closed(0.5 * (v.lo.value - u.hi.value), top) });
        }
        Err(Error::DomainViolation("diamond has no flat base".into()))
    }

    pub fn contains(&self, x0: f64, x3: f64) -> bool {
        x0 == self.x0 && self.x3.contains(x3)
    }

    /// `S^⊥′`. With `p = u − x₀(S)`, `q = v − x₀(S)`, the condition
    /// `(p + s)(q − s) ≤ 0` for all `s ∈ X` forces both roots `−p`, `q` to lie
    /// on one side of `X`; the points of `S` itself are removed.
    pub fn ntl_complement(&self) -> LightconeRegion {
        let c = self.x0;
        let x = self.x3;
        if x.is_empty() {
            return LightconeRegion::all();
        }
        let mut out = LightconeRegion::empty();
        if x.hi.value.is_finite() {
            let s = x.hi.value;
            let mut a = LightconeRegion::rect(Interval::at_most(c - s, true), Interval::at_least(c + s, true));
            if x.hi.closed {
                a = a.difference(&LightconeRegion::point(c, s));
            }
            out = out.union(&a);
        }
        if x.lo.value.is_finite() {
            let s = x.lo.value;
            let mut b = LightconeRegion::rect(Interval::at_least(c - s, true), Interval::at_most(c + s, true));
            if x.lo.closed {
                b = b.difference(&LightconeRegion::point(c, s));
            }
            out = out.union(&b);
        }
        out
    }

    /// `S^{⊥′⊥′}`.
    pub fn completion(&self) -> LightconeRegion {
        self.ntl_complement().ntl_complement()
    }
}

// ---------------------------------------------------------------------------
// Timelike lines
// ---------------------------------------------------------------------------

/// The timelike line `{(s, x + s v) : s ∈ ℝ}` with `|v| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelikeLine {
    pub x: [f64; 3],
    pub v: [f64; 3],
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

impl TimelikeLine {
    pub fn new(x: [f64; 3], v: [f64; 3]) -> Result<Self> {
        check_finite(&[x[0], x[1], x[2], v[0], v[1], v[2]], "line data")?;
        if !(norm(v) < 1.0) {
            return Err(Error::DomainViolation(format!("velocity |v| = {} is not below 1", norm(v))));
        }
        Ok(TimelikeLine { x, v })
    }

    /// Spatial position at time `s`.
    pub fn at(&self, s: f64) -> [f64; 3] {
        [self.x[0] + s * self.v[0], self.x[1] + s * self.v[1], self.x[2] + s * self.v[2]]
    }
}

/// Spacetime regions whose line sets are measured.
#[derive(Debug, Clone, PartialEq)]
pub enum DiamondRegion {
    /// `{x : |x₀ − c| + |x − a| ≤ r}` — the causal diamond spanned by the
    /// events `(c − r, a)` and `(c + r, a)`; `r = 0` is a single event.
    PointPair { c: f64, a: [f64; 3], r: f64 },
    /// A transverse-invariant region given by one lightcone rectangle.
    Lightcone(Rect),
}

/// Tolerance of the line hit search: a line hits a point-pair diamond iff
/// the minimum of the defect is `≤ HIT_TOL`, so tangent lines count as hits.
pub const HIT_TOL: f64 = 1e-10;

impl DiamondRegion {
    /// The diamond spanned by the events `(c − r, a)` and `(c + r, a)`.
    pub fn point_pair(c: f64, a: [f64; 3], r: f64) -> Result<Self> {
        check_finite(&[c, a[0], a[1], a[2], r], "diamond data")?;
        if r < 0.0 {
            return Err(Error::DomainViolation(format!("diamond radius {r} is negative")));
        }
        Ok(DiamondRegion::PointPair { c, a, r })
    }

    /// Membership of an event.
    pub fn contains(&self, x0: f64, x: [f64; 3]) -> bool {
        match self {
            DiamondRegion::PointPair { c, a, r } => {
                (x0 - c).abs() + norm([x[0] - a[0], x[1] - a[1], x[2] - a[2]]) <= *r
            }
            DiamondRegion::Lightcone(rect) => rect.contains(x0 - x[2], x0 + x[2]),
        }
    }

    /// Meet of two point-pair diamonds when the result is again one: the
    /// intersection of `J⁺(p₁) ∩ J⁻(q₁)` and `J⁺(p₂) ∩ J⁻(q₂)` is a diamond
    /// when the lower apexes are causally ordered, the upper apexes are too,
    /// and the resulting apexes share their spatial position. Returns
    /// `Ok(None)` when the intersection is empty.
    pub fn meet(&self, other: &Self) -> Result<Option<Self>> {
        let (DiamondRegion::PointPair { c: c1, a: a1, r: r1 }, DiamondRegion::PointPair { c: c2, a: a2, r: r2 }) =
            (self, other)
        else {
            return Err(Error::DomainViolation("meet is defined for point-pair diamonds".into()));
        };
        let future = |p: (f64, [f64; 3]), q: (f64, [f64; 3])| {
            // q ∈ J⁺(p)
            q.0 - p.0 >= norm([q.1[0] - p.1[0], q.1[1] - p.1[1], q.1[2] - p.1[2]])
        };
        let (p1, p2) = ((c1 - r1, *a1), (c2 - r2, *a2));
        let (q1, q2) = ((c1 + r1, *a1), (c2 + r2, *a2));
        let p = if future(p2, p1) {
            p1
        } else if future(p1, p2) {
            p2
        } else {
            return Err(Error::DomainViolation("lower apexes are not causally ordered".into()));
        };
        let q = if future(q1, q2) {
            q1
        } else if future(q2, q1) {
            q2
        } else {
            return Err(Error::DomainViolation("upper apexes are not causally ordered".into()));
        };
        if !future(p, q) {
            return Ok(None);
        }
        if p.1 != q.1 {
            return Err(Error::DomainViolation("meet is a tilted diamond".into()));
        }
        Ok(Some(DiamondRegion::PointPair { c: 0.5 * (p.0 + q.0), a: p.1, r: 0.5 * (q.0 - p.0) }))
    }
}

/// Whether the timelike line meets the region.
///
/// Point-pair diamonds: minimise the convex function
/// `s ↦ |s − c| + |x + s v − a| − r` by golden-section search to a bracket
/// width of `HIT_TOL`; hit iff the minimum is `≤ HIT_TOL`. Lightcone
/// rectangles: `u(s) = (1 − v₃)s − x₃` and `v(s) = (1 + v₃)s + x₃` are
/// increasing, so the line meets `I × J` iff the two parameter intervals
/// intersect (decided exactly, honouring open/closed flags).
pub fn line_hits(m: &DiamondRegion, l: &TimelikeLine) -> bool {
    match m {
        DiamondRegion::PointPair { c, a, r } => {
            let f = |s: f64| {
                let p = l.at(s);
                (s - c).abs() + norm([p[0] - a[0], p[1] - a[1], p[2] - a[2]]) - r
            };
            // f(s) ≥ (1 − |v|)|s − c| + f(c): the minimiser lies within
            // f(c)/(1 − |v|) of c
            let spread = (f(*c).abs() + 1.0) / (1.0 - norm(l.v));
            golden_min(f, c - spread, c + spread, HIT_TOL).1 <= HIT_TOL
        }
        DiamondRegion::Lightcone(rect) => {
            let v3 = l.v[2];
            let su = rect.u.affine(1.0 / (1.0 - v3), l.x[2] / (1.0 - v3));
            let sv = rect.v.affine(1.0 / (1.0 + v3), -l.x[2] / (1.0 + v3));
            !su.intersect(&sv).is_empty()
        }
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo measure of line sets
// ---------------------------------------------------------------------------

/// Sampling domain `x ∈ [−h, h]³`, `v ∈ O₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingBox {
    pub half_width: f64,
    /// Strata per position axis (the `x` box is cut into `k³` cells).
    pub strata_per_axis: usize,
}

impl SamplingBox {
    pub fn new(half_width: f64) -> Self {
        SamplingBox { half_width, strata_per_axis: 4 }
    }

    /// `λ⁶` of the whole sampling domain.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(3) * 4.0 * PI / 3.0
    }
}

/// Result of a Monte Carlo line-measure estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMeasure {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hits: u64,
}

impl LineMeasure {
    /// `(estimate − target)/stderr` (infinite if the error is zero and the
    /// estimate is off).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.estimate - target;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

/// Uniform sample of the open unit ball by rejection.
fn sample_velocity<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if norm(v) < 1.0 {
            return v;
        }
    }
}

/// Stratified Monte Carlo estimate of `λ⁶({ℓ : pred(ℓ)})` over the sampling
/// box. Each position stratum gets `n / k³` samples from its own ChaCha8
/// stream (seed, stream = stratum index), so results do not depend on the
/// thread schedule. The predicate's support must lie inside the box.
pub fn monte_carlo_line_measure<P>(pred: P, bx: SamplingBox, n: u64, seed: u64) -> Result<LineMeasure>
where
    P: Fn(&TimelikeLine) -> bool + Sync,
{
    let k = bx.strata_per_axis;
    let strata = (k * k * k) as u64;
    if !(bx.half_width > 0.0 && bx.half_width.is_finite()) || k == 0 {
        return Err(Error::DomainViolation("sampling box must be nonempty".into()));
    }
    if n < 2 * strata {
        return Err(Error::DomainViolation(format!("need at least {} samples", 2 * strata)));
    }
    let per = n / strata;
    let cell = 2.0 * bx.half_width / k as f64;
    let cell_volume = cell.powi(3) * 4.0 * PI / 3.0;
    let counts: Vec<u64> = (0..strata)
        .into_par_iter()
        .map(|h| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(h);
            let (i, j, l) = ((h as usize) / (k * k), (h as usize / k) % k, h as usize % k);
            let lo = [i, j, l].map(|q| -bx.half_width + q as f64 * cell);
            let mut hits = 0;
            for _ in 0..per {
                let x = [0, 1, 2].map(|a| lo[a] + cell * rng.gen::<f64>());
                let line = TimelikeLine { x, v: sample_velocity(&mut rng) };
                if pred(&line) {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    let mut estimate = 0.0;
    let mut var = 0.0;
    for &c in &counts {
        let p = c as f64 / per as f64;
        estimate += cell_volume * p;
        var += cell_volume * cell_volume * p * (1.0 - p) / per as f64;
    }
    Ok(LineMeasure { estimate, stderr: var.sqrt(), samples: per * strata, hits: counts.iter().sum() })
}
