//! Exact small-matrix machinery.
//!
//! Everything here works on fixed-size stack matrices ([`SmallMatrix`]) in
//! the Weyl (chiral) representation:
//!
//! ```text
//! β = [[0, I], [I, 0]],   α_k = diag(σ_k, −σ_k)
//! ```
//!
//! so that `α₃ = diag(1, −1, −1, 1)`. Four-vectors act on 2×2 matrices via
//! `k ↦ Σ_μ k_μ σ_μ` (σ₀ = I) and SL(2,ℂ) acts by `A·k ≅ A (Σ k_μσ_μ) A†`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance for Hermiticity checks (entrywise).
pub const HERMITIAN_TOL: f64 = 1e-14;
/// Tolerance for unitarity checks (entrywise on `M·M† − I`).
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance on `|det A − 1|` for SL(2,ℂ) inputs.
pub const UNIMODULAR_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A sign `±1`, used for energy signs η, chiralities χ and the late-change
/// orientation ς.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of a real number; zero counts as `Plus`.
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Which physical system a spinor object belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Four-component Dirac system of mass `m ≥ 0`.
    Dirac { mass: f64 },
    /// Two-component Weyl system of chirality χ.
    Weyl { chirality: Sign },
}

impl Kind {
    /// Number of spinor components.
    pub fn components(&self) -> usize {
        match self {
            Kind::Dirac { .. } => 4,
            Kind::Weyl { .. } => 2,
        }
    }
}

/// Dense `N×N` complex matrix on the stack.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMatrix<const N: usize> {
    pub m: [[C64; N]; N],
}

pub type Mat2 = SmallMatrix<2>;
pub type Mat4 = SmallMatrix<4>;

impl<const N: usize> fmt::Debug for SmallMatrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SmallMatrix<{N}> [")?;
        for row in &self.m {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<const N: usize> SmallMatrix<N> {
    pub const fn rows(&self) -> usize {
        N
    }

    pub const fn cols(&self) -> usize {
        N
    }

    pub fn zero() -> Self {
        Self { m: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for k in 0..N {
            out.m[k][k] = ONE;
        }
        out
    }

    pub fn from_rows(m: [[C64; N]; N]) -> Self {
        Self { m }
    }

    /// Diagonal matrix from its diagonal.
    pub fn diag(d: [C64; N]) -> Self {
        let mut out = Self::zero();
        for k in 0..N {
            out.m[k][k] = d[k];
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.m[k][k]).sum()
    }

    /// Largest entry modulus. Cheap and adequate for residual checks.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to another matrix.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).frobenius()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= HERMITIAN_TOL
    }

    pub fn hermitian_residual(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_residual() <= UNITARY_TOL
    }

    /// `max |(M M† − I)_{ij}|`.
    pub fn unitary_residual(&self) -> f64 {
        (*self * self.adjoint() - Self::identity()).max_abs()
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            let mut acc = ZERO;
            for j in 0..N {
                acc += self.m[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Matrix–vector product on a slice (length `N`), writing into `out`.
    #[inline]
    pub fn apply_slice(&self, v: &[C64], out: &mut [C64]) {
        debug_assert!(v.len() == N && out.len() == N);
        for i in 0..N {
            let mut acc = ZERO;
            for j in 0..N {
                acc += self.m[i][j] * v[j];
            }
            out[i] = acc;
        }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.m;
        let mut det = ONE;
        for col in 0..N {
            let piv = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[piv][col].norm() == 0.0 {
                return ZERO;
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..N {
                let f = a[r][col] / a[col][col];
                for c in col..N {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
        det
    }
}

impl<const N: usize> Index<(usize, usize)> for SmallMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.m[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for SmallMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.m[i][j]
    }
}

impl<const N: usize> Add for SmallMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for SmallMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Neg for SmallMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Mul for SmallMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.m[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.m[i][j] += a * rhs.m[k][j];
                }
            }
        }
        out
    }
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    /// Closed-form inverse; the caller guarantees invertibility.
    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        Mat2::new(d / det, -b / det, -c / det, a / det)
    }

    /// Block-diagonal 4×4 matrix `diag(a, b)`.
    pub fn block_diag(a: &Mat2, b: &Mat2) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = a.m[i][j];
                out.m[i + 2][j + 2] = b.m[i][j];
            }
        }
        out
    }
}

/// Pauli matrix σ_k for `k ∈ {0,1,2,3}`; σ₀ is the identity.
pub fn sigma(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("sigma index {k} out of range"),
    }
}

/// `Σ_{k=1}^3 v_k σ_k`.
pub fn sigma_dot(v: [f64; 3]) -> Mat2 {
    Mat2::new(
        C64::new(v[2], 0.0),
        C64::new(v[0], -v[1]),
        C64::new(v[0], v[1]),
        C64::new(-v[2], 0.0),
    )
}

/// Dirac α_k (k = 1,2,3) in the Weyl representation.
pub fn alpha(k: usize) -> Mat4 {
    assert!((1..=3).contains(&k), "alpha index {k} out of range");
    let s = sigma(k);
    Mat2::block_diag(&s, &(-s))
}

/// Dirac β in the Weyl representation.
pub fn beta() -> Mat4 {
    let mut out = Mat4::zero();
    out.m[0][2] = ONE;
    out.m[1][3] = ONE;
    out.m[2][0] = ONE;
    out.m[3][1] = ONE;
    out
}

pub fn norm3(p: [f64; 3]) -> f64 {
    // hypot-style evaluation keeps tiny and huge momenta finite
    let s = p[0].abs().max(p[1].abs()).max(p[2].abs());
    if s == 0.0 {
        return 0.0;
    }
    let (a, b, c) = (p[0] / s, p[1] / s, p[2] / s);
    s * (a * a + b * b + c * c).sqrt()
}

/// Relativistic energy `ε(p) = √(|p|² + m²)`.
pub fn energy(p: [f64; 3], m: f64) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m).sqrt()
}

/// Dirac Hamiltonian `h(p) = Σ α_k p_k + β m`.
pub fn dirac_hamiltonian(p: [f64; 3], m: f64) -> Mat4 {
    let s = sigma_dot(p);
    let mut h = Mat2::block_diag(&s, &(-s));
    let mc = C64::new(m, 0.0);
    h.m[0][2] = mc;
    h.m[1][3] = mc;
    h.m[2][0] = mc;
    h.m[3][1] = mc;
    h
}

/// Weyl Hamiltonian `h^χ(p) = χ σ·p`.
pub fn weyl_hamiltonian(p: [f64; 3], chi: Sign) -> Mat2 {
    sigma_dot(p).scale_re(chi.value())
}

/// Dirac energy projector `π^η(p) = ½(I + (η/ε) h(p))`.
pub fn dirac_energy_projector(p: [f64; 3], m: f64, eta: Sign) -> Result<Mat4> {
    let eps = energy(p, m);
    if eps == 0.0 {
        return Err(Error::ZeroMomentumMassless);
    }
    let h = dirac_hamiltonian(p, m);
    Ok((Mat4::identity() + h.scale_re(eta.value() / eps)).scale_re(0.5))
}

/// Weyl energy projector `π^{χη}(p) = ½(I + (η/|p|) h^χ(p))`.
pub fn weyl_energy_projector(p: [f64; 3], chi: Sign, eta: Sign) -> Result<Mat2> {
    let n = norm3(p);
    if n == 0.0 {
        return Err(Error::ZeroMomentumMassless);
    }
    let h = weyl_hamiltonian(p, chi);
    Ok((Mat2::identity() + h.scale_re(eta.value() / n)).scale_re(0.5))
}

/// Helicity-type projector `π₀(p) = ½(I₄ + α·p/|p|)` used by the
/// point-localization construction.
pub fn helicity_projector(p: [f64; 3]) -> Result<Mat4> {
    let n = norm3(p);
    if n == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let s = sigma_dot([p[0] / n, p[1] / n, p[2] / n]);
    let a = Mat2::block_diag(&s, &(-s));
    Ok((Mat4::identity() + a).scale_re(0.5))
}

/// Either a 2×2 or a 4×4 matrix, for kind-dispatched operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinorMatrix {
    Two(Mat2),
    Four(Mat4),
}

impl SpinorMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SpinorMatrix::Two(_) => 2,
            SpinorMatrix::Four(_) => 4,
        }
    }

    /// Row-major entries.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match self {
            SpinorMatrix::Two(m) => m.m[i][j],
            SpinorMatrix::Four(m) => m.m[i][j],
        }
    }

    /// Apply to a spinor stored in a slice of matching length.
    #[inline]
    pub fn apply_slice(&self, v: &[C64], out: &mut [C64]) {
        match self {
            SpinorMatrix::Two(m) => m.apply_slice(v, out),
            SpinorMatrix::Four(m) => m.apply_slice(v, out),
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self {
            SpinorMatrix::Two(m) => m.is_unitary(),
            SpinorMatrix::Four(m) => m.is_unitary(),
        }
    }
}

/// Energy projector for either system. For Dirac the mass is taken from the
/// kind; for Weyl `m` is ignored.
pub fn energy_projector(p: [f64; 3], eta: Sign, kind: Kind) -> Result<SpinorMatrix> {
    match kind {
        Kind::Dirac { mass } => dirac_energy_projector(p, mass, eta).map(SpinorMatrix::Four),
        Kind::Weyl { chirality } => {
            weyl_energy_projector(p, chirality, eta).map(SpinorMatrix::Two)
        }
    }
}

/// A real four-vector `(x₀, x₁, x₂, x₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl FourVector {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn from_parts(x0: f64, x: [f64; 3]) -> Self {
        Self::new(x0, x[0], x[1], x[2])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// Minkowski product `a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃`.
    pub fn dot(&self, o: &FourVector) -> f64 {
        self.x0 * o.x0 - self.x1 * o.x1 - self.x2 * o.x2 - self.x3 * o.x3
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// On-shell momentum `𝔭^η = (η ε(p), p)`.
    pub fn on_shell(p: [f64; 3], m: f64, eta: Sign) -> Self {
        Self::from_parts(eta.value() * energy(p, m), p)
    }

    /// `Σ_μ k_μ σ_μ`.
    pub fn to_hermitian(&self) -> Mat2 {
        sigma_dot(self.spatial()) + Mat2::identity().scale_re(self.x0)
    }

    /// Inverse of [`FourVector::to_hermitian`]: `k_μ = ½ tr(M σ_μ)`.
    pub fn from_hermitian(m: &Mat2) -> Self {
        let c = |k: usize| 0.5 * (*m * sigma(k)).trace().re;
        Self::new(c(0), c(1), c(2), c(3))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.x0, s * self.x1, s * self.x2, s * self.x3)
    }
}

/// SL(2,ℂ) action on four-vectors: `A·k ≅ A (Σ k_μ σ_μ) A†`.
pub fn act(a: &Mat2, k: &FourVector) -> FourVector {
    FourVector::from_hermitian(&(*a * k.to_hermitian() * a.adjoint()))
}

/// Boost along `e₃` with rapidity ρ: `A_ρ = diag(e^{ρ/2}, e^{−ρ/2})`.
pub fn boost_matrix_e3(rho: f64) -> Mat2 {
    Mat2::diag([
        C64::new((0.5 * rho).exp(), 0.0),
        C64::new((-0.5 * rho).exp(), 0.0),
    ])
}

/// Canonical cross section `Q(k)` with `Q(k)·(ηm,0,0,0) = k`.
pub fn canonical_cross_section(k: &FourVector) -> Result<Mat2> {
    let kk = k.square();
    if !(kk > 0.0) {
        return Err(Error::NotTimelike(kk));
    }
    let m = kk.sqrt();
    let eta = Sign::of(k.x0).value();
    let pref = (m / (2.0 * (m + k.x0.abs()))).sqrt();
    Ok((Mat2::identity() + k.to_hermitian().scale_re(eta / m)).scale_re(pref))
}

/// Helicity cross section `B(p) ∈ SU(2)` with `|p| B(p)·e₃ = p`.
///
/// On the negative `e₃` axis the phase `b` is fixed to 1, which gives
/// `B = −iσ₂` there.
pub fn helicity_cross_section(p: [f64; 3]) -> Result<Mat2> {
    let n = norm3(p);
    if n == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let ap = ((n + p[2]) / (2.0 * n)).max(0.0).sqrt();
    let am = ((n - p[2]) / (2.0 * n)).max(0.0).sqrt();
    let t = p[0].hypot(p[1]);
    let b = if t > 0.0 {
        C64::new(p[0] / t, p[1] / t)
    } else {
        ONE
    };
    Ok(Mat2::new(
        C64::new(ap, 0.0),
        -b.conj() * am,
        b * am,
        C64::new(ap, 0.0),
    ))
}

/// Rotation of a 3-vector by an SU(2) element.
pub fn rotate(b: &Mat2, x: [f64; 3]) -> [f64; 3] {
    act(b, &FourVector::from_parts(0.0, x)).spatial()
}

/// Massive Wigner rotation `R(𝔭^η, A_ρ)` for a boost along `e₃`, closed form.
pub fn wigner_rotation_massive(p: [f64; 3], m: f64, eta: Sign, rho: f64) -> Mat2 {
    let eps = energy(p, m);
    let e = eta.value();
    let (al, be) = (rho.cosh(), rho.sinh());
    let (ga, de) = ((0.5 * rho).cosh(), (0.5 * rho).sinh());
    let d = (m + eps) * (m + al * eps - be * e * p[2]);
    let diag = C64::new(ga * (m + eps) - de * e * p[2], 0.0);
    let off = C64::new(de * e * p[0], -de * e * p[1]);
    Mat2::new(diag, off, -off.conj(), diag).scale_re(1.0 / d.sqrt())
}

/// Massive Wigner rotation from its definition `Q(k)⁻¹ A Q(A⁻¹·k)` for a
/// general `A ∈ SL(2,ℂ)`.
pub fn wigner_rotation_definition(k: &FourVector, a: &Mat2) -> Result<Mat2> {
    let q = act(&a.inverse(), k);
    Ok(canonical_cross_section(k)?.inverse() * *a * canonical_cross_section(&q)?)
}

/// Polar decomposition `A = B′ A_ρ B` with `B′, B ∈ SU(2)` and `ρ ≥ 0`.
///
/// Returns `(B′, ρ, B)`. For `ρ` below ~1e-12 the factorisation is returned
/// as `(A, 0, I)`.
pub fn polar_decomposition(a: &Mat2) -> (Mat2, f64, Mat2) {
    let h = a.adjoint() * *a; // positive Hermitian, det 1
    let p = h.m[0][0].re;
    let q = h.m[1][1].re;
    let c = h.m[0][1];
    let half_tr = 0.5 * (p + q);
    let disc = (0.25 * (p - q) * (p - q) + c.norm_sqr()).sqrt();
    let lmax = half_tr + disc; // = e^{ρ}
    let rho = lmax.ln();
    if !(rho > 1e-12) {
        return (*a, 0.0, Mat2::identity());
    }
    // eigenvector of h for lmax; pick the better-conditioned formula
    let (v1, v2) = if (lmax - q).abs() >= (lmax - p).abs() {
        (C64::new(lmax - q, 0.0), c.conj())
    } else {
        (c, C64::new(lmax - p, 0.0))
    };
    let nv = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
    let (v1, v2) = (v1 / nv, v2 / nv);
    // V = [[v1, -v̄2], [v2, v̄1]] ∈ SU(2), first column the e^ρ eigenvector
    let v = Mat2::new(v1, -v2.conj(), v2, v1.conj());
    let half = boost_matrix_e3(rho);
    let pos = v * half * v.adjoint();
    let u = *a * pos.inverse();
    (u * v, rho, v.adjoint())
}

/// Massless Wigner rotation `R₀(𝔭, A) = B′ B(B′⁻¹·p) B(B·q)⁻¹ B`,
/// `q = A⁻¹·𝔭`, from the polar decomposition of `A`.
pub fn wigner_rotation_massless(p: &FourVector, a: &Mat2) -> Result<Mat2> {
    check_unimodular(a)?;
    let pp = p.square();
    let scale = p.x0.abs().max(norm3(p.spatial()));
    if scale == 0.0 {
        return Err(Error::NotLightlike(pp));
    }
    if pp.abs() > 1e-10 * scale * scale {
        return Err(Error::NotLightlike(pp));
    }
    let (bp, rho, b) = polar_decomposition(a);
    if rho == 0.0 {
        return Ok(*a);
    }
    let q = act(&a.inverse(), p);
    let bp_inv_p = rotate(&bp.adjoint(), p.spatial());
    let b_q = rotate(&b, q.spatial());
    Ok(bp * helicity_cross_section(bp_inv_p)? * helicity_cross_section(b_q)?.adjoint() * b)
}

/// Closed form of `R₀(𝔭, A_ρ)` for a boost along `e₃`.
pub fn wigner_rotation_massless_e3(p: [f64; 3], eta: Sign, rho: f64) -> Result<Mat2> {
    let n = norm3(p);
    if n == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let e = eta.value();
    let (al, be) = (rho.cosh(), rho.sinh());
    let (ga, de) = ((0.5 * rho).cosh(), (0.5 * rho).sinh());
    let d = n * (al * n - be * e * p[2]);
    let diag = C64::new(ga * n - de * e * p[2], 0.0);
    let off = C64::new(de * e * p[0], -de * e * p[1]);
    Ok(Mat2::new(diag, off, -off.conj(), diag).scale_re(1.0 / d.sqrt()))
}

fn check_unimodular(a: &Mat2) -> Result<()> {
    let det = a.det();
    if (det - ONE).norm() > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular(det));
    }
    Ok(())
}

/// Dirac spinor representation `s(A) = diag(A, (A†)⁻¹)`.
pub fn dirac_spinor_rep(a: &Mat2) -> Result<Mat4> {
    check_unimodular(a)?;
    Ok(Mat2::block_diag(a, &a.adjoint().inverse()))
}

/// Weyl spinor representation `s⁺(A) = A`, `s⁻(A) = (A†)⁻¹`.
pub fn weyl_spinor_rep(a: &Mat2, chi: Sign) -> Result<Mat2> {
    check_unimodular(a)?;
    Ok(match chi {
        Sign::Plus => *a,
        Sign::Minus => a.adjoint().inverse(),
    })
}

/// Boost spinor representation for either kind.
pub fn boost_spinor_rep(a: &Mat2, kind: Kind) -> Result<SpinorMatrix> {
    match kind {
        Kind::Dirac { .. } => dirac_spinor_rep(a).map(SpinorMatrix::Four),
        Kind::Weyl { chirality } => weyl_spinor_rep(a, chirality).map(SpinorMatrix::Two),
    }
}

/// Time-reversal matrix: `ω = −diag(σ₂, σ₂)` (Dirac) or `−σ₂` (Weyl).
/// The antiunitary operator is `ψ ↦ ω ψ̄`.
pub fn time_reversal_matrix(kind: Kind) -> SpinorMatrix {
    let s2 = -sigma(2);
    match kind {
        Kind::Dirac { .. } => SpinorMatrix::Four(Mat2::block_diag(&s2, &s2)),
        Kind::Weyl { .. } => SpinorMatrix::Two(s2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_p(rng: &mut ChaCha8Rng, s: f64) -> [f64; 3] {
        [
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
        ]
    }

    fn rand_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
        let mut z = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let m = Mat2::new(z(), z(), z(), z());
        let d = m.det().sqrt();
        m.scale(d.inv())
    }

    #[test]
    fn hamiltonian_rest_frame_is_beta() {
        let h = dirac_hamiltonian([0.0; 3], 1.0);
        assert_eq!(h, beta());
        let h = dirac_hamiltonian([0.0, 0.0, 1.0], 0.0);
        assert_eq!(h, alpha(3));
    }

    #[test]
    fn hamiltonian_squares_to_energy() {
        let h = dirac_hamiltonian([3.0, 4.0, 0.0], 0.0);
        let d = (h * h - Mat4::identity().scale_re(25.0)).max_abs();
        assert!(d < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = rand_p(&mut rng, 5.0);
            let m = rng.gen_range(0.0..3.0);
            let h = dirac_hamiltonian(p, m);
            assert!(h.is_hermitian());
            let e2 = energy(p, m).powi(2);
            assert!((h * h - Mat4::identity().scale_re(e2)).max_abs() < 1e-12 * e2.max(1.0));
            let w = weyl_hamiltonian(p, Sign::Minus);
            let n2 = norm3(p).powi(2);
            assert!((w * w - Mat2::identity().scale_re(n2)).max_abs() < 1e-12 * n2.max(1.0));
        }
    }

    #[test]
    fn weyl_hamiltonian_chirality() {
        assert_eq!(weyl_hamiltonian([0.0, 0.0, 1.0], Sign::Plus), sigma(3));
        assert_eq!(weyl_hamiltonian([0.0, 0.0, 1.0], Sign::Minus), -sigma(3));
    }

    #[test]
    fn rest_projector() {
        let p = dirac_energy_projector([0.0; 3], 1.0, Sign::Plus).unwrap();
        let want = (Mat4::identity() + beta()).scale_re(0.5);
        assert!(p.dist(&want) < 1e-15);
        assert_eq!(
            dirac_energy_projector([0.0; 3], 0.0, Sign::Plus),
            Err(Error::ZeroMomentumMassless)
        );
        assert_eq!(
            weyl_energy_projector([0.0; 3], Sign::Plus, Sign::Plus),
            Err(Error::ZeroMomentumMassless)
        );
    }

    #[test]
    fn projector_algebra_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = rand_p(&mut rng, 10.0);
            let m = rng.gen_range(0.0..3.0);
            let pp = dirac_energy_projector(p, m, Sign::Plus).unwrap();
            let pm = dirac_energy_projector(p, m, Sign::Minus).unwrap();
            assert!((pp + pm - Mat4::identity()).max_abs() <= 1e-13);
            assert!((pp * pm).max_abs() <= 1e-13);
            assert!((pp * pp - pp).max_abs() <= 1e-14);
            let eps = energy(p, m);
            let h = dirac_hamiltonian(p, m);
            assert!((h * pp - pp.scale_re(eps)).max_abs() <= 1e-12 * eps);
            assert!((h * pm + pm.scale_re(eps)).max_abs() <= 1e-12 * eps);
        }
    }

    #[test]
    fn helicity_projector_is_projector() {
        let q = helicity_projector([0.3, -1.0, 2.0]).unwrap();
        assert!((q * q - q).max_abs() < 1e-14);
        assert!(q.is_hermitian());
    }

    #[test]
    fn canonical_cross_section_properties() {
        let q = canonical_cross_section(&FourVector::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(q.dist(&Mat2::identity()) < 1e-15);
        assert!(matches!(
            canonical_cross_section(&FourVector::new(1.0, 1.0, 0.0, 0.0)),
            Err(Error::NotTimelike(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = rand_p(&mut rng, 4.0);
            let m = rng.gen_range(0.1..2.0);
            let kp = FourVector::on_shell(p, m, Sign::Plus);
            let km = FourVector::on_shell(p, m, Sign::Minus);
            let qp = canonical_cross_section(&kp).unwrap();
            let qm = canonical_cross_section(&km).unwrap();
            assert!((qp * qm - Mat2::identity()).max_abs() < 1e-13);
            assert!(qp.hermitian_residual() < 1e-14);
            // Q(k)² = (η/m) Σ k_j σ_j
            for (k, q, eta) in [(kp, qp, 1.0), (km, qm, -1.0)] {
                let want = k.to_hermitian().scale_re(eta / m);
                let got = q * q;
                assert!(got.dist(&want) < 1e-13 * want.frobenius().max(1.0));
                // Q(k)·(ηm,0,0,0) = k
                let rest = FourVector::new(eta * m, 0.0, 0.0, 0.0);
                let img = act(&q, &rest);
                assert!((img.x0 - k.x0).abs() < 1e-12 * k.x0.abs().max(1.0));
                assert!((img.x3 - k.x3).abs() < 1e-12 * k.x0.abs().max(1.0));
            }
        }
    }

    #[test]
    fn helicity_cross_section_properties() {
        let b = helicity_cross_section([0.0, 0.0, 2.5]).unwrap();
        assert!(b.dist(&Mat2::identity()) < 1e-15);
        let b = helicity_cross_section([0.0, 0.0, -1.0]).unwrap();
        assert!(b.dist(&sigma(2).scale(-I)) < 1e-15);
        assert_eq!(helicity_cross_section([0.0; 3]), Err(Error::ZeroMomentum));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let p = rand_p(&mut rng, 3.0);
            let n = norm3(p);
            let u = [p[0] / n, p[1] / n, p[2] / n];
            let b = helicity_cross_section(p).unwrap();
            assert!(b.unitary_residual() < 1e-12);
            assert!((b.det() - ONE).norm() < 1e-12);
            let lhs = b * sigma(3) * b.inverse();
            assert!(lhs.dist(&sigma_dot(u)) < 1e-13);
            let img = rotate(&b, [0.0, 0.0, n]);
            for k in 0..3 {
                assert!((img[k] - p[k]).abs() < 1e-12 * n.max(1.0));
            }
            let b2 = helicity_cross_section([7.0 * p[0], 7.0 * p[1], 7.0 * p[2]]).unwrap();
            assert!(b2.dist(&b) < 1e-14);
        }
    }

    #[test]
    fn massive_rotation_identity_and_axis() {
        let r = wigner_rotation_massive([0.3, 0.2, -1.0], 1.0, Sign::Plus, 0.0);
        assert!(r.dist(&Mat2::identity()) < 1e-15);
        let r = wigner_rotation_massive([0.0, 0.0, 0.7], 1.0, Sign::Minus, 1.3);
        assert!(r.m[0][1].norm() == 0.0 && r.m[1][0].norm() == 0.0);
        assert!(r.m[0][0].im == 0.0 && r.m[1][1].im == 0.0);
        assert!(r.dist(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn massive_rotation_closed_form_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let p = rand_p(&mut rng, 3.0);
            let m = rng.gen_range(0.2..2.0);
            let rho = rng.gen_range(-2.0..2.0);
            for eta in [Sign::Plus, Sign::Minus] {
                let cf = wigner_rotation_massive(p, m, eta, rho);
                assert!(cf.unitary_residual() < 1e-13);
                let k = FourVector::on_shell(p, m, eta);
                let def = wigner_rotation_definition(&k, &boost_matrix_e3(rho)).unwrap();
                assert!(cf.dist(&def) < 1e-11, "eta {eta} rho {rho}: {cf:?} vs {def:?}");
            }
        }
    }

    #[test]
    fn massless_rotation_examples() {
        // boost along the momentum: identity
        let p = FourVector::new(1.0, 0.0, 0.0, 1.0);
        let r = wigner_rotation_massless(&p, &boost_matrix_e3(0.8)).unwrap();
        assert!(r.dist(&Mat2::identity()) < 1e-13);
        // SU(2) input is returned unchanged
        let b = helicity_cross_section([0.3, -0.4, 0.5]).unwrap();
        let r = wigner_rotation_massless(&FourVector::new(-2.0, 0.0, 2.0, 0.0), &b).unwrap();
        assert!(r.dist(&b) < 1e-14);
        assert!(matches!(
            wigner_rotation_massless(&FourVector::new(1.0, 0.5, 0.0, 0.0), &b),
            Err(Error::NotLightlike(_))
        ));
        let notsl = Mat2::identity().scale_re(2.0);
        assert!(matches!(
            wigner_rotation_massless(&p, &notsl),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn massless_rotation_definition_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..300 {
            let p = rand_p(&mut rng, 3.0);
            let rho = rng.gen_range(-2.5..2.5);
            for eta in [Sign::Plus, Sign::Minus] {
                let k = FourVector::on_shell(p, 0.0, eta);
                let def = wigner_rotation_massless(&k, &boost_matrix_e3(rho)).unwrap();
                let cf = wigner_rotation_massless_e3(p, eta, rho).unwrap();
                assert!(def.dist(&cf) < 1e-11, "{def:?} vs {cf:?}");
            }
        }
    }

    #[test]
    fn massless_rotation_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let p3 = rand_p(&mut rng, 3.0);
            let eta = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let p = FourVector::on_shell(p3, 0.0, eta);
            let a = rand_sl2(&mut rng);
            let a2 = rand_sl2(&mut rng);
            let r = wigner_rotation_massless(&p, &a).unwrap();
            assert!(r.unitary_residual() < 1e-12);
            for lam in [2.0, 10.0] {
                let rl = wigner_rotation_massless(&p.scaled(lam), &a).unwrap();
                assert!(rl.dist(&r) < 1e-12);
            }
            // R₀(𝔭,A)·q = (|q|/|p|) p
            let q = act(&a.inverse(), &p);
            let rq = rotate(&r, q.spatial());
            let f = norm3(q.spatial()) / norm3(p3);
            for k in 0..3 {
                assert!((rq[k] - f * p3[k]).abs() < 1e-9 * (1.0 + f * norm3(p3)));
            }
            // cocycle
            let lhs = r * wigner_rotation_massless(&q, &a2).unwrap();
            let rhs = wigner_rotation_massless(&p, &(a * a2)).unwrap();
            assert!(lhs.dist(&rhs) < 1e-12 * 10.0, "{}", lhs.dist(&rhs));
        }
    }

    #[test]
    fn massless_limit_of_massive_rotation() {
        let p = [0.4, -0.7, 1.1];
        let rho = 1.2;
        for eta in [Sign::Plus, Sign::Minus] {
            let r0 = wigner_rotation_massless_e3(p, eta, rho).unwrap();
            let d3 = wigner_rotation_massive(p, 1e-3, eta, rho).dist(&r0);
            let d6 = wigner_rotation_massive(p, 1e-6, eta, rho).dist(&r0);
            assert!(d6 < d3 && d6 < 1e-5, "{d3} {d6}");
        }
    }

    #[test]
    fn spinor_reps() {
        let s = dirac_spinor_rep(&Mat2::identity()).unwrap();
        assert_eq!(s, Mat4::identity());
        let rho = 0.9_f64;
        let s = dirac_spinor_rep(&boost_matrix_e3(rho)).unwrap();
        let (a, b) = ((0.5 * rho).exp(), (-0.5 * rho).exp());
        let want = Mat4::diag([a, b, b, a].map(|x| C64::new(x, 0.0)));
        assert!(s.dist(&want) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a = rand_sl2(&mut rng);
            let b = rand_sl2(&mut rng);
            let lhs = dirac_spinor_rep(&a).unwrap() * dirac_spinor_rep(&b).unwrap();
            let rhs = dirac_spinor_rep(&(a * b)).unwrap();
            assert!(lhs.dist(&rhs) < 1e-11 * lhs.frobenius());
            for chi in [Sign::Plus, Sign::Minus] {
                let lhs = weyl_spinor_rep(&a, chi).unwrap() * weyl_spinor_rep(&b, chi).unwrap();
                let rhs = weyl_spinor_rep(&(a * b), chi).unwrap();
                assert!(lhs.dist(&rhs) < 1e-11 * lhs.frobenius());
            }
        }
        let u = helicity_cross_section([1.0, 2.0, -0.5]).unwrap();
        assert!(boost_spinor_rep(&u, Kind::Dirac { mass: 1.0 }).unwrap().is_unitary());
        assert!(matches!(
            dirac_spinor_rep(&Mat2::identity().scale_re(1.5)),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn time_reversal() {
        let SpinorMatrix::Four(w) = time_reversal_matrix(Kind::Dirac { mass: 1.0 }) else {
            unreachable!()
        };
        let s2 = -sigma(2);
        assert_eq!(w, Mat2::block_diag(&s2, &s2));
        // 𝒯² = ω ω̄ = −I, while the plain matrix square is +I
        assert!((w * w.conj() + Mat4::identity()).max_abs() < 1e-15);
        assert!((w * w - Mat4::identity()).max_abs() < 1e-15);
        assert!(w.is_unitary());
        // ω = −i α₁ α₃
        let alt = (alpha(1) * alpha(3)).scale(-I);
        assert!(w.dist(&alt) < 1e-15);
        let SpinorMatrix::Two(w2) = time_reversal_matrix(Kind::Weyl { chirality: Sign::Plus })
        else {
            unreachable!()
        };
        assert_eq!(w2, s2);
        // conj(h(−p)) = ω h(p) ω  (relation behind time-reversal covariance)
        let p = [0.3, -0.2, 0.9];
        let lhs = dirac_hamiltonian([-p[0], -p[1], -p[2]], 0.7).conj();
        let rhs = w * dirac_hamiltonian(p, 0.7) * w;
        assert!(lhs.dist(&rhs) < 1e-14);
    }

    #[test]
    fn polar_decomposition_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a = rand_sl2(&mut rng);
            let (bp, rho, b) = polar_decomposition(&a);
            assert!(bp.unitary_residual() < 1e-12 && b.unitary_residual() < 1e-12);
            assert!(rho >= 0.0);
            let back = bp * boost_matrix_e3(rho) * b;
            assert!(back.dist(&a) < 1e-11 * a.frobenius());
        }
    }
}
