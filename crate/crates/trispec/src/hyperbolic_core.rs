//! Hyperbolic plane primitives.
//!
//! Group elements are unit-determinant real 2×2 matrices acting on the upper
//! half-plane `H`. Boundary bookkeeping happens in the Poincaré disk `D`,
//! reached through the Cayley transform `z ↦ (z − i)/(z + i)`, which sends the
//! base vertex `A0 = i` to the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;

/// Tolerance used to decide that an isometry is hyperbolic: `|tr| > 2 + HYPERBOLIC_TOL`.
pub const HYPERBOLIC_TOL: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TripletError {
    #[error("unsupported triplet: p ≥ 3 required (got p = {0})")]
    Unsupported(u32),
    #[error("triplet must satisfy p ≤ q ≤ r (got ({0}, {1}, {2}))")]
    Order(u32, u32, u32),
    #[error("not hyperbolic: 1/p + 1/q + 1/r < 1 fails, 1/{0} + 1/{1} + 1/{2} = {3:.6}")]
    NotHyperbolic(u32, u32, u32, f64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("no axis: isometry is not hyperbolic (|trace| = {0})")]
    NoAxis(String),
    #[error("degenerate geodesic: endpoints coincide")]
    DegenerateGeodesic,
}

/// A hyperbolic triplet `3 ≤ p ≤ q ≤ r` with `1/p + 1/q + 1/r < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub p: u32,
    pub q: u32,
    pub r: u32,
}

impl Triplet {
    pub fn new(p: u32, q: u32, r: u32) -> Result<Self, TripletError> {
        if p < 3 {
            return Err(TripletError::Unsupported(p));
        }
        if !(p <= q && q <= r) {
            return Err(TripletError::Order(p, q, r));
        }
        let s = 1.0 / p as f64 + 1.0 / q as f64 + 1.0 / r as f64;
        // Exact rational test: qr + pr + pq < pqr.
        let (p64, q64, r64) = (p as u64, q as u64, r as u64);
        if q64 * r64 + p64 * r64 + p64 * q64 >= p64 * q64 * r64 {
            return Err(TripletError::NotHyperbolic(p, q, r, s));
        }
        Ok(Triplet { p, q, r })
    }

    /// All hyperbolic triplets with `3 ≤ p ≤ q ≤ r ≤ r_max`.
    pub fn all_up_to(r_max: u32) -> Vec<Triplet> {
        let mut out = Vec::new();
        for p in 3..=r_max {
            for q in p..=r_max {
                for r in q..=r_max {
                    if let Ok(t) = Triplet::new(p, q, r) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

/// Orientation-preserving isometry of `H`, stored as a real matrix with
/// determinant 1, normalized so that `m00 + m11 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub m: [f64; 4],
}

impl Isometry {
    /// Builds an isometry from matrix entries, rescaling to determinant 1.
    ///
    /// # Panics
    /// Panics if the determinant is not positive.
    pub fn new(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        let det = m00 * m11 - m01 * m10;
        assert!(det > 0.0, "isometry needs a positive determinant, got {det}");
        let s = det.sqrt();
        Self::normalized([m00 / s, m01 / s, m10 / s, m11 / s])
    }

    fn normalized(mut m: [f64; 4]) -> Self {
        let tr = m[0] + m[3];
        let flip = if tr.abs() > 1e-14 {
            tr < 0.0
        } else if m[2].abs() > 1e-14 {
            m[2] < 0.0
        } else {
            m[1] < 0.0
        };
        if flip {
            for x in &mut m {
                *x = -*x;
            }
        }
        Isometry { m }
    }

    pub fn identity() -> Self {
        Isometry { m: [1.0, 0.0, 0.0, 1.0] }
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        let a = &self.m;
        let b = &o.m;
        Self::normalized([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.m;
        Self::normalized([m[3], -m[1], -m[2], m[0]])
    }

    /// `self^n` for any integer `n` (negative powers use the inverse).
    pub fn pow(&self, n: i64) -> Isometry {
        let mut base = if n < 0 { self.inverse() } else { *self };
        let mut k = n.unsigned_abs();
        let mut acc = Isometry::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// `self · m · self⁻¹`.
    pub fn conjugate(&self, m: &Isometry) -> Isometry {
        self.mul(m).mul(&self.inverse())
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// Entrywise comparison up to global sign with an absolute tolerance.
    pub fn approx_eq(&self, o: &Isometry, tol: f64) -> bool {
        let plus = (0..4).all(|i| (self.m[i] - o.m[i]).abs() <= tol);
        let minus = (0..4).all(|i| (self.m[i] + o.m[i]).abs() <= tol);
        plus || minus
    }

    /// True when the matrix is `±identity` entrywise within `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::identity(), tol)
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// Action on a point of the upper half-plane.
    pub fn act_h(&self, z: Complex64) -> Complex64 {
        let m = &self.m;
        (z * m[0] + m[1]) / (z * m[2] + m[3])
    }

    /// The `SU(1,1)` coefficients `(α, β)` of the conjugated disk action
    /// `z ↦ (αz + β)/(β̄z + ᾱ)`.
    pub fn disk_coeffs(&self) -> (Complex64, Complex64) {
        let m = &self.m;
        let alpha = Complex64::new((m[0] + m[3]) * 0.5, (m[1] - m[2]) * 0.5);
        let beta = Complex64::new((m[0] - m[3]) * 0.5, -(m[1] + m[2]) * 0.5);
        (alpha, beta)
    }

    /// Inverse of [`Isometry::disk_coeffs`].
    pub fn from_disk_coeffs(alpha: Complex64, beta: Complex64) -> Isometry {
        Isometry::new(
            alpha.re + beta.re,
            alpha.im - beta.im,
            -alpha.im - beta.im,
            alpha.re - beta.re,
        )
    }

    /// Action on a point of the closed unit disk.
    pub fn act_disk(&self, z: Complex64) -> Complex64 {
        let (a, b) = self.disk_coeffs();
        (a * z + b) / (b.conj() * z + a.conj())
    }

    pub fn act_boundary(&self, x: BoundaryPoint) -> BoundaryPoint {
        BoundaryPoint::from_complex(self.act_disk(x.to_disk()))
    }

    /// Rotation about `i` by `theta` (anticlockwise in the disk picture).
    pub fn rotation_about_i(theta: f64) -> Isometry {
        let (s, c) = (theta * 0.5).sin_cos();
        Isometry::new(c, s, -s, c)
    }

    /// Rotation by `theta` about an arbitrary point `z` of `H`.
    pub fn rotation_about(z: Complex64, theta: f64) -> Isometry {
        let t = Isometry::translation_to(z);
        t.conjugate(&Isometry::rotation_about_i(theta))
    }

    /// An isometry sending `i` to `z ∈ H`.
    pub fn translation_to(z: Complex64) -> Isometry {
        let sy = z.im.sqrt();
        Isometry::new(sy, z.re / sy, 0.0, 1.0 / sy)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.12}, {:.12}], [{:.12}, {:.12}]]",
            self.m[0], self.m[1], self.m[2], self.m[3]
        )
    }
}

/// Cayley transform `H → D`.
pub fn to_disk(w: Complex64) -> Complex64 {
    (w - I) / (w + I)
}

/// Inverse Cayley transform `D → H`.
pub fn from_disk(z: Complex64) -> Complex64 {
    I * (Complex64::new(1.0, 0.0) + z) / (Complex64::new(1.0, 0.0) - z)
}

/// A point of `∂D`, stored as an angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub angle: f64,
}

impl BoundaryPoint {
    pub fn new(angle: f64) -> Self {
        BoundaryPoint { angle: normalize_angle(angle) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        BoundaryPoint::new(z.im.atan2(z.re))
    }

    pub fn to_disk(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Angular distance on the circle, in `[0, π]`.
    pub fn circle_distance(self, o: BoundaryPoint) -> f64 {
        let d = normalize_angle(self.angle - o.angle);
        d.min(TAU - d)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(t: f64) -> f64 {
    let x = t.rem_euclid(TAU);
    if x >= TAU {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassLength {
    pub class: IsometryClass,
    /// Translation length; `0` unless the class is hyperbolic.
    pub length: f64,
}

/// Classifies by trace and returns the translation length `2·arccosh(|tr|/2)`.
pub fn classify_and_length(m: &Isometry) -> ClassLength {
    let t = m.trace().abs();
    if t > 2.0 + HYPERBOLIC_TOL {
        ClassLength { class: IsometryClass::Hyperbolic, length: 2.0 * (t / 2.0).acosh() }
    } else if t < 2.0 - HYPERBOLIC_TOL {
        ClassLength { class: IsometryClass::Elliptic, length: 0.0 }
    } else {
        ClassLength { class: IsometryClass::Parabolic, length: 0.0 }
    }
}

/// Translation length from a trace, for callers that already hold `|tr|`.
pub fn length_from_trace(abs_trace: f64) -> f64 {
    2.0 * (abs_trace / 2.0).max(1.0).acosh()
}

/// Attracting and repelling fixed points of a hyperbolic isometry.
pub fn fixed_points(m: &Isometry) -> Result<(BoundaryPoint, BoundaryPoint), CoreError> {
    if classify_and_length(m).class != IsometryClass::Hyperbolic {
        return Err(CoreError::NoAxis(format!("{:.12}", m.trace().abs())));
    }
    let (a, b) = m.disk_coeffs();
    // Roots of  β̄z² + (ᾱ − α)z − β = 0  are  (i·Im α ± √(|β|² − Im(α)²)) / β̄.
    let s = a.im;
    let c = (b.norm_sqr() - s * s).max(0.0).sqrt();
    let bc = b.conj();
    let z1 = Complex64::new(c, s) / bc;
    let z2 = Complex64::new(-c, s) / bc;
    let d1 = (bc * z1 + a.conj()).norm();
    let (att, rep) = if d1 > 1.0 { (z1, z2) } else { (z2, z1) };
    Ok((BoundaryPoint::from_complex(att), BoundaryPoint::from_complex(rep)))
}

/// Hyperbolic distance between two points of the open disk.
pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    2.0 * (num / den).min(1.0 - 1e-17).atanh()
}

/// Hyperbolic distance between two points of `H`.
pub fn h_distance(z: Complex64, w: Complex64) -> f64 {
    let d2 = (z - w).norm_sqr();
    (1.0 + d2 / (2.0 * z.im * w.im)).acosh()
}

/// A complete geodesic, oriented from `endpoint_neg` to `endpoint_pos`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub endpoint_neg: BoundaryPoint,
    pub endpoint_pos: BoundaryPoint,
}

impl Geodesic {
    pub fn new(neg: BoundaryPoint, pos: BoundaryPoint) -> Result<Self, CoreError> {
        if neg.circle_distance(pos) < 1e-15 {
            return Err(CoreError::DegenerateGeodesic);
        }
        Ok(Geodesic { endpoint_neg: neg, endpoint_pos: pos })
    }

    /// Oriented axis of a hyperbolic isometry (repelling to attracting).
    pub fn axis(m: &Isometry) -> Result<Self, CoreError> {
        let (att, rep) = fixed_points(m)?;
        Geodesic::new(rep, att)
    }

    /// The geodesic through two distinct points of the open disk, oriented from `z` to `w`.
    pub fn through(z: Complex64, w: Complex64) -> Result<Self, CoreError> {
        // Move z to the origin; the image of w then fixes a diameter.
        let one = Complex64::new(1.0, 0.0);
        let phi = |x: Complex64| (x - z) / (one - z.conj() * x);
        let phi_inv = |y: Complex64| (y + z) / (one + z.conj() * y);
        let wp = phi(w);
        if wp.norm() < 1e-300 {
            return Err(CoreError::DegenerateGeodesic);
        }
        let u = wp / wp.norm();
        Geodesic::new(BoundaryPoint::from_complex(phi_inv(-u)), BoundaryPoint::from_complex(phi_inv(u)))
    }

    pub fn apply(&self, m: &Isometry) -> Geodesic {
        Geodesic { endpoint_neg: m.act_boundary(self.endpoint_neg), endpoint_pos: m.act_boundary(self.endpoint_pos) }
    }

    /// Point at signed arclength `s` from the point of the geodesic closest
    /// to the disk origin, moving towards `endpoint_pos` as `s` grows.
    pub fn point_at(&self, s: f64) -> Complex64 {
        let a = self.endpoint_neg.angle;
        let delta = normalize_angle(self.endpoint_pos.angle - a) * 0.5;
        let gamma = a + delta;
        let tau = (PI / 4.0 - delta / 2.0).tan();
        let x = I * (s * 0.5).tanh();
        let y = (x + tau) / (Complex64::new(1.0, 0.0) + x * tau);
        Complex64::from_polar(1.0, gamma) * y
    }
}

/// How two geodesics sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceFlag {
    Disjoint,
    Crossing,
    SharedEndpoint,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDistance {
    pub distance: f64,
    pub flag: DistanceFlag,
}

/// Distance between two complete geodesics from the endpoint cross-ratio.
///
/// For disjoint geodesics with endpoints `(a1,a2)` and `(b1,b2)` the quantity
/// `X = ((a1−b1)(a2−b2))/((a1−b2)(a2−b1))` (or its reciprocal) lies in
/// `(0,1)` and the distance is `2·artanh(√X)`.
pub fn geodesic_distance(g1: &Geodesic, g2: &Geodesic) -> GeodesicDistance {
    const EPS: f64 = 1e-13;
    let (a1, a2) = (g1.endpoint_neg, g1.endpoint_pos);
    let (b1, b2) = (g2.endpoint_neg, g2.endpoint_pos);
    let same = |x: BoundaryPoint, y: BoundaryPoint| x.circle_distance(y) < EPS;
    if (same(a1, b1) && same(a2, b2)) || (same(a1, b2) && same(a2, b1)) {
        return GeodesicDistance { distance: 0.0, flag: DistanceFlag::Equal };
    }
    if same(a1, b1) || same(a1, b2) || same(a2, b1) || same(a2, b2) {
        return GeodesicDistance { distance: 0.0, flag: DistanceFlag::SharedEndpoint };
    }
    // Crossing iff exactly one endpoint of g2 lies on the anticlockwise arc from a1 to a2.
    let arc = normalize_angle(a2.angle - a1.angle);
    let inside = |x: BoundaryPoint| {
        let t = normalize_angle(x.angle - a1.angle);
        t > 0.0 && t < arc
    };
    if inside(b1) != inside(b2) {
        return GeodesicDistance { distance: 0.0, flag: DistanceFlag::Crossing };
    }
    let (za1, za2, zb1, zb2) = (a1.to_disk(), a2.to_disk(), b1.to_disk(), b2.to_disk());
    let x = ((za1 - zb1) * (za2 - zb2) / ((za1 - zb2) * (za2 - zb1))).norm();
    let x = if x > 1.0 { 1.0 / x } else { x };
    GeodesicDistance { distance: 2.0 * x.sqrt().atanh(), flag: DistanceFlag::Disjoint }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
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
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Distance between geodesics by nested golden-section minimization of the
/// point-to-point distance over both arclength parameters.
///
/// Slow and only meaningful for disjoint geodesics; it serves as an
/// independent check on [`geodesic_distance`].
pub fn geodesic_distance_by_minimization(g1: &Geodesic, g2: &Geodesic) -> f64 {
    let span = 30.0;
    let inner = |s: f64| {
        let x = g1.point_at(s);
        golden_section_min(|t| disk_distance(x, g2.point_at(t)), -span, span, 120).1
    };
    golden_section_min(inner, -span, span, 120).1
}

/// Busemann function based at `xi`, normalized at the disk origin:
/// `B_ξ(x) = log(|ξ − x|² / (1 − |x|²))`.
pub fn busemann(xi: BoundaryPoint, x: Complex64) -> f64 {
    let z = xi.to_disk();
    ((z - x).norm_sqr() / (1.0 - x.norm_sqr())).ln()
}

/// `d(x, p_t) − d(0, p_t)` where `p_t` is the point at distance `t` from the
/// origin on the ray towards `xi`.
///
/// `1 − |p_t|²` is taken as `sech²(t/2)` directly; forming it from `p_t`
/// loses all precision once `t` is around 30.
pub fn busemann_by_limit(xi: BoundaryPoint, x: Complex64, t: f64) -> f64 {
    let pt = xi.to_disk() * (t * 0.5).tanh();
    let sech2 = (t * 0.5).cosh().powi(-2);
    let arg = 1.0 + 2.0 * (x - pt).norm_sqr() / ((1.0 - x.norm_sqr()) * sech2);
    arg.acosh() - t
}

/// Vertices, generators and side lengths of the fundamental triangle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupData {
    pub triplet: Triplet,
    /// Vertices in the upper half-plane; `A0 = i`.
    pub a0: Complex64,
    pub b0: Complex64,
    pub c0: Complex64,
    /// Anticlockwise rotation by `2π/p` about `A0`.
    pub gen_a: Isometry,
    /// Anticlockwise rotation by `2π/q` about `B0`.
    pub gen_b: Isometry,
    pub side_ab: f64,
    pub side_bc: f64,
    pub side_ca: f64,
}

/// `cosh` of the side opposite the angle `π/z` in a triangle with angles `π/x, π/y, π/z`.
fn cosh_side(x: u32, y: u32, z: u32) -> f64 {
    let (cx, cy, cz) = ((PI / x as f64).cos(), (PI / y as f64).cos(), (PI / z as f64).cos());
    let (sx, sy) = ((PI / x as f64).sin(), (PI / y as f64).sin());
    (cx * cy + cz) / (sx * sy)
}

/// Places the fundamental triangle with `A0 = i`, `B0 = i·e^{d}` (the positive
/// real axis of the disk) and `C0` in the upper half of the disk, so that
/// `A0 → B0 → C0` runs anticlockwise.
pub fn build_group(t: Triplet) -> GroupData {
    let Triplet { p, q, r } = t;
    let side_ab = cosh_side(p, q, r).acosh();
    let side_bc = cosh_side(q, r, p).acosh();
    let side_ca = cosh_side(p, r, q).acosh();
    let a0 = I;
    let b0 = I * side_ab.exp();
    let c0_disk = Complex64::from_polar((side_ca * 0.5).tanh(), PI / p as f64);
    let c0 = from_disk(c0_disk);
    let gen_a = Isometry::rotation_about_i(TAU / p as f64);
    let gen_b = Isometry::rotation_about(b0, TAU / q as f64);
    GroupData { triplet: t, a0, b0, c0, gen_a, gen_b, side_ab, side_bc, side_ca }
}

impl GroupData {
    pub fn a0_disk(&self) -> Complex64 {
        to_disk(self.a0)
    }
    pub fn b0_disk(&self) -> Complex64 {
        to_disk(self.b0)
    }
    pub fn c0_disk(&self) -> Complex64 {
        to_disk(self.c0)
    }

    /// Interior angle of the fundamental triangle at `v` between the sides towards `x` and `y`.
    pub fn angle_at(v: Complex64, x: Complex64, y: Complex64) -> f64 {
        // Move v to the origin of the disk, where hyperbolic angles are Euclidean.
        let t = Isometry::translation_to(v).inverse();
        let xd = to_disk(t.act_h(x));
        let yd = to_disk(t.act_h(y));
        let a = (xd / yd).arg().abs();
        a.min(TAU - a)
    }

    /// Interior angles at `A0`, `B0`, `C0`.
    pub fn interior_angles(&self) -> (f64, f64, f64) {
        (
            Self::angle_at(self.a0, self.b0, self.c0),
            Self::angle_at(self.b0, self.c0, self.a0),
            Self::angle_at(self.c0, self.a0, self.b0),
        )
    }
}

/// Input of the isosceles-comparison predicate.
///
/// Two lines meet at `P` with angle `alpha`. `ell` is the leg length of the
/// isosceles triangle with apex angle `alpha` and base angles `psi1`. The
/// points `Q1`, `Q2` lie on the lines at distances `s1 < s2`, both beyond the
/// isosceles legs. `h` and `beta` are the height of `P Q1 Q2` from `P` and
/// its angle with the first line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheckInput {
    pub alpha: f64,
    pub psi1: f64,
    pub s1: f64,
    pub s2: f64,
    pub ell: f64,
    pub h: f64,
    pub beta: f64,
}

impl TriangleCheckInput {
    /// Fills in the derived quantities from `(alpha, s1, s2, ell)`.
    pub fn from_lengths(alpha: f64, s1: f64, s2: f64, ell: f64) -> Self {
        let psi1 = (1.0 / (ell.cosh() * (alpha * 0.5).tan())).atan();
        // tanh s1 / tanh s2 = cos α + sin α tan β
        let tan_beta = (s1.tanh() / s2.tanh() - alpha.cos()) / alpha.sin();
        let beta = tan_beta.atan();
        // cos β = tanh h coth s2
        let h = (beta.cos() * s2.tanh()).atanh();
        TriangleCheckInput { alpha, psi1, s1, s2, ell, h, beta }
    }

    /// `cosh s1 (tanh s1/tanh s2 − cos α) > (1 − cos α) cosh ℓ`.
    pub fn inequality_holds(&self) -> bool {
        let lhs = self.s1.cosh() * (self.s1.tanh() / self.s2.tanh() - self.alpha.cos());
        let rhs = (1.0 - self.alpha.cos()) * self.ell.cosh();
        lhs > rhs
    }

    /// Angle of the triangle `P Q1 Q2` at `Q1`, from the law of cosines.
    pub fn psi1_prime(&self) -> f64 {
        let (a, b) = (self.s1, self.s2);
        let cc = a.cosh() * b.cosh() - a.sinh() * b.sinh() * self.alpha.cos();
        let c = cc.acosh();
        // angle at Q1 is opposite the side PQ2 of length s2
        ((a.cosh() * cc - b.cosh()) / (a.sinh() * c.sinh())).clamp(-1.0, 1.0).acos()
    }

    /// Direct comparison `ψ₁′ < ψ₁` from explicit triangle constructions.
    pub fn direct_comparison(&self) -> bool {
        self.psi1_prime() < self.psi1
    }
}

/// Angles and lengths inside a face polygon used by the convexity arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    /// Angle at the A-type diagonal end `(r+1)⁺` of the triangle `(2r−1)⁺, C, (r+1)⁺`.
    pub phi_q: f64,
    /// Angle at the B-type diagonal end `(2r−1)⁺` of the same triangle.
    pub psi_q: f64,
    pub mu_q: f64,
    pub nu_q: f64,
    /// Angle of the left boundary path of a polygon strip at an A-type vertex.
    pub theta_a: f64,
    /// Same at a B-type vertex.
    pub theta_b: f64,
    /// `|C (2r−1)⁺|`, center to a B-type vertex.
    pub a_q: f64,
    /// `|C (r+1)⁺|`, center to an A-type vertex.
    pub b_q: f64,
    /// Apex angle `π − 2π/r`.
    pub alpha: f64,
    /// `arccot(cot(π/p)·cos(π/r)/(1 − cos(π/r))) + π/p`, an upper bound for `μ_q`.
    pub mu_bound: f64,
}

/// Angle at the vertex with side `x` of the triangle with sides `x`, `y` from
/// the apex and apex angle `gamma`.
fn sas_angle(x: f64, y: f64, gamma: f64) -> f64 {
    let cc = x.cosh() * y.cosh() - x.sinh() * y.sinh() * gamma.cos();
    let c = cc.acosh();
    ((x.cosh() * cc - y.cosh()) / (x.sinh() * c.sinh())).clamp(-1.0, 1.0).acos()
}

/// Evaluates the polygon angle formulas for a triplet.
pub fn trig_pack(t: Triplet) -> AngleReport {
    let gd = build_group(t);
    let (pf, qf, rf) = (t.p as f64, t.q as f64, t.r as f64);
    let alpha = PI - TAU / rf;
    let a_q = gd.side_bc;
    let b_q = gd.side_ca;
    let phi_q = sas_angle(b_q, a_q, alpha);
    let psi_q = sas_angle(a_q, b_q, alpha);
    let mu_q = phi_q + PI / pf;
    let nu_q = psi_q + PI / qf;
    // On the left boundary of a strip, the angle at a vertex v is twice the
    // angle between its polygon edge and the diagonal spanning r − 1 edges.
    let apex = (rf - 1.0) * PI / rf;
    let (near_a, near_b) = if t.r % 2 == 1 { (b_q, a_q) } else { (a_q, b_q) };
    let theta_a = 2.0 * (PI / pf + sas_angle(b_q, near_a, apex));
    let theta_b = 2.0 * (PI / qf + sas_angle(a_q, near_b, apex));
    let cr = (PI / rf).cos();
    let l = (PI / pf).tan().recip() * cr / (1.0 - cr);
    let mu_bound = (1.0 / l).atan() + PI / pf;
    AngleReport { phi_q, psi_q, mu_q, nu_q, theta_a, theta_b, a_q, b_q, alpha, mu_bound }
}
