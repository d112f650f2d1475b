//! Real 2×2 matrices acting as Möbius maps, overflow-safe products and
//! hyperbolic displacement lengths.

use num_complex::Complex64;
use std::f64::consts::LN_2;
use std::ops::Mul;

use crate::error::MoebiusError;

/// Relative size of `cz + d` below which a point is treated as the pole.
const POLE_TOL: f64 = 1e-14;
/// Margin above |Tr| = 2 required for a hyperbolic element.
const HYPERBOLIC_TOL: f64 = 1e-12;

/// Real 2×2 matrix `[[a, b], [c, d]]`, acting as `z ↦ (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// `u ↦ u + t`.
    pub const fn translation(t: f64) -> Self {
        Self::new(1.0, t, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Inverse up to the scalar `det` (exact for det ±1 in projective terms).
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::IDENTITY, |acc, _| acc * *self)
    }

    /// Apply to a real point. Returns `None` at the pole.
    pub fn apply_real(&self, u: f64) -> Option<f64> {
        let den = self.c * u + self.d;
        if den.abs() <= POLE_TOL * (self.c.abs() * u.abs()).max(self.d.abs()) {
            return None;
        }
        Some((self.a * u + self.b) / den)
    }

    /// Derivative of the map at a real point: det/(cu + d)².
    pub fn derivative_real(&self, u: f64) -> f64 {
        let den = self.c * u + self.d;
        self.det() / (den * den)
    }

    /// Pole `-d/c`, or `None` for affine maps.
    pub fn pole(&self) -> Option<f64> {
        (self.c != 0.0).then(|| -self.d / self.c)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// A matrix stored as `mat · 2^exp2` with the max-abs entry of `mat` in `[1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix {
    pub mat: Matrix2,
    pub exp2: i64,
    /// Sign of the true determinant, tracked exactly through products
    /// since the scaled determinant underflows for long words.
    pub det_sign: i8,
}

impl ScaledMatrix {
    pub fn from_matrix(m: Matrix2) -> Self {
        let det_sign = if m.det() < 0.0 { -1 } else { 1 };
        let mut s = Self {
            mat: m,
            exp2: 0,
            det_sign,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let mx = self.mat.max_abs();
        if mx == 0.0 || !mx.is_finite() {
            return;
        }
        let e = mx.log2().floor() as i32;
        let mut mat = self.mat.scale(pow2(-e));
        let mut e = e as i64;
        // log2 rounding can leave the max one binade off
        let m2 = mat.max_abs();
        if m2 >= 2.0 {
            mat = mat.scale(0.5);
            e += 1;
        } else if m2 < 1.0 {
            mat = mat.scale(2.0);
            e -= 1;
        }
        self.mat = mat;
        self.exp2 += e;
    }

    /// `self · rhs`.
    pub fn mul_matrix(&self, rhs: &Matrix2) -> Self {
        let det_sign = if rhs.det() < 0.0 { -self.det_sign } else { self.det_sign };
        let mut s = Self {
            mat: self.mat * *rhs,
            exp2: self.exp2,
            det_sign,
        };
        s.normalize();
        s
    }

    /// The true matrix; overflows to infinity for very long words.
    pub fn descale(&self) -> Matrix2 {
        let k = 2f64.powi(self.exp2.clamp(-2000, 2000) as i32);
        self.mat.scale(k)
    }

    /// log |Tr| of the true matrix.
    pub fn log_abs_trace(&self) -> f64 {
        self.mat.trace().abs().ln() + self.exp2 as f64 * LN_2
    }
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Disk in ℂ centered on the real line.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: f64, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        Self { center, radius }
    }

    pub fn left(&self) -> f64 {
        self.center - self.radius
    }

    pub fn right(&self) -> f64 {
        self.center + self.radius
    }

    /// Closed disks are disjoint.
    pub fn disjoint(&self, o: &Disk) -> bool {
        (self.center - o.center).abs() > self.radius + o.radius
    }

    /// `self` lies in the open interior of `o`.
    pub fn strictly_inside(&self, o: &Disk) -> bool {
        (self.center - o.center).abs() + self.radius < o.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// `(az + b)/(cz + d)`.
pub fn mobius_apply(m: &Matrix2, z: Complex64) -> Result<Complex64, MoebiusError> {
    let den = z * m.c + m.d;
    let scale = (m.c.abs() * z.norm()).max(m.d.abs());
    if den.norm() <= POLE_TOL * scale || den.norm() == 0.0 {
        return Err(MoebiusError::PoleHit);
    }
    Ok((z * m.a + m.b) / den)
}

/// Image of a real-centered disk, computed from the images of its real
/// diameter endpoints.
pub fn mobius_image_disk(m: &Matrix2, d: &Disk) -> Result<Disk, MoebiusError> {
    if let Some(p) = m.pole() {
        if (p - d.center).abs() <= d.radius {
            return Err(MoebiusError::PoleInsideDisk { pole: p });
        }
    }
    let (l, r) = (d.left(), d.right());
    let x = m.apply_real(l).ok_or(MoebiusError::PoleHit)?;
    // f(r) − f(l) = det·(r − l)/((cl + d)(cr + d)), free of cancellation
    let diff = m.det() * (r - l) / ((m.c * l + m.d) * (m.c * r + m.d));
    Ok(Disk::new(x + 0.5 * diff, 0.5 * diff.abs()))
}

/// Ordered product `ms[0] · ms[1] · … · ms[k-1]`, renormalized after every multiply.
pub fn product_scaled(ms: &[Matrix2]) -> ScaledMatrix {
    assert!(!ms.is_empty(), "product_scaled needs at least one matrix");
    let mut acc = ScaledMatrix::from_matrix(ms[0]);
    for m in &ms[1..] {
        acc = acc.mul_matrix(m);
    }
    acc
}

/// Hyperbolic displacement length `2 arccosh(|Tr|/2)`, evaluated in log form.
pub fn displacement_length(m: &ScaledMatrix) -> Result<f64, MoebiusError> {
    if m.det_sign < 0 {
        return Err(MoebiusError::WrongDeterminant);
    }
    let ts = m.mat.trace().abs();
    if ts == 0.0 {
        return Err(MoebiusError::NotHyperbolic { trace: 0.0 });
    }
    let log_tr = ts.ln() + m.exp2 as f64 * LN_2;
    if log_tr <= (2.0 + HYPERBOLIC_TOL).ln() {
        return Err(MoebiusError::NotHyperbolic { trace: log_tr.exp() });
    }
    // q = 2/|Tr|, without forming |Tr| itself
    let q = (2f64.ln() - log_tr).exp();
    let root = ((1.0 - q) * (1.0 + q)).sqrt();
    Ok(2.0 * (log_tr + root.ln_1p() - LN_2))
}

/// Displacement length of a plain matrix.
pub fn matrix_length(m: &Matrix2) -> Result<f64, MoebiusError> {
    displacement_length(&ScaledMatrix::from_matrix(*m))
}

/// Cayley map `z ↦ −i(z−1)/(z+1)` from the unit disk to the upper half-plane.
pub fn cayley(z: Complex64) -> Result<Complex64, MoebiusError> {
    let den = z + 1.0;
    if den.norm() <= POLE_TOL * (1.0 + z.norm()) {
        return Err(MoebiusError::PoleHit);
    }
    Ok(-Complex64::i() * (z - 1.0) / den)
}

/// Inverse Cayley map `z ↦ (i−z)/(i+z)`.
pub fn cayley_inverse(z: Complex64) -> Result<Complex64, MoebiusError> {
    let i = Complex64::i();
    let den = i + z;
    if den.norm() <= POLE_TOL * (1.0 + z.norm()) {
        return Err(MoebiusError::PoleHit);
    }
    Ok((i - z) / den)
}
