//! Quaternion scalars and 4x4 real matrices acting on ℍ ≅ ℝ⁴.
//!
//! The basis convention is fixed once for the whole crate: the ordered
//! basis of ℝ⁴ is (1, i, j, k), and `Matrix4` is row-major with respect
//! to it. Every matrix encoding elsewhere (bimodule actions, Jacobians,
//! JSON files) relies on this.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// An element of ℍ with components along (1, i, j, k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

impl Quat {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quat::new(w, 0.0, 0.0, 0.0)
    }

    pub const fn zero() -> Self {
        Quat::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quat::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse; errors on the zero quaternion.
    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn dot(self, other: Quat) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_zero(self) -> bool {
        self.norm_sqr() == 0.0
    }

    /// Canonical sign representative of the line {±q}: the first component
    /// of (w, x, y, z) exceeding `eps` in magnitude is made positive.
    pub fn canonical_sign(self, eps: f64) -> Self {
        for c in [self.w, self.x, self.y, self.z] {
            if c.abs() > eps {
                return if c < 0.0 { -self } else { self };
            }
        }
        self
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Hamilton product as a named operation.
pub fn qmul(p: Quat, q: Quat) -> Quat {
    p * q
}

/// Multiplicative inverse as a named operation.
pub fn qinv(p: Quat) -> Result<Quat> {
    p.inv()
}

impl Serialize for Quat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        Ok(Quat::from_array(a))
    }
}

/// A real 4x4 matrix in End_ℝ(ℍ), row-major over the basis (1, i, j, k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub fn zero() -> Self {
        Matrix4([[0.0; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Matrix4::zero();
        for d in 0..4 {
            m.0[d][d] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Matrix4(rows)
    }

    /// Builds a matrix from its images of the basis vectors (as columns).
    pub fn from_columns(cols: [Quat; 4]) -> Self {
        let mut m = Matrix4::zero();
        for (c, q) in cols.iter().enumerate() {
            let a = q.to_array();
            for r in 0..4 {
                m.0[r][c] = a[r];
            }
        }
        m
    }

    pub fn column(&self, c: usize) -> Quat {
        Quat::new(self.0[0][c], self.0[1][c], self.0[2][c], self.0[3][c])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                t.0[r][c] = self.0[c][r];
            }
        }
        t
    }

    pub fn apply(&self, v: Quat) -> Quat {
        let a = v.to_array();
        let mut out = [0.0; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * a[c];
            }
        }
        Quat::from_array(out)
    }

    pub fn matmul(&self, other: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += self.0[r][k] * other.0[k][c];
                }
                out.0[r][c] = s;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[r][c] + other.0[r][c];
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[r][c] - other.0[r][c];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix4 {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] *= s;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                s += self.0[r][c] * self.0[r][c];
            }
        }
        s.sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|d| self.0[d][d]).sum()
    }

    pub fn determinant(&self) -> f64 {
        nalgebra::Matrix4::from(*self).determinant()
    }

    pub fn to_flat(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = self.0[r][c];
            }
        }
        out
    }

    pub fn from_flat(a: &[f64; 16]) -> Self {
        let mut m = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = a[4 * r + c];
            }
        }
        m
    }
}

impl From<Matrix4> for nalgebra::Matrix4<f64> {
    fn from(m: Matrix4) -> Self {
        nalgebra::Matrix4::from_fn(|r, c| m.0[r][c])
    }
}

impl From<nalgebra::Matrix4<f64>> for Matrix4 {
    fn from(m: nalgebra::Matrix4<f64>) -> Self {
        let mut out = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = m[(r, c)];
            }
        }
        out
    }
}

impl Serialize for Matrix4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_flat().to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.len() != 16 {
            return Err(D::Error::custom(format!(
                "expected 16 matrix entries, got {}",
                v.len()
            )));
        }
        let mut a = [0.0; 16];
        a.copy_from_slice(&v);
        Ok(Matrix4::from_flat(&a))
    }
}

/// The bimodule representation φ(p⊗q): v ↦ p·v·q as a matrix.
pub fn phi_matrix(p: Quat, q: Quat) -> Matrix4 {
    Matrix4::from_columns([p * ONE * q, p * I * q, p * J * q, p * K * q])
}
