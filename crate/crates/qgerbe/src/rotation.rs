//! Rotations of the imaginary quaternions: SO(3) = Aut(ℍ) = Inn(ℍ).
//!
//! A rotation is stored as its versor (unit quaternion) with the sign
//! gauge fixed, so that ±u collapse to one representative.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::quat::Quat;

/// Sign-gauge threshold used when canonicalizing versors.
const SIGN_EPS: f64 = 1e-12;

/// An element of SO(3), represented by a canonical-sign unit quaternion
/// acting by conjugation v ↦ u·v·u⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    u: Quat,
}

impl Rotation3 {
    /// Rotation determined by a nonzero quaternion; scale and sign are
    /// quotiented out.
    pub fn from_quat(u: Quat) -> Result<Self> {
        if u.is_zero() {
            return Err(crate::error::Error::ZeroQuaternion);
        }
        // keep an already-unit quaternion bit-exact so that versor
        // serialization roundtrips without drift
        let n2 = u.norm_sqr();
        let unit = if (n2 - 1.0).abs() < 1e-12 {
            u
        } else {
            u.normalized()?
        };
        Ok(Rotation3 {
            u: unit.canonical_sign(SIGN_EPS),
        })
    }

    pub fn identity() -> Self {
        Rotation3 { u: crate::quat::ONE }
    }

    /// The canonical-sign versor.
    pub fn versor(&self) -> Quat {
        self.u
    }

    /// Conjugation action on ℍ; fixes the real line.
    pub fn apply(&self, v: Quat) -> Quat {
        self.u * v * self.u.conj()
    }

    /// Composition self∘other (apply `other` first).
    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Rotation3 {
            u: (self.u * other.u).canonical_sign(SIGN_EPS),
        }
    }

    pub fn inverse(&self) -> Rotation3 {
        Rotation3 {
            u: self.u.conj().canonical_sign(SIGN_EPS),
        }
    }

    /// The 3x3 matrix on span(i, j, k), row-major.
    pub fn to_mat3(&self) -> [[f64; 3]; 3] {
        let cols = [
            self.apply(crate::quat::I),
            self.apply(crate::quat::J),
            self.apply(crate::quat::K),
        ];
        let mut m = [[0.0; 3]; 3];
        for (c, q) in cols.iter().enumerate() {
            m[0][c] = q.x;
            m[1][c] = q.y;
            m[2][c] = q.z;
        }
        m
    }

    /// Frobenius distance between the 3x3 matrices; sign-blind by
    /// construction.
    pub fn distance(&self, other: &Rotation3) -> f64 {
        let a = self.to_mat3();
        let b = other.to_mat3();
        let mut s = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                let d = a[r][c] - b[r][c];
                s += d * d;
            }
        }
        s.sqrt()
    }

    /// Equality of rotations up to `tol`, measured on versors modulo sign.
    pub fn approx_eq(&self, other: &Rotation3, tol: f64) -> bool {
        let d = (self.u - other.u).norm();
        let s = (self.u + other.u).norm();
        d.min(s) <= tol
    }
}

impl Serialize for Rotation3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.u.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rotation3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = Quat::deserialize(d)?;
        Rotation3::from_quat(q).map_err(serde::de::Error::custom)
    }
}

/// The crossed-module map δ: ℍ* → SO(3), p ↦ (v ↦ p·v·p⁻¹).
pub fn delta(p: Quat) -> Result<Rotation3> {
    Rotation3::from_quat(p)
}
