//! The structure groupoid: objects are SO(3), a morphism p: α → δ(p)∘α is
//! a nonzero quaternion, and the monoidal product realizes ℍ*⋊SO(3),
//! isomorphic to ℝ⁺SO(4).

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalElement;
use crate::error::{Error, Result};
use crate::quat::Quat;
use crate::rotation::{delta, Rotation3};

/// Tolerance for object matching in composition.
pub const OBJECT_MATCH_TOL: f64 = 1e-12;

/// An arrow (p, α) of the groupoid; the target δ(p)∘α is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupoidMorphism {
    #[serde(rename = "p")]
    value: Quat,
    #[serde(rename = "source_versor")]
    source: Rotation3,
}

impl GroupoidMorphism {
    pub fn new(value: Quat, source: Rotation3) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroQuaternion);
        }
        Ok(GroupoidMorphism { value, source })
    }

    /// Identity arrow at an object.
    pub fn identity(at: Rotation3) -> Self {
        GroupoidMorphism {
            value: crate::quat::ONE,
            source: at,
        }
    }

    pub fn value(&self) -> Quat {
        self.value
    }

    pub fn source(&self) -> Rotation3 {
        self.source
    }

    pub fn target(&self) -> Rotation3 {
        delta(self.value)
            .expect("morphism value is nonzero")
            .compose(&self.source)
    }

    pub fn inverse(&self) -> Result<GroupoidMorphism> {
        GroupoidMorphism::new(self.value.inv()?, self.target())
    }
}

/// Composition second∘first, value q·p; errors unless target(first)
/// matches source(second) to `OBJECT_MATCH_TOL`.
pub fn compose(second: &GroupoidMorphism, first: &GroupoidMorphism) -> Result<GroupoidMorphism> {
    compose_tol(second, first, OBJECT_MATCH_TOL)
}

/// Composition with an explicit matching tolerance. Oracle-style callers
/// pass a large tolerance to obtain the composite value even when the
/// endpoints disagree; the mismatch is still reported in the error path
/// when `tol` is finite.
pub fn compose_tol(
    second: &GroupoidMorphism,
    first: &GroupoidMorphism,
    tol: f64,
) -> Result<GroupoidMorphism> {
    let t = first.target();
    if !t.approx_eq(&second.source, tol) {
        let residual = t.distance(&second.source);
        return Err(Error::NonComposable { residual });
    }
    GroupoidMorphism::new(second.value * first.value, first.source)
}

/// Monoidal product (p,α)⊗(q,β) = (p·α[q], αβ).
pub fn tensor(m1: &GroupoidMorphism, m2: &GroupoidMorphism) -> GroupoidMorphism {
    GroupoidMorphism {
        value: m1.value * m1.source.apply(m2.value),
        source: m1.source.compose(&m2.source),
    }
}

/// The isomorphism ℍ*⋊SO(3) → ℝ⁺SO(4): (p, δ(u)) ↦ class of (p·u)⊗(u⁻¹).
/// Independent of the sign of u since both factors flip together.
pub fn to_conformal(m: &GroupoidMorphism) -> ConformalElement {
    let u = m.source.versor();
    ConformalElement::from_pair(m.value * u, u.conj())
        .expect("versor and nonzero value give a nonzero pair")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{qmul, Quat, I, J, ONE};

    fn rot(q: Quat) -> Rotation3 {
        delta(q).unwrap()
    }

    #[test]
    fn identity_morphism_composes_trivially() {
        let beta = rot(Quat::new(0.2, 0.5, -0.1, 0.9));
        let q = GroupoidMorphism::new(Quat::new(1.0, -0.3, 0.2, 0.0), beta).unwrap();
        let id = GroupoidMorphism::identity(q.target());
        let c = compose(&id, &q).unwrap();
        assert_eq!(c.value(), q.value());
        assert!(c.source().approx_eq(&beta, 1e-15));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let alpha = rot(Quat::new(0.7, 0.1, 0.4, -0.2));
        let p = GroupoidMorphism::new(Quat::new(0.5, 1.2, -0.8, 0.3), alpha).unwrap();
        let c = compose(&p.inverse().unwrap(), &p).unwrap();
        assert!((c.value() - ONE).norm() < 1e-14);
        assert!(c.source().approx_eq(&alpha, 1e-15));
    }

    #[test]
    fn composition_is_quaternion_product() {
        // (j,·)∘(i,α) carries value ji = -k; oracle is qmul
        let alpha = rot(Quat::new(0.9, 0.2, -0.4, 0.1));
        let first = GroupoidMorphism::new(I, alpha).unwrap();
        let second = GroupoidMorphism::new(J, first.target()).unwrap();
        let c = compose(&second, &first).unwrap();
        assert!((c.value() - qmul(J, I)).norm() < 1e-15);
        assert!((c.value() + crate::quat::K).norm() < 1e-15);
    }

    #[test]
    fn mismatched_endpoints_are_rejected() {
        let a = GroupoidMorphism::new(I, Rotation3::identity()).unwrap();
        let b = GroupoidMorphism::new(J, Rotation3::identity()).unwrap();
        // target(a) = delta(i) != identity = source(b)
        match compose(&b, &a) {
            Err(Error::NonComposable { residual }) => assert!(residual > 1.0),
            other => panic!("expected NonComposable, got {other:?}"),
        }
    }

    #[test]
    fn tensor_unit_and_plain_multiplication() {
        let beta = rot(Quat::new(0.1, 0.8, 0.2, -0.5));
        let m = GroupoidMorphism::new(Quat::new(0.4, -1.1, 0.0, 0.7), beta).unwrap();
        let unit = GroupoidMorphism::identity(Rotation3::identity());
        let left = tensor(&unit, &m);
        let right = tensor(&m, &unit);
        assert!((left.value() - m.value()).norm() < 1e-14);
        assert!((right.value() - m.value()).norm() < 1e-14);
        assert!(left.source().approx_eq(&beta, 1e-14));
        assert!(right.source().approx_eq(&beta, 1e-14));

        // with identity sources the product is plain multiplication
        let a = GroupoidMorphism::new(I, Rotation3::identity()).unwrap();
        let b = GroupoidMorphism::new(J, Rotation3::identity()).unwrap();
        assert!((tensor(&a, &b).value() - I * J).norm() < 1e-15);
    }

    #[test]
    fn tensor_conjugates_second_value() {
        // (p, δ(u))⊗(q, δ(v)) = (p·uqu⁻¹, δ(uv)); oracle is direct conjugation
        let u = Quat::new(0.3, 0.6, -0.2, 0.7);
        let v = Quat::new(-0.5, 0.1, 0.9, 0.2);
        let p = Quat::new(1.2, -0.4, 0.5, 0.0);
        let q = Quat::new(0.2, 0.3, -0.6, 1.0);
        let m1 = GroupoidMorphism::new(p, rot(u)).unwrap();
        let m2 = GroupoidMorphism::new(q, rot(v)).unwrap();
        let t = tensor(&m1, &m2);
        let un = u.normalized().unwrap().canonical_sign(1e-12);
        let expect = p * (un * q * un.conj());
        assert!((t.value() - expect).norm() < 1e-13);
        assert!(t.source().approx_eq(&rot(u * v), 1e-12));
    }

    #[test]
    fn target_compatibility_of_tensor() {
        let m1 = GroupoidMorphism::new(Quat::new(0.4, 0.9, -0.3, 0.2), rot(I + J)).unwrap();
        let m2 = GroupoidMorphism::new(Quat::new(-0.7, 0.2, 0.5, 0.6), rot(ONE + crate::quat::K)).unwrap();
        let lhs = tensor(&m1, &m2).target();
        let rhs = m1.target().compose(&m2.target());
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn to_conformal_basics() {
        let id = GroupoidMorphism::identity(Rotation3::identity());
        assert!(to_conformal(&id).distance(&ConformalElement::identity()) < 1e-15);

        let p = Quat::new(0.8, -0.2, 0.4, 1.0);
        let m = GroupoidMorphism::new(p, Rotation3::identity()).unwrap();
        let expect = ConformalElement::from_pair(p, ONE).unwrap();
        assert!(to_conformal(&m).distance(&expect) < 1e-13);
    }

    #[test]
    fn to_conformal_is_monoidal() {
        let m1 = GroupoidMorphism::new(Quat::new(1.1, 0.2, -0.5, 0.3), rot(Quat::new(0.4, 0.7, 0.1, -0.3))).unwrap();
        let m2 = GroupoidMorphism::new(Quat::new(-0.2, 0.9, 0.4, 0.8), rot(Quat::new(0.6, -0.1, 0.8, 0.2))).unwrap();
        let lhs = to_conformal(&tensor(&m1, &m2)).matrix();
        let rhs = to_conformal(&m1).matrix().matmul(&to_conformal(&m2).matrix());
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-10 * rhs.frobenius_norm());
    }

    #[test]
    fn noncommutativity_witness() {
        let a = GroupoidMorphism::new(I, Rotation3::identity()).unwrap();
        let b = GroupoidMorphism::new(J, rot(I)).unwrap();
        let ab = tensor(&a, &b);
        let ba = tensor(&b, &a);
        assert!((ab.value() - ba.value()).norm() > 1.0);
    }
}
