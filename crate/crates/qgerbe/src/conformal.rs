//! Membership and factorization for the Euclidean conformal group ℝ⁺SO(4),
//! presented quaternionically as the classes p⊗q with p, q ∈ ℍ*.
//!
//! The ℝ*-gauge of a class is fixed by |p| = |q| = √λ together with the
//! canonical sign of p, so factorizations are unique representatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{phi_matrix, Matrix4, Quat, I, J, K, ONE};

const SIGN_EPS: f64 = 1e-12;

/// A class [p⊗q] ∈ ℝ⁺SO(4) with normalized representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalElement {
    p: Quat,
    q: Quat,
    lambda: f64,
}

impl ConformalElement {
    /// Normalizes an arbitrary nonzero pair into the fixed gauge.
    pub fn from_pair(p: Quat, q: Quat) -> Result<Self> {
        let np = p.norm();
        let nq = q.norm();
        if np == 0.0 || nq == 0.0 || !(np * nq).is_finite() {
            return Err(Error::ZeroQuaternion);
        }
        let lambda = np * nq;
        let s = lambda.sqrt();
        let mut p = p.scale(s / np);
        let mut q = q.scale(s / nq);
        let fixed = p.canonical_sign(SIGN_EPS * s);
        if fixed != p {
            p = -p;
            q = -q;
        }
        Ok(ConformalElement { p, q, lambda })
    }

    pub fn identity() -> Self {
        ConformalElement {
            p: ONE,
            q: ONE,
            lambda: 1.0,
        }
    }

    pub fn p(&self) -> Quat {
        self.p
    }

    pub fn q(&self) -> Quat {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn matrix(&self) -> Matrix4 {
        phi_matrix(self.p, self.q)
    }

    /// Group product: φ(p₁⊗q₁)∘φ(p₂⊗q₂) = φ(p₁p₂ ⊗ q₂q₁).
    pub fn compose(&self, other: &ConformalElement) -> ConformalElement {
        ConformalElement::from_pair(self.p * other.p, other.q * self.q)
            .expect("product of nonzero quaternions is nonzero")
    }

    pub fn inverse(&self) -> Result<ConformalElement> {
        ConformalElement::from_pair(self.p.inv()?, self.q.inv()?)
    }

    /// The other ℝ*-gauge representative of the same class, with both
    /// factors negated. Used for sign continuation along sample paths.
    pub fn flip_sign(&self) -> ConformalElement {
        ConformalElement {
            p: -self.p,
            q: -self.q,
            lambda: self.lambda,
        }
    }

    /// Distance between normalized representatives.
    pub fn distance(&self, other: &ConformalElement) -> f64 {
        let dp = (self.p - other.p).norm();
        let dq = (self.q - other.q).norm();
        (dp * dp + dq * dq).sqrt()
    }
}

/// Tests membership in ℝ⁺SO(4): returns λ > 0 with ‖MᵀM − λ²Id‖ ≤ tol·λ²
/// and det M > 0, or `None`.
pub fn is_conformal(m: &Matrix4, tol: f64) -> Option<f64> {
    let g = m.transpose().matmul(m);
    let lam2 = g.trace() / 4.0;
    if !(lam2 > 0.0) || !lam2.is_finite() {
        return None;
    }
    let residual = g.sub(&Matrix4::identity().scale(lam2)).frobenius_norm();
    if residual > tol * lam2 {
        return None;
    }
    if m.determinant() <= 0.0 {
        return None;
    }
    Some(lam2.sqrt())
}

/// Versor from a (numerically near-) rotation matrix on span(i, j, k),
/// via the most stable of the four Shepperd branches.
fn versor_from_mat3(r: &[[f64; 3]; 3]) -> Quat {
    let t = r[0][0] + r[1][1] + r[2][2];
    let candidates = [t, r[0][0], r[1][1], r[2][2]];
    let mut best = 0;
    for (idx, c) in candidates.iter().enumerate() {
        if *c > candidates[best] {
            best = idx;
        }
    }
    let u = match best {
        0 => {
            let s = (1.0 + t).max(0.0).sqrt() * 2.0;
            Quat::new(
                0.25 * s,
                (r[2][1] - r[1][2]) / s,
                (r[0][2] - r[2][0]) / s,
                (r[1][0] - r[0][1]) / s,
            )
        }
        1 => {
            let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).max(0.0).sqrt() * 2.0;
            Quat::new(
                (r[2][1] - r[1][2]) / s,
                0.25 * s,
                (r[0][1] + r[1][0]) / s,
                (r[0][2] + r[2][0]) / s,
            )
        }
        2 => {
            let s = (1.0 - r[0][0] + r[1][1] - r[2][2]).max(0.0).sqrt() * 2.0;
            Quat::new(
                (r[0][2] - r[2][0]) / s,
                (r[0][1] + r[1][0]) / s,
                0.25 * s,
                (r[1][2] + r[2][1]) / s,
            )
        }
        _ => {
            let s = (1.0 - r[0][0] - r[1][1] + r[2][2]).max(0.0).sqrt() * 2.0;
            Quat::new(
                (r[1][0] - r[0][1]) / s,
                (r[0][2] + r[2][0]) / s,
                (r[1][2] + r[2][1]) / s,
                0.25 * s,
            )
        }
    };
    u.normalized().expect("Shepperd branch yields a nonzero quaternion")
}

/// One Gauss-Newton step on ‖φ(p⊗q) − M‖ with the ℝ*-gauge direction
/// (p, −q) pinned to zero.
fn gauss_newton_polish(p: Quat, q: Quat, m: &Matrix4) -> (Quat, Quat) {
    let basis = [ONE, I, J, K];
    let residual = phi_matrix(p, q).sub(m);

    let mut a = nalgebra::DMatrix::<f64>::zeros(17, 8);
    let mut b = nalgebra::DVector::<f64>::zeros(17);
    let res_flat = residual.to_flat();
    for (row, v) in res_flat.iter().enumerate() {
        b[row] = -v;
    }
    for (col, e) in basis.iter().enumerate() {
        let dp = phi_matrix(*e, q).to_flat();
        let dq = phi_matrix(p, *e).to_flat();
        for row in 0..16 {
            a[(row, col)] = dp[row];
            a[(row, 4 + col)] = dq[row];
        }
    }
    // gauge row: updates orthogonal to d/dt (e^t p, e^-t q)
    let w = m.frobenius_norm().max(1.0);
    let pa = p.to_array();
    let qa = q.to_array();
    for col in 0..4 {
        a[(16, col)] = w * pa[col];
        a[(16, 4 + col)] = -w * qa[col];
    }

    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(step) => {
            let dp = Quat::new(step[0], step[1], step[2], step[3]);
            let dq = Quat::new(step[4], step[5], step[6], step[7]);
            (p + dp, q + dq)
        }
        Err(_) => (p, q),
    }
}

/// Factors a conformal matrix as the normalized class [p⊗q].
///
/// The extraction solves p·v·q = M(v) on the basis: with N = M/λ ∈ SO(4),
/// q = p⁻¹·N(1) and conjugation by p is the rotation g ↦ N(g)·N(1)⁻¹ on
/// the imaginary units.
pub fn conformal_factorize(m: &Matrix4, tol: f64) -> Result<ConformalElement> {
    let lambda = match is_conformal(m, tol) {
        Some(l) => l,
        None => {
            let g = m.transpose().matmul(m);
            let lam2 = (g.trace() / 4.0).max(f64::MIN_POSITIVE);
            let residual = g.sub(&Matrix4::identity().scale(lam2)).frobenius_norm() / lam2;
            return Err(Error::NotConformal {
                residual,
                tol,
                det: m.determinant(),
            });
        }
    };

    let n = m.scale(1.0 / lambda);
    let a0 = n.apply(ONE);
    let a0_inv = a0.inv()?;
    let mut r3 = [[0.0; 3]; 3];
    for (c, g) in [I, J, K].iter().enumerate() {
        let rg = n.apply(*g) * a0_inv;
        r3[0][c] = rg.x;
        r3[1][c] = rg.y;
        r3[2][c] = rg.z;
    }
    let p_unit = versor_from_mat3(&r3);
    let q_unit = p_unit.conj() * a0;

    let s = lambda.sqrt();
    let (p, q) = gauss_newton_polish(p_unit.scale(s), q_unit.scale(s), m);

    let elem = ConformalElement::from_pair(p, q)?;
    let err = elem.matrix().sub(m).frobenius_norm();
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    if err > tol * scale {
        return Err(Error::FactorizationUnstable {
            residual: err / scale,
            tol,
        });
    }
    Ok(elem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reflection() {
        assert_eq!(is_conformal(&Matrix4::identity(), 1e-9), Some(1.0));

        // orientation-reversing diag(1,1,1,-1) is rejected
        let mut m = Matrix4::identity();
        m.0[3][3] = -1.0;
        assert_eq!(is_conformal(&m, 1e-9), None);
    }

    #[test]
    fn lambda_of_simple_product() {
        // |1+i||j| = sqrt(2), via Prop-style norm identity
        let m = phi_matrix(ONE + I, J);
        let lam = is_conformal(&m, 1e-9).unwrap();
        assert!((lam - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn factorize_identity() {
        let e = conformal_factorize(&Matrix4::identity(), 1e-9).unwrap();
        assert!((e.p() - ONE).norm() < 1e-12);
        assert!((e.q() - ONE).norm() < 1e-12);
        assert!((e.lambda() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorize_minus_identity() {
        // 1·v·(-1) = -v; the canonical gauge puts the sign on q
        let e = conformal_factorize(&Matrix4::identity().scale(-1.0), 1e-9).unwrap();
        assert!((e.p() - ONE).norm() < 1e-12);
        assert!((e.q() + ONE).norm() < 1e-12);
        assert!((e.lambda() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorize_roundtrips() {
        let pairs = [
            (I, J),
            (Quat::new(0.3, -1.0, 0.2, 0.9), Quat::new(2.0, 0.1, -0.4, 0.6)),
            (Quat::new(-0.8, 0.0, 0.0, 0.1), Quat::new(0.0, 0.0, 1.3, 0.0)),
        ];
        for (p, q) in pairs {
            let m = phi_matrix(p, q);
            let e = conformal_factorize(&m, 1e-9).unwrap();
            let err = e.matrix().sub(&m).frobenius_norm();
            assert!(err <= 1e-12 * m.frobenius_norm(), "residual {err}");
            // and the class matches the normalized input pair
            let expect = ConformalElement::from_pair(p, q).unwrap();
            assert!(e.distance(&expect) < 1e-10);
        }
    }

    #[test]
    fn shear_is_rejected() {
        let mut m = Matrix4::identity();
        m.0[0][1] = 0.5;
        match conformal_factorize(&m, 1e-9) {
            Err(Error::NotConformal { .. }) => {}
            other => panic!("expected NotConformal, got {other:?}"),
        }
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = ConformalElement::from_pair(Quat::new(0.2, 1.0, 0.0, -0.5), J).unwrap();
        let b = ConformalElement::from_pair(I + K, Quat::new(1.0, 0.2, 0.3, 0.4)).unwrap();
        let lhs = a.compose(&b).matrix();
        let rhs = a.matrix().matmul(&b.matrix());
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-12 * rhs.frobenius_norm());
    }
}
