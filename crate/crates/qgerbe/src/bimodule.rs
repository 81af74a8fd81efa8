//! Four-dimensional ℍ-bimodules: two commuting quaternion actions on ℝ⁴,
//! the ε-frame that identifies such a module with ℍ, and the tensor
//! product over ℍ realized through frames.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{phi_matrix, Matrix4, Quat, I, J, K, ONE};
use crate::rotation::{delta, Rotation3};

/// Tolerance for the generator-relation checks at construction.
const ACTION_TOL: f64 = 1e-10;
/// Relative singular-value threshold for rank decisions.
const RANK_TOL: f64 = 1e-9;

/// Generator images of two commuting ℍ-actions on ℝ⁴.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bimodule {
    #[serde(rename = "Li")]
    li: Matrix4,
    #[serde(rename = "Lj")]
    lj: Matrix4,
    #[serde(rename = "Lk")]
    lk: Matrix4,
    #[serde(rename = "Ri")]
    ri: Matrix4,
    #[serde(rename = "Rj")]
    rj: Matrix4,
    #[serde(rename = "Rk")]
    rk: Matrix4,
}

fn check_algebra_action(gi: &Matrix4, gj: &Matrix4, gk: &Matrix4, side: &str) -> Result<()> {
    let id = Matrix4::identity();
    // a right action is an anti-homomorphism into matrix composition,
    // so the two-letter relations reverse: R_{pq} = R_q·R_p
    let rev = side == "right";
    let prod = |a: &Matrix4, b: &Matrix4| if rev { b.matmul(a) } else { a.matmul(b) };
    let rels: [(Matrix4, Matrix4, &str); 6] = [
        (gi.matmul(gi), id.scale(-1.0), "i^2 = -1"),
        (gj.matmul(gj), id.scale(-1.0), "j^2 = -1"),
        (gk.matmul(gk), id.scale(-1.0), "k^2 = -1"),
        (prod(gi, gj), *gk, "ij = k"),
        (prod(gj, gk), *gi, "jk = i"),
        (prod(gk, gi), *gj, "ki = j"),
    ];
    for (got, want, name) in rels {
        let r = got.sub(&want).frobenius_norm();
        if r > ACTION_TOL {
            return Err(Error::InvalidBimodule(format!(
                "{side} action violates {name} (residual {r:.3e})"
            )));
        }
    }
    Ok(())
}

impl Bimodule {
    /// Validates the generator relations for both actions and that the
    /// actions commute.
    pub fn new(
        li: Matrix4,
        lj: Matrix4,
        lk: Matrix4,
        ri: Matrix4,
        rj: Matrix4,
        rk: Matrix4,
    ) -> Result<Self> {
        check_algebra_action(&li, &lj, &lk, "left")?;
        check_algebra_action(&ri, &rj, &rk, "right")?;
        for (l, ln) in [(&li, "Li"), (&lj, "Lj"), (&lk, "Lk")] {
            for (r, rn) in [(&ri, "Ri"), (&rj, "Rj"), (&rk, "Rk")] {
                let c = l.matmul(r).sub(&r.matmul(l)).frobenius_norm();
                if c > ACTION_TOL {
                    return Err(Error::InvalidBimodule(format!(
                        "{ln} and {rn} do not commute (residual {c:.3e})"
                    )));
                }
            }
        }
        Ok(Bimodule { li, lj, lk, ri, rj, rk })
    }

    /// Left action of an arbitrary quaternion (extended ℝ-linearly).
    pub fn left(&self, p: Quat) -> Matrix4 {
        Matrix4::identity()
            .scale(p.w)
            .add(&self.li.scale(p.x))
            .add(&self.lj.scale(p.y))
            .add(&self.lk.scale(p.z))
    }

    /// Right action of an arbitrary quaternion.
    pub fn right(&self, p: Quat) -> Matrix4 {
        Matrix4::identity()
            .scale(p.w)
            .add(&self.ri.scale(p.x))
            .add(&self.rj.scale(p.y))
            .add(&self.rk.scale(p.z))
    }

    pub fn generators(&self) -> [&Matrix4; 6] {
        [&self.li, &self.lj, &self.lk, &self.ri, &self.rj, &self.rk]
    }
}

/// ℍ acting on itself by left and right multiplication.
pub fn standard_bimodule() -> Bimodule {
    Bimodule::new(
        phi_matrix(I, ONE),
        phi_matrix(J, ONE),
        phi_matrix(K, ONE),
        phi_matrix(ONE, I),
        phi_matrix(ONE, J),
        phi_matrix(ONE, K),
    )
    .expect("standard actions satisfy the relations exactly")
}

/// The standard module with the left action twisted: p acts as left
/// multiplication by α[p].
pub fn twist_bimodule(alpha: &Rotation3) -> Bimodule {
    Bimodule::new(
        phi_matrix(alpha.apply(I), ONE),
        phi_matrix(alpha.apply(J), ONE),
        phi_matrix(alpha.apply(K), ONE),
        phi_matrix(ONE, I),
        phi_matrix(ONE, J),
        phi_matrix(ONE, K),
    )
    .expect("twisting by an automorphism preserves the relations")
}

/// A vector with p·e = e·p for all p, determined up to real scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub e: Quat,
}

/// Solves the stacked system (L_i − R_i; L_j − R_j; L_k − R_k)·e = 0.
///
/// The kernel must be exactly one-dimensional; anything else signals
/// actions that are not a genuine bimodule pair.
pub fn identity_frame(b: &Bimodule) -> Result<Frame> {
    let mut a = nalgebra::DMatrix::<f64>::zeros(12, 4);
    let blocks = [
        b.li.sub(&b.ri),
        b.lj.sub(&b.rj),
        b.lk.sub(&b.rk),
    ];
    for (bi, block) in blocks.iter().enumerate() {
        for r in 0..4 {
            for c in 0..4 {
                a[(4 * bi + r, c)] = block.0[r][c];
            }
        }
    }
    let svd = a.svd(false, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let smax = sv[0].max(f64::MIN_POSITIVE);
    let nullity = sv.iter().filter(|s| **s <= RANK_TOL * smax).count();
    if nullity != 1 {
        return Err(Error::DegenerateBimodule { nullity });
    }
    let vt = svd.v_t.expect("requested V^T");
    let last = vt.nrows() - 1;
    let e = Quat::new(vt[(last, 0)], vt[(last, 1)], vt[(last, 2)], vt[(last, 3)]);
    Ok(Frame {
        e: e.normalized()?.canonical_sign(1e-12),
    })
}

/// The SO(3) object of a bimodule, derived from its frame.
pub fn classifier(b: &Bimodule) -> Result<Rotation3> {
    let f = identity_frame(b)?;
    delta(f.e)
}

/// Tensor product over ℍ of two four-dimensional bimodules, realized on
/// ℝ⁴ by identifying each factor with ℍ through its ε-frame. The result
/// is the standard module twisted by the product of the two classifiers.
pub fn bimodule_tensor(a: &Bimodule, b: &Bimodule) -> Result<Bimodule> {
    let ca = classifier(a)?;
    let cb = classifier(b)?;
    Ok(twist_bimodule(&ca.compose(&cb)))
}

/// Singular values of the commutant system {X : XL_g = L_gX, XR_g = R_gX}
/// for the generators of `b`, sorted descending. The kernel dimension of
/// this 96x16 system is the dimension of the bimodule automorphisms.
pub fn commutant_singular_values(b: &Bimodule) -> Vec<f64> {
    let mut a = nalgebra::DMatrix::<f64>::zeros(96, 16);
    let mut row_block = 0;
    for g in b.generators() {
        // rows: entries of X·g − g·X = 0 as linear constraints on vec(X)
        for r in 0..4 {
            for c in 0..4 {
                let row = 16 * row_block + 4 * r + c;
                for k in 0..4 {
                    // (XG)_{rc} term: X_{rk} G_{kc}
                    a[(row, 4 * r + k)] += g.0[k][c];
                    // (GX)_{rc} term: G_{rk} X_{kc}
                    a[(row, 4 * k + c)] -= g.0[r][k];
                }
            }
        }
        row_block += 1;
    }
    let svd = a.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Numerical nullity of the commutant system at the crate rank tolerance.
pub fn commutant_nullity(b: &Bimodule) -> usize {
    let sv = commutant_singular_values(b);
    let smax = sv[0].max(f64::MIN_POSITIVE);
    sv.iter().filter(|s| **s <= RANK_TOL * smax).count()
}
