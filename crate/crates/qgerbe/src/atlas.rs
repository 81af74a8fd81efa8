//! Charted spaces with quaternion-valued coordinates, conformal transition
//! maps built from primitive steps, their Jacobians, and the tangent
//! bitorsor cocycle extracted from Jacobian factorizations.
//!
//! Conventions. A chart chain C_i sends global model coordinates to chart
//! i coordinates. The transition T_ij = C_i ∘ C_j⁻¹ sends chart j
//! coordinates to chart i coordinates, so J_ik(x) = J_ij(T_jk x)·J_jk(x)
//! exactly, by the chain rule. Overlap sample points are stored in the
//! coordinates of the FIRST chart of the overlap's index tuple; chart-j
//! arguments for T_ij are recovered through the inverse chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::conformal::{conformal_factorize, ConformalElement};
use crate::error::{Error, Result};
use crate::gerbe::BitorsorCocycle;
use crate::nerve::{build_nerve, CoverSpec, Nerve, PairOverlap, QuadOverlap, TripleOverlap};
use crate::quat::{phi_matrix, Matrix4, Quat, ONE};
use crate::rotation::{delta, Rotation3};

/// Inversion steps reject arguments this close to the pole at 0.
pub const POLE_EPS: f64 = 1e-12;

/// Default tolerance for Jacobian factorization.
pub const JACOBIAN_TOL: f64 = 1e-9;

/// A primitive coordinate change on ℍ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "arg", rename_all = "snake_case")]
pub enum Step {
    LeftMul(Quat),
    RightMul(Quat),
    Translate(Quat),
    Invert,
    /// General linear map; the one primitive whose Jacobian can leave
    /// the conformal group, so factorization failure is exercisable.
    LinearMap(Matrix4),
}

impl Step {
    fn eval(&self, x: Quat) -> Result<Quat> {
        match self {
            Step::LeftMul(q) => Ok(*q * x),
            Step::RightMul(q) => Ok(x * *q),
            Step::Translate(t) => Ok(x + *t),
            Step::Invert => {
                if x.norm() < POLE_EPS {
                    return Err(Error::PoleHit(x.norm()));
                }
                x.inv()
            }
            Step::LinearMap(m) => Ok(m.apply(x)),
        }
    }

    /// Jacobian of the step at x, as a 4x4 real matrix.
    fn jacobian(&self, x: Quat) -> Result<Matrix4> {
        match self {
            Step::LeftMul(q) => Ok(phi_matrix(*q, ONE)),
            Step::RightMul(q) => Ok(phi_matrix(ONE, *q)),
            Step::Translate(_) => Ok(Matrix4::identity()),
            Step::Invert => {
                if x.norm() < POLE_EPS {
                    return Err(Error::PoleHit(x.norm()));
                }
                let xi = x.inv()?;
                // d(x⁻¹) = -x⁻¹ dx x⁻¹
                Ok(phi_matrix(xi, xi).scale(-1.0))
            }
            Step::LinearMap(m) => Ok(*m),
        }
    }

    fn inverse(&self) -> Result<Step> {
        match self {
            Step::LeftMul(q) => Ok(Step::LeftMul(q.inv()?)),
            Step::RightMul(q) => Ok(Step::RightMul(q.inv()?)),
            Step::Translate(t) => Ok(Step::Translate(-*t)),
            Step::Invert => Ok(Step::Invert),
            Step::LinearMap(m) => {
                let nm: nalgebra::Matrix4<f64> = (*m).into();
                let inv = nm.try_inverse().ok_or(Error::SingularStep)?;
                Ok(Step::LinearMap(inv.into()))
            }
        }
    }
}

/// A coordinate change given as a chain of primitive steps, applied
/// left to right.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransitionMap {
    pub chain: Vec<Step>,
}

impl TransitionMap {
    pub fn identity() -> TransitionMap {
        TransitionMap { chain: Vec::new() }
    }

    pub fn new(chain: Vec<Step>) -> TransitionMap {
        TransitionMap { chain }
    }

    pub fn eval(&self, x: Quat) -> Result<Quat> {
        let mut v = x;
        for step in &self.chain {
            v = step.eval(v)?;
        }
        Ok(v)
    }

    /// Analytic Jacobian at x by the chain rule over the steps.
    pub fn jacobian(&self, x: Quat) -> Result<Matrix4> {
        let mut v = x;
        let mut j = Matrix4::identity();
        for step in &self.chain {
            j = step.jacobian(v)?.matmul(&j);
            v = step.eval(v)?;
        }
        Ok(j)
    }

    /// Central-difference Jacobian at x with step h, for cross-checking
    /// the analytic one.
    pub fn jacobian_fd(&self, x: Quat, h: f64) -> Result<Matrix4> {
        let scale = x.norm().max(1.0);
        if !(h > f64::EPSILON * scale * 8.0) {
            return Err(Error::StepTooSmall(h));
        }
        let basis = [ONE, crate::quat::I, crate::quat::J, crate::quat::K];
        let mut cols = [Quat::zero(); 4];
        for (b, e) in basis.iter().enumerate() {
            let plus = self.eval(x + e.scale(h))?;
            let minus = self.eval(x - e.scale(h))?;
            cols[b] = (plus - minus).scale(1.0 / (2.0 * h));
        }
        Ok(Matrix4::from_columns(cols))
    }

    /// Chain that undoes this one: inverted steps in reverse order.
    pub fn inverse(&self) -> Result<TransitionMap> {
        let chain = self
            .chain
            .iter()
            .rev()
            .map(Step::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitionMap { chain })
    }

    /// The composite `self ∘ other` (other first).
    pub fn after(&self, other: &TransitionMap) -> TransitionMap {
        let mut chain = other.chain.clone();
        chain.extend(self.chain.iter().cloned());
        TransitionMap { chain }
    }
}

/// One charted overlap with its transition map and its own sample points
/// in chart-i coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasPair {
    pub ij: [usize; 2],
    #[serde(flatten)]
    pub map: TransitionMap,
    pub points: Vec<Quat>,
}

/// Triple overlap sample points in chart-i coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasTriple {
    pub ijk: [usize; 3],
    pub points: Vec<Quat>,
}

/// Quadruple overlap sample points in chart-i coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasQuad {
    pub ijkl: [usize; 4],
    pub points: Vec<Quat>,
}

/// A charted space: transition chains on ascending pairs plus sampled
/// higher overlaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub name: String,
    pub charts: usize,
    pub pairs: Vec<AtlasPair>,
    #[serde(default)]
    pub triples: Vec<AtlasTriple>,
    #[serde(default)]
    pub quads: Vec<AtlasQuad>,
}

impl Atlas {
    pub fn pair_map(&self, i: usize, j: usize) -> Result<&TransitionMap> {
        self.pairs
            .iter()
            .find(|p| p.ij == [i, j])
            .map(|p| &p.map)
            .ok_or_else(|| Error::MalformedCover(format!("no transition map for pair ({i},{j})")))
    }
}

/// Builtin atlas names, for discovery.
pub const BUILTIN_ATLASES: [&str; 4] =
    ["s4_stereo", "affine", "torus_identity", "synthetic_conformal"];

fn smooth_path(rng: &mut ChaCha8Rng, n: usize, anchor: Quat, radius: f64) -> Vec<Quat> {
    // a low-degree curve through the sample budget, so consecutive points
    // are close and gauge continuity along the list is meaningful
    let dir1 = Quat::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let dir2 = Quat::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    (0..n)
        .map(|s| {
            let t = if n > 1 { s as f64 / (n - 1) as f64 } else { 0.0 };
            anchor + dir1.scale(radius * t) + dir2.scale(radius * t * t)
        })
        .collect()
}

/// Constructs a named builtin atlas with `per_simplex` own sample points
/// per overlap, deterministically from `seed`.
pub fn builtin_atlas(name: &str, per_simplex: usize, seed: u64) -> Result<Atlas> {
    let chart_chains: Vec<TransitionMap> = match name {
        "s4_stereo" => vec![
            TransitionMap::identity(),
            TransitionMap::new(vec![Step::Invert]),
        ],
        "affine" => vec![
            TransitionMap::identity(),
            TransitionMap::new(vec![
                Step::Translate(Quat::new(0.3, -0.2, 0.5, 0.1)),
                Step::LeftMul(Quat::new(1.1, 0.4, -0.2, 0.3)),
            ]),
            TransitionMap::new(vec![
                Step::RightMul(Quat::new(0.8, -0.3, 0.6, 0.2)),
                Step::Translate(Quat::new(-0.4, 0.7, 0.1, -0.5)),
            ]),
        ],
        "torus_identity" => vec![TransitionMap::identity(); 4],
        "synthetic_conformal" => vec![
            TransitionMap::identity(),
            TransitionMap::new(vec![
                Step::LeftMul(Quat::new(0.9, 0.3, -0.1, 0.4)),
                Step::Translate(Quat::new(0.2, -0.5, 0.3, 0.1)),
            ]),
            TransitionMap::new(vec![
                Step::Translate(Quat::new(0.4, 0.1, -0.2, 0.3)),
                Step::Invert,
                Step::RightMul(Quat::new(1.2, -0.2, 0.5, 0.1)),
            ]),
            TransitionMap::new(vec![
                Step::RightMul(Quat::new(0.7, 0.6, 0.1, -0.3)),
                Step::Invert,
                Step::Translate(Quat::new(-0.1, 0.4, 0.2, 0.5)),
                Step::LeftMul(Quat::new(1.0, -0.3, 0.2, 0.6)),
            ]),
        ],
        other => return Err(Error::UnknownAtlas(other.to_string())),
    };
    let n = chart_chains.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0061_746c_6173);

    // global sample curves live near 2·1, away from every inversion pole
    let anchor = Quat::new(2.0, 0.1, -0.1, 0.2);
    let fresh_global = |rng: &mut ChaCha8Rng| smooth_path(rng, per_simplex, anchor, 0.25);

    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    let mut quads = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let pts = fresh_global(&mut rng)
                .into_iter()
                .map(|g| chart_chains[i].eval(g))
                .collect::<Result<Vec<_>>>()?;
            let map = chart_chains[i].after(&chart_chains[j].inverse()?);
            pairs.push(AtlasPair {
                ij: [i, j],
                map,
                points: pts,
            });
            for k in (j + 1)..n {
                let pts = fresh_global(&mut rng)
                    .into_iter()
                    .map(|g| chart_chains[i].eval(g))
                    .collect::<Result<Vec<_>>>()?;
                triples.push(AtlasTriple {
                    ijk: [i, j, k],
                    points: pts,
                });
                for l in (k + 1)..n {
                    let pts = fresh_global(&mut rng)
                        .into_iter()
                        .map(|g| chart_chains[i].eval(g))
                        .collect::<Result<Vec<_>>>()?;
                    quads.push(AtlasQuad {
                        ijkl: [i, j, k, l],
                        points: pts,
                    });
                }
            }
        }
    }
    Ok(Atlas {
        name: name.to_string(),
        charts: n,
        pairs,
        triples,
        quads,
    })
}

/// Builds the cover nerve of an atlas. Own points of each overlap are
/// pushed into every face; when the face drops the last chart of the
/// tuple, the points are converted with the corresponding transition map.
pub fn atlas_nerve(atlas: &Atlas) -> Result<Nerve> {
    let mut chart_pts: Vec<Vec<Quat>> = vec![Vec::new(); atlas.charts];
    let mut pair_pts: BTreeMap<(usize, usize), Vec<Quat>> = BTreeMap::new();
    let mut triple_pts: BTreeMap<(usize, usize, usize), Vec<Quat>> = BTreeMap::new();
    for p in &atlas.pairs {
        pair_pts.insert((p.ij[0], p.ij[1]), p.points.clone());
    }
    for t in &atlas.triples {
        triple_pts.insert((t.ijk[0], t.ijk[1], t.ijk[2]), t.points.clone());
    }

    fn push(list: &mut Vec<Quat>, pts: &[Quat]) -> Vec<usize> {
        let base = list.len();
        list.extend_from_slice(pts);
        (base..base + pts.len()).collect()
    }

    let mut quads = Vec::new();
    for q in &atlas.quads {
        let [i, j, k, l] = q.ijkl;
        let missing =
            |t: (usize, usize, usize)| Error::MalformedCover(format!("quad face {t:?} missing"));
        // chart-j coordinates for the face that drops chart i
        let t_ji = atlas.pair_map(i, j)?.inverse()?;
        let in_j_coords = q
            .points
            .iter()
            .map(|x| t_ji.eval(*x))
            .collect::<Result<Vec<_>>>()?;
        let in_ijk = push(
            triple_pts.get_mut(&(i, j, k)).ok_or(missing((i, j, k)))?,
            &q.points,
        );
        let in_ijl = push(
            triple_pts.get_mut(&(i, j, l)).ok_or(missing((i, j, l)))?,
            &q.points,
        );
        let in_ikl = push(
            triple_pts.get_mut(&(i, k, l)).ok_or(missing((i, k, l)))?,
            &q.points,
        );
        let in_jkl = push(
            triple_pts.get_mut(&(j, k, l)).ok_or(missing((j, k, l)))?,
            &in_j_coords,
        );
        quads.push(QuadOverlap {
            i,
            j,
            k,
            l,
            points: q.points.clone(),
            in_ijk,
            in_ijl,
            in_ikl,
            in_jkl,
        });
    }

    let mut triple_overlaps = Vec::new();
    for ((i, j, k), pts) in &triple_pts {
        let missing = |p: (usize, usize)| Error::MalformedCover(format!("triple face {p:?} missing"));
        let t_ji = atlas.pair_map(*i, *j)?.inverse()?;
        let in_j_coords = pts.iter().map(|x| t_ji.eval(*x)).collect::<Result<Vec<_>>>()?;
        let in_ij = push(pair_pts.get_mut(&(*i, *j)).ok_or(missing((*i, *j)))?, pts);
        let in_jk = push(
            pair_pts.get_mut(&(*j, *k)).ok_or(missing((*j, *k)))?,
            &in_j_coords,
        );
        let in_ik = push(pair_pts.get_mut(&(*i, *k)).ok_or(missing((*i, *k)))?, pts);
        triple_overlaps.push(TripleOverlap {
            i: *i,
            j: *j,
            k: *k,
            points: pts.clone(),
            in_ij,
            in_jk,
            in_ik,
        });
    }

    let mut pair_overlaps = Vec::new();
    for ((i, j), pts) in &pair_pts {
        let t_ji = atlas.pair_map(*i, *j)?.inverse()?;
        let in_j_coords = pts.iter().map(|x| t_ji.eval(*x)).collect::<Result<Vec<_>>>()?;
        let in_i = push(&mut chart_pts[*i], pts);
        let in_j = push(&mut chart_pts[*j], &in_j_coords);
        pair_overlaps.push(PairOverlap {
            i: *i,
            j: *j,
            points: pts.clone(),
            in_i,
            in_j,
        });
    }

    build_nerve(CoverSpec {
        charts: chart_pts,
        pairs: pair_overlaps,
        triples: triple_overlaps,
        quads,
    })
}

/// Factorizes the transition Jacobians of every pair at its nerve sample
/// points, continuing the ℝ*-gauge sign along each point list instead of
/// re-canonicalizing per point.
pub fn factorize_transitions(
    atlas: &Atlas,
    nerve: &Nerve,
    tol: f64,
) -> Result<BTreeMap<(usize, usize), Vec<ConformalElement>>> {
    let mut out = BTreeMap::new();
    for pair in nerve.pairs() {
        let map = atlas.pair_map(pair.i, pair.j)?;
        let inv = map.inverse()?;
        let mut elems: Vec<ConformalElement> = Vec::with_capacity(pair.points.len());
        for x in &pair.points {
            let e = conformal_factorize(&map.jacobian(inv.eval(*x)?)?, tol)?;
            let aligned = match elems.last() {
                None => e,
                Some(prev) => {
                    let d = e.p().dot(prev.p());
                    if d.abs() < 1e-9 * e.p().norm() * prev.p().norm() {
                        return Err(Error::GaugeInconsistency {
                            i: pair.i,
                            j: pair.j,
                        });
                    }
                    if d < 0.0 {
                        e.flip_sign()
                    } else {
                        e
                    }
                }
            };
            elems.push(aligned);
        }
        out.insert((pair.i, pair.j), elems);
    }
    Ok(out)
}

/// How transition Jacobians are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum JacobianMode {
    Analytic,
    /// Central differences with the given step; falls back to Richardson
    /// extrapolation (steps h and h/2) when the plain estimate is not
    /// conformal at the working tolerance.
    FiniteDifference { h: f64 },
}

fn jacobian_in_mode(map: &TransitionMap, x: Quat, mode: JacobianMode) -> Result<Matrix4> {
    match mode {
        JacobianMode::Analytic => map.jacobian(x),
        JacobianMode::FiniteDifference { h } => map.jacobian_fd(x, h),
    }
}

fn factorize_in_mode(
    map: &TransitionMap,
    x: Quat,
    mode: JacobianMode,
    tol: f64,
) -> Result<ConformalElement> {
    let j = jacobian_in_mode(map, x, mode)?;
    match conformal_factorize(&j, tol) {
        Ok(e) => Ok(e),
        Err(first) => {
            if let JacobianMode::FiniteDifference { h } = mode {
                let coarse = map.jacobian_fd(x, h)?;
                let fine = map.jacobian_fd(x, h / 2.0)?;
                let rich = fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0));
                if let Ok(e) = conformal_factorize(&rich, tol) {
                    return Ok(e);
                }
            }
            Err(first)
        }
    }
}

/// Extracts the tangent bitorsor cocycle of an atlas: with J_ij = φ(x⊗y)
/// and w_ij = y·x, the pair field is α_ij = δ(w_ij) and the triple field
/// is the commutator p_ijk = y_jk·w_ij·y_jk⁻¹·w_ij⁻¹; the scale-free
/// gauge of the factors cancels in both expressions.
pub fn build_tangent_cocycle(
    atlas: &Atlas,
    tol: f64,
    mode: JacobianMode,
) -> Result<BitorsorCocycle> {
    let nerve = atlas_nerve(atlas)?;

    let mut alpha = BTreeMap::new();
    for pair in nerve.pairs() {
        let map = atlas.pair_map(pair.i, pair.j)?;
        let inv = map.inverse()?;
        let vals = pair
            .points
            .iter()
            .map(|x| {
                let e = factorize_in_mode(map, inv.eval(*x)?, mode, tol)?;
                delta(e.q() * e.p())
            })
            .collect::<Result<Vec<Rotation3>>>()?;
        alpha.insert((pair.i, pair.j), vals);
    }

    let mut p = BTreeMap::new();
    for t in nerve.triples() {
        let t_ij = atlas.pair_map(t.i, t.j)?;
        let t_jk = atlas.pair_map(t.j, t.k)?;
        let t_ji = t_ij.inverse()?;
        let t_kj = t_jk.inverse()?;
        let vals = t
            .points
            .iter()
            .map(|x| {
                // points are chart-i coordinates; pull back to j and k
                let xj = t_ji.eval(*x)?;
                let xk = t_kj.eval(xj)?;
                let e_jk = factorize_in_mode(t_jk, xk, mode, tol)?;
                let y_jk = e_jk.q();
                let e_ij = factorize_in_mode(t_ij, xj, mode, tol)?;
                let w_ij = e_ij.q() * e_ij.p();
                Ok(y_jk * w_ij * y_jk.inv()? * w_ij.inv()?)
            })
            .collect::<Result<Vec<Quat>>>()?;
        p.insert((t.i, t.j, t.k), vals);
    }

    Ok(BitorsorCocycle { nerve, alpha, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{I, J, K};

    #[test]
    fn step_eval_basics() {
        let x = Quat::new(1.0, 2.0, -1.0, 0.5);
        assert_eq!(Step::LeftMul(I).eval(x).unwrap(), I * x);
        assert_eq!(Step::RightMul(J).eval(x).unwrap(), x * J);
        assert_eq!(Step::Translate(K).eval(x).unwrap(), x + K);
        let inv = Step::Invert.eval(x).unwrap();
        assert!((inv * x - ONE).norm() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        match Step::Invert.eval(Quat::zero()) {
            Err(Error::PoleHit(n)) => assert_eq!(n, 0.0),
            other => panic!("expected PoleHit, got {other:?}"),
        }
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let map = TransitionMap::new(vec![
            Step::LeftMul(Quat::new(0.9, 0.3, -0.1, 0.4)),
            Step::Translate(Quat::new(0.2, -0.5, 0.3, 0.1)),
            Step::Invert,
            Step::RightMul(Quat::new(1.2, -0.2, 0.5, 0.1)),
        ]);
        let x = Quat::new(1.8, 0.3, -0.2, 0.4);
        let ja = map.jacobian(x).unwrap();
        let jf = map.jacobian_fd(x, 1e-5 * x.norm().max(1.0)).unwrap();
        let rel = ja.sub(&jf).frobenius_norm() / ja.frobenius_norm();
        assert!(rel < 1e-8, "relative disagreement {rel}");
    }

    #[test]
    fn fd_step_underflow_is_rejected() {
        let map = TransitionMap::new(vec![Step::Invert]);
        match map.jacobian_fd(ONE, 1e-17) {
            Err(Error::StepTooSmall(h)) => assert_eq!(h, 1e-17),
            other => panic!("expected StepTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn inverse_chain_roundtrips() {
        let map = TransitionMap::new(vec![
            Step::Translate(Quat::new(0.4, 0.1, -0.2, 0.3)),
            Step::Invert,
            Step::RightMul(Quat::new(1.2, -0.2, 0.5, 0.1)),
        ]);
        let inv = map.inverse().unwrap();
        let x = Quat::new(2.1, -0.3, 0.2, 0.5);
        let back = inv.eval(map.eval(x).unwrap()).unwrap();
        assert!((back - x).norm() < 1e-13);
    }

    #[test]
    fn nonconformal_linear_step_is_rejected() {
        let mut m = Matrix4::identity();
        m.0[0][1] = 0.7;
        let map = TransitionMap::new(vec![Step::LinearMap(m)]);
        let j = map.jacobian(ONE).unwrap();
        match conformal_factorize(&j, 1e-9) {
            Err(Error::NotConformal { .. }) => {}
            other => panic!("expected NotConformal, got {other:?}"),
        }
    }

    #[test]
    fn unknown_atlas_name() {
        match builtin_atlas("moebius", 3, 1) {
            Err(Error::UnknownAtlas(n)) => assert_eq!(n, "moebius"),
            other => panic!("expected UnknownAtlas, got {other:?}"),
        }
    }

    #[test]
    fn builtin_atlases_build_nerves() {
        for name in BUILTIN_ATLASES {
            let atlas = builtin_atlas(name, 3, 7).unwrap();
            let nerve = atlas_nerve(&atlas).unwrap();
            assert_eq!(nerve.chart_count(), atlas.charts);
        }
    }

    #[test]
    fn stereographic_transition_is_inversion() {
        let atlas = builtin_atlas("s4_stereo", 4, 2).unwrap();
        let map = atlas.pair_map(0, 1).unwrap();
        let x = Quat::new(0.5, 0.2, -0.1, 0.3);
        assert!((map.eval(x).unwrap() - x.inv().unwrap()).norm() < 1e-15);
    }
}
