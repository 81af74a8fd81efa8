//! Bitorsor cocycles in trivialized components over a cover nerve:
//! an SO(3) twist per ordered pair and an ℍ*-value per triple, with
//! coherence checked on triples and quadruples, coboundary equivalence,
//! and a seeded generator for synthetic test cocycles.
//!
//! Morphism-level identities are compared modulo ℝ⁺ scaling: the band's
//! center leaves the normalized quaternion as the checkable part. Object
//! (SO(3)) identities are checked strictly, in Frobenius norm on 3x3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groupoid::{compose_tol, tensor, GroupoidMorphism};
use crate::nerve::{CoverSpec, Nerve, OverlapId};
use crate::quat::Quat;
use crate::rotation::{delta, Rotation3};

/// Default verification tolerance for synthetic cocycles.
pub const COCYCLE_TOL: f64 = 1e-10;

/// Object field α_ij per ordered pair and morphism field p_ijk per triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CocycleFile", into = "CocycleFile")]
pub struct BitorsorCocycle {
    pub nerve: Nerve,
    pub alpha: BTreeMap<(usize, usize), Vec<Rotation3>>,
    pub p: BTreeMap<(usize, usize, usize), Vec<Quat>>,
}

/// Per-chart object field m_i and per-pair morphism field n_ij.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoboundaryData {
    pub m: Vec<Vec<Rotation3>>,
    pub n: BTreeMap<(usize, usize), Vec<Quat>>,
}

/// Residual summary for one simplex of a check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexCheck {
    pub simplex: Vec<usize>,
    pub level: String,
    pub max_residual: f64,
    pub argmax_point: usize,
}

/// Worst residual over the whole check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Worst {
    pub simplex: Vec<usize>,
    pub point_index: usize,
    pub residual: f64,
}

/// Verdict of a cocycle or coboundary check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub pass: bool,
    /// true when the nerve has no triples, so coherence holds vacuously
    pub vacuous: bool,
    pub tol: f64,
    pub worst: Option<Worst>,
    pub per_simplex: Vec<SimplexCheck>,
}

impl CheckReport {
    fn from_simplices(per_simplex: Vec<SimplexCheck>, tol: f64, vacuous: bool) -> CheckReport {
        let worst = per_simplex
            .iter()
            .max_by(|a, b| a.max_residual.partial_cmp(&b.max_residual).unwrap())
            .map(|s| Worst {
                simplex: s.simplex.clone(),
                point_index: s.argmax_point,
                residual: s.max_residual,
            });
        let pass = per_simplex.iter().all(|s| s.max_residual <= tol);
        CheckReport {
            pass,
            vacuous,
            tol,
            worst,
            per_simplex,
        }
    }
}

/// Distance between the ℝ⁺-classes of two nonzero quaternions: compare
/// unit representatives (sign is NOT quotiented out).
fn scale_free_dist(a: Quat, b: Quat) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    (a.scale(1.0 / na) - b.scale(1.0 / nb)).norm()
}

fn max_argmax(residuals: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, r) in residuals.iter().enumerate() {
        if *r > best.0 {
            best = (*r, i);
        }
    }
    (best.0.max(0.0), best.1)
}

impl BitorsorCocycle {
    /// α_ij = id and p_ijk = 1 everywhere.
    pub fn trivial(nerve: Nerve) -> BitorsorCocycle {
        let alpha = nerve
            .pairs()
            .iter()
            .map(|p| {
                (
                    (p.i, p.j),
                    vec![Rotation3::identity(); p.points.len()],
                )
            })
            .collect();
        let p = nerve
            .triples()
            .iter()
            .map(|t| ((t.i, t.j, t.k), vec![crate::quat::ONE; t.points.len()]))
            .collect();
        BitorsorCocycle { nerve, alpha, p }
    }

    fn alpha_on(&self, i: usize, j: usize) -> Result<&Vec<Rotation3>> {
        self.alpha
            .get(&(i, j))
            .ok_or_else(|| Error::MissingField(OverlapId::Pair(i, j).to_string()))
    }

    fn p_on(&self, i: usize, j: usize, k: usize) -> Result<&Vec<Quat>> {
        self.p
            .get(&(i, j, k))
            .ok_or_else(|| Error::MissingField(OverlapId::Triple(i, j, k).to_string()))
    }

    /// Checks that fields cover every pair and triple of the nerve, with
    /// matching sample counts.
    pub fn validate_coverage(&self) -> Result<()> {
        for pair in self.nerve.pairs() {
            let f = self.alpha_on(pair.i, pair.j)?;
            if f.len() != pair.points.len() {
                return Err(Error::MalformedCover(format!(
                    "alpha field on ({},{}) has {} values for {} samples",
                    pair.i,
                    pair.j,
                    f.len(),
                    pair.points.len()
                )));
            }
        }
        for t in self.nerve.triples() {
            let f = self.p_on(t.i, t.j, t.k)?;
            if f.len() != t.points.len() {
                return Err(Error::MalformedCover(format!(
                    "p field on ({},{},{}) has {} values for {} samples",
                    t.i,
                    t.j,
                    t.k,
                    f.len(),
                    t.points.len()
                )));
            }
            if f.iter().any(|v| v.is_zero()) {
                return Err(Error::ZeroQuaternion);
            }
        }
        Ok(())
    }
}

/// Verifies the two cocycle identities in component form:
/// per triple δ(p_ijk)·α_ij·α_jk = α_ik, and per quadruple
/// p_ikl·p_ijk = p_ijl·α_ij[p_jkl] modulo ℝ⁺.
pub fn check_cocycle(c: &BitorsorCocycle, tol: f64) -> Result<CheckReport> {
    c.validate_coverage()?;
    let nerve = &c.nerve;

    let triple_checks: Vec<Result<SimplexCheck>> = nerve
        .triples()
        .par_iter()
        .map(|t| {
            let id = OverlapId::Triple(t.i, t.j, t.k);
            let a_ij = nerve.restrict(c.alpha_on(t.i, t.j)?, OverlapId::Pair(t.i, t.j), id)?;
            let a_jk = nerve.restrict(c.alpha_on(t.j, t.k)?, OverlapId::Pair(t.j, t.k), id)?;
            let a_ik = nerve.restrict(c.alpha_on(t.i, t.k)?, OverlapId::Pair(t.i, t.k), id)?;
            let p_t = c.p_on(t.i, t.j, t.k)?;
            let residuals: Vec<f64> = (0..t.points.len())
                .map(|s| {
                    let lhs = delta(p_t[s])?.compose(&a_ij[s]).compose(&a_jk[s]);
                    Ok(lhs.distance(&a_ik[s]))
                })
                .collect::<Result<_>>()?;
            let (max_residual, argmax_point) = max_argmax(&residuals);
            Ok(SimplexCheck {
                simplex: vec![t.i, t.j, t.k],
                level: "triple".into(),
                max_residual,
                argmax_point,
            })
        })
        .collect();

    let quad_checks: Vec<Result<SimplexCheck>> = nerve
        .quads()
        .par_iter()
        .map(|q| {
            let id = OverlapId::Quad(q.i, q.j, q.k, q.l);
            let restrict_p = |a: usize, b: usize, c_: usize| -> Result<Vec<Quat>> {
                nerve.restrict(c.p_on(a, b, c_)?, OverlapId::Triple(a, b, c_), id)
            };
            let p_ijk = restrict_p(q.i, q.j, q.k)?;
            let p_ijl = restrict_p(q.i, q.j, q.l)?;
            let p_ikl = restrict_p(q.i, q.k, q.l)?;
            let p_jkl = restrict_p(q.j, q.k, q.l)?;
            let a_ij = nerve.restrict(c.alpha_on(q.i, q.j)?, OverlapId::Pair(q.i, q.j), id)?;
            let residuals: Vec<f64> = (0..q.points.len())
                .map(|s| {
                    let lhs = p_ikl[s] * p_ijk[s];
                    let rhs = p_ijl[s] * a_ij[s].apply(p_jkl[s]);
                    scale_free_dist(lhs, rhs)
                })
                .collect();
            let (max_residual, argmax_point) = max_argmax(&residuals);
            Ok(SimplexCheck {
                simplex: vec![q.i, q.j, q.k, q.l],
                level: "quad".into(),
                max_residual,
                argmax_point,
            })
        })
        .collect();

    let mut per_simplex = Vec::new();
    for r in triple_checks.into_iter().chain(quad_checks) {
        per_simplex.push(r?);
    }
    let vacuous = nerve.triples().is_empty();
    Ok(CheckReport::from_simplices(per_simplex, tol, vacuous))
}

/// Independent evaluation path for the same identities: both are
/// re-evaluated by building groupoid arrows and using only `tensor` and
/// `compose`, never the hand-expanded component formulas.
pub fn groupoid_oracle_check(c: &BitorsorCocycle, tol: f64) -> Result<CheckReport> {
    c.validate_coverage()?;
    let nerve = &c.nerve;

    let triple_checks: Vec<Result<SimplexCheck>> = nerve
        .triples()
        .par_iter()
        .map(|t| {
            let id = OverlapId::Triple(t.i, t.j, t.k);
            let a_ij = nerve.restrict(c.alpha_on(t.i, t.j)?, OverlapId::Pair(t.i, t.j), id)?;
            let a_jk = nerve.restrict(c.alpha_on(t.j, t.k)?, OverlapId::Pair(t.j, t.k), id)?;
            let a_ik = nerve.restrict(c.alpha_on(t.i, t.k)?, OverlapId::Pair(t.i, t.k), id)?;
            let p_t = c.p_on(t.i, t.j, t.k)?;
            let residuals: Vec<f64> = (0..t.points.len())
                .map(|s| {
                    let psi = GroupoidMorphism::new(p_t[s], a_ij[s].compose(&a_jk[s]))?;
                    Ok(psi.target().distance(&a_ik[s]))
                })
                .collect::<Result<_>>()?;
            let (max_residual, argmax_point) = max_argmax(&residuals);
            Ok(SimplexCheck {
                simplex: vec![t.i, t.j, t.k],
                level: "triple".into(),
                max_residual,
                argmax_point,
            })
        })
        .collect();

    let quad_checks: Vec<Result<SimplexCheck>> = nerve
        .quads()
        .par_iter()
        .map(|q| {
            let id = OverlapId::Quad(q.i, q.j, q.k, q.l);
            let restrict_p = |a: usize, b: usize, c_: usize| -> Result<Vec<Quat>> {
                nerve.restrict(c.p_on(a, b, c_)?, OverlapId::Triple(a, b, c_), id)
            };
            let restrict_a = |a: usize, b: usize| -> Result<Vec<Rotation3>> {
                nerve.restrict(c.alpha_on(a, b)?, OverlapId::Pair(a, b), id)
            };
            let p_ijk = restrict_p(q.i, q.j, q.k)?;
            let p_ijl = restrict_p(q.i, q.j, q.l)?;
            let p_ikl = restrict_p(q.i, q.k, q.l)?;
            let p_jkl = restrict_p(q.j, q.k, q.l)?;
            let a_ij = restrict_a(q.i, q.j)?;
            let a_jk = restrict_a(q.j, q.k)?;
            let a_kl = restrict_a(q.k, q.l)?;
            let a_ik = restrict_a(q.i, q.k)?;
            let a_jl = restrict_a(q.j, q.l)?;
            let residuals: Vec<f64> = (0..q.points.len())
                .map(|s| {
                    let psi_ijk = GroupoidMorphism::new(p_ijk[s], a_ij[s].compose(&a_jk[s]))?;
                    let psi_jkl = GroupoidMorphism::new(p_jkl[s], a_jk[s].compose(&a_kl[s]))?;
                    let psi_ikl = GroupoidMorphism::new(p_ikl[s], a_ik[s].compose(&a_kl[s]))?;
                    let psi_ijl = GroupoidMorphism::new(p_ijl[s], a_ij[s].compose(&a_jl[s]))?;
                    let id_kl = GroupoidMorphism::identity(a_kl[s]);
                    let id_ij = GroupoidMorphism::identity(a_ij[s]);
                    // endpoint mismatches are already reported at the
                    // triple level, so compose permissively here
                    let left = compose_tol(&psi_ikl, &tensor(&psi_ijk, &id_kl), f64::INFINITY)?;
                    let right = compose_tol(&psi_ijl, &tensor(&id_ij, &psi_jkl), f64::INFINITY)?;
                    Ok(scale_free_dist(left.value(), right.value()))
                })
                .collect::<Result<_>>()?;
            let (max_residual, argmax_point) = max_argmax(&residuals);
            Ok(SimplexCheck {
                simplex: vec![q.i, q.j, q.k, q.l],
                level: "quad".into(),
                max_residual,
                argmax_point,
            })
        })
        .collect();

    let mut per_simplex = Vec::new();
    for r in triple_checks.into_iter().chain(quad_checks) {
        per_simplex.push(r?);
    }
    let vacuous = nerve.triples().is_empty();
    Ok(CheckReport::from_simplices(per_simplex, tol, vacuous))
}

impl CoboundaryData {
    /// m_i = id, n_ij = 1.
    pub fn identity(nerve: &Nerve) -> CoboundaryData {
        CoboundaryData {
            m: (0..nerve.chart_count())
                .map(|i| vec![Rotation3::identity(); nerve.chart_points(i).len()])
                .collect(),
            n: nerve
                .pairs()
                .iter()
                .map(|p| ((p.i, p.j), vec![crate::quat::ONE; p.points.len()]))
                .collect(),
        }
    }

    /// Seeded random coboundary data over a nerve.
    ///
    /// A sample point can occur as several copies across overlap lists
    /// (pushed down from cofaces), so the value at a point is drawn from
    /// a PRF keyed on the point's coordinates: every copy of the same
    /// point gets the same field value and the data is well-defined as a
    /// function on the cover.
    pub fn random(nerve: &Nerve, seed: u64) -> CoboundaryData {
        let m = (0..nerve.chart_count())
            .map(|i| {
                nerve
                    .chart_points(i)
                    .iter()
                    .map(|x| {
                        let mut rng = point_rng(seed, &[0, i as u64], *x);
                        delta(random_unit(&mut rng)).expect("unit quaternion")
                    })
                    .collect()
            })
            .collect();
        let n = nerve
            .pairs()
            .iter()
            .map(|p| {
                let vals = p
                    .points
                    .iter()
                    .map(|x| {
                        let mut rng = point_rng(seed, &[1, p.i as u64, p.j as u64], *x);
                        let scale = rng.gen_range(0.5..2.0);
                        random_unit(&mut rng).scale(scale)
                    })
                    .collect();
                ((p.i, p.j), vals)
            })
            .collect();
        CoboundaryData { m, n }
    }

    fn n_on(&self, i: usize, j: usize) -> Result<&Vec<Quat>> {
        self.n
            .get(&(i, j))
            .ok_or_else(|| Error::MissingField(OverlapId::Pair(i, j).to_string()))
    }

    fn m_on(&self, i: usize) -> Result<&Vec<Rotation3>> {
        self.m
            .get(i)
            .ok_or_else(|| Error::MissingField(OverlapId::Chart(i).to_string()))
    }

    /// Data for the reverse direction: if `self` relates a to b, the
    /// inverse relates b to a.
    pub fn inverse(&self, nerve: &Nerve) -> Result<CoboundaryData> {
        let m = self
            .m
            .iter()
            .map(|chart| chart.iter().map(|r| r.inverse()).collect())
            .collect();
        let mut n = BTreeMap::new();
        for pair in nerve.pairs() {
            let n_ij = self.n_on(pair.i, pair.j)?;
            let m_i = nerve.restrict(
                self.m_on(pair.i)?,
                OverlapId::Chart(pair.i),
                OverlapId::Pair(pair.i, pair.j),
            )?;
            let vals = n_ij
                .iter()
                .zip(&m_i)
                .map(|(nv, mi)| mi.apply(*nv).inv())
                .collect::<Result<Vec<_>>>()?;
            n.insert((pair.i, pair.j), vals);
        }
        Ok(CoboundaryData { m, n })
    }

    /// Composite data: applying `self` then `second` equals applying the
    /// composite in one step.
    pub fn then(&self, second: &CoboundaryData, nerve: &Nerve) -> Result<CoboundaryData> {
        let m = self
            .m
            .iter()
            .zip(&second.m)
            .map(|(c1, c2)| {
                c1.iter()
                    .zip(c2)
                    .map(|(a, b)| a.compose(b))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut n = BTreeMap::new();
        for pair in nerve.pairs() {
            let n1 = self.n_on(pair.i, pair.j)?;
            let n2 = second.n_on(pair.i, pair.j)?;
            let m2_i = nerve.restrict(
                second.m_on(pair.i)?,
                OverlapId::Chart(pair.i),
                OverlapId::Pair(pair.i, pair.j),
            )?;
            let vals = n1
                .iter()
                .zip(n2)
                .zip(&m2_i)
                .map(|((a, b), mi)| mi.inverse().apply(*a) * *b)
                .collect();
            n.insert((pair.i, pair.j), vals);
        }
        Ok(CoboundaryData { m, n })
    }
}

/// PRF keyed on the exact bit pattern of a sample point, plus a tag that
/// separates the fields (m vs n, chart vs pair indices).
fn point_rng(seed: u64, tag: &[u64], x: Quat) -> ChaCha8Rng {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    seed.hash(&mut h);
    tag.hash(&mut h);
    for c in x.to_array() {
        c.to_bits().hash(&mut h);
    }
    ChaCha8Rng::seed_from_u64(h.finish())
}

fn random_unit(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = Quat::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 0.3 && n <= 1.0 {
            return q.scale(1.0 / n);
        }
    }
}

/// Verifies that `cob` exhibits `b` as the coboundary transform of `a`:
/// per pair δ(n_ij)·α'_ij = m_i⁻¹·α_ij·m_j, and per triple
/// n_ik·p'_ijk = m_i⁻¹[p_ijk]·n_ij·α'_ij[n_jk] modulo ℝ⁺.
pub fn check_coboundary(
    a: &BitorsorCocycle,
    b: &BitorsorCocycle,
    cob: &CoboundaryData,
    tol: f64,
) -> Result<CheckReport> {
    if a.nerve != b.nerve {
        return Err(Error::NerveMismatch);
    }
    a.validate_coverage()?;
    b.validate_coverage()?;
    let nerve = &a.nerve;
    let mut per_simplex = Vec::new();

    for pair in nerve.pairs() {
        let pid = OverlapId::Pair(pair.i, pair.j);
        let alpha = a.alpha_on(pair.i, pair.j)?;
        let alpha_b = b.alpha_on(pair.i, pair.j)?;
        let n_ij = cob.n_on(pair.i, pair.j)?;
        let m_i = nerve.restrict(cob.m_on(pair.i)?, OverlapId::Chart(pair.i), pid)?;
        let m_j = nerve.restrict(cob.m_on(pair.j)?, OverlapId::Chart(pair.j), pid)?;
        let residuals: Vec<f64> = (0..pair.points.len())
            .map(|s| {
                let lhs = delta(n_ij[s])?.compose(&alpha_b[s]);
                let rhs = m_i[s].inverse().compose(&alpha[s]).compose(&m_j[s]);
                Ok(lhs.distance(&rhs))
            })
            .collect::<Result<_>>()?;
        let (max_residual, argmax_point) = max_argmax(&residuals);
        per_simplex.push(SimplexCheck {
            simplex: vec![pair.i, pair.j],
            level: "pair".into(),
            max_residual,
            argmax_point,
        });
    }

    for t in nerve.triples() {
        let tid = OverlapId::Triple(t.i, t.j, t.k);
        let p_a = a.p_on(t.i, t.j, t.k)?;
        let p_b = b.p_on(t.i, t.j, t.k)?;
        let n_ij = nerve.restrict(cob.n_on(t.i, t.j)?, OverlapId::Pair(t.i, t.j), tid)?;
        let n_jk = nerve.restrict(cob.n_on(t.j, t.k)?, OverlapId::Pair(t.j, t.k), tid)?;
        let n_ik = nerve.restrict(cob.n_on(t.i, t.k)?, OverlapId::Pair(t.i, t.k), tid)?;
        let m_i = nerve.restrict(cob.m_on(t.i)?, OverlapId::Chart(t.i), tid)?;
        let alpha_b_ij = nerve.restrict(b.alpha_on(t.i, t.j)?, OverlapId::Pair(t.i, t.j), tid)?;
        let residuals: Vec<f64> = (0..t.points.len())
            .map(|s| {
                let lhs = n_ik[s] * p_b[s];
                let rhs = m_i[s].inverse().apply(p_a[s]) * n_ij[s] * alpha_b_ij[s].apply(n_jk[s]);
                scale_free_dist(lhs, rhs)
            })
            .collect();
        let (max_residual, argmax_point) = max_argmax(&residuals);
        per_simplex.push(SimplexCheck {
            simplex: vec![t.i, t.j, t.k],
            level: "triple".into(),
            max_residual,
            argmax_point,
        });
    }

    let vacuous = nerve.pairs().is_empty();
    Ok(CheckReport::from_simplices(per_simplex, tol, vacuous))
}

/// Transforms a cocycle by coboundary data; the output is related to the
/// input by `cob` and inherits coherence.
pub fn apply_coboundary(a: &BitorsorCocycle, cob: &CoboundaryData) -> Result<BitorsorCocycle> {
    a.validate_coverage()?;
    let nerve = &a.nerve;
    let mut alpha = BTreeMap::new();
    for pair in nerve.pairs() {
        let pid = OverlapId::Pair(pair.i, pair.j);
        let a_ij = a.alpha_on(pair.i, pair.j)?;
        let n_ij = cob.n_on(pair.i, pair.j)?;
        if n_ij.len() != pair.points.len() {
            return Err(Error::MalformedCover(format!(
                "n field on ({},{}) has wrong sample count",
                pair.i, pair.j
            )));
        }
        let m_i = nerve.restrict(cob.m_on(pair.i)?, OverlapId::Chart(pair.i), pid)?;
        let m_j = nerve.restrict(cob.m_on(pair.j)?, OverlapId::Chart(pair.j), pid)?;
        let vals = (0..pair.points.len())
            .map(|s| {
                Ok(delta(n_ij[s])?
                    .inverse()
                    .compose(&m_i[s].inverse())
                    .compose(&a_ij[s])
                    .compose(&m_j[s]))
            })
            .collect::<Result<Vec<_>>>()?;
        alpha.insert((pair.i, pair.j), vals);
    }

    let mut p = BTreeMap::new();
    for t in nerve.triples() {
        let tid = OverlapId::Triple(t.i, t.j, t.k);
        let p_a = a.p_on(t.i, t.j, t.k)?;
        let n_ij = nerve.restrict(cob.n_on(t.i, t.j)?, OverlapId::Pair(t.i, t.j), tid)?;
        let n_jk = nerve.restrict(cob.n_on(t.j, t.k)?, OverlapId::Pair(t.j, t.k), tid)?;
        let n_ik = nerve.restrict(cob.n_on(t.i, t.k)?, OverlapId::Pair(t.i, t.k), tid)?;
        let m_i = nerve.restrict(cob.m_on(t.i)?, OverlapId::Chart(t.i), tid)?;
        let alpha_b_ij = nerve.restrict(
            alpha
                .get(&(t.i, t.j))
                .ok_or_else(|| Error::MissingField(OverlapId::Pair(t.i, t.j).to_string()))?,
            OverlapId::Pair(t.i, t.j),
            tid,
        )?;
        let vals = (0..t.points.len())
            .map(|s| {
                let rhs = m_i[s].inverse().apply(p_a[s]) * n_ij[s] * alpha_b_ij[s].apply(n_jk[s]);
                Ok(n_ik[s].inv()? * rhs)
            })
            .collect::<Result<Vec<_>>>()?;
        p.insert((t.i, t.j, t.k), vals);
    }

    Ok(BitorsorCocycle {
        nerve: a.nerve.clone(),
        alpha,
        p,
    })
}

/// Deterministic coboundary-image of the trivial cocycle, together with
/// the connecting coboundary data.
pub fn synth_coboundary_cocycle(nerve: &Nerve, seed: u64) -> (BitorsorCocycle, CoboundaryData) {
    let cob = CoboundaryData::random(nerve, seed);
    let trivial = BitorsorCocycle::trivial(nerve.clone());
    let cocycle = apply_coboundary(&trivial, &cob)
        .expect("coboundary data generated over the same nerve applies cleanly");
    (cocycle, cob)
}

/// A synthetic geometry-free cover on `charts` charts with every overlap
/// populated: all ascending pairs, triples, and quads, each with `per_simplex`
/// own sample points plus the inherited points of its cofaces.
pub fn synthetic_nerve(charts: usize, per_simplex: usize, seed: u64) -> Nerve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e65_7276);
    let mut fresh = |n: usize| -> Vec<Quat> {
        (0..n)
            .map(|_| {
                Quat::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect()
    };

    let mut quads = Vec::new();
    let mut triples: BTreeMap<(usize, usize, usize), Vec<Quat>> = BTreeMap::new();
    let mut pairs: BTreeMap<(usize, usize), Vec<Quat>> = BTreeMap::new();
    let mut charts_pts: Vec<Vec<Quat>> = vec![Vec::new(); charts];

    // ascending quads first; their points are pushed down into faces
    let mut quad_descr = Vec::new();
    for i in 0..charts {
        for j in (i + 1)..charts {
            for k in (j + 1)..charts {
                for l in (k + 1)..charts {
                    quad_descr.push(((i, j, k, l), fresh(per_simplex)));
                }
            }
        }
    }
    for i in 0..charts {
        for j in (i + 1)..charts {
            for k in (j + 1)..charts {
                triples.insert((i, j, k), fresh(per_simplex));
            }
        }
    }
    for i in 0..charts {
        for j in (i + 1)..charts {
            pairs.insert((i, j), fresh(per_simplex));
        }
    }

    // push quad points into their face triples, recording index maps
    let push = |list: &mut Vec<Quat>, pts: &[Quat]| -> Vec<usize> {
        let base = list.len();
        list.extend_from_slice(pts);
        (base..base + pts.len()).collect()
    };

    for ((i, j, k, l), pts) in quad_descr {
        let in_ijk = push(triples.get_mut(&(i, j, k)).unwrap(), &pts);
        let in_ijl = push(triples.get_mut(&(i, j, l)).unwrap(), &pts);
        let in_ikl = push(triples.get_mut(&(i, k, l)).unwrap(), &pts);
        let in_jkl = push(triples.get_mut(&(j, k, l)).unwrap(), &pts);
        quads.push(crate::nerve::QuadOverlap {
            i,
            j,
            k,
            l,
            points: pts,
            in_ijk,
            in_ijl,
            in_ikl,
            in_jkl,
        });
    }

    let mut triple_overlaps = Vec::new();
    for ((i, j, k), pts) in &triples {
        let in_ij = push(pairs.get_mut(&(*i, *j)).unwrap(), pts);
        let in_jk = push(pairs.get_mut(&(*j, *k)).unwrap(), pts);
        let in_ik = push(pairs.get_mut(&(*i, *k)).unwrap(), pts);
        triple_overlaps.push(crate::nerve::TripleOverlap {
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
    for ((i, j), pts) in &pairs {
        let in_i = push(&mut charts_pts[*i], pts);
        let in_j = push(&mut charts_pts[*j], pts);
        pair_overlaps.push(crate::nerve::PairOverlap {
            i: *i,
            j: *j,
            points: pts.clone(),
            in_i,
            in_j,
        });
    }

    crate::nerve::build_nerve(CoverSpec {
        charts: charts_pts,
        pairs: pair_overlaps,
        triples: triple_overlaps,
        quads,
    })
    .expect("synthetic cover is closed under faces by construction")
}

// ---------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FieldEntry {
    overlap: OverlapId,
    name: String,
    kind: String,
    values: Vec<[f64; 4]>,
}

#[derive(Serialize, Deserialize)]
struct CocycleFile {
    #[serde(flatten)]
    cover: CoverSpec,
    fields: Vec<FieldEntry>,
}

impl From<BitorsorCocycle> for CocycleFile {
    fn from(c: BitorsorCocycle) -> CocycleFile {
        let mut fields = Vec::new();
        for ((i, j), vals) in &c.alpha {
            fields.push(FieldEntry {
                overlap: OverlapId::Pair(*i, *j),
                name: "alpha".into(),
                kind: "R".into(),
                values: vals.iter().map(|r| r.versor().to_array()).collect(),
            });
        }
        for ((i, j, k), vals) in &c.p {
            fields.push(FieldEntry {
                overlap: OverlapId::Triple(*i, *j, *k),
                name: "p".into(),
                kind: "Q".into(),
                values: vals.iter().map(|q| q.to_array()).collect(),
            });
        }
        CocycleFile {
            cover: c.nerve.into(),
            fields,
        }
    }
}

impl TryFrom<CocycleFile> for BitorsorCocycle {
    type Error = Error;
    fn try_from(f: CocycleFile) -> Result<BitorsorCocycle> {
        let nerve = crate::nerve::build_nerve(f.cover)?;
        let mut alpha = BTreeMap::new();
        let mut p = BTreeMap::new();
        for entry in f.fields {
            match (entry.overlap, entry.name.as_str()) {
                (OverlapId::Pair(i, j), "alpha") => {
                    let vals = entry
                        .values
                        .into_iter()
                        .map(|a| Rotation3::from_quat(Quat::from_array(a)))
                        .collect::<Result<Vec<_>>>()?;
                    alpha.insert((i, j), vals);
                }
                (OverlapId::Triple(i, j, k), "p") => {
                    let vals: Vec<Quat> =
                        entry.values.into_iter().map(Quat::from_array).collect();
                    if vals.iter().any(|v| v.is_zero()) {
                        return Err(Error::ZeroQuaternion);
                    }
                    p.insert((i, j, k), vals);
                }
                (other, name) => {
                    return Err(Error::MalformedCover(format!(
                        "unexpected field `{name}` on {other}"
                    )));
                }
            }
        }
        let c = BitorsorCocycle { nerve, alpha, p };
        c.validate_coverage()?;
        Ok(c)
    }
}
