//! Combinatorics of good covers: charts, ordered pairwise overlaps, and
//! ascending triple/quadruple overlaps, each carrying explicit sample
//! points. Smaller overlaps embed into their faces by stored index maps,
//! so restriction is exact index selection with no interpolation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::quat::Quat;
use crate::rotation::Rotation3;

/// Identifies a chart or overlap of the nerve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapId {
    Chart(usize),
    Pair(usize, usize),
    Triple(usize, usize, usize),
    Quad(usize, usize, usize, usize),
}

impl std::fmt::Display for OverlapId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverlapId::Chart(i) => write!(f, "U_{i}"),
            OverlapId::Pair(i, j) => write!(f, "U_({i},{j})"),
            OverlapId::Triple(i, j, k) => write!(f, "U_({i},{j},{k})"),
            OverlapId::Quad(i, j, k, l) => write!(f, "U_({i},{j},{k},{l})"),
        }
    }
}

/// An ordered pairwise overlap with its sample points and their positions
/// inside each chart's sample domain. On the wire the chart indices are
/// the array `ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "PairWire", into = "PairWire")]
pub struct PairOverlap {
    pub i: usize,
    pub j: usize,
    pub points: Vec<Quat>,
    /// index of each sample inside chart i's domain
    pub in_i: Vec<usize>,
    /// index of each sample inside chart j's domain
    pub in_j: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PairWire {
    ij: [usize; 2],
    points: Vec<Quat>,
    #[serde(default)]
    in_i: Vec<usize>,
    #[serde(default)]
    in_j: Vec<usize>,
}

impl From<PairWire> for PairOverlap {
    fn from(w: PairWire) -> Self {
        PairOverlap {
            i: w.ij[0],
            j: w.ij[1],
            points: w.points,
            in_i: w.in_i,
            in_j: w.in_j,
        }
    }
}

impl From<PairOverlap> for PairWire {
    fn from(p: PairOverlap) -> Self {
        PairWire {
            ij: [p.i, p.j],
            points: p.points,
            in_i: p.in_i,
            in_j: p.in_j,
        }
    }
}

/// An ascending triple overlap; `in_ij` etc. map its samples into the
/// sample lists of the three face pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "TripleWire", into = "TripleWire")]
pub struct TripleOverlap {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub points: Vec<Quat>,
    pub in_ij: Vec<usize>,
    pub in_jk: Vec<usize>,
    pub in_ik: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TripleWire {
    ijk: [usize; 3],
    points: Vec<Quat>,
    #[serde(default)]
    in_ij: Vec<usize>,
    #[serde(default)]
    in_jk: Vec<usize>,
    #[serde(default)]
    in_ik: Vec<usize>,
}

impl From<TripleWire> for TripleOverlap {
    fn from(w: TripleWire) -> Self {
        TripleOverlap {
            i: w.ijk[0],
            j: w.ijk[1],
            k: w.ijk[2],
            points: w.points,
            in_ij: w.in_ij,
            in_jk: w.in_jk,
            in_ik: w.in_ik,
        }
    }
}

impl From<TripleOverlap> for TripleWire {
    fn from(t: TripleOverlap) -> Self {
        TripleWire {
            ijk: [t.i, t.j, t.k],
            points: t.points,
            in_ij: t.in_ij,
            in_jk: t.in_jk,
            in_ik: t.in_ik,
        }
    }
}

/// An ascending quadruple overlap with maps into its four face triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "QuadWire", into = "QuadWire")]
pub struct QuadOverlap {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub points: Vec<Quat>,
    pub in_ijk: Vec<usize>,
    pub in_ijl: Vec<usize>,
    pub in_ikl: Vec<usize>,
    pub in_jkl: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct QuadWire {
    ijkl: [usize; 4],
    points: Vec<Quat>,
    #[serde(default)]
    in_ijk: Vec<usize>,
    #[serde(default)]
    in_ijl: Vec<usize>,
    #[serde(default)]
    in_ikl: Vec<usize>,
    #[serde(default)]
    in_jkl: Vec<usize>,
}

impl From<QuadWire> for QuadOverlap {
    fn from(w: QuadWire) -> Self {
        QuadOverlap {
            i: w.ijkl[0],
            j: w.ijkl[1],
            k: w.ijkl[2],
            l: w.ijkl[3],
            points: w.points,
            in_ijk: w.in_ijk,
            in_ijl: w.in_ijl,
            in_ikl: w.in_ikl,
            in_jkl: w.in_jkl,
        }
    }
}

impl From<QuadOverlap> for QuadWire {
    fn from(q: QuadOverlap) -> Self {
        QuadWire {
            ijkl: [q.i, q.j, q.k, q.l],
            points: q.points,
            in_ijk: q.in_ijk,
            in_ijl: q.in_ijl,
            in_ikl: q.in_ikl,
            in_jkl: q.in_jkl,
        }
    }
}

/// Cover description as supplied by generators or parsed from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    /// per-chart sample domains
    pub charts: Vec<Vec<Quat>>,
    pub pairs: Vec<PairOverlap>,
    #[serde(default)]
    pub triples: Vec<TripleOverlap>,
    #[serde(default)]
    pub quads: Vec<QuadOverlap>,
}

/// A validated cover nerve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoverSpec", into = "CoverSpec")]
pub struct Nerve {
    charts: Vec<Vec<Quat>>,
    pairs: Vec<PairOverlap>,
    triples: Vec<TripleOverlap>,
    quads: Vec<QuadOverlap>,
}

impl TryFrom<CoverSpec> for Nerve {
    type Error = Error;
    fn try_from(spec: CoverSpec) -> Result<Nerve> {
        build_nerve(spec)
    }
}

impl From<Nerve> for CoverSpec {
    fn from(n: Nerve) -> CoverSpec {
        CoverSpec {
            charts: n.charts,
            pairs: n.pairs,
            triples: n.triples,
            quads: n.quads,
        }
    }
}

fn check_map(map: &[usize], npoints: usize, domain: usize, what: &str) -> Result<()> {
    if map.len() != npoints {
        return Err(Error::MalformedCover(format!(
            "{what}: index map has {} entries for {npoints} samples",
            map.len()
        )));
    }
    if let Some(bad) = map.iter().find(|idx| **idx >= domain) {
        return Err(Error::MalformedCover(format!(
            "{what}: index {bad} out of range (domain size {domain})"
        )));
    }
    Ok(())
}

/// Validates a cover description: face closure, nonempty declared
/// overlaps, well-formed index maps, deterministic ordering.
pub fn build_nerve(spec: CoverSpec) -> Result<Nerve> {
    let nchart = spec.charts.len();
    let mut pairs = spec.pairs;
    let mut triples = spec.triples;
    let mut quads = spec.quads;
    pairs.sort_by_key(|p| (p.i, p.j));
    triples.sort_by_key(|t| (t.i, t.j, t.k));
    quads.sort_by_key(|q| (q.i, q.j, q.k, q.l));

    let mut pair_set = BTreeSet::new();
    for p in &pairs {
        if p.i >= nchart || p.j >= nchart || p.i == p.j {
            return Err(Error::MalformedCover(format!(
                "pair ({},{}) has invalid chart indices",
                p.i, p.j
            )));
        }
        if p.points.is_empty() {
            return Err(Error::MalformedCover(format!(
                "pair ({},{}) declared with an empty sample set",
                p.i, p.j
            )));
        }
        if !pair_set.insert((p.i, p.j)) {
            return Err(Error::MalformedCover(format!(
                "pair ({},{}) declared twice",
                p.i, p.j
            )));
        }
        check_map(&p.in_i, p.points.len(), spec.charts[p.i].len(), "pair in_i")?;
        check_map(&p.in_j, p.points.len(), spec.charts[p.j].len(), "pair in_j")?;
    }

    let pair_len = |i: usize, j: usize| -> Result<usize> {
        pairs
            .iter()
            .find(|p| p.i == i && p.j == j)
            .map(|p| p.points.len())
            .ok_or_else(|| {
                Error::MalformedCover(format!("missing face pair ({i},{j})"))
            })
    };

    let mut triple_set = BTreeSet::new();
    for t in &triples {
        if !(t.i < t.j && t.j < t.k) || t.k >= nchart {
            return Err(Error::MalformedCover(format!(
                "triple ({},{},{}) is not ascending/in range",
                t.i, t.j, t.k
            )));
        }
        if t.points.is_empty() {
            return Err(Error::MalformedCover(format!(
                "triple ({},{},{}) declared with an empty sample set",
                t.i, t.j, t.k
            )));
        }
        if !triple_set.insert((t.i, t.j, t.k)) {
            return Err(Error::MalformedCover(format!(
                "triple ({},{},{}) declared twice",
                t.i, t.j, t.k
            )));
        }
        check_map(&t.in_ij, t.points.len(), pair_len(t.i, t.j)?, "triple in_ij")?;
        check_map(&t.in_jk, t.points.len(), pair_len(t.j, t.k)?, "triple in_jk")?;
        check_map(&t.in_ik, t.points.len(), pair_len(t.i, t.k)?, "triple in_ik")?;
    }

    let triple_len = |i: usize, j: usize, k: usize| -> Result<usize> {
        triples
            .iter()
            .find(|t| t.i == i && t.j == j && t.k == k)
            .map(|t| t.points.len())
            .ok_or_else(|| {
                Error::MalformedCover(format!("missing face triple ({i},{j},{k})"))
            })
    };

    let mut quad_set = BTreeSet::new();
    for q in &quads {
        if !(q.i < q.j && q.j < q.k && q.k < q.l) || q.l >= nchart {
            return Err(Error::MalformedCover(format!(
                "quad ({},{},{},{}) is not ascending/in range",
                q.i, q.j, q.k, q.l
            )));
        }
        if q.points.is_empty() {
            return Err(Error::MalformedCover(format!(
                "quad ({},{},{},{}) declared with an empty sample set",
                q.i, q.j, q.k, q.l
            )));
        }
        if !quad_set.insert((q.i, q.j, q.k, q.l)) {
            return Err(Error::MalformedCover("quad declared twice".into()));
        }
        check_map(&q.in_ijk, q.points.len(), triple_len(q.i, q.j, q.k)?, "quad in_ijk")?;
        check_map(&q.in_ijl, q.points.len(), triple_len(q.i, q.j, q.l)?, "quad in_ijl")?;
        check_map(&q.in_ikl, q.points.len(), triple_len(q.i, q.k, q.l)?, "quad in_ikl")?;
        check_map(&q.in_jkl, q.points.len(), triple_len(q.j, q.k, q.l)?, "quad in_jkl")?;
    }

    Ok(Nerve {
        charts: spec.charts,
        pairs,
        triples,
        quads,
    })
}

impl Nerve {
    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    pub fn chart_points(&self, i: usize) -> &[Quat] {
        &self.charts[i]
    }

    pub fn pairs(&self) -> &[PairOverlap] {
        &self.pairs
    }

    pub fn triples(&self) -> &[TripleOverlap] {
        &self.triples
    }

    pub fn quads(&self) -> &[QuadOverlap] {
        &self.quads
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairOverlap> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> Option<&TripleOverlap> {
        self.triples.iter().find(|t| t.i == i && t.j == j && t.k == k)
    }

    pub fn sample_count(&self, id: OverlapId) -> Option<usize> {
        match id {
            OverlapId::Chart(i) => self.charts.get(i).map(|c| c.len()),
            OverlapId::Pair(i, j) => self.pair(i, j).map(|p| p.points.len()),
            OverlapId::Triple(i, j, k) => self.triple(i, j, k).map(|t| t.points.len()),
            OverlapId::Quad(i, j, k, l) => self
                .quads
                .iter()
                .find(|q| (q.i, q.j, q.k, q.l) == (i, j, k, l))
                .map(|q| q.points.len()),
        }
    }

    /// The index map embedding `to`'s samples into `from`'s samples, when
    /// `from` is a declared face of `to` (or the identity when equal).
    /// Composite paths (chart → triple, chart or pair → quad) are resolved
    /// through the stored one-step maps. A sample may carry several indices
    /// in a shallow overlap (one copy per route it arrived through), so the
    /// first containing intermediate face is used; all copies hold the same
    /// point, so restriction of point-keyed fields is route independent.
    pub fn face_map(&self, from: OverlapId, to: OverlapId) -> Result<Vec<usize>> {
        if from == to {
            let n = self
                .sample_count(from)
                .ok_or_else(|| Error::MissingField(from.to_string()))?;
            return Ok((0..n).collect());
        }
        let not_a_face = || Error::NotAFace {
            from: from.to_string(),
            to: to.to_string(),
        };
        match (from, to) {
            (OverlapId::Chart(c), OverlapId::Pair(i, j)) => {
                let p = self.pair(i, j).ok_or_else(not_a_face)?;
                if c == i {
                    Ok(p.in_i.clone())
                } else if c == j {
                    Ok(p.in_j.clone())
                } else {
                    Err(not_a_face())
                }
            }
            (OverlapId::Pair(a, b), OverlapId::Triple(i, j, k)) => {
                let t = self.triple(i, j, k).ok_or_else(not_a_face)?;
                if (a, b) == (i, j) {
                    Ok(t.in_ij.clone())
                } else if (a, b) == (j, k) {
                    Ok(t.in_jk.clone())
                } else if (a, b) == (i, k) {
                    Ok(t.in_ik.clone())
                } else {
                    Err(not_a_face())
                }
            }
            (OverlapId::Triple(a, b, c), OverlapId::Quad(i, j, k, l)) => {
                let q = self
                    .quads
                    .iter()
                    .find(|q| (q.i, q.j, q.k, q.l) == (i, j, k, l))
                    .ok_or_else(not_a_face)?;
                if (a, b, c) == (i, j, k) {
                    Ok(q.in_ijk.clone())
                } else if (a, b, c) == (i, j, l) {
                    Ok(q.in_ijl.clone())
                } else if (a, b, c) == (i, k, l) {
                    Ok(q.in_ikl.clone())
                } else if (a, b, c) == (j, k, l) {
                    Ok(q.in_jkl.clone())
                } else {
                    Err(not_a_face())
                }
            }
            // chart → triple through the first face pair containing the chart
            (OverlapId::Chart(c), OverlapId::Triple(i, j, k)) => {
                let (a, b) = if c == i {
                    (i, j)
                } else if c == j {
                    (i, j)
                } else if c == k {
                    (j, k)
                } else {
                    return Err(not_a_face());
                };
                let step = self.face_map(OverlapId::Pair(a, b), to)?;
                let base = self.face_map(from, OverlapId::Pair(a, b))?;
                Ok(step.into_iter().map(|s| base[s]).collect())
            }
            // pair or chart → quad through the first containing face triple
            (OverlapId::Pair(_, _) | OverlapId::Chart(_), OverlapId::Quad(i, j, k, l)) => [
                OverlapId::Triple(i, j, k),
                OverlapId::Triple(i, j, l),
                OverlapId::Triple(i, k, l),
                OverlapId::Triple(j, k, l),
            ]
            .into_iter()
            .find_map(|mid| {
                let base = self.face_map(from, mid).ok()?;
                let step = self.face_map(mid, to).ok()?;
                Some(step.into_iter().map(|s| base[s]).collect::<Vec<_>>())
            })
            .ok_or_else(not_a_face),
            _ => Err(not_a_face()),
        }
    }

    /// Restriction of per-sample values from an overlap to one of its
    /// cofaces (deeper overlap).
    pub fn restrict<T: Clone>(&self, values: &[T], from: OverlapId, to: OverlapId) -> Result<Vec<T>> {
        let n = self
            .sample_count(from)
            .ok_or_else(|| Error::MissingField(from.to_string()))?;
        if values.len() != n {
            return Err(Error::MalformedCover(format!(
                "field on {from} has {} values for {n} samples",
                values.len()
            )));
        }
        let map = self.face_map(from, to)?;
        Ok(map.into_iter().map(|idx| values[idx].clone()).collect())
    }
}

/// ℍ*-valued function samples on an overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldQ {
    pub overlap: OverlapId,
    pub values: Vec<Quat>,
}

impl FieldQ {
    pub fn new(overlap: OverlapId, values: Vec<Quat>) -> Result<Self> {
        if values.iter().any(|v| v.is_zero()) {
            return Err(Error::ZeroQuaternion);
        }
        Ok(FieldQ { overlap, values })
    }
}

/// SO(3)-valued function samples on an overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldR {
    pub overlap: OverlapId,
    pub values: Vec<Rotation3>,
}

impl FieldR {
    pub fn new(overlap: OverlapId, values: Vec<Rotation3>) -> Self {
        FieldR { overlap, values }
    }
}
