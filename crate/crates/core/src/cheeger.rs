//! Cheeger constants `h = min #E(A,B) / min(#A, #B)` over vertex bipartitions.
//!
//! Crossing edges are counted with multiplicity; loops never cross.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::CoveredGraph;
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexId};
use crate::rational::Rational;

pub const DEFAULT_CHEEGER_CAP: usize = 26;

/// Masks are `u64`; brute force beyond this is out of reach regardless.
const HARD_VERTEX_LIMIT: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub side_a: Vec<VertexId>,
    pub side_b: Vec<VertexId>,
    pub crossing_edges: u64,
    pub ratio: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Exact,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMethod {
    BruteForce,
    LemmaCut,
    Sweep,
}

impl std::fmt::Display for CheegerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheegerMethod::BruteForce => "brute_force",
            CheegerMethod::LemmaCut => "lemma_cut",
            CheegerMethod::Sweep => "sweep",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheegerResult {
    pub value: Rational,
    pub certified: Certification,
    pub method: CheegerMethod,
    pub witness: Cut,
}

impl CheegerResult {
    fn from_cut(witness: Cut, certified: Certification, method: CheegerMethod) -> Self {
        CheegerResult {
            value: witness.ratio,
            certified,
            method,
            witness,
        }
    }

    /// Recomputes the witness from scratch and compares every field.
    pub fn reverify(&self, g: &MultiGraph) -> bool {
        match cut_ratio(g, &self.witness.side_a) {
            Ok(cut) => cut == self.witness && cut.ratio == self.value,
            Err(_) => false,
        }
    }
}

/// Crossing count and ratio for the bipartition `(side_a, V \ side_a)`.
pub fn cut_ratio(g: &MultiGraph, side_a: &[VertexId]) -> Result<Cut> {
    let n = g.vertex_count();
    let mut in_a = vec![false; n];
    for &v in side_a {
        if v >= n {
            return Err(Error::InvalidVertex {
                vertex: v,
                vertex_count: n,
            });
        }
        in_a[v] = true;
    }
    let a: Vec<VertexId> = (0..n).filter(|&v| in_a[v]).collect();
    let b: Vec<VertexId> = (0..n).filter(|&v| !in_a[v]).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidCut(format!(
            "both sides must be nonempty (|A| = {}, |B| = {})",
            a.len(),
            b.len()
        )));
    }
    let crossing = g.edges().iter().filter(|&&(u, v)| in_a[u] != in_a[v]).count() as u64;
    let ratio = Rational::new(crossing, a.len().min(b.len()) as u64);
    Ok(Cut {
        side_a: a,
        side_b: b,
        crossing_edges: crossing,
        ratio,
    })
}

fn require_connected_pair(g: &MultiGraph) -> Result<()> {
    if g.vertex_count() < 2 {
        return Err(Error::TooFewVertices(g.vertex_count()));
    }
    let components = g.component_count();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

/// Candidate during enumeration: crossing count, smaller side, side-A mask.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    crossing: u64,
    smaller: u64,
    mask: u64,
}

impl Candidate {
    /// Smaller ratio wins; equal ratios go to the lexicographically smaller
    /// sorted id list of side A.
    fn better_than(&self, other: &Candidate) -> bool {
        let lhs = self.crossing as u128 * other.smaller as u128;
        let rhs = other.crossing as u128 * self.smaller as u128;
        lhs < rhs || (lhs == rhs && set_bits(self.mask).lt(set_bits(other.mask)))
    }
}

fn set_bits(mask: u64) -> impl Iterator<Item = u32> {
    let mut m = mask;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros();
            m &= m - 1;
            b
        })
    })
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Exact Cheeger constant by exhaustive enumeration.
///
/// Vertex 0 is pinned to side A, leaving `2^(n-1) - 1` bipartitions. They are
/// visited in Gray-code order so each step moves one vertex and updates the
/// crossing count from its neighbors alone; the range is split into chunks
/// evaluated in parallel and reduced with a total order, so the witness does
/// not depend on scheduling.
pub fn exact_cheeger(g: &MultiGraph, max_vertices: usize) -> Result<CheegerResult> {
    let n = g.vertex_count();
    let cap = max_vertices.min(HARD_VERTEX_LIMIT);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "brute-force cheeger vertex count",
            size: n.to_string(),
            cap,
        });
    }
    require_connected_pair(g)?;

    let neighbors = g.neighbors();
    let free_bits = n - 1;
    let total: u64 = 1 << free_bits;
    let all_free = total - 1;
    let chunk_count = total.min(1024);
    let chunk_len = total.div_ceil(chunk_count);

    let best = (0..chunk_count)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_len;
            let end = (start + chunk_len).min(total);
            if start >= end {
                return None;
            }
            let gray = |i: u64| i ^ (i >> 1);
            let mut side = vec![false; n];
            side[0] = true;
            let g0 = gray(start);
            for (v, s) in side.iter_mut().enumerate().skip(1) {
                *s = g0 >> (v - 1) & 1 == 1;
            }
            let mut crossing = g.edges().iter().filter(|&&(u, v)| side[u] != side[v]).count() as i64;
            let mut size_a = 1 + g0.count_ones() as u64;
            let mut best: Option<Candidate> = None;
            let mut consider = |code: u64, crossing: i64, size_a: u64| {
                if code == all_free {
                    return;
                }
                let cand = Candidate {
                    crossing: crossing as u64,
                    smaller: size_a.min(n as u64 - size_a),
                    mask: 1 | (code << 1),
                };
                best = pick(best, Some(cand));
            };
            consider(g0, crossing, size_a);
            for i in start + 1..end {
                let w = i.trailing_zeros() as usize + 1;
                let old = side[w];
                for &x in &neighbors[w] {
                    crossing += if side[x] == old { 1 } else { -1 };
                }
                side[w] = !old;
                if old {
                    size_a -= 1;
                } else {
                    size_a += 1;
                }
                consider(gray(i), crossing, size_a);
            }
            best
        })
        .reduce(|| None, pick)
        .expect("a graph with two vertices has a bipartition");

    let side_a: Vec<VertexId> = set_bits(best.mask).map(|b| b as usize).collect();
    let cut = cut_ratio(g, &side_a)?;
    debug_assert_eq!(cut.crossing_edges, best.crossing);
    Ok(CheegerResult::from_cut(cut, Certification::Exact, CheegerMethod::BruteForce))
}

/// The cut separating sheets by their last coordinate. Its ratio is
/// `2^r / (2^(r-1) #V(base)) = 2 / #V(base)`.
pub fn lemma_cut(cover: &CoveredGraph) -> Result<CheegerResult> {
    if cover.rank() == 0 {
        return Err(Error::TrivialCover);
    }
    let side_a: Vec<VertexId> = cover
        .vertex_fibers
        .iter()
        .enumerate()
        .filter(|(_, f)| f.sheet & 1 == 0)
        .map(|(v, _)| v)
        .collect();
    let cut = cut_ratio(&cover.graph, &side_a)?;
    Ok(CheegerResult::from_cut(cut, Certification::UpperBound, CheegerMethod::LemmaCut))
}

/// Lemma cut for a graph whose labels carry fiber bitstrings, as written by
/// cover export (`"baseLabel|bits"`): side A is every vertex whose last bit is 0.
pub fn lemma_cut_from_labels(g: &MultiGraph) -> Result<CheegerResult> {
    let labels = g
        .labels()
        .ok_or_else(|| Error::Parse("graph has no fiber labels".into()))?;
    let mut side_a = Vec::new();
    for (v, label) in labels.iter().enumerate() {
        let bits = label
            .rsplit_once('|')
            .map(|(_, bits)| bits)
            .ok_or_else(|| Error::Parse(format!("label {label:?} has no fiber coordinate")))?;
        match bits.chars().last() {
            Some('0') => side_a.push(v),
            Some('1') => {}
            Some(_) => return Err(Error::Parse(format!("label {label:?} is not a bitstring"))),
            None => return Err(Error::TrivialCover),
        }
    }
    let cut = cut_ratio(g, &side_a)?;
    Ok(CheegerResult::from_cut(cut, Certification::UpperBound, CheegerMethod::LemmaCut))
}

/// Best prefix cut after ordering vertices by `vector` (ties by id).
/// On equal ratios the shortest prefix wins.
pub fn sweep_cut(g: &MultiGraph, vector: &[f64]) -> Result<CheegerResult> {
    let n = g.vertex_count();
    if vector.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: vector.len(),
        });
    }
    require_connected_pair(g)?;
    let mut order: Vec<VertexId> = (0..n).collect();
    order.sort_by(|&a, &b| vector[a].total_cmp(&vector[b]).then(a.cmp(&b)));

    let neighbors = g.neighbors();
    let mut in_a = vec![false; n];
    let mut crossing: i64 = 0;
    let mut best: Option<(u64, u64, usize)> = None;
    for (k, &v) in order.iter().enumerate().take(n - 1) {
        for &x in &neighbors[v] {
            crossing += if in_a[x] { -1 } else { 1 };
        }
        in_a[v] = true;
        let size = k as u64 + 1;
        let smaller = size.min(n as u64 - size);
        let c = crossing as u64;
        let better = match best {
            None => true,
            Some((bc, bs, _)) => (c as u128) * (bs as u128) < (bc as u128) * (smaller as u128),
        };
        if better {
            best = Some((c, smaller, k + 1));
        }
    }
    let (_, _, prefix) = best.expect("n >= 2");
    let cut = cut_ratio(g, &order[..prefix])?;
    Ok(CheegerResult::from_cut(cut, Certification::UpperBound, CheegerMethod::Sweep))
}

/// Sweep over the combinatorial Fiedler vector.
pub fn fiedler_sweep(g: &MultiGraph, spectrum_cap: usize) -> Result<CheegerResult> {
    require_connected_pair(g)?;
    let vector = crate::spectrum::fiedler_vector(g, spectrum_cap)?.expect("n >= 2");
    sweep_cut(g, &vector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::z2_cover_canonical;
    use crate::graph::builtin::*;

    fn gamma1() -> MultiGraph {
        z2_cover_canonical(&figure_eight(), 1 << 20).unwrap().graph
    }

    #[test]
    fn exact_examples() {
        let r = exact_cheeger(&gamma1(), DEFAULT_CHEEGER_CAP).unwrap();
        assert_eq!(r.value, Rational::integer(2));
        assert_eq!(r.witness.crossing_edges, 4);
        assert_eq!(r.witness.side_a.len(), 2);
        // lexicographically first optimum: {0, 1}, adjacent in Γ₁
        assert_eq!(r.witness.side_a, vec![0, 1]);
        assert_eq!(r.certified, Certification::Exact);

        assert_eq!(exact_cheeger(&cycle(4), 26).unwrap().value, Rational::integer(1));
        assert_eq!(exact_cheeger(&complete(2), 26).unwrap().value, Rational::integer(1));
    }

    #[test]
    fn exact_errors() {
        assert!(matches!(exact_cheeger(&cycle(30), 26), Err(Error::CapExceeded { .. })));
        assert!(matches!(
            exact_cheeger(&MultiGraph::new(3, [(0, 1)]).unwrap(), 26),
            Err(Error::Disconnected { components: 2 })
        ));
        assert_eq!(exact_cheeger(&figure_eight(), 26), Err(Error::TooFewVertices(1)));
    }

    #[test]
    fn cut_ratio_examples() {
        // (v,00) and (v,10) are ids 0 and 2
        let cut = cut_ratio(&gamma1(), &[0, 2]).unwrap();
        assert_eq!((cut.crossing_edges, cut.ratio), (4, Rational::integer(2)));
        assert!(matches!(cut_ratio(&figure_eight(), &[0]), Err(Error::InvalidCut(_))));
        assert!(matches!(cut_ratio(&cycle(3), &[]), Err(Error::InvalidCut(_))));
        assert!(matches!(cut_ratio(&cycle(3), &[5]), Err(Error::InvalidVertex { .. })));
    }

    #[test]
    fn loops_never_cross() {
        let g = MultiGraph::new(2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(cut_ratio(&g, &[0]).unwrap().crossing_edges, 1);
    }

    #[test]
    fn lemma_examples() {
        let c1 = z2_cover_canonical(&figure_eight(), 1 << 20).unwrap();
        let r = lemma_cut(&c1).unwrap();
        assert_eq!((r.witness.side_a.len(), r.witness.side_b.len()), (2, 2));
        assert_eq!((r.witness.crossing_edges, r.value), (4, Rational::integer(2)));
        assert_eq!(r.certified, Certification::UpperBound);

        let c2 = z2_cover_canonical(&c1.graph, 1 << 20).unwrap();
        let r = lemma_cut(&c2).unwrap();
        assert_eq!((r.witness.side_a.len(), r.witness.side_b.len()), (64, 64));
        assert_eq!((r.witness.crossing_edges, r.value), (32, Rational::new(1, 2)));
        assert_eq!(lemma_cut_from_labels(&c2.graph).unwrap(), r);

        let c8 = z2_cover_canonical(&cycle(4), 1 << 20).unwrap();
        let r = lemma_cut(&c8).unwrap();
        assert_eq!((r.witness.crossing_edges, r.witness.side_a.len()), (2, 4));
        assert_eq!(r.value, Rational::new(1, 2));

        let trivial = z2_cover_canonical(&path(3), 1 << 20).unwrap();
        assert_eq!(lemma_cut(&trivial), Err(Error::TrivialCover));
        assert_eq!(lemma_cut_from_labels(&trivial.graph), Err(Error::TrivialCover));
        assert!(lemma_cut_from_labels(&cycle(4)).is_err());
    }

    #[test]
    fn sweep_examples() {
        let g1 = gamma1();
        let r = fiedler_sweep(&g1, 2048).unwrap();
        assert_eq!(r.value, Rational::integer(2));
        assert_eq!(r.method, CheegerMethod::Sweep);

        let p3 = path(3);
        assert_eq!(sweep_cut(&p3, &[-1.0, 0.0, 1.0]).unwrap().value, Rational::integer(1));
        assert!(matches!(sweep_cut(&p3, &[0.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn reverify_detects_tampering() {
        let mut r = exact_cheeger(&cycle(6), 26).unwrap();
        assert!(r.reverify(&cycle(6)));
        r.witness.crossing_edges += 1;
        assert!(!r.reverify(&cycle(6)));
    }
}
