//! Z/2-homology covers of multigraphs and their deck groups.
//!
//! A cover vertex is a pair `(v, α)` with `v` a base vertex and `α` a bitvector
//! of length `r`, the number of cotree edges. Coordinate `j` (1-based, matching
//! cotree edge `e_j`) lives at bit `r - j` of the sheet integer, so ordering
//! sheets as integers is the lexicographic order on bitstrings and the last
//! coordinate is the lowest bit.
//!
//! Edge `(e, α)` joins `(v, α)` and `(w, α)` when `e = v-w` is a tree edge,
//! and `(tail, α)` and `(head, α + ē_j)` when `e` is the cotree edge `e_j`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CoverSpec, EdgeId, MultiGraph, VertexId};

/// Sheets are packed into a `u64`; larger covers never fit in memory anyway.
pub const MAX_RANK: usize = 63;

/// Deck groups up to this rank are verified element by element.
pub const EXHAUSTIVE_VERIFY_RANK: usize = 12;

/// A point of a fiber: base id plus sheet bitvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fiber {
    pub base: usize,
    pub sheet: u64,
}

#[derive(Debug, Clone)]
pub struct CoveredGraph {
    pub graph: MultiGraph,
    pub base: MultiGraph,
    pub spec: CoverSpec,
    /// Fiber of each cover vertex, indexed by cover vertex id.
    pub vertex_fibers: Vec<Fiber>,
    /// Fiber of each cover edge, indexed by cover edge id.
    pub edge_fibers: Vec<Fiber>,
}

impl CoveredGraph {
    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    pub fn sheet_count(&self) -> usize {
        1 << self.rank()
    }

    /// Bitvector for coordinate `j` (1-based).
    pub fn basis_sheet(&self, j: usize) -> u64 {
        basis_sheet(self.rank(), j)
    }

    pub fn vertex_id(&self, fiber: Fiber) -> VertexId {
        (fiber.base << self.rank()) | fiber.sheet as usize
    }

    pub fn edge_id(&self, fiber: Fiber) -> EdgeId {
        (fiber.base << self.rank()) | fiber.sheet as usize
    }
}

fn basis_sheet(rank: usize, j: usize) -> u64 {
    assert!((1..=rank).contains(&j), "coordinate {j} out of 1..={rank}");
    1 << (rank - j)
}

/// `α` written as `α_1 α_2 … α_r`.
pub fn bitstring(sheet: u64, rank: usize) -> String {
    (1..=rank)
        .map(|j| if sheet & (1 << (rank - j)) != 0 { '1' } else { '0' })
        .collect()
}

/// `#V · 2^r` as an exact integer.
pub fn predicted_size(count: usize, rank: usize) -> BigUint {
    BigUint::from(count) << rank
}

/// Builds the Z/2-homology cover of a connected `base` for the given spec.
///
/// Fails if `spec` does not fit `base`, `base` is disconnected, or the
/// cover would have more than `vertex_cap` vertices.
pub fn z2_cover(base: &MultiGraph, spec: &CoverSpec, vertex_cap: usize) -> Result<CoveredGraph> {
    spec.validate(base)?;
    let components = base.component_count();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    let rank = spec.rank();
    let predicted = predicted_size(base.vertex_count(), rank);
    if rank > MAX_RANK || predicted > BigUint::from(vertex_cap) {
        return Err(Error::CapExceeded {
            what: "cover vertex count",
            size: predicted.to_string(),
            cap: vertex_cap,
        });
    }
    let sheets = 1u64 << rank;

    let mut cotree_index = vec![None; base.edge_count()];
    for (j, oe) in spec.cotree_edges.iter().enumerate() {
        cotree_index[oe.edge] = Some((basis_sheet(rank, j + 1), oe.tail, oe.head));
    }

    let mut vertex_fibers = Vec::with_capacity(base.vertex_count() << rank);
    let mut labels = Vec::with_capacity(base.vertex_count() << rank);
    for v in 0..base.vertex_count() {
        let prefix = base.label(v);
        for sheet in 0..sheets {
            vertex_fibers.push(Fiber { base: v, sheet });
            labels.push(format!("{prefix}|{}", bitstring(sheet, rank)));
        }
    }

    let id = |v: usize, sheet: u64| (v << rank) | sheet as usize;
    let mut edges = Vec::with_capacity(base.edge_count() << rank);
    let mut edge_fibers = Vec::with_capacity(base.edge_count() << rank);
    for (e, &(u, w)) in base.edges().iter().enumerate() {
        for sheet in 0..sheets {
            let endpoints = match cotree_index[e] {
                None => (id(u, sheet), id(w, sheet)),
                Some((bit, tail, head)) => (id(tail, sheet), id(head, sheet ^ bit)),
            };
            edges.push(endpoints);
            edge_fibers.push(Fiber { base: e, sheet });
        }
    }

    let graph = MultiGraph::new(base.vertex_count() << rank, edges)?.with_labels(labels)?;
    Ok(CoveredGraph {
        graph,
        base: base.clone(),
        spec: spec.clone(),
        vertex_fibers,
        edge_fibers,
    })
}

/// Convenience: cover with respect to the canonical BFS spanning tree.
pub fn z2_cover_canonical(base: &MultiGraph, vertex_cap: usize) -> Result<CoveredGraph> {
    z2_cover(base, &crate::graph::spanning_tree(base), vertex_cap)
}

/// An element of the deck group `(Z/2)^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeckElement {
    bits: u64,
    len: usize,
}

impl DeckElement {
    /// `bits[j - 1]` is coordinate `j`.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() > MAX_RANK {
            return Err(Error::LengthMismatch {
                expected: MAX_RANK,
                got: bits.len(),
            });
        }
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Ok(DeckElement {
            bits: value,
            len: bits.len(),
        })
    }

    /// From a packed sheet integer of the given length.
    pub fn from_sheet(sheet: u64, len: usize) -> Self {
        assert!(len <= MAX_RANK && sheet >> len == 0);
        DeckElement { bits: sheet, len }
    }

    pub fn sheet(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Vertex and edge permutations induced by a deck element: `image[id]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeckPermutation {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Inverse of a fiber map, or `None` if the map is not a bijection onto
/// `0..count × (Z/2)^rank`.
fn fiber_inverse(fibers: &[Fiber], count: usize, rank: usize) -> Option<Vec<usize>> {
    let size = count.checked_shl(rank as u32)?;
    if fibers.len() != size {
        return None;
    }
    let mut inverse = vec![usize::MAX; size];
    for (id, f) in fibers.iter().enumerate() {
        if f.base >= count || f.sheet >> rank != 0 {
            return None;
        }
        let slot = (f.base << rank) | f.sheet as usize;
        if inverse[slot] != usize::MAX {
            return None;
        }
        inverse[slot] = id;
    }
    Some(inverse)
}

fn translate(fibers: &[Fiber], inverse: &[usize], rank: usize, beta: u64) -> Vec<usize> {
    fibers
        .iter()
        .map(|f| inverse[(f.base << rank) | (f.sheet ^ beta) as usize])
        .collect()
}

/// Permutations for `(v, α) ↦ (v, α + β)` on vertices and edges.
pub fn deck_action(cover: &CoveredGraph, beta: &DeckElement) -> Result<DeckPermutation> {
    let rank = cover.rank();
    if beta.len() != rank {
        return Err(Error::LengthMismatch {
            expected: rank,
            got: beta.len(),
        });
    }
    let bad = || Error::SpecMismatch("fiber map is not a bijection".into());
    let vinv = fiber_inverse(&cover.vertex_fibers, cover.base.vertex_count(), rank).ok_or_else(bad)?;
    let einv = fiber_inverse(&cover.edge_fibers, cover.base.edge_count(), rank).ok_or_else(bad)?;
    Ok(DeckPermutation {
        vertices: translate(&cover.vertex_fibers, &vinv, rank, beta.sheet()),
        edges: translate(&cover.edge_fibers, &einv, rank, beta.sheet()),
    })
}

/// Outcome of [`verify_regular_cover`]. Failures are recorded, never thrown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularCoverCheck {
    pub rank: usize,
    /// Deck elements examined; all `2^r` when `exhaustive`, else the generators.
    pub deck_elements_checked: u64,
    pub exhaustive: bool,
    pub fibers_bijective: bool,
    /// (i) every checked deck element is a graph automorphism over the base.
    pub automorphisms: bool,
    /// (ii) every nonzero checked element moves every vertex; images of a
    /// vertex under distinct elements are distinct.
    pub free_action: bool,
    /// (iii) vertex orbits biject with base vertices and the projection
    /// induces an isomorphism of the quotient onto the base.
    pub quotient_is_base: bool,
    pub orbit_count: usize,
    /// (iv) the projection is a bijection on every vertex star.
    pub star_bijection: bool,
    pub failures: Vec<String>,
}

impl RegularCoverCheck {
    pub fn passed(&self) -> bool {
        self.fibers_bijective && self.automorphisms && self.free_action && self.quotient_is_base && self.star_bijection
    }
}

/// Checks that `cover` is a regular cover of its base with deck group `(Z/2)^r`.
pub fn verify_regular_cover(cover: &CoveredGraph) -> RegularCoverCheck {
    let rank = cover.rank();
    let (g, base) = (&cover.graph, &cover.base);
    let exhaustive = rank <= EXHAUSTIVE_VERIFY_RANK;
    let mut check = RegularCoverCheck {
        rank,
        deck_elements_checked: 0,
        exhaustive,
        fibers_bijective: false,
        automorphisms: false,
        free_action: false,
        quotient_is_base: false,
        orbit_count: 0,
        star_bijection: false,
        failures: Vec::new(),
    };
    let vinv = fiber_inverse(&cover.vertex_fibers, base.vertex_count(), rank);
    let einv = fiber_inverse(&cover.edge_fibers, base.edge_count(), rank);
    let (Some(vinv), Some(einv)) = (vinv, einv) else {
        check.failures.push("fiber maps are not bijections onto base × (Z/2)^r".into());
        return check;
    };
    if g.vertex_count() != vinv.len() || g.edge_count() != einv.len() {
        check.failures.push("cover size does not match fiber maps".into());
        return check;
    }
    check.fibers_bijective = true;

    let elements: Vec<u64> = if exhaustive {
        (0..1u64 << rank).collect()
    } else {
        (1..=rank).map(|j| basis_sheet(rank, j)).collect()
    };
    check.deck_elements_checked = elements.len() as u64;

    // (i) and (ii), in parallel over deck elements; the reduction keeps the
    // smallest failing element so the record is order independent.
    let per_element: Vec<(u64, bool, bool)> = elements
        .par_iter()
        .map(|&beta| {
            let sigma = translate(&cover.vertex_fibers, &vinv, rank, beta);
            let tau = translate(&cover.edge_fibers, &einv, rank, beta);
            let auto = g.edges().iter().enumerate().all(|(e, &(u, v))| {
                let (x, y) = (sigma[u], sigma[v]);
                g.edge(tau[e]) == (x.min(y), x.max(y))
                    && cover.edge_fibers[tau[e]].base == cover.edge_fibers[e].base
            }) && (0..g.vertex_count())
                .all(|x| cover.vertex_fibers[sigma[x]].base == cover.vertex_fibers[x].base);
            let free = beta == 0 || sigma.iter().enumerate().all(|(x, &y)| x != y);
            (beta, auto, free)
        })
        .collect();
    check.automorphisms = per_element.iter().all(|&(_, a, _)| a);
    if let Some(&(beta, _, _)) = per_element.iter().find(|&&(_, a, _)| !a) {
        check
            .failures
            .push(format!("deck element {} is not an automorphism", bitstring(beta, rank)));
    }
    let distinct = if exhaustive && g.vertex_count() > 0 {
        let mut images: Vec<usize> = elements
            .iter()
            .map(|&b| vinv[(cover.vertex_fibers[0].base << rank) | (cover.vertex_fibers[0].sheet ^ b) as usize])
            .collect();
        images.sort_unstable();
        images.dedup();
        images.len() == elements.len()
    } else {
        true
    };
    check.free_action = distinct && per_element.iter().all(|&(_, _, f)| f);
    if !check.free_action {
        check.failures.push("deck action is not free".into());
    }

    // (iii) orbits from the generator action, then the quotient.
    let mut orbit = (0..g.vertex_count()).collect::<Vec<_>>();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 1..=rank {
        let sigma = translate(&cover.vertex_fibers, &vinv, rank, basis_sheet(rank, j));
        for (x, &y) in sigma.iter().enumerate() {
            let (a, b) = (find(&mut orbit, x), find(&mut orbit, y));
            if a != b {
                orbit[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbit_base = vec![None; g.vertex_count()];
    let mut quotient_ok = true;
    for x in 0..g.vertex_count() {
        let root = find(&mut orbit, x);
        let b = cover.vertex_fibers[x].base;
        match orbit_base[root] {
            None => orbit_base[root] = Some(b),
            Some(prev) if prev != b => quotient_ok = false,
            _ => {}
        }
    }
    let mut bases: Vec<usize> = orbit_base.iter().flatten().copied().collect();
    check.orbit_count = bases.len();
    bases.sort_unstable();
    bases.dedup();
    quotient_ok &= bases.len() == check.orbit_count && check.orbit_count == base.vertex_count();
    let projection_ok = g.edges().iter().enumerate().all(|(e, &(u, v))| {
        let (pu, pv) = (cover.vertex_fibers[u].base, cover.vertex_fibers[v].base);
        base.edge(cover.edge_fibers[e].base) == (pu.min(pv), pu.max(pv))
    });
    check.quotient_is_base = quotient_ok && projection_ok;
    if !check.quotient_is_base {
        check
            .failures
            .push("quotient by the deck action is not the base graph".into());
    }

    // (iv) star bijection at every cover vertex.
    let cover_inc = g.incidence();
    let base_inc = base.incidence();
    let base_stars: Vec<Vec<EdgeId>> = base_inc
        .iter()
        .map(|star| star.iter().map(|&(e, _)| e).collect())
        .collect();
    check.star_bijection = (0..g.vertex_count()).all(|x| {
        let mut projected: Vec<EdgeId> = cover_inc[x]
            .iter()
            .map(|&(e, _)| cover.edge_fibers[e].base)
            .collect();
        projected.sort_unstable();
        projected == base_stars[cover.vertex_fibers[x].base]
    });
    if !check.star_bijection {
        check.failures.push("projection is not a bijection on some vertex star".into());
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin::*;
    use crate::graph::{find_isomorphism, spanning_tree};

    const CAP: usize = 1 << 20;

    #[test]
    fn figure_eight_gives_doubled_four_cycle() {
        let c = z2_cover_canonical(&figure_eight(), CAP).unwrap();
        assert_eq!((c.graph.vertex_count(), c.graph.edge_count()), (4, 8));
        // hand application: e_1 flips bit 1 (value 2), e_2 flips bit 0 (value 1)
        assert_eq!(
            c.graph.edges(),
            &[(0, 2), (1, 3), (0, 2), (1, 3), (0, 1), (0, 1), (2, 3), (2, 3)]
        );
        assert!(find_isomorphism(&c.graph, &multiplied(&cycle(4), 2)).is_some());
        assert_eq!(c.graph.labels().unwrap(), &["0|00", "0|01", "0|10", "0|11"]);
    }

    #[test]
    fn single_loop_cover() {
        let c = z2_cover_canonical(&bouquet(1), CAP).unwrap();
        assert_eq!(c.graph.vertex_count(), 2);
        assert_eq!(c.graph.edges(), &[(0, 1), (0, 1)]);
    }

    #[test]
    fn tree_gives_trivial_cover() {
        let p = path(2);
        let c = z2_cover_canonical(&p, CAP).unwrap();
        assert_eq!(c.rank(), 0);
        assert_eq!(c.graph.edges(), p.edges());
        assert_eq!(c.graph.labels().unwrap(), &["0|", "1|"]);
    }

    #[test]
    fn rejects_disconnected_and_oversized() {
        let g = MultiGraph::new(2, [(0, 0), (1, 1)]).unwrap();
        assert!(matches!(
            z2_cover_canonical(&g, CAP),
            Err(Error::Disconnected { components: 2 })
        ));
        let err = z2_cover_canonical(&bouquet(5), 16).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "cover vertex count",
                size: "32".into(),
                cap: 16
            }
        );
        let mut bad = spanning_tree(&figure_eight());
        bad.cotree_edges.pop();
        assert!(matches!(z2_cover(&figure_eight(), &bad, CAP), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn huge_rank_is_cap_error() {
        let err = z2_cover_canonical(&bouquet(70), usize::MAX).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn deck_action_examples() {
        let c = z2_cover_canonical(&figure_eight(), CAP).unwrap();
        let id = deck_action(&c, &DeckElement::from_bits(&[false, false]).unwrap()).unwrap();
        assert_eq!(id.vertices, vec![0, 1, 2, 3]);
        assert_eq!(id.edges, (0..8).collect::<Vec<_>>());

        let anti = deck_action(&c, &DeckElement::from_bits(&[true, true]).unwrap()).unwrap();
        assert_eq!(anti.vertices, vec![3, 2, 1, 0]);
        // doubled 4-cycle 0-2-3-1-0: 0 and 3 are opposite, as are 1 and 2
        let d = c.graph.bfs_distances(0);
        assert_eq!(d[3], Some(2));

        let s = z2_cover_canonical(&bouquet(1), CAP).unwrap();
        let swap = deck_action(&s, &DeckElement::from_bits(&[true]).unwrap()).unwrap();
        assert_eq!(swap.vertices, vec![1, 0]);
        assert_eq!(swap.edges, vec![1, 0]);

        assert!(matches!(
            deck_action(&c, &DeckElement::from_bits(&[true]).unwrap()),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn verify_examples() {
        let c = z2_cover_canonical(&figure_eight(), CAP).unwrap();
        let rec = verify_regular_cover(&c);
        assert!(rec.passed(), "{rec:?}");
        assert_eq!((rec.orbit_count, rec.deck_elements_checked), (1, 4));

        let s = z2_cover_canonical(&bouquet(1), CAP).unwrap();
        assert!(verify_regular_cover(&s).passed());
        assert!((0..2).all(|v| s.graph.degree(v).unwrap() == 2));
    }

    #[test]
    fn corrupted_fiber_map_fails_quotient_check() {
        let g1 = z2_cover_canonical(&figure_eight(), CAP).unwrap().graph;
        let mut c = z2_cover_canonical(&g1, CAP).unwrap();
        // swap the fibers of two cover vertices over different base vertices
        let (a, b) = (0, c.vertex_id(Fiber { base: 1, sheet: 0 }));
        c.vertex_fibers.swap(a, b);
        let rec = verify_regular_cover(&c);
        assert!(rec.fibers_bijective);
        assert!(!rec.quotient_is_base);
        assert!(!rec.passed());
    }

    #[test]
    fn broken_fiber_bijection_reported() {
        let mut c = z2_cover_canonical(&figure_eight(), CAP).unwrap();
        c.vertex_fibers[1] = c.vertex_fibers[0];
        let rec = verify_regular_cover(&c);
        assert!(!rec.fibers_bijective && !rec.passed());
        assert!(deck_action(&c, &DeckElement::from_sheet(1, 2)).is_err());
    }

    #[test]
    fn loop_lifts_never_loops() {
        let c = z2_cover_canonical(&bouquet(3), CAP).unwrap();
        assert_eq!(c.graph.loop_count(), 0);
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring(0b101, 3), "101");
        assert_eq!(bitstring(1, 5), "00001");
        assert_eq!(bitstring(0, 0), "");
    }
}
