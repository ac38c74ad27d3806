//! Finite unoriented multigraphs with loops and parallel edges.
//!
//! Vertices are dense ids `0..n`, edges are dense ids `0..m` in insertion
//! order. Every edge is stored canonically with `u <= v`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    vertex_count: usize,
    labels: Option<Vec<String>>,
    edges: Vec<(VertexId, VertexId)>,
}

impl MultiGraph {
    /// Builds a graph from an endpoint list; edge ids follow input order.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut stored = Vec::new();
        for (edge, (u, v)) in edges.into_iter().enumerate() {
            for endpoint in [u, v] {
                if endpoint >= vertex_count {
                    return Err(Error::EndpointOutOfRange {
                        edge,
                        endpoint,
                        vertex_count,
                    });
                }
            }
            stored.push((u.min(v), u.max(v)));
        }
        Ok(MultiGraph {
            vertex_count,
            labels: None,
            edges: stored,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::LabelCount {
                labels: labels.len(),
                vertices: self.vertex_count,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, falling back to its decimal id.
    pub fn label(&self, v: VertexId) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.vertex_count {
            return Err(Error::InvalidVertex {
                vertex: v,
                vertex_count: self.vertex_count,
            });
        }
        Ok(())
    }

    /// Endpoint incidences at `v`; a loop counts twice.
    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// `Some(d)` if every vertex has degree `d`. The empty graph is not regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let first = *deg.first()?;
        deg.iter().all(|&d| d == first).then_some(first)
    }

    /// Half-edge incidence lists: for each vertex, `(edge, other endpoint)`
    /// in ascending edge order. A loop appears twice at its vertex.
    pub fn incidence(&self) -> Vec<Vec<(EdgeId, VertexId)>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push((e, v));
            inc[v].push((e, u));
        }
        inc
    }

    /// Neighbor lists with multiplicity, loops omitted.
    pub fn neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj
    }

    /// Component index for every vertex, numbered by lowest member.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.neighbors();
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for start in 0..self.vertex_count {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().iter().max().map_or(0, |&c| c + 1)
    }

    /// The empty graph counts as disconnected (zero components).
    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// `#E - #V + #components`, the rank of the free fundamental group.
    pub fn rank_pi1(&self) -> usize {
        self.edge_count() + self.component_count() - self.vertex_count
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Vec<Option<usize>> {
        let adj = self.neighbors();
        bfs(&adj, source)
    }

    pub fn metric_summary(&self) -> GraphMetricSummary {
        let components = self.component_count();
        let mut degree_sequence = self.degrees();
        degree_sequence.sort_unstable();
        let diameter = if components == 1 {
            let adj = self.neighbors();
            (0..self.vertex_count)
                .map(|s| bfs(&adj, s).into_iter().flatten().max().unwrap_or(0))
                .max()
        } else {
            None
        };
        GraphMetricSummary {
            diameter,
            degree_sequence,
            component_count: components,
        }
    }

    /// Applies a vertex relabeling `perm[old] = new`, keeping edge order.
    pub fn relabel(&self, perm: &[VertexId]) -> Result<MultiGraph> {
        if perm.len() != self.vertex_count {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count,
                got: perm.len(),
            });
        }
        MultiGraph::new(
            self.vertex_count,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
        )
    }

    /// Symmetric edge multiplicity matrix (loops on the diagonal, counted once).
    pub fn multiplicity_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0; n]; n];
        for &(u, v) in &self.edges {
            m[u][v] += 1;
            if u != v {
                m[v][u] += 1;
            }
        }
        m
    }
}

fn bfs(adj: &[Vec<VertexId>], source: VertexId) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMetricSummary {
    /// Hop diameter; `None` unless the graph is connected.
    pub diameter: Option<usize>,
    pub degree_sequence: Vec<usize>,
    pub component_count: usize,
}

/// A cotree edge with the direction used by the cover construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// A maximal forest plus the ordered, oriented edges outside it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverSpec {
    /// Ascending edge ids of the maximal forest.
    pub tree_edges: Vec<EdgeId>,
    /// `e_1 .. e_r`, in the order that fixes bitvector coordinates.
    pub cotree_edges: Vec<OrientedEdge>,
}

impl CoverSpec {
    pub fn rank(&self) -> usize {
        self.cotree_edges.len()
    }

    /// Checks that this spec is a valid maximal forest / cotree split of `g`.
    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        let m = g.edge_count();
        let mut seen = vec![false; m];
        let mut mark = |e: EdgeId| -> Result<()> {
            if e >= m {
                return Err(Error::SpecMismatch(format!("edge {e} out of range")));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::SpecMismatch(format!("edge {e} listed twice")));
            }
            Ok(())
        };
        for &e in &self.tree_edges {
            mark(e)?;
        }
        for oe in &self.cotree_edges {
            mark(oe.edge)?;
            let (u, v) = g.edge(oe.edge);
            if !((oe.tail, oe.head) == (u, v) || (oe.tail, oe.head) == (v, u)) {
                return Err(Error::SpecMismatch(format!(
                    "cotree edge {} oriented {}->{} but joins {u}-{v}",
                    oe.edge, oe.tail, oe.head
                )));
            }
        }
        if let Some(e) = seen.iter().position(|s| !s) {
            return Err(Error::SpecMismatch(format!("edge {e} not covered")));
        }
        // A forest with #V - #components edges that is acyclic spans every component.
        let mut dsu = DisjointSets::new(g.vertex_count());
        for &e in &self.tree_edges {
            let (u, v) = g.edge(e);
            if !dsu.union(u, v) {
                return Err(Error::SpecMismatch(format!("tree edge {e} closes a cycle")));
            }
        }
        let expected_rank = g.rank_pi1();
        if self.rank() != expected_rank {
            return Err(Error::SpecMismatch(format!(
                "tree is not maximal: rank {} but graph rank {expected_rank}",
                self.rank()
            )));
        }
        Ok(())
    }

    /// Returns a copy with cotree edge `j` (0-based) reversed.
    pub fn with_flipped(&self, j: usize) -> CoverSpec {
        let mut spec = self.clone();
        let oe = &mut spec.cotree_edges[j];
        std::mem::swap(&mut oe.tail, &mut oe.head);
        spec
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Breadth-first maximal forest.
///
/// Each component is grown from its lowest vertex; a dequeued vertex scans its
/// incident edges in ascending id order. Cotree edges are listed in ascending
/// id order and directed from the lower endpoint to the higher one.
pub fn spanning_tree(g: &MultiGraph) -> CoverSpec {
    let inc = g.incidence();
    let mut visited = vec![false; g.vertex_count()];
    let mut in_tree = vec![false; g.edge_count()];
    for start in 0..g.vertex_count() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(e, w) in &inc[u] {
                if !visited[w] {
                    visited[w] = true;
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let tree_edges = (0..g.edge_count()).filter(|&e| in_tree[e]).collect();
    let cotree_edges = (0..g.edge_count())
        .filter(|&e| !in_tree[e])
        .map(|e| {
            let (tail, head) = g.edge(e);
            OrientedEdge { edge: e, tail, head }
        })
        .collect();
    CoverSpec {
        tree_edges,
        cotree_edges,
    }
}

/// Checks that `vertex_map`/`edge_map` carry `a` isomorphically onto `b`.
pub fn is_isomorphism(a: &MultiGraph, b: &MultiGraph, vertex_map: &[VertexId], edge_map: &[EdgeId]) -> bool {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || vertex_map.len() != a.vertex_count()
        || edge_map.len() != a.edge_count()
    {
        return false;
    }
    if !is_permutation(vertex_map) || !is_permutation(edge_map) {
        return false;
    }
    a.edges().iter().enumerate().all(|(e, &(u, v))| {
        let (x, y) = (vertex_map[u], vertex_map[v]);
        b.edge(edge_map[e]) == (x.min(y), x.max(y))
    })
}

fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&i| i < map.len() && !std::mem::replace(&mut seen[i], true))
}

/// Backtracking search for a vertex bijection preserving edge multiplicities
/// (loops included). Intended for small graphs only.
pub fn find_isomorphism(a: &MultiGraph, b: &MultiGraph) -> Option<Vec<VertexId>> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let (ma, mb) = (a.multiplicity_matrix(), b.multiplicity_matrix());
    let (da, db) = (a.degrees(), b.degrees());
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        depth: usize,
        map: &mut [usize],
        used: &mut [bool],
        ma: &[Vec<usize>],
        mb: &[Vec<usize>],
        da: &[usize],
        db: &[usize],
    ) -> bool {
        let n = map.len();
        if depth == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || da[depth] != db[cand] || ma[depth][depth] != mb[cand][cand] {
                continue;
            }
            if (0..depth).any(|prev| ma[depth][prev] != mb[cand][map[prev]]) {
                continue;
            }
            map[depth] = cand;
            used[cand] = true;
            if extend(depth + 1, map, used, ma, mb, da, db) {
                return true;
            }
            used[cand] = false;
        }
        map[depth] = usize::MAX;
        false
    }

    extend(0, &mut map, &mut used, &ma, &mb, &da, &db).then_some(map)
}

/// Graph JSON document, `{"schema":1,"vertices":N,"labels":[..],"edges":[[u,v],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphDocument {
    #[serde(default = "schema_version")]
    schema: u32,
    vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    edges: Vec<[usize; 2]>,
}

fn schema_version() -> u32 {
    crate::SCHEMA_VERSION
}

impl MultiGraph {
    pub fn to_json(&self) -> String {
        let doc = GraphDocument {
            schema: crate::SCHEMA_VERSION,
            vertices: self.vertex_count,
            labels: self.labels.clone(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&doc).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<MultiGraph> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.schema != crate::SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema {}", doc.schema)));
        }
        let g = MultiGraph::new(doc.vertices, doc.edges.into_iter().map(|[u, v]| (u, v)))?;
        match doc.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }

    /// Undirected DOT; parallel edges repeat, loops are written `v -- v`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.vertex_count {
            match &self.labels {
                Some(l) => out.push_str(&format!("  {v} [label={:?}];\n", l[v])),
                None => out.push_str(&format!("  {v};\n")),
            }
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Named graphs used as seeds and in tests.
pub mod builtin {
    use super::MultiGraph;

    /// One vertex with `r` loops.
    pub fn bouquet(r: usize) -> MultiGraph {
        MultiGraph::new(1, (0..r).map(|_| (0, 0))).unwrap()
    }

    pub fn figure_eight() -> MultiGraph {
        bouquet(2)
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> MultiGraph {
        MultiGraph::new(2, [(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    /// Cycle on `n` vertices; `n = 1` is a single loop, `n = 2` a double edge.
    pub fn cycle(n: usize) -> MultiGraph {
        MultiGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn path(n: usize) -> MultiGraph {
        MultiGraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn complete(n: usize) -> MultiGraph {
        MultiGraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    /// Circulant graph: `i ~ i + s (mod n)` for each jump `s`.
    pub fn circulant(n: usize, jumps: &[usize]) -> MultiGraph {
        MultiGraph::new(
            n,
            jumps
                .iter()
                .flat_map(|&s| (0..n).map(move |i| (i, (i + s) % n))),
        )
        .unwrap()
    }

    /// Every edge of `g` repeated `k` times.
    pub fn multiplied(g: &MultiGraph, k: usize) -> MultiGraph {
        MultiGraph::new(
            g.vertex_count(),
            g.edges().iter().flat_map(|&e| std::iter::repeat_n(e, k)),
        )
        .unwrap()
    }
}
