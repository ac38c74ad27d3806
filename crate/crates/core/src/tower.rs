//! Iterated Z/2-homology covers and per-level measurements.
//!
//! Level 0 is the seed; level `n + 1` is the cover of level `n` with respect
//! to a fresh BFS spanning tree. Construction stops at the first level whose
//! predicted size `#V · 2^r` exceeds the vertex cap; that level is recorded
//! with predicted counts only.

use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cheeger::{self, Certification, CheegerMethod, CheegerResult};
use crate::covers::{self, CoveredGraph};
use crate::error::{Error, Result};
use crate::graph::{spanning_tree, MultiGraph};
use crate::rational::Rational;
use crate::spectrum::{self, LaplacianKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerOptions {
    pub vertex_cap: usize,
    pub cheeger_cap: usize,
    pub spectrum_cap: usize,
    pub kinds: Vec<LaplacianKind>,
    /// Record wall-clock time per level. Off by default so reports are
    /// byte-identical across runs.
    pub timings: bool,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            vertex_cap: 1_000_000,
            cheeger_cap: cheeger::DEFAULT_CHEEGER_CAP,
            spectrum_cap: spectrum::DEFAULT_SPECTRUM_CAP,
            kinds: vec![LaplacianKind::Combinatorial, LaplacianKind::Normalized],
            timings: false,
        }
    }
}

/// Graphs of a tower up to the first level over the cap.
#[derive(Debug, Clone)]
pub struct Tower {
    pub seed: MultiGraph,
    /// `covers[n]` is level `n + 1` over level `n`.
    pub covers: Vec<CoveredGraph>,
    pub truncated: Option<TruncatedLevel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedLevel {
    pub level: usize,
    pub parent_vertices: usize,
    pub parent_rank: usize,
    pub predicted_vertices: BigUint,
    pub predicted_edges: BigUint,
}

impl Tower {
    /// Graph at a constructed level.
    pub fn level(&self, n: usize) -> Option<&MultiGraph> {
        match n {
            0 => Some(&self.seed),
            _ => self.covers.get(n - 1).map(|c| &c.graph),
        }
    }

    pub fn constructed_levels(&self) -> usize {
        self.covers.len() + 1
    }
}

/// Builds levels `0..=levels`, stopping early at the vertex cap.
pub fn build_tower(seed: &MultiGraph, levels: usize, vertex_cap: usize) -> Result<Tower> {
    let components = seed.component_count();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    let mut tower = Tower {
        seed: seed.clone(),
        covers: Vec::new(),
        truncated: None,
    };
    for n in 1..=levels {
        let parent = tower.level(n - 1).unwrap();
        let spec = spanning_tree(parent);
        let rank = spec.rank();
        let predicted = covers::predicted_size(parent.vertex_count(), rank);
        if predicted > BigUint::from(vertex_cap) {
            tower.truncated = Some(TruncatedLevel {
                level: n,
                parent_vertices: parent.vertex_count(),
                parent_rank: rank,
                predicted_vertices: predicted,
                predicted_edges: covers::predicted_size(parent.edge_count(), rank),
            });
            break;
        }
        let cover = covers::z2_cover(parent, &spec, vertex_cap)?;
        tower.covers.push(cover);
    }
    Ok(tower)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelStatus {
    Constructed,
    Predicted,
}

/// A Cheeger value without its witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub value: Rational,
    pub method: CheegerMethod,
    pub certified: Certification,
}

impl From<&CheegerResult> for BoundSummary {
    fn from(r: &CheegerResult) -> Self {
        BoundSummary {
            value: r.value,
            method: r.method,
            certified: r.certified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCutSummary {
    pub side_a: u64,
    pub side_b: u64,
    pub crossing_edges: u64,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub status: LevelStatus,
    /// Decimal strings: predicted counts overflow every machine integer.
    #[serde(with = "decimal")]
    pub vertices: BigUint,
    #[serde(with = "decimal")]
    pub edges: BigUint,
    pub rank_pi1: Option<u64>,
    /// Rank of the parent level, i.e. `log2` of the sheet count.
    pub sheets_log2: Option<u64>,
    /// `2 / #V(parent)`; present whenever the parent has positive rank.
    pub lemma_bound: Option<Rational>,
    pub lemma_cut: Option<LemmaCutSummary>,
    pub h_exact: Option<Rational>,
    /// Smallest certified upper bound on `h` known at this level.
    pub h_upper: Option<BoundSummary>,
    #[serde(serialize_with = "sig12_opt")]
    pub lambda1_combinatorial: Option<f64>,
    #[serde(serialize_with = "sig12_opt")]
    pub lambda1_normalized: Option<f64>,
    /// Regular-cover verification of this level over its parent.
    pub cover_verified: Option<bool>,
    /// Every Cheeger witness computed at this level re-verified from scratch.
    pub witnesses_verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

fn sig12_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_f64(spectrum::sig12(*x)),
        None => s.serialize_none(),
    }
}

mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedDescriptor {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub rank_pi1: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub schema: u32,
    pub seed: SeedDescriptor,
    pub requested_levels: usize,
    pub vertex_cap: usize,
    pub cheeger_cap: usize,
    pub spectrum_cap: usize,
    /// First level not constructed because of the vertex cap.
    pub truncated_at: Option<usize>,
    pub levels: Vec<LevelRecord>,
}

impl TowerReport {
    /// Counts at level `n + 1` equal counts at level `n` times `2^rank(n)`.
    pub fn growth_consistent(&self) -> bool {
        self.levels.windows(2).all(|w| match w[0].rank_pi1 {
            Some(r) => {
                w[1].vertices == &w[0].vertices << r as usize && w[1].edges == &w[0].edges << r as usize
            }
            None => false,
        })
    }

    /// `h_upper` values in level order, skipping levels without one.
    pub fn upper_bounds(&self) -> Vec<Rational> {
        self.levels.iter().filter_map(|l| l.h_upper.map(|b| b.value)).collect()
    }
}

fn best_bound<'a>(candidates: impl IntoIterator<Item = &'a CheegerResult>) -> Option<BoundSummary> {
    // ties keep the earliest candidate, so pass exact results first
    candidates
        .into_iter()
        .fold(None, |best: Option<&CheegerResult>, r| match best {
            Some(b) if b.value <= r.value => Some(b),
            _ => Some(r),
        })
        .map(BoundSummary::from)
}

fn analyze_level(
    level: usize,
    g: &MultiGraph,
    cover: Option<&CoveredGraph>,
    options: &TowerOptions,
) -> Result<LevelRecord> {
    let started = Instant::now();
    let n = g.vertex_count();
    let parent_rank = cover.map(|c| c.rank());
    let lemma = match cover {
        Some(c) if c.rank() > 0 => Some(cheeger::lemma_cut(c)?),
        _ => None,
    };
    let lemma_bound = cover
        .filter(|c| c.rank() > 0)
        .map(|c| Rational::new(2, c.base.vertex_count() as u64));

    let bipartitionable = n >= 2 && g.is_connected();
    let exact = if bipartitionable && n <= options.cheeger_cap {
        Some(cheeger::exact_cheeger(g, options.cheeger_cap)?)
    } else {
        None
    };

    let mut lambda1_combinatorial = None;
    let mut lambda1_normalized = None;
    let mut sweep = None;
    if n <= options.spectrum_cap {
        for &kind in &options.kinds {
            let s = spectrum::full_spectrum(g, kind, options.spectrum_cap)?;
            match kind {
                LaplacianKind::Combinatorial => lambda1_combinatorial = s.lambda1,
                LaplacianKind::Normalized => lambda1_normalized = s.lambda1,
            }
        }
        if bipartitionable {
            sweep = Some(cheeger::fiedler_sweep(g, options.spectrum_cap)?);
        }
    }

    let results: Vec<&CheegerResult> = exact.iter().chain(&lemma).chain(&sweep).collect();
    let witnesses_verified = results.iter().all(|r| r.reverify(g));
    let cover_verified = cover
        .filter(|c| c.rank() <= covers::EXHAUSTIVE_VERIFY_RANK)
        .map(|c| covers::verify_regular_cover(c).passed());

    Ok(LevelRecord {
        level,
        status: LevelStatus::Constructed,
        vertices: BigUint::from(n),
        edges: BigUint::from(g.edge_count()),
        rank_pi1: Some(g.rank_pi1() as u64),
        sheets_log2: parent_rank.map(|r| r as u64),
        lemma_bound,
        lemma_cut: lemma.as_ref().map(|r| LemmaCutSummary {
            side_a: r.witness.side_a.len() as u64,
            side_b: r.witness.side_b.len() as u64,
            crossing_edges: r.witness.crossing_edges,
            ratio: r.value,
        }),
        h_exact: exact.as_ref().map(|r| r.value),
        h_upper: best_bound(results.iter().copied()),
        lambda1_combinatorial,
        lambda1_normalized,
        cover_verified,
        witnesses_verified,
        elapsed_ms: options
            .timings
            .then(|| started.elapsed().as_secs_f64() * 1e3),
    })
}

fn predicted_record(t: &TruncatedLevel) -> LevelRecord {
    let lemma_bound = (t.parent_rank > 0).then(|| Rational::new(2, t.parent_vertices as u64));
    LevelRecord {
        level: t.level,
        status: LevelStatus::Predicted,
        vertices: t.predicted_vertices.clone(),
        edges: t.predicted_edges.clone(),
        rank_pi1: None,
        sheets_log2: Some(t.parent_rank as u64),
        lemma_bound,
        lemma_cut: None,
        h_exact: None,
        h_upper: lemma_bound.map(|value| BoundSummary {
            value,
            method: CheegerMethod::LemmaCut,
            certified: Certification::UpperBound,
        }),
        lambda1_combinatorial: None,
        lambda1_normalized: None,
        cover_verified: None,
        witnesses_verified: true,
        elapsed_ms: None,
    }
}

/// Builds the tower over `seed` and measures every level.
pub fn iterate_tower(seed_name: &str, seed: &MultiGraph, levels: usize, options: &TowerOptions) -> Result<TowerReport> {
    let tower = build_tower(seed, levels, options.vertex_cap)?;
    let mut records = vec![analyze_level(0, seed, None, options)?];
    for (i, cover) in tower.covers.iter().enumerate() {
        records.push(analyze_level(i + 1, &cover.graph, Some(cover), options)?);
    }
    if let Some(t) = &tower.truncated {
        records.push(predicted_record(t));
    }
    Ok(TowerReport {
        schema: crate::SCHEMA_VERSION,
        seed: SeedDescriptor {
            name: seed_name.to_string(),
            vertices: seed.vertex_count(),
            edges: seed.edge_count(),
            rank_pi1: seed.rank_pi1(),
        },
        requested_levels: levels,
        vertex_cap: options.vertex_cap,
        cheeger_cap: options.cheeger_cap,
        spectrum_cap: options.spectrum_cap,
        truncated_at: tower.truncated.map(|t| t.level),
        levels: records,
    })
}
