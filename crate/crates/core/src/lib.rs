//! Iterated Z/2-homology covers of finite multigraphs and their expansion.
//!
//! The crate builds the Z/2-homology cover of a connected multigraph, iterates
//! it into a tower (the figure-8 seed gives the Cayley graphs of the free group
//! of rank 2 modulo iterated squares), and measures each level with exact
//! Cheeger constants, certified cut bounds and Laplacian spectra.

pub mod cheeger;
pub mod covers;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod rational;
pub mod report;
pub mod spectrum;
pub mod tower;

pub use cheeger::{cut_ratio, exact_cheeger, lemma_cut, sweep_cut, Certification, CheegerMethod, CheegerResult, Cut};
pub use covers::{deck_action, verify_regular_cover, z2_cover, CoveredGraph, DeckElement, Fiber};
pub use error::{Error, Result};
pub use graph::{spanning_tree, CoverSpec, GraphMetricSummary, MultiGraph, OrientedEdge};
pub use rational::Rational;
pub use spectrum::{full_spectrum, laplacian, LaplacianKind, SpectralSummary};
pub use tower::{iterate_tower, TowerOptions, TowerReport};

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
