use thiserror::Error;

/// Errors raised by graph construction, covers, cut computation and spectra.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge {edge}: endpoint {endpoint} out of range for {vertex_count} vertices")]
    EndpointOutOfRange {
        edge: usize,
        endpoint: usize,
        vertex_count: usize,
    },
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },
    #[error("label count {labels} does not match vertex count {vertices}")]
    LabelCount { labels: usize, vertices: usize },
    #[error("cover spec does not match graph: {0}")]
    SpecMismatch(String),
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("{what} of size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: String,
        cap: usize,
    },
    #[error("graph has {0} vertices; a bipartition needs at least 2")]
    TooFewVertices(usize),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("laplacian kind mismatch")]
    KindMismatch,
    #[error("trivial cover (r = 0) has no lemma cut")]
    TrivialCover,
    #[error("vertex {0} is isolated; normalized laplacian undefined")]
    IsolatedVertex(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EndpointOutOfRange { .. } => "endpoint_out_of_range",
            Error::InvalidVertex { .. } => "invalid_vertex",
            Error::LabelCount { .. } => "label_count",
            Error::SpecMismatch(_) => "spec_mismatch",
            Error::Disconnected { .. } => "disconnected",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::TooFewVertices(_) => "too_few_vertices",
            Error::InvalidCut(_) => "invalid_cut",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::KindMismatch => "kind_mismatch",
            Error::TrivialCover => "trivial_cover",
            Error::IsolatedVertex(_) => "isolated_vertex",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
