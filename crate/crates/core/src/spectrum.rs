//! Graph Laplacians, spectra and the discrete Cheeger inequalities.
//!
//! Degrees count endpoint incidences, so a loop adds 2 to the degree and 2 to
//! the diagonal of the adjacency matrix; loops therefore cancel in `D - A`.

use serde::{Deserialize, Serialize, Serializer};

use crate::cheeger::{Certification, CheegerResult};
use crate::eigen::{symmetric_eigen, DenseMatrix, Eigen};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

pub const DEFAULT_SPECTRUM_CAP: usize = 2048;

/// Slack allowed on either side of the Cheeger sandwich.
pub const SANDWICH_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

impl std::str::FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            _ => Err(Error::Parse(format!("unknown laplacian kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LaplacianKind::Combinatorial => "combinatorial",
            LaplacianKind::Normalized => "normalized",
        })
    }
}

/// `D - A` or `D^{-1/2} (D - A) D^{-1/2}`.
pub fn laplacian(g: &MultiGraph, kind: LaplacianKind) -> Result<DenseMatrix> {
    let n = g.vertex_count();
    let degrees = g.degrees();
    let mut l = DenseMatrix::zeros(n);
    for (v, &d) in degrees.iter().enumerate() {
        l.set(v, v, d as f64);
    }
    for &(u, v) in g.edges() {
        if u == v {
            l.add(u, u, -2.0);
        } else {
            l.add(u, v, -1.0);
            l.add(v, u, -1.0);
        }
    }
    if kind == LaplacianKind::Normalized {
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::IsolatedVertex(v));
        }
        let inv_sqrt: Vec<f64> = degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                let x = l.get(i, j);
                if x != 0.0 {
                    l.set(i, j, x * inv_sqrt[i] * inv_sqrt[j]);
                }
            }
        }
    }
    Ok(l)
}

/// Combinatorial Laplacian trace as an exact integer: the sum of degrees of
/// non-loop edge endpoints.
pub fn combinatorial_trace(g: &MultiGraph) -> u64 {
    2 * (g.edge_count() - g.loop_count()) as u64
}

fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap()
}

fn ser_sig12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x, 12))
}

fn ser_sig12_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_f64(round_sig(*x, 12)),
        None => s.serialize_none(),
    }
}

fn ser_sig12_vec<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| round_sig(x, 12)))
}

/// Rounds to 12 significant digits, the precision used in every artifact.
pub fn sig12(x: f64) -> f64 {
    round_sig(x, 12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub kind: LaplacianKind,
    /// Ascending, with multiplicity; values within the zero tolerance are
    /// reported as exactly 0.
    #[serde(serialize_with = "ser_sig12_vec")]
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue above the zero tolerance; 0 for disconnected
    /// graphs and `None` for graphs with fewer than two vertices.
    #[serde(serialize_with = "ser_sig12_opt")]
    pub lambda1: Option<f64>,
    pub zero_multiplicity: usize,
    pub max_degree: usize,
    pub disconnected: bool,
    #[serde(serialize_with = "ser_sig12")]
    pub zero_tolerance: f64,
}

/// Tolerance separating zero from nonzero eigenvalues.
pub fn zero_tolerance(eigenvalues: &[f64]) -> f64 {
    let radius = eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    1e-9 * radius.max(1.0)
}

fn summarize(kind: LaplacianKind, g: &MultiGraph, mut eigenvalues: Vec<f64>) -> SpectralSummary {
    let tol = zero_tolerance(&eigenvalues);
    for x in eigenvalues.iter_mut() {
        if x.abs() <= tol {
            *x = 0.0;
        }
    }
    let zero_multiplicity = eigenvalues.iter().filter(|&&x| x == 0.0).count();
    let disconnected = zero_multiplicity > 1;
    let lambda1 = if eigenvalues.len() < 2 {
        None
    } else if disconnected {
        Some(0.0)
    } else {
        eigenvalues.iter().copied().find(|&x| x > tol)
    };
    SpectralSummary {
        kind,
        eigenvalues,
        lambda1,
        zero_multiplicity,
        max_degree: g.degrees().into_iter().max().unwrap_or(0),
        disconnected,
        zero_tolerance: tol,
    }
}

fn check_cap(g: &MultiGraph, cap: usize) -> Result<()> {
    if g.vertex_count() > cap {
        return Err(Error::CapExceeded {
            what: "dense eigensolver vertex count",
            size: g.vertex_count().to_string(),
            cap,
        });
    }
    Ok(())
}

/// Eigendecomposition of the chosen Laplacian, vectors included.
pub fn laplacian_eigen(g: &MultiGraph, kind: LaplacianKind, cap: usize) -> Result<Eigen> {
    check_cap(g, cap)?;
    Ok(symmetric_eigen(&laplacian(g, kind)?))
}

pub fn full_spectrum(g: &MultiGraph, kind: LaplacianKind, cap: usize) -> Result<SpectralSummary> {
    let eig = laplacian_eigen(g, kind, cap)?;
    Ok(summarize(kind, g, eig.values))
}

/// Eigenvector of the combinatorial Laplacian for its second smallest
/// eigenvalue. `None` for graphs with fewer than two vertices.
pub fn fiedler_vector(g: &MultiGraph, cap: usize) -> Result<Option<Vec<f64>>> {
    let eig = laplacian_eigen(g, LaplacianKind::Combinatorial, cap)?;
    Ok(eig.vectors.into_iter().nth(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SandwichCheck {
    Checked {
        degree: usize,
        #[serde(serialize_with = "ser_sig12")]
        lambda1: f64,
        h: crate::rational::Rational,
        h_certified: Certification,
        /// `h - λ₁/2`.
        #[serde(serialize_with = "ser_sig12")]
        lower_slack: f64,
        lower_holds: bool,
        /// `sqrt(2 d λ₁) - h`; absent when `h` is only an upper bound.
        #[serde(serialize_with = "ser_sig12_opt")]
        upper_slack: Option<f64>,
        upper_holds: Option<bool>,
    },
    Skipped {
        reason: String,
    },
}

impl SandwichCheck {
    /// True when checked and every evaluated half holds.
    pub fn holds(&self) -> bool {
        match self {
            SandwichCheck::Checked {
                lower_holds,
                upper_holds,
                ..
            } => *lower_holds && upper_holds.unwrap_or(true),
            SandwichCheck::Skipped { .. } => false,
        }
    }
}

/// Checks `λ₁/2 <= h <= sqrt(2 d λ₁)` for a connected `d`-regular graph.
///
/// With an upper-bound `h` only the lower half is meaningful and checked.
pub fn cheeger_sandwich(g: &MultiGraph, h: &CheegerResult, s: &SpectralSummary) -> SandwichCheck {
    let skip = |reason: &str| SandwichCheck::Skipped {
        reason: reason.to_string(),
    };
    if s.kind != LaplacianKind::Combinatorial {
        return skip("requires the combinatorial spectrum");
    }
    if !g.is_connected() {
        return skip("graph is disconnected");
    }
    let Some(degree) = g.regular_degree() else {
        return skip("graph is not regular");
    };
    let Some(lambda1) = s.lambda1 else {
        return skip("graph has fewer than two vertices");
    };
    let hv = h.value.to_f64();
    let lower_slack = hv - lambda1 / 2.0;
    let (upper_slack, upper_holds) = match h.certified {
        Certification::Exact => {
            let slack = (2.0 * degree as f64 * lambda1).sqrt() - hv;
            (Some(slack), Some(slack >= -SANDWICH_TOLERANCE))
        }
        Certification::UpperBound => (None, None),
    };
    SandwichCheck::Checked {
        degree,
        lambda1,
        h: h.value,
        h_certified: h.certified,
        lower_slack,
        lower_holds: lower_slack >= -SANDWICH_TOLERANCE,
        upper_slack,
        upper_holds,
    }
}

/// Whether the base eigenvalue multiset embeds in the cover's, matching
/// greedily along both sorted lists.
pub fn spectrum_inclusion(base: &SpectralSummary, cover: &SpectralSummary, tol: f64) -> Result<bool> {
    if base.kind != cover.kind {
        return Err(Error::KindMismatch);
    }
    let mut it = cover.eigenvalues.iter();
    Ok(base
        .eigenvalues
        .iter()
        .all(|&b| it.by_ref().any(|&c| (c - b).abs() <= tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin::*;

    const CAP: usize = DEFAULT_SPECTRUM_CAP;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(laplacian(&figure_eight(), LaplacianKind::Combinatorial).unwrap().rows(), vec![vec![0.0]]);
        assert_eq!(
            laplacian(&complete(2), LaplacianKind::Combinatorial).unwrap().rows(),
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]]
        );
        let l = laplacian(&multiplied(&cycle(4), 2), LaplacianKind::Combinatorial).unwrap();
        assert_eq!(l.rows()[0], vec![4.0, -2.0, 0.0, -2.0]);
    }

    #[test]
    fn normalized_rejects_isolated_vertex() {
        let g = MultiGraph::new(3, [(0, 1)]).unwrap();
        assert_eq!(laplacian(&g, LaplacianKind::Normalized).unwrap_err(), Error::IsolatedVertex(2));
        assert!(laplacian(&g, LaplacianKind::Combinatorial).is_ok());
    }

    #[test]
    fn spectrum_examples() {
        let s = full_spectrum(&multiplied(&cycle(4), 2), LaplacianKind::Combinatorial, CAP).unwrap();
        assert!(close(&s.eigenvalues, &[0.0, 4.0, 4.0, 8.0], 1e-9));
        assert!((s.lambda1.unwrap() - 4.0).abs() < 1e-9);

        let s = full_spectrum(&cycle(4), LaplacianKind::Combinatorial, CAP).unwrap();
        assert!(close(&s.eigenvalues, &[0.0, 2.0, 2.0, 4.0], 1e-9));

        let two = MultiGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        let s = full_spectrum(&two, LaplacianKind::Combinatorial, CAP).unwrap();
        assert_eq!(s.zero_multiplicity, 2);
        assert!(s.disconnected);
        assert_eq!(s.lambda1, Some(0.0));

        let s = full_spectrum(&figure_eight(), LaplacianKind::Combinatorial, CAP).unwrap();
        assert_eq!((s.eigenvalues.clone(), s.lambda1), (vec![0.0], None));
    }

    #[test]
    fn spectrum_cap() {
        assert!(matches!(
            full_spectrum(&cycle(10), LaplacianKind::Combinatorial, 9),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn json_uses_twelve_digits() {
        let s = full_spectrum(&cycle(3), LaplacianKind::Normalized, CAP).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"kind\":\"normalized\""));
        assert!(json.contains("1.5"), "{json}");
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn inclusion_examples() {
        let fig8 = full_spectrum(&figure_eight(), LaplacianKind::Combinatorial, CAP).unwrap();
        let g1 = full_spectrum(&multiplied(&cycle(4), 2), LaplacianKind::Combinatorial, CAP).unwrap();
        assert!(spectrum_inclusion(&fig8, &g1, 1e-9).unwrap());
        let c4 = full_spectrum(&cycle(4), LaplacianKind::Combinatorial, CAP).unwrap();
        let k4 = full_spectrum(&complete(4), LaplacianKind::Combinatorial, CAP).unwrap();
        assert!(!spectrum_inclusion(&c4, &k4, 1e-9).unwrap());
        let n = full_spectrum(&cycle(4), LaplacianKind::Normalized, CAP).unwrap();
        assert_eq!(spectrum_inclusion(&c4, &n, 1e-9), Err(Error::KindMismatch));
    }
}
