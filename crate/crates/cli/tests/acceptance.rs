//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::Value;

use z2cover::cheeger::{exact_cheeger, lemma_cut};
use z2cover::covers::{verify_regular_cover, z2_cover, z2_cover_canonical, CoveredGraph, Fiber};
use z2cover::graph::builtin::*;
use z2cover::graph::{is_isomorphism, spanning_tree};
use z2cover::spectrum::{cheeger_sandwich, full_spectrum, spectrum_inclusion, LaplacianKind};
use z2cover::tower::{build_tower, iterate_tower, TowerOptions};
use z2cover::{MultiGraph, Rational};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_z2cover")
}

fn run_tower(dir: &Path, args: &[&str]) -> Result<Duration, String> {
    let started = Instant::now();
    let out = Command::new(bin())
        .arg("tower")
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(out.status.success(), "tower failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(elapsed)
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn counts(report: &Value, field: &str) -> Vec<BigUint> {
    report["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l[field].as_str().unwrap().parse().unwrap())
        .collect()
}

fn gamma(n: usize) -> MultiGraph {
    build_tower(&figure_eight(), n, 1 << 20).unwrap().level(n).unwrap().clone()
}

/// 1. Tower counts (1, 4, 128) and (2, 8, 256) from the CLI, under 1 s.
fn tower_counts() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let elapsed = run_tower(dir.path(), &["--seed", "figure8", "--levels", "2"])?;
    let report = read_json(&dir.path().join("tower.json"))?;
    let v = counts(&report, "vertices");
    let e = counts(&report, "edges");
    let big = |xs: &[u32]| xs.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
    ensure!(v == big(&[1, 4, 128]), "vertex counts {v:?}");
    ensure!(e == big(&[2, 8, 256]), "edge counts {e:?}");
    for w in v.windows(2) {
        let exponent: usize = (&w[0] + 1u32).try_into().unwrap();
        ensure!(w[1] == &w[0] << exponent, "recursion #V(n+1) = #V(n) 2^(#V(n)+1) fails");
    }
    for (vn, en) in v.iter().zip(&e) {
        ensure!(*en == vn * 2u32, "#E = 2 #V fails");
    }
    ensure!(elapsed < Duration::from_secs(1), "runtime {elapsed:?} >= 1 s");
    Ok(())
}

/// 2. Truncated level 3 predicts 128 · 2^129 vertices; rank π₁(Γ₂) = 129.
fn level_three_prediction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_tower(dir.path(), &["--seed", "figure8", "--levels", "3"])?;
    let report = read_json(&dir.path().join("tower.json"))?;
    ensure!(report["truncated_at"] == 3, "truncated_at = {}", report["truncated_at"]);
    let levels = report["levels"].as_array().unwrap();
    ensure!(levels.len() == 4, "expected 4 level records");
    ensure!(levels[3]["status"] == "predicted", "level 3 not predicted");
    ensure!(levels[2]["rank_pi1"] == 129, "rank of Γ₂ = {}", levels[2]["rank_pi1"]);
    let predicted: BigUint = levels[3]["vertices"].as_str().unwrap().parse().unwrap();
    ensure!(predicted == BigUint::from(128u32) << 129usize, "predicted {predicted}");
    ensure!(levels[3]["sheets_log2"] == 129, "sheets exponent");
    Ok(())
}

/// 3. Lemma cuts: Γ₁ 2|2 crossing 4 ratio 2; Γ₂ 64|64 crossing 32 ratio 1/2.
fn lemma_certificates() -> Outcome {
    let c1 = z2_cover_canonical(&figure_eight(), 1 << 20).unwrap();
    let c2 = z2_cover_canonical(&c1.graph, 1 << 20).unwrap();
    for (cover, sides, crossing, ratio) in [
        (&c1, 2, 4, Rational::integer(2)),
        (&c2, 64, 32, Rational::new(1, 2)),
    ] {
        let r = lemma_cut(cover).map_err(|e| e.to_string())?;
        let w = &r.witness;
        ensure!(
            w.side_a.len() == sides && w.side_b.len() == sides,
            "sides {}|{}",
            w.side_a.len(),
            w.side_b.len()
        );
        ensure!(w.crossing_edges == crossing, "crossing {}", w.crossing_edges);
        ensure!(r.value == ratio, "ratio {}", r.value);
        ensure!(
            r.value == Rational::new(2, cover.base.vertex_count() as u64),
            "ratio is not 2/#V(base)"
        );
        ensure!(r.reverify(&cover.graph), "witness does not re-verify");
    }
    Ok(())
}

/// 4. Exact h(Γ₁) = 2 = lemma bound; exact h(C_2m) = 2/m = lemma bound, 2m <= 26.
fn exact_oracle_agreement() -> Outcome {
    let c1 = z2_cover_canonical(&figure_eight(), 1 << 20).unwrap();
    let h1 = exact_cheeger(&c1.graph, 26).map_err(|e| e.to_string())?;
    ensure!(h1.value == Rational::integer(2), "h(Γ₁) = {}", h1.value);
    ensure!(h1.value == lemma_cut(&c1).unwrap().value, "lemma bound not tight on Γ₁");
    for m in 1..=13usize {
        let cover = z2_cover_canonical(&cycle(m), 1 << 20).unwrap();
        let g = &cover.graph;
        ensure!(
            g.vertex_count() == 2 * m && g.regular_degree() == Some(2) && g.is_connected(),
            "cover of C_{m} is not C_{}",
            2 * m
        );
        let exact = exact_cheeger(g, 26).map_err(|e| e.to_string())?;
        let lemma = lemma_cut(&cover).unwrap();
        let expected = Rational::new(2, m as u64);
        ensure!(exact.value == expected, "h(C_{}) = {} != 2/{m}", 2 * m, exact.value);
        ensure!(lemma.value == expected, "lemma bound {} != 2/{m}", lemma.value);
    }
    Ok(())
}

/// 5. Upper bounds 2, 1/2, 1/64 strictly decrease; λ₁(Γ₂) < λ₁(Γ₁) = 4.
fn decay_trend() -> Outcome {
    let report = iterate_tower("figure8", &figure_eight(), 3, &TowerOptions::default()).map_err(|e| e.to_string())?;
    let lemma: Vec<Rational> = report.levels.iter().filter_map(|l| l.lemma_bound).collect();
    ensure!(
        lemma == [Rational::integer(2), Rational::new(1, 2), Rational::new(2, 128)],
        "lemma bounds {lemma:?}"
    );
    let upper = report.upper_bounds();
    ensure!(upper.len() == 3, "upper bounds {upper:?}");
    ensure!(upper.windows(2).all(|w| w[1] < w[0]), "upper bounds not strictly decreasing: {upper:?}");
    let l1 = report.levels[1].lambda1_combinatorial.ok_or("no λ₁(Γ₁)")?;
    let l2 = report.levels[2].lambda1_combinatorial.ok_or("no λ₁(Γ₂)")?;
    ensure!((l1 - 4.0).abs() <= 1e-9, "λ₁(Γ₁) = {l1}");
    ensure!(l2 < l1 - 1e-9, "λ₁(Γ₂) = {l2} not below λ₁(Γ₁)");
    // symbolic continuation: the bound 2/#V(n-1) has denominators following
    // #V(n+1) = #V(n) 2^(#V(n)+1), so each step at least quadruples it
    let mut v = vec![BigUint::from(1u32)];
    for _ in 0..3 {
        let last = v.last().unwrap();
        let exponent: usize = (last + 1u32).try_into().map_err(|_| "exponent overflow")?;
        v.push(last << exponent);
    }
    ensure!(v[3] == BigUint::from(1u32) << 136usize, "#V(3) = {}", v[3]);
    ensure!(v.windows(2).all(|w| w[1] >= &w[0] * 4u32), "denominators do not quadruple");
    Ok(())
}

fn sandwich_corpus() -> Vec<(String, MultiGraph)> {
    let mut corpus: Vec<(String, MultiGraph)> = Vec::new();
    for n in 3..=16 {
        corpus.push((format!("C{n}"), cycle(n)));
    }
    for n in 2..=8 {
        corpus.push((format!("2C{n}"), multiplied(&cycle(n), 2)));
    }
    for n in 2..=7 {
        corpus.push((format!("K{n}"), complete(n)));
    }
    corpus.push(("circ(8;1,2)".into(), circulant(8, &[1, 2])));
    corpus.push(("circ(10;1,3)".into(), circulant(10, &[1, 3])));
    corpus.push(("circ(12;1,5)".into(), circulant(12, &[1, 5])));
    corpus.push(("circ(13;1,5)".into(), circulant(13, &[1, 5])));
    corpus.push(("Γ₁".into(), gamma(1)));
    corpus.push(("cover(theta)".into(), z2_cover_canonical(&theta(), 1 << 20).unwrap().graph));
    corpus.push(("cover(bouquet3)".into(), z2_cover_canonical(&bouquet(3), 1 << 20).unwrap().graph));
    corpus.retain(|(_, g)| g.vertex_count() <= 16);
    corpus
}

/// 6. λ₁/2 <= h <= sqrt(2 d λ₁) on >= 20 regular graphs with <= 16 vertices.
fn cheeger_sandwich_suite() -> Outcome {
    let corpus = sandwich_corpus();
    ensure!(corpus.len() >= 20, "corpus has {} graphs", corpus.len());
    for (name, g) in &corpus {
        ensure!(g.is_connected() && g.regular_degree().is_some(), "{name} not connected regular");
        let h = exact_cheeger(g, 26).map_err(|e| format!("{name}: {e}"))?;
        let s = full_spectrum(g, LaplacianKind::Combinatorial, 2048).map_err(|e| format!("{name}: {e}"))?;
        let check = cheeger_sandwich(g, &h, &s);
        ensure!(check.holds(), "{name}: {check:?}");
    }
    Ok(())
}

fn flip_edge_map(original: &CoveredGraph, flipped: &CoveredGraph, j: usize) -> Vec<usize> {
    let ej = original.spec.cotree_edges[j].edge;
    let bit = original.basis_sheet(j + 1);
    flipped
        .edge_fibers
        .iter()
        .map(|f| {
            let sheet = if f.base == ej { f.sheet ^ bit } else { f.sheet };
            original.edge_id(Fiber { base: f.base, sheet })
        })
        .collect()
}

/// 7. Covering-structure properties on every constructed cover.
fn covering_structure_suite() -> Outcome {
    let bases: Vec<(&str, MultiGraph)> = vec![
        ("figure8", figure_eight()),
        ("Γ₁", gamma(1)),
        ("loop", bouquet(1)),
        ("bouquet3", bouquet(3)),
        ("bouquet4", bouquet(4)),
        ("theta", theta()),
        ("C5", cycle(5)),
        ("2C3", multiplied(&cycle(3), 2)),
        ("K4", complete(4)),
        ("P4", path(4)),
        ("lollipop", MultiGraph::new(4, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 3)]).unwrap()),
    ];
    for (name, base) in &bases {
        let spec = spanning_tree(base);
        let r = spec.rank();
        let cover = z2_cover(base, &spec, 1 << 20).map_err(|e| format!("{name}: {e}"))?;
        let g = &cover.graph;
        ensure!(
            g.vertex_count() == base.vertex_count() << r && g.edge_count() == base.edge_count() << r,
            "{name}: sheet count"
        );
        ensure!(g.is_connected(), "{name}: cover disconnected");
        for (x, f) in cover.vertex_fibers.iter().enumerate() {
            ensure!(g.degree(x).unwrap() == base.degree(f.base).unwrap(), "{name}: degree at {x}");
        }
        let rec = verify_regular_cover(&cover);
        ensure!(rec.passed() && rec.exhaustive, "{name}: {rec:?}");
        ensure!(rec.deck_elements_checked == 1 << r, "{name}: deck group order");
        ensure!(rec.orbit_count == base.vertex_count(), "{name}: orbit count");
        let sb = full_spectrum(base, LaplacianKind::Combinatorial, 2048).unwrap();
        let sc = full_spectrum(g, LaplacianKind::Combinatorial, 2048).unwrap();
        ensure!(spectrum_inclusion(&sb, &sc, 1e-9).unwrap(), "{name}: spectrum inclusion");
        let identity: Vec<usize> = (0..g.vertex_count()).collect();
        for j in 0..r {
            let flipped = z2_cover(base, &spec.with_flipped(j), 1 << 20).unwrap();
            let emap = flip_edge_map(&cover, &flipped, j);
            ensure!(
                is_isomorphism(&flipped.graph, g, &identity, &emap),
                "{name}: flipping e_{} changes the cover",
                j + 1
            );
            let sf = full_spectrum(&flipped.graph, LaplacianKind::Combinatorial, 2048).unwrap();
            ensure!(
                sf.eigenvalues.iter().zip(&sc.eigenvalues).all(|(a, b)| (a - b).abs() <= 1e-9),
                "{name}: flipped spectrum differs"
            );
        }
    }
    Ok(())
}

/// 8. Two identical tower runs give byte-identical JSON, CSV and SVG.
fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for dir in [a.path(), b.path()] {
        run_tower(dir, &["--seed", "figure8", "--levels", "3"])?;
    }
    for name in ["tower.json", "tower.csv", "tower.svg"] {
        let x = std::fs::read(a.path().join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(name)).map_err(|e| e.to_string())?;
        ensure!(!x.is_empty() && x == y, "{name} differs between runs");
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 tower counts", tower_counts, Duration::from_secs(1)),
        ("AC2 level-3 prediction", level_three_prediction, Duration::MAX),
        ("AC3 lemma-cut certificates", lemma_certificates, Duration::from_secs(1)),
        ("AC4 exact Cheeger oracle agreement", exact_oracle_agreement, Duration::from_secs(60)),
        ("AC5 decay trend", decay_trend, Duration::from_secs(5)),
        ("AC6 Cheeger sandwich suite", cheeger_sandwich_suite, Duration::from_secs(60)),
        ("AC7 covering-structure suite", covering_structure_suite, Duration::from_secs(60)),
        ("AC8 determinism", determinism, Duration::MAX),
    ];
    let mut failures = 0;
    for (name, criterion, limit) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(criterion)
            .unwrap_or_else(|_| Err("panicked".to_string()))
            .and_then(|()| {
                let elapsed = started.elapsed();
                if elapsed < limit {
                    Ok(())
                } else {
                    Err(format!("runtime {elapsed:?} exceeds {limit:?}"))
                }
            });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  {name} ({secs:.3}s)"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {name} ({secs:.3}s): {why}");
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
