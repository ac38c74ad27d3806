//! `z2cover` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning                                                   |
//! |------|-----------------------------------------------------------|
//! | 0    | success                                                   |
//! | 2    | usage or configuration error                              |
//! | 3    | tower truncated by the vertex cap while `--strict` is set |
//! | 4    | input graph invalid or unparsable                         |
//! | 5    | a size cap was exceeded                                   |
//! | 6    | graph unsuitable for the operation (disconnected, ...)    |
//! | 7    | I/O failure                                               |
//!
//! Errors are reported on stderr as a single JSON object.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use z2cover::cheeger::{self, lemma_cut_from_labels};
use z2cover::graph::builtin;
use z2cover::report;
use z2cover::spectrum::{self, LaplacianKind};
use z2cover::tower::{self, TowerOptions};
use z2cover::{Error, MultiGraph};

#[derive(Parser, Debug)]
#[command(name = "z2cover", version, about = "Z/2-homology cover towers and their expansion")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Output file, or output directory for `tower`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    vertex_cap: usize,
    #[arg(long, global = true, default_value_t = cheeger::DEFAULT_CHEEGER_CAP)]
    cheeger_cap: usize,
    #[arg(long, global = true, default_value_t = spectrum::DEFAULT_SPECTRUM_CAP)]
    spectrum_cap: usize,
    /// Treat tower truncation by the vertex cap as a failure (exit 3).
    #[arg(long, global = true)]
    strict: bool,
    /// Seed graph: figure8, theta, cycle:N, bouquet:R, or a graph JSON path.
    #[arg(long, global = true, default_value = "figure8")]
    seed: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Svg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Lemma,
    Sweep,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Combinatorial,
    Normalized,
}

impl From<Kind> for LaplacianKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Combinatorial => LaplacianKind::Combinatorial,
            Kind::Normalized => LaplacianKind::Normalized,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cover tower over the seed and write JSON, CSV and SVG reports.
    Tower {
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Laplacian kinds to compute at each level.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Kind::Combinatorial, Kind::Normalized])]
        kinds: Vec<Kind>,
        /// Record per-level wall-clock times (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Iterated Z/2-homology cover of a graph.
    Cover {
        input: String,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
    },
    /// Cheeger constant: exact, lemma cut on a labeled cover, or spectral sweep.
    Cheeger {
        input: String,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
    },
    /// Laplacian spectrum.
    Spectrum {
        input: String,
        #[arg(long, value_enum, default_value_t = Kind::Combinatorial)]
        kind: Kind,
    },
}

#[derive(Debug, Serialize)]
struct CliError {
    error: String,
    message: String,
    exit_code: u8,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            error: "config".into(),
            message: message.into(),
            exit_code: 2,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            error: "io".into(),
            message: format!("{}: {e}", path.display()),
            exit_code: 7,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match &e {
            Error::EndpointOutOfRange { .. }
            | Error::InvalidVertex { .. }
            | Error::LabelCount { .. }
            | Error::SpecMismatch(_)
            | Error::Parse(_) => 4,
            Error::CapExceeded { .. } => 5,
            Error::Disconnected { .. }
            | Error::TooFewVertices(_)
            | Error::TrivialCover
            | Error::IsolatedVertex(_)
            | Error::InvalidCut(_)
            | Error::LengthMismatch { .. }
            | Error::KindMismatch => 6,
        };
        CliError {
            error: e.kind().into(),
            message: e.to_string(),
            exit_code,
        }
    }
}

/// Resolves a builtin seed name or reads a graph JSON file.
fn resolve_graph(spec: &str) -> Result<MultiGraph, CliError> {
    let parse_n = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| CliError::config(format!("bad size in seed {spec:?}")))
    };
    if let Some(n) = spec.strip_prefix("cycle:") {
        let n = parse_n(n)?;
        if n == 0 {
            return Err(CliError::config("cycle:N needs N >= 1"));
        }
        return Ok(builtin::cycle(n));
    }
    if let Some(r) = spec.strip_prefix("bouquet:") {
        return Ok(builtin::bouquet(parse_n(r)?));
    }
    match spec {
        "figure8" => Ok(builtin::figure_eight()),
        "theta" => Ok(builtin::theta()),
        path => {
            let path = Path::new(path);
            if !path.exists() {
                return Err(CliError::config(format!("unknown seed or missing file {spec:?}")));
            }
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Ok(MultiGraph::from_json(&text)?)
        }
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn json_only(format: Option<Format>, command: &str) -> Result<(), CliError> {
    match format {
        None | Some(Format::Json) => Ok(()),
        Some(f) => Err(CliError::config(format!("{command} does not support --format {f:?}"))),
    }
}

fn cmd_tower(g: &GlobalOpts, levels: usize, kinds: &[Kind], timings: bool) -> Result<(), CliError> {
    if g.vertex_cap == 0 || g.cheeger_cap == 0 || g.spectrum_cap == 0 {
        return Err(CliError::config("caps must be positive"));
    }
    let seed = resolve_graph(&g.seed)?;
    let mut kinds: Vec<LaplacianKind> = kinds.iter().map(|&k| k.into()).collect();
    kinds.sort();
    kinds.dedup();
    let options = TowerOptions {
        vertex_cap: g.vertex_cap,
        cheeger_cap: g.cheeger_cap,
        spectrum_cap: g.spectrum_cap,
        kinds,
        timings,
    };
    let report = tower::iterate_tower(&g.seed, &seed, levels, &options)?;
    if !report.levels.iter().all(|l| l.witnesses_verified) {
        return Err(CliError {
            error: "self_check".into(),
            message: "a Cheeger witness failed re-verification".into(),
            exit_code: 6,
        });
    }

    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let artifacts: Vec<(&str, String)> = match g.format {
        None => vec![
            ("tower.json", report::tower_json(&report)),
            ("tower.csv", report::tower_csv(&report)),
            ("tower.svg", report::tower_svg(&report)),
        ],
        Some(Format::Json) => vec![("tower.json", report::tower_json(&report))],
        Some(Format::Csv) => vec![("tower.csv", report::tower_csv(&report))],
        Some(Format::Svg) => vec![("tower.svg", report::tower_svg(&report))],
        Some(Format::Dot) => return Err(CliError::config("tower does not support --format dot")),
    };
    for (name, content) in &artifacts {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    }

    println!("level  status       vertices  h_upper  lambda1");
    for l in &report.levels {
        let v = l.vertices.to_string();
        let v = if v.len() > 12 { format!("~1e{}", v.len() - 1) } else { v };
        println!(
            "{:<6} {:<12} {:>9}  {:>7}  {}",
            l.level,
            format!("{:?}", l.status).to_lowercase(),
            v,
            l.h_upper.map(|b| b.value.to_string()).unwrap_or_else(|| "-".into()),
            l.lambda1_combinatorial
                .map(|x| format!("{:.6}", spectrum::sig12(x)))
                .unwrap_or_else(|| "-".into()),
        );
    }
    if let Some(level) = report.truncated_at {
        if g.strict {
            return Err(CliError {
                error: "truncated".into(),
                message: format!("level {level} exceeds vertex cap {}", g.vertex_cap),
                exit_code: 3,
            });
        }
    }
    Ok(())
}

fn cmd_cover(g: &GlobalOpts, input: &str, iterate: usize) -> Result<(), CliError> {
    let base = resolve_graph(input)?;
    let tower = tower::build_tower(&base, iterate, g.vertex_cap)?;
    if let Some(t) = &tower.truncated {
        return Err(Error::CapExceeded {
            what: "cover vertex count",
            size: t.predicted_vertices.to_string(),
            cap: g.vertex_cap,
        }
        .into());
    }
    let graph = tower.level(iterate).expect("all levels constructed");
    let text = match g.format {
        None | Some(Format::Json) => {
            let mut s = graph.to_json();
            s.push('\n');
            s
        }
        Some(Format::Dot) => graph.to_dot(),
        Some(f) => return Err(CliError::config(format!("cover does not support --format {f:?}"))),
    };
    emit(g.out.as_deref(), &text)
}

fn cmd_cheeger(g: &GlobalOpts, input: &str, method: Method) -> Result<(), CliError> {
    json_only(g.format, "cheeger")?;
    let graph = resolve_graph(input)?;
    let result = match method {
        Method::Exact => cheeger::exact_cheeger(&graph, g.cheeger_cap)?,
        Method::Lemma => lemma_cut_from_labels(&graph)?,
        Method::Sweep => cheeger::fiedler_sweep(&graph, g.spectrum_cap)?,
    };
    if !result.reverify(&graph) {
        return Err(CliError {
            error: "self_check".into(),
            message: "witness failed re-verification".into(),
            exit_code: 6,
        });
    }
    emit(g.out.as_deref(), &report::versioned_json(&result))
}

fn cmd_spectrum(g: &GlobalOpts, input: &str, kind: Kind) -> Result<(), CliError> {
    json_only(g.format, "spectrum")?;
    let graph = resolve_graph(input)?;
    let summary = spectrum::full_spectrum(&graph, kind.into(), g.spectrum_cap)?;
    emit(g.out.as_deref(), &report::versioned_json(&summary))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Tower {
            levels,
            kinds,
            timings,
        } => cmd_tower(&cli.global, *levels, kinds, *timings),
        Command::Cover { input, iterate } => cmd_cover(&cli.global, input, *iterate),
        Command::Cheeger { input, method } => cmd_cheeger(&cli.global, input, *method),
        Command::Spectrum { input, kind } => cmd_spectrum(&cli.global, input, *kind),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::from(e.exit_code)
        }
    }
}
