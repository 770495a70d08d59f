//! Command-line front end: solve, reference oracle, distance-file checking,
//! differential testing, and stats benching over the extended DIMACS format.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use negpath::driver::{solve, verify_distances, SolveConfig, Solved};
use negpath::gen::gen_random;
use negpath::graph::{Dist, Graph, VertexId};
use negpath::hop::{bellman_ford, BellmanFord, CycleCertificate, Source};
use negpath::io::{parse_graph, serialize_graph};
use negpath::shortcut::Strategy;
use negpath::stats::Stats;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "negpath", about = "Shortest paths with negative edge weights", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Reference,
    Simple,
    Bucketed,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Reference => Strategy::Reference,
            StrategyArg::Simple => Strategy::Simple,
            StrategyArg::Bucketed => Strategy::Bucketed,
        }
    }
}

#[derive(Args)]
struct SolveFlags {
    /// Extended DIMACS input file
    #[arg(long)]
    input: PathBuf,
    /// Source vertex, 1-indexed
    #[arg(long)]
    source: usize,
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Bucketed)]
    strategy: StrategyArg,
    /// Negative-vertex count below which plain layered relaxation runs; 0 = auto
    #[arg(long, default_value_t = 0)]
    base_threshold: usize,
    /// Write run counters as JSON here
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve single-source shortest paths with the shortcutting solver
    Sssp(SolveFlags),
    /// Solve with the reference relaxation instead (same input and output)
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        source: usize,
    },
    /// Verify a distance file produced by `sssp` or `oracle`
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        source: usize,
        /// Distance file to verify
        #[arg(long)]
        distances: PathBuf,
    },
    /// Random corpus: solver vs reference, report mismatches
    Difftest {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0.3)]
        neg_fraction: f64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Bucketed)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1)]
        base_threshold: usize,
    },
    /// Solve and emit run counters as JSON
    Bench(SolveFlags),
}

fn source_id(g: &Graph, one_indexed: usize) -> Result<VertexId> {
    if one_indexed == 0 || one_indexed > g.vertex_count() {
        bail!("source {} out of range 1..{}", one_indexed, g.vertex_count());
    }
    Ok((one_indexed - 1) as VertexId)
}

fn load(path: &PathBuf) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn fmt_dist(d: Dist) -> String {
    match d {
        None => "inf".into(),
        Some(x) if x == x.trunc() && x.abs() < 1e15 => format!("{}", x as i64),
        Some(x) => format!("{x}"),
    }
}

fn render_distances(d: &[Dist]) -> String {
    let mut out = String::new();
    for (v, &x) in d.iter().enumerate() {
        writeln!(out, "d {} {}", v + 1, fmt_dist(x)).unwrap();
    }
    out
}

fn render_cycle(c: &CycleCertificate) -> String {
    let ids: Vec<String> = c.walk.iter().map(|&v| (v + 1).to_string()).collect();
    format!("negcycle {} {}\n", ids.join(" "), fmt_dist(Some(c.total_weight)))
}

fn cmd_sssp(flags: &SolveFlags, emit_stats_to_stdout: bool) -> Result<ExitCode> {
    let g = load(&flags.input)?;
    let src = source_id(&g, flags.source)?;
    let cfg = SolveConfig {
        strategy: flags.strategy.into(),
        base_threshold: flags.base_threshold,
        seed: flags.seed,
        ..SolveConfig::default()
    };
    let stats = Stats::default();
    let start = Instant::now();
    let solved = solve(&g, src, &cfg, &stats);
    let snapshot = stats.snapshot(start.elapsed().as_secs_f64() * 1e3);
    match solved {
        Solved::Distances(d) => print!("{}", render_distances(&d)),
        Solved::NegativeCycle(c) => print!("{}", render_cycle(&c)),
    }
    let json = serde_json::to_string_pretty(&snapshot)?;
    if let Some(path) = &flags.stats {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    if emit_stats_to_stdout {
        println!("{json}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(input: &PathBuf, source: usize) -> Result<ExitCode> {
    let g = load(input)?;
    let src = source_id(&g, source)?;
    match bellman_ford(&g, Source::Vertex(src)) {
        BellmanFord::Distances(d) => print!("{}", render_distances(&d)),
        BellmanFord::NegativeCycle(c) => print!("{}", render_cycle(&c)),
    }
    Ok(ExitCode::SUCCESS)
}

/// Distance files hold `d <v> <dist|inf>` lines, or one `negcycle ...` line.
enum Claim {
    Distances(Vec<Dist>),
    Cycle(Vec<VertexId>, f64),
}

fn parse_claim(text: &str, n: usize) -> Result<Claim> {
    let mut dists: Vec<Dist> = vec![None; n];
    let mut seen = vec![false; n];
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "d" if toks.len() == 3 => {
                let v: usize = toks[1].parse().with_context(|| format!("line {ln}: bad id"))?;
                if v == 0 || v > n {
                    bail!("line {ln}: vertex {v} out of range 1..{n}");
                }
                dists[v - 1] = match toks[2] {
                    "inf" => None,
                    s => Some(s.parse::<f64>().with_context(|| format!("line {ln}: bad dist"))?),
                };
                seen[v - 1] = true;
            }
            "negcycle" if toks.len() >= 4 => {
                let w: f64 = toks[toks.len() - 1].parse().context("bad cycle weight")?;
                let walk = toks[1..toks.len() - 1]
                    .iter()
                    .map(|s| Ok(s.parse::<usize>()? as VertexId - 1))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Claim::Cycle(walk, w));
            }
            _ => bail!("line {ln}: unrecognized distance line"),
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        bail!("no distance line for vertex {}", v + 1);
    }
    Ok(Claim::Distances(dists))
}

fn cmd_check(input: &PathBuf, source: usize, distances: &PathBuf) -> Result<ExitCode> {
    let g = load(input)?;
    let src = source_id(&g, source)?;
    let text = fs::read_to_string(distances)
        .with_context(|| format!("reading {}", distances.display()))?;
    match parse_claim(&text, g.vertex_count())? {
        Claim::Distances(d) => {
            let bad = verify_distances(&g, src, &d);
            if bad.is_empty() {
                println!("ok: {} distances verified", g.vertex_count());
                Ok(ExitCode::SUCCESS)
            } else {
                for b in &bad {
                    eprintln!("mismatch: {b}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Claim::Cycle(walk, w) => {
            let cert = CycleCertificate { walk, total_weight: w };
            if cert.verify(&g) {
                println!("ok: negative cycle verified ({w})");
                // a verified negative cycle still means no distance table exists
                Ok(ExitCode::from(1))
            } else {
                eprintln!("mismatch: claimed cycle does not verify");
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn cmd_difftest(
    n: usize,
    cases: u64,
    seed: u64,
    density: f64,
    neg_fraction: f64,
    strategy: Strategy,
    base_threshold: usize,
) -> Result<ExitCode> {
    let mut mismatches = 0u64;
    for case in 0..cases {
        let g = gen_random(n, density, -8, 8, neg_fraction, seed ^ case);
        let cfg = SolveConfig { strategy, base_threshold, seed: seed ^ case, ..SolveConfig::default() };
        for src in 0..n as VertexId {
            let stats = Stats::default();
            let got = solve(&g, src, &cfg, &stats);
            let ok = match (bellman_ford(&g, Source::Vertex(src)), got) {
                (BellmanFord::Distances(want), Solved::Distances(d)) => want == d,
                (BellmanFord::NegativeCycle(_), Solved::NegativeCycle(c)) => c.verify(&g),
                _ => false,
            };
            if !ok {
                mismatches += 1;
                eprintln!("mismatch: case {case} source {}", src + 1);
                eprint!("{}", serialize_graph(&g));
            }
        }
    }
    if mismatches == 0 {
        println!("ok: {cases} cases x {n} sources, no mismatches");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{mismatches} mismatches");
        Ok(ExitCode::from(1))
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Sssp(flags) => cmd_sssp(flags, false),
        Cmd::Bench(flags) => cmd_sssp(flags, true),
        Cmd::Oracle { input, source } => cmd_oracle(input, *source),
        Cmd::Check { input, source, distances } => cmd_check(input, *source, distances),
        Cmd::Difftest { n, cases, seed, density, neg_fraction, strategy, base_threshold } => {
            cmd_difftest(*n, *cases, *seed, *density, *neg_fraction, (*strategy).into(), *base_threshold)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
