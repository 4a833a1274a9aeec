//! Subcommands of the `edge-extend` binary, runnable in-process.

pub mod check;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use edge_extend::exec::{self, Strategy};
use edge_extend::model::{CompleteGraphIndex, Preset};
use edge_extend::num_rational::Ratio;
use edge_extend::oracle::{generate_instance, oracle_solve_with, Instance, OracleConfig, OracleOutcome, DEFAULT_ORACLE_CAP};
use edge_extend::orchestrator::{solve_instance, SolveConfig, SolveError, Source};
use edge_extend::standard::{standard_coloring, verify_strong_cycle_census};

use format::{coloring_to_dot, parse_coloring, parse_instance, parse_ratio, serialize_coloring, serialize_instance, serialize_trace, ParseError};

#[derive(Parser, Debug)]
#[command(name = "edge-extend", version, about = "List-avoiding extensions of edge precolorings of complete graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Params {
    Paper,
    Relaxed,
}

impl From<Params> for Preset {
    fn from(p: Params) -> Preset {
        match p {
            Params::Paper => Preset::Paper,
            Params::Relaxed => Preset::Relaxed,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a random α-dense, β-sparse instance.
    Generate {
        #[arg(long)]
        p: usize,
        #[arg(long, value_parser = ratio_arg)]
        alpha: Ratio<i64>,
        #[arg(long, value_parser = ratio_arg)]
        beta: Ratio<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        o: Option<PathBuf>,
    },
    /// Extend the precoloring of an instance file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "relaxed")]
        params: Params,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hand failures on small orders to the exact solver.
        #[arg(long)]
        fallback_oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
        #[arg(short, long)]
        o: Option<PathBuf>,
        /// Write one line per swap.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a coloring against an instance.
    Verify { instance: PathBuf, coloring: PathBuf },
    /// Strong 4-cycle counts of the standard coloring of K_{2n}.
    Census {
        #[arg(long)]
        n: usize,
    },
    /// Solve generated instances and write one CSV row each.
    Bench {
        /// Inclusive order range, `lo..hi` or a single order.
        #[arg(long, value_parser = range_arg)]
        p_range: (usize, usize),
        /// Seeds 0..N per order.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_parser = ratio_arg, default_value = "1/5")]
        alpha: Ratio<i64>,
        #[arg(long, value_parser = ratio_arg, default_value = "1/5")]
        beta: Ratio<i64>,
        #[arg(long)]
        csv: PathBuf,
        /// Write 0 in the wall_ms column.
        #[arg(long)]
        no_timing: bool,
    },
    /// Graphviz rendering of a coloring file.
    ExportDot {
        coloring: PathBuf,
        #[arg(short, long)]
        o: PathBuf,
    },
}

fn ratio_arg(s: &str) -> Result<Ratio<i64>, String> {
    parse_ratio(s).ok_or_else(|| format!("`{s}` is not a fraction or decimal"))
}

fn range_arg(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("`{s}` is not `lo..hi`");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Failure kinds mapped to exit codes.
#[derive(Debug)]
enum Exit {
    /// Infeasible instance or a solver that gave up (1).
    Fail(String),
    /// Unreadable input, bad arguments (2).
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Exit {
        Exit::Usage(e)
    }
}

impl From<ParseError> for Exit {
    fn from(e: ParseError) -> Exit {
        Exit::Usage(e.into())
    }
}

/// Runs one command line; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(()) => 0,
        Err(Exit::Fail(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
        Err(Exit::Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_to(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    match cmd {
        Cmd::Generate { p, alpha, beta, seed, o } => {
            let inst = generate_instance(p, alpha, beta, seed).map_err(|e| anyhow!(e))?;
            write_to(o.as_deref(), out, &serialize_instance(&inst))?;
        }
        Cmd::Solve {
            file,
            params,
            seed,
            fallback_oracle,
            oracle_cap,
            o,
            trace,
        } => {
            let inst = parse_instance(&read(&file)?).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            let cfg = SolveConfig {
                seed,
                oracle_fallback: fallback_oracle.then_some(oracle_cap),
                ..SolveConfig::seeded(seed)
            };
            let sol = match solve_instance(&inst, params.into(), &cfg) {
                Ok(s) => s,
                Err(e) => return Err(solve_failure(&inst, e, fallback_oracle, oracle_cap)),
            };
            if let Some(t) = &trace {
                let text = sol.trace.as_ref().map(serialize_trace).unwrap_or_default();
                write_to(Some(t), out, &text)?;
            }
            write_to(o.as_deref(), out, &serialize_coloring(&sol.coloring))?;
            let st = &sol.stats;
            let source = match sol.source {
                Source::Pipeline => "pipeline",
                Source::Oracle => "oracle",
            };
            let _ = writeln!(
                err,
                "solved by {source}: tries={} restarts={} corrections={} swaps={} disturbed={}",
                st.tries,
                st.restarts,
                st.corrections.len(),
                st.swaps,
                st.disturbed
            );
            for w in &st.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
        }
        Cmd::Verify { instance, coloring } => {
            let inst = parse_instance(&read(&instance)?).map_err(|e| anyhow!("{}: {e}", instance.display()))?;
            let col = parse_coloring(&read(&coloring)?).map_err(|e| anyhow!("{}: {e}", coloring.display()))?;
            if col.order != inst.order {
                return Err(anyhow!("coloring is on K_{}, instance on K_{}", col.order, inst.order).into());
            }
            let bad = check::violations(&inst, &col.edge_colors);
            if !bad.is_empty() {
                return Err(Exit::Fail(format!("invalid: {} violations: {}", bad.len(), bad.join("; "))));
            }
            writeln!(out, "valid").context("writing output")?;
        }
        Cmd::Census { n } => {
            let ix = CompleteGraphIndex::new(n).map_err(|e| anyhow!(e))?;
            let h = standard_coloring(&ix);
            let r = verify_strong_cycle_census(&ix, &h);
            let mut s = String::new();
            use std::fmt::Write as _;
            writeln!(s, "n {n}").unwrap();
            writeln!(s, "knn_edges {}", r.counts.len()).unwrap();
            writeln!(s, "strong_min {}", r.min_count()).unwrap();
            writeln!(s, "strong_max {}", r.max_count()).unwrap();
            writeln!(s, "threshold {}", r.threshold).unwrap();
            writeln!(s, "deficient {}", r.deficient).unwrap();
            if n % 2 == 0 {
                let exact = r.min_count() == n / 2 && r.max_count() == n / 2;
                writeln!(s, "exactly_{} {}", n / 2, if exact { "yes" } else { "no" }).unwrap();
            } else {
                writeln!(s, "allowance {}", 3 * n + 7).unwrap();
            }
            out.write_all(s.as_bytes()).context("writing output")?;
        }
        Cmd::Bench {
            p_range,
            seeds,
            alpha,
            beta,
            csv,
            no_timing,
        } => {
            let jobs: Vec<(usize, u64)> = (p_range.0..=p_range.1).flat_map(|p| (0..seeds).map(move |s| (p, s))).collect();
            if p_range.0 < 2 {
                return Err(anyhow!("orders start at 2").into());
            }
            let rows = exec::map_slice(Strategy::Parallel, &jobs, |&(p, seed)| bench_row(p, seed, alpha, beta, no_timing));
            let mut text = String::from("p,seed,stage_reached,swaps,disturbed,wall_ms,verified\n");
            for r in rows {
                text.push_str(&r);
            }
            write_to(Some(&csv), out, &text)?;
        }
        Cmd::ExportDot { coloring, o } => {
            let col = parse_coloring(&read(&coloring)?).map_err(|e| anyhow!("{}: {e}", coloring.display()))?;
            write_to(Some(&o), out, &coloring_to_dot(&col))?;
        }
    }
    Ok(())
}

fn solve_failure(inst: &Instance, e: SolveError, fallback: bool, cap: usize) -> Exit {
    if let SolveError::Invalid(m) = &e {
        return Exit::Usage(anyhow!("invalid instance: {m}"));
    }
    // The fallback already ran the oracle; report its verdict if it proved
    // infeasibility.
    if fallback && inst.order <= cap {
        let ocfg = OracleConfig {
            cap,
            ..OracleConfig::default()
        };
        if let Ok(OracleOutcome::Infeasible) = oracle_solve_with(inst, ocfg) {
            return Exit::Fail(format!("infeasible: no extension exists (solver stage {}: {e})", e.stage()));
        }
    }
    Exit::Fail(format!("solver failure at stage {}: {e}", e.stage()))
}

fn bench_row(p: usize, seed: u64, alpha: Ratio<i64>, beta: Ratio<i64>, no_timing: bool) -> String {
    let start = Instant::now();
    let (stage, swaps, disturbed, verified) = match generate_instance(p, alpha, beta, seed) {
        Err(_) => ("generate".to_string(), 0, 0, false),
        Ok(inst) => {
            let cfg = SolveConfig {
                strategy: Strategy::Sequential,
                ..SolveConfig::seeded(seed)
            };
            match solve_instance(&inst, Preset::Relaxed, &cfg) {
                Ok(s) => {
                    let colors: Vec<_> = inst.graph().edges().map(|e| s.coloring.raw(e)).collect();
                    let ok = check::violations(&inst, &colors).is_empty();
                    ("done".to_string(), s.stats.swaps, s.stats.disturbed, ok)
                }
                Err(e) => {
                    let st = e.stats();
                    (e.stage().to_string(), st.map_or(0, |s| s.swaps), st.map_or(0, |s| s.disturbed), false)
                }
            }
        }
    };
    let ms = if no_timing { 0 } else { start.elapsed().as_millis() };
    format!("{p},{seed},{stage},{swaps},{disturbed},{ms},{verified}\n")
}
