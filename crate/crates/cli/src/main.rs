//! `meslab`: tables, verification suites and protocol simulation.

mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use meslab_core::geometry::{incidence_dot, incidence_table, incidence_text, Line};
use meslab_core::mes::MesBasis;
use meslab_core::mub::{exponent_table, BasisLabel};
use meslab_core::protocols::{run_mkp, run_track, BasisPolicy, SimConfig};
use meslab_core::verify::{run_suite, Suite};
use meslab_core::Dimension;

use output::{Document, Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "meslab", version, about = "Exact mutually unbiased bases, line states and Mean King protocols")]
struct Cli {
    /// Output file; `-` for stdout. Defaults to `$MESLAB_OUT/<command>-d<d>.<ext>`
    /// when MESLAB_OUT is set, stdout otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct DimArg {
    /// Odd prime dimension.
    #[arg(long, value_parser = parse_dim)]
    d: Dimension,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase-exponent table of all d+1 bases.
    Mub {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Point/line incidence of the geometry.
    Geometry {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Emit Graphviz source instead.
        #[arg(long, conflicts_with = "format")]
        dot: bool,
    },
    /// Line-state phase tables and the point/line overlap matrix.
    Mes {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Which table to emit as CSV.
        #[arg(long, value_enum, default_value_t = MesTable::Overlaps)]
        table: MesTable,
    },
    /// Run verification suites; exit 1 if any check fails.
    Verify {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
        suite: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Simulate the Mean King game from |R⟩.
    King {
        #[command(flatten)]
        dim: DimArg,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate King tracking from a prepared line state.
    Track {
        #[command(flatten)]
        dim: DimArg,
        /// Prepared line as `M_DD,M0`.
        #[arg(long, value_name = "M_DD,M0")]
        line: String,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MesTable {
    Overlaps,
    Lines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Uniform,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix the King's basis: `cb` (or `ö`) or an integer.
    #[arg(long, value_name = "B")]
    basis: Option<String>,
    /// Draw the King's basis uniformly each round (default).
    #[arg(long, value_enum, conflicts_with = "basis")]
    basis_policy: Option<PolicyArg>,
    /// Include every trial in the report.
    #[arg(long)]
    transcript: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_dim(s: &str) -> Result<Dimension, String> {
    let d: u64 = s.parse().map_err(|_| format!("dimension must be an odd prime (got {s:?})"))?;
    Dimension::new(d).map_err(|e| e.to_string())
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn parse_line(dim: Dimension, s: &str) -> Line {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let coords: Option<Vec<u64>> = parts.iter().map(|p| p.parse().ok()).collect();
    match coords.as_deref() {
        Some(&[m_dd, m0]) if m_dd < dim.get() && m0 < dim.get() => {
            Line::new(dim.elem(m_dd as i64), dim.elem(m0 as i64))
        }
        _ => usage_error(
            ErrorKind::ValueValidation,
            format!("--line expects M_DD,M0 with both in 0..{} (got {s:?})", dim.get()),
        ),
    }
}

fn policy(dim: Dimension, sim: &SimArgs) -> BasisPolicy {
    match (&sim.basis, sim.basis_policy) {
        (None, Some(PolicyArg::Uniform) | None) => BasisPolicy::Uniform,
        (Some(s), _) => {
            let in_range = s.parse::<u64>().map_or(true, |b| b < dim.get());
            match BasisLabel::parse(dim, s) {
                Ok(b) if in_range => BasisPolicy::Fixed(b),
                _ => usage_error(
                    ErrorKind::ValueValidation,
                    format!("--basis expects cb or an integer in 0..{} (got {s:?})", dim.get()),
                ),
            }
        }
    }
}

fn reject_format(command: &str, format: Format) -> ! {
    usage_error(
        ErrorKind::InvalidValue,
        format!("`{command}` does not support --format {}", format.name()),
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    let sink = Sink::new(cli.out.clone());
    let mut passed = true;
    let doc = match cli.command {
        Command::Mub { dim, format } => {
            let table = exponent_table(dim.d);
            match format {
                Format::Json => Document::json("mub", dim.d, None, &table)?,
                Format::Csv => Document::csv("mub", dim.d, output::mub_csv(&table)?),
                Format::Text => Document::text("mub", dim.d, output::mub_text(&table)),
            }
        }
        Command::Geometry { dim, format, dot } => {
            if dot {
                Document::dot("geometry", dim.d, incidence_dot(dim.d))
            } else {
                match format {
                    Format::Json => Document::json("geometry", dim.d, None, &incidence_table(dim.d))?,
                    Format::Csv => Document::csv("geometry", dim.d, output::geometry_csv(&incidence_table(dim.d))?),
                    Format::Text => Document::text("geometry", dim.d, incidence_text(dim.d)),
                }
            }
        }
        Command::Mes { dim, format, table } => {
            let basis = MesBasis::new(dim.d)?;
            match format {
                Format::Json => Document::json("mes", dim.d, None, &output::MesDocument::new(&basis))?,
                Format::Csv => {
                    let body = match table {
                        MesTable::Overlaps => output::overlaps_csv(&basis.overlap_matrix())?,
                        MesTable::Lines => output::line_states_csv(&output::line_phase_tables(&basis))?,
                    };
                    Document::csv("mes", dim.d, body)
                }
                Format::Text => reject_format("mes", format),
            }
        }
        Command::Verify { dim, suite, format } => {
            let suite: Suite = suite.parse()?;
            let reports = run_suite(dim.d, suite)?;
            passed = reports.iter().all(|r| r.passed);
            let body = output::VerifyDocument {
                suite,
                passed,
                suites: reports,
            };
            match format {
                Format::Json => Document::json("verify", dim.d, None, &body)?,
                Format::Csv => Document::csv("verify", dim.d, output::verify_csv(&body)?),
                Format::Text => Document::text("verify", dim.d, output::verify_text(&body)),
            }
        }
        Command::King { dim, sim } => {
            let cfg = sim_config(dim.d, &sim);
            let report = run_mkp(dim.d, &cfg)?;
            sim_document("king", dim.d, &sim, &report)?
        }
        Command::Track { dim, line, sim } => {
            let j = parse_line(dim.d, &line);
            let cfg = sim_config(dim.d, &sim);
            let report = run_track(dim.d, j, &cfg)?;
            sim_document("track", dim.d, &sim, &report)?
        }
    };
    sink.write(&doc)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sim_config(dim: Dimension, sim: &SimArgs) -> SimConfig {
    if sim.trials == 0 {
        usage_error(ErrorKind::ValueValidation, "--trials must be at least 1");
    }
    SimConfig {
        keep_records: sim.transcript,
        ..SimConfig::new(sim.trials, sim.seed, policy(dim, sim))
    }
}

fn sim_document(
    command: &'static str,
    dim: Dimension,
    sim: &SimArgs,
    report: &meslab_core::SimReport,
) -> Result<Document> {
    match sim.format {
        Format::Json => Document::json(command, dim, Some(sim.seed), report),
        Format::Csv => Ok(Document::csv(command, dim, output::sim_csv(report)?)),
        Format::Text => reject_format(command, sim.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            usage_error(ErrorKind::ValueValidation, e);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
