use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perfect_heap::oracle::run_differential_with;
use perfect_heap::stats::{write_records, Format};
use perfect_heap::{bench, counter, dot, sort, workload};
use perfect_heap::{AuditMode, FixPolicy, Natural, StatsRecord, WorkloadScript};

/// Priority queue of perfect heap-ordered trees: replay, verify, sort,
/// benchmark and inspect.
#[derive(Parser)]
#[command(name = "perfect-heap", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Fix policy: at most two trees per height (eager) or four (relaxed).
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::Eager)]
    policy: PolicyArg,
    /// Rearrangements a relaxed fix makes before falling back to the hard cap.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    relaxed_budget: u32,
    /// Seed for generated keys and workloads.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// When to run full validation and the ledger audit
    /// (`verify` defaults to always, everything else to final).
    #[arg(long, global = true, value_enum)]
    audit: Option<AuditArg>,
    /// Output format for stats and tables.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Eager,
    Relaxed,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditArg {
    Always,
    Final,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Heapsort keys (whitespace-separated integers) and print them in order.
    Sort {
        /// Key file; reads stdin when absent.
        input: Option<PathBuf>,
        /// Sort this many random 32-bit keys instead of reading input.
        #[arg(long, conflicts_with = "input")]
        random: Option<usize>,
        /// Write the per-operation stats stream here.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Simulate the digit counter behind the forest, one row per increment.
    Counter { increments: u64 },
    /// Replay a script against the queue and a reference queue; exit 1 on any divergence.
    Verify {
        script: PathBuf,
        /// Write the per-operation stats stream here.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Replay a script and print the per-operation stats stream.
    Replay { script: PathBuf },
    /// Count comparisons and rearrangements for each size.
    Bench {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Also write each run's per-operation stats to this directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Print the forest as a Graphviz digraph.
    Dot {
        script: PathBuf,
        /// Render the state after this operation (0-based); default is the end.
        #[arg(long)]
        at: Option<usize>,
    },
    /// Write a random workload script.
    Generate {
        ops: usize,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failure and the exit code it maps to.
enum Failure {
    /// Divergence or invariant failure.
    Check(String),
    /// Bad input or I/O trouble.
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Global {
    fn policy(&self) -> FixPolicy {
        match self.policy {
            PolicyArg::Eager => FixPolicy::eager(),
            PolicyArg::Relaxed => {
                FixPolicy::relaxed(self.relaxed_budget).expect("budget is at least 1")
            }
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }
    }

    fn audit(&self, default: AuditMode) -> AuditMode {
        match self.audit {
            Some(AuditArg::Always) => AuditMode::Always,
            Some(AuditArg::Final) => AuditMode::Final,
            None => default,
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
        None => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn read_script(path: &Path) -> Result<WorkloadScript, Failure> {
    read_input(Some(path))?
        .parse()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_keys(text: &str) -> Result<Vec<i64>, Failure> {
    let mut keys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for field in line.split_whitespace() {
            let key = field
                .parse()
                .map_err(|_| Failure::Usage(format!("line {}: invalid key `{field}`", i + 1)))?;
            keys.push(key);
        }
    }
    Ok(keys)
}

fn write_stats(path: &Path, records: &[StatsRecord], format: Format) -> Result<(), Failure> {
    let file =
        File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    write_records(BufWriter::new(file), records, format)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let policy = g.policy();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Sort {
            input,
            random,
            stats,
        } => {
            let keys = match random {
                Some(n) => sort::random_keys(n, g.seed),
                None => parse_keys(&read_input(input.as_deref())?)?,
            };
            let mut records = Vec::new();
            let run = sort::heapsort_with(&keys, policy, |r| {
                if stats.is_some() {
                    records.push(r.clone());
                }
            });
            for k in &run.sorted {
                writeln!(out, "{k}")?;
            }
            if let Some(path) = stats {
                write_stats(&path, &records, g.format())?;
            }
            eprintln!(
                "sorted {} keys: {} comparisons, {} rearrangements",
                run.sorted.len(),
                run.comparisons,
                run.rearrangements
            );
        }
        Command::Counter { increments } => {
            counter::write_trace(
                &mut out,
                &counter::run_counter(increments, policy),
                g.format(),
            )?;
        }
        Command::Verify { script, stats } => {
            let script = read_script(&script)?;
            let mut records = Vec::new();
            let verdict =
                run_differential_with(&script, policy, Natural, g.audit(AuditMode::Always), |r| {
                    if stats.is_some() {
                        records.push(r.clone());
                    }
                });
            if let Some(path) = stats {
                write_stats(&path, &records, g.format())?;
            }
            match verdict.divergence {
                None => writeln!(out, "pass: {} operations", verdict.ops_run)?,
                Some(d) => return Err(Failure::Check(d.to_string())),
            }
        }
        Command::Replay { script } => {
            let script = read_script(&script)?;
            let mut records = Vec::new();
            let verdict =
                run_differential_with(&script, policy, Natural, g.audit(AuditMode::Final), |r| {
                    records.push(r.clone());
                });
            write_records(&mut out, &records, g.format())?;
            if let Some(d) = verdict.divergence {
                out.flush()?;
                return Err(Failure::Check(d.to_string()));
            }
        }
        Command::Bench { sizes, trace_dir } => {
            let cells = bench::run(&sizes, policy, g.seed, trace_dir.is_some());
            if let Some(dir) = &trace_dir {
                fs::create_dir_all(dir)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
                for cell in &cells {
                    let name = format!("{}-n{}.csv", cell.row.workload, cell.row.n);
                    write_stats(&dir.join(name), &cell.trace, Format::Csv)?;
                }
            }
            let rows: Vec<_> = cells.into_iter().map(|c| c.row).collect();
            bench::write_rows(&mut out, &rows, g.format())?;
        }
        Command::Dot { script, at } => {
            let script = read_script(&script)?;
            let text = dot::render_script_at(&script, policy, at)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            out.write_all(text.as_bytes())?;
        }
        Command::Generate { ops, output } => {
            let text = workload::generate(ops, g.seed).to_string();
            match output {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => out.write_all(text.as_bytes())?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("divergence: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
