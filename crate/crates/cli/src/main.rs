//! `sqfs` — build, verify, profile, and search integer sets whose sumset
//! avoids squarefree numbers.
//!
//! Exit codes: 0 all claims pass, 1 at least one claim failed, 2 usage or
//! I/O error. Reports go to stdout (JSON by default, CSV with
//! `--format csv`), diagnostics to stderr. The environment variable
//! `SQFS_CACHE` overrides `--cache`.

mod cache;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sqfs_core::{analytic, construct, search, sets, sieve, verify};

#[derive(Parser)]
#[command(name = "sqfs", version, about = "Sumsets without squarefree integers: construct, verify, search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Greedy,
    Seeded,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification suite.
    Verify {
        /// Scan window.
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Construction parameter; repeat for several (default 3 and 4).
        #[arg(long = "k")]
        ks: Vec<u32>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Sieve cache file; loaded when compatible, written otherwise.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the constant table and the recomputed-constant ledger.
    Constants {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate or search periodic certificates mod M.
    Search {
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Construction parameter for `--mode seeded` (seeds with its
        /// residues mod 4q; modulus must be 4·q(k) when given).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = search::DEFAULT_EXACT_LIMIT)]
        exact_limit: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Residue profile of a constructed set.
    Profile {
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 36)]
        modulus: u64,
        /// Profile the construction with this parameter.
        #[arg(long, conflicts_with = "paired")]
        k: Option<u32>,
        /// Profile the paired set with this parameter (1..=8).
        #[arg(long)]
        paired: Option<u8>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build the squarefree sieve and write it to the cache file.
    Sieve {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        cache: PathBuf,
    },
}

fn effective_cache(flag: Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os("SQFS_CACHE").map(PathBuf::from).or(flag)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("sqfs: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Verify { n, ks, epsilon, threads, seed, format, cache, out } => {
            let ks = if ks.is_empty() { vec![3, 4] } else { ks };
            let config = verify::SuiteConfig { n, ks, epsilon, seed };
            let report = with_pool(threads, || -> Result<_> {
                let table = load_or_build_table(n, effective_cache(cache))?;
                Ok(verify::run_suite_with_table(&config, &table))
            })??;
            let rendered = match format {
                Format::Json => output::report_json(&config, &report)?,
                Format::Csv => output::report_csv(&report)?,
            };
            match out {
                Some(path) => std::fs::write(&path, rendered)
                    .with_context(|| format!("writing report to {}", path.display()))?,
                None => print!("{rendered}"),
            }
            for failure in report.failures() {
                eprintln!("FAIL {}: {:?}", failure.name, failure.note);
            }
            Ok(report.all_passed())
        }
        Command::Constants { format } => {
            let mut claims: Vec<sqfs_core::Claim> = analytic::constants_map()
                .into_iter()
                .map(|(name, value)| {
                    sqfs_core::Claim::new(format!("constant-{name}"), sqfs_core::ClaimStatus::Pass)
                        .value(value)
                })
                .collect();
            claims.extend(analytic::constant_ledger());
            let report = sqfs_core::VerificationReport::new(claims);
            let rendered = match format {
                Format::Json => output::constants_json(&report)?,
                Format::Csv => output::report_csv(&report)?,
            };
            print!("{rendered}");
            Ok(report.all_passed())
        }
        Command::Search { modulus, mode, k, exact_limit, format } => {
            let outcome = match mode {
                Mode::Exact => {
                    let sets = search::enumerate_maximal(modulus, exact_limit)?;
                    output::SearchOutcome {
                        modulus,
                        mode: "exact",
                        max_density: sets.first().map(|s| s.density()).unwrap_or(0.0),
                        certificates: sets,
                    }
                }
                Mode::Greedy => {
                    let (density, cert) = search::max_density(modulus, search::SearchMode::Greedy)?;
                    output::SearchOutcome {
                        modulus,
                        mode: "greedy",
                        max_density: density,
                        certificates: vec![cert],
                    }
                }
                Mode::Seeded => {
                    let k = k.context("--mode seeded needs --k")?;
                    let q = construct::q_of(k)?;
                    anyhow::ensure!(
                        modulus == 4 * q,
                        "seeded search for k={k} needs --modulus {}",
                        4 * q
                    );
                    let a = construct::build_a(k, modulus)?;
                    let seed_set = search::PeriodicSet::from_integer_set(&a, modulus)?;
                    let (density, cert) =
                        search::max_density(modulus, search::SearchMode::Seeded(seed_set))?;
                    output::SearchOutcome {
                        modulus,
                        mode: "seeded",
                        max_density: density,
                        certificates: vec![cert],
                    }
                }
            };
            let rendered = match format {
                Format::Json => output::search_json(&outcome)?,
                Format::Csv => output::search_csv(&outcome)?,
            };
            print!("{rendered}");
            Ok(true)
        }
        Command::Profile { n, modulus, k, paired, epsilon, format } => {
            let (label, set) = match (k, paired) {
                (Some(k), None) => (format!("construction-k{k}"), construct::build_a(k, n)?),
                (None, Some(a)) => (format!("paired-{a}"), construct::build_paired(a, n)?),
                (None, None) => ("construction-k3".to_string(), construct::build_a(3, n)?),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let profile = sets::profile(&set, modulus, n)?;
            let outcome = output::ProfileOutcome::build(&label, &profile, epsilon)?;
            let rendered = match format {
                Format::Json => output::profile_json(&outcome)?,
                Format::Csv => output::profile_csv(&outcome)?,
            };
            print!("{rendered}");
            Ok(true)
        }
        Command::Sieve { n, cache: path } => {
            let path = effective_cache(Some(path)).expect("path given");
            let table = sieve::build_squarefree_table(n)?;
            cache::write_cache(&path, &table)?;
            eprintln!(
                "wrote sieve cache {} (bound {}, {} squarefree)",
                path.display(),
                table.bound(),
                table.count()
            );
            Ok(true)
        }
    }
}

fn load_or_build_table(n: u64, cache: Option<PathBuf>) -> Result<sqfs_core::SquarefreeTable> {
    if let Some(path) = &cache {
        if path.exists() {
            match cache::read_cache(path) {
                Ok(table) if table.bound() == n => return Ok(table),
                Ok(table) => eprintln!(
                    "sqfs: cache {} has bound {}, rebuilding for {n}",
                    path.display(),
                    table.bound()
                ),
                Err(err) => eprintln!("sqfs: ignoring cache: {err:#}"),
            }
        }
    }
    let table = sieve::build_squarefree_table(n)?;
    if let Some(path) = &cache {
        cache::write_cache(path, &table)?;
    }
    Ok(table)
}

fn with_pool<T>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T>
where
    T: Send,
{
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building thread pool")?;
    Ok(pool.install(f))
}
