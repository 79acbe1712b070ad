use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use colperm::bench::{self, RunOptions};
use colperm::format;
use colperm::grid::{GridConfig, InstanceSpec};
use colperm::wilcoxon::Alternative;
use colperm_core::delta::EvalState;
use colperm_core::exact::{self, Objective};
use colperm_core::indirect;
use colperm_core::search::{Backend, Procedure};
use colperm_core::{Instance, Permutation};

/// Column permutation evaluators, descent local searches and benchmarks.
///
/// Rows, columns and stages are printed 1-based.
#[derive(Parser)]
#[command(name = "colperm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance; every cell is one with probability DENSITY.
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one column order.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "delta")]
        method: Backend,
        /// 1-based column order, e.g. "5 2 4 6 3 1" (identity if omitted).
        #[arg(long)]
        perm: Option<String>,
    },
    /// Run one descent local search from a random initial order.
    Search {
        #[command(flatten)]
        source: Source,
        /// insertion | swap2 | opt2
        #[arg(long, default_value = "insertion")]
        ls: Procedure,
        /// matrix | indirect | delta
        #[arg(long, default_value = "delta")]
        method: Backend,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exhaustive optimum for small instances.
    Optimum {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = exact::DEFAULT_BRUTE_FORCE_CAP)]
        cap: usize,
    },
    /// Run a benchmark grid, print a summary and compare delta with
    /// indirect run times by the Wilcoxon signed-rank test.
    Bench {
        /// Grid configuration file.
        #[arg(long)]
        grid: PathBuf,
        /// Write every run as a CSV row.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Run cells one at a time (lower timing noise).
        #[arg(long)]
        sequential: bool,
        /// two-sided | less | greater (delta relative to indirect).
        #[arg(long, default_value = "two-sided")]
        alternative: Alternative,
    },
    /// Summarize and compare an existing benchmark CSV.
    Report {
        csv: PathBuf,
        #[arg(long, default_value = "two-sided")]
        alternative: Alternative,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generated instance as ROWS,COLS,DENSITY,SEED.
    #[arg(long, value_name = "ROWS,COLS,DENSITY,SEED")]
    gen: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Instance> {
        match (&self.instance, &self.gen) {
            (Some(p), _) => Ok(format::read_instance(p)?),
            (None, Some(g)) => {
                let spec = InstanceSpec::parse_generated(g).with_context(|| format!("bad --gen value `{g}`"))?;
                Ok(spec.load()?)
            }
            (None, None) => bail!("either --instance or --gen is required"),
        }
    }
}

fn one_based(xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter()
        .map(|x| (x + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_perm(text: &str, n: usize) -> Result<Permutation> {
    let order: Vec<usize> = text
        .split([' ', ','])
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()
        .context("permutation must be a list of column numbers")?;
    if order.len() != n {
        bail!("permutation has {} columns, instance has {n}", order.len());
    }
    Ok(Permutation::from_one_based(&order)?)
}

fn print_objective(obj: &Objective, perm: &Permutation) {
    println!("value: {}", obj.value);
    println!("stage_sums: {}", join(&obj.stage_sums));
    println!("critical_stages: {}", one_based(obj.critical_stages()));
    println!("critical_columns: {}", one_based(obj.critical_columns(perm)));
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            rows,
            cols,
            density,
            seed,
            out,
        } => {
            if rows == 0 || cols == 0 || !(0.0..=1.0).contains(&density) {
                bail!("need rows, cols >= 1 and density in [0, 1]");
            }
            let m = colperm_core::instance::generate_matrix(rows, cols, density, seed);
            let mut text = format!("# generated: rows={rows} cols={cols} density={density} seed={seed}\n");
            text.push_str(&format::render_matrix(&m));
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Eval { source, method, perm } => {
            let inst = source.load()?;
            let perm = match perm {
                Some(p) => parse_perm(&p, inst.cols())?,
                None => Permutation::identity(inst.cols()),
            };
            let obj = match method {
                Backend::Matrix => exact::evaluate_full(&inst, &perm),
                Backend::Indirect => indirect::evaluate_indirect(&inst, &perm),
                Backend::Delta => {
                    let st = EvalState::new(&inst, perm.clone())?;
                    Objective::from_sums(st.stage_sums().to_vec())
                }
            };
            println!("method: {method}");
            println!("order: {}", join(&perm.to_one_based()));
            print_objective(&obj, &perm);
        }
        Command::Search {
            source,
            ls,
            method,
            seed,
        } => {
            let inst = source.load()?;
            let r = bench::timed_run(&inst, ls, method, seed);
            println!("procedure: {ls}");
            println!("method: {method}");
            println!("seed: {seed}");
            println!("initial_value: {}", r.initial_objective);
            println!("final_value: {}", r.objective);
            println!("improvements: {}", r.improvements);
            println!("full_evals: {}", r.counters.evaluations);
            println!("set_inits: {}", r.counters.set_inits);
            println!("adj_swaps: {}", r.counters.adjacent_swaps);
            println!("time_ms: {:.3}", r.elapsed.as_secs_f64() * 1e3);
            println!("order: {}", join(&r.permutation.to_one_based()));
        }
        Command::Optimum { source, cap } => {
            let inst = source.load()?;
            let (value, perm) = exact::brute_force_optimum(&inst, cap)?;
            println!("optimum: {value}");
            println!("order: {}", join(&perm.to_one_based()));
        }
        Command::Bench {
            grid,
            csv,
            sequential,
            alternative,
        } => {
            let cfg = GridConfig::read(&grid)?;
            let records = bench::run_grid(&cfg, RunOptions { sequential })?;
            if let Some(path) = csv {
                bench::write_csv(&records, &path)?;
                eprintln!("wrote {} records to {}", records.len(), path.display());
            }
            report(&records, alternative);
        }
        Command::Report { csv, alternative } => {
            let records = bench::read_csv(&csv)?;
            report(&records, alternative);
        }
    }
    Ok(())
}

fn report(records: &[bench::BenchRecord], alternative: Alternative) {
    print!("{}", bench::format_summary(&bench::summarize(records)));
    let mut keys: Vec<(String, Procedure)> = records.iter().map(|r| (r.set.clone(), r.procedure)).collect();
    keys.sort();
    keys.dedup();
    for (set, procedure) in keys {
        match bench::compare_times(records, &set, procedure, Backend::Delta, Backend::Indirect, alternative) {
            Ok(w) => println!(
                "wilcoxon {set} {procedure} delta vs indirect: n={} V={} p={:.4e} ({})",
                w.n,
                w.v,
                w.p_value,
                if w.exact { "exact" } else { "normal" }
            ),
            Err(e) => println!("wilcoxon {set} {procedure} delta vs indirect: {e}"),
        }
    }
}
