use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dunkl_frft_cli::config::parse_config;
use dunkl_frft_cli::jobs::{Cell, Table, run_job};
use dunkl_frft_cli::output::{Format, sci, write_outputs};

/// Fractional Dunkl transforms on ℤ₂ᴺ, driven by a JSON job file.
#[derive(Debug, Parser)]
#[command(name = "dunkl-frft", version)]
struct Args {
    /// Job description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "dunkl-frft-out")]
    out: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn print_checks(t: &Table) {
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => sci(*v),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        println!("{}", cells.join("  "));
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.threads > 0
        && let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global()
    {
        return usage(format!("thread pool: {e}"));
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", args.config.display())),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let cfg = match cfg.resolve() {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let table = match run_job(&cfg) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let path = match write_outputs(&args.out, &cfg, &table, args.format) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: writing {}: {e}", args.out.display());
            return ExitCode::from(2);
        }
    };
    if table.columns.first().map(String::as_str) == Some("suite") {
        print_checks(&table);
    }
    println!("wrote {}", path.display());
    if table.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("one or more checks failed");
        ExitCode::from(1)
    }
}
