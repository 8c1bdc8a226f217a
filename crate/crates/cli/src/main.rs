use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cmvroots::Flag;
use cmvroots_cli::bench::{reference_roots, run_polynomial, Run, DENSE_LIMIT};
use cmvroots_cli::output::{num, write_bench_csv, write_compare_csv, write_roots_csv};
use cmvroots_cli::{bench, parse_coefficients, parse_sizes, CliError, Oracle, Params, TestSet};

#[derive(Parser)]
#[command(name = "cmvroots", version, about = "Polynomial roots by structured QR on a permuted companion matrix")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Sweep budget of the structured solver (default 30 per root).
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Reference roots: auto, dense, closed-form or none.
    #[arg(long, default_value = "auto", value_parser = str::parse::<Oracle>)]
    oracle: Oracle,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the polynomial in a coefficient file ("re im" per line, constant term first).
    Roots {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Results table for one test set: test,n,nne_over_eps,err,werr,averit.
    Bench {
        /// P1, P2, P3, P4-bernoulli, P4-chebyshev, P4-exp, P5 or P6.
        #[arg(long, value_parser = str::parse::<TestSet>)]
        set: TestSet,
        /// Generator sizes, e.g. `32,64` or the doubling range `64..1024`.
        #[arg(long = "n", visible_alias = "degrees", value_parser = |s: &str| parse_sizes(s).map(Sizes))]
        sizes: Sizes,
        #[arg(long)]
        lambda: Option<f64>,
        /// Number of random draws for P5 and P6 (default 1).
        #[arg(long)]
        seeds: Option<usize>,
        /// First seed; draw k uses seed + k.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Both root sets of one instance as re,im,source rows.
    Compare {
        #[arg(long, value_parser = str::parse::<TestSet>)]
        set: TestSet,
        #[arg(long = "n")]
        size: usize,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

fn open(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn flag_list(flags: &[Flag]) -> String {
    if flags.is_empty() {
        return "none".into();
    }
    flags.iter().map(Flag::to_string).collect::<Vec<_>>().join(";")
}

fn roots(file: PathBuf, format: Format, common: Common) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&file)?;
    let p = parse_coefficients(&text)?;
    let params = Params { max_sweeps: common.max_sweeps, oracle: common.oracle, ..Params::default() };
    let reference = reference_roots(None, &p, common.oracle, Some(DENSE_LIMIT))?;
    let Run { report, converged } = run_polynomial(&p, reference.as_deref(), &params)?;
    let mut w = open(&common.out)?;
    match format {
        Format::Csv => write_roots_csv(&mut w, &report.roots)?,
        Format::Text => {
            for z in &report.roots {
                writeln!(w, "{} {}", num(z.re), num(z.im))?;
            }
        }
    }
    let residual = report.roots.iter().map(|z| p.scaled_residual(*z)).fold(0.0, f64::max);
    let mark = if matches!(format, Format::Csv) { "# " } else { "" };
    writeln!(w, "{mark}degree={} sweeps={} averit={}", p.degree(), report.sweeps, num(report.averit))?;
    writeln!(w, "{mark}max_scaled_residual={} err={} nne={}", num(residual), num(report.err), num(report.nne))?;
    writeln!(w, "{mark}flags={}", flag_list(&report.flags))?;
    w.flush()?;
    Ok(converged)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Roots { file, format, common } => roots(file, format, common),
        Command::Bench { set, sizes, lambda, seeds, seed, common } => {
            let params = Params { lambda, seeds, seed, max_sweeps: common.max_sweeps, oracle: common.oracle };
            let rows = bench(set, &sizes.0, &params)?;
            let mut w = open(&common.out)?;
            write_bench_csv(&mut w, &rows)?;
            w.flush()?;
            for r in rows.iter().filter(|r| !r.flags.is_empty()) {
                eprintln!("{} n={}: {}", r.test, r.degree, flag_list(&r.flags));
            }
            Ok(rows.iter().all(|r| r.converged))
        }
        Command::Compare { set, size, lambda, seed, common } => {
            let oracle = if common.oracle == Oracle::Auto { Oracle::Dense } else { common.oracle };
            if oracle == Oracle::None {
                return Err(CliError::Usage("compare needs reference roots".into()));
            }
            let params = Params { lambda, seeds: None, seed, max_sweeps: common.max_sweeps, oracle };
            let p = set.instance(&params, size, seed)?;
            let reference = reference_roots(Some((set, size)), &p, oracle, None)?.expect("oracle is not none");
            let run = run_polynomial(&p, Some(&reference), &params)?;
            let mut w = open(&common.out)?;
            write_compare_csv(&mut w, &run.report.roots, &reference)?;
            w.flush()?;
            Ok(run.converged)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: the iteration did not converge within the sweep budget");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
