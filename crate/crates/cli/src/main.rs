//! Deterministic CSV/JSON front end for the triadic-collatz library.
//!
//! Exit status: 0 success (including an all-pass verification suite),
//! 1 property violation, 2 usage error, 3 resource-guard abort,
//! 130 interrupted. Randomness is a single 64-bit seed expanded by
//! ChaCha8 with fixed per-property labels, so identical invocations
//! produce byte-identical output at any parallelism degree.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use triadic_collatz::analysis::{
    col4_identity_check, cor1_sweep, cor2_check, halving_bound_check, prefix_hits,
    window_lemma_sweep, CoverageAccumulator, PropertyBudget, VerificationReport,
};
use triadic_collatz::diophantine::{frac_part, prefix_target, record_pairs, steering_pairs, CaseTag};
use triadic_collatz::maps::orbit;
use triadic_collatz::num_bigint::BigUint;
use triadic_collatz::Error;

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

extern "C" fn handle_sigint(_: libc::c_int) {
    INTERRUPTED.store(true, Ordering::Relaxed);
}

fn install_sigint() {
    unsafe {
        libc::signal(
            libc::SIGINT,
            handle_sigint as extern "C" fn(libc::c_int) as *const () as libc::sighandler_t,
        );
    }
}

fn interrupted() -> bool {
    INTERRUPTED.load(Ordering::Relaxed)
}

const EXIT_OK: i32 = 0;
const EXIT_VIOLATION: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_RESOURCE: i32 = 3;
const EXIT_INTERRUPT: i32 = 130;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "triadic-collatz", version, about = "Collatz orbits over triadic rationals: exact maps, Diophantine tables, verification suite")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long, global = true, env = "TRIADIC_COLLATZ_OUTPUT")]
    output: Option<PathBuf>,
    /// Worker count for coverage sweeps (available cores when omitted)
    #[arg(long, global = true, env = "TRIADIC_COLLATZ_PARALLELISM", value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integer orbit of a0 with the exact rescaled value at every step
    Orbit {
        /// Starting integer, at least 1 (decimal, any size)
        a0: String,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
    },
    /// Count the steps whose leading window reads a given prefix
    PrefixCount {
        /// Starting integer, at least 1 (decimal, any size)
        a0: String,
        /// Prefix to observe, at least 2
        #[arg(value_parser = clap::value_parser!(u64).range(2..))]
        psi: u64,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
    },
    /// Bin the rescaled orbit values of a seed range over [1, 3)
    Coverage {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        seed_lo: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        seed_hi: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        bin_count: u32,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
    },
    /// Record approximation pairs (k, n) with certified fractional parts
    ApproxRecords {
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        k_max: u64,
    },
    /// Steering pairs landing within 1/3 of a prefix target
    ApproxSteer {
        /// Prefix target, at least 2
        #[arg(value_parser = clap::value_parser!(u64).range(2..))]
        psi: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
        k_max: u64,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
}

impl Command {
    fn synopsis(&self) -> &'static str {
        match self {
            Command::Orbit { .. } => "triadic-collatz orbit <A0> [--max-steps N] [--format csv|json] [--output PATH]",
            Command::PrefixCount { .. } => "triadic-collatz prefix-count <A0> <PSI> [--max-steps N] [--format csv|json] [--output PATH]",
            Command::Coverage { .. } => "triadic-collatz coverage <SEED_LO> <SEED_HI> [--bin-count N] [--max-steps N] [--parallelism N] [--format csv|json] [--output PATH]",
            Command::ApproxRecords { .. } => "triadic-collatz approx-records [--k-max N] [--format csv|json] [--output PATH]",
            Command::ApproxSteer { .. } => "triadic-collatz approx-steer <PSI> [--count N] [--k-max N] [--format csv|json] [--output PATH]",
            Command::Verify { .. } => "triadic-collatz verify [--trials N] [--rng-seed N] [--format csv|json] [--output PATH]",
        }
    }
}

enum Failure {
    Io(io::Error),
    Usage(String),
    Lib(Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(failure: &Failure) -> i32 {
    match failure {
        Failure::Io(_) | Failure::Usage(_) => EXIT_USAGE,
        Failure::Lib(Error::Invariant(_)) => EXIT_VIOLATION,
        Failure::Lib(Error::ResourceGuard(_)) | Failure::Lib(Error::DenomExpOverflow) => {
            EXIT_RESOURCE
        }
        Failure::Lib(_) => EXIT_USAGE,
    }
}

type Row = Vec<(&'static str, Value)>;

/// Streams CSV rows as they arrive; buffers JSON rows and emits one array.
/// An interrupted CSV stream is truncated with a sentinel comment line; an
/// interrupted JSON stream emits the rows collected so far (still valid
/// JSON).
struct Emitter {
    format: Format,
    out: Box<dyn Write>,
    columns: &'static [&'static str],
    wrote_header: bool,
    json_rows: Vec<Value>,
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(csv_cell)
            .collect::<Vec<_>>()
            .join(";"),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Emitter {
    fn new(format: Format, out: Box<dyn Write>, columns: &'static [&'static str]) -> Self {
        Self {
            format,
            out,
            columns,
            wrote_header: false,
            json_rows: Vec::new(),
        }
    }

    fn header(&mut self) -> io::Result<()> {
        if !self.wrote_header {
            writeln!(self.out, "{}", self.columns.join(","))?;
            self.wrote_header = true;
        }
        Ok(())
    }

    fn row(&mut self, row: Row) -> io::Result<()> {
        debug_assert!(row.len() == self.columns.len()
            && row.iter().zip(self.columns).all(|((n, _), c)| n == c));
        match self.format {
            Format::Csv => {
                self.header()?;
                let cells: Vec<String> = row.iter().map(|(_, v)| csv_cell(v)).collect();
                writeln!(self.out, "{}", cells.join(","))
            }
            Format::Json => {
                let mut obj = Map::new();
                for (name, value) in row {
                    obj.insert(name.to_string(), value);
                }
                self.json_rows.push(Value::Object(obj));
                Ok(())
            }
        }
    }

    fn finish(mut self, was_interrupted: bool) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                self.header()?;
                if was_interrupted {
                    writeln!(self.out, "# interrupted")?;
                }
            }
            Format::Json => {
                let doc = Value::Array(std::mem::take(&mut self.json_rows));
                writeln!(self.out, "{doc}")?;
            }
        }
        self.out.flush()
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn parse_a0(text: &str) -> Result<BigUint, Failure> {
    let a0: BigUint = text
        .parse()
        .map_err(|_| Failure::Usage(format!("a0 must be a decimal integer, got {text:?}")))?;
    if a0 == BigUint::from(0u8) {
        return Err(Failure::Usage("a0 must be at least 1".into()));
    }
    Ok(a0)
}

fn v_str(s: String) -> Value {
    Value::String(s)
}

fn run_orbit(emitter: &mut Emitter, a0: &str, max_steps: u64) -> Result<bool, Failure> {
    let a0 = parse_a0(a0)?;
    let orb = orbit(&a0, max_steps)?;
    for rec in &orb.records {
        if interrupted() {
            return Ok(true);
        }
        emitter.row(vec![
            ("alpha", Value::from(rec.alpha)),
            ("a", v_str(rec.a.to_string())),
            ("q", Value::from(rec.q)),
            ("c_num", v_str(rec.c.numerator().to_string())),
            ("c_denom_exp", Value::from(rec.c.denom_exp())),
            ("c_decimal(display-only)", v_str(rec.c.to_decimal_string(12))),
        ])?;
    }
    Ok(interrupted())
}

fn run_prefix_count(
    emitter: &mut Emitter,
    a0: &str,
    psi: u64,
    max_steps: u64,
) -> Result<bool, Failure> {
    let a0 = parse_a0(a0)?;
    let report = prefix_hits(&a0, psi, max_steps)?;
    emitter.row(vec![
        ("a0", v_str(report.a0.to_string())),
        ("psi", Value::from(report.psi)),
        ("p", Value::from(report.p)),
        ("hits", Value::from(report.hits.clone())),
        ("count", Value::from(report.count())),
        ("total_steps", Value::from(report.total_steps)),
        ("reached_one", Value::from(report.reached_one)),
        ("window_mismatches", Value::from(report.window_mismatches.len())),
    ])?;
    Ok(interrupted())
}

fn run_coverage(
    emitter: &mut Emitter,
    seed_lo: u64,
    seed_hi: u64,
    bin_count: u32,
    max_steps: u64,
    workers: u64,
) -> Result<bool, Failure> {
    if seed_lo > seed_hi {
        return Err(Failure::Usage(format!(
            "seed range is empty: {seed_lo} > {seed_hi}"
        )));
    }
    let span = seed_hi - seed_lo + 1;
    let workers = workers.min(span);
    let mut partials: Vec<triadic_collatz::Result<CoverageAccumulator>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let chunk_lo = seed_lo + w * (span / workers) + w.min(span % workers);
                let chunk_len = span / workers + u64::from(w < span % workers);
                scope.spawn(move || {
                    let mut acc = CoverageAccumulator::new(bin_count)?;
                    for a0 in chunk_lo..chunk_lo + chunk_len {
                        if interrupted() {
                            break;
                        }
                        acc.accumulate_seed(a0, max_steps)?;
                    }
                    Ok(acc)
                })
            })
            .collect();
        for handle in handles {
            partials.push(handle.join().expect("coverage worker panicked"));
        }
    });
    let mut merged: Option<CoverageAccumulator> = None;
    for partial in partials {
        let acc = partial?;
        merged = Some(match merged {
            None => acc,
            Some(m) => m.merge(acc)?,
        });
    }
    if interrupted() {
        return Ok(true);
    }
    let report = merged.expect("at least one worker").finalize(seed_lo, seed_hi);
    emitter.row(vec![
        ("bin_count", Value::from(report.bin_count)),
        ("seed_lo", Value::from(report.seed_lo)),
        ("seed_hi", Value::from(report.seed_hi)),
        ("hit_bins", v_str(report.hit_bins.to_bit_string())),
        ("fraction", Value::from(report.fraction)),
        (
            "min_c",
            report
                .min_c
                .as_ref()
                .map_or(Value::Null, |c| v_str(c.to_string())),
        ),
        ("bins_hit", Value::from(report.bins_hit)),
        ("seeds", Value::from(report.seeds)),
        ("c_samples", Value::from(report.c_samples)),
        ("step_limit_hits", Value::from(report.step_limit_hits)),
    ])?;
    Ok(false)
}

fn run_approx_records(emitter: &mut Emitter, k_max: u64) -> Result<bool, Failure> {
    let pairs = record_pairs(k_max)?;
    for pair in &pairs {
        if interrupted() {
            return Ok(true);
        }
        let frac = frac_part(pair.k)?;
        emitter.row(vec![
            ("k", Value::from(pair.k)),
            ("n", Value::from(pair.n)),
            ("frac_lo", v_str(frac.frac.decimal_lo())),
            ("frac_hi", v_str(frac.frac.decimal_hi())),
        ])?;
    }
    Ok(interrupted())
}

fn run_approx_steer(
    emitter: &mut Emitter,
    psi: u64,
    count: u64,
    k_max: u64,
) -> Result<bool, Failure> {
    let target = prefix_target(psi)?;
    let case = match target.case_tag {
        CaseTag::Low => "LOW",
        CaseTag::High => "HIGH",
    };
    let pairs = steering_pairs(&target, count as usize, k_max)?;
    for pair in &pairs {
        if interrupted() {
            return Ok(true);
        }
        emitter.row(vec![
            ("psi", Value::from(psi)),
            ("p", Value::from(target.p)),
            ("case", v_str(case.to_string())),
            ("k", Value::from(pair.k)),
            ("n", Value::from(pair.n)),
            ("lhs", v_str(pair.certificate.lhs.to_string())),
            ("mid", v_str(pair.certificate.mid.to_string())),
            ("rhs", v_str(pair.certificate.rhs.to_string())),
        ])?;
    }
    Ok(interrupted())
}

/// Runs the same harnesses as the library's property suite, streaming one
/// row per report and polling for interrupts between harnesses. Returns
/// (interrupted, any_violation).
fn run_verify(emitter: &mut Emitter, trials: u64, seed: u64) -> Result<(bool, bool), Failure> {
    let budget = PropertyBudget::with_trials(trials);
    type Harness<'a> = Box<dyn Fn() -> triadic_collatz::Result<VerificationReport> + 'a>;
    let harnesses: Vec<Harness> = vec![
        Box::new(|| col4_identity_check(budget.trials, budget.n_max, seed)),
        Box::new(|| halving_bound_check(budget.trials, budget.n_max, seed)),
        Box::new(|| window_lemma_sweep(budget.xi_lo, budget.xi_hi, budget.trials, seed)),
        Box::new(|| cor1_sweep(budget.xi_lo, budget.xi_hi, budget.n_max, budget.trials, seed)),
        Box::new(|| cor2_check(budget.trials, 60, seed)),
    ];
    let mut any_violation = false;
    for harness in harnesses {
        if interrupted() {
            return Ok((true, any_violation));
        }
        let report = harness()?;
        if report.violations > 0 {
            any_violation = true;
            eprintln!(
                "violation: {} failed {} of {} trials",
                report.property, report.violations, report.trials
            );
            if let Some(ce) = &report.first_counterexample {
                eprintln!("  first counterexample: {ce:?}");
            }
        }
        emitter.row(vec![
            ("property", v_str(report.property.clone())),
            ("trials", Value::from(report.trials)),
            ("violations", Value::from(report.violations)),
            ("status", v_str(report.status().to_string())),
        ])?;
    }
    Ok((interrupted(), any_violation))
}

const ORBIT_COLUMNS: &[&str] = &["alpha", "a", "q", "c_num", "c_denom_exp", "c_decimal(display-only)"];
const PREFIX_COLUMNS: &[&str] = &[
    "a0", "psi", "p", "hits", "count", "total_steps", "reached_one", "window_mismatches",
];
const COVERAGE_COLUMNS: &[&str] = &[
    "bin_count", "seed_lo", "seed_hi", "hit_bins", "fraction", "min_c", "bins_hit", "seeds",
    "c_samples", "step_limit_hits",
];
const RECORDS_COLUMNS: &[&str] = &["k", "n", "frac_lo", "frac_hi"];
const STEER_COLUMNS: &[&str] = &["psi", "p", "case", "k", "n", "lhs", "mid", "rhs"];
const VERIFY_COLUMNS: &[&str] = &["property", "trials", "violations", "status"];

fn run(cli: Cli) -> Result<i32, Failure> {
    let out = open_output(&cli.output)?;
    let columns = match &cli.command {
        Command::Orbit { .. } => ORBIT_COLUMNS,
        Command::PrefixCount { .. } => PREFIX_COLUMNS,
        Command::Coverage { .. } => COVERAGE_COLUMNS,
        Command::ApproxRecords { .. } => RECORDS_COLUMNS,
        Command::ApproxSteer { .. } => STEER_COLUMNS,
        Command::Verify { .. } => VERIFY_COLUMNS,
    };
    let mut emitter = Emitter::new(cli.format, out, columns);
    let workers = cli
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get() as u64));
    let (was_interrupted, any_violation) = match &cli.command {
        Command::Orbit { a0, max_steps } => (run_orbit(&mut emitter, a0, *max_steps)?, false),
        Command::PrefixCount { a0, psi, max_steps } => {
            (run_prefix_count(&mut emitter, a0, *psi, *max_steps)?, false)
        }
        Command::Coverage {
            seed_lo,
            seed_hi,
            bin_count,
            max_steps,
        } => (
            run_coverage(&mut emitter, *seed_lo, *seed_hi, *bin_count, *max_steps, workers)?,
            false,
        ),
        Command::ApproxRecords { k_max } => (run_approx_records(&mut emitter, *k_max)?, false),
        Command::ApproxSteer { psi, count, k_max } => {
            (run_approx_steer(&mut emitter, *psi, *count, *k_max)?, false)
        }
        Command::Verify { trials, rng_seed } => {
            let (stopped, violation) = run_verify(&mut emitter, *trials, *rng_seed)?;
            (stopped, violation)
        }
    };
    emitter.finish(was_interrupted)?;
    Ok(if was_interrupted {
        EXIT_INTERRUPT
    } else if any_violation {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

fn main() {
    install_sigint();
    let cli = Cli::parse();
    let synopsis = cli.command.synopsis();
    let code = match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            match &failure {
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            let code = exit_code(&failure);
            if code == EXIT_USAGE {
                eprintln!("usage: {synopsis}");
            }
            code
        }
    };
    std::process::exit(code);
}
