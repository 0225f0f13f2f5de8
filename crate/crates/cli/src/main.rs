//! `latmin`: exact successive minima, lattice point counts and bound checks
//! from the command line.

use std::io::{IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use latmin::enumerate::count;
use latmin::format::InstanceFile;
use latmin::harness::{
    campaign, campaign_csv, fuzz_specs, oracle_campaign, verify, CheckStatus, LatticeKind, MinimaReport, DEFAULT_RANGE, MAX_DIM,
};
use latmin::rational::parse_rational;
use latmin::succmin::successive_minima;
use latmin::{BodyKind, Error, GaugeValue};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_BUG_ALARM: u8 = 4;

const AFTER_HELP: &str = "\
Exit status: 0 all asserted checks pass, 1 an asserted check failed, 2 input error,
3 invariant violation (e.g. rank-deficient normals), 4 bug alarm.

Instance files are JSON: {\"dim\": d, \"body\": {\"kind\": \"box\"|\"hpolytope\"|\"ellipsoid\",
\"halfwidths\"|\"normals\"|\"gram\": ...}, \"lattice\": {\"basis\": d×d rows}}. Numbers are
\"p/q\" strings or integers; the lattice defaults to Z^d.";

const FUZZ_AFTER_HELP: &str = "\
CSV columns, in order: seed, dim, kind, lattice, range, count, first_bound,
conjecture_bound, main_bound, ratio, then one status per check: monotone-minima,
witness-validity, lemma-2.1, kernel, thm-1.4, eq-1.4, mink-1, mink-2, conj-d2.
Bounds are q1^d, prod q_i and 2^(d-1) prod q_i with q_i = floor(2/lambda_i + 1);
ratio is count / main_bound. Empty fields are not applicable (d = 1).
A summary line goes to stderr.";

#[derive(Parser)]
#[command(name = "latmin", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Instance file (JSON); stdin when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Master seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count lattice points in μK.
    Count {
        /// Level μ as "p/q" or an integer.
        #[arg(long, default_value = "1")]
        mu: String,
        /// Count the interior int(μK) instead.
        #[arg(long)]
        strict: bool,
    },
    /// Successive minima with witnesses (lattice basis coordinates).
    Succmin,
    /// Run every check on one instance and print the report.
    Verify,
    /// Verify a seeded batch of random instances.
    #[command(after_help = FUZZ_AFTER_HELP)]
    Fuzz {
        /// Dimensions to draw from (comma separated, each 1..=6).
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dim: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = KindArg::All)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = LatticeArg::All)]
        lattice: LatticeArg,
        /// Bound on generated numerators and denominators.
        #[arg(long, default_value_t = DEFAULT_RANGE)]
        range: u32,
        #[arg(long, value_enum, default_value_t = OutArg::Csv)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Box,
    Hpolytope,
    Ellipsoid,
    All,
}

impl KindArg {
    fn kinds(self) -> Vec<BodyKind> {
        match self {
            KindArg::Box => vec![BodyKind::Box],
            KindArg::Hpolytope => vec![BodyKind::HPolytope],
            KindArg::Ellipsoid => vec![BodyKind::Ellipsoid],
            KindArg::All => BodyKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Identity,
    Diagonal,
    UnimodularDiagonal,
    All,
}

impl LatticeArg {
    fn kinds(self) -> Vec<LatticeKind> {
        match self {
            LatticeArg::Identity => vec![LatticeKind::Identity],
            LatticeArg::Diagonal => vec![LatticeKind::Diagonal],
            LatticeArg::UnimodularDiagonal => vec![LatticeKind::UnimodularDiagonal],
            LatticeArg::All => LatticeKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutArg {
    Csv,
    Json,
}

/// A diagnostic and the exit status that goes with it.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Rank | Error::InvalidBody(_) | Error::Invariant(_) | Error::GenerationExhausted(_) => EXIT_INVARIANT,
            Error::Input(_) | Error::Dimension { .. } | Error::NotSquare { .. } | Error::NotIntegral => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_failure(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

fn read_instance(path: Option<&PathBuf>) -> Result<InstanceFile, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p).map_err(|e| input_failure(format!("{}: {e}", p.display())))?;
        }
        None => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| input_failure(format!("stdin: {e}")))?;
        }
    }
    Ok(InstanceFile::parse(&text)?)
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn status_code(statuses: impl IntoIterator<Item = CheckStatus>) -> u8 {
    let mut code = 0;
    for s in statuses {
        match s {
            CheckStatus::BugAlarm => return EXIT_BUG_ALARM,
            CheckStatus::Fail => code = EXIT_FAIL,
            _ => {}
        }
    }
    code
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(input_failure("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| input_failure(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Count { mu, strict } => {
            let mu = parse_rational(&mu).map_err(|e| input_failure(format!("--mu: {e}")))?;
            let f = read_instance(cli.input.as_ref())?;
            let n = count(&f.body, &f.lattice, &GaugeValue::from(mu), strict)?;
            emit(&format!("{}\n", json!({ "count": n.to_string() })));
            Ok(0)
        }
        Command::Succmin => {
            let f = read_instance(cli.input.as_ref())?;
            let m = successive_minima(&f.body, &f.lattice)?;
            emit(&format!("{}\n", serde_json::to_string(&MinimaReport::from(&m)).expect("plain data")));
            Ok(0)
        }
        Command::Verify => {
            let f = read_instance(cli.input.as_ref())?;
            let report = verify(&f.body, &f.lattice)?;
            emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("plain data")));
            Ok(status_code(report.checks.values().copied()))
        }
        Command::Fuzz { dim, count, kind, lattice, range, out } => {
            if let Some(bad) = dim.iter().find(|d| !(1..=MAX_DIM).contains(d)) {
                return Err(input_failure(format!("--dim must be in 1..={MAX_DIM}, got {bad}")));
            }
            if range == 0 {
                return Err(input_failure("--range must be positive".into()));
            }
            if count == 0 {
                return Ok(0);
            }
            let specs = fuzz_specs(cli.seed, count, &dim, &kind.kinds(), &lattice.kinds(), range);
            let (reports, summary) = campaign(&specs, &Default::default())?;
            let oracle_ok = oracle_campaign(&specs)?;
            match out {
                OutArg::Csv => emit(&campaign_csv(&reports)),
                OutArg::Json => {
                    let doc = json!({ "reports": reports, "summary": summary, "oracle_agrees": oracle_ok });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data")));
                }
            }
            let ratio = summary.max_tightness_ratio.as_ref().map_or("-".into(), |r| r.to_string());
            eprintln!(
                "{} instances: {} failed checks, {} bug alarms, {} conjecture violations (d >= 3), \
                 oracle {}, max count/main {}",
                summary.instances,
                summary.failures.len(),
                summary.bug_alarms.len(),
                summary.conjecture_violations.len(),
                if oracle_ok { "agrees" } else { "DISAGREES" },
                ratio,
            );
            let code = if summary.bug_alarms.is_empty() {
                if summary.failures.is_empty() && oracle_ok {
                    0
                } else {
                    EXIT_FAIL
                }
            } else {
                EXIT_BUG_ALARM
            };
            Ok(code)
        }
    }
}

fn report_error(message: &str) {
    let color = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal();
    if color {
        eprintln!("\x1b[31merror:\x1b[0m {message}");
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            report_error(&f.message);
            ExitCode::from(f.code)
        }
    }
}
