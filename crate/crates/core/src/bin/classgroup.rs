use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use classgroup::driver::{effective_params, run, verify_result, RunConfig};
use classgroup::numfield::build_field;
use classgroup::verify::{oracle_imag_quadratic, oracle_real_quadratic, ClassGroupResult};
use classgroup::Error;

#[derive(Parser)]
#[command(name = "classgroup", version, about = "Class groups and regulators of number fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the L-notation parameters chosen for a field.
    Params(RunArgs),
    /// Compute class group, regulator and fundamental units.
    Compute(RunArgs),
    /// Re-run the analytic check on a result file.
    Verify {
        /// Result JSON written by `compute`.
        file: PathBuf,
    },
    /// Independent oracles for quadratic fields.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Run the pipeline and report collection and precision statistics.
    Bench(RunArgs),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Class number and group structure from reduced forms (D < 0).
    Imag {
        #[arg(short = 'D', allow_negative_numbers = true)]
        d: i64,
    },
    /// Regulator from the continued fraction (D > 0).
    Real {
        #[arg(short = 'D')]
        d: i64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Defining polynomial, e.g. "x^3-2".
    #[arg(long)]
    poly: String,
    #[arg(long = "B")]
    b: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long = "K1")]
    k1: Option<u64>,
    #[arg(long)]
    q0: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "euler-bound")]
    euler_bound: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            poly: self.poly.clone(),
            b: self.b,
            a: self.a,
            k: self.k,
            k1: self.k1,
            q0: self.q0,
            seed: self.seed,
            euler_bound: self.euler_bound,
            workers: self.workers,
        }
    }
}

fn emit(json: &serde_json::Value, out: Option<&PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(json)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Params(args) => {
            let field = build_field(&args.poly.parse()?)?;
            let p = effective_params(&field, &args.config())?;
            emit(&serde_json::to_value(p)?, args.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Compute(args) => {
            let outcome = run(&args.config())?;
            emit(&serde_json::to_value(&outcome.result)?, args.out.as_ref())?;
            Ok(if outcome.result.verified {
                ExitCode::SUCCESS
            } else {
                log::error!("verification failed after all retries");
                ExitCode::from(2)
            })
        }
        Cmd::Verify { file } => {
            let res: ClassGroupResult = serde_json::from_str(&std::fs::read_to_string(file)?)?;
            let ok = verify_result(&res)?;
            emit(&serde_json::json!({ "poly": res.poly, "verified": ok }), None)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Cmd::Oracle { which } => {
            let v = match which {
                OracleCmd::Imag { d } => {
                    check_disc(d, d < 0)?;
                    let (h, divisors) = oracle_imag_quadratic(d);
                    serde_json::json!({ "D": d, "h": h, "divisors": divisors })
                }
                OracleCmd::Real { d } => {
                    check_disc(d, d > 1)?;
                    serde_json::json!({ "D": d, "regulator": oracle_real_quadratic(d) })
                }
            };
            emit(&v, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench(args) => {
            let outcome = run(&args.config())?;
            let v = serde_json::json!({
                "poly": outcome.result.poly,
                "h": outcome.result.h,
                "regulator": outcome.result.regulator_approx,
                "verified": outcome.result.verified,
                "stats": outcome.stats,
            });
            emit(&v, args.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn check_disc(d: i64, sign_ok: bool) -> Result<(), Error> {
    if !sign_ok || d.rem_euclid(4) > 1 {
        return Err(Error::Domain(format!("{d} is not a discriminant of the requested sign")));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.stage());
            ExitCode::from(1)
        }
    }
}
