use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lucas_density::*;
use lucas_density_core::density;
use lucas_density_core::lucasrank::{self, EmpiricalReport};

#[derive(Parser)]
#[command(
    name = "lucas-density",
    version,
    about = "Densities of primes whose Lucas rank of appearance is divisible by d"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact density from the closed form.
    Density(DensityArgs),
    /// Compare the closed form with a count over primes.
    Verify(VerifyArgs),
    /// Recompute every row of the reference ledger.
    Tables(TablesArgs),
    /// Show how the closed form was assembled.
    Explain(DensityArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Input {
    #[arg(long, allow_hyphen_values = true, requires = "a2", conflicts_with_all = ["gamma", "radicand"])]
    a1: Option<i64>,
    #[arg(long, allow_hyphen_values = true, requires = "a1")]
    a2: Option<i64>,
    /// Root quotient u + v·√radicand, as two rationals.
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_hyphen_values = true, requires = "radicand")]
    gamma: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true, requires = "gamma")]
    radicand: Option<i64>,
}

impl Input {
    fn spec(&self) -> CliResult<InputSpec> {
        match (self.a1, self.a2, &self.gamma, self.radicand) {
            (Some(a1), Some(a2), None, None) => Ok(InputSpec::Pair { a1, a2 }),
            (None, None, Some(g), Some(radicand)) => {
                Ok(InputSpec::Gamma { u: parse_rational(&g[0])?, v: parse_rational(&g[1])?, radicand })
            }
            _ => Err(CliError::Invalid("give either --a1/--a2 or --gamma U V --radicand D".into())),
        }
    }
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    d: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also enclose the value by a partial sum of the series.
    #[arg(long)]
    oracle_check: bool,
    #[arg(long, default_value_t = 10_000)]
    cutoff: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    d: u64,
    #[arg(long, default_value_t = 1_000_000)]
    limit: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Exit nonzero when the deviation exceeds the tolerance.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Write `p,rank,jacobi,divisible` rows here.
    #[arg(long)]
    dump_ranks: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Also count primes up to this bound.
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    threads: Option<usize>,
}

fn set_threads(n: Option<usize>) -> CliResult<()> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    Ok(())
}

fn check_d(d: u64) -> CliResult<()> {
    if d == 0 {
        return Err(CliError::Invalid("--d must be at least 1".into()));
    }
    Ok(())
}

fn run_density(a: &DensityArgs, explain: bool) -> CliResult<String> {
    check_d(a.d)?;
    let ctx = a.input.spec()?.context()?;
    let res = density::dispatch(&ctx.gamma, a.d)?;
    if explain {
        return explain_text(&ctx.gamma, a.d, &res);
    }
    let oracle = if a.oracle_check { Some(oracle_check(&ctx.gamma, a.d, &res, a.cutoff)?) } else { None };
    Ok(match a.format {
        Format::Json => {
            let mut v = density_json(&res);
            if let Some((target, iv)) = &oracle {
                v["oracle"] = serde_json::json!({
                    "checked": rational_json(target),
                    "lo": rational_json(&iv.lo),
                    "hi": rational_json(&iv.hi),
                    "contains": true,
                });
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
        }
        Format::Csv => density_csv(&res),
        Format::Text => {
            let mut s = density_text(&res);
            if let Some((target, iv)) = &oracle {
                s.push_str(&format!(
                    "oracle  {target} in [{}, {}]\n",
                    truncate_decimal(&iv.lo, 8),
                    truncate_decimal(&iv.hi, 8)
                ));
            }
            s
        }
    })
}

fn run_verify(a: &VerifyArgs) -> CliResult<(String, bool)> {
    check_d(a.d)?;
    if a.limit < 100 {
        return Err(CliError::Invalid("--limit must be at least 100".into()));
    }
    set_threads(a.threads)?;
    let ctx = a.input.spec()?.context()?;
    let res = density::dispatch(&ctx.gamma, a.d)?;
    let start = Instant::now();
    let spf = lucasrank::spf_sieve(a.limit + 1)?;
    let (counts, records) = empirical(&ctx, a.d, a.limit, &spf, a.dump_ranks.is_some())?;
    let report = EmpiricalReport::new(&ctx, a.d, a.limit, counts, Some(res.delta));
    let secs = start.elapsed().as_secs_f64();
    if let Some(path) = &a.dump_ranks {
        write_ranks(path, &records)?;
    }
    let pass = judge(&report).is_none_or(|v| v.2);
    let out = match a.format {
        Format::Json => {
            format!("{}\n", serde_json::to_string_pretty(&report_json(&report, secs)).expect("serializable"))
        }
        Format::Csv => format!(
            "d,limit,eligible,counted,ratio,exact\n{},{},{},{},{:.6},{}\n",
            a.d,
            a.limit,
            report.counts.eligible,
            report.counts.counted,
            to_f64(&report.ratio()),
            report.reference_delta.as_ref().expect("set above")
        ),
        Format::Text => report_text(&report, secs),
    };
    Ok((out, pass))
}

fn run_tables(a: &TablesArgs) -> CliResult<(String, bool)> {
    set_threads(a.threads)?;
    let checks = check_ledger(a.limit)?;
    let all = checks.iter().all(|c| c.matches);
    let out = match a.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&ledger_json(&checks)).expect("serializable")),
        Format::Csv => ledger_csv(&checks)?,
        Format::Text => ledger_text(&checks),
    };
    Ok((out, all))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Density(a) => run_density(a, false).map(|s| (s, Ok(()))),
        Cmd::Explain(a) => run_density(a, true).map(|s| (s, Ok(()))),
        Cmd::Verify(a) => run_verify(a).map(|(s, pass)| {
            let status = if pass || !a.strict { Ok(()) } else { Err(1) };
            (s, status)
        }),
        Cmd::Tables(a) => run_tables(a).map(|(s, all)| (s, if all { Ok(()) } else { Err(EXIT_CONSISTENCY) })),
    };
    match outcome {
        Ok((s, status)) => {
            print!("{s}");
            match status {
                Ok(()) => ExitCode::SUCCESS,
                Err(code) => ExitCode::from(code as u8),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
