use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pgl2_llc::characters::{enumerate_pairs, AdmissiblePair, MultChar, PairSpec};
use pgl2_llc::constants::{constants_table, AdditiveChar};
use pgl2_llc::cover::Twist;
use pgl2_llc::gl2;
use pgl2_llc::verifier::{compare_pair, comparison_csv, run_suite, Suite, VerifyConfig, VerifyError};
use pgl2_llc::{FieldConfig, PadicError};

#[derive(Parser)]
#[command(name = "pgl2-llc", version, about = "Exact checks of the tame local Langlands correspondence for PGL(2, Q_p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites; exit 0 on pass, 1 on a failed assertion, 2 on a bad configuration.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Residue characteristic; repeat or comma-separate for several.
        #[arg(long = "p", value_delimiter = ',', default_values_t = [3u64, 5])]
        primes: Vec<u64>,
        /// Restrict to these zeta (default: all three quadratic extensions).
        #[arg(long = "zeta", value_delimiter = ',', allow_hyphen_values = true)]
        zetas: Vec<i64>,
        #[arg(long, default_value_t = 6)]
        precision: u32,
        #[arg(long, default_value_t = 2)]
        max_level: u32,
        #[arg(long, default_value_t = 20)]
        seed: u64,
        /// Record wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table of Weil indices, Hilbert symbols and the Langlands constant.
    Constants {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        zeta: i64,
        #[arg(long, default_value_t = 6)]
        precision: u32,
        #[arg(long, default_value_t = 1)]
        psi_level: i32,
    },
    /// Admissible pairs up to a level, one per Galois class, as JSON.
    EnumeratePairs {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        zeta: i64,
        #[arg(long, default_value_t = 6)]
        precision: u32,
        #[arg(long, default_value_t = 1)]
        max_level: u32,
        /// Include pairs whose restriction to F^* is not aleph.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare F(chi~) with the representation kernel for one pair.
    Compare {
        /// A pair as written by `enumerate-pairs` (a single object, or a list with `--index`).
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// `mu`, `trivial`, `mu-eta`, or a file holding a character in the same format.
        #[arg(long, default_value = "mu")]
        twist: String,
        /// Sample range; only `auto` (stratified over 0 <= n(w) <= r/2).
        #[arg(long, default_value = "auto")]
        range: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Character table of GL(2, F_q).
    CharacterTable {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Writes to stdout, treating a closed pipe as success.
fn say(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{}", text.trim_end_matches('\n')) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => say(text),
    }
}

fn load_pair(path: &PathBuf, index: usize) -> Result<AdmissiblePair> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("parsing pair")?;
    let value = match value {
        serde_json::Value::Array(mut v) if index < v.len() => v.swap_remove(index),
        serde_json::Value::Array(v) => bail!("index {index} out of range for {} pairs", v.len()),
        other => other,
    };
    let spec: PairSpec = serde_json::from_value(value).context("parsing pair")?;
    let chi = spec.to_char()?;
    Ok(AdmissiblePair::new(chi, AdditiveChar::standard(spec.p))?)
}

fn resolve_twist(name: &str, pair: &AdmissiblePair) -> Result<Twist> {
    Ok(match name {
        "mu" => Twist::Mu,
        "trivial" => Twist::Trivial,
        "mu-eta" => Twist::MuTimesQuadratic,
        file => {
            let text = fs::read_to_string(file).with_context(|| format!("reading twist {file}"))?;
            let spec: PairSpec = serde_json::from_str(&text).context("parsing twist")?;
            Twist::Custom(MultChar::from_values(pair.chi.quotient().clone(), &spec.generator_values)?)
        }
    })
}

fn verify_exit(err: &VerifyError) -> u8 {
    match err {
        VerifyError::Config(_) | VerifyError::Padic(PadicError::PrecisionExhausted(_)) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify {
            suite,
            primes,
            zetas,
            precision,
            max_level,
            seed,
            timings,
            out,
        } => {
            let config = VerifyConfig {
                primes,
                zetas,
                precision,
                max_level,
                seed,
                timings,
            };
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let report = match run_suite(suite, &config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(verify_exit(&e)));
                }
            };
            for s in &report.suites {
                let n = s.assertions.len();
                let ok = s.assertions.iter().filter(|a| a.passed).count();
                eprintln!("{:<12} {} ({ok}/{n})", s.suite.name(), if s.passed { "pass" } else { "FAIL" });
            }
            for (s, a) in report.failures() {
                eprintln!("  {}: {} ({})", s.name(), a.name, a.detail);
            }
            emit(&report.to_json(), out.as_ref())?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Constants {
            p,
            zeta,
            precision,
            psi_level,
        } => {
            let cfg = FieldConfig::new(p, zeta, precision)?;
            let table = constants_table(&cfg, &AdditiveChar::new(p, psi_level))?;
            say(&serde_json::to_string_pretty(&table)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::EnumeratePairs {
            p,
            zeta,
            precision,
            max_level,
            all,
            out,
        } => {
            let cfg = FieldConfig::new(p, zeta, precision)?;
            let specs: Vec<PairSpec> = enumerate_pairs(&cfg, max_level, !all)?
                .iter()
                .map(|pr| pr.chi.to_spec(!all))
                .collect();
            emit(&serde_json::to_string_pretty(&specs)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            pair,
            index,
            twist,
            range,
            format,
        } => {
            if range != "auto" {
                bail!("unsupported range {range}; only auto");
            }
            let pair = load_pair(&pair, index)?;
            let twist = resolve_twist(&twist, &pair)?;
            let report = compare_pair(&pair, &twist)?;
            match format {
                Format::Json => say(&serde_json::to_string_pretty(&report)?)?,
                Format::Csv => say(&comparison_csv(&report))?,
            }
            Ok(if report.all_equal { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::CharacterTable { q, format } => {
            let g = gl2::class_inventory(q)?;
            match format {
                Format::Csv => say(&gl2::character_table_csv(&g))?,
                Format::Json => {
                    let v = serde_json::json!({
                        "q": q,
                        "classes": g.classes.iter().map(|c| serde_json::json!({
                            "label": c.label(), "size": c.size, "centralizer": c.centralizer,
                        })).collect::<Vec<_>>(),
                        "characters": gl2::character_table(&g),
                    });
                    say(&serde_json::to_string_pretty(&v)?)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
