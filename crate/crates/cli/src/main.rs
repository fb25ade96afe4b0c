//! `permparity` command-line tool.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use permparity::characters::table_bounded;
use permparity::gme::{extremal_witness_state, gme_of_pure_state, parity_projector, seesaw, SeesawOptions};
use permparity::parity::{build, simulate, verify_parity_bounded, Method, ParityStateRecipe, SimulationOptions};
use permparity::perm::DEFAULT_MAX_DEGREE;
use permparity::state::{schur_weyl_audit, Ket, StateVector, FLOAT_TOL};
use permparity::{Branch, Cyclotomic, Error, GroupKind, Partition};

/// Overrides the largest group degree the tool will enumerate.
const MAX_DEGREE_ENV: &str = "PERMPARITY_MAX_DEGREE";

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_BOUND: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "permparity",
    version,
    about = "Parity-detecting qudit states and S_n / A_n character theory"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    S,
    A,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Character table of S_n or A_n.
    Chartab {
        #[arg(long, value_enum, ignore_case = true)]
        group: GroupArg,
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        n: u16,
    },
    /// Schur-Weyl dimension audit of (C^d)^n.
    Dims {
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        n: u16,
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        d: u16,
    },
    /// Build a parity-detecting state.
    State {
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        n: u16,
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        d: u16,
        /// self-conjugate or conjugate-pair.
        #[arg(long)]
        method: Method,
        /// Partition such as 2,2 or 3,1^2.
        #[arg(long)]
        lambda: Partition,
        /// a or b (self-conjugate method).
        #[arg(long)]
        branch: Option<Branch>,
        /// Seed ket digits, e.g. 0011 (self-conjugate method).
        #[arg(long)]
        seed_ket: Option<String>,
        /// Comma-separated coefficients, e.g. "1,0,sqrt(2)" (conjugate-pair method).
        #[arg(long)]
        coeffs: Option<String>,
    },
    /// Check that a state's even and odd orbits are orthogonal.
    Verify {
        #[arg(long)]
        state: PathBuf,
    },
    /// Monte Carlo parity identification.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Run even if the state is not parity detecting.
        #[arg(long)]
        allow_invalid: bool,
    },
    /// Geometric measure of entanglement by see-saw.
    Gme {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, conflicts_with = "state")]
        lambda: Option<Partition>,
        /// Omit for the S_n isotypic projector.
        #[arg(long, requires = "lambda")]
        branch: Option<Branch>,
        /// State file; the measure of that pure state is computed.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

/// Bad flags or unreadable input, reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(lib) = e.downcast_ref::<Error>() {
        return match lib {
            Error::BoundExceeded { .. } => EXIT_BOUND,
            Error::DegreeMismatch { .. }
            | Error::InvalidPermutation(_)
            | Error::InvalidPartition(_)
            | Error::InvalidTableau(_)
            | Error::Parse(_)
            | Error::InvalidLabel { .. }
            | Error::ShapeMismatch(_)
            | Error::InvalidRecipe(_)
            | Error::NotSquareFree(_) => EXIT_USAGE,
            Error::NotSelfConjugate(_)
            | Error::AnnihilatedSeed(_)
            | Error::NoSingleMultiplicityContent(_)
            | Error::Singular(_)
            | Error::ZeroState
            | Error::DivisionByZero
            | Error::NotParityDetecting(_) => EXIT_DOMAIN,
        };
    }
    EXIT_USAGE
}

fn max_degree() -> anyhow::Result<usize> {
    match std::env::var(MAX_DEGREE_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{MAX_DEGREE_ENV}={v} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

fn load_state(path: &Path) -> anyhow::Result<StateVector> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a state file: {e}", path.display())))
}

fn parse_coeffs(s: &str) -> anyhow::Result<Vec<Cyclotomic>> {
    s.split(',')
        .map(|c| c.parse::<Cyclotomic>().map_err(anyhow::Error::from))
        .collect()
}

/// Rendered output: text for humans and a JSON object carrying its provenance.
struct Report {
    text: String,
    json: Value,
}

fn with_provenance(result: Value, command: &str, parameters: Value, seed: Option<u64>) -> anyhow::Result<Value> {
    let mut obj = match result {
        Value::Object(m) => m,
        other => return Ok(json!({ "result": other })),
    };
    obj.insert(
        "provenance".into(),
        json!({
            "tool": "permparity",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "parameters": parameters,
            "seed": seed,
            "float_tolerance": FLOAT_TOL,
        }),
    );
    Ok(Value::Object(obj))
}

fn chartab(group: GroupArg, n: usize, bound: usize) -> anyhow::Result<Report> {
    let kind = match group {
        GroupArg::S => GroupKind::Symmetric,
        GroupArg::A => GroupKind::Alternating,
    };
    let t = table_bounded(kind, n, bound)?;
    let params = json!({ "group": format!("{group:?}"), "n": n, "max_degree": bound });
    Ok(Report {
        text: t.render_text(),
        json: with_provenance(serde_json::to_value(t.to_json())?, "chartab", params, None)?,
    })
}

fn dims(n: usize, d: usize) -> anyhow::Result<Report> {
    let a = schur_weyl_audit(n, d)?;
    let mut text = format!(
        "n = {n}, d = {d}\n{:<12} {:>6} {:>6} {:>8} {:>6}\n",
        "lambda", "d_l", "m_l", "d_l*m_l", "rank"
    );
    for e in &a.entries {
        text += &format!(
            "{:<12} {:>6} {:>6} {:>8} {:>6}\n",
            e.lambda.exp_notation(),
            e.d_lambda,
            e.m_lambda,
            e.product,
            e.rank
        );
    }
    text += &a.balance_line;
    text.push('\n');
    let params = json!({ "n": n, "d": d });
    Ok(Report {
        text,
        json: with_provenance(serde_json::to_value(&a)?, "dims", params, None)?,
    })
}

fn render_state(psi: &StateVector) -> String {
    let mut text = format!("n = {}, d = {}, {} terms\n", psi.n(), psi.d(), psi.len());
    for (ket, amp) in psi.iter() {
        let value = match amp.as_exact() {
            Some(c) => c.to_string(),
            None => {
                let z = amp.to_complex();
                format!("{:.12}{:+.12}i", z.re, z.im)
            }
        };
        text += &format!("{value:>24}  |{ket}>\n");
    }
    text
}

fn state(recipe: ParityStateRecipe) -> anyhow::Result<Report> {
    recipe.validate()?;
    let psi = build(&recipe)?;
    let params = serde_json::to_value(&recipe)?;
    Ok(Report {
        text: render_state(&psi),
        json: with_provenance(serde_json::to_value(&psi)?, "state", params, None)?,
    })
}

fn verify(path: &Path, bound: usize) -> anyhow::Result<Report> {
    let psi = load_state(path)?;
    let r = verify_parity_bounded(&psi, bound)?;
    let text = format!(
        "valid: {}\nmax cross overlap: {:e}\neven orbit states: {}\nodd orbit states: {}\nexact: {}\n",
        r.valid, r.max_cross_overlap, r.n_even, r.n_odd, r.exact
    );
    let params = json!({ "state": path.display().to_string(), "max_degree": bound });
    Ok(Report {
        text,
        json: with_provenance(serde_json::to_value(&r)?, "verify", params, None)?,
    })
}

fn simulate_cmd(path: &Path, trials: usize, seed: u64, allow_invalid: bool, bound: usize) -> anyhow::Result<Report> {
    let psi = load_state(path)?;
    let opts = SimulationOptions {
        trials,
        seed,
        allow_invalid,
        max_degree: bound,
    };
    let r = simulate(&psi, &opts)?;
    let text = match r.empirical_ps {
        Some(p) => format!(
            "empirical P_s = {p:.6} ({}/{} trials, seed {seed})\n",
            r.successes, r.trials
        ),
        None => "no trials run\n".to_string(),
    };
    let params = json!({ "state": path.display().to_string(), "trials": trials, "allow_invalid": allow_invalid });
    Ok(Report {
        text,
        json: with_provenance(serde_json::to_value(&r)?, "simulate", params, Some(seed))?,
    })
}

fn gme(
    n: Option<usize>,
    d: Option<usize>,
    lambda: Option<Partition>,
    branch: Option<Branch>,
    state_path: Option<PathBuf>,
    opts: SeesawOptions,
) -> anyhow::Result<Report> {
    if opts.restarts == 0 || opts.max_sweeps == 0 {
        return Err(usage("--restarts and --max-sweeps must be positive"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let (result, witness, params) = match (lambda, state_path) {
        (Some(lambda), None) => {
            let d = d.ok_or_else(|| usage("--d is required with --lambda"))?;
            if d == 0 {
                return Err(usage("--d must be positive"));
            }
            if let Some(n) = n {
                if n != lambda.size() {
                    return Err(usage(format!("--n {n} does not match |lambda| = {}", lambda.size())));
                }
            }
            let n = lambda.size();
            let p = parity_projector(&lambda, branch, d)?;
            let r = seesaw(&p, n, d, &opts)?;
            let w = extremal_witness_state(&p, &r.witness)?;
            let params = json!({
                "n": n,
                "d": d,
                "lambda": lambda,
                "branch": branch,
                "restarts": opts.restarts,
                "max_sweeps": opts.max_sweeps,
                "tol": opts.tol,
            });
            (r, Some(w), params)
        }
        (None, Some(path)) => {
            if n.is_some() || d.is_some() || branch.is_some() {
                return Err(usage("--n, --d and --branch do not apply with --state"));
            }
            let psi = load_state(&path)?;
            let r = gme_of_pure_state(&psi, &opts)?;
            let params = json!({
                "state": path.display().to_string(),
                "restarts": opts.restarts,
                "max_sweeps": opts.max_sweeps,
                "tol": opts.tol,
            });
            (r, None, params)
        }
        _ => return Err(usage("give either --lambda (with --d) or --state")),
    };
    let text = format!(
        "E = {:.12}\nmax overlap = {:.12}\nrestarts = {}, best restart = {}, sweeps = {}, converged = {}\n",
        result.e, result.max_overlap, result.restarts_used, result.best_restart, result.sweeps, result.converged
    );
    let mut value = serde_json::to_value(&result)?;
    if let (Some(w), Value::Object(m)) = (witness, &mut value) {
        m.insert("witness_state".into(), serde_json::to_value(&w)?);
    }
    Ok(Report {
        text,
        json: with_provenance(value, "gme", params, Some(opts.seed))?,
    })
}

fn run(cli: Cli) -> anyhow::Result<String> {
    let bound = max_degree()?;
    let report = match cli.command {
        Command::Chartab { group, n } => chartab(group, n.into(), bound)?,
        Command::Dims { n, d } => dims(n.into(), d.into())?,
        Command::State {
            n,
            d,
            method,
            lambda,
            branch,
            seed_ket,
            coeffs,
        } => {
            let (n, d) = (usize::from(n), usize::from(d));
            let seed_ket = seed_ket.map(|k| Ket::parse(&k, d)).transpose()?;
            let coefficients = coeffs.as_deref().map(parse_coeffs).transpose()?;
            let recipe = ParityStateRecipe {
                n,
                d,
                method,
                lambda,
                branch,
                seed_ket,
                coefficients,
            };
            if method == Method::SelfConjugate && recipe.branch.is_none() {
                return Err(usage("--branch is required for the self-conjugate method"));
            }
            state(recipe)?
        }
        Command::Verify { state } => verify(&state, bound)?,
        Command::Simulate {
            state,
            trials,
            allow_invalid,
        } => simulate_cmd(&state, trials, cli.seed, allow_invalid, bound)?,
        Command::Gme {
            n,
            d,
            lambda,
            branch,
            state,
            restarts,
            max_sweeps,
            tol,
        } => {
            let opts = SeesawOptions {
                restarts,
                max_sweeps,
                tol,
                seed: cli.seed,
                ..SeesawOptions::default()
            };
            gme(n, d, lambda, branch, state, opts)?
        }
    };
    Ok(match cli.format {
        Format::Text => report.text,
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = run(cli).and_then(|text| match &out {
        Some(path) => fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(|e| usage(format!("{e:#}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let bound: anyhow::Error = Error::BoundExceeded {
            what: "n",
            value: 9,
            bound: 8,
        }
        .into();
        assert_eq!(exit_code(&bound), EXIT_BOUND);
        assert_eq!(exit_code(&Error::AnnihilatedSeed("000".into()).into()), EXIT_DOMAIN);
        assert_eq!(exit_code(&Error::InvalidRecipe("x".into()).into()), EXIT_USAGE);
        assert_eq!(exit_code(&usage("bad")), EXIT_USAGE);
    }

    #[test]
    fn coefficient_lists() {
        let c = parse_coeffs("1, 0 ,sqrt(2)").unwrap();
        assert_eq!(c.len(), 3);
        assert!(c[1].is_zero());
        assert!(parse_coeffs("1,,2").is_err());
    }

    #[test]
    fn provenance_is_attached() {
        let v = with_provenance(json!({ "valid": true }), "verify", json!({}), Some(3)).unwrap();
        assert_eq!(v["valid"], true);
        assert_eq!(v["provenance"]["seed"], 3);
        assert_eq!(v["provenance"]["command"], "verify");
    }

    #[test]
    fn flags_parse() {
        Cli::try_parse_from(["permparity", "chartab", "--group", "a", "--n", "5"]).unwrap();
        assert!(Cli::try_parse_from(["permparity", "chartab", "--group", "A", "--n", "0"]).is_err());
        let cli = Cli::try_parse_from([
            "permparity",
            "--format",
            "json",
            "state",
            "--n",
            "4",
            "--d",
            "2",
            "--method",
            "self-conjugate",
            "--lambda",
            "2,2",
            "--branch",
            "a",
            "--seed-ket",
            "0011",
        ])
        .unwrap();
        assert_eq!(cli.format, Format::Json);
    }
}
