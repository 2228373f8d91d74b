//! Command-line front end: argument parsing, config merging and output.

mod commands;
pub mod config;
pub mod selfcheck;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::error::{Error, Result};

pub use config::{parse_config, parse_config_text, CliValues, CommandKind, OutputFormat, RunConfig};
pub use selfcheck::{run_selfcheck, CheckRow, Depth, Fault, SelfcheckReport};

const BOOLEAN_KEYS: [&str; 3] = ["check", "dump", "no-mc"];

fn key_help(key: &str) -> &'static str {
    match key {
        "order" => "series truncation order",
        "u" => "substitute this rational for u",
        "kind" => "moment, catalan, phi12 or phi22",
        "s-max" => "largest half-length",
        "check" => "assert the identities and exit 1 on failure",
        "s" => "walk half-length",
        "filter" => "all, tree, catalan, two-four or rose",
        "dump" => "write the walks themselves, one per line",
        "profile" => "one-edge:<m>, two-four-sharing or two-four-any",
        "enum-max" => "raise the enumeration ceiling",
        "n" => "matrix dimension",
        "rho" => "mean degree, a positive rational",
        "moments" => "V2,V4,V6,... as rationals (default all 1)",
        "rose" => "also evaluate the rose sum P(m)",
        "dist" => "rademacher, uniform or two-point",
        "q" => "nonzero probability of the two-point law",
        "samples" => "number of matrices",
        "seed" => "master seed",
        "study" => "moments or spectral",
        "eps" => "comma-separated eps values for the spectral study",
        "chi" => "chi for the spectral tail bound",
        "lambda-dump" => "file receiving the per-sample largest |eigenvalue|",
        "no-mc" => "skip sampling",
        "u-grid" => "comma-separated u values",
        "which" => "upper, lower, exit-degree or all",
        "depth" => "quick or full",
        _ => "",
    }
}

fn command_about(kind: CommandKind) -> &'static str {
    match kind {
        CommandKind::Series => "Solve the moment generating function as an exact power series",
        CommandKind::Counts => "Tabulate closed-form walk counts",
        CommandKind::Enumerate => "Enumerate canonical walks and count profiles",
        CommandKind::Exact => "Exact finite-n moments from walk enumeration",
        CommandKind::Mc => "Monte Carlo moments or spectral-norm study",
        CommandKind::Compare => "Exact and sampled moments next to the limit series",
        CommandKind::Bounds => "Certified upper and lower coefficient bounds",
        CommandKind::Selfcheck => "Run the identity suite",
    }
}

fn build_cli() -> Command {
    let mut cmd = Command::new("dilute")
        .about("Moments of dilute Wigner random matrices")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("output").long("output").short('o').global(true).value_name("FILE").help("write here instead of stdout"))
        .arg(Arg::new("format").long("format").global(true).value_parser(["csv", "json"]).help("output format"))
        .arg(Arg::new("threads").long("threads").global(true).value_name("N").help("worker threads, 0 = auto"))
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("key = value config file"));
    for kind in CommandKind::ALL {
        let mut sub = Command::new(kind.name()).about(command_about(kind));
        for &key in kind.keys() {
            let arg = Arg::new(key).long(key).help(key_help(key));
            sub = sub.arg(if BOOLEAN_KEYS.contains(&key) {
                arg.action(ArgAction::SetTrue)
            } else if key == "inject-fault" {
                arg.hide(true).value_name("FAULT")
            } else {
                arg.value_name("VALUE")
            });
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn collect(kind: CommandKind, top: &ArgMatches, sub: &ArgMatches) -> (CliValues, Option<PathBuf>) {
    let mut values = CliValues::default();
    for key in ["output", "format", "threads"] {
        if let Some(v) = sub.get_one::<String>(key).or_else(|| top.get_one::<String>(key)) {
            values.global.insert(key.to_string(), v.clone());
        }
    }
    for &key in kind.keys() {
        if BOOLEAN_KEYS.contains(&key) {
            if sub.get_flag(key) {
                values.params.insert(key.to_string(), "true".into());
            }
        } else if let Some(v) = sub.get_one::<String>(key) {
            values.params.insert(key.to_string(), v.clone());
        }
    }
    let config = sub.get_one::<String>("config").or_else(|| top.get_one::<String>("config")).map(PathBuf::from);
    (values, config)
}

/// Parses arguments into a resolved config without running anything.
pub fn resolve<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = build_cli().try_get_matches_from(args).map_err(|e| Error::Config(first_line(&e.to_string())))?;
    let (name, sub) = matches.subcommand().ok_or_else(|| Error::Config("missing command".into()))?;
    let kind: CommandKind = name.parse()?;
    let (values, config_file) = collect(kind, &matches, sub);
    parse_config(kind, values, config_file.as_deref())
}

fn first_line(text: &str) -> String {
    text.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()
}

fn open_output(config: &RunConfig) -> Result<Box<dyn Write + Send>> {
    Ok(match &config.output_path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Runs a resolved config, writing to its output.
pub fn execute(config: &RunConfig) -> Result<()> {
    log::info!("resolved config: {config}");
    let mut out = open_output(config)?;
    let result = if config.threads == 0 {
        commands::dispatch(config, &mut *out)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} threads: {e}", config.threads)))?;
        pool.install(|| commands::dispatch(config, &mut *out))
    };
    out.flush()?;
    result
}

/// Full entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match build_cli().try_get_matches_from(&args) {
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        _ => {}
    }
    match resolve(args).and_then(|c| execute(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
