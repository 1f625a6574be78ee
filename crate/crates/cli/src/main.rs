use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Arg, ArgAction, ArgMatches};
use ilw_lab::cli_io::{
    exit_code, parse_override, resolve_config, run, CommandRegistry, RunManifest, RunOutcome, COMMON_KEYS,
    MANIFEST_FILE,
};

fn key_help(name: &str) -> String {
    let cmd = CommandRegistry::global().get(name).expect("registered command");
    let width = COMMON_KEYS.iter().chain(cmd.keys()).map(|k| k.name.len()).max().unwrap_or(0);
    let mut text = String::from("Keys (key=value, defaults shown):\n");
    for k in cmd.keys().iter().chain(COMMON_KEYS) {
        text.push_str(&format!("  {:width$}  {:<18} {}\n", k.name, format!("[{}]", k.default), k.doc));
    }
    text
}

fn cli() -> clap::Command {
    let mut app = clap::Command::new("ilw-lab")
        .about("Pseudospectral experiments for ILW, BO, KdV and scaled ILW")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for name in CommandRegistry::global().names() {
        let cmd = CommandRegistry::global().get(name).expect("registered command");
        app = app.subcommand(
            clap::Command::new(name)
                .about(cmd.about())
                .after_help(key_help(name))
                .arg(
                    Arg::new("config")
                        .long("config")
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("flat TOML file (or a previous manifest) applied before the overrides"),
                )
                .arg(
                    Arg::new("overrides")
                        .value_name("KEY=VALUE")
                        .action(ArgAction::Append)
                        .help("parameter overrides"),
                ),
        );
    }
    app.subcommand(
        clap::Command::new("rerun")
            .about("repeat the run recorded in a manifest")
            .arg(
                Arg::new("manifest")
                    .required(true)
                    .value_name("PATH")
                    .value_parser(clap::value_parser!(PathBuf))
                    .help("manifest file or the directory holding it"),
            ),
    )
}

fn execute(matches: &ArgMatches) -> Result<RunOutcome> {
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cfg = if name == "rerun" {
        let mut path = sub.get_one::<PathBuf>("manifest").expect("required").clone();
        if path.is_dir() {
            path.push(MANIFEST_FILE);
        }
        RunManifest::load(&path)
            .with_context(|| format!("reading {}", path.display()))?
            .run_config()
    } else {
        let file = match sub.get_one::<PathBuf>("config") {
            Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
            None => None,
        };
        let overrides = sub
            .get_many::<String>("overrides")
            .into_iter()
            .flatten()
            .map(|a| parse_override(a))
            .collect::<Result<Vec<_>, _>>()?;
        resolve_config(name, file.as_deref(), &overrides)?
    };
    Ok(run(&cfg)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = cli().get_matches();
    match execute(&matches) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            eprintln!(
                "{} files written; verdict {}",
                outcome.manifest.outputs.len() + 1,
                outcome.manifest.verdict
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .chain()
                .find_map(|e| e.downcast_ref::<ilw_lab::Error>())
                .map_or(1, exit_code);
            ExitCode::from(code as u8)
        }
    }
}
