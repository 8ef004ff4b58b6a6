use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use metgroup_cli::catalog::list_catalog;
use metgroup_cli::report::EXIT_CONFIG;
use metgroup_cli::{run, verify_report, CliError, RunOptions, SCHEMA_VERSION};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Run verification tasks on finite normed groups.
#[derive(Parser, Debug)]
#[command(name = "metgroup", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Task config (JSON). Reads standard input when absent or "-".
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for intra-task parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Re-check the witnesses and certificates in a report.
    VerifyReport {
        /// Report file; standard input when absent or "-".
        report: Option<PathBuf>,
    },
    /// List group types, norms, sequence rules and the schema version.
    Catalog,
}

fn read_input(path: Option<&PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn input_error(message: String) -> (String, u8) {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "verdict": null,
        "error": {"kind": "config", "pointer": "", "message": message},
    });
    (pretty(&doc), EXIT_CONFIG as u8)
}

fn load_json(path: Option<&PathBuf>) -> Result<Value, (String, u8)> {
    let text = read_input(path).map_err(|e| input_error(format!("cannot read input: {e}")))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("invalid JSON: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("metgroup: cannot size the worker pool: {e}");
        }
    }
    let (text, code) = match &cli.command {
        Some(Command::Catalog) => (pretty(&list_catalog()), 0),
        Some(Command::VerifyReport { report }) => match load_json(report.as_ref()) {
            Err(e) => e,
            Ok(doc) => match verify_report(&doc) {
                Ok(v) => (pretty(&v.to_json()), if v.ok() { 0 } else { 1 }),
                Err(e) => {
                    let pointer = match &e {
                        CliError::Config { pointer, .. } => pointer.clone(),
                        CliError::Core(_) => String::new(),
                    };
                    let doc = json!({
                        "schema_version": SCHEMA_VERSION,
                        "verified": false,
                        "error": {"pointer": pointer, "message": e.to_string()},
                    });
                    (pretty(&doc), EXIT_CONFIG as u8)
                }
            },
        },
        None => match load_json(cli.config.as_ref()) {
            Err(e) => e,
            Ok(doc) => {
                let out = run(&doc, &RunOptions { seed: cli.seed });
                let text = match (cli.format, &out.csv) {
                    (Format::Csv, Some(csv)) => csv.clone(),
                    (Format::Csv, None) => {
                        eprintln!("metgroup: this task has no table export; writing JSON");
                        pretty(&out.report)
                    }
                    (Format::Json, _) => pretty(&out.report),
                };
                (text, out.exit as u8)
            }
        },
    };
    if let Err(e) = emit(cli.out.as_ref(), &text) {
        eprintln!("metgroup: cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    ExitCode::from(code)
}
