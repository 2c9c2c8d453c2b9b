use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod output;

use output::{Manifest, Record};

#[derive(Parser, Serialize)]
#[command(name = "ekeland", version, about = "Certified critical points, envelopes and gadget codes over exact rationals")]
struct Cli {
    /// Permute the dense enumeration of search nets with this seed.
    #[arg(long, global = true)]
    seed_order: Option<u64>,
    /// Write a JSON run manifest (parameters, file digests, outcome) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Write a function-code file for one of the gadget families.
    Gadget(GadgetArgs),
    /// Search for an ε-critical point and write its certificate.
    Search(SearchArgs),
    /// Re-check a certificate against a function-code file.
    Verify(VerifyArgs),
    /// Sample the lower α-envelope of an lsc code as CSV.
    Envelope(EnvelopeArgs),
    /// Embed a point into C[0,1] and write the breakpoint list.
    Embed(EmbedArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gadget(_) => "gadget",
            Command::Search(_) => "search",
            Command::Verify(_) => "verify",
            Command::Envelope(_) => "envelope",
            Command::Embed(_) => "embed",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetType {
    Wkl,
    AcaInj,
    AcaSup,
    Pi11,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Cantor,
    Unit,
}

#[derive(Args, Serialize)]
pub struct GadgetArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GadgetType,
    /// Tree file (JSON); pass once per tree for pi11.
    #[arg(long)]
    pub tree: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "cantor")]
    pub target: Target,
    /// Expression in n for the sequence c_n, e.g. "1/2-2^-(n+1)".
    #[arg(long)]
    pub cn: Option<String>,
    /// Number of terms of c_n to take.
    #[arg(long, default_value_t = 16)]
    pub prefix: usize,
    /// Expression in n for the injection h, e.g. "2*n".
    #[arg(long)]
    pub h: Option<String>,
    /// h is tabulated on 0..domain.
    #[arg(long, default_value_t = 6)]
    pub domain: u64,
    /// Range bound N for the injection gadget.
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    /// Also write the gadget's search net (aca-inj, pi11).
    #[arg(long)]
    pub net_out: Option<PathBuf>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Principle {
    Fvp,
    Lvp,
}

#[derive(Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long, value_enum, default_value = "fvp")]
    pub principle: Principle,
    #[arg(long)]
    pub epsilon: String,
    #[arg(long, default_value_t = 8)]
    pub resolution: u32,
    #[arg(long, default_value_t = 48)]
    pub budget: u32,
    #[arg(long, default_value_t = 64)]
    pub max_iters: u32,
    #[arg(long)]
    pub slack: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    /// Starting point for the localized principle.
    #[arg(long)]
    pub x0: Option<String>,
    /// JSON list of points used as both search and verification net.
    #[arg(long)]
    pub net: Option<PathBuf>,
    /// Baire nets: entries below this bound.
    #[arg(long)]
    pub branching: Option<u64>,
    /// Baire nets: fixed prefix length.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Also write the recorded search state.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub cert: PathBuf,
    /// Write the recomputed certificate here.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 8)]
    pub resolution: u32,
    /// Number of evenly spaced sample points, endpoints included.
    #[arg(long, default_value_t = 9)]
    pub points: u32,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedKind {
    Unit,
    Baire,
}

#[derive(Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub kind: EmbedKind,
    /// A rational in [0, 1] or a sequence such as "[1,0,2]".
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Fibre coordinate; when given, writes ι(x, y) instead of the embedding of x.
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long, default_value = "0")]
    pub a: String,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(short, long)]
    pub out: PathBuf,
}

pub const INVALID: i32 = 2;
pub const BUDGET: i32 = 3;
pub const VERIFY_FAILED: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn invalid(msg: impl fmt::Display) -> Failure {
        Failure { code: INVALID, message: msg.to_string() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure { code: INVALID, message: format!("{}: {e}", path.display()) }
    }
}

impl From<ekeland::critical::EkelandError> for Failure {
    fn from(e: ekeland::critical::EkelandError) -> Failure {
        use ekeland::codes::CodeError;
        use ekeland::critical::EkelandError;
        let code = match &e {
            EkelandError::Code(CodeError::BudgetExceeded { .. }) => BUDGET,
            _ => INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<ekeland::codespec::SpecError> for Failure {
    fn from(e: ekeland::codespec::SpecError) -> Failure {
        Failure::invalid(e)
    }
}

impl From<ekeland::gadgets::GadgetError> for Failure {
    fn from(e: ekeland::gadgets::GadgetError) -> Failure {
        Failure::invalid(e)
    }
}

/// What a finished command reports: its exit code and a one-line summary.
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut record = Record::default();
    let result = match &cli.command {
        Command::Gadget(a) => commands::gadget(a, &mut record),
        Command::Search(a) => commands::search(a, cli.seed_order, &mut record),
        Command::Verify(a) => commands::verify(a, &mut record),
        Command::Envelope(a) => commands::envelope(a, &mut record),
        Command::Embed(a) => commands::embed(a, &mut record),
    };
    let outcome = match result {
        Ok(o) => {
            println!("{}", o.summary);
            o
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            Outcome { code: f.code, summary: f.message }
        }
    };
    if let Some(path) = &cli.manifest {
        let manifest = Manifest {
            tool: "ekeland",
            version: env!("CARGO_PKG_VERSION"),
            command: cli.command.name().into(),
            args: std::env::args().skip(1).collect(),
            parameters: serde_json::to_value(&cli).expect("arguments serialize"),
            inputs: record.inputs,
            outputs: record.outputs,
            exit_code: outcome.code,
            outcome: outcome.summary,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        if let Err(f) = output::write_atomic(path, text.as_bytes()) {
            eprintln!("error: {}", f.message);
            return ExitCode::from(1);
        }
    }
    ExitCode::from(outcome.code as u8)
}
