//! The `scc` command line.
//!
//! Exit codes: 0 success, 1 diagnostics or runtime failure, 2 usage or I/O
//! error. Artifacts go to stdout, diagnostics to stderr.

use std::cell::RefCell;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::rc::Rc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::contract::render_contract;
use crate::flow::{build_flow_graph, export, ExportFormat};
use crate::parser::{parse_located, Located, SourceText};
use crate::sim::{parse_scenario, run_scenario};
use crate::spec::DeclKind;
use crate::validate::validate;
use crate::webcam::{WebcamApp, DEFAULT_SCENARIO};

#[derive(Debug, Parser)]
#[command(
    name = "scc",
    about = "Check, graph, and run Sense/Compute/Control declarations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a declaration file.
    Check {
        spec: PathBuf,
        /// Print each component's boundary contract.
        #[arg(long)]
        contracts: bool,
    },
    /// Export the information-flow graph.
    Graph {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the bundled webcam application over a scenario.
    Demo {
        /// Scenario file; the bundled default when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Print activations and pulls as they happen.
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Dot => ExportFormat::Dot,
            Format::Json => ExportFormat::Json,
        }
    }
}

const OK: i32 = 0;
const FAILED: i32 = 1;
const USAGE: i32 = 2;

/// Run `scc` with `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                OK
            };
            return code;
        }
    };
    match cli.command {
        Command::Check { spec, contracts } => cmd_check(&spec, contracts, out, err),
        Command::Graph {
            spec,
            format,
            out: path,
        } => cmd_graph(&spec, format.into(), path, out, err),
        Command::Demo { scenario, trace } => cmd_demo(scenario, trace, out, err),
    }
}

fn read(path: &PathBuf, err: &mut dyn Write) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        USAGE
    })
}

/// Parse and validate, reporting problems. Returns the parse on success.
fn load(path: &PathBuf, err: &mut dyn Write) -> Result<Located, i32> {
    let text = read(path, err)?;
    let origin = path.display().to_string();
    let located = parse_located(&SourceText::new(text, origin.clone())).map_err(|e| {
        let _ = writeln!(err, "{e}");
        FAILED
    })?;
    let diagnostics = validate(&located.spec);
    if diagnostics.is_empty() {
        return Ok(located);
    }
    for d in &diagnostics {
        let pos = located.positions[d.index];
        let _ = writeln!(err, "{origin}:{pos}: {}: {}", d.code, d.message);
    }
    Err(FAILED)
}

fn cmd_check(path: &PathBuf, contracts: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let located = match load(path, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    if contracts {
        for d in &located.spec.declarations {
            if matches!(d.kind(), DeclKind::Context | DeclKind::Controller) {
                let c = crate::contract::derive_contract(&located.spec, d.name().as_str())
                    .expect("validated spec");
                let _ = writeln!(out, "{}: {}", d.name(), render_contract(&c));
            }
        }
    }
    OK
}

fn cmd_graph(
    path: &PathBuf,
    format: ExportFormat,
    dest: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let located = match load(path, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let text = export(&build_flow_graph(&located.spec), format);
    match dest {
        Some(dest) => {
            if let Err(e) = fs::write(&dest, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", dest.display());
                return USAGE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    OK
}

fn cmd_demo(
    scenario: Option<PathBuf>,
    trace: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (text, origin) = match &scenario {
        Some(p) => match read(p, err) {
            Ok(t) => (t, p.display().to_string()),
            Err(code) => return code,
        },
        None => (DEFAULT_SCENARIO.to_owned(), "<default>".to_owned()),
    };
    let sc = match parse_scenario(&text) {
        Ok(sc) => sc,
        Err(e) => {
            let _ = writeln!(err, "{origin}:{e}");
            return FAILED;
        }
    };

    let mut app = WebcamApp::new();
    let lines = Rc::new(RefCell::new(Vec::<String>::new()));
    if trace {
        let sink = Rc::clone(&lines);
        app.runtime
            .set_observer(move |ev| sink.borrow_mut().push(format!("trace: {ev}")));
    }
    let result = run_scenario(&mut app.runtime, &sc);
    for line in lines.borrow().iter() {
        let _ = writeln!(out, "{line}");
    }
    for (action, tv) in app.runtime.action_log() {
        let _ = writeln!(out, "{action} <- {tv}");
    }
    match result {
        Ok(()) => OK,
        Err(e) => {
            let blame = e
                .error
                .component()
                .map(|c| format!("{c}: "))
                .unwrap_or_default();
            let _ = writeln!(
                err,
                "error: step {}: {blame}{}: {}",
                e.step,
                e.error.code(),
                e.error
            );
            FAILED
        }
    }
}
