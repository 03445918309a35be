//! The `sol2eb` command line: translate, check, simulate and serve.

use std::fs;
use std::io::{BufRead, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value as Json};

use crate::checker::{check_all, CheckOptions, CheckReport};
use crate::eb::{Bounds, Valuation};
use crate::ebtext::{parse_project, print_project};
use crate::project::{load, LoadError, LoadedProject, REPORT_SUFFIX};
use crate::sim::server::{serve, AppState, DEFAULT_IDLE_EXPIRY};
use crate::sim::{decode_constants, SimError, SimSession};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

pub const DEFAULT_PORT: u16 = 7007;

#[derive(Debug, Parser)]
#[command(
    name = "sol2eb",
    version,
    about = "Translate Solidity contracts to Event-B, check proof obligations and animate machines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a Solidity file into `.eb` files and a translation report.
    Translate {
        input: PathBuf,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Generate and check proof obligations.
    Check {
        /// A `.sol` file or a directory of `.eb` files.
        input: PathBuf,
        /// Extra `.eb` files, such as hand-written refinements.
        extra: Vec<PathBuf>,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
        /// Include syntactically discharged obligations.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = crate::checker::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Animate a machine in an interactive session.
    Simulate {
        input: PathBuf,
        extra: Vec<PathBuf>,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        machine: Option<String>,
        /// Fix a constant, e.g. `--const TRANSFER_VALUE=1`.
        #[arg(long = "const", value_name = "NAME=VALUE")]
        constants: Vec<String>,
    },
    /// Serve the session API and static UI assets.
    Serve {
        input: PathBuf,
        extra: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of static UI assets.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 3)]
    pub addr: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub int_lo: i128,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub int_hi: i128,
}

impl BoundsArgs {
    fn bounds(&self) -> Result<Bounds, String> {
        Bounds::new(self.addr, self.int_lo, self.int_hi).map_err(|e| e.to_string())
    }
}

struct Io<'a> {
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code. `color_allowed` enables ANSI output unless
/// `SOL2EB_NO_COLOR` is set.
pub fn run<I, A>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write, color_allowed: bool) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let color = color_allowed && std::env::var_os("SOL2EB_NO_COLOR").is_none();
    let mut io = Io { input, out, err, color };
    match cli.command {
        Command::Translate { input, output } => translate(&mut io, &input, &output),
        Command::Check { input, extra, bounds, json, all, budget } => {
            let Some(bounds) = usage(&mut io, bounds.bounds()) else { return EXIT_USAGE };
            check(&mut io, &input, &extra, CheckOptions { bounds, budget, all }, json)
        }
        Command::Simulate { input, extra, bounds, machine, constants } => {
            let Some(bounds) = usage(&mut io, bounds.bounds()) else { return EXIT_USAGE };
            simulate(&mut io, &input, &extra, bounds, machine.as_deref(), &constants)
        }
        Command::Serve { input, extra, port, host, ui } => serve_cmd(&mut io, &input, &extra, SocketAddr::new(host, port), ui),
    }
}

fn usage<T>(io: &mut Io<'_>, r: Result<T, String>) -> Option<T> {
    r.map_err(|e| {
        let _ = writeln!(io.err, "error: {e}");
    })
    .ok()
}

fn input_error(io: &mut Io<'_>, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(io.err, "{e}");
    EXIT_INPUT
}

/// Loads `input` and appends the `extra` `.eb` files to it.
pub fn load_with(input: &Path, extra: &[PathBuf]) -> Result<LoadedProject, LoadError> {
    let base = load(input)?;
    if extra.is_empty() {
        return Ok(base);
    }
    let mut files = print_project(&base.project);
    for p in extra {
        let text = fs::read_to_string(p).map_err(|source| LoadError::Io { path: p.clone(), source })?;
        files.push((p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()), text));
    }
    let project = parse_project(&base.project.name, &files)?;
    Ok(LoadedProject { project, report: base.report })
}

fn translate(io: &mut Io<'_>, input: &Path, output: &Path) -> i32 {
    if input.extension().is_none_or(|e| e != "sol") {
        return input_error(io, format!("{}: expected a .sol file", input.display()));
    }
    let loaded = match load(input) {
        Ok(l) => l,
        Err(e) => return input_error(io, e),
    };
    if let Err(e) = fs::create_dir_all(output) {
        return input_error(io, format!("{}: {e}", output.display()));
    }
    let mut written = Vec::new();
    for (name, text) in print_project(&loaded.project) {
        written.push((output.join(name), text));
    }
    if let Some(r) = &loaded.report {
        let json = serde_json::to_string_pretty(r).expect("report serializes") + "\n";
        written.push((output.join(format!("{}{REPORT_SUFFIX}", r.contract)), json));
    }
    for (path, text) in &written {
        if let Err(e) = fs::write(path, text) {
            return input_error(io, format!("{}: {e}", path.display()));
        }
        let _ = writeln!(io.out, "wrote {}", path.display());
    }
    if let Some(r) = &loaded.report {
        for s in &r.skipped_constructs {
            let _ = writeln!(io.err, "note: {}:{}:{}: skipped {}", input.display(), s.span.line, s.span.col, s.reason);
        }
    }
    EXIT_OK
}

fn paint(color: bool, code: &str, text: &str) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

/// Verdict table with counterexamples under violated rows.
pub fn render_table(report: &CheckReport, color: bool) -> String {
    let width = report.pos.iter().map(|p| p.name.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:width$}  {:4}  {:11}  {:>9}\n", "PO", "KIND", "STATUS", "CASES");
    for p in &report.pos {
        let status = match p.status {
            "discharged" => paint(color, "32", "discharged "),
            "violated" => paint(color, "31", "violated   "),
            _ => paint(color, "33", "unsupported"),
        };
        s += &format!("{:width$}  {:4}  {status}  {:>9}\n", p.name, p.kind.to_string(), p.cases);
        if let Some(Json::Object(cex)) = &p.counterexample {
            for (k, v) in cex {
                s += &format!("    {k} = {v}\n");
            }
        }
        if let Some(span) = &p.source_span {
            s += &format!("    at {}:{}:{}\n", span.file, span.line, span.col);
        }
        if let Some(d) = &p.detail {
            s += &format!("    {d}\n");
        }
    }
    let count = |st: &str| report.pos.iter().filter(|p| p.status == st).count();
    s += &format!(
        "{} proof obligations: {} discharged, {} violated, {} unsupported\n",
        report.pos.len(),
        count("discharged"),
        count("violated"),
        count("unsupported")
    );
    s
}

fn check(io: &mut Io<'_>, input: &Path, extra: &[PathBuf], opts: CheckOptions, json: bool) -> i32 {
    let loaded = match load_with(input, extra) {
        Ok(l) => l,
        Err(e) => return input_error(io, e),
    };
    let report = match check_all(&loaded.project, &opts, loaded.report.as_ref()) {
        Ok(r) => r,
        Err(e) => return input_error(io, e),
    };
    let text = if json { report.to_json() + "\n" } else { render_table(&report, io.color) };
    let _ = io.out.write_all(text.as_bytes());
    if report.violated().next().is_some() || report.unsupported().next().is_some() {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    }
}

/// Parses `NAME=VALUE` pairs; values are JSON, or bare atom names.
pub fn parse_const_args(args: &[String]) -> Result<Map<String, Json>, String> {
    let mut out = Map::new();
    for a in args {
        let (k, v) = a.split_once('=').ok_or_else(|| format!("`{a}` is not NAME=VALUE"))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Json::String(v.to_string()));
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

fn simulate(io: &mut Io<'_>, input: &Path, extra: &[PathBuf], bounds: Bounds, machine: Option<&str>, consts: &[String]) -> i32 {
    let Some(consts) = usage(io, parse_const_args(consts)) else { return EXIT_USAGE };
    let loaded = match load_with(input, extra) {
        Ok(l) => l,
        Err(e) => return input_error(io, e),
    };
    let session = decode_constants(&loaded.project, machine, &consts, &bounds)
        .and_then(|fixed| SimSession::new(&loaded.project, machine, &fixed, bounds));
    let mut s = match session {
        Ok(s) => s,
        Err(e) => return input_error(io, e),
    };
    let _ = writeln!(io.out, "machine {}; constants {}", s.machine().name, s.constants());
    repl(io, &mut s);
    EXIT_OK
}

fn banner(io: &mut Io<'_>, s: &SimSession) {
    let _ = writeln!(io.out, "{}", s.state());
    if s.invariants_ok() {
        let _ = writeln!(io.out, "{}", paint(io.color, "32", "invariants ok"));
    } else {
        let broken: Vec<&str> = s.invariant_status().iter().filter(|i| !i.holds).map(|i| i.label.as_str()).collect();
        let _ = writeln!(io.out, "{}", paint(io.color, "31", &format!("invariant violated: {}", broken.join(", "))));
    }
}

const REPL_HELP: &str = "commands: offers | fire N | fire EVENT name=value ... | undo | reset | state | trace | help | quit";

fn repl(io: &mut Io<'_>, s: &mut SimSession) {
    banner(io, s);
    let mut listed: Vec<(String, Valuation)> = Vec::new();
    loop {
        let _ = write!(io.out, "> ");
        let _ = io.out.flush();
        let mut line = String::new();
        match io.input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let result: Result<bool, SimError> = match words.as_slice() {
            [] => Ok(false),
            ["quit" | "exit" | "q"] => break,
            ["help" | "?"] => {
                let _ = writeln!(io.out, "{REPL_HELP}");
                Ok(false)
            }
            ["offers" | "o"] => s.enabled_events().map(|offers| {
                listed.clear();
                for o in offers {
                    for p in o.params {
                        let _ = writeln!(io.out, "[{}] {}({p})", listed.len(), o.event);
                        listed.push((o.event.clone(), p));
                    }
                    if o.truncated {
                        let _ = writeln!(io.out, "    {} has more offers", o.event);
                    }
                }
                false
            }),
            ["fire", n] | [n] if n.parse::<usize>().is_ok() => match listed.get(n.parse::<usize>().unwrap()).cloned() {
                Some((ev, p)) => s.fire(&ev, &p).map(|_| true),
                None => {
                    let _ = writeln!(io.out, "no offer {n}; run `offers` first");
                    Ok(false)
                }
            },
            ["fire", ev, rest @ ..] => parse_const_args(&rest.iter().map(|r| r.to_string()).collect::<Vec<_>>())
                .map_err(SimError::BadParams)
                .and_then(|m| s.parse_params(ev, &m))
                .and_then(|p| s.fire(ev, &p))
                .map(|_| true),
            ["undo"] => s.undo().map(|_| true),
            ["reset"] => {
                s.reset();
                Ok(true)
            }
            ["state"] => Ok(true),
            ["trace"] => {
                let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&s.trace_json()).expect("json"));
                Ok(false)
            }
            _ => {
                let _ = writeln!(io.out, "{REPL_HELP}");
                Ok(false)
            }
        };
        match result {
            Ok(true) => {
                listed.clear();
                banner(io, s);
            }
            Ok(false) => {}
            Err(e) => {
                let _ = writeln!(io.out, "{}", paint(io.color, "31", &e.to_string()));
            }
        }
    }
}

fn serve_cmd(io: &mut Io<'_>, input: &Path, extra: &[PathBuf], addr: SocketAddr, ui: Option<PathBuf>) -> i32 {
    let loaded = match load_with(input, extra) {
        Ok(l) => l,
        Err(e) => return input_error(io, e),
    };
    let ui = ui.or_else(|| Some(input.join("ui")).filter(|d| d.is_dir()));
    let state = AppState::with_options(vec![loaded], DEFAULT_IDLE_EXPIRY, ui);
    let rt = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => return input_error(io, e),
    };
    let _ = writeln!(io.out, "listening on http://{addr}");
    let _ = io.out.flush();
    match rt.block_on(serve(state, addr)) {
        Ok(()) => EXIT_OK,
        Err(e) => input_error(io, format!("{addr}: {e}")),
    }
}
