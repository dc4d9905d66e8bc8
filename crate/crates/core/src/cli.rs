//! Command-line front end.
//!
//! Exit codes: `0` success (or functional), `1` not functional / failed
//! cross-check, `2` input outside the domain, `64` usage errors, `74` I/O
//! errors, `65` for malformed input files and other data errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classical::{check_pseudo_deterministic, classical_compile};
use crate::compile::{compile, compile_verdict, CompileOptions, Compiled};
use crate::error::Error;
use crate::fsa::{default_path_bound, enumerate_outputs, Transducer};
use crate::functionality::test_functionality;
use crate::io::{parse_bimachine, parse_transducer, write_bimachine, write_transducer};
use crate::tn::{make_tn, run_bench, BenchLimits, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNDEFINED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

/// Environment variable capping the size of every power-set construction.
pub const MAX_STATES_VAR: &str = "BIMC_MAX_STATES";

#[derive(Debug, Parser)]
#[command(name = "bimc", version, about = "Functionality testing and bimachine compilation for monoidal transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompileMethod {
    Mge,
    Classical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchMethod {
    Mge,
    Classical,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a transducer is functional (exit 0) or not (exit 1).
    Check { file: PathBuf },
    /// Compile a functional transducer into a bimachine.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "mge")]
        method: CompileMethod,
        /// Print state, transition and output-table counts.
        #[arg(long)]
        stats: bool,
    },
    /// Evaluate a bimachine on one input word.
    Run {
        bimachine: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// State counts of both constructions on the T_n family.
    BenchTn {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "both")]
        method: BenchMethod,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Largest n for the equalizer construction.
        #[arg(long, default_value_t = 8)]
        mge_limit: usize,
        /// Largest n for the classical construction.
        #[arg(long, default_value_t = 7)]
        classical_limit: usize,
    },
    /// Cross-check both compilers against the path oracle on all short words.
    Compare {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Write T_n in the transducer text format.
    GenTn {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Io(String),
    Data(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            Error::Precondition(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

/// Runs the CLI with explicit streams; returns the process exit code.
pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Io(m) => (EXIT_IO, m),
                Failure::Data(m) => (EXIT_DATA, m),
                Failure::Usage(m) => (EXIT_USAGE, m),
            };
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn max_states_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(MAX_STATES_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{MAX_STATES_VAR} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_transducer(path: &Path, stderr_warnings: &mut Vec<String>) -> Result<Transducer, Failure> {
    let text = read(path)?;
    let file = parse_transducer(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    stderr_warnings.extend(file.warnings);
    Ok(file.transducer)
}

fn out(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let options = CompileOptions {
        max_states: max_states_from_env()?,
        ..CompileOptions::default()
    };
    let mut warnings = Vec::new();
    match command {
        Command::Check { file } => {
            let t = load_transducer(&file, &mut warnings)?;
            let verdict = test_functionality(&t)?;
            match verdict.witness() {
                None => {
                    out(stdout, "functional\n")?;
                    Ok(EXIT_OK)
                }
                Some(w) => {
                    out(stdout, &format!("not functional: {w}\n"))?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Compile {
            file,
            output,
            method,
            stats,
        } => {
            let t = load_transducer(&file, &mut warnings)?;
            let compiled = match method {
                CompileMethod::Mge => {
                    let verdict = test_functionality(&t)?;
                    if let Some(w) = verdict.witness() {
                        out(stdout, &format!("not functional: {w}\n"))?;
                        return Ok(EXIT_FAIL);
                    }
                    compile_verdict(&verdict, &options)?
                }
                CompileMethod::Classical => classical_compile(&t, &options)?,
            };
            write_file(&output, &write_bimachine(&compiled.bimachine))?;
            if stats {
                out(stdout, &render_stats(&compiled))?;
            }
            Ok(EXIT_OK)
        }
        Command::Run { bimachine, input } => {
            let text = read(&bimachine)?;
            let b = parse_bimachine(&text).map_err(|e| Failure::Data(format!("{}: {e}", bimachine.display())))?;
            let word = b
                .alphabet()
                .tokenize(&input)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            match b.evaluate(&word)? {
                Some(v) => {
                    out(stdout, &format!("{}\n", b.monoid().display(&v)))?;
                    Ok(EXIT_OK)
                }
                None => {
                    out(stdout, "UNDEFINED\n")?;
                    Ok(EXIT_UNDEFINED)
                }
            }
        }
        Command::BenchTn {
            max_n,
            method,
            format,
            mge_limit,
            classical_limit,
        } => {
            let methods: &[Method] = match method {
                BenchMethod::Mge => &[Method::Mge],
                BenchMethod::Classical => &[Method::Classical],
                BenchMethod::Both => &[Method::Mge, Method::Classical],
            };
            let limits = BenchLimits {
                mge: mge_limit,
                classical: classical_limit,
                max_states: options.max_states,
            };
            let report = run_bench(max_n, methods, &limits)?;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Table => report.to_table(),
            };
            out(stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Compare { file, max_len } => {
            let t = load_transducer(&file, &mut warnings)?;
            compare(&t, max_len, &options, stdout)
        }
        Command::GenTn { n, output } => {
            let t = make_tn(n)?;
            let text = write_transducer(&t);
            match output {
                Some(path) => write_file(&path, &text)?,
                None => out(stdout, &text)?,
            }
            Ok(EXIT_OK)
        }
    }
    .inspect(|_| {
        for w in &warnings {
            log::warn!("{w}");
        }
    })
}

fn render_stats(c: &Compiled) -> String {
    let s = &c.stats;
    let mut text = format!(
        "left_states {}\nright_states {}\nleft_transitions {}\nright_transitions {}\npsi_entries {}\n",
        s.left_states, s.right_states, s.left_transitions, s.right_transitions, s.psi_entries
    );
    if let Some(k) = s.intermediate_states {
        text.push_str(&format!("intermediate_states {k}\n"));
    }
    text
}

/// All words over the alphabet up to `max_len`, shortest first.
pub fn words_up_to(symbols: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for a in 0..symbols {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn compare(t: &Transducer, max_len: usize, options: &CompileOptions, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let verdict = test_functionality(t)?;
    if let Some(w) = verdict.witness() {
        out(stdout, &format!("not functional: {w}\n"))?;
        return Ok(EXIT_FAIL);
    }
    let mge = compile(t, options)?;
    let classical = match check_pseudo_deterministic(t) {
        Ok(true) => Some(classical_compile(t, options)?),
        _ => None,
    };
    let mut mismatches = 0usize;
    let words = words_up_to(t.alphabet().len(), max_len);
    for word in &words {
        let expected: BTreeSet<_> = enumerate_outputs(t, word, default_path_bound(t, word.len()));
        let expected = expected.into_iter().next();
        let mut check = |name: &str, c: &Compiled| -> Result<(), Failure> {
            let got = c.bimachine.evaluate(word)?;
            if got != expected {
                mismatches += 1;
                let show = |v: &Option<_>| match v {
                    Some(v) => t.monoid().display(v).to_string(),
                    None => "UNDEFINED".into(),
                };
                out(
                    stdout,
                    &format!(
                        "mismatch {name} on `{}`: expected {}, got {}\n",
                        t.alphabet().render(word),
                        show(&expected),
                        show(&got)
                    ),
                )?;
            }
            Ok(())
        };
        check("mge", &mge)?;
        if let Some(c) = &classical {
            check("classical", c)?;
        }
    }
    let methods = if classical.is_some() { "mge, classical" } else { "mge" };
    out(
        stdout,
        &format!(
            "compared {} words up to length {max_len} ({methods}): {mismatches} mismatches\n",
            words.len()
        ),
    )?;
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FAIL })
}
