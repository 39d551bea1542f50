use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ffext::*;
use ffext_cli::report::{write_csv, write_json_value, write_table, Report};
use ffext_cli::suites::{self, modulus_string, Route, Suite};

#[derive(Parser)]
#[command(
    name = "ffext",
    version,
    about = "Exact convolution tables, sharp extension constants and extremizer checks over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Count,
    Fourier,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Convolutions,
    Theorems,
    Theorem6,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Phase,
    Complex,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a k-fold convolution table with the closed-form diff when known.
    Convolve {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Sharp constant vs the constant-function ratio.
    Constant {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        exponent: u32,
    },
    /// Evaluate one member of the explicit maximizer family.
    Maximizer {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Element index of the parameter a.
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
        /// Nonzero complex scale, as "re,im".
        #[arg(long, default_value = "1,0")]
        lambda: String,
    },
    /// Run a verification suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 13)]
        max_q: u32,
        /// Corrupt one predicted constant (failure-path testing).
        #[arg(long, hide = true, default_value_t = false)]
        inject_fault: bool,
    },
    /// Projected gradient ascent on the extension ratio.
    Search {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        exponent: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Phase)]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        restarts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn arg_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_surface(name: &str, allowed: &[SurfaceKind]) -> std::result::Result<SurfaceKind, String> {
    let kind = SurfaceKind::parse(name)
        .ok_or_else(|| format!("unknown surface '{name}'"))?;
    if !allowed.contains(&kind) {
        return Err(format!(
            "surface '{name}' is not supported here (expected one of: {})",
            allowed
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    Ok(kind)
}

fn build_surface(kind: SurfaceKind, p: u32, n: u32) -> std::result::Result<SurfaceSpec, String> {
    let field = make_field(p, n).map_err(|e| e.to_string())?;
    SurfaceSpec::new(kind, Arc::new(field)).map_err(|e| e.to_string())
}

fn emit(report: &Report, format: FormatArg) {
    match format {
        FormatArg::Json => {
            let mut out = String::new();
            write_json_value(&report.to_json(), 0, &mut out);
            println!("{out}");
        }
        FormatArg::Csv => print!("{}", write_csv(report)),
        FormatArg::Table => print!("{}", write_table(report)),
    }
}

fn finish(report: Report, format: FormatArg) -> ExitCode {
    let ok = report.all_pass();
    emit(&report, format);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    match cli.command {
        Cmd::Convolve {
            surface,
            p,
            n,
            k,
            route,
            format,
        } => {
            let allowed = [
                SurfaceKind::P1,
                SurfaceKind::P2,
                SurfaceKind::H2,
                SurfaceKind::Gamma3,
                SurfaceKind::Gamma3Full,
                SurfaceKind::Upsilon3Full,
            ];
            let kind = match parse_surface(&surface, &allowed) {
                Ok(k) => k,
                Err(e) => return arg_error(&e),
            };
            if !(1..=3).contains(&k) {
                return arg_error("k must be 1, 2 or 3");
            }
            let s = match build_surface(kind, p, n) {
                Ok(s) => s,
                Err(e) => return arg_error(&e),
            };
            let route = match route {
                RouteArg::Count => Route::Count,
                RouteArg::Fourier => Route::Fourier,
                RouteArg::Both => Route::Both,
            };
            let results = match suites::convolve_rows(&s, k, route) {
                Ok(r) => r,
                Err(e) => return arg_error(&e.to_string()),
            };
            let report = Report {
                command,
                p,
                n,
                q: s.q(),
                modulus: modulus_string(s.field()),
                surface: Some(kind.name().into()),
                results,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
            finish(report, format)
        }
        Cmd::Constant {
            surface,
            p,
            n,
            exponent,
        } => {
            let allowed = [
                SurfaceKind::P1,
                SurfaceKind::P2,
                SurfaceKind::H2,
                SurfaceKind::Gamma3,
            ];
            let kind = match parse_surface(&surface, &allowed) {
                Ok(k) => k,
                Err(e) => return arg_error(&e),
            };
            if !matches!(exponent, 4 | 6) {
                return arg_error("exponent must be 4 or 6");
            }
            let s = match build_surface(kind, p, n) {
                Ok(s) => s,
                Err(e) => return arg_error(&e),
            };
            let results = match suites::constant_rows(&s, exponent) {
                Ok(r) => r,
                Err(e) => return arg_error(&e.to_string()),
            };
            let report = Report {
                command,
                p,
                n,
                q: s.q(),
                modulus: modulus_string(s.field()),
                surface: Some(kind.name().into()),
                results,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
            finish(report, FormatArg::Json)
        }
        Cmd::Maximizer {
            surface,
            p,
            n,
            a,
            b,
            c,
            lambda,
        } => {
            let kind = match parse_surface(&surface, &[SurfaceKind::P2, SurfaceKind::H2]) {
                Ok(k) => k,
                Err(e) => return arg_error(&e),
            };
            let s = match build_surface(kind, p, n) {
                Ok(s) => s,
                Err(e) => return arg_error(&e),
            };
            let lambda = {
                let parts: Vec<&str> = lambda.split(',').collect();
                let parsed = (parts.len() == 2)
                    .then(|| {
                        Some(Complex64::new(
                            parts[0].trim().parse::<f64>().ok()?,
                            parts[1].trim().parse::<f64>().ok()?,
                        ))
                    })
                    .flatten();
                match parsed {
                    Some(l) => l,
                    None => return arg_error("lambda must be of the form 're,im'"),
                }
            };
            let f = s.field().clone();
            if a >= f.q() || b >= f.q() || c >= f.q() {
                return arg_error("a, b, c must be element indices below q");
            }
            let params = MaximizerParams {
                lambda,
                a: f.element(a),
                b: f.element(b),
                c: f.element(c),
            };
            let results = match suites::maximizer_rows(&s, &params) {
                Ok(r) => r,
                Err(e) => return arg_error(&e.to_string()),
            };
            let report = Report {
                command,
                p,
                n,
                q: s.q(),
                modulus: modulus_string(s.field()),
                surface: Some(kind.name().into()),
                results,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
            finish(report, FormatArg::Json)
        }
        Cmd::Verify {
            suite,
            max_q,
            inject_fault,
        } => {
            let suite = match suite {
                SuiteArg::Lemmas => Suite::Lemmas,
                SuiteArg::Convolutions => Suite::Convolutions,
                SuiteArg::Theorems => Suite::Theorems,
                SuiteArg::Theorem6 => Suite::Theorem6,
                SuiteArg::All => Suite::All,
            };
            let results = suites::verify_rows(suite, max_q, inject_fault);
            let report = Report {
                command,
                p: 0,
                n: 0,
                q: 0,
                modulus: String::new(),
                surface: None,
                results,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
            finish(report, FormatArg::Json)
        }
        Cmd::Search {
            surface,
            p,
            n,
            exponent,
            mode,
            restarts,
            seed,
        } => {
            let allowed = [
                SurfaceKind::P1,
                SurfaceKind::P2,
                SurfaceKind::H2,
                SurfaceKind::Gamma3,
                SurfaceKind::Gamma3Full,
                SurfaceKind::Upsilon3,
                SurfaceKind::Upsilon3Full,
            ];
            let kind = match parse_surface(&surface, &allowed) {
                Ok(k) => k,
                Err(e) => return arg_error(&e),
            };
            if !matches!(exponent, 4 | 6) {
                return arg_error("exponent must be 4 or 6");
            }
            let s = match build_surface(kind, p, n) {
                Ok(s) => s,
                Err(e) => return arg_error(&e),
            };
            let config = SearchConfig {
                mode: match mode {
                    ModeArg::Phase => SearchMode::PhaseOnly,
                    ModeArg::Complex => SearchMode::FullComplex,
                },
                steps: 150,
                step_size: 0.3,
                restarts,
                seed,
            };
            let results = match suites::search_rows(&s, exponent, &config) {
                Ok(r) => r,
                Err(e) => return arg_error(&e.to_string()),
            };
            let report = Report {
                command,
                p,
                n,
                q: s.q(),
                modulus: modulus_string(s.field()),
                surface: Some(kind.name().into()),
                results,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
            finish(report, FormatArg::Json)
        }
    }
}
