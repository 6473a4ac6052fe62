use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use tvhp_cli::registry::grid;
use tvhp_cli::{parse_complex, table, BatchSettings, Case, IdentityId, RunStatus, VerificationReport, REPORT_SCHEMA};
use tvhp_core::boson::{antinormal_order, normal_order, OperatorWord};
use tvhp_core::hermite::hermite_eval;

#[derive(Parser)]
#[command(name = "tvhp", version, about = "Verify two-variable Hermite polynomial identities")]
struct Cli {
    /// Default output format; `--json` on a subcommand overrides it.
    #[arg(long, global = true, env = "TVHP_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients of H_{m,n} as (j, k, numerator, denominator) rows.
    Coeffs {
        m: u32,
        n: u32,
        #[arg(long)]
        json: bool,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Evaluate H_{m,n}(u, v); `v` defaults to the conjugate of `--xi`.
    Eval {
        m: u32,
        n: u32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        xi: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        v: Option<Complex64>,
        #[arg(long)]
        json: bool,
    },
    /// Check one registry identity at one parameter point.
    Verify(VerifyArgs),
    /// Check every registry identity over its default grid.
    VerifyAll {
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        cutoff: Option<u32>,
        #[arg(long)]
        quad_order: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Normal (or antinormal) order an operator word such as "(1/2) a b+^2 a+".
    Order {
        word: String,
        #[arg(long)]
        antinormal: bool,
    },
    /// Print the JSON schema of the report array.
    Schema,
    /// List registry identities.
    List,
}

#[derive(Args)]
struct VerifyArgs {
    id: String,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    t: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    t_prime: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    s: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    y: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    xp: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    yp: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    xi: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    eta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    f: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    g: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Series truncation order.
    #[arg(long)]
    order: Option<u32>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    basis_max: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
}

impl VerifyArgs {
    fn case(&self) -> Case {
        let d = Case::default();
        Case {
            m: self.m.unwrap_or(d.m),
            n: self.n.unwrap_or(d.n),
            t: self.t.unwrap_or(d.t),
            t_prime: self.t_prime.unwrap_or(d.t_prime),
            s: self.s.unwrap_or(d.s),
            x: self.x.unwrap_or(d.x),
            y: self.y.unwrap_or(d.y),
            xp: self.xp.unwrap_or(d.xp),
            yp: self.yp.unwrap_or(d.yp),
            xi: self.xi.unwrap_or(d.xi),
            alpha: self.alpha.unwrap_or(d.alpha),
            eta: self.eta.unwrap_or(d.eta),
            f: self.f.unwrap_or(d.f),
            g: self.g.unwrap_or(d.g),
            tau: self.tau.unwrap_or(d.tau),
            order: self.order.or(d.order),
            cutoff: self.cutoff.unwrap_or(d.cutoff),
            quad_order: self.quad_order.or(d.quad_order),
            max_degree: self.max_degree.unwrap_or(d.max_degree),
            basis_max: self.basis_max.unwrap_or(d.basis_max),
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn emit_reports(reports: &[VerificationReport], json: bool) {
    let mut out = std::io::stdout().lock();
    if json {
        let text = serde_json::to_string_pretty(reports).expect("reports serialize");
        let _ = writeln!(out, "{text}");
    } else {
        for r in reports {
            let _ = writeln!(out, "{}", r.to_text());
        }
        let passed = reports.iter().filter(|r| r.passed()).count();
        let _ = writeln!(out, "{passed}/{} passed", reports.len());
    }
}

fn verdict_code(reports: &[VerificationReport]) -> ExitCode {
    if reports.iter().all(VerificationReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_default = cli.format == Format::Json;
    match cli.command {
        Command::Coeffs { m, n, json, csv } => {
            let rows = table::coefficient_rows(m, n);
            if csv {
                print!("{}", table::to_csv(&rows));
            } else if json || json_default {
                println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
            } else {
                print!("{}", table::to_text(&rows));
            }
            ExitCode::SUCCESS
        }
        Command::Eval { m, n, xi, v, json } => {
            let v = v.unwrap_or_else(|| xi.conj());
            let h = hermite_eval(m, n, xi, v);
            if json || json_default {
                let value = serde_json::json!({
                    "m": m, "n": n, "u": [xi.re, xi.im], "v": [v.re, v.im], "value": [h.re, h.im]
                });
                println!("{value}");
            } else {
                println!("{:.17e} {:.17e}", h.re, h.im);
            }
            ExitCode::SUCCESS
        }
        Command::Verify(args) => {
            let Some(id) = IdentityId::from_key(&args.id) else {
                let keys: Vec<_> = IdentityId::ALL.iter().map(|i| i.key()).collect();
                return usage_error(format!("unknown identity '{}'; expected one of: {}", args.id, keys.join(", ")));
            };
            let case = args.case();
            let (report, status) = tvhp_cli::verify_one(id, &case, args.tol);
            emit_reports(std::slice::from_ref(&report), args.json || json_default);
            match status {
                RunStatus::DomainError => ExitCode::from(EXIT_USAGE),
                RunStatus::Completed => verdict_code(std::slice::from_ref(&report)),
            }
        }
        Command::VerifyAll { tol, max_degree, cutoff, quad_order, json } => {
            let settings = BatchSettings { tol, max_degree, cutoff, quad_order };
            let reports = tvhp_cli::verify_all(&settings);
            emit_reports(&reports, json || json_default);
            verdict_code(&reports)
        }
        Command::Order { word, antinormal } => match word.parse::<OperatorWord>() {
            Ok(w) => {
                let poly = if antinormal { antinormal_order(&w) } else { normal_order(&w) };
                println!("{poly}");
                ExitCode::SUCCESS
            }
            Err(e) => usage_error(e),
        },
        Command::Schema => {
            print!("{REPORT_SCHEMA}");
            ExitCode::SUCCESS
        }
        Command::List => {
            for id in IdentityId::ALL {
                let (cases, _) = grid(id, &BatchSettings::default());
                println!("{:<22} {:<14} {} default cases", id.key(), id.module(), cases.len());
            }
            ExitCode::SUCCESS
        }
    }
}

