use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vfrep::dimmonoid::{enumerate, euler_form, shift_exponent, Correction};
use vfrep::exactalg::Poly;
use vfrep::fforacle::{self, OracleError, PresentationData};
use vfrep::groupgraph::{GraphError, GraphOfGroups};
use vfrep::series::{self, epoly_and_euler, CountingTable, Engine, Kind, Options, PipelineError};

#[derive(Parser)]
#[command(name = "vfrep", version, about = "Counting polynomials for representations of virtually free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counting polynomials per dimension vector or per total dimension.
    Count {
        #[arg(long)]
        group: String,
        #[arg(long)]
        max_dim: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Ss)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = By::Dimvector)]
        by: By,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = EngineArg::Modular)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = CorrectionArg::Standard)]
        correction: CorrectionArg,
    },
    /// Dimension vectors of a given total dimension with their invariants.
    Monoid {
        #[arg(long)]
        group: String,
        #[arg(long)]
        dim: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// E-polynomials and Euler characteristics of the semisimple counts.
    Epoly {
        #[arg(long)]
        group: String,
        #[arg(long)]
        max_dim: u32,
        #[arg(long, value_enum, default_value_t = By::Total)]
        by: By,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare a brute-force count over F_q with the pipeline.
    Oracle {
        #[arg(long)]
        group: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Check::Hom)]
        check: Check,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Absim,
    Ss,
    Sim,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum By {
    Dimvector,
    Total,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Modular,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrectionArg {
    Standard,
    Alternate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Hom,
    Absim,
    PerVector,
}

enum Failure {
    Validation(String),
    Integrity(String),
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::NonPolynomialCoefficient { .. } | PipelineError::Integrity(_) => {
                Failure::Integrity(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Divisibility { .. } | OracleError::IrreducibleFactor(_) => Failure::Integrity(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Integrity(msg)) => {
            eprintln!("integrity error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("VFREP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("VFREP_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("VFREP_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// A preset name, or a path to a JSON graph file.
fn load_group(spec: &str) -> Result<GraphOfGroups, Failure> {
    match GraphOfGroups::preset(spec) {
        Ok(g) => Ok(g),
        Err(GraphError::UnknownPreset(_)) if Path::new(spec).is_file() => {
            let bytes = std::fs::read(spec).map_err(|e| Failure::Validation(format!("{spec}: {e}")))?;
            Ok(GraphOfGroups::load_named(spec, &bytes)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Count { group, max_dim, kind, by, format, engine, correction } => {
            let g = load_group(&group)?;
            let opts = Options {
                engine: match engine {
                    EngineArg::Modular => Engine::Modular,
                    EngineArg::Exact => Engine::Exact,
                },
                correction: match correction {
                    CorrectionArg::Standard => Correction::Standard,
                    CorrectionArg::Alternate => Correction::Alternate,
                },
            };
            let counts = series::compute_counts(&g, max_dim, &opts)?;
            let kinds = match kind {
                KindArg::Absim => vec![Kind::Absim],
                KindArg::Ss => vec![Kind::Ss],
                KindArg::Sim => vec![Kind::Sim],
                KindArg::All => vec![Kind::Absim, Kind::Ss, Kind::Sim],
            };
            let tables: Vec<CountingTable> =
                kinds.iter().map(|&k| CountingTable::from_counts(&g.name, &counts, k)).collect();
            Ok(render_tables(&tables, by == By::Total, format))
        }
        Command::Monoid { group, dim, format } => {
            let g = load_group(&group)?;
            cmd_monoid(&g, dim, format)
        }
        Command::Epoly { group, max_dim, by, format } => {
            let g = load_group(&group)?;
            let counts = series::compute_counts(&g, max_dim, &Options::default())?;
            let table = CountingTable::from_counts(&g.name, &counts, Kind::Ss);
            Ok(render_epoly(&table, by == By::Total, format))
        }
        Command::Oracle { group, dim, q, check } => cmd_oracle(&group, dim, q, check),
    }
}

fn render_tables(tables: &[CountingTable], by_total: bool, format: Format) -> String {
    if format == Format::Json {
        let v = if tables.len() == 1 {
            tables[0].to_json()
        } else {
            Value::Object(tables.iter().map(|t| (t.kind.name().to_string(), t.to_json())).collect())
        };
        return format!("{}\n", serde_json::to_string_pretty(&v).unwrap());
    }
    let multi = tables.len() > 1;
    let mut out = String::new();
    for t in tables {
        if multi {
            let _ = writeln!(out, "{} {}", if format == Format::Latex { "%" } else { "#" }, t.kind.name());
        }
        out.push_str(&match format {
            Format::Text => t.render_text(by_total),
            Format::Csv => t.render_csv(by_total),
            _ => t.render_latex(by_total),
        });
    }
    out
}

fn cmd_monoid(g: &GraphOfGroups, dim: u32, format: Format) -> Result<String, Failure> {
    let mut rows = Vec::new();
    for m in enumerate(g, dim) {
        let shift = shift_exponent(&m, Correction::Standard).map_err(|e| Failure::Integrity(e.to_string()))?;
        let gcd = m.gcd_div().map_or(0, |(c, _)| c);
        rows.push((m.to_string(), euler_form(&m, &m), shift, gcd));
    }
    let mut out = String::new();
    match format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(m, e, s, c)| json!({"dimvector": m, "euler_form": e, "shift_exponent": s, "gcd": c}))
                .collect();
            out = format!("{}\n", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Text => {
            for (m, e, s, c) in &rows {
                let _ = writeln!(out, "{m}  euler={e}  shift={s}  gcd={c}");
            }
        }
        Format::Csv => {
            out.push_str("dimvector,euler_form,shift_exponent,gcd\n");
            for (m, e, s, c) in &rows {
                let _ = writeln!(out, "\"{m}\",{e},{s},{c}");
            }
        }
        Format::Latex => {
            out.push_str("\\begin{tabular}{|c|c|c|c|}\n\\hline\n$m$ & $\\langle m,m\\rangle$ & $e(m)$ & $\\gcd$\n\\\\\\hline\n");
            for (m, e, s, c) in &rows {
                let _ = writeln!(out, "${m}$ & ${e}$ & ${s}$ & ${c}$\n\\\\\\hline");
            }
            out.push_str("\\end{tabular}\n");
        }
    }
    Ok(out)
}

fn render_epoly(table: &CountingTable, by_total: bool, format: Format) -> String {
    let rows = epoly_and_euler(table, by_total);
    let head = if by_total { "d" } else { "dimvector" };
    let mut out = String::new();
    match format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| json!({head: r.label, "epoly": r.epoly, "euler": r.euler.to_string()}))
                .collect();
            out = format!("{}\n", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Text => {
            for r in &rows {
                let _ = writeln!(out, "{}: E={}  chi={}", r.label, r.epoly, r.euler);
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "{head},epoly,euler");
            for r in &rows {
                let _ = writeln!(out, "\"{}\",{},{}", r.label, r.epoly, r.euler);
            }
        }
        Format::Latex => {
            out.push_str("\\begin{tabular}{|c|c|c|}\n\\hline\n");
            let _ = writeln!(out, "${}$ & $E$ & $\\chi$\n\\\\\\hline", if by_total { "d" } else { "m" });
            for r in &rows {
                let _ = writeln!(out, "${}$ & ${}$ & ${}$\n\\\\\\hline", r.label, r.epoly, r.euler);
            }
            out.push_str("\\end{tabular}\n");
        }
    }
    out
}

fn cmd_oracle(group: &str, dim: usize, q: u64, check: Check) -> Result<String, Failure> {
    let p = PresentationData::preset(group)?;
    let g = p.graph().clone();
    let q_int = q as i64;
    let mut out = String::new();
    let pass = match check {
        Check::Hom => {
            let oracle = fforacle::count_hom(&p, dim, q)?;
            let pipeline = enumerate(&g, dim as u32)
                .iter()
                .fold(Poly::zero(), |acc, m| &acc + &series::rep_space_count(m));
            report(&mut out, "hom", oracle, &pipeline.eval_int(q_int).to_string())
        }
        Check::Absim => {
            let oracle = fforacle::count_absim_orbits(&p, dim, q)?;
            let counts = series::compute_counts(&g, dim as u32, &Options::default())?;
            let pipeline = counts.total(Kind::Absim, dim as u32).eval_int(q_int);
            report(&mut out, "absim", oracle, &pipeline.to_string())
        }
        Check::PerVector => {
            let census = fforacle::census(&p, dim, q)?;
            let mut all = true;
            for m in enumerate(&g, dim as u32) {
                let oracle = census.get(&m).copied().unwrap_or(0);
                let pipeline = series::rep_space_count(&m).eval_int(q_int);
                all &= report(&mut out, &m.to_string(), oracle, &pipeline.to_string());
            }
            let extra = census.keys().filter(|m| m.total_dim() != dim as u32).count();
            all && extra == 0
        }
    };
    let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Integrity(format!("oracle disagrees with pipeline for {group} at d={dim}, q={q}")))
    }
}

fn report(out: &mut String, label: &str, oracle: u64, pipeline: &str) -> bool {
    let ok = oracle.to_string() == pipeline;
    let _ = writeln!(out, "{label}: oracle={oracle} pipeline={pipeline} {}", if ok { "ok" } else { "MISMATCH" });
    ok
}
