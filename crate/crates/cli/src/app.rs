//! Argument parsing and command dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orbitforge::maps::{conjugacy_of_quad, lattice_check};
use orbitforge::modular::{max_cycle_scan, scan_csv, ModulusRange, ScanRow};
use orbitforge::oracle::{cross_check_grid, iterate_with_escape};
use orbitforge::{classify, Error, Int, IntegerMap, PowerMap, QuadMap, Rat, RationalPoly};

use crate::curves::{curve_points, curves_csv, curves_json, curves_svg, curves_table};
use crate::grid::{parse_grid, parse_range_u64};
use crate::render::{
    classification_table, cross_check_csv, cross_check_json, cross_check_summary,
    cross_check_table, trace_json, trace_table, ClassificationDoc, MapDoc,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DISAGREE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

const DEFAULT_CAP: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Power,
    Quad,
}

#[derive(Debug, Parser)]
#[command(
    name = "orbitforge",
    version,
    about = "Periodic integer orbits of x^m - k and ax^2 + bx + c"
)]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for grid commands.
    #[arg(long, global = true, env = "ORBITFORGE_WORKERS",
          value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Iteration cap for orbit traces.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every periodic integer orbit of one map.
    Classify(MapArgs),
    /// Iterate one seed until it cycles or provably escapes.
    Orbit(OrbitArgs),
    /// Cross-check the classifier against brute force over a grid.
    Oracle(OracleArgs),
    /// Bounding curves of the window [gamma, beta] for x^2 - k.
    Bounds(BoundsArgs),
    /// Cycle structure modulo M over a range of moduli.
    Modscan(ModscanArgs),
    /// Test whether a rational polynomial preserves lZ.
    Latticecheck(LatticeArgs),
    /// Conjugacy of ax^2 + bx + c to x^2 - q.
    Conjugate(ConjugateArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(value_enum)]
    pub family: FamilyArg,
    /// `m k` for power, `a b c` for quad.
    #[arg(required = true, num_args = 2..=3, allow_negative_numbers = true)]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub seed: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub family: FamilyArg,
    /// Degrees, e.g. `2` or `4,6,8`.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Grid of integer k.
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Evaluate at q = k - 1/4 and mark k = j^2, j^2 + 1.
    #[arg(long)]
    pub odd_b: bool,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=200))]
    pub digits: u32,
}

#[derive(Debug, Args)]
pub struct ModscanArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Moduli `lo..hi`.
    #[arg(long = "M", value_name = "RANGE")]
    pub moduli: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    /// Append completed rows here and resume from it on restart.
    #[arg(long, value_name = "PATH")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Coefficients `a0 a1 … am`, each an integer or `p/q`.
    #[arg(required = true, num_args = 3.., allow_hyphen_values = true)]
    pub coeffs: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    #[arg(allow_negative_numbers = true)]
    pub a: String,
    #[arg(allow_negative_numbers = true)]
    pub b: String,
    #[arg(allow_negative_numbers = true)]
    pub c: String,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Domain(_) | Error::Parse(_) => EXIT_USAGE,
            Error::Io(_) | Error::Checkpoint(_) => EXIT_IO,
            Error::Unsound(_) => EXIT_DISAGREE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered output plus the exit code it implies.
pub struct Output {
    pub text: String,
    pub code: u8,
}

fn ok(text: String) -> Result<Output, Failure> {
    Ok(Output {
        text,
        code: EXIT_OK,
    })
}

fn int(s: &str) -> Result<Int, Failure> {
    Int::from_str(s.trim()).map_err(|_| Failure::usage(format!("not an integer: {s:?}")))
}

fn degree(v: &Int) -> Result<u32, Failure> {
    u32::try_from(v)
        .map_err(|_| Failure::usage(format!("degree must be a positive integer, got {v}")))
}

pub fn build_map(args: &MapArgs) -> Result<IntegerMap, Failure> {
    let p = &args.params;
    match (args.family, p.len()) {
        (FamilyArg::Power, 2) => Ok(PowerMap::new(degree(&int(&p[0])?)?, int(&p[1])?)?.into()),
        (FamilyArg::Quad, 3) => Ok(QuadMap::new(int(&p[0])?, int(&p[1])?, int(&p[2])?)?.into()),
        (FamilyArg::Power, n) => Err(Failure::usage(format!("power takes m k, got {n} values"))),
        (FamilyArg::Quad, n) => Err(Failure::usage(format!("quad takes a b c, got {n} values"))),
    }
}

fn grid(flag: &str, spec: &Option<String>) -> Result<Vec<Int>, Failure> {
    let spec = spec
        .as_deref()
        .ok_or_else(|| Failure::usage(format!("--{flag} is required")))?;
    parse_grid(spec).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

fn reject_format(cmd: &str, f: Format) -> Failure {
    Failure::usage(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn cmd_classify(args: &MapArgs, format: Format) -> Result<Output, Failure> {
    let map = build_map(args)?;
    let c = classify(&map)?;
    match format {
        Format::Table => ok(classification_table(&map, &c)),
        Format::Json => ok(ClassificationDoc::new(&map, &c).to_json()),
        f => Err(reject_format("classify", f)),
    }
}

fn cmd_orbit(args: &OrbitArgs, cap: u64, format: Format) -> Result<Output, Failure> {
    let map = build_map(&args.map)?;
    let seed = int(&args.seed)?;
    let cap = usize::try_from(cap).map_err(|_| Failure::usage("cap too large"))?;
    let trace = iterate_with_escape(&map, &seed, cap)?;
    match format {
        Format::Table => ok(trace_table(&map, &trace)),
        Format::Json => ok(trace_json(&map, &trace)),
        f => Err(reject_format("orbit", f)),
    }
}

fn oracle_maps(args: &OracleArgs) -> Result<(Vec<IntegerMap>, usize), Failure> {
    let mut maps = Vec::new();
    let mut skipped = 0;
    match args.family {
        FamilyArg::Power => {
            if args.a.is_some() || args.b.is_some() || args.c.is_some() {
                return Err(Failure::usage("power grids take --m and --k"));
            }
            let ks = grid("k", &args.k)?;
            for m in grid("m", &args.m)? {
                let m = degree(&m)?;
                for k in &ks {
                    maps.push(PowerMap::new(m, k.clone())?.into());
                }
            }
        }
        FamilyArg::Quad => {
            if args.m.is_some() || args.k.is_some() {
                return Err(Failure::usage("quad grids take --a, --b and --c"));
            }
            let (bs, cs) = (grid("b", &args.b)?, grid("c", &args.c)?);
            for a in grid("a", &args.a)? {
                if a == Int::from(0) {
                    skipped += bs.len() * cs.len();
                    continue;
                }
                for b in &bs {
                    for c in &cs {
                        maps.push(QuadMap::new(a.clone(), b.clone(), c.clone())?.into());
                    }
                }
            }
        }
    }
    Ok((maps, skipped))
}

fn cmd_oracle(args: &OracleArgs, format: Format) -> Result<Output, Failure> {
    let (maps, skipped) = oracle_maps(args)?;
    let checks = cross_check_grid(&maps)?;
    let code = if checks.iter().all(|c| c.agree) {
        EXIT_OK
    } else {
        EXIT_DISAGREE
    };
    let text = match format {
        Format::Table => cross_check_table(&checks, skipped),
        Format::Json => cross_check_json(&checks, skipped),
        Format::Csv => cross_check_csv(&checks),
        f => return Err(reject_format("oracle", f)),
    };
    if code != EXIT_OK {
        eprintln!("{}", cross_check_summary(&checks, skipped));
    }
    Ok(Output { text, code })
}

fn cmd_bounds(args: &BoundsArgs, format: Format) -> Result<Output, Failure> {
    let ks = parse_grid(&args.k).map_err(|e| Failure::usage(format!("--k: {e}")))?;
    if ks.iter().any(|k| k < &Int::from(0)) {
        return Err(Failure::usage("bounds need k >= 0"));
    }
    let points = curve_points(&ks, args.odd_b, args.digits)?;
    match format {
        Format::Table => ok(curves_table(&points, args.odd_b)),
        Format::Csv => ok(curves_csv(&points, args.odd_b)),
        Format::Svg => ok(curves_svg(&points, args.odd_b)),
        Format::Json => ok(curves_json(&points)),
    }
}

fn scan_table(rows: &[ScanRow]) -> String {
    let mut out = format!(
        "{:>10}  {:>9}  {:>7}  {:>10}  {:>8}  {:>10}\n",
        "modulus", "max_cycle", "cycles", "on_cycles", "max_tail", "seconds"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>10}  {:>9}  {:>7}  {:>10}  {:>8}  {:>10.3}\n",
            r.modulus,
            r.max_cycle_length,
            r.cycle_count,
            r.nodes_on_cycles,
            r.max_tail_length,
            r.elapsed.as_secs_f64()
        ));
    }
    out
}

fn cmd_modscan(args: &ModscanArgs, format: Format) -> Result<Output, Failure> {
    let map = build_map(&args.map)?;
    let (lo, hi) =
        parse_range_u64(&args.moduli).map_err(|e| Failure::usage(format!("--M: {e}")))?;
    let range = ModulusRange::new(lo, hi, args.stride)?;
    let rows = max_cycle_scan(&map, &range, args.checkpoint.as_deref())?;
    match format {
        Format::Csv => ok(scan_csv(&rows)),
        Format::Table => ok(scan_table(&rows)),
        Format::Json => {
            let docs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "modulus": r.modulus,
                        "max_cycle_length": r.max_cycle_length,
                        "cycle_count": r.cycle_count,
                        "nodes_on_cycles": r.nodes_on_cycles,
                        "max_tail_length": r.max_tail_length,
                    })
                })
                .collect();
            let doc = serde_json::json!({ "map": MapDoc::new(&map), "rows": docs });
            ok(serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n")
        }
        f => Err(reject_format("modscan", f)),
    }
}

fn cmd_latticecheck(args: &LatticeArgs, format: Format) -> Result<Output, Failure> {
    let poly = RationalPoly::parse(&args.coeffs)?;
    let cert = lattice_check(&poly)?;
    let mut orbit = Vec::new();
    if cert.holds {
        let mut x = Rat::from_integer(cert.l.clone());
        orbit.push(x.clone());
        for _ in 0..args.steps {
            x = poly.eval(&x);
            orbit.push(x.clone());
        }
    }
    let orbit: Vec<String> = orbit.iter().map(Rat::to_string).collect();
    match format {
        Format::Table => {
            let mut out = format!(
                "P(x):    {poly}\nl:       {}\nholds:   {}\nreason:  {}\n",
                cert.l,
                if cert.holds { "yes" } else { "no" },
                cert.reason
            );
            if cert.holds {
                out.push_str(&format!("orbit:   {}\n", orbit.join(", ")));
            }
            ok(out)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "poly": poly.to_string(),
                "l": cert.l.to_string(),
                "holds": cert.holds,
                "reason": cert.reason,
                "orbit": orbit,
            });
            ok(serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n")
        }
        f => Err(reject_format("latticecheck", f)),
    }
}

fn cmd_conjugate(args: &ConjugateArgs, format: Format) -> Result<Output, Failure> {
    let quad = QuadMap::new(int(&args.a)?, int(&args.b)?, int(&args.c)?)?;
    let conj = conjugacy_of_quad(&quad);
    match format {
        Format::Table => ok(format!(
            "map:      {quad}\nr = {} s + {}\nq:        {}\nconjugate: x^2 - ({})\n",
            conj.scale, conj.offset, conj.q, conj.q
        )),
        Format::Json => {
            let doc = serde_json::json!({
                "map": MapDoc::new(&quad.clone().into()),
                "scale": conj.scale.to_string(),
                "offset": conj.offset.to_string(),
                "q": conj.q.to_string(),
            });
            ok(serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n")
        }
        f => Err(reject_format("conjugate", f)),
    }
}

pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Classify(a) => cmd_classify(a, fmt(Format::Table)),
        Command::Orbit(a) => cmd_orbit(a, cli.cap.unwrap_or(DEFAULT_CAP), fmt(Format::Table)),
        Command::Oracle(a) => cmd_oracle(a, fmt(Format::Table)),
        Command::Bounds(a) => cmd_bounds(a, fmt(Format::Csv)),
        Command::Modscan(a) => cmd_modscan(a, fmt(Format::Csv)),
        Command::Latticecheck(a) => cmd_latticecheck(a, fmt(Format::Table)),
        Command::Conjugate(a) => cmd_conjugate(a, fmt(Format::Table)),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };

    let result = match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
        {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Failure {
                code: EXIT_IO,
                message: e.to_string(),
            }),
        },
        None => execute(&cli),
    };

    match result {
        Ok(output) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &output.text),
                None => stdout.write_all(output.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_IO;
            }
            output.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
