use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crosspack::figure::figure_data;
use crosspack::packings::{construct, critical_radius, verify_packing, Construction, PackingSet};
use crosspack::region::{
    build_block_table, decomposition_check, frontier_analysis, gamma_upper_bound, occupancy_bound,
    region_diameter_check, replay_certificate, vertex_capture_check, BoundCertificate, OccupancyMode, Octant, Piece,
};
use crosspack::search::{local_search, SearchConfig};
use crosspack::table::{summary, to_csv};
use crosspack::{Error, RInterval, Rat};

const THREADS_VAR: &str = "CROSSPACK_THREADS";

#[derive(Parser)]
#[command(name = "crosspack", version, about = "Exact packings in the unit l1 cross-polytope")]
struct Cli {
    /// Worker threads; defaults to $CROSSPACK_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a named construction as PackingSet JSON.
    Construct {
        #[arg(long)]
        name: Construction,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Check that a set is an r-packing.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Rat,
    },
    /// Largest r for which the set is an r-packing.
    Radius {
        #[arg(long)]
        input: PathBuf,
    },
    /// Certified upper bound on the packing number over an interval of radii.
    Bound {
        #[arg(long)]
        interval: RInterval,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Re-check a serialized bound certificate.
    Replay {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evidence for one ingredient of the bounds.
    CertifyLemma {
        #[arg(long)]
        id: LemmaId,
        #[arg(long, conflicts_with = "interval")]
        r: Option<Rat>,
        #[arg(long)]
        interval: Option<RInterval>,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Occupied, blocked and open orthant regions of a set.
    Frontier {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Rat,
    },
    /// Annealing search followed by exact rational snapping.
    Search {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest denominator tried when snapping.
        #[arg(long, default_value_t = 12)]
        denoms: u32,
        #[arg(long, default_value_t = 50_000)]
        iters: usize,
        /// Report whether this radius was reached.
        #[arg(long)]
        target: Option<Rat>,
        /// Warm start from a PackingSet file.
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Known values and bounds of the packing number.
    Table {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Add approximate decimal endpoints.
        #[arg(long)]
        decimal: bool,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Geometry of regions and balls for external plotting.
    EmitFigure {
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        config: Option<Construction>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        r: Rat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaId {
    Capture,
    Decomposition,
    BlockingA,
    BlockingB,
    Diameter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Failure reported as JSON on stderr.
#[derive(Debug, Serialize)]
struct Failure {
    #[serde(skip)]
    code: u8,
    error: &'static str,
    message: String,
}

impl Failure {
    fn malformed(error: &'static str, message: impl Into<String>) -> Failure {
        Failure { code: 2, error, message: message.into() }
    }

    fn failed(error: &'static str, message: impl Into<String>) -> Failure {
        Failure { code: 1, error, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let kind = match &e {
            Error::DivisionByZero => "division_by_zero",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::MixedSign { .. } => "mixed_sign",
            Error::EmptyPolytope => "empty_polytope",
            Error::UnboundedPolytope => "unbounded_polytope",
            Error::InvalidInterval(_) => "invalid_interval",
            Error::Parse(_) => "parse",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidInput(_) => "invalid_input",
            Error::Containment { .. } => "containment",
            Error::Certification(_) => "certification",
            Error::Replay(_) => "replay",
        };
        let code = match e {
            Error::InvalidInterval(_)
            | Error::Parse(_)
            | Error::Unsupported(_)
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::DivisionByZero => 2,
            _ => 1,
        };
        Failure { code, error: kind, message: e.to_string() }
    }
}

/// Payload for stdout plus whether the run counts as a success.
struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, ok: bool) -> Outcome {
        let mut body = serde_json::to_string_pretty(value).expect("serializable");
        body.push('\n');
        Outcome { body, ok }
    }

    fn text(body: String) -> Outcome {
        Outcome { body, ok: true }
    }
}

fn read_set(path: &Path) -> Result<PackingSet, Failure> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Failure::malformed("io", format!("cannot read {}: {e}", path.display())))?;
    Ok(PackingSet::from_json(&raw)?)
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let count = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_VAR) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::malformed("invalid_input", format!("{THREADS_VAR}={v:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = count {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::malformed("invalid_input", e.to_string()))?;
    }
    Ok(())
}

fn certify_lemma(id: LemmaId, r: Option<Rat>, interval: Option<RInterval>, n: usize) -> Result<Outcome, Failure> {
    let need_r = || r.clone().ok_or_else(|| Failure::malformed("invalid_input", "this lemma takes --r"));
    let need_iv = || interval.clone().ok_or_else(|| Failure::malformed("invalid_input", "this lemma takes --interval"));
    match id {
        LemmaId::Capture => {
            let ev = vertex_capture_check(n, &need_r()?)?;
            let ok = ev.holds;
            Ok(Outcome::json(&ev, ok))
        }
        LemmaId::Decomposition => {
            let r = need_r()?;
            let mut items = Vec::new();
            for sign in Octant::all() {
                for piece in [Piece::Whole, Piece::Subcell(1), Piece::Subcell(2), Piece::Subcell(3)] {
                    items.push(decomposition_check(sign, piece, &r)?);
                }
            }
            let ok = items.iter().all(|e| e.matches);
            Ok(Outcome::json(&items, ok))
        }
        LemmaId::BlockingA | LemmaId::BlockingB => {
            let iv = need_iv()?;
            let mode = match id {
                LemmaId::BlockingA => OccupancyMode::WholeRegion,
                _ => OccupancyMode::PerSubcell,
            };
            let table = build_block_table(&iv, mode)?;
            let occupancy = occupancy_bound(&table, mode);
            Ok(Outcome::json(&json!({ "block_table": table, "occupancy": occupancy }), true))
        }
        LemmaId::Diameter => {
            let iv = need_iv()?;
            let ev = region_diameter_check(&iv)?;
            let occupancy = occupancy_bound(&crosspack::region::BlockTable::empty(iv), OccupancyMode::DiameterOnly);
            Ok(Outcome::json(&json!({ "diameter": ev, "occupancy": occupancy }), true))
        }
    }
}

fn table_json(n: usize, decimal: bool) -> Value {
    let rows = summary(n);
    let mut out = Vec::new();
    for row in rows {
        let mut v = serde_json::to_value(&row).expect("serializable");
        if decimal {
            let hi = row.hi.as_ref().map_or("inf".to_string(), |h| h.to_decimal_string(6));
            v["lo_approx"] = Value::String(row.lo.to_decimal_string(6));
            v["hi_approx"] = Value::String(hi);
        }
        out.push(v);
    }
    Value::Array(out)
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Construct { name, n } => {
            let mut body = construct(name, n)?.to_json();
            body.push('\n');
            Ok(Outcome::text(body))
        }
        Command::Verify { input, r } => {
            let set = read_set(&input)?;
            let report = verify_packing(&set, &r);
            let ok = report.is_packing();
            Ok(Outcome::json(&report, ok))
        }
        Command::Radius { input } => {
            let set = read_set(&input)?;
            Ok(Outcome::text(format!("{}\n", critical_radius(&set)?)))
        }
        Command::Bound { interval, n } => {
            let cert = gamma_upper_bound(&interval, n)?;
            Ok(Outcome::json(&cert, true))
        }
        Command::Replay { input } => {
            let raw = fs::read_to_string(&input)
                .map_err(|e| Failure::malformed("io", format!("cannot read {}: {e}", input.display())))?;
            let cert: BoundCertificate =
                serde_json::from_str(&raw).map_err(|e| Failure::malformed("parse", e.to_string()))?;
            replay_certificate(&cert)?;
            Ok(Outcome::json(&json!({ "replayed": true, "interval": cert.interval, "total": cert.total }), true))
        }
        Command::CertifyLemma { id, r, interval, n } => certify_lemma(id, r, interval, n),
        Command::Frontier { input, r } => {
            let set = read_set(&input)?;
            Ok(Outcome::json(&frontier_analysis(&set, &r)?, true))
        }
        Command::Search { dim, k, restarts, seed, denoms, iters, target, initial } => {
            let mut config = SearchConfig::new(dim, k);
            config.restarts = restarts;
            config.seed = seed;
            config.denominator_bound = denoms;
            config.max_iters = iters;
            config.target_radius = target;
            config.initial = initial.as_deref().map(read_set).transpose()?;
            let result = local_search(&config)?;
            let ok = result.certified_radius.is_some() && result.reached_target != Some(false);
            Ok(Outcome::json(&result, ok))
        }
        Command::Table { format, decimal, n } => match format {
            Format::Csv => Ok(Outcome::text(to_csv(&summary(n), decimal))),
            Format::Json => Ok(Outcome::json(&table_json(n, decimal), true)),
        },
        Command::EmitFigure { config, input, n, r } => {
            let set = match (config, input) {
                (Some(name), _) => construct(name, n)?,
                (None, Some(path)) => read_set(&path)?,
                (None, None) => return Err(Failure::malformed("invalid_input", "need --config or --input")),
            };
            Ok(Outcome::json(&figure_data(&set, &r)?, true))
        }
    }
}

fn report(f: &Failure) -> ExitCode {
    eprintln!("{}", serde_json::to_string(f).expect("serializable"));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let message = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            return report(&Failure::malformed("usage", message));
        }
    };
    if let Err(f) = configure_threads(cli.threads) {
        return report(&f);
    }
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.body);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                report(&Failure::failed("verification", "check failed; see the report on stdout"))
            }
        }
        Err(f) => report(&f),
    }
}
