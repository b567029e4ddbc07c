//! `rel-orbit`: command-line front end for the reltori library.
//!
//! Deterministic by construction: identical invocations produce byte
//! identical output. Errors go to standard error (as structured JSON when
//! `--json` is set); exit status is 0 on success, 3 when validated precision
//! ran out, and 2 on any other failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reltori::checkerboard::{pieces_csv, to_svg, Checkerboard};
use reltori::codec;
use reltori::error::Error;
use reltori::exact::{ExactScalar, RealSpec, Scalar};
use reltori::experiments::{
    classify_recurrence, default_eps_dist, recurrence_trajectory, records_csv, theorem_check,
    RecurrenceVerdict,
};
use reltori::surface::{ELocusSurface, TremorParam};
use reltori::torus::{reduce_slit, HorizontalSlit, NormalizedTorus};

const DIGITS: usize = 40;

#[derive(Parser)]
#[command(
    name = "rel-orbit",
    about = "Exact Rel-flow experiments on slit double covers of flat tori",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    /// Twist of the torus: a builtin id (golden, sqrt2m1, sqrt3m1, pow2,
    /// factorial), an explicit quotient list "[a0;a1,...]", or an exact
    /// scalar like "-1/2+1/2*sqrt(5)".
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,

    /// Horizontal modulus of the torus (exact scalar).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    a: String,

    /// Slit length ratio: the slit has length N * a.
    #[arg(long = "N", default_value = "1", allow_hyphen_values = true)]
    n: String,

    /// Tremor shear pair applied to the two torus copies.
    #[arg(long, num_args = 2, value_names = ["A1", "A2"], allow_hyphen_values = true)]
    tremor: Option<Vec<String>>,

    /// Surface description as a JSON file path (or inline JSON); individual
    /// flags override nothing when this is given.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the continued-fraction expansion [a0;a1,...,a_depth].
    Cf {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Reduce the horizontal slit to its short corner-anchored representative.
    Reduce {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        json: bool,
    },
    /// Build the checkerboard decomposition and report the exact areas.
    Checkerboard {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Write the cell list as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Sample the Rel orbit at the convergent times and classify it.
    Orbit {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        depth: usize,
        /// Chart tolerance for recurrence evidence.
        #[arg(long = "eps-dist")]
        eps_dist: Option<f64>,
        /// Separation threshold for the gap functional.
        #[arg(long = "eps-gap")]
        eps_gap: Option<f64>,
        /// Write the trajectory records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compare the continued-fraction verdict with the empirical orbit verdict.
    TheoremCheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        depth: usize,
        /// Partial-quotient bound for the badly-approximable test.
        #[arg(long = "K", default_value_t = 10)]
        k_bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Render the checkerboard as an SVG figure.
    Render {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

impl Command {
    fn json_flag(&self) -> bool {
        match self {
            Command::Cf { json, .. }
            | Command::Reduce { json, .. }
            | Command::Checkerboard { json, .. }
            | Command::Orbit { json, .. }
            | Command::TheoremCheck { json, .. }
            | Command::Render { json, .. } => *json,
        }
    }
}

fn parse_surface(args: &SurfaceArgs) -> Result<ELocusSurface, Error> {
    if let Some(input) = &args.input {
        let text = if input.trim_start().starts_with('{') {
            input.clone()
        } else {
            fs::read_to_string(input)
                .map_err(|e| Error::Parse(format!("cannot read {input}: {e}")))?
        };
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        return codec::surface_from_json(&value);
    }
    let alpha: RealSpec = args
        .alpha
        .as_deref()
        .ok_or(Error::InvalidInput("--alpha (or --input) is required"))?
        .parse()?;
    let a: ExactScalar = args.a.parse()?;
    let n: ExactScalar = args.n.parse()?;
    let torus = NormalizedTorus::new(a, alpha)?;
    let tremor = match &args.tremor {
        None => TremorParam::none(),
        Some(pair) => TremorParam::new(pair[0].parse()?, pair[1].parse()?),
    };
    Ok(ELocusSurface::new(torus, HorizontalSlit::new(n)?, tremor))
}

fn scalar_json(s: &Scalar) -> serde_json::Value {
    serde_json::json!({
        "decimal": s.to_decimal_string(DIGITS),
        "exact": s.exact_form(),
    })
}

fn run(command: &Command) -> Result<(), Error> {
    match command {
        Command::Cf { surface, depth, json } => {
            let alpha: RealSpec = surface
                .alpha
                .as_deref()
                .ok_or(Error::InvalidInput("--alpha is required"))?
                .parse()?;
            let quotients = alpha.cf_expand(*depth)?;
            if *json {
                let q: Vec<String> = quotients.iter().map(|a| a.to_string()).collect();
                println!("{}", serde_json::json!({ "quotients": q }));
            } else {
                let tail: Vec<String> =
                    quotients[1..].iter().map(|a| a.to_string()).collect();
                println!("[{};{}]", quotients[0], tail.join(","));
            }
            Ok(())
        }
        Command::Reduce { surface, .. } => {
            let m = parse_surface(surface)?;
            let short = reduce_slit(m.torus(), m.slit())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&codec::short_slit_to_json(&short))
                    .expect("serializable")
            );
            Ok(())
        }
        Command::Checkerboard { surface, csv, .. } => {
            let m = parse_surface(surface)?;
            let short = reduce_slit(m.torus(), m.slit())?;
            let cb = Checkerboard::build(m.torus(), m.slit(), &short)?;
            let (b1, b2) = cb.color_areas();
            let report = serde_json::json!({
                "torus": codec::torus_to_json(m.torus()),
                "N": m.slit().ratio().to_string(),
                "short_slit": codec::short_slit_to_json(&short),
                "pieces": cb.pieces().len(),
                "B1": scalar_json(b1),
                "B2": scalar_json(b2),
                "imbalance": scalar_json(&cb.imbalance()),
                "exchange_proportion": scalar_json(&cb.exchange_proportion()),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if let Some(path) = csv {
                fs::write(path, pieces_csv(&cb))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Orbit {
            surface,
            depth,
            eps_dist,
            eps_gap,
            csv,
            ..
        } => {
            let m = parse_surface(surface)?;
            let records = recurrence_trajectory(&m, *depth)?;
            let eps_dist = match eps_dist {
                Some(e) => f64_to_scalar(*e)?,
                None => default_eps_dist(),
            };
            let eps_gap = match eps_gap {
                Some(e) => f64_to_scalar(*e)?,
                None => reltori::experiments::default_eps_gap(&m.tremor_param().shear_gap()),
            };
            let verdict = classify_recurrence(&records, &eps_dist, &eps_gap)?;
            let verdict_json = match &verdict {
                RecurrenceVerdict::RecurrentEvidence { witnesses } => {
                    serde_json::json!({ "kind": "recurrent-evidence", "witnesses": witnesses })
                }
                RecurrenceVerdict::SeparatedEvidence { min_gap } => serde_json::json!({
                    "kind": "separated-evidence",
                    "min_gap": min_gap.to_decimal_string(DIGITS),
                }),
                RecurrenceVerdict::Inconclusive => {
                    serde_json::json!({ "kind": "inconclusive" })
                }
            };
            let last = records.last().expect("depth >= 1");
            let report = serde_json::json!({
                "surface": codec::surface_to_json(&m),
                "depth": depth,
                "last_theta": scalar_json(&last.theta),
                "last_distance": scalar_json(&last.distance),
                "verdict": verdict_json,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if let Some(path) = csv {
                fs::write(path, records_csv(&records))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::TheoremCheck {
            surface,
            depth,
            k_bound,
            ..
        } => {
            let m = parse_surface(surface)?;
            let tremor = m.tremor_param().clone();
            let report = theorem_check(
                m.torus().alpha_spec(),
                (&tremor.shear1, &tremor.shear2),
                *depth,
                *k_bound,
            )?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report.to_json()).expect("serializable")
            );
            Ok(())
        }
        Command::Render { surface, svg, .. } => {
            let m = parse_surface(surface)?;
            let short = reduce_slit(m.torus(), m.slit())?;
            let cb = Checkerboard::build(m.torus(), m.slit(), &short)?;
            fs::write(svg, to_svg(m.torus(), &cb, m.slit(), &short))
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", svg.display())))?;
            Ok(())
        }
    }
}

fn f64_to_scalar(v: f64) -> Result<Scalar, Error> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive"));
    }
    Scalar::from_f64_exact(v).ok_or(Error::InvalidInput("bad tolerance"))
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("REL_ORBIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if cli.command.json_flag() {
                eprintln!("{}", codec::error_to_json(&err));
            } else {
                eprintln!("error: {err}");
            }
            match err {
                Error::PrecisionExhausted => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
