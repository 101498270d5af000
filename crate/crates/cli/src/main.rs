//! `dphelix`: command-line access to seeds, T-polygons, del Pezzo lattices,
//! helices of exceptional collections and the connector.
//!
//! Every command reads JSON (from a file, standard input, or `corpus:<name>`)
//! and writes JSON to standard output or `--output`. Diagnostics go to standard
//! error. Exit codes: 0 on success, 1 on invalid input or a failed check, 2 when a
//! search is exhausted.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dphelix::connector::{connect, ConnectError, Limits};
use dphelix::corpus;
use dphelix::delpezzo::{
    affine_roots, finite_roots, positive_roots, root_lattice_type, simple_roots, weyl_closure, DelPezzoError, Surface,
    DEFAULT_WEYL_LIMIT,
};
use dphelix::helix::{
    check_very_strong, dual_collection, random_trace, reorder, rotate_thread, seed_of, tilt_minus, tilt_plus,
    Collection, HelixError, Step,
};
use dphelix::lattice::{
    canonical_polygon, delta_class, find_roots, is_q_painleve, predicted_edges, t_polygon, LatticeError, Seed, Sign,
};
use dphelix::toric::{oracle_check, ToricError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

type Int = dphelix::Int;

#[derive(Parser)]
#[command(name = "dphelix", version, about = "Seeds, T-polygons and helices on del Pezzo surfaces")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on seeds.
    #[command(subcommand)]
    Seed(SeedCmd),
    /// Operations on collections of classes.
    #[command(subcommand)]
    Collection(CollectionCmd),
    /// The Grothendieck lattice of a surface.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Find a trace of operations taking collection A to collection B.
    Connect(ConnectArgs),
    /// Independent checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// The shipped collections.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

/// A JSON source: a file path, `-` or nothing for standard input, or `corpus:<name>`.
#[derive(Args, Clone)]
struct Input {
    input: Option<String>,
}

#[derive(Subcommand)]
enum SeedCmd {
    /// Apply the mutation μ_j^ε.
    Mutate {
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "+", value_parser = parse_sign)]
        sign: Sign,
        #[command(flatten)]
        input: Input,
    },
    /// The T-polygon of a q-Painlevé seed.
    Polygon {
        /// Emit the SL(2, Z) normal form instead of the polygon itself.
        #[arg(long)]
        canonical: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Roots visible within a number of mutations.
    Roots {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[command(flatten)]
        input: Input,
    },
    /// q-Painlevé test with certificate, radical class and edge data.
    Check {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum CollectionCmd {
    /// Very strong check with its slope certificate.
    Check {
        #[command(flatten)]
        input: Input,
    },
    /// Dual classes F_1..F_n and their ψ-vectors (r, d).
    Dual {
        #[command(flatten)]
        input: Input,
    },
    /// The associated seed.
    Seed {
        #[command(flatten)]
        input: Input,
    },
    /// Left tilt of E_j (sign +) or right tilt of E_1 to position j (sign −).
    Tilt {
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "+", value_parser = parse_sign)]
        sign: Sign,
        #[command(flatten)]
        input: Input,
    },
    /// Rotate the thread by k steps along the helix.
    Rotate {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        input: Input,
    },
    /// Swap two objects of a mutually orthogonal block.
    Reorder {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Twist by the line bundle O(D), with D given as comma-separated NS coordinates.
    Tensor {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        c1: Vec<Int>,
        #[command(flatten)]
        input: Input,
    },
    /// Apply a random trace of applicable operations.
    Scramble {
        #[arg(long, default_value_t = 6)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Twists are drawn with NS coordinates in [−range, range].
        #[arg(long, default_value_t = 1)]
        tensor_range: i64,
        /// Also write the applied trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args, Clone, Copy)]
struct SurfaceArg {
    /// The plane blown up in m points.
    #[arg(long, conflicts_with = "p1xp1")]
    m: Option<u8>,
    /// The quadric P1xP1.
    #[arg(long)]
    p1xp1: bool,
}

impl SurfaceArg {
    fn surface(self) -> Result<Surface, Failure> {
        match (self.m, self.p1xp1) {
            (_, true) => Ok(Surface::P1xP1),
            (Some(m), false) => Ok(Surface::blowup(m)?),
            (None, false) => Err(Failure::usage("give --m <0..=8> or --p1xp1")),
        }
    }
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Finite roots, or affine roots up to a height bound.
    Roots {
        #[command(flatten)]
        surface: SurfaceArg,
        /// Only positive roots.
        #[arg(long)]
        positive: bool,
        /// Only simple roots.
        #[arg(long, conflicts_with = "positive")]
        simple: bool,
        /// Affine roots `α + kδ` with |k| up to this bound.
        #[arg(long)]
        affine: Option<u32>,
    },
    /// Order and simple roots of the finite Weyl group.
    Weyl {
        #[command(flatten)]
        surface: SurfaceArg,
        #[arg(long, default_value_t = DEFAULT_WEYL_LIMIT)]
        limit: usize,
    },
    /// Dynkin type of the root lattice.
    Type {
        #[command(flatten)]
        surface: SurfaceArg,
    },
}

#[derive(Args)]
struct ConnectArgs {
    a: String,
    b: String,
    /// Maximal number of tilts in the polygon search.
    #[arg(long)]
    depth: Option<usize>,
    /// JSON file with search limits; missing fields take their defaults.
    #[arg(long)]
    limits: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Compare the toric intersection form with the seed's form.
    ToricCheck {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Names and descriptions.
    List,
    /// One collection.
    Show { name: String },
}

/// A failure with its exit code and the name of the error family.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { kind: "UsageError", message: message.into(), code: 1 }
    }
    fn io(message: impl Into<String>) -> Self {
        Failure { kind: "IoError", message: message.into(), code: 1 }
    }
    fn check(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { kind, message: message.into(), code: 1 }
    }
}

macro_rules! failure_from {
    ($($t:ty => $name:literal),* $(,)?) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure { kind: $name, message: e.to_string(), code: 1 }
            }
        })*
    };
}

failure_from!(LatticeError => "LatticeError", HelixError => "HelixError", DelPezzoError => "DelPezzoError", ToricError => "ToricError");

impl From<ConnectError> for Failure {
    fn from(e: ConnectError) -> Self {
        let code = if matches!(e, ConnectError::SearchExhausted { .. }) { 2 } else { 1 };
        Failure { kind: "ConnectError", message: e.to_string(), code }
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(format!("expected + or -, got {s}")),
    }
}

fn read_source(source: Option<&str>) -> Result<String, Failure> {
    match source {
        None | Some("-") => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(|e| Failure::io(format!("standard input: {e}")))?;
            Ok(text)
        }
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::io(format!("{path}: {e}"))),
    }
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure { kind: "ParseError", message: format!("{what}: {e}"), code: 1 })
}

fn corpus_entry(name: &str) -> Result<Collection<Int>, Failure> {
    corpus::get(name).ok_or_else(|| Failure::usage(format!("unknown corpus entry {name}; see `corpus list`")))
}

fn load_collection(source: Option<&str>) -> Result<Collection<Int>, Failure> {
    let c: Collection<Int> = match source.and_then(|s| s.strip_prefix("corpus:")) {
        Some(name) => corpus_entry(name)?,
        None => parse_json(&read_source(source)?, "collection")?,
    };
    c.validate()?;
    Ok(c)
}

/// A seed, or the seed of a collection (JSON or corpus entry).
fn load_seed(source: Option<&str>) -> Result<Seed<Int>, Failure> {
    if let Some(name) = source.and_then(|s| s.strip_prefix("corpus:")) {
        return Ok(seed_of(&corpus_entry(name)?)?);
    }
    let text = read_source(source)?;
    let value: serde_json::Value = parse_json(&text, "seed")?;
    if value.get("objects").is_some() {
        let c: Collection<Int> = parse_json(&text, "collection")?;
        return Ok(seed_of(&c)?);
    }
    parse_json(&text, "seed")
}

fn emit<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string())),
    }
}

fn run_seed(cmd: SeedCmd, out: Option<&PathBuf>) -> Result<(), Failure> {
    match cmd {
        SeedCmd::Mutate { j, sign, input } => emit(&load_seed(input.input.as_deref())?.mutate(j, sign)?, out),
        SeedCmd::Polygon { canonical, input } => {
            let p = t_polygon(&load_seed(input.input.as_deref())?)?;
            emit(&if canonical { canonical_polygon(&p) } else { p }, out)
        }
        SeedCmd::Roots { depth, input } => emit(&find_roots(&load_seed(input.input.as_deref())?, depth), out),
        SeedCmd::Check { input } => {
            let s = load_seed(input.input.as_deref())?;
            let q = is_q_painleve(&s);
            let report = if q.q_painleve {
                json!({ "q_painleve": q, "delta": delta_class(&s)?, "edges": predicted_edges(&s)? })
            } else {
                json!({ "q_painleve": q })
            };
            emit(&report, out)?;
            if q.q_painleve {
                Ok(())
            } else {
                Err(Failure::check("LatticeError", LatticeError::NotQPainleve.to_string()))
            }
        }
    }
}

fn run_collection(cmd: CollectionCmd, out: Option<&PathBuf>) -> Result<(), Failure> {
    match cmd {
        CollectionCmd::Check { input } => emit(&check_very_strong(&load_collection(input.input.as_deref())?)?, out),
        CollectionCmd::Dual { input } => {
            let c = load_collection(input.input.as_deref())?;
            emit(&json!({ "duals": dual_collection(&c), "psi": c.dual_psi() }), out)
        }
        CollectionCmd::Seed { input } => emit(&seed_of(&load_collection(input.input.as_deref())?)?, out),
        CollectionCmd::Tilt { j, sign, input } => {
            let c = load_collection(input.input.as_deref())?;
            let t = match sign {
                Sign::Plus => tilt_plus(&c, j)?,
                Sign::Minus => tilt_minus(&c, j)?,
            };
            emit(&t, out)
        }
        CollectionCmd::Rotate { k, input } => emit(&rotate_thread(&load_collection(input.input.as_deref())?, k), out),
        CollectionCmd::Reorder { i, j, input } => emit(&reorder(&load_collection(input.input.as_deref())?, i, j)?, out),
        CollectionCmd::Tensor { c1, input } => {
            emit(&Step::Tensor { c1 }.apply(&load_collection(input.input.as_deref())?)?, out)
        }
        CollectionCmd::Scramble { len, seed, tensor_range, trace, input } => {
            let c = load_collection(input.input.as_deref())?;
            let (t, result) = random_trace(&c, len, tensor_range, &mut ChaCha8Rng::seed_from_u64(seed));
            if let Some(path) = trace {
                emit(&t, Some(&path))?;
            }
            eprintln!("applied {t}");
            emit(&result, out)
        }
    }
}

fn run_surface(cmd: SurfaceCmd, out: Option<&PathBuf>) -> Result<(), Failure> {
    match cmd {
        SurfaceCmd::Roots { surface, positive, simple, affine } => {
            let s = surface.surface()?;
            let roots = match (affine, positive, simple) {
                (Some(h), _, _) => affine_roots::<Int>(&s, h),
                (None, true, _) => positive_roots(&s),
                (None, _, true) => simple_roots(&s),
                _ => finite_roots(&s),
            };
            emit(&json!({ "surface": s, "count": roots.len(), "roots": roots }), out)
        }
        SurfaceCmd::Weyl { surface, limit } => {
            let s = surface.surface()?;
            let w = weyl_closure::<Int>(&s, limit)?;
            emit(&json!({ "surface": s, "order": w.order(), "simple_roots": w.simple_roots }), out)
        }
        SurfaceCmd::Type { surface } => {
            let s = surface.surface()?;
            emit(&json!({ "surface": s, "type": root_lattice_type::<Int>(&s) }), out)
        }
    }
}

fn run_connect(args: ConnectArgs, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut limits: Limits = match &args.limits {
        Some(path) => parse_json(&read_source(Some(&path.to_string_lossy()))?, "limits")?,
        None => Limits::default(),
    };
    if let Some(d) = args.depth {
        limits.depth = d;
    }
    if args.a == "-" && args.b == "-" {
        return Err(Failure::usage("only one of A and B can be read from standard input"));
    }
    let a = load_collection(Some(&args.a))?;
    let b = load_collection(Some(&args.b))?;
    let result = connect(&a, &b, &limits)?;
    for entry in &result.log {
        eprintln!("{}", serde_json::to_string(entry).expect("serializable"));
    }
    emit(&result.trace, out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.output.as_ref();
    // the corpus is certified on every start
    corpus::entries::<Int>().map_err(|e| Failure::check("HelixError", format!("corpus self-check: {e}")))?;
    match cli.command {
        Command::Seed(cmd) => run_seed(cmd, out),
        Command::Collection(cmd) => run_collection(cmd, out),
        Command::Surface(cmd) => run_surface(cmd, out),
        Command::Connect(args) => run_connect(args, out),
        Command::Oracle(OracleCmd::ToricCheck { input }) => {
            let report = oracle_check(&load_seed(input.input.as_deref())?)?;
            emit(&report, out)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::check("ToricError", format!("{} comparisons failed", report.failures().count())))
            }
        }
        Command::Corpus(CorpusCmd::List) => {
            let entries = corpus::entries::<Int>()?;
            let list: Vec<_> = entries
                .iter()
                .map(|e| json!({ "name": e.name, "surface": e.collection.surface, "description": e.description }))
                .collect();
            emit(&list, out)
        }
        Command::Corpus(CorpusCmd::Show { name }) => emit(&corpus_entry(&name)?, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // exit code 2 is reserved for exhausted searches
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message);
            ExitCode::from(f.code)
        }
    }
}
