//! Command-line front end for the exact evaluation engines.
//!
//! Three subcommands:
//!
//! * `compute` evaluates a permanent, determinant, mixed discriminant,
//!   hyperdeterminant, or multidimensional permanent of a sparse tensor
//!   file, over a supplied or heuristic tree decomposition;
//! * `mvol` computes the mixed volume of a zonotope system with few edge
//!   directions;
//! * `gen` writes instance files for the built-in families.
//!
//! Results print to stdout as exact integers or fractions, never in
//! scientific notation; run counters go to a separate JSON report file on
//! request so stdout stays pipeline-friendly.
//!
//! Exit codes: 0 success, 2 usage or parameter validation, 3 input format
//! or compatibility problems, 4 width or enumeration budget exceeded,
//! 5 oracle mismatch.

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, One, Zero};
use serde_json::json;
use tdtensor::engines::{
    compute, DecompositionSource, EngineError, EngineStats, FunctionName,
};
use tdtensor::oracle::{
    exact_determinant, naive_generalized, naive_mixed_volume, ryser_permanent, OracleError,
};
use tdtensor::tensor::{parse_tensor, Scalar, SparseTensor};
use tdtensor::treedecomp::{read_decomposition, HeuristicMethod};
use tdtensor::zonotopes::{
    mixed_volume_few_directions, parse_zonotopes, subset_sum_instance, DirectionIndex,
    ZonotopeError, ZonotopeSystem,
};

#[derive(Parser)]
#[command(
    name = "tdtensor",
    version,
    about = "Exact tensor functions and mixed volumes via tree decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a tensor function from a tensor file.
    Compute(ComputeArgs),
    /// Compute the mixed volume of a zonotope system.
    Mvol(MvolArgs),
    /// Write an instance file from a built-in family.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
}

#[derive(Args)]
struct ComputeArgs {
    /// Function to evaluate.
    #[arg(long = "fn", value_enum)]
    function: FnChoice,
    /// Input tensor file.
    #[arg(long)]
    input: PathBuf,
    /// Tree decomposition file; a heuristic one is built when omitted.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Sparsity graph the decomposition file refers to.
    #[arg(long = "td-graph", value_enum, default_value = "bipartite", requires = "td")]
    td_graph: TdGraphChoice,
    /// Elimination heuristic used when building a decomposition.
    #[arg(long, value_enum, default_value = "min-fill", conflicts_with = "td")]
    heuristic: HeuristicChoice,
    /// Cross-check the result against the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    /// Write a JSON run report to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Worker threads for the decomposition sweep.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct MvolArgs {
    /// Input zonotope system file.
    #[arg(long)]
    input: PathBuf,
    /// Decomposition of the zonotope-direction incidence graph.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Largest allowed excess of distinct directions over the dimension.
    #[arg(long = "max-extra-directions", default_value_t = 4)]
    max_extra_directions: usize,
    /// Cross-check the result against the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    /// Write a JSON run report to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Worker threads for the per-subset permanent sweeps.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Square band matrix with seeded random entries in 1..=9.
    Band {
        /// Matrix size.
        #[arg(long)]
        n: usize,
        /// Subdiagonal band width.
        #[arg(long)]
        w1: usize,
        /// Superdiagonal band width.
        #[arg(long)]
        w2: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// m^2 x m^2 matrix whose symmetrized sparsity graph contains an m x m grid.
    Grid {
        /// Grid side length.
        #[arg(long)]
        m: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Matrix with the diagonal plus one seeded off-diagonal entry per row.
    TwoPerRow {
        /// Matrix size (at least 2).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Zonotope system whose mixed volume is sum over subsets S of |delta + sum(S)|.
    SubsetSum {
        /// Comma-separated integers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<i64>,
        /// Shift applied to every subset sum.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        delta: i64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// System of n zonotopes [0,a_i]e_i + [0,b_i](1,...,1) in n dimensions.
    FewDirections {
        /// Comma-separated nonnegative axis scales.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<i64>,
        /// Comma-separated nonnegative all-ones scales.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<i64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FnChoice {
    /// Permanent of a square matrix.
    Perm,
    /// Determinant of a square matrix.
    Det,
    /// Mixed discriminant of an order-3 tensor.
    Disc,
    /// Hyperdeterminant-style alternating sum (even order).
    Hyperdet,
    /// Multidimensional permanent.
    Mdperm,
}

impl FnChoice {
    fn function(self) -> FunctionName {
        match self {
            FnChoice::Perm => FunctionName::Permanent,
            FnChoice::Det => FunctionName::Determinant,
            FnChoice::Disc => FunctionName::MixedDiscriminant,
            FnChoice::Hyperdet => FunctionName::Hyperdeterminant,
            FnChoice::Mdperm => FunctionName::MultidimensionalPermanent,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TdGraphChoice {
    /// One graph part per tensor axis, an edge clique per nonzero.
    Bipartite,
    /// Column graph of a matrix: columns sharing a row are adjacent.
    Column,
    /// Symmetrized graph of a matrix: i adjacent to j when m[i][j] or m[j][i] is nonzero.
    Symmetrized,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicChoice {
    /// Eliminate the vertex adding the fewest fill edges.
    MinFill,
    /// Eliminate the vertex of smallest degree.
    MinDegree,
}

impl HeuristicChoice {
    fn method(self) -> HeuristicMethod {
        match self {
            HeuristicChoice::MinFill => HeuristicMethod::MinFill,
            HeuristicChoice::MinDegree => HeuristicMethod::MinDegree,
        }
    }
}

/// A fatal condition carrying one of the documented exit codes.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    /// Parameter validation problems beyond what flag parsing catches.
    fn usage(message: impl Display) -> Failure {
        Failure { code: 2, message: message.to_string() }
    }

    /// Unreadable, malformed, or incompatible inputs.
    fn input(message: impl Display) -> Failure {
        Failure { code: 3, message: message.to_string() }
    }
}

fn engine_failure(e: EngineError) -> Failure {
    let code = if matches!(e, EngineError::WidthTooLarge(_)) { 4 } else { 3 };
    Failure { code, message: e.to_string() }
}

fn zonotope_failure(e: ZonotopeError) -> Failure {
    let code = match e {
        ZonotopeError::WidthTooLarge(_) | ZonotopeError::DirectionCapExceeded { .. } => 4,
        _ => 3,
    };
    Failure { code, message: e.to_string() }
}

fn oracle_failure(e: OracleError) -> Failure {
    let code = match e {
        OracleError::NotSquare => 3,
        _ => 4,
    };
    Failure { code, message: e.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compute(args) => run_compute(&args),
        Command::Mvol(args) => run_mvol(&args),
        Command::Gen { family } => run_gen(&family),
    }
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

/// What one engine run produced, with everything needed for the report.
struct ComputeOutcome {
    result: String,
    stats: EngineStats,
    /// The oracle's value in the same canonical text form, when requested.
    oracle: Option<String>,
}

fn run_compute(args: &ComputeArgs) -> Result<(), Failure> {
    let text = read_input(&args.input)?;
    let digest = fnv1a(text.as_bytes());
    let tensor: SparseTensor<BigRational> =
        parse_tensor(&text).map_err(Failure::input)?;
    let function = args.function.function();

    let started = Instant::now();
    // Integer inputs run on integer arithmetic; anything with a true
    // fraction runs on rationals. Both print the same canonical forms.
    let outcome = match integer_tensor(&tensor) {
        Some(integral) => evaluate(function, &integral, args)?,
        None => evaluate(function, &tensor, args)?,
    };
    let wall_ms = started.elapsed().as_millis() as u64;

    println!("{}", outcome.result);
    if let Some(oracle) = &outcome.oracle {
        if *oracle == outcome.result {
            println!("oracle: match");
        } else {
            return Err(Failure {
                code: 5,
                message: format!(
                    "oracle mismatch: engine {} vs oracle {oracle}",
                    outcome.result
                ),
            });
        }
    }

    if let Some(path) = &args.stats {
        let report = json!({
            "command": command_line(),
            "input_digest": digest,
            "function": function.name(),
            "n": tensor.lens()[0],
            "order": tensor.order(),
            "width_multi_part": outcome.stats.max_bag_total,
            "width_single_part": outcome.stats.max_bag_total.saturating_sub(1),
            "nodes": outcome.stats.nodes,
            "ring_mults": outcome.stats.ring_mults,
            "result": outcome.result,
            "wall_ms": wall_ms,
        });
        write_report(path, &report)?;
    }
    Ok(())
}

/// Runs the engine for one scalar type and, on request, its oracle.
fn evaluate<R: Scalar>(
    function: FunctionName,
    t: &SparseTensor<R>,
    args: &ComputeArgs,
) -> Result<ComputeOutcome, Failure> {
    let td = match &args.td {
        None => None,
        Some(path) => {
            if matches!(args.td_graph, TdGraphChoice::Column | TdGraphChoice::Symmetrized)
                && t.order() != 2
            {
                return Err(Failure::input(
                    "column and symmetrized decompositions take an order-2 tensor",
                ));
            }
            let td_text = read_input(path)?;
            let part_sizes: Vec<usize> = match args.td_graph {
                TdGraphChoice::Bipartite => t.lens().to_vec(),
                TdGraphChoice::Column => vec![t.lens()[1]],
                TdGraphChoice::Symmetrized => vec![t.lens()[0]],
            };
            Some(read_decomposition(&td_text, &part_sizes).map_err(Failure::input)?)
        }
    };
    let source = match (&td, args.td_graph) {
        (None, _) => DecompositionSource::Heuristic(args.heuristic.method()),
        (Some(td), TdGraphChoice::Bipartite) => DecompositionSource::Bipartite(td),
        (Some(td), TdGraphChoice::Column) => DecompositionSource::Column(td),
        (Some(td), TdGraphChoice::Symmetrized) => DecompositionSource::Symmetrized(td),
    };
    let run = compute(function, t, source, args.threads).map_err(engine_failure)?;
    let oracle = if args.oracle {
        Some(oracle_value(function, t)?)
    } else {
        None
    };
    Ok(ComputeOutcome {
        result: run.result.to_string(),
        stats: run.stats,
        oracle,
    })
}

/// Independent value from the matching brute-force oracle, canonicalized.
fn oracle_value<R: Scalar>(
    function: FunctionName,
    t: &SparseTensor<R>,
) -> Result<String, Failure> {
    let value = match function {
        FunctionName::Permanent => ryser_permanent(t).map_err(oracle_failure)?.to_string(),
        FunctionName::Determinant => {
            let n = t.lens()[0];
            let rows: Vec<Vec<BigRational>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| t.get(&[i, j]).map_or_else(BigRational::zero, rational_scalar))
                        .collect()
                })
                .collect();
            exact_determinant(&rows).to_string()
        }
        _ => {
            let sig = function.signature(t.order()).map_err(engine_failure)?;
            naive_generalized(t, sig.signed())
                .map_err(oracle_failure)?
                .to_string()
        }
    };
    Ok(value)
}

/// Exact conversion through the scalar's canonical text form.
fn rational_scalar<R: Scalar>(v: &R) -> BigRational {
    <BigRational as Scalar>::parse(&v.to_string()).expect("scalar text forms are exact")
}

/// The integer view of a tensor whose entries all have denominator one.
fn integer_tensor(t: &SparseTensor<BigRational>) -> Option<SparseTensor<BigInt>> {
    let mut out = SparseTensor::new(t.lens().to_vec());
    for (idx, value) in t.iter() {
        if !value.denom().is_one() {
            return None;
        }
        out.set(idx.clone(), value.numer().clone());
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// mvol
// ---------------------------------------------------------------------------

fn run_mvol(args: &MvolArgs) -> Result<(), Failure> {
    let text = read_input(&args.input)?;
    let digest = fnv1a(text.as_bytes());
    let zs: ZonotopeSystem = parse_zonotopes(&text).map_err(zonotope_failure)?;

    let td = match &args.td {
        None => None,
        Some(path) => {
            let td_text = read_input(path)?;
            // The incidence graph has one part of zonotopes and one of
            // canonicalized directions, so sizes come from the index.
            let idx = DirectionIndex::build(&zs);
            let part_sizes = vec![zs.dim(), idx.directions.len()];
            Some(read_decomposition(&td_text, &part_sizes).map_err(Failure::input)?)
        }
    };

    let started = Instant::now();
    let run = mixed_volume_few_directions(
        &zs,
        td.as_ref(),
        args.max_extra_directions,
        args.threads,
    )
    .map_err(zonotope_failure)?;
    let wall_ms = started.elapsed().as_millis() as u64;
    let result = run.result.to_string();

    println!("{result}");
    if args.oracle {
        let oracle = naive_mixed_volume(&zs).map_err(oracle_failure)?;
        if oracle == run.result {
            println!("oracle: match");
        } else {
            return Err(Failure {
                code: 5,
                message: format!("oracle mismatch: engine {result} vs oracle {oracle}"),
            });
        }
    }

    if let Some(path) = &args.stats {
        let report = json!({
            "command": command_line(),
            "input_digest": digest,
            "function": "mvol",
            "n": zs.dim(),
            "width_multi_part": run.max_bag_total,
            "width_single_part": run.max_bag_total.saturating_sub(1),
            "nodes": run.nodes,
            "subsets": run.subsets,
            "regular_subsets": run.regular_subsets,
            "ring_mults": run.ring_mults,
            "result": result,
            "wall_ms": wall_ms,
        });
        write_report(path, &report)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

fn run_gen(family: &GenFamily) -> Result<(), Failure> {
    let (text, output) = match family {
        GenFamily::Band { n, w1, w2, seed, output } => {
            if *n == 0 {
                return Err(Failure::usage("band: n must be at least 1"));
            }
            (band_matrix(*n, *w1, *w2, *seed).serialize(), output)
        }
        GenFamily::Grid { m, output } => {
            if *m == 0 {
                return Err(Failure::usage("grid: m must be at least 1"));
            }
            (grid_matrix(*m).serialize(), output)
        }
        GenFamily::TwoPerRow { n, seed, output } => {
            if *n < 2 {
                return Err(Failure::usage("two-per-row: n must be at least 2"));
            }
            (two_per_row(*n, *seed).serialize(), output)
        }
        GenFamily::SubsetSum { a, delta, output } => {
            (subset_sum_instance(a, *delta).serialize(), output)
        }
        GenFamily::FewDirections { a, b, output } => {
            (few_directions(a, b)?.serialize(), output)
        }
    };
    match output {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Band matrix: nonzeros where `i - w1 <= j <= i + w2`, values in 1..=9.
fn band_matrix(n: usize, w1: usize, w2: usize, seed: u64) -> SparseTensor<BigInt> {
    let mut state = rng_state(seed);
    let mut t = SparseTensor::new(vec![n, n]);
    for i in 0..n {
        let lo = i.saturating_sub(w1);
        let hi = (i + w2).min(n - 1);
        for j in lo..=hi {
            let v = 1 + (split_mix(&mut state) % 9) as i64;
            t.set(vec![i, j], BigInt::from(v));
        }
    }
    t
}

/// The m^2 x m^2 family: row i has a 1 to column i+1 (within each block of
/// m rows) and a 2 to column i+m; ones-column 3 hooks connect block ends so
/// the symmetrized graph carries an m x m grid. Indices here are 1-based.
fn grid_matrix(m: usize) -> SparseTensor<BigInt> {
    let n = m * m;
    let mut t = SparseTensor::new(vec![n, n]);
    for i in 1..n {
        if i % m != 0 {
            t.set(vec![i - 1, i], BigInt::from(1));
        }
    }
    for i in 1..=n.saturating_sub(m) {
        t.set(vec![i - 1, i + m - 1], BigInt::from(2));
    }
    for i in 1..=m {
        t.set(vec![(m - i + 1) * m - 1, i - 1], BigInt::from(3));
    }
    for i in 1..m {
        t.set(vec![n - i - 1, i * m], BigInt::from(3));
    }
    t
}

/// Diagonal plus one random off-diagonal nonzero per row, values in 1..=9.
fn two_per_row(n: usize, seed: u64) -> SparseTensor<BigInt> {
    let mut state = rng_state(seed);
    let mut t = SparseTensor::new(vec![n, n]);
    for i in 0..n {
        t.set(vec![i, i], BigInt::from(1 + (split_mix(&mut state) % 9) as i64));
        // A column other than i, drawn uniformly from the n-1 others.
        let mut j = (split_mix(&mut state) % (n as u64 - 1)) as usize;
        if j >= i {
            j += 1;
        }
        t.set(vec![i, j], BigInt::from(1 + (split_mix(&mut state) % 9) as i64));
    }
    t
}

/// Zonotope i spans `[0,a_i]e_i + [0,b_i](1,...,1)`; zero scales drop the
/// corresponding generator.
fn few_directions(a: &[i64], b: &[i64]) -> Result<ZonotopeSystem, Failure> {
    if a.len() != b.len() {
        return Err(Failure::usage(format!(
            "few-directions: a has {} entries but b has {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|&v| v < 0) {
        return Err(Failure::usage("few-directions: scales must be nonnegative"));
    }
    let n = a.len();
    let rat = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut zonotopes = Vec::with_capacity(n);
    for i in 0..n {
        let mut gens = Vec::new();
        if a[i] > 0 {
            let mut axis = vec![rat(0); n];
            axis[i] = rat(a[i]);
            gens.push(axis);
        }
        if b[i] > 0 {
            gens.push(vec![rat(b[i]); n]);
        }
        zonotopes.push(gens);
    }
    ZonotopeSystem::new(n, zonotopes).map_err(zonotope_failure)
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_report(path: &PathBuf, report: &serde_json::Value) -> Result<(), Failure> {
    std::fs::write(path, format!("{report:#}\n"))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// FNV-1a 64-bit digest of the raw input bytes, as fixed-width hex.
fn fnv1a(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Seeds are stretched so that small consecutive values diverge.
fn rng_state(seed: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x2545_f491_4f6c_dd1d)
}

/// SplitMix64 step: a tiny deterministic generator, stable across builds.
fn split_mix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
