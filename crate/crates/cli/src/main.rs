use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use thickset_core::bounds::{
    convex_gap_dim_bound, dim_lower_1d, intersection_bound, min_tau_for_count, optimize_c, pattern_capacity, single_set_bound, sweep_c,
    BoundKind, BoundsError, DimensionBound,
};
use thickset_core::descriptor::DescriptorError;
use thickset_core::game::{play_match, AliceStrategy, BobPolicy, GameError, GameParams, GapTable, ThicknessStrategy, Verdict};
use thickset_core::gap_lemma::{gap_lemma_decide, linked_refine, GapLemmaError, GapLemmaTag};
use thickset_core::scaffold::{build_scaffold, check_claims, m_value, scaffold_dimension, ScaffoldError, ScaffoldParams};
use thickset_core::verify::{box_counting, brute_intersection, pattern_search, IntersectionVerdict, VerifyError, DEFAULT_CELL_BUDGET};
use thickset_core::{thickness, EnumerateOptions, SetDescriptor};

/// Seed used by `game` when none is given.
const DEFAULT_SEED: u64 = 0;

/// `println!` that exits quietly once stdout is closed, e.g. by `head`.
macro_rules! out {
    ($($arg:tt)*) => {
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    };
}

#[derive(Parser)]
#[command(name = "thickset", version, about = "Thickness, gap-lemma and dimension tools for compact sets given by their gaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thickness of a set descriptor.
    Thickness {
        descriptor: PathBuf,
        #[command(flatten)]
        enumerate: EnumerateArgs,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the gap lemma guarantees that two sets intersect.
    Gaplemma {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        enumerate: EnumerateArgs,
        /// Also locate a common point by walking linked gaps.
        #[arg(long)]
        refine: bool,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Exit with status 1 unless intersection is guaranteed.
        #[arg(long)]
        require_guarantee: bool,
        #[arg(long)]
        json: bool,
    },
    /// Dimension and pattern-capacity bounds.
    Bound {
        #[command(subcommand)]
        kind: BoundCommand,
    },
    /// Play matches of the (alpha, beta, c, rho)-game.
    Game(GameArgs),
    /// Build the lattice-ball Cantor scaffold and report its dimension.
    Scaffold(ScaffoldArgs),
    /// Brute-force checks at finite resolution.
    Verify {
        #[command(subcommand)]
        kind: VerifyCommand,
    },
}

#[derive(Args, Clone, Copy)]
struct EnumerateArgs {
    /// Enumeration depth for generative sets.
    #[arg(long)]
    depth: Option<u32>,
    /// Maximum number of gaps to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
}

impl EnumerateArgs {
    fn options(self) -> EnumerateOptions {
        EnumerateOptions {
            depth: self.depth,
            cap: self.cap,
        }
    }
}

#[derive(Args)]
struct BoundCommon {
    /// Exit with status 1 when the bound is infeasible.
    #[arg(long)]
    require_feasible: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Lower bound on the dimension of a ball intersected with thick sets.
    Intersect {
        /// Thickness of each set (repeat the flag or separate by commas).
        #[arg(long = "tau", required = true, value_delimiter = ',')]
        taus: Vec<f64>,
        #[arg(long)]
        sup_diam: f64,
        #[arg(long)]
        diam_b: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Exponent; the best feasible one is searched when omitted.
        #[arg(long)]
        c: Option<f64>,
        /// Emit CSV rows (c, value, feasible) over this many exponents.
        #[arg(long)]
        sweep: Option<usize>,
        #[command(flatten)]
        common: BoundCommon,
    },
    /// Lower bound on the dimension of a ball intersected with one thick set.
    Single {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        diam_b: f64,
        #[arg(long)]
        diam_c: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        common: BoundCommon,
    },
    /// Number of similar copies of any pattern guaranteed by thickness.
    Pattern {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        diam_b: f64,
        #[arg(long)]
        diam_c: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Report the smallest thickness guaranteeing this many copies.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Dimension lower bound for a compact set on the line.
    Dim1d {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        json: bool,
    },
    /// Dimension lower bound for a set in R^d with convex gaps.
    Convex {
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GameArgs {
    /// `pass` or `thickness:<descriptor>`.
    #[arg(long, default_value = "pass")]
    alice: String,
    /// `chaser:<descriptor>`, `random:<x,...>` or `concentric:<x,...>`.
    #[arg(long)]
    bob: String,
    /// `alpha,beta,c,rho`.
    #[arg(long)]
    params: String,
    /// Target set for the verdict; defaults to Alice's or Bob's descriptor.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    stop: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of matches, with seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    matches: u64,
    /// Transcript of the first match, one JSON object per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    enumerate: EnumerateArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScaffoldArgs {
    /// A JSON file with d, alpha, beta, c, rho and optional gamma and x0, or
    /// the inline list `d,alpha,beta,c,rho[,gamma]`.
    #[arg(long)]
    params: String,
    /// Centre of the root ball, `x,...`.
    #[arg(long)]
    center: Option<String>,
    /// Build the tree to this many blocks; only formulas are reported otherwise.
    #[arg(long)]
    depth: Option<u32>,
    /// `pass` or `thickness:<descriptor>`.
    #[arg(long, default_value = "pass")]
    alice: String,
    /// Enumeration depth of Alice's set.
    #[arg(long)]
    gap_depth: Option<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    #[arg(long)]
    allow_infeasible: bool,
    /// Write the tree, one node per line.
    #[arg(long)]
    emit: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Whether the sets share a cell at the given level.
    Intersect {
        #[arg(required = true, num_args = 2..)]
        descriptors: Vec<PathBuf>,
        #[arg(long, default_value_t = 12)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        /// Exit with status 1 unless a common cell is found.
        #[arg(long)]
        require_witness: bool,
        #[arg(long)]
        json: bool,
    },
    /// Box-counting dimension estimate.
    Boxdim {
        descriptor: PathBuf,
        /// Levels to count at, `k,...`.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        levels: Vec<u32>,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        /// Emit (scale, count) rows.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Translates `x + lambda*pattern` contained in the set.
    Pattern {
        descriptor: PathBuf,
        /// Points separated by `;`, coordinates by `,`.
        #[arg(long, allow_hyphen_values = true)]
        pattern: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        /// Print at most this many witnesses.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
}

/// Exit status 2 for bad input, 1 for failed computations.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<DescriptorError> for Failure {
    fn from(e: DescriptorError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::NoFeasibleC { .. } => Failure::runtime(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        match e {
            GameError::InvalidParams(_) | GameError::DimensionMismatch(..) => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<ScaffoldError> for Failure {
    fn from(e: ScaffoldError) -> Self {
        match e {
            ScaffoldError::InvalidParams(_) | ScaffoldError::NonLatticeBeta(_) => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<GapLemmaError> for Failure {
    fn from(e: GapLemmaError) -> Self {
        Failure::runtime(e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Thickness { descriptor, enumerate, json } => run_thickness(&descriptor, enumerate, json),
        Command::Gaplemma {
            first,
            second,
            enumerate,
            refine,
            eps,
            max_iter,
            require_guarantee,
            json,
        } => run_gaplemma(&first, &second, enumerate, refine, eps, max_iter, require_guarantee, json),
        Command::Bound { kind } => run_bound(kind),
        Command::Game(args) => run_game(args),
        Command::Scaffold(args) => run_scaffold(args),
        Command::Verify { kind } => run_verify(kind),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<SetDescriptor, Failure> {
    Ok(SetDescriptor::load(path)?)
}

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("{what}: cannot parse {s:?} as a number")))
        })
        .collect()
}

fn print_json(value: &Value) {
    out!("{}", serde_json::to_string_pretty(value).expect("json value serializes"));
}

fn run_thickness(path: &Path, enumerate: EnumerateArgs, json: bool) -> Outcome {
    let desc = load(path)?;
    let report = thickness(&desc, &enumerate.options()).map_err(|e| Failure::runtime(e.to_string()))?;
    if json {
        print_json(&json!({
            "value": report.value,
            "certified_lower": report.certified_lower(),
            "certified": report.is_certified(),
            "argmin": report.argmin,
            "gaps": report.ratios.len(),
            "truncation": report.truncation,
        }));
    } else {
        out!("thickness        {:.12}", report.value);
        out!("certified lower  {:.12}", report.certified_lower());
        out!("exact            {}", report.is_certified());
        out!("gaps scored      {}", report.ratios.len());
        if let Some(i) = report.argmin {
            let r = &report.ratios[i];
            out!("argmin gap       {} (separation {:.6e}, diameter {:.6e})", r.index, r.separation, r.diam);
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn run_gaplemma(first: &Path, second: &Path, enumerate: EnumerateArgs, refine: bool, eps: f64, max_iter: usize, require: bool, json: bool) -> Outcome {
    let a = load(first)?;
    let b = load(second)?;
    let opts = enumerate.options();
    let verdict = gap_lemma_decide(&a, &b, &opts)?;
    let located = if refine { Some(linked_refine(&a, &b, eps, max_iter, &opts)?) } else { None };
    if json {
        print_json(&json!({
            "verdict": verdict.tag.kind(),
            "tau1": verdict.tau1,
            "tau2": verdict.tau2,
            "tau_product": verdict.tau_product,
            "detail": verdict.detail,
            "point": located.as_ref().map(|r| r.point.clone()),
            "iterations": located.as_ref().map(|r| r.iterations),
        }));
    } else {
        out!("verdict       {}", verdict.tag.kind());
        out!("tau product   {:.12}", verdict.tau_product);
        out!("tau first     [{:.12}, {:.12}]", verdict.tau1.0, verdict.tau1.1);
        out!("tau second    [{:.12}, {:.12}]", verdict.tau2.0, verdict.tau2.1);
        if !verdict.detail.is_empty() {
            out!("detail        {}", verdict.detail);
        }
        if let Some(r) = &located {
            out!("point         {:?}", r.point);
            out!("iterations    {}", r.iterations);
        }
    }
    Ok(!require || matches!(verdict.tag, GapLemmaTag::IntersectGuaranteed | GapLemmaTag::TriviallyIntersect { .. }))
}

fn bound_json(b: &DimensionBound) -> Value {
    serde_json::to_value(b).expect("bound serializes")
}

fn print_bound(b: &DimensionBound) {
    let kind = match b.kind {
        BoundKind::Intersection => "intersection",
        BoundKind::SingleSet => "single set",
        BoundKind::WinningSet => "winning set",
    };
    out!("bound      {kind}");
    out!("value      {:.12}", b.value);
    out!("d          {}", b.d);
    out!("c          {:.12}", b.c);
    out!("beta       {:.12}", b.beta);
    out!("lhs        {:.6e}", b.lhs);
    out!("rhs        {:.6e}", b.rhs);
    out!("feasible   {}", b.feasible);
    out!("certified  {}", b.certified);
}

fn finish_bound(b: DimensionBound, common: &BoundCommon) -> Outcome {
    if common.json {
        print_json(&bound_json(&b));
    } else {
        print_bound(&b);
    }
    Ok(!common.require_feasible || b.feasible)
}

fn run_bound(kind: BoundCommand) -> Outcome {
    match kind {
        BoundCommand::Intersect {
            taus,
            sup_diam,
            diam_b,
            d,
            c,
            sweep,
            common,
        } => {
            if let Some(steps) = sweep {
                let rows = sweep_c(&taus, sup_diam, diam_b, d, steps)?;
                out!("c,value,feasible");
                for r in &rows {
                    out!("{},{},{}", r.c, r.value, r.feasible);
                }
                return Ok(!common.require_feasible || rows.iter().any(|r| r.feasible));
            }
            let b = match c {
                Some(c) => intersection_bound(&taus, sup_diam, diam_b, d, c)?,
                None => match optimize_c(&taus, sup_diam, diam_b, d) {
                    Ok(b) => b,
                    Err(BoundsError::NoFeasibleC { d }) if !common.require_feasible => {
                        out!("no feasible exponent in (0, {d})");
                        return Ok(true);
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            finish_bound(b, &common)
        }
        BoundCommand::Single {
            tau,
            diam_b,
            diam_c,
            d,
            c,
            common,
        } => {
            let b = match c {
                Some(c) => single_set_bound(tau, diam_b, diam_c, d, c)?,
                None => match optimize_c(&[tau], diam_c, diam_b, d) {
                    Ok(mut b) => {
                        b.kind = BoundKind::SingleSet;
                        b
                    }
                    Err(BoundsError::NoFeasibleC { d }) if !common.require_feasible => {
                        out!("no feasible exponent in (0, {d})");
                        return Ok(true);
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            finish_bound(b, &common)
        }
        BoundCommand::Pattern {
            tau,
            diam_b,
            diam_c,
            d,
            count,
            json,
        } => {
            if let Some(n) = count {
                let t = min_tau_for_count(n, diam_b, diam_c, d)?;
                if json {
                    print_json(&json!({ "count": n, "min_tau": t }));
                } else {
                    out!("{t}");
                }
                return Ok(true);
            }
            let tau = tau.ok_or_else(|| Failure::usage("either --tau or --count is required"))?;
            let cap = pattern_capacity(tau, diam_b, diam_c, d)?;
            if json {
                print_json(&serde_json::to_value(cap).expect("capacity serializes"));
            } else {
                out!("count           {}", cap.count);
                out!("raw             {:.6e}", cap.raw);
                out!("beta            {}", cap.beta);
                out!("pre-asymptotic  {}", cap.pre_asymptotic);
            }
            Ok(true)
        }
        BoundCommand::Dim1d { tau, json } => {
            let v = dim_lower_1d(tau)?;
            if json {
                print_json(&json!({ "tau": tau, "value": v }));
            } else {
                out!("{v}");
            }
            Ok(true)
        }
        BoundCommand::Convex { tau, d, json } => {
            let v = convex_gap_dim_bound(tau, d)?;
            if json {
                print_json(&json!({ "tau": tau, "d": d, "value": v }));
            } else {
                out!("{v}");
            }
            Ok(true)
        }
    }
}

fn thickness_alice(choice: &str, alpha: f64, opts: &EnumerateOptions) -> Result<(AliceStrategy, Option<Arc<GapTable>>), Failure> {
    if choice == "pass" {
        return Ok((AliceStrategy::Pass, None));
    }
    let path = choice
        .strip_prefix("thickness:")
        .ok_or_else(|| Failure::usage(format!("unknown Alice strategy {choice:?}")))?;
    let table = Arc::new(GapTable::new(&load(Path::new(path))?, opts)?);
    Ok((AliceStrategy::Thickness(ThicknessStrategy::new(0, alpha, table.clone())), Some(table)))
}

fn run_game(args: GameArgs) -> Outcome {
    let p = parse_floats(&args.params, "--params")?;
    let [alpha, beta, c, rho] = p[..] else {
        return Err(Failure::usage("--params takes alpha,beta,c,rho"));
    };
    let opts = args.enumerate.options();
    let (alice, alice_table) = thickness_alice(&args.alice, alpha, &opts)?;
    let (bob_kind, bob_arg) = args
        .bob
        .split_once(':')
        .ok_or_else(|| Failure::usage("--bob takes chaser:<descriptor>, random:<point> or concentric:<point>"))?;
    let bob_table = match bob_kind {
        "chaser" => Some(Arc::new(GapTable::new(&load(Path::new(bob_arg))?, &opts)?)),
        "random" | "concentric" => None,
        other => return Err(Failure::usage(format!("unknown Bob policy {other:?}"))),
    };
    let target = match (&args.target, &alice_table, &bob_table) {
        (Some(path), _, _) => Arc::new(GapTable::new(&load(path)?, &opts)?),
        (None, Some(t), _) | (None, None, Some(t)) => t.clone(),
        (None, None, None) => return Err(Failure::usage("--target is required when neither player names a set")),
    };
    let d = target.enumeration.hull.dim();
    let params = GameParams::new(alpha, beta, c, rho, d)?;
    let mut rows = Vec::new();
    let mut all_good = true;
    for k in 0..args.matches {
        let seed = args.seed.wrapping_add(k);
        let mut bob = match bob_kind {
            "chaser" => BobPolicy::gap_chaser(bob_table.clone().expect("chaser table"), seed),
            "random" => BobPolicy::random_legal(parse_floats(bob_arg, "--bob")?, seed),
            _ => BobPolicy::ConcentricShrink {
                target: parse_floats(bob_arg, "--bob")?,
            },
        };
        let (state, result) = play_match(params, &alice, &mut bob, &target, args.stop)?;
        if k == 0 {
            if let Some(path) = &args.trace {
                let mut out = BufWriter::new(File::create(path)?);
                state.write_jsonl(&mut out)?;
                out.flush()?;
            }
        }
        all_good &= !matches!(result.verdict, Verdict::NotInS { .. });
        rows.push((seed, state.turns.len(), result));
    }
    if args.json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(seed, turns, r)| json!({ "seed": seed, "turns": turns, "result": r }))
            .collect();
        print_json(&Value::Array(v));
    } else {
        out!("{:>8} {:>6} {:>10} {:>14}  outcome", "seed", "turns", "verdict", "distance");
        for (seed, turns, r) in &rows {
            let (name, dist) = match r.verdict {
                Verdict::Erased { turn } => ("erased", format!("turn {turn}")),
                Verdict::InS { distance } => ("in_s", format!("{distance:.3e}")),
                Verdict::NotInS { distance } => ("not_in_s", format!("{distance:.3e}")),
            };
            out!("{seed:>8} {turns:>6} {name:>10} {dist:>14}  {:?}", r.outcome);
        }
    }
    Ok(all_good)
}

fn scaffold_params(args: &ScaffoldArgs) -> Result<ScaffoldParams, Failure> {
    let (d, alpha, beta, c, rho, gamma, x0) = if args.params.ends_with(".json") {
        let text = std::fs::read_to_string(&args.params).map_err(|e| Failure::usage(format!("{}: {e}", args.params)))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", args.params)))?;
        let num = |k: &str| v.get(k).and_then(Value::as_f64);
        let need = |k: &str| num(k).ok_or_else(|| Failure::usage(format!("{}: missing number {k:?}", args.params)));
        let x0 = v
            .get("x0")
            .and_then(Value::as_array)
            .map(|a| a.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect::<Vec<f64>>());
        (need("d")?, need("alpha")?, need("beta")?, need("c")?, need("rho")?, num("gamma"), x0)
    } else {
        let p = parse_floats(&args.params, "--params")?;
        match p[..] {
            [d, a, b, c, r] => (d, a, b, c, r, None, None),
            [d, a, b, c, r, g] => (d, a, b, c, r, Some(g), None),
            _ => return Err(Failure::usage("--params takes d,alpha,beta,c,rho[,gamma] or a .json file")),
        }
    };
    if !(d >= 1.0 && d.fract() == 0.0) {
        return Err(Failure::usage(format!("dimension must be a positive integer, got {d}")));
    }
    let d = d as u32;
    let mut params = match gamma {
        Some(g) => ScaffoldParams::new(d, alpha, beta, c, rho, g)?,
        None => ScaffoldParams::with_default_gamma(d, alpha, beta, c, rho)?,
    };
    let center = match &args.center {
        Some(s) => Some(parse_floats(s, "--center")?),
        None => x0,
    };
    if let Some(x0) = center {
        params = params.with_center(x0)?;
    }
    if args.allow_infeasible {
        params = params.allowing_infeasible();
    }
    Ok(params)
}

fn run_scaffold(args: ScaffoldArgs) -> Outcome {
    let params = scaffold_params(&args)?;
    let claims = check_claims(&params)?;
    let count = m_value(&params).ok();
    let dimension = scaffold_dimension(&params);
    let (feasibility_lhs, feasibility_rhs, feasible) = params.feasibility()?;
    let tree = match args.depth {
        Some(depth) => {
            let opts = EnumerateOptions {
                depth: args.gap_depth,
                cap: args.cap,
            };
            let (alice, _) = thickness_alice(&args.alice, params.alpha, &opts)?;
            Some(build_scaffold(&params, &alice, depth)?)
        }
        None => None,
    };
    if let (Some(path), Some(tree)) = (&args.emit, &tree) {
        let mut out = BufWriter::new(File::create(path)?);
        tree.write_jsonl(&mut out)?;
        out.flush()?;
    }
    if args.json {
        print_json(&json!({
            "params": params,
            "feasible": feasible,
            "m": count,
            "claims": claims,
            "dimension": dimension.as_ref().ok(),
            "nodes": tree.as_ref().map(|t| t.node_count()),
        }));
    } else {
        out!("d                {}", params.d);
        out!("gamma            {:.6e}", params.gamma);
        out!("N                {}", params.blocks);
        match count {
            Some(m) => match m.exact {
                Some(v) => out!("M                {v}"),
                None => out!("ln M             {:.6e}", m.log_m),
            },
            None => out!("M                not positive"),
        }
        out!("feasible         {feasible} (alpha^c = {feasibility_lhs:.6e}, allowed {feasibility_rhs:.6e})");
        out!("claim i          {}", claims.claim_i.holds);
        out!("claim ii         {}", claims.claim_ii.holds);
        out!("claim iii        {}", claims.claim_iii.holds);
        match &dimension {
            Ok(dim) => {
                out!("scaffold dim     {:.15}", dim.scaffold_value);
                out!("stated bound     {:.15}", dim.literal_bound);
                out!("corrected bound  {:.15}", dim.corrected_bound);
            }
            Err(e) => out!("dimension        {e}"),
        }
        if let Some(t) = &tree {
            out!("depth            {}", t.depth);
            out!("nodes            {}", t.node_count());
        }
    }
    Ok(true)
}

fn run_verify(kind: VerifyCommand) -> Outcome {
    match kind {
        VerifyCommand::Intersect {
            descriptors,
            level,
            budget,
            require_witness,
            json,
        } => {
            let specs = descriptors.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            let verdict = brute_intersection(&specs, level, budget)?;
            if json {
                print_json(&serde_json::to_value(&verdict).expect("verdict serializes"));
            } else {
                out!("verdict  {}", verdict.kind());
                if let IntersectionVerdict::NonemptyWitness { cell, .. } = &verdict {
                    out!("cell     {cell:?}");
                }
            }
            Ok(!require_witness || matches!(verdict, IntersectionVerdict::NonemptyWitness { .. }))
        }
        VerifyCommand::Boxdim {
            descriptor,
            levels,
            budget,
            csv,
            json,
        } => {
            let desc = load(&descriptor)?;
            let est = box_counting(&desc, &levels, budget)?;
            if csv {
                out!("scale,count");
                for (s, n) in &est.scales {
                    out!("{s},{n}");
                }
            } else if json {
                print_json(&serde_json::to_value(&est).expect("estimate serializes"));
            } else {
                out!("slope     {:.6}", est.slope);
                out!("residual  {:.3e}", est.residual);
                if !est.note.is_empty() {
                    out!("note      {}", est.note);
                }
            }
            Ok(true)
        }
        VerifyCommand::Pattern {
            descriptor,
            pattern,
            lambda,
            level,
            budget,
            limit,
        } => {
            let desc = load(&descriptor)?;
            let points = pattern
                .split(';')
                .map(|p| parse_floats(p, "--pattern"))
                .collect::<Result<Vec<_>, _>>()?;
            match pattern_search(&desc, &points, lambda, level, budget) {
                Ok(found) => {
                    let shown: Vec<&Vec<f64>> = found.iter().take(limit).collect();
                    out!("{}", json!({ "count": found.len(), "witnesses": shown }));
                    Ok(true)
                }
                Err(VerifyError::EmptyAtThisDepth(k)) => {
                    out!("{}", json!({ "count": 0, "level": k }));
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}
