//! Command-line front end. Human-readable summaries go to stdout (silenced
//! by `--quiet`); JSON reports go to `-o` or, with `--json`, to stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::circuit::{build_ansatz, AnsatzSpec, Circuit, CircuitError, Family};
use crate::entangle::{
    is_linear, layer_power_is_identity, layer_to_gf2, order, synthesize_column_move, BasisPermutation, CxLayer,
    EntangleError, DEFAULT_ORDER_CAP,
};
use crate::qsim::gates_unitary;
use crate::rank::{expressive_rank, Mode, RankError, RankOptions, DEFAULT_REL_TOL};
use crate::reduce::{combine_parameters, euler_certificate, reduce_alternating_to_linear, shift_certificate, ReduceError};
use crate::repro;
use crate::vqa::{
    bundled, default_tsp_penalty, exact_minimum, load_hamiltonian, optimize_against, DistanceMatrix, Graph,
    Interpretation, NelderMead, Observable, OptimizeConfig, Problem, RunResult, VqaError, DEFAULT_COVER_PENALTY,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn validation(m: impl std::fmt::Display) -> Self {
        Self { code: EXIT_VALIDATION, message: m.to_string() }
    }

    fn io(m: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: m.to_string() }
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        Self::validation(e)
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        Self::validation(e)
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        Self::validation(e)
    }
}

impl From<EntangleError> for CliError {
    fn from(e: EntangleError) -> Self {
        Self::validation(e)
    }
}

impl From<VqaError> for CliError {
    fn from(e: VqaError) -> Self {
        match e {
            VqaError::Io(m) => Self::io(m),
            e => Self::validation(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ansatz-lab", version, about = "Build, reduce and benchmark hardware-efficient ansatzes")]
pub struct Cli {
    /// Suppress the human-readable summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Print the JSON report to stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Base seed for every randomized step.
    #[arg(long, global = true, env = "ANSATZ_LAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an ansatz and write its circuit JSON.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
        /// Circuit JSON output path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count effective parameters with the rewrite rules.
    Reduce {
        #[command(flatten)]
        input: CircuitInput,
        /// Run the shift and Euler certificates; exit 3 if either fails.
        #[arg(long)]
        check: bool,
        /// Certificate draws per class.
        #[arg(long, default_value_t = 10)]
        draws: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Numerical rank of the parameter Jacobian.
    Rank {
        #[command(flatten)]
        input: CircuitInput,
        #[arg(long, value_enum, default_value_t = ModeArg::Unitary)]
        mode: ModeArg,
        /// Number of random parameter points.
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        /// For an alternating RX-CX circuit, also rank its linear rewrite and compare.
        #[arg(long)]
        vs_linear: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// CX-only entanglement layers over GF(2).
    #[command(subcommand)]
    Entangle(EntangleCmd),
    /// Optimize an ansatz against a problem observable.
    Vqa(VqaArgs),
    /// Run the acceptance matrix.
    Repro {
        /// Comma-separated criterion numbers (all when omitted).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Unitary,
    State,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unitary => Mode::Unitary,
            ModeArg::State => Mode::State,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct SpecArgs {
    /// Ansatz family, e.g. rx-cx-l, rx-rz-cx-a, rx-cx-l-modified:2,0,1.
    #[arg(long)]
    pub family: String,
    /// Qubit count.
    #[arg(long)]
    pub n: usize,
    /// Entanglement layers.
    #[arg(long)]
    pub layers: usize,
}

impl SpecArgs {
    fn spec(&self) -> Result<AnsatzSpec, CliError> {
        let family: Family = self.family.parse().map_err(CliError::validation)?;
        let spec = AnsatzSpec::new(family, self.n, self.layers);
        spec.validate()?;
        Ok(spec)
    }
}

/// A circuit file or an inline ansatz spec.
#[derive(Debug, Args, Clone)]
pub struct CircuitInput {
    /// Circuit JSON file.
    pub circuit: Option<PathBuf>,
    #[arg(long, conflicts_with = "circuit", requires_all = ["n", "layers"])]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
}

impl CircuitInput {
    fn load(&self) -> Result<(Circuit, Value), CliError> {
        match (&self.circuit, &self.family, self.n, self.layers) {
            (Some(path), ..) => {
                let text = read(path)?;
                Ok((Circuit::from_json(&text)?, json!({"circuit": path})))
            }
            (None, Some(f), Some(n), Some(l)) => {
                let spec = SpecArgs { family: f.clone(), n, layers: l }.spec()?;
                Ok((build_ansatz(&spec)?, json!({"family": f, "n": n, "layers": l})))
            }
            _ => Err(CliError::validation("give a circuit file or --family, --n and --layers")),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum EntangleCmd {
    /// Smallest k with E^k = I.
    Order {
        /// `linear` for the canonical chain, or a file of `control target` lines.
        #[arg(long)]
        layer: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap: u64,
    },
    /// Decide whether a basis permutation is realizable by CX gates.
    Linearity {
        /// `swap:a,b` (1-based columns), `images:i0,i1,...` (0-based labels), or a file of images.
        #[arg(long)]
        perm: String,
        #[arg(long)]
        n: usize,
    },
    /// CX circuit moving column `from` of any unitary to column `to` (1-based, ≥ 2).
    Move {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
}

#[derive(Debug, Args)]
pub struct VqaArgs {
    /// Problem kind; implied by --bundled.
    #[arg(long, value_enum)]
    pub problem: Option<ProblemKind>,
    /// Problem input: graph file, distance CSV, or Pauli-sum file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Shipped instance.
    #[arg(long, value_enum, conflicts_with = "input")]
    pub bundled: Option<BundledName>,
    /// QUBO penalty for vertex cover and TSP.
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long, default_value = "rx-rz-cx-a")]
    pub family: String,
    /// Compare several families side by side (overrides --family).
    #[arg(long, value_delimiter = ',')]
    pub compare: Vec<String>,
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    /// Random starts per seed.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Independent seeds, starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Function evaluations per restart (default 500 per parameter).
    #[arg(long)]
    pub max_evals: Option<usize>,
    /// Nelder–Mead convergence threshold on the simplex value spread.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Initial simplex edge length.
    #[arg(long, default_value_t = NelderMead::default().initial_step)]
    pub step: f64,
    /// Stop a seed's restarts once ε drops below this.
    #[arg(long)]
    pub target_epsilon: Option<f64>,
    /// Exit 3 unless every run reaches ε below this.
    #[arg(long)]
    pub check_epsilon: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ProblemKind {
    Maxcut,
    VertexCover,
    Tsp,
    Hamiltonian,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum BundledName {
    MaxcutN4,
    VertexCoverN6,
    Tsp3,
    H2N4,
    TfimN6,
    XxzN6,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// What a command produced.
pub struct Output {
    pub human: String,
    pub report: Value,
    pub code: i32,
}

fn report(command: &str, config: Value, result: Value) -> Value {
    json!({"tool": "ansatz-lab", "version": env!("CARGO_PKG_VERSION"), "command": command, "config": config, "result": result})
}

/// Runs `cli`, printing summaries and writing reports; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return EXIT_VALIDATION;
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let (quiet, as_json) = (cli.quiet, cli.json);
    let output_path = match &cli.command {
        Command::Reduce { output, .. }
        | Command::Rank { output, .. }
        | Command::Repro { output, .. }
        | Command::Vqa(VqaArgs { output, .. }) => output.clone(),
        _ => None,
    };
    match execute(&cli) {
        Ok(out) => {
            if !quiet && !as_json {
                print!("{}", out.human);
            }
            if as_json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
            }
            if let Some(p) = output_path {
                let text = serde_json::to_string_pretty(&out.report).expect("serializable") + "\n";
                if let Err(e) = write(&p, &text) {
                    eprintln!("error: {}", e.message);
                    return e.code;
                }
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Build { spec, output } => cmd_build(spec, output.as_deref()),
        Command::Reduce { input, check, draws, .. } => cmd_reduce(input, *check, *draws, cli.seed),
        Command::Rank { input, mode, seeds, rel_tol, vs_linear, .. } => {
            cmd_rank(input, (*mode).into(), *seeds, *rel_tol, *vs_linear, cli.seed)
        }
        Command::Entangle(e) => cmd_entangle(e, cli.seed),
        Command::Vqa(args) => cmd_vqa(args, cli.seed),
        Command::Repro { only, .. } => cmd_repro(only),
    }
}

fn cmd_build(args: &SpecArgs, output: Option<&Path>) -> Result<Output, CliError> {
    let spec = args.spec()?;
    let c = build_ansatz(&spec)?;
    let r = c.resources();
    let human = format!("params={} cx={} layers={}\n", r.params, r.cx, r.layers);
    let json_text = c.to_json();
    let human = match output {
        Some(p) => {
            write(p, &(json_text.clone() + "\n"))?;
            human
        }
        // The circuit itself is the output; the summary would corrupt it.
        None => json_text.clone() + "\n",
    };
    let config = json!({"family": args.family, "n": args.n, "layers": args.layers});
    let result = json!({"resources": r, "circuit": serde_json::from_str::<Value>(&json_text).expect("valid JSON")});
    Ok(Output { human, report: report("build", config, result), code: EXIT_OK })
}

fn cmd_reduce(input: &CircuitInput, check: bool, draws: usize, seed: u64) -> Result<Output, CliError> {
    let (c, mut config) = input.load()?;
    config["check"] = json!(check);
    config["draws"] = json!(draws);
    config["seed"] = json!(seed);
    let rep = combine_parameters(&c)?;
    let mut human = format!(
        "effective={} params={} cx={} periodic={}\nper-qubit: {:?}\n",
        rep.effective_count,
        rep.resources.params,
        rep.resources.cx,
        rep.periodic,
        rep.per_qubit_counts()
    );
    for (k, cls) in rep.map.classes.iter().enumerate() {
        let members: Vec<String> =
            cls.members.iter().map(|m| format!("{}θ{}", if m.sign < 0 { "-" } else { "+" }, m.param)).collect();
        let _ = writeln!(human, "  class {k}: q{} {} [{}]", cls.qubit, cls.axis.name(), members.join(" "));
    }
    for m in &rep.euler_merges {
        let _ = writeln!(human, "  euler merge on q{}: {} classes -> 3", m.qubit, m.classes.len());
    }
    let mut result = rep.to_json();
    let mut code = EXIT_OK;
    if check {
        let shift = shift_certificate(&c, &rep.map, draws, seed);
        let euler = euler_certificate(&rep, draws, seed);
        let ok = shift.passed() && euler.passed();
        let _ = writeln!(
            human,
            "certificate: {} (shift worst {:.2e} over {} checks, euler worst {:.2e} over {} checks)",
            if ok { "PASS" } else { "FAIL" },
            shift.worst,
            shift.checks,
            euler.worst,
            euler.checks
        );
        result["certificate"] = json!({"passed": ok, "shift": shift, "euler": euler});
        if !ok {
            code = EXIT_CHECK_FAILED;
        }
    }
    Ok(Output { human, report: report("reduce", config, result), code })
}

fn cmd_rank(
    input: &CircuitInput,
    mode: Mode,
    seeds: usize,
    rel_tol: f64,
    vs_linear: bool,
    seed: u64,
) -> Result<Output, CliError> {
    if seeds == 0 {
        return Err(CliError::validation("--seeds must be at least 1"));
    }
    let (c, mut config) = input.load()?;
    config["mode"] = json!(mode);
    config["seeds"] = json!(seeds);
    config["rel_tol"] = json!(rel_tol);
    config["seed"] = json!(seed);
    let opts = RankOptions { mode, seeds, base_seed: seed, rel_tol };
    let r = expressive_rank(&c, &opts)?;
    let mut human = format!("rank={} params={} mode={mode:?} seeds={seeds}\n", r.rank, c.param_count());
    if r.seeds_disagree {
        let _ = writeln!(human, "warning: ranks differ across seeds: {:?}", r.ranks);
    }
    let mut result = json!({"rank": r});
    if vs_linear {
        let (lin, _) = reduce_alternating_to_linear(&c)?;
        let rl = expressive_rank(&lin, &opts)?;
        let equal = rl.rank == r.rank;
        let _ = writeln!(human, "linear form rank={}\n{}", rl.rank, if equal { "EQUAL" } else { "DIFFERENT" });
        result["linear_rank"] = json!(rl);
        result["equal"] = json!(equal);
    }
    Ok(Output { human, report: report("rank", config, result), code: EXIT_OK })
}

fn parse_perm(spec: &str, n: usize) -> Result<BasisPermutation, CliError> {
    if n > 20 {
        return Err(CliError::validation("permutations are limited to 20 qubits"));
    }
    let list = |s: &str| -> Result<Vec<u64>, CliError> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|_| CliError::validation(format!("bad label '{t}'"))))
            .collect()
    };
    if let Some(rest) = spec.strip_prefix("swap:") {
        let cols = list(rest)?;
        let [a, b] = cols[..] else { return Err(CliError::validation("swap needs two columns")) };
        if a == 0 || b == 0 {
            return Err(CliError::validation("columns are 1-based"));
        }
        return Ok(BasisPermutation::transposition(n, a - 1, b - 1)?);
    }
    let images = match spec.strip_prefix("images:") {
        Some(rest) => list(rest)?,
        None => list(&read(Path::new(spec))?)?,
    };
    Ok(BasisPermutation::new(n, images)?)
}

fn load_layer(spec: &str, n: usize) -> Result<CxLayer, CliError> {
    let layer = if spec == "linear" {
        CxLayer::linear_chain(n)
    } else {
        read(Path::new(spec))?.parse::<CxLayer>()?
    };
    layer.validate(n)?;
    Ok(layer)
}

fn cmd_entangle(cmd: &EntangleCmd, seed: u64) -> Result<Output, CliError> {
    match cmd {
        EntangleCmd::Order { layer, n, cap } => {
            let l = load_layer(layer, *n)?;
            let k = order(&layer_to_gf2(&l, *n)?, *cap)?;
            let verified = if *n <= 12 { Some(layer_power_is_identity(&l, *n, k)?) } else { None };
            let mut human = format!("k={k}\n");
            match verified {
                Some(v) => {
                    let _ = writeln!(human, "E^k=I: {v}");
                }
                None => human.push_str("E^k=I: not checked (n > 12)\n"),
            }
            let code = if verified == Some(false) { EXIT_CHECK_FAILED } else { EXIT_OK };
            let config = json!({"layer": layer, "n": n, "cap": cap});
            Ok(Output { human, report: report("entangle order", config, json!({"k": k, "verified": verified})), code })
        }
        EntangleCmd::Linearity { perm, n } => {
            let p = parse_perm(perm, *n)?;
            let config = json!({"perm": perm, "n": n});
            match is_linear(&p) {
                Ok(m) => {
                    let synth = crate::entangle::gauss_decompose(&m)?;
                    let human = format!("LINEAR\nmatrix:\n{m}\nCX circuit ({} gates):\n{synth}", synth.len());
                    let result = json!({"linear": true, "matrix": m.to_string(), "cx": synth.to_string()});
                    Ok(Output { human, report: report("entangle linearity", config, result), code: EXIT_OK })
                }
                Err(w) => {
                    let human = format!("NOT LINEAR, witness: {w}\n");
                    let result = json!({"linear": false, "witness": {"x": w.x, "y": w.y,
                        "image_of_xor": w.image_of_xor, "xor_of_images": w.xor_of_images}});
                    Ok(Output { human, report: report("entangle linearity", config, result), code: EXIT_OK })
                }
            }
        }
        EntangleCmd::Move { n, from, to } => {
            if *n > 10 {
                return Err(CliError::validation("column moves are verified densely; n ≤ 10"));
            }
            let layer = synthesize_column_move(*n, *from, *to)?;
            let dim = 1usize << n;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
                use rand::Rng;
                crate::qsim::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .qr()
            .q();
            let moved = &u * gates_unitary(*n, &layer.gates()).0;
            let worst = (0..dim).map(|r| (moved[(r, *to as usize - 1)] - u[(r, *from as usize - 1)]).norm()).fold(0.0, f64::max);
            let verified = worst < 1e-12;
            let gates: Vec<String> = layer.pairs.iter().map(|(c, t)| format!("CX({c},{t})")).collect();
            let human = format!(
                "{}\nverified: {verified}\n",
                if gates.is_empty() { "(no gates)".to_string() } else { gates.join(" ") }
            );
            let config = json!({"n": n, "from": from, "to": to, "seed": seed});
            let result = json!({"cx": layer.pairs, "verified": verified, "max_deviation": worst});
            let code = if verified { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok(Output { human, report: report("entangle move", config, result), code })
        }
    }
}

fn load_problem(args: &VqaArgs) -> Result<(Problem, String), CliError> {
    let need_input = || args.input.as_deref().ok_or_else(|| CliError::validation("--input is required"));
    if let Some(b) = args.bundled {
        let cover = args.penalty.unwrap_or(DEFAULT_COVER_PENALTY);
        let p = match b {
            BundledName::MaxcutN4 => Problem::MaxCut(bundled::maxcut_n4()),
            BundledName::VertexCoverN6 => Problem::VertexCover { graph: bundled::vertex_cover_n6(), penalty: cover },
            BundledName::Tsp3 => {
                let d = bundled::tsp_3();
                let penalty = args.penalty.unwrap_or_else(|| default_tsp_penalty(&d));
                Problem::Tsp { distances: d, penalty }
            }
            BundledName::H2N4 => Problem::Hamiltonian(bundled::H2_N4.observable()),
            BundledName::TfimN6 => Problem::Hamiltonian(bundled::TFIM_N6.observable()),
            BundledName::XxzN6 => Problem::Hamiltonian(bundled::XXZ_N6.observable()),
        };
        let name = b.to_possible_value().expect("not skipped").get_name().to_string();
        return Ok((p, name));
    }
    let kind = args.problem.ok_or_else(|| CliError::validation("give --problem with --input, or --bundled"))?;
    let path = need_input()?;
    let p = match kind {
        ProblemKind::Maxcut => Problem::MaxCut(Graph::load(path)?),
        ProblemKind::VertexCover => {
            Problem::VertexCover { graph: Graph::load(path)?, penalty: args.penalty.unwrap_or(DEFAULT_COVER_PENALTY) }
        }
        ProblemKind::Tsp => {
            let d = DistanceMatrix::load(path)?;
            let penalty = args.penalty.unwrap_or_else(|| default_tsp_penalty(&d));
            Problem::Tsp { distances: d, penalty }
        }
        ProblemKind::Hamiltonian => Problem::Hamiltonian(load_hamiltonian(path)?),
    };
    Ok((p, path.display().to_string()))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

fn cmd_vqa(args: &VqaArgs, seed: u64) -> Result<Output, CliError> {
    if args.restarts == 0 || args.seeds == 0 {
        return Err(CliError::validation("--restarts and --seeds must be positive"));
    }
    if args.tol.is_nan() || args.step.is_nan() || args.tol <= 0.0 || args.step <= 0.0 {
        return Err(CliError::validation("--tol and --step must be positive"));
    }
    let families: Vec<String> = if args.compare.is_empty() { vec![args.family.clone()] } else { args.compare.clone() };
    let (problem, name) = load_problem(args)?;
    let (obs, interp): (Observable, Interpretation) = problem.encode()?;
    let n = obs.n_qubits();
    let circuits = families
        .iter()
        .map(|f| {
            let spec = SpecArgs { family: f.clone(), n, layers: args.layers }.spec()?;
            Ok((f.clone(), build_ansatz(&spec)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let exact = exact_minimum(&obs)?.energy;
    let minimizer = NelderMead { tol: args.tol, initial_step: args.step, ..NelderMead::default() };

    let mut human = format!(
        "{:<18} {:<14} {:>8} {:>6} {:>7} {:>14} {:>14} {:>11}\n",
        "name", "ansatz", "params", "CXs", "layers", "optimized", "optimal", "error ε"
    );
    let mut rows = vec![];
    let mut all_ok = true;
    for (family, c) in &circuits {
        let res = c.resources();
        let runs: Vec<RunResult> = (0..args.seeds)
            .map(|s| {
                let cfg = OptimizeConfig {
                    restarts: args.restarts,
                    seed: seed.wrapping_add(s),
                    max_evals: args.max_evals,
                    minimizer,
                    target_epsilon: args.target_epsilon,
                };
                optimize_against(c, &obs, exact, &cfg)
            })
            .collect::<Result<_, _>>()?;
        let eps: Vec<f64> = runs.iter().map(|r| r.epsilon).collect();
        let best = runs.iter().min_by(|a, b| a.e_a.total_cmp(&b.e_a)).expect("at least one seed");
        if let Some(t) = args.check_epsilon {
            all_ok &= eps.iter().all(|&e| e < t);
        }
        let _ = writeln!(
            human,
            "{:<18} {:<14} {:>8} {:>6} {:>7} {:>14.6} {:>14.6} {:>11.3e}",
            name,
            family,
            res.params,
            res.cx,
            res.layers,
            interp.report(best.e_a),
            interp.report(exact),
            median(&eps)
        );
        rows.push(json!({
            "family": family, "resources": res,
            "reported_cost": interp.report(best.e_a), "reported_optimum": interp.report(exact),
            "median_epsilon": median(&eps), "runs": runs,
        }));
    }
    if args.seeds > 1 {
        let _ = writeln!(human, "(error is the median over {} seeds)", args.seeds);
    }
    let config = json!({
        "problem": problem.kind(), "instance": name, "penalty": args.penalty, "layers": args.layers,
        "families": families, "restarts": args.restarts, "seeds": args.seeds, "seed": seed,
        "max_evals": args.max_evals, "tol": args.tol, "step": args.step, "target_epsilon": args.target_epsilon,
        "check_epsilon": args.check_epsilon,
    });
    let result = json!({"E": exact, "interpretation": interp, "n_qubits": n, "ansatzes": rows});
    let code = if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Output { human, report: report("vqa", config, result), code })
}

fn cmd_repro(only: &[u8]) -> Result<Output, CliError> {
    let ids: Vec<u8> = if only.is_empty() { (1..=11).collect() } else { only.to_vec() };
    let mut outcomes = vec![];
    let mut human = String::new();
    for id in ids {
        let o = repro::run(id).ok_or_else(|| CliError::validation(format!("no criterion {id}")))?;
        let _ = writeln!(human, "{}", o.line());
        outcomes.push(o);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(human, "{passed}/{} criteria passed", outcomes.len());
    let code = if passed == outcomes.len() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Output { human, report: repro::summary_json(&outcomes), code })
}
