use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tspd::evaluation::{simulate_timeline, PenaltyConfig, RelaxMode};
use tspd::genetic::{run_hga, Ablations, CrossoverKind, HgaParams};
use tspd::io::bench::{ablation_grid, bench, crossover_grid, BenchConfig, BenchSpec, WORKERS_ENV};
use tspd::io::{
    format_solution, generate_instance, parse_instance, solution_record, write_native, Format, GenParams, IoError,
};
use tspd::model::{GiantTour, Instance, Objective, Parameters};
use tspd::oracle::{enumerate_splits, event_timeline, exact_solve};
use tspd::split::split_scored;

const EXIT_USAGE: u8 = 1;
const EXIT_NO_FEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "tspd", version, about = "Truck-and-drone delivery routing by hybrid genetic search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the best solution found.
    Solve(SolveArgs),
    /// Write a random instance in the native format.
    Generate(GenerateArgs),
    /// Run a grid of configurations and seeds and write CSV.
    Bench(BenchArgs),
    /// Cross-check split, timelines and the search against exhaustive oracles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Cost,
    Time,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Cost => Objective::MinCost,
            ObjectiveArg::Time => Objective::MinTime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CrossoverArg {
    Dx,
    Ox,
    Pmx,
    Obx,
    Pbx,
}

impl From<CrossoverArg> for CrossoverKind {
    fn from(c: CrossoverArg) -> Self {
        match c {
            CrossoverArg::Dx => CrossoverKind::Dx,
            CrossoverArg::Ox => CrossoverKind::Ox,
            CrossoverArg::Pmx => CrossoverKind::Pmx,
            CrossoverArg::Obx => CrossoverKind::Obx,
            CrossoverArg::Pbx => CrossoverKind::Pbx,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RelaxArg {
    All,
    Truck,
    Drone,
    None,
}

impl From<RelaxArg> for RelaxMode {
    fn from(r: RelaxArg) -> Self {
        match r {
            RelaxArg::All => RelaxMode::All,
            RelaxArg::Truck => RelaxMode::Truck,
            RelaxArg::Drone => RelaxMode::Drone,
            RelaxArg::None => RelaxMode::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum FormatArg {
    #[default]
    Native,
    Murray,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file (native) or directory (murray).
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Native)]
    format: FormatArg,
    /// Override the drone endurance, minutes.
    #[arg(long)]
    endurance: Option<f64>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance, String> {
        load_instance(&self.instance, self.format, self.endurance)
    }
}

fn load_instance(path: &std::path::Path, format: FormatArg, endurance: Option<f64>) -> Result<Instance, String> {
    let format = match format {
        FormatArg::Native => Format::Native,
        FormatArg::Murray => Format::Murray,
    };
    let inst = parse_instance(path, format).map_err(|e| match e {
        IoError::File { .. } => e.to_string(),
        _ => format!("{}: {e}", path.display()),
    })?;
    match endurance {
        Some(e) => inst.with_endurance(e).map_err(|e| e.to_string()),
        None => Ok(inst),
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = CrossoverArg::Dx)]
    crossover: CrossoverArg,
    #[arg(long, value_enum, default_value_t = RelaxArg::All)]
    relax: RelaxArg,
    #[arg(long)]
    no_inf: bool,
    #[arg(long)]
    no_div: bool,
    #[arg(long)]
    no_repair: bool,
    #[arg(long)]
    no_restore: bool,
    /// Search parameters as `key=value`, comma separated or repeated,
    /// e.g. `mu=15,lambda=25,iter_ni=2500,time_limit=60`.
    #[arg(long = "params", value_delimiter = ',')]
    params: Vec<String>,
}

impl SearchArgs {
    fn hga_params(&self) -> Result<HgaParams, String> {
        let mut p = HgaParams {
            crossover: self.crossover.into(),
            relax: self.relax.into(),
            ablations: Ablations {
                no_inf: self.no_inf,
                no_div: self.no_div,
                no_repair: self.no_repair,
                no_restore: self.no_restore,
            },
            ..HgaParams::default()
        };
        for kv in &self.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, found `{kv}`"))?;
            p.set(k.trim(), v.trim())?;
        }
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Cost)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    /// Also write the one-line record to this file.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Side of the square holding the nodes, km.
    #[arg(long, default_value_t = 10.0)]
    area: f64,
    #[arg(long, default_value_t = 0.8)]
    eligible_frac: f64,
    #[arg(long, default_value_t = 20.0)]
    endurance: f64,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Standard,
    Crossover,
    Ablation,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectivesArg {
    Cost,
    Time,
    Both,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files or directories.
    #[arg(long, num_args = 1..)]
    instances: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Native)]
    format: FormatArg,
    /// Generate this many instances instead of reading files.
    #[arg(long)]
    generate: Option<usize>,
    /// Customer count of generated instances.
    #[arg(long, default_value_t = 50)]
    gen_n: usize,
    #[arg(long, value_enum, default_value_t = GridArg::Standard)]
    grid: GridArg,
    #[arg(long, value_enum, default_value_t = ObjectivesArg::Both)]
    objective: ObjectivesArg,
    /// Runs per configuration, with seeds 1..=runs.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    #[command(flatten)]
    search: SearchArgs,
    /// CSV of `instance,objective,value` best known values for the gap.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Output CSV; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random instances per check.
    #[arg(long, default_value_t = 20)]
    cases: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate(a),
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn solve(a: SolveArgs) -> Result<ExitCode, String> {
    let inst = a.instance.load()?;
    let params = a.search.hga_params()?;
    let obj = a.objective.into();
    match run_hga(&inst, &params, obj, a.seed) {
        Ok(run) => {
            print!("{}", format_solution(&run.best, &inst, obj));
            let record = solution_record(&run.best, &inst, obj);
            println!("{record}");
            if let Some(path) = a.record {
                std::fs::write(&path, format!("{record}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            eprintln!(
                "iterations {} wall {:.3}s",
                run.stats.iterations,
                run.stats.wall_time.as_secs_f64()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("{e}");
            eprintln!(
                "truck excess {} drone excess {}",
                e.summary.truck_excess, e.summary.drone_excess
            );
            eprint!("{}", format_solution(&e.best_infeasible, &inst, obj));
            Ok(ExitCode::from(EXIT_NO_FEASIBLE))
        }
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode, String> {
    if a.n == 0 {
        return Err("--n must be at least 1".into());
    }
    let gen = GenParams {
        area: a.area,
        drone_eligible_frac: a.eligible_frac,
        params: Parameters {
            endurance: a.endurance,
            ..Parameters::default()
        },
    };
    let text = write_native(&generate_instance(a.n, a.seed, &gen));
    match a.out {
        Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn read_reference(path: &std::path::Path) -> Result<HashMap<(String, Objective), f64>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = HashMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let bad = || format!("{}: row {}: expected instance,objective,value", path.display(), i + 2);
        let obj = match row.get(1) {
            Some("cost") => Objective::MinCost,
            Some("time") => Objective::MinTime,
            _ => return Err(bad()),
        };
        let value: f64 = row.get(2).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        out.insert((row.get(0).ok_or_else(bad)?.to_string(), obj), value);
    }
    Ok(out)
}

fn run_bench(a: BenchArgs) -> Result<ExitCode, String> {
    let instances: Vec<Instance> = match a.generate {
        Some(count) => (1..=count as u64)
            .map(|seed| generate_instance(a.gen_n, seed, &GenParams::default()))
            .collect(),
        None => a
            .instances
            .iter()
            .map(|p| load_instance(p, a.format, None))
            .collect::<Result<_, _>>()?,
    };
    if instances.is_empty() {
        return Err("no instances: pass --instances or --generate".into());
    }
    let base = a.search.hga_params()?;
    let configs = match a.grid {
        GridArg::Standard => vec![BenchConfig::new("standard", base)],
        GridArg::Crossover => crossover_grid(&base),
        GridArg::Ablation => ablation_grid(&base),
    };
    let objectives = match a.objective {
        ObjectivesArg::Cost => vec![Objective::MinCost],
        ObjectivesArg::Time => vec![Objective::MinTime],
        ObjectivesArg::Both => vec![Objective::MinCost, Objective::MinTime],
    };
    let seeds: Vec<u64> = (1..=a.runs).collect();
    let reference = match &a.reference {
        Some(p) => read_reference(p)?,
        None => HashMap::new(),
    };
    let spec = BenchSpec {
        instances: &instances,
        configs: &configs,
        objectives: &objectives,
        seeds: &seeds,
        reference,
        workers: a.workers.unwrap_or_else(tspd::io::bench::default_workers),
    };
    let report = bench(&spec);
    match a.out {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            report.write_csv(file).map_err(|e| e.to_string())?;
        }
        None => report.write_csv(std::io::stdout().lock()).map_err(|e| e.to_string())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let objectives = [Objective::MinCost, Objective::MinTime];
    let relaxes = [RelaxMode::All, RelaxMode::Truck, RelaxMode::Drone, RelaxMode::None];
    let mut failures = 0usize;

    let (mut checked, mut wrong) = (0usize, 0usize);
    for case in 0..a.cases {
        let n = rng.gen_range(2..=7);
        let inst = generate_instance(n, a.seed.wrapping_mul(1000).wrapping_add(case), &GenParams::default());
        let mut seq: Vec<usize> = (1..=n).collect();
        seq.shuffle(&mut rng);
        let gt = GiantTour::new(seq, n).map_err(|e| e.to_string())?;
        for obj in objectives {
            for omega in [0.1, 1.0, 10.0] {
                for relax in relaxes {
                    let cfg = PenaltyConfig::new(omega, relax);
                    let got = split_scored(&gt, &inst, &cfg, obj);
                    let best = enumerate_splits(&gt, &inst, &cfg, obj)
                        .map_err(|e| e.to_string())?
                        .into_iter()
                        .map(|(_, phi)| phi)
                        .fold(f64::INFINITY, f64::min);
                    let agree = (got.phi - best).abs() <= 1e-9 * best.abs().max(1.0);
                    checked += 1;
                    wrong += usize::from(!agree);
                    let walk = simulate_timeline(&got.solution, &inst);
                    let events = event_timeline(&got.solution, &inst);
                    checked += 1;
                    wrong += usize::from(walk != events);
                }
            }
        }
    }
    println!("split and timelines: {} checks, {} mismatches", checked, wrong);
    failures += wrong;

    let params = HgaParams {
        iter_ni: 500,
        ..HgaParams::default()
    };
    let (mut solved, mut missed) = (0usize, 0usize);
    for case in 0..a.cases.min(10) {
        let n = rng.gen_range(4..=7);
        let inst = generate_instance(n, a.seed.wrapping_mul(7919).wrapping_add(case), &GenParams::default());
        for obj in objectives {
            let exact = exact_solve(&inst, obj, &PenaltyConfig::default()).map_err(|e| e.to_string())?;
            let found = run_hga(&inst, &params, obj, case).map(|r| r.value).unwrap_or(f64::INFINITY);
            solved += 1;
            if found > exact.value + 1e-9 * exact.value.abs().max(1.0) {
                missed += 1;
            }
        }
    }
    println!("search vs exact: {solved} runs, {missed} above the optimum");

    println!("{}", if failures == 0 { "verify: ok" } else { "verify: FAILED" });
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_USAGE)
    })
}
