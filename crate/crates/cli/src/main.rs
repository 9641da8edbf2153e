use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use anfbridge::cnf::{cnf_to_anf, ConvParams};
use anfbridge::gen::{
    feistel_keys, generate_instance, toy_feistel_encrypt, BenchKind, BenchSpec, Instance,
};
use anfbridge::io::{
    parse_anf, parse_dimacs, write_anf, write_dimacs, write_map, write_processed_anf,
    write_solution,
};
use anfbridge::par::{self, Exec};
use anfbridge::pipeline::{
    convert_only, run, IterationTrace, PassMode, PipelineConfig, PipelineResult, PipelineStatus,
};
use anfbridge::sat::{ConflictBudget, SolveStatus};
use anfbridge::xl::XlParams;
use anfbridge::AnfSystem;

/// Learn linear facts from a GF(2) polynomial system with XL, ElimLin and a
/// conflict-bounded SAT solver, and emit the simplified ANF and CNF.
#[derive(Parser, Debug)]
#[command(name = "anfbridge", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Option<Cmd>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a generated benchmark instance in ANF format.
    Gen(GenArgs),
    /// Run generated instances with and without learning and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct Params {
    /// XL expansion degree D.
    #[arg(long = "xl-deg", default_value_t = 1)]
    xl_deg: usize,
    /// Karnaugh bound K: pieces with at most K variables are minimized exactly.
    #[arg(long, default_value_t = 8)]
    karn: usize,
    /// XOR-cutting length L.
    #[arg(long = "xor-cut", default_value_t = 5)]
    xor_cut: usize,
    /// Clause-cutting length L' for CNF input.
    #[arg(long = "clause-cut", default_value_t = 5)]
    clause_cut: usize,
    /// Fixed conflict budget; without it the budget escalates from 10000 to 100000.
    #[arg(long = "confl-budget")]
    confl_budget: Option<u64>,
    /// Subsampling exponent M.
    #[arg(long = "sample-m", default_value_t = 30)]
    sample_m: u32,
    /// Expansion allowance dM.
    #[arg(long = "sample-dm", default_value_t = 4)]
    sample_dm: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-time limit in seconds.
    #[arg(long = "max-time")]
    max_time: Option<f64>,
    /// Stop as soon as the SAT solver finds a model.
    #[arg(long = "stop-on-sat")]
    stop_on_sat: bool,
    /// Propagate learnt facts once per pass instead of after every phase.
    #[arg(long)]
    deferred: bool,
    /// Run every kernel on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl Params {
    fn config(&self) -> Result<PipelineConfig> {
        let conv = ConvParams {
            karnaugh: self.karn,
            xor_cut: self.xor_cut,
            clause_cut: self.clause_cut,
        };
        conv.validate()?;
        let max_time = match self.max_time {
            Some(s) if !(s.is_finite() && s >= 0.0) => {
                bail!("--max-time must be a non-negative number")
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(PipelineConfig {
            xl: XlParams {
                degree: self.xl_deg,
                sample_exp: self.sample_m,
                expand_exp: self.sample_dm,
                seed: self.seed,
            },
            conv,
            budget: self
                .confl_budget
                .map_or_else(ConflictBudget::default, ConflictBudget::fixed),
            max_time,
            stop_on_sat: self.stop_on_sat,
            mode: if self.deferred {
                PassMode::Deferred
            } else {
                PassMode::Eager
            },
            exec: if self.sequential {
                Exec::Sequential
            } else {
                Exec::default()
            },
        })
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Input system in ANF format.
    #[arg(long, value_name = "FILE", conflicts_with = "cnf")]
    anf: Option<PathBuf>,
    /// Input in DIMACS CNF format.
    #[arg(long, value_name = "FILE")]
    cnf: Option<PathBuf>,
    /// Write the processed ANF here.
    #[arg(long = "out-anf", value_name = "FILE")]
    out_anf: Option<PathBuf>,
    /// Write the processed CNF here.
    #[arg(long = "out-cnf", value_name = "FILE")]
    out_cnf: Option<PathBuf>,
    /// Write the CNF variable map here.
    #[arg(long = "out-map", value_name = "FILE")]
    out_map: Option<PathBuf>,
    /// Write the status and model here.
    #[arg(long = "out-solution", value_name = "FILE")]
    out_solution: Option<PathBuf>,
    /// Convert only: no propagation, no learning, one SAT call at the top budget.
    #[arg(long = "no-learn")]
    no_learn: bool,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum GenKind {
    /// Random system with a planted solution.
    Planted {
        #[arg(long, default_value_t = 12)]
        vars: usize,
        #[arg(long, default_value_t = 16)]
        polys: usize,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Toy Feistel key recovery.
    Feistel {
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
    },
}

impl GenKind {
    fn bench_kind(self) -> BenchKind {
        match self {
            GenKind::Planted {
                vars,
                polys,
                degree,
            } => BenchKind::RandomPlanted {
                vars,
                polys,
                degree,
            },
            GenKind::Feistel {
                width,
                rounds,
                pairs,
            } => BenchKind::ToyFeistel {
                width,
                rounds,
                pairs,
            },
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Planted,
    Feistel,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::Feistel)]
    family: Family,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// First instance seed; instance i uses seed + i.
    #[arg(long = "first-seed", default_value_t = 1)]
    first_seed: u64,
    /// Feistel block width.
    #[arg(long, default_value_t = 8)]
    width: usize,
    /// Feistel rounds, cycled from min to max across instances.
    #[arg(long = "rounds-min", default_value_t = 2)]
    rounds_min: usize,
    #[arg(long = "rounds-max", default_value_t = 4)]
    rounds_max: usize,
    #[arg(long, default_value_t = 1)]
    pairs: usize,
    /// Planted-system variables.
    #[arg(long, default_value_t = 14)]
    vars: usize,
    #[arg(long, default_value_t = 20)]
    polys: usize,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// CSV report path.
    #[arg(long, short, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    params: Params,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn solve_status(s: PipelineStatus) -> SolveStatus {
    match s {
        PipelineStatus::Sat => SolveStatus::Sat,
        PipelineStatus::Unsat => SolveStatus::Unsat,
        PipelineStatus::Fixpoint => SolveStatus::Unknown,
    }
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode> {
    let cfg = args.params.config()?;
    let (sys, shown_vars) = match (&args.anf, &args.cnf) {
        (Some(p), None) => {
            let sys = parse_anf(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            let n = sys.num_vars();
            (sys, n)
        }
        (None, Some(p)) => {
            let cnf = parse_dimacs(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            (cnf_to_anf(&cnf, &cfg.conv)?, cnf.num_vars)
        }
        (None, None) => bail!("one of --anf or --cnf is required"),
        (Some(_), Some(_)) => bail!("--anf and --cnf are mutually exclusive"),
    };

    let result = if args.no_learn {
        convert_only(&sys, &cfg)?
    } else {
        run(&sys, &cfg)?
    };
    report(&result);

    write(&args.out_anf, &write_processed_anf(&result.system))?;
    write(&args.out_cnf, &write_dimacs(&result.cnf))?;
    write(&args.out_map, &write_map(&result.map))?;
    let status = solve_status(result.status);
    let model = result.model.as_ref().map(|m| &m[..shown_vars]);
    let solution = write_solution(status, model);
    write(&args.out_solution, &solution)?;
    print!("{solution}");

    Ok(ExitCode::from(match status {
        SolveStatus::Sat => 10,
        SolveStatus::Unsat => 20,
        SolveStatus::Unknown => 0,
    }))
}

fn report(r: &PipelineResult) {
    let sum = |f: fn(&IterationTrace) -> usize| r.trace.iter().map(f).sum::<usize>();
    println!(
        "c iterations {} facts xl {} elimlin {} sat {}",
        r.trace.len(),
        sum(|t| t.xl_facts),
        sum(|t| t.elimlin_facts),
        sum(|t| t.sat_facts)
    );
    println!(
        "c processed anf {} polynomials, cnf {} variables {} clauses",
        r.system.poly_count(),
        r.cnf.num_vars,
        r.cnf.clauses.len()
    );
    if r.budget_terminated {
        println!("c stopped by the time limit");
    }
}

fn run_gen(args: &GenArgs) -> Result<ExitCode> {
    let inst = generate_instance(&BenchSpec {
        kind: args.kind.bench_kind(),
        seed: args.seed,
    })?;
    let text = write_anf(&inst.doc);
    match &args.out {
        Some(_) => write(&args.out, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

struct Row {
    instance: usize,
    seed: u64,
    family: &'static str,
    vars: usize,
    polys: usize,
    mode: &'static str,
    result: PipelineResult,
    millis: f64,
    verified: Option<bool>,
}

const CSV_HEADER: [&str; 17] = [
    "instance",
    "family",
    "seed",
    "vars",
    "polys",
    "mode",
    "status",
    "iterations",
    "xl_facts",
    "elimlin_facts",
    "sat_facts",
    "conflicts",
    "xl_ms",
    "elimlin_ms",
    "sat_ms",
    "total_ms",
    "verified",
];

impl Row {
    fn record(&self) -> Vec<String> {
        let t = &self.result.trace;
        let ms = |f: fn(&IterationTrace) -> Duration| {
            format!(
                "{:.3}",
                t.iter().map(f).sum::<Duration>().as_secs_f64() * 1e3
            )
        };
        let count = |f: fn(&IterationTrace) -> usize| t.iter().map(f).sum::<usize>().to_string();
        let status = match self.result.status {
            PipelineStatus::Sat => "SAT",
            PipelineStatus::Unsat => "UNSAT",
            PipelineStatus::Fixpoint if self.result.budget_terminated => "TIMEOUT",
            PipelineStatus::Fixpoint => "FIXPOINT",
        };
        vec![
            self.instance.to_string(),
            self.family.to_string(),
            self.seed.to_string(),
            self.vars.to_string(),
            self.polys.to_string(),
            self.mode.to_string(),
            status.to_string(),
            t.len().to_string(),
            count(|x| x.xl_facts),
            count(|x| x.elimlin_facts),
            count(|x| x.sat_facts),
            t.iter().map(|x| x.conflicts).sum::<u64>().to_string(),
            ms(|x| x.xl_time),
            ms(|x| x.elimlin_time),
            ms(|x| x.sat_time),
            format!("{:.3}", self.millis),
            self.verified.map_or(String::new(), |v| v.to_string()),
        ]
    }
}

fn verify(kind: BenchKind, inst: &Instance, model: &[bool]) -> bool {
    match kind {
        BenchKind::RandomPlanted { .. } => inst.doc.polys.iter().all(|p| !p.eval(model)),
        BenchKind::ToyFeistel { width, rounds, .. } => {
            let keys = feistel_keys(width, rounds, model);
            inst.pairs
                .iter()
                .all(|&(pt, ct)| toy_feistel_encrypt(width, &keys, pt) == ct)
        }
    }
}

fn run_bench(args: &BenchArgs) -> Result<ExitCode> {
    if args.rounds_min > args.rounds_max {
        bail!("--rounds-min exceeds --rounds-max");
    }
    let cfg = args.params.config()?;
    let specs: Vec<(usize, BenchSpec)> = (0..args.count)
        .map(|i| {
            let kind = match args.family {
                Family::Planted => BenchKind::RandomPlanted {
                    vars: args.vars,
                    polys: args.polys,
                    degree: args.degree,
                },
                Family::Feistel => BenchKind::ToyFeistel {
                    width: args.width,
                    rounds: args.rounds_min + i % (args.rounds_max - args.rounds_min + 1),
                    pairs: args.pairs,
                },
            };
            (
                i,
                BenchSpec {
                    kind,
                    seed: args.first_seed + i as u64,
                },
            )
        })
        .collect();
    let instances = specs
        .iter()
        .map(|(_, s)| generate_instance(s))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, bool)> = (0..specs.len())
        .flat_map(|i| [(i, true), (i, false)])
        .collect();
    let family = match args.family {
        Family::Planted => "planted",
        Family::Feistel => "feistel",
    };
    let rows = par::map(cfg.exec, &jobs, |&(i, learn)| -> Result<Row> {
        let (idx, spec) = specs[i];
        let inst = &instances[i];
        let sys: AnfSystem = inst.doc.to_system();
        let start = Instant::now();
        let mut job_cfg = cfg.clone();
        job_cfg.exec = Exec::Sequential;
        let result = if learn {
            run(&sys, &job_cfg)?
        } else {
            convert_only(&sys, &job_cfg)?
        };
        let millis = start.elapsed().as_secs_f64() * 1e3;
        let verified = result.model.as_ref().map(|m| verify(spec.kind, inst, m));
        Ok(Row {
            instance: idx,
            seed: spec.seed,
            family,
            vars: inst.doc.num_vars,
            polys: inst.doc.polys.len(),
            mode: if learn { "learn" } else { "nolearn" },
            result,
            millis,
            verified,
        })
    });
    let mut csv = csv::Writer::from_path(&args.out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    csv.write_record(CSV_HEADER)?;
    let mut solved = [0usize; 2];
    for row in rows {
        let row = row?;
        if row.result.status != PipelineStatus::Fixpoint {
            solved[usize::from(row.mode == "nolearn")] += 1;
        }
        csv.write_record(row.record())?;
    }
    csv.flush()?;
    println!(
        "c {} instances, solved with learning {}, without {}",
        args.count, solved[0], solved[1]
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Some(Cmd::Gen(g)) => run_gen(g),
        Some(Cmd::Bench(b)) => run_bench(b),
        None => run_solve(&cli.solve),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
