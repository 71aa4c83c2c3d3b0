use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use knapsack_moea::harness::verify::{greedy_objective, run_criterion, CRITERIA};
use knapsack_moea::harness::{
    run_experiment, run_trial, ExperimentConfig, InitMethod, InstanceSource, TrialSetup,
};
use knapsack_moea::init::{greedy_by_ratio, greedy_by_value};
use knapsack_moea::instances::{
    catalog_instance1, catalog_instance2, count_instance1_classes, family_of, instance_to_json,
    read_instance, verify_catalog, write_instance, Family,
};
use knapsack_moea::oracle::{exact_optimum, ENUMERATION_LIMIT};
use knapsack_moea::problem::FamilyParams;
use knapsack_moea::{evaluate, Error, KnapsackInstance, MoeaConfig, RandomStream, Result};

#[derive(Parser)]
#[command(
    name = "knapsack-moea",
    version,
    about = "Bi-objective evolutionary search on 0-1 knapsack instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Instance1,
    Instance2,
    Random,
    RandomInteger,
    GreedyTight,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Greedy,
    Local,
    Adversarial,
}

impl From<InitArg> for InitMethod {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Greedy => InitMethod::Greedy,
            InitArg::Local => InitMethod::Local,
            InitArg::Adversarial => InitMethod::Adversarial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and print its validation report.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Seed for the random families.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Instance JSON path; printed to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact optimum by enumeration or integer-weight DP.
    Exact { instance: PathBuf },
    /// Greedy solutions and their ratio, or a random-corpus sweep.
    Greedy {
        #[arg(required_unless_present = "corpus")]
        instance: Option<PathBuf>,
        #[arg(long)]
        optimum: Option<f64>,
        /// Number of random instances to sweep instead of one file.
        #[arg(long)]
        corpus: Option<u64>,
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// One seeded evolutionary run; writes the trajectory CSV.
    Moea {
        instance: PathBuf,
        #[arg(long, value_enum)]
        init: InitArg,
        #[arg(long = "N")]
        population_size: usize,
        #[arg(long)]
        gens: Option<u64>,
        #[arg(long)]
        max_evals: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        target_ratio: Option<f64>,
        #[arg(long)]
        optimum: Option<f64>,
        #[arg(short, long, default_value = "trajectory.csv")]
        output: PathBuf,
    },
    /// Multi-trial experiment from a JSON config.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Run the acceptance checks; exits 1 if any fails.
    Verify {
        /// Only these criteria (1-9).
        #[arg(long)]
        criterion: Vec<u8>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OracleCapacity { .. } | Error::Precondition(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            family,
            alpha,
            n,
            epsilon,
            seed,
            stream,
            output,
        } => cmd_gen(family, alpha, n, epsilon, seed, stream, output.as_deref()),
        Command::Exact { instance } => cmd_exact(&instance),
        Command::Greedy {
            instance,
            optimum,
            corpus,
            n,
            seed,
        } => match (instance, corpus) {
            (Some(path), _) => cmd_greedy(&path, optimum),
            (None, Some(k)) => cmd_greedy_corpus(k, n, seed),
            (None, None) => unreachable!("clap requires one of them"),
        },
        Command::Moea {
            instance,
            init,
            population_size,
            gens,
            max_evals,
            seed,
            stream,
            rate,
            target_ratio,
            optimum,
            output,
        } => {
            let config = MoeaConfig {
                population_size,
                mutation_rate: rate,
                max_generations: gens,
                max_evaluations: max_evals,
                target_ratio,
                seed,
                stream_id: stream,
            };
            cmd_moea(&instance, init.into(), config, optimum, &output)
        }
        Command::Experiment {
            config,
            output_dir,
            parallelism,
        } => cmd_experiment(&config, output_dir, parallelism),
        Command::Verify { criterion } => return cmd_verify(&criterion),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| Error::Validation(vec![format!("--{flag} is required for {family}")]))
}

fn family_params(
    family: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
    epsilon: Option<f64>,
    seed: u64,
    stream: u64,
) -> Result<FamilyParams> {
    Ok(match family {
        FamilyArg::Instance1 => FamilyParams::Instance1 {
            alpha: need(alpha, "alpha", "instance1")?,
            n: need(n, "n", "instance1")?,
        },
        FamilyArg::Instance2 => FamilyParams::Instance2 {
            n: need(n, "n", "instance2")?,
        },
        FamilyArg::Random => FamilyParams::Random {
            n: need(n, "n", "random")?,
            value_range: [1.0, 100.0],
            weight_range: [1.0, 100.0],
            capacity_fraction: 0.5,
            seed,
            stream,
        },
        FamilyArg::RandomInteger => FamilyParams::RandomInteger {
            n: need(n, "n", "random-integer")?,
            value_range: [1, 100],
            weight_range: [1, 100],
            capacity_fraction: 0.5,
            seed,
            stream,
        },
        FamilyArg::GreedyTight => FamilyParams::GreedyTight {
            epsilon: need(epsilon, "epsilon", "greedy-tight")?,
        },
    })
}

fn validation_report(instance: &KnapsackInstance) -> Result<Vec<String>> {
    let mut lines = vec![format!(
        "{}: n = {}, capacity = {}",
        instance.name,
        instance.n(),
        instance.capacity()
    )];
    let mut rng = RandomStream::new(0, 0);
    let catalog = match family_of(instance) {
        Some(Family::Instance1(p)) => {
            let c = count_instance1_classes(p)?;
            lines.push(format!(
                "|X_loc| = {}, |X_vioa| = {}, lower bound {} holds: {}",
                c.x_loc, c.x_vioa, c.lower_bound, c.lower_bound_holds
            ));
            Some(catalog_instance1(p, &mut rng)?)
        }
        Some(Family::Instance2(p)) => Some(catalog_instance2(p, &mut rng)?),
        None => None,
    };
    if let Some(catalog) = catalog {
        let report = verify_catalog(instance, &catalog, instance.n() <= ENUMERATION_LIMIT)?;
        let found = report.discrepancies();
        if found.is_empty() {
            lines.push("all catalog values agree with evaluation".into());
        }
        lines.extend(found.into_iter().map(|d| format!("discrepancy: {d}")));
    }
    Ok(lines)
}

fn cmd_gen(
    family: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
    epsilon: Option<f64>,
    seed: u64,
    stream: u64,
    output: Option<&Path>,
) -> Result<()> {
    let params = family_params(family, alpha, n, epsilon, seed, stream)?;
    let instance = knapsack_moea::harness::resolve_instance(&InstanceSource::Family(params), None)?;
    let report = validation_report(&instance)?;
    match output {
        Some(path) => {
            write_instance(&instance, path)?;
            for line in report {
                println!("{line}");
            }
            println!("wrote {}", path.display());
        }
        None => {
            print!("{}", instance_to_json(&instance));
            for line in report {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn cmd_exact(path: &Path) -> Result<()> {
    let instance = read_instance(path)?;
    let (opt, method) = exact_optimum(&instance)?;
    println!("optimum: {}", opt.optimum);
    println!("witness: {}", opt.witness);
    println!("method: {}", method.label());
    Ok(())
}

fn optimum_or_oracle(instance: &KnapsackInstance, given: Option<f64>) -> Option<f64> {
    given.or_else(|| exact_optimum(instance).ok().map(|(o, _)| o.optimum))
}

fn cmd_greedy(path: &Path, optimum: Option<f64>) -> Result<()> {
    let instance = read_instance(path)?;
    let by_value = greedy_by_value(&instance);
    let by_ratio = greedy_by_ratio(&instance);
    println!(
        "by value: {} f = {}",
        by_value,
        evaluate(&instance, &by_value)?.objective
    );
    println!(
        "by ratio: {} f = {}",
        by_ratio,
        evaluate(&instance, &by_ratio)?.objective
    );
    let best = greedy_objective(&instance)?;
    match optimum_or_oracle(&instance, optimum) {
        Some(opt) => println!(
            "best: {best}, ratio {}",
            knapsack_moea::approximation_ratio(best, opt)?
        ),
        None => println!("best: {best} (optimum unknown)"),
    }
    Ok(())
}

fn cmd_greedy_corpus(count: u64, n: usize, seed: u64) -> Result<()> {
    let mut ratios = Vec::new();
    for i in 0..count {
        let params = family_params(FamilyArg::Random, None, Some(n), None, seed, i)?;
        let instance =
            knapsack_moea::harness::resolve_instance(&InstanceSource::Family(params), None)?;
        let (opt, _) = exact_optimum(&instance)?;
        ratios.push(greedy_objective(&instance)? / opt.optimum);
    }
    if ratios.is_empty() {
        return Err(Error::Validation(
            vec!["--corpus must be at least 1".into()],
        ));
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    println!(
        "{} instances, min ratio {min}, mean ratio {mean}",
        ratios.len()
    );
    Ok(())
}

fn cmd_moea(
    path: &Path,
    init: InitMethod,
    config: MoeaConfig,
    optimum: Option<f64>,
    output: &Path,
) -> Result<()> {
    let instance = read_instance(path)?;
    let stream = config.stream_id;
    let setup = TrialSetup::new(instance, init, config, optimum)?;
    let trajectory = run_trial(&setup, stream)?;
    std::fs::write(output, trajectory.to_csv()).map_err(|e| Error::Io {
        path: output.to_path_buf(),
        source: e,
    })?;
    let last = trajectory.last();
    match last.best_ratio {
        Some(r) => println!(
            "terminal best ratio: {r} after {} generations ({})",
            last.generation, trajectory.terminal
        ),
        None => println!(
            "terminal best feasible: {:?} after {} generations ({})",
            last.best_feasible, last.generation, trajectory.terminal
        ),
    }
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_experiment(
    path: &Path,
    output_dir: Option<PathBuf>,
    parallelism: Option<usize>,
) -> Result<()> {
    let config = ExperimentConfig::from_file(path)?;
    let out = output_dir
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let threads = parallelism
        .or(config.parallelism)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let summary = run_experiment(&config, path.parent(), &out, threads)?;
    println!("{} trials on {}", summary.trials, summary.instance);
    if let Some(t) = summary.escape_threshold {
        println!("escaped above ratio {t}: {}", summary.escape_count);
    }
    if let Some(s) = &summary.ratio_stats {
        println!(
            "terminal ratio mean {} median {} min {} max {}",
            s.mean, s.median, s.min, s.max
        );
    }
    println!("wrote {}", out.join("summary.json").display());
    Ok(())
}

fn cmd_verify(only: &[u8]) -> ExitCode {
    let ids: Vec<u8> = if only.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        only.to_vec()
    };
    let mut ok = true;
    for id in ids {
        let report = run_criterion(id);
        println!("{report}");
        ok &= report.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
