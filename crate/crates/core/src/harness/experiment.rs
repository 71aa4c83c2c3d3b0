use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::init::{adversarial_population, greedy_init, local_search_init};
use crate::instances::{
    catalog_instance1, catalog_instance2, family_of, make_greedy_tight_instance, make_instance1,
    make_instance2, make_random_instance, make_random_integer_instance, read_instance, Family,
    Instance1Params, Instance2Params, SolutionCatalog,
};
use crate::moea::{run_moea, MoeaConfig, TrialTrajectory, CSV_HEADER};
use crate::numfmt::{g17, to_json_g17};
use crate::oracle::exact_optimum;
use crate::problem::{FamilyParams, KnapsackInstance};
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    Greedy,
    Local,
    Adversarial,
}

impl std::str::FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(InitMethod::Greedy),
            "local" => Ok(InitMethod::Local),
            "adversarial" => Ok(InitMethod::Adversarial),
            other => Err(Error::Validation(vec![format!(
                "unknown init method {other:?} (expected greedy, local or adversarial)"
            )])),
        }
    }
}

/// Where an experiment's instance comes from: a generator family or a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    File { path: PathBuf },
    Family(FamilyParams),
}

pub fn resolve_instance(
    source: &InstanceSource,
    base_dir: Option<&Path>,
) -> Result<KnapsackInstance> {
    match source {
        InstanceSource::File { path } => match base_dir {
            Some(dir) if path.is_relative() => read_instance(dir.join(path)),
            _ => read_instance(path),
        },
        InstanceSource::Family(params) => match params {
            FamilyParams::Instance1 { alpha, n } => {
                make_instance1(Instance1Params::new(*alpha, *n))
            }
            FamilyParams::Instance2 { n } => make_instance2(Instance2Params::new(*n)),
            FamilyParams::Random {
                n,
                value_range,
                weight_range,
                capacity_fraction,
                seed,
                stream,
            } => make_random_instance(
                *n,
                (value_range[0], value_range[1]),
                (weight_range[0], weight_range[1]),
                *capacity_fraction,
                &mut RandomStream::new(*seed, *stream),
            ),
            FamilyParams::RandomInteger {
                n,
                value_range,
                weight_range,
                capacity_fraction,
                seed,
                stream,
            } => make_random_integer_instance(
                *n,
                (value_range[0], value_range[1]),
                (weight_range[0], weight_range[1]),
                *capacity_fraction,
                &mut RandomStream::new(*seed, *stream),
            ),
            FamilyParams::GreedyTight { epsilon } => make_greedy_tight_instance(*epsilon),
        },
    }
}

/// Experiment description, read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub init: InitMethod,
    pub population_size: usize,
    #[serde(default)]
    pub mutation_rate: Option<f64>,
    #[serde(default)]
    pub max_generations: Option<u64>,
    #[serde(default)]
    pub max_evaluations: Option<u64>,
    #[serde(default)]
    pub target_ratio: Option<f64>,
    pub trials: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Known optimum; computed with the exact oracle when absent.
    #[serde(default)]
    pub optimum: Option<f64>,
    /// Ratio above which a trial counts as escaped; defaults per family.
    #[serde(default)]
    pub escape_threshold: Option<f64>,
    /// Ratios whose first hitting generation is reported; defaults per family.
    #[serde(default)]
    pub ratio_thresholds: Option<Vec<f64>>,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub parallelism: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn moea_config(&self) -> MoeaConfig {
        MoeaConfig {
            population_size: self.population_size,
            mutation_rate: self.mutation_rate,
            max_generations: self.max_generations,
            max_evaluations: self.max_evaluations,
            target_ratio: self.target_ratio,
            seed: self.base_seed,
            stream_id: 0,
        }
    }
}

/// Everything a trial needs besides its id.
#[derive(Clone, Debug)]
pub struct TrialSetup {
    pub instance: KnapsackInstance,
    pub init: InitMethod,
    /// `seed` is the base seed; `stream_id` is overwritten per trial.
    pub moea: MoeaConfig,
    pub optimum: Option<f64>,
}

impl TrialSetup {
    /// Fills in the optimum with the exact oracle when it is not given and the instance is small enough.
    pub fn new(
        instance: KnapsackInstance,
        init: InitMethod,
        moea: MoeaConfig,
        optimum: Option<f64>,
    ) -> Result<Self> {
        moea.validate()?;
        let optimum = match optimum {
            Some(o) => Some(o),
            None => match exact_optimum(&instance) {
                Ok((o, _)) => Some(o.optimum),
                Err(Error::OracleCapacity { .. }) | Err(Error::Precondition(_)) => None,
                Err(e) => return Err(e),
            },
        };
        if init == InitMethod::Adversarial && family_of(&instance).is_none() {
            return Err(Error::Validation(vec![
                "adversarial initialisation needs an instance1 or instance2 family instance".into(),
            ]));
        }
        Ok(Self {
            instance,
            init,
            moea,
            optimum,
        })
    }
}

fn catalog_for(
    instance: &KnapsackInstance,
    rng: &mut RandomStream,
) -> Result<Option<SolutionCatalog>> {
    Ok(match family_of(instance) {
        Some(Family::Instance1(p)) => Some(catalog_instance1(p, rng)?),
        Some(Family::Instance2(p)) => Some(catalog_instance2(p, rng)?),
        None => None,
    })
}

/// One seeded trial on stream `trial_id`. The stream first draws the
/// catalog samples (family instances only), then the initial population,
/// then the run itself.
pub fn run_trial(setup: &TrialSetup, trial_id: u64) -> Result<TrialTrajectory> {
    let mut rng = RandomStream::new(setup.moea.seed, trial_id);
    let catalog = catalog_for(&setup.instance, &mut rng)?;
    let size = setup.moea.population_size;
    let init = match setup.init {
        InitMethod::Greedy => greedy_init(&setup.instance, size, &mut rng)?,
        InitMethod::Local => local_search_init(&setup.instance, size, &mut rng)?,
        InitMethod::Adversarial => {
            let catalog = catalog.as_ref().ok_or_else(|| {
                Error::Validation(vec![
                    "adversarial initialisation needs a family instance".into()
                ])
            })?;
            adversarial_population(&setup.instance, catalog, size, &mut rng)?
        }
    };
    let mut moea = setup.moea.clone();
    moea.stream_id = trial_id;
    run_moea(
        &setup.instance,
        init,
        &moea,
        &mut rng,
        setup.optimum,
        catalog.as_ref(),
    )
}

/// Escape thresholds that sit strictly between the oracle second-best ratio and 1.
pub fn default_escape_threshold(instance: &KnapsackInstance) -> Option<f64> {
    match family_of(instance)? {
        Family::Instance1(_) => Some(0.26),
        Family::Instance2(_) => Some(0.60),
    }
}

/// Approximation thresholds the theory states for each family:
/// `α` for Instance 1, `1/2` and `1/2 + 1/n + 1/(2n³)` for Instance 2.
pub fn reference_thresholds(instance: &KnapsackInstance) -> Vec<(String, f64)> {
    match family_of(instance) {
        Some(Family::Instance1(p)) => vec![("alpha".into(), p.alpha)],
        Some(Family::Instance2(p)) => {
            let n = p.n as f64;
            vec![
                ("one_half".into(), 0.5),
                (
                    "one_half_plus".into(),
                    0.5 + 1.0 / n + 1.0 / (2.0 * n.powi(3)),
                ),
            ]
        }
        None => vec![("one_half".into(), 0.5)],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl RatioStats {
    fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
        };
        Some(Self {
            mean: values.iter().sum::<f64>() / k as f64,
            median,
            min: sorted[0],
            max: sorted[k - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub instance: String,
    pub optimum: Option<f64>,
    pub trials: u64,
    pub escape_threshold: Option<f64>,
    pub escape_count: u64,
    pub terminal_ratios: Vec<Option<f64>>,
    pub ratio_stats: Option<RatioStats>,
    pub reference_thresholds: BTreeMap<String, f64>,
    /// Keyed by threshold (17 significant digits); one entry per trial.
    pub hitting_generations: BTreeMap<String, Vec<Option<u64>>>,
    pub version: String,
}

/// The per-trial facts a summary is built from; recoverable from a CSV.
#[derive(Clone, Debug, PartialEq)]
struct TrialDigest {
    /// `(generation, best_ratio)` per row.
    ratios: Vec<(u64, Option<f64>)>,
}

impl TrialDigest {
    fn from_trajectory(t: &TrialTrajectory) -> Self {
        Self {
            ratios: t
                .rows
                .iter()
                .map(|r| (r.generation, r.best_ratio))
                .collect(),
        }
    }

    fn terminal(&self) -> Option<f64> {
        self.ratios.last().and_then(|r| r.1)
    }

    fn hitting(&self, threshold: f64) -> Option<u64> {
        self.ratios
            .iter()
            .find(|(_, r)| r.is_some_and(|x| x >= threshold))
            .map(|(g, _)| *g)
    }

    fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::Parse {
            path: origin.to_path_buf(),
            message: format!("line {line}: {what}"),
        };
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(bad(1, "unexpected header"));
        }
        let mut ratios = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 12 {
                return Err(bad(i + 2, "expected 12 columns"));
            }
            let generation = fields[1].parse().map_err(|_| bad(i + 2, "generation"))?;
            let ratio = match fields[4] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(i + 2, "best_ratio"))?),
            };
            ratios.push((generation, ratio));
        }
        Ok(Self { ratios })
    }
}

fn thresholds_for(
    config: &ExperimentConfig,
    instance: &KnapsackInstance,
    escape: Option<f64>,
) -> Vec<f64> {
    let mut ts = config.ratio_thresholds.clone().unwrap_or_else(|| {
        let mut v: Vec<f64> = reference_thresholds(instance)
            .into_iter()
            .map(|(_, t)| t)
            .collect();
        v.push(1.0);
        v
    });
    if let Some(e) = escape {
        ts.push(e);
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn summarize(
    config: &ExperimentConfig,
    instance: &KnapsackInstance,
    optimum: Option<f64>,
    digests: &[TrialDigest],
) -> ExperimentSummary {
    let escape_threshold = config
        .escape_threshold
        .or_else(|| default_escape_threshold(instance));
    let terminal_ratios: Vec<Option<f64>> = digests.iter().map(TrialDigest::terminal).collect();
    let escape_count = match escape_threshold {
        Some(t) => digests
            .iter()
            .filter(|d| d.ratios.iter().any(|(_, r)| r.is_some_and(|x| x > t)))
            .count() as u64,
        None => 0,
    };
    let known: Vec<f64> = terminal_ratios.iter().flatten().copied().collect();
    let hitting_generations = thresholds_for(config, instance, escape_threshold)
        .into_iter()
        .map(|t| (g17(t), digests.iter().map(|d| d.hitting(t)).collect()))
        .collect();
    ExperimentSummary {
        config: config.clone(),
        instance: instance.name.clone(),
        optimum,
        trials: digests.len() as u64,
        escape_threshold,
        escape_count,
        terminal_ratios,
        ratio_stats: RatioStats::from_values(&known),
        reference_thresholds: reference_thresholds(instance).into_iter().collect(),
        hitting_generations,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

pub fn trial_csv_name(trial_id: u64) -> String {
    format!("trial_{trial_id}.csv")
}

/// Runs all trials on a pool of `parallelism` threads, writing
/// `trial_<i>.csv` per trial and, only if every trial succeeded,
/// `summary.json`. File contents do not depend on the thread count.
pub fn run_experiment(
    config: &ExperimentConfig,
    config_dir: Option<&Path>,
    output_dir: &Path,
    parallelism: usize,
) -> Result<ExperimentSummary> {
    if config.trials == 0 {
        return Err(Error::Validation(vec!["trials must be at least 1".into()]));
    }
    let instance = resolve_instance(&config.instance, config_dir)?;
    let setup = TrialSetup::new(instance, config.init, config.moea_config(), config.optimum)?;
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Validation(vec![format!("cannot start thread pool: {e}")]))?;
    let digests: Vec<TrialDigest> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let traj = run_trial(&setup, trial)?;
                let path = output_dir.join(trial_csv_name(trial));
                fs::write(&path, traj.to_csv()).map_err(|e| Error::io(&path, e))?;
                Ok(TrialDigest::from_trajectory(&traj))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let summary = summarize(config, &setup.instance, setup.optimum, &digests);
    write_summary(&summary, &output_dir.join("summary.json"))?;
    Ok(summary)
}

pub fn write_summary(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let text = to_json_g17(summary).map_err(|e| Error::contract(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Rebuilds the summary of a finished experiment from its trajectory CSVs alone.
pub fn summarize_csv_dir(
    config: &ExperimentConfig,
    config_dir: Option<&Path>,
    dir: &Path,
) -> Result<ExperimentSummary> {
    let instance = resolve_instance(&config.instance, config_dir)?;
    let optimum = match config.optimum {
        Some(o) => Some(o),
        None => exact_optimum(&instance).ok().map(|(o, _)| o.optimum),
    };
    let digests = (0..config.trials)
        .map(|t| {
            let path = dir.join(trial_csv_name(t));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            TrialDigest::from_csv(&text, &path)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(config, &instance, optimum, &digests))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        serde_json::from_str(
            r#"{
                "instance": {"family": "instance2", "n": 16},
                "init": "greedy",
                "population_size": 8,
                "max_generations": 50,
                "trials": 4,
                "base_seed": 3
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn config_parses_file_and_family_sources() {
        let c = small_config();
        assert_eq!(
            c.instance,
            InstanceSource::Family(FamilyParams::Instance2 { n: 16 })
        );
        let f: ExperimentConfig = serde_json::from_str(
            r#"{"instance": {"path": "i1.json"}, "init": "adversarial", "population_size": 20,
                "max_generations": 10, "trials": 1}"#,
        )
        .unwrap();
        assert_eq!(
            f.instance,
            InstanceSource::File {
                path: "i1.json".into()
            }
        );
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"instance": {"path": "x"}, "init": "bogus"}"#
        )
        .is_err());
    }

    #[test]
    fn summary_matches_csv_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let c = small_config();
        let s = run_experiment(&c, None, dir.path(), 2).unwrap();
        assert_eq!(s.trials, 4);
        assert_eq!(s.escape_threshold, Some(0.6));
        assert_eq!(s.escape_count, 0);
        let again = summarize_csv_dir(&c, None, dir.path()).unwrap();
        assert_eq!(again, s);
        let on_disk: ExperimentSummary =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(on_disk, s);
        assert_eq!(s.hitting_generations[&g17(0.5)], vec![Some(0); 4]);
    }

    #[test]
    fn adversarial_needs_family() {
        let inst = make_greedy_tight_instance(0.1).unwrap();
        let err = TrialSetup::new(inst, InitMethod::Adversarial, MoeaConfig::new(8, 1), None)
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn zero_trials_rejected() {
        let mut c = small_config();
        c.trials = 0;
        let dir = tempfile::tempdir().unwrap();
        assert!(run_experiment(&c, None, dir.path(), 1).is_err());
        assert!(!dir.path().join("summary.json").exists());
    }

    #[test]
    fn failed_trial_writes_no_summary() {
        let mut c = small_config();
        c.population_size = 6;
        let dir = tempfile::tempdir().unwrap();
        assert!(run_experiment(&c, None, dir.path(), 1).is_err());
        assert!(!dir.path().join("summary.json").exists());
    }

    #[test]
    fn ratio_stats_median() {
        let s = RatioStats::from_values(&[0.3, 0.1, 0.2, 0.4]).unwrap();
        assert_eq!(s.median, 0.25);
        assert_eq!(s.min, 0.1);
        assert_eq!(s.max, 0.4);
        assert!(RatioStats::from_values(&[]).is_none());
    }
}
