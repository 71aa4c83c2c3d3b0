//! The mutation-only MOEA: every parent yields one child by bitwise
//! mutation, the children's non-dominated set is extracted, and each of
//! those children in turn replaces a parent it dominates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{SolutionCatalog, SolutionClass};
use crate::mutation::{bitwise_mutate, default_rate};
use crate::numfmt::g17;
use crate::pareto::{dominates, nondominated_filter};
use crate::problem::{approximation_ratio, evaluate, EvaluatedSolution, KnapsackInstance};
use crate::rng::RandomStream;

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<EvaluatedSolution>,
}

impl Population {
    pub fn new(members: Vec<EvaluatedSolution>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[EvaluatedSolution] {
        &self.members
    }

    pub fn into_members(self) -> Vec<EvaluatedSolution> {
        self.members
    }

    pub fn best_feasible_objective(&self) -> Option<f64> {
        self.members
            .iter()
            .filter(|m| m.is_feasible())
            .map(|m| m.objective())
            .fold(None, |best, f| Some(best.map_or(f, |b: f64| b.max(f))))
    }

    pub fn best_feasible(&self) -> Option<&EvaluatedSolution> {
        let mut best: Option<&EvaluatedSolution> = None;
        for m in self.members.iter().filter(|m| m.is_feasible()) {
            if best.is_none_or(|b| m.objective() > b.objective()) {
                best = Some(m);
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoeaConfig {
    pub population_size: usize,
    /// Per-bit flip probability; `None` means `1/n`.
    #[serde(default)]
    pub mutation_rate: Option<f64>,
    #[serde(default)]
    pub max_generations: Option<u64>,
    #[serde(default)]
    pub max_evaluations: Option<u64>,
    /// Stop once a feasible member reaches this approximation ratio.
    #[serde(default)]
    pub target_ratio: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

impl MoeaConfig {
    pub fn new(population_size: usize, max_generations: u64) -> Self {
        Self {
            population_size,
            mutation_rate: None,
            max_generations: Some(max_generations),
            max_evaluations: None,
            target_ratio: None,
            seed: 0,
            stream_id: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut failed = Vec::new();
        let n = self.population_size;
        if n < 4 || !n.is_multiple_of(4) {
            failed.push(format!(
                "population size must be >= 4 and divisible by 4, got {n}"
            ));
        }
        if self.max_generations.is_none() && self.max_evaluations.is_none() {
            failed.push(
                "at least one of max_generations and max_evaluations must be set".to_string(),
            );
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                failed.push(format!("mutation rate must lie in [0,1], got {r}"));
            }
        }
        if let Some(t) = self.target_ratio {
            if !(t > 0.0 && t.is_finite()) {
                failed.push(format!("target ratio must be positive, got {t}"));
            }
        }
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failed))
        }
    }

    pub fn rate_for(&self, n: usize) -> f64 {
        self.mutation_rate.unwrap_or_else(|| default_rate(n))
    }
}

/// Structural class of a member; everything outside the catalog's named
/// classes is `OtherFeasible` / `OtherInfeasible`.
pub fn classify_member(
    catalog: &SolutionCatalog,
    member: &EvaluatedSolution,
) -> Result<SolutionClass> {
    if member.solution.len() != catalog.n() {
        return Err(Error::contract(format!(
            "member has {} bits, catalog is for n = {}",
            member.solution.len(),
            catalog.n()
        )));
    }
    Ok(catalog.classify(&member.solution, member.is_feasible()))
}

/// Which branch of the replacement rule fired, per child.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReplacementStats {
    pub none_dominated: usize,
    pub one_dominated: usize,
    pub many_feasible: usize,
    pub many_random: usize,
}

/// Inserts each child, in order, into `population`:
/// dominates nothing → skipped; dominates one member → replaces it;
/// dominates several, all feasible → replaces the lowest objective (lowest
/// index on ties); otherwise → replaces a uniformly drawn dominated member.
///
/// Later children see earlier replacements.
pub fn apply_replacement(
    population: &mut Population,
    children: &[EvaluatedSolution],
    rng: &mut RandomStream,
) -> ReplacementStats {
    let mut stats = ReplacementStats::default();
    let mut dominated = Vec::new();
    for child in children {
        dominated.clear();
        dominated.extend(
            population
                .members
                .iter()
                .enumerate()
                .filter(|(_, m)| dominates(&child.evaluation, &m.evaluation))
                .map(|(i, _)| i),
        );
        let target = match dominated.len() {
            0 => {
                stats.none_dominated += 1;
                continue;
            }
            1 => {
                stats.one_dominated += 1;
                dominated[0]
            }
            m => {
                if dominated
                    .iter()
                    .all(|&i| population.members[i].is_feasible())
                {
                    stats.many_feasible += 1;
                    let mut worst = dominated[0];
                    for &i in &dominated[1..] {
                        if population.members[i].objective() < population.members[worst].objective()
                        {
                            worst = i;
                        }
                    }
                    worst
                } else {
                    stats.many_random += 1;
                    dominated[rng.index(m)]
                }
            }
        };
        population.members[target] = child.clone();
    }
    stats
}

/// One generation. Consumes exactly `population.len()` evaluations.
pub fn moea_step(
    instance: &KnapsackInstance,
    population: &Population,
    mutation_rate: f64,
    rng: &mut RandomStream,
) -> Result<Population> {
    let children = population
        .members
        .iter()
        .map(|parent| {
            let solution = bitwise_mutate(&parent.solution, mutation_rate, rng);
            let evaluation = evaluate(instance, &solution)?;
            Ok(EvaluatedSolution {
                solution,
                evaluation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let front = nondominated_filter(&children);
    let mut next = population.clone();
    apply_replacement(&mut next, &front, rng);
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Budget,
    TargetReached,
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalReason::Budget => "budget",
            TerminalReason::TargetReached => "target reached",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub generation: u64,
    pub evaluations: u64,
    pub best_feasible: Option<f64>,
    pub best_ratio: Option<f64>,
    /// Member counts indexed like [`SolutionClass::ALL`].
    pub composition: [usize; 7],
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialTrajectory {
    pub trial_id: u64,
    pub population_size: usize,
    pub rows: Vec<TrajectoryRow>,
    pub terminal: TerminalReason,
    pub final_population: Population,
}

pub const CSV_HEADER: &str = "trial_id,generation,evaluations,best_feasible_f,best_ratio,n_xmax,n_xloc,n_xvioa,n_xviob,n_xvioc,n_other_feasible,n_other_infeasible";

impl TrialTrajectory {
    pub fn last(&self) -> &TrajectoryRow {
        self.rows
            .last()
            .expect("a trajectory always has the t = 0 row")
    }

    pub fn terminal_ratio(&self) -> Option<f64> {
        self.last().best_ratio
    }

    /// First generation whose best ratio reaches `threshold`.
    pub fn hitting_generation(&self, threshold: f64) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.best_ratio.is_some_and(|x| x >= threshold))
            .map(|r| r.generation)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let opt = |x: Option<f64>| x.map(g17).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}",
                self.trial_id,
                r.generation,
                r.evaluations,
                opt(r.best_feasible),
                opt(r.best_ratio)
            ));
            for c in r.composition {
                out.push(',');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn composition(population: &Population, catalog: Option<&SolutionCatalog>) -> [usize; 7] {
    let mut counts = [0usize; 7];
    for m in population.members() {
        let class = match catalog {
            Some(c) => c.classify(&m.solution, m.is_feasible()),
            None if m.is_feasible() => SolutionClass::OtherFeasible,
            None => SolutionClass::OtherInfeasible,
        };
        counts[SolutionClass::ALL
            .iter()
            .position(|&c| c == class)
            .expect("known class")] += 1;
    }
    counts
}

/// Runs generations until a budget is spent or the target ratio is met,
/// recording one row per generation (row 0 is the initial population,
/// charged `N` evaluations).
pub fn run_moea(
    instance: &KnapsackInstance,
    init: Population,
    config: &MoeaConfig,
    rng: &mut RandomStream,
    optimum: Option<f64>,
    catalog: Option<&SolutionCatalog>,
) -> Result<TrialTrajectory> {
    config.validate()?;
    let size = config.population_size;
    if init.len() != size {
        return Err(Error::contract(format!(
            "initial population has {} members, configured size is {size}",
            init.len()
        )));
    }
    if let Some(opt) = optimum {
        approximation_ratio(0.0, opt)?;
    }
    if config.target_ratio.is_some() && optimum.is_none() {
        return Err(Error::Validation(vec![
            "a target ratio needs a known optimum".into(),
        ]));
    }
    if let Some(c) = catalog {
        if c.n() != instance.n() {
            return Err(Error::contract("catalog and instance sizes differ"));
        }
    }
    let rate = config.rate_for(instance.n());
    let n_evals = size as u64;

    let mut population = init;
    let mut best: Option<f64> = None;
    let mut rows = Vec::new();
    let mut generation = 0u64;
    let terminal = loop {
        if let Some(f) = population.best_feasible_objective() {
            best = Some(best.map_or(f, |b| b.max(f)));
        }
        let best_ratio = match (best, optimum) {
            (Some(f), Some(opt)) => Some(f / opt),
            _ => None,
        };
        let evaluations = n_evals * (generation + 1);
        rows.push(TrajectoryRow {
            generation,
            evaluations,
            best_feasible: best,
            best_ratio,
            composition: composition(&population, catalog),
        });
        if let (Some(target), Some(r)) = (config.target_ratio, best_ratio) {
            if r >= target {
                break TerminalReason::TargetReached;
            }
        }
        let gens_left = config.max_generations.is_none_or(|g| generation < g);
        let evals_left = config
            .max_evaluations
            .is_none_or(|e| evaluations + n_evals <= e);
        if !(gens_left && evals_left) {
            break TerminalReason::Budget;
        }
        population = moea_step(instance, &population, rate, rng)?;
        generation += 1;
    };

    Ok(TrialTrajectory {
        trial_id: config.stream_id,
        population_size: size,
        rows,
        terminal,
        final_population: population,
    })
}
