//! Initial populations: repeated randomized local search, the two greedy
//! scans with their infeasible companions, and the worst-case populations
//! built from a solution catalog.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::instances::SolutionCatalog;
use crate::moea::Population;
use crate::problem::{evaluate, EvaluatedSolution, KnapsackInstance, Solution};
use crate::rng::RandomStream;

/// One run of randomized local search from the empty knapsack.
///
/// Untried 0-bits are picked uniformly. A feasible flip is accepted and
/// resets the untried set. An infeasible flip is returned with
/// probability 1/2, otherwise that bit is marked tried. When no untried bit
/// remains the current (maximal, hence locally optimal) solution is returned.
pub fn local_search_one(instance: &KnapsackInstance, rng: &mut RandomStream) -> Solution {
    let cap = instance.capacity();
    let mut x = Solution::zeros(instance.n());
    let mut untried: Vec<usize> = x.unselected().collect();
    while !untried.is_empty() {
        let slot = rng.index(untried.len());
        let bit = untried[slot];
        x.set(bit, true);
        if instance.weight_of(&x) <= cap {
            untried = x.unselected().collect();
        } else if rng.bernoulli(0.5) {
            return x;
        } else {
            x.set(bit, false);
            untried.swap_remove(slot);
        }
    }
    x
}

/// `size` independent local-search runs; duplicates allowed.
pub fn local_search_init(
    instance: &KnapsackInstance,
    size: usize,
    rng: &mut RandomStream,
) -> Result<Population> {
    if size == 0 {
        return Err(Error::Validation(vec![
            "population size must be at least 1".into(),
        ]));
    }
    (0..size)
        .map(|_| EvaluatedSolution::new(instance, local_search_one(instance, rng)))
        .collect::<Result<Vec<_>>>()
        .map(Population::new)
}

/// How equal sort keys are ordered in the greedy scans.
#[derive(Debug)]
pub enum TieBreak<'a> {
    /// Ascending item index.
    Index,
    /// A uniformly random permutation of tied items.
    Random(&'a mut RandomStream),
}

fn greedy_scan(
    instance: &KnapsackInstance,
    key: impl Fn(usize) -> f64,
    ties: TieBreak<'_>,
) -> Solution {
    let n = instance.n();
    let secondary: Vec<usize> = match ties {
        TieBreak::Index => (0..n).collect(),
        TieBreak::Random(rng) => {
            let idx: Vec<usize> = (0..n).collect();
            let perm = rng.choose_distinct(&idx, n);
            let mut rank = vec![0; n];
            for (r, &i) in perm.iter().enumerate() {
                rank[i] = r;
            }
            rank
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        key(b)
            .partial_cmp(&key(a))
            .unwrap_or(Ordering::Equal)
            .then(secondary[a].cmp(&secondary[b]))
    });

    let cap = instance.capacity();
    let mut x = Solution::zeros(n);
    for i in order {
        x.set(i, true);
        // re-sum in index order so the result agrees exactly with `evaluate`
        if instance.weight_of(&x) > cap {
            x.set(i, false);
        }
    }
    x
}

/// Scan items by value (descending, ties by index), adding each one that still fits.
pub fn greedy_by_value(instance: &KnapsackInstance) -> Solution {
    greedy_by_value_with(instance, TieBreak::Index)
}

pub fn greedy_by_value_with(instance: &KnapsackInstance, ties: TieBreak<'_>) -> Solution {
    let items = instance.items();
    greedy_scan(instance, |i| items[i].value, ties)
}

/// Scan items by value/weight (descending, ties by index), adding each one that still fits.
pub fn greedy_by_ratio(instance: &KnapsackInstance) -> Solution {
    greedy_by_ratio_with(instance, TieBreak::Index)
}

pub fn greedy_by_ratio_with(instance: &KnapsackInstance, ties: TieBreak<'_>) -> Solution {
    let items = instance.items();
    greedy_scan(instance, |i| items[i].value / items[i].weight, ties)
}

/// Adds uniformly drawn unselected items until the solution is infeasible
/// or nothing is left to add.
pub fn add_until_infeasible(
    instance: &KnapsackInstance,
    feasible: &Solution,
    rng: &mut RandomStream,
) -> Solution {
    let cap = instance.capacity();
    let mut x = feasible.clone();
    let mut pool: Vec<usize> = x.unselected().collect();
    while instance.weight_of(&x) <= cap && !pool.is_empty() {
        let slot = rng.index(pool.len());
        x.set(pool.swap_remove(slot), true);
    }
    x
}

/// Greedy initialisation of size `size` (a multiple of 4): `x_a, x_b`
/// repeated to fill the first half, then one infeasible companion per
/// feasible member in the same order.
///
/// If every item fits in the knapsack no infeasible companion exists; the
/// all-ones solution is used instead.
pub fn greedy_init(
    instance: &KnapsackInstance,
    size: usize,
    rng: &mut RandomStream,
) -> Result<Population> {
    if size < 4 || !size.is_multiple_of(4) {
        return Err(Error::Validation(vec![format!(
            "greedy initialisation needs a population size divisible by 4, got {size}"
        )]));
    }
    let x_a = greedy_by_value(instance);
    let x_b = greedy_by_ratio(instance);
    let feasible: Vec<Solution> = (0..size / 2)
        .map(|i| if i % 2 == 0 { x_a.clone() } else { x_b.clone() })
        .collect();
    let companions: Vec<Solution> = feasible
        .iter()
        .map(|x| add_until_infeasible(instance, x, rng))
        .collect();
    feasible
        .into_iter()
        .chain(companions)
        .map(|s| EvaluatedSolution::new(instance, s))
        .collect::<Result<Vec<_>>>()
        .map(Population::new)
}

/// Worst-case population: `size/2` local optima followed by `size/2`
/// minimally infeasible solutions, the i-th built from the i-th local optimum.
///
/// Members are redrawn (up to a bounded number of attempts) to keep them distinct.
pub fn adversarial_population(
    instance: &KnapsackInstance,
    catalog: &SolutionCatalog,
    size: usize,
    rng: &mut RandomStream,
) -> Result<Population> {
    if size < 2 || !size.is_multiple_of(2) {
        return Err(Error::Validation(vec![format!(
            "adversarial population size must be even and at least 2, got {size}"
        )]));
    }
    if instance.n() != catalog.n() {
        return Err(Error::contract("catalog and instance sizes differ"));
    }
    const ATTEMPTS: usize = 64;
    let half = size / 2;
    let mut locs: Vec<Solution> = Vec::with_capacity(half);
    for _ in 0..half {
        let mut x = catalog.draw_x_loc(rng);
        for _ in 0..ATTEMPTS {
            if !locs.contains(&x) {
                break;
            }
            x = catalog.draw_x_loc(rng);
        }
        locs.push(x);
    }
    let mut vioas: Vec<Solution> = Vec::with_capacity(half);
    for loc in &locs {
        let mut x = catalog.extend_to_vioa(loc, rng);
        for _ in 0..ATTEMPTS {
            if !vioas.contains(&x) {
                break;
            }
            x = catalog.extend_to_vioa(loc, rng);
        }
        vioas.push(x);
    }
    locs.into_iter()
        .chain(vioas)
        .map(|s| {
            let evaluation = evaluate(instance, &s)?;
            Ok(EvaluatedSolution {
                solution: s,
                evaluation,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Population::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        catalog_instance1, catalog_instance2, make_instance1, make_instance2, Instance1Params,
        Instance2Params, SolutionClass,
    };
    use crate::oracle::{brute_force_opt, is_local_optimum};
    use crate::pareto::dominates;
    use crate::problem::Item;

    fn inst1() -> KnapsackInstance {
        make_instance1(Instance1Params::new(0.5, 20)).unwrap()
    }

    fn inst2() -> KnapsackInstance {
        make_instance2(Instance2Params::new(16)).unwrap()
    }

    #[test]
    fn single_item_local_search_splits_evenly() {
        let inst = KnapsackInstance::new("one", vec![Item::new(1.0, 2.0)], 1.0).unwrap();
        let mut rng = RandomStream::new(1, 0);
        let runs = 10_000;
        let ones = (0..runs)
            .filter(|_| local_search_one(&inst, &mut rng).to_string() == "1")
            .count();
        let frac = ones as f64 / runs as f64;
        assert!((frac - 0.5).abs() < 0.03, "{frac}");
    }

    #[test]
    fn local_search_outputs_on_instance1() {
        let inst = inst1();
        let mut rng = RandomStream::new(2, 0);
        let x_max = Solution::from_indices(20, [0]);
        let mut near_max = 0;
        let runs = 10_000;
        for _ in 0..runs {
            let x = local_search_one(&inst, &mut rng);
            let e = evaluate(&inst, &x).unwrap();
            if e.feasible {
                assert!(is_local_optimum(&inst, &x).unwrap(), "{x}");
            } else {
                let dist1_feasible = x.selected().any(|i| {
                    let mut y = x.clone();
                    y.set(i, false);
                    evaluate(&inst, &y).unwrap().feasible
                });
                assert!(dist1_feasible, "{x}");
            }
            if x.hamming(&x_max) <= 1 && x.get(0) {
                near_max += 1;
            }
        }
        // item 1 picked first (probability 1/20) pins the run to x_max or x_max plus one item
        assert!(near_max as f64 / runs as f64 >= 0.03, "{near_max}");
    }

    #[test]
    fn local_search_init_sizes_and_determinism() {
        let inst = inst1();
        let p = local_search_init(&inst, 1, &mut RandomStream::new(1, 1)).unwrap();
        assert_eq!(p.len(), 1);
        let a = local_search_init(&inst, 20, &mut RandomStream::new(4, 2)).unwrap();
        let b = local_search_init(&inst, 20, &mut RandomStream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        for m in a.members() {
            if m.is_feasible() {
                assert!(is_local_optimum(&inst, &m.solution).unwrap());
            } else {
                assert!(m.violation() > 0.0);
            }
        }
        assert!(local_search_init(&inst, 0, &mut RandomStream::new(4, 2)).is_err());
    }

    #[test]
    fn greedy_on_instance1() {
        let inst = inst1();
        let xa = greedy_by_value(&inst);
        assert_eq!(xa, Solution::from_indices(20, [0]));
        let xb = greedy_by_ratio(&inst);
        assert_eq!(xb.count_in(&(11..20).collect::<Vec<_>>()), 9);
        assert_eq!(xb.count_in(&(1..11).collect::<Vec<_>>()), 4);
        assert!(!xb.get(0));
        assert_eq!(
            xb.selected()
                .filter(|&i| (1..11).contains(&i))
                .collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        let f = evaluate(&inst, &xb).unwrap().objective;
        assert!((f - 5.1283).abs() < 1e-4);
    }

    #[test]
    fn greedy_on_instance2() {
        let inst = inst2();
        let expect = Solution::from_indices(16, std::iter::once(2).chain(4..16));
        assert_eq!(greedy_by_value(&inst), expect);
        assert_eq!(greedy_by_ratio(&inst), expect);
        let f = evaluate(&inst, &expect).unwrap().objective;
        assert!((f - 18.00293).abs() < 1e-5);
    }

    #[test]
    fn greedy_toy_and_all_fit() {
        let toy = KnapsackInstance::new("toy", vec![Item::new(2.0, 1.0), Item::new(3.0, 2.0)], 2.0)
            .unwrap();
        assert_eq!(greedy_by_ratio(&toy).to_string(), "10");
        assert_eq!(greedy_by_value(&toy).to_string(), "01");
        let roomy = KnapsackInstance::new(
            "roomy",
            vec![Item::new(2.0, 1.0), Item::new(3.0, 2.0)],
            10.0,
        )
        .unwrap();
        assert_eq!(greedy_by_value(&roomy).to_string(), "11");
        assert_eq!(greedy_by_ratio(&roomy).to_string(), "11");
    }

    #[test]
    fn random_tie_break_stays_feasible() {
        let inst = inst1();
        let mut rng = RandomStream::new(8, 0);
        for _ in 0..50 {
            let x = greedy_by_ratio_with(&inst, TieBreak::Random(&mut rng));
            assert!(evaluate(&inst, &x).unwrap().feasible);
            let y = greedy_by_value_with(&inst, TieBreak::Random(&mut rng));
            assert_eq!(y, Solution::from_indices(20, [0]));
        }
    }

    #[test]
    fn greedy_init_on_instance2() {
        let inst = inst2();
        let pop = greedy_init(&inst, 8, &mut RandomStream::new(1, 0)).unwrap();
        assert_eq!(pop.len(), 8);
        let xa = greedy_by_value(&inst);
        let xb = greedy_by_ratio(&inst);
        assert_eq!(pop.members().iter().filter(|m| m.solution == xa).count(), 4);
        assert_eq!(pop.members().iter().filter(|m| m.solution == xb).count(), 4);
        for (i, m) in pop.members().iter().enumerate() {
            assert_eq!(m.is_feasible(), i < 4);
            if i >= 4 {
                assert!(m.violation() > 0.0);
                assert_eq!(m.solution.hamming(&pop.members()[i - 4].solution), 1);
            }
        }
        assert!(greedy_init(&inst, 6, &mut RandomStream::new(1, 0)).is_err());
    }

    #[test]
    fn greedy_init_on_instance1_holds_optimum() {
        let inst = inst1();
        let pop = greedy_init(&inst, 8, &mut RandomStream::new(1, 0)).unwrap();
        let best = pop.best_feasible_objective().unwrap();
        assert_eq!(best, brute_force_opt(&inst).unwrap().optimum);
    }

    #[test]
    fn adversarial_population_instance1() {
        let inst = inst1();
        let p = Instance1Params::new(0.5, 20);
        let mut rng = RandomStream::new(3, 0);
        let cat = catalog_instance1(p, &mut rng).unwrap();
        let pop = adversarial_population(&inst, &cat, 20, &mut rng).unwrap();
        let (locs, vioas) = pop.members().split_at(10);
        for m in locs {
            assert_eq!(m.objective(), 5.0);
            assert!(m.is_feasible());
            assert_eq!(cat.classify(&m.solution, true), SolutionClass::XLoc);
        }
        for m in vioas {
            assert!((m.objective() - 5.1254).abs() < 1e-3);
            assert!((m.violation() - 0.0157).abs() < 1e-4);
            assert_eq!(cat.classify(&m.solution, false), SolutionClass::XVioa);
        }
        let mut sols: Vec<_> = pop.members().iter().map(|m| m.solution.clone()).collect();
        sols.sort();
        sols.dedup();
        assert_eq!(sols.len(), 20);

        let pair = adversarial_population(&inst, &cat, 2, &mut rng).unwrap();
        let (a, b) = (&pair.members()[0].evaluation, &pair.members()[1].evaluation);
        assert!(!dominates(a, b) && !dominates(b, a));

        let again = adversarial_population(&inst, &cat, 20, &mut RandomStream::new(9, 9)).unwrap();
        let again2 = adversarial_population(&inst, &cat, 20, &mut RandomStream::new(9, 9)).unwrap();
        assert_eq!(again, again2);
    }

    #[test]
    fn adversarial_population_instance2() {
        let inst = inst2();
        let mut rng = RandomStream::new(3, 0);
        let cat = catalog_instance2(Instance2Params::new(16), &mut rng).unwrap();
        let pop = adversarial_population(&inst, &cat, 8, &mut rng).unwrap();
        for (i, m) in pop.members().iter().enumerate() {
            let class = cat.classify(&m.solution, m.is_feasible());
            assert_eq!(
                class,
                if i < 4 {
                    SolutionClass::XLoc
                } else {
                    SolutionClass::XVioa
                }
            );
        }
    }
}
