//! Exact ground truth for small instances: exhaustive enumeration, an
//! integer-weight dynamic program, and the local-optimum test.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{evaluate, Item, KnapsackInstance, Solution};

/// Largest `n` the exhaustive oracle accepts.
pub const ENUMERATION_LIMIT: usize = 24;

/// Upper bound on `(n + 1) · (W + 1)` table cells for the DP oracle.
pub const DP_MAX_CELLS: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOptimum {
    pub optimum: f64,
    /// Lexicographically smallest optimal bitstring (item 1 leftmost).
    pub witness: Solution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    Enumeration,
    DynamicProgram,
}

impl OracleMethod {
    pub fn label(self) -> &'static str {
        match self {
            OracleMethod::Enumeration => "enumeration",
            OracleMethod::DynamicProgram => "dynamic-program",
        }
    }
}

fn guard(instance: &KnapsackInstance) -> Result<()> {
    if instance.n() > ENUMERATION_LIMIT {
        return Err(Error::OracleCapacity {
            n: instance.n(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Masks put item 0 in the most significant position, so increasing mask
/// order is lexicographic order of the bitstring.
#[inline]
fn eval_mask(items: &[Item], mask: u32) -> (f64, f64) {
    let n = items.len();
    let mut value = 0.0;
    let mut weight = 0.0;
    for (i, item) in items.iter().enumerate() {
        if mask >> (n - 1 - i) & 1 == 1 {
            value += item.value;
            weight += item.weight;
        }
    }
    (value, weight)
}

fn mask_to_solution(n: usize, mask: u32) -> Solution {
    Solution::from_bits((0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect())
}

/// Folds every bitstring in mask order. Blocks of the mask space are
/// scanned in parallel and their partial results combined left to right,
/// so the outcome does not depend on scheduling.
fn scan<A, I, F, C>(instance: &KnapsackInstance, identity: I, fold: F, combine: C) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, u32, f64, f64) + Sync,
    C: Fn(A, A) -> A,
{
    let n = instance.n();
    let items = instance.items();
    let total: u64 = 1u64 << n;
    let block_bits = n.min(6);
    let blocks = 1u64 << block_bits;
    let block_len = total / blocks;
    let partials: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = identity();
            for mask in b * block_len..(b + 1) * block_len {
                let mask = mask as u32;
                let (v, w) = eval_mask(items, mask);
                fold(&mut acc, mask, v, w);
            }
            acc
        })
        .collect();
    partials
        .into_iter()
        .reduce(combine)
        .expect("at least one block")
}

/// Maximum objective over all feasible bitstrings, `n ≤ 24`.
pub fn brute_force_opt(instance: &KnapsackInstance) -> Result<OracleOptimum> {
    guard(instance)?;
    let cap = instance.capacity();
    let (value, mask) = scan(
        instance,
        || (f64::NEG_INFINITY, u32::MAX),
        |acc, mask, v, w| {
            if w <= cap && v > acc.0 {
                *acc = (v, mask);
            }
        },
        |a, b| if b.0 > a.0 { b } else { a },
    );
    Ok(OracleOptimum {
        optimum: value,
        witness: mask_to_solution(instance.n(), mask),
    })
}

/// The `k` largest distinct feasible objective values, descending.
pub fn top_k_feasible_values(instance: &KnapsackInstance, k: usize) -> Result<Vec<f64>> {
    guard(instance)?;
    if k == 0 {
        return Err(Error::contract("top_k_feasible_values needs k >= 1"));
    }
    let cap = instance.capacity();
    let insert = |top: &mut Vec<f64>, v: f64| {
        if top.len() == k && v <= top[k - 1] {
            return;
        }
        if top.contains(&v) {
            return;
        }
        let pos = top.partition_point(|&x| x > v);
        top.insert(pos, v);
        top.truncate(k);
    };
    Ok(scan(
        instance,
        || Vec::with_capacity(k + 1),
        |top, _, v, w| {
            if w <= cap {
                insert(top, v)
            }
        },
        |mut a, b| {
            for v in b {
                insert(&mut a, v);
            }
            a
        },
    ))
}

/// Number of feasible bitstrings whose objective equals `value` exactly.
pub fn count_feasible_with_objective(instance: &KnapsackInstance, value: f64) -> Result<u64> {
    guard(instance)?;
    let cap = instance.capacity();
    Ok(scan(
        instance,
        || 0u64,
        |c, _, v, w| {
            if w <= cap && v == value {
                *c += 1;
            }
        },
        |a, b| a + b,
    ))
}

/// Smallest violation over all infeasible bitstrings, `None` if every bitstring is feasible.
pub fn min_infeasible_violation(instance: &KnapsackInstance) -> Result<Option<f64>> {
    guard(instance)?;
    let cap = instance.capacity();
    let best = scan(
        instance,
        || f64::INFINITY,
        |m, _, _, w| {
            if w > cap {
                *m = m.min(w - cap);
            }
        },
        f64::min,
    );
    Ok(best.is_finite().then_some(best))
}

/// 0-1 knapsack DP over integer capacities. Requires integral weights and
/// capacity and at most [`DP_MAX_CELLS`] table cells.
pub fn dp_opt_integer_weights(instance: &KnapsackInstance) -> Result<OracleOptimum> {
    if !instance.has_integer_weights() {
        return Err(Error::Precondition(
            "dynamic program needs integer weights and capacity".to_string(),
        ));
    }
    let n = instance.n();
    let cap = instance.capacity();
    if cap > (DP_MAX_CELLS / (n + 1)) as f64 {
        return Err(Error::Precondition(format!(
            "dynamic program table (n+1)*(W+1) exceeds {DP_MAX_CELLS} cells"
        )));
    }
    let cap = cap as usize;
    let width = cap + 1;
    // best[i * width + c]: best value using items i.. with capacity c
    let mut best = vec![0.0f64; (n + 1) * width];
    for i in (0..n).rev() {
        let item = instance.items()[i];
        let w = item.weight as usize;
        let (row, next) = best.split_at_mut((i + 1) * width);
        let row = &mut row[i * width..];
        for c in 0..width {
            let skip = next[c];
            row[c] = if w <= c {
                skip.max(item.value + next[c - w])
            } else {
                skip
            };
        }
    }
    let mut witness = Solution::zeros(n);
    let mut c = cap;
    for i in 0..n {
        if best[i * width + c] != best[(i + 1) * width + c] {
            witness.set(i, true);
            c -= instance.items()[i].weight as usize;
        }
    }
    let optimum = evaluate(instance, &witness)?.objective;
    Ok(OracleOptimum { optimum, witness })
}

/// Enumeration when `n ≤ 24`, otherwise the DP when weights are integral.
pub fn exact_optimum(instance: &KnapsackInstance) -> Result<(OracleOptimum, OracleMethod)> {
    if instance.n() <= ENUMERATION_LIMIT {
        return Ok((brute_force_opt(instance)?, OracleMethod::Enumeration));
    }
    if instance.has_integer_weights() {
        return Ok((
            dp_opt_integer_weights(instance)?,
            OracleMethod::DynamicProgram,
        ));
    }
    Err(Error::OracleCapacity {
        n: instance.n(),
        limit: ENUMERATION_LIMIT,
    })
}

/// A feasible `x` is a local optimum when every feasible Hamming neighbour
/// has a strictly smaller objective. Checked by visiting all neighbours.
pub fn is_local_optimum(instance: &KnapsackInstance, solution: &Solution) -> Result<bool> {
    let here = evaluate(instance, solution)?;
    if !here.feasible {
        return Err(Error::contract(
            "local optimality is defined for feasible solutions only",
        ));
    }
    let mut y = solution.clone();
    for i in 0..solution.len() {
        y.flip(i);
        let e = evaluate(instance, &y)?;
        y.flip(i);
        if e.feasible && e.objective >= here.objective {
            return Ok(false);
        }
    }
    Ok(true)
}

/// With positive values, local optimality reduces to "no single item can be added".
pub fn is_maximal_feasible(instance: &KnapsackInstance, solution: &Solution) -> Result<bool> {
    instance.check_len(solution)?;
    let weight = instance.weight_of(solution);
    if weight > instance.capacity() {
        return Err(Error::contract(
            "local optimality is defined for feasible solutions only",
        ));
    }
    let mut y = solution.clone();
    for i in solution.unselected().collect::<Vec<_>>() {
        y.set(i, true);
        let fits = instance.weight_of(&y) <= instance.capacity();
        y.set(i, false);
        if fits {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        make_instance1, make_instance2, make_random_integer_instance, Instance1Params,
        Instance2Params,
    };
    use crate::rng::RandomStream;

    fn toy() -> KnapsackInstance {
        KnapsackInstance::new("toy", vec![Item::new(2.0, 1.0), Item::new(3.0, 2.0)], 2.0).unwrap()
    }

    #[test]
    fn two_item_enumeration() {
        let r = brute_force_opt(&toy()).unwrap();
        assert_eq!(r.optimum, 3.0);
        assert_eq!(r.witness.to_string(), "01");
        assert_eq!(dp_opt_integer_weights(&toy()).unwrap().optimum, 3.0);
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        let inst = KnapsackInstance::new("tie", vec![Item::new(1.0, 1.0); 3], 1.0).unwrap();
        assert_eq!(brute_force_opt(&inst).unwrap().witness.to_string(), "001");
        assert_eq!(
            dp_opt_integer_weights(&inst).unwrap().witness.to_string(),
            "001"
        );
    }

    #[test]
    fn instance1_optimum_is_item_one() {
        let inst = make_instance1(Instance1Params::new(0.5, 20)).unwrap();
        let r = brute_force_opt(&inst).unwrap();
        assert_eq!(r.optimum, 20.0);
        assert_eq!(r.witness.to_string(), "10000000000000000000");
        assert_eq!(count_feasible_with_objective(&inst, 20.0).unwrap(), 1);
        let top = top_k_feasible_values(&inst, 2).unwrap();
        assert_eq!(top[0], 20.0);
        let a_ln = (0.5f64.ln() * 20f64.ln()).exp();
        assert!((top[1] - (4.0 + 9.0 * a_ln)).abs() < 1e-12);
        assert!((top[1] - 5.1283).abs() < 1e-4);
    }

    #[test]
    fn instance2_optimum_and_second_best() {
        let inst = make_instance2(Instance2Params::new(16)).unwrap();
        let r = brute_force_opt(&inst).unwrap();
        assert_eq!(r.optimum, 32.0);
        assert_eq!(r.witness, Solution::from_indices(16, [0, 1]));
        let top = top_k_feasible_values(&inst, 2).unwrap();
        assert!((top[1] - (18.0 + 12.0 * 16f64.powi(-3))).abs() < 1e-12);
    }

    #[test]
    fn single_item_top_two() {
        let inst = KnapsackInstance::new("one", vec![Item::new(2.0, 1.0)], 2.0).unwrap();
        assert_eq!(top_k_feasible_values(&inst, 2).unwrap(), vec![2.0, 0.0]);
        assert_eq!(min_infeasible_violation(&inst).unwrap(), None);
    }

    #[test]
    fn size_guard() {
        let inst = KnapsackInstance::new("big", vec![Item::new(1.0, 0.5); 25], 3.0).unwrap();
        assert!(matches!(
            brute_force_opt(&inst),
            Err(Error::OracleCapacity { n: 25, limit: 24 })
        ));
        assert!(matches!(
            top_k_feasible_values(&inst, 2),
            Err(Error::OracleCapacity { .. })
        ));
    }

    #[test]
    fn dp_guards() {
        let inst = make_instance1(Instance1Params::new(0.5, 20)).unwrap();
        assert!(matches!(
            dp_opt_integer_weights(&inst),
            Err(Error::Precondition(_))
        ));
        let huge = KnapsackInstance::new("huge", vec![Item::new(1.0, 1.0); 2], 1e9).unwrap();
        assert!(matches!(
            dp_opt_integer_weights(&huge),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dp_matches_enumeration_on_integer_corpus() {
        for s in 0..200 {
            let mut rng = RandomStream::new(77, s);
            let inst = make_random_integer_instance(12, (1, 40), (1, 25), 0.45, &mut rng).unwrap();
            let a = brute_force_opt(&inst).unwrap();
            let b = dp_opt_integer_weights(&inst).unwrap();
            assert_eq!(a.optimum, b.optimum, "stream {s}");
            assert_eq!(a.witness, b.witness, "stream {s}");
        }
    }

    #[test]
    fn local_optimum_examples() {
        let inst = make_instance1(Instance1Params::new(0.5, 20)).unwrap();
        assert!(!is_local_optimum(&inst, &Solution::zeros(20)).unwrap());
        assert!(!is_maximal_feasible(&inst, &Solution::zeros(20)).unwrap());
        let x_max = Solution::from_indices(20, [0]);
        assert!(is_local_optimum(&inst, &x_max).unwrap());
        assert!(is_maximal_feasible(&inst, &x_max).unwrap());
        let loc = Solution::from_indices(20, [2, 4, 6, 8, 10]);
        assert!(is_local_optimum(&inst, &loc).unwrap());
        let infeasible = Solution::from_indices(20, [0, 1]);
        assert!(is_local_optimum(&inst, &infeasible).is_err());
        assert!(is_maximal_feasible(&inst, &infeasible).is_err());
    }
}
