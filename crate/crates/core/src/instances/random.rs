use crate::error::{Error, Result};
use crate::problem::{FamilyParams, Item, KnapsackInstance};
use crate::rng::RandomStream;

fn check_range(name: &str, lo: f64, hi: f64, problems: &mut Vec<String>) {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        problems.push(format!(
            "{name} must satisfy 0 < lo <= hi < inf, got [{lo}, {hi}]"
        ));
    }
}

/// Values and weights uniform on the given ranges, capacity
/// `capacity_fraction · Σ w_i`. Values are drawn before weights, item by item.
pub fn make_random_instance(
    n: usize,
    value_range: (f64, f64),
    weight_range: (f64, f64),
    capacity_fraction: f64,
    rng: &mut RandomStream,
) -> Result<KnapsackInstance> {
    let mut problems = Vec::new();
    if n == 0 {
        problems.push("n must be at least 1".to_string());
    }
    check_range("value_range", value_range.0, value_range.1, &mut problems);
    check_range(
        "weight_range",
        weight_range.0,
        weight_range.1,
        &mut problems,
    );
    if !(capacity_fraction > 0.0 && capacity_fraction < 1.0) {
        problems.push(format!(
            "capacity_fraction must lie in (0,1), got {capacity_fraction}"
        ));
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let (seed, stream) = (rng.seed(), rng.stream_id());
    let items: Vec<Item> = (0..n)
        .map(|_| {
            let value = rng.uniform_in(value_range.0, value_range.1);
            let weight = rng.uniform_in(weight_range.0, weight_range.1);
            Item::new(value, weight)
        })
        .collect();
    let total: f64 = items.iter().map(|it| it.weight).sum();
    Ok(
        KnapsackInstance::new(format!("random(n={n})"), items, capacity_fraction * total)?
            .with_family(FamilyParams::Random {
                n,
                value_range: [value_range.0, value_range.1],
                weight_range: [weight_range.0, weight_range.1],
                capacity_fraction,
                seed,
                stream,
            }),
    )
}

/// Like [`make_random_instance`] with integer values and weights and capacity
/// `max(1, floor(capacity_fraction · Σ w_i))`, so the DP oracle applies.
pub fn make_random_integer_instance(
    n: usize,
    value_range: (u64, u64),
    weight_range: (u64, u64),
    capacity_fraction: f64,
    rng: &mut RandomStream,
) -> Result<KnapsackInstance> {
    let mut problems = Vec::new();
    if n == 0 {
        problems.push("n must be at least 1".to_string());
    }
    if value_range.0 == 0 || value_range.0 > value_range.1 {
        problems.push(format!(
            "value_range must satisfy 1 <= lo <= hi, got {value_range:?}"
        ));
    }
    if weight_range.0 == 0 || weight_range.0 > weight_range.1 {
        problems.push(format!(
            "weight_range must satisfy 1 <= lo <= hi, got {weight_range:?}"
        ));
    }
    if !(capacity_fraction > 0.0 && capacity_fraction < 1.0) {
        problems.push(format!(
            "capacity_fraction must lie in (0,1), got {capacity_fraction}"
        ));
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let (seed, stream) = (rng.seed(), rng.stream_id());
    let items: Vec<Item> = (0..n)
        .map(|_| {
            let value = rng.integer_in(value_range.0, value_range.1) as f64;
            let weight = rng.integer_in(weight_range.0, weight_range.1) as f64;
            Item::new(value, weight)
        })
        .collect();
    let total: f64 = items.iter().map(|it| it.weight).sum();
    let capacity = (capacity_fraction * total).floor().max(1.0);
    Ok(
        KnapsackInstance::new(format!("random-int(n={n})"), items, capacity)?.with_family(
            FamilyParams::RandomInteger {
                n,
                value_range: [value_range.0, value_range.1],
                weight_range: [weight_range.0, weight_range.1],
                capacity_fraction,
                seed,
                stream,
            },
        ),
    )
}

/// Three items `(1,1), (1,1), (1+2ε, 1+ε)` with capacity 2.
///
/// Both greedy orders take the third item first and then nothing else fits,
/// so the better greedy solution scores `1+2ε` against an optimum of 2.
pub fn make_greedy_tight_instance(epsilon: f64) -> Result<KnapsackInstance> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Validation(vec![format!(
            "epsilon must lie in (0, 0.5), got {epsilon}"
        )]));
    }
    let items = vec![
        Item::new(1.0, 1.0),
        Item::new(1.0, 1.0),
        Item::new(1.0 + 2.0 * epsilon, 1.0 + epsilon),
    ];
    Ok(
        KnapsackInstance::new(format!("greedy-tight(eps={epsilon})"), items, 2.0)?
            .with_family(FamilyParams::GreedyTight { epsilon }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{evaluate, Solution};

    #[test]
    fn degenerate_single_item() {
        let mut rng = RandomStream::new(1, 0);
        let inst = make_random_instance(1, (1.0, 1.0), (1.0, 1.0), 0.5, &mut rng).unwrap();
        assert_eq!(inst.capacity(), 0.5);
        assert!(evaluate(&inst, &Solution::zeros(1)).unwrap().feasible);
        assert!(
            !evaluate(&inst, &Solution::from_indices(1, [0]))
                .unwrap()
                .feasible
        );
    }

    #[test]
    fn deterministic_for_fixed_stream() {
        let a = make_random_instance(
            15,
            (1.0, 10.0),
            (1.0, 10.0),
            0.5,
            &mut RandomStream::new(3, 8),
        )
        .unwrap();
        let b = make_random_instance(
            15,
            (1.0, 10.0),
            (1.0, 10.0),
            0.5,
            &mut RandomStream::new(3, 8),
        )
        .unwrap();
        assert_eq!(a, b);
        let c = make_random_instance(
            15,
            (1.0, 10.0),
            (1.0, 10.0),
            0.5,
            &mut RandomStream::new(3, 9),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn draws_stay_in_range() {
        let mut rng = RandomStream::new(11, 0);
        let inst = make_random_instance(50, (2.0, 3.0), (5.0, 7.0), 0.3, &mut rng).unwrap();
        for it in inst.items() {
            assert!((2.0..=3.0).contains(&it.value));
            assert!((5.0..=7.0).contains(&it.weight));
        }
        let total: f64 = inst.items().iter().map(|i| i.weight).sum();
        assert_eq!(inst.capacity(), 0.3 * total);
    }

    #[test]
    fn integer_instances_have_integer_weights() {
        let mut rng = RandomStream::new(2, 0);
        let inst = make_random_integer_instance(12, (1, 30), (1, 20), 0.5, &mut rng).unwrap();
        assert!(inst.has_integer_weights());
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut rng = RandomStream::new(2, 0);
        assert!(make_random_instance(3, (0.0, 1.0), (1.0, 2.0), 0.5, &mut rng).is_err());
        assert!(make_random_instance(3, (1.0, 2.0), (1.0, 2.0), 1.5, &mut rng).is_err());
        assert!(make_random_instance(0, (1.0, 2.0), (1.0, 2.0), 0.5, &mut rng).is_err());
        assert!(make_greedy_tight_instance(0.0).is_err());
    }
}
