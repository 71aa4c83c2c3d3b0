//! Pareto order on (maximise objective, minimise violation).

use std::cmp::Ordering;

use crate::problem::{EvaluatedSolution, Evaluation};

/// `a` dominates `b` when it is no worse on both criteria and strictly
/// better on at least one. Identical points do not dominate each other.
pub fn dominates(a: &Evaluation, b: &Evaluation) -> bool {
    a.objective >= b.objective
        && a.violation <= b.violation
        && (a.objective > b.objective || a.violation < b.violation)
}

/// Members not dominated by any other member, in input order.
///
/// Duplicates of a non-dominated point are all kept. Runs as a sweep over
/// the points sorted by objective (descending) so it does not share a code
/// path with the pairwise definition.
pub fn nondominated_filter(points: &[EvaluatedSolution]) -> Vec<EvaluatedSolution> {
    nondominated_mask(points.iter().map(|p| &p.evaluation))
        .into_iter()
        .zip(points)
        .filter(|(keep, _)| *keep)
        .map(|(_, p)| p.clone())
        .collect()
}

/// `mask[i]` is true iff point `i` is non-dominated within `points`.
pub fn nondominated_mask<'a>(points: impl IntoIterator<Item = &'a Evaluation>) -> Vec<bool> {
    let evals: Vec<&Evaluation> = points.into_iter().collect();
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&i, &j| {
        evals[j]
            .objective
            .partial_cmp(&evals[i].objective)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                evals[i]
                    .violation
                    .partial_cmp(&evals[j].violation)
                    .unwrap_or(Ordering::Equal)
            })
    });

    let mut keep = vec![false; evals.len()];
    // smallest violation among points with a strictly larger objective
    let mut best_above = f64::INFINITY;
    let mut start = 0;
    while start < order.len() {
        let f = evals[order[start]].objective;
        let mut end = start;
        while end < order.len() && evals[order[end]].objective == f {
            end += 1;
        }
        // within a group of equal objective, the first has the least violation
        let group_min = evals[order[start]].violation;
        for &idx in &order[start..end] {
            let v = evals[idx].violation;
            keep[idx] = v == group_min && v < best_above;
        }
        best_above = best_above.min(group_min);
        start = end;
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Solution;
    use proptest::prelude::*;

    fn ev(f: f64, v: f64) -> Evaluation {
        Evaluation::new(f, v)
    }

    fn pt(f: f64, v: f64) -> EvaluatedSolution {
        EvaluatedSolution {
            solution: Solution::zeros(1),
            evaluation: ev(f, v),
        }
    }

    fn brute(points: &[Evaluation]) -> Vec<bool> {
        points
            .iter()
            .map(|p| !points.iter().any(|q| dominates(q, p)))
            .collect()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ev(5.0, 0.0), &ev(4.0, 0.0)));
        assert!(!dominates(&ev(5.0, 0.0), &ev(5.0, 0.0)));
        let loc = ev(5.0, 0.0);
        let vioa = ev(5.1254, 0.0157);
        assert!(!dominates(&loc, &vioa));
        assert!(!dominates(&vioa, &loc));
    }

    #[test]
    fn filter_examples() {
        assert!(nondominated_filter(&[]).is_empty());

        let out = nondominated_filter(&[pt(5.0, 0.0), pt(5.1254, 0.0157), pt(3.0, 0.0)]);
        let got: Vec<(f64, f64)> = out.iter().map(|p| (p.objective(), p.violation())).collect();
        assert_eq!(got, vec![(5.0, 0.0), (5.1254, 0.0157)]);

        let out = nondominated_filter(&[pt(5.0, 0.0), pt(5.0, 0.0)]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn equal_objective_larger_violation_is_dropped() {
        let mask = nondominated_mask(&[ev(5.0, 0.2), ev(5.0, 0.1), ev(6.0, 0.3)]);
        assert_eq!(mask, vec![false, true, true]);
    }

    fn small_eval() -> impl Strategy<Value = Evaluation> {
        // coarse grid so ties on either coordinate are common
        (0u8..8, 0u8..4).prop_map(|(f, v)| ev(f as f64, v as f64 * 0.5))
    }

    proptest! {
        #[test]
        fn irreflexive_antisymmetric_transitive(a in small_eval(), b in small_eval(), c in small_eval()) {
            prop_assert!(!dominates(&a, &a));
            prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
            if dominates(&a, &b) && dominates(&b, &c) {
                prop_assert!(dominates(&a, &c));
            }
        }

        #[test]
        fn sweep_matches_pairwise(points in prop::collection::vec(small_eval(), 0..60)) {
            prop_assert_eq!(nondominated_mask(&points), brute(&points));
        }

        #[test]
        fn feasible_beats_infeasible_with_no_less_objective(
            f in 0.0f64..10.0, df in 0.0f64..5.0, v in 0.001f64..3.0,
        ) {
            let a = ev(f + df, 0.0);
            let b = ev(f, v);
            prop_assert!(dominates(&a, &b));
        }
    }
}
