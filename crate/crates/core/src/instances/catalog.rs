//! Named solution classes of the two adversarial families, sampled
//! representatives, and an audit of the closed-form values claimed for them.

use std::fmt;

use serde::Serialize;

use super::{alpha_powers, Family, IndexSets, Instance1Params, Instance2Params};
use crate::error::{Error, Result};
use crate::oracle;
use crate::problem::{evaluate, KnapsackInstance, Solution};
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SolutionClass {
    XMax,
    XLoc,
    XVioa,
    XViob,
    XVioc,
    OtherFeasible,
    OtherInfeasible,
}

impl SolutionClass {
    pub const ALL: [SolutionClass; 7] = [
        SolutionClass::XMax,
        SolutionClass::XLoc,
        SolutionClass::XVioa,
        SolutionClass::XViob,
        SolutionClass::XVioc,
        SolutionClass::OtherFeasible,
        SolutionClass::OtherInfeasible,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SolutionClass::XMax => "XMAX",
            SolutionClass::XLoc => "XLOC",
            SolutionClass::XVioa => "XVIOA",
            SolutionClass::XViob => "XVIOB",
            SolutionClass::XVioc => "XVIOC",
            SolutionClass::OtherFeasible => "OTHER_FEASIBLE",
            SolutionClass::OtherInfeasible => "OTHER_INFEASIBLE",
        }
    }
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Objective,
    Violation,
    Weight,
}

/// A value stated in closed form, either exactly or as an interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ClaimedValue {
    Exact(f64),
    Interval {
        lower: f64,
        lower_inclusive: bool,
        upper: f64,
        upper_inclusive: bool,
    },
}

/// Relative tolerance used when comparing an exact claim with `evaluate`.
pub const CLAIM_REL_TOL: f64 = 1e-12;

impl ClaimedValue {
    pub fn holds_for(&self, x: f64) -> bool {
        match *self {
            ClaimedValue::Exact(c) => relative_error(c, x) <= CLAIM_REL_TOL,
            ClaimedValue::Interval {
                lower,
                lower_inclusive,
                upper,
                upper_inclusive,
            } => {
                let lo_ok = if lower_inclusive {
                    x >= lower
                } else {
                    x > lower
                };
                let hi_ok = if upper_inclusive {
                    x <= upper
                } else {
                    x < upper
                };
                lo_ok && hi_ok
            }
        }
    }
}

fn relative_error(claimed: f64, actual: f64) -> f64 {
    let diff = (claimed - actual).abs();
    if claimed == 0.0 {
        diff
    } else {
        diff / claimed.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub class: SolutionClass,
    pub quantity: Quantity,
    pub value: ClaimedValue,
}

#[derive(Clone, Debug)]
pub struct SolutionCatalog {
    pub family: Family,
    pub index_sets: IndexSets,
    pub x_max: Solution,
    pub sample_x_loc: Solution,
    pub sample_x_vioa: Solution,
    pub sample_x_viob: Solution,
    pub sample_x_vioc: Option<Solution>,
    pub claimed_values: Vec<Claim>,
}

impl SolutionCatalog {
    pub fn n(&self) -> usize {
        self.x_max.len()
    }

    pub fn sample(&self, class: SolutionClass) -> Option<&Solution> {
        match class {
            SolutionClass::XMax => Some(&self.x_max),
            SolutionClass::XLoc => Some(&self.sample_x_loc),
            SolutionClass::XVioa => Some(&self.sample_x_vioa),
            SolutionClass::XViob => Some(&self.sample_x_viob),
            SolutionClass::XVioc => self.sample_x_vioc.as_ref(),
            _ => None,
        }
    }

    pub fn claim(&self, class: SolutionClass, quantity: Quantity) -> Option<ClaimedValue> {
        self.claimed_values
            .iter()
            .find(|c| c.class == class && c.quantity == quantity)
            .map(|c| c.value)
    }

    /// A fresh uniformly drawn member of the local-optimum class.
    pub fn draw_x_loc(&self, rng: &mut RandomStream) -> Solution {
        let n = self.n();
        let sets = &self.index_sets;
        match self.family {
            Family::Instance1(p) => {
                Solution::from_indices(n, rng.choose_distinct(&sets.i, p.loc_size()))
            }
            Family::Instance2(p) => {
                let mut picked = rng.choose_distinct(&sets.i, 1);
                picked.extend(&sets.j);
                picked.extend(rng.choose_distinct(&sets.k, p.n / 4 - 2));
                Solution::from_indices(n, picked)
            }
        }
    }

    /// Extends a local optimum by one uniformly drawn item that makes it
    /// minimally infeasible: a J item for Instance 1, an unselected K item for Instance 2.
    pub fn extend_to_vioa(&self, loc: &Solution, rng: &mut RandomStream) -> Solution {
        let pool: Vec<usize> = match self.family {
            Family::Instance1(_) => self.index_sets.j.clone(),
            Family::Instance2(_) => self
                .index_sets
                .k
                .iter()
                .copied()
                .filter(|&k| !loc.get(k))
                .collect(),
        };
        let mut x = loc.clone();
        x.set(pool[rng.index(pool.len())], true);
        x
    }

    pub fn draw_x_viob(&self, rng: &mut RandomStream) -> Solution {
        let pool = match self.family {
            Family::Instance1(_) => &self.index_sets.j,
            Family::Instance2(_) => &self.index_sets.k,
        };
        let mut x = self.x_max.clone();
        x.set(pool[rng.index(pool.len())], true);
        x
    }

    /// Structural class of a solution, decided from per-index-set bit counts.
    pub fn classify(&self, solution: &Solution, feasible: bool) -> SolutionClass {
        let s = &self.index_sets;
        let (h, i, j, k) = (
            solution.count_in(&s.h),
            solution.count_in(&s.i),
            solution.count_in(&s.j),
            solution.count_in(&s.k),
        );
        let class = match self.family {
            Family::Instance1(p) => {
                let loc = p.loc_size();
                match (h, i, j) {
                    (1, 0, 0) => Some(SolutionClass::XMax),
                    (0, x, 0) if x == loc => Some(SolutionClass::XLoc),
                    (0, x, 1) if x == loc => Some(SolutionClass::XVioa),
                    (1, 0, 1) => Some(SolutionClass::XViob),
                    _ => None,
                }
            }
            Family::Instance2(p) => {
                let all_j = s.j.len();
                let loc_k = p.n / 4 - 2;
                match (h, i, j, k) {
                    (2, 0, 0, 0) => Some(SolutionClass::XMax),
                    (0, 1, jj, kk) if jj == all_j && kk == loc_k => Some(SolutionClass::XLoc),
                    (0, 1, jj, kk) if jj == all_j && kk == loc_k + 1 => Some(SolutionClass::XVioa),
                    (2, 0, 0, 1) => Some(SolutionClass::XViob),
                    (2, 0, jj, 0) if jj >= 1 => Some(SolutionClass::XVioc),
                    _ => None,
                }
            }
        };
        class.unwrap_or(if feasible {
            SolutionClass::OtherFeasible
        } else {
            SolutionClass::OtherInfeasible
        })
    }
}

pub fn catalog_instance1(
    params: Instance1Params,
    rng: &mut RandomStream,
) -> Result<SolutionCatalog> {
    params.validate()?;
    let n = params.n;
    let nf = n as f64;
    let (a_ln, a_2ln) = alpha_powers(params.alpha, n);
    let loc_f = params.loc_size() as f64;
    use ClaimedValue::Exact;
    use Quantity::*;
    use SolutionClass::*;
    let claims = vec![
        Claim {
            class: XMax,
            quantity: Objective,
            value: Exact(nf),
        },
        Claim {
            class: XLoc,
            quantity: Objective,
            value: Exact(loc_f),
        },
        // implied by v(x_vioa) = weight of one J item
        Claim {
            class: XLoc,
            quantity: Weight,
            value: Exact(nf),
        },
        Claim {
            class: XVioa,
            quantity: Objective,
            value: Exact(loc_f + a_ln),
        },
        Claim {
            class: XVioa,
            quantity: Violation,
            value: Exact(a_2ln),
        },
        Claim {
            class: XViob,
            quantity: Objective,
            value: Exact(nf + a_ln),
        },
        Claim {
            class: XViob,
            quantity: Violation,
            value: Exact(a_2ln),
        },
    ];
    let mut catalog = SolutionCatalog {
        family: Family::Instance1(params),
        index_sets: params.index_sets(),
        x_max: Solution::from_indices(n, [0]),
        sample_x_loc: Solution::zeros(n),
        sample_x_vioa: Solution::zeros(n),
        sample_x_viob: Solution::zeros(n),
        sample_x_vioc: None,
        claimed_values: claims,
    };
    catalog.sample_x_loc = catalog.draw_x_loc(rng);
    catalog.sample_x_vioa = catalog.extend_to_vioa(&catalog.sample_x_loc, rng);
    catalog.sample_x_viob = catalog.draw_x_viob(rng);
    Ok(catalog)
}

pub fn catalog_instance2(
    params: Instance2Params,
    rng: &mut RandomStream,
) -> Result<SolutionCatalog> {
    params.validate()?;
    let n = params.n;
    let nf = n as f64;
    let n3 = nf.powi(-3);
    let w_k = params.k_weight();
    let loc_f = nf + 2.0 + (nf / 2.0 - 2.0) * n3;
    use ClaimedValue::{Exact, Interval};
    use Quantity::*;
    use SolutionClass::*;
    let claims = vec![
        Claim {
            class: XMax,
            quantity: Objective,
            value: Exact(2.0 * nf),
        },
        Claim {
            class: XLoc,
            quantity: Objective,
            value: Exact(loc_f),
        },
        // implied by v(x_vioa) = weight of one K item
        Claim {
            class: XLoc,
            quantity: Weight,
            value: Exact(2.0 * nf),
        },
        Claim {
            class: XVioa,
            quantity: Objective,
            value: Exact(loc_f + n3),
        },
        Claim {
            class: XVioa,
            quantity: Violation,
            value: Exact(w_k),
        },
        Claim {
            class: XViob,
            quantity: Objective,
            value: Exact(2.0 * nf + n3),
        },
        Claim {
            class: XViob,
            quantity: Violation,
            value: Exact(w_k),
        },
        Claim {
            class: XVioc,
            quantity: Objective,
            value: Interval {
                lower: 2.0 * nf,
                lower_inclusive: false,
                upper: 2.0 * nf + nf.powi(-2) / 4.0,
                upper_inclusive: true,
            },
        },
        Claim {
            class: XVioc,
            quantity: Violation,
            value: Interval {
                lower: 0.0,
                lower_inclusive: false,
                upper: n3 / 4.0,
                upper_inclusive: false,
            },
        },
    ];
    let mut catalog = SolutionCatalog {
        family: Family::Instance2(params),
        index_sets: params.index_sets(),
        x_max: Solution::from_indices(n, [0, 1]),
        sample_x_loc: Solution::zeros(n),
        sample_x_vioa: Solution::zeros(n),
        sample_x_viob: Solution::zeros(n),
        sample_x_vioc: None,
        claimed_values: claims,
    };
    catalog.sample_x_loc = catalog.draw_x_loc(rng);
    catalog.sample_x_vioa = catalog.extend_to_vioa(&catalog.sample_x_loc, rng);
    catalog.sample_x_viob = catalog.draw_x_viob(rng);
    let mut vioc = catalog.x_max.clone();
    let j = &catalog.index_sets.j;
    vioc.set(j[rng.index(j.len())], true);
    catalog.sample_x_vioc = Some(vioc);
    Ok(catalog)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimCheck {
    pub class: SolutionClass,
    pub quantity: Quantity,
    pub claimed: ClaimedValue,
    pub evaluated: f64,
    /// `|claimed - evaluated|` for exact claims.
    pub abs_diff: Option<f64>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleFindings {
    pub optimum: f64,
    pub optimum_witness: String,
    pub second_best: Option<f64>,
    /// Claimed second-largest feasible objective, i.e. the x_loc objective claim.
    pub claimed_second_best: f64,
    pub second_best_matches: bool,
    pub x_max_is_unique_optimum: bool,
    pub sample_x_loc_is_local_optimum: bool,
    pub min_infeasible_violation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub instance: String,
    pub capacity: f64,
    pub sample_weights: Vec<(SolutionClass, f64)>,
    pub checks: Vec<ClaimCheck>,
    pub oracle: Option<OracleFindings>,
}

impl DiscrepancyReport {
    pub fn check(&self, class: SolutionClass, quantity: Quantity) -> Option<&ClaimCheck> {
        self.checks
            .iter()
            .find(|c| c.class == class && c.quantity == quantity)
    }

    /// Human-readable list of every claim that `evaluate` or the oracle contradicts.
    pub fn discrepancies(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.matches)
            .map(|c| {
                format!(
                    "{} {:?}: claimed {}, evaluated {}",
                    c.class,
                    c.quantity,
                    describe(&c.claimed),
                    c.evaluated
                )
            })
            .collect();
        if let Some(o) = &self.oracle {
            if !o.second_best_matches {
                out.push(format!(
                    "second-largest feasible objective is {} (oracle), not the claimed {}",
                    o.second_best.map_or("none".to_string(), |v| v.to_string()),
                    o.claimed_second_best
                ));
            }
            if !o.x_max_is_unique_optimum {
                out.push(format!(
                    "x_max is not the unique optimum (oracle witness {})",
                    o.optimum_witness
                ));
            }
            if !o.sample_x_loc_is_local_optimum {
                out.push("sample x_loc is not a local optimum".to_string());
            }
        }
        out
    }
}

fn describe(v: &ClaimedValue) -> String {
    match *v {
        ClaimedValue::Exact(x) => x.to_string(),
        ClaimedValue::Interval {
            lower,
            lower_inclusive,
            upper,
            upper_inclusive,
        } => format!(
            "{}{lower}, {upper}{}",
            if lower_inclusive { '[' } else { '(' },
            if upper_inclusive { ']' } else { ')' }
        ),
    }
}

/// Compares every claimed value with `evaluate` on the catalog's samples.
///
/// With `with_oracle`, also enumerates the instance (n ≤ 24) to test the
/// second-best, uniqueness and local-optimality claims.
pub fn verify_catalog(
    instance: &KnapsackInstance,
    catalog: &SolutionCatalog,
    with_oracle: bool,
) -> Result<DiscrepancyReport> {
    if instance.n() != catalog.n() {
        return Err(Error::contract(format!(
            "catalog is for n = {}, instance has {} items",
            catalog.n(),
            instance.n()
        )));
    }
    let mut checks = Vec::with_capacity(catalog.claimed_values.len());
    for claim in &catalog.claimed_values {
        let Some(sample) = catalog.sample(claim.class) else {
            continue;
        };
        let e = evaluate(instance, sample)?;
        let evaluated = match claim.quantity {
            Quantity::Objective => e.objective,
            Quantity::Violation => e.violation,
            Quantity::Weight => instance.weight_of(sample),
        };
        let abs_diff = match claim.value {
            ClaimedValue::Exact(c) => Some((c - evaluated).abs()),
            ClaimedValue::Interval { .. } => None,
        };
        checks.push(ClaimCheck {
            class: claim.class,
            quantity: claim.quantity,
            claimed: claim.value,
            evaluated,
            abs_diff,
            matches: claim.value.holds_for(evaluated),
        });
    }

    let sample_weights = SolutionClass::ALL
        .iter()
        .filter_map(|&c| catalog.sample(c).map(|s| (c, instance.weight_of(s))))
        .collect();

    let oracle = if with_oracle {
        let best = oracle::brute_force_opt(instance)?;
        let top = oracle::top_k_feasible_values(instance, 2)?;
        let claimed_second_best = match catalog.claim(SolutionClass::XLoc, Quantity::Objective) {
            Some(ClaimedValue::Exact(v)) => v,
            _ => f64::NAN,
        };
        let second_best = top.get(1).copied();
        let x_max_value = evaluate(instance, &catalog.x_max)?.objective;
        let optimum_count = oracle::count_feasible_with_objective(instance, best.optimum)?;
        Some(OracleFindings {
            optimum: best.optimum,
            optimum_witness: best.witness.to_string(),
            second_best,
            claimed_second_best,
            second_best_matches: second_best
                .is_some_and(|s| relative_error(claimed_second_best, s) <= CLAIM_REL_TOL),
            x_max_is_unique_optimum: best.witness == catalog.x_max
                && x_max_value == best.optimum
                && optimum_count == 1,
            sample_x_loc_is_local_optimum: oracle::is_local_optimum(
                instance,
                &catalog.sample_x_loc,
            )
            .unwrap_or(false),
            min_infeasible_violation: oracle::min_infeasible_violation(instance)?,
        })
    } else {
        None
    };

    Ok(DiscrepancyReport {
        instance: instance.name.clone(),
        capacity: instance.capacity(),
        sample_weights,
        checks,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{make_instance1, make_instance2};
    use crate::problem::evaluate;

    fn inst1() -> (KnapsackInstance, SolutionCatalog) {
        let p = Instance1Params::new(0.5, 20);
        let mut rng = RandomStream::new(5, 0);
        (
            make_instance1(p).unwrap(),
            catalog_instance1(p, &mut rng).unwrap(),
        )
    }

    fn inst2() -> (KnapsackInstance, SolutionCatalog) {
        let p = Instance2Params::new(16);
        let mut rng = RandomStream::new(5, 0);
        (
            make_instance2(p).unwrap(),
            catalog_instance2(p, &mut rng).unwrap(),
        )
    }

    #[test]
    fn instance1_samples_evaluate_as_described() {
        let (inst, cat) = inst1();
        let loc = evaluate(&inst, &cat.sample_x_loc).unwrap();
        assert_eq!(loc.objective, 5.0);
        assert!(loc.feasible);
        assert_eq!(inst.weight_of(&cat.sample_x_loc), 20.0);

        let vioa = evaluate(&inst, &cat.sample_x_vioa).unwrap();
        assert!((vioa.objective - 5.12537).abs() < 1e-5);
        assert!((vioa.violation - 0.015718).abs() < 1e-6);
        assert!(oracle::is_local_optimum(&inst, &cat.sample_x_loc).unwrap());
    }

    #[test]
    fn samples_match_their_class_structurally() {
        for seed in 0..50 {
            let mut rng = RandomStream::new(seed, 0);
            let p1 = Instance1Params::new(0.5, 20);
            let i1 = make_instance1(p1).unwrap();
            let c1 = catalog_instance1(p1, &mut rng).unwrap();
            let p2 = Instance2Params::new(16);
            let i2 = make_instance2(p2).unwrap();
            let c2 = catalog_instance2(p2, &mut rng).unwrap();
            for (inst, cat) in [(&i1, &c1), (&i2, &c2)] {
                for class in SolutionClass::ALL {
                    if let Some(s) = cat.sample(class) {
                        let feasible = evaluate(inst, s).unwrap().feasible;
                        assert_eq!(
                            cat.classify(s, feasible),
                            class,
                            "{} seed {seed}",
                            inst.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn classify_by_structure() {
        let (_, cat) = inst1();
        assert_eq!(
            cat.classify(&Solution::from_indices(20, [0]), true),
            SolutionClass::XMax
        );
        assert_eq!(
            cat.classify(&Solution::from_indices(20, [0, 15]), false),
            SolutionClass::XViob
        );
        assert_eq!(
            cat.classify(&Solution::zeros(20), true),
            SolutionClass::OtherFeasible
        );
        assert_eq!(
            cat.classify(&Solution::from_indices(20, [0, 1]), false),
            SolutionClass::OtherInfeasible
        );
    }

    #[test]
    fn instance2_x_loc_is_not_tight() {
        let (inst, cat) = inst2();
        let e = evaluate(&inst, &cat.sample_x_loc).unwrap();
        assert!((e.objective - (18.0 + 6.0 * 16f64.powi(-3))).abs() < 1e-12);
        assert!((e.objective - 18.00146).abs() < 1e-5);
        assert!(e.feasible);
        let w = inst.weight_of(&cat.sample_x_loc);
        assert!((w - 17.5).abs() < 1e-3, "{w}");

        let vioc = evaluate(&inst, cat.sample_x_vioc.as_ref().unwrap()).unwrap();
        assert!(vioc.objective > 32.0 && vioc.objective <= 32.0 + 16f64.powi(-2) / 4.0);
        assert!(vioc.violation > 0.0 && vioc.violation < 16f64.powi(-3) / 4.0);
    }

    #[test]
    fn audit_instance1() {
        let (inst, cat) = inst1();
        let report = verify_catalog(&inst, &cat, true).unwrap();
        let xmax = report
            .check(SolutionClass::XMax, Quantity::Objective)
            .unwrap();
        assert!(xmax.matches);
        assert_eq!(xmax.abs_diff, Some(0.0));
        assert!(
            report
                .check(SolutionClass::XVioa, Quantity::Violation)
                .unwrap()
                .matches
        );
        let o = report.oracle.as_ref().unwrap();
        assert_eq!(o.optimum, 20.0);
        assert!((o.second_best.unwrap() - 5.1283).abs() < 1e-4);
        assert!(!o.second_best_matches);
        assert!(o.x_max_is_unique_optimum);
        assert!(o.sample_x_loc_is_local_optimum);
        let (_, a2) = alpha_powers(0.5, 20);
        assert!((o.min_infeasible_violation.unwrap() - a2).abs() / a2 < 1e-12);
        let d = report.discrepancies();
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].contains("second-largest"));
    }

    #[test]
    fn audit_instance2() {
        let (inst, cat) = inst2();
        let report = verify_catalog(&inst, &cat, true).unwrap();
        assert!(
            report
                .check(SolutionClass::XMax, Quantity::Objective)
                .unwrap()
                .matches
        );
        let w = report.check(SolutionClass::XLoc, Quantity::Weight).unwrap();
        assert!(!w.matches);
        assert!((w.evaluated - 17.5).abs() < 1e-3);
        assert!(
            !report
                .check(SolutionClass::XVioa, Quantity::Violation)
                .unwrap()
                .matches
        );
        assert!(
            report
                .check(SolutionClass::XViob, Quantity::Violation)
                .unwrap()
                .matches
        );
        assert!(
            report
                .check(SolutionClass::XVioc, Quantity::Objective)
                .unwrap()
                .matches
        );
        assert!(
            report
                .check(SolutionClass::XVioc, Quantity::Violation)
                .unwrap()
                .matches
        );
        let o = report.oracle.as_ref().unwrap();
        assert_eq!(o.optimum, 32.0);
        assert!((o.second_best.unwrap() - 18.00293).abs() < 1e-5);
        assert!(!o.sample_x_loc_is_local_optimum);
        assert!(!report.discrepancies().is_empty());
    }
}
