//! Adversarial instance families, their solution catalogs, random corpora
//! and the JSON instance format.
//!
//! Item indices are 0-based in code. In the family tables, item `i`
//! (1-based) is stored at index `i - 1`.

mod catalog;
mod counts;
mod io;
mod random;

pub use catalog::{
    catalog_instance1, catalog_instance2, verify_catalog, ClaimCheck, ClaimedValue,
    DiscrepancyReport, OracleFindings, Quantity, SolutionCatalog, SolutionClass,
};
pub use counts::{count_instance1_classes, Instance1Counts};
pub use io::{instance_from_json, instance_to_json, read_instance, write_instance};
pub use random::{make_greedy_tight_instance, make_random_instance, make_random_integer_instance};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{FamilyParams, Item, KnapsackInstance};

const INTEGRALITY_TOL: f64 = 1e-9;

/// `alpha^(ln n)` and `alpha^(2 ln n)`, each evaluated once as `exp(k · ln α · ln n)`.
pub fn alpha_powers(alpha: f64, n: usize) -> (f64, f64) {
    let base = alpha.ln() * (n as f64).ln();
    (base.exp(), (2.0 * base).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance1Params {
    pub alpha: f64,
    pub n: usize,
}

impl Instance1Params {
    pub fn new(alpha: f64, n: usize) -> Self {
        Self { alpha, n }
    }

    /// Checks every precondition and lists all that fail.
    pub fn validate(&self) -> Result<()> {
        let Self { alpha, n } = *self;
        let mut failed = Vec::new();
        if !(alpha > 0.0 && alpha < 1.0) {
            failed.push(format!("alpha must lie in (0,1), got {alpha}"));
        }
        if n < 2 || n % 2 != 0 {
            failed.push(format!("n/2 must be a positive integer, got n = {n}"));
        }
        let half_alpha_n = alpha * n as f64 / 2.0;
        if (half_alpha_n - half_alpha_n.round()).abs() > INTEGRALITY_TOL
            || half_alpha_n.round() < 1.0
        {
            failed.push(format!(
                "alpha*n/2 must be a positive integer, got {half_alpha_n}"
            ));
        }
        if alpha > 0.0 && alpha < 1.0 {
            if n as f64 <= 2.0 / alpha {
                failed.push(format!(
                    "n > 2/alpha required, got n = {n}, 2/alpha = {}",
                    2.0 / alpha
                ));
            }
            let (_, a2) = alpha_powers(alpha, n.max(1));
            let rhs = n as f64 * a2 / 2.0;
            if 2.0 / alpha <= rhs {
                failed.push(format!(
                    "2/alpha > n*alpha^(2 ln n)/2 required, got {} <= {rhs}",
                    2.0 / alpha
                ));
            }
        }
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failed))
        }
    }

    /// Number of I-items in a local optimum, `alpha*n/2`.
    pub fn loc_size(&self) -> usize {
        (self.alpha * self.n as f64 / 2.0).round() as usize
    }

    pub fn index_sets(&self) -> IndexSets {
        let n = self.n;
        IndexSets {
            h: vec![0],
            i: (1..=n / 2).collect(),
            j: (n / 2 + 1..n).collect(),
            k: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance2Params {
    pub n: usize,
}

impl Instance2Params {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn validate(&self) -> Result<()> {
        let mut failed = Vec::new();
        if !self.n.is_multiple_of(4) {
            failed.push(format!("n/4 must be an integer, got n = {}", self.n));
        }
        if self.n < 12 {
            failed.push(format!(
                "n >= 12 required so that I = {{3..n/4}} is nonempty, got n = {}",
                self.n
            ));
        }
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failed))
        }
    }

    pub fn index_sets(&self) -> IndexSets {
        let n = self.n;
        IndexSets {
            h: vec![0, 1],
            i: (2..n / 4).collect(),
            j: (n / 4..n / 2).collect(),
            k: (n / 2..n).collect(),
        }
    }

    /// Weight of a K item, `1 / (4 (1 + n^-4))`.
    pub fn k_weight(&self) -> f64 {
        let n = self.n as f64;
        1.0 / (4.0 * (1.0 + n.powi(-4)))
    }
}

/// 0-based index partition of a family instance. `k` is empty for Instance 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSets {
    pub h: Vec<usize>,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
}

/// Instance 1: one heavy item worth `n`, `n/2` medium items, and `n/2 - 1`
/// tiny items of value `α^{ln n}` and weight `α^{2 ln n}`; capacity `n`.
pub fn make_instance1(params: Instance1Params) -> Result<KnapsackInstance> {
    params.validate()?;
    let n = params.n;
    let nf = n as f64;
    let (j_value, j_weight) = alpha_powers(params.alpha, n);
    let i_weight = 2.0 / params.alpha;
    let sets = params.index_sets();

    let mut items = Vec::with_capacity(n);
    items.push(Item::new(nf, nf));
    items.extend(sets.i.iter().map(|_| Item::new(1.0, i_weight)));
    items.extend(sets.j.iter().map(|_| Item::new(j_value, j_weight)));
    debug_assert_eq!(items.len(), n);

    Ok(KnapsackInstance::new(
        format!("instance1(alpha={},n={n})", params.alpha),
        items,
        nf,
    )?
    .with_family(FamilyParams::Instance1 {
        alpha: params.alpha,
        n,
    }))
}

/// Instance 2: H = {1,2}, I = {3..n/4}, J = {n/4+1..n/2}, K = {n/2+1..n}; capacity `2n`.
pub fn make_instance2(params: Instance2Params) -> Result<KnapsackInstance> {
    params.validate()?;
    let n = params.n;
    let nf = n as f64;
    let tiny_value = nf.powi(-3);
    let j_weight = nf.powi(-4);
    let k_weight = params.k_weight();
    let sets = params.index_sets();

    let mut items = Vec::with_capacity(n);
    items.extend(sets.h.iter().map(|_| Item::new(nf, nf)));
    items.extend(sets.i.iter().map(|_| Item::new(nf + 2.0, nf + 1.0)));
    items.extend(sets.j.iter().map(|_| Item::new(tiny_value, j_weight)));
    items.extend(sets.k.iter().map(|_| Item::new(tiny_value, k_weight)));
    debug_assert_eq!(items.len(), n);

    Ok(
        KnapsackInstance::new(format!("instance2(n={n})"), items, 2.0 * nf)?
            .with_family(FamilyParams::Instance2 { n }),
    )
}

/// Rebuilds the family parameters recorded on an instance, if it came from one of the two families.
pub fn family_of(instance: &KnapsackInstance) -> Option<Family> {
    match instance.family_params.as_ref()? {
        FamilyParams::Instance1 { alpha, n } => {
            Some(Family::Instance1(Instance1Params::new(*alpha, *n)))
        }
        FamilyParams::Instance2 { n } => Some(Family::Instance2(Instance2Params::new(*n))),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Instance1(Instance1Params),
    Instance2(Instance2Params),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{evaluate, Solution};

    #[test]
    fn instance1_table_values() {
        let inst = make_instance1(Instance1Params::new(0.5, 20)).unwrap();
        assert_eq!(inst.n(), 20);
        assert_eq!(inst.capacity(), 20.0);
        assert_eq!(inst.items()[0], Item::new(20.0, 20.0));
        for i in 1..=10 {
            assert_eq!(inst.items()[i], Item::new(1.0, 4.0));
        }
        for i in 11..20 {
            let it = inst.items()[i];
            assert!((it.value - 0.125_370).abs() < 1e-6, "{}", it.value);
            assert!((it.weight - 0.015_718).abs() < 1e-6, "{}", it.weight);
        }
        // precondition arithmetic: 2/alpha = 4 > n*alpha^(2 ln n)/2 ≈ 0.157
        let (_, a2) = alpha_powers(0.5, 20);
        assert!((20.0 * a2 / 2.0 - 0.157).abs() < 1e-3);
    }

    #[test]
    fn instance1_rejects_bad_params() {
        let err = make_instance1(Instance1Params::new(0.5, 10)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha*n/2"), "{msg}");
        assert!(!msg.contains("n > 2/alpha"), "{msg}");

        let err = make_instance1(Instance1Params::new(0.5, 4)).unwrap_err();
        assert!(err.to_string().contains("n > 2/alpha"));

        assert!(make_instance1(Instance1Params::new(1.5, 20)).is_err());
        assert!(make_instance1(Instance1Params::new(0.5, 21)).is_err());
    }

    #[test]
    fn instance1_local_optima_are_tight() {
        for (alpha, n) in [
            (0.5, 20),
            (0.5, 24),
            (0.25, 24),
            (0.4, 20),
            (0.2, 20),
            (0.5, 12),
        ] {
            let p = Instance1Params::new(alpha, n);
            let inst = make_instance1(p).unwrap();
            let sets = p.index_sets();
            let loc = Solution::from_indices(n, sets.i[..p.loc_size()].iter().copied());
            assert_eq!(inst.weight_of(&loc), n as f64, "alpha={alpha} n={n}");
            for &j in &sets.j {
                let mut y = loc.clone();
                y.set(j, true);
                assert!(!evaluate(&inst, &y).unwrap().feasible);
            }
        }
    }

    #[test]
    fn instance2_table_values() {
        let inst = make_instance2(Instance2Params::new(16)).unwrap();
        assert_eq!(inst.capacity(), 32.0);
        let it = inst.items();
        assert_eq!(it[0], Item::new(16.0, 16.0));
        assert_eq!(it[1], Item::new(16.0, 16.0));
        assert_eq!(it[2], Item::new(18.0, 17.0));
        assert_eq!(it[3], Item::new(18.0, 17.0));
        for x in &it[4..8] {
            assert_eq!(*x, Item::new(16f64.powi(-3), 16f64.powi(-4)));
        }
        for x in &it[8..16] {
            assert_eq!(x.value, 16f64.powi(-3));
            assert!((x.weight - 0.249_996_2).abs() < 1e-7);
        }
        let x_max = Solution::from_indices(16, [0, 1]);
        let e = evaluate(&inst, &x_max).unwrap();
        assert_eq!(inst.weight_of(&x_max), 32.0);
        assert!(e.feasible);
        assert_eq!(e.objective, 32.0);
    }

    #[test]
    fn instance2_rejects_bad_params() {
        assert!(make_instance2(Instance2Params::new(10)).is_err());
        assert!(make_instance2(Instance2Params::new(8)).is_err());
        assert!(make_instance2(Instance2Params::new(12)).is_ok());
    }

    #[test]
    fn generated_items_are_positive() {
        for n in [12, 16, 20, 24, 40] {
            let inst = make_instance2(Instance2Params::new(n)).unwrap();
            assert!(inst.items().iter().all(|i| i.value > 0.0 && i.weight > 0.0));
        }
    }
}
