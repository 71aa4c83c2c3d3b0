//! Knapsack instances, bitstring solutions and the bi-objective evaluation
//! (maximise total value, minimise weight excess over capacity).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub value: f64,
    pub weight: f64,
}

impl Item {
    pub fn new(value: f64, weight: f64) -> Self {
        Self { value, weight }
    }
}

/// Parameters of the generator that produced an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    Instance1 {
        alpha: f64,
        n: usize,
    },
    Instance2 {
        n: usize,
    },
    Random {
        n: usize,
        value_range: [f64; 2],
        weight_range: [f64; 2],
        capacity_fraction: f64,
        seed: u64,
        stream: u64,
    },
    RandomInteger {
        n: usize,
        value_range: [u64; 2],
        weight_range: [u64; 2],
        capacity_fraction: f64,
        seed: u64,
        stream: u64,
    },
    GreedyTight {
        epsilon: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackInstance {
    pub name: String,
    items: Vec<Item>,
    capacity: f64,
    pub family_params: Option<FamilyParams>,
}

impl KnapsackInstance {
    /// Builds an instance, rejecting empty item lists, non-positive or
    /// non-finite values/weights and a non-positive capacity.
    pub fn new(name: impl Into<String>, items: Vec<Item>, capacity: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if items.is_empty() {
            problems.push("n must be at least 1".to_string());
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            problems.push(format!(
                "capacity must be positive and finite, got {capacity}"
            ));
        }
        for (i, item) in items.iter().enumerate() {
            if !(item.value.is_finite() && item.value > 0.0) {
                problems.push(format!(
                    "items[{i}].value must be positive and finite, got {}",
                    item.value
                ));
            }
            if !(item.weight.is_finite() && item.weight > 0.0) {
                problems.push(format!(
                    "items[{i}].weight must be positive and finite, got {}",
                    item.weight
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self {
            name: name.into(),
            items,
            capacity,
            family_params: None,
        })
    }

    pub fn with_family(mut self, params: FamilyParams) -> Self {
        self.family_params = Some(params);
        self
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Total weight of the selected items, summed in ascending index order.
    pub fn weight_of(&self, solution: &Solution) -> f64 {
        self.items
            .iter()
            .zip(solution.bits())
            .filter(|(_, &b)| b)
            .map(|(it, _)| it.weight)
            .fold(0.0, |acc, w| acc + w)
    }

    pub fn value_of(&self, solution: &Solution) -> f64 {
        self.items
            .iter()
            .zip(solution.bits())
            .filter(|(_, &b)| b)
            .map(|(it, _)| it.value)
            .fold(0.0, |acc, v| acc + v)
    }

    /// True when every weight and the capacity are whole numbers.
    pub fn has_integer_weights(&self) -> bool {
        self.capacity.fract() == 0.0 && self.items.iter().all(|it| it.weight.fract() == 0.0)
    }

    pub(crate) fn check_len(&self, solution: &Solution) -> Result<()> {
        if solution.len() != self.n() {
            return Err(Error::contract(format!(
                "solution has {} bits but the instance has {} items",
                solution.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// A selection of items; bit `i` set means item `i` (0-based) is packed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    bits: Vec<bool>,
}

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Solution with exactly the given (0-based) indices selected.
    pub fn from_indices(n: usize, selected: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::zeros(n);
        for i in selected {
            s.bits[i] = true;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.bits[i] = on;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of selected items among `indices`.
    pub fn count_in(&self, indices: &[usize]) -> usize {
        indices.iter().filter(|&&i| self.bits[i]).count()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn unselected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| i)
    }

    pub fn hamming(&self, other: &Solution) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Renders as a '0'/'1' string, leftmost character = item 1.
impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Solution {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::contract(format!(
                    "solution strings may only contain '0' and '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Solution::from_bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub violation: f64,
    pub feasible: bool,
}

impl Evaluation {
    pub fn new(objective: f64, violation: f64) -> Self {
        Self {
            objective,
            violation,
            feasible: violation == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatedSolution {
    pub solution: Solution,
    pub evaluation: Evaluation,
}

impl EvaluatedSolution {
    pub fn new(instance: &KnapsackInstance, solution: Solution) -> Result<Self> {
        let evaluation = evaluate(instance, &solution)?;
        Ok(Self {
            solution,
            evaluation,
        })
    }

    pub fn objective(&self) -> f64 {
        self.evaluation.objective
    }

    pub fn violation(&self) -> f64 {
        self.evaluation.violation
    }

    pub fn is_feasible(&self) -> bool {
        self.evaluation.feasible
    }
}

/// Objective `Σ v_i x_i` and violation `max(0, Σ w_i x_i − W)`.
///
/// Feasibility is the exact comparison `Σ w_i x_i ≤ W`. For finite doubles
/// `a > b` implies `a − b > 0`, so `feasible` holds exactly when the
/// violation is zero.
pub fn evaluate(instance: &KnapsackInstance, solution: &Solution) -> Result<Evaluation> {
    instance.check_len(solution)?;
    let mut objective = 0.0;
    let mut weight = 0.0;
    for (item, &bit) in instance.items.iter().zip(solution.bits()) {
        if bit {
            objective += item.value;
            weight += item.weight;
        }
    }
    let feasible = weight <= instance.capacity;
    let violation = if feasible {
        0.0
    } else {
        weight - instance.capacity
    };
    Ok(Evaluation {
        objective,
        violation,
        feasible,
    })
}

/// `objective / optimum`; the optimum must be strictly positive.
pub fn approximation_ratio(objective: f64, optimum: f64) -> Result<f64> {
    if !(optimum > 0.0 && optimum.is_finite()) {
        return Err(Error::contract(format!(
            "approximation ratio needs a positive optimum, got {optimum}"
        )));
    }
    Ok(objective / optimum)
}
