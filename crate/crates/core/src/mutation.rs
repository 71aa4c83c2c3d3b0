use crate::problem::Solution;
use crate::rng::RandomStream;

/// Flips each bit independently with probability `rate`.
///
/// Exactly one uniform draw is consumed per bit, in ascending index order,
/// whether or not the bit flips. This keeps trajectories replayable.
pub fn bitwise_mutate(parent: &Solution, rate: f64, rng: &mut RandomStream) -> Solution {
    let mut child = parent.clone();
    mutate_in_place(&mut child, rate, rng);
    child
}

pub(crate) fn mutate_in_place(bits: &mut Solution, rate: f64, rng: &mut RandomStream) {
    for i in 0..bits.len() {
        if rng.bernoulli(rate) {
            bits.flip(i);
        }
    }
}

/// The standard rate `1/n`.
pub fn default_rate(n: usize) -> f64 {
    1.0 / n as f64
}
