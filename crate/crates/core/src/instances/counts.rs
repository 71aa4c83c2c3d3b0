use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::Instance1Params;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance1Counts {
    /// `C(n/2, αn/2)`
    pub x_loc: BigUint,
    /// `C(n/2, αn/2) · |J|` with `|J| = n/2 − 1`
    pub x_vioa: BigUint,
    pub j_size: usize,
    /// `(1/α)^{αn/2}`
    pub lower_bound: f64,
    pub lower_bound_holds: bool,
    /// The multiplier `(n−1)/2` as printed alongside the x_vioa count.
    pub printed_multiplier: f64,
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Natural log of a big integer, accurate to double precision.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn count_instance1_classes(params: Instance1Params) -> Result<Instance1Counts> {
    params.validate()?;
    let half = params.n / 2;
    let k = params.loc_size();
    let x_loc = binomial(half, k);
    let j_size = half - 1;
    let x_vioa = &x_loc * j_size;
    let log_bound = k as f64 * (1.0 / params.alpha).ln();
    Ok(Instance1Counts {
        lower_bound: log_bound.exp(),
        lower_bound_holds: ln_big(&x_loc) >= log_bound - 1e-12 * log_bound.abs(),
        x_loc,
        x_vioa,
        j_size,
        printed_multiplier: (params.n as f64 - 1.0) / 2.0,
    })
}
