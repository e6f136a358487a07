//! Sparse convolution kernel behind series multiplication.
//!
//! With the `parallel` feature the outer loop is split across the rayon pool
//! once the pair count is large enough; otherwise (and always in
//! [`convolve_sequential`]) it runs on the calling thread.

use std::collections::HashMap;

use num_traits::Zero;

use crate::coeff::Coefficient;
use crate::order::{ExponentVector, OrderKey};

/// A term together with its weighted degree.
#[derive(Debug, Clone)]
pub struct WeightedTerm {
    pub weight: i64,
    pub key: OrderKey,
    pub exp: ExponentVector,
    pub coeff: Coefficient,
}

pub type Accumulator = HashMap<OrderKey, (ExponentVector, Coefficient)>;

#[cfg(feature = "parallel")]
const PARALLEL_PAIRS: usize = 1 << 12;

fn accumulate(acc: &mut Accumulator, x: &WeightedTerm, rhs: &[WeightedTerm], bound: i64) {
    for y in rhs {
        if x.weight.saturating_add(y.weight) > bound {
            break;
        }
        let key = x.key.add(&y.key);
        let prod = &x.coeff * &y.coeff;
        match acc.get_mut(&key) {
            Some(slot) => slot.1 += prod,
            None => {
                acc.insert(key, (&x.exp + &y.exp, prod));
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn merge(mut a: Accumulator, b: Accumulator) -> Accumulator {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, (e, c)) in b {
        match a.get_mut(&k) {
            Some(slot) => slot.1 += c,
            None => {
                a.insert(k, (e, c));
            }
        }
    }
    a
}

fn finish(mut acc: Accumulator) -> Accumulator {
    acc.retain(|_, (_, c)| !c.is_zero());
    acc
}

/// All products `x * y` with `weight(x) + weight(y) <= bound`.
///
/// `rhs` must be sorted by ascending weight.
pub fn convolve_sequential(lhs: &[WeightedTerm], rhs: &[WeightedTerm], bound: i64) -> Accumulator {
    let mut acc = Accumulator::new();
    for x in lhs {
        accumulate(&mut acc, x, rhs, bound);
    }
    finish(acc)
}

#[cfg(feature = "parallel")]
pub fn convolve_parallel(lhs: &[WeightedTerm], rhs: &[WeightedTerm], bound: i64) -> Accumulator {
    use rayon::prelude::*;

    let chunk = (lhs.len() / (4 * rayon::current_num_threads())).max(1);
    let acc = lhs
        .par_chunks(chunk)
        .map(|xs| {
            let mut acc = Accumulator::new();
            for x in xs {
                accumulate(&mut acc, x, rhs, bound);
            }
            acc
        })
        .reduce(Accumulator::new, merge);
    finish(acc)
}

pub fn convolve(lhs: &[WeightedTerm], rhs: &[WeightedTerm], bound: i64) -> Accumulator {
    #[cfg(feature = "parallel")]
    {
        if lhs.len().saturating_mul(rhs.len()) >= PARALLEL_PAIRS && lhs.len() > 1 {
            return convolve_parallel(lhs, rhs, bound);
        }
    }
    convolve_sequential(lhs, rhs, bound)
}
