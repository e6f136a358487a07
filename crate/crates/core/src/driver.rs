//! Adaptive precision: reruns a computation with finer gradings or more
//! slack until its result is guaranteed on the requested region.

use crate::error::{MnError, Result};
use crate::order::{Grading, OrderKey, PrecisionBox};
use crate::series::{Budget, Series};

/// Tuning knobs for [`Driver::run`].
#[derive(Debug, Clone)]
pub struct Driver {
    pub initial_base: i64,
    pub max_base: i64,
    pub max_attempts: usize,
}

impl Default for Driver {
    fn default() -> Self {
        Driver { initial_base: 2, max_base: 24, max_attempts: 14 }
    }
}

/// What a computation must deliver: the largest weight, under a given
/// grading, of any monomial the caller will read.
pub trait Target {
    fn required(&self, grading: &Grading) -> i64;
}

impl Target for PrecisionBox {
    fn required(&self, grading: &Grading) -> i64 {
        self.max_weight(grading)
    }
}

/// Region of a coefficient extraction: residual keys in `region`, embedded
/// into the kept columns `cols` and shifted by `shift`.
#[derive(Debug, Clone)]
pub struct Embedded {
    pub region: PrecisionBox,
    pub cols: Vec<usize>,
    pub shift: OrderKey,
}

impl Target for Embedded {
    fn required(&self, grading: &Grading) -> i64 {
        self.region.max_weight(&grading.project(&self.cols)).saturating_add(grading.weight(&self.shift))
    }
}

impl<F: Fn(&Grading) -> i64> Target for F {
    fn required(&self, grading: &Grading) -> i64 {
        self(grading)
    }
}

impl Driver {
    /// Runs `compute` until its result has precision at least
    /// `target.required(grading)` under the grading it was computed with.
    pub fn run<T, F>(&self, width: usize, target: &T, compute: F) -> Result<Series>
    where
        T: Target + ?Sized,
        F: Fn(&Budget) -> Result<Series>,
    {
        let mut base = self.initial_base;
        let mut slack: i64 = 0;
        for _ in 0..self.max_attempts {
            let grading = Grading::geometric(base, width);
            let need = target.required(&grading);
            let budget = Budget::new(grading, need.saturating_add(slack));
            match compute(&budget) {
                Ok(s) => match s.precision() {
                    // precision loss shrinks as the bound grows, so the shortfall overestimates
                    Some(d) if d < need => slack = slack.saturating_add((need - d).saturating_add(4).min(slack.max(8))),
                    _ => return Ok(s),
                },
                Err(MnError::WeightNotPositive) if base < self.max_base => base += 1,
                Err(MnError::IndeterminateInitialTerm | MnError::OutOfPrecision) => {
                    slack = slack.saturating_mul(2).saturating_add(need.abs().max(8) / 2)
                }
                Err(e) => return Err(e),
            }
        }
        Err(MnError::OutOfPrecision)
    }
}
