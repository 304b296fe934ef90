use serde::Serialize;

use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::space::{ramp, SpaceRef};

#[derive(Clone, Debug, Serialize)]
pub struct MeasureRecovery {
    /// Smallest trial value; an upper bound for `m(C)`.
    pub best: f64,
    pub margins: Vec<f64>,
    pub values: Vec<f64>,
}

/// Upper estimate of `m(C)` from `[(1 ⊗ f) ⋆ 1](x, y) = ∫ f dm` over trial
/// functions `f = 1` on `C`, falling linearly to 0 at distance `margin`.
///
/// Margins start at `diameter/4` and halve `trial_count − 1` times.
pub fn recover_measure<T: Real>(space: &SpaceRef<T>, subset: &[usize], trial_count: usize) -> Result<MeasureRecovery> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("C must be nonempty".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= space.len()) {
        return Err(Error::InvalidArgument(format!("node {bad} out of range")));
    }
    if trial_count == 0 {
        return Err(Error::InvalidArgument("trial_count must be at least 1".into()));
    }
    let n = space.len();
    let to_c: Vec<T> = (0..n)
        .map(|z| subset.iter().map(|&c| space.dist(z, c)).fold(T::infinity(), T::min))
        .collect();
    let ones = Kernel::ones(space);
    let mut margins = Vec::with_capacity(trial_count);
    let mut values = Vec::with_capacity(trial_count);
    let mut margin = space.diameter() / T::lit(4.0);
    for _ in 0..trial_count {
        let f: Vec<T> = to_c.iter().map(|&d| ramp(d, T::zero(), margin)).collect();
        let lifted = Kernel::from_fn(space, |_, z| re(f[z]));
        let value = lifted.convolve(&ones)?.get(0, 0).re;
        margins.push(margin.as_f64());
        values.push(value.as_f64());
        margin = margin * T::lit(0.5);
    }
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MeasureRecovery { best, margins, values })
}
