use std::cell::Cell;

use rand::Rng;

use crate::error::{Error, Result};
use crate::special::log_uniform;

/// Result of one univariate slice-sampling update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceDraw {
    pub value: f64,
    pub evaluations: usize,
}

/// Shrinkage proposals allowed before the update is declared stuck.
const MAX_SHRINK: usize = 200;

/// One stepping-out and shrinkage slice update of `x0` under the
/// unnormalized log density `log_f`.
///
/// The bracket grows in steps of `width`, at most `max_steps` in total, and
/// is then shrunk towards `x0`. Both stages leave the target invariant.
/// Fails if `log_f(x0)` is not finite or shrinkage does not land inside the
/// slice within a fixed budget.
pub fn slice_sample<F, R>(x0: f64, mut log_f: F, width: f64, max_steps: usize, rng: &mut R) -> Result<SliceDraw>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let stuck = |value| Error::Diverged { iteration: 0, parameter: "slice".into(), value };
    if !(width > 0.0 && width.is_finite()) || max_steps == 0 {
        return Err(Error::InvalidConfig(format!(
            "slice width must be positive and the step budget non-zero, got {width} and {max_steps}"
        )));
    }
    let evaluations = Cell::new(0usize);
    let mut eval = |x: f64| {
        evaluations.set(evaluations.get() + 1);
        log_f(x)
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(stuck(x0));
    }
    let level = f0 + log_uniform(rng);

    let mut left = x0 - width * rng.random::<f64>();
    let mut right = left + width;
    let mut left_steps = ((max_steps as f64) * rng.random::<f64>()) as usize;
    let mut right_steps = max_steps - 1 - left_steps;
    while left_steps > 0 && eval(left) > level {
        left -= width;
        left_steps -= 1;
    }
    while right_steps > 0 && eval(right) > level {
        right += width;
        right_steps -= 1;
    }

    for _ in 0..MAX_SHRINK {
        let x1 = left + (right - left) * rng.random::<f64>();
        if eval(x1) > level {
            return Ok(SliceDraw { value: x1, evaluations: evaluations.get() });
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    Err(stuck(x0))
}
