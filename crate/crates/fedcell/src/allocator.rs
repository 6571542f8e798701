//! Optimal per-round bandwidth allocation for a scheduled device set.
//!
//! Given the devices' compute latencies and full-band link capacities, the
//! minimal round latency is reached exactly when every device finishes
//! uploading at the same instant; the latency `T` then satisfies
//! `sum_i S / ((T - t_i) * c_i) = 1`. [`Allocator::solve_round_latency`]
//! locates that `T` by bisection. The module also provides the closed-form
//! expected-latency bounds for homogeneous devices and the approximate
//! time-to-accuracy objective built on the lower bound.

use crate::error::{Error, Result};

/// Maximum bisection iterations before concluding that `epsilon` is below
/// what f64 spacing can honor.
const MAX_BISECTION_ITERS: usize = 200;

/// Relative tolerance for the equal-finish invariant checks.
pub const EQUAL_FINISH_TOL: f64 = 1e-4;

/// One device's upload problem for the current round.
#[derive(Debug, Clone, PartialEq)]
pub struct UploadTask {
    pub device_id: usize,
    /// Local computation latency in seconds (expected at decision time,
    /// realized when the round actually runs).
    pub comp_latency_s: f64,
    /// `B * log2(1 + p h^2 / N0)` in bits/s: the upload rate if the device
    /// owned the whole band.
    pub link_capacity_bps: f64,
}

impl UploadTask {
    fn validate(&self) -> Result<()> {
        if !(self.comp_latency_s >= 0.0) || !self.comp_latency_s.is_finite() {
            return Err(Error::NonFinite("upload task compute latency"));
        }
        if !(self.link_capacity_bps > 0.0) || !self.link_capacity_bps.is_finite() {
            return Err(Error::NonFinite("upload task link capacity"));
        }
        Ok(())
    }
}

/// A solved round: the scheduled ids, their bandwidth fractions, and the
/// common finish time.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPlan {
    /// Ascending device ids.
    pub scheduled: Vec<usize>,
    /// Bandwidth fraction per scheduled device, aligned with `scheduled`.
    pub gamma: Vec<f64>,
    /// Minimal round latency `t*` in seconds.
    pub round_latency_s: f64,
}

/// Bandwidth solver for a fixed payload size and search tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Allocator {
    pub model_size_bits: f64,
    pub epsilon: f64,
}

impl Allocator {
    pub fn new(model_size_bits: f64, epsilon: f64) -> Result<Self> {
        if !(model_size_bits > 0.0) {
            return Err(Error::Config("model size must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config("epsilon must lie in (0, 1)".into()));
        }
        Ok(Allocator {
            model_size_bits,
            epsilon,
        })
    }

    /// Bandwidth fractions that make every device finish exactly at
    /// `target_s`: `gamma_i = S / ((target - t_i) * c_i)`. No normalization is
    /// applied; the sum only equals one at the optimal target.
    pub fn allocation_from_latency(&self, target_s: f64, tasks: &[UploadTask]) -> Result<Vec<f64>> {
        if tasks.is_empty() {
            return Err(Error::EmptyTasks);
        }
        let mut gamma = Vec::with_capacity(tasks.len());
        for task in tasks {
            task.validate()?;
            let slack = target_s - task.comp_latency_s;
            if !(slack > 0.0) {
                return Err(Error::InfeasibleTarget {
                    target_s,
                    max_comp_s: task.comp_latency_s,
                });
            }
            gamma.push(self.model_size_bits / (slack * task.link_capacity_bps));
        }
        Ok(gamma)
    }

    /// Minimal round latency for `tasks` by bisection on the bandwidth-sum
    /// fixed point, stopping once `sum(gamma)` lands in `[1 - epsilon, 1]`.
    ///
    /// The bracket is `[max_i t_i, max_i t_i + sum_i S/c_i]`; the upper end is
    /// always feasible because plugging it in gives `sum(gamma) <= 1`.
    pub fn solve_round_latency(&self, tasks: &[UploadTask]) -> Result<RoundPlan> {
        if tasks.is_empty() {
            return Err(Error::EmptyTasks);
        }
        for task in tasks {
            task.validate()?;
        }
        let t_max = tasks
            .iter()
            .map(|t| t.comp_latency_s)
            .fold(f64::NEG_INFINITY, f64::max);
        let total_serial_upload: f64 = tasks
            .iter()
            .map(|t| self.model_size_bits / t.link_capacity_bps)
            .sum();

        let mut lo = t_max;
        let mut hi = t_max + total_serial_upload;

        let gamma_sum = |target: f64| -> Result<(Vec<f64>, f64)> {
            let gamma = self.allocation_from_latency(target, tasks)?;
            let sum = gamma.iter().sum::<f64>();
            Ok((gamma, sum))
        };

        // The sum at `hi` is provably <= 1; it may already be within epsilon.
        let (gamma_hi, sum_hi) = gamma_sum(hi)?;
        debug_assert!(sum_hi <= 1.0 + 1e-12);
        if sum_hi >= 1.0 - self.epsilon {
            return Ok(self.plan(tasks, gamma_hi, hi));
        }

        for _ in 0..MAX_BISECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= t_max {
                break; // f64 exhausted against the lower edge
            }
            let (gamma, sum) = gamma_sum(mid)?;
            if sum > 1.0 {
                lo = mid;
            } else if sum < 1.0 - self.epsilon {
                hi = mid;
            } else {
                return Ok(self.plan(tasks, gamma, mid));
            }
        }
        Err(Error::NoConvergence {
            epsilon: self.epsilon,
            iterations: MAX_BISECTION_ITERS,
        })
    }

    fn plan(&self, tasks: &[UploadTask], gamma: Vec<f64>, latency: f64) -> RoundPlan {
        let mut order: Vec<usize> = (0..tasks.len()).collect();
        order.sort_by_key(|&i| tasks[i].device_id);
        let scheduled: Vec<usize> = order.iter().map(|&i| tasks[i].device_id).collect();
        let gamma: Vec<f64> = order.iter().map(|&i| gamma[i]).collect();
        // The gamma_i <= 1 constraint is never active at an equal-finish
        // solution with sum(gamma) <= 1, so it is asserted, not projected.
        debug_assert!(gamma.iter().all(|&g| g > 0.0 && g <= 1.0 + 1e-9));
        RoundPlan {
            scheduled,
            gamma,
            round_latency_s: latency,
        }
    }
}

/// Shared parameters of a homogeneous device population, used by the
/// closed-form latency bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousParams {
    /// Samples per device (`d`).
    pub local_size: f64,
    /// Seconds per sample (`a`).
    pub shift_rate_s_per_sample: f64,
    /// Samples per second (`mu`).
    pub max_rate_samples_per_s: f64,
    /// `E{ S / (B log2(1 + p h^2 / N0)) }` over the placement distribution.
    pub expected_inverse_rate_s: f64,
}

/// Which printed form of the expected-latency upper bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpperBoundForm {
    /// `a d + (k d / mu) H_k + k E{...}` — the form as published.
    #[default]
    AsPublished,
    /// `a d + (d / mu) H_k + k E{...}` — the max-order-statistic variant.
    HarmonicOnly,
}

/// `H_k = sum_{i=1..k} 1/i`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Expected-latency lower bound for `k` scheduled homogeneous devices:
/// `a d + d/(k mu) + k E{...}`.
pub fn latency_lower_bound(k: usize, params: &HomogeneousParams) -> f64 {
    let d = params.local_size;
    params.shift_rate_s_per_sample * d
        + d / (k as f64 * params.max_rate_samples_per_s)
        + k as f64 * params.expected_inverse_rate_s
}

/// Expected-latency upper bound in the published form.
pub fn latency_upper_bound(k: usize, params: &HomogeneousParams) -> f64 {
    latency_upper_bound_with(k, params, UpperBoundForm::AsPublished)
}

pub fn latency_upper_bound_with(k: usize, params: &HomogeneousParams, form: UpperBoundForm) -> f64 {
    let d = params.local_size;
    let tail = match form {
        UpperBoundForm::AsPublished => k as f64 * d / params.max_rate_samples_per_s * harmonic(k),
        UpperBoundForm::HarmonicOnly => d / params.max_rate_samples_per_s * harmonic(k),
    };
    params.shift_rate_s_per_sample * d + tail + k as f64 * params.expected_inverse_rate_s
}

/// Approximate expected time-to-accuracy when scheduling `k` homogeneous
/// devices per round: `beta (theta + 1/k) * lower_bound(k)`.
pub fn approx_objective(k: usize, beta: f64, theta: f64, params: &HomogeneousParams) -> f64 {
    beta * (theta + 1.0 / k as f64) * latency_lower_bound(k, params)
}
