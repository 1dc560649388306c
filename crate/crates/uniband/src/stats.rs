//! Online per-arm sufficient statistics.

/// Running count, extremes, mean, and sum of squared deviations for one arm.
///
/// The mean and `m2` use the one-pass update, which stays stable over long
/// horizons; the extremes are exact order statistics of everything seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmStats {
    t: u64,
    v_min: f64,
    w_max: f64,
    mean: f64,
    m2: f64,
}

impl ArmStats {
    pub fn new() -> Self {
        Self {
            t: 0,
            v_min: f64::INFINITY,
            w_max: f64::NEG_INFINITY,
            mean: 0.0,
            m2: 0.0,
        }
    }

    /// Record one observation.
    #[inline]
    pub fn update(&mut self, x: f64) {
        debug_assert!(x.is_finite());
        self.t += 1;
        if x < self.v_min {
            self.v_min = x;
        }
        if x > self.w_max {
            self.w_max = x;
        }
        let d = x - self.mean;
        self.mean += d / self.t as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.t
    }

    /// Smallest observation so far.
    pub fn min(&self) -> f64 {
        self.v_min
    }

    /// Largest observation so far.
    pub fn max(&self) -> f64 {
        self.w_max
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sum of squared deviations from the running mean.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// sqrt(m2 / t): the population convention used by the comparator rules.
    pub fn sd(&self) -> f64 {
        if self.t == 0 {
            0.0
        } else {
            (self.m2 / self.t as f64).max(0.0).sqrt()
        }
    }
}

impl Default for ArmStats {
    fn default() -> Self {
        Self::new()
    }
}
