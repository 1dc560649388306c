//! Arm populations and bandit instances.

use crate::error::Error;
use crate::rng::SplitMix64;

/// A reward population: uniform on `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformArm {
    a: f64,
    b: f64,
}

impl UniformArm {
    pub fn new(a: f64, b: f64) -> Result<Self, Error> {
        if !a.is_finite() || !b.is_finite() || !(a < b) {
            return Err(Error::InvalidSupport { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    /// (a + b) / 2.
    pub fn mean(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// b - a.
    pub fn span(&self) -> f64 {
        self.b - self.a
    }

    /// Draw one reward: an affine map of a 53-bit uniform on [0, 1).
    #[inline]
    pub fn sample(&self, stream: &mut SplitMix64) -> f64 {
        self.a + stream.next_f64() * (self.b - self.a)
    }
}

/// An ordered collection of at least two arms.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<UniformArm>,
}

impl BanditInstance {
    pub fn new(arms: Vec<UniformArm>) -> Result<Self, Error> {
        if arms.len() < 2 {
            return Err(Error::TooFewArms(arms.len()));
        }
        Ok(Self { arms })
    }

    pub fn arms(&self) -> &[UniformArm] {
        &self.arms
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest arm mean.
    pub fn mu_star(&self) -> f64 {
        self.arms
            .iter()
            .map(|a| a.mean())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Per-pull cost of arm `i`: `mu_star - mean_i`.
    pub fn gap(&self, i: usize) -> f64 {
        self.mu_star() - self.arms[i].mean()
    }

    /// True when arm `i` attains the largest mean exactly.
    pub fn is_optimal(&self, i: usize) -> bool {
        self.arms[i].mean() == self.mu_star()
    }

    /// Smallest span among the arms with the largest mean.
    pub fn optimal_min_span(&self) -> f64 {
        let mu_star = self.mu_star();
        self.arms
            .iter()
            .filter(|a| a.mean() == mu_star)
            .map(|a| a.span())
            .fold(f64::INFINITY, f64::min)
    }

    /// Arms with a strictly positive gap, in index order.
    pub fn suboptimal_arms(&self) -> impl Iterator<Item = (usize, &UniformArm)> {
        let mu_star = self.mu_star();
        self.arms
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.mean() < mu_star)
    }
}
