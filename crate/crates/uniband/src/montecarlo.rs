//! Replicated scenario execution whose output is a pure function of the
//! scenario, regardless of thread count or scheduling.
//!
//! Replications fan out across a rayon pool in fixed chunks, each chunk
//! lands in a vector indexed by replication, and chunks are folded into
//! running per-checkpoint sums in that order, so every float lands in the
//! accumulator in the same sequence no matter how many workers ran the map
//! side. Only checkpointed sums survive a chunk, never whole paths, which
//! keeps memory flat as replication counts grow.

use rayon::prelude::*;

use crate::arm::{BanditInstance, UniformArm};
use crate::error::Error;
use crate::policy::{run_policy, PolicySpec};
use crate::rng::{arm_streams, derive_seed, SplitMix64};

/// A replicated experiment: one instance, several policies, fixed horizon
/// and checkpoints, a replication count, and a master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub instance: BanditInstance,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub replications: u64,
    pub master_seed: u64,
}

impl Scenario {
    /// Longest initialization phase across the scenario's policies; the
    /// first checkpoint may not precede it.
    pub fn min_checkpoint(&self) -> u64 {
        self.policies
            .iter()
            .map(|p| p.init_rounds() * self.instance.len() as u64)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.policies.is_empty() {
            return Err(Error::InvalidScenario("no policies listed".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidScenario(
                "replications must be positive".into(),
            ));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::InvalidScenario("no checkpoints listed".into()));
        }
        for p in &self.policies {
            let init = p.init_rounds() * self.instance.len() as u64;
            if self.horizon < init {
                return Err(Error::HorizonTooShort {
                    horizon: self.horizon,
                    arms: self.instance.len(),
                    rounds: p.init_rounds(),
                });
            }
        }
        for w in self.checkpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidScenario(format!(
                    "checkpoints must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let first = self.checkpoints[0];
        let last = *self.checkpoints.last().unwrap();
        if first < self.min_checkpoint() {
            return Err(Error::InvalidScenario(format!(
                "first checkpoint {first} falls inside an initialization phase (needs >= {})",
                self.min_checkpoint()
            )));
        }
        if last > self.horizon {
            return Err(Error::InvalidScenario(format!(
                "checkpoint {last} exceeds horizon {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Mean pseudo-regret and its standard error at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretPoint {
    pub n: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub reps: u64,
}

/// One policy's regret curve across the scenario checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub policy: PolicySpec,
    pub points: Vec<RegretPoint>,
}

/// Run every (policy, replication) pair and aggregate per checkpoint.
///
/// Substream seeds depend only on (master seed, policy position,
/// replication, arm), and aggregation folds in replication order, so the
/// result is bit-identical for any `workers >= 1`.
pub fn run_scenario(scenario: &Scenario, workers: usize) -> Result<Vec<RegretCurve>, Error> {
    scenario.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;

    const CHUNK: u64 = 512;
    scenario
        .policies
        .iter()
        .enumerate()
        .map(|(p_idx, &spec)| {
            let mut acc = CheckpointSums::new(scenario.checkpoints.len());
            let mut start = 0;
            while start < scenario.replications {
                let end = (start + CHUNK).min(scenario.replications);
                let chunk: Result<Vec<Vec<f64>>, Error> = pool.install(|| {
                    (start..end)
                        .into_par_iter()
                        .map(|rep| {
                            let mut streams = arm_streams(
                                scenario.master_seed,
                                p_idx as u64,
                                rep,
                                scenario.instance.len(),
                            );
                            run_policy(
                                &scenario.instance,
                                spec,
                                scenario.horizon,
                                &scenario.checkpoints,
                                &mut streams,
                            )
                            .map(|r| r.pseudo_regret)
                        })
                        .collect()
                });
                for path in chunk? {
                    acc.push(&path);
                }
                start = end;
            }
            Ok(RegretCurve {
                policy: spec,
                points: acc.points(&scenario.checkpoints),
            })
        })
        .collect()
}

/// Running sum and sum of squares per checkpoint, pushed in replication
/// order.
struct CheckpointSums {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    reps: u64,
}

impl CheckpointSums {
    fn new(n_checkpoints: usize) -> Self {
        CheckpointSums {
            sum: vec![0.0; n_checkpoints],
            sumsq: vec![0.0; n_checkpoints],
            reps: 0,
        }
    }

    fn push(&mut self, path: &[f64]) {
        for (j, &x) in path.iter().enumerate() {
            self.sum[j] += x;
            self.sumsq[j] += x * x;
        }
        self.reps += 1;
    }

    fn points(&self, checkpoints: &[u64]) -> Vec<RegretPoint> {
        let r = self.reps as f64;
        checkpoints
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let mean = self.sum[j] / r;
                let stderr = if self.reps > 1 {
                    let centered = (self.sumsq[j] - self.sum[j] * self.sum[j] / r).max(0.0);
                    (centered / (r - 1.0)).sqrt() / r.sqrt()
                } else {
                    0.0
                };
                RegretPoint {
                    n,
                    mean_regret: mean,
                    stderr,
                    reps: self.reps,
                }
            })
            .collect()
    }
}

/// Empirical frequencies, per global time t, of some prefix sample count
/// j in [3, t] putting a support index below `mean - eps`, for both the
/// `1/(j-2)` and `1/j` exponents on the same draws.
#[derive(Debug, Clone, PartialEq)]
pub struct C2Probe {
    pub eps: f64,
    /// Global times probed: 3..=t_max.
    pub t_values: Vec<u64>,
    pub freq_ucb_uniform: Vec<f64>,
    pub freq_bk_ucb: Vec<f64>,
    pub replications: u64,
}

const C2_STREAM_TAG: u64 = 0xC2;

/// Estimate, for each t in 3..=t_max, how often an underestimating prefix
/// exists. Both index families are evaluated on identical sample paths, so
/// the slower exponent's frequency dominates pointwise by construction.
pub fn c2_probe(
    optimal_arm: &UniformArm,
    eps: f64,
    t_max: u64,
    replications: u64,
    master_seed: u64,
) -> Result<C2Probe, Error> {
    if !(eps > 0.0 && eps < optimal_arm.span() / 2.0) {
        return Err(Error::OutOfDomain(format!(
            "need 0 < eps < span/2, got eps = {eps} with span {}",
            optimal_arm.span()
        )));
    }
    if t_max < 3 {
        return Err(Error::OutOfDomain(format!("need t_max >= 3, got {t_max}")));
    }
    if replications == 0 {
        return Err(Error::OutOfDomain("need at least one replication".into()));
    }

    let target = optimal_arm.mean() - eps;
    let n_t = (t_max - 2) as usize;
    let mut hits_ucb = vec![0u64; n_t];
    let mut hits_bk = vec![0u64; n_t];
    let mut v = vec![0.0f64; t_max as usize + 1];
    let mut w = vec![0.0f64; t_max as usize + 1];

    for rep in 0..replications {
        let mut stream = SplitMix64::new(derive_seed(master_seed, &[C2_STREAM_TAG, rep]));
        for j in 1..=t_max as usize {
            let x = optimal_arm.sample(&mut stream);
            v[j] = if j == 1 { x } else { v[j - 1].min(x) };
            w[j] = if j == 1 { x } else { w[j - 1].max(x) };
        }
        for (slot, t) in (3..=t_max).enumerate() {
            let ln_t = (t as f64).ln();
            let mut hit_ucb = false;
            let mut hit_bk = false;
            for j in 3..=t as usize {
                let half_range = 0.5 * (w[j] - v[j]);
                if !hit_ucb && v[j] + half_range * (ln_t / (j as f64 - 2.0)).exp() < target {
                    hit_ucb = true;
                }
                if !hit_bk && v[j] + half_range * (ln_t / j as f64).exp() < target {
                    hit_bk = true;
                }
                if hit_ucb && hit_bk {
                    break;
                }
            }
            if hit_ucb {
                hits_ucb[slot] += 1;
            }
            if hit_bk {
                hits_bk[slot] += 1;
            }
        }
    }

    let to_freq = |hits: Vec<u64>| {
        hits.into_iter()
            .map(|h| h as f64 / replications as f64)
            .collect()
    };
    Ok(C2Probe {
        eps,
        t_values: (3..=t_max).collect(),
        freq_ucb_uniform: to_freq(hits_ucb),
        freq_bk_ucb: to_freq(hits_bk),
        replications,
    })
}
