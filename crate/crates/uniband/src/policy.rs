//! Index rules and the sequential allocation loop.
//!
//! All four rules share the same skeleton: initialize every arm a fixed
//! number of times, then at global time n (samples drawn so far) pull the arm
//! with the largest index, breaking ties toward the lowest arm index.
//!
//! Powers of n are evaluated as `exp(ln n / k)` so the exponent never goes
//! through an intermediate `powf` rounding path; n = 1 gives the point
//! estimate back exactly.

use std::fmt;
use std::str::FromStr;

use crate::arm::BanditInstance;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::stats::ArmStats;

/// Which index rule drives arm selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Support-based rule for uniform rewards: v_min plus a dilation of the
    /// observed range, `v + (w - v)/2 * n^{1/(t-2)}`.
    UcbUniform,
    /// Earlier support-based rule with the slower exponent `1/t`.
    BkUcb,
    /// Mean plus `sd * sqrt(n^{2/(t-2)} - 1)`, the normal-population analogue.
    ChkNormal,
    /// Mean plus `sd * sqrt(2 ln n / t)`.
    Kr,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::UcbUniform,
        PolicyKind::BkUcb,
        PolicyKind::ChkNormal,
        PolicyKind::Kr,
    ];

    /// Canonical name used in scenario files and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::UcbUniform => "ucb-uniform",
            PolicyKind::BkUcb => "bk-ucb",
            PolicyKind::ChkNormal => "chk-normal",
            PolicyKind::Kr => "kr",
        }
    }

    /// Default initialization pulls per arm.
    pub fn default_init_rounds(&self) -> u64 {
        match self {
            PolicyKind::UcbUniform | PolicyKind::ChkNormal => 3,
            PolicyKind::BkUcb | PolicyKind::Kr => 2,
        }
    }

    /// Smallest per-arm sample count for which the index is defined.
    pub fn min_samples(&self) -> u64 {
        match self {
            PolicyKind::UcbUniform | PolicyKind::ChkNormal => 3,
            PolicyKind::Kr => 2,
            PolicyKind::BkUcb => 1,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "ucb-uniform" => Ok(PolicyKind::UcbUniform),
            "bk-ucb" => Ok(PolicyKind::BkUcb),
            "chk-normal" => Ok(PolicyKind::ChkNormal),
            "kr" => Ok(PolicyKind::Kr),
            other => Err(Error::OutOfDomain(format!(
                "unknown policy {other:?} (expected ucb-uniform, bk-ucb, chk-normal, or kr)"
            ))),
        }
    }
}

/// An index rule plus its per-arm initialization count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolicySpec {
    kind: PolicyKind,
    init_rounds: u64,
}

impl PolicySpec {
    /// The rule with its default initialization count.
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            init_rounds: kind.default_init_rounds(),
        }
    }

    /// Override the initialization count; it may not drop below the smallest
    /// sample count the index is defined for.
    pub fn with_init_rounds(kind: PolicyKind, init_rounds: u64) -> Result<Self, Error> {
        if init_rounds < kind.min_samples() {
            return Err(Error::InitRoundsTooSmall {
                policy: kind.name(),
                min: kind.min_samples(),
                given: init_rounds,
            });
        }
        Ok(Self { kind, init_rounds })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn init_rounds(&self) -> u64 {
        self.init_rounds
    }
}

fn check_common(n: f64, policy: &'static str, min: u64, t: u64) -> Result<(), Error> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::GlobalTimeTooSmall(n));
    }
    if t < min {
        return Err(Error::SampleCountTooSmall { policy, min, t });
    }
    Ok(())
}

fn check_range(v_min: f64, w_max: f64) -> Result<(), Error> {
    if !(v_min <= w_max) {
        return Err(Error::InvertedRange { v_min, w_max });
    }
    Ok(())
}

fn check_sd(sd: f64) -> Result<(), Error> {
    if !(sd >= 0.0) {
        return Err(Error::NegativeSd(sd));
    }
    Ok(())
}

#[inline]
fn ucb_uniform_raw(ln_n: f64, t: u64, v_min: f64, w_max: f64) -> f64 {
    v_min + 0.5 * (w_max - v_min) * (ln_n / (t - 2) as f64).exp()
}

#[inline]
fn bk_ucb_raw(ln_n: f64, t: u64, v_min: f64, w_max: f64) -> f64 {
    v_min + 0.5 * (w_max - v_min) * (ln_n / t as f64).exp()
}

#[inline]
fn chk_normal_raw(ln_n: f64, t: u64, mean: f64, sd: f64) -> f64 {
    mean + sd * (2.0 * ln_n / (t - 2) as f64).exp_m1().sqrt()
}

#[inline]
fn kr_raw(ln_n: f64, t: u64, mean: f64, sd: f64) -> f64 {
    mean + sd * (2.0 * ln_n / t as f64).sqrt()
}

/// `v_min + (w_max - v_min)/2 * n^{1/(t-2)}`; needs t >= 3.
pub fn index_ucb_uniform(n: f64, t: u64, v_min: f64, w_max: f64) -> Result<f64, Error> {
    check_common(n, "ucb-uniform", 3, t)?;
    check_range(v_min, w_max)?;
    Ok(ucb_uniform_raw(n.ln(), t, v_min, w_max))
}

/// `v_min + (w_max - v_min)/2 * n^{1/t}`; needs t >= 1.
pub fn index_bk(n: f64, t: u64, v_min: f64, w_max: f64) -> Result<f64, Error> {
    check_common(n, "bk-ucb", 1, t)?;
    check_range(v_min, w_max)?;
    Ok(bk_ucb_raw(n.ln(), t, v_min, w_max))
}

/// `mean + sd * sqrt(n^{2/(t-2)} - 1)`; needs t >= 3.
pub fn index_chk_normal(n: f64, t: u64, mean: f64, sd: f64) -> Result<f64, Error> {
    check_common(n, "chk-normal", 3, t)?;
    check_sd(sd)?;
    Ok(chk_normal_raw(n.ln(), t, mean, sd))
}

/// `mean + sd * sqrt(2 ln n / t)`; needs t >= 2.
pub fn index_kr(n: f64, t: u64, mean: f64, sd: f64) -> Result<f64, Error> {
    check_common(n, "kr", 2, t)?;
    check_sd(sd)?;
    Ok(kr_raw(n.ln(), t, mean, sd))
}

#[inline]
fn index_raw(kind: PolicyKind, ln_n: f64, s: &ArmStats) -> f64 {
    match kind {
        PolicyKind::UcbUniform => ucb_uniform_raw(ln_n, s.count(), s.min(), s.max()),
        PolicyKind::BkUcb => bk_ucb_raw(ln_n, s.count(), s.min(), s.max()),
        PolicyKind::ChkNormal => chk_normal_raw(ln_n, s.count(), s.mean(), s.sd()),
        PolicyKind::Kr => kr_raw(ln_n, s.count(), s.mean(), s.sd()),
    }
}

fn select_with_ln(spec: PolicySpec, stats: &[ArmStats], ln_n: f64) -> usize {
    // Initialization phase: the lowest-index arm among those with the fewest
    // samples below the per-arm quota. This walks arms 0..N-1 in passes.
    let mut pending: Option<(u64, usize)> = None;
    for (i, s) in stats.iter().enumerate() {
        if s.count() < spec.init_rounds {
            match pending {
                Some((c, _)) if c <= s.count() => {}
                _ => pending = Some((s.count(), i)),
            }
        }
    }
    if let Some((_, i)) = pending {
        return i;
    }

    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, s) in stats.iter().enumerate() {
        let v = index_raw(spec.kind, ln_n, s);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    best_i
}

/// Arm to pull next at global time `n` (samples drawn so far across all
/// arms). During initialization `n` is ignored; afterwards every arm has
/// enough samples for its index and the argmax wins, lowest index on ties.
pub fn select_arm(spec: PolicySpec, stats: &[ArmStats], n: u64) -> usize {
    debug_assert!(!stats.is_empty());
    select_with_ln(spec, stats, (n as f64).ln())
}

/// Pseudo-regret trajectory of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    /// The checkpoint times the run was sampled at, ascending.
    pub checkpoints: Vec<u64>,
    /// Gap-weighted pull counts at each checkpoint.
    pub pseudo_regret: Vec<f64>,
    /// Per-arm pull counts at each checkpoint.
    pub pulls: Vec<Vec<u64>>,
    /// Per-arm pull counts at the horizon.
    pub final_pulls: Vec<u64>,
    /// Gap-weighted pull counts at the horizon.
    pub final_regret: f64,
}

/// Run one replication to `horizon`, recording pseudo-regret at every
/// checkpoint. `checkpoints` must be ascending and within 1..=horizon;
/// `streams` supplies one generator per arm.
pub fn run_policy(
    instance: &BanditInstance,
    spec: PolicySpec,
    horizon: u64,
    checkpoints: &[u64],
    streams: &mut [SplitMix64],
) -> Result<PolicyRun, Error> {
    let n_arms = instance.len();
    assert_eq!(streams.len(), n_arms, "one stream per arm");
    let init_total = spec.init_rounds * n_arms as u64;
    if horizon < init_total {
        return Err(Error::HorizonTooShort {
            horizon,
            arms: n_arms,
            rounds: spec.init_rounds,
        });
    }
    for w in checkpoints.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidScenario(format!(
                "checkpoints must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = checkpoints.last() {
        let first = checkpoints[0];
        if first < 1 || last > horizon {
            return Err(Error::InvalidScenario(format!(
                "checkpoints must lie in 1..={horizon}, got range [{first}, {last}]"
            )));
        }
    }

    let gaps: Vec<f64> = (0..n_arms).map(|i| instance.gap(i)).collect();
    let arms = instance.arms();
    let mut stats = vec![ArmStats::new(); n_arms];
    let mut regret = 0.0;
    let mut regret_at = Vec::with_capacity(checkpoints.len());
    let mut pulls_at = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0;

    for n_done in 0..horizon {
        let arm = if n_done < init_total {
            (n_done % n_arms as u64) as usize
        } else {
            select_with_ln(spec, &stats, (n_done as f64).ln())
        };
        let x = arms[arm].sample(&mut streams[arm]);
        stats[arm].update(x);
        regret += gaps[arm];
        let now = n_done + 1;
        while next_cp < checkpoints.len() && checkpoints[next_cp] == now {
            regret_at.push(regret);
            pulls_at.push(stats.iter().map(|s| s.count()).collect());
            next_cp += 1;
        }
    }

    Ok(PolicyRun {
        checkpoints: checkpoints.to_vec(),
        pseudo_regret: regret_at,
        pulls: pulls_at,
        final_pulls: stats.iter().map(|s| s.count()).collect(),
        final_regret: regret,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::UniformArm;
    use crate::rng::arm_streams;

    const E: f64 = std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn ucb_uniform_values() {
        assert_eq!(index_ucb_uniform(1.0, 5, 0.0, 2.0).unwrap(), 1.0);
        let v = index_ucb_uniform(E * E, 4, 0.0, 1.0).unwrap();
        assert!(close(v, E / 2.0, 1e-14), "{v}");
        let v = index_ucb_uniform(100.0, 12, 2.0, 4.0).unwrap();
        assert!(close(v, 3.584893192461114, 1e-14), "{v}");
    }

    #[test]
    fn bk_ucb_values() {
        assert_eq!(index_bk(1.0, 2, 0.0, 2.0).unwrap(), 1.0);
        let v = index_bk(E.powi(3), 3, 0.0, 1.0).unwrap();
        assert!(close(v, E / 2.0, 1e-14), "{v}");
        let v = index_bk(16.0, 4, 1.0, 3.0).unwrap();
        assert!(close(v, 3.0, 1e-14), "{v}");
    }

    #[test]
    fn chk_normal_values() {
        assert_eq!(index_chk_normal(1.0, 5, 4.0, 2.0).unwrap(), 4.0);
        assert_eq!(index_chk_normal(7.0, 5, 4.0, 0.0).unwrap(), 4.0);
        let v = index_chk_normal(E, 4, 0.0, 1.0).unwrap();
        assert!(close(v, 1.3108324944320862, 1e-14), "{v}");
    }

    #[test]
    fn kr_values() {
        assert_eq!(index_kr(1.0, 7, 7.0, 3.0).unwrap(), 7.0);
        let v = index_kr(E, 2, 0.0, 1.0).unwrap();
        assert!(close(v, 1.0, 1e-14), "{v}");
    }

    #[test]
    fn index_preconditions() {
        assert!(matches!(
            index_ucb_uniform(10.0, 2, 0.0, 1.0),
            Err(Error::SampleCountTooSmall { min: 3, .. })
        ));
        assert!(matches!(
            index_bk(10.0, 0, 0.0, 1.0),
            Err(Error::SampleCountTooSmall { min: 1, .. })
        ));
        assert!(matches!(
            index_chk_normal(10.0, 2, 0.0, 1.0),
            Err(Error::SampleCountTooSmall { min: 3, .. })
        ));
        assert!(matches!(
            index_kr(10.0, 1, 0.0, 1.0),
            Err(Error::SampleCountTooSmall { min: 2, .. })
        ));
        assert!(matches!(
            index_ucb_uniform(0.5, 3, 0.0, 1.0),
            Err(Error::GlobalTimeTooSmall(_))
        ));
        assert!(matches!(
            index_ucb_uniform(10.0, 3, 1.0, 0.0),
            Err(Error::InvertedRange { .. })
        ));
        assert!(matches!(
            index_kr(10.0, 3, 0.0, -1.0),
            Err(Error::NegativeSd(_))
        ));
    }

    #[test]
    fn exp_route_matches_powf_route() {
        for &(n, t, v, w) in &[
            (100.0, 12, 2.0, 4.0),
            (1e6, 3, -1.0, 3.5),
            (17.0, 9, 0.25, 0.75),
        ] {
            let got = index_ucb_uniform(n, t, v, w).unwrap();
            let powf = v + 0.5 * (w - v) * f64::powf(n, 1.0 / (t as f64 - 2.0));
            assert!(close(got, powf, 1e-12), "{got} vs {powf}");
        }
    }

    #[test]
    fn init_rounds_floor() {
        assert!(PolicySpec::with_init_rounds(PolicyKind::UcbUniform, 2).is_err());
        assert!(PolicySpec::with_init_rounds(PolicyKind::UcbUniform, 3).is_ok());
        assert!(PolicySpec::with_init_rounds(PolicyKind::BkUcb, 1).is_ok());
        assert!(PolicySpec::with_init_rounds(PolicyKind::Kr, 1).is_err());
        assert_eq!(PolicySpec::new(PolicyKind::ChkNormal).init_rounds(), 3);
    }

    #[test]
    fn policy_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("ucb".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn select_prefers_fewest_samples_during_init() {
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut stats = vec![ArmStats::new(); 3];
        assert_eq!(select_arm(spec, &stats, 0), 0);
        stats[0].update(0.5);
        assert_eq!(select_arm(spec, &stats, 1), 1);
        stats[1].update(0.5);
        assert_eq!(select_arm(spec, &stats, 2), 2);
        stats[2].update(0.5);
        assert_eq!(select_arm(spec, &stats, 3), 0);
    }

    #[test]
    fn select_breaks_ties_low() {
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut stats = vec![ArmStats::new(); 2];
        for s in stats.iter_mut() {
            s.update(0.0);
            s.update(1.0);
            s.update(0.5);
        }
        assert_eq!(select_arm(spec, &stats, 6), 0);
    }

    #[test]
    fn select_matches_explicit_argmax() {
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut stats = vec![ArmStats::new(); 3];
        for &x in &[0.0, 1.0, 0.5, 0.5] {
            stats[0].update(x);
        }
        for &x in &[0.2, 0.8, 0.5, 0.4, 0.6] {
            stats[1].update(x);
        }
        for &x in &[1.0, 2.0, 1.5, 1.2, 1.8] {
            stats[2].update(x);
        }
        // By hand at n = 16: arm 0 gives 0 + 0.5 * 16^(1/2) = 2.0, arm 1
        // gives 0.2 + 0.3 * 16^(1/3) = 0.9559, arm 2 gives 1 + 0.5 * 16^(1/3)
        // = 2.2599, so the ordering is arm 2 > arm 0 > arm 1.
        let by_hand: Vec<f64> = stats
            .iter()
            .map(|s| {
                s.min()
                    + 0.5 * (s.max() - s.min()) * f64::powf(16.0, 1.0 / (s.count() as f64 - 2.0))
            })
            .collect();
        assert!(by_hand[2] > by_hand[0] && by_hand[0] > by_hand[1]);
        assert_eq!(select_arm(spec, &stats, 16), 2);
    }

    fn two_arm_instance() -> BanditInstance {
        BanditInstance::new(vec![
            UniformArm::new(0.0, 1.0).unwrap(),
            UniformArm::new(0.0, 2.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn run_rejects_short_horizon() {
        let inst = two_arm_instance();
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut streams = arm_streams(1, 0, 0, 2);
        let err = run_policy(&inst, spec, 5, &[5], &mut streams).unwrap_err();
        assert!(matches!(err, Error::HorizonTooShort { .. }));
    }

    #[test]
    fn run_rejects_bad_checkpoints() {
        let inst = two_arm_instance();
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut streams = arm_streams(1, 0, 0, 2);
        assert!(run_policy(&inst, spec, 20, &[8, 8], &mut streams).is_err());
        assert!(run_policy(&inst, spec, 20, &[10, 9], &mut streams).is_err());
        assert!(run_policy(&inst, spec, 20, &[10, 25], &mut streams).is_err());
    }

    #[test]
    fn init_phase_is_round_robin() {
        let inst = two_arm_instance();
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut streams = arm_streams(1, 0, 0, 2);
        let run = run_policy(&inst, spec, 6, &[6], &mut streams).unwrap();
        assert_eq!(run.final_pulls, vec![3, 3]);
    }

    #[test]
    fn identical_arms_have_zero_regret() {
        let inst = BanditInstance::new(vec![
            UniformArm::new(0.0, 1.0).unwrap(),
            UniformArm::new(0.0, 1.0).unwrap(),
        ])
        .unwrap();
        for kind in PolicyKind::ALL {
            let spec = PolicySpec::new(kind);
            let mut streams = arm_streams(11, 0, 0, 2);
            let run = run_policy(&inst, spec, 500, &[100, 500], &mut streams).unwrap();
            assert_eq!(run.pseudo_regret, vec![0.0, 0.0]);
            assert_eq!(run.final_regret, 0.0);
        }
    }

    #[test]
    fn pulls_conserve_time() {
        let inst = two_arm_instance();
        for kind in PolicyKind::ALL {
            let spec = PolicySpec::new(kind);
            let mut streams = arm_streams(5, 0, 0, 2);
            let run = run_policy(&inst, spec, 300, &[50, 300], &mut streams).unwrap();
            for (k, &cp) in run.checkpoints.iter().enumerate() {
                let total: u64 = run.pulls[k].iter().sum();
                assert_eq!(total, cp);
            }
            assert_eq!(run.final_pulls.iter().sum::<u64>(), 300);
        }
    }

    #[test]
    fn reruns_are_deterministic() {
        let inst = two_arm_instance();
        let spec = PolicySpec::new(PolicyKind::UcbUniform);
        let mut s1 = arm_streams(77, 2, 13, 2);
        let mut s2 = arm_streams(77, 2, 13, 2);
        let a = run_policy(&inst, spec, 400, &[400], &mut s1).unwrap();
        let b = run_policy(&inst, spec, 400, &[400], &mut s2).unwrap();
        assert_eq!(a, b);
    }
}
