//! Acceptance gate for the workspace. Each test checks one criterion and
//! prints a single verdict line; run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::process::Command;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use uniband::montecarlo::run_scenario;
use uniband::policy::{index_bk, index_chk_normal, index_kr, index_ucb_uniform, select_arm};
use uniband::rng::{derive_seed, SplitMix64};
use uniband::theory::{
    finite_time_terms, kl_infimum_grid, kl_infimum_to_mean, minmax_density_mass,
    minmax_joint_cdf_corner, verify_log_slack_bound, verify_summation_bound, FiniteTimeBound,
    GridSearchConfig, SlackChoice,
};
use uniband::{
    ArmStats, BanditInstance, PolicyKind, PolicySpec, RegretCurve, RegretPoint, Scenario,
    UniformArm,
};
use uniband_cli::scenario::ScenarioFile;

fn verdict(item: usize, label: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {item:>2} {label}: {word} ({detail})");
    assert!(pass, "acceptance {item} {label}: {detail}");
}

fn shipped_table1() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/table1.json")
}

#[test]
fn a01_final_checkpoint_ordering() {
    let file = ScenarioFile::load(&shipped_table1()).unwrap();
    let scenario = file.build().unwrap();
    let curves = run_scenario(&scenario, 1).unwrap();
    let last = |name: &str| -> &RegretPoint {
        let curve = curves
            .iter()
            .find(|c| c.policy.kind().name() == name)
            .unwrap();
        curve.points.last().unwrap()
    };
    let ucb = last("ucb-uniform");
    let kr = last("kr");
    let chk = last("chk-normal");
    let sigmas = |hi: &RegretPoint, lo: &RegretPoint| {
        (hi.mean_regret - lo.mean_regret) / (hi.stderr.powi(2) + lo.stderr.powi(2)).sqrt()
    };
    let vs_kr = sigmas(kr, ucb);
    let vs_chk = sigmas(chk, ucb);
    verdict(
        1,
        "final-checkpoint ordering",
        vs_kr >= 3.0 && vs_chk >= 3.0,
        &format!(
            "ucb-uniform {:.1} beats kr {:.1} by {vs_kr:.0} sigma and chk-normal {:.1} by {vs_chk:.0} sigma",
            ucb.mean_regret, kr.mean_regret, chk.mean_regret
        ),
    );
}

struct TwoArmStudy {
    curve: RegretCurve,
    bound: FiniteTimeBound,
}

/// One long run shared by the dominance and trend checks: the support rule
/// on a two-arm instance with gap 1/2, out to n = 1e5.
fn two_arm_study() -> &'static TwoArmStudy {
    static STUDY: OnceLock<TwoArmStudy> = OnceLock::new();
    STUDY.get_or_init(|| {
        let instance = BanditInstance::new(vec![
            UniformArm::new(0.0, 1.0).unwrap(),
            UniformArm::new(0.5, 1.5).unwrap(),
        ])
        .unwrap();
        let bound = finite_time_terms(&instance, &SlackChoice::uniform(2, 0.05, 0.05)).unwrap();
        let scenario = Scenario {
            instance,
            policies: vec![PolicySpec::new(PolicyKind::UcbUniform)],
            horizon: 100_000,
            checkpoints: vec![6, 10, 30, 100, 300, 1_000, 3_000, 10_000, 30_000, 100_000],
            replications: 2_000,
            master_seed: 2023,
        };
        let mut curves = run_scenario(&scenario, 1).unwrap();
        TwoArmStudy {
            curve: curves.remove(0),
            bound,
        }
    })
}

#[test]
fn a02_finite_time_bound_dominates() {
    let study = two_arm_study();
    let mut min_slack = f64::INFINITY;
    let mut at_n = 0;
    for p in &study.curve.points {
        let slack = study.bound.at(p.n).unwrap() + 3.0 * p.stderr - p.mean_regret;
        if slack < min_slack {
            min_slack = slack;
            at_n = p.n;
        }
    }
    verdict(
        2,
        "finite-time bound dominance",
        min_slack >= 0.0,
        &format!(
            "{} checkpoints to n = 1e5, smallest slack {min_slack:.1} at n = {at_n}",
            study.curve.points.len()
        ),
    );
}

#[test]
fn a03_regret_to_log_ratio_trend() {
    let study = two_arm_study();
    let ratio = |n: u64| {
        let p = study.curve.points.iter().find(|p| p.n == n).unwrap();
        p.mean_regret / (n as f64).ln()
    };
    let (r3, r4, r5) = (ratio(1_000), ratio(10_000), ratio(100_000));
    let coeff = study.bound.log_coeff;
    verdict(
        3,
        "regret-to-log-n trend",
        r3 >= r4 && r4 >= r5 && r5 < coeff,
        &format!("ratios {r3:.4} >= {r4:.4} >= {r5:.4}, final under the coefficient {coeff:.4}"),
    );
}

#[test]
fn a04_truncated_summation_cap() {
    let mut pass = true;
    let mut headroom = f64::INFINITY;
    let mut count = 0;
    for i in 1..=19u32 {
        let alpha = f64::from(i) / 20.0;
        for n in [3u64, 10, 1_000, 1_000_000] {
            let report = verify_summation_bound(alpha, n).unwrap();
            pass &= report.holds && report.half_holds;
            headroom = headroom.min(report.rhs - report.lhs);
            count += 1;
        }
    }
    verdict(
        4,
        "truncated summation cap",
        pass,
        &format!("{count} grid points, smallest headroom {headroom:.2}"),
    );
}

#[test]
fn a05_log_slack_cap_and_tightness() {
    let mut pass = true;
    let mut count = 0;
    let mut worst_eq = 0.0f64;
    for i in 0..50u32 {
        let q = 10f64.powf(-2.0 + 4.0 * f64::from(i) / 49.0);
        for j in 0..100u32 {
            let eps = f64::from(j) / 100.0;
            let report = verify_log_slack_bound(q, eps).unwrap();
            pass &= report.holds;
            count += 1;
            if j == 0 {
                let scale = 1.0f64.max(report.lhs.abs()).max(report.rhs.abs());
                let gap = (report.lhs - report.rhs).abs() / scale;
                worst_eq = worst_eq.max(gap);
                pass &= gap <= 1e-12;
            }
        }
    }
    verdict(
        5,
        "log slack cap",
        pass,
        &format!("{count} grid points, equality gap at eps = 0 at most {worst_eq:.1e}"),
    );
}

#[test]
fn a06_extremes_law() {
    let arm = UniformArm::new(0.0, 1.0).unwrap();
    let vs = [0.0, 0.15, 0.3, 0.45, 0.6];
    let ws = [0.6, 0.7, 0.8, 0.9, 1.0];
    let reps = 1_000_000u64;
    let mut pass = true;
    let mut worst_mass = 0.0f64;
    let mut worst_cell = 0.0f64;
    for k in [2u32, 5, 10] {
        let mass = minmax_density_mass(&arm, k, 0.0, 1.0, 1024).unwrap();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        pass &= (mass - 1.0).abs() <= 1e-8;

        let mut hits = [[0u64; 5]; 5];
        let mut rng = SplitMix64::new(derive_seed(0xACCE_0006, &[u64::from(k)]));
        for _ in 0..reps {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..k {
                let x = rng.next_f64();
                lo = lo.min(x);
                hi = hi.max(x);
            }
            for (i, &v) in vs.iter().enumerate() {
                for (j, &w) in ws.iter().enumerate() {
                    if lo >= v && hi <= w {
                        hits[i][j] += 1;
                    }
                }
            }
        }
        for (i, &v) in vs.iter().enumerate() {
            for (j, &w) in ws.iter().enumerate() {
                let want = minmax_joint_cdf_corner(k, w, v, &arm).unwrap();
                let got = hits[i][j] as f64 / reps as f64;
                let err = (got - want).abs();
                worst_cell = worst_cell.max(err);
                pass &= err <= 0.005;
            }
        }
    }
    verdict(
        6,
        "extremes law",
        pass,
        &format!(
            "mass off by at most {worst_mass:.1e}, corner probabilities within {worst_cell:.4}"
        ),
    );
}

#[test]
fn a07_grid_infimum_oracle() {
    let cfg = GridSearchConfig::default();
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let mut rng = SplitMix64::new(derive_seed(0x0075_EED5, &[0xCA5E, case]));
        let a = -5.0 + 10.0 * rng.next_f64();
        let span = 0.5 + 4.5 * rng.next_f64();
        let gap = 0.1 + 1.9 * rng.next_f64();
        let arm = UniformArm::new(a, a + span).unwrap();
        let mu_star = arm.mean() + gap;
        let closed = kl_infimum_to_mean(&arm, mu_star).unwrap();
        let grid = kl_infimum_grid(&arm, mu_star, &cfg).unwrap();
        worst = worst.max((grid - closed).abs());
    }
    verdict(
        7,
        "divergence infimum oracle",
        worst <= 1e-6,
        &format!("20 random cases, largest deviation {worst:.1e}"),
    );
}

#[test]
fn a08_minimum_exceedance_cap() {
    let delta = 0.1;
    let cap = (1.0 - delta) / delta;
    let reps = 100_000u64;
    let mut rng = SplitMix64::new(derive_seed(0xACCE_0008, &[200]));
    let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
    for _ in 0..reps {
        let mut low = f64::INFINITY;
        let mut hits = 0u32;
        for draw in 1..=200u32 {
            low = low.min(rng.next_f64());
            if draw >= 2 && low > delta {
                hits += 1;
            }
        }
        let x = f64::from(hits);
        sum += x;
        sumsq += x * x;
    }
    let r = reps as f64;
    let mean = sum / r;
    let sd = (((sumsq - sum * sum / r) / (r - 1.0)).max(0.0)).sqrt();
    let stderr = sd / r.sqrt();
    verdict(
        8,
        "minimum exceedance cap",
        mean <= cap + 3.0 * stderr,
        &format!("summed frequency {mean:.3} +- {stderr:.3} against cap {cap:.1}"),
    );
}

#[test]
fn a09_worker_count_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(shipped_table1()).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["horizon"] = 2_000.into();
    doc["checkpoints"] = serde_json::json!({"kind": "log", "count": 8});
    // spans several scheduling chunks so the merge order actually matters
    doc["replications"] = 600.into();
    let path = dir.path().join("determinism.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

    let mut outputs: Vec<Vec<u8>> = Vec::new();
    for workers in ["1", "2", "8"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_uniband"))
            .args([
                "simulate",
                path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--workers",
                workers,
            ])
            .env_remove("UNIBAND_WORKERS")
            .status()
            .unwrap();
        assert!(status.success(), "simulate --workers {workers}");
        outputs.push(std::fs::read(&out).unwrap());
    }
    verdict(
        9,
        "worker-count determinism",
        outputs[0] == outputs[1] && outputs[1] == outputs[2],
        &format!(
            "{} CSV bytes identical under --workers 1, 2, 8",
            outputs[0].len()
        ),
    );
}

fn stats_from(samples: &[f64]) -> ArmStats {
    let mut s = ArmStats::new();
    for &x in samples {
        s.update(x);
    }
    s
}

fn index_of(kind: PolicyKind, n: f64, s: &ArmStats) -> f64 {
    match kind {
        PolicyKind::UcbUniform => index_ucb_uniform(n, s.count(), s.min(), s.max()),
        PolicyKind::BkUcb => index_bk(n, s.count(), s.min(), s.max()),
        PolicyKind::ChkNormal => index_chk_normal(n, s.count(), s.mean(), s.sd()),
        PolicyKind::Kr => index_kr(n, s.count(), s.mean(), s.sd()),
    }
    .unwrap()
}

#[test]
fn a10_index_pins_and_argmax_invariance() {
    let pins = index_ucb_uniform(1.0, 5, 0.0, 2.0).unwrap() == 1.0
        && index_kr(1.0, 10, 7.0, 3.0).unwrap() == 7.0
        && index_bk(16.0, 4, 1.0, 3.0).unwrap() == 3.0
        && index_chk_normal(1.0, 3, 2.5, 4.0).unwrap() == 2.5;

    let mut runner = TestRunner::new(PtConfig {
        cases: 1000,
        ..PtConfig::default()
    });
    let strategy = (
        prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 3..10), 2..5),
        0u64..1000,
        -100.0..100.0f64,
        0.1..10.0f64,
    );
    let outcome = runner.run(&strategy, |(samples, extra, shift, scale)| {
        let total: u64 = samples.iter().map(|s| s.len() as u64).sum();
        let n = total + extra.max(1);
        for kind in PolicyKind::ALL {
            let spec = PolicySpec::new(kind);
            let stats: Vec<ArmStats> = samples.iter().map(|s| stats_from(s)).collect();
            let indices: Vec<f64> = stats.iter().map(|s| index_of(kind, n as f64, s)).collect();
            let mut order: Vec<usize> = (0..indices.len()).collect();
            order.sort_by(|&i, &j| indices[j].partial_cmp(&indices[i]).unwrap());
            let margin = indices[order[0]] - indices[order[1]];
            prop_assume!(margin > 1e-6 * (1.0 + indices[order[0]].abs()));

            let picked = select_arm(spec, &stats, n);
            prop_assert_eq!(picked, order[0]);
            let transformed: Vec<ArmStats> = samples
                .iter()
                .map(|s| {
                    let ys: Vec<f64> = s.iter().map(|&x| scale * x + shift).collect();
                    stats_from(&ys)
                })
                .collect();
            prop_assert_eq!(select_arm(spec, &transformed, n), picked);
        }
        Ok(())
    });
    verdict(
        10,
        "index pins and argmax invariance",
        pins && outcome.is_ok(),
        &format!(
            "four exact pins, 1000 random configurations per rule{}",
            outcome.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    );
}
