//! Subcommand implementations, shared by the binary and the integration
//! tests. Each returns `Err` with the exit-code class baked in; stdout
//! carries only the documented output (CSV rows, verification lines, index
//! values), everything else goes to stderr.

use std::fs;
use std::path::Path;

use uniband::montecarlo::run_scenario;
use uniband::policy::{index_bk, index_chk_normal, index_kr, index_ucb_uniform, PolicyKind};
use uniband::rng::{derive_seed, SplitMix64};
use uniband::theory::{
    finite_time_terms, kl_infimum_grid, kl_infimum_to_mean, m_bk, minmax_density_mass,
    slack_free_terms, verify_log_slack_bound, verify_summation_bound, GridSearchConfig,
    SlackChoice,
};
use uniband::UniformArm;

use crate::csvout::regret_csv;
use crate::scenario::{parse_policy, GridKind, ScenarioFile};
use crate::svg::regret_svg;
use crate::CliError;

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Run a scenario and write its regret curves as CSV, optionally charting
/// them as SVG. Partial outputs are removed if any write fails.
pub fn cmd_simulate(
    scenario_path: &Path,
    out: &Path,
    svg: Option<&Path>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let file = ScenarioFile::load(scenario_path)?;
    let scenario = file.build()?;
    let workers = workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::Validation("--workers must be at least 1".into()));
    }
    let curves = run_scenario(&scenario, workers).map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv = regret_csv(&curves);
    write_or_clean(out, csv.as_bytes(), &[])?;
    if let Some(svg_path) = svg {
        let chart = regret_svg(&curves, file.grid_kind() == GridKind::Log);
        write_or_clean(svg_path, chart.as_bytes(), &[out])?;
    }
    eprintln!(
        "wrote {} curves x {} checkpoints to {}",
        curves.len(),
        scenario.checkpoints.len(),
        out.display()
    );
    Ok(())
}

/// Write fully or not at all; a failure also removes files written earlier
/// in the same command.
fn write_or_clean(path: &Path, bytes: &[u8], earlier: &[&Path]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| {
        let _ = fs::remove_file(path);
        for p in earlier {
            let _ = fs::remove_file(p);
        }
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Mbk,
    Thm1,
    Thm3,
}

/// Print a regret bound and its per-arm decomposition as CSV on stdout.
pub fn cmd_bound(
    scenario_path: &Path,
    which: BoundKind,
    n: Option<u64>,
    eps: Option<Vec<f64>>,
    delta: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let instance = ScenarioFile::load(scenario_path)?.instance()?;
    match which {
        BoundKind::Mbk => {
            let mu_star = instance.mu_star();
            println!("arm,ln_coeff");
            for (i, arm) in instance.suboptimal_arms() {
                let gap = mu_star - arm.mean();
                let coeff = gap / (2.0 * gap / arm.span()).ln_1p();
                println!("{i},{coeff:.9}");
            }
            println!("total,{:.9}", m_bk(&instance));
        }
        BoundKind::Thm1 => {
            let n = require_n(n)?;
            let slack = SlackChoice {
                eps: per_arm("eps", eps, instance.len())?,
                delta: per_arm("delta", delta, instance.len())?,
            };
            let bound = finite_time_terms(&instance, &slack)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let total = bound
                .at(n)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let ln_n = (n as f64).ln();
            println!("arm,log_coeff,const_term,value_at_n");
            for term in &bound.per_arm {
                println!(
                    "{},{:.9},{:.9},{:.9}",
                    term.arm,
                    term.log_coeff,
                    term.const_term,
                    term.log_coeff * ln_n + term.const_term
                );
            }
            println!(
                "total,{:.9},{:.9},{total:.9}",
                bound.log_coeff, bound.const_term
            );
        }
        BoundKind::Thm3 => {
            let n = require_n(n)?;
            let bound = slack_free_terms(&instance);
            let total = bound
                .at(n)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let ln_n = (n as f64).ln();
            let value = |c1: f64, c34: f64, c14: f64, c0: f64| {
                c1 * ln_n + c34 * ln_n.powf(0.75) + c14 * ln_n.powf(0.25) + c0
            };
            println!("arm,ln_coeff,ln34_coeff,ln14_coeff,const_term,value_at_n");
            for t in &bound.per_arm {
                println!(
                    "{},{:.9},{:.9},{:.9},{:.9},{:.9}",
                    t.arm,
                    t.ln_coeff,
                    t.ln34_coeff,
                    t.ln14_coeff,
                    t.const_term,
                    value(t.ln_coeff, t.ln34_coeff, t.ln14_coeff, t.const_term)
                );
            }
            println!(
                "total,{:.9},{:.9},{:.9},{:.9},{total:.9}",
                bound.ln_coeff, bound.ln34_coeff, bound.ln14_coeff, bound.const_term
            );
        }
    }
    Ok(())
}

fn require_n(n: Option<u64>) -> Result<u64, CliError> {
    n.ok_or_else(|| CliError::Validation("this bound needs --n".into()))
}

/// One value broadcasts to every arm; otherwise exactly one per arm.
fn per_arm(name: &str, vals: Option<Vec<f64>>, n_arms: usize) -> Result<Vec<f64>, CliError> {
    match vals {
        None => Err(CliError::Validation(format!(
            "--which thm1 requires --{name}"
        ))),
        Some(v) if v.len() == 1 => Ok(vec![v[0]; n_arms]),
        Some(v) if v.len() == n_arms => Ok(v),
        Some(v) => Err(CliError::Validation(format!(
            "--{name} needs 1 or {n_arms} values, got {}",
            v.len()
        ))),
    }
}

/// Which inequality to check, with its grid.
#[derive(Debug, Clone)]
pub enum VerifyTask {
    /// Tail-sum cap `lhs <= 30 + 6/alpha^3` over (alpha, n) points.
    Prop1 { alpha: Vec<f64>, n: Vec<u64> },
    /// Log-slack expansion over (Q, eps) points; exact equality at eps = 0.
    Prop2 { q: Vec<f64>, eps: Vec<f64> },
    /// Joint (min, max) density normalization on the unit arm.
    Lemma2 { k: Vec<u32> },
    /// Grid-search infimum vs closed form on random cases.
    Klinf { cases: u64, seed: u64 },
}

impl VerifyTask {
    pub fn default_prop1() -> Self {
        VerifyTask::Prop1 {
            alpha: (1..=19).map(|i| f64::from(i) / 20.0).collect(),
            n: vec![3, 10, 1_000, 1_000_000],
        }
    }

    pub fn default_prop2() -> Self {
        VerifyTask::Prop2 {
            q: (0..50)
                .map(|i| 10f64.powf(-2.0 + 4.0 * f64::from(i) / 49.0))
                .collect(),
            eps: (0..100).map(|i| f64::from(i) / 100.0).collect(),
        }
    }
}

/// Check every grid point, printing one line per point with lhs and rhs;
/// exit is a violation unless all hold.
pub fn cmd_verify(task: &VerifyTask) -> Result<(), CliError> {
    let mut failed = 0usize;
    let mut total = 0usize;
    let mut tally = |ok: bool| {
        total += 1;
        if !ok {
            failed += 1;
        }
        if ok {
            "ok"
        } else {
            "FAIL"
        }
    };
    match task {
        VerifyTask::Prop1 { alpha, n } => {
            for &a in alpha {
                for &nn in n {
                    let rep = verify_summation_bound(a, nn)
                        .map_err(|e| CliError::Validation(e.to_string()))?;
                    let ok = rep.holds && rep.half_holds;
                    println!(
                        "{} alpha={a} n={nn} lhs={:.9} rhs={:.9}",
                        tally(ok),
                        rep.lhs,
                        rep.rhs
                    );
                }
            }
        }
        VerifyTask::Prop2 { q, eps } => {
            for &qv in q {
                for &ev in eps {
                    let rep = verify_log_slack_bound(qv, ev)
                        .map_err(|e| CliError::Validation(e.to_string()))?;
                    let mut ok = rep.holds;
                    if ev == 0.0 {
                        // the two sides are the same expression here
                        ok = ok
                            && (rep.lhs - rep.rhs).abs()
                                <= 1e-12 * rep.lhs.abs().max(rep.rhs.abs()).max(1.0);
                    }
                    println!(
                        "{} q={qv} eps={ev} lhs={:.9} rhs={:.9}",
                        tally(ok),
                        rep.lhs,
                        rep.rhs
                    );
                }
            }
        }
        VerifyTask::Lemma2 { k } => {
            let unit = UniformArm::new(0.0, 1.0).expect("unit arm");
            for &kk in k {
                let mass = minmax_density_mass(&unit, kk, 0.0, 1.0, 1024)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                let ok = (mass - 1.0).abs() <= 1e-8;
                println!("{} k={kk} lhs={mass:.12} rhs=1.000000000000", tally(ok));
            }
        }
        VerifyTask::Klinf { cases, seed } => {
            let cfg = GridSearchConfig::default();
            for case in 0..*cases {
                let mut stream = SplitMix64::new(derive_seed(*seed, &[0xCA5E, case]));
                let a = -5.0 + 10.0 * stream.next_f64();
                let span = 0.5 + 4.5 * stream.next_f64();
                let gap = 0.1 + 1.9 * stream.next_f64();
                let arm = UniformArm::new(a, a + span).expect("generated support is ordered");
                let target = arm.mean() + gap;
                let closed = kl_infimum_to_mean(&arm, target)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                let grid = kl_infimum_grid(&arm, target, &cfg)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                let ok = (grid - closed).abs() <= 1e-6;
                println!(
                    "{} case={case} arm=[{a:.4},{:.4}] mu_star={target:.4} lhs={grid:.9} rhs={closed:.9}",
                    tally(ok),
                    a + span
                );
            }
        }
    }
    if failed > 0 {
        Err(CliError::Violation(format!(
            "{failed} of {total} grid points violated"
        )))
    } else {
        eprintln!("all {total} grid points hold");
        Ok(())
    }
}

/// Print a single index value from explicit statistics.
pub fn cmd_index(
    policy: &str,
    n: f64,
    t: u64,
    vmin: Option<f64>,
    vmax: Option<f64>,
    mean: Option<f64>,
    sd: Option<f64>,
) -> Result<(), CliError> {
    let kind = parse_policy(policy)?;
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Validation(format!("policy {} needs --{name}", kind.name())))
    };
    let value = match kind {
        PolicyKind::UcbUniform => index_ucb_uniform(n, t, need("vmin", vmin)?, need("vmax", vmax)?),
        PolicyKind::BkUcb => index_bk(n, t, need("vmin", vmin)?, need("vmax", vmax)?),
        PolicyKind::ChkNormal => index_chk_normal(n, t, need("mean", mean)?, need("sd", sd)?),
        PolicyKind::Kr => index_kr(n, t, need("mean", mean)?, need("sd", sd)?),
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    println!("{value:.9}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_arm_broadcasts_and_validates() {
        assert_eq!(per_arm("eps", Some(vec![0.1]), 3).unwrap(), vec![0.1; 3]);
        assert_eq!(
            per_arm("eps", Some(vec![0.1, 0.2, 0.3]), 3).unwrap(),
            vec![0.1, 0.2, 0.3]
        );
        assert!(per_arm("eps", Some(vec![0.1, 0.2]), 3).is_err());
        assert!(per_arm("eps", None, 3).is_err());
    }

    #[test]
    fn verify_defaults_match_the_documented_grids() {
        match VerifyTask::default_prop1() {
            VerifyTask::Prop1 { alpha, n } => {
                assert_eq!(alpha.len(), 19);
                assert!((alpha[0] - 0.05).abs() < 1e-12);
                assert!((alpha[18] - 0.95).abs() < 1e-12);
                assert_eq!(n, vec![3, 10, 1_000, 1_000_000]);
            }
            _ => unreachable!(),
        }
        match VerifyTask::default_prop2() {
            VerifyTask::Prop2 { q, eps } => {
                assert_eq!(q.len(), 50);
                assert!((q[0] - 0.01).abs() < 1e-12);
                assert!((q[49] - 100.0).abs() < 1e-10);
                assert_eq!(eps.len(), 100);
                assert_eq!(eps[0], 0.0);
                assert!((eps[99] - 0.99).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }
}
