//! Strict JSON scenario grammar and its translation into a runnable
//! [`Scenario`]. Unknown keys are rejected so a typo in an arm parameter
//! fails loudly instead of silently running the wrong experiment.

use serde::Deserialize;

use uniband::arm::{BanditInstance, UniformArm};
use uniband::montecarlo::Scenario;
use uniband::policy::{PolicyKind, PolicySpec};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub arms: Vec<ArmSpec>,
    pub policies: Vec<String>,
    pub horizon: u64,
    pub checkpoints: CheckpointSpec,
    pub replications: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    pub a: f64,
    pub b: f64,
}

/// Either an explicit checkpoint list or a generated grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CheckpointSpec {
    Explicit(Vec<u64>),
    Grid(GridSpec),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Log,
}

impl ScenarioFile {
    /// Parse with unknown keys rejected; errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The x-axis family the checkpoints were declared with; explicit lists
    /// chart linearly.
    pub fn grid_kind(&self) -> GridKind {
        match &self.checkpoints {
            CheckpointSpec::Grid(g) => g.kind,
            CheckpointSpec::Explicit(_) => GridKind::Linear,
        }
    }

    /// Arms alone, for commands that evaluate bounds rather than simulate.
    pub fn instance(&self) -> Result<BanditInstance, CliError> {
        let mut arms = Vec::with_capacity(self.arms.len());
        for (i, spec) in self.arms.iter().enumerate() {
            arms.push(
                UniformArm::new(spec.a, spec.b)
                    .map_err(|e| CliError::Validation(format!("arm {i}: {e}")))?,
            );
        }
        BanditInstance::new(arms).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn build(&self) -> Result<Scenario, CliError> {
        let instance = self.instance()?;
        let mut policies = Vec::with_capacity(self.policies.len());
        for name in &self.policies {
            policies.push(PolicySpec::new(parse_policy(name)?));
        }
        let mut scenario = Scenario {
            instance,
            policies,
            horizon: self.horizon,
            checkpoints: Vec::new(),
            replications: self.replications,
            master_seed: self.seed,
        };
        scenario.checkpoints = match &self.checkpoints {
            CheckpointSpec::Explicit(list) => list.clone(),
            CheckpointSpec::Grid(g) => generate_grid(*g, scenario.min_checkpoint(), self.horizon)?,
        };
        scenario
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(scenario)
    }
}

/// Canonical policy names plus the short aliases `bk` and `chk`.
pub fn parse_policy(name: &str) -> Result<PolicyKind, CliError> {
    match name {
        "bk" => Ok(PolicyKind::BkUcb),
        "chk" => Ok(PolicyKind::ChkNormal),
        other => other.parse().map_err(|_| {
            CliError::Validation(format!(
                "unknown policy {other:?}; expected ucb-uniform, bk-ucb, chk-normal, or kr"
            ))
        }),
    }
}

/// `count` strictly increasing times from the end of the longest
/// initialization phase to the horizon, spaced linearly or geometrically.
fn generate_grid(g: GridSpec, min_checkpoint: u64, horizon: u64) -> Result<Vec<u64>, CliError> {
    if g.count == 0 {
        return Err(CliError::Validation(
            "checkpoint count must be positive".into(),
        ));
    }
    let lo = min_checkpoint.max(1);
    if lo > horizon {
        return Err(CliError::Validation(format!(
            "horizon {horizon} is shorter than the initialization phase ({lo} plays)"
        )));
    }
    let count = u64::from(g.count);
    if count == 1 {
        return Ok(vec![horizon]);
    }
    let (lo_f, hi_f) = (lo as f64, horizon as f64);
    let mut points = Vec::with_capacity(count as usize);
    let mut prev = lo - 1;
    for i in 0..count {
        let frac = i as f64 / (count - 1) as f64;
        let x = match g.kind {
            GridKind::Linear => lo_f + (hi_f - lo_f) * frac,
            GridKind::Log => lo_f * (hi_f / lo_f).powf(frac),
        };
        let v = (x.round() as u64).max(prev + 1);
        if v > horizon {
            return Err(CliError::Validation(format!(
                "cannot place {count} distinct checkpoints between {lo} and {horizon}"
            )));
        }
        points.push(v);
        prev = v;
    }
    Ok(points)
}
