//! Experiment configuration: a TOML file with one section per subcommand.
//! Unknown keys are rejected everywhere. See `docs/config.md` for the schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rvqc::field::{InteractionProfile, QubitLayout};
use rvqc::train::{LossDivisor, TrainConfig};
use rvqc::transpile::DEFAULT_ANGLE_MARGIN;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    /// Base seed for training runs and sampled states.
    #[serde(default)]
    pub seed: u64,
    pub layout: LayoutConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub bound: BoundConfig,
    #[serde(default)]
    pub transpile: TranspileConfig,
    #[serde(default)]
    pub train: TrainSection,
    /// Circular-motion realization of the trained rotation angles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<MotionConfig>,
}

fn default_output_dir() -> String {
    "out".into()
}

/// Exactly one of `positions` or `lattice`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeConfig>,
}

/// `nx × ny` lattice; qubit `iy·nx + ix` sits at `(ix·dx, iy·dy, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub duration: f64,
    pub sigma: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConfig {
    /// Number of layers `D` for the product bound.
    pub layers: u32,
    /// Random pure states used for the exact check (N ≤ 8 only).
    pub num_states: usize,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { layers: 100, num_states: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TranspileMode {
    /// Dense for N ≤ 7, symbolic above.
    #[default]
    Auto,
    Dense,
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TranspileConfig {
    /// 0-based qubit pair to keep.
    pub pair: [usize; 2],
    pub margin: f64,
    pub mode: TranspileMode,
    /// Emit the identity-producing elimination plan instead.
    pub eliminate: bool,
}

impl Default for TranspileConfig {
    fn default() -> Self {
        Self { pair: [0, 1], margin: DEFAULT_ANGLE_MARGIN, mode: TranspileMode::Auto, eliminate: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DivisorConfig {
    QubitCount,
    #[default]
    HilbertDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub depth: usize,
    pub learning_rate: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub num_runs: usize,
    pub num_test_states: usize,
    pub fidelity_every: usize,
    pub loss_divisor: DivisorConfig,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            depth: 50,
            learning_rate: 0.01,
            tolerance: 0.004,
            max_epochs: 30000,
            num_runs: 20,
            num_test_states: 64,
            fidelity_every: 50,
            loss_divisor: DivisorConfig::HilbertDimension,
        }
    }
}

/// Qubits with gap `Ω` circle at radius `R` for `Δt` per layer; `Δt` is
/// independent of the interaction width `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionConfig {
    pub energy_gap: f64,
    pub radius: f64,
    pub layer_duration: f64,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<String>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.output_dir {
            self.output_dir.clone_from(out);
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(runs) = o.runs {
            self.train.num_runs = runs;
        }
    }

    /// The configuration as it will be used, in the same TOML schema.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn layout(&self) -> Result<QubitLayout, CliError> {
        let l = &self.layout;
        let layout = match (&l.positions, &l.lattice) {
            (Some(p), None) => QubitLayout::new(p.clone()),
            (None, Some(g)) => QubitLayout::rectangular_lattice(g.nx, g.ny, g.dx, g.dy),
            _ => return Err(CliError::Config("layout: set exactly one of `positions` or `lattice`".into())),
        }
        .map_err(|e| CliError::Config(format!("layout: {e}")))?;
        if layout.is_empty() {
            return Err(CliError::Config("layout: at least one qubit is required".into()));
        }
        Ok(layout)
    }

    pub fn profile(&self) -> Result<InteractionProfile, CliError> {
        let p = self.profile;
        InteractionProfile::new(p.duration, p.sigma, p.lambda).map_err(|e| CliError::Config(format!("profile: {e}")))
    }

    pub fn train_config(&self) -> Result<TrainConfig, CliError> {
        let t = &self.train;
        let mut cfg = TrainConfig::new(t.depth, self.layout()?, self.profile()?);
        cfg.learning_rate = t.learning_rate;
        cfg.tolerance = t.tolerance;
        cfg.max_epochs = t.max_epochs;
        cfg.num_runs = t.num_runs;
        cfg.num_test_states = t.num_test_states;
        cfg.fidelity_every = t.fidelity_every;
        cfg.seed = self.seed;
        cfg.loss_divisor = match t.loss_divisor {
            DivisorConfig::QubitCount => LossDivisor::QubitCount,
            DivisorConfig::HilbertDimension => LossDivisor::HilbertDimension,
        };
        cfg.validate().map_err(|e| CliError::Config(format!("train: {e}")))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[layout]
lattice = { nx = 3, ny = 2, dx = 5.0, dy = 3.0 }

[profile]
duration = 1e8
sigma = 1e-8
lambda = 1e-4
"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.output_dir, "out");
        assert_eq!(c.train, TrainSection::default());
        assert_eq!(c.layout().unwrap().len(), 6);
        let t = c.train_config().unwrap();
        assert_eq!((t.num_runs, t.max_epochs, t.num_test_states), (20, 30000, 64));
    }

    #[test]
    fn echo_round_trips() {
        let mut c = ExperimentConfig::parse(MINIMAL).unwrap();
        c.apply(&Overrides { output_dir: Some("x/y".into()), seed: Some(17), runs: Some(3) });
        c.transpile.mode = TranspileMode::Symbolic;
        c.train.loss_divisor = DivisorConfig::QubitCount;
        let again = ExperimentConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c);

        let mut p = c.clone();
        p.layout = LayoutConfig { positions: Some(vec![[0.1, 0.2, 1.0 / 3.0], [1e-300, -2.5, 7e22]]), lattice: None };
        assert_eq!(ExperimentConfig::parse(&p.to_toml()).unwrap(), p);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\n[train]\ndepht = 3\n");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(CliError::Config(_))));
        let bad = format!("colour = 1\n{MINIMAL}");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn layout_needs_exactly_one_form() {
        let both = MINIMAL.replace("[layout]\n", "[layout]\npositions = [[0.0, 0.0, 0.0]]\n");
        let c = ExperimentConfig::parse(&both).unwrap();
        assert!(c.layout().is_err());
    }
}
