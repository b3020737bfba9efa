//! Experiment configuration, read from TOML. Every key is optional; the
//! grammar is documented in FORMATS.md.

use std::path::{Path, PathBuf};

use pbdw::field::{BoundaryCondition, HelmholtzConfig, InnerProductKind, SourceModel};
use pbdw::neural::{Architecture, ForcingFamily, Mode, TrainConfig, TruthModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub mesh: MeshSection,
    pub physics: PhysicsSection,
    pub scenario: ScenarioSection,
    pub sensors: SensorSection,
    pub assimilation: AssimilationSection,
    pub model: ModelSection,
    pub studies: StudiesSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    /// Nodes per axis.
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub mu_eval: f64,
    pub epsilon: f64,
    /// Parameter range of the best-knowledge manifold.
    pub domain: [f64; 2],
    /// Snapshots over `domain`.
    pub grid: usize,
    pub inner_product: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcTag {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceTag {
    Perfect,
    BiasedZero,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsModel {
    pub bc: BcTag,
    pub source: SourceTag,
}

impl PhysicsModel {
    pub fn boundary(&self) -> BoundaryCondition {
        match self.bc {
            BcTag::Dirichlet => BoundaryCondition::Dirichlet,
            BcTag::Neumann => BoundaryCondition::Neumann,
        }
    }

    pub fn source(&self) -> SourceModel<f64> {
        match self.source {
            SourceTag::Perfect => SourceModel::Perfect,
            SourceTag::BiasedZero => SourceModel::BiasedZero,
            SourceTag::Zero => SourceModel::Zero,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub truth: PhysicsModel,
    /// Best-knowledge model behind the background space.
    pub background: PhysicsModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyTag {
    Sgreedy,
    Random,
}

/// A fixed sensor count or the rule `"<k>N"` (k sensors per mode).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SensorCount {
    Fixed(usize),
    Rule(String),
}

impl SensorCount {
    pub fn resolve(&self, n: usize) -> Result<usize> {
        match self {
            SensorCount::Fixed(m) => Ok(*m),
            SensorCount::Rule(s) => {
                let k = s
                    .trim()
                    .strip_suffix('N')
                    .and_then(|k| k.trim().parse::<usize>().ok())
                    .ok_or_else(|| config_err(format!("sensors.count: expected an integer or \"<k>N\", got {s:?}")))?;
                Ok(k * n)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    pub width: f64,
    pub strategy: StrategyTag,
    pub count: SensorCount,
    /// Greedy candidates stay this many cells away from the boundary.
    pub margin: usize,
}

/// `"zero"`, `"gcv"` or a fixed nonnegative weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XiSetting {
    Fixed(f64),
    Named(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XiMode {
    Zero,
    Fixed(f64),
    Gcv,
}

impl XiSetting {
    pub fn mode(&self) -> Result<XiMode> {
        match self {
            XiSetting::Fixed(x) if *x >= 0.0 && x.is_finite() => Ok(if *x == 0.0 { XiMode::Zero } else { XiMode::Fixed(*x) }),
            XiSetting::Fixed(x) => Err(config_err(format!("assimilation.xi must be >= 0, got {x}"))),
            XiSetting::Named(s) => match s.as_str() {
                "zero" => Ok(XiMode::Zero),
                "gcv" => Ok(XiMode::Gcv),
                other => Err(config_err(format!("assimilation.xi: expected zero, gcv or a number, got {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcvGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GcvGrid {
    /// Log-spaced values from `min` to `max`.
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.min.log10(), self.max.log10());
        pbdw::reduced_basis::linspace(a, b, self.points)
            .into_iter()
            .map(|e| 10f64.powf(e))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssimilationSection {
    pub n: Vec<usize>,
    pub xi: XiSetting,
    pub noise: Vec<f64>,
    pub seeds: Vec<u64>,
    pub gcv_grid: GcvGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeTag {
    None,
    Weak,
    Strong,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySection {
    pub amplitude: [f64; 2],
    pub decay: [f64; 2],
    pub frequency: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub mode: ModeTag,
    /// Background modes seen by the hybrid reconstruction.
    pub n: usize,
    pub pairs: usize,
    pub split: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub batch_size: usize,
    pub branch_layers: usize,
    pub trunk_layers: usize,
    pub width: usize,
    pub loss_weights: [f64; 2],
    pub family: FamilySection,
    /// Defaults to `model.json` in the output directory.
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesStudy {
    pub n: Vec<usize>,
    pub m: usize,
    pub fields_at: Vec<usize>,
    /// Parameter range of the perfect-model manifold.
    pub domain: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorsStudy {
    pub n: usize,
    pub m: Vec<usize>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiasStudy {
    /// Held-out forcings for the error curve.
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostStudy {
    pub repetitions: usize,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudiesSection {
    pub modes: ModesStudy,
    pub sensors: SensorsStudy,
    pub bias: BiasStudy,
    pub cost: CostStudy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            output: PathBuf::from("out"),
            mesh: MeshSection::default(),
            physics: PhysicsSection::default(),
            scenario: ScenarioSection::default(),
            sensors: SensorSection::default(),
            assimilation: AssimilationSection::default(),
            model: ModelSection::default(),
            studies: StudiesSection::default(),
        }
    }
}

impl Default for MeshSection {
    fn default() -> Self {
        Self { nodes: 65 }
    }
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self {
            mu_eval: 6.0,
            epsilon: 0.01,
            domain: [5.85, 6.15],
            grid: 51,
            inner_product: "h1".into(),
        }
    }
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            truth: PhysicsModel {
                bc: BcTag::Dirichlet,
                source: SourceTag::Perfect,
            },
            background: PhysicsModel {
                bc: BcTag::Neumann,
                source: SourceTag::BiasedZero,
            },
        }
    }
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            width: 0.02,
            strategy: StrategyTag::Sgreedy,
            count: SensorCount::Fixed(50),
            margin: 1,
        }
    }
}

impl Default for GcvGrid {
    fn default() -> Self {
        Self {
            min: 1e-8,
            max: 1e2,
            points: 41,
        }
    }
}

impl Default for AssimilationSection {
    fn default() -> Self {
        Self {
            n: vec![2],
            xi: XiSetting::Named("zero".into()),
            noise: vec![0.0, 0.05, 0.1, 0.2, 0.3],
            seeds: vec![1, 2, 3, 4, 5],
            gcv_grid: GcvGrid::default(),
        }
    }
}

impl Default for FamilySection {
    fn default() -> Self {
        let f = ForcingFamily::<f64>::default();
        Self {
            amplitude: f.amplitude,
            decay: f.decay,
            frequency: f.frequency,
        }
    }
}

impl Default for ModelSection {
    fn default() -> Self {
        let t = TrainConfig::<f64>::strong_default();
        let a = Architecture::default();
        Self {
            mode: ModeTag::Strong,
            n: 2,
            pairs: 50,
            split: 0.8,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            lr_decay: t.lr_decay,
            batch_size: t.batch_size,
            branch_layers: a.branch_layers,
            trunk_layers: a.trunk_layers,
            width: a.width,
            loss_weights: [1.0, 1.0],
            family: FamilySection::default(),
            checkpoint: None,
        }
    }
}

impl Default for ModesStudy {
    fn default() -> Self {
        Self {
            n: (1..=15).collect(),
            m: 50,
            fields_at: vec![2, 6, 15],
            domain: [2.0, 10.0],
        }
    }
}

impl Default for SensorsStudy {
    fn default() -> Self {
        Self {
            n: 2,
            m: vec![2, 3, 4, 6, 8, 12, 16, 24, 32, 50],
            seeds: (1..=10).collect(),
        }
    }
}

impl Default for BiasStudy {
    fn default() -> Self {
        Self { samples: 20 }
    }
}

impl Default for CostStudy {
    fn default() -> Self {
        Self { repetitions: 100 }
    }
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(config_err(msg))
    }
}

fn valid_range(r: [f64; 2], lo: f64) -> bool {
    r[0].is_finite() && r[1].is_finite() && r[0] >= lo && r[1] >= r[0]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical serialization. The output directory is
    /// left out so a run reproduces the same files wherever it writes.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.physics;
        check(self.mesh.nodes >= 3, "mesh.nodes must be at least 3")?;
        check(p.mu_eval > 0.0 && p.mu_eval.is_finite(), "physics.mu_eval must be positive")?;
        check(p.epsilon >= 0.0 && p.epsilon.is_finite(), "physics.epsilon must be >= 0")?;
        check(valid_range(p.domain, f64::MIN_POSITIVE), "physics.domain must be an increasing pair of positive values")?;
        check(p.grid >= 1, "physics.grid must be at least 1")?;
        InnerProductKind::parse(&p.inner_product).map_err(|e| config_err(format!("physics.inner_product: {e}")))?;
        let s = &self.sensors;
        check(s.width > 0.0 && s.width.is_finite(), "sensors.width must be positive")?;
        for n in [1, 2] {
            s.count.resolve(n)?;
        }
        let a = &self.assimilation;
        check(!a.n.is_empty(), "assimilation.n must not be empty")?;
        check(a.n.iter().all(|n| *n >= 1), "assimilation.n entries must be >= 1")?;
        check(!a.noise.is_empty(), "assimilation.noise must not be empty")?;
        check(a.noise.iter().all(|d| *d >= 0.0 && d.is_finite()), "assimilation.noise entries must be >= 0")?;
        check(!a.seeds.is_empty(), "assimilation.seeds must not be empty")?;
        a.xi.mode()?;
        let g = &a.gcv_grid;
        check(g.min > 0.0 && g.max >= g.min && g.points >= 1, "assimilation.gcv_grid needs 0 < min <= max and points >= 1")?;
        let m = &self.model;
        check(m.n >= 1, "model.n must be >= 1")?;
        check(m.pairs >= 2, "model.pairs must be at least 2")?;
        check(m.split > 0.0 && m.split <= 1.0, "model.split must lie in (0, 1]")?;
        check(m.learning_rate > 0.0, "model.learning_rate must be positive")?;
        check(m.lr_decay > 0.0 && m.lr_decay <= 1.0, "model.lr_decay must lie in (0, 1]")?;
        check(m.loss_weights.iter().all(|w| *w >= 0.0), "model.loss_weights must be >= 0")?;
        let f = &m.family;
        check(
            valid_range(f.amplitude, f64::MIN) && valid_range(f.decay, f64::MIN) && valid_range(f.frequency, f64::MIN),
            "model.family ranges must be increasing pairs",
        )?;
        let st = &self.studies;
        check(!st.modes.n.is_empty() && st.modes.n.iter().all(|n| *n >= 1), "studies.modes.n must be nonempty and >= 1")?;
        check(st.modes.m >= 1, "studies.modes.m must be >= 1")?;
        check(valid_range(st.modes.domain, f64::MIN_POSITIVE), "studies.modes.domain must be an increasing positive pair")?;
        check(st.sensors.n >= 1, "studies.sensors.n must be >= 1")?;
        check(!st.sensors.m.is_empty(), "studies.sensors.m must not be empty")?;
        check(!st.sensors.seeds.is_empty(), "studies.sensors.seeds must not be empty")?;
        check(st.bias.samples >= 1, "studies.bias.samples must be >= 1")?;
        Ok(())
    }

    /// Bias studies need the truth to differ from the best-knowledge model.
    pub fn require_bias(&self) -> Result<()> {
        check(
            self.scenario.truth != self.scenario.background,
            "scenario.truth must differ from scenario.background in bc or source",
        )
    }

    pub fn inner_product(&self) -> InnerProductKind {
        InnerProductKind::parse(&self.physics.inner_product).expect("validated")
    }

    pub fn xi_mode(&self) -> XiMode {
        self.assimilation.xi.mode().expect("validated")
    }

    pub fn truth_config(&self) -> HelmholtzConfig<f64> {
        HelmholtzConfig {
            mu: self.physics.mu_eval,
            epsilon: self.physics.epsilon,
            bc: self.scenario.truth.boundary(),
            source: self.scenario.truth.source(),
        }
    }

    pub fn model_mode(&self) -> Option<Mode> {
        match self.model.mode {
            ModeTag::None => None,
            ModeTag::Weak => Some(Mode::Weak),
            ModeTag::Strong => Some(Mode::Strong),
        }
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            branch_layers: self.model.branch_layers,
            trunk_layers: self.model.trunk_layers,
            width: self.model.width,
        }
    }

    pub fn train_config(&self) -> TrainConfig<f64> {
        TrainConfig {
            epochs: self.model.epochs,
            learning_rate: self.model.learning_rate,
            lr_decay: self.model.lr_decay,
            batch_size: self.model.batch_size,
            seed: self.seed,
        }
    }

    pub fn family(&self) -> ForcingFamily<f64> {
        let f = &self.model.family;
        ForcingFamily {
            amplitude: f.amplitude,
            decay: f.decay,
            frequency: f.frequency,
        }
    }

    pub fn truth_model(&self) -> TruthModel<f64> {
        TruthModel {
            mu: self.physics.mu_eval,
            epsilon: self.physics.epsilon,
            bc: self.scenario.truth.boundary(),
        }
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.model
            .checkpoint
            .clone()
            .unwrap_or_else(|| self.output.join("model.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn partial_sections_and_mixed_value_kinds() {
        let c = ExperimentConfig::from_toml(
            "seed = 9\n[sensors]\ncount = \"25N\"\n[assimilation]\nxi = 0.5\nn = [3]\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.sensors.count.resolve(3).unwrap(), 75);
        assert_eq!(c.xi_mode(), XiMode::Fixed(0.5));
        assert_eq!(c.physics, PhysicsSection::default());
        let g = ExperimentConfig::from_toml("[assimilation]\nxi = \"gcv\"\n").unwrap();
        assert_eq!(g.xi_mode(), XiMode::Gcv);
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert!(ExperimentConfig::from_toml("[mesh]\nnodez = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("[scenario]\ntruth = { bc = \"robin\", source = \"zero\" }\n").is_err());
        let c = ExperimentConfig::from_toml("[assimilation]\nnoise = []\n").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml("[sensors]\ncount = \"lots\"\n").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml("[assimilation]\nxi = \"auto\"\n").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_ignores_the_output_directory_only() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn identical_scenarios_are_not_a_bias_study() {
        let mut c = ExperimentConfig::default();
        c.require_bias().unwrap();
        c.scenario.background = c.scenario.truth;
        assert!(c.require_bias().is_err());
    }

    #[test]
    fn gcv_grid_is_log_spaced() {
        let v = GcvGrid::default().values();
        assert_eq!(v.len(), 41);
        assert!((v[0] - 1e-8).abs() < 1e-20);
        assert!((v[40] - 1e2).abs() < 1e-10);
        assert!((v[4] - 1e-7).abs() < 1e-19);
    }
}
