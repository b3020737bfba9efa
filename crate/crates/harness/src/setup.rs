//! Objects shared by the commands: the finite element space, best-knowledge
//! backgrounds, the truth and the sensor network.

use pbdw::assimilation::inf_sup;
use pbdw::field::{solve_helmholtz, DiscreteField, FemSpace, HelmholtzConfig, InnerProduct, Mesh};
use pbdw::neural::{read_model, OperatorModel};
use pbdw::observation::{random_placement, SensorSet};
use pbdw::placement::{candidate_grid, sgreedy, StepRecord};
use pbdw::reduced_basis::{generate_snapshots, linspace, pod, BackgroundBasis, SnapshotSet};

use crate::config::{ExperimentConfig, PhysicsModel, StrategyTag};
use crate::error::{config_err, Result};

pub struct Setup<'a> {
    pub cfg: &'a ExperimentConfig,
    pub space: FemSpace<f64>,
    pub ip: InnerProduct<f64>,
}

/// Sensors together with the stability trace of every prefix.
pub struct Placement {
    pub set: SensorSet<f64>,
    pub steps: Vec<StepRecord<f64>>,
}

/// Background bound to the sensor network used by the hybrid studies.
pub struct HybridSpaces {
    pub set: SensorSet<f64>,
    pub basis: BackgroundBasis<f64>,
    pub steps: Vec<StepRecord<f64>>,
}

impl<'a> Setup<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.mesh.nodes;
        let space = FemSpace::new(Mesh::new(n, n)?);
        let ip = space.inner_product(cfg.inner_product());
        Ok(Self { cfg, space, ip })
    }

    pub fn mesh(&self) -> &Mesh<f64> {
        self.space.mesh()
    }

    pub fn snapshots(&self, model: PhysicsModel, domain: [f64; 2]) -> Result<SnapshotSet<f64>> {
        let p = &self.cfg.physics;
        let cfg = HelmholtzConfig {
            mu: p.mu_eval,
            epsilon: p.epsilon,
            bc: model.boundary(),
            source: model.source(),
        };
        Ok(generate_snapshots(&self.space, &linspace(domain[0], domain[1], p.grid), &cfg)?)
    }

    /// POD of the best-knowledge manifold with `n` modes.
    pub fn background(&self, n: usize) -> Result<BackgroundBasis<f64>> {
        let snaps = self.snapshots(self.cfg.scenario.background, self.cfg.physics.domain)?;
        Ok(pod(&snaps, &self.ip, n)?)
    }

    pub fn truth(&self) -> Result<DiscreteField<f64>> {
        Ok(solve_helmholtz(self.mesh(), &self.cfg.truth_config())?)
    }

    pub fn grid(&self) -> Vec<[f64; 2]> {
        candidate_grid(self.mesh(), self.cfg.sensors.margin)
    }

    /// `m` sensors by the configured strategy, placed against `basis`.
    pub fn place(&self, basis: &BackgroundBasis<f64>, m: usize) -> Result<Placement> {
        if m == 0 {
            return Err(config_err("sensor count must be at least 1"));
        }
        let width = self.cfg.sensors.width;
        match self.cfg.sensors.strategy {
            StrategyTag::Sgreedy => {
                let state = sgreedy(self.mesh(), basis, m, width, &self.grid())?;
                Ok(Placement {
                    set: state.set,
                    steps: state.steps,
                })
            }
            StrategyTag::Random => {
                let sensors = random_placement(m, None, width, self.cfg.seed)?;
                let set = SensorSet::build(self.mesh(), &self.ip, sensors)?;
                let steps = (1..=m)
                    .map(|k| {
                        let n = basis.len().min(k);
                        let prefix = set.prefix(k)?;
                        let bound = basis.truncate(n)?.bind_sensors(&prefix)?;
                        let beta = inf_sup(bound.coupling().expect("bound"), prefix.gram())?.beta;
                        Ok(StepRecord {
                            m: k,
                            n,
                            beta,
                            residual: f64::NAN,
                        })
                    })
                    .collect::<pbdw::Result<Vec<_>>>()?;
                Ok(Placement { set, steps })
            }
        }
    }

    /// Background of `model.n` modes and the sensors placed for it.
    pub fn hybrid_spaces(&self) -> Result<HybridSpaces> {
        let n = self.cfg.model.n;
        let m = self.cfg.sensors.count.resolve(n)?;
        let basis = self.background(n)?;
        let placed = self.place(&basis, m)?;
        let basis = basis.bind_sensors(&placed.set)?;
        Ok(HybridSpaces {
            set: placed.set,
            basis,
            steps: placed.steps,
        })
    }

    /// Loads the trained model matching `spaces`.
    pub fn load_model(&self, spaces: &HybridSpaces) -> Result<OperatorModel<f64>> {
        let path = self.cfg.checkpoint_path();
        let file = std::fs::File::open(&path).map_err(|e| {
            config_err(format!("model checkpoint {}: {e}; run `pbdw train` first", path.display()))
        })?;
        Ok(read_model(std::io::BufReader::new(file), &spaces.set, &spaces.basis)?)
    }
}
