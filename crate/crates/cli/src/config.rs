//! Run configuration files: TOML key/value pairs and named arrays, mirrored
//! onto the ensemble configuration. Every field has a default except
//! `n_logical`, so a minimal smoke config is a single line.

use serde::Deserialize;

use parity_qaoa::lhz::AncillaMode;
use parity_qaoa::mc::EnsembleConfig;
use parity_qaoa::protocol::{ConstraintBlockMode, FidelityMode, ProtocolKind};
use parity_qaoa::report::parse_objective;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_logical: usize,
    #[serde(default = "defaults::m_values")]
    pub m_values: Vec<usize>,
    #[serde(default = "defaults::protocols")]
    pub protocols: Vec<String>,
    /// Instance count L.
    #[serde(default = "defaults::instances")]
    pub instances: usize,
    /// Monte Carlo proposal budget M.
    #[serde(default = "defaults::steps")]
    pub steps: usize,
    #[serde(default = "defaults::delta_max")]
    pub delta_max: f64,
    #[serde(default = "defaults::objective")]
    pub objective: String,
    #[serde(default = "defaults::c_update_period")]
    pub c_update_period: usize,
    /// Monte Carlo seed base.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::instance_seed")]
    pub instance_seed: u64,
    #[serde(default = "defaults::angles_init")]
    pub angles_init: f64,
    #[serde(default = "defaults::c_init")]
    pub c_init: f64,
    #[serde(default = "defaults::c_ref")]
    pub c_ref: f64,
    #[serde(default = "defaults::ancilla_mode")]
    pub ancilla_mode: String,
    #[serde(default = "defaults::block_mode")]
    pub block_mode: String,
    #[serde(default = "defaults::fidelity_mode")]
    pub fidelity_mode: String,
    #[serde(default = "defaults::histogram_bins")]
    pub histogram_bins: usize,
    /// Worker threads; 0 means one per available core.
    #[serde(default)]
    pub threads: usize,
    /// Output directory; relative paths resolve under the output root.
    #[serde(default = "defaults::out_dir")]
    pub out_dir: String,
}

mod defaults {
    pub fn m_values() -> Vec<usize> {
        vec![1, 2, 3]
    }
    pub fn protocols() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }
    pub fn instances() -> usize {
        2000
    }
    pub fn steps() -> usize {
        4000
    }
    pub fn delta_max() -> f64 {
        1.0
    }
    pub fn objective() -> String {
        "minimize_e".into()
    }
    pub fn c_update_period() -> usize {
        10
    }
    pub fn instance_seed() -> u64 {
        1
    }
    pub fn angles_init() -> f64 {
        1.0
    }
    pub fn c_init() -> f64 {
        2.0
    }
    pub fn c_ref() -> f64 {
        2.0
    }
    pub fn ancilla_mode() -> String {
        "augmented".into()
    }
    pub fn block_mode() -> String {
        "direct".into()
    }
    pub fn fidelity_mode() -> String {
        "probability".into()
    }
    pub fn histogram_bins() -> usize {
        20
    }
    pub fn out_dir() -> String {
        "results".into()
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config: {e}"))
    }

    /// Map onto an ensemble configuration, reporting every violated field.
    pub fn to_ensemble(&self) -> Result<EnsembleConfig, String> {
        let mut problems = Vec::new();

        let mut protocols = Vec::new();
        for label in &self.protocols {
            match ProtocolKind::from_label(label) {
                Some(kind) => protocols.push(kind),
                None => problems.push(format!(
                    "protocols: unknown protocol `{label}` (expected a, b, or c)"
                )),
            }
        }
        let objective = parse_objective(&self.objective).unwrap_or_else(|| {
            problems.push(format!(
                "objective: unknown value `{}` (expected minimize_e or maximize_f)",
                self.objective
            ));
            Default::default()
        });
        let ancilla_mode = match self.ancilla_mode.as_str() {
            "augmented" => AncillaMode::Augmented,
            "bare" => AncillaMode::Bare,
            other => {
                problems.push(format!(
                    "ancilla_mode: unknown value `{other}` (expected augmented or bare)"
                ));
                AncillaMode::Augmented
            }
        };
        let block_mode = match self.block_mode.as_str() {
            "direct" => ConstraintBlockMode::DirectDiagonal,
            "decomposed" => ConstraintBlockMode::Decomposed,
            other => {
                problems.push(format!(
                    "block_mode: unknown value `{other}` (expected direct or decomposed)"
                ));
                ConstraintBlockMode::DirectDiagonal
            }
        };
        let fidelity_mode = match self.fidelity_mode.as_str() {
            "probability" => FidelityMode::Probability,
            "amplitude" => FidelityMode::Amplitude,
            other => {
                problems.push(format!(
                    "fidelity_mode: unknown value `{other}` (expected probability or amplitude)"
                ));
                FidelityMode::Probability
            }
        };

        let mut config = EnsembleConfig::new(self.n_logical);
        config.m_values = self.m_values.clone();
        config.protocols = protocols;
        config.n_instances = self.instances;
        config.mc.steps = self.steps;
        config.mc.delta_max = self.delta_max;
        config.mc.objective = objective;
        config.mc.c_update_period = self.c_update_period;
        config.mc.seed = self.seed;
        config.mc.angles_init = self.angles_init;
        config.mc.c_init = self.c_init;
        config.c_ref = self.c_ref;
        config.ancilla_mode = ancilla_mode;
        config.block_mode = block_mode;
        config.fidelity_mode = fidelity_mode;
        config.instance_seed = self.instance_seed;
        config.histogram_bins = self.histogram_bins;

        if let Err(e) = config.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(config)
        } else {
            Err(problems.join("; "))
        }
    }
}
