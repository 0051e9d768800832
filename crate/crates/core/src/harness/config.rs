use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{
    distance_for_fspl, ClusterLayout, LinkBudget, RicianParams, SatelliteGeometry,
    TemperaturePolicy,
};
use crate::detectors::{ClusterPartition, IterativeConfig, Method};
use crate::error::{Error, Result};
use crate::metrics::Constellation;

/// Cluster placement: a ring of equally spaced discs, or explicit centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub clusters: usize,
    pub users_per_cluster: usize,
    pub cluster_radius_m: f64,
    /// Ring radius around the sub-satellite point; ignored with explicit centres.
    #[serde(default)]
    pub ring_radius_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_centers: Option<Vec<[f64; 2]>>,
}

impl LayoutConfig {
    pub fn num_users(&self) -> usize {
        self.clusters * self.users_per_cluster
    }

    pub fn to_layout(&self, nadir: [f64; 2]) -> Result<ClusterLayout> {
        let layout = match &self.cluster_centers {
            Some(centers) => {
                if centers.len() != self.clusters {
                    return Err(Error::Config(format!(
                        "{} explicit cluster centres for {} clusters",
                        centers.len(),
                        self.clusters
                    )));
                }
                ClusterLayout {
                    cluster_centers: centers.clone(),
                    cluster_radius_m: self.cluster_radius_m,
                    users_per_cluster: vec![self.users_per_cluster; self.clusters],
                }
            }
            None => ClusterLayout::ring(
                self.clusters,
                self.ring_radius_m,
                nadir,
                self.cluster_radius_m,
                self.users_per_cluster,
            ),
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn partition(&self) -> Result<ClusterPartition> {
        ClusterPartition::new(vec![self.users_per_cluster; self.clusters])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    /// QAM order: 4, 16 or 64.
    pub modulation_order: usize,
    /// Splittings run both conventionally and on the preconditioned system.
    pub methods: Vec<Method>,
    /// Iteration budget `T`.
    pub max_iters: usize,
    #[serde(default = "unit_omega")]
    pub omega: f64,
    /// Operating SNR in dB; the link-budget SNR is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// SNR points of the imperfect-CSI sweep.
    pub snr_sweep_db: Vec<f64>,
    /// CSI error NMSE in dB (sign ignored); perfect CSI when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmse_db: Option<f64>,
    /// Iteration counts reported for the proposed GS in the SNR sweep.
    pub sweep_proposed_iters: Vec<usize>,
    /// Iteration counts reported for conventional GS in the SNR sweep.
    pub sweep_conventional_iters: Vec<usize>,
}

fn unit_omega() -> f64 {
    1.0
}

impl DetectionConfig {
    pub fn iterative(&self, method: Method, max_iters: usize) -> IterativeConfig {
        IterativeConfig {
            omega: self.omega,
            ..IterativeConfig::new(method, max_iters)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; all cores when absent. Results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub geometry: SatelliteGeometry,
    pub layout: LayoutConfig,
    pub budget: LinkBudget,
    #[serde(default)]
    pub rician: RicianParams,
    pub detection: DetectionConfig,
    pub monte_carlo: MonteCarloConfig,
    pub output_dir: PathBuf,
}

/// Names accepted by [`ScenarioConfig::preset`].
pub const PRESETS: [&str; 2] = ["scenario1", "scenario2"];

/// Path loss at the reference slant range of the budget.
pub const REFERENCE_FSPL_DB: f64 = 153.55;

impl ScenarioConfig {
    /// Built-in scenarios: 16 users in 4 clusters, or 64 users in 8.
    pub fn preset(name: &str) -> Result<Self> {
        let (clusters, users) = match name {
            "scenario1" => (4, 4),
            "scenario2" => (8, 8),
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}' (available: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        let geometry = SatelliteGeometry {
            altitude_m: 550e3,
            carrier_hz: 2.0e9,
            upa_rows: 48,
            upa_cols: 48,
            element_spacing_wavelengths: 0.5,
            nadir_m: [0.0, 0.0],
        };
        let budget = LinkBudget {
            tx_power_dbm: 26.0,
            tx_antenna_gain_dbi: 0.0,
            bandwidth_hz: 2.0e6,
            ambient_temp_k: 260.0,
            antenna_temp_k: 150.0,
            temperature_policy: TemperaturePolicy::Sum,
            element_gain_dbi: 3.0,
            array_elements: geometry.num_elements(),
            g_over_t_dbk: Some(14.96),
            misc_losses_db: 3.0,
            link_distance_m: distance_for_fspl(REFERENCE_FSPL_DB, geometry.carrier_hz),
        };
        Ok(ScenarioConfig {
            name: name.to_string(),
            geometry,
            layout: LayoutConfig {
                clusters,
                users_per_cluster: users,
                cluster_radius_m: 500.0,
                ring_radius_m: 100e3,
                cluster_centers: None,
            },
            budget,
            rician: RicianParams::default(),
            detection: DetectionConfig {
                modulation_order: 4,
                methods: vec![Method::Ri, Method::Gs, Method::Ssor],
                max_iters: 100,
                omega: 1.0,
                snr_db: Some(19.0),
                snr_sweep_db: vec![10.0, 12.0, 14.0, 16.0, 18.0, 20.0],
                nmse_db: Some(-10.0),
                sweep_proposed_iters: vec![2, 3],
                sweep_conventional_iters: vec![3, 18],
            },
            monte_carlo: MonteCarloConfig {
                trials: 2000,
                seed: 20_240_601,
                threads: None,
            },
            output_dir: PathBuf::from(format!("results/{name}")),
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn num_users(&self) -> usize {
        self.layout.num_users()
    }

    pub fn cluster_layout(&self) -> Result<ClusterLayout> {
        self.layout.to_layout(self.geometry.nadir_m)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::qam(self.detection.modulation_order)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.cluster_layout()?;
        self.budget.validate()?;
        self.rician.validate()?;
        self.constellation()?;
        if self.budget.array_elements != self.geometry.num_elements() {
            return Err(Error::Config(format!(
                "budget.array_elements = {} but the array has {} elements",
                self.budget.array_elements,
                self.geometry.num_elements()
            )));
        }
        let det = &self.detection;
        if det.methods.is_empty() {
            return Err(Error::Config("detection.methods is empty".into()));
        }
        for &m in &det.methods {
            det.iterative(m, det.max_iters).validate()?;
        }
        if det.snr_db.is_some_and(|s| !s.is_finite()) {
            return Err(Error::Config("detection.snr_db must be finite".into()));
        }
        if det.snr_sweep_db.is_empty() || det.snr_sweep_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config(
                "detection.snr_sweep_db must be a nonempty list of finite values".into(),
            ));
        }
        if det.nmse_db.is_some_and(|s| !s.is_finite()) {
            return Err(Error::Config("detection.nmse_db must be finite".into()));
        }
        if det.sweep_proposed_iters.contains(&0) || det.sweep_conventional_iters.contains(&0) {
            return Err(Error::Config(
                "sweep iteration counts must be at least 1".into(),
            ));
        }
        if self.monte_carlo.trials == 0 {
            return Err(Error::Config(
                "monte_carlo.trials must be at least 1".into(),
            ));
        }
        if self.monte_carlo.threads == Some(0) {
            return Err(Error::Config(
                "monte_carlo.threads must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
