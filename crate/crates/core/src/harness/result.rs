use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detectors::{FlopLedger, Method};
use crate::error::{Error, Result};
use crate::metrics::{binomial_stderr, CdfSeries, CorrelationSummary, Heatmap, SerCurve};

use super::config::ScenarioConfig;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    /// Gram-matrix correlation heatmap of one realization.
    Study1,
    /// Condition numbers of `A` and `Ψ` over many realizations.
    Study2,
    /// SER against iteration index at a fixed SNR.
    Study3,
    /// SER against SNR with imperfect CSI.
    Study4,
}

impl Study {
    pub const ALL: [Study; 4] = [Study::Study1, Study::Study2, Study::Study3, Study::Study4];

    pub fn name(self) -> &'static str {
        match self {
            Study::Study1 => "study1",
            Study::Study2 => "study2",
            Study::Study3 => "study3",
            Study::Study4 => "study4",
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Study::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown study '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapPayload {
    pub snr_db: f64,
    pub heatmap: Heatmap,
    pub summary: CorrelationSummary,
    /// Mean intra-cluster minus mean inter-cluster level; absent with one
    /// cluster or singleton clusters.
    pub gap_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningPayload {
    pub snr_db: f64,
    pub kappa_a: CdfSeries,
    pub kappa_psi: CdfSeries,
    pub median_kappa_a: f64,
    pub median_kappa_psi: f64,
    /// `median κ(A) / median κ(Ψ)`.
    pub ratio_of_medians: f64,
    /// Median over realizations of `κ(A)/κ(Ψ)`.
    pub median_ratio: f64,
    pub median_delta_norm: f64,
    /// Realizations with `‖Φ⁻¹Δ‖ < 1`.
    pub bound_informative: usize,
    /// Informative realizations where `κ(Ψ)` respected the bound.
    pub bound_holds: usize,
}

/// How often one detector variant failed to settle within `T` iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFailures {
    pub method: String,
    pub trials: usize,
    /// Truncated on divergence.
    pub diverged: usize,
    /// Diverged, or final relative residual above the convergence threshold.
    pub not_converged: usize,
}

impl ConvergenceFailures {
    pub fn failure_fraction(&self) -> f64 {
        self.not_converged as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationsToReference {
    pub method: String,
    /// First iteration within two standard errors of the LMMSE SER.
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePayload {
    pub snr_db: f64,
    /// One curve per detector variant over `t = 0..=T`, plus the flat
    /// `lmmse` reference.
    pub curves: Vec<SerCurve>,
    pub iterations_to_lmmse: Vec<IterationsToReference>,
    pub failures: Vec<ConvergenceFailures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessPayload {
    pub nmse_db: Option<f64>,
    /// SER against SNR: `lmmse` plus GS variants at fixed iteration counts.
    pub curves: Vec<SerCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Heatmap(HeatmapPayload),
    Conditioning(ConditioningPayload),
    Convergence(ConvergencePayload),
    Robustness(RobustnessPayload),
}

/// Output of one study run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: String,
    pub software_version: String,
    pub study: Study,
    /// Fully resolved configuration; rerunning it reproduces the payload.
    pub config: ScenarioConfig,
    pub trials: usize,
    pub failed_trials: Vec<TrialFailure>,
    /// Multiply-add totals summed over all trials.
    pub ledger: FlopLedger,
    pub wall_time_s: f64,
    pub payload: Payload,
}

impl ExperimentResult {
    /// Looks up a SER curve by name in a convergence or robustness payload.
    pub fn curve(&self, name: &str) -> Option<&SerCurve> {
        let curves = match &self.payload {
            Payload::Convergence(p) => &p.curves,
            Payload::Robustness(p) => &p.curves,
            _ => return None,
        };
        curves.iter().find(|c| c.method == name)
    }

    /// The payload with run-dependent metadata (wall time) stripped, for
    /// reproducibility comparisons.
    pub fn numeric_payload(&self) -> (&Payload, &FlopLedger, usize) {
        (&self.payload, &self.ledger, self.trials)
    }
}

/// Curve name for a splitting run conventionally or on the preconditioned system.
pub fn variant_name(method: Method, proposed: bool) -> String {
    format!(
        "{method}_{}",
        if proposed { "proposed" } else { "conventional" }
    )
}

/// Whether `p` lies within two binomial standard errors of `reference`.
///
/// The error is evaluated at the larger of the two rates so that a
/// reference of exactly zero still gets a nonzero tolerance when the other
/// rate is not zero.
pub fn within_two_stderr(p: f64, reference: f64, symbols: u64) -> bool {
    (p - reference).abs() <= 2.0 * binomial_stderr(p.max(reference), symbols)
}

/// First index where `curve` comes within two standard errors of `reference`.
pub fn iterations_to_reference(curve: &SerCurve, reference: f64) -> Option<usize> {
    curve
        .ser
        .iter()
        .position(|&p| within_two_stderr(p, reference, curve.symbols))
}
