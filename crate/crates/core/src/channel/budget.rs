use serde::{Deserialize, Serialize};

use super::geometry::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// How ambient and antenna temperatures combine into a system temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TemperaturePolicy {
    #[default]
    Sum,
    AntennaOnly,
    AmbientOnly,
}

/// Uplink budget for one user terminal.
///
/// The SNR chain is `P_tx + G_tx + G/T − FSPL − L_misc − 10·log10(k·B)`.
/// `G/T` is either given directly or derived from the element gain, array
/// size and system temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    #[serde(default)]
    pub tx_antenna_gain_dbi: f64,
    pub bandwidth_hz: f64,
    pub ambient_temp_k: f64,
    pub antenna_temp_k: f64,
    #[serde(default)]
    pub temperature_policy: TemperaturePolicy,
    pub element_gain_dbi: f64,
    /// Receive array size used when `g_over_t_dbk` is derived.
    pub array_elements: usize,
    /// Receiver figure of merit; derived when absent.
    #[serde(default)]
    pub g_over_t_dbk: Option<f64>,
    /// Polarization mismatch and other fixed losses.
    #[serde(default)]
    pub misc_losses_db: f64,
    /// Slant range used for the reference path loss.
    pub link_distance_m: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth_hz must be positive".into()));
        }
        if !(self.ambient_temp_k > 0.0) || !(self.antenna_temp_k > 0.0) {
            return Err(Error::Config("temperatures must be positive".into()));
        }
        if self.array_elements == 0 {
            return Err(Error::Config("array_elements must be positive".into()));
        }
        if !(self.link_distance_m > 0.0) {
            return Err(Error::Config("link_distance_m must be positive".into()));
        }
        let finite = [
            self.tx_power_dbm,
            self.tx_antenna_gain_dbi,
            self.element_gain_dbi,
            self.misc_losses_db,
            self.g_over_t_dbk.unwrap_or(0.0),
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("link budget terms must be finite".into()));
        }
        Ok(())
    }

    pub fn system_temperature_k(&self) -> f64 {
        match self.temperature_policy {
            TemperaturePolicy::Sum => self.ambient_temp_k + self.antenna_temp_k,
            TemperaturePolicy::AntennaOnly => self.antenna_temp_k,
            TemperaturePolicy::AmbientOnly => self.ambient_temp_k,
        }
    }

    /// Receive gain of the whole array: element gain plus `10·log10(M)`.
    pub fn array_gain_dbi(&self) -> f64 {
        self.element_gain_dbi + 10.0 * (self.array_elements as f64).log10()
    }

    pub fn g_over_t(&self) -> f64 {
        self.g_over_t_dbk
            .unwrap_or_else(|| self.array_gain_dbi() - 10.0 * self.system_temperature_k().log10())
    }
}

/// Free-space path loss `20·log10(4π·d·f/c)` in dB.
pub fn fspl_db(distance_m: f64, carrier_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m * carrier_hz / SPEED_OF_LIGHT).log10()
}

/// Distance at which the free-space path loss equals `loss_db`.
pub fn distance_for_fspl(loss_db: f64, carrier_hz: f64) -> f64 {
    10f64.powf(loss_db / 20.0) * SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * carrier_hz)
}

/// Post-combining SNR `ρ` in dB for a given path loss.
pub fn link_snr_db(budget: &LinkBudget, fspl_db: f64) -> f64 {
    budget.tx_power_dbm - 30.0 + budget.tx_antenna_gain_dbi + budget.g_over_t()
        - fspl_db
        - budget.misc_losses_db
        - 10.0 * BOLTZMANN.log10()
        - 10.0 * budget.bandwidth_hz.log10()
}

/// Linear `ρ`.
pub fn link_snr(budget: &LinkBudget, fspl_db: f64) -> f64 {
    db_to_linear(link_snr_db(budget, fspl_db))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The satellite uplink numbers: 2 GHz, 2 MHz, G/T 14.96 dB/K, 3 dB polarization loss.
    fn reference_budget(tx_power_dbm: f64) -> LinkBudget {
        LinkBudget {
            tx_power_dbm,
            tx_antenna_gain_dbi: 0.0,
            bandwidth_hz: 2.0e6,
            ambient_temp_k: 260.0,
            antenna_temp_k: 150.0,
            temperature_policy: TemperaturePolicy::Sum,
            element_gain_dbi: 3.0,
            array_elements: 2304,
            g_over_t_dbk: Some(14.96),
            misc_losses_db: 3.0,
            link_distance_m: distance_for_fspl(153.55, 2.0e9),
        }
    }

    #[test]
    fn fspl_zero_crossing() {
        let f = 2.0e9;
        let d = SPEED_OF_LIGHT / f / (4.0 * std::f64::consts::PI);
        assert!(fspl_db(d, f).abs() < 1e-12);
    }

    #[test]
    fn fspl_at_nadir_and_slant() {
        assert!((fspl_db(550e3, 2.0e9) - 153.27).abs() < 0.01);
        let d = distance_for_fspl(153.55, 2.0e9);
        assert!((d - 568e3).abs() < 1e3, "slant range {d}");
        assert!((fspl_db(d, 2.0e9) - 153.55).abs() < 1e-9);
    }

    #[test]
    fn chain_arithmetic() {
        // G/T = 0 dB/K and k·B = −30 dBm with T = 1 K.
        let mut b = reference_budget(0.0);
        b.g_over_t_dbk = Some(0.0);
        b.misc_losses_db = 0.0;
        b.bandwidth_hz = 1e-3 / 1e3 / BOLTZMANN;
        let rho = link_snr(&b, 0.0);
        assert!((rho - 1000.0).abs() < 1e-6, "rho = {rho}");
    }

    #[test]
    fn reference_budget_spans_ten_to_twenty_db() {
        let hi = reference_budget(26.0);
        let lo = reference_budget(16.0);
        let fspl = fspl_db(hi.link_distance_m, 2.0e9);
        assert!((link_snr_db(&hi, fspl) - 20.0).abs() < 0.5);
        assert!((link_snr_db(&lo, fspl) - 10.0).abs() < 0.5);
    }

    #[test]
    fn derived_g_over_t() {
        let mut b = reference_budget(20.0);
        b.g_over_t_dbk = None;
        let want = 3.0 + 10.0 * 2304f64.log10() - 10.0 * 410f64.log10();
        assert!((b.g_over_t() - want).abs() < 1e-12);
        b.temperature_policy = TemperaturePolicy::AntennaOnly;
        assert!((b.system_temperature_k() - 150.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut b = reference_budget(20.0);
        b.validate().unwrap();
        b.bandwidth_hz = 0.0;
        assert!(b.validate().is_err());
    }
}
