//! Clustered-user satellite MIMO channels.
//!
//! Column `n` of `H` is
//! `√P_n · (√(K_n/(K_n+1)) · a_n/√M + √(1/(K_n+1)) · g_n)`, where `a_n` is the
//! unit-modulus LOS phase vector ([`los_vector`]), `g_n ~ CN(0, I/M)` is the
//! scattered part, `K_n` is log-normal and `P_n` is the large-scale gain
//! relative to the link-budget reference range. Both components carry unit
//! expected energy, so `E‖h_n‖² = P_n` for every `K_n`, and `ρ` is the
//! post-combining SNR from the link budget.

mod budget;
mod export;
mod geometry;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use budget::{
    db_to_linear, distance_for_fspl, fspl_db, linear_to_db, link_snr, link_snr_db, LinkBudget,
    TemperaturePolicy, BOLTZMANN,
};
pub use export::{matrix_from_json, matrix_to_json, read_matrix_binary, write_matrix_binary};
pub use geometry::{
    distance, element_positions, los_vector, place_users, ClusterLayout, Point3, SatelliteGeometry,
    SPEED_OF_LIGHT,
};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::rng::{complex_gaussian, rng_for, stream};

/// Log-normal Rician K-factor distribution: `10·log10(K) ~ N(mean, std²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianParams {
    pub k_mean_db: f64,
    pub k_std_db: f64,
}

impl Default for RicianParams {
    fn default() -> Self {
        RicianParams {
            k_mean_db: 10.0,
            k_std_db: 2.0,
        }
    }
}

impl RicianParams {
    pub fn validate(&self) -> Result<()> {
        if !self.k_mean_db.is_finite() || !(self.k_std_db >= 0.0) {
            return Err(Error::Config("K-factor parameters invalid".into()));
        }
        Ok(())
    }
}

/// One draw of the uplink channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// `M × N` channel, users grouped by cluster.
    pub h: CMatrix,
    /// `P_n`, linear.
    pub large_scale_gain: Vec<f64>,
    /// `K_n`, linear.
    pub k_factor: Vec<f64>,
    pub user_positions: Vec<Point3>,
    /// Linear SNR `ρ = σ_x²/σ_v²`.
    pub rho: f64,
    /// Users per cluster, in column order.
    pub cluster_sizes: Vec<usize>,
}

impl ChannelRealization {
    pub fn num_antennas(&self) -> usize {
        self.h.rows()
    }

    pub fn num_users(&self) -> usize {
        self.h.cols()
    }

    /// Same channel at a different operating SNR.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.rho = db_to_linear(snr_db);
        self
    }

    pub fn noise_variance(&self) -> f64 {
        1.0 / self.rho
    }
}

/// Draws a channel realization; deterministic in `seed`.
pub fn rician_channel(
    geom: &SatelliteGeometry,
    layout: &ClusterLayout,
    budget: &LinkBudget,
    rician: &RicianParams,
    seed: u64,
) -> Result<ChannelRealization> {
    geom.validate()?;
    layout.validate()?;
    budget.validate()?;
    rician.validate()?;

    let users = place_users(layout, seed);
    let elements = element_positions(geom);
    let m = elements.len();
    let n = users.len();
    let center = geom.array_center();

    let mut k_rng = rng_for(seed, stream::K_FACTOR);
    let k_factor: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = k_rng.sample(StandardNormal);
            db_to_linear(rician.k_mean_db + rician.k_std_db * z)
        })
        .collect();
    let large_scale_gain: Vec<f64> = users
        .iter()
        .map(|u| (budget.link_distance_m / distance(u, &center)).powi(2))
        .collect();

    let mut nlos_rng = rng_for(seed, stream::NLOS);
    let mut data = vec![C64::new(0.0, 0.0); m * n];
    let inv_sqrt_m = 1.0 / (m as f64).sqrt();
    for (col, user) in users.iter().enumerate() {
        let k = k_factor[col];
        let amp = large_scale_gain[col].sqrt();
        let (w_los, w_nlos) = if k.is_infinite() {
            (1.0, 0.0)
        } else {
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        };
        let los = los_vector(user, &elements, geom.carrier_hz);
        for (row, a) in los.iter().enumerate() {
            let g = complex_gaussian(&mut nlos_rng, 1.0 / m as f64);
            data[row * n + col] = amp * (w_los * inv_sqrt_m * a + w_nlos * g);
        }
    }

    let rho = link_snr(budget, fspl_db(budget.link_distance_m, geom.carrier_hz));
    Ok(ChannelRealization {
        h: CMatrix::new(m, n, data)?,
        large_scale_gain,
        k_factor,
        user_positions: users,
        rho,
        cluster_sizes: layout.users_per_cluster.clone(),
    })
}

/// Imperfect CSI: `H_est = H + E` with i.i.d. `CN(0, σ_e²)` entries and
/// `σ_e² = 10^(−|nmse_db|/10)·‖H‖_F²/(MN)`.
///
/// The sign of `nmse_db` is ignored; an NMSE of "10 dB" means 0.1 linear.
pub fn corrupt_csi(
    chan: &ChannelRealization,
    nmse_db: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    if !nmse_db.is_finite() {
        return Err(Error::invalid("nmse_db must be finite"));
    }
    let (m, n) = (chan.h.rows(), chan.h.cols());
    let nmse = db_to_linear(-nmse_db.abs());
    let variance = nmse * chan.h.frobenius_norm_sqr() / (m * n) as f64;
    let mut rng = rng_for(seed, stream::CSI_ERROR);
    let data = chan
        .h
        .as_slice()
        .iter()
        .map(|h| h + complex_gaussian(&mut rng, variance))
        .collect();
    Ok(ChannelRealization {
        h: CMatrix::new(m, n, data)?,
        ..chan.clone()
    })
}
