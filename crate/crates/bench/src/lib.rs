//! Fixtures shared by the benchmarks.

use clusterdet::channel::{rician_channel, ChannelRealization};
use clusterdet::detectors::{build_gram, ClusterPartition, FlopLedger, GramSystem};
use clusterdet::harness::{draw_symbols, draw_unit_noise, ScenarioConfig};
use clusterdet::metrics::Constellation;
use clusterdet::CVector;

/// One realization of a preset scenario at its operating SNR, with a
/// received vector and the Gram system built from it.
pub struct Fixture {
    pub chan: ChannelRealization,
    pub y: CVector,
    pub sys: GramSystem,
    pub partition: ClusterPartition,
}

pub fn fixture(preset: &str, seed: u64) -> Fixture {
    let cfg = ScenarioConfig::preset(preset).expect("known preset");
    let layout = cfg.cluster_layout().unwrap();
    let mut chan = rician_channel(&cfg.geometry, &layout, &cfg.budget, &cfg.rician, seed).unwrap();
    if let Some(snr) = cfg.detection.snr_db {
        chan = chan.with_snr_db(snr);
    }
    let (_, x) = draw_symbols(&Constellation::qpsk(), cfg.num_users(), seed).unwrap();
    let noise = draw_unit_noise(chan.num_antennas(), 1, seed).remove(0);
    let s = chan.noise_variance().sqrt();
    let hx = chan.h.mul_vec(&x).unwrap();
    let y = CVector::new(hx.iter().zip(&noise).map(|(a, v)| a + v * s).collect()).unwrap();
    let sys = build_gram(&chan, &y, &mut FlopLedger::new()).unwrap();
    Fixture {
        chan,
        y,
        sys,
        partition: cfg.layout.partition().unwrap(),
    }
}
