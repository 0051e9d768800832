use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Square QAM with unit average energy and Gray bit labels.
///
/// Symbol index `k` sits at in-phase level `k / L` and quadrature level
/// `k % L` (`L = √order`), level `i` having amplitude `(2i − L + 1)·d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    order: usize,
    side: usize,
    /// Half the spacing between adjacent levels.
    step: f64,
    points: Vec<C64>,
    labels: Vec<u32>,
}

fn gray(i: usize) -> u32 {
    (i ^ (i >> 1)) as u32
}

impl Constellation {
    pub fn qam(order: usize) -> Result<Self> {
        let side: usize = match order {
            4 => 2,
            16 => 4,
            64 => 8,
            _ => {
                return Err(Error::Config(format!(
                    "unsupported constellation order {order} (expected 4, 16 or 64)"
                )))
            }
        };
        // Mean energy of square QAM with unit half-spacing is 2(L²−1)/3.
        let step = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();
        let bits = side.trailing_zeros();
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for i in 0..side {
            for q in 0..side {
                points.push(C64::new(level(i, side) * step, level(q, side) * step));
                labels.push((gray(i) << bits) | gray(q));
            }
        }
        Ok(Constellation {
            order,
            side,
            step,
            points,
            labels,
        })
    }

    pub fn qpsk() -> Self {
        Self::qam(4).expect("4-QAM is supported")
    }

    /// The same constellation with every point multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Constellation {
            step: self.step * factor,
            points: self.points.iter().map(|p| p * factor).collect(),
            ..self.clone()
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Gray-coded bit label of each symbol index.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Nearest level on one axis; exact ties go to the lower level.
    #[inline]
    fn slice_axis(&self, v: f64) -> usize {
        let pos = (v / self.step + (self.side as f64 - 1.0)) / 2.0;
        let idx = (pos - 0.5).ceil();
        idx.clamp(0.0, (self.side - 1) as f64) as usize
    }

    /// Index of the nearest point; among equidistant points, the lowest index.
    #[inline]
    pub fn nearest(&self, z: C64) -> usize {
        self.slice_axis(z.re) * self.side + self.slice_axis(z.im)
    }
}

fn level(i: usize, side: usize) -> f64 {
    2.0 * i as f64 - (side as f64 - 1.0)
}

/// Maps symbol indices to constellation points scaled by `sigma_x`.
pub fn modulate(symbols: &[usize], constellation: &Constellation, sigma_x: f64) -> Result<CVector> {
    let points = symbols
        .iter()
        .map(|&s| {
            constellation
                .points
                .get(s)
                .map(|p| p * sigma_x)
                .ok_or(Error::SymbolOutOfRange {
                    index: s,
                    order: constellation.order,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    CVector::new(points)
}

/// Hard decisions: nearest constellation point per entry.
pub fn demodulate(x: &[C64], constellation: &Constellation) -> Vec<usize> {
    x.iter().map(|&z| constellation.nearest(z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_nearest(c: &Constellation, z: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, p) in c.points().iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }

    #[test]
    fn qpsk_points() {
        let c = Constellation::qpsk();
        let s = 1.0 / 2f64.sqrt();
        let x = modulate(&[0, 1, 2, 3], &c, 1.0).unwrap();
        let want = [
            C64::new(-s, -s),
            C64::new(-s, s),
            C64::new(s, -s),
            C64::new(s, s),
        ];
        for (a, b) in x.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        let y = modulate(&[3], &c, 2.0).unwrap();
        assert!((y[0] - C64::new(2.0 * s, 2.0 * s)).norm() < 1e-15);
    }

    #[test]
    fn unit_average_energy_and_distinct() {
        for order in [4, 16, 64] {
            let c = Constellation::qam(order).unwrap();
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
            assert!((e - 1.0).abs() < 1e-12, "order {order}: {e}");
            for (i, a) in c.points().iter().enumerate() {
                for b in &c.points()[i + 1..] {
                    assert!((a - b).norm() > 1e-6);
                }
            }
            let mut labels = c.labels().to_vec();
            labels.sort_unstable();
            labels.dedup();
            assert_eq!(labels.len(), order);
        }
        assert!(Constellation::qam(8).is_err());
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let c = Constellation::qam(16).unwrap();
        for k in 0..16 {
            if k % 4 != 3 {
                assert_eq!((c.labels()[k] ^ c.labels()[k + 1]).count_ones(), 1);
            }
        }
    }

    #[test]
    fn round_trip_and_range() {
        for order in [4, 16, 64] {
            let c = Constellation::qam(order).unwrap();
            let s: Vec<usize> = (0..order).collect();
            assert_eq!(demodulate(&modulate(&s, &c, 1.0).unwrap(), &c), s);
        }
        assert!(matches!(
            modulate(&[4], &Constellation::qpsk(), 1.0),
            Err(Error::SymbolOutOfRange { index: 4, order: 4 })
        ));
    }

    #[test]
    fn midpoint_tie_goes_to_lower_index() {
        let c = Constellation::qpsk();
        let p = c.points();
        let mid = (p[1] + p[3]) / 2.0;
        assert_eq!(c.nearest(mid), 1);
        assert_eq!(c.nearest(C64::new(0.0, 0.0)), 0);
    }

    #[test]
    fn slicer_matches_brute_force() {
        let mut rng = crate::rng::rng_for(3, 0);
        for order in [4, 16, 64] {
            let c = Constellation::qam(order).unwrap();
            for _ in 0..5000 {
                let z = crate::rng::complex_gaussian(&mut rng, 2.0);
                assert_eq!(c.nearest(z), brute_force_nearest(&c, z));
            }
        }
    }
}
