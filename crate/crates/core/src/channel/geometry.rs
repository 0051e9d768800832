use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::rng::{rng_for, stream};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Point3 = [f64; 3];

/// Satellite position and its uniform planar array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteGeometry {
    pub altitude_m: f64,
    pub carrier_hz: f64,
    pub upa_rows: usize,
    pub upa_cols: usize,
    #[serde(default = "half_wavelength")]
    pub element_spacing_wavelengths: f64,
    /// Ground point below the array centre, local tangent-plane metres.
    #[serde(default)]
    pub nadir_m: [f64; 2],
}

fn half_wavelength() -> f64 {
    0.5
}

impl SatelliteGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m > 0.0) {
            return Err(Error::Config("altitude_m must be positive".into()));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Config("carrier_hz must be positive".into()));
        }
        if self.upa_rows == 0 || self.upa_cols == 0 {
            return Err(Error::Config("UPA must have at least one element".into()));
        }
        if !(self.element_spacing_wavelengths > 0.0) {
            return Err(Error::Config("element spacing must be positive".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Number of antennas `M`.
    pub fn num_elements(&self) -> usize {
        self.upa_rows * self.upa_cols
    }

    pub fn array_center(&self) -> Point3 {
        [self.nadir_m[0], self.nadir_m[1], self.altitude_m]
    }
}

/// Geographic user clusters on the ground plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterLayout {
    pub cluster_centers: Vec<[f64; 2]>,
    pub cluster_radius_m: f64,
    pub users_per_cluster: Vec<usize>,
}

impl ClusterLayout {
    /// `count` clusters evenly spaced on a ring of `ring_radius_m` around `center`.
    pub fn ring(
        count: usize,
        ring_radius_m: f64,
        center: [f64; 2],
        cluster_radius_m: f64,
        users_each: usize,
    ) -> Self {
        let cluster_centers = (0..count)
            .map(|c| {
                let theta = 2.0 * PI * c as f64 / count as f64;
                [
                    center[0] + ring_radius_m * theta.cos(),
                    center[1] + ring_radius_m * theta.sin(),
                ]
            })
            .collect();
        ClusterLayout {
            cluster_centers,
            cluster_radius_m,
            users_per_cluster: vec![users_each; count],
        }
    }

    pub fn num_users(&self) -> usize {
        self.users_per_cluster.iter().sum()
    }

    pub fn num_clusters(&self) -> usize {
        self.cluster_centers.len()
    }

    /// A zero radius is accepted as the degenerate "all users at the centre" case.
    pub fn validate(&self) -> Result<()> {
        if self.cluster_centers.is_empty() {
            return Err(Error::Config("layout needs at least one cluster".into()));
        }
        if self.cluster_centers.len() != self.users_per_cluster.len() {
            return Err(Error::Config(format!(
                "{} cluster centres but {} user counts",
                self.cluster_centers.len(),
                self.users_per_cluster.len()
            )));
        }
        if self.users_per_cluster.contains(&0) {
            return Err(Error::Config(
                "every cluster needs at least one user".into(),
            ));
        }
        if !(self.cluster_radius_m >= 0.0) || !self.cluster_radius_m.is_finite() {
            return Err(Error::Config(
                "cluster_radius_m must be non-negative".into(),
            ));
        }
        for (i, a) in self.cluster_centers.iter().enumerate() {
            for b in &self.cluster_centers[i + 1..] {
                let dist = (a[0] - b[0]).hypot(a[1] - b[1]);
                if dist <= 2.0 * self.cluster_radius_m {
                    return Err(Error::Config(format!(
                        "cluster discs overlap: centres {dist} m apart, radius {} m",
                        self.cluster_radius_m
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draws each user uniformly inside its cluster's disc, at ground level.
/// Users come out grouped by cluster, in layout order.
pub fn place_users(layout: &ClusterLayout, seed: u64) -> Vec<Point3> {
    let mut rng = rng_for(seed, stream::USER_PLACEMENT);
    let mut out = Vec::with_capacity(layout.num_users());
    for (center, &count) in layout.cluster_centers.iter().zip(&layout.users_per_cluster) {
        for _ in 0..count {
            let r = layout.cluster_radius_m * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            out.push([
                center[0] + r * theta.cos(),
                center[1] + r * theta.sin(),
                0.0,
            ]);
        }
    }
    out
}

/// Element positions of the UPA: a grid in the horizontal plane at the
/// satellite altitude, centred above nadir, row-major over (row, col).
pub fn element_positions(geom: &SatelliteGeometry) -> Vec<Point3> {
    let spacing = geom.element_spacing_wavelengths * geom.wavelength();
    let [cx, cy, cz] = geom.array_center();
    let row_off = (geom.upa_rows as f64 - 1.0) / 2.0;
    let col_off = (geom.upa_cols as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(geom.num_elements());
    for r in 0..geom.upa_rows {
        for c in 0..geom.upa_cols {
            out.push([
                cx + (c as f64 - col_off) * spacing,
                cy + (r as f64 - row_off) * spacing,
                cz,
            ]);
        }
    }
    out
}

pub fn distance(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Line-of-sight phase vector: entry `m` is `exp(−j·2π·d_m/λ)`, with `d_m`
/// the exact distance from the user to element `m`.
pub fn los_vector(user: &Point3, elements: &[Point3], carrier_hz: f64) -> CVector {
    let entries = elements
        .iter()
        .map(|e| {
            // Reduce the phase in wavelengths first; 2π·d/λ is ~10⁷ rad at LEO range.
            let cycles = distance(user, e) * carrier_hz / SPEED_OF_LIGHT;
            let frac = cycles - cycles.floor();
            C64::from_polar(1.0, -2.0 * PI * frac)
        })
        .collect();
    CVector::from_vec_unchecked(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(rows: usize, cols: usize) -> SatelliteGeometry {
        SatelliteGeometry {
            altitude_m: 550e3,
            carrier_hz: 2.0e9,
            upa_rows: rows,
            upa_cols: cols,
            element_spacing_wavelengths: 0.5,
            nadir_m: [0.0, 0.0],
        }
    }

    #[test]
    fn zero_radius_puts_everyone_at_centre() {
        let layout = ClusterLayout {
            cluster_centers: vec![[10.0, -5.0]],
            cluster_radius_m: 0.0,
            users_per_cluster: vec![3],
        };
        layout.validate().unwrap();
        for p in place_users(&layout, 9) {
            assert_eq!(p, [10.0, -5.0, 0.0]);
        }
    }

    #[test]
    fn users_stay_inside_their_discs() {
        let layout = ClusterLayout::ring(4, 100e3, [0.0, 0.0], 500.0, 4);
        layout.validate().unwrap();
        let users = place_users(&layout, 42);
        assert_eq!(users.len(), 16);
        for (n, p) in users.iter().enumerate() {
            let c = layout.cluster_centers[n / 4];
            assert!((p[0] - c[0]).hypot(p[1] - c[1]) <= 500.0);
            assert_eq!(p[2], 0.0);
        }
        assert_eq!(users, place_users(&layout, 42));
        assert_ne!(users, place_users(&layout, 43));
    }

    #[test]
    fn layout_validation() {
        let mut layout = ClusterLayout::ring(4, 1000.0, [0.0, 0.0], 800.0, 2);
        assert!(layout.validate().is_err());
        layout.cluster_radius_m = 100.0;
        layout.validate().unwrap();
        layout.users_per_cluster[1] = 0;
        assert!(layout.validate().is_err());
        layout.users_per_cluster.pop();
        assert!(layout.validate().is_err());
    }

    #[test]
    fn single_element_sits_at_altitude() {
        assert_eq!(element_positions(&geom(1, 1)), vec![[0.0, 0.0, 550e3]]);
    }

    #[test]
    fn two_by_two_half_wavelength_square() {
        let g = geom(2, 2);
        assert!((g.wavelength() - 0.149_896_229).abs() < 1e-9);
        let pos = element_positions(&g);
        let side = 0.074_948_114_5;
        assert!((distance(&pos[0], &pos[1]) - side).abs() < 1e-9);
        assert!((distance(&pos[0], &pos[2]) - side).abs() < 1e-9);
        assert!((distance(&pos[0], &pos[3]) - side * 2f64.sqrt()).abs() < 1e-9);
        let mean_x: f64 = pos.iter().map(|p| p[0]).sum::<f64>() / 4.0;
        assert!(mean_x.abs() < 1e-15);
    }

    #[test]
    fn full_upa_has_2304_elements() {
        assert_eq!(element_positions(&geom(48, 48)).len(), 2304);
    }

    #[test]
    fn los_entries_are_unit_modulus() {
        let g = geom(8, 8);
        let elems = element_positions(&g);
        let h = los_vector(&[1234.5, -999.0, 0.0], &elems, g.carrier_hz);
        for z in h.iter() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        let energy: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        assert!((energy - 64.0).abs() < 1e-9);
    }

    #[test]
    fn integer_wavelength_distance_gives_unit_phase() {
        let carrier = 2.0e9;
        let lambda = SPEED_OF_LIGHT / carrier;
        let elem = [0.0, 0.0, 0.0];
        let user = [0.0, 0.0, 1000.0 * lambda];
        let h = los_vector(&user, &[elem], carrier);
        assert!((h[0] - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn coincident_users_are_fully_correlated() {
        let g = geom(4, 4);
        let elems = element_positions(&g);
        let u = [5e3, 7e3, 0.0];
        let a = los_vector(&u, &elems, g.carrier_hz);
        let b = los_vector(&u, &elems, g.carrier_hz);
        let corr = crate::linalg::dot_conj(&a, &b).norm() / 16.0;
        assert!((corr - 1.0).abs() < 1e-12);
    }
}
