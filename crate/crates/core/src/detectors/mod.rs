//! LMMSE detection, conventional splitting iterations and the cluster-aware
//! two-stage detector.
//!
//! Stage 1 ([`stage1_block_invert`]) inverts the per-cluster diagonal blocks
//! `Φ_c = H_cᴴH_c + ρ⁻¹I` of the Gram matrix, giving the per-cluster LMMSE
//! estimate `x̃ = Φ⁻¹b` and the transformed matrix `Ψ = Φ⁻¹A`. Stage 2
//! ([`iterate_preconditioned`]) solves `Ψ·x̂ = x̃` from `x̃` with the usual
//! RI/GS/SSOR updates. Both systems share the LMMSE solution.

mod gram;
mod iterate;
mod ledger;
mod partition;
mod stage1;

pub use gram::{build_gram, build_gram_with, lmmse_direct, ChannelGram, GramSystem};
pub use iterate::{
    iterate_conventional, iterate_preconditioned, IterativeConfig, Method, Trajectory,
    DIVERGENCE_LIMIT,
};
pub use ledger::FlopLedger;
pub use partition::{ClusterPartition, Permutation};
pub use stage1::{stage1_block_invert, PreconditionedSystem};

use crate::error::{Error, Result};
use crate::linalg::{norm, CMatrix, CVector, C64};

/// A square system `M·x = r` that can be iterated and checked.
pub trait LinearSystem {
    fn matrix(&self) -> &CMatrix;
    fn rhs(&self) -> &CVector;
}

/// Relative residual `‖M·x − r‖ / ‖r‖` (absolute when `r = 0`).
pub fn residual<S: LinearSystem + ?Sized>(sys: &S, x: &[C64]) -> Result<f64> {
    let m = sys.matrix();
    if x.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            context: "residual",
            expected: m.cols(),
            found: x.len(),
        });
    }
    let mx = m.mul_vec(x)?;
    let diff: Vec<C64> = mx
        .iter()
        .zip(sys.rhs().iter())
        .map(|(a, b)| a - b)
        .collect();
    let rn = sys.rhs().norm();
    let dn = norm(&diff);
    Ok(if rn > 0.0 { dn / rn } else { dn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelRealization;
    use crate::linalg::{CMatrix, HermitianView};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn realization(h: CMatrix, rho: f64, sizes: Vec<usize>) -> ChannelRealization {
        let n = h.cols();
        ChannelRealization {
            h,
            large_scale_gain: vec![1.0; n],
            k_factor: vec![1.0; n],
            user_positions: vec![[0.0; 3]; n],
            rho,
            cluster_sizes: sizes,
        }
    }

    #[test]
    fn gram_of_identity_channel() {
        let chan = realization(CMatrix::identity(2), 1.0, vec![2]);
        let y = CVector::from_real(&[1.0, 2.0]).unwrap();
        let mut ledger = FlopLedger::new();
        let sys = build_gram(&chan, &y, &mut ledger).unwrap();
        assert_eq!(sys.a().matrix(), &CMatrix::identity(2).scale(2.0));
        assert_eq!(sys.b(), &y);
        assert_eq!(ledger.gram_build, 2 * 4 + 2 * 2);
    }

    #[test]
    fn gram_rejects_wrong_receive_length() {
        let chan = realization(CMatrix::identity(2), 1.0, vec![2]);
        let y = CVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            build_gram(&chan, &y, &mut FlopLedger::new()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lmmse_on_scaled_identity() {
        let a = HermitianView::new(CMatrix::identity(2).scale(2.0)).unwrap();
        let sys = GramSystem::from_parts(a, CVector::from_real(&[2.0, 4.0]).unwrap(), 1.0).unwrap();
        let x = lmmse_direct(&sys).unwrap();
        assert!((x[0] - c(1.0)).norm() < 1e-14 && (x[1] - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn lmmse_recovers_symbols_at_high_snr() {
        let s = 1.0 / 2f64.sqrt();
        let h = CMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        let x = CVector::new(vec![C64::new(s, -s), C64::new(-s, -s)]).unwrap();
        let y = h.mul_vec(&x).unwrap();
        let chan = realization(h, 1e12, vec![1, 1]);
        let sys = build_gram(&chan, &y, &mut FlopLedger::new()).unwrap();
        let est = lmmse_direct(&sys).unwrap();
        for (a, b) in est.iter().zip(x.iter()) {
            assert!((a - b).norm() < 1e-5);
        }
    }

    #[test]
    fn residual_of_zero_vector_is_one() {
        let a = HermitianView::new(CMatrix::identity(3).scale(2.0)).unwrap();
        let sys =
            GramSystem::from_parts(a, CVector::from_real(&[1.0, -1.0, 3.0]).unwrap(), 1.0).unwrap();
        assert_eq!(residual(&sys, &CVector::zeros(3)).unwrap(), 1.0);
    }

    #[test]
    fn identity_system_converges_in_one_step() {
        let a = HermitianView::new(CMatrix::identity(3)).unwrap();
        let b = CVector::new(vec![C64::new(1.0, 1.0), C64::new(-2.0, 0.5), c(3.0)]).unwrap();
        let sys = GramSystem::from_parts(a, b.clone(), 1.0).unwrap();
        for method in Method::ALL {
            let cfg = IterativeConfig::new(method, 1);
            let tr = iterate_conventional(&sys, &cfg, &CVector::zeros(3), &mut FlopLedger::new())
                .unwrap();
            assert_eq!(tr.last, b, "{method}");
        }
    }

    #[test]
    fn gauss_seidel_matches_hand_sweeps() {
        // A = [[4, 1], [1, 3]], b = [1, 2], x0 = 0.
        // t=1: x1 = 1/4, x2 = (2 − 1/4)/3 = 7/12
        // t=2: x1 = (1 − 7/12)/4 = 5/48, x2 = (2 − 5/48)/3 = 91/144
        let a = HermitianView::new(CMatrix::from_real_rows(&[&[4.0, 1.0], &[1.0, 3.0]]).unwrap())
            .unwrap();
        let sys = GramSystem::from_parts(a, CVector::from_real(&[1.0, 2.0]).unwrap(), 1.0).unwrap();
        let tr = iterate_conventional(
            &sys,
            &IterativeConfig::new(Method::Gs, 2),
            &CVector::zeros(2),
            &mut FlopLedger::new(),
        )
        .unwrap();
        let want = [[0.25, 7.0 / 12.0], [5.0 / 48.0, 91.0 / 144.0]];
        for (t, w) in want.iter().enumerate() {
            let x = tr.iterate(t + 1).unwrap();
            assert!((x[0] - c(w[0])).norm() < 1e-15 && (x[1] - c(w[1])).norm() < 1e-15);
        }
    }

    #[test]
    fn splitting_singular_is_reported() {
        let mut m = CMatrix::identity(2);
        m.set(1, 1, C64::new(0.0, 0.0));
        let sys = GramSystem::from_parts(
            HermitianView::new(m).unwrap(),
            CVector::from_real(&[1.0, 1.0]).unwrap(),
            1.0,
        )
        .unwrap();
        let err = iterate_conventional(
            &sys,
            &IterativeConfig::new(Method::Gs, 3),
            &CVector::zeros(2),
            &mut FlopLedger::new(),
        );
        assert!(matches!(err, Err(Error::SplittingSingular { index: 1 })));
    }

    #[test]
    fn richardson_divergence_is_flagged_not_fatal() {
        let a = HermitianView::new(CMatrix::identity(2).scale(5.0)).unwrap();
        let sys = GramSystem::from_parts(a, CVector::from_real(&[1.0, 1.0]).unwrap(), 1.0).unwrap();
        let tr = iterate_conventional(
            &sys,
            &IterativeConfig::new(Method::Ri, 500),
            &CVector::zeros(2),
            &mut FlopLedger::new(),
        )
        .unwrap();
        assert!(tr.diverged);
        assert!(tr.iterations < 500);
        assert!(tr.last.is_finite());
        assert_eq!(tr.iterates.len(), tr.iterations);
    }

    #[test]
    fn config_validation() {
        let mut cfg = IterativeConfig::new(Method::Ssor, 0);
        assert!(cfg.validate().is_err());
        cfg.max_iters = 3;
        cfg.omega = 2.0;
        assert!(cfg.validate().is_err());
        assert_eq!("SSOR".parse::<Method>().unwrap(), Method::Ssor);
        assert!("cg".parse::<Method>().is_err());
    }
}
