use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, inverse_from_cholesky, spectral_norm, CMatrix, CVector, HermitianView, C64, ZERO,
};

use super::gram::GramSystem;
use super::ledger::FlopLedger;
use super::partition::ClusterPartition;
use super::LinearSystem;

/// Output of Stage 1: the inverted diagonal blocks of `Φ`, the transformed
/// system `Ψ·x̂ = x̃` with `Ψ = Φ⁻¹A`, and `‖Φ⁻¹Δ‖`.
#[derive(Debug, Clone)]
pub struct PreconditionedSystem {
    partition: ClusterPartition,
    phi_inv_blocks: Vec<CMatrix>,
    phi_chol_blocks: Vec<CMatrix>,
    psi: CMatrix,
    x_tilde: CVector,
    delta_norm: f64,
    a: HermitianView,
}

impl PreconditionedSystem {
    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn phi_inv_blocks(&self) -> &[CMatrix] {
        &self.phi_inv_blocks
    }

    /// Lower Cholesky factors `L_c` with `Φ_c = L_c·L_cᴴ`.
    pub fn phi_chol_blocks(&self) -> &[CMatrix] {
        &self.phi_chol_blocks
    }

    pub fn psi(&self) -> &CMatrix {
        &self.psi
    }

    /// Stage-1 estimate: per-cluster LMMSE ignoring other clusters.
    pub fn x_tilde(&self) -> &CVector {
        &self.x_tilde
    }

    /// `‖Φ⁻¹Δ‖`, the spectral norm of `Ψ` with its diagonal blocks removed.
    pub fn delta_norm(&self) -> f64 {
        self.delta_norm
    }

    /// The original Gram matrix `A`.
    pub fn a(&self) -> &HermitianView {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.psi.rows()
    }
}

impl LinearSystem for PreconditionedSystem {
    fn matrix(&self) -> &CMatrix {
        &self.psi
    }

    fn rhs(&self) -> &CVector {
        &self.x_tilde
    }
}

/// Inverts every cluster's diagonal block of `A` independently and forms
/// `x̃ = Φ⁻¹b` and `Ψ = Φ⁻¹A` block-row by block-row.
pub fn stage1_block_invert(
    sys: &GramSystem,
    part: &ClusterPartition,
    ledger: &mut FlopLedger,
) -> Result<PreconditionedSystem> {
    let n = sys.dim();
    if part.total() != n {
        return Err(Error::DimensionMismatch {
            context: "stage1_block_invert (partition)",
            expected: n,
            found: part.total(),
        });
    }
    let a = sys.a();
    let b = sys.b();
    let ranges = part.ranges();

    // Each block row is independent; results are collected in cluster order.
    let rows: Vec<(CMatrix, CMatrix, Vec<C64>, Vec<C64>)> = ranges
        .par_iter()
        .map(|r| -> Result<_> {
            let nc = r.len();
            let phi = HermitianView::new(a.block(r.start, r.start, nc, nc))?;
            let l = cholesky(&phi).map_err(|e| match e {
                Error::NotPositiveDefinite { pivot } => Error::NotPositiveDefinite {
                    pivot: r.start + pivot,
                },
                other => other,
            })?;
            let inv = inverse_from_cholesky(&l)?;
            let x_c = inv.mul_vec(&b[r.clone()])?.into_inner();
            let mut psi_rows = vec![ZERO; nc * n];
            for i in 0..nc {
                let out = &mut psi_rows[i * n..(i + 1) * n];
                for (k, &w) in inv.row(i).iter().enumerate() {
                    for (o, &v) in out.iter_mut().zip(a.row(r.start + k)) {
                        *o += w * v;
                    }
                }
            }
            Ok((inv, l, x_c, psi_rows))
        })
        .collect::<Result<_>>()?;

    let mut phi_inv_blocks = Vec::with_capacity(rows.len());
    let mut phi_chol_blocks = Vec::with_capacity(rows.len());
    let mut x_tilde = Vec::with_capacity(n);
    let mut psi_data = Vec::with_capacity(n * n);
    for (inv, l, x_c, psi_rows) in rows {
        phi_inv_blocks.push(inv);
        phi_chol_blocks.push(l);
        x_tilde.extend(x_c);
        psi_data.extend(psi_rows);
    }
    let psi = CMatrix::new(n, n, psi_data)?;

    let labels = part.labels();
    let off_blocks = CMatrix::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            ZERO
        } else {
            psi.get(i, j)
        }
    });
    let delta_norm = spectral_norm(&off_blocks)?;

    // Nominal counts: Σ N_c³ for the inversions, then the N³/C² (for Ψ) and
    // N²/C (for x̃) transform figures, generalized to uneven clusters.
    let c = part.num_clusters() as u64;
    let sq: u64 = part.sizes().iter().map(|&k| (k * k) as u64).sum();
    ledger.block_invert += part
        .sizes()
        .iter()
        .map(|&k| (k * k * k) as u64)
        .sum::<u64>();
    ledger.transform += sq * n as u64 / c + sq;

    Ok(PreconditionedSystem {
        partition: part.clone(),
        phi_inv_blocks,
        phi_chol_blocks,
        psi,
        x_tilde: CVector::new(x_tilde)?,
        delta_norm,
        a: a.clone(),
    })
}
