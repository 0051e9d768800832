use serde::Serialize;

use crate::detectors::PreconditionedSystem;
use crate::error::{Error, Result};
use crate::linalg::{
    extreme_eigenvalues, hermitize_from_lower, lower_tri_inverse, CMatrix, HermitianView, C64,
};

/// Spectral condition number `λ_max/λ_min` of a Hermitian positive-definite
/// matrix.
pub fn condition_number(s: &HermitianView) -> Result<f64> {
    let (lo, hi) = extreme_eigenvalues(s)?;
    if !(lo > 0.0) {
        return Err(Error::Indefinite { min_eigenvalue: lo });
    }
    Ok(hi / lo)
}

/// The Hermitian matrix `L⁻¹·A·L⁻ᴴ` similar to `Ψ = Φ⁻¹A`, where
/// `L = blkdiag(L_c)` holds the Cholesky factors of the blocks of `Φ`.
pub fn psi_similar_form(pre: &PreconditionedSystem) -> Result<HermitianView> {
    let a = pre.a();
    let n = a.dim();
    let ranges = pre.partition().ranges();
    let inv: Vec<CMatrix> = pre
        .phi_chol_blocks()
        .iter()
        .map(lower_tri_inverse)
        .collect::<Result<_>>()?;

    // T = L⁻¹·A, block row by block row.
    let mut t = CMatrix::zeros(n, n);
    for (r, li) in ranges.iter().zip(&inv) {
        for i in 0..r.len() {
            let row = t.row_mut(r.start + i);
            for (k, &w) in li.row(i)[..=i].iter().enumerate() {
                for (o, &v) in row.iter_mut().zip(a.row(r.start + k)) {
                    *o += w * v;
                }
            }
        }
    }

    // S = T·L⁻ᴴ, lower triangle only: S_ij = Σ_k T_ik·conj((L⁻¹)_jk).
    let mut s = CMatrix::zeros(n, n);
    for (r, lj) in ranges.iter().zip(&inv) {
        for jl in 0..r.len() {
            let j = r.start + jl;
            let lrow = &lj.row(jl)[..=jl];
            for i in j..n {
                let trow = &t.row(i)[r.start..r.start + jl + 1];
                let v: C64 = trow.iter().zip(lrow).map(|(x, y)| x * y.conj()).sum();
                s.set(i, j, v);
            }
        }
    }
    hermitize_from_lower(&mut s);
    if s.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite entry in L⁻¹AL⁻ᴴ".into()));
    }
    Ok(HermitianView::from_exact(s))
}

/// `κ(Ψ)`, evaluated on the Hermitian similar form.
pub fn psi_condition_number(pre: &PreconditionedSystem) -> Result<f64> {
    condition_number(&psi_similar_form(pre)?)
}

/// Outcome of checking `κ(Ψ) ≤ (1 + ‖Φ⁻¹Δ‖)/(1 − ‖Φ⁻¹Δ‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GershgorinCheck {
    pub delta_norm: f64,
    /// `+∞` when `‖Φ⁻¹Δ‖ ≥ 1`.
    pub bound: f64,
    pub kappa_psi: f64,
    pub holds: bool,
}

impl GershgorinCheck {
    /// Whether the bound is finite, i.e. `‖Φ⁻¹Δ‖ < 1`.
    pub fn is_informative(&self) -> bool {
        self.bound.is_finite()
    }
}

pub fn gershgorin_bound(pre: &PreconditionedSystem) -> Result<GershgorinCheck> {
    let d = pre.delta_norm();
    let bound = if d < 1.0 {
        (1.0 + d) / (1.0 - d)
    } else {
        f64::INFINITY
    };
    let kappa_psi = psi_condition_number(pre)?;
    Ok(GershgorinCheck {
        delta_norm: d,
        bound,
        kappa_psi,
        holds: kappa_psi <= bound + 1e-6,
    })
}
