use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_invert, gram_unchecked, CMatrix, CVector, HermitianView};

use super::ledger::FlopLedger;
use super::LinearSystem;

/// The LMMSE normal equations `A·x̂ = b` with `A = HᴴH + ρ⁻¹I`, `b = Hᴴy`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    a: HermitianView,
    b: CVector,
    rho: f64,
}

impl GramSystem {
    pub fn from_parts(a: HermitianView, b: CVector, rho: f64) -> Result<Self> {
        if a.dim() != b.len() {
            return Err(Error::DimensionMismatch {
                context: "GramSystem",
                expected: a.dim(),
                found: b.len(),
            });
        }
        if !(rho > 0.0) {
            return Err(Error::invalid("rho must be positive"));
        }
        Ok(GramSystem { a, b, rho })
    }

    pub fn a(&self) -> &HermitianView {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

impl LinearSystem for GramSystem {
    fn matrix(&self) -> &CMatrix {
        self.a.matrix()
    }

    fn rhs(&self) -> &CVector {
        &self.b
    }
}

/// `HᴴH` of one channel matrix, reusable across SNR points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGram(CMatrix);

impl ChannelGram {
    pub fn new(h: &CMatrix) -> Result<Self> {
        h.check_finite()?;
        Ok(ChannelGram(gram_unchecked(h)))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Forms `A` and the matched-filter output `b` from a channel and a receive vector.
pub fn build_gram(
    chan: &ChannelRealization,
    y: &CVector,
    ledger: &mut FlopLedger,
) -> Result<GramSystem> {
    build_gram_with(&ChannelGram::new(&chan.h)?, chan, y, ledger)
}

/// [`build_gram`] with `HᴴH` supplied; `gram` must come from `chan.h`.
pub fn build_gram_with(
    gram: &ChannelGram,
    chan: &ChannelRealization,
    y: &CVector,
    ledger: &mut FlopLedger,
) -> Result<GramSystem> {
    let (m, n) = (chan.h.rows(), chan.h.cols());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            context: "build_gram (receive vector)",
            expected: m,
            found: y.len(),
        });
    }
    if gram.0.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "build_gram (Gram matrix)",
            expected: n,
            found: gram.0.rows(),
        });
    }
    if !(chan.rho > 0.0 && chan.rho.is_finite()) {
        return Err(Error::invalid(format!(
            "rho must be positive and finite, got {}",
            chan.rho
        )));
    }
    let mut a = gram.0.clone();
    let ridge = 1.0 / chan.rho;
    for i in 0..n {
        let d = a.get(i, i);
        a.set(i, i, d + ridge);
    }
    let b = chan.h.adjoint_mul_vec(y)?;
    ledger.record_gram(m, n);
    GramSystem::from_parts(HermitianView::from_exact(a), b, chan.rho)
}

/// Exact LMMSE estimate `A⁻¹b`.
pub fn lmmse_direct(sys: &GramSystem) -> Result<CVector> {
    let inv = cholesky_invert(&sys.a)?;
    inv.mul_vec(&sys.b)
}
