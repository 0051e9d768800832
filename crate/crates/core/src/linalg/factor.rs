use super::dense::{hermitize_from_lower, CMatrix, CVector, HermitianView, C64, ZERO};
use crate::error::{Error, Result};

/// `HᴴH` with the upper triangle mirrored from the lower one, so the result
/// is exactly Hermitian.
///
/// Columns are copied into split real/imaginary arrays so each entry is a
/// contiguous dot product over the antennas.
pub(crate) fn gram_unchecked(h: &CMatrix) -> CMatrix {
    let (m, n) = (h.rows(), h.cols());
    let mut re = vec![0.0; m * n];
    let mut im = vec![0.0; m * n];
    for r in 0..m {
        for (c, v) in h.row(r).iter().enumerate() {
            re[c * m + r] = v.re;
            im[c * m + r] = v.im;
        }
    }
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        let (ar, ai) = (&re[i * m..(i + 1) * m], &im[i * m..(i + 1) * m]);
        for j in 0..=i {
            let (br, bi) = (&re[j * m..(j + 1) * m], &im[j * m..(j + 1) * m]);
            g.set(i, j, conj_dot_split(ar, ai, br, bi));
        }
    }
    hermitize_from_lower(&mut g);
    g
}

/// `Σ conj(a_k)·b_k` over split real/imaginary slices of equal length.
#[inline]
fn conj_dot_split(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> C64 {
    const LANES: usize = 8;
    let mut sr = [0.0; LANES];
    let mut si = [0.0; LANES];
    let quads = ar
        .chunks_exact(LANES)
        .zip(ai.chunks_exact(LANES))
        .zip(br.chunks_exact(LANES).zip(bi.chunks_exact(LANES)));
    for ((xr, xi), (yr, yi)) in quads {
        for l in 0..LANES {
            sr[l] += xr[l] * yr[l] + xi[l] * yi[l];
            si[l] += xr[l] * yi[l] - xi[l] * yr[l];
        }
    }
    let (mut tr, mut ti) = (sr.iter().sum::<f64>(), si.iter().sum::<f64>());
    let tail = ar.len() / LANES * LANES;
    for k in tail..ar.len() {
        tr += ar[k] * br[k] + ai[k] * bi[k];
        ti += ar[k] * bi[k] - ai[k] * br[k];
    }
    C64::new(tr, ti)
}

/// `HᴴH + ridge·I`.
pub fn hermitian_gram(h: &CMatrix, ridge: f64) -> Result<HermitianView> {
    if !(ridge > 0.0 && ridge.is_finite()) {
        return Err(Error::invalid(format!(
            "ridge must be positive, got {ridge}"
        )));
    }
    h.check_finite()?;
    let mut g = gram_unchecked(h);
    for i in 0..g.rows() {
        let d = g.get(i, i);
        g.set(i, i, d + ridge);
    }
    Ok(HermitianView::from_exact(g))
}

/// Lower Cholesky factor `L` with `S = L·Lᴴ` and a positive real diagonal.
pub fn cholesky(s: &HermitianView) -> Result<CMatrix> {
    let n = s.dim();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j);
        let d = s.get(j, j).re - lj[..j].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let pivot = d.sqrt();
        l.set(j, j, C64::new(pivot, 0.0));
        for i in j + 1..n {
            let acc: C64 = l.row(i)[..j]
                .iter()
                .zip(&l.row(j)[..j])
                .map(|(a, b)| a * b.conj())
                .sum();
            l.set(i, j, (s.get(i, j) - acc) / pivot);
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub(crate) fn lower_tri_inverse(l: &CMatrix) -> Result<CMatrix> {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for i in 0..n {
        let d = l.get(i, i);
        if d == ZERO {
            return Err(Error::SingularTriangular { index: i });
        }
        inv.set(i, i, 1.0 / d);
        for j in 0..i {
            let acc: C64 = (j..i).map(|k| l.get(i, k) * inv.get(k, j)).sum();
            inv.set(i, j, -acc / d);
        }
    }
    Ok(inv)
}

/// `S⁻¹` through a Cholesky factorization.
pub fn cholesky_invert(s: &HermitianView) -> Result<CMatrix> {
    inverse_from_cholesky(&cholesky(s)?)
}

/// `(L·Lᴴ)⁻¹ = L⁻ᴴ·L⁻¹`, computed on the lower triangle and mirrored.
pub(crate) fn inverse_from_cholesky(l: &CMatrix) -> Result<CMatrix> {
    let linv = lower_tri_inverse(l)?;
    let n = l.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let acc: C64 = (i..n).map(|k| linv.get(k, i).conj() * linv.get(k, j)).sum();
            out.set(i, j, acc);
        }
    }
    hermitize_from_lower(&mut out);
    Ok(out)
}

fn check_triangular_system(t: &CMatrix, rhs: &[C64], lower: bool) -> Result<()> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch {
            context: "triangular solve (square)",
            expected: t.rows(),
            found: t.cols(),
        });
    }
    if rhs.len() != t.rows() {
        return Err(Error::DimensionMismatch {
            context: "triangular solve (rhs)",
            expected: t.rows(),
            found: rhs.len(),
        });
    }
    let n = t.rows();
    for i in 0..n {
        for j in 0..n {
            let outside = if lower { j > i } else { j < i };
            if outside && t.get(i, j) != ZERO {
                return Err(Error::invalid(format!(
                    "matrix is not {} triangular at ({i}, {j})",
                    if lower { "lower" } else { "upper" }
                )));
            }
        }
        if t.get(i, i) == ZERO {
            return Err(Error::SingularTriangular { index: i });
        }
    }
    Ok(())
}

/// Solves `Lo·z = rhs` by forward substitution.
pub fn lower_tri_solve(lo: &CMatrix, rhs: &CVector) -> Result<CVector> {
    check_triangular_system(lo, rhs, true)?;
    let mut z = rhs.to_vec();
    for i in 0..z.len() {
        let row = lo.row(i);
        let acc: C64 = row[..i].iter().zip(&z[..i]).map(|(a, b)| a * b).sum();
        z[i] = (z[i] - acc) / row[i];
    }
    Ok(CVector::from_vec_unchecked(z))
}

/// Solves `Up·z = rhs` by back substitution.
pub fn upper_tri_solve(up: &CMatrix, rhs: &CVector) -> Result<CVector> {
    check_triangular_system(up, rhs, false)?;
    let n = rhs.len();
    let mut z = rhs.to_vec();
    for i in (0..n).rev() {
        let row = up.row(i);
        let acc: C64 = row[i + 1..]
            .iter()
            .zip(&z[i + 1..])
            .map(|(a, b)| a * b)
            .sum();
        z[i] = (z[i] - acc) / row[i];
    }
    Ok(CVector::from_vec_unchecked(z))
}

/// `A = D + L + Lᴴ`: returns the diagonal part and the strict lower part.
pub fn splitting(a: &HermitianView) -> (CMatrix, CMatrix) {
    let n = a.dim();
    let d = CMatrix::from_fn(n, n, |i, j| if i == j { a.get(i, i) } else { ZERO });
    let l = CMatrix::from_fn(n, n, |i, j| if j < i { a.get(i, j) } else { ZERO });
    (d, l)
}
