//! Hermitian eigenvalues: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson shifts.

use super::dense::{norm, CMatrix, HermitianView, C64, ZERO};
use super::factor::gram_unchecked;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;
const MAX_DIM: usize = 512;

/// Reduces a Hermitian matrix to a real tridiagonal `(diag, offdiag)` with
/// the same spectrum. `offdiag[i]` couples `i` and `i + 1`; its last slot is 0.
fn tridiagonalize(s: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = s.rows();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| s.row(i).to_vec()).collect();
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[i][k]).collect();
        let xnorm = norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;

        let v = &mut v[k + 1..];
        v.copy_from_slice(&x);
        v[0] -= alpha;
        let vnorm = norm(v);
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);

        // A22 ← H·A22·H with H = I − 2vvᴴ, written as A22 − 2(vwᴴ + wvᴴ).
        let p = &mut p[k + 1..];
        for (pi, row) in p.iter_mut().zip(&a[k + 1..]) {
            *pi = row[k + 1..].iter().zip(v.iter()).map(|(x, y)| x * y).sum();
        }
        let mu: C64 = v.iter().zip(p.iter()).map(|(x, y)| x.conj() * y).sum();
        let w: Vec<C64> = p
            .iter()
            .zip(v.iter())
            .map(|(pi, vi)| pi - mu.re * vi)
            .collect();
        for (ii, row) in a[k + 1..].iter_mut().enumerate() {
            let (vi, wi) = (v[ii], w[ii]);
            for (jj, entry) in row[k + 1..].iter_mut().enumerate() {
                *entry -= 2.0 * (vi * w[jj].conj() + wi * v[jj].conj());
            }
        }
        a[k + 1][k] = alpha;
        a[k][k + 1] = alpha.conj();
        for row in a.iter_mut().skip(k + 2) {
            row[k] = ZERO;
        }
        a[k][k + 2..].fill(ZERO);
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    let mut off = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        off[i] = a[i + 1][i].norm();
    }
    (diag, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix, in place in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn eigenvalues_unchecked(s: &CMatrix) -> Result<Vec<f64>> {
    let (mut d, mut e) = tridiagonalize(s);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// All eigenvalues of `s`, ascending.
pub fn hermitian_eigenvalues(s: &HermitianView) -> Result<Vec<f64>> {
    if s.dim() > MAX_DIM {
        return Err(Error::invalid(format!(
            "eigenvalue extraction supports dimension ≤ {MAX_DIM}, got {}",
            s.dim()
        )));
    }
    eigenvalues_unchecked(s.matrix())
}

/// `(Λ_min, Λ_max)` of a Hermitian matrix.
pub fn extreme_eigenvalues(s: &HermitianView) -> Result<(f64, f64)> {
    let ev = hermitian_eigenvalues(s)?;
    Ok((ev[0], ev[ev.len() - 1]))
}

/// Largest singular value, `√Λ_max(XᴴX)`.
pub fn spectral_norm(x: &CMatrix) -> Result<f64> {
    x.check_finite()?;
    let g = gram_unchecked(x);
    if g.rows() > MAX_DIM {
        return Err(Error::invalid("spectral_norm: too many columns"));
    }
    let ev = eigenvalues_unchecked(&g)?;
    Ok(ev[ev.len() - 1].max(0.0).sqrt())
}
