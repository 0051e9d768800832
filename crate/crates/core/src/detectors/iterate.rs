use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, CMatrix, CVector, C64, ONE, ZERO};

use super::gram::GramSystem;
use super::ledger::FlopLedger;
use super::stage1::PreconditionedSystem;

/// Iterates whose magnitude exceeds this are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Stationary iteration `x ← x + M⁻¹(b − A·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Richardson: `M = I`.
    Ri,
    /// `M = D`.
    Jacobi,
    /// Gauss-Seidel: `M = D + L`.
    Gs,
    /// Symmetric SOR: `M = ω/(2−ω)·(D/ω + L)·D⁻¹·(D/ω + L)ᴴ`.
    Ssor,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ri, Method::Jacobi, Method::Gs, Method::Ssor];

    /// Nominal multiply-adds per iteration: `N²+2N` (RI, Jacobi), `1.5N²`
    /// (GS, rounded down for odd `N`) and `2N²+N` (SSOR).
    pub fn per_iteration_cost(self, users: usize) -> u64 {
        let n = users as u64;
        match self {
            Method::Ri | Method::Jacobi => n * n + 2 * n,
            Method::Gs => 3 * n * n / 2,
            Method::Ssor => 2 * n * n + n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Ri => "ri",
            Method::Jacobi => "jacobi",
            Method::Gs => "gs",
            Method::Ssor => "ssor",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ri" => Ok(Method::Ri),
            "jacobi" | "jac" => Ok(Method::Jacobi),
            "gs" => Ok(Method::Gs),
            "ssor" => Ok(Method::Ssor),
            other => Err(Error::Config(format!("unknown iterative method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Relaxation factor; only SSOR uses it.
    pub omega: f64,
    pub record_trajectory: bool,
    /// Stop early once `‖x_{t+1} − x_t‖` drops below this.
    pub step_tolerance: Option<f64>,
}

impl IterativeConfig {
    pub fn new(method: Method, max_iters: usize) -> Self {
        IterativeConfig {
            method,
            max_iters,
            omega: 1.0,
            record_trajectory: true,
            step_tolerance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::Config(format!(
                "omega must lie in (0, 2), got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

/// Iterates `x̂_1, …, x̂_t` of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Every iterate when recording is on; otherwise empty.
    pub iterates: Vec<CVector>,
    /// The last finite iterate (the start point if none was produced).
    pub last: CVector,
    pub iterations: usize,
    /// Truncated because an entry exceeded [`DIVERGENCE_LIMIT`].
    pub diverged: bool,
    /// Stopped on the step tolerance.
    pub converged: bool,
}

impl Trajectory {
    /// Iterate `t` (1-based), holding the last finite one past a truncation.
    pub fn iterate(&self, t: usize) -> Option<&CVector> {
        if t == 0 || self.iterates.is_empty() {
            return None;
        }
        self.iterates.get(t.min(self.iterates.len()) - 1)
    }
}

/// `M⁻¹` application for one splitting. `diag` is `D` (all ones for the
/// preconditioned system); the strict lower triangle of `matrix` is `L`.
struct Splitting<'a> {
    matrix: &'a CMatrix,
    diag: Vec<C64>,
    method: Method,
    omega: f64,
}

impl Splitting<'_> {
    fn solve(&self, r: &[C64], z: &mut [C64]) {
        let n = r.len();
        let a = self.matrix;
        match self.method {
            Method::Ri => z.copy_from_slice(r),
            Method::Jacobi => {
                for i in 0..n {
                    z[i] = r[i] / self.diag[i];
                }
            }
            Method::Gs => {
                for i in 0..n {
                    let acc: C64 = a.row(i)[..i].iter().zip(&z[..i]).map(|(x, y)| x * y).sum();
                    z[i] = (r[i] - acc) / self.diag[i];
                }
            }
            Method::Ssor => {
                let w = self.omega;
                // (D/ω + L)·u = r
                for i in 0..n {
                    let acc: C64 = a.row(i)[..i].iter().zip(&z[..i]).map(|(x, y)| x * y).sum();
                    z[i] = (r[i] - acc) * w / self.diag[i];
                }
                // (D/ω + L)ᴴ·z = ((2−ω)/ω)·D·u, solved bottom-up in place.
                let scale = (2.0 - w) / w;
                for (zi, d) in z.iter_mut().zip(&self.diag) {
                    *zi *= d * scale;
                }
                for i in (0..n).rev() {
                    let acc: C64 = (i + 1..n).map(|j| a.get(j, i).conj() * z[j]).sum();
                    z[i] = (z[i] - acc) * w / self.diag[i].conj();
                }
            }
        }
    }
}

fn run(
    split: &Splitting<'_>,
    rhs: &[C64],
    cfg: &IterativeConfig,
    x0: &CVector,
    ledger: &mut FlopLedger,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = rhs.len();
    let mut x = x0.to_vec();
    let mut r = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let mut iterates = Vec::new();
    let mut diverged = false;
    let mut converged = false;
    let mut done = 0;

    for _ in 0..cfg.max_iters {
        split.matrix.mul_vec_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        split.solve(&r, &mut z);
        ledger.record_iteration(split.method, n);

        let next: Vec<C64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
        if next
            .iter()
            .any(|v| !v.is_finite() || v.norm() > DIVERGENCE_LIMIT)
        {
            diverged = true;
            break;
        }
        done += 1;
        let step = norm(&z);
        x = next;
        if cfg.record_trajectory {
            iterates.push(CVector::from_vec_unchecked(x.clone()));
        }
        if cfg.step_tolerance.is_some_and(|tol| step < tol) {
            converged = true;
            break;
        }
    }

    Ok(Trajectory {
        iterates,
        last: CVector::from_vec_unchecked(x),
        iterations: done,
        diverged,
        converged,
    })
}

/// Conventional splitting iteration on `A·x̂ = b` starting from `x0`.
pub fn iterate_conventional(
    sys: &GramSystem,
    cfg: &IterativeConfig,
    x0: &CVector,
    ledger: &mut FlopLedger,
) -> Result<Trajectory> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            context: "iterate_conventional (x0)",
            expected: n,
            found: x0.len(),
        });
    }
    let diag = sys.a().diagonal();
    if matches!(cfg.method, Method::Jacobi | Method::Gs | Method::Ssor) {
        if let Some(index) = diag.iter().position(|d| *d == ZERO) {
            return Err(Error::SplittingSingular { index });
        }
    }
    let split = Splitting {
        matrix: sys.a().matrix(),
        diag,
        method: cfg.method,
        omega: cfg.omega,
    };
    run(&split, sys.b(), cfg, x0, ledger)
}

/// Stage 2: the same iteration on `Ψ·x̂ = x̃`, started at `x̃`, with a unit
/// diagonal so that `Θ_GS = I + F` and `Θ_SSOR = Θ_GS·Θ_GSᴴ`.
pub fn iterate_preconditioned(
    pre: &PreconditionedSystem,
    cfg: &IterativeConfig,
    ledger: &mut FlopLedger,
) -> Result<Trajectory> {
    let split = Splitting {
        matrix: pre.psi(),
        diag: vec![ONE; pre.dim()],
        method: cfg.method,
        omega: cfg.omega,
    };
    run(&split, pre.x_tilde(), cfg, pre.x_tilde(), ledger)
}
