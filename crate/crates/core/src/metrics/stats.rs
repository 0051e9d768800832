use serde::{Deserialize, Serialize};

use crate::detectors::ClusterPartition;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Fraction of positions where `detected` and `sent` differ.
pub fn measure_ser(detected: &[usize], sent: &[usize]) -> Result<f64> {
    if detected.len() != sent.len() {
        return Err(Error::DimensionMismatch {
            context: "measure_ser",
            expected: sent.len(),
            found: detected.len(),
        });
    }
    if sent.is_empty() {
        return Err(Error::invalid("cannot measure SER over zero symbols"));
    }
    let errors = detected.iter().zip(sent).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / sent.len() as f64)
}

/// Count of symbol errors, for accumulating over many trials.
pub fn count_symbol_errors(detected: &[usize], sent: &[usize]) -> usize {
    detected.iter().zip(sent).filter(|(a, b)| a != b).count()
}

/// Binomial standard error `√(p(1−p)/n)`.
pub fn binomial_stderr(p: f64, samples: u64) -> f64 {
    if samples == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / samples as f64).max(0.0).sqrt()
}

/// SER against an abscissa (iteration index or SNR in dB).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerCurve {
    pub method: String,
    pub x: Vec<f64>,
    pub ser: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Monte-Carlo trials behind every point.
    pub trials: usize,
    /// Detected symbols behind every point.
    pub symbols: u64,
}

impl SerCurve {
    /// Builds a curve from error counts accumulated over `trials` trials of
    /// `symbols_per_trial` symbols each.
    pub fn from_counts(
        method: impl Into<String>,
        x: Vec<f64>,
        errors: &[u64],
        trials: usize,
        symbols_per_trial: usize,
    ) -> Self {
        let symbols = (trials * symbols_per_trial) as u64;
        let ser: Vec<f64> = errors.iter().map(|&e| e as f64 / symbols as f64).collect();
        let stderr = ser.iter().map(|&p| binomial_stderr(p, symbols)).collect();
        SerCurve {
            method: method.into(),
            x,
            ser,
            stderr,
            trials,
            symbols,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Empirical CDF: sorted values with probabilities `(i+1)/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfSeries {
    pub label: String,
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    pub fn median(&self) -> f64 {
        median_sorted(&self.values)
    }
}

pub fn empirical_cdf(label: impl Into<String>, samples: &[f64]) -> Result<CdfSeries> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical CDF of an empty sample"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("empirical CDF sample contains NaN"));
    }
    let mut values = samples.to_vec();
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let probabilities = (1..=values.len()).map(|i| i as f64 / n).collect();
    Ok(CdfSeries {
        label: label.into(),
        values,
        probabilities,
    })
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sample median (mean of the two middle values for even counts).
pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}

/// `20·log10(x)`, clamped below at `floor_db`.
fn amplitude_db(x: f64, floor_db: f64) -> f64 {
    if x > 0.0 {
        (20.0 * x.log10()).max(floor_db)
    } else {
        floor_db
    }
}

/// `20·log10(|A_ij| / max|A|)`, floored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub dim: usize,
    pub floor_db: f64,
    /// Row-major.
    pub db: Vec<f64>,
}

impl Heatmap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.db[i * self.dim + j]
    }
}

pub const HEATMAP_FLOOR_DB: f64 = -60.0;

pub fn correlation_heatmap(a: &CMatrix, floor_db: f64) -> Result<Heatmap> {
    if !a.is_square() {
        return Err(Error::invalid("heatmap needs a square matrix"));
    }
    a.check_finite()?;
    let peak = a.max_abs();
    if peak == 0.0 {
        return Err(Error::invalid("heatmap of the zero matrix"));
    }
    let db = a
        .as_slice()
        .iter()
        .map(|v| amplitude_db(v.norm() / peak, floor_db))
        .collect();
    Ok(Heatmap {
        dim: a.rows(),
        floor_db,
        db,
    })
}

/// Mean normalized magnitude `|A_ij|/max|A|` inside and across clusters,
/// averaged linearly and reported in dB. Diagonal entries are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub intra_db: Option<f64>,
    pub inter_db: Option<f64>,
}

impl CorrelationSummary {
    /// `intra − inter` in dB when both exist.
    pub fn gap_db(&self) -> Option<f64> {
        Some(self.intra_db? - self.inter_db?)
    }
}

pub fn correlation_summary(a: &CMatrix, part: &ClusterPartition) -> Result<CorrelationSummary> {
    if !a.is_square() || a.rows() != part.total() {
        return Err(Error::DimensionMismatch {
            context: "correlation_summary",
            expected: part.total(),
            found: a.rows(),
        });
    }
    let peak = a.max_abs();
    if peak == 0.0 {
        return Err(Error::invalid("correlation summary of the zero matrix"));
    }
    let labels = part.labels();
    let (mut intra, mut n_intra, mut inter, mut n_inter) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i == j {
                continue;
            }
            let v = a.get(i, j).norm() / peak;
            if labels[i] == labels[j] {
                intra += v;
                n_intra += 1;
            } else {
                inter += v;
                n_inter += 1;
            }
        }
    }
    let to_db = |sum: f64, n: usize| (n > 0).then(|| amplitude_db(sum / n as f64, -300.0));
    Ok(CorrelationSummary {
        intra_db: to_db(intra, n_intra),
        inter_db: to_db(inter, n_inter),
    })
}
