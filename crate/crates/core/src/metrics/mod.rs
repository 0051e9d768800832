//! Symbol mapping, error rates, conditioning and summary statistics.

mod conditioning;
mod constellation;
mod stats;

pub use conditioning::{
    condition_number, gershgorin_bound, psi_condition_number, psi_similar_form, GershgorinCheck,
};
pub use constellation::{demodulate, modulate, Constellation};
pub use stats::{
    binomial_stderr, correlation_heatmap, correlation_summary, count_symbol_errors, empirical_cdf,
    measure_ser, median, CdfSeries, CorrelationSummary, Heatmap, SerCurve, HEATMAP_FLOOR_DB,
};
