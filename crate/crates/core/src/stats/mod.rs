//! Inferential statistics for comparing algorithms: one-way ANOVA, Levene's
//! test, independent-samples t-tests and Duncan's multiple range test, with
//! the distribution functions they need.

mod anova;
mod distributions;
mod duncan;
mod quadrature;
mod render;
mod studentized_range;
mod ttest;

use thiserror::Error;

pub use anova::{anova_from_summary, levene_test, one_way_anova, AnovaTable, LeveneResult};
pub use distributions::{f_cdf, f_sf, normal_cdf, t_cdf, t_quantile, t_two_sided_p};
pub use duncan::{duncan_sig, duncan_subsets, DuncanResult, DuncanSubset};
pub use quadrature::{gauss_legendre, integrate_adaptive};
pub use render::{
    anova_csv, anova_text, duncan_csv, duncan_text, fmt_sig, ttest_csv, ttest_text,
};
pub use studentized_range::{studentized_range_cdf, studentized_range_sf};
pub use ttest::{t_test_from_summary, t_test_independent, Degeneracy, TTestResult, TTestRow};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("invalid parameter `{name}`: {constraint}")]
    InvalidParameter { name: &'static str, constraint: &'static str },
    #[error("need at least {needed} groups, got {found}")]
    TooFewGroups { needed: usize, found: usize },
    #[error("group `{label}` has {found} values, need at least {needed}")]
    TooFewValues { label: String, found: usize, needed: usize },
    #[error("no within-group degrees of freedom (every group has a single value)")]
    NoWithinDf,
}

pub(crate) fn check(ok: bool, name: &'static str, constraint: &'static str) -> Result<(), StatsError> {
    if ok {
        Ok(())
    } else {
        Err(StatsError::InvalidParameter { name, constraint })
    }
}

/// Size, mean and unbiased variance of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    /// Divisor `n - 1`; stored as 0 when `n == 1`.
    pub variance: f64,
}

impl GroupSummary {
    pub fn new(label: impl Into<String>, n: usize, mean: f64, variance: f64) -> Result<Self, StatsError> {
        check(n >= 1, "n", "n >= 1")?;
        check(mean.is_finite(), "mean", "finite mean")?;
        check(variance >= 0.0 && variance.is_finite(), "variance", "variance >= 0")?;
        let variance = if n == 1 { 0.0 } else { variance };
        Ok(Self { label: label.into(), n, mean, variance })
    }

    /// Summarises raw values. Uses two-pass sums for accuracy.
    pub fn from_values(label: impl Into<String>, values: &[f64]) -> Result<Self, StatsError> {
        let label = label.into();
        if values.is_empty() {
            return Err(StatsError::TooFewValues { label, found: 0, needed: 1 });
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        GroupSummary::new(label, n, mean, variance)
    }

    /// False for single-observation groups, whose variance is a placeholder.
    pub fn variance_defined(&self) -> bool {
        self.n >= 2
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// `k / sum(1 / n_i)`.
pub fn harmonic_mean_n(groups: &[GroupSummary]) -> f64 {
    groups.len() as f64 / groups.iter().map(|g| 1.0 / g.n as f64).sum::<f64>()
}
