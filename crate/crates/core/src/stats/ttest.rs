use super::{levene_test, t_quantile, t_two_sided_p, GroupSummary, LeveneResult, StatsError};

/// One row of the independent-samples table.
#[derive(Debug, Clone, PartialEq)]
pub struct TTestRow {
    pub t: f64,
    pub df: f64,
    pub p_two_tailed: f64,
    pub mean_difference: f64,
    pub std_error_difference: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Both samples have zero variance, so the standard error vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Equal means: `t = 0`, `p = 1`.
    Equal,
    /// Different means: `t = ±inf`, `p = 0`.
    Separated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestResult {
    pub label_a: String,
    pub label_b: String,
    /// Absent when computed from summaries.
    pub levene: Option<LeveneResult>,
    /// Equal variances assumed.
    pub pooled: TTestRow,
    /// Equal variances not assumed.
    pub welch: TTestRow,
    pub degenerate: Option<Degeneracy>,
}

fn row(diff: f64, se: f64, df: f64) -> Result<TTestRow, StatsError> {
    let t = diff / se;
    let p = t_two_sided_p(t, df)?;
    let half = t_quantile(0.975, df)? * se;
    Ok(TTestRow {
        t,
        df,
        p_two_tailed: p,
        mean_difference: diff,
        std_error_difference: se,
        ci95_low: diff - half,
        ci95_high: diff + half,
    })
}

fn degenerate_row(diff: f64, df: f64) -> TTestRow {
    let (t, p) = if diff == 0.0 { (0.0, 1.0) } else { (f64::INFINITY.copysign(diff), 0.0) };
    TTestRow {
        t,
        df,
        p_two_tailed: p,
        mean_difference: diff,
        std_error_difference: 0.0,
        ci95_low: diff,
        ci95_high: diff,
    }
}

/// Pooled and Welch t-tests of `mean(a) - mean(b)`.
pub fn t_test_from_summary(a: &GroupSummary, b: &GroupSummary) -> Result<TTestResult, StatsError> {
    for g in [a, b] {
        if g.n < 2 {
            return Err(StatsError::TooFewValues { label: g.label.clone(), found: g.n, needed: 2 });
        }
    }
    let (n1, n2) = (a.n as f64, b.n as f64);
    let diff = a.mean - b.mean;
    let df_pooled = n1 + n2 - 2.0;
    let labels = (a.label.clone(), b.label.clone());

    if a.variance == 0.0 && b.variance == 0.0 {
        let kind = if diff == 0.0 { Degeneracy::Equal } else { Degeneracy::Separated };
        return Ok(TTestResult {
            label_a: labels.0,
            label_b: labels.1,
            levene: None,
            pooled: degenerate_row(diff, df_pooled),
            welch: degenerate_row(diff, df_pooled),
            degenerate: Some(kind),
        });
    }

    let pooled_var = ((n1 - 1.0) * a.variance + (n2 - 1.0) * b.variance) / df_pooled;
    let pooled = row(diff, (pooled_var * (1.0 / n1 + 1.0 / n2)).sqrt(), df_pooled)?;

    let (v1, v2) = (a.variance / n1, b.variance / n2);
    let df_welch = (v1 + v2).powi(2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
    let welch = row(diff, (v1 + v2).sqrt(), df_welch)?;

    Ok(TTestResult { label_a: labels.0, label_b: labels.1, levene: None, pooled, welch, degenerate: None })
}

/// Levene's test plus [`t_test_from_summary`] on the samples' summaries.
pub fn t_test_independent(
    label_a: &str,
    a: &[f64],
    label_b: &str,
    b: &[f64],
) -> Result<TTestResult, StatsError> {
    let sa = GroupSummary::from_values(label_a, a)?;
    let sb = GroupSummary::from_values(label_b, b)?;
    let mut result = t_test_from_summary(&sa, &sb)?;
    result.levene = Some(levene_test(&[a, b])?);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(label: &str, mean: f64, variance: f64) -> GroupSummary {
        GroupSummary::new(label, 20, mean, variance).unwrap()
    }

    #[test]
    fn published_comparison() {
        // variance implied by the printed standard error: s_p^2 = 10 se^2, s_b = 0
        let var_a = 2.0 * 10.0 * 0.424380f64.powi(2);
        let r = t_test_from_summary(&summary("traincgb", 86.125, var_a), &summary("trainlm", 87.5, 0.0)).unwrap();
        let p = &r.pooled;
        assert!((p.t + 3.240).abs() < 1e-3);
        assert_eq!(p.df, 38.0);
        assert!((p.p_two_tailed - 0.002).abs() < 5e-4);
        assert!((p.std_error_difference - 0.424380).abs() < 1e-6);
        assert!((p.ci95_low + 2.234113).abs() < 1e-5);
        assert!((p.ci95_high + 0.515887).abs() < 1e-5);
        assert_eq!(p.mean_difference, -1.375);
        let w = &r.welch;
        assert!((w.df - 19.0).abs() < 1e-9);
        assert!((w.p_two_tailed - 0.004).abs() < 5e-4);
        assert!((w.t - p.t).abs() < 1e-12);
        assert!((w.ci95_low + 2.263238).abs() < 1e-5);
        assert!((w.ci95_high + 0.486762).abs() < 1e-5);
    }

    #[test]
    fn identical_summaries() {
        let a = summary("a", 5.0, 2.0);
        let r = t_test_from_summary(&a, &a).unwrap();
        assert_eq!(r.pooled.t, 0.0);
        assert_eq!(r.pooled.p_two_tailed, 1.0);
        assert!((r.pooled.ci95_low + r.pooled.ci95_high).abs() < 1e-12);
    }

    #[test]
    fn swapping_negates() {
        let a = summary("a", 3.0, 1.5);
        let b = GroupSummary::new("b", 7, 4.2, 0.4).unwrap();
        let ab = t_test_from_summary(&a, &b).unwrap();
        let ba = t_test_from_summary(&b, &a).unwrap();
        for (x, y) in [(&ab.pooled, &ba.pooled), (&ab.welch, &ba.welch)] {
            assert_eq!(x.t, -y.t);
            assert_eq!(x.mean_difference, -y.mean_difference);
            assert!((x.ci95_low + y.ci95_high).abs() < 1e-12);
            assert_eq!(x.p_two_tailed, y.p_two_tailed);
        }
    }

    #[test]
    fn zero_variance_samples() {
        let r = t_test_independent("a", &[0.0, 0.0], "b", &[1.0, 1.0]).unwrap();
        assert_eq!(r.degenerate, Some(Degeneracy::Separated));
        assert!(r.pooled.t.is_infinite());
        assert_eq!(r.pooled.p_two_tailed, 0.0);
        let r = t_test_independent("a", &[2.0, 2.0], "b", &[2.0, 2.0]).unwrap();
        assert_eq!(r.degenerate, Some(Degeneracy::Equal));
        assert_eq!(r.pooled.p_two_tailed, 1.0);
    }

    #[test]
    fn raw_form_matches_summary_form() {
        let a = [1.0, 2.0, 3.0];
        let r = t_test_independent("a", &a, "b", &a).unwrap();
        assert_eq!(r.pooled.t, 0.0);
        assert_eq!(r.pooled.p_two_tailed, 1.0);
        let b = [2.5, 4.0, 3.5, 6.0];
        let raw = t_test_independent("a", &a, "b", &b).unwrap();
        let summ = t_test_from_summary(
            &GroupSummary::from_values("a", &a).unwrap(),
            &GroupSummary::from_values("b", &b).unwrap(),
        )
        .unwrap();
        assert_eq!(raw.pooled, summ.pooled);
        assert_eq!(raw.welch, summ.welch);
        assert!(raw.levene.is_some());
    }

    #[test]
    fn small_samples_are_rejected() {
        assert!(t_test_independent("a", &[1.0], "b", &[1.0, 2.0]).is_err());
    }
}
