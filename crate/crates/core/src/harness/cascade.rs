//! ANOVA → Duncan → t-test narrowing of the candidate algorithms.

use super::{HarnessError, MatchMatrix};
use crate::stats::{
    duncan_subsets, fmt_sig, one_way_anova, t_test_independent, AnovaTable, Degeneracy, DuncanResult, TTestResult,
};

/// One round of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    /// Algorithms entering the stage, in matrix order.
    pub groups: Vec<String>,
    pub anova: AnovaTable,
    /// Absent when the ANOVA already decided the stage.
    pub duncan: Option<DuncanResult>,
    /// Algorithms leaving the stage, ascending by mean.
    pub surviving: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Winner {
    Unique {
        label: String,
        mean: f64,
        /// The last stage could not shrink the candidate set; the label is
        /// only the largest mean among statistically equal algorithms.
        not_separable: bool,
    },
    Tie { labels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub alpha: f64,
    pub stages: Vec<Stage>,
    pub final_ttest: Option<TTestResult>,
    pub winner: Winner,
    /// Human-readable account of each decision.
    pub trail: Vec<String>,
}

fn mean_of(m: &MatchMatrix, label: &str) -> f64 {
    m.summary(m.index_of(label).expect("label from matrix")).mean
}

fn braces(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(", "))
}

/// Runs the cascade on the raw match percentages.
pub fn selection_cascade(m: &MatchMatrix, alpha: f64) -> Result<SelectionReport, HarnessError> {
    if m.labels.len() < 2 {
        return Err(HarnessError::Results(format!(
            "selection needs at least 2 algorithms, found {}",
            m.labels.len()
        )));
    }
    if m.replicates() < 2 {
        return Err(HarnessError::Results(format!(
            "selection needs at least 2 replicates, found {}",
            m.replicates()
        )));
    }

    let mut survivors: Vec<String> = m.labels.clone();
    let mut stages = Vec::new();
    let mut trail = Vec::new();

    loop {
        let n = stages.len() + 1;
        let rows: Vec<&[f64]> =
            survivors.iter().map(|l| m.percentages[m.index_of(l).unwrap()].as_slice()).collect();
        let anova = one_way_anova(&rows)?;
        let summaries: Vec<_> = survivors.iter().map(|l| m.summary(m.index_of(l).unwrap())).collect();

        if anova.p >= alpha {
            trail.push(format!(
                "stage {n}: ANOVA over {} algorithms gives p = {} >= {alpha}; no difference in means",
                survivors.len(),
                fmt_sig(anova.p)
            ));
            stages.push(Stage { groups: survivors.clone(), anova, duncan: None, surviving: survivors.clone() });
            return Ok(finish(stages, None, Winner::Tie { labels: survivors }, trail, alpha));
        }
        trail.push(format!(
            "stage {n}: ANOVA over {} algorithms gives F = {:.3}, p = {} < {alpha}; means differ",
            survivors.len(),
            anova.f,
            fmt_sig(anova.p)
        ));

        if anova.ms_within == 0.0 {
            // no spread inside any group: only the best mean survives
            let best = summaries.iter().map(|s| s.mean).fold(f64::NEG_INFINITY, f64::max);
            let top: Vec<String> = summaries.iter().filter(|s| s.mean == best).map(|s| s.label.clone()).collect();
            trail.push(format!("stage {n}: no within-group variance; top mean {best} held by {}", braces(&top)));
            stages.push(Stage { groups: survivors.clone(), anova, duncan: None, surviving: top.clone() });
            let winner = if top.len() == 1 {
                Winner::Unique { label: top[0].clone(), mean: best, not_separable: false }
            } else {
                Winner::Tie { labels: top }
            };
            return Ok(finish(stages, None, winner, trail, alpha));
        }

        let duncan = duncan_subsets(&summaries, anova.ms_within, anova.df_within as f64, alpha)?;
        let top_subset = duncan.top_subset();
        let top: Vec<String> = duncan.labels(top_subset).into_iter().map(String::from).collect();
        trail.push(format!(
            "stage {n}: Duncan top subset {} (sig {})",
            braces(&top),
            fmt_sig(top_subset.sig)
        ));
        let shrunk = top.len() < survivors.len();
        stages.push(Stage { groups: survivors.clone(), anova, duncan: Some(duncan), surviving: top.clone() });

        match top.len() {
            1 => {
                let label = top[0].clone();
                trail.push(format!("{label} alone has the highest mean"));
                let mean = mean_of(m, &label);
                return Ok(finish(stages, None, Winner::Unique { label, mean, not_separable: false }, trail, alpha));
            }
            2 => {
                // ascending order: lower mean first, as in "A & B" with a negative difference
                let (low, high) = (&top[0], &top[1]);
                let a = &m.percentages[m.index_of(low).unwrap()];
                let b = &m.percentages[m.index_of(high).unwrap()];
                let t = t_test_independent(low, a, high, b)?;
                let p = t.pooled.p_two_tailed;
                if let Some(lev) = &t.levene {
                    if lev.p < alpha {
                        trail.push(format!(
                            "Levene's test rejects equal variances (p = {}); the Welch row is the safer reading (p = {})",
                            fmt_sig(lev.p),
                            fmt_sig(t.welch.p_two_tailed)
                        ));
                    }
                }
                let separated = p < alpha && t.degenerate != Some(Degeneracy::Equal);
                let winner = if separated {
                    trail.push(format!(
                        "t-test {low} vs {high}: t = {:.3}, p = {} < {alpha}; 95% CI [{:.6}, {:.6}] lies in the negative area, so {low} is less appropriate than {high}",
                        t.pooled.t,
                        fmt_sig(p),
                        t.pooled.ci95_low,
                        t.pooled.ci95_high
                    ));
                    Winner::Unique { label: high.clone(), mean: mean_of(m, high), not_separable: false }
                } else {
                    trail.push(format!(
                        "t-test {low} vs {high}: p = {} >= {alpha}; the two cannot be separated",
                        fmt_sig(p)
                    ));
                    Winner::Tie { labels: top.clone() }
                };
                return Ok(finish(stages, Some(t), winner, trail, alpha));
            }
            _ if shrunk => {
                survivors = top;
            }
            _ => {
                let label = top.last().unwrap().clone();
                trail.push(format!(
                    "the top subset did not shrink; {label} has the largest mean but is not separable at alpha = {alpha}"
                ));
                let mean = mean_of(m, &label);
                return Ok(finish(stages, None, Winner::Unique { label, mean, not_separable: true }, trail, alpha));
            }
        }
    }
}

fn finish(
    stages: Vec<Stage>,
    final_ttest: Option<TTestResult>,
    winner: Winner,
    trail: Vec<String>,
    alpha: f64,
) -> SelectionReport {
    SelectionReport { alpha, stages, final_ttest, winner, trail }
}
