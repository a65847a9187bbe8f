use std::fmt::Write;

use super::{MatchMatrix, SelectionReport, Winner};
use crate::stats::{anova_text, duncan_text, ttest_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// One-line conclusion naming the winner (or the tied algorithms).
pub fn verdict_line(r: &SelectionReport) -> String {
    match &r.winner {
        Winner::Unique { label, mean, not_separable: false } => {
            format!("Verdict: {label} is the most appropriate algorithm, mean match {mean:.3}%")
        }
        Winner::Unique { label, mean, not_separable: true } => format!(
            "Verdict: {label} has the largest mean match ({mean:.3}%) but is not separable at alpha = {}",
            r.alpha
        ),
        Winner::Tie { labels } => {
            format!("Verdict: tie between {} at alpha = {}", labels.join(", "), r.alpha)
        }
    }
}

/// Renders the whole analysis. `header` is echoed first as `key = value`
/// lines (text) or `config` rows (csv).
pub fn render_report(m: &MatchMatrix, r: &SelectionReport, format: ReportFormat, header: &[(String, String)]) -> String {
    match format {
        ReportFormat::Text => text(m, r, header),
        ReportFormat::Csv => csv(m, r, header),
    }
}

fn text(m: &MatchMatrix, r: &SelectionReport, header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        writeln!(out, "{k} = {v}").unwrap();
    }
    if !header.is_empty() {
        writeln!(out).unwrap();
    }

    writeln!(out, "Match percentages per algorithm").unwrap();
    writeln!(out).unwrap();
    let width = m.labels.iter().map(String::len).max().unwrap_or(0).max(9) + 2;
    writeln!(out, "{:<width$}{:>5}{:>10}{:>10}{:>10}", "Algorithm", "N", "Mean", "Std.Dev", "Best").unwrap();
    for i in 0..m.labels.len() {
        let s = m.summary(i);
        let best = m.percentages[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(out, "{:<width$}{:>5}{:>10.3}{:>10.3}{:>10.3}", s.label, s.n, s.mean, s.std_dev(), best).unwrap();
    }

    for (i, stage) in r.stages.iter().enumerate() {
        let n = i + 1;
        writeln!(out).unwrap();
        writeln!(
            out,
            "{}",
            anova_text(&stage.anova, &format!("Stage {n}: ANOVA of {} algorithms (match percentages)", stage.groups.len()))
        )
        .unwrap();
        if let Some(d) = &stage.duncan {
            writeln!(out, "{}", duncan_text(d, &format!("Stage {n}: Duncan multiple range test"))).unwrap();
        }
    }
    if let Some(t) = &r.final_ttest {
        writeln!(out).unwrap();
        writeln!(out, "{}", ttest_text(t, "Independent Samples Test")).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "Decision trail").unwrap();
    for line in &r.trail {
        writeln!(out, "  {line}").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{}", verdict_line(r)).unwrap();
    out
}

fn csv(m: &MatchMatrix, r: &SelectionReport, header: &[(String, String)]) -> String {
    let mut out = String::from("section,stage,item,field,value\n");
    let mut row = |section: &str, stage: &str, item: &str, field: &str, value: String| {
        writeln!(out, "{section},{stage},{item},{field},{value}").unwrap();
    };
    for (k, v) in header {
        row("config", "", k, "value", v.replace(',', ";"));
    }
    for i in 0..m.labels.len() {
        let s = m.summary(i);
        let best = m.percentages[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row("summary", "", &s.label, "n", s.n.to_string());
        row("summary", "", &s.label, "mean", s.mean.to_string());
        row("summary", "", &s.label, "std_dev", s.std_dev().to_string());
        row("summary", "", &s.label, "best", best.to_string());
    }
    for (i, stage) in r.stages.iter().enumerate() {
        let n = (i + 1).to_string();
        let a = &stage.anova;
        for (item, ss, df, ms) in [
            ("between", a.ss_between, a.df_between, Some(a.ms_between)),
            ("within", a.ss_within, a.df_within, Some(a.ms_within)),
            ("total", a.ss_total, a.df_total, None),
        ] {
            row("anova", &n, item, "sum_of_squares", ss.to_string());
            row("anova", &n, item, "df", df.to_string());
            if let Some(ms) = ms {
                row("anova", &n, item, "mean_square", ms.to_string());
            }
        }
        row("anova", &n, "between", "f", a.f.to_string());
        row("anova", &n, "between", "sig", a.p.to_string());
        if let Some(d) = &stage.duncan {
            for (k, s) in d.subsets.iter().enumerate() {
                let item = format!("subset {}", k + 1);
                for &g in &s.members {
                    row("duncan", &n, &item, &d.ordered[g].label, d.ordered[g].mean.to_string());
                }
                row("duncan", &n, &item, "sig", s.sig.to_string());
            }
            row("duncan", &n, "", "harmonic_n", d.harmonic_n.to_string());
        }
        row("stage", &n, "", "surviving", stage.surviving.join(";"));
    }
    if let Some(t) = &r.final_ttest {
        if let Some(l) = &t.levene {
            row("ttest", "", "levene", "f", l.f.to_string());
            row("ttest", "", "levene", "sig", l.p.to_string());
        }
        for (item, t) in [("pooled", &t.pooled), ("welch", &t.welch)] {
            row("ttest", "", item, "t", t.t.to_string());
            row("ttest", "", item, "df", t.df.to_string());
            row("ttest", "", item, "sig_2_tailed", t.p_two_tailed.to_string());
            row("ttest", "", item, "mean_difference", t.mean_difference.to_string());
            row("ttest", "", item, "std_error_difference", t.std_error_difference.to_string());
            row("ttest", "", item, "ci95_low", t.ci95_low.to_string());
            row("ttest", "", item, "ci95_high", t.ci95_high.to_string());
        }
    }
    match &r.winner {
        Winner::Unique { label, mean, not_separable } => {
            row("verdict", "", label, "mean", mean.to_string());
            row("verdict", "", label, "not_separable", not_separable.to_string());
        }
        Winner::Tie { labels } => row("verdict", "", "tie", "labels", labels.join(";")),
    }
    out
}
