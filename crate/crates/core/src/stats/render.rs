//! Fixed-width text tables in the usual statistics-package layout, and CSV
//! equivalents at full precision.

use std::fmt::Write;

use super::{AnovaTable, DuncanResult, TTestResult, TTestRow};

/// Three-decimal display of a probability; `0.000` means `p < 0.0005`.
pub fn fmt_sig(p: f64) -> String {
    format!("{p:.3}")
}

fn fmt_fixed(v: f64, decimals: usize) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.decimals$}")
    }
}

pub fn anova_text(t: &AnovaTable, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "{:<16}{:>16}{:>6}{:>14}{:>10}{:>8}", "", "Sum of Squares", "df", "Mean Square", "F", "Sig.").unwrap();
    writeln!(
        out,
        "{:<16}{:>16.3}{:>6}{:>14.3}{:>10}{:>8}",
        "Between Groups",
        t.ss_between,
        t.df_between,
        t.ms_between,
        fmt_fixed(t.f, 3),
        fmt_sig(t.p)
    )
    .unwrap();
    writeln!(out, "{:<16}{:>16.3}{:>6}{:>14.3}", "Within Groups", t.ss_within, t.df_within, t.ms_within).unwrap();
    writeln!(out, "{:<16}{:>16.3}{:>6}", "Total", t.ss_total, t.df_total).unwrap();
    writeln!(out, "Sig. at full precision: {:e}", t.p).unwrap();
    out
}

pub fn anova_csv(t: &AnovaTable) -> String {
    let mut out = String::from("source,sum_of_squares,df,mean_square,f,sig\n");
    writeln!(out, "between,{},{},{},{},{}", t.ss_between, t.df_between, t.ms_between, t.f, t.p).unwrap();
    writeln!(out, "within,{},{},{},,", t.ss_within, t.df_within, t.ms_within).unwrap();
    writeln!(out, "total,{},{},,,", t.ss_total, t.df_total).unwrap();
    out
}

pub fn duncan_text(r: &DuncanResult, title: &str) -> String {
    let label_width = r.ordered.iter().map(|g| g.label.len()).max().unwrap_or(0).max(10) + 2;
    let cols = r.subsets.len();
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "{:<label_width$}{:>5}   Subset for alpha = {}", "", "N", r.alpha).unwrap();
    let mut header = format!("{:<label_width$}{:>5}", "", "");
    for c in 1..=cols {
        write!(header, "{c:>10}").unwrap();
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    for (i, g) in r.ordered.iter().enumerate() {
        let mut line = format!("{:<label_width$}{:>5}", g.label, g.n);
        for s in &r.subsets {
            if s.members.contains(&i) {
                write!(line, "{:>10.3}", g.mean).unwrap();
            } else {
                write!(line, "{:>10}", "").unwrap();
            }
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    let mut sig = format!("{:<label_width$}{:>5}", "Sig.", "");
    for s in &r.subsets {
        write!(sig, "{:>10}", fmt_sig(s.sig)).unwrap();
    }
    writeln!(out, "{sig}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "Means for groups in homogeneous subsets are displayed.").unwrap();
    writeln!(out, "Uses Harmonic Mean Sample Size = {:.3}.", r.harmonic_n).unwrap();
    writeln!(out, "Error mean square = {:.3}, df = {}.", r.ms_error, r.df_error).unwrap();
    out
}

pub fn duncan_csv(r: &DuncanResult) -> String {
    let mut out = String::from("subset,group,n,mean,sig\n");
    for (k, s) in r.subsets.iter().enumerate() {
        for &i in &s.members {
            let g = &r.ordered[i];
            writeln!(out, "{},{},{},{},{}", k + 1, g.label, g.n, g.mean, s.sig).unwrap();
        }
    }
    out
}

fn ttest_line(name: &str, levene: Option<(f64, f64)>, row: &TTestRow, df_decimals: usize) -> String {
    let (lf, lp) = match levene {
        Some((f, p)) => (fmt_fixed(f, 3), fmt_sig(p)),
        None => (String::new(), String::new()),
    };
    format!(
        "{:<29}{:>9}{:>7}{:>9}{:>8}{:>17}{:>17}{:>23}{:>12}{:>12}",
        name,
        lf,
        lp,
        fmt_fixed(row.t, 3),
        fmt_fixed(row.df, df_decimals),
        fmt_sig(row.p_two_tailed),
        format!("{:.6}", row.mean_difference),
        format!("{:.6}", row.std_error_difference),
        format!("{:.6}", row.ci95_low),
        format!("{:.6}", row.ci95_high),
    )
}

pub fn ttest_text(r: &TTestResult, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "Matched of {} & {}", r.label_a, r.label_b).unwrap();
    writeln!(
        out,
        "{:<29}{:>16}{:>34}{:>17}{:>23}{:>24}",
        "", "Levene's Test", "t-test for Equality of Means", "", "", "95% CI of the Difference"
    )
    .unwrap();
    writeln!(
        out,
        "{:<29}{:>9}{:>7}{:>9}{:>8}{:>17}{:>17}{:>23}{:>12}{:>12}",
        "", "F", "Sig.", "t", "df", "Sig. (2-tailed)", "Mean Difference", "Std. Error Difference", "Lower", "Upper"
    )
    .unwrap();
    let levene = r.levene.as_ref().map(|l| (l.f, l.p));
    writeln!(out, "{}", ttest_line("Equal variances assumed", levene, &r.pooled, 0)).unwrap();
    writeln!(out, "{}", ttest_line("Equal variances not assumed", None, &r.welch, 3)).unwrap();
    writeln!(out, "Sig. (2-tailed) at full precision: {:e} (pooled), {:e} (Welch)", r.pooled.p_two_tailed, r.welch.p_two_tailed)
        .unwrap();
    out
}

pub fn ttest_csv(r: &TTestResult) -> String {
    let mut out = String::from(
        "row,group_a,group_b,levene_f,levene_sig,t,df,sig_2_tailed,mean_difference,std_error_difference,ci95_low,ci95_high\n",
    );
    let (lf, lp) = match &r.levene {
        Some(l) => (l.f.to_string(), l.p.to_string()),
        None => (String::new(), String::new()),
    };
    for (name, row, lev) in [("pooled", &r.pooled, (lf.as_str(), lp.as_str())), ("welch", &r.welch, ("", ""))] {
        writeln!(
            out,
            "{name},{},{},{},{},{},{},{},{},{},{},{}",
            r.label_a,
            r.label_b,
            lev.0,
            lev.1,
            row.t,
            row.df,
            row.p_two_tailed,
            row.mean_difference,
            row.std_error_difference,
            row.ci95_low,
            row.ci95_high
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{anova_from_summary, duncan_subsets, t_test_from_summary, GroupSummary};

    fn four() -> Vec<GroupSummary> {
        [("traincgf", 85.0), ("trainscg", 85.375), ("traincgb", 86.125), ("trainlm", 87.5)]
            .iter()
            .map(|(l, m)| GroupSummary::new(*l, 20, *m, 371.875 / 76.0).unwrap())
            .collect()
    }

    #[test]
    fn anova_block_layout() {
        let t = anova_from_summary(&four()).unwrap();
        let text = anova_text(&t, "ANOVA");
        assert!(text.contains("Sum of Squares"));
        let between = text.lines().find(|l| l.starts_with("Between Groups")).unwrap();
        let cells: Vec<_> = between.split_whitespace().collect();
        assert_eq!(cells[2..], ["73.125", "3", "24.375", "4.982", "0.003"]);
        let within = text.lines().find(|l| l.starts_with("Within Groups")).unwrap();
        assert!(within.contains("371.875") && within.contains("76") && within.contains("4.893"));
        assert!(text.lines().any(|l| l.starts_with("Total") && l.contains("445.000") && l.contains("79")));
        assert!(anova_csv(&t).lines().nth(1).unwrap().starts_with("between,73.125,3,24.375,"));
    }

    #[test]
    fn duncan_block_layout() {
        let r = duncan_subsets(&four(), 371.875 / 76.0, 76.0, 0.05).unwrap();
        let text = duncan_text(&r, "Duncan");
        assert!(text.contains("Subset for alpha = 0.05"));
        let cgb = text.lines().find(|l| l.starts_with("traincgb")).unwrap();
        assert_eq!(cgb.split_whitespace().collect::<Vec<_>>(), ["traincgb", "20", "86.125", "86.125"]);
        let sig = text.lines().find(|l| l.starts_with("Sig.")).unwrap();
        assert_eq!(sig.split_whitespace().collect::<Vec<_>>(), ["Sig.", "0.133", "0.053"]);
        assert!(text.contains("Uses Harmonic Mean Sample Size = 20.000."));
        assert_eq!(duncan_csv(&r).lines().count(), 1 + 3 + 2);
    }

    #[test]
    fn ttest_block_layout() {
        let a = GroupSummary::new("traincgb", 20, 86.125, 68.4375 / 19.0).unwrap();
        let b = GroupSummary::new("trainlm", 20, 87.5, 0.0).unwrap();
        let r = t_test_from_summary(&a, &b).unwrap();
        let text = ttest_text(&r, "Independent Samples Test");
        assert!(text.contains("Sig. (2-tailed)"));
        let pooled = text.lines().find(|l| l.starts_with("Equal variances assumed")).unwrap();
        let cells: Vec<_> = pooled.split_whitespace().skip(3).collect();
        assert_eq!(cells, ["-3.240", "38", "0.002", "-1.375000", "0.424380", "-2.234113", "-0.515887"]);
        let welch = text.lines().find(|l| l.starts_with("Equal variances not assumed")).unwrap();
        let cells: Vec<_> = welch.split_whitespace().skip(4).collect();
        assert_eq!(cells, ["-3.240", "19.000", "0.004", "-1.375000", "0.424380", "-2.263238", "-0.486762"]);
        let csv = ttest_csv(&r);
        let pooled_csv: Vec<_> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(pooled_csv[6], "38");
        assert_eq!(pooled_csv[5].parse::<f64>().unwrap(), r.pooled.t);
    }
}
