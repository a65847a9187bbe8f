//! Statistics recomputed from published group summaries. Tolerances cover
//! the rounding of the printed inputs; the tighter checks compare against
//! values frozen from an independent statistics package.

mod common;

use bpselect::stats::{
    anova_from_summary, duncan_subsets, f_sf, t_test_from_summary, GroupSummary,
};
use common::GROUPS;

fn summaries(ms_within: f64) -> Vec<GroupSummary> {
    GROUPS.iter().map(|&(l, m, _)| GroupSummary::new(l, 20, m, ms_within).unwrap()).collect()
}

fn final_four(variance: f64) -> Vec<GroupSummary> {
    [("traincgf", 85.0), ("trainscg", 85.375), ("traincgb", 86.125), ("trainlm", 87.5)]
        .iter()
        .map(|&(l, m)| GroupSummary::new(l, 20, m, variance).unwrap())
        .collect()
}

#[test]
fn four_group_anova() {
    let t = anova_from_summary(&final_four(371.875 / 76.0)).unwrap();
    assert_eq!(t.ss_between, 73.125);
    assert_eq!(t.ms_between, 24.375);
    assert_eq!((t.df_between, t.df_within, t.df_total), (3, 76, 79));
    assert!((t.ss_within - 371.875).abs() < 1e-9);
    assert!((t.f - 4.982).abs() <= 1e-3, "F = {}", t.f);
    assert!((t.p - 0.003).abs() <= 5e-4, "p = {}", t.p);
    assert!((f_sf(4.982, 3.0, 76.0).unwrap() - 0.0032929669341683018).abs() < 1e-10);
}

#[test]
fn twelve_group_anova_from_rounded_means() {
    let t = anova_from_summary(&summaries(17.578)).unwrap();
    assert!((t.ss_between - 25020.29).abs() <= 5.0, "SS between = {}", t.ss_between);
    assert_eq!((t.df_between, t.df_within), (11, 228));
    let f = t.ms_between / 17.578;
    assert!((f - 129.4).abs() <= 0.3, "F = {f}");
    assert!(t.p < 5e-4);
}

fn labels(r: &bpselect::stats::DuncanResult) -> Vec<Vec<&str>> {
    r.subsets.iter().map(|s| r.labels(s)).collect()
}

#[test]
fn twelve_group_duncan_subsets() {
    let r = duncan_subsets(&summaries(17.578), 17.578, 228.0, 0.05).unwrap();
    assert_eq!(
        labels(&r),
        vec![
            vec!["traingda"],
            vec!["traingd", "traingdm", "traingdx"],
            vec!["trainrp"],
            vec!["trainoss", "traincgp", "trainbfg", "traincgf", "trainscg", "traincgb"],
            vec!["traincgf", "trainscg", "traincgb", "trainlm"],
        ]
    );
    let sigs: Vec<f64> = r.subsets.iter().map(|s| s.sig).collect();
    assert_eq!(sigs[0], 1.0);
    assert_eq!(sigs[2], 1.0);
    for (got, printed, oracle) in [
        (sigs[1], 0.110, 0.11034555544767766),
        (sigs[3], 0.166, 0.16643778383518248),
        (sigs[4], 0.086, 0.08625605905025846),
    ] {
        assert!((got - printed).abs() <= 0.01, "{got} vs {printed}");
        assert!((got - oracle).abs() <= 1e-6, "{got} vs {oracle}");
    }
    assert_eq!(r.labels(r.top_subset()), ["traincgf", "trainscg", "traincgb", "trainlm"]);
}

#[test]
fn four_group_duncan_subsets() {
    let r = duncan_subsets(&final_four(4.893), 4.893, 76.0, 0.05).unwrap();
    assert_eq!(labels(&r), vec![vec!["traincgf", "trainscg", "traincgb"], vec!["traincgb", "trainlm"]]);
    assert!((r.subsets[0].sig - 0.133).abs() <= 0.01);
    assert!((r.subsets[1].sig - 0.053).abs() <= 0.002);
    assert!((r.subsets[0].sig - 0.13304300952343595).abs() <= 1e-6);
    assert!((r.subsets[1].sig - 0.05298757802182741).abs() <= 1e-6);
}

#[test]
fn final_pair_t_test() {
    let a = GroupSummary::new("traincgb", 20, 86.125, 68.4375 / 19.0).unwrap();
    let b = GroupSummary::new("trainlm", 20, 87.5, 0.0).unwrap();
    let r = t_test_from_summary(&a, &b).unwrap();
    let p = &r.pooled;
    assert!((p.t + 3.240).abs() <= 1e-3, "t = {}", p.t);
    assert_eq!(p.df, 38.0);
    assert!((p.p_two_tailed - 0.002).abs() <= 5e-4);
    assert!((p.mean_difference + 1.375).abs() < 1e-12);
    assert!((p.std_error_difference - 0.424380).abs() <= 1e-5);
    assert!((p.ci95_low + 2.234113).abs() <= 1e-4);
    assert!((p.ci95_high + 0.515887).abs() <= 1e-4);
    let w = &r.welch;
    assert!((w.df - 19.0).abs() <= 0.01);
    assert!((w.p_two_tailed - 0.004).abs() <= 5e-4);
    assert!((w.t - p.t).abs() < 1e-12, "equal n gives equal t");
}
