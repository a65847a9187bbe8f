//! A match matrix whose group summaries equal the published ones.

#![allow(dead_code)]

use bpselect::harness::MatchMatrix;

/// (algorithm, mean match %, within-group sum of squares).
pub const GROUPS: [(&str, f64, f64); 12] = [
    ("traingd", 64.125, 454.4921875),
    ("traingdm", 65.75, 454.4921875),
    ("traingda", 58.125, 454.4921875),
    ("traingdx", 66.375, 454.4921875),
    ("trainrp", 80.5, 454.4921875),
    ("traincgf", 85.0, 151.71875),
    ("traincgp", 84.121, 454.4921875),
    ("traincgb", 86.125, 68.4375),
    ("trainscg", 85.375, 151.71875),
    ("trainbfg", 84.375, 454.4921875),
    ("trainoss", 84.0, 454.4921875),
    ("trainlm", 87.5, 0.0),
];

pub const REPLICATES: usize = 20;

/// `x_i = mean + c (i - 9.5)` gives each group its mean and sum of squares
/// exactly (up to rounding), since the offsets sum to 0 and their squares to 665.
pub fn engineered_matrix() -> MatchMatrix {
    let labels = GROUPS.iter().map(|g| g.0.to_string()).collect();
    let rows = GROUPS
        .iter()
        .map(|&(_, mean, ss)| {
            let c = (ss / 665.0).sqrt();
            (0..REPLICATES).map(|i| mean + c * (i as f64 - 9.5)).collect()
        })
        .collect();
    MatchMatrix::new(labels, rows).unwrap()
}
