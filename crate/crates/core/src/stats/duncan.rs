//! Duncan's multiple range test with homogeneous subsets.

use super::{check, harmonic_mean_n, studentized_range_sf, GroupSummary, StatsError};

#[derive(Debug, Clone, PartialEq)]
pub struct DuncanSubset {
    /// Indices into [`DuncanResult::ordered`], ascending.
    pub members: Vec<usize>,
    pub sig: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuncanResult {
    /// Groups sorted by ascending mean (ties by label).
    pub ordered: Vec<GroupSummary>,
    /// Ordered by their smallest mean.
    pub subsets: Vec<DuncanSubset>,
    pub ms_error: f64,
    pub df_error: f64,
    pub alpha: f64,
    /// Harmonic mean of all group sizes.
    pub harmonic_n: f64,
}

impl DuncanResult {
    pub fn labels(&self, subset: &DuncanSubset) -> Vec<&str> {
        subset.members.iter().map(|&i| self.ordered[i].label.as_str()).collect()
    }

    /// The subset containing the group with the largest mean.
    pub fn top_subset(&self) -> &DuncanSubset {
        let last = self.ordered.len() - 1;
        self.subsets.iter().find(|s| s.members.contains(&last)).expect("every group is covered")
    }
}

/// Significance of a run of means: the studentized-range p-value of its
/// extreme spread, converted through Duncan's protection level
/// `1 - (1 - p_raw)^(1 / (p - 1))` for `p` members.
pub fn duncan_sig(members: &[GroupSummary], ms_error: f64, df_error: f64) -> Result<f64, StatsError> {
    if members.len() < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, found: members.len() });
    }
    check(ms_error > 0.0 && ms_error.is_finite(), "ms_error", "ms_error > 0")?;
    check(df_error > 0.0, "df_error", "df_error > 0")?;
    let max = members.iter().map(|g| g.mean).fold(f64::NEG_INFINITY, f64::max);
    let min = members.iter().map(|g| g.mean).fold(f64::INFINITY, f64::min);
    if max == min {
        return Ok(1.0);
    }
    let q = (max - min) / (ms_error / harmonic_mean_n(members)).sqrt();
    let p = members.len();
    let p_raw = studentized_range_sf(q, p as u32, df_error)?;
    let sig = -f64::exp_m1(f64::ln_1p(-p_raw) / (p - 1) as f64);
    Ok(sig.clamp(0.0, 1.0))
}

/// Homogeneous subsets: the maximal contiguous runs of sorted means whose
/// Duncan significance exceeds `alpha`, plus singletons for groups no such
/// run covers.
pub fn duncan_subsets(
    groups: &[GroupSummary],
    ms_error: f64,
    df_error: f64,
    alpha: f64,
) -> Result<DuncanResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, found: groups.len() });
    }
    check(alpha > 0.0 && alpha < 1.0, "alpha", "0 < alpha < 1")?;
    let mut ordered = groups.to_vec();
    ordered.sort_by(|a, b| a.mean.total_cmp(&b.mean).then_with(|| a.label.cmp(&b.label)));
    let k = ordered.len();

    let mut candidates = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let sig = duncan_sig(&ordered[i..=j], ms_error, df_error)?;
            if sig > alpha {
                candidates.push((i, j, sig));
            }
        }
    }
    let maximal: Vec<(usize, usize, f64)> = candidates
        .iter()
        .filter(|&&(i, j, _)| !candidates.iter().any(|&(a, b, _)| a <= i && j <= b && (a, b) != (i, j)))
        .copied()
        .collect();

    let mut subsets: Vec<(usize, usize, f64)> = maximal.clone();
    for g in 0..k {
        if !maximal.iter().any(|&(i, j, _)| i <= g && g <= j) {
            subsets.push((g, g, 1.0));
        }
    }
    subsets.sort_by_key(|&(i, j, _)| (i, j));

    Ok(DuncanResult {
        harmonic_n: harmonic_mean_n(&ordered),
        ordered,
        subsets: subsets.into_iter().map(|(i, j, sig)| DuncanSubset { members: (i..=j).collect(), sig }).collect(),
        ms_error,
        df_error,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(pairs: &[(&str, f64)]) -> Vec<GroupSummary> {
        pairs.iter().map(|(l, m)| GroupSummary::new(*l, 20, *m, 1.0).unwrap()).collect()
    }

    #[test]
    fn two_member_sig_needs_no_adjustment() {
        let g = groups(&[("traincgb", 86.125), ("trainlm", 87.5)]);
        let sig = duncan_sig(&g, 4.893, 76.0).unwrap();
        assert!((sig - 0.05298757802182741).abs() < 1e-6, "{sig}");
    }

    #[test]
    fn four_member_sig() {
        let g = groups(&[("traincgf", 85.0), ("trainscg", 85.375), ("traincgb", 86.125), ("trainlm", 87.5)]);
        let sig = duncan_sig(&g, 17.578, 228.0).unwrap();
        assert!((sig - 0.08625605905025846).abs() < 1e-6, "{sig}");
    }

    #[test]
    fn equal_means_are_fully_homogeneous() {
        let g = groups(&[("a", 3.0), ("b", 3.0), ("c", 3.0)]);
        assert_eq!(duncan_sig(&g, 2.0, 10.0).unwrap(), 1.0);
        let r = duncan_subsets(&g, 2.0, 10.0, 0.05).unwrap();
        assert_eq!(r.subsets, vec![DuncanSubset { members: vec![0, 1, 2], sig: 1.0 }]);
    }

    #[test]
    fn four_algorithm_subsets() {
        let g = groups(&[("trainlm", 87.5), ("traincgf", 85.0), ("traincgb", 86.125), ("trainscg", 85.375)]);
        let r = duncan_subsets(&g, 4.893, 76.0, 0.05).unwrap();
        assert_eq!(r.subsets.len(), 2);
        assert_eq!(r.labels(&r.subsets[0]), ["traincgf", "trainscg", "traincgb"]);
        assert_eq!(r.labels(&r.subsets[1]), ["traincgb", "trainlm"]);
        assert!((r.subsets[0].sig - 0.13304300952343595).abs() < 1e-5);
        assert!((r.subsets[1].sig - 0.05298757802182741).abs() < 1e-5);
        assert_eq!(r.labels(r.top_subset()), ["traincgb", "trainlm"]);
        assert!((r.harmonic_n - 20.0).abs() < 1e-12);
    }

    #[test]
    fn ties_are_ordered_by_label() {
        let g = groups(&[("b", 1.0), ("a", 1.0), ("c", 0.0)]);
        let r = duncan_subsets(&g, 1.0, 30.0, 0.05).unwrap();
        let names: Vec<_> = r.ordered.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(names, ["c", "a", "b"]);
    }

    #[test]
    fn far_apart_means_split_into_singletons() {
        let g = groups(&[("low", 10.0), ("high", 90.0)]);
        let r = duncan_subsets(&g, 0.01, 38.0, 0.05).unwrap();
        assert_eq!(r.subsets.len(), 2);
        assert!(r.subsets.iter().all(|s| s.members.len() == 1 && s.sig == 1.0));
        assert_eq!(r.labels(r.top_subset()), ["high"]);
    }

    #[test]
    fn preconditions() {
        let g = groups(&[("a", 1.0)]);
        assert!(duncan_subsets(&g, 1.0, 10.0, 0.05).is_err());
        let g = groups(&[("a", 1.0), ("b", 2.0)]);
        assert!(duncan_sig(&g, 0.0, 10.0).is_err());
    }
}
