use super::{f_sf, GroupSummary, StatsError};

/// One-way ANOVA decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaTable {
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub df_total: usize,
    pub ms_between: f64,
    pub ms_within: f64,
    /// `+inf` when there is no within-group spread but the means differ.
    pub f: f64,
    pub p: f64,
}

impl AnovaTable {
    /// No within-group variation at all. `f` is then `+inf` (means differ)
    /// or 0 with `p = 1` (every value identical).
    pub fn is_degenerate(&self) -> bool {
        self.ss_within == 0.0
    }

    fn assemble(ss_between: f64, ss_within: f64, ss_total: f64, k: usize, n: usize) -> Result<Self, StatsError> {
        let df_between = k - 1;
        let df_within = n - k;
        let ms_between = ss_between / df_between as f64;
        let ms_within = ss_within / df_within as f64;
        let (f, p) = if ss_within > 0.0 {
            let f = ms_between / ms_within;
            (f, f_sf(f, df_between as f64, df_within as f64)?)
        } else if ss_between > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (0.0, 1.0)
        };
        Ok(AnovaTable {
            ss_between,
            ss_within,
            ss_total,
            df_between,
            df_within,
            df_total: n - 1,
            ms_between,
            ms_within,
            f,
            p,
        })
    }
}

fn check_shape(sizes: impl Iterator<Item = (String, usize)>) -> Result<(usize, usize), StatsError> {
    let mut k = 0;
    let mut n = 0;
    for (label, size) in sizes {
        if size == 0 {
            return Err(StatsError::TooFewValues { label, found: 0, needed: 1 });
        }
        k += 1;
        n += size;
    }
    if k < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, found: k });
    }
    if n == k {
        return Err(StatsError::NoWithinDf);
    }
    Ok((k, n))
}

/// One-way ANOVA on raw observations.
pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaTable, StatsError> {
    let (k, n) = check_shape(groups.iter().enumerate().map(|(i, g)| (format!("#{i}"), g.as_ref().len())))?;
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    let mut ss_total = 0.0;
    for g in groups {
        let g = g.as_ref();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (mean - grand).powi(2);
        for x in g {
            ss_within += (x - mean).powi(2);
            ss_total += (x - grand).powi(2);
        }
    }
    AnovaTable::assemble(ss_between, ss_within, ss_total, k, n)
}

/// One-way ANOVA from group sizes, means and variances.
pub fn anova_from_summary(groups: &[GroupSummary]) -> Result<AnovaTable, StatsError> {
    let (k, n) = check_shape(groups.iter().map(|g| (g.label.clone(), g.n)))?;
    let grand = groups.iter().map(|g| g.n as f64 * g.mean).sum::<f64>() / n as f64;
    let ss_between: f64 = groups.iter().map(|g| g.n as f64 * (g.mean - grand).powi(2)).sum();
    let ss_within: f64 = groups.iter().map(|g| (g.n - 1) as f64 * g.variance).sum();
    AnovaTable::assemble(ss_between, ss_within, ss_between + ss_within, k, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeveneResult {
    pub f: f64,
    pub p: f64,
    pub df1: usize,
    pub df2: usize,
}

/// Levene's test for equal variances: ANOVA on absolute deviations from
/// each group's mean.
pub fn levene_test<G: AsRef<[f64]>>(groups: &[G]) -> Result<LeveneResult, StatsError> {
    for (i, g) in groups.iter().enumerate() {
        let len = g.as_ref().len();
        if len < 2 {
            return Err(StatsError::TooFewValues { label: format!("#{i}"), found: len, needed: 2 });
        }
    }
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let g = g.as_ref();
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|x| (x - mean).abs()).collect()
        })
        .collect();
    let t = one_way_anova(&deviations)?;
    Ok(LeveneResult { f: t.f, p: t.p, df1: t.df_between, df2: t.df_within })
}
