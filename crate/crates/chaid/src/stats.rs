//! Statistical kernel: contingency tables, the Pearson chi-square statistic,
//! the chi-square upper-tail probability, and the multiplicity-correction
//! multipliers used when categories have been merged before testing.

use crate::error::{Error, Result};
use crate::schema::{DataView, VarKind};
use crate::tree::CategoryGrouping;

/// Predictor-group × response-class count matrix with margins.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    pub grand_total: u64,
}

impl ContingencyTable {
    pub fn from_counts(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> ContingencyTable {
        assert_eq!(row_labels.len(), counts.len());
        for row in &counts {
            assert_eq!(col_labels.len(), row.len());
        }
        let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let mut col_totals = vec![0u64; col_labels.len()];
        for row in &counts {
            for (j, &c) in row.iter().enumerate() {
                col_totals[j] += c;
            }
        }
        let grand_total = row_totals.iter().sum();
        ContingencyTable { row_labels, col_labels, counts, row_totals, col_totals, grand_total }
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }
}

/// A chi-square test result: statistic, degrees of freedom, raw p-value, and
/// the multiplicity-adjusted p-value (capped at 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareStat {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub adjusted_p: f64,
}

/// Cross-tabulate a view's records: rows are the grouping's category groups
/// of `predictor`, columns the response classes. Records with a missing
/// predictor value are excluded; records with a missing response are excluded.
pub fn contingency_table(
    view: &DataView<'_>,
    predictor: usize,
    grouping: &CategoryGrouping,
    response: usize,
) -> Result<ContingencyTable> {
    if view.is_empty() {
        return Err(Error::Stats("contingency table over an empty view".into()));
    }
    let schema = &view.dataset.schema;
    let pred_var = schema.variable(predictor);
    if !grouping.is_partition_of(pred_var.domain.len()) {
        return Err(Error::Stats(format!(
            "grouping is not a partition of '{}' domain",
            pred_var.name
        )));
    }
    let mut group_of_cat = vec![0usize; pred_var.domain.len()];
    for (g, group) in grouping.groups.iter().enumerate() {
        for &cat in group {
            group_of_cat[cat] = g;
        }
    }
    let n_classes = schema.variable(response).domain.len();
    let mut counts = vec![vec![0u64; n_classes]; grouping.groups.len()];
    for i in 0..view.len() {
        let (Some(p), Some(c)) = (view.value(i, predictor), view.value(i, response)) else {
            continue;
        };
        counts[group_of_cat[p]][c] += 1;
    }
    let row_labels: Vec<String> = grouping
        .groups
        .iter()
        .map(|g| {
            g.iter().map(|&c| pred_var.domain[c].clone()).collect::<Vec<_>>().join(" or ")
        })
        .collect();
    let col_labels = schema.variable(response).domain.clone();
    Ok(ContingencyTable::from_counts(row_labels, col_labels, counts))
}

/// Pearson chi-square statistic and degrees of freedom for a table.
///
/// All-zero rows and columns are dropped first; if fewer than 2 non-zero rows
/// or columns remain the table admits no test and `None` is returned.
pub fn pearson_chi2(table: &ContingencyTable) -> Option<(f64, u32)> {
    let live_rows: Vec<usize> =
        (0..table.rows()).filter(|&i| table.row_totals[i] > 0).collect();
    let live_cols: Vec<usize> =
        (0..table.cols()).filter(|&j| table.col_totals[j] > 0).collect();
    if live_rows.len() < 2 || live_cols.len() < 2 {
        return None;
    }
    let n = table.grand_total as f64;
    let mut statistic = 0.0;
    for &i in &live_rows {
        for &j in &live_cols {
            let expected = table.row_totals[i] as f64 * table.col_totals[j] as f64 / n;
            let observed = table.counts[i][j] as f64;
            let d = observed - expected;
            statistic += d * d / expected;
        }
    }
    let df = (live_rows.len() as u32 - 1) * (live_cols.len() as u32 - 1);
    Some((statistic, df))
}

/// Upper-tail probability of the chi-square distribution with `df` degrees of
/// freedom, via the regularized incomplete gamma function (series for
/// x < df + 1, continued fraction otherwise).
pub fn chi2_sf(x: f64, df: u32) -> f64 {
    assert!(df >= 1, "chi2_sf requires df >= 1");
    assert!(x >= 0.0 && x.is_finite(), "chi2_sf requires finite x >= 0, got {x}");
    if x == 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma Q(a, z) for a > 0, z >= 0.
fn gamma_q(a: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    if z < a + 1.0 {
        (1.0 - gamma_p_series(a, z)).clamp(0.0, 1.0)
    } else {
        gamma_q_cf(a, z).clamp(0.0, 1.0)
    }
}

/// Lower regularized gamma P(a, z) by power series; converges fast for z < a+1.
fn gamma_p_series(a: f64, z: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..1000 {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-z + a * z.ln() - ln_gamma(a)).exp()
}

/// Upper regularized gamma Q(a, z) by modified Lentz continued fraction.
fn gamma_q_cf(a: f64, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z + a * z.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos approximation (g = 7, 9 coefficients) for ln Γ(x), x > 0.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Number of ways the original `c` categories could have been grouped into
/// `r` groups: Stirling number of the second kind for nominal predictors,
/// C(c-1, r-1) contiguous cuts for ordinal ones.
pub fn bonferroni_multiplier(c: usize, r: usize, kind: VarKind) -> Result<u64> {
    if r == 0 || r > c {
        return Err(Error::Stats(format!("invalid group count r={r} for c={c} categories")));
    }
    Ok(match kind {
        VarKind::Nominal => stirling2(c, r),
        VarKind::Ordinal => binomial(c - 1, r - 1),
    })
}

/// Stirling number of the second kind S(c, r), via the standard recurrence.
pub fn stirling2(c: usize, r: usize) -> u64 {
    if r == 0 {
        return u64::from(c == 0);
    }
    if r > c {
        return 0;
    }
    let mut row = vec![0u64; r + 1];
    row[0] = 1; // S(0, 0)
    for n in 1..=c {
        for k in (1..=r.min(n)).rev() {
            row[k] = (k as u64).saturating_mul(row[k]).saturating_add(row[k - 1]);
        }
        row[0] = 0;
    }
    row[r]
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(counts: &[&[u64]]) -> ContingencyTable {
        let rows = counts.len();
        let cols = counts[0].len();
        ContingencyTable::from_counts(
            (0..rows).map(|i| format!("r{i}")).collect(),
            (0..cols).map(|j| format!("c{j}")).collect(),
            counts.iter().map(|r| r.to_vec()).collect(),
        )
    }

    #[test]
    fn chi2_perfect_independence() {
        let (stat, df) = pearson_chi2(&table(&[&[10, 10], &[10, 10]])).unwrap();
        assert_eq!(stat, 0.0);
        assert_eq!(df, 1);
    }

    #[test]
    fn chi2_perfect_association_2x2() {
        let (stat, df) = pearson_chi2(&table(&[&[20, 0], &[0, 20]])).unwrap();
        assert!((stat - 40.0).abs() < 1e-12);
        assert_eq!(df, 1);
    }

    #[test]
    fn chi2_three_rows() {
        // expected all 5; rows contribute 10 + 10 + 0
        let (stat, df) = pearson_chi2(&table(&[&[10, 0], &[0, 10], &[5, 5]])).unwrap();
        assert!((stat - 20.0).abs() < 1e-12);
        assert_eq!(df, 2);
    }

    #[test]
    fn chi2_degenerate_tables() {
        assert!(pearson_chi2(&table(&[&[5, 5]])).is_none());
        assert!(pearson_chi2(&table(&[&[5, 0], &[3, 0]])).is_none());
        // an all-zero row is dropped, leaving 1 live row
        assert!(pearson_chi2(&table(&[&[5, 5], &[0, 0]])).is_none());
    }

    #[test]
    fn chi2_drops_zero_rows_for_df() {
        let (stat, df) = pearson_chi2(&table(&[&[10, 0], &[0, 0], &[0, 10]])).unwrap();
        assert!((stat - 20.0).abs() < 1e-12);
        assert_eq!(df, 1);
    }

    #[test]
    fn chi2_permutation_invariant() {
        let a = pearson_chi2(&table(&[&[3, 7, 1], &[4, 2, 9]])).unwrap();
        let b = pearson_chi2(&table(&[&[4, 2, 9], &[3, 7, 1]])).unwrap();
        let c = pearson_chi2(&table(&[&[7, 3, 1], &[2, 4, 9]])).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12);
        assert!((a.0 - c.0).abs() < 1e-12);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn chi2_equal_proportion_merge_exact() {
        // rows 0 and 1 have identical class proportions and contributions that
        // are exact in binary; merging them must leave the statistic unchanged.
        let unmerged = pearson_chi2(&table(&[&[1, 3], &[1, 3], &[6, 2]])).unwrap();
        let merged = pearson_chi2(&table(&[&[2, 6], &[6, 2]])).unwrap();
        assert_eq!(unmerged.0, 4.0);
        assert_eq!(merged.0, 4.0);
        assert_eq!(unmerged.0, merged.0);
    }

    #[test]
    fn sf_at_zero_is_one() {
        assert_eq!(chi2_sf(0.0, 5), 1.0);
    }

    #[test]
    fn sf_df2_closed_form() {
        for &x in &[0.1, 1.0, 4.60517, 10.0, 30.0, 50.0] {
            assert!(
                (chi2_sf(x, 2) - (-x / 2.0).exp()).abs() < 1e-12,
                "x = {x}"
            );
        }
        assert!((chi2_sf(4.60517, 2) - 0.1).abs() < 1e-6);
    }

    #[test]
    fn sf_known_quantiles() {
        assert!((chi2_sf(3.841459, 1) - 0.05).abs() < 1e-6);
        assert!((chi2_sf(15.50731, 8) - 0.05).abs() < 1e-5);
    }

    #[test]
    fn sf_monotone_in_x() {
        for df in [1u32, 2, 5, 10, 20] {
            let mut last = 1.0;
            let mut x = 0.0;
            while x <= 60.0 {
                let p = chi2_sf(x, df);
                assert!(p <= last + 1e-15, "df {df} x {x}");
                last = p;
                x += 0.37;
            }
        }
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(3, 2), 3);
        assert_eq!(stirling2(5, 2), 15);
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(10, 5), 42525);
        assert_eq!(stirling2(7, 7), 1);
    }

    #[test]
    fn bonferroni_values() {
        assert_eq!(bonferroni_multiplier(3, 2, VarKind::Nominal).unwrap(), 3);
        assert_eq!(bonferroni_multiplier(5, 2, VarKind::Ordinal).unwrap(), 4);
        assert_eq!(bonferroni_multiplier(6, 6, VarKind::Nominal).unwrap(), 1);
        assert_eq!(bonferroni_multiplier(6, 6, VarKind::Ordinal).unwrap(), 1);
        assert!(bonferroni_multiplier(3, 4, VarKind::Nominal).is_err());
        assert!(bonferroni_multiplier(3, 0, VarKind::Ordinal).is_err());
    }

    #[test]
    fn stirling_recurrence_holds() {
        for c in 2..=10usize {
            for r in 1..=c {
                let expect =
                    (r as u64) * stirling2(c - 1, r) + stirling2(c - 1, r - 1);
                assert_eq!(stirling2(c, r), expect, "c={c} r={r}");
            }
        }
    }
}
