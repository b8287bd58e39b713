//! Chi-square feature scoring and threshold filtering: every predictor is
//! cross-tabulated against the response (no category merging) and ranked by
//! its statistic.

use crate::error::{Error, Result};
use crate::schema::{DataView, Dataset};
use crate::stats::{chi2_sf, contingency_table, pearson_chi2};
use crate::tree::CategoryGrouping;

/// One predictor's chi-square association with the response.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScore {
    pub variable: String,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// 1-based rank, descending by statistic, ties broken by schema order.
    pub rank: usize,
    /// True when the predictor admits no test (e.g. a constant column).
    pub degenerate: bool,
}

/// Ranking mode for [`rank_scores`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankBy {
    /// Rank by raw statistic, largest first (the default filter mode).
    #[default]
    Statistic,
    /// Rank by p-value, smallest first; fairer across differing df.
    PValue,
}

/// Score every non-response variable with the identity grouping. Degenerate
/// predictors (or a single-class response) get statistic 0 and a flag.
pub fn score_features(dataset: &Dataset) -> Result<Vec<FeatureScore>> {
    score_features_ranked(dataset, RankBy::Statistic)
}

pub fn score_features_ranked(dataset: &Dataset, by: RankBy) -> Result<Vec<FeatureScore>> {
    if dataset.is_empty() {
        return Err(Error::Stats("cannot score features of an empty dataset".into()));
    }
    let view = DataView::all(dataset);
    let response = dataset.schema.response_index();
    let mut scores = Vec::new();
    for idx in dataset.schema.predictor_indices() {
        let var = dataset.schema.variable(idx);
        let grouping = CategoryGrouping::identity(var.domain.len());
        let table = contingency_table(&view, idx, &grouping, response)?;
        let score = match pearson_chi2(&table) {
            Some((statistic, df)) => FeatureScore {
                variable: var.name.clone(),
                statistic,
                df,
                p_value: chi2_sf(statistic, df),
                rank: 0,
                degenerate: false,
            },
            None => FeatureScore {
                variable: var.name.clone(),
                statistic: 0.0,
                df: 0,
                p_value: 1.0,
                rank: 0,
                degenerate: true,
            },
        };
        scores.push(score);
    }
    Ok(rank_scores(scores, by))
}

/// Sort scores and assign ranks 1..n. The sort is stable, so ties keep schema
/// order.
pub fn rank_scores(mut scores: Vec<FeatureScore>, by: RankBy) -> Vec<FeatureScore> {
    match by {
        RankBy::Statistic => {
            scores.sort_by(|a, b| b.statistic.partial_cmp(&a.statistic).unwrap())
        }
        RankBy::PValue => scores.sort_by(|a, b| a.p_value.partial_cmp(&b.p_value).unwrap()),
    }
    for (i, s) in scores.iter_mut().enumerate() {
        s.rank = i + 1;
    }
    scores
}

/// Variables whose statistic strictly exceeds `threshold`, in rank order.
pub fn filter_by_threshold(scores: &[FeatureScore], threshold: f64) -> Vec<String> {
    scores
        .iter()
        .filter(|s| s.statistic > threshold)
        .map(|s| s.variable.clone())
        .collect()
}

/// Variables whose p-value is strictly below `alpha`, in rank order.
pub fn filter_by_pvalue(scores: &[FeatureScore], alpha: f64) -> Vec<String> {
    scores
        .iter()
        .filter(|s| !s.degenerate && s.p_value < alpha)
        .map(|s| s.variable.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{DatasetSchema, Record, VarKind, VariableSchema, GRADE_LABELS};

    fn make_dataset() -> Dataset {
        let schema = DatasetSchema::new(
            vec![
                VariableSchema::new("COPY", VarKind::Nominal, &GRADE_LABELS),
                VariableSchema::new("CONST", VarKind::Nominal, &["only", "other"]),
                VariableSchema::new("NOISE", VarKind::Nominal, &["x", "y"]),
                VariableSchema::new("HScGrade", VarKind::Nominal, &GRADE_LABELS),
            ],
            "HScGrade",
        )
        .unwrap();
        let mut records = Vec::new();
        for i in 0..280usize {
            let class = i % 7;
            records.push(Record {
                values: vec![Some(class), Some(0), Some((i / 3) % 2), Some(class)],
            });
        }
        Dataset::new(schema, records, "test").unwrap()
    }

    #[test]
    fn exact_copy_ranks_first() {
        let ds = make_dataset();
        let scores = score_features(&ds).unwrap();
        assert_eq!(scores[0].variable, "COPY");
        assert_eq!(scores[0].rank, 1);
        // perfect association: chi2 = N * (min(r, c) - 1)
        assert!((scores[0].statistic - 280.0 * 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_predictor_flagged() {
        let ds = make_dataset();
        let scores = score_features(&ds).unwrap();
        let c = scores.iter().find(|s| s.variable == "CONST").unwrap();
        assert!(c.degenerate);
        assert_eq!(c.statistic, 0.0);
    }

    #[test]
    fn ranks_are_dense() {
        let ds = make_dataset();
        let scores = score_features(&ds).unwrap();
        let ranks: Vec<usize> = scores.iter().map(|s| s.rank).collect();
        assert_eq!(ranks, vec![1, 2, 3]);
    }

    #[test]
    fn filter_threshold_is_strict_and_nested() {
        let ds = make_dataset();
        let scores = score_features(&ds).unwrap();
        let top = filter_by_threshold(&scores, 100.0);
        assert_eq!(top, vec!["COPY".to_string()]);
        assert!(filter_by_threshold(&scores, f64::INFINITY).is_empty());
        // exact threshold excluded
        let at = filter_by_threshold(&scores, scores[0].statistic);
        assert!(!at.contains(&"COPY".to_string()));
        // nesting: higher threshold is a subset
        let low = filter_by_threshold(&scores, 0.5);
        for name in &top {
            assert!(low.contains(name));
        }
    }

    #[test]
    fn empty_dataset_errors() {
        let ds = make_dataset();
        let empty = Dataset::new(ds.schema.clone(), vec![], "empty").unwrap();
        assert!(score_features(&empty).is_err());
    }
}
