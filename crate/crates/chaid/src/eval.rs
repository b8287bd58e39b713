//! Stratified k-fold cross-validation, confusion matrices, and accuracy
//! metrics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::schema::{DataView, Dataset, Grade};
use crate::tree::{grow_tree_on, predict, ChaidParams};

/// Per-record fold indices for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    /// Fold index in `0..k` per record, in dataset order.
    pub folds: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deal records into `k` folds, stratified by class: within each class the
/// records are shuffled by a seeded generator (ChaCha8, `seed_from_u64`) and
/// dealt round-robin. Records with a missing response are dealt the same way
/// as one extra stratum.
pub fn stratified_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::Eval(format!("k must be at least 2, got {k}")));
    }
    if k > dataset.len() {
        return Err(Error::Eval(format!(
            "k = {k} exceeds the {} available records",
            dataset.len()
        )));
    }
    let resp = dataset.schema.response_index();
    let n_classes = dataset.schema.class_count();
    let mut strata: Vec<Vec<usize>> = vec![Vec::new(); n_classes + 1];
    for (i, r) in dataset.records.iter().enumerate() {
        match r.value(resp) {
            Some(c) => strata[c].push(i),
            None => strata[n_classes].push(i),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0usize; dataset.len()];
    let mut offset = 0usize;
    for stratum in &mut strata {
        stratum.shuffle(&mut rng);
        for (i, &rec) in stratum.iter().enumerate() {
            folds[rec] = (offset + i) % k;
        }
        offset = (offset + stratum.len()) % k;
    }
    Ok(FoldAssignment { k, folds, seed })
}

/// Observed-versus-predicted count matrix. Rows are observed classes, columns
/// predicted, both in `labels` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u32>>,
}

impl ConfusionMatrix {
    pub fn zero(labels: Vec<String>) -> ConfusionMatrix {
        let n = labels.len();
        ConfusionMatrix { labels, counts: vec![vec![0u32; n]; n] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| u64::from(c)).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| u64::from(self.counts[i][i])).sum()
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.counts[i].iter().map(|&c| u64::from(c)).sum()
    }

    /// Overall accuracy as a fraction in [0, 1].
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.trace() as f64 / total as f64
    }
}

/// Build a confusion matrix from (observed, predicted) label pairs.
pub fn confusion_matrix(
    pairs: &[(String, String)],
    labels: &[String],
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::zero(labels.to_vec());
    let index = |label: &str| -> Result<usize> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Eval(format!("unknown label '{label}'")))
    };
    for (observed, predicted) in pairs {
        let o = index(observed)?;
        let p = index(predicted)?;
        cm.counts[o][p] += 1;
    }
    Ok(cm)
}

/// Per-class recall entry: `recall_pct` is 0 and `undefined` is set when the
/// class never occurs among the observed records.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRecall {
    pub label: String,
    pub recall_pct: f64,
    pub undefined: bool,
}

/// Accuracy summary with percentages rounded half-up to 2 decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub overall_pct: f64,
    pub per_class: Vec<ClassRecall>,
    pub total: u64,
    pub correct: u64,
}

/// Round half-up (away from zero) to 2 decimal places.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn summarize(cm: &ConfusionMatrix) -> Result<Summary> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Eval("cannot summarize an empty confusion matrix".into()));
    }
    let correct = cm.trace();
    let per_class = cm
        .labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let row = cm.row_total(i);
            if row == 0 {
                ClassRecall { label: label.clone(), recall_pct: 0.0, undefined: true }
            } else {
                ClassRecall {
                    label: label.clone(),
                    recall_pct: round2(100.0 * cm.counts[i][i] as f64 / row as f64),
                    undefined: false,
                }
            }
        })
        .collect();
    Ok(Summary {
        overall_pct: round2(100.0 * correct as f64 / total as f64),
        per_class,
        total,
        correct,
    })
}

/// Cross-validation report: per-fold accuracies plus the pooled matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub pooled: ConfusionMatrix,
    pub overall_accuracy: f64,
    pub summary: Summary,
    pub k: usize,
    pub seed: u64,
}

/// k-fold cross-validation of a CHAID model: for each fold, grow a tree on
/// the other folds and predict the held-out records, pooling all predictions
/// into one confusion matrix. Records with a missing response are excluded.
pub fn cross_validate(
    dataset: &Dataset,
    params: &ChaidParams,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let assignment = stratified_folds(dataset, k, seed)?;
    let resp = dataset.schema.response_index();
    let predictors: Vec<String> = dataset
        .schema
        .predictor_indices()
        .iter()
        .map(|&i| dataset.schema.variable(i).name.clone())
        .collect();

    let labels = dataset.schema.response().domain.clone();
    let mut pooled = ConfusionMatrix::zero(labels);
    let mut fold_accuracies = Vec::with_capacity(k);
    for fold in 0..k {
        let train: Vec<usize> = (0..dataset.len())
            .filter(|&i| assignment.folds[i] != fold && dataset.records[i].value(resp).is_some())
            .collect();
        let test: Vec<usize> = (0..dataset.len())
            .filter(|&i| assignment.folds[i] == fold && dataset.records[i].value(resp).is_some())
            .collect();
        if train.is_empty() {
            return Err(Error::Eval(format!("fold {fold} leaves an empty training split")));
        }
        let view = DataView::subset(dataset, train);
        let tree = grow_tree_on(&view, &predictors, params)?;
        let mut correct = 0usize;
        for &i in &test {
            let observed = dataset.records[i].value(resp).unwrap();
            let predicted = predict(&tree, &dataset.schema, &dataset.records[i])?;
            let predicted_idx = dataset
                .schema
                .response()
                .index_of(predicted.class.label())
                .expect("response domain holds all grades");
            pooled.counts[observed][predicted_idx] += 1;
            if observed == predicted_idx {
                correct += 1;
            }
        }
        let acc = if test.is_empty() { 0.0 } else { correct as f64 / test.len() as f64 };
        fold_accuracies.push(acc);
    }
    let overall_accuracy = pooled.accuracy();
    let summary = summarize(&pooled)?;
    Ok(CvReport { fold_accuracies, pooled, overall_accuracy, summary, k, seed })
}

/// Render the confusion matrix as a table: observed rows, predicted columns,
/// and a trailing per-class percent-correct column.
pub fn format_confusion_matrix(cm: &ConfusionMatrix, summary: &Summary) -> String {
    let mut out = String::new();
    let width = 9usize;
    out.push_str(&format!("{:width$}", "observed"));
    for l in &cm.labels {
        out.push_str(&format!("{l:>width$}"));
    }
    out.push_str(&format!("{:>width$}\n", "%correct"));
    for (i, l) in cm.labels.iter().enumerate() {
        out.push_str(&format!("{l:width$}"));
        for j in 0..cm.labels.len() {
            out.push_str(&format!("{:>width$}", cm.counts[i][j]));
        }
        out.push_str(&format!("{:>width$.2}\n", summary.per_class[i].recall_pct));
    }
    out.push_str(&format!(
        "overall accuracy: {:.2}% ({} / {})\n",
        summary.overall_pct, summary.correct, summary.total
    ));
    out
}

/// A grade-to-grade prediction pair, for callers that work in `Grade` terms.
pub fn grade_pairs_to_labels(pairs: &[(Grade, Grade)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(o, p)| (o.label().to_string(), p.label().to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{DatasetSchema, Record, VarKind, VariableSchema, GRADE_LABELS};

    fn dataset_with_classes(class_sizes: &[(usize, usize)]) -> Dataset {
        // (class index, count) pairs; one noise predictor
        let schema = DatasetSchema::new(
            vec![
                VariableSchema::new("X", VarKind::Nominal, &["a", "b"]),
                VariableSchema::new("HScGrade", VarKind::Nominal, &GRADE_LABELS),
            ],
            "HScGrade",
        )
        .unwrap();
        let mut records = Vec::new();
        for &(class, n) in class_sizes {
            for i in 0..n {
                records.push(Record { values: vec![Some(i % 2), Some(class)] });
            }
        }
        Dataset::new(schema, records, "test").unwrap()
    }

    #[test]
    fn fold_sizes_772() {
        let ds = dataset_with_classes(&[(0, 37), (1, 159), (2, 257), (3, 196), (4, 68), (5, 3), (6, 52)]);
        assert_eq!(ds.len(), 772);
        let fa = stratified_folds(&ds, 10, 7).unwrap();
        let mut sizes = fa.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![77, 77, 77, 77, 77, 77, 77, 77, 78, 78]);
    }

    #[test]
    fn tiny_class_spread_over_folds() {
        let ds = dataset_with_classes(&[(2, 100), (5, 3)]);
        let fa = stratified_folds(&ds, 10, 1).unwrap();
        let resp = ds.schema.response_index();
        let tiny_folds: Vec<usize> = (0..ds.len())
            .filter(|&i| ds.records[i].value(resp) == Some(5))
            .map(|i| fa.folds[i])
            .collect();
        let unique: std::collections::HashSet<usize> = tiny_folds.iter().copied().collect();
        assert_eq!(unique.len(), 3);
    }

    #[test]
    fn folds_deterministic_and_stratified() {
        let ds = dataset_with_classes(&[(1, 53), (3, 97)]);
        let a = stratified_folds(&ds, 5, 42).unwrap();
        let b = stratified_folds(&ds, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_folds(&ds, 5, 43).unwrap();
        assert_ne!(a, c);
        // per class, fold counts differ by at most 1
        let resp = ds.schema.response_index();
        for class in [1usize, 3] {
            let mut counts = vec![0usize; 5];
            for i in 0..ds.len() {
                if ds.records[i].value(resp) == Some(class) {
                    counts[a.folds[i]] += 1;
                }
            }
            let min = counts.iter().min().unwrap();
            let max = counts.iter().max().unwrap();
            assert!(max - min <= 1);
        }
    }

    #[test]
    fn folds_argument_checks() {
        let ds = dataset_with_classes(&[(0, 4)]);
        assert!(stratified_folds(&ds, 1, 0).is_err());
        assert!(stratified_folds(&ds, 5, 0).is_err());
        assert!(stratified_folds(&ds, 4, 0).is_ok());
    }

    #[test]
    fn confusion_matrix_diagonal() {
        let pairs: Vec<(String, String)> =
            (0..15).map(|i| (GRADE_LABELS[i % 3].to_string(), GRADE_LABELS[i % 3].to_string())).collect();
        let labels: Vec<String> = GRADE_LABELS.iter().map(|s| s.to_string()).collect();
        let cm = confusion_matrix(&pairs, &labels).unwrap();
        assert_eq!(cm.total(), 15);
        assert_eq!(cm.accuracy(), 1.0);
        let s = summarize(&cm).unwrap();
        assert_eq!(s.overall_pct, 100.0);
        for i in 0..3 {
            assert_eq!(s.per_class[i].recall_pct, 100.0);
            assert!(!s.per_class[i].undefined);
        }
        assert!(s.per_class[4].undefined);
    }

    #[test]
    fn confusion_matrix_off_diagonal() {
        let pairs = vec![("O".to_string(), "A".to_string()), ("A".to_string(), "B".to_string())];
        let labels: Vec<String> = GRADE_LABELS.iter().map(|s| s.to_string()).collect();
        let cm = confusion_matrix(&pairs, &labels).unwrap();
        assert_eq!(cm.accuracy(), 0.0);
    }

    #[test]
    fn confusion_matrix_unknown_label() {
        let pairs = vec![("Z".to_string(), "A".to_string())];
        let labels: Vec<String> = GRADE_LABELS.iter().map(|s| s.to_string()).collect();
        assert!(confusion_matrix(&pairs, &labels).is_err());
    }

    #[test]
    fn cv_perfect_predictor() {
        // predictor equals the response over three classes
        let schema = DatasetSchema::new(
            vec![
                VariableSchema::new("COPY", VarKind::Nominal, &GRADE_LABELS),
                VariableSchema::new("HScGrade", VarKind::Nominal, &GRADE_LABELS),
            ],
            "HScGrade",
        )
        .unwrap();
        let records = (0..300)
            .map(|i| Record { values: vec![Some(1 + i % 3), Some(1 + i % 3)] })
            .collect();
        let ds = Dataset::new(schema, records, "test").unwrap();
        let report = cross_validate(&ds, &ChaidParams::default(), 5, 11).unwrap();
        assert_eq!(report.overall_accuracy, 1.0);
        assert_eq!(report.pooled.total(), 300);
    }

    #[test]
    fn cv_deterministic() {
        let ds = dataset_with_classes(&[(1, 60), (2, 60)]);
        let a = cross_validate(&ds, &ChaidParams::default(), 4, 9).unwrap();
        let b = cross_validate(&ds, &ChaidParams::default(), 4, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round2_half_up() {
        assert_eq!(round2(44.689), 44.69);
        assert_eq!(round2(56.603), 56.6);
        assert_eq!(round2(1.47058), 1.47);
        assert_eq!(round2(100.0 * 345.0 / 772.0), 44.69);
    }
}
