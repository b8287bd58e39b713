//! Ordinal-encoded least-squares baseline: categories become their 0-based
//! domain indices, the grade response becomes its numeric score (F=0 … O=6),
//! and an OLS fit predicts the grade by rounding and clamping.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::schema::{Dataset, Grade, Record};

/// A fitted linear model over ordinally encoded predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub intercept: f64,
    /// One coefficient per predictor, in schema order.
    pub coefficients: Vec<f64>,
    /// Predictor names, in schema order.
    pub variables: Vec<String>,
}

/// Encode a dataset: each predictor cell becomes its 0-based domain index and
/// the response grade its numeric score. Errors on any missing value (apply
/// `clean_dataset` first).
pub fn encode_dataset(dataset: &Dataset) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let resp = dataset.schema.response_index();
    let predictors = dataset.schema.predictor_indices();
    let mut x = Vec::with_capacity(dataset.len());
    let mut y = Vec::with_capacity(dataset.len());
    for (i, record) in dataset.records.iter().enumerate() {
        let mut row = Vec::with_capacity(predictors.len());
        for &p in &predictors {
            let v = record.value(p).ok_or_else(|| {
                Error::Baseline(format!(
                    "record {} has a missing value for '{}'",
                    i,
                    dataset.schema.variable(p).name
                ))
            })?;
            row.push(v as f64);
        }
        let class = record.value(resp).ok_or_else(|| {
            Error::Baseline(format!("record {i} has a missing response"))
        })?;
        y.push(f64::from(dataset.schema.grade_of_class(class).score()));
        x.push(row);
    }
    Ok((x, y))
}

/// Fit OLS via the normal equations on the intercept-augmented design matrix.
/// When the Gram matrix is not positive definite a tiny ridge term is added
/// to the diagonal (excluding the intercept) and the solve is retried.
pub fn fit_ols(x: &[Vec<f64>], y: &[f64]) -> Result<RegressionModel> {
    fit_ols_named(x, y, &vec![String::new(); x.first().map_or(0, |r| r.len())])
}

pub fn fit_ols_named(x: &[Vec<f64>], y: &[f64], names: &[String]) -> Result<RegressionModel> {
    let n = x.len();
    if n == 0 || x.len() != y.len() {
        return Err(Error::Baseline("design matrix and response sizes disagree".into()));
    }
    let p = x[0].len();
    if names.len() != p {
        return Err(Error::Baseline("one name per predictor column required".into()));
    }
    if n < p + 1 {
        return Err(Error::Baseline(format!(
            "need at least {} rows to fit {} coefficients, got {n}",
            p + 1,
            p
        )));
    }
    // augmented design: column 0 is the intercept
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let yv = DVector::from_column_slice(y);
    let gram = design.transpose() * &design;
    let rhs = design.transpose() * &yv;

    let mut solution = gram.clone().cholesky().map(|ch| ch.solve(&rhs));
    if solution.is_none() {
        let scale = gram.diagonal().iter().sum::<f64>() / (p + 1) as f64;
        let mut lambda = 1e-12 * scale.max(1.0);
        for _ in 0..8 {
            let mut damped = gram.clone();
            for j in 1..=p {
                damped[(j, j)] += lambda;
            }
            if let Some(ch) = damped.cholesky() {
                solution = Some(ch.solve(&rhs));
                break;
            }
            lambda *= 100.0;
        }
    }
    let beta = solution
        .ok_or_else(|| Error::Baseline("degenerate system even after damping".into()))?;
    Ok(RegressionModel {
        intercept: beta[0],
        coefficients: beta.as_slice()[1..].to_vec(),
        variables: names.to_vec(),
    })
}

/// Fit the baseline directly from a (complete) dataset.
pub fn fit_baseline(dataset: &Dataset) -> Result<RegressionModel> {
    let (x, y) = encode_dataset(dataset)?;
    let names = dataset
        .schema
        .predictor_indices()
        .iter()
        .map(|&i| dataset.schema.variable(i).name.clone())
        .collect::<Vec<_>>();
    fit_ols_named(&x, &y, &names)
}

/// Linear score for an encoded predictor row.
pub fn score_row(model: &RegressionModel, row: &[f64]) -> f64 {
    model.intercept
        + model
            .coefficients
            .iter()
            .zip(row)
            .map(|(c, v)| c * v)
            .sum::<f64>()
}

/// Map a linear score to a grade: round half-up to the nearest integer, clamp
/// into [0, 6], and convert back through the grade scale.
pub fn grade_from_score(score: f64) -> Grade {
    let rounded = (score + 0.5).floor();
    let clamped = rounded.clamp(0.0, 6.0);
    Grade::from_score(clamped as u8)
}

/// Predict the grade for one record (must be complete).
pub fn predict_grade(model: &RegressionModel, dataset: &Dataset, record: &Record) -> Result<Grade> {
    let predictors = dataset.schema.predictor_indices();
    let mut row = Vec::with_capacity(predictors.len());
    for &p in &predictors {
        let v = record.value(p).ok_or_else(|| {
            Error::Baseline(format!(
                "missing value for '{}' in prediction",
                dataset.schema.variable(p).name
            ))
        })?;
        row.push(v as f64);
    }
    Ok(grade_from_score(score_row(model, &row)))
}

/// Fraction of records whose predicted grade equals the observed grade.
pub fn training_accuracy(model: &RegressionModel, dataset: &Dataset) -> Result<f64> {
    let resp = dataset.schema.response_index();
    let mut correct = 0usize;
    for record in &dataset.records {
        let predicted = predict_grade(model, dataset, record)?;
        let observed = record
            .value(resp)
            .ok_or_else(|| Error::Baseline("missing response".into()))?;
        if dataset.schema.grade_of_class(observed) == predicted {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

/// k-fold accuracy of the baseline, using the same stratified folds as the
/// tree evaluation for side-by-side comparison.
pub fn cross_validate_baseline(dataset: &Dataset, k: usize, seed: u64) -> Result<f64> {
    let assignment = crate::eval::stratified_folds(dataset, k, seed)?;
    let resp = dataset.schema.response_index();
    let names = dataset
        .schema
        .predictor_indices()
        .iter()
        .map(|&i| dataset.schema.variable(i).name.clone())
        .collect::<Vec<_>>();
    let (x_all, y_all) = encode_dataset(dataset)?;
    let mut correct = 0usize;
    let mut total = 0usize;
    for fold in 0..k {
        let train: Vec<usize> =
            (0..dataset.len()).filter(|&i| assignment.folds[i] != fold).collect();
        let test: Vec<usize> =
            (0..dataset.len()).filter(|&i| assignment.folds[i] == fold).collect();
        let xt: Vec<Vec<f64>> = train.iter().map(|&i| x_all[i].clone()).collect();
        let yt: Vec<f64> = train.iter().map(|&i| y_all[i]).collect();
        let model = fit_ols_named(&xt, &yt, &names)?;
        for &i in &test {
            let predicted = grade_from_score(score_row(&model, &x_all[i]));
            let observed = dataset.records[i].value(resp).unwrap();
            if dataset.schema.grade_of_class(observed) == predicted {
                correct += 1;
            }
            total += 1;
        }
    }
    Ok(correct as f64 / total as f64)
}
