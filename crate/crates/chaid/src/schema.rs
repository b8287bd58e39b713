//! Variable schemas, categorical datasets, CSV ingestion, and the derived
//! grade/BMI binning used by the student-performance data model.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven grade bands, ordered from best to worst.
pub const GRADE_LABELS: [&str; 7] = ["O", "A", "B", "C", "D", "E", "F"];

/// Seven-level grade band. `O` is the highest, `F` the lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    O,
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Grade {
    pub fn all() -> [Grade; 7] {
        [
            Grade::O,
            Grade::A,
            Grade::B,
            Grade::C,
            Grade::D,
            Grade::E,
            Grade::F,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            Grade::O => "O",
            Grade::A => "A",
            Grade::B => "B",
            Grade::C => "C",
            Grade::D => "D",
            Grade::E => "E",
            Grade::F => "F",
        }
    }

    pub fn from_label(s: &str) -> Option<Grade> {
        match s {
            "O" => Some(Grade::O),
            "A" => Some(Grade::A),
            "B" => Some(Grade::B),
            "C" => Some(Grade::C),
            "D" => Some(Grade::D),
            "E" => Some(Grade::E),
            "F" => Some(Grade::F),
            _ => None,
        }
    }

    /// Numeric score used by the regression baseline: F=0 up to O=6.
    pub fn score(self) -> u8 {
        match self {
            Grade::F => 0,
            Grade::E => 1,
            Grade::D => 2,
            Grade::C => 3,
            Grade::B => 4,
            Grade::A => 5,
            Grade::O => 6,
        }
    }

    /// Inverse of [`Grade::score`]. Panics if `score > 6`.
    pub fn from_score(score: u8) -> Grade {
        match score {
            0 => Grade::F,
            1 => Grade::E,
            2 => Grade::D,
            3 => Grade::C,
            4 => Grade::B,
            5 => Grade::A,
            6 => Grade::O,
            _ => panic!("grade score out of range: {score}"),
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether a variable's domain carries an order (only adjacent categories may
/// merge) or not (any pair may merge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Nominal,
    Ordinal,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Nominal => f.write_str("nominal"),
            VarKind::Ordinal => f.write_str("ordinal"),
        }
    }
}

/// One categorical variable: name, kind, and an ordered domain of labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSchema {
    pub name: String,
    pub kind: VarKind,
    pub domain: Vec<String>,
    pub missing_token: String,
}

impl VariableSchema {
    pub fn new(name: &str, kind: VarKind, domain: &[&str]) -> VariableSchema {
        VariableSchema {
            name: name.to_string(),
            kind,
            domain: domain.iter().map(|s| s.to_string()).collect(),
            missing_token: DEFAULT_MISSING_TOKEN.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == label)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Schema("empty variable name".into()));
        }
        if self.domain.is_empty() {
            return Err(Error::Schema(format!("variable '{}' has an empty domain", self.name)));
        }
        let mut seen = HashSet::new();
        for label in &self.domain {
            if !seen.insert(label.as_str()) {
                return Err(Error::Schema(format!(
                    "variable '{}' repeats domain label '{}'",
                    self.name, label
                )));
            }
        }
        if self.domain.iter().any(|d| d == &self.missing_token) {
            return Err(Error::Schema(format!(
                "variable '{}' uses its missing token '{}' as a domain label",
                self.name, self.missing_token
            )));
        }
        Ok(())
    }
}

/// Default token that marks a missing cell in data files.
pub const DEFAULT_MISSING_TOKEN: &str = "?";

/// Ordered list of variables with exactly one designated as the response.
/// The response domain must be the seven grade labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    variables: Vec<VariableSchema>,
    response: usize,
}

impl DatasetSchema {
    pub fn new(variables: Vec<VariableSchema>, response_name: &str) -> Result<DatasetSchema> {
        let mut names = HashSet::new();
        for v in &variables {
            v.validate()?;
            if !names.insert(v.name.clone()) {
                return Err(Error::Schema(format!("duplicate variable name '{}'", v.name)));
            }
        }
        let response = variables
            .iter()
            .position(|v| v.name == response_name)
            .ok_or_else(|| Error::Schema(format!("unknown response '{response_name}'")))?;
        let resp = &variables[response];
        let expected: HashSet<&str> = GRADE_LABELS.iter().copied().collect();
        let actual: HashSet<&str> = resp.domain.iter().map(|s| s.as_str()).collect();
        if actual != expected {
            return Err(Error::Schema(format!(
                "response '{}' domain must be the 7 grade labels O,A,B,C,D,E,F",
                resp.name
            )));
        }
        Ok(DatasetSchema { variables, response })
    }

    pub fn variables(&self) -> &[VariableSchema] {
        &self.variables
    }

    pub fn response_index(&self) -> usize {
        self.response
    }

    pub fn response(&self) -> &VariableSchema {
        &self.variables[self.response]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn variable(&self, index: usize) -> &VariableSchema {
        &self.variables[index]
    }

    /// Indices of all non-response variables, in schema order.
    pub fn predictor_indices(&self) -> Vec<usize> {
        (0..self.variables.len()).filter(|&i| i != self.response).collect()
    }

    /// Grade for a response-domain category index.
    pub fn grade_of_class(&self, class_index: usize) -> Grade {
        Grade::from_label(&self.response().domain[class_index])
            .expect("response domain validated as grade labels")
    }

    pub fn class_count(&self) -> usize {
        self.response().domain.len()
    }

    /// Stable FNV-1a hash over names, kinds, and domains. Used to check that
    /// a persisted model matches the schema it is applied to.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for v in &self.variables {
            eat(v.name.as_bytes());
            eat(&[0, if v.kind == VarKind::Ordinal { 1 } else { 0 }]);
            for d in &v.domain {
                eat(d.as_bytes());
                eat(&[0]);
            }
            eat(&[1]);
        }
        eat(self.variables[self.response].name.as_bytes());
        h
    }

    /// Serialize to the line-oriented schema file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.variables {
            out.push_str(&format!("name: {}\n", v.name));
            out.push_str(&format!("kind: {}\n", v.kind));
            out.push_str(&format!("domain: {}\n", v.domain.join(", ")));
            if v.missing_token != DEFAULT_MISSING_TOKEN {
                out.push_str(&format!("missing: {}\n", v.missing_token));
            }
            out.push('\n');
        }
        out.push_str(&format!("response: {}\n", self.variables[self.response].name));
        out
    }
}

/// Parse the line-oriented schema file format: one stanza per variable with
/// keys `name`, `kind`, `domain`, optional `missing`, and a final
/// `response: <name>` line. Blank lines and `#` comments are ignored.
pub fn parse_schema(text: &str) -> Result<DatasetSchema> {
    let mut variables: Vec<VariableSchema> = Vec::new();
    let mut current: Option<PartialVar> = None;
    let mut response: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::Schema(format!("line {}: expected 'key: value'", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => {
                if let Some(p) = current.take() {
                    variables.push(p.finish()?);
                }
                current = Some(PartialVar::new(value));
            }
            "kind" => {
                let kind = match value {
                    "nominal" => VarKind::Nominal,
                    "ordinal" => VarKind::Ordinal,
                    other => {
                        return Err(Error::Schema(format!(
                            "line {}: unknown kind '{other}'",
                            lineno + 1
                        )))
                    }
                };
                current
                    .as_mut()
                    .ok_or_else(|| Error::Schema(format!("line {}: 'kind' before 'name'", lineno + 1)))?
                    .kind = Some(kind);
            }
            "domain" => {
                let domain: Vec<String> = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                current
                    .as_mut()
                    .ok_or_else(|| Error::Schema(format!("line {}: 'domain' before 'name'", lineno + 1)))?
                    .domain = Some(domain);
            }
            "missing" => {
                current
                    .as_mut()
                    .ok_or_else(|| Error::Schema(format!("line {}: 'missing' before 'name'", lineno + 1)))?
                    .missing = Some(value.to_string());
            }
            "response" => {
                if response.is_some() {
                    return Err(Error::Schema("response listed twice".into()));
                }
                response = Some(value.to_string());
            }
            other => {
                return Err(Error::Schema(format!("line {}: unknown key '{other}'", lineno + 1)));
            }
        }
    }
    if let Some(p) = current.take() {
        variables.push(p.finish()?);
    }
    let response = response.ok_or_else(|| Error::Schema("missing 'response:' line".into()))?;
    DatasetSchema::new(variables, &response)
}

struct PartialVar {
    name: String,
    kind: Option<VarKind>,
    domain: Option<Vec<String>>,
    missing: Option<String>,
}

impl PartialVar {
    fn new(name: &str) -> PartialVar {
        PartialVar {
            name: name.to_string(),
            kind: None,
            domain: None,
            missing: None,
        }
    }

    fn finish(self) -> Result<VariableSchema> {
        let domain = self
            .domain
            .ok_or_else(|| Error::Schema(format!("variable '{}' has no domain", self.name)))?;
        if domain.is_empty() {
            return Err(Error::Schema(format!("variable '{}' has an empty domain", self.name)));
        }
        Ok(VariableSchema {
            name: self.name,
            kind: self.kind.unwrap_or(VarKind::Nominal),
            domain,
            missing_token: self.missing.unwrap_or_else(|| DEFAULT_MISSING_TOKEN.to_string()),
        })
    }
}

/// One row of categorical data: per-variable domain index, or `None` when the
/// cell is missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub values: Vec<Option<usize>>,
}

impl Record {
    pub fn value(&self, var: usize) -> Option<usize> {
        self.values[var]
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }
}

/// A validated dataset: schema plus records whose values all index into their
/// variables' domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub schema: DatasetSchema,
    pub records: Vec<Record>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(schema: DatasetSchema, records: Vec<Record>, provenance: &str) -> Result<Dataset> {
        for (i, r) in records.iter().enumerate() {
            if r.values.len() != schema.variables().len() {
                return Err(Error::Dataset(format!(
                    "record {} has {} values, schema has {} variables",
                    i,
                    r.values.len(),
                    schema.variables().len()
                )));
            }
            for (j, v) in r.values.iter().enumerate() {
                if let Some(idx) = v {
                    if *idx >= schema.variable(j).domain.len() {
                        return Err(Error::Dataset(format!(
                            "record {} variable '{}' index {} out of domain",
                            i,
                            schema.variable(j).name,
                            idx
                        )));
                    }
                }
            }
        }
        Ok(Dataset { schema, records, provenance: provenance.to_string() })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Export as CSV with labels (missing cells written as the variable's
    /// missing token).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.schema.variables().iter().map(|v| v.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for r in &self.records {
            let cells: Vec<&str> = r
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let var = self.schema.variable(j);
                    match v {
                        Some(idx) => var.domain[*idx].as_str(),
                        None => var.missing_token.as_str(),
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Diagnostic for a CSV row rejected during ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    /// 1-based data row number (header not counted).
    pub row: usize,
    pub reason: String,
}

/// Parse CSV text against a schema. Cells equal to a variable's missing token
/// become missing; rows with any out-of-domain cell are rejected with a
/// diagnostic. Retained records plus rejects partition the input rows.
pub fn load_dataset(csv_text: &str, schema: &DatasetSchema) -> Result<(Dataset, Vec<RejectedRow>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(csv_text.as_bytes());

    let headers = reader.headers()?.clone();
    let mut col_of_var: Vec<usize> = Vec::with_capacity(schema.variables().len());
    for v in schema.variables() {
        let col = headers
            .iter()
            .position(|h| h.trim() == v.name)
            .ok_or_else(|| Error::Dataset(format!("CSV header missing column '{}'", v.name)))?;
        col_of_var.push(col);
    }

    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let mut values = Vec::with_capacity(schema.variables().len());
        let mut reject: Option<String> = None;
        for (j, v) in schema.variables().iter().enumerate() {
            let cell = row.get(col_of_var[j]).unwrap_or("").trim();
            if cell == v.missing_token {
                values.push(None);
            } else if let Some(idx) = v.index_of(cell) {
                values.push(Some(idx));
            } else {
                reject = Some(format!("variable '{}' has out-of-domain value '{}'", v.name, cell));
                break;
            }
        }
        match reject {
            Some(reason) => rejects.push(RejectedRow { row: i + 1, reason }),
            None => records.push(Record { values }),
        }
    }
    let dataset = Dataset::new(schema.clone(), records, "csv import")?;
    Ok((dataset, rejects))
}

/// Record-cleaning policy applied after ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CleanPolicy {
    /// Remove records containing any missing value (default).
    #[default]
    DropIncomplete,
    KeepAll,
}

pub fn clean_dataset(dataset: &Dataset, policy: CleanPolicy) -> Dataset {
    match policy {
        CleanPolicy::KeepAll => dataset.clone(),
        CleanPolicy::DropIncomplete => Dataset {
            schema: dataset.schema.clone(),
            records: dataset.records.iter().filter(|r| r.is_complete()).cloned().collect(),
            provenance: dataset.provenance.clone(),
        },
    }
}

/// Map a percentage to a grade band. Bands are inclusive at their lower edge:
/// ≥90→O, [80,90)→A, [70,80)→B, [60,70)→C, [50,60)→D, [40,50)→E, <40→F.
pub fn bin_percent_to_grade(pct: f64) -> Result<Grade> {
    if !(0.0..=100.0).contains(&pct) {
        return Err(Error::Schema(format!("percentage {pct} outside [0, 100]")));
    }
    Ok(if pct >= 90.0 {
        Grade::O
    } else if pct >= 80.0 {
        Grade::A
    } else if pct >= 70.0 {
        Grade::B
    } else if pct >= 60.0 {
        Grade::C
    } else if pct >= 50.0 {
        Grade::D
    } else if pct >= 40.0 {
        Grade::E
    } else {
        Grade::F
    })
}

/// Body-mass-index band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BmiCategory {
    Underweight,
    Normal,
    Overweight,
    Obesity,
}

impl BmiCategory {
    pub fn label(self) -> &'static str {
        match self {
            BmiCategory::Underweight => "underweight",
            BmiCategory::Normal => "normal",
            BmiCategory::Overweight => "overweight",
            BmiCategory::Obesity => "obesity",
        }
    }
}

/// WHO cutoffs, lower-inclusive: <18.5 underweight, [18.5,25) normal,
/// [25,30) overweight, ≥30 obesity. `weight` in kg, `height` in metres.
pub fn bin_bmi(weight: f64, height: f64) -> Result<BmiCategory> {
    if weight <= 0.0 || height <= 0.0 {
        return Err(Error::Schema(format!(
            "non-positive BMI input: weight {weight}, height {height}"
        )));
    }
    let bmi = weight / (height * height);
    Ok(if bmi < 18.5 {
        BmiCategory::Underweight
    } else if bmi < 25.0 {
        BmiCategory::Normal
    } else if bmi < 30.0 {
        BmiCategory::Overweight
    } else {
        BmiCategory::Obesity
    })
}

/// A borrowed view over a subset of a dataset's records.
#[derive(Debug, Clone)]
pub struct DataView<'a> {
    pub dataset: &'a Dataset,
    pub rows: Vec<usize>,
}

impl<'a> DataView<'a> {
    pub fn all(dataset: &'a Dataset) -> DataView<'a> {
        DataView { dataset, rows: (0..dataset.len()).collect() }
    }

    pub fn subset(dataset: &'a Dataset, rows: Vec<usize>) -> DataView<'a> {
        DataView { dataset, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, view_row: usize, var: usize) -> Option<usize> {
        self.dataset.records[self.rows[view_row]].value(var)
    }

    /// Per-class record counts over the view's response column. Records with
    /// a missing response are not counted.
    pub fn class_counts(&self) -> Vec<u32> {
        let resp = self.dataset.schema.response_index();
        let mut counts = vec![0u32; self.dataset.schema.class_count()];
        for &row in &self.rows {
            if let Some(c) = self.dataset.records[row].value(resp) {
                counts[c] += 1;
            }
        }
        counts
    }
}
