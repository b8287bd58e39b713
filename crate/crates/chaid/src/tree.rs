//! CHAID tree induction: per-predictor category merging, multiplicity-adjusted
//! split selection, recursive growth with the standard stopping rules, plus
//! prediction and DOT / structured-text export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{DataView, Dataset, DatasetSchema, Grade, Record, VarKind};
use crate::stats::{bonferroni_multiplier, chi2_sf, contingency_table, pearson_chi2};

/// Induction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaidParams {
    /// Significance level above which a pair of category groups is merged.
    pub alpha_merge: f64,
    /// Maximum adjusted p-value for a split to be accepted.
    pub alpha_split: f64,
    /// Minimum records for a node to be considered for splitting.
    pub min_parent: u32,
    /// Minimum records per child group.
    pub min_child: u32,
    /// Maximum tree depth (root is depth 0).
    pub max_depth: u32,
    /// Apply the grouping-count multiplicity correction to split p-values.
    pub use_bonferroni: bool,
}

impl Default for ChaidParams {
    fn default() -> ChaidParams {
        ChaidParams {
            alpha_merge: 0.05,
            alpha_split: 0.05,
            min_parent: 20,
            min_child: 10,
            max_depth: 6,
            use_bonferroni: true,
        }
    }
}

impl ChaidParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.alpha_merge && self.alpha_merge < 1.0) {
            return Err(Error::Tree(format!("alpha_merge {} outside (0, 1)", self.alpha_merge)));
        }
        if !(0.0 < self.alpha_split && self.alpha_split < 1.0) {
            return Err(Error::Tree(format!("alpha_split {} outside (0, 1)", self.alpha_split)));
        }
        if self.min_parent < 2 {
            return Err(Error::Tree("min_parent must be at least 2".into()));
        }
        if self.min_child < 1 {
            return Err(Error::Tree("min_child must be at least 1".into()));
        }
        if self.min_child > self.min_parent {
            return Err(Error::Tree("min_child must not exceed min_parent".into()));
        }
        Ok(())
    }
}

/// A partition of a predictor's domain into the groups that define a node's
/// children. Group members are sorted category indices; groups are ordered by
/// their smallest member. For ordinal predictors every group is a contiguous
/// run of the ordered domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryGrouping {
    pub groups: Vec<Vec<usize>>,
}

impl CategoryGrouping {
    /// One singleton group per category.
    pub fn identity(n: usize) -> CategoryGrouping {
        CategoryGrouping { groups: (0..n).map(|c| vec![c]).collect() }
    }

    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for group in &self.groups {
            if group.is_empty() {
                return false;
            }
            for &c in group {
                if c >= n || seen[c] {
                    return false;
                }
                seen[c] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True when every group is a contiguous run of 0..n.
    pub fn is_contiguous(&self) -> bool {
        self.groups.iter().all(|g| {
            g.windows(2).all(|w| w[1] == w[0] + 1)
        })
    }

    fn normalized(mut groups: Vec<Vec<usize>>) -> CategoryGrouping {
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        CategoryGrouping { groups }
    }
}

/// A scored candidate split of one node on one predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub var_index: usize,
    pub variable: String,
    pub grouping: CategoryGrouping,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub adjusted_p: f64,
}

/// The split recorded at an internal node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSplit {
    pub variable: String,
    pub var_index: usize,
    pub grouping: CategoryGrouping,
    /// Category labels per group, in grouping order.
    pub group_labels: Vec<Vec<String>>,
    pub statistic: f64,
    pub df: u32,
    pub adjusted_p: f64,
}

/// One tree node. Ids are assigned breadth-first with the root as 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaidNode {
    pub id: u32,
    pub depth: u32,
    pub count: u32,
    pub class_counts: Vec<u32>,
    pub majority_class: Grade,
    pub split: Option<NodeSplit>,
    pub children: Vec<ChaidNode>,
}

impl ChaidNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    fn is_pure(&self) -> bool {
        self.class_counts.iter().filter(|&&c| c > 0).count() <= 1
    }
}

/// A trained CHAID tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaidTree {
    pub format_version: u32,
    pub response: String,
    pub class_labels: Vec<String>,
    pub schema_fingerprint: u64,
    pub params: ChaidParams,
    pub root: ChaidNode,
}

/// Result of routing a record through a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: Grade,
    /// Normalized class distribution at the leaf, in class-label order.
    pub distribution: Vec<f64>,
    pub leaf_id: u32,
}

/// Merge a predictor's categories at a node, Kass-style: starting from
/// singleton groups, repeatedly merge the allowable pair (any pair when
/// nominal, adjacent when ordinal) with the largest pairwise p-value while
/// that p-value exceeds `alpha_merge`. Groups smaller than `min_child` are
/// then force-merged with their most similar allowable neighbor.
pub fn merge_categories(
    view: &DataView<'_>,
    predictor: usize,
    params: &ChaidParams,
) -> Result<CategoryGrouping> {
    if view.is_empty() {
        return Err(Error::Tree("merge over an empty view".into()));
    }
    let schema = &view.dataset.schema;
    let var = schema.variable(predictor);
    let n_cats = var.domain.len();
    let n_classes = schema.class_count();
    let response = schema.response_index();

    // per-category class counts over the view (missing predictor excluded)
    let mut cat_class = vec![vec![0u64; n_classes]; n_cats];
    for i in 0..view.len() {
        if let (Some(p), Some(c)) = (view.value(i, predictor), view.value(i, response)) {
            cat_class[p][c] += 1;
        }
    }

    let mut groups: Vec<Vec<usize>> = (0..n_cats).map(|c| vec![c]).collect();
    let group_class = |groups: &[Vec<usize>], g: usize| -> Vec<u64> {
        let mut acc = vec![0u64; n_classes];
        for &cat in &groups[g] {
            for (k, &v) in cat_class[cat].iter().enumerate() {
                acc[k] += v;
            }
        }
        acc
    };
    let pair_p = |groups: &[Vec<usize>], i: usize, j: usize| -> f64 {
        let table = crate::stats::ContingencyTable::from_counts(
            vec!["a".into(), "b".into()],
            (0..n_classes).map(|k| k.to_string()).collect(),
            vec![group_class(groups, i), group_class(groups, j)],
        );
        match pearson_chi2(&table) {
            Some((stat, df)) => chi2_sf(stat, df),
            None => 1.0, // degenerate pair: indistinguishable
        }
    };
    let allowable = |_groups: &[Vec<usize>], i: usize, j: usize| -> bool {
        match var.kind {
            VarKind::Nominal => true,
            // groups stay sorted by first element; ordinal merges must be
            // between consecutive groups to keep runs contiguous
            VarKind::Ordinal => j == i + 1,
        }
    };
    let merge = |groups: &mut Vec<Vec<usize>>, i: usize, j: usize| {
        let taken = groups.remove(j);
        groups[i].extend(taken);
        groups[i].sort_unstable();
        groups.sort_by_key(|g| g[0]);
    };

    while groups.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                if !allowable(&groups, i, j) {
                    continue;
                }
                let p = pair_p(&groups, i, j);
                if best.map_or(true, |(_, _, bp)| p > bp) {
                    best = Some((i, j, p));
                }
            }
        }
        match best {
            Some((i, j, p)) if p > params.alpha_merge => merge(&mut groups, i, j),
            _ => break,
        }
    }

    // force-merge undersized groups with their most similar allowable neighbor
    loop {
        if groups.len() <= 1 {
            break;
        }
        let small = (0..groups.len()).find(|&g| {
            group_class(&groups, g).iter().sum::<u64>() < u64::from(params.min_child)
        });
        let Some(g) = small else { break };
        let mut best: Option<(usize, usize, f64)> = None;
        for other in 0..groups.len() {
            if other == g {
                continue;
            }
            let (i, j) = (g.min(other), g.max(other));
            if !allowable(&groups, i, j) {
                continue;
            }
            let p = pair_p(&groups, i, j);
            if best.map_or(true, |(_, _, bp)| p > bp) {
                best = Some((i, j, p));
            }
        }
        match best {
            Some((i, j, _)) => merge(&mut groups, i, j),
            None => break,
        }
    }

    Ok(CategoryGrouping::normalized(groups))
}

/// Evaluate a predictor as a split candidate at a node: merge its categories,
/// then test the grouped table. Returns `None` when the grouping collapses to
/// one group or the grouped table admits no test.
pub fn evaluate_split(
    view: &DataView<'_>,
    predictor: usize,
    params: &ChaidParams,
) -> Result<Option<SplitCandidate>> {
    let schema = &view.dataset.schema;
    let var = schema.variable(predictor);
    let grouping = merge_categories(view, predictor, params)?;
    if grouping.groups.len() < 2 {
        return Ok(None);
    }
    let table = contingency_table(view, predictor, &grouping, schema.response_index())?;
    let Some((statistic, df)) = pearson_chi2(&table) else {
        return Ok(None);
    };
    let p_value = chi2_sf(statistic, df);
    let adjusted_p = if params.use_bonferroni {
        // c counts categories actually observed at this node
        let present = (0..var.domain.len())
            .filter(|&cat| {
                (0..view.len()).any(|i| view.value(i, predictor) == Some(cat))
            })
            .count();
        let r = grouping.groups.len();
        let multiplier = bonferroni_multiplier(present.max(r), r, var.kind)?;
        (multiplier as f64 * p_value).min(1.0)
    } else {
        p_value
    };
    Ok(Some(SplitCandidate {
        var_index: predictor,
        variable: var.name.clone(),
        grouping,
        statistic,
        df,
        p_value,
        adjusted_p,
    }))
}

/// Grow a CHAID tree on a whole dataset.
pub fn grow_tree(
    dataset: &Dataset,
    predictors: &[String],
    params: &ChaidParams,
) -> Result<ChaidTree> {
    let rows = (0..dataset.len()).collect();
    grow_tree_on(&DataView::subset(dataset, rows), predictors, params)
}

/// Grow a CHAID tree on a view (used by cross-validation to train on folds).
pub fn grow_tree_on(
    view: &DataView<'_>,
    predictors: &[String],
    params: &ChaidParams,
) -> Result<ChaidTree> {
    params.validate()?;
    if view.is_empty() {
        return Err(Error::Tree("cannot grow a tree on an empty dataset".into()));
    }
    if predictors.is_empty() {
        return Err(Error::Tree("no predictors given".into()));
    }
    let schema = &view.dataset.schema;
    let mut pred_indices = Vec::with_capacity(predictors.len());
    for name in predictors {
        let idx = schema
            .var_index(name)
            .ok_or_else(|| Error::Tree(format!("unknown predictor '{name}'")))?;
        if idx == schema.response_index() {
            return Err(Error::Tree(format!("response '{name}' listed as a predictor")));
        }
        pred_indices.push(idx);
    }
    // schema order makes the tie-break deterministic
    pred_indices.sort_unstable();
    pred_indices.dedup();

    // exclude records with a missing response from training
    let resp = schema.response_index();
    let rows: Vec<usize> = view
        .rows
        .iter()
        .copied()
        .filter(|&r| view.dataset.records[r].value(resp).is_some())
        .collect();
    if rows.is_empty() {
        return Err(Error::Tree("no records with an observed response".into()));
    }

    let mut root = build_node(view.dataset, rows, 0, &pred_indices, params)?;
    assign_ids_breadth_first(&mut root);
    Ok(ChaidTree {
        format_version: 1,
        response: schema.response().name.clone(),
        class_labels: schema.response().domain.clone(),
        schema_fingerprint: schema.fingerprint(),
        params: *params,
        root,
    })
}

fn build_node(
    dataset: &Dataset,
    rows: Vec<usize>,
    depth: u32,
    predictors: &[usize],
    params: &ChaidParams,
) -> Result<ChaidNode> {
    let view = DataView::subset(dataset, rows);
    let class_counts = view.class_counts();
    let count = view.len() as u32;
    let majority_idx = majority_index(&class_counts);
    let majority_class = dataset.schema.grade_of_class(majority_idx);

    let mut node = ChaidNode {
        id: 0,
        depth,
        count,
        class_counts,
        majority_class,
        split: None,
        children: Vec::new(),
    };

    if node.is_pure() || count < params.min_parent || depth >= params.max_depth {
        return Ok(node);
    }

    let mut best: Option<SplitCandidate> = None;
    for &p in predictors {
        let Some(cand) = evaluate_split(&view, p, params)? else { continue };
        let better = match &best {
            None => true,
            Some(b) => {
                (cand.adjusted_p, -cand.statistic, cand.var_index)
                    < (b.adjusted_p, -b.statistic, b.var_index)
            }
        };
        if better {
            best = Some(cand);
        }
    }
    let Some(cand) = best else { return Ok(node) };
    if cand.adjusted_p > params.alpha_split {
        return Ok(node);
    }

    // partition rows by group; missing split values go to the largest child
    let var = dataset.schema.variable(cand.var_index);
    let mut group_of_cat = vec![0usize; var.domain.len()];
    for (g, group) in cand.grouping.groups.iter().enumerate() {
        for &c in group {
            group_of_cat[c] = g;
        }
    }
    let mut child_rows: Vec<Vec<usize>> = vec![Vec::new(); cand.grouping.groups.len()];
    let mut missing_rows: Vec<usize> = Vec::new();
    for &r in &view.rows {
        match dataset.records[r].value(cand.var_index) {
            Some(c) => child_rows[group_of_cat[c]].push(r),
            None => missing_rows.push(r),
        }
    }
    if !missing_rows.is_empty() {
        let largest = (0..child_rows.len())
            .max_by_key(|&g| (child_rows[g].len(), std::cmp::Reverse(g)))
            .unwrap();
        child_rows[largest].extend(missing_rows);
    }
    if child_rows.iter().any(|c| c.is_empty()) {
        // should not happen after merging, but never emit an empty child
        return Ok(node);
    }

    let group_labels = cand
        .grouping
        .groups
        .iter()
        .map(|g| g.iter().map(|&c| var.domain[c].clone()).collect())
        .collect();
    node.split = Some(NodeSplit {
        variable: var.name.clone(),
        var_index: cand.var_index,
        grouping: cand.grouping.clone(),
        group_labels,
        statistic: cand.statistic,
        df: cand.df,
        adjusted_p: cand.adjusted_p,
    });
    for rows in child_rows {
        node.children.push(build_node(dataset, rows, depth + 1, predictors, params)?);
    }
    Ok(node)
}

fn majority_index(class_counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in class_counts.iter().enumerate() {
        if c > class_counts[best] {
            best = i;
        }
    }
    best
}

fn assign_ids_breadth_first(root: &mut ChaidNode) {
    let mut next = 1u32;
    let mut queue: std::collections::VecDeque<&mut ChaidNode> = std::collections::VecDeque::new();
    queue.push_back(root);
    while let Some(node) = queue.pop_front() {
        node.id = next;
        next += 1;
        for child in &mut node.children {
            queue.push_back(child);
        }
    }
}

/// Route a record through the tree. A missing value on a split variable routes
/// to the child with the largest count.
pub fn predict(tree: &ChaidTree, schema: &DatasetSchema, record: &Record) -> Result<Prediction> {
    if schema.fingerprint() != tree.schema_fingerprint {
        return Err(Error::Tree("record schema does not match the tree's schema".into()));
    }
    let mut node = &tree.root;
    while let Some(split) = &node.split {
        let child_idx = match record.value(split.var_index) {
            Some(cat) => split
                .grouping
                .groups
                .iter()
                .position(|g| g.contains(&cat))
                .ok_or_else(|| Error::Tree("split grouping does not cover category".into()))?,
            None => (0..node.children.len())
                .max_by_key(|&i| (node.children[i].count, std::cmp::Reverse(i)))
                .unwrap(),
        };
        node = &node.children[child_idx];
    }
    let total: u32 = node.class_counts.iter().sum();
    let distribution = node
        .class_counts
        .iter()
        .map(|&c| f64::from(c) / f64::from(total.max(1)))
        .collect();
    Ok(Prediction { class: node.majority_class, distribution, leaf_id: node.id })
}

/// Tree export formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// Graphviz DOT for visualization.
    Dot,
    /// Structured plain text (JSON with stable field order); round-trippable
    /// via [`import_tree`]. This is the persisted model format.
    Structured,
}

pub fn export_tree(tree: &ChaidTree, format: ExportFormat) -> String {
    match format {
        ExportFormat::Structured => {
            serde_json::to_string_pretty(tree).expect("tree serialization cannot fail")
        }
        ExportFormat::Dot => export_dot(tree),
    }
}

pub fn import_tree(text: &str) -> Result<ChaidTree> {
    let tree: ChaidTree =
        serde_json::from_str(text).map_err(|e| Error::Model(format!("bad tree file: {e}")))?;
    if tree.format_version != 1 {
        return Err(Error::Model(format!("unsupported tree format version {}", tree.format_version)));
    }
    Ok(tree)
}

fn export_dot(tree: &ChaidTree) -> String {
    let mut out = String::from("digraph chaid {\n  node [shape=box];\n");
    let mut stack = vec![&tree.root];
    while let Some(node) = stack.pop() {
        out.push_str(&format!(
            "  n{} [label=\"ID={}, N={}, class={}\"];\n",
            node.id, node.id, node.count, node.majority_class
        ));
        if let Some(split) = &node.split {
            for (child, labels) in node.children.iter().zip(&split.group_labels) {
                out.push_str(&format!(
                    "  n{} -> n{} [label=\"{} = {}\"];\n",
                    node.id,
                    child.id,
                    split.variable,
                    escape_dot(&labels.join(" or "))
                ));
            }
        }
        for child in node.children.iter().rev() {
            stack.push(child);
        }
    }
    out.push_str("}\n");
    out
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{DatasetSchema, VariableSchema, GRADE_LABELS};

    fn schema_with(vars: Vec<VariableSchema>) -> DatasetSchema {
        let mut all = vars;
        all.push(VariableSchema::new("HScGrade", VarKind::Nominal, &GRADE_LABELS));
        DatasetSchema::new(all, "HScGrade").unwrap()
    }

    fn dataset(schema: DatasetSchema, rows: Vec<Vec<Option<usize>>>) -> Dataset {
        let records = rows.into_iter().map(|values| Record { values }).collect();
        Dataset::new(schema, records, "test").unwrap()
    }

    /// n records per (category, class) pair for a single binary predictor.
    fn two_cat_dataset(per_cell: [[usize; 2]; 2]) -> Dataset {
        let schema = schema_with(vec![VariableSchema::new("X", VarKind::Nominal, &["a", "b"])]);
        let mut rows = Vec::new();
        for (cat, classes) in per_cell.iter().enumerate() {
            for (class, &n) in classes.iter().enumerate() {
                for _ in 0..n {
                    rows.push(vec![Some(cat), Some(class)]);
                }
            }
        }
        dataset(schema, rows)
    }

    #[test]
    fn merge_identical_distributions() {
        // both categories 50/50 over two classes: pairwise p = 1 > 0.05
        let ds = two_cat_dataset([[50, 50], [50, 50]]);
        let view = DataView::all(&ds);
        let grouping = merge_categories(&view, 0, &ChaidParams::default()).unwrap();
        assert_eq!(grouping.groups.len(), 1);
    }

    #[test]
    fn merge_keeps_disjoint_support_apart() {
        let ds = two_cat_dataset([[50, 0], [0, 50]]);
        let view = DataView::all(&ds);
        let grouping = merge_categories(&view, 0, &ChaidParams::default()).unwrap();
        assert_eq!(grouping.groups, vec![vec![0], vec![1]]);
    }

    #[test]
    fn merge_single_category_identity() {
        let schema = schema_with(vec![VariableSchema::new("X", VarKind::Nominal, &["only"])]);
        let ds = dataset(schema, vec![vec![Some(0), Some(0)], vec![Some(0), Some(1)]]);
        let view = DataView::all(&ds);
        let grouping = merge_categories(&view, 0, &ChaidParams::default()).unwrap();
        assert_eq!(grouping.groups, vec![vec![0]]);
    }

    #[test]
    fn merge_ordinal_stays_contiguous() {
        let schema = schema_with(vec![VariableSchema::new(
            "X",
            VarKind::Ordinal,
            &["v1", "v2", "v3", "v4"],
        )]);
        // v1,v2 lean class 0; v3,v4 lean class 1
        let mut rows = Vec::new();
        for (cat, (a, b)) in [(40usize, 5usize), (38, 6), (5, 41), (6, 39)].iter().enumerate() {
            for _ in 0..*a {
                rows.push(vec![Some(cat), Some(0)]);
            }
            for _ in 0..*b {
                rows.push(vec![Some(cat), Some(1)]);
            }
        }
        let ds = dataset(schema, rows);
        let view = DataView::all(&ds);
        let grouping = merge_categories(&view, 0, &ChaidParams::default()).unwrap();
        assert!(grouping.is_contiguous());
        assert_eq!(grouping.groups, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn evaluate_split_pure_node_absent() {
        let ds = two_cat_dataset([[30, 0], [30, 0]]);
        let view = DataView::all(&ds);
        let cand = evaluate_split(&view, 0, &ChaidParams::default()).unwrap();
        assert!(cand.is_none());
    }

    #[test]
    fn evaluate_split_perfect_separation() {
        let ds = two_cat_dataset([[100, 0], [0, 100]]);
        let view = DataView::all(&ds);
        let cand = evaluate_split(&view, 0, &ChaidParams::default()).unwrap().unwrap();
        assert!((cand.statistic - 200.0).abs() < 1e-9);
        assert_eq!(cand.df, 1);
        assert!(cand.adjusted_p < 1e-10);
    }

    #[test]
    fn evaluate_split_bonferroni_multiplier() {
        // 5 nominal categories, two class-profiles -> merges to 2 groups;
        // adjusted p should be min(1, 15 * p) with S(5,2) = 15
        let schema = schema_with(vec![VariableSchema::new(
            "X",
            VarKind::Nominal,
            &["a", "b", "c", "d", "e"],
        )]);
        let mut rows = Vec::new();
        for cat in 0..5usize {
            let (n0, n1) = if cat < 2 { (30, 6) } else { (6, 30) };
            for _ in 0..n0 {
                rows.push(vec![Some(cat), Some(0)]);
            }
            for _ in 0..n1 {
                rows.push(vec![Some(cat), Some(1)]);
            }
        }
        let ds = dataset(schema, rows);
        let view = DataView::all(&ds);
        let with = evaluate_split(&view, 0, &ChaidParams::default()).unwrap().unwrap();
        let without = evaluate_split(
            &view,
            0,
            &ChaidParams { use_bonferroni: false, ..ChaidParams::default() },
        )
        .unwrap()
        .unwrap();
        assert_eq!(with.grouping.groups.len(), 2);
        assert!((with.adjusted_p - (15.0 * without.p_value).min(1.0)).abs() < 1e-15);
        assert_eq!(without.adjusted_p, without.p_value);
    }

    #[test]
    fn grow_pure_dataset_single_node() {
        let ds = two_cat_dataset([[40, 0], [40, 0]]);
        let tree = grow_tree(&ds, &["X".into()], &ChaidParams::default()).unwrap();
        assert!(tree.root.is_leaf());
        assert_eq!(tree.root.id, 1);
        assert_eq!(tree.root.majority_class, Grade::O);
    }

    fn planted_dataset() -> Dataset {
        // binary M fully determines class (O vs A here); plus a noise variable
        let schema = schema_with(vec![
            VariableSchema::new("M", VarKind::Nominal, &["left", "right"]),
            VariableSchema::new("Z", VarKind::Nominal, &["p", "q", "r"]),
        ]);
        let mut rows = Vec::new();
        for i in 0..400usize {
            let m = i % 2;
            let z = (i * 7 + 3) % 3;
            rows.push(vec![Some(m), Some(z), Some(m)]);
        }
        dataset(schema, rows)
    }

    #[test]
    fn grow_planted_root_split() {
        let ds = planted_dataset();
        let tree =
            grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let split = tree.root.split.as_ref().expect("root must split");
        assert_eq!(split.variable, "M");
        assert_eq!(tree.root.children.len(), 2);
        assert!(tree.root.children.iter().all(|c| c.is_leaf()));
        // breadth-first ids
        assert_eq!(tree.root.id, 1);
        assert_eq!(tree.root.children[0].id, 2);
        assert_eq!(tree.root.children[1].id, 3);
    }

    #[test]
    fn grow_child_counts_sum() {
        let ds = planted_dataset();
        let tree =
            grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let sum: u32 = tree.root.children.iter().map(|c| c.count).sum();
        assert_eq!(sum, tree.root.count);
    }

    #[test]
    fn predict_routes_and_missing() {
        let ds = planted_dataset();
        let tree =
            grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let rec = Record { values: vec![Some(0), Some(1), None] };
        let p = predict(&tree, &ds.schema, &rec).unwrap();
        assert_eq!(p.class, Grade::O);
        assert_eq!(p.distribution[0], 1.0);

        // missing M routes to the larger child (both 200 here: first wins)
        let rec = Record { values: vec![None, Some(1), None] };
        let p = predict(&tree, &ds.schema, &rec).unwrap();
        assert_eq!(p.leaf_id, 2);
    }

    #[test]
    fn predict_rejects_wrong_schema() {
        let ds = planted_dataset();
        let tree = grow_tree(&ds, &["M".into()], &ChaidParams::default()).unwrap();
        let other = schema_with(vec![VariableSchema::new("Q", VarKind::Nominal, &["x", "y"])]);
        let rec = Record { values: vec![Some(0), Some(0)] };
        assert!(predict(&tree, &other, &rec).is_err());
    }

    #[test]
    fn export_structured_round_trip() {
        let ds = planted_dataset();
        let tree =
            grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let text = export_tree(&tree, ExportFormat::Structured);
        let back = import_tree(&text).unwrap();
        assert_eq!(tree, back);
    }

    #[test]
    fn export_dot_shapes() {
        let ds = two_cat_dataset([[40, 0], [40, 0]]);
        let single = grow_tree(&ds, &["X".into()], &ChaidParams::default()).unwrap();
        let dot = export_tree(&single, ExportFormat::Dot);
        assert_eq!(dot.matches("label=\"ID=").count(), 1);
        assert!(!dot.contains("->"));

        let ds = planted_dataset();
        let tree =
            grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let dot = export_tree(&tree, ExportFormat::Dot);
        assert_eq!(dot.matches("label=\"ID=").count(), 3);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("M = left"));
    }

    #[test]
    fn params_validation() {
        assert!(ChaidParams::default().validate().is_ok());
        assert!(ChaidParams { alpha_merge: 0.0, ..ChaidParams::default() }.validate().is_err());
        assert!(ChaidParams { min_child: 30, ..ChaidParams::default() }.validate().is_err());
    }
}
