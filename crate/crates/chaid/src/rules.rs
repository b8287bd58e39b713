//! IF-THEN rule extraction from tree paths, support-based pruning, and rule
//! application to records.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::schema::{DatasetSchema, Grade, Record};
use crate::tree::{ChaidNode, ChaidTree};

/// One conjunct: the record's value for `variable` must lie in `categories`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub variable: String,
    pub var_index: usize,
    /// Sorted category indices into the variable's domain.
    pub categories: Vec<usize>,
    /// The matching domain labels, for display.
    pub labels: Vec<String>,
}

impl Condition {
    pub fn holds(&self, record: &Record) -> bool {
        match record.value(self.var_index) {
            Some(v) => self.categories.contains(&v),
            None => false,
        }
    }
}

/// A root-to-leaf classification rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub consequent: Grade,
    /// Training records at the rule's leaf.
    pub support: u32,
    /// Majority-class proportion at the leaf.
    pub confidence: f64,
    pub leaf_id: u32,
}

/// All rules of one tree plus the fallback class (the root majority).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub default_class: Grade,
    pub response: String,
}

/// One rule per leaf, conditions in root-to-leaf order. Repeated conditions on
/// the same variable along a path are intersected into a single condition.
pub fn extract_rules(tree: &ChaidTree) -> RuleSet {
    let mut rules = Vec::new();
    let mut path: Vec<Condition> = Vec::new();
    walk(&tree.root, &mut path, &mut rules);
    RuleSet {
        rules,
        default_class: tree.root.majority_class,
        response: tree.response.clone(),
    }
}

fn walk(node: &ChaidNode, path: &mut Vec<Condition>, rules: &mut Vec<Rule>) {
    match &node.split {
        None => {
            // a root-only tree yields no condition-bearing rules
            if !path.is_empty() {
                let majority: u32 = node.class_counts.iter().copied().max().unwrap_or(0);
                rules.push(Rule {
                    conditions: path.clone(),
                    consequent: node.majority_class,
                    support: node.count,
                    confidence: f64::from(majority) / f64::from(node.count.max(1)),
                    leaf_id: node.id,
                });
            }
        }
        Some(split) => {
            for (child, (group, labels)) in node
                .children
                .iter()
                .zip(split.grouping.groups.iter().zip(&split.group_labels))
            {
                let cond = Condition {
                    variable: split.variable.clone(),
                    var_index: split.var_index,
                    categories: group.clone(),
                    labels: labels.clone(),
                };
                let merged = merge_into_path(path, cond);
                walk(child, path, rules);
                restore_path(path, merged);
            }
        }
    }
}

enum PathEdit {
    Pushed,
    Intersected { at: usize, previous: Condition },
}

fn merge_into_path(path: &mut Vec<Condition>, cond: Condition) -> PathEdit {
    if let Some(at) = path.iter().position(|c| c.var_index == cond.var_index) {
        let previous = path[at].clone();
        let inter: Vec<usize> = previous
            .categories
            .iter()
            .copied()
            .filter(|c| cond.categories.contains(c))
            .collect();
        let labels = previous
            .labels
            .iter()
            .zip(&previous.categories)
            .filter(|(_, c)| inter.contains(c))
            .map(|(l, _)| l.clone())
            .collect();
        path[at] = Condition { categories: inter, labels, ..previous.clone() };
        PathEdit::Intersected { at, previous }
    } else {
        path.push(cond);
        PathEdit::Pushed
    }
}

fn restore_path(path: &mut Vec<Condition>, edit: PathEdit) {
    match edit {
        PathEdit::Pushed => {
            path.pop();
        }
        PathEdit::Intersected { at, previous } => {
            path[at] = previous;
        }
    }
}

/// Remove rules with support below `min_support`; the default class is kept.
pub fn prune_rules(ruleset: &RuleSet, min_support: u32) -> RuleSet {
    RuleSet {
        rules: ruleset
            .rules
            .iter()
            .filter(|r| r.support >= min_support)
            .cloned()
            .collect(),
        default_class: ruleset.default_class,
        response: ruleset.response.clone(),
    }
}

/// Apply a rule set: the first rule whose every condition holds fires; with no
/// match the default class is returned.
pub fn apply_rules(ruleset: &RuleSet, record: &Record) -> (Grade, Option<usize>) {
    for (i, rule) in ruleset.rules.iter().enumerate() {
        if rule.conditions.iter().all(|c| c.holds(record)) {
            return (rule.consequent, Some(i));
        }
    }
    (ruleset.default_class, None)
}

/// Render one rule in the readable textual style:
/// `IF X = 'a' or 'b' and Y = 'c' THEN HScGrade = 'B'`.
pub fn format_rule(rule: &Rule, response: &str) -> String {
    if rule.conditions.is_empty() {
        return format!("THEN {} = '{}'", response, rule.consequent);
    }
    let conds: Vec<String> = rule
        .conditions
        .iter()
        .map(|c| {
            let vals: Vec<String> = c.labels.iter().map(|l| format!("'{l}'")).collect();
            format!("{} = {}", c.variable, vals.join(" or "))
        })
        .collect();
    format!("IF {} THEN {} = '{}'", conds.join(" and "), response, rule.consequent)
}

/// Render a whole rule set with support and confidence columns.
pub fn format_ruleset(ruleset: &RuleSet) -> String {
    let mut out = String::new();
    for rule in &ruleset.rules {
        out.push_str(&format!(
            "{}  [support={}, confidence={:.2}]\n",
            format_rule(rule, &ruleset.response),
            rule.support,
            rule.confidence
        ));
    }
    out.push_str(&format!("DEFAULT {} = '{}'\n", ruleset.response, ruleset.default_class));
    out
}

/// Convenience: check a record against the schema the rules were trained on.
pub fn apply_rules_checked(
    ruleset: &RuleSet,
    schema: &DatasetSchema,
    record: &Record,
) -> Result<(Grade, Option<usize>)> {
    if record.values.len() != schema.variables().len() {
        return Err(crate::error::Error::Rules(format!(
            "record has {} values, schema has {}",
            record.values.len(),
            schema.variables().len()
        )));
    }
    Ok(apply_rules(ruleset, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{DataView, Dataset, DatasetSchema, VarKind, VariableSchema, GRADE_LABELS};
    use crate::tree::{grow_tree, predict, ChaidParams};

    fn planted() -> Dataset {
        let schema = DatasetSchema::new(
            vec![
                VariableSchema::new("M", VarKind::Nominal, &["left", "right"]),
                VariableSchema::new("Z", VarKind::Nominal, &["p", "q", "r"]),
                VariableSchema::new("HScGrade", VarKind::Nominal, &GRADE_LABELS),
            ],
            "HScGrade",
        )
        .unwrap();
        let mut records = Vec::new();
        for i in 0..400usize {
            records.push(crate::schema::Record {
                values: vec![Some(i % 2), Some((i * 7 + 1) % 3), Some(i % 2)],
            });
        }
        Dataset::new(schema, records, "test").unwrap()
    }

    #[test]
    fn single_node_tree_has_no_rules() {
        let ds = planted();
        // min_parent above n forces a single node
        let params = ChaidParams { min_parent: 500, min_child: 400, ..ChaidParams::default() };
        let tree = grow_tree(&ds, &["M".into(), "Z".into()], &params).unwrap();
        let rs = extract_rules(&tree);
        assert!(rs.rules.is_empty());
        assert_eq!(rs.default_class, tree.root.majority_class);
    }

    #[test]
    fn depth_one_tree_two_rules() {
        let ds = planted();
        let tree = grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let rs = extract_rules(&tree);
        assert_eq!(rs.rules.len(), 2);
        for r in &rs.rules {
            assert_eq!(r.conditions.len(), 1);
            assert_eq!(r.confidence, 1.0);
        }
        let total: u32 = rs.rules.iter().map(|r| r.support).sum();
        assert_eq!(total, tree.root.count);
    }

    #[test]
    fn prune_by_support() {
        let ds = planted();
        let tree = grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let rs = extract_rules(&tree);
        assert_eq!(prune_rules(&rs, 0).rules.len(), rs.rules.len());
        let gone = prune_rules(&rs, 10_000);
        assert!(gone.rules.is_empty());
        assert_eq!(gone.default_class, rs.default_class);
        // monotone nesting
        let a = prune_rules(&rs, 150);
        let b = prune_rules(&rs, 100);
        for r in &a.rules {
            assert!(b.rules.contains(r));
        }
    }

    #[test]
    fn rules_match_tree_predictions() {
        let ds = planted();
        let tree = grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let rs = extract_rules(&tree);
        let view = DataView::all(&ds);
        for i in 0..view.len() {
            let rec = &ds.records[i];
            let by_tree = predict(&tree, &ds.schema, rec).unwrap().class;
            let (by_rules, matched) = apply_rules(&rs, rec);
            assert_eq!(by_tree, by_rules);
            assert!(matched.is_some());
        }
    }

    #[test]
    fn empty_ruleset_falls_to_default() {
        let ds = planted();
        let tree = grow_tree(&ds, &["M".into()], &ChaidParams::default()).unwrap();
        let rs = prune_rules(&extract_rules(&tree), u32::MAX);
        let (class, matched) = apply_rules(&rs, &ds.records[0]);
        assert_eq!(class, rs.default_class);
        assert!(matched.is_none());
    }

    #[test]
    fn rule_formatting() {
        let ds = planted();
        let tree = grow_tree(&ds, &["M".into(), "Z".into()], &ChaidParams::default()).unwrap();
        let rs = extract_rules(&tree);
        let text = format_rule(&rs.rules[0], "HScGrade");
        assert!(text.starts_with("IF M = 'left'"), "{text}");
        assert!(text.contains("THEN HScGrade = "), "{text}");
    }
}
