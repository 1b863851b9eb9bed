//! Distinct-attribute detection: profiling, value similarity, clustering of
//! spelling variants and synonyms, and limited/non-limited classification.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::Serialize;

use crate::algebra::distinct_value_counts;
use crate::error::Result;
use crate::ingest::{AnalysisConfig, AnnotationKind};
use crate::model::{AttrType, Database, RelationInstance, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeProfile {
    pub relation: String,
    pub attribute: String,
    pub row_count: usize,
    pub non_null_count: usize,
    pub distinct_count: usize,
    pub distinct_ratio: f64,
    pub annotation: Option<AnnotationKind>,
}

pub fn profile_attribute(instance: &RelationInstance, attr: &str, config: &AnalysisConfig) -> Result<AttributeProfile> {
    let counts = distinct_value_counts(instance, attr)?;
    let non_null_count: usize = counts.values().sum();
    Ok(AttributeProfile {
        relation: instance.name().to_string(),
        attribute: attr.to_string(),
        row_count: instance.len(),
        non_null_count,
        distinct_count: counts.len(),
        distinct_ratio: counts.len() as f64 / non_null_count.max(1) as f64,
        annotation: config.annotation(instance.name(), attr),
    })
}

/// Which rule made two values similar; the first matching rule wins.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Evidence {
    ExactCasefold,
    Synonym,
    Edit { edits: usize, distance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Similarity {
    NotSimilar,
    Similar(Evidence),
}

impl Similarity {
    pub fn is_similar(&self) -> bool {
        matches!(self, Similarity::Similar(_))
    }
}

fn normalize(s: &str, casefold: bool) -> String {
    if casefold {
        s.trim().to_lowercase()
    } else {
        s.to_string()
    }
}

/// Unrestricted Damerau–Levenshtein distance over Unicode scalar values
/// (insertions, deletions, substitutions and transpositions of adjacent
/// characters, with no restriction on editing a substring twice).
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return n.max(m);
    }
    let inf = n + m;
    let width = m + 2;
    let mut d = vec![0usize; (n + 2) * width];
    let at = |i: usize, j: usize| i * width + j;
    d[at(0, 0)] = inf;
    for i in 0..=n {
        d[at(i + 1, 0)] = inf;
        d[at(i + 1, 1)] = i;
    }
    for j in 0..=m {
        d[at(0, j + 1)] = inf;
        d[at(1, j + 1)] = j;
    }
    let mut last_row: HashMap<char, usize> = HashMap::new();
    for i in 1..=n {
        let mut last_match_col = 0;
        for j in 1..=m {
            let i1 = last_row.get(&b[j - 1]).copied().unwrap_or(0);
            let j1 = last_match_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_match_col = j;
                0
            } else {
                1
            };
            d[at(i + 1, j + 1)] = (d[at(i, j)] + cost)
                .min(d[at(i + 1, j)] + 1)
                .min(d[at(i, j + 1)] + 1)
                .min(d[at(i1, j1)] + (i - i1 - 1) + 1 + (j - j1 - 1));
        }
        last_row.insert(a[i - 1], i);
    }
    d[at(n + 1, m + 1)]
}

/// Similar iff equal after casefold+trim, or in one synonym group, or the
/// normalized edit distance `edits / max(len)` is within `edit_threshold`.
pub fn similar(a: &str, b: &str, config: &AnalysisConfig) -> Similarity {
    let (na, nb) = (normalize(a, config.casefold), normalize(b, config.casefold));
    if na == nb {
        return Similarity::Similar(Evidence::ExactCasefold);
    }
    let group = |v: &str| config.synonym_groups.iter().position(|g| g.contains(v));
    if let (Some(ga), Some(gb)) = (group(a), group(b)) {
        if ga == gb {
            return Similarity::Similar(Evidence::Synonym);
        }
    }
    let (la, lb) = (na.chars().count(), nb.chars().count());
    let longest = la.max(lb) as f64;
    // The distance is at least the length difference.
    if la.abs_diff(lb) as f64 / longest > config.edit_threshold {
        return Similarity::NotSimilar;
    }
    let edits = damerau_levenshtein(&na, &nb);
    let distance = edits as f64 / longest;
    if distance <= config.edit_threshold {
        Similarity::Similar(Evidence::Edit { edits, distance })
    } else {
        Similarity::NotSimilar
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEvidence {
    pub a: Value,
    pub b: Value,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCluster {
    /// Observed values, in first-occurrence order.
    pub members: Vec<Value>,
    pub canonical: Value,
    pub evidence: Vec<PairEvidence>,
}

impl ValueCluster {
    pub fn contains(&self, v: &Value) -> bool {
        self.members.contains(v) || &self.canonical == v
    }
}

/// Groups values into connected components of the [`similar`] graph.
///
/// A synonym group's designated canonical joins the graph even when the data
/// never spells it, so canonicals of different clusters are never similar.
/// The canonical is that designated value when the cluster holds one,
/// otherwise the most frequent member, ties going to the smallest value.
/// Non-text values pass through as singletons.
pub fn cluster_values(values: &IndexMap<Value, usize>, config: &AnalysisConfig) -> Vec<ValueCluster> {
    let mut nodes: Vec<(Value, usize, bool)> = values
        .iter()
        .filter(|(v, _)| !v.is_null())
        .map(|(v, &c)| (v.clone(), c, true))
        .collect();
    for group in &config.synonym_groups {
        let Some(canon) = &group.canonical else { continue };
        let touched = group
            .values
            .iter()
            .any(|g| values.contains_key(&Value::Text(g.clone())));
        let present = values.contains_key(&Value::Text(canon.clone()));
        if touched && !present {
            nodes.push((Value::Text(canon.clone()), 0, false));
        }
    }

    let mut dsu = DisjointSet::new(nodes.len());
    let mut edges: Vec<(usize, usize, Evidence)> = Vec::new();
    for i in 0..nodes.len() {
        let Value::Text(a) = &nodes[i].0 else { continue };
        for (j, (other, _, _)) in nodes.iter().enumerate().skip(i + 1) {
            let Value::Text(b) = other else { continue };
            if let Similarity::Similar(ev) = similar(a, b, config) {
                dsu.union(i, j);
                edges.push((i, j, ev));
            }
        }
    }

    let mut order: Vec<usize> = Vec::new();
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..nodes.len() {
        let root = dsu.find(i);
        let entry = by_root.entry(root).or_default();
        if entry.is_empty() {
            order.push(root);
        }
        entry.push(i);
    }

    let designated = |v: &Value| {
        v.as_text()
            .is_some_and(|s| config.synonym_groups.iter().any(|g| g.canonical.as_deref() == Some(s)))
    };
    let pick = |candidates: Vec<usize>| -> usize {
        candidates
            .into_iter()
            .min_by(|&x, &y| nodes[y].1.cmp(&nodes[x].1).then_with(|| nodes[x].0.cmp(&nodes[y].0)))
            .expect("nonempty")
    };

    let mut clusters = Vec::new();
    for root in order {
        let idx = &by_root[&root];
        let members: Vec<Value> = idx
            .iter()
            .filter(|&&i| nodes[i].2)
            .map(|&i| nodes[i].0.clone())
            .collect();
        if members.is_empty() {
            continue;
        }
        let canon_candidates: Vec<usize> = idx.iter().copied().filter(|&i| designated(&nodes[i].0)).collect();
        let canonical = if canon_candidates.is_empty() {
            pick(idx.iter().copied().filter(|&i| nodes[i].2).collect())
        } else {
            pick(canon_candidates)
        };
        let evidence = edges
            .iter()
            .filter(|(i, _, _)| dsu.find(*i) == root)
            .map(|(i, j, ev)| PairEvidence {
                a: nodes[*i].0.clone(),
                b: nodes[*j].0.clone(),
                evidence: ev.clone(),
            })
            .collect();
        clusters.push(ValueCluster {
            members,
            canonical: nodes[canonical].0.clone(),
            evidence,
        });
    }
    clusters
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeClass {
    LimitedDistinct,
    NonLimitedDistinct,
    NotDistinct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeClassification {
    pub relation: String,
    pub attribute: String,
    pub class: AttributeClass,
    pub reason: String,
    pub profile: AttributeProfile,
}

/// Classifies every attribute of every relation.
///
/// An attribute is distinct when annotated so, or (unannotated, textual) when
/// its distinct count, distinct ratio and row count meet the configured
/// thresholds. A distinct attribute is limited when its type is enumerated or
/// a foreign key ties it to a lookup table. Primary-key attributes are never
/// distinct.
pub fn classify_attributes(db: &Database, config: &AnalysisConfig) -> Result<Vec<AttributeClassification>> {
    check_annotations(db, config)?;
    let mut out = Vec::new();
    for inst in db.instances() {
        let decl = inst.decl();
        for attr in &decl.attributes {
            let profile = profile_attribute(inst, &attr.name, config)?;
            let (class, reason) = classify_one(db, inst, &attr.name, &attr.ty, &profile, config);
            out.push(AttributeClassification {
                relation: decl.name.clone(),
                attribute: attr.name.clone(),
                class,
                reason,
                profile,
            });
        }
    }
    Ok(out)
}

fn classify_one(
    db: &Database,
    inst: &RelationInstance,
    attr: &str,
    ty: &AttrType,
    profile: &AttributeProfile,
    config: &AnalysisConfig,
) -> (AttributeClass, String) {
    let decl = inst.decl();
    if decl.is_key_attribute(attr) {
        return (AttributeClass::NotDistinct, "primary-key attribute".into());
    }
    let distinct_reason = match profile.annotation {
        Some(AnnotationKind::NotDistinct) => {
            return (AttributeClass::NotDistinct, "annotated not_distinct".into());
        }
        Some(AnnotationKind::Distinct) => "annotated distinct".to_string(),
        None => {
            if !ty.is_textual() {
                return (
                    AttributeClass::NotDistinct,
                    format!("{ty} attributes are distinct only by annotation"),
                );
            }
            let ok = profile.distinct_count <= config.distinct_max_values
                && profile.distinct_ratio <= config.distinct_max_ratio
                && profile.row_count >= config.distinct_min_rows;
            if !ok {
                return (
                    AttributeClass::NotDistinct,
                    format!(
                        "{} distinct of {} values (ratio {:.3}) over {} rows does not meet max_values {}, max_ratio {}, min_rows {}",
                        profile.distinct_count,
                        profile.non_null_count,
                        profile.distinct_ratio,
                        profile.row_count,
                        config.distinct_max_values,
                        config.distinct_max_ratio,
                        config.distinct_min_rows
                    ),
                );
            }
            format!(
                "{} distinct values (ratio {:.3}) over {} rows",
                profile.distinct_count, profile.distinct_ratio, profile.row_count
            )
        }
    };
    if let AttrType::Enumerated(_) = ty {
        return (
            AttributeClass::LimitedDistinct,
            format!("{distinct_reason}; limited by enumerated type"),
        );
    }
    if let Some(fk) = decl.foreign_key_on(attr) {
        if let Some(target) = db.schema().relation(&fk.target) {
            if target.is_lookup() {
                return (
                    AttributeClass::LimitedDistinct,
                    format!("{distinct_reason}; limited by lookup table {}", target.name),
                );
            }
        }
    }
    (
        AttributeClass::NonLimitedDistinct,
        format!("{distinct_reason}; no enumerated type or lookup table constrains it"),
    )
}

/// Fails with the offending name when an annotation points nowhere.
pub fn check_annotations(db: &Database, config: &AnalysisConfig) -> Result<()> {
    for a in &config.annotations {
        let rel = db.schema().require(&a.relation)?;
        rel.require_index(&a.attribute)?;
    }
    Ok(())
}
