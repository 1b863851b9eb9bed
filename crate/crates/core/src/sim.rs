//! Workload replay against raw and LDNF databases, counting the anomalies
//! each layout admits, plus a group-by cost comparison.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Literal, Operation};
use crate::ldnf::{plan_clusters, AttrRef, DecompositionPlan};
use crate::model::{AttrType, Database, RelationDecl, RelationInstance, Row, Value};
use crate::nlda::ValueCluster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Raw,
    Ldnf,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Ldnf => "ldnf",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Mode::Raw),
            "ldnf" => Ok(Mode::Ldnf),
            other => Err(format!("unknown mode `{other}` (expected raw or ldnf)")),
        }
    }
}

/// Concept membership per attribute: which raw values denote the same thing.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConceptMap {
    entries: Vec<(AttrRef, Vec<ValueCluster>)>,
}

impl ConceptMap {
    pub fn new(entries: Vec<(AttrRef, Vec<ValueCluster>)>) -> Self {
        ConceptMap { entries }
    }

    /// Clusters recorded in `plan`, typed against `db`'s columns.
    pub fn from_plan(db: &Database, plan: &DecompositionPlan) -> Result<Self> {
        Ok(ConceptMap::new(plan_clusters(db, plan)?))
    }

    pub fn clusters(&self, relation: &str, attribute: &str) -> &[ValueCluster] {
        self.entries
            .iter()
            .find(|(r, _)| r.relation.eq_ignore_ascii_case(relation) && r.attribute == attribute)
            .map_or(&[], |(_, c)| c.as_slice())
    }

    pub fn cluster_of(&self, relation: &str, attribute: &str, v: &Value) -> Option<&ValueCluster> {
        self.clusters(relation, attribute).iter().find(|c| c.contains(v))
    }

    pub fn canonical(&self, relation: &str, attribute: &str, v: &Value) -> Value {
        self.cluster_of(relation, attribute, v)
            .map_or_else(|| v.clone(), |c| c.canonical.clone())
    }

    /// Renames `old` to `new` inside the attribute's clusters. When `new`
    /// already names another cluster the two merge.
    fn rename(&mut self, relation: &str, attribute: &str, old: &Value, new: &Value) {
        let Some((_, clusters)) = self
            .entries
            .iter_mut()
            .find(|(r, _)| r.relation.eq_ignore_ascii_case(relation) && r.attribute == attribute)
        else {
            return;
        };
        let Some(from) = clusters.iter().position(|c| c.contains(old)) else {
            return;
        };
        let mut moved = clusters.remove(from);
        for m in moved.members.iter_mut().filter(|m| *m == old) {
            *m = new.clone();
        }
        if &moved.canonical == old {
            moved.canonical = new.clone();
        }
        if let Some(into) = clusters.iter_mut().find(|c| c.contains(new)) {
            for m in moved.members {
                if !into.members.contains(&m) {
                    into.members.push(m);
                }
            }
        } else {
            clusters.insert(from, moved);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimOptions {
    /// Raw-mode renames and concept updates write only the first `k` matching
    /// rows, leaving the rest inconsistent.
    pub fault: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LostValue {
    pub relation: String,
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub index: usize,
    pub op: &'static str,
    pub relation: String,
    pub matched_rows: usize,
    pub written_rows: usize,
    /// 1-based positions of rows left behind by a concept update.
    pub stale_rows: Vec<usize>,
    pub update_sites: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lost_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
}

impl TraceEntry {
    fn new(index: usize, op: &Operation) -> Self {
        TraceEntry {
            index,
            op: op.name(),
            relation: op.relation().to_string(),
            matched_rows: 0,
            written_rows: 0,
            stale_rows: Vec::new(),
            update_sites: 0,
            lost_value: None,
            rejected: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnomalyReport {
    pub mode: Mode,
    pub stale_rows: usize,
    pub update_sites: usize,
    pub lost_values: Vec<LostValue>,
    pub rejected_inserts: usize,
    /// Concept updates refused because the new value is outside a limited set.
    pub rejected_updates: usize,
    pub trace: Vec<TraceEntry>,
}

/// How an attribute is limited in the working state.
enum Limit {
    None,
    Lookup { table: usize, column: usize },
    Enum,
}

struct Workspace {
    relations: Vec<(RelationDecl, Vec<Row>)>,
}

impl Workspace {
    fn slot(&self, relation: &str) -> Result<usize> {
        self.relations
            .iter()
            .position(|(d, _)| d.name.eq_ignore_ascii_case(relation))
            .ok_or_else(|| Error::UnknownRelation(relation.to_string()))
    }

    fn limit(&self, rel: usize, attr: usize) -> Limit {
        let decl = &self.relations[rel].0;
        let name = &decl.attributes[attr].name;
        if let AttrType::Enumerated(_) = decl.attributes[attr].ty {
            return Limit::Enum;
        }
        if let Some(fk) = decl.foreign_key_on(name) {
            if let Ok(t) = self.slot(&fk.target) {
                let target = &self.relations[t].0;
                if target.is_lookup() {
                    if let Some(c) = target.index_of(&fk.target_columns[0]) {
                        return Limit::Lookup { table: t, column: c };
                    }
                }
            }
        }
        Limit::None
    }

    fn is_member(&self, rel: usize, attr: usize, v: &Value) -> bool {
        if v.is_null() {
            return true;
        }
        match self.limit(rel, attr) {
            Limit::None => true,
            Limit::Enum => v.fits(&self.relations[rel].0.attributes[attr].ty),
            Limit::Lookup { table, column } => self.relations[table].1.iter().any(|r| &r[column] == v),
        }
    }

    /// Every (relation, attribute) whose foreign key points at `table`.
    fn referencing(&self, table: usize) -> Vec<(usize, usize)> {
        let target = &self.relations[table].0.name;
        let mut out = Vec::new();
        for (r, (decl, _)) in self.relations.iter().enumerate() {
            for fk in decl.foreign_keys.iter().filter(|fk| fk.columns.len() == 1) {
                if fk.target.eq_ignore_ascii_case(target) {
                    if let Some(a) = decl.index_of(&fk.columns[0]) {
                        out.push((r, a));
                    }
                }
            }
        }
        out
    }
}

fn typed(decl: &RelationDecl, attr: usize, lit: &Literal, index: usize) -> Result<Value> {
    let a = &decl.attributes[attr];
    let base = match &a.ty {
        AttrType::Enumerated(_) => AttrType::Text,
        other => other.clone(),
    };
    lit.to_value(&base).ok_or_else(|| Error::WorkloadValue {
        index,
        message: format!("{lit:?} is not a valid {} value for `{}`", a.ty, a.name),
    })
}

/// Replays `workload` on a copy of `db`.
///
/// `concepts` says which values denote one concept, for stale-row
/// accounting. In LDNF mode literal values on planned attributes are first
/// mapped to their canonical, and a stale row is reported as an invariant
/// error rather than counted.
pub fn run_workload(
    db: &Database,
    workload: &[Operation],
    mode: Mode,
    concepts: &ConceptMap,
    options: &SimOptions,
) -> Result<AnomalyReport> {
    let mut ws = Workspace {
        relations: db
            .instances()
            .iter()
            .map(|i| (i.decl().clone(), i.rows().to_vec()))
            .collect(),
    };
    let mut concepts = concepts.clone();
    let mut report = AnomalyReport {
        mode,
        stale_rows: 0,
        update_sites: 0,
        lost_values: Vec::new(),
        rejected_inserts: 0,
        rejected_updates: 0,
        trace: Vec::with_capacity(workload.len()),
    };
    let limit_writes = |matched: usize| match (mode, options.fault) {
        (Mode::Raw, Some(k)) => matched.min(k),
        _ => matched,
    };

    for (index, op) in workload.iter().enumerate() {
        let mut entry = TraceEntry::new(index, op);
        let rel = ws.slot(op.relation())?;
        let rel_name = ws.relations[rel].0.name.clone();
        match op {
            Operation::UpdateConcept {
                concept_attr,
                concept_value,
                set_attr,
                new_value,
                ..
            } => {
                let decl = &ws.relations[rel].0;
                let ci = decl.require_index(concept_attr)?;
                let si = decl.require_index(set_attr)?;
                let mut key = typed(decl, ci, concept_value, index)?;
                let new = typed(decl, si, new_value, index)?;
                if mode == Mode::Ldnf {
                    key = concepts.canonical(&rel_name, concept_attr, &key);
                }
                if mode == Mode::Ldnf && !ws.is_member(rel, si, &new) {
                    entry.rejected = Some(format!("`{}` is not an admissible value of `{set_attr}`", new.render()));
                    report.rejected_updates += 1;
                } else {
                    let cluster = concepts.cluster_of(&rel_name, concept_attr, &key).cloned();
                    let rows = &mut ws.relations[rel].1;
                    let matched: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][ci] == key).collect();
                    let writes = limit_writes(matched.len());
                    for &r in &matched[..writes] {
                        rows[r][si] = new.clone();
                    }
                    entry.matched_rows = matched.len();
                    entry.written_rows = writes;
                    entry.update_sites = writes;
                    entry.stale_rows = matched[writes..].iter().map(|r| r + 1).collect();
                    if let Some(cluster) = cluster {
                        entry.stale_rows.extend(
                            (0..rows.len())
                                .filter(|&r| rows[r][ci] != key && cluster.contains(&rows[r][ci]))
                                .map(|r| r + 1),
                        );
                        entry.stale_rows.sort_unstable();
                    }
                }
            }
            Operation::RenameValue {
                attr,
                old_value,
                new_value,
                ..
            } => {
                let decl = &ws.relations[rel].0;
                let ai = decl.require_index(attr)?;
                let mut old = typed(decl, ai, old_value, index)?;
                let new = typed(decl, ai, new_value, index)?;
                if mode == Mode::Ldnf {
                    old = concepts.canonical(&rel_name, attr, &old);
                }
                match (mode, ws.limit(rel, ai)) {
                    (Mode::Ldnf, Limit::Lookup { table, column }) => {
                        rename_in_lookup(&mut ws, &mut concepts, table, column, &old, &new, &mut entry);
                    }
                    (Mode::Ldnf, Limit::Enum) => {
                        let (decl, rows) = &mut ws.relations[rel];
                        if let (AttrType::Enumerated(values), Value::Text(o), Value::Text(n)) =
                            (&mut decl.attributes[ai].ty, &old, &new)
                        {
                            if let Some(p) = values.iter().position(|v| v == o) {
                                if values.contains(n) {
                                    values.remove(p);
                                } else {
                                    values[p] = n.clone();
                                }
                                entry.update_sites = 1;
                            }
                        }
                        for row in rows.iter_mut().filter(|r| r[ai] == old) {
                            row[ai] = new.clone();
                            entry.matched_rows += 1;
                            entry.written_rows += 1;
                        }
                        concepts.rename(&rel_name, attr, &old, &new);
                    }
                    _ => {
                        let rows = &mut ws.relations[rel].1;
                        let matched: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][ai] == old).collect();
                        let writes = limit_writes(matched.len());
                        for &r in &matched[..writes] {
                            rows[r][ai] = new.clone();
                        }
                        entry.matched_rows = matched.len();
                        entry.written_rows = writes;
                        entry.update_sites = writes;
                        if writes == matched.len() {
                            concepts.rename(&rel_name, attr, &old, &new);
                        }
                    }
                }
            }
            Operation::DeleteByValue { attr, value, .. } => {
                let decl = &ws.relations[rel].0;
                let ai = decl.require_index(attr)?;
                let mut v = typed(decl, ai, value, index)?;
                if mode == Mode::Ldnf {
                    v = concepts.canonical(&rel_name, attr, &v);
                }
                let referenced = ws
                    .referencing(rel)
                    .into_iter()
                    .any(|(r, a)| ws.relations[rel].0.is_lookup() && ws.relations[r].1.iter().any(|row| row[a] == v));
                if referenced {
                    entry.rejected = Some(format!("`{}` is still referenced", v.render()));
                } else {
                    let limited = !matches!(ws.limit(rel, ai), Limit::None);
                    let rows = &mut ws.relations[rel].1;
                    let before = rows.len();
                    rows.retain(|r| r[ai] != v);
                    entry.matched_rows = before - rows.len();
                    entry.written_rows = entry.matched_rows;
                    let survives = mode == Mode::Ldnf && limited || rows.iter().any(|r| r[ai] == v);
                    if entry.matched_rows > 0 && !v.is_null() && !survives {
                        entry.lost_value = Some(v.render());
                        report.lost_values.push(LostValue {
                            relation: rel_name.clone(),
                            attribute: attr.clone(),
                            value: v.render(),
                        });
                    }
                }
            }
            Operation::InsertRow { values, .. } => {
                let decl = &ws.relations[rel].0;
                if values.len() != decl.arity() {
                    return Err(Error::WorkloadValue {
                        index,
                        message: format!("expected {} values, found {}", decl.arity(), values.len()),
                    });
                }
                let row: Row = values
                    .iter()
                    .enumerate()
                    .map(|(a, lit)| typed(decl, a, lit, index))
                    .collect::<Result<_>>()?;
                entry.rejected = insert_rejection(&ws, rel, &row, mode);
                if entry.rejected.is_some() {
                    report.rejected_inserts += 1;
                } else {
                    ws.relations[rel].1.push(row);
                    entry.written_rows = 1;
                }
            }
        }
        if mode == Mode::Ldnf && !entry.stale_rows.is_empty() {
            return Err(Error::Invariant(format!(
                "operation {index} left {} stale rows in LDNF mode",
                entry.stale_rows.len()
            )));
        }
        report.stale_rows += entry.stale_rows.len();
        report.update_sites += entry.update_sites;
        report.trace.push(entry);
    }
    Ok(report)
}

fn rename_in_lookup(
    ws: &mut Workspace,
    concepts: &mut ConceptMap,
    table: usize,
    column: usize,
    old: &Value,
    new: &Value,
    entry: &mut TraceEntry,
) {
    let rows = &mut ws.relations[table].1;
    let Some(pos) = rows.iter().position(|r| &r[column] == old) else {
        return;
    };
    if rows.iter().any(|r| &r[column] == new) {
        rows.remove(pos);
    } else {
        rows[pos][column] = new.clone();
    }
    entry.update_sites = 1;
    // Referencing cells follow the key change.
    for (r, a) in ws.referencing(table) {
        let (decl, rows) = &mut ws.relations[r];
        for row in rows.iter_mut().filter(|row| &row[a] == old) {
            row[a] = new.clone();
            entry.matched_rows += 1;
        }
        concepts.rename(&decl.name, &decl.attributes[a].name.clone(), old, new);
    }
}

fn insert_rejection(ws: &Workspace, rel: usize, row: &Row, mode: Mode) -> Option<String> {
    let (decl, rows) = &ws.relations[rel];
    let pk = decl.pk_indices();
    if pk.iter().any(|&k| row[k].is_null()) {
        return Some("null primary key".into());
    }
    if rows.iter().any(|r| pk.iter().all(|&k| r[k] == row[k])) {
        return Some("duplicate primary key".into());
    }
    if mode == Mode::Ldnf {
        for (a, v) in row.iter().enumerate() {
            if !ws.is_member(rel, a, v) {
                return Some(format!(
                    "`{}` is not an admissible value of `{}`",
                    v.render(),
                    decl.attributes[a].name
                ));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupByBenchmark {
    pub relation: String,
    pub attribute: String,
    pub rows: usize,
    pub group_count_raw: usize,
    pub group_count_ldnf: usize,
    /// One equality probe per grouped row.
    pub comparisons_raw: u64,
    pub comparisons_ldnf: u64,
    /// Pairwise checks needed to reconcile raw groups into concepts by hand.
    pub reconciliation_comparisons_raw: u64,
    pub wall_ns_raw: u64,
    pub wall_ns_ldnf: u64,
}

#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_nanos() as u64)
}

#[cfg(target_arch = "wasm32")]
fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    (f(), 0)
}

/// Groups `attr` by literal value and by canonical value. Null cells are
/// not grouped.
pub fn benchmark_group_by(
    instance: &RelationInstance,
    attr: &str,
    clusters: &[ValueCluster],
) -> Result<GroupByBenchmark> {
    let idx = instance.decl().require_index(attr)?;
    let canon: HashMap<&Value, &Value> = clusters
        .iter()
        .flat_map(|c| c.members.iter().map(move |m| (m, &c.canonical)))
        .collect();
    let cells: Vec<&Value> = instance.column(idx).filter(|v| !v.is_null()).collect();

    let (raw, wall_ns_raw) = timed(|| cells.iter().copied().collect::<HashSet<&Value>>().len());
    let (ldnf, wall_ns_ldnf) = timed(|| {
        cells
            .iter()
            .map(|v| canon.get(v).copied().unwrap_or(v))
            .collect::<HashSet<&Value>>()
            .len()
    });
    let g = raw as u64;
    Ok(GroupByBenchmark {
        relation: instance.name().to_string(),
        attribute: attr.to_string(),
        rows: cells.len(),
        group_count_raw: raw,
        group_count_ldnf: ldnf,
        comparisons_raw: cells.len() as u64,
        comparisons_ldnf: cells.len() as u64,
        reconciliation_comparisons_raw: g * g.saturating_sub(1) / 2,
        wall_ns_raw,
        wall_ns_ldnf,
    })
}
