//! Brute-force oracles shared by the property suites and the acceptance gate.
//! None of these call into the code they check, apart from `similar`, which
//! defines the relation being tested for.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use ldnf_core::ingest::{AnalysisConfig, Strategy};
use ldnf_core::ldnf::DecompositionPlan;
use ldnf_core::model::{AttrType, Database, FunctionalDependency, RelationInstance, Value};
use ldnf_core::nlda::similar;

pub type Set = BTreeSet<String>;

/// Naive fixpoint: keep sweeping until nothing is added.
pub fn closure_oracle(fds: &[(Set, Set)], start: &Set) -> Set {
    let mut acc = start.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for (lhs, rhs) in fds {
            if lhs.is_subset(&acc) && !rhs.is_subset(&acc) {
                acc.extend(rhs.iter().cloned());
                changed = true;
            }
        }
    }
    acc
}

fn subsets(names: &[String], max: usize) -> Vec<Set> {
    let n = names.len();
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| names[i].clone()).collect())
        .collect()
}

/// Does `lhs → a` hold? Compares every pair of rows.
pub fn holds(inst: &RelationInstance, lhs: &Set, a: &str) -> bool {
    let decl = inst.decl();
    let li: Vec<usize> = lhs.iter().map(|n| decl.index_of(n).unwrap()).collect();
    let ai = decl.index_of(a).unwrap();
    let rows = inst.rows();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if li.iter().all(|&c| rows[i][c] == rows[j][c]) && rows[i][ai] != rows[j][ai] {
                return false;
            }
        }
    }
    true
}

/// Every minimal `X → A` with `1 ≤ |X| ≤ max_lhs` and `A ∉ X`, as single
/// right-hand-side pairs. Each candidate is checked pairwise once.
pub fn fd_oracle(inst: &RelationInstance, max_lhs: usize) -> BTreeSet<(Set, String)> {
    let names: Vec<String> = inst.decl().attribute_names().map(str::to_string).collect();
    let max_lhs = max_lhs.min(names.len().saturating_sub(1));
    let candidates = subsets(&names, max_lhs);
    let mut out = BTreeSet::new();
    for a in &names {
        let holding: Vec<&Set> = candidates
            .iter()
            .filter(|x| !x.contains(a) && holds(inst, x, a))
            .collect();
        for x in &holding {
            if !holding.iter().any(|y| y.len() < x.len() && y.is_subset(x)) {
                out.insert(((*x).clone(), a.clone()));
            }
        }
    }
    out
}

pub fn split_fds(fds: &[FunctionalDependency]) -> BTreeSet<(Set, String)> {
    fds.iter()
        .flat_map(|fd| fd.rhs.iter().map(move |a| (fd.lhs.clone(), a.clone())))
        .collect()
}

/// Minimal attribute sets with full closure, by exhaustive search.
pub fn keys_oracle(names: &[String], fds: &[(Set, Set)]) -> Vec<Set> {
    let full: Set = names.iter().cloned().collect();
    let supers: Vec<Set> = subsets(names, names.len())
        .into_iter()
        .filter(|s| closure_oracle(fds, s) == full)
        .collect();
    let mut keys: Vec<Set> = supers
        .iter()
        .filter(|s| !supers.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .cloned()
        .collect();
    keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    keys
}

/// Connected components of the `similar` graph over `values`, with the
/// designated canonical of every touched synonym group added as a node.
/// Returns each node's component id. Non-text values stay singletons.
pub fn components(values: &[String], textual: bool, config: &AnalysisConfig) -> HashMap<String, usize> {
    let mut nodes: Vec<String> = values.to_vec();
    if textual {
        for g in &config.synonym_groups {
            if let Some(c) = &g.canonical {
                if g.values.iter().any(|v| values.contains(v)) && !nodes.contains(c) {
                    nodes.push(c.clone());
                }
            }
        }
    }
    let mut comp: HashMap<String, usize> = HashMap::new();
    for start in 0..nodes.len() {
        if comp.contains_key(&nodes[start]) {
            continue;
        }
        let id = start;
        let mut queue = VecDeque::from([start]);
        comp.insert(nodes[start].clone(), id);
        while let Some(i) = queue.pop_front() {
            if !textual {
                break;
            }
            for j in 0..nodes.len() {
                if !comp.contains_key(&nodes[j]) && similar(&nodes[i], &nodes[j], config).is_similar() {
                    comp.insert(nodes[j].clone(), id);
                    queue.push_back(j);
                }
            }
        }
    }
    comp
}

/// Independent check of a transformation: every planned cell moved to a
/// value from its own similarity component, one value per component and
/// distinct values for distinct components; every other cell is unchanged;
/// and a nested-loop join of each rewritten relation with its lookup table,
/// projected back, reproduces the rewritten rows. Returns failure messages.
pub fn lossless_oracle(
    original: &Database,
    transformed: &Database,
    plan: &DecompositionPlan,
    config: &AnalysisConfig,
) -> Vec<String> {
    let mut failures = Vec::new();
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, a) in plan.actions.iter().enumerate() {
        let key = match a.strategy {
            Strategy::LookupTable => a.lookup_name.to_ascii_lowercase(),
            Strategy::EnumColumn => format!("enum {i}"),
        };
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, m)) => m.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    let planned: HashSet<(String, String)> = plan
        .actions
        .iter()
        .map(|a| (a.relation.to_ascii_lowercase(), a.attribute.clone()))
        .collect();

    for orig in original.instances() {
        let Some(now) = transformed.instance(orig.name()) else {
            failures.push(format!("{} missing", orig.name()));
            continue;
        };
        if now.len() != orig.len() {
            failures.push(format!("{}: row count changed", orig.name()));
            continue;
        }
        for (c, attr) in orig.decl().attributes.iter().enumerate() {
            if planned.contains(&(orig.name().to_ascii_lowercase(), attr.name.clone())) {
                continue;
            }
            if orig.column(c).ne(now.column(c)) {
                failures.push(format!("{}.{}: unplanned column changed", orig.name(), attr.name));
            }
        }
    }

    for (_, members) in &groups {
        let mut values: Vec<String> = Vec::new();
        let mut textual = true;
        let mut cells: Vec<(Value, Value, String)> = Vec::new();
        for &m in members {
            let a = &plan.actions[m];
            let (Some(orig), Some(now)) = (original.instance(&a.relation), transformed.instance(&a.relation)) else {
                failures.push(format!("{}: relation missing", a.relation));
                continue;
            };
            let c = orig.decl().index_of(&a.attribute).unwrap();
            textual &= orig.decl().attributes[c].ty == AttrType::Text;
            for (o, t) in orig.column(c).zip(now.column(c)) {
                if o.is_null() {
                    if !t.is_null() {
                        failures.push(format!("{}.{}: null became `{}`", a.relation, a.attribute, t.render()));
                    }
                    continue;
                }
                if !values.contains(&o.render()) {
                    values.push(o.render());
                }
                cells.push((o.clone(), t.clone(), format!("{}.{}", a.relation, a.attribute)));
            }
        }
        let comp = components(&values, textual, config);
        let mut rep: HashMap<usize, String> = HashMap::new();
        let mut owner: HashMap<String, usize> = HashMap::new();
        for (o, t, at) in &cells {
            let id = comp[&o.render()];
            let t = t.render();
            if comp.get(&t) != Some(&id) {
                failures.push(format!(
                    "{at}: `{}` rewritten to `{t}` outside its component",
                    o.render()
                ));
            }
            if rep.entry(id).or_insert_with(|| t.clone()) != &t {
                failures.push(format!("{at}: component of `{}` has two representatives", o.render()));
            }
            if *owner.entry(t.clone()).or_insert(id) != id {
                failures.push(format!("{at}: `{t}` represents two components"));
            }
        }
    }

    for a in plan.actions.iter().filter(|a| a.strategy == Strategy::LookupTable) {
        let (Some(now), Some(lookup)) = (transformed.instance(&a.relation), transformed.instance(&a.lookup_name))
        else {
            failures.push(format!("{}: lookup `{}` missing", a.relation, a.lookup_name));
            continue;
        };
        let c = now.decl().index_of(&a.attribute).unwrap();
        let lc = lookup.decl().index_of(&a.lookup_attribute).unwrap();
        let mut joined = Vec::new();
        for row in now.rows() {
            for l in lookup.rows() {
                if !row[c].is_null() && row[c] == l[lc] {
                    joined.push(row.clone());
                }
            }
        }
        let expected: Vec<_> = now.rows().iter().filter(|r| !r[c].is_null()).cloned().collect();
        if joined != expected {
            failures.push(format!("{}: join with `{}` is lossy", a.relation, a.lookup_name));
        }
    }
    failures
}

/// Pairs of similar members inside any lookup table or enumerated type
/// created by `plan`.
pub fn similar_in_value_sets(
    transformed: &Database,
    plan: &DecompositionPlan,
    config: &AnalysisConfig,
) -> Vec<(String, String)> {
    let mut sets: Vec<Vec<String>> = Vec::new();
    for a in &plan.actions {
        match a.strategy {
            Strategy::LookupTable => {
                if let Some(l) = transformed.instance(&a.lookup_name) {
                    sets.push(l.column(0).map(Value::render).collect());
                }
            }
            Strategy::EnumColumn => {
                if let Some(AttrType::Enumerated(v)) = transformed
                    .instance(&a.relation)
                    .and_then(|r| r.decl().attribute(&a.attribute))
                    .map(|a| &a.ty)
                {
                    sets.push(v.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    for set in sets {
        for (i, x) in set.iter().enumerate() {
            for y in &set[i + 1..] {
                if similar(x, y, config).is_similar() {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
    }
    out
}
