//! Functional dependencies: closure, inference from instances, candidate keys
//! and the 1NF/2NF/3NF/BCNF classifier.
//!
//! Attribute sets are handled internally as bitmasks over declared attribute
//! positions; the public surface speaks in attribute names.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::AnalysisConfig;
use crate::model::{
    set_order, AttrSet, AttrType, FunctionalDependency, Provenance, RelationDecl, RelationInstance, Value,
};

/// Relations wider than this are refused by the candidate-key search.
pub const MAX_KEY_SEARCH_ATTRIBUTES: usize = 20;
const MAX_MASK_ATTRIBUTES: usize = 64;

type Mask = u64;

fn mask_of<'a>(decl: &RelationDecl, names: impl IntoIterator<Item = &'a String>) -> Result<Mask> {
    let mut m = 0;
    for n in names {
        m |= 1 << decl.require_index(n)?;
    }
    Ok(m)
}

fn set_of(decl: &RelationDecl, mask: Mask) -> AttrSet {
    (0..decl.arity())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| decl.attributes[i].name.clone())
        .collect()
}

fn full_mask(n: usize) -> Mask {
    if n == 64 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

fn guard_width(decl: &RelationDecl, limit: usize) -> Result<()> {
    if decl.arity() > limit {
        Err(Error::Capacity {
            attributes: decl.arity(),
            limit,
        })
    } else {
        Ok(())
    }
}

fn masks_of(decl: &RelationDecl, fds: &[FunctionalDependency]) -> Result<Vec<(Mask, Mask)>> {
    fds.iter()
        .map(|fd| Ok((mask_of(decl, &fd.lhs)?, mask_of(decl, &fd.rhs)?)))
        .collect()
}

fn closure_mask(fds: &[(Mask, Mask)], start: Mask) -> Mask {
    let mut acc = start;
    loop {
        let before = acc;
        for &(lhs, rhs) in fds {
            if lhs & acc == lhs {
                acc |= rhs;
            }
        }
        if acc == before {
            return acc;
        }
    }
}

/// Least fixpoint of `attrs` under `fds`.
pub fn closure(decl: &RelationDecl, fds: &[FunctionalDependency], attrs: &AttrSet) -> Result<AttrSet> {
    guard_width(decl, MAX_MASK_ATTRIBUTES)?;
    let start = mask_of(decl, attrs)?;
    Ok(set_of(decl, closure_mask(&masks_of(decl, fds)?, start)))
}

/// Dense per-column value ids; nulls compare equal to each other here.
fn encode_columns(instance: &RelationInstance) -> Vec<Vec<u32>> {
    (0..instance.decl().arity())
        .map(|c| {
            let mut dict: HashMap<&Value, u32> = HashMap::new();
            instance
                .column(c)
                .map(|v| {
                    let next = dict.len() as u32;
                    *dict.entry(v).or_insert(next)
                })
                .collect()
        })
        .collect()
}

/// Refines partition `a` by column `b`, returning new class ids and the class count.
fn refine(a: &[u32], b: &[u32]) -> (Vec<u32>, usize) {
    let mut dict: HashMap<(u32, u32), u32> = HashMap::with_capacity(a.len());
    let ids = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let next = dict.len() as u32;
            *dict.entry((x, y)).or_insert(next)
        })
        .collect();
    (ids, dict.len())
}

fn class_count(a: &[u32], b: &[u32]) -> usize {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (u64::from(x) << 32) | u64::from(y))
        .collect::<HashSet<_>>()
        .len()
}

fn distinct_ids(ids: &[u32]) -> usize {
    ids.iter().copied().collect::<HashSet<_>>().len()
}

/// Every `X → A` with `1 ≤ |X| ≤ max_lhs` that holds in the instance and whose
/// left side is minimal, grouped by left side. `X → A` holds when no two rows
/// agree on `X` but differ on `A`.
///
/// Constant columns make every unary `B → A` hold; those are reported as-is
/// (see [`constant_attributes`] for the separate note).
pub fn infer_fds(instance: &RelationInstance, max_lhs: usize) -> Result<Vec<FunctionalDependency>> {
    let decl = instance.decl();
    guard_width(decl, MAX_MASK_ATTRIBUTES)?;
    if max_lhs < 1 {
        return Err(Error::ConfigRange {
            key: "fd_max_lhs".into(),
            message: "must be at least 1".into(),
        });
    }
    let n = decl.arity();
    let rows = instance.len();
    let cols = encode_columns(instance);

    let mut minimal: Vec<Vec<Mask>> = vec![Vec::new(); n];
    let mut found: Vec<(Mask, Mask)> = Vec::new();
    // Partitions of the previous level, keyed by lhs mask.
    let mut level: Vec<(Mask, Vec<u32>, usize)> = (0..n)
        .map(|c| (1 << c, cols[c].clone(), distinct_ids(&cols[c])))
        .collect();

    for size in 1..=max_lhs.min(n.saturating_sub(1)) {
        for (lhs, ids, classes) in &level {
            let mut rhs = 0;
            for a in 0..n {
                let bit = 1 << a;
                if lhs & bit != 0 || minimal[a].iter().any(|&m| m & lhs == m) {
                    continue;
                }
                let holds = *classes == rows || class_count(ids, &cols[a]) == *classes;
                if holds {
                    minimal[a].push(*lhs);
                    rhs |= bit;
                }
            }
            if rhs != 0 {
                found.push((*lhs, rhs));
            }
        }
        if size == max_lhs {
            break;
        }
        let mut next = Vec::new();
        for (lhs, ids, _) in &level {
            let top = 63 - lhs.leading_zeros() as usize;
            for (c, col) in cols.iter().enumerate().take(n).skip(top + 1) {
                let (refined, count) = refine(ids, col);
                next.push((lhs | (1 << c), refined, count));
            }
        }
        level = next;
    }

    let mut fds: Vec<FunctionalDependency> = found
        .into_iter()
        .map(|(l, r)| FunctionalDependency::new(set_of(decl, l), set_of(decl, r), Provenance::Inferred))
        .collect();
    fds.sort_by(|a, b| set_order(&a.lhs, &b.lhs).then_with(|| a.rhs.cmp(&b.rhs)));
    Ok(fds)
}

/// Attributes holding a single value (null counts as a value) across a
/// nonempty instance, i.e. `∅ → A`.
pub fn constant_attributes(instance: &RelationInstance) -> Vec<String> {
    if instance.is_empty() {
        return Vec::new();
    }
    let decl = instance.decl();
    (0..decl.arity())
        .filter(|&c| {
            let first = &instance.rows()[0][c];
            instance.column(c).all(|v| v == first)
        })
        .map(|c| decl.attributes[c].name.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct KeyAnalysis {
    pub candidate_keys: Vec<AttrSet>,
    pub prime_attributes: AttrSet,
}

/// All minimal attribute sets whose closure is the full relation, by
/// breadth-first search over subset size.
pub fn candidate_keys(decl: &RelationDecl, fds: &[FunctionalDependency]) -> Result<KeyAnalysis> {
    guard_width(decl, MAX_KEY_SEARCH_ATTRIBUTES)?;
    let masks = masks_of(decl, fds)?;
    let n = decl.arity();
    let full = full_mask(n);
    let mut keys: Vec<Mask> = Vec::new();
    for size in 1..=n {
        let mut subset: Mask = (1 << size) - 1;
        while subset <= full {
            if !keys.iter().any(|&k| k & !subset == 0) && closure_mask(&masks, subset) == full {
                keys.push(subset);
            }
            // Gosper's hack: next mask with the same popcount.
            let c = subset & subset.wrapping_neg();
            let r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
    }
    let mut candidate_keys: Vec<AttrSet> = keys.iter().map(|&k| set_of(decl, k)).collect();
    candidate_keys.sort_by(set_order);
    let prime_attributes = candidate_keys.iter().flatten().cloned().collect();
    Ok(KeyAnalysis {
        candidate_keys,
        prime_attributes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonAtomicCell {
    /// 1-based data row.
    pub row: usize,
    pub attribute: String,
    pub delimiter: String,
}

/// Text cells containing any of `delimiters`. Enumerated columns are skipped.
pub fn detect_non_atomic(instance: &RelationInstance, delimiters: &[String]) -> Vec<NonAtomicCell> {
    let decl = instance.decl();
    let text_cols: Vec<usize> = (0..decl.arity())
        .filter(|&c| decl.attributes[c].ty == AttrType::Text)
        .collect();
    let mut out = Vec::new();
    for (r, row) in instance.rows().iter().enumerate() {
        for &c in &text_cols {
            let Some(s) = row[c].as_text() else { continue };
            if let Some(d) = delimiters.iter().find(|d| !d.is_empty() && s.contains(d.as_str())) {
                out.push(NonAtomicCell {
                    row: r + 1,
                    attribute: decl.attributes[c].name.clone(),
                    delimiter: d.clone(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NfStatus {
    Pass,
    Fail,
    NotEvaluated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormalForm {
    #[serde(rename = "1NF")]
    First,
    #[serde(rename = "2NF")]
    Second,
    #[serde(rename = "3NF")]
    Third,
    #[serde(rename = "BCNF")]
    Bcnf,
}

impl std::fmt::Display for NormalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormalForm::First => "1NF",
            NormalForm::Second => "2NF",
            NormalForm::Third => "3NF",
            NormalForm::Bcnf => "BCNF",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FdSource {
    Declared,
    Inferred,
    /// Inferred dependencies plus the declared primary key's dependency,
    /// which the inferred set did not imply.
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub form: NormalForm,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<NonAtomicCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormFlags {
    #[serde(rename = "1NF")]
    pub first: NfStatus,
    #[serde(rename = "2NF")]
    pub second: NfStatus,
    #[serde(rename = "3NF")]
    pub third: NfStatus,
    #[serde(rename = "BCNF")]
    pub bcnf: NfStatus,
    #[serde(rename = "4NF")]
    pub fourth: NfStatus,
    #[serde(rename = "5NF")]
    pub fifth: NfStatus,
    #[serde(rename = "6NF")]
    pub sixth: NfStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalFormReport {
    pub relation: String,
    pub forms: FormFlags,
    pub violations: Vec<Violation>,
    pub fd_source: FdSource,
    /// Set when the classification rests on instance-inferred dependencies.
    pub advisory: bool,
    pub dependencies: Vec<String>,
    pub keys: KeyAnalysis,
    pub constant_attributes: Vec<String>,
}

impl NormalFormReport {
    pub fn status(&self, form: NormalForm) -> NfStatus {
        match form {
            NormalForm::First => self.forms.first,
            NormalForm::Second => self.forms.second,
            NormalForm::Third => self.forms.third,
            NormalForm::Bcnf => self.forms.bcnf,
        }
    }

    pub fn third_nf_pass(&self) -> bool {
        self.forms.third == NfStatus::Pass
    }
}

/// Dependencies used for classification: declared ones when the config has
/// any for this relation, otherwise inferred from the instance. The declared
/// primary key contributes its dependency in both cases.
pub fn dependencies_for(
    instance: &RelationInstance,
    config: &AnalysisConfig,
) -> Result<(Vec<FunctionalDependency>, FdSource)> {
    let decl = instance.decl();
    let declared: Vec<FunctionalDependency> = config
        .declared_fds_for(&decl.name)
        .map(|d| FunctionalDependency::for_relation(decl, &d.lhs, &d.rhs, Provenance::Declared))
        .collect::<Result<_>>()?;
    let key_fd = FunctionalDependency::new(
        decl.primary_key.iter().cloned().collect(),
        decl.attr_set(),
        Provenance::Declared,
    );
    if !declared.is_empty() {
        let mut fds: Vec<_> = declared.into_iter().filter(|f| !f.is_trivial()).collect();
        if !key_fd.is_trivial() && !fds.contains(&key_fd) {
            fds.push(key_fd);
        }
        return Ok((fds, FdSource::Declared));
    }
    let mut fds = infer_fds(instance, config.fd_max_lhs)?;
    let implied = closure(decl, &fds, &key_fd.lhs)? == decl.attr_set();
    if implied {
        Ok((fds, FdSource::Inferred))
    } else {
        fds.push(key_fd);
        Ok((fds, FdSource::Merged))
    }
}

pub(crate) struct DependencyChecks {
    masks: Vec<(Mask, Mask)>,
    full: Mask,
    keys: Vec<Mask>,
    prime: Mask,
}

impl DependencyChecks {
    pub(crate) fn new(decl: &RelationDecl, fds: &[FunctionalDependency], keys: &KeyAnalysis) -> Result<Self> {
        let keys: Vec<Mask> = keys
            .candidate_keys
            .iter()
            .map(|k| mask_of(decl, k))
            .collect::<Result<_>>()?;
        Ok(DependencyChecks {
            masks: masks_of(decl, fds)?,
            full: full_mask(decl.arity()),
            prime: keys.iter().fold(0, |a, k| a | k),
            keys,
        })
    }

    fn is_superkey(&self, attrs: Mask) -> bool {
        closure_mask(&self.masks, attrs) == self.full
    }

    pub(crate) fn second_nf(&self, decl: &RelationDecl) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for &key in &self.keys {
            // Proper nonempty subsets of the key.
            let mut sub = (key - 1) & key;
            while sub != 0 {
                let determined = closure_mask(&self.masks, sub) & !sub & !self.prime;
                for a in bits(determined) {
                    if seen.insert((sub, a)) {
                        let lhs = set_of(decl, sub);
                        let dep = FunctionalDependency::new(lhs, set_of(decl, 1 << a), Provenance::Inferred);
                        out.push(Violation {
                            form: NormalForm::Second,
                            description: format!(
                                "non-prime attribute {} depends on {{{}}}, a proper subset of candidate key {{{}}}",
                                decl.attributes[a].name,
                                join(&dep.lhs),
                                join(&set_of(decl, key)),
                            ),
                            dependency: Some(dep.to_string()),
                            cell: None,
                        });
                    }
                }
                sub = (sub - 1) & key;
            }
        }
        out
    }

    pub(crate) fn third_nf(&self, decl: &RelationDecl) -> Vec<Violation> {
        self.non_superkey_dependencies(true)
            .into_iter()
            .map(|(lhs, a)| {
                let dep = dependency_text(decl, lhs, a);
                Violation {
                    form: NormalForm::Third,
                    description: format!(
                        "non-prime attribute {} is transitively dependent on a candidate key through {{{}}}, which is not a superkey",
                        decl.attributes[a].name,
                        join(&set_of(decl, lhs)),
                    ),
                    dependency: Some(dep),
                    cell: None,
                }
            })
            .collect()
    }

    pub(crate) fn bcnf(&self, decl: &RelationDecl) -> Vec<Violation> {
        self.non_superkey_dependencies(false)
            .into_iter()
            .map(|(lhs, a)| Violation {
                form: NormalForm::Bcnf,
                description: format!(
                    "{{{}}} determines {} but is not a superkey",
                    join(&set_of(decl, lhs)),
                    decl.attributes[a].name,
                ),
                dependency: Some(dependency_text(decl, lhs, a)),
                cell: None,
            })
            .collect()
    }

    fn non_superkey_dependencies(&self, non_prime_only: bool) -> Vec<(Mask, usize)> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for &(lhs, rhs) in &self.masks {
            if self.is_superkey(lhs) {
                continue;
            }
            let mut targets = rhs & !lhs;
            if non_prime_only {
                targets &= !self.prime;
            }
            for a in bits(targets) {
                if seen.insert((lhs, a)) {
                    out.push((lhs, a));
                }
            }
        }
        out
    }
}

fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

fn join(set: &AttrSet) -> String {
    set.iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}

fn dependency_text(decl: &RelationDecl, lhs: Mask, a: usize) -> String {
    FunctionalDependency::new(set_of(decl, lhs), set_of(decl, 1 << a), Provenance::Inferred).to_string()
}

/// Classifies one relation with monotone gating: a failing form leaves every
/// higher form `not_evaluated`. 4NF and above are never evaluated.
pub fn classify_normal_form(
    instance: &RelationInstance,
    fds: &[FunctionalDependency],
    fd_source: FdSource,
    config: &AnalysisConfig,
) -> Result<NormalFormReport> {
    let decl = instance.decl();
    let mut forms = FormFlags {
        first: NfStatus::NotEvaluated,
        second: NfStatus::NotEvaluated,
        third: NfStatus::NotEvaluated,
        bcnf: NfStatus::NotEvaluated,
        fourth: NfStatus::NotEvaluated,
        fifth: NfStatus::NotEvaluated,
        sixth: NfStatus::NotEvaluated,
    };
    let mut violations = Vec::new();
    let mut keys = KeyAnalysis::default();

    let cells = detect_non_atomic(instance, &config.atomic_delimiters);
    if cells.is_empty() && !decl.primary_key.is_empty() {
        forms.first = NfStatus::Pass;
    } else {
        forms.first = NfStatus::Fail;
        for cell in cells {
            let value = instance.rows()[cell.row - 1][decl.index_of(&cell.attribute).expect("own attribute")].render();
            violations.push(Violation {
                form: NormalForm::First,
                description: format!(
                    "row {}, {}: `{}` holds several values separated by `{}`",
                    cell.row, cell.attribute, value, cell.delimiter
                ),
                dependency: None,
                cell: Some(cell),
            });
        }
    }

    if forms.first == NfStatus::Pass {
        keys = candidate_keys(decl, fds)?;
        let checks = DependencyChecks::new(decl, fds, &keys)?;
        let second = checks.second_nf(decl);
        forms.second = status_of(&second);
        violations.extend(second);
        if forms.second == NfStatus::Pass {
            let third = checks.third_nf(decl);
            forms.third = status_of(&third);
            violations.extend(third);
            if forms.third == NfStatus::Pass {
                let bcnf = checks.bcnf(decl);
                forms.bcnf = status_of(&bcnf);
                violations.extend(bcnf);
            }
        }
    }

    Ok(NormalFormReport {
        relation: decl.name.clone(),
        forms,
        violations,
        fd_source,
        advisory: fd_source != FdSource::Declared,
        dependencies: fds.iter().map(ToString::to_string).collect(),
        keys,
        constant_attributes: constant_attributes(instance),
    })
}

fn status_of(violations: &[Violation]) -> NfStatus {
    if violations.is_empty() {
        NfStatus::Pass
    } else {
        NfStatus::Fail
    }
}

/// Picks dependencies per [`dependencies_for`] and classifies.
pub fn analyze_relation(instance: &RelationInstance, config: &AnalysisConfig) -> Result<NormalFormReport> {
    let (fds, source) = dependencies_for(instance, config)?;
    classify_normal_form(instance, &fds, source, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Attribute;

    fn decl(names: &[&str], pk: &[&str]) -> RelationDecl {
        RelationDecl::new(
            "r",
            names.iter().map(|n| Attribute::new(*n, AttrType::Text)).collect(),
            pk.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn set(names: &[&str]) -> AttrSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn fd(d: &RelationDecl, lhs: &[&str], rhs: &[&str]) -> FunctionalDependency {
        FunctionalDependency::for_relation(d, lhs.iter().copied(), rhs.iter().copied(), Provenance::Declared).unwrap()
    }

    #[test]
    fn closure_chain() {
        let d = decl(&["SCIENTIST", "COUNTRY", "CITY"], &["SCIENTIST"]);
        let fds = [
            fd(&d, &["SCIENTIST"], &["COUNTRY"]),
            fd(&d, &["SCIENTIST"], &["CITY"]),
            fd(&d, &["COUNTRY"], &["CITY"]),
        ];
        assert_eq!(closure(&d, &fds, &set(&["SCIENTIST"])).unwrap(), d.attr_set());
        assert_eq!(
            closure(&d, &fds, &set(&["COUNTRY"])).unwrap(),
            set(&["COUNTRY", "CITY"])
        );
        assert_eq!(closure(&d, &[], &set(&["CITY"])).unwrap(), set(&["CITY"]));
        assert_eq!(
            closure(&d, &fds, &set(&["NOPE"])).unwrap_err().code(),
            "input.unknown_attribute"
        );
    }

    #[test]
    fn single_attribute_key() {
        let d = decl(&["A"], &["A"]);
        let k = candidate_keys(&d, &[]).unwrap();
        assert_eq!(k.candidate_keys, vec![set(&["A"])]);
    }

    #[test]
    fn keys_sorted_by_size_then_name() {
        let d = decl(&["A", "B", "C", "D"], &["A"]);
        let fds = [
            fd(&d, &["A"], &["B", "C", "D"]),
            fd(&d, &["D"], &["A"]),
            fd(&d, &["B", "C"], &["A"]),
        ];
        let k = candidate_keys(&d, &fds).unwrap();
        assert_eq!(k.candidate_keys, vec![set(&["A"]), set(&["D"]), set(&["B", "C"])]);
        assert_eq!(k.prime_attributes, d.attr_set());
    }

    #[test]
    fn capacity_guard() {
        let names: Vec<String> = (0..21).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let d = decl(&refs, &["c0"]);
        assert_eq!(candidate_keys(&d, &[]).unwrap_err().code(), "fd.capacity");
    }

    #[test]
    fn non_atomic_cells() {
        let d = RelationDecl::new(
            "r",
            vec![
                Attribute::new("K", AttrType::Text),
                Attribute::new("V", AttrType::Text),
                Attribute::new("E", AttrType::Enumerated(vec!["a, b".into()])),
            ],
            vec!["K".into()],
        )
        .unwrap();
        let rows = vec![
            vec![
                Value::text("1"),
                Value::text("Calculus, theory of gravity"),
                Value::text("a, b"),
            ],
            vec![
                Value::text("2"),
                Value::text("Woolsthorpe-by-Colsterworth"),
                Value::Null,
            ],
            vec![Value::text("3"), Value::text(""), Value::Null],
        ];
        let inst = RelationInstance::new(d, rows).unwrap();
        let cells = detect_non_atomic(&inst, &[", ".to_string()]);
        assert_eq!(
            cells,
            vec![NonAtomicCell {
                row: 1,
                attribute: "V".into(),
                delimiter: ", ".into()
            }]
        );
    }

    #[test]
    fn partial_dependency_fails_2nf() {
        let d = decl(&["S", "D", "P"], &["S", "D"]);
        let fds = [fd(&d, &["S", "D"], &["P"]), fd(&d, &["S"], &["P"])];
        let inst = RelationInstance::new(d, vec![]).unwrap();
        let r = classify_normal_form(&inst, &fds, FdSource::Declared, &AnalysisConfig::default()).unwrap();
        assert_eq!(r.forms.first, NfStatus::Pass);
        assert_eq!(r.forms.second, NfStatus::Fail);
        assert_eq!(r.forms.third, NfStatus::NotEvaluated);
        assert_eq!(r.violations[0].dependency.as_deref(), Some("S → P"));
    }

    #[test]
    fn bcnf_failure_with_prime_rhs() {
        // Classic: {street, city} → zip, zip → city. 3NF holds, BCNF fails.
        let d = decl(&["STREET", "CITY", "ZIP"], &["STREET", "CITY"]);
        let fds = [fd(&d, &["STREET", "CITY"], &["ZIP"]), fd(&d, &["ZIP"], &["CITY"])];
        let inst = RelationInstance::new(d, vec![]).unwrap();
        let r = classify_normal_form(&inst, &fds, FdSource::Declared, &AnalysisConfig::default()).unwrap();
        assert_eq!(r.forms.third, NfStatus::Pass);
        assert_eq!(r.forms.bcnf, NfStatus::Fail);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].dependency.as_deref(), Some("ZIP → CITY"));
    }

    #[test]
    fn constants_on_single_row() {
        let d = decl(&["A", "B"], &["A"]);
        let inst = RelationInstance::new(d, vec![vec![Value::text("x"), Value::text("y")]]).unwrap();
        assert_eq!(constant_attributes(&inst), ["A", "B"]);
        let fds = infer_fds(&inst, 2).unwrap();
        let pairs: Vec<String> = fds.iter().map(ToString::to_string).collect();
        assert_eq!(pairs, ["A → B", "B → A"]);
    }
}
