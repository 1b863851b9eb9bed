use std::collections::HashSet;

use serde::Serialize;

use crate::algebra::natural_join;
use crate::error::Result;
use crate::fd::{analyze_relation, NormalFormReport};
use crate::ingest::{AnalysisConfig, Strategy};
use crate::model::{AttrType, Database, RelationInstance, Row, Value};
use crate::nlda::{classify_attributes, similar, AttributeClass, AttributeClassification, Evidence, Similarity};

use super::apply::typed_rewrite;
use super::plan::DecompositionPlan;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarPair {
    /// The relation holding the value set (lookup table or enum owner).
    pub relation: String,
    pub attribute: String,
    pub a: String,
    pub b: String,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingCell {
    pub relation: String,
    pub attribute: String,
    /// 1-based data row.
    pub row: usize,
    pub value: String,
    pub value_set: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValueSetReport {
    pub passed: bool,
    pub similar_pairs: Vec<SimilarPair>,
    pub dangling: Vec<DanglingCell>,
}

/// Checks every lookup table and enumerated type: no two members are
/// similar, and every referencing cell is a member.
pub fn verify_value_sets(db: &Database, config: &AnalysisConfig) -> ValueSetReport {
    let mut report = ValueSetReport::default();
    for inst in db.instances() {
        let decl = inst.decl();
        if decl.is_lookup() {
            let members: Vec<String> = inst.column(0).map(Value::render).collect();
            push_pairs(&mut report, &decl.name, &decl.attributes[0].name, &members, config);
        }
        for (idx, attr) in decl.attributes.iter().enumerate() {
            if let AttrType::Enumerated(values) = &attr.ty {
                push_pairs(&mut report, &decl.name, &attr.name, values, config);
                for (r, v) in inst.column(idx).enumerate() {
                    if !v.fits(&attr.ty) {
                        report.dangling.push(DanglingCell {
                            relation: decl.name.clone(),
                            attribute: attr.name.clone(),
                            row: r + 1,
                            value: v.render(),
                            value_set: format!("{}.{}", decl.name, attr.name),
                        });
                    }
                }
            }
        }
        for fk in decl.foreign_keys.iter().filter(|fk| fk.columns.len() == 1) {
            let Some(target) = db.instance(&fk.target) else {
                continue;
            };
            if !target.decl().is_lookup() {
                continue;
            }
            let members: HashSet<&Value> = target.column(0).collect();
            let Some(idx) = decl.index_of(&fk.columns[0]) else {
                continue;
            };
            for (r, v) in inst.column(idx).enumerate() {
                if !v.is_null() && !members.contains(v) {
                    report.dangling.push(DanglingCell {
                        relation: decl.name.clone(),
                        attribute: fk.columns[0].clone(),
                        row: r + 1,
                        value: v.render(),
                        value_set: target.name().to_string(),
                    });
                }
            }
        }
    }
    report.passed = report.similar_pairs.is_empty() && report.dangling.is_empty();
    report
}

fn push_pairs(
    report: &mut ValueSetReport,
    relation: &str,
    attribute: &str,
    members: &[String],
    config: &AnalysisConfig,
) {
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if let Similarity::Similar(evidence) = similar(a, b, config) {
                report.similar_pairs.push(SimilarPair {
                    relation: relation.to_string(),
                    attribute: attribute.to_string(),
                    a: a.clone(),
                    b: b.clone(),
                    evidence,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LdnfViolation {
    pub relation: String,
    pub attribute: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingWarning {
    pub relation: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LdnfReport {
    pub is_ldnf: bool,
    pub violations: Vec<LdnfViolation>,
    pub ordering_warnings: Vec<OrderingWarning>,
}

/// LDNF holds when no attribute is a non-limited distinct attribute and
/// every value set is free of similar members and dangling references.
/// Relations below 3NF only produce ordering warnings.
pub fn is_ldnf(db: &Database, config: &AnalysisConfig) -> Result<LdnfReport> {
    let classes = classify_attributes(db, config)?;
    let reports = db
        .instances()
        .iter()
        .map(|inst| analyze_relation(inst, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(ldnf_report(db, config, &classes, &reports))
}

/// Assembles the report from classifications and normal-form reports that
/// were already computed for `db`.
pub fn ldnf_report(
    db: &Database,
    config: &AnalysisConfig,
    classes: &[AttributeClassification],
    normal_forms: &[NormalFormReport],
) -> LdnfReport {
    let mut violations: Vec<LdnfViolation> = classes
        .iter()
        .filter(|c| c.class == AttributeClass::NonLimitedDistinct)
        .map(|c| LdnfViolation {
            relation: c.relation.clone(),
            attribute: c.attribute.clone(),
            reason: c.reason.clone(),
        })
        .collect();
    let sets = verify_value_sets(db, config);
    violations.extend(sets.similar_pairs.into_iter().map(|p| LdnfViolation {
        relation: p.relation,
        attribute: p.attribute,
        reason: format!("value set holds similar values `{}` and `{}`", p.a, p.b),
    }));
    violations.extend(sets.dangling.into_iter().map(|d| LdnfViolation {
        relation: d.relation,
        attribute: d.attribute,
        reason: format!("row {} holds `{}`, which is not in {}", d.row, d.value, d.value_set),
    }));
    let ordering_warnings = normal_forms
        .iter()
        .filter(|r| !r.third_nf_pass())
        .map(|r| OrderingWarning {
            relation: r.relation.clone(),
            note: "relation is not in 3NF; normalize to 3NF before applying LDNF".into(),
        })
        .collect();
    LdnfReport {
        is_ldnf: violations.is_empty(),
        violations,
        ordering_warnings,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LosslessReport {
    pub passed: bool,
    pub failures: Vec<String>,
}

/// The original instance with every planned attribute mapped through its
/// rewrite map. Unmapped non-null values are reported as failures.
fn canonicalize(original: &RelationInstance, plan: &DecompositionPlan, failures: &mut Vec<String>) -> Result<Vec<Row>> {
    let mut rows = original.rows().to_vec();
    for action in plan
        .actions
        .iter()
        .filter(|a| a.relation.eq_ignore_ascii_case(original.name()))
    {
        let decl = original.decl();
        let idx = decl.require_index(&action.attribute)?;
        let rewrite = typed_rewrite(action, &decl.attributes[idx].ty)?;
        for (r, row) in rows.iter_mut().enumerate() {
            if row[idx].is_null() {
                continue;
            }
            match rewrite.get(&row[idx]) {
                Some(to) => row[idx] = to.clone(),
                None => failures.push(format!(
                    "{}: row {} value `{}` of `{}` has no rewrite entry",
                    original.name(),
                    r + 1,
                    row[idx].render(),
                    action.attribute
                )),
            }
        }
    }
    Ok(rows)
}

/// Checks that joining each rewritten relation back to its lookup tables
/// reproduces the canonicalized original, row for row and in order.
pub fn verify_lossless(
    original: &Database,
    transformed: &Database,
    plan: &DecompositionPlan,
) -> Result<LosslessReport> {
    let mut failures = Vec::new();
    for orig in original.instances() {
        let name = orig.name();
        let Some(now) = transformed.instance(name) else {
            failures.push(format!("{name}: missing from the transformed database"));
            continue;
        };
        let expected = canonicalize(orig, plan, &mut failures)?;
        let arity = orig.decl().arity();
        let attrs_match = now.decl().arity() == arity
            && now
                .decl()
                .attribute_names()
                .zip(orig.decl().attribute_names())
                .all(|(a, b)| a == b);
        if !attrs_match {
            failures.push(format!("{name}: attribute list changed"));
            continue;
        }
        if now.rows() != expected.as_slice() {
            failures.push(format!("{name}: rows differ from the canonicalized original"));
        }

        for action in plan.actions.iter().filter(|a| a.relation.eq_ignore_ascii_case(name)) {
            if action.strategy != Strategy::LookupTable {
                continue;
            }
            let Some(lookup) = transformed.instance(&action.lookup_name) else {
                failures.push(format!("{name}: lookup `{}` is missing", action.lookup_name));
                continue;
            };
            let joined = natural_join(
                now,
                lookup,
                &[(action.attribute.as_str(), action.lookup_attribute.as_str())],
            )?;
            let idx = orig.decl().require_index(&action.attribute)?;
            let want: Vec<&Row> = expected.iter().filter(|r| !r[idx].is_null()).collect();
            let got: Vec<&Row> = joined.rows().iter().collect();
            if got.len() != want.len() || got.iter().zip(&want).any(|(g, w)| g[..arity] != w[..]) {
                failures.push(format!(
                    "{name}: join with `{}` does not reproduce the canonicalized original",
                    action.lookup_name
                ));
            }
        }
    }
    Ok(LosslessReport {
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Attribute, ForeignKey, RelationDecl, SchemaDecl};

    fn lookup_db(values: &[&str], refs: &[&str]) -> Database {
        let lookup = RelationDecl::new(
            "colors",
            vec![Attribute::new("COLOR", AttrType::Text)],
            vec!["COLOR".into()],
        )
        .unwrap();
        let person = RelationDecl::new(
            "person",
            vec![
                Attribute::new("ID", AttrType::Integer),
                Attribute::new("C", AttrType::Text),
            ],
            vec!["ID".into()],
        )
        .unwrap()
        .with_foreign_key(ForeignKey {
            columns: vec!["C".into()],
            target: "colors".into(),
            target_columns: vec!["COLOR".into()],
        });
        let li = RelationInstance::new(lookup.clone(), values.iter().map(|v| vec![Value::text(*v)]).collect()).unwrap();
        let pi = RelationInstance::new(
            person.clone(),
            refs.iter()
                .enumerate()
                .map(|(i, v)| vec![Value::Integer(i as i64), Value::text(*v)])
                .collect(),
        )
        .unwrap();
        Database::new(SchemaDecl::new(vec![person, lookup]).unwrap(), vec![pi, li]).unwrap()
    }

    #[test]
    fn clean_lookup_passes() {
        let r = verify_value_sets(
            &lookup_db(&["Red", "Green", "Gray"], &["Red", "Gray"]),
            &AnalysisConfig::default(),
        );
        assert!(r.passed);
    }

    #[test]
    fn similar_members_fail() {
        let r = verify_value_sets(&lookup_db(&["Gray", "Grey"], &[]), &AnalysisConfig::default());
        assert!(!r.passed);
        assert_eq!(
            (r.similar_pairs[0].a.as_str(), r.similar_pairs[0].b.as_str()),
            ("Gray", "Grey")
        );
    }

    #[test]
    fn dangling_reference_fails() {
        let r = verify_value_sets(&lookup_db(&["Red"], &["Red", "Blue"]), &AnalysisConfig::default());
        assert_eq!(r.dangling.len(), 1);
        assert_eq!(r.dangling[0].row, 2);
    }

    #[test]
    fn vacuous_cases() {
        assert!(verify_value_sets(&lookup_db(&[], &[]), &AnalysisConfig::default()).passed);
        let empty = Database::default();
        let report = is_ldnf(&empty, &AnalysisConfig::default()).unwrap();
        assert!(report.is_ldnf && report.violations.is_empty());
    }

    #[test]
    fn identity_plan_is_lossless() {
        let db = lookup_db(&["Red"], &["Red"]);
        let r = verify_lossless(&db, &db, &DecompositionPlan::default()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }
}
