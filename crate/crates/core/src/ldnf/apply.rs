use std::collections::HashMap;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::ingest::Strategy;
use crate::model::{AttrType, Attribute, Database, ForeignKey, RelationDecl, RelationInstance, Value};

use super::plan::{DecompositionPlan, PlanAction};

/// Typed rewrite table for one action. Keys and targets are parsed against
/// the source column type.
pub(crate) fn typed_rewrite(action: &PlanAction, ty: &AttrType) -> Result<HashMap<Value, Value>> {
    let parse = |s: &str| {
        Value::parse_as(ty, s).ok_or_else(|| {
            Error::PlanJson(format!(
                "`{}`.`{}`: `{s}` is not a valid {ty} value",
                action.relation, action.attribute
            ))
        })
    };
    action
        .rewrite_map
        .iter()
        .map(|(from, to)| Ok((parse(from)?, parse(to)?)))
        .collect()
}

pub(crate) fn typed_canonicals(action: &PlanAction, ty: &AttrType) -> Result<Vec<Value>> {
    action
        .canonical_values
        .iter()
        .map(|s| {
            Value::parse_as(ty, s).filter(|v| !v.is_null()).ok_or_else(|| {
                Error::PlanJson(format!(
                    "`{}`.`{}`: canonical `{s}` is not a valid {ty} value",
                    action.relation, action.attribute
                ))
            })
        })
        .collect()
}

/// Applies `plan` to a copy of `db`.
///
/// Lookup tables are appended after the existing relations in plan order.
/// A non-null cell whose value has no rewrite entry means the plan was built
/// against different data and fails with a stale-rewrite error.
pub fn apply_plan(db: &Database, plan: &DecompositionPlan) -> Result<Database> {
    plan.validate()?;
    let (_, instances) = db.clone().into_parts();
    let mut parts: Vec<(RelationDecl, Vec<crate::model::Row>)> =
        instances.into_iter().map(RelationInstance::into_parts).collect();
    let mut lookups: IndexMap<String, (RelationDecl, Vec<crate::model::Row>)> = IndexMap::new();

    for action in &plan.actions {
        let slot = parts
            .iter()
            .position(|(d, _)| d.name.eq_ignore_ascii_case(&action.relation))
            .ok_or_else(|| Error::UnknownRelation(action.relation.clone()))?;
        let (decl, rows) = &mut parts[slot];
        let idx = decl.require_index(&action.attribute)?;
        let ty = decl.attributes[idx].ty.clone();
        let rewrite = typed_rewrite(action, &ty)?;
        let canonicals = typed_canonicals(action, &ty)?;

        for row in rows.iter_mut() {
            let cell = &mut row[idx];
            if cell.is_null() {
                continue;
            }
            match rewrite.get(cell) {
                Some(to) => *cell = to.clone(),
                None => {
                    return Err(Error::StaleRewrite {
                        relation: decl.name.clone(),
                        attribute: action.attribute.clone(),
                        value: cell.render(),
                    })
                }
            }
        }

        match action.strategy {
            Strategy::LookupTable => {
                let key = action.lookup_name.to_ascii_lowercase();
                if !lookups.contains_key(&key) {
                    let lookup_decl = RelationDecl::new(
                        action.lookup_name.clone(),
                        vec![Attribute::new(action.lookup_attribute.clone(), ty.clone())],
                        vec![action.lookup_attribute.clone()],
                    )?;
                    let lookup_rows = canonicals.into_iter().map(|v| vec![v]).collect();
                    lookups.insert(key, (lookup_decl, lookup_rows));
                }
                decl.foreign_keys.push(ForeignKey {
                    columns: vec![action.attribute.clone()],
                    target: action.lookup_name.clone(),
                    target_columns: vec![action.lookup_attribute.clone()],
                });
            }
            Strategy::EnumColumn => {
                if ty != AttrType::Text {
                    return Err(Error::UnsupportedStrategy {
                        relation: decl.name.clone(),
                        attribute: action.attribute.clone(),
                        strategy: action.strategy.to_string(),
                        reason: format!("{ty} column"),
                    });
                }
                decl.attributes[idx].ty = AttrType::Enumerated(action.canonical_values.clone());
            }
        }
    }

    let mut decls = Vec::with_capacity(parts.len() + lookups.len());
    let mut out = Vec::with_capacity(parts.len() + lookups.len());
    for (decl, rows) in parts.into_iter().chain(lookups.into_values()) {
        decls.push(decl.clone());
        out.push(RelationInstance::new(decl, rows)?);
    }
    Database::new(crate::model::SchemaDecl::new(decls)?, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AnalysisConfig;
    use crate::ldnf::build_plan;

    fn colors_db() -> Database {
        let decl = RelationDecl::new(
            "person",
            vec![
                Attribute::new("ID", AttrType::Integer),
                Attribute::new("COLOR", AttrType::Text),
            ],
            vec!["ID".into()],
        )
        .unwrap();
        let rows = ["Red", "red", "Blue", "Red", "Bleu", "Blue"]
            .iter()
            .enumerate()
            .map(|(i, c)| vec![Value::Integer(i as i64), Value::text(*c)])
            .collect();
        let inst = RelationInstance::new(decl.clone(), rows).unwrap();
        Database::new(crate::model::SchemaDecl::new(vec![decl]).unwrap(), vec![inst]).unwrap()
    }

    fn distinct_config() -> AnalysisConfig {
        let mut c = AnalysisConfig::default();
        c.annotations.push(crate::ingest::config::Annotation {
            relation: "person".into(),
            attribute: "COLOR".into(),
            kind: crate::ingest::AnnotationKind::Distinct,
        });
        c
    }

    #[test]
    fn lookup_strategy() {
        let db = colors_db();
        let plan = build_plan(&db, &distinct_config()).unwrap();
        assert_eq!(plan.actions.len(), 1);
        assert_eq!(plan.actions[0].canonical_values, vec!["Red", "Blue"]);
        let out = apply_plan(&db, &plan).unwrap();
        assert_eq!(out.instances().len(), 2);
        let person = out.require("person").unwrap();
        let colors: Vec<String> = person.column(1).map(Value::render).collect();
        assert_eq!(colors, ["Red", "Red", "Blue", "Red", "Blue", "Blue"]);
        let lookup = out.require("color_values").unwrap();
        assert!(lookup.decl().is_lookup());
        assert_eq!(person.decl().foreign_keys[0].target, "color_values");
        // Input untouched.
        assert_eq!(db.require("person").unwrap().rows()[1][1], Value::text("red"));
    }

    #[test]
    fn enum_strategy() {
        let db = colors_db();
        let mut config = distinct_config();
        config.strategy = Strategy::EnumColumn;
        let plan = build_plan(&db, &config).unwrap();
        let out = apply_plan(&db, &plan).unwrap();
        assert_eq!(out.instances().len(), 1);
        assert_eq!(
            out.require("person").unwrap().decl().attributes[1].ty,
            AttrType::Enumerated(vec!["Red".into(), "Blue".into()])
        );
    }

    #[test]
    fn empty_plan_is_identity() {
        let db = colors_db();
        assert_eq!(apply_plan(&db, &DecompositionPlan::default()).unwrap(), db);
    }

    #[test]
    fn stale_plan() {
        let db = colors_db();
        let mut plan = build_plan(&db, &distinct_config()).unwrap();
        plan.actions[0].rewrite_map.shift_remove("Bleu");
        assert_eq!(apply_plan(&db, &plan).unwrap_err().code(), "plan.stale_rewrite");
    }

    #[test]
    fn collision_with_existing_relation() {
        let db = colors_db();
        let mut config = distinct_config();
        config
            .lookup_name_overrides
            .push(crate::ingest::config::LookupOverride {
                relation: "person".into(),
                attribute: "COLOR".into(),
                table: "Person".into(),
                column: None,
            });
        assert_eq!(build_plan(&db, &config).unwrap_err().code(), "plan.lookup_collision");
    }
}
