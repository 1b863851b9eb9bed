use std::collections::HashSet;
use std::fmt::Write;

use crate::ingest::ddl::{quote_column, quote_ident};
use crate::ingest::Strategy;
use crate::model::{sql_string, AttrType, SchemaDecl, Value};

use super::plan::DecompositionPlan;

/// Renders a plan value as a literal for a column of type `ty`.
fn literal(ty: Option<&AttrType>, raw: &str) -> String {
    match ty.and_then(|t| Value::parse_as(t, raw)) {
        Some(v @ Value::Integer(_)) => v.sql_literal(),
        _ => sql_string(raw),
    }
}

fn list(ty: Option<&AttrType>, values: &[String]) -> String {
    values.iter().map(|v| literal(ty, v)).collect::<Vec<_>>().join(", ")
}

/// Migration script for `plan`, one statement per line.
///
/// Output depends only on the plan and the schema. A shared lookup is created
/// and populated once, at its first action.
pub fn emit_migration_sql(plan: &DecompositionPlan, schema: &SchemaDecl) -> String {
    let mut out = String::new();
    let mut created = HashSet::new();
    for action in &plan.actions {
        let rel = schema
            .relation(&action.relation)
            .map_or(action.relation.as_str(), |r| r.name.as_str());
        let ty = schema
            .relation(&action.relation)
            .and_then(|r| r.attribute(&action.attribute))
            .map(|a| &a.ty);
        let (rel_q, attr_q) = (quote_ident(rel), quote_column(&action.attribute));

        if action.strategy == Strategy::LookupTable && created.insert(action.lookup_name.to_ascii_lowercase()) {
            let (lookup_q, col_q) = (quote_ident(&action.lookup_name), quote_column(&action.lookup_attribute));
            let col_ty = match ty {
                Some(t @ (AttrType::Integer | AttrType::Date)) => t.to_string(),
                _ => "TEXT".to_string(),
            };
            let _ = writeln!(
                out,
                "CREATE TABLE {lookup_q} ({col_q} {col_ty} NOT NULL, PRIMARY KEY ({col_q}));"
            );
            if !action.canonical_values.is_empty() {
                let rows: Vec<String> = action
                    .canonical_values
                    .iter()
                    .map(|v| format!("({})", literal(ty, v)))
                    .collect();
                let _ = writeln!(out, "INSERT INTO {lookup_q} ({col_q}) VALUES {};", rows.join(", "));
            }
        }

        for (canon, members) in action.clusters() {
            let others: Vec<String> = members.into_iter().filter(|m| *m != canon).collect();
            if others.is_empty() {
                continue;
            }
            let _ = writeln!(
                out,
                "UPDATE {rel_q} SET {attr_q} = {} WHERE {attr_q} IN ({});",
                literal(ty, &canon),
                list(ty, &others)
            );
        }

        match action.strategy {
            Strategy::LookupTable => {
                let _ = writeln!(
                    out,
                    "ALTER TABLE {rel_q} ADD FOREIGN KEY ({attr_q}) REFERENCES {} ({});",
                    quote_ident(&action.lookup_name),
                    quote_column(&action.lookup_attribute)
                );
            }
            Strategy::EnumColumn => {
                let _ = writeln!(
                    out,
                    "ALTER TABLE {rel_q} ALTER COLUMN {attr_q} {};",
                    AttrType::Enumerated(action.canonical_values.clone())
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldnf::plan::PlanAction;

    fn action(strategy: Strategy) -> PlanAction {
        PlanAction {
            relation: "people".into(),
            attribute: "FAVORITE COLOR".into(),
            strategy,
            lookup_name: "colors".into(),
            lookup_attribute: "COLOR".into(),
            canonical_values: vec!["Gray".into(), "O'Hare".into()],
            rewrite_map: [
                ("Grey", "Gray"),
                ("Gray", "Gray"),
                ("Silver", "Gray"),
                ("O'Hare", "O'Hare"),
            ]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
            shared_with: Vec::new(),
        }
    }

    #[test]
    fn lookup_statements() {
        let plan = DecompositionPlan {
            actions: vec![action(Strategy::LookupTable)],
        };
        let sql = emit_migration_sql(&plan, &SchemaDecl::default());
        assert_eq!(
            sql,
            "CREATE TABLE colors (\"COLOR\" TEXT NOT NULL, PRIMARY KEY (\"COLOR\"));\n\
             INSERT INTO colors (\"COLOR\") VALUES ('Gray'), ('O''Hare');\n\
             UPDATE people SET \"FAVORITE COLOR\" = 'Gray' WHERE \"FAVORITE COLOR\" IN ('Grey', 'Silver');\n\
             ALTER TABLE people ADD FOREIGN KEY (\"FAVORITE COLOR\") REFERENCES colors (\"COLOR\");\n"
        );
    }

    #[test]
    fn enum_statements() {
        let plan = DecompositionPlan {
            actions: vec![action(Strategy::EnumColumn)],
        };
        let sql = emit_migration_sql(&plan, &SchemaDecl::default());
        assert_eq!(sql.lines().count(), 2);
        assert!(sql.ends_with("ALTER TABLE people ALTER COLUMN \"FAVORITE COLOR\" ENUM('Gray', 'O''Hare');\n"));
    }

    #[test]
    fn empty_plan() {
        assert_eq!(
            emit_migration_sql(&DecompositionPlan::default(), &SchemaDecl::default()),
            ""
        );
    }

    #[test]
    fn shared_lookup_created_once() {
        let mut second = action(Strategy::LookupTable);
        second.relation = "pets".into();
        let plan = DecompositionPlan {
            actions: vec![action(Strategy::LookupTable), second],
        };
        let sql = emit_migration_sql(&plan, &SchemaDecl::default());
        assert_eq!(sql.matches("CREATE TABLE").count(), 1);
        assert_eq!(sql.matches("ADD FOREIGN KEY").count(), 2);
    }
}
