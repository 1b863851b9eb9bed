use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttrType, Value};

/// A scalar as written in a workload file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Null,
    Integer(i64),
    Text(String),
}

impl Literal {
    /// Interprets the literal for a column of type `ty`. Integers given as
    /// strings and dates given as `DD/MM/YYYY` strings are accepted.
    pub fn to_value(&self, ty: &AttrType) -> Option<Value> {
        match (self, ty) {
            (Literal::Null, _) => Some(Value::Null),
            (Literal::Integer(i), AttrType::Integer) => Some(Value::Integer(*i)),
            (Literal::Integer(_), _) => None,
            (Literal::Text(s), ty) if s.is_empty() && !ty.is_textual() => Some(Value::Null),
            (Literal::Text(s), AttrType::Text | AttrType::Enumerated(_)) => Some(Value::Text(s.clone())),
            (Literal::Text(s), ty) => Value::parse_as(ty, s),
        }
    }
}

impl From<&str> for Literal {
    fn from(s: &str) -> Self {
        Literal::Text(s.to_string())
    }
}

impl From<i64> for Literal {
    fn from(i: i64) -> Self {
        Literal::Integer(i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Operation {
    UpdateConcept {
        relation: String,
        concept_attr: String,
        concept_value: Literal,
        set_attr: String,
        new_value: Literal,
    },
    RenameValue {
        relation: String,
        attr: String,
        old_value: Literal,
        new_value: Literal,
    },
    DeleteByValue {
        relation: String,
        attr: String,
        value: Literal,
    },
    InsertRow {
        relation: String,
        values: Vec<Literal>,
    },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::UpdateConcept { .. } => "update_concept",
            Operation::RenameValue { .. } => "rename_value",
            Operation::DeleteByValue { .. } => "delete_by_value",
            Operation::InsertRow { .. } => "insert_row",
        }
    }

    pub fn relation(&self) -> &str {
        match self {
            Operation::UpdateConcept { relation, .. }
            | Operation::RenameValue { relation, .. }
            | Operation::DeleteByValue { relation, .. }
            | Operation::InsertRow { relation, .. } => relation,
        }
    }
}

const OPS: &[&str] = &["update_concept", "rename_value", "delete_by_value", "insert_row"];

pub type Workload = Vec<Operation>;

/// Parses a JSON array of `{"op": ..., ...}` objects.
pub fn load_workload(text: &str) -> Result<Workload> {
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::WorkloadJson(e.to_string()))?;
    let items = doc
        .as_array()
        .ok_or_else(|| Error::WorkloadJson("top level must be an array".into()))?;
    let mut ops = Vec::with_capacity(items.len());
    for (index, item) in items.iter().enumerate() {
        let op = item
            .get("op")
            .ok_or_else(|| Error::WorkloadField {
                index,
                message: "missing field `op`".into(),
            })?
            .as_str()
            .unwrap_or_default();
        if !OPS.contains(&op) {
            return Err(Error::WorkloadUnknownOp {
                index,
                op: item["op"].to_string().trim_matches('"').to_string(),
            });
        }
        let parsed: Operation = serde_json::from_value(item.clone()).map_err(|e| {
            let message = e.to_string();
            if message.contains("missing field") {
                Error::WorkloadField { index, message }
            } else {
                Error::WorkloadValue { index, message }
            }
        })?;
        ops.push(parsed);
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_concept() {
        let w = load_workload(
            r#"[{"op":"update_concept", "relation":"weather_history", "concept_attr":"WEATHER TYPE",
                 "concept_value":"Thunderstorm", "set_attr":"HAZARD SCALE", "new_value":9}]"#,
        )
        .unwrap();
        assert_eq!(
            w,
            vec![Operation::UpdateConcept {
                relation: "weather_history".into(),
                concept_attr: "WEATHER TYPE".into(),
                concept_value: "Thunderstorm".into(),
                set_attr: "HAZARD SCALE".into(),
                new_value: 9.into(),
            }]
        );
    }

    #[test]
    fn empty_and_rename() {
        assert!(load_workload("[]").unwrap().is_empty());
        let w = load_workload(
            r#"[{"op":"rename_value","relation":"employee_occupation","attr":"PLACE OF OCCUPATION",
                 "old_value":"Brilliant Business","new_value":"Magnificent Business"}]"#,
        )
        .unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].name(), "rename_value");
    }

    #[test]
    fn errors() {
        assert_eq!(load_workload("[").unwrap_err().code(), "workload.malformed_json");
        assert_eq!(load_workload("{}").unwrap_err().code(), "workload.malformed_json");
        assert_eq!(
            load_workload(r#"[{"op":"truncate","relation":"t"}]"#)
                .unwrap_err()
                .code(),
            "workload.unknown_op"
        );
        assert_eq!(
            load_workload(r#"[{"op":"delete_by_value","relation":"t","attr":"a"}]"#)
                .unwrap_err()
                .code(),
            "workload.missing_field"
        );
        assert_eq!(
            load_workload(r#"[{"relation":"t"}]"#).unwrap_err().code(),
            "workload.missing_field"
        );
    }

    #[test]
    fn literal_typing() {
        assert_eq!(Literal::from(9).to_value(&AttrType::Integer), Some(Value::Integer(9)));
        assert_eq!(Literal::from("9").to_value(&AttrType::Integer), Some(Value::Integer(9)));
        assert_eq!(Literal::from(9).to_value(&AttrType::Text), None);
        assert!(matches!(
            Literal::from("01/02/2023").to_value(&AttrType::Date),
            Some(Value::Date(_))
        ));
        assert_eq!(Literal::Null.to_value(&AttrType::Text), Some(Value::Null));
    }
}
