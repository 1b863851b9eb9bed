use serde::Serialize;

use crate::error::Result;
use crate::model::{Database, Value};

use super::plan::DecompositionPlan;

/// Bytes for a text cell: a 2-byte length prefix plus the UTF-8 payload.
pub fn text_cell_bytes(s: &str) -> u64 {
    2 + s.len() as u64
}

/// Bytes for an enum cell over `variants` possible values.
pub fn enum_cell_bytes(variants: usize) -> u64 {
    if variants <= 255 {
        1
    } else {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StorageEstimate {
    pub relation: String,
    pub attribute: String,
    /// Non-null cells of the attribute.
    pub rows: u64,
    pub bytes_before: u64,
    pub bytes_after_enum: u64,
    pub bytes_after_lookup: u64,
}

/// Byte estimates per plan action. Null cells cost nothing in any layout.
pub fn estimate_storage(plan: &DecompositionPlan, db: &Database) -> Result<Vec<StorageEstimate>> {
    let mut out = Vec::with_capacity(plan.actions.len());
    for action in &plan.actions {
        let inst = db.require(&action.relation)?;
        let idx = inst.decl().require_index(&action.attribute)?;
        let mut est = StorageEstimate {
            relation: inst.name().to_string(),
            attribute: action.attribute.clone(),
            rows: 0,
            bytes_before: 0,
            bytes_after_enum: 0,
            bytes_after_lookup: 0,
        };
        for v in inst.column(idx).filter(|v| !v.is_null()) {
            let raw = v.render();
            let canon = action.rewrite_map.get(&raw).unwrap_or(&raw);
            est.rows += 1;
            est.bytes_before += text_cell_bytes(&raw);
            est.bytes_after_lookup += text_cell_bytes(canon);
        }
        est.bytes_after_enum = est.rows * enum_cell_bytes(action.canonical_values.len());
        est.bytes_after_lookup += action.canonical_values.iter().map(|c| text_cell_bytes(c)).sum::<u64>();
        out.push(est);
    }
    Ok(out)
}

/// Raw text cost of a column, for attributes outside any plan.
pub fn column_text_bytes<'a>(values: impl IntoIterator<Item = &'a Value>) -> u64 {
    values
        .into_iter()
        .filter(|v| !v.is_null())
        .map(|v| text_cell_bytes(&v.render()))
        .sum()
}
