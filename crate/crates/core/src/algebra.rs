//! Relational-algebra primitives over [`RelationInstance`].

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::model::{same_domain, Attribute, RelationDecl, RelationInstance, Row, Value};

/// Projects onto `attrs`, keeping declared attribute order and removing
/// duplicate rows (first occurrence wins).
///
/// The result keeps the source primary key when it survives the projection;
/// otherwise every projected attribute becomes part of the key.
pub fn project<S: AsRef<str>>(instance: &RelationInstance, attrs: &[S]) -> Result<RelationInstance> {
    let decl = instance.decl();
    let mut wanted = HashSet::new();
    for a in attrs {
        decl.require_index(a.as_ref())?;
        wanted.insert(a.as_ref());
    }
    let indices: Vec<usize> = decl
        .attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| wanted.contains(a.name.as_str()))
        .map(|(i, _)| i)
        .collect();
    let attributes: Vec<Attribute> = indices.iter().map(|&i| decl.attributes[i].clone()).collect();
    let primary_key = if decl.primary_key.iter().all(|k| wanted.contains(k.as_str())) {
        decl.primary_key.clone()
    } else {
        attributes.iter().map(|a| a.name.clone()).collect()
    };
    let foreign_keys = decl
        .foreign_keys
        .iter()
        .filter(|fk| fk.columns.iter().all(|c| wanted.contains(c.as_str())))
        .cloned()
        .collect();
    let out_decl = RelationDecl {
        name: decl.name.clone(),
        attributes,
        primary_key,
        foreign_keys,
    };

    let mut seen: HashSet<Vec<&Value>> = HashSet::new();
    let mut rows = Vec::new();
    for row in instance.rows() {
        let key: Vec<&Value> = indices.iter().map(|&i| &row[i]).collect();
        if seen.insert(key) {
            rows.push(indices.iter().map(|&i| row[i].clone()).collect());
        }
    }
    Ok(RelationInstance::from_parts(out_decl, rows))
}

/// Equi-joins `a` and `b` on the given attribute pairs. Output attributes are
/// `a`'s followed by `b`'s non-join attributes; rows come out in `a` order,
/// then `b` order for multiple partners. Nulls never join.
///
/// A `b` attribute whose name already occurs in `a` is renamed
/// `<b relation>.<attribute>`.
pub fn natural_join<S: AsRef<str>>(
    a: &RelationInstance,
    b: &RelationInstance,
    on: &[(S, S)],
) -> Result<RelationInstance> {
    let (da, db) = (a.decl(), b.decl());
    let mut pairs = Vec::with_capacity(on.len());
    for (left, right) in on {
        let (left, right) = (left.as_ref(), right.as_ref());
        let li = da.require_index(left)?;
        let ri = db.require_index(right)?;
        let (lt, rt) = (&da.attributes[li].ty, &db.attributes[ri].ty);
        if !same_domain(lt, rt) {
            return Err(Error::JoinTypeMismatch {
                left: left.to_string(),
                right: right.to_string(),
                left_type: lt.to_string(),
                right_type: rt.to_string(),
            });
        }
        pairs.push((li, ri));
    }
    let join_cols: HashSet<usize> = pairs.iter().map(|&(_, r)| r).collect();
    let b_rest: Vec<usize> = (0..db.arity()).filter(|i| !join_cols.contains(i)).collect();

    let mut attributes = da.attributes.clone();
    let mut renamed = Vec::with_capacity(b_rest.len());
    for &i in &b_rest {
        let mut attr = db.attributes[i].clone();
        if da.index_of(&attr.name).is_some() {
            attr.name = format!("{}.{}", db.name, attr.name);
        }
        renamed.push(attr.name.clone());
        attributes.push(attr);
    }
    let mut primary_key = da.primary_key.clone();
    for (pos, &i) in b_rest.iter().enumerate() {
        if db.is_key_attribute(&db.attributes[i].name) {
            primary_key.push(renamed[pos].clone());
        }
    }
    let out_decl = RelationDecl {
        name: format!("{}_{}", da.name, db.name),
        attributes,
        primary_key,
        foreign_keys: Vec::new(),
    };

    let mut index: HashMap<Vec<&Value>, Vec<&Row>> = HashMap::new();
    for row in b.rows() {
        let key: Vec<&Value> = pairs.iter().map(|&(_, r)| &row[r]).collect();
        if key.iter().any(|v| v.is_null()) {
            continue;
        }
        index.entry(key).or_default().push(row);
    }
    let mut rows = Vec::new();
    for row in a.rows() {
        let key: Vec<&Value> = pairs.iter().map(|&(l, _)| &row[l]).collect();
        if let Some(partners) = index.get(&key) {
            for partner in partners {
                let mut out = row.clone();
                out.extend(b_rest.iter().map(|&i| partner[i].clone()));
                rows.push(out);
            }
        }
    }
    Ok(RelationInstance::from_parts(out_decl, rows))
}

/// Occurrence count per distinct non-null value, in first-occurrence order.
pub fn distinct_value_counts(instance: &RelationInstance, attr: &str) -> Result<IndexMap<Value, usize>> {
    let idx = instance.decl().require_index(attr)?;
    let mut counts = IndexMap::new();
    for value in instance.column(idx).filter(|v| !v.is_null()) {
        *counts.entry(value.clone()).or_insert(0) += 1;
    }
    Ok(counts)
}
