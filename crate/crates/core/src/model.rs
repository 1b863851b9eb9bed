//! In-memory relational model: declarations, typed values and loaded instances.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Attribute names as an ordered set. Ordering is by code point so that
/// every report that lists sets is reproducible.
pub type AttrSet = BTreeSet<String>;

pub const DATE_FORMAT: &str = "%d/%m/%Y";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrType {
    Text,
    Integer,
    Date,
    Enumerated(Vec<String>),
}

impl AttrType {
    pub fn is_textual(&self) -> bool {
        matches!(self, AttrType::Text | AttrType::Enumerated(_))
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrType::Text => f.write_str("TEXT"),
            AttrType::Integer => f.write_str("INTEGER"),
            AttrType::Date => f.write_str("DATE"),
            AttrType::Enumerated(values) => {
                f.write_str("ENUM(")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", sql_string(v))?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Single-quote a string literal, doubling embedded quotes.
pub fn sql_string(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: AttrType,
}

impl Attribute {
    pub fn new(name: impl Into<String>, ty: AttrType) -> Self {
        Attribute { name: name.into(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForeignKey {
    pub columns: Vec<String>,
    pub target: String,
    pub target_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDecl {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl RelationDecl {
    pub fn new(name: impl Into<String>, attributes: Vec<Attribute>, primary_key: Vec<String>) -> Result<Self> {
        let decl = RelationDecl {
            name: name.into(),
            attributes,
            primary_key,
            foreign_keys: Vec::new(),
        };
        decl.validate()?;
        Ok(decl)
    }

    pub fn with_foreign_key(mut self, fk: ForeignKey) -> Self {
        self.foreign_keys.push(fk);
        self
    }

    /// Checks the local invariants: unique attribute names, a nonempty primary
    /// key drawn from the attributes, and well-formed enumerations.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for attr in &self.attributes {
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::DuplicateColumn {
                    table: self.name.clone(),
                    column: attr.name.clone(),
                });
            }
            if let AttrType::Enumerated(values) = &attr.ty {
                if values.is_empty() {
                    return Err(Error::InvalidEnum {
                        table: self.name.clone(),
                        column: attr.name.clone(),
                        reason: "no values".into(),
                    });
                }
                let mut distinct = HashSet::new();
                if let Some(dup) = values.iter().find(|v| !distinct.insert(v.as_str())) {
                    return Err(Error::InvalidEnum {
                        table: self.name.clone(),
                        column: attr.name.clone(),
                        reason: format!("duplicate value {}", sql_string(dup)),
                    });
                }
            }
        }
        if self.primary_key.is_empty() {
            return Err(Error::InvalidDecl(format!(
                "relation `{}` has no primary key",
                self.name
            )));
        }
        let mut pk_seen = HashSet::new();
        for col in &self.primary_key {
            if !seen.contains(col.as_str()) {
                return Err(Error::PkUnknownColumn {
                    table: self.name.clone(),
                    column: col.clone(),
                });
            }
            if !pk_seen.insert(col.as_str()) {
                return Err(Error::InvalidDecl(format!(
                    "primary key of `{}` repeats `{}`",
                    self.name, col
                )));
            }
        }
        for fk in &self.foreign_keys {
            if fk.columns.is_empty() || fk.columns.len() != fk.target_columns.len() {
                return Err(Error::InvalidDecl(format!(
                    "foreign key in `{}` pairs {} columns with {}",
                    self.name,
                    fk.columns.len(),
                    fk.target_columns.len()
                )));
            }
            if let Some(col) = fk.columns.iter().find(|c| !seen.contains(c.as_str())) {
                return Err(Error::FkUnknownColumn {
                    table: self.name.clone(),
                    column: col.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn require_index(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::unknown_attr(&self.name, name))
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    pub fn attr_set(&self) -> AttrSet {
        self.attribute_names().map(str::to_string).collect()
    }

    pub fn pk_indices(&self) -> Vec<usize> {
        self.primary_key.iter().filter_map(|c| self.index_of(c)).collect()
    }

    pub fn is_key_attribute(&self, name: &str) -> bool {
        self.primary_key.iter().any(|c| c == name)
    }

    /// A lookup table is a relation with exactly one attribute, which is its
    /// primary key.
    pub fn is_lookup(&self) -> bool {
        self.attributes.len() == 1 && self.primary_key.len() == 1
    }

    /// The single-column foreign key whose local column is `attr`, if any.
    pub fn foreign_key_on(&self, attr: &str) -> Option<&ForeignKey> {
        self.foreign_keys
            .iter()
            .find(|fk| fk.columns.len() == 1 && fk.columns[0] == attr)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDecl {
    pub relations: Vec<RelationDecl>,
}

impl SchemaDecl {
    pub fn new(relations: Vec<RelationDecl>) -> Result<Self> {
        let schema = SchemaDecl { relations };
        schema.validate()?;
        Ok(schema)
    }

    /// Relation lookup is case-insensitive; the stored name keeps its case.
    pub fn relation(&self, name: &str) -> Option<&RelationDecl> {
        self.relations.iter().find(|r| r.name.eq_ignore_ascii_case(name))
    }

    pub fn require(&self, name: &str) -> Result<&RelationDecl> {
        self.relation(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for rel in &self.relations {
            if !names.insert(rel.name.to_ascii_lowercase()) {
                return Err(Error::DuplicateTable(rel.name.clone()));
            }
            rel.validate()?;
        }
        for rel in &self.relations {
            for fk in &rel.foreign_keys {
                let target = self.relation(&fk.target).ok_or_else(|| Error::FkTargetMissing {
                    table: rel.name.clone(),
                    target: format!("table `{}`", fk.target),
                })?;
                for (local, remote) in fk.columns.iter().zip(&fk.target_columns) {
                    let Some(remote_attr) = target.attribute(remote) else {
                        return Err(Error::FkTargetMissing {
                            table: rel.name.clone(),
                            target: format!("column `{}`.`{}`", target.name, remote),
                        });
                    };
                    let local_attr = rel.attribute(local).expect("validated above");
                    if !same_domain(&local_attr.ty, &remote_attr.ty) {
                        return Err(Error::InvalidDecl(format!(
                            "foreign key `{}`.`{}` ({}) references `{}`.`{}` ({})",
                            rel.name, local, local_attr.ty, target.name, remote, remote_attr.ty
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Text and enumerated columns share a domain for joins and references.
pub fn same_domain(a: &AttrType, b: &AttrType) -> bool {
    match (a, b) {
        (AttrType::Integer, AttrType::Integer) | (AttrType::Date, AttrType::Date) => true,
        (x, y) => x.is_textual() && y.is_textual(),
    }
}

/// A single cell. Equality is exact: text compares case-sensitively and
/// nothing is canonicalized implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Integer(i64),
    Text(String),
    Date(NaiveDate),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Whether the tag is admissible for the declared type (null always is).
    pub fn fits(&self, ty: &AttrType) -> bool {
        match (self, ty) {
            (Value::Null, _) => true,
            (Value::Text(_), AttrType::Text) => true,
            (Value::Text(s), AttrType::Enumerated(vals)) => vals.iter().any(|v| v == s),
            (Value::Integer(_), AttrType::Integer) => true,
            (Value::Date(_), AttrType::Date) => true,
            _ => false,
        }
    }

    /// Textual rendering used in CSV output, plans and SQL. Null renders empty.
    pub fn render(&self) -> String {
        match self {
            Value::Null => String::new(),
            Value::Integer(i) => i.to_string(),
            Value::Text(s) => s.clone(),
            Value::Date(d) => d.format(DATE_FORMAT).to_string(),
        }
    }

    /// Parses a rendered value for a column of type `ty`. The empty string is
    /// null. Enumerated membership is not checked here.
    pub fn parse_as(ty: &AttrType, raw: &str) -> Option<Value> {
        if raw.is_empty() {
            return Some(Value::Null);
        }
        match ty {
            AttrType::Text | AttrType::Enumerated(_) => Some(Value::Text(raw.to_string())),
            AttrType::Integer => raw.parse::<i64>().ok().map(Value::Integer),
            AttrType::Date => parse_date(raw).map(Value::Date),
        }
    }

    /// SQL literal form: integers bare, everything else single-quoted.
    pub fn sql_literal(&self) -> String {
        match self {
            Value::Null => "NULL".to_string(),
            Value::Integer(i) => i.to_string(),
            other => sql_string(&other.render()),
        }
    }
}

pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    // chrono accepts unpadded fields; require the DD/MM/YYYY shape exactly.
    let bytes = raw.as_bytes();
    if bytes.len() != 10 || bytes[2] != b'/' || bytes[5] != b'/' {
        return None;
    }
    NaiveDate::parse_from_str(raw, DATE_FORMAT).ok()
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            other => f.write_str(&other.render()),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Null => s.serialize_none(),
            Value::Integer(i) => s.serialize_i64(*i),
            other => s.serialize_str(&other.render()),
        }
    }
}

pub type Row = Vec<Value>;

/// A declared relation together with its rows, in load order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    decl: RelationDecl,
    rows: Vec<Row>,
}

impl RelationInstance {
    /// Builds an instance, enforcing arity, type tags, non-null keys and key
    /// uniqueness. Row numbers in errors are 1-based data rows.
    pub fn new(decl: RelationDecl, rows: Vec<Row>) -> Result<Self> {
        decl.validate()?;
        let pk = decl.pk_indices();
        let mut keys: HashSet<Vec<&Value>> = HashSet::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row_no = i + 1;
            check_row(&decl, row, row_no)?;
            let key: Vec<&Value> = pk.iter().map(|&k| &row[k]).collect();
            if !keys.insert(key) {
                return Err(Error::DuplicateKey {
                    relation: decl.name.clone(),
                    row: row_no,
                });
            }
        }
        Ok(RelationInstance { decl, rows })
    }

    pub fn empty(decl: RelationDecl) -> Self {
        RelationInstance { decl, rows: Vec::new() }
    }

    /// Derived instances (projections, joins) whose rows are already known to
    /// be distinct.
    pub(crate) fn from_parts(decl: RelationDecl, rows: Vec<Row>) -> Self {
        RelationInstance { decl, rows }
    }

    pub fn decl(&self) -> &RelationDecl {
        &self.decl
    }

    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = &Value> + '_ {
        self.rows.iter().map(move |r| &r[idx])
    }

    pub fn into_parts(self) -> (RelationDecl, Vec<Row>) {
        (self.decl, self.rows)
    }
}

pub(crate) fn check_row(decl: &RelationDecl, row: &Row, row_no: usize) -> Result<()> {
    if row.len() != decl.arity() {
        return Err(Error::Arity {
            row: row_no,
            expected: decl.arity(),
            found: row.len(),
        });
    }
    for (value, attr) in row.iter().zip(&decl.attributes) {
        if !value.fits(&attr.ty) {
            return Err(Error::TypeTag {
                row: row_no,
                column: attr.name.clone(),
                expected: attr.ty.to_string(),
            });
        }
    }
    for &k in &decl.pk_indices() {
        if row[k].is_null() {
            return Err(Error::NullKey {
                row: row_no,
                column: decl.attributes[k].name.clone(),
            });
        }
    }
    Ok(())
}

/// A schema plus one instance per declared relation, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Database {
    schema: SchemaDecl,
    instances: Vec<RelationInstance>,
}

impl Database {
    /// Pairs instances with the schema by name; every relation must have
    /// exactly one instance whose declaration matches the schema's.
    pub fn new(schema: SchemaDecl, instances: Vec<RelationInstance>) -> Result<Self> {
        schema.validate()?;
        let mut ordered = Vec::with_capacity(schema.relations.len());
        let mut pool: Vec<Option<RelationInstance>> = instances.into_iter().map(Some).collect();
        for rel in &schema.relations {
            let slot = pool
                .iter_mut()
                .find(|i| i.as_ref().is_some_and(|i| i.name().eq_ignore_ascii_case(&rel.name)))
                .ok_or_else(|| Error::UnknownRelation(rel.name.clone()))?;
            let inst = slot.take().expect("matched above");
            if inst.decl() != rel {
                return Err(Error::InvalidDecl(format!(
                    "instance of `{}` does not match its schema declaration",
                    rel.name
                )));
            }
            ordered.push(inst);
        }
        if let Some(extra) = pool.into_iter().flatten().next() {
            return Err(Error::UnknownRelation(extra.name().to_string()));
        }
        Ok(Database {
            schema,
            instances: ordered,
        })
    }

    pub fn schema(&self) -> &SchemaDecl {
        &self.schema
    }

    pub fn instances(&self) -> &[RelationInstance] {
        &self.instances
    }

    pub fn instance(&self, name: &str) -> Option<&RelationInstance> {
        self.instances.iter().find(|i| i.name().eq_ignore_ascii_case(name))
    }

    pub fn require(&self, name: &str) -> Result<&RelationInstance> {
        self.instance(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn into_parts(self) -> (SchemaDecl, Vec<RelationInstance>) {
        (self.schema, self.instances)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Declared,
    Inferred,
}

/// `lhs → rhs`, kept in nontrivial form (rhs never overlaps lhs).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionalDependency {
    pub lhs: AttrSet,
    pub rhs: AttrSet,
    pub provenance: Provenance,
}

impl FunctionalDependency {
    pub fn new(lhs: AttrSet, rhs: AttrSet, provenance: Provenance) -> Self {
        let rhs = rhs.difference(&lhs).cloned().collect();
        FunctionalDependency { lhs, rhs, provenance }
    }

    /// Like [`FunctionalDependency::new`] but checks the names against `decl`.
    pub fn for_relation(
        decl: &RelationDecl,
        lhs: impl IntoIterator<Item = impl Into<String>>,
        rhs: impl IntoIterator<Item = impl Into<String>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let lhs: AttrSet = lhs.into_iter().map(Into::into).collect();
        let rhs: AttrSet = rhs.into_iter().map(Into::into).collect();
        if lhs.is_empty() {
            return Err(Error::InvalidDecl(format!(
                "functional dependency on `{}` has an empty left-hand side",
                decl.name
            )));
        }
        for name in lhs.iter().chain(&rhs) {
            decl.require_index(name)?;
        }
        Ok(Self::new(lhs, rhs, provenance))
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.is_empty()
    }
}

impl fmt::Display for FunctionalDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &AttrSet| s.iter().map(String::as_str).collect::<Vec<_>>().join(", ");
        write!(f, "{} → {}", join(&self.lhs), join(&self.rhs))
    }
}

/// Orders attribute sets by size, then lexicographically.
pub fn set_order(a: &AttrSet, b: &AttrSet) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}
