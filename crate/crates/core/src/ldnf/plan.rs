use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::distinct_value_counts;
use crate::error::{Error, Result};
use crate::fd::analyze_relation;
use crate::ingest::{AnalysisConfig, Strategy};
use crate::model::{AttrType, Database, Value};
use crate::nlda::{classify_attributes, cluster_values, AttributeClass, ValueCluster};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttrRef {
    pub relation: String,
    pub attribute: String,
}

/// One attribute's decomposition step. Values are stored in their rendered
/// text form and re-typed against the source column when applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanAction {
    pub relation: String,
    pub attribute: String,
    pub strategy: Strategy,
    pub lookup_name: String,
    /// The lookup table's single attribute. Defaults to the source attribute.
    pub lookup_attribute: String,
    pub canonical_values: Vec<String>,
    pub rewrite_map: IndexMap<String, String>,
    #[serde(default)]
    pub shared_with: Vec<AttrRef>,
}

impl PlanAction {
    pub fn target(&self) -> AttrRef {
        AttrRef {
            relation: self.relation.clone(),
            attribute: self.attribute.clone(),
        }
    }

    /// Groups of raw values that rewrite to each canonical, in canonical order.
    /// Identity entries are included.
    pub fn clusters(&self) -> Vec<(String, Vec<String>)> {
        self.canonical_values
            .iter()
            .map(|c| {
                let members = self
                    .rewrite_map
                    .iter()
                    .filter(|(_, to)| *to == c)
                    .map(|(from, _)| from.clone())
                    .collect();
                (c.clone(), members)
            })
            .collect()
    }
}

/// Ordered list of actions; serializes as a bare JSON array.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecompositionPlan {
    pub actions: Vec<PlanAction>,
}

impl DecompositionPlan {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: DecompositionPlan = serde_json::from_str(text).map_err(|e| Error::PlanJson(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let mut targets = HashSet::new();
        let mut lookups: IndexMap<String, &PlanAction> = IndexMap::new();
        for a in &self.actions {
            if !targets.insert((a.relation.to_ascii_lowercase(), a.attribute.as_str())) {
                return Err(Error::PlanJson(format!(
                    "`{}`.`{}` is planned twice",
                    a.relation, a.attribute
                )));
            }
            let mut seen = HashSet::new();
            if let Some(dup) = a.canonical_values.iter().find(|v| !seen.insert(v.as_str())) {
                return Err(Error::PlanJson(format!(
                    "`{}`.`{}` lists canonical `{dup}` twice",
                    a.relation, a.attribute
                )));
            }
            if let Some((from, to)) = a.rewrite_map.iter().find(|(_, to)| !seen.contains(to.as_str())) {
                return Err(Error::PlanJson(format!(
                    "`{}`.`{}` rewrites `{from}` to `{to}`, which is not a canonical value",
                    a.relation, a.attribute
                )));
            }
            if a.strategy == Strategy::LookupTable {
                let key = a.lookup_name.to_ascii_lowercase();
                if let Some(first) = lookups.get(&key) {
                    if first.canonical_values != a.canonical_values || first.lookup_attribute != a.lookup_attribute {
                        return Err(Error::LookupCollision(a.lookup_name.clone()));
                    }
                } else {
                    lookups.insert(key, a);
                }
            }
        }
        Ok(())
    }
}

/// `<attribute>_values`, lowercased with spaces replaced by underscores.
pub fn default_lookup_name(attribute: &str) -> String {
    format!("{}_values", attribute.to_lowercase().replace(' ', "_"))
}

struct Pending {
    relation: String,
    attribute: String,
    ty: AttrType,
    lookup_name: String,
    lookup_attribute: Option<String>,
    counts: IndexMap<Value, usize>,
}

/// One action per non-limited distinct attribute.
///
/// Under the lookup-table strategy, attributes that resolve to the same
/// lookup name are clustered together and share a single lookup table.
/// Canonical values follow the first occurrence of their cluster in the data.
pub fn build_plan(db: &Database, config: &AnalysisConfig) -> Result<DecompositionPlan> {
    let classes = classify_attributes(db, config)?;
    let mut pending = Vec::new();
    for c in classes.iter().filter(|c| c.class == AttributeClass::NonLimitedDistinct) {
        let inst = db.require(&c.relation)?;
        let ty = inst
            .decl()
            .attribute(&c.attribute)
            .expect("classified attribute exists")
            .ty
            .clone();
        if config.strategy == Strategy::EnumColumn && ty != AttrType::Text {
            return Err(unsupported(c, config.strategy, format!("{ty} column")));
        }
        let over = config.lookup_override(&c.relation, &c.attribute);
        pending.push(Pending {
            relation: c.relation.clone(),
            attribute: c.attribute.clone(),
            ty,
            lookup_name: over.map_or_else(|| default_lookup_name(&c.attribute), |o| o.table.clone()),
            lookup_attribute: over.and_then(|o| o.column.clone()),
            counts: distinct_value_counts(inst, &c.attribute)?,
        });
    }

    // Group by lookup name (enum actions never share).
    let mut groups: IndexMap<String, Vec<usize>> = IndexMap::new();
    for (i, p) in pending.iter().enumerate() {
        let key = match config.strategy {
            Strategy::LookupTable => p.lookup_name.to_ascii_lowercase(),
            Strategy::EnumColumn => format!("\u{0}{i}"),
        };
        groups.entry(key).or_default().push(i);
    }

    let mut actions: Vec<Option<PlanAction>> = vec![None; pending.len()];
    for members in groups.values() {
        let first = &pending[members[0]];
        if config.strategy == Strategy::LookupTable {
            if db.schema().relation(&first.lookup_name).is_some() {
                return Err(Error::LookupCollision(first.lookup_name.clone()));
            }
            for &m in &members[1..] {
                let p = &pending[m];
                let compatible = crate::model::same_domain(&p.ty, &first.ty)
                    && (p.lookup_attribute.is_none()
                        || first.lookup_attribute.is_none()
                        || p.lookup_attribute == first.lookup_attribute);
                if !compatible {
                    return Err(Error::LookupCollision(p.lookup_name.clone()));
                }
            }
        }
        if config.strategy == Strategy::EnumColumn && combined_is_empty(&pending, members) {
            let p = &pending[members[0]];
            return Err(Error::UnsupportedStrategy {
                relation: p.relation.clone(),
                attribute: p.attribute.clone(),
                strategy: config.strategy.to_string(),
                reason: "no non-null values to enumerate".into(),
            });
        }
        let lookup_attribute = members
            .iter()
            .find_map(|&m| pending[m].lookup_attribute.clone())
            .unwrap_or_else(|| first.attribute.clone());

        let mut combined: IndexMap<Value, usize> = IndexMap::new();
        for &m in members {
            for (v, c) in &pending[m].counts {
                *combined.entry(v.clone()).or_insert(0) += c;
            }
        }
        let clusters = cluster_values(&combined, config);
        let canonical_of = canonical_lookup(&clusters);
        let mut canonical_values: Vec<String> = Vec::new();
        for v in combined.keys() {
            let c = canonical_of[v].render();
            if !canonical_values.contains(&c) {
                canonical_values.push(c);
            }
        }

        for &m in members {
            let p = &pending[m];
            let rewrite_map = p
                .counts
                .keys()
                .map(|v| (v.render(), canonical_of[v].render()))
                .collect();
            let shared_with = members
                .iter()
                .filter(|&&o| o != m)
                .map(|&o| AttrRef {
                    relation: pending[o].relation.clone(),
                    attribute: pending[o].attribute.clone(),
                })
                .collect();
            actions[m] = Some(PlanAction {
                relation: p.relation.clone(),
                attribute: p.attribute.clone(),
                strategy: config.strategy,
                lookup_name: first.lookup_name.clone(),
                lookup_attribute: lookup_attribute.clone(),
                canonical_values: canonical_values.clone(),
                rewrite_map,
                shared_with,
            });
        }
    }
    let plan = DecompositionPlan {
        actions: actions.into_iter().map(|a| a.expect("every action grouped")).collect(),
    };
    plan.validate()?;
    Ok(plan)
}

fn unsupported(c: &crate::nlda::AttributeClassification, strategy: Strategy, reason: String) -> Error {
    Error::UnsupportedStrategy {
        relation: c.relation.clone(),
        attribute: c.attribute.clone(),
        strategy: strategy.to_string(),
        reason,
    }
}

fn combined_is_empty(pending: &[Pending], members: &[usize]) -> bool {
    members.iter().all(|&m| pending[m].counts.is_empty())
}

fn canonical_lookup(clusters: &[ValueCluster]) -> std::collections::HashMap<Value, Value> {
    clusters
        .iter()
        .flat_map(|c| c.members.iter().map(move |m| (m.clone(), c.canonical.clone())))
        .collect()
}

/// Relations targeted by `plan` that do not pass 3NF. Planning on top of a
/// relation below 3NF is refused unless forced.
pub fn third_nf_blockers(db: &Database, config: &AnalysisConfig, plan: &DecompositionPlan) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for a in &plan.actions {
        let inst = db.require(&a.relation)?;
        if out.iter().any(|r| r.eq_ignore_ascii_case(inst.name())) {
            continue;
        }
        if !analyze_relation(inst, config)?.third_nf_pass() {
            out.push(inst.name().to_string());
        }
    }
    Ok(out)
}

/// Plan clusters per planned attribute, with every value typed for its column.
pub fn plan_clusters(db: &Database, plan: &DecompositionPlan) -> Result<Vec<(AttrRef, Vec<ValueCluster>)>> {
    let mut out = Vec::new();
    for a in &plan.actions {
        let decl = db.schema().require(&a.relation)?;
        let ty = &decl
            .attribute(&a.attribute)
            .ok_or_else(|| Error::UnknownAttribute {
                relation: a.relation.clone(),
                attribute: a.attribute.clone(),
            })?
            .ty;
        let typed = |s: &str| Value::parse_as(ty, s).unwrap_or_else(|| Value::text(s));
        let clusters = a
            .clusters()
            .into_iter()
            .map(|(canon, members)| ValueCluster {
                members: members.iter().map(|m| typed(m)).collect(),
                canonical: typed(&canon),
                evidence: Vec::new(),
            })
            .collect();
        out.push((a.target(), clusters));
    }
    Ok(out)
}
