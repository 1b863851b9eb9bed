use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use ldnf_core::fd::{NfStatus, NormalFormReport};
use ldnf_core::ldnf::{DecompositionPlan, LdnfReport, StorageEstimate};
use ldnf_core::nlda::{AttributeClass, AttributeClassification};
use ldnf_core::pipeline::Analysis;
use ldnf_core::sim::{AnomalyReport, GroupByBenchmark};
use serde::Serialize;

use crate::load::InputDigest;

#[derive(Debug, Serialize)]
pub struct PlanActionSummary {
    pub relation: String,
    pub attribute: String,
    pub strategy: String,
    pub lookup_name: String,
    pub canonical_values: usize,
    pub rewritten_values: usize,
}

#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub actions: Vec<PlanActionSummary>,
    pub storage: Vec<StorageEstimate>,
}

impl PlanSummary {
    pub fn new(plan: &DecompositionPlan, storage: Vec<StorageEstimate>) -> Self {
        PlanSummary {
            actions: plan
                .actions
                .iter()
                .map(|a| PlanActionSummary {
                    relation: a.relation.clone(),
                    attribute: a.attribute.clone(),
                    strategy: a.strategy.to_string(),
                    lookup_name: a.lookup_name.clone(),
                    canonical_values: a.canonical_values.len(),
                    rewritten_values: a.rewrite_map.iter().filter(|(k, v)| k != v).count(),
                })
                .collect(),
            storage,
        }
    }
}

/// Machine-readable record of one run. Field order is fixed by declaration.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    pub normal_forms: Vec<NormalFormReport>,
    pub attributes: Vec<AttributeClassification>,
    pub ldnf: LdnfReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anomaly: Option<AnomalyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_by: Option<GroupByBenchmark>,
    pub errors: Vec<String>,
}

impl RunReport {
    pub fn new(command: &'static str, inputs: Vec<InputDigest>, analysis: Analysis, deterministic: bool) -> Self {
        let generated_at_unix =
            (!deterministic).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        RunReport {
            tool: "ldnf",
            version: env!("CARGO_PKG_VERSION"),
            generated_at_unix,
            command,
            inputs,
            normal_forms: analysis.normal_forms,
            attributes: analysis.attributes,
            ldnf: analysis.ldnf,
            plan: None,
            anomaly: None,
            group_by: None,
            errors: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn status(s: NfStatus) -> &'static str {
    match s {
        NfStatus::Pass => "pass",
        NfStatus::Fail => "fail",
        NfStatus::NotEvaluated => "not evaluated",
    }
}

pub fn render_analysis(
    normal_forms: &[NormalFormReport],
    attributes: &[AttributeClassification],
    ldnf: &LdnfReport,
) -> String {
    let mut out = String::new();
    for r in normal_forms {
        let source = serde_json::to_value(r.fd_source)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned));
        let _ = writeln!(
            out,
            "relation {} (dependencies: {})",
            r.relation,
            source.unwrap_or_default()
        );
        let f = &r.forms;
        let _ = writeln!(
            out,
            "  1NF {}  2NF {}  3NF {}  BCNF {}",
            status(f.first),
            status(f.second),
            status(f.third),
            status(f.bcnf)
        );
        let keys: Vec<String> = r
            .keys
            .candidate_keys
            .iter()
            .map(|k| format!("{{{}}}", k.iter().cloned().collect::<Vec<_>>().join(", ")))
            .collect();
        if !keys.is_empty() {
            let _ = writeln!(out, "  candidate keys: {}", keys.join(" "));
        }
        for v in &r.violations {
            match &v.dependency {
                Some(d) => {
                    let _ = writeln!(out, "  {} violation [{d}]: {}", v.form, v.description);
                }
                None => {
                    let _ = writeln!(out, "  {} violation: {}", v.form, v.description);
                }
            }
        }
        if r.advisory {
            let _ = writeln!(out, "  note: dependencies were inferred from the data");
        }
    }
    let distinct: Vec<&AttributeClassification> = attributes
        .iter()
        .filter(|a| a.class != AttributeClass::NotDistinct)
        .collect();
    if !distinct.is_empty() {
        let _ = writeln!(out, "distinct attributes");
        for a in distinct {
            let class = match a.class {
                AttributeClass::LimitedDistinct => "limited",
                _ => "NON-LIMITED",
            };
            let _ = writeln!(out, "  {}.{}: {class} ({})", a.relation, a.attribute, a.reason);
        }
    }
    let _ = writeln!(
        out,
        "LDNF: {}",
        if ldnf.is_ldnf {
            "yes".to_string()
        } else {
            format!("no, {} violation(s)", ldnf.violations.len())
        }
    );
    for v in &ldnf.violations {
        let _ = writeln!(out, "  {}.{}: {}", v.relation, v.attribute, v.reason);
    }
    for w in &ldnf.ordering_warnings {
        let _ = writeln!(out, "  warning: {}: {}", w.relation, w.note);
    }
    out
}

pub fn render_plan(plan: &DecompositionPlan) -> String {
    let mut out = String::new();
    if plan.is_empty() {
        out.push_str("plan: no non-limited distinct attributes\n");
    }
    for a in &plan.actions {
        let _ = writeln!(
            out,
            "plan: {}.{} -> {} {} [{}]",
            a.relation,
            a.attribute,
            a.strategy,
            a.lookup_name,
            a.canonical_values.join(", ")
        );
        for (from, to) in a.rewrite_map.iter().filter(|(k, v)| k != v) {
            let _ = writeln!(out, "  rewrite {from} -> {to}");
        }
    }
    out
}

pub fn render_anomaly(r: &AnomalyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", r.mode);
    let _ = writeln!(out, "stale_rows: {}", r.stale_rows);
    let _ = writeln!(out, "update_sites: {}", r.update_sites);
    let lost: Vec<String> = r
        .lost_values
        .iter()
        .map(|l| format!("{}.{}={}", l.relation, l.attribute, l.value))
        .collect();
    let _ = writeln!(out, "lost_values: [{}]", lost.join(", "));
    let _ = writeln!(out, "rejected_inserts: {}", r.rejected_inserts);
    let _ = writeln!(out, "rejected_updates: {}", r.rejected_updates);
    for t in &r.trace {
        let _ = write!(
            out,
            "  #{} {} {}: matched {}, written {}, sites {}",
            t.index, t.op, t.relation, t.matched_rows, t.written_rows, t.update_sites
        );
        if !t.stale_rows.is_empty() {
            let rows: Vec<String> = t.stale_rows.iter().map(usize::to_string).collect();
            let _ = write!(out, ", stale rows {}", rows.join(" "));
        }
        if let Some(v) = &t.lost_value {
            let _ = write!(out, ", lost {v}");
        }
        if let Some(reason) = &t.rejected {
            let _ = write!(out, ", rejected: {reason}");
        }
        out.push('\n');
    }
    out
}

pub fn render_group_by(b: &GroupByBenchmark) -> String {
    format!(
        "group by {}.{} over {} rows: raw {} groups, ldnf {} groups; probes raw {}, ldnf {}; raw reconciliation pairs {}\n",
        b.relation,
        b.attribute,
        b.rows,
        b.group_count_raw,
        b.group_count_ldnf,
        b.comparisons_raw,
        b.comparisons_ldnf,
        b.reconciliation_comparisons_raw
    )
}
