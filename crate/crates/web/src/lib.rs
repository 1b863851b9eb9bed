//! Browser bindings. Every export takes plain strings and returns a JSON
//! document; failures come back as `{"error": "..."}` so the page never has
//! to catch a thrown value.

use indexmap::IndexMap;
use ldnf_core::ingest::{load_csv, load_workload, parse_config, parse_ddl, to_ddl, write_csv, AnalysisConfig};
use ldnf_core::ldnf::{apply_plan, build_plan, emit_migration_sql, DecompositionPlan};
use ldnf_core::nlda::cluster_values;
use ldnf_core::pipeline::analyze;
use ldnf_core::sim::{run_workload, ConceptMap, Mode, SimOptions};
use ldnf_core::{Database, RelationInstance, Value};
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::wasm_bindgen;

type Outcome = Result<Json, String>;

fn render(outcome: Outcome) -> String {
    outcome.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// `data` maps relation names to CSV text. Relations without an entry load empty.
fn database(ddl: &str, data: &str) -> Result<Database, String> {
    let schema = parse_ddl(ddl).map_err(|e| e.to_string())?;
    let files: IndexMap<String, String> =
        serde_json::from_str(data).map_err(|e| format!("data must be an object of CSV strings: {e}"))?;
    let instances = schema
        .relations
        .iter()
        .map(|decl| {
            let csv = files
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(&decl.name))
                .map(|(_, v)| v);
            match csv {
                Some(text) => load_csv(text.as_bytes(), decl).map_err(|e| format!("{}: {e}", decl.name)),
                None => Ok(RelationInstance::empty(decl.clone())),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Database::new(schema, instances).map_err(|e| e.to_string())
}

fn config(text: &str) -> Result<AnalysisConfig, String> {
    parse_config(text).map_err(|e| e.to_string())
}

fn tables(db: &Database) -> Json {
    db.instances()
        .iter()
        .map(|inst| (inst.name().to_string(), Json::String(write_csv(inst))))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

/// Clusters newline-separated values, one cell per line, blank lines ignored.
#[wasm_bindgen]
pub fn explore_clusters(values: &str, edit_threshold: f64, casefold: bool) -> String {
    render((|| {
        let cfg = AnalysisConfig {
            edit_threshold,
            casefold,
            ..AnalysisConfig::default()
        };
        cfg.validate().map_err(|e| e.to_string())?;
        let mut counts: IndexMap<Value, usize> = IndexMap::new();
        for line in values.lines().map(str::trim).filter(|l| !l.is_empty()) {
            *counts.entry(Value::text(line)).or_default() += 1;
        }
        let clusters: Vec<Json> = cluster_values(&counts, &cfg)
            .into_iter()
            .map(|c| {
                json!({
                    "canonical": c.canonical.render(),
                    "members": c.members.iter().map(|m| json!({
                        "value": m.render(),
                        "count": counts.get(m).copied().unwrap_or(0),
                    })).collect::<Vec<_>>(),
                    "evidence": c.evidence,
                })
            })
            .collect();
        Ok(json!({ "distinct": counts.len(), "clusters": clusters }))
    })())
}

/// Analyzes the database, plans the decomposition and applies it.
#[wasm_bindgen]
pub fn plan_migration(ddl: &str, data: &str, config_text: &str) -> String {
    render((|| {
        let db = database(ddl, data)?;
        let cfg = config(config_text)?;
        let analysis = analyze(&db, &cfg).map_err(|e| e.to_string())?;
        let plan = build_plan(&db, &cfg).map_err(|e| e.to_string())?;
        let out = apply_plan(&db, &plan).map_err(|e| e.to_string())?;
        let after = analyze(&out, &cfg).map_err(|e| e.to_string())?;
        Ok(json!({
            "is_ldnf": analysis.ldnf.is_ldnf,
            "findings": analysis.ldnf,
            "plan": serde_json::from_str::<Json>(&plan.to_json()).map_err(|e| e.to_string())?,
            "sql": emit_migration_sql(&plan, db.schema()),
            "schema_after": to_ddl(out.schema()),
            "tables_after": tables(&out),
            "is_ldnf_after": after.ldnf.is_ldnf,
        }))
    })())
}

/// Runs one workload against the raw layout and against the LDNF layout.
#[wasm_bindgen]
pub fn compare_anomalies(ddl: &str, data: &str, config_text: &str, workload: &str) -> String {
    render((|| {
        let db = database(ddl, data)?;
        let cfg = config(config_text)?;
        let ops = load_workload(workload).map_err(|e| e.to_string())?;
        let plan: DecompositionPlan = build_plan(&db, &cfg).map_err(|e| e.to_string())?;
        let concepts = ConceptMap::from_plan(&db, &plan).map_err(|e| e.to_string())?;
        let options = SimOptions::default();
        let raw = run_workload(&db, &ops, Mode::Raw, &concepts, &options).map_err(|e| format!("raw: {e}"))?;
        let out = apply_plan(&db, &plan).map_err(|e| e.to_string())?;
        let ldnf = run_workload(&out, &ops, Mode::Ldnf, &concepts, &options).map_err(|e| format!("ldnf: {e}"))?;
        Ok(json!({ "raw": raw, "ldnf": ldnf }))
    })())
}
