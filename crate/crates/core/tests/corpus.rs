use std::fs;
use std::path::PathBuf;

use ldnf_core::fd::{analyze_relation, NfStatus};
use ldnf_core::ingest::{load_database, load_workload, parse_config, parse_ddl, AnalysisConfig};
use ldnf_core::ldnf::{apply_plan, build_plan, emit_migration_sql, estimate_storage, is_ldnf, verify_lossless};
use ldnf_core::nlda::{classify_attributes, AttributeClass};
use ldnf_core::sim::{benchmark_group_by, run_workload, ConceptMap, Mode, SimOptions};
use ldnf_core::{Database, Value};

fn fixture(name: &str) -> (Database, AnalysisConfig) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    let schema = parse_ddl(&fs::read_to_string(dir.join("schema.sql")).unwrap()).unwrap();
    let db = load_database(&schema, &dir.join("data")).unwrap();
    let config = parse_config(&fs::read_to_string(dir.join("config.ini")).unwrap_or_default()).unwrap();
    (db, config)
}

fn workload(fixture: &str, name: &str) -> Vec<ldnf_core::ingest::Operation> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(fixture)
        .join("workloads")
        .join(name);
    load_workload(&fs::read_to_string(path).unwrap()).unwrap()
}

fn column(db: &Database, rel: &str, attr: &str) -> Vec<String> {
    let inst = db.require(rel).unwrap();
    let i = inst.decl().index_of(attr).unwrap();
    inst.column(i).map(Value::render).collect()
}

#[test]
fn favorite_color_decomposes_into_colors() {
    let (db, config) = fixture("favorite_color");
    let plan = build_plan(&db, &config).unwrap();
    assert_eq!(plan.actions.len(), 1);
    assert_eq!(plan.actions[0].lookup_name, "colors");
    let out = apply_plan(&db, &plan).unwrap();
    assert_eq!(
        column(&out, "scientists_favorite_color", "FAVORITE COLOR"),
        ["Gray", "Green", "Red", "Gray", "Gray"]
    );
    assert_eq!(
        column(&out, "scientists_favorite_color", "SCIENTIST"),
        ["Newton", "Hooke", "Planck", "Faraday", "Edison"]
    );
    let mut colors = column(&out, "colors", "COLOR");
    colors.sort();
    assert_eq!(colors, ["Gray", "Green", "Red"]);
    assert!(is_ldnf(&out, &config).unwrap().is_ldnf);
    assert!(!is_ldnf(&db, &config).unwrap().is_ldnf);
    assert!(verify_lossless(&db, &out, &plan).unwrap().passed);
}

#[test]
fn occupation_needs_no_rewrites() {
    let (db, config) = fixture("occupation");
    let plan = build_plan(&db, &config).unwrap();
    let out = apply_plan(&db, &plan).unwrap();
    assert_eq!(
        column(&out, "employee_occupation", "PLACE OF OCCUPATION"),
        column(&db, "employee_occupation", "PLACE OF OCCUPATION")
    );
    assert_eq!(
        column(&out, "places_of_occupation", "PLACE OF OCCUPATION"),
        [
            "Amazing Company",
            "Brilliant Business",
            "Captivating Company",
            "Delightful Inc"
        ]
    );
    let sql = emit_migration_sql(&plan, db.schema());
    assert!(!sql.contains("UPDATE"));
}

#[test]
fn normal_form_flags() {
    let (db, config) = fixture("birthplace");
    let r = analyze_relation(db.require("scientists_birthplace").unwrap(), &config).unwrap();
    assert_eq!(r.forms.second, NfStatus::Pass);
    assert_eq!(r.forms.third, NfStatus::Fail);
    assert!(r
        .violations
        .iter()
        .any(|v| v.dependency.as_deref() == Some("COUNTRY OF BIRTH → CITY OF BIRTH")));

    let (db, config) = fixture("discoveries");
    let r = analyze_relation(db.require("scientists").unwrap(), &config).unwrap();
    assert_eq!(r.forms.first, NfStatus::Fail);
    assert_eq!(r.forms.second, NfStatus::NotEvaluated);
    assert_eq!(r.violations[0].cell.as_ref().unwrap().row, 1);

    let (db, config) = fixture("discoveries_1nf");
    let r = analyze_relation(db.require("scientists_1nf").unwrap(), &config).unwrap();
    assert_eq!(r.forms.first, NfStatus::Pass);

    let (db, config) = fixture("weather_history");
    let r = analyze_relation(db.require("weather_history").unwrap(), &config).unwrap();
    assert_eq!(r.forms.third, NfStatus::Pass);
    let classes = classify_attributes(&db, &config).unwrap();
    let wt = classes.iter().find(|c| c.attribute == "WEATHER TYPE").unwrap();
    assert_eq!(wt.class, AttributeClass::NonLimitedDistinct);
}

#[test]
fn thunderstorm_update_leaves_event_three_behind() {
    let (db, config) = fixture("weather_history");
    let plan = build_plan(&db, &config).unwrap();
    let concepts = ConceptMap::from_plan(&db, &plan).unwrap();
    let ops = workload("weather_history", "hazard_update.json");

    let raw = run_workload(&db, &ops, Mode::Raw, &concepts, &SimOptions::default()).unwrap();
    assert_eq!(raw.stale_rows, 1);
    assert_eq!(raw.trace[0].stale_rows, [3]);

    let out = apply_plan(&db, &plan).unwrap();
    let ldnf = run_workload(&out, &ops, Mode::Ldnf, &concepts, &SimOptions::default()).unwrap();
    assert_eq!(ldnf.stale_rows, 0);
    assert_eq!(ldnf.trace[0].written_rows, 2);
}

#[test]
fn rebrand_touches_one_site_after_ldnf() {
    let (db, config) = fixture("occupation");
    let plan = build_plan(&db, &config).unwrap();
    let concepts = ConceptMap::from_plan(&db, &plan).unwrap();
    let ops = workload("occupation", "rebrand.json");
    let raw = run_workload(&db, &ops, Mode::Raw, &concepts, &SimOptions::default()).unwrap();
    assert_eq!(raw.update_sites, 2);
    let partial = run_workload(&db, &ops, Mode::Raw, &concepts, &SimOptions { fault: Some(1) }).unwrap();
    assert_eq!(partial.trace[0].written_rows, 1);
    let out = apply_plan(&db, &plan).unwrap();
    let ldnf = run_workload(&out, &ops, Mode::Ldnf, &concepts, &SimOptions::default()).unwrap();
    assert_eq!(ldnf.update_sites, 1);
}

#[test]
fn favorite_color_groups_and_storage() {
    let (db, config) = fixture("favorite_color");
    let plan = build_plan(&db, &config).unwrap();
    let concepts = ConceptMap::from_plan(&db, &plan).unwrap();
    let inst = db.require("scientists_favorite_color").unwrap();
    let b = benchmark_group_by(
        inst,
        "FAVORITE COLOR",
        concepts.clusters("scientists_favorite_color", "FAVORITE COLOR"),
    )
    .unwrap();
    assert_eq!((b.group_count_raw, b.group_count_ldnf), (5, 3));

    let est = estimate_storage(&plan, &db).unwrap();
    // Grey, Green, Red, Silver, Gray at 2 + len bytes each.
    assert_eq!(est[0].bytes_before, 6 + 7 + 5 + 8 + 6);
    assert_eq!(est[0].bytes_after_enum, 5);

    let ops = workload("favorite_color", "mixed.json");
    let out = apply_plan(&db, &plan).unwrap();
    let ldnf = run_workload(&out, &ops, Mode::Ldnf, &concepts, &SimOptions::default()).unwrap();
    assert!(ldnf.lost_values.is_empty());
    assert_eq!(ldnf.rejected_inserts, 1);
    let raw = run_workload(&db, &ops, Mode::Raw, &concepts, &SimOptions::default()).unwrap();
    assert_eq!(raw.lost_values.len(), 1);
}
