//! Seeded synthetic databases with known ground truth.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::config::{Annotation, LookupOverride};
use crate::ingest::{AnalysisConfig, AnnotationKind, Literal, Operation, Strategy, SynonymGroup};
use crate::ldnf::DecompositionPlan;
use crate::model::{AttrType, Attribute, Database, RelationDecl, RelationInstance, SchemaDecl, Value};

/// Weather concepts; every name is long enough that one adjacent
/// transposition stays within the default edit threshold.
pub const WEATHER_CONCEPTS: &[&str] = &[
    "Thunderstorm",
    "Sunny",
    "Cloudy",
    "Drizzle",
    "Heatwave",
    "Tornado",
    "Hurricane",
    "Overcast",
];

/// The three spellings of a concept: exact, lowercased and with the two
/// middle characters transposed.
pub fn spelling_variants(concept: &str) -> [String; 3] {
    let mut chars: Vec<char> = concept.chars().collect();
    let lower = concept.to_lowercase();
    let mid = chars.len() / 2;
    chars.swap(mid - 1, mid);
    [concept.to_string(), lower, chars.into_iter().collect()]
}

pub struct SyntheticWeather {
    pub db: Database,
    pub config: AnalysisConfig,
    /// Concepts actually present in the data.
    pub concept_count: usize,
}

/// `weather_events(ID, WEATHER TYPE, HAZARD SCALE)` with `rows` rows whose
/// weather types are drawn uniformly from every spelling of every concept.
pub fn synthetic_weather(rows: usize, seed: u64) -> SyntheticWeather {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decl = RelationDecl::new(
        "weather_events",
        vec![
            Attribute::new("ID", AttrType::Integer),
            Attribute::new("WEATHER TYPE", AttrType::Text),
            Attribute::new("HAZARD SCALE", AttrType::Integer),
        ],
        vec!["ID".into()],
    )
    .expect("static declaration");
    let spellings: Vec<(usize, String)> = WEATHER_CONCEPTS
        .iter()
        .enumerate()
        .flat_map(|(c, name)| spelling_variants(name).into_iter().map(move |s| (c, s)))
        .collect();
    let mut seen = vec![false; WEATHER_CONCEPTS.len()];
    let data = (0..rows)
        .map(|i| {
            let (concept, spelling) = spellings.choose(&mut rng).expect("nonempty");
            seen[*concept] = true;
            vec![
                Value::Integer(i as i64 + 1),
                Value::text(spelling.clone()),
                Value::Integer(rng.gen_range(1..=10)),
            ]
        })
        .collect();
    let inst = RelationInstance::new(decl.clone(), data).expect("generated keys are unique");
    let db = Database::new(SchemaDecl::new(vec![decl]).expect("one relation"), vec![inst]).expect("consistent");
    let mut config = AnalysisConfig::default();
    config.annotations.push(Annotation {
        relation: "weather_events".into(),
        attribute: "WEATHER TYPE".into(),
        kind: AnnotationKind::Distinct,
    });
    SyntheticWeather {
        db,
        config,
        concept_count: seen.iter().filter(|s| **s).count(),
    }
}

/// A `rows` x 10 relation mixing keys, low-cardinality text, numbers and
/// dates, for pipeline timing.
pub fn synthetic_wide(rows: usize, seed: u64) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = |n: &str| Attribute::new(n, AttrType::Text);
    let int = |n: &str| Attribute::new(n, AttrType::Integer);
    let decl = RelationDecl::new(
        "readings",
        vec![
            int("ID"),
            text("STATION"),
            text("REGION"),
            text("WEATHER TYPE"),
            int("HAZARD SCALE"),
            int("TEMPERATURE"),
            int("HUMIDITY"),
            Attribute::new("RECORDED", AttrType::Date),
            text("OBSERVER"),
            text("NOTES"),
        ],
        vec!["ID".into()],
    )
    .expect("static declaration");
    let regions = ["North", "South", "East", "West"];
    let spellings: Vec<String> = WEATHER_CONCEPTS.iter().flat_map(|c| spelling_variants(c)).collect();
    let base = chrono::NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    let data = (0..rows)
        .map(|i| {
            let station = rng.gen_range(0..50);
            vec![
                Value::Integer(i as i64 + 1),
                Value::text(format!("Station {station:02}")),
                Value::text(regions[station % regions.len()]),
                Value::text(spellings.choose(&mut rng).expect("nonempty").clone()),
                Value::Integer(rng.gen_range(1..=10)),
                Value::Integer(rng.gen_range(-20..=45)),
                Value::Integer(rng.gen_range(0..=100)),
                Value::Date(base + chrono::Days::new(rng.gen_range(0..1500))),
                Value::text(format!("Observer {}", rng.gen_range(0..200))),
                Value::text(format!("note {}", rng.gen::<u32>())),
            ]
        })
        .collect();
    let inst = RelationInstance::new(decl.clone(), data).expect("generated keys are unique");
    Database::new(SchemaDecl::new(vec![decl]).expect("one relation"), vec![inst]).expect("consistent")
}

/// A relation of `attrs` integer columns named `A0..` with values drawn
/// from `0..domain`. The key spans every column, so duplicate draws are
/// dropped and the instance may hold fewer than `rows` rows.
pub fn random_relation(attrs: usize, rows: usize, domain: i64, seed: u64) -> RelationInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..attrs).map(|i| format!("A{i}")).collect();
    let decl = RelationDecl::new(
        "r",
        names
            .iter()
            .map(|n| Attribute::new(n.clone(), AttrType::Integer))
            .collect(),
        names.clone(),
    )
    .expect("static declaration");
    let mut seen = std::collections::HashSet::new();
    let data = (0..rows)
        .map(|_| {
            (0..attrs)
                .map(|_| Value::Integer(rng.gen_range(0..domain.max(1))))
                .collect::<Vec<_>>()
        })
        .filter(|row| seen.insert(row.clone()))
        .collect();
    RelationInstance::new(decl, data).expect("rows are distinct")
}

const COLOR_POOL: &[&str] = &["Red", "red", "Green", "Gray", "Grey", "Silver", "Blue", "Bleu"];
const PLACE_POOL: &[&str] = &[
    "Brilliant Business",
    "brilliant business",
    "Science Lab",
    "Sceince Lab",
    "Museum",
    "Observatory",
];

fn pool_for(attr: &str) -> Vec<String> {
    match attr {
        "COLOR" => COLOR_POOL.iter().map(|s| s.to_string()).collect(),
        "PLACE" => PLACE_POOL.iter().map(|s| s.to_string()).collect(),
        _ => WEATHER_CONCEPTS.iter().flat_map(|c| spelling_variants(c)).collect(),
    }
}

/// A random database plus the config it should be analyzed under.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub db: Database,
    pub config: AnalysisConfig,
}

/// One to three relations `r0..` keyed by `ID`, with text columns drawn from
/// small pools of spelling variants, an optional integer `LEVEL` column and a
/// free-text `NOTE`. A random subset of the pooled columns is annotated
/// distinct; strategy, threshold, casefolding and synonyms vary by seed.
/// Columns with the same name in different relations share a lookup.
pub fn random_case(seed: u64) -> RandomCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut config = AnalysisConfig {
        edit_threshold: *[0.0, 0.15, 0.25, 0.34].choose(&mut rng).expect("nonempty"),
        casefold: rng.gen_bool(0.8),
        strategy: if rng.gen_bool(0.3) {
            Strategy::EnumColumn
        } else {
            Strategy::LookupTable
        },
        ..AnalysisConfig::default()
    };
    if rng.gen_bool(0.5) {
        config
            .synonym_groups
            .push(SynonymGroup::new(["Gray", "Grey", "Silver"]));
    }
    if rng.gen_bool(0.3) {
        config
            .synonym_groups
            .push(SynonymGroup::new(["Thunderstorm", "Lighting Storm"]));
    }

    let mut decls = Vec::new();
    let mut instances = Vec::new();
    for r in 0..rng.gen_range(1..=3) {
        let name = format!("r{r}");
        let mut pooled: Vec<&str> = ["COLOR", "WEATHER TYPE", "PLACE"]
            .into_iter()
            .filter(|_| rng.gen_bool(0.6))
            .collect();
        if pooled.is_empty() {
            pooled.push("COLOR");
        }
        let level = rng.gen_bool(0.4);
        let note = rng.gen_bool(0.4);
        let mut attrs = vec![Attribute::new("ID", AttrType::Integer)];
        attrs.extend(pooled.iter().map(|a| Attribute::new(*a, AttrType::Text)));
        if level {
            attrs.push(Attribute::new("LEVEL", AttrType::Integer));
        }
        if note {
            attrs.push(Attribute::new("NOTE", AttrType::Text));
        }
        let decl = RelationDecl::new(name.clone(), attrs, vec!["ID".into()]).expect("generated declaration");

        let pools: Vec<Vec<String>> = pooled
            .iter()
            .map(|a| {
                let mut p = pool_for(a);
                p.shuffle(&mut rng);
                let keep = rng.gen_range(1..=p.len());
                p.truncate(keep);
                p
            })
            .collect();
        let rows = rng.gen_range(1..=30);
        let data = (0..rows)
            .map(|i| {
                let mut row = vec![Value::Integer(i as i64 + 1)];
                for p in &pools {
                    // Row 1 is never null so every pooled column has a value.
                    if i > 0 && rng.gen_bool(0.1) {
                        row.push(Value::Null);
                    } else {
                        row.push(Value::text(p.choose(&mut rng).expect("nonempty").clone()));
                    }
                }
                if level {
                    row.push(Value::Integer(rng.gen_range(1..=5)));
                }
                if note {
                    row.push(Value::text(format!("note {i}")));
                }
                row
            })
            .collect();

        for a in &pooled {
            if rng.gen_bool(0.7) {
                config.annotations.push(Annotation {
                    relation: name.clone(),
                    attribute: a.to_string(),
                    kind: AnnotationKind::Distinct,
                });
            }
        }
        if level && config.strategy == Strategy::LookupTable && rng.gen_bool(0.5) {
            config.annotations.push(Annotation {
                relation: name.clone(),
                attribute: "LEVEL".into(),
                kind: AnnotationKind::Distinct,
            });
        }
        if pooled.contains(&"PLACE") && rng.gen_bool(0.3) {
            config.lookup_name_overrides.push(LookupOverride {
                relation: name.clone(),
                attribute: "PLACE".into(),
                table: format!("{name}_places"),
                column: Some("PLACE NAME".into()),
            });
        }
        instances.push(RelationInstance::new(decl.clone(), data).expect("generated keys are unique"));
        decls.push(decl);
    }
    let db = Database::new(SchemaDecl::new(decls).expect("distinct names"), instances).expect("consistent");
    RandomCase { db, config }
}

/// A workload over the planned attributes of `plan`, plus the indices of
/// inserts that carry a value outside every value set.
#[derive(Debug, Clone)]
pub struct RandomWorkload {
    pub ops: Vec<Operation>,
    pub nonmember_inserts: Vec<usize>,
}

fn literal(v: &Value) -> Literal {
    match v {
        Value::Null => Literal::Null,
        Value::Integer(i) => Literal::Integer(*i),
        other => Literal::Text(other.render()),
    }
}

fn outsider(ty: &AttrType, k: usize) -> Literal {
    match ty {
        AttrType::Integer => Literal::Integer(1_000_000 + k as i64),
        _ => Literal::Text(format!("Nonmember {k}")),
    }
}

/// `len` operations against relations of `db` that `plan` touches. Renames
/// go to fresh values or to an existing canonical; inserts use fresh keys.
/// Operations are drawn against the original data, so later ones may match
/// nothing.
pub fn random_workload(db: &Database, plan: &DecompositionPlan, len: usize, seed: u64) -> RandomWorkload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RandomWorkload {
        ops: Vec::with_capacity(len),
        nonmember_inserts: Vec::new(),
    };
    if plan.actions.is_empty() {
        return out;
    }
    let mut next_id = 1_000_000i64;
    for k in 0..len {
        let action = plan.actions.choose(&mut rng).expect("nonempty");
        let inst = db.require(&action.relation).expect("planned relation exists");
        let decl = inst.decl();
        let ai = decl.index_of(&action.attribute).expect("planned attribute exists");
        let ty = &decl.attributes[ai].ty;
        let observed: Vec<&Value> = inst.column(ai).filter(|v| !v.is_null()).collect();
        let pick_value =
            |rng: &mut ChaCha8Rng| -> Literal { observed.choose(rng).map_or_else(|| outsider(ty, k), |v| literal(v)) };
        let canonical = |rng: &mut ChaCha8Rng| -> Literal {
            let c = action
                .canonical_values
                .choose(rng)
                .expect("planned attributes have values");
            Value::parse_as(ty, c).map_or_else(|| Literal::Text(c.clone()), |v| literal(&v))
        };
        let op = match rng.gen_range(0..4) {
            0 => {
                let targets: Vec<usize> = (0..decl.arity())
                    .filter(|&i| !decl.is_key_attribute(&decl.attributes[i].name))
                    .collect();
                let si = *targets.choose(&mut rng).expect("planned attribute is not a key");
                let set_ty = &decl.attributes[si].ty;
                let new_value =
                    match plan.actions.iter().find(|a| {
                        a.relation.eq_ignore_ascii_case(&decl.name) && a.attribute == decl.attributes[si].name
                    }) {
                        Some(set_action) if rng.gen_bool(0.7) => {
                            let c = set_action.canonical_values.choose(&mut rng).expect("nonempty");
                            Value::parse_as(set_ty, c).map_or_else(|| Literal::Text(c.clone()), |v| literal(&v))
                        }
                        _ => match set_ty {
                            AttrType::Integer => Literal::Integer(rng.gen_range(1..=9)),
                            _ => outsider(set_ty, k),
                        },
                    };
                Operation::UpdateConcept {
                    relation: decl.name.clone(),
                    concept_attr: action.attribute.clone(),
                    concept_value: pick_value(&mut rng),
                    set_attr: decl.attributes[si].name.clone(),
                    new_value,
                }
            }
            1 => Operation::RenameValue {
                relation: decl.name.clone(),
                attr: action.attribute.clone(),
                old_value: pick_value(&mut rng),
                new_value: if rng.gen_bool(0.3) {
                    canonical(&mut rng)
                } else {
                    match ty {
                        AttrType::Integer => Literal::Integer(2_000_000 + k as i64),
                        _ => Literal::Text(format!("Renamed {k}")),
                    }
                },
            },
            2 => Operation::DeleteByValue {
                relation: decl.name.clone(),
                attr: action.attribute.clone(),
                value: pick_value(&mut rng),
            },
            _ => {
                next_id += 1;
                let nonmember = rng.gen_bool(0.5);
                let values = decl
                    .attributes
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        if decl.is_key_attribute(&a.name) {
                            Literal::Integer(next_id)
                        } else if i == ai {
                            if nonmember {
                                outsider(ty, k)
                            } else {
                                canonical(&mut rng)
                            }
                        } else {
                            Literal::Null
                        }
                    })
                    .collect();
                if nonmember {
                    out.nonmember_inserts.push(k);
                }
                Operation::InsertRow {
                    relation: decl.name.clone(),
                    values,
                }
            }
        };
        out.ops.push(op);
    }
    out
}
