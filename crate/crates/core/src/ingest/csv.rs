use std::collections::HashSet;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{AttrType, Database, RelationDecl, RelationInstance, SchemaDecl, Value};

/// `<relation_name>.csv`, lowercased with spaces replaced by underscores.
pub fn data_file_name(relation: &str) -> String {
    format!("{}.csv", relation.to_lowercase().replace(' ', "_"))
}

/// Loads one relation from RFC-4180 CSV. The header must list the declared
/// attributes in order. Line numbers in errors count the header as line 1.
pub fn load_csv<R: Read>(reader: R, decl: &RelationDecl) -> Result<RelationInstance> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let expected: Vec<&str> = decl.attribute_names().collect();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Csv(e.to_string()))?,
        None => {
            return Err(Error::CsvHeader {
                expected: expected.join(", "),
                found: String::new(),
            })
        }
    };
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::CsvHeader {
            expected: expected.join(", "),
            found: found.join(", "),
        });
    }

    let pk = decl.pk_indices();
    let mut keys: HashSet<Vec<Value>> = HashSet::new();
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != decl.arity() {
            return Err(Error::CsvRagged {
                line,
                expected: decl.arity(),
                found: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(decl.arity());
        for (field, attr) in rec.iter().zip(&decl.attributes) {
            let value = Value::parse_as(&attr.ty, field).ok_or_else(|| Error::CsvParse {
                line,
                column: attr.name.clone(),
                value: field.to_string(),
                expected: attr.ty.to_string(),
            })?;
            if let (AttrType::Enumerated(_), Value::Text(s)) = (&attr.ty, &value) {
                if !value.fits(&attr.ty) {
                    return Err(Error::CsvEnum {
                        line,
                        column: attr.name.clone(),
                        value: s.clone(),
                    });
                }
            }
            row.push(value);
        }
        if let Some(&k) = pk.iter().find(|&&k| row[k].is_null()) {
            return Err(Error::CsvParse {
                line,
                column: decl.attributes[k].name.clone(),
                value: String::new(),
                expected: "non-null primary-key value".into(),
            });
        }
        if !keys.insert(pk.iter().map(|&k| row[k].clone()).collect()) {
            return Err(Error::CsvDuplicateKey { line });
        }
        rows.push(row);
    }
    RelationInstance::new(decl.clone(), rows)
}

/// Serializes an instance as CSV with a header row.
pub fn write_csv(instance: &RelationInstance) -> String {
    let mut wtr = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    wtr.write_record(instance.decl().attribute_names())
        .expect("in-memory write");
    for row in instance.rows() {
        wtr.write_record(row.iter().map(Value::render))
            .expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Loads every relation of `schema` from `<dir>/<relation_name>.csv`.
pub fn load_database(schema: &SchemaDecl, dir: &Path) -> Result<Database> {
    let mut instances = Vec::with_capacity(schema.relations.len());
    for decl in &schema.relations {
        let path = dir.join(data_file_name(&decl.name));
        let file = fs::File::open(&path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        instances.push(load_csv(file, decl)?);
    }
    Database::new(schema.clone(), instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_ddl;

    fn weather() -> RelationDecl {
        parse_ddl(
            r#"CREATE TABLE weather_history ("EVENT ID" INTEGER, "WEATHER TYPE" TEXT,
               "EVENT DATE" DATE, "HAZARD SCALE" INTEGER, PRIMARY KEY ("EVENT ID"));"#,
        )
        .unwrap()
        .relations
        .remove(0)
    }

    const HEADER: &str = "EVENT ID,WEATHER TYPE,EVENT DATE,HAZARD SCALE\n";

    #[test]
    fn loads_weather_history() {
        let text = format!(
            "{HEADER}1,Thunderstorm,01/01/2023,8\n2,Showers,02/01/2023,1\n3,Lighting Storm,03/01/2023,7\n4,Light Rain,04/01/2023,1\n"
        );
        let inst = load_csv(text.as_bytes(), &weather()).unwrap();
        assert_eq!(inst.len(), 4);
        assert_eq!(inst.rows()[2][1], Value::text("Lighting Storm"));
        assert_eq!(inst.rows()[2][3], Value::Integer(7));
    }

    #[test]
    fn header_only() {
        assert!(load_csv(HEADER.as_bytes(), &weather()).unwrap().is_empty());
    }

    #[test]
    fn duplicate_key_names_line() {
        let text = format!("{HEADER}1,Thunderstorm,01/01/2023,8\n1,Showers,02/01/2023,1\n");
        let err = load_csv(text.as_bytes(), &weather()).unwrap_err();
        assert_eq!(err.code(), "csv.duplicate_key");
        assert!(matches!(err, Error::CsvDuplicateKey { line: 3 }));
    }

    #[test]
    fn header_is_trimmed_but_ordered() {
        let ok = " EVENT ID , WEATHER TYPE,EVENT DATE,HAZARD SCALE\n";
        assert!(load_csv(ok.as_bytes(), &weather()).is_ok());
        let swapped = "WEATHER TYPE,EVENT ID,EVENT DATE,HAZARD SCALE\n";
        assert_eq!(
            load_csv(swapped.as_bytes(), &weather()).unwrap_err().code(),
            "csv.header_mismatch"
        );
        assert_eq!(
            load_csv("".as_bytes(), &weather()).unwrap_err().code(),
            "csv.header_mismatch"
        );
    }

    #[test]
    fn ragged_and_type_errors() {
        let ragged = format!("{HEADER}1,Thunderstorm,01/01/2023\n");
        assert!(matches!(
            load_csv(ragged.as_bytes(), &weather()).unwrap_err(),
            Error::CsvRagged {
                line: 2,
                expected: 4,
                found: 3
            }
        ));
        let bad_int = format!("{HEADER}1,Thunderstorm,01/01/2023,high\n");
        let err = load_csv(bad_int.as_bytes(), &weather()).unwrap_err();
        assert!(matches!(&err, Error::CsvParse { line: 2, column, .. } if column == "HAZARD SCALE"));
        let bad_date = format!("{HEADER}1,Thunderstorm,2023-01-01,8\n");
        assert_eq!(
            load_csv(bad_date.as_bytes(), &weather()).unwrap_err().code(),
            "csv.type_parse"
        );
    }

    #[test]
    fn enum_membership() {
        let decl = parse_ddl("CREATE TABLE t (k INTEGER, c ENUM('Red', 'Gray'), PRIMARY KEY (k));")
            .unwrap()
            .relations
            .remove(0);
        assert!(load_csv("k,c\n1,Red\n2,\n".as_bytes(), &decl).is_ok());
        let err = load_csv("k,c\n1,Grey\n".as_bytes(), &decl).unwrap_err();
        assert_eq!(err.code(), "csv.enum_value");
    }

    #[test]
    fn empty_field_is_null_and_writes_back() {
        let text = format!("{HEADER}1,,01/01/2023,\n");
        let inst = load_csv(text.as_bytes(), &weather()).unwrap();
        assert!(inst.rows()[0][1].is_null());
        assert_eq!(write_csv(&inst), text);
    }

    #[test]
    fn file_names() {
        assert_eq!(data_file_name("Weather History"), "weather_history.csv");
    }
}
