//! Analysis configuration and its line-based file format.
//!
//! ```text
//! # thresholds
//! distinct_max_values = 32
//! edit_threshold = 0.25
//! atomic_delimiters = ", " ";"
//!
//! [synonyms]
//! Gray, Grey, Silver          # first value is the canonical
//!
//! [annotations]
//! favorite_colors.FAVORITE COLOR = distinct
//!
//! [fds]
//! birthplaces: COUNTRY OF BIRTH -> CITY OF BIRTH
//!
//! [lookup_names]
//! favorite_colors.FAVORITE COLOR = colors (COLOR)
//! ```
//!
//! Only whole-line `#` comments are recognized.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    LookupTable,
    EnumColumn,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::LookupTable => "lookup_table",
            Strategy::EnumColumn => "enum_column",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "lookup_table" => Ok(Strategy::LookupTable),
            "enum_column" => Ok(Strategy::EnumColumn),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    Distinct,
    NotDistinct,
}

impl AnnotationKind {
    fn as_str(self) -> &'static str {
        match self {
            AnnotationKind::Distinct => "distinct",
            AnnotationKind::NotDistinct => "not_distinct",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynonymGroup {
    pub values: Vec<String>,
    pub canonical: Option<String>,
}

impl SynonymGroup {
    /// A group whose first value is its designated canonical.
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Self {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let canonical = values.first().cloned();
        SynonymGroup { values, canonical }
    }

    pub fn contains(&self, value: &str) -> bool {
        self.values.iter().any(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub relation: String,
    pub attribute: String,
    pub kind: AnnotationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeclaredFd {
    pub relation: String,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LookupOverride {
    pub relation: String,
    pub attribute: String,
    pub table: String,
    /// Name of the lookup's single attribute; defaults to the source attribute.
    pub column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub distinct_max_values: usize,
    pub distinct_max_ratio: f64,
    pub distinct_min_rows: usize,
    pub edit_threshold: f64,
    pub casefold: bool,
    pub synonym_groups: Vec<SynonymGroup>,
    pub annotations: Vec<Annotation>,
    pub declared_fds: Vec<DeclaredFd>,
    pub strategy: Strategy,
    pub lookup_name_overrides: Vec<LookupOverride>,
    pub fd_max_lhs: usize,
    pub atomic_delimiters: Vec<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            distinct_max_values: 32,
            distinct_max_ratio: 0.1,
            distinct_min_rows: 50,
            edit_threshold: 0.25,
            casefold: true,
            synonym_groups: Vec::new(),
            annotations: Vec::new(),
            declared_fds: Vec::new(),
            strategy: Strategy::LookupTable,
            lookup_name_overrides: Vec::new(),
            fd_max_lhs: 2,
            atomic_delimiters: vec![", ".to_string()],
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |key: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::ConfigRange {
                    key: key.to_string(),
                    message: format!("{v} is not within [0, 1]"),
                })
            }
        };
        unit("distinct_max_ratio", self.distinct_max_ratio)?;
        unit("edit_threshold", self.edit_threshold)?;
        if self.fd_max_lhs < 1 {
            return Err(Error::ConfigRange {
                key: "fd_max_lhs".into(),
                message: "must be at least 1".into(),
            });
        }
        if self.atomic_delimiters.iter().any(String::is_empty) {
            return Err(Error::ConfigRange {
                key: "atomic_delimiters".into(),
                message: "delimiters must be nonempty".into(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for group in &self.synonym_groups {
            for v in &group.values {
                if !seen.insert(v.as_str()) {
                    return Err(Error::ConfigSynonymOverlap(v.clone()));
                }
            }
            if let Some(c) = &group.canonical {
                if !group.contains(c) {
                    return Err(Error::ConfigRange {
                        key: "synonyms".into(),
                        message: format!("canonical `{c}` is not a member of its group"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn annotation(&self, relation: &str, attribute: &str) -> Option<AnnotationKind> {
        self.annotations
            .iter()
            .rev()
            .find(|a| a.relation.eq_ignore_ascii_case(relation) && a.attribute == attribute)
            .map(|a| a.kind)
    }

    pub fn declared_fds_for<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = &'a DeclaredFd> + 'a {
        self.declared_fds
            .iter()
            .filter(move |fd| fd.relation.eq_ignore_ascii_case(relation))
    }

    pub fn lookup_override(&self, relation: &str, attribute: &str) -> Option<&LookupOverride> {
        self.lookup_name_overrides
            .iter()
            .rev()
            .find(|o| o.relation.eq_ignore_ascii_case(relation) && o.attribute == attribute)
    }

    pub fn synonym_group(&self, value: &str) -> Option<&SynonymGroup> {
        self.synonym_groups.iter().find(|g| g.contains(value))
    }
}

#[derive(Clone, Copy)]
enum Section {
    Top,
    Synonyms,
    Annotations,
    Fds,
    LookupNames,
}

/// Parses the configuration format; absent keys take their defaults.
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::default();
    let mut section = Section::Top;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: &str| Error::ConfigMalformed {
            line: line_no,
            message: message.to_string(),
        };
        if line.starts_with('[') {
            section = match line {
                "[synonyms]" => Section::Synonyms,
                "[annotations]" => Section::Annotations,
                "[fds]" => Section::Fds,
                "[lookup_names]" => Section::LookupNames,
                _ => return Err(malformed(&format!("unknown section {line}"))),
            };
            continue;
        }
        match section {
            Section::Top => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| malformed("expected `key = value`"))?;
                set_key(&mut cfg, key.trim(), value.trim(), line_no)?;
            }
            Section::Synonyms => {
                let values: Vec<String> = line.split(',').map(|v| v.trim().to_string()).collect();
                if values.iter().any(String::is_empty) {
                    return Err(malformed("empty synonym value"));
                }
                cfg.synonym_groups.push(SynonymGroup::new(values));
            }
            Section::Annotations => {
                let (target, kind) = line
                    .rsplit_once('=')
                    .ok_or_else(|| malformed("expected `relation.attr = distinct|not_distinct`"))?;
                let (relation, attribute) =
                    split_target(target.trim()).ok_or_else(|| malformed("expected `relation.attr`"))?;
                let kind = match kind.trim() {
                    "distinct" => AnnotationKind::Distinct,
                    "not_distinct" => AnnotationKind::NotDistinct,
                    other => return Err(malformed(&format!("unknown annotation `{other}`"))),
                };
                cfg.annotations.push(Annotation {
                    relation,
                    attribute,
                    kind,
                });
            }
            Section::Fds => {
                let (relation, fd) = line
                    .split_once(':')
                    .ok_or_else(|| malformed("expected `relation: A, B -> C`"))?;
                let (lhs, rhs) = fd.split_once("->").ok_or_else(|| malformed("expected `->`"))?;
                let names = |s: &str| -> Option<Vec<String>> {
                    let v: Vec<String> = s.split(',').map(|n| n.trim().to_string()).collect();
                    (!v.iter().any(String::is_empty)).then_some(v)
                };
                let (Some(lhs), Some(rhs)) = (names(lhs), names(rhs)) else {
                    return Err(malformed("empty attribute name in dependency"));
                };
                let relation = relation.trim();
                if relation.is_empty() {
                    return Err(malformed("missing relation name"));
                }
                cfg.declared_fds.push(DeclaredFd {
                    relation: relation.to_string(),
                    lhs,
                    rhs,
                });
            }
            Section::LookupNames => {
                let (target, name) = line
                    .rsplit_once('=')
                    .ok_or_else(|| malformed("expected `relation.attr = table_name`"))?;
                let (relation, attribute) =
                    split_target(target.trim()).ok_or_else(|| malformed("expected `relation.attr`"))?;
                let name = name.trim();
                let (table, column) = match name.split_once('(') {
                    Some((table, rest)) => {
                        let column = rest
                            .strip_suffix(')')
                            .map(str::trim)
                            .filter(|c| !c.is_empty())
                            .ok_or_else(|| malformed("expected `table_name (COLUMN)`"))?;
                        (table.trim(), Some(column.to_string()))
                    }
                    None => (name, None),
                };
                if table.is_empty() {
                    return Err(malformed("empty lookup table name"));
                }
                cfg.lookup_name_overrides.push(LookupOverride {
                    relation,
                    attribute,
                    table: table.to_string(),
                    column,
                });
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn split_target(target: &str) -> Option<(String, String)> {
    let (rel, attr) = target.split_once('.')?;
    let (rel, attr) = (rel.trim(), attr.trim());
    (!rel.is_empty() && !attr.is_empty()).then(|| (rel.to_string(), attr.to_string()))
}

fn set_key(cfg: &mut AnalysisConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let bad = |what: &str| Error::ConfigMalformed {
        line,
        message: format!("`{key}` expects {what}, got `{value}`"),
    };
    let count = || value.parse::<usize>().map_err(|_| bad("a non-negative integer"));
    let fraction = || {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("a number"))
    };
    match key {
        "distinct_max_values" => cfg.distinct_max_values = count()?,
        "distinct_max_ratio" => cfg.distinct_max_ratio = fraction()?,
        "distinct_min_rows" => cfg.distinct_min_rows = count()?,
        "edit_threshold" => cfg.edit_threshold = fraction()?,
        "fd_max_lhs" => cfg.fd_max_lhs = count()?,
        "casefold" => {
            cfg.casefold = match value {
                "on" | "true" | "yes" => true,
                "off" | "false" | "no" => false,
                _ => return Err(bad("on/off")),
            }
        }
        "strategy" => cfg.strategy = value.parse().map_err(|_| bad("lookup_table or enum_column"))?,
        "atomic_delimiters" => {
            cfg.atomic_delimiters = parse_quoted_list(value).ok_or_else(|| bad("double-quoted strings"))?
        }
        _ => {
            return Err(Error::ConfigUnknownKey {
                line,
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

/// `"a" "b", "c"` → [a, b, c]; `""` inside quotes escapes a quote.
fn parse_quoted_list(value: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut chars = value.chars().peekable();
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace() || *c == ',') {
            chars.next();
        }
        match chars.next() {
            None => break,
            Some('"') => {}
            Some(_) => return None,
        }
        let mut s = String::new();
        loop {
            match chars.next()? {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    s.push('"');
                }
                '"' => break,
                c => s.push(c),
            }
        }
        out.push(s);
    }
    (!out.is_empty()).then_some(out)
}

impl fmt::Display for AnalysisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "distinct_max_values = {}", self.distinct_max_values)?;
        writeln!(f, "distinct_max_ratio = {}", self.distinct_max_ratio)?;
        writeln!(f, "distinct_min_rows = {}", self.distinct_min_rows)?;
        writeln!(f, "edit_threshold = {}", self.edit_threshold)?;
        writeln!(f, "casefold = {}", if self.casefold { "on" } else { "off" })?;
        writeln!(f, "strategy = {}", self.strategy)?;
        writeln!(f, "fd_max_lhs = {}", self.fd_max_lhs)?;
        let delims: Vec<String> = self
            .atomic_delimiters
            .iter()
            .map(|d| format!("\"{}\"", d.replace('"', "\"\"")))
            .collect();
        writeln!(f, "atomic_delimiters = {}", delims.join(" "))?;
        if !self.synonym_groups.is_empty() {
            writeln!(f, "\n[synonyms]")?;
            for g in &self.synonym_groups {
                // The file format always designates the first value.
                let mut values = g.values.clone();
                if let Some(c) = &g.canonical {
                    values.retain(|v| v != c);
                    values.insert(0, c.clone());
                }
                writeln!(f, "{}", values.join(", "))?;
            }
        }
        if !self.annotations.is_empty() {
            writeln!(f, "\n[annotations]")?;
            for a in &self.annotations {
                writeln!(f, "{}.{} = {}", a.relation, a.attribute, a.kind.as_str())?;
            }
        }
        if !self.declared_fds.is_empty() {
            writeln!(f, "\n[fds]")?;
            for fd in &self.declared_fds {
                writeln!(f, "{}: {} -> {}", fd.relation, fd.lhs.join(", "), fd.rhs.join(", "))?;
            }
        }
        if !self.lookup_name_overrides.is_empty() {
            writeln!(f, "\n[lookup_names]")?;
            for o in &self.lookup_name_overrides {
                match &o.column {
                    Some(c) => writeln!(f, "{}.{} = {} ({})", o.relation, o.attribute, o.table, c)?,
                    None => writeln!(f, "{}.{} = {}", o.relation, o.attribute, o.table)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_config("").unwrap(), AnalysisConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), AnalysisConfig::default());
    }

    #[test]
    fn default_round_trips() {
        let text = AnalysisConfig::default().to_string();
        assert_eq!(parse_config(&text).unwrap(), AnalysisConfig::default());
    }

    #[test]
    fn synonym_group_canonical_first() {
        let cfg = parse_config("[synonyms]\nGray, Grey, Silver\n").unwrap();
        assert_eq!(cfg.synonym_groups.len(), 1);
        assert_eq!(cfg.synonym_groups[0].canonical.as_deref(), Some("Gray"));
        assert_eq!(cfg.synonym_groups[0].values, ["Gray", "Grey", "Silver"]);
    }

    #[test]
    fn declared_fd_line() {
        let cfg = parse_config("[fds]\nbirthplaces: COUNTRY OF BIRTH -> CITY OF BIRTH\n").unwrap();
        assert_eq!(
            cfg.declared_fds,
            vec![DeclaredFd {
                relation: "birthplaces".into(),
                lhs: vec!["COUNTRY OF BIRTH".into()],
                rhs: vec!["CITY OF BIRTH".into()],
            }]
        );
    }

    #[test]
    fn sections_and_keys() {
        let text = r#"
distinct_max_values = 8
casefold = off
strategy = enum_column
atomic_delimiters = ", " ";" "|"

[annotations]
weather_history.WEATHER TYPE = distinct
weather_history.EVENT DATE = not_distinct

[lookup_names]
favorite_colors.FAVORITE COLOR = colors (COLOR)
employee_occupation.PLACE OF OCCUPATION = places
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.distinct_max_values, 8);
        assert!(!cfg.casefold);
        assert_eq!(cfg.strategy, Strategy::EnumColumn);
        assert_eq!(cfg.atomic_delimiters, [", ", ";", "|"]);
        assert_eq!(
            cfg.annotation("Weather_History", "WEATHER TYPE"),
            Some(AnnotationKind::Distinct)
        );
        assert_eq!(
            cfg.annotation("weather_history", "EVENT DATE"),
            Some(AnnotationKind::NotDistinct)
        );
        let o = cfg.lookup_override("favorite_colors", "FAVORITE COLOR").unwrap();
        assert_eq!((o.table.as_str(), o.column.as_deref()), ("colors", Some("COLOR")));
        assert_eq!(
            cfg.lookup_override("employee_occupation", "PLACE OF OCCUPATION")
                .unwrap()
                .column,
            None
        );
        assert_eq!(parse_config(&cfg.to_string()).unwrap(), cfg);
    }

    #[test]
    fn errors() {
        let cases = [
            ("edit_threshold = 1.5", "config.out_of_range"),
            ("distinct_max_ratio = -0.1", "config.out_of_range"),
            ("fd_max_lhs = 0", "config.out_of_range"),
            ("edit_treshold = 0.3", "config.unknown_key"),
            ("just words", "config.malformed"),
            ("[synonyms]\nGray, Grey\nGrey, Silver", "config.synonym_overlap"),
            ("[annotations]\nfoo.bar = maybe", "config.malformed"),
            ("[nope]", "config.malformed"),
            ("casefold = perhaps", "config.malformed"),
        ];
        for (text, code) in cases {
            assert_eq!(parse_config(text).unwrap_err().code(), code, "{text}");
        }
        match parse_config("\n\nbogus").unwrap_err() {
            Error::ConfigMalformed { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
