use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports. Each variant maps to a stable,
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has no attribute `{attribute}`")]
    UnknownAttribute { relation: String, attribute: String },
    #[error("join pair `{left}` = `{right}` compares {left_type} with {right_type}")]
    JoinTypeMismatch {
        left: String,
        right: String,
        left_type: String,
        right_type: String,
    },
    #[error("row {row}: expected {expected} values, found {found}")]
    Arity { row: usize, expected: usize, found: usize },
    #[error("row {row}, column `{column}`: value does not match declared type {expected}")]
    TypeTag {
        row: usize,
        column: String,
        expected: String,
    },
    #[error("row {row}, column `{column}`: primary-key value is null")]
    NullKey { row: usize, column: String },
    #[error("row {row}: duplicate primary key in `{relation}`")]
    DuplicateKey { relation: String, row: usize },
    #[error("invalid declaration: {0}")]
    InvalidDecl(String),

    #[error("syntax error at {line}:{column}: expected {expected}, found {found}")]
    DdlSyntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("duplicate column `{column}` in table `{table}`")]
    DuplicateColumn { table: String, column: String },
    #[error("foreign key in `{table}` references missing {target}")]
    FkTargetMissing { table: String, target: String },
    #[error("foreign key in `{table}` uses unknown column `{column}`")]
    FkUnknownColumn { table: String, column: String },
    #[error("primary key of `{table}` names unknown column `{column}`")]
    PkUnknownColumn { table: String, column: String },
    #[error("invalid enumerated type on `{table}`.`{column}`: {reason}")]
    InvalidEnum {
        table: String,
        column: String,
        reason: String,
    },

    #[error("csv header mismatch: expected [{expected}], found [{found}]")]
    CsvHeader { expected: String, found: String },
    #[error("csv line {line}: expected {expected} fields, found {found}")]
    CsvRagged { line: u64, expected: usize, found: usize },
    #[error("csv line {line}, column `{column}`: cannot parse `{value}` as {expected}")]
    CsvParse {
        line: u64,
        column: String,
        value: String,
        expected: String,
    },
    #[error("csv line {line}, column `{column}`: `{value}` is not a permitted enum value")]
    CsvEnum { line: u64, column: String, value: String },
    #[error("csv line {line}: duplicate primary key")]
    CsvDuplicateKey { line: u64 },
    #[error("csv: {0}")]
    Csv(String),

    #[error("config line {line}: {message}")]
    ConfigMalformed { line: usize, message: String },
    #[error("config line {line}: unknown key `{key}`")]
    ConfigUnknownKey { line: usize, key: String },
    #[error("config: `{key}` out of range: {message}")]
    ConfigRange { key: String, message: String },
    #[error("config: value `{0}` appears in more than one synonym group")]
    ConfigSynonymOverlap(String),

    #[error("workload: malformed JSON: {0}")]
    WorkloadJson(String),
    #[error("workload op {index}: unknown op `{op}`")]
    WorkloadUnknownOp { index: usize, op: String },
    #[error("workload op {index}: {message}")]
    WorkloadField { index: usize, message: String },
    #[error("workload op {index}: {message}")]
    WorkloadValue { index: usize, message: String },

    #[error("{attributes} attributes exceed the candidate-key search limit of {limit}")]
    Capacity { attributes: usize, limit: usize },
    #[error("lookup table `{0}` collides with an existing relation or another lookup")]
    LookupCollision(String),
    #[error("strategy {strategy} is not supported for `{relation}`.`{attribute}` ({reason})")]
    UnsupportedStrategy {
        relation: String,
        attribute: String,
        strategy: String,
        reason: String,
    },
    #[error("stale plan: `{relation}`.`{attribute}` holds `{value}` which the rewrite map does not cover")]
    StaleRewrite {
        relation: String,
        attribute: String,
        value: String,
    },
    #[error("plan: {0}")]
    PlanJson(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownRelation(_) => "input.unknown_relation",
            Error::UnknownAttribute { .. } => "input.unknown_attribute",
            Error::JoinTypeMismatch { .. } => "input.join_type_mismatch",
            Error::Arity { .. } => "model.arity",
            Error::TypeTag { .. } => "model.type_tag",
            Error::NullKey { .. } => "model.null_key",
            Error::DuplicateKey { .. } => "model.duplicate_key",
            Error::InvalidDecl(_) => "model.invalid_decl",
            Error::DdlSyntax { .. } => "ddl.syntax",
            Error::DuplicateTable(_) => "ddl.duplicate_table",
            Error::DuplicateColumn { .. } => "ddl.duplicate_column",
            Error::FkTargetMissing { .. } => "ddl.fk_target_missing",
            Error::FkUnknownColumn { .. } => "ddl.fk_unknown_column",
            Error::PkUnknownColumn { .. } => "ddl.pk_unknown_column",
            Error::InvalidEnum { .. } => "ddl.invalid_enum",
            Error::CsvHeader { .. } => "csv.header_mismatch",
            Error::CsvRagged { .. } => "csv.ragged_row",
            Error::CsvParse { .. } => "csv.type_parse",
            Error::CsvEnum { .. } => "csv.enum_value",
            Error::CsvDuplicateKey { .. } => "csv.duplicate_key",
            Error::Csv(_) => "csv.malformed",
            Error::ConfigMalformed { .. } => "config.malformed",
            Error::ConfigUnknownKey { .. } => "config.unknown_key",
            Error::ConfigRange { .. } => "config.out_of_range",
            Error::ConfigSynonymOverlap(_) => "config.synonym_overlap",
            Error::WorkloadJson(_) => "workload.malformed_json",
            Error::WorkloadUnknownOp { .. } => "workload.unknown_op",
            Error::WorkloadField { .. } => "workload.missing_field",
            Error::WorkloadValue { .. } => "workload.bad_value",
            Error::Capacity { .. } => "fd.capacity",
            Error::LookupCollision(_) => "plan.lookup_collision",
            Error::UnsupportedStrategy { .. } => "plan.unsupported_strategy",
            Error::StaleRewrite { .. } => "plan.stale_rewrite",
            Error::PlanJson(_) => "plan.malformed",
            Error::Invariant(_) => "internal.invariant",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn unknown_attr(relation: &str, attribute: &str) -> Self {
        Error::UnknownAttribute {
            relation: relation.to_string(),
            attribute: attribute.to_string(),
        }
    }
}
