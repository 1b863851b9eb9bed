//! LDNF decomposition: planning, application, verification, migration SQL
//! and storage estimates.

mod apply;
mod plan;
mod sql;
mod storage;
mod verify;

pub use apply::apply_plan;
pub use plan::{
    build_plan, default_lookup_name, plan_clusters, third_nf_blockers, AttrRef, DecompositionPlan, PlanAction,
};
pub use sql::emit_migration_sql;
pub use storage::{column_text_bytes, enum_cell_bytes, estimate_storage, text_cell_bytes, StorageEstimate};
pub use verify::{
    is_ldnf, ldnf_report, verify_lossless, verify_value_sets, DanglingCell, LdnfReport, LdnfViolation, LosslessReport,
    OrderingWarning, SimilarPair, ValueSetReport,
};
