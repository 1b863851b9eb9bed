//! Whole-database analysis shared by the command line and the browser demo.

use serde::Serialize;

use crate::error::Result;
use crate::fd::{analyze_relation, NormalFormReport};
use crate::ingest::AnalysisConfig;
use crate::ldnf::{ldnf_report, LdnfReport};
use crate::model::Database;
use crate::nlda::{classify_attributes, AttributeClassification};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub normal_forms: Vec<NormalFormReport>,
    pub attributes: Vec<AttributeClassification>,
    pub ldnf: LdnfReport,
}

impl Analysis {
    /// Every relation passes 3NF and the database is in LDNF.
    pub fn is_clean(&self) -> bool {
        self.ldnf.is_ldnf && self.normal_forms.iter().all(NormalFormReport::third_nf_pass)
    }
}

pub fn analyze(db: &Database, config: &AnalysisConfig) -> Result<Analysis> {
    let normal_forms = db
        .instances()
        .iter()
        .map(|inst| analyze_relation(inst, config))
        .collect::<Result<Vec<_>>>()?;
    let attributes = classify_attributes(db, config)?;
    let ldnf = ldnf_report(db, config, &attributes, &normal_forms);
    Ok(Analysis {
        normal_forms,
        attributes,
        ldnf,
    })
}
