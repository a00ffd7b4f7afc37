//! Model files, seeded families, scans, perturbation runs and reports.

pub mod corpus;
pub mod format;
pub mod perturb;
pub mod report;
pub mod scan;

pub use corpus::{
    a_family, coefficient_set, cone_family, corpus_basis, hj_family, random_corpus, smooth_family,
    transverse_family,
};
pub use format::{
    canonical_json, model_digest, model_to_document, parse_complement, parse_model, ModelDocument,
};
pub use perturb::{run_perturb_harness, PerturbConfig, PerturbReport, DISCLAIMER};
pub use report::{emit_report, emit_scan, scan_csv, to_json, ReportFormat, CSV_COLUMNS};
pub use scan::{check_instance, run_scan, Family, InstanceRecord, ScanConfig, ScanReport};
