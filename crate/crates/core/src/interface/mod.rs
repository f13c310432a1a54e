//! Audit reports, config files, the command-line tool and the HTTP service.
//!
//! The CLI and the service build reports through the same functions and
//! render them with [`render_json`], so identical inputs give identical bytes.

pub mod cli;
pub mod config;
pub mod report;
pub mod service;

pub use config::{AuditConfig, RuleSpaceSpec};
pub use report::{
    optimize_request, render_json, render_table, run_audit, AuditReport, AuditSpec, Computed,
    DatasetSummary, OptimizeReport, OptimizeSpec, Provenance,
};
