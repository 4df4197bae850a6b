//! Two-parameter families with a pair of window eigenvalues, their effective
//! 2x2 forms, and the winding and holonomy certificates that locate a double
//! eigenvalue.

mod certificate;
mod domain;
mod family;
mod form;
mod metric;
mod search;

pub use certificate::{eigenline_holonomy, loop_winding, Evaluator, HolonomyReport, LoopOptions, WindingReport};
pub use domain::DomainRect;
pub use family::{
    family, ring_profile, Assembly, FamilyParams, FamilySample, FormFamily, GadgetSlot, GluedFamily, SyntheticFamily,
};
pub use form::{effective_form, QuadraticForm2, OVERLAP_FLOOR};
pub use metric::{double_eigenvalue_metric, necks, search_with_retries, DoubleEigenvalueMetric, MetricCheck};
pub use search::{
    certify, diabolo_grid, find_degeneracy, grid_csv, transversality_report, Certificate, Degeneracy, GridRow,
    SearchOptions, TransversalityReport,
};
