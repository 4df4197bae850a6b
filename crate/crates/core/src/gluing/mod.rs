//! Thin-handle gluing, union-spectrum convergence and dumbbell gadgets.

mod attach;
mod dumbbell;
mod scan;

pub use attach::{attach, AttachmentSpec, Glued, Weighted};
pub use dumbbell::{
    check_odd_symmetry, dumbbell, symmetry_ratio, DumbbellGadget, DumbbellReport, RING_SIZE, SUPPORTED, U_MAX,
};
pub use scan::{convergence_scan, union_spectrum, ConvergenceScan, ScanRow};
