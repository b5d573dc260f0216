//! Exact generator for the Weil-Petersson volume polynomial table.
//!
//! This crate is deliberately independent of the consumer library: it derives
//! every polynomial from intersection-number recursions (nothing is
//! transcribed beyond the two classical low-complexity entries used as
//! validation pins) and freezes the result as a JSON data file.  The consumer
//! treats that file as read-only data; its tests depend on this crate to
//! re-derive the table from scratch and compare.

pub mod intersection;
pub mod volume;

pub use intersection::Correlators;
pub use volume::{
    generate_table, render_table, surface_types, volume_polynomial, volume_polynomial_stack,
    EntryJson, ExactPolynomial, TableFile, TermJson,
};
