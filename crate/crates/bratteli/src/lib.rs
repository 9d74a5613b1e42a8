//! Generalized Bratteli diagrams over countably infinite vertex levels:
//! exact windowed linear algebra on infinite non-negative matrices, a
//! Perron–Frobenius engine with recurrence classification, tail-invariant
//! measures (closed-form and inverse-limit), and Vershik adic maps with
//! constructive (dis)continuity witnesses.
//!
//! Start with the [`catalog`] module — it constructs every worked example
//! this library is built around, each with exact eigendata attached — and
//! the `examples/` directory of the crate, which has one runnable program
//! per capability.

pub mod catalog;
pub mod diagram;
pub mod exact;
pub mod matrix;
pub mod measure;
pub mod order;
pub mod report;
pub mod spectral;

pub use exact::{Quad, Rat};
pub use matrix::{IndexSet, Matrix, MatrixDescriptor, MatrixError, Vertex, Window};
