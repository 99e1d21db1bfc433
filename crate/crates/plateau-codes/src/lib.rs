//! Linear codes over odd-prime fields built from p-ary plateaued functions.
//!
//! The crate is organized around a pipeline:
//!
//! * [`field`] — exact arithmetic in `F_p`, small extension fields, and
//!   non-degenerate inner-product spaces on `F_p^n`;
//! * [`cyclotomic`] — exact arithmetic in `Z[ξ_p]`, so Walsh transforms and
//!   quadratic Gauss sums carry no rounding error;
//! * [`spectral`] — the Walsh transform engine, plateaued-function
//!   classification, dual profiles, and exponential-sum oracles;
//! * [`zoo`] — constructors for the function families used throughout
//!   (diagonal quadratic forms, Maiorana–McFarland style compositions, a
//!   polynomial DSL, truth-table I/O);
//! * [`codes`] — generator matrices, exact weight enumeration, MacWilliams
//!   duals, self-orthogonality / LCD / minimality predicates;
//! * [`analytic`] — closed-form weight-distribution predictions and the
//!   comparator against enumerated reports;
//! * [`derived`] — Steane-enlargement quantum parameters and the LCD
//!   generator constructions, with every precondition machine-checked;
//! * [`cli`] — the command-line front end and the verification harness.

pub mod analytic;
pub mod battery;
pub mod cli;
pub mod codes;
pub mod cyclotomic;
pub mod derived;
pub mod error;
pub mod field;
pub mod linalg;
pub mod report;
pub mod spectral;
pub mod zoo;

pub use error::Error;
