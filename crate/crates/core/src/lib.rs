//! Exact arithmetic on truncated Laurent q-series, the classical smallest-parts
//! generating functions, weight 3/2 Hecke operators, and a verification harness
//! for the congruence families those objects satisfy.
//!
//! The crate is organized bottom-up:
//!
//! - [`series`]: truncated Laurent series with exact rational coefficients on a
//!   global 1/24 exponent lattice (the natural lattice for eta quotients).
//! - [`number_theory`]: Kronecker symbols, l-adic valuations, Hurwitz class
//!   numbers by reduced-form enumeration, Sturm bounds, divisor sums.
//! - [`generators`]: generating functions for p(n), overpartitions, spt(n) and
//!   its two relatives, each backed by an exhaustive enumeration oracle.
//! - [`forms`]: the named modular and mock-modular q-expansions (S, M, M*,
//!   Pbar, Mbar, fbar, gbar, R, S2, M2, the Zagier class-number series, and the
//!   eta-power ladders built from Hecke images).
//! - [`hecke`]: the weight 3/2 Hecke operator T(l^2) with quadratic character,
//!   higher index operators via the multiplicative recursion, and closed-form
//!   coefficient formulas for the F_m combinations.
//! - [`verify`]: congruence, eigenform, identity, and Sturm-certificate checks
//!   producing machine-readable reports.

pub mod forms;
pub mod generators;
pub mod hecke;
pub mod number_theory;
pub mod series;
pub mod verify;

pub use series::{QSeries, Rational, SeriesError};
